"""Command-line interface.

Exit codes: 0 success / accept, 1 reject, 2 usage, 3 io or transport error.
Errors are reported as a single ``error: <kind>: <message>`` line on stderr.
"""

import argparse
import json
import random
import secrets
import sys

from . import keys, report, signature
from .cost import CostModel, measure_cost
from .errors import DCIdentError, EncodingError, KeyFormatError, ParameterError
from .params import PRESETS, get_params
from .protocol import ProverSession, RandomChallenges, SessionConfig, VerifierSession
from .selftest import run_selftest
from .wire import (DEFAULT_TIMEOUT, IdentificationServer, WireProver, connect_and_prove,
                   make_session_id, save_transcript)

EXIT_OK, EXIT_REJECT, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _rng(seed, label=b""):
    if seed is None:
        return secrets.SystemRandom()
    return random.Random(seed + label)


def _seed(text):
    try:
        return bytes.fromhex(text)
    except ValueError:
        raise argparse.ArgumentTypeError("seed must be hexadecimal") from None


def _hostport(text):
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise argparse.ArgumentTypeError("expected HOST:PORT")
    return host or "127.0.0.1", int(port)


def _read(path):
    with open(path, "rb") as fh:
        return fh.read()


def _write(path, data):
    with open(path, "wb") as fh:
        fh.write(data)


def _emit(args, text, payload):
    print(json.dumps(payload) if args.json else text)


def _load_pub(path):
    return keys.deserialize_public(_read(path))


def _session_config(args, params):
    return SessionConfig(rounds=args.rounds or params.id_rounds, compressed=args.compressed,
                         cw_encoding=args.cw_encoding)


# ---------- commands

def cmd_keygen(args):
    params = get_params(args.params)
    sk, pk = keys.keygen(params, _rng(args.seed))
    _write(args.out + ".pub", keys.serialize_public(pk))
    _write(args.out + ".sec", keys.serialize_secret(sk, compact=args.compact))
    sizes = keys.key_sizes(params)
    _emit(args, "wrote %s.pub (%d payload bits) and %s.sec (%d payload bits)"
          % (args.out, sizes["public"], args.out, sizes["secret_compact" if args.compact else "secret_raw"]),
          {"public": args.out + ".pub", "secret": args.out + ".sec", "params": params.name, "sizes": sizes})
    return EXIT_OK


def _outcome_payload(tr, params, role):
    out = {"role": role, "accept": tr.accept, "reason": tr.reason.name.lower(),
           "fail_index": tr.fail_index, "detail": tr.detail}
    if tr.complete:
        out["cost"] = measure_cost(tr, CostModel(cw_encoding=tr.config.cw_encoding)).as_dict()
    return out


def _outcome_text(tr):
    if tr.accept:
        head = "ACCEPT"
    else:
        idx = "-" if tr.fail_index is None else str(tr.fail_index)
        head = "REJECT reason=%s index=%s (%s)" % (tr.reason.name.lower(), idx, tr.detail)
    if tr.complete:
        head += "\n" + measure_cost(tr, CostModel(cw_encoding=tr.config.cw_encoding)).format()
    return head


def cmd_identify(args):
    pk = _load_pub(args.pub)
    params = pk.params
    config = _session_config(args, params)
    if args.server:
        host, port = args.server
        rng = _rng(args.seed, b"verifier")
        results = []

        def on_result(tr):
            results.append(tr)
            _emit(args, _outcome_text(tr), _outcome_payload(tr, params, "verifier"))
            sys.stdout.flush()

        server = IdentificationServer((host, port), lambda: VerifierSession(pk, config, RandomChallenges(rng)),
                                      on_result, args.timeout)
        with server:
            bound = server.server_address
            print("listening on %s:%d" % (bound[0], bound[1]), flush=True)
            if args.once:
                # a non-daemon handler thread is joined by server_close()
                server.daemon_threads = False
                server.handle_request()
            else:
                server.serve_forever()
        if not results:
            return EXIT_IO
        return EXIT_OK if results[-1].accept else EXIT_REJECT
    if args.sec is None:
        raise UsageError("--client needs --sec")
    sk = keys.deserialize_secret(_read(args.sec), pk)
    host, port = args.client
    rng = _rng(args.seed, b"prover")
    prover = WireProver(ProverSession.honest(sk, pk, config, rng), make_session_id(rng))
    tr = connect_and_prove(host, port, prover, args.timeout)
    if args.transcript:
        _write(args.transcript, save_transcript(tr.frames))
    _emit(args, _outcome_text(tr), _outcome_payload(tr, params, "prover"))
    if tr.accept:
        return EXIT_OK
    return EXIT_IO if tr.reason.name in ("TIMEOUT", "TRANSPORT") else EXIT_REJECT


def cmd_sign(args):
    pk = _load_pub(args.pub)
    sk = keys.deserialize_secret(_read(args.sec), pk)
    sig = signature.sign(sk, pk, _read(args.message), _rng(args.seed), rounds=args.rounds,
                         cw_encoding=args.cw_encoding)
    data = sig.to_bytes()
    _write(args.out, data)
    rep = signature.size_report(sig, pk.params)
    _emit(args, "signed: %d rounds, %d payload bits (%d bytes on disk), expected %.0f bits"
          % (rep["rounds"], rep["payload_bits"], rep["file_bytes"], rep["expected_bits"]), rep)
    return EXIT_OK


def cmd_verify(args):
    pk = _load_pub(args.pub)
    data, message = _read(args.sig), _read(args.message)
    ok = signature.verify_signature(pk, message, data)
    payload = {"accept": ok}
    text = "ACCEPT" if ok else "REJECT"
    if ok:
        rep = signature.size_report(signature.decode_signature(data, pk, message), pk.params)
        payload.update(rep)
        text += ": %d rounds, %d payload bits (expected %.0f, published 93000)" % (
            rep["rounds"], rep["payload_bits"], rep["expected_bits"])
    _emit(args, text, payload)
    return EXIT_OK if ok else EXIT_REJECT


def cmd_cost_report(args):
    params = get_params(args.params)
    model = CostModel(hash_bits=args.hash_bits, seed_bits=args.seed_bits,
                      count_challenges=not args.no_challenges, cw_encoding=args.cw_encoding)
    rows = report.comparison(params, model, args.rounds)
    fmt = "json" if args.json else args.format
    if fmt == "csv":
        text = report.render_csv(rows)
    elif fmt == "json":
        text = report.render_json(params, rows)
    else:
        text = report.render_table(params, rows)
        text += "\n\n" + "\n\n".join(rep.format() for _, rep, _ in rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text)
    if args.figures:
        for path in report.write_figures(params, rows, args.figures):
            print("figure: %s" % path, file=sys.stderr)
    return EXIT_OK


def cmd_selftest(args):
    results = run_selftest()
    ok = all(passed for _, passed in results)
    text = "\n".join("%s %s" % ("PASS" if passed else "FAIL", name) for name, passed in results)
    _emit(args, text, {"ok": ok, "checks": [{"name": n, "passed": p} for n, p in results]})
    return EXIT_OK if ok else EXIT_REJECT


# ---------- parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=_seed, help="hex seed for deterministic runs")

    session = argparse.ArgumentParser(add_help=False)
    session.add_argument("--rounds", type=int, help="rounds (default: preset value)")
    session.add_argument("--compressed", action=argparse.BooleanOptionalAction, default=True)
    session.add_argument("--cw-encoding", action="store_true", help="send sigma(e_r) as a constant-weight rank")

    parser = argparse.ArgumentParser(prog="dcident", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", parents=[common], help="generate a key pair")
    p.add_argument("--params", choices=sorted(PRESETS), default="p81")
    p.add_argument("--out", required=True, help="output prefix; writes PREFIX.pub and PREFIX.sec")
    p.add_argument("--compact", action="store_true", help="store only e in the secret key file")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("identify", parents=[common, session], help="run an identification session over TCP")
    role = p.add_mutually_exclusive_group(required=True)
    role.add_argument("--server", type=_hostport, metavar="HOST:PORT")
    role.add_argument("--client", type=_hostport, metavar="HOST:PORT")
    p.add_argument("--pub", required=True)
    p.add_argument("--sec")
    p.add_argument("--once", action="store_true", help="server: exit after one session")
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)
    p.add_argument("--transcript", help="client: save the session frames to this file")
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("sign", parents=[common], help="sign a file")
    p.add_argument("--pub", required=True)
    p.add_argument("--sec", required=True)
    p.add_argument("--message", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rounds", type=int)
    p.add_argument("--cw-encoding", action="store_true")
    p.set_defaults(func=cmd_sign)

    p = sub.add_parser("verify", parents=[common], help="verify a signature")
    p.add_argument("--pub", required=True)
    p.add_argument("--message", required=True)
    p.add_argument("--sig", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cost-report", parents=[common], help="communication cost comparison")
    p.add_argument("--params", choices=sorted(PRESETS), default="p81")
    p.add_argument("--rounds", type=int)
    p.add_argument("--cw-encoding", action="store_true")
    p.add_argument("--hash-bits", type=int, default=160)
    p.add_argument("--seed-bits", type=int, default=128)
    p.add_argument("--no-challenges", action="store_true", help="leave verifier challenges out of totals")
    p.add_argument("--format", choices=["table", "csv", "json"], default="table")
    p.add_argument("--figures", metavar="DIR", help="write PNG figures to DIR")
    p.add_argument("--out", help="write the report to a file instead of stdout")
    p.set_defaults(func=cmd_cost_report)

    p = sub.add_parser("selftest", parents=[common], help="toy-size exhaustive invariant checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print("error: usage: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except (KeyFormatError, EncodingError) as exc:
        print("error: format: %s" % exc, file=sys.stderr)
        return EXIT_IO
    except ParameterError as exc:
        print("error: usage: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except DCIdentError as exc:
        print("error: protocol: %s" % exc, file=sys.stderr)
        return EXIT_REJECT
    except OSError as exc:
        print("error: io: %s" % exc, file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
