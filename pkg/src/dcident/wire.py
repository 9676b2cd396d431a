"""
Byte-level framing of identification sessions, transports and transcript files.

Every message travels as one frame::

    length      4 bytes   big-endian length of the rest of the frame
    session id  8 bytes
    pass        1 byte    1 Commit1, 2 Shifts, 3 Commit3, 4 Bits, 5 Answers, 6 Result
    payload     rest

Pass payloads (bit fields are packed little-endian and zero padded to a byte)::

    Commit1   params id u16 BE | rounds u16 BE | flags u8 (1 compressed, 2 cw) |
              hash bits u16 BE | seed bits u16 BE |
              master digest  or  rounds x (c1, c2)
    Shifts    rounds x ceil(log2 k)-bit shifts
    Commit3   master digest  or  rounds x c3
    Bits      rounds x 1 bit
    Answers   per round, in order:
                [revealed digest]            compressed mode only
                b = 0:  y (k bits) | sigma seed (seed bits)
                b = 1:  v (n bits) | t (n bits, or ceil(log2 C(n, w)) rank bits)
    Result    accept u8 | reason u8 | failing round u16 BE (0xFFFF = none)

Transcript files are ``b"DCZT" | version u8`` followed by the frames in the
order they were exchanged.
"""

import enum
import logging
import queue
import socket
import socketserver
import struct
import threading
from dataclasses import dataclass

from .errors import EncodingError, ProtocolError, WireError
from .gf2 import BitReader, BitWriter, cw_bits, cw_rank, cw_unrank
from .params import get_params
from .protocol import (Answers, Bits, Commit1, Commit3, FixedChallenges, Reason,
                       Result, RoundAnswer, SessionConfig, Shifts, Transcript, VerifierSession)

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 30.0
MAX_FRAME = 1 << 24
TRANSCRIPT_MAGIC = b"DCZT"
TRANSCRIPT_VERSION = 1
NO_INDEX = 0xFFFF

_LEN = struct.Struct(">I")
_C1_HEADER = struct.Struct(">HHBHH")
_RESULT = struct.Struct(">BBH")


class PassType(enum.IntEnum):
    COMMIT1 = 1
    SHIFTS = 2
    COMMIT3 = 3
    BITS = 4
    ANSWERS = 5
    RESULT = 6


_PASS_OF = {Commit1: PassType.COMMIT1, Shifts: PassType.SHIFTS, Commit3: PassType.COMMIT3,
            Bits: PassType.BITS, Answers: PassType.ANSWERS, Result: PassType.RESULT}


@dataclass(frozen=True)
class Message:
    session_id: bytes
    pass_type: PassType
    payload: bytes


def frame(msg):
    if len(msg.session_id) != 8:
        raise WireError("session id must be 8 bytes", "session_id")
    body = msg.session_id + bytes([msg.pass_type]) + msg.payload
    return _LEN.pack(len(body)) + body


def parse(data):
    """Inverse of :func:`frame`.  Raises WireError naming the bad field."""
    data = bytes(data)
    if len(data) < 4:
        raise WireError("truncated length prefix", "length")
    (length,) = _LEN.unpack_from(data)
    if length > MAX_FRAME:
        raise WireError("frame too large", "length")
    if len(data) - 4 < length:
        raise WireError("frame truncated: %d of %d bytes" % (len(data) - 4, length), "body")
    if len(data) - 4 > length:
        raise WireError("trailing bytes after frame", "body")
    if length < 8:
        raise WireError("truncated session id", "session_id")
    if length < 9:
        raise WireError("missing pass tag", "pass")
    try:
        pass_type = PassType(data[12])
    except ValueError:
        raise WireError("unknown pass tag %d" % data[12], "pass") from None
    return Message(data[4:12], pass_type, data[13:])


# ---------- pass payload codecs

def _digest_list(payload, count, nbytes, field):
    if len(payload) != count * nbytes:
        raise WireError("%s: expected %d bytes, got %d" % (field, count * nbytes, len(payload)), field)
    return tuple(payload[i * nbytes:(i + 1) * nbytes] for i in range(count))


def encode_payload(obj, params, config):
    """Serialise a pass message for a session with the given params and config."""
    if isinstance(obj, Commit1):
        flags = (1 if obj.compressed else 0) | (2 if obj.cw_encoding else 0)
        head = _C1_HEADER.pack(obj.params_id, obj.rounds, flags, obj.hash_bits, obj.seed_bits)
        if obj.master is not None:
            return head + obj.master
        return head + b"".join(c1 + c2 for c1, c2 in obj.leaves)
    if isinstance(obj, Shifts):
        out = BitWriter()
        for r in obj.shifts:
            out.write(r, params.shift_bits)
        return out.getvalue()
    if isinstance(obj, Commit3):
        return obj.master if obj.master is not None else b"".join(obj.leaves)
    if isinstance(obj, Bits):
        out = BitWriter()
        for b in obj.bits:
            out.write(b, 1)
        return out.getvalue()
    if isinstance(obj, Answers):
        out = BitWriter()
        for ans in obj.answers:
            if config.compressed:
                out.write_bytes(ans.revealed)
            if ans.b == 0:
                out.write_word(ans.y)
                out.write_bytes(ans.sigma_seed)
            else:
                out.write_word(ans.v)
                if config.cw_encoding:
                    out.write(cw_rank(ans.t, params.w), cw_bits(params.n, params.w))
                else:
                    out.write_word(ans.t)
        return out.getvalue()
    if isinstance(obj, Result):
        index = NO_INDEX if obj.index is None else obj.index
        return _RESULT.pack(1 if obj.accept else 0, int(obj.reason), index)
    raise WireError("cannot encode %r" % type(obj).__name__)


def decode_commit1(payload):
    if len(payload) < _C1_HEADER.size:
        raise WireError("truncated Commit1 header", "commit1.header")
    pid, rounds, flags, hash_bits, seed_bits = _C1_HEADER.unpack_from(payload)
    if flags & ~3:
        raise WireError("unknown flag bits", "commit1.flags")
    if rounds == 0 or hash_bits == 0 or hash_bits % 8 or seed_bits == 0 or seed_bits % 8:
        raise WireError("invalid session header", "commit1.header")
    body = payload[_C1_HEADER.size:]
    hb = hash_bits // 8
    compressed = bool(flags & 1)
    head = dict(params_id=pid, rounds=rounds, compressed=compressed, cw_encoding=bool(flags & 2),
                hash_bits=hash_bits, seed_bits=seed_bits)
    if compressed:
        (master,) = _digest_list(body, 1, hb, "commit1.master")
        return Commit1(master=master, **head)
    flat = _digest_list(body, 2 * rounds, hb, "commit1.leaves")
    return Commit1(leaves=tuple(zip(flat[0::2], flat[1::2])), **head)


def decode_payload(pass_type, payload, params, config, bits=None):
    """Parse a pass payload; ``bits`` (the challenge bits) is needed for Answers."""
    rounds, hb = config.rounds, config.hash_bits // 8
    try:
        if pass_type == PassType.COMMIT1:
            return decode_commit1(payload)
        if pass_type == PassType.SHIFTS:
            reader = BitReader(payload, WireError)
            shifts = tuple(reader.read(params.shift_bits, "shifts") for _ in range(rounds))
            reader.finish()
            if any(r >= params.k for r in shifts):
                raise WireError("shift out of range", "shifts")
            return Shifts(shifts)
        if pass_type == PassType.COMMIT3:
            if config.compressed:
                return Commit3(master=_digest_list(payload, 1, hb, "commit3.master")[0])
            return Commit3(leaves=_digest_list(payload, rounds, hb, "commit3.leaves"))
        if pass_type == PassType.BITS:
            reader = BitReader(payload, WireError)
            out = tuple(reader.read(1, "bits") for _ in range(rounds))
            reader.finish()
            return Bits(out)
        if pass_type == PassType.ANSWERS:
            if bits is None or len(bits) != rounds:
                raise WireError("answers cannot be parsed without the challenge bits", "answers")
            return Answers(_decode_answers(payload, params, config, bits))
        if pass_type == PassType.RESULT:
            if len(payload) != _RESULT.size:
                raise WireError("Result must be %d bytes" % _RESULT.size, "result")
            accept, reason, index = _RESULT.unpack(payload)
            if accept not in (0, 1):
                raise WireError("bad accept flag", "result.accept")
            try:
                reason = Reason(reason)
            except ValueError:
                raise WireError("unknown reason %d" % reason, "result.reason") from None
            return Result(bool(accept), reason, None if index == NO_INDEX else index)
    except WireError:
        raise
    except EncodingError as exc:
        raise WireError(str(exc), getattr(exc, "field", None)) from None
    raise WireError("unknown pass type", "pass")


def _decode_answers(payload, params, config, bits):
    reader = BitReader(payload, WireError)
    hb = config.hash_bits // 8
    n, k, w = params.n, params.k, params.w
    out = []
    for j, b in enumerate(bits):
        revealed = reader.read_bytes(hb, "answers[%d].revealed" % j) if config.compressed else None
        if b == 0:
            y = reader.read_word(k, "answers[%d].y" % j)
            seed = reader.read_bytes(config.seed_bytes, "answers[%d].seed" % j)
            out.append(RoundAnswer(0, y=y, sigma_seed=seed, revealed=revealed))
        else:
            v = reader.read_word(n, "answers[%d].v" % j)
            if config.cw_encoding:
                rank = reader.read(cw_bits(n, w), "answers[%d].t" % j)
                try:
                    t = cw_unrank(rank, n, w)
                except EncodingError:
                    raise WireError("constant-weight rank out of range", "answers[%d].t" % j) from None
            else:
                t = reader.read_word(n, "answers[%d].t" % j)
            out.append(RoundAnswer(1, v=v, t=t, revealed=revealed))
    reader.finish()
    return tuple(out)


# ---------- byte-level endpoints

class WireProver:
    """Wraps a ProverSession; any malformed input raises ProtocolError (the prover aborts)."""

    def __init__(self, session, session_id):
        self.session = session
        self.session_id = bytes(session_id)
        self.params = session.pk.params
        self.config = session.config
        self.messages = []
        self._bits = None

    def _out(self, obj):
        self.messages.append(obj)
        return frame(Message(self.session_id, _PASS_OF[type(obj)],
                             encode_payload(obj, self.params, self.config)))

    def start(self):
        return self._out(self.session.start())

    def handle(self, data):
        try:
            msg = parse(data)
            if msg.session_id != self.session_id:
                raise WireError("session id mismatch", "session_id")
            obj = decode_payload(msg.pass_type, msg.payload, self.params, self.config)
        except WireError as exc:
            raise ProtocolError("malformed message (%s): %s" % (exc.field, exc)) from None
        self.messages.append(obj)
        reply = self.session.handle(obj)
        return None if reply is None else self._out(reply)


class WireVerifier:
    """Wraps a VerifierSession; malformed input produces a rejecting Result frame."""

    def __init__(self, session):
        self.session = session
        self.params = session.pk.params
        self.config = session.config
        self.session_id = None
        self.messages = []
        self._bits = None

    @property
    def done(self):
        return self.session.done

    def _out(self, obj):
        self.messages.append(obj)
        if isinstance(obj, Bits):
            self._bits = obj.bits
        sid = self.session_id or bytes(8)
        return frame(Message(sid, _PASS_OF[type(obj)], encode_payload(obj, self.params, self.config)))

    def handle(self, data):
        if self.done:
            return self._out(self.session.result)
        try:
            msg = parse(data)
        except WireError as exc:
            return self._out(self.session.reject(Reason.MALFORMED, detail="%s: %s" % (exc.field, exc)))
        if self.session_id is None:
            self.session_id = msg.session_id
        elif msg.session_id != self.session_id:
            return self._out(self.session.reject(Reason.DESYNC, detail="session id changed"))
        try:
            obj = decode_payload(msg.pass_type, msg.payload, self.params, self.config, self._bits)
        except WireError as exc:
            reason = Reason.MALFORMED
            if msg.pass_type == PassType.ANSWERS and self._bits is None:
                reason = Reason.DESYNC
            return self._out(self.session.reject(reason, detail="%s: %s" % (exc.field, exc)))
        self.messages.append(obj)
        return self._out(self.session.handle(obj))

    def fail(self, reason, detail):
        if not self.done:
            self.session.reject(reason, detail=detail)


# ---------- transports

class PipeTransport:
    """One end of an in-process, ordered, reliable byte pipe carrying whole frames."""

    def __init__(self, inbox, outbox, timeout=DEFAULT_TIMEOUT):
        self._in, self._out, self.timeout = inbox, outbox, timeout

    @classmethod
    def pair(cls, timeout=DEFAULT_TIMEOUT):
        a, b = queue.Queue(), queue.Queue()
        return cls(a, b, timeout), cls(b, a, timeout)

    def send(self, data):
        self._out.put(bytes(data))

    def recv(self):
        try:
            item = self._in.get(timeout=self.timeout)
        except queue.Empty:
            raise TimeoutError("no message within %.1f s" % self.timeout) from None
        if item is None:
            raise ConnectionError("peer closed the pipe")
        return item

    def close(self):
        self._out.put(None)


def _recv_exact(sock, n):
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ConnectionError("connection closed after %d of %d bytes" % (len(buf), n))
        buf += chunk
    return bytes(buf)


class TcpTransport:
    """Length-prefixed frames over a connected stream socket."""

    def __init__(self, sock, timeout=DEFAULT_TIMEOUT):
        self.sock = sock
        self.timeout = timeout
        sock.settimeout(timeout)

    @classmethod
    def connect(cls, host, port, timeout=DEFAULT_TIMEOUT):
        return cls(socket.create_connection((host, port), timeout=timeout), timeout)

    def send(self, data):
        self.sock.sendall(data)

    def recv(self):
        try:
            head = _recv_exact(self.sock, 4)
            (length,) = _LEN.unpack(head)
            if length > MAX_FRAME:
                raise ConnectionError("peer announced an oversized frame")
            return head + _recv_exact(self.sock, length)
        except socket.timeout:
            raise TimeoutError("no message within %.1f s" % self.timeout) from None

    def close(self):
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.sock.close()


# ---------- session runner

def _finish(endpoint, frames, result=None, reason=None, detail=""):
    session = endpoint.session
    tr = Transcript(session.pk.params, session.config, list(endpoint.messages))
    tr.frames = frames
    if result is not None:
        tr.accept, tr.reason, tr.fail_index = result.accept, result.reason, result.index
        tr.detail = detail or getattr(session, "detail", "")
    else:
        tr.accept, tr.reason, tr.detail = False, reason, detail
    return tr


def run_session(transport, role, endpoint):
    """Drive ``endpoint`` (a WireProver or WireVerifier) over ``transport``.

    Returns a Transcript whose ``frames`` lists every frame sent or received,
    in order.  Timeouts, transport errors and protocol violations all end in a
    rejecting transcript.
    """
    frames = []
    if role == "prover":
        try:
            out = endpoint.start()
            frames.append(out)
            transport.send(out)
            while True:
                data = transport.recv()
                frames.append(data)
                out = endpoint.handle(data)
                if out is None:
                    break
                frames.append(out)
                transport.send(out)
        except TimeoutError as exc:
            return _finish(endpoint, frames, reason=Reason.TIMEOUT, detail=str(exc))
        except (ConnectionError, OSError) as exc:
            return _finish(endpoint, frames, reason=Reason.TRANSPORT, detail=str(exc))
        except ProtocolError as exc:
            return _finish(endpoint, frames, reason=Reason.ABORTED, detail=str(exc))
        return _finish(endpoint, frames, endpoint.session.result)
    if role == "verifier":
        try:
            while not endpoint.done:
                data = transport.recv()
                frames.append(data)
                out = endpoint.handle(data)
                frames.append(out)
                transport.send(out)
        except TimeoutError as exc:
            endpoint.fail(Reason.TIMEOUT, str(exc))
        except (ConnectionError, OSError) as exc:
            endpoint.fail(Reason.TRANSPORT, str(exc))
        session = endpoint.session
        return _finish(endpoint, frames, session.result, detail=session.detail)
    raise ValueError("role must be 'prover' or 'verifier'")


def make_session_id(rng):
    return rng.randbytes(8)


def run_pipe_session(prover, verifier, timeout=DEFAULT_TIMEOUT):
    """Run both ends over an in-process pipe (two threads); returns (prover, verifier) transcripts."""
    p_end, v_end = PipeTransport.pair(timeout)
    out = {}

    def go(role, transport, endpoint):
        try:
            out[role] = run_session(transport, role, endpoint)
        finally:
            transport.close()

    threads = [threading.Thread(target=go, args=("prover", p_end, prover)),
               threading.Thread(target=go, args=("verifier", v_end, verifier))]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    return out["prover"], out["verifier"]


class _Handler(socketserver.BaseRequestHandler):
    def handle(self):
        server = self.server
        verifier = WireVerifier(server.verifier_factory())
        transport = TcpTransport(self.request, server.timeout)
        tr = run_session(transport, "verifier", verifier)
        log.info("session %s from %s: %s", (verifier.session_id or b"").hex(), self.client_address,
                 "ACCEPT" if tr.accept else "REJECT (%s)" % tr.detail)
        if server.on_result is not None:
            server.on_result(tr)


class IdentificationServer(socketserver.ThreadingTCPServer):
    """Verifier service: one thread and one VerifierSession per connection."""

    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address, verifier_factory, on_result=None, timeout=DEFAULT_TIMEOUT):
        self.verifier_factory = verifier_factory
        self.on_result = on_result
        self.timeout = timeout
        super().__init__(address, _Handler)


def connect_and_prove(host, port, prover, timeout=DEFAULT_TIMEOUT):
    transport = TcpTransport.connect(host, port, timeout)
    try:
        return run_session(transport, "prover", prover)
    finally:
        transport.close()


# ---------- transcript files

def save_transcript(frames):
    return TRANSCRIPT_MAGIC + bytes([TRANSCRIPT_VERSION]) + b"".join(frames)


def load_transcript(data):
    """Split a transcript file into frames (each still carrying its length prefix)."""
    data = bytes(data)
    if data[:4] != TRANSCRIPT_MAGIC:
        raise WireError("bad transcript magic", "magic")
    if len(data) < 5 or data[4] != TRANSCRIPT_VERSION:
        raise WireError("unsupported transcript version", "version")
    pos, frames = 5, []
    while pos < len(data):
        if len(data) - pos < 4:
            raise WireError("truncated frame length", "length")
        (length,) = _LEN.unpack_from(data, pos)
        end = pos + 4 + length
        if end > len(data):
            raise WireError("truncated frame", "body")
        frames.append(data[pos:end])
        pos = end
    return frames


def replay_transcript(pk, frames):
    """Re-verify a recorded session: returns True iff it is an accepting, self-consistent run.

    The recorded challenges are replayed into a fresh verifier, which must
    reproduce every verifier frame byte for byte.
    """
    try:
        msgs = [parse(f) for f in frames]
        if len(msgs) < 2 or msgs[0].pass_type != PassType.COMMIT1:
            return False
        head = decode_commit1(msgs[0].payload)
        params = get_params(head.params_id)
        if params != pk.params:
            return False
        config = SessionConfig(head.rounds, head.compressed, head.cw_encoding, head.hash_bits,
                               head.seed_bits)
        shifts, bits = [], []
        for m in msgs:
            if m.pass_type == PassType.SHIFTS:
                shifts = decode_payload(m.pass_type, m.payload, params, config).shifts
            elif m.pass_type == PassType.BITS:
                bits = decode_payload(m.pass_type, m.payload, params, config).bits
    except (WireError, EncodingError, KeyError, ValueError):
        return False
    verifier = WireVerifier(VerifierSession(pk, config, FixedChallenges(shifts, bits)))
    for idx in range(0, len(frames), 2):
        reply = verifier.handle(frames[idx])
        if idx + 1 >= len(frames) or reply != frames[idx + 1]:
            return False
        if verifier.done:
            return idx + 2 == len(frames) and verifier.session.result.accept
    return False
