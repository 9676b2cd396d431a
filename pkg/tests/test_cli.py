import json
import os
import subprocess
import sys

import pytest

from dcident import keys
from dcident.cli import main

SEED = "0a0b0c"


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture
def keypair(tmp_path):
    prefix = tmp_path / "alice"
    assert run("keygen", "--params", "p81", "--out", prefix, "--seed", SEED) == 0
    return str(prefix) + ".pub", str(prefix) + ".sec"


def test_keygen_deterministic(tmp_path, keypair):
    prefix = tmp_path / "again"
    assert run("keygen", "--params", "p81", "--out", prefix, "--seed", SEED) == 0
    for ext, orig in zip((".pub", ".sec"), keypair):
        assert open(str(prefix) + ext, "rb").read() == open(orig, "rb").read()
    pk = keys.deserialize_public(open(keypair[0], "rb").read())
    sk = keys.deserialize_secret(open(keypair[1], "rb").read())
    assert keys.is_consistent(sk, pk)


def test_keygen_compact(tmp_path, keypair):
    prefix = tmp_path / "c"
    assert run("keygen", "--out", prefix, "--seed", SEED, "--compact") == 0
    pk = keys.deserialize_public(open(keypair[0], "rb").read())
    assert keys.deserialize_secret(open(str(prefix) + ".sec", "rb").read(), pk).e.weight() == 70


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        run("keygen", "--params", "p81")
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        run("cost-report", "--params", "p99")
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        run("keygen", "--out", "x", "--seed", "zz")
    assert info.value.code == 2


def test_malformed_key_file(tmp_path, keypair, capsys):
    bad = tmp_path / "bad.pub"
    bad.write_bytes(b"DCPK\x01\x00\x00junk")
    msg = tmp_path / "m.txt"
    msg.write_bytes(b"hi")
    assert run("verify", "--pub", bad, "--message", msg, "--sig", bad) == 3
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("error: format:")
    assert run("verify", "--pub", tmp_path / "missing", "--message", msg, "--sig", bad) == 3


def test_sign_and_verify(tmp_path, keypair, capsys):
    pub, sec = keypair
    msg = tmp_path / "m.txt"
    msg.write_bytes(b"hello world")
    sig = tmp_path / "m.sig"
    assert run("sign", "--pub", pub, "--sec", sec, "--message", msg, "--out", sig, "--seed", SEED) == 0
    assert run("verify", "--pub", pub, "--message", msg, "--sig", sig) == 0
    assert "ACCEPT" in capsys.readouterr().out
    msg.write_bytes(b"hello world!")
    assert run("verify", "--pub", pub, "--message", msg, "--sig", sig) == 1
    assert "REJECT" in capsys.readouterr().out


def test_cost_report_csv_and_figures(tmp_path, capsys):
    figs = tmp_path / "figs"
    assert run("cost-report", "--params", "p81", "--format", "csv", "--figures", figs) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert out[0].startswith("scheme,rounds,total_bits")
    rows = {line.split(",")[0]: line.split(",") for line in out[1:]}
    assert float(rows["New protocol"][2]) == pytest.approx(20237, abs=1)
    assert sorted(os.listdir(figs)) == ["cheating_p81.png", "cost_breakdown_p81.png"]
    for name in os.listdir(figs):
        assert (figs / name).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_cost_report_json_and_table(tmp_path, capsys):
    assert run("cost-report", "--params", "toy", "--json") == 0
    data = json.loads(capsys.readouterr().out)
    assert data["summary"]["params"] == "toy" and len(data["rows"]) == 7
    out = tmp_path / "r.txt"
    assert run("cost-report", "--out", out) == 0
    assert "20080" in out.read_text()


def test_selftest(capsys):
    assert run("selftest") == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)


def _identify(pub, sec, *extra):
    env = dict(os.environ)
    server = subprocess.Popen([sys.executable, "-m", "dcident", "identify", "--server", "127.0.0.1:0",
                               "--pub", pub, "--once", "--timeout", "20", "--seed", "01", *extra],
                              stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True, env=env)
    try:
        line = server.stdout.readline().strip()
        assert line.startswith("listening on ")
        port = line.rsplit(":", 1)[1]
        client = subprocess.run([sys.executable, "-m", "dcident", "identify", "--client", "127.0.0.1:" + port,
                                 "--pub", pub, "--sec", sec, "--seed", "02", *extra],
                                capture_output=True, text=True, timeout=60)
        server_out, _ = server.communicate(timeout=60)
    finally:
        server.kill()
    return client, server.returncode, server_out


def test_identify_loopback(keypair, tmp_path):
    pub, sec = keypair
    client, scode, sout = _identify(pub, sec, "--transcript", str(tmp_path / "t.bin"))
    assert client.returncode == 0 and client.stdout.startswith("ACCEPT")
    assert scode == 0 and "ACCEPT" in sout
    assert (tmp_path / "t.bin").read_bytes()[:4] == b"DCZT"


def test_identify_wrong_secret(keypair, tmp_path):
    pub, _ = keypair
    other = tmp_path / "bob"
    assert run("keygen", "--out", other, "--seed", "ff") == 0
    client, scode, sout = _identify(pub, str(other) + ".sec", "--no-compressed")
    assert client.returncode == 1 and scode == 1
    assert client.stdout.startswith("REJECT reason=round_failed index=")
    assert "index=-" not in client.stdout.splitlines()[0]


def test_identify_client_needs_secret(keypair):
    assert run("identify", "--client", "127.0.0.1:1", "--pub", keypair[0]) == 2
