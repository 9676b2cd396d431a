import hashlib

import pytest

from dcident import commit as cm
from dcident.errors import ParameterError


def test_default_is_truncated_sha256():
    h = cm.Hasher()
    assert h.nbytes == 20
    assert h(0x01, b"abc") == hashlib.sha256(b"\x01abc").digest()[:20]
    assert h.full(0x01, b"abc") == hashlib.sha256(b"\x01abc").digest()


def test_tags_are_distinct_domains():
    assert len(set(cm.TAGS.values())) == len(cm.TAGS)
    h = cm.DEFAULT_HASHER
    assert h(cm.TAG_C1, b"x") != h(cm.TAG_C2, b"x")


def test_commit_deterministic_and_binding():
    assert cm.commit(cm.TAG_C3, b"payload") == cm.commit(cm.TAG_C3, b"payload")
    assert cm.commit(cm.TAG_C3, b"payload") != cm.commit(cm.TAG_C3, b"payloae")


def test_hasher_validation():
    with pytest.raises(ParameterError):
        cm.Hasher(bits=100)
    with pytest.raises(ParameterError):
        cm.Hasher(bits=264)
    assert cm.Hasher("sha512", 512).nbytes == 64
    assert cm.hash_bits_of(cm.Hasher(bits=256)) == 256


def test_master_round_trip():
    leaves = [cm.commit(cm.TAG_C1, bytes([j])) for j in range(6)]
    master = cm.compress(leaves)
    assert master.count == 6
    assert master.digest == cm.DEFAULT_HASHER(cm.TAG_MASTER1, b"".join(leaves))
    assert cm.verify_master(master, leaves)


def test_master_detects_changes():
    leaves = [cm.commit(cm.TAG_C1, bytes([j])) for j in range(4)]
    master = cm.compress(leaves)
    swapped = [leaves[1], leaves[0]] + leaves[2:]
    assert not cm.verify_master(master, swapped)
    assert "count" in cm.check_master(master, leaves[:3])
    assert cm.check_master(master, leaves[:3] + [b"\x00" * 19]) is not None
    flipped = leaves[:3] + [bytes([leaves[3][0] ^ 1]) + leaves[3][1:]]
    assert cm.check_master(master, flipped) == "master digest mismatch"
    assert not cm.verify_master(master, leaves, tag=cm.TAG_MASTER2)


def test_compress_rejects_bad_input():
    with pytest.raises(ParameterError):
        cm.compress([])
    with pytest.raises(ParameterError):
        cm.compress([b"short"])
