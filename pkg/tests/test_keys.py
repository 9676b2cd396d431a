import random

import pytest

from dcident import keys
from dcident.errors import KeyFormatError, ParameterError
from dcident.gf2 import BitWord, block_rot, rot_block
from dcident.params import P81, TOY


def test_keygen_consistent(p81_keys):
    sk, pk = p81_keys
    assert keys.is_consistent(sk, pk)
    assert sk.e.weight() == 70 and pk.x.length == 698 and pk.a_row.length == 349
    assert pk.code.syndrome(pk.x) == pk.code.syndrome(sk.e)


def test_keygen_deterministic_under_seed():
    a = keys.keygen(TOY, random.Random(1))
    b = keys.keygen(TOY, random.Random(1))
    assert a == b


def test_zero_weight_example():
    rng = random.Random(3)
    a_row, e, m, x = keys.generate_keypair(5, 0, rng)
    assert e == BitWord(10)
    code = keys.DoubleCirculantCode(a_row)
    assert x == code.encode(m)
    assert code.syndrome(x) == BitWord(5)


def test_degenerate_orbit_rejected():
    rng = random.Random(5)
    # k = 4, w = 4: a word like 1010|1010 is fixed by rotation by 2
    assert keys.is_orbit_degenerate(BitWord.from_bits([1, 0, 1, 0, 1, 0, 1, 0]))
    assert not keys.is_orbit_degenerate(BitWord.from_bits([1, 1, 0, 0, 0, 0, 0, 0]))
    for _ in range(50):
        _, e, _, _ = keys.generate_keypair(4, 4, rng)
        assert not keys.is_orbit_degenerate(e)


def test_shift_identity_on_keys(p81_keys):
    sk, pk = p81_keys
    rng = random.Random(9)
    for r in [0, 1, 2, 348] + [rng.randrange(349) for _ in range(10)]:
        rot = keys.rotated_secret(sk, r)
        assert rot.e == block_rot(sk.e, r) and rot.m == rot_block(sk.m, r)
        assert keys.shifted_public(pk, r) == pk.code.encode(rot.m) ^ rot.e


def test_secret_key_validation():
    with pytest.raises(ParameterError):
        keys.SecretKey(TOY, BitWord(14), BitWord(7))
    with pytest.raises(ParameterError):
        keys.SecretKey(TOY, BitWord.from_support(14, [0, 1]), BitWord(6))


def test_serialisation_round_trip(p81_keys):
    sk, pk = p81_keys
    pub = keys.serialize_public(pk)
    assert len(pub) == 7 + (349 + 698 + 7) // 8
    assert keys.deserialize_public(pub) == pk
    assert keys.deserialize_secret(keys.serialize_secret(sk)) == sk
    compact = keys.serialize_secret(sk, compact=True)
    assert len(compact) == 7 + 698 // 8 + 1
    assert keys.deserialize_secret(compact, pk) == sk


def test_key_sizes_match_table():
    sizes = keys.key_sizes(P81)
    assert sizes["matrix"] == 349 and sizes["public_id"] == 698 and sizes["secret_compact"] == 698


def test_malformed_key_files(toy_keys, p81_keys):
    sk, pk = toy_keys
    pub = keys.serialize_public(pk)
    cases = [b"", pub[:5], b"XXXX" + pub[4:], pub[:4] + b"\x09" + pub[5:],
             pub[:5] + b"\x00\x63" + pub[7:], pub + b"\x00", pub[:-1]]
    for data in cases:
        with pytest.raises(KeyFormatError):
            keys.deserialize_public(data)
    # non-zero padding bits after the last field
    dirty = bytearray(pub)
    dirty[-1] |= 0x80
    with pytest.raises(KeyFormatError):
        keys.deserialize_public(bytes(dirty))
    with pytest.raises(KeyFormatError):
        keys.deserialize_secret(pub)
    compact = keys.serialize_secret(sk, compact=True)
    with pytest.raises(KeyFormatError):
        keys.deserialize_secret(compact)
    with pytest.raises(KeyFormatError):
        keys.deserialize_secret(compact, p81_keys[1])
    body = bytearray(keys.serialize_secret(sk))
    j = next(j for j in range(14) if not sk.e[j])
    body[7 + j // 8] ^= 1 << (j % 8)
    with pytest.raises(KeyFormatError):
        keys.deserialize_secret(bytes(body))


def test_compact_secret_against_wrong_public_key(toy_keys):
    sk, pk = toy_keys
    other = keys.keygen(TOY, random.Random(99))[1]
    with pytest.raises(KeyFormatError):
        keys.deserialize_secret(keys.serialize_secret(sk, compact=True), other)
