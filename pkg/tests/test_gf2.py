import math
import random
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcident.errors import EncodingError, ParameterError
from dcident.gf2 import (BitReader, BitWord, BitWriter, DoubleCirculantCode, Permutation, apply_perm,
                         block_rot, circ_mul, cw_bits, cw_decode, cw_encode, cw_rank, cw_unrank,
                         fixed_weight_words, invert_perm, rot_block, sample_fixed_weight)


def W(*bits):
    return BitWord.from_bits(bits)


# ---------- dense-matrix oracles, independent of the integer fast paths

def dense_circulant(a_bits):
    k = len(a_bits)
    return [[a_bits[(c - j) % k] for c in range(k)] for j in range(k)]


def dense_vecmat(vec, mat):
    cols = len(mat[0])
    return [sum(vec[j] * mat[j][c] for j in range(len(vec))) % 2 for c in range(cols)]


def dense_generator(a_bits):
    k = len(a_bits)
    A = dense_circulant(a_bits)
    return [[int(i == j) for j in range(k)] + A[i] for i in range(k)]


def dense_parity(a_bits):
    """H = [A^T | I], rows indexed by syndrome position."""
    k = len(a_bits)
    A = dense_circulant(a_bits)
    return [[A[j][c] for j in range(k)] + [int(c == j) for j in range(k)] for c in range(k)]


def words(draw_len):
    return st.integers(min_value=0, max_value=(1 << draw_len) - 1).map(lambda v: BitWord(draw_len, v))


# ---------- BitWord

def test_xor_self_inverse_and_weight(rng):
    for _ in range(50):
        a, b = BitWord.random(349, rng), BitWord.random(349, rng)
        assert (a ^ b) ^ b == a
        assert 0 <= a.weight() <= a.length


def test_high_bits_never_set():
    with pytest.raises(ParameterError):
        BitWord(3, 8)
    with pytest.raises(EncodingError):
        BitWord.from_bytes(b"\x08", 3)
    assert BitWord.from_bytes(b"\x07", 3) == BitWord.ones(3)


def test_length_mismatch():
    with pytest.raises(ParameterError):
        BitWord(3) ^ BitWord(4)


def test_byte_layout_little_endian():
    assert W(1, 0, 0, 0, 0, 0, 0, 0, 0, 1).to_bytes() == b"\x01\x02"
    assert len(BitWord(698).to_bytes()) == 88


# ---------- rotations

def test_rot_block_examples():
    assert rot_block(W(1, 0, 0), 0) == W(1, 0, 0)
    assert rot_block(W(1, 0, 0), 1) == W(0, 1, 0)
    with pytest.raises(ParameterError):
        rot_block(W(1, 0, 0), 3)


def test_rot_block_round_trip_all_shifts(rng):
    v = BitWord.random(349, rng)
    for r in range(349):
        back = rot_block(rot_block(v, r), (349 - r) % 349)
        assert back == v


def test_rot_block_matches_index_definition(rng):
    v = BitWord.random(16, rng)
    for r in range(16):
        out = rot_block(v, r)
        assert all(out[(j + r) % 16] == v[j] for j in range(16))


def test_block_rot_examples():
    y = W(1, 0, 0, 0, 1, 1)
    assert block_rot(y, 0) == y
    assert block_rot(y, 1) == W(0, 1, 0, 1, 0, 1)
    with pytest.raises(ParameterError):
        block_rot(W(1, 0, 1), 1)


def test_block_rot_preserves_blockwise_weight(rng):
    y = BitWord.random(698, rng)
    lo, hi = y.halves()
    for r in (0, 1, 100, 348):
        a, b = block_rot(y, r).halves()
        assert (a.weight(), b.weight()) == (lo.weight(), hi.weight())


# ---------- circulant product, encode, syndrome

def test_circ_mul_dense_oracle_small():
    a, m = [1, 0, 1], [1, 1, 0]
    expected = dense_vecmat(m, dense_circulant(a))
    assert expected == [0, 1, 1]
    assert circ_mul(W(*a), W(*m)) == W(*expected)


def test_circ_mul_trivial_cases(rng):
    a = BitWord.random(11, rng)
    assert circ_mul(a, BitWord(11)) == BitWord(11)
    m = BitWord.random(11, rng)
    assert circ_mul(BitWord.from_support(11, [0]), m) == m
    with pytest.raises(ParameterError):
        circ_mul(BitWord(3), BitWord(4))


@pytest.mark.parametrize("k", [3, 5, 7, 16, 31])
def test_circ_mul_matches_dense(k, rng):
    for _ in range(20):
        a, m = BitWord.random(k, rng), BitWord.random(k, rng)
        assert circ_mul(a, m).bits() == dense_vecmat(m.bits(), dense_circulant(a.bits()))


@pytest.mark.parametrize("k", [3, 7, 12])
def test_parity_convention_annihilates_generator(k, rng):
    for _ in range(10):
        a = BitWord.random(k, rng).bits()
        G, H = dense_generator(a), dense_parity(a)
        # H G^T = 0
        for grow in G:
            assert dense_vecmat(grow, [list(col) for col in zip(*H)]) == [0] * k


def test_literal_i_a_parity_is_not_a_parity_check():
    # With H = [I | A] applied as y1 + A y2, codewords of [I | A] do not all vanish
    # unless A is symmetric; this is why the syndrome is y1 A + y2.
    a = [1, 1, 0, 0, 0]
    A = dense_circulant(a)
    m = [1, 0, 0, 0, 0]
    cw = m + dense_vecmat(m, A)
    y1, y2 = cw[:5], cw[5:]
    literal = [(y1[c] + sum(A[c][j] * y2[j] for j in range(5))) % 2 for c in range(5)]
    assert any(literal)
    code = DoubleCirculantCode(W(*a))
    assert code.syndrome(W(*cw)) == BitWord(5)


@pytest.mark.parametrize("k", [3, 7, 16])
def test_syndrome_matches_dense_parity(k, rng):
    for _ in range(20):
        a, y = BitWord.random(k, rng), BitWord.random(2 * k, rng)
        H = dense_parity(a.bits())
        expected = [sum(H[c][j] * y.bits()[j] for j in range(2 * k)) % 2 for c in range(k)]
        assert DoubleCirculantCode(a).syndrome(y).bits() == expected


def test_encode_examples(rng):
    code = DoubleCirculantCode(BitWord.random(349, rng))
    assert code.encode(BitWord(349)) == BitWord(698)
    for _ in range(20):
        m1, m2 = BitWord.random(349, rng), BitWord.random(349, rng)
        assert code.encode(m1 ^ m2) == code.encode(m1) ^ code.encode(m2)
        assert code.syndrome(code.encode(m1)) == BitWord(349)
    assert code.syndrome(BitWord(698)) == BitWord(349)
    with pytest.raises(ParameterError):
        code.encode(BitWord(348))
    with pytest.raises(ParameterError):
        code.syndrome(BitWord(697))


@pytest.mark.parametrize("k", [3, 5, 7, 16])
def test_shift_commutation_exhaustive_small(k):
    r_ = random.Random(k)
    for _ in range(3):
        code = DoubleCirculantCode(BitWord.random(k, r_))
        words_ = range(1 << (2 * k)) if k <= 5 else (r_.getrandbits(2 * k) for _ in range(200))
        for val in words_:
            y = BitWord(2 * k, val)
            s = code.syndrome(y)
            for r in range(k):
                assert code.syndrome(block_rot(y, r)) == rot_block(s, r)


@settings(max_examples=60, deadline=None)
@given(a=words(13), x=words(26), y=words(26), r=st.integers(0, 12))
def test_linearity(a, x, y, r):
    code = DoubleCirculantCode(a)
    assert code.syndrome(x ^ y) == code.syndrome(x) ^ code.syndrome(y)
    assert block_rot(x ^ y, r) == block_rot(x, r) ^ block_rot(y, r)
    xm, ym = x.halves()[0], y.halves()[0]
    assert code.encode(xm ^ ym) == code.encode(xm) ^ code.encode(ym)
    sigma = Permutation.from_seed(bytes([r]) * 16, 26)
    assert sigma.apply(x ^ y) == sigma.apply(x) ^ sigma.apply(y)


# ---------- permutations

def test_identity_permutation(rng):
    v = BitWord.random(40, rng)
    assert Permutation.identity(40).apply(v) == v


def test_permutation_semantics():
    sigma = Permutation([2, 0, 1])
    # input bit j goes to position map[j]
    assert sigma.apply(W(1, 0, 0)) == W(0, 0, 1)
    assert sigma.apply(W(0, 1, 0)) == W(1, 0, 0)


def test_permutation_weight_and_inverse(rng):
    for _ in range(20):
        sigma = Permutation.random(698, rng)
        v = BitWord.random(698, rng)
        assert apply_perm(sigma, v).weight() == v.weight()
        assert apply_perm(invert_perm(sigma), apply_perm(sigma, v)) == v
        assert sigma.compose(sigma.inverse()) == Permutation.identity(698)


def test_permutation_from_seed_is_deterministic_bijection():
    a = Permutation.from_seed(b"\x01" * 16, 698)
    b = Permutation.from_seed(b"\x01" * 16, 698)
    assert a == b and a.seed == b"\x01" * 16
    assert sorted(a.map.tolist()) == list(range(698))
    assert a != Permutation.from_seed(b"\x02" * 16, 698)


def test_permutation_rejects_non_bijection():
    with pytest.raises(ParameterError):
        Permutation([0, 0, 1])
    with pytest.raises(ParameterError):
        Permutation.identity(4).apply(BitWord(5))


def test_seeded_permutation_is_uniform_on_s3():
    counts = {}
    for i in range(6000):
        p = tuple(Permutation.from_seed(i.to_bytes(4, "little"), 3).map.tolist())
        counts[p] = counts.get(p, 0) + 1
    assert len(counts) == 6
    # 1000 expected each, sd ~ 29
    assert all(abs(c - 1000) < 150 for c in counts.values())


# ---------- fixed weight words

def test_sample_fixed_weight_edges(rng):
    assert sample_fixed_weight(5, 0, rng) == BitWord(5)
    assert sample_fixed_weight(5, 5, rng) == BitWord.ones(5)
    with pytest.raises(ParameterError):
        sample_fixed_weight(5, 6, rng)


def test_sample_fixed_weight_position_frequencies(rng):
    n, w, N = 698, 70, 10_000
    counts = np.zeros(n)
    for _ in range(N):
        v = sample_fixed_weight(n, w, rng)
        assert v.weight() == w
        counts[v.support()] += 1
    p = w / n
    sd = math.sqrt(N * p * (1 - p))
    assert np.all(np.abs(counts - N * p) <= 4 * sd)


def test_cw_small_enumeration():
    ranks = [cw_rank(v, 2) for v in fixed_weight_words(4, 2)]
    assert ranks == list(range(6))
    # lexicographic order coincides with itertools.combinations order
    for rank, support in enumerate(combinations(range(4), 2)):
        assert cw_unrank(rank, 4, 2) == BitWord.from_support(4, support)


@pytest.mark.parametrize("n,w", [(8, 3), (10, 5), (12, 1), (9, 9)])
def test_cw_bijection(n, w):
    total = math.comb(n, w)
    seen = set()
    for v in fixed_weight_words(n, w):
        data = cw_encode(v, w)
        assert len(data) == (cw_bits(n, w) + 7) // 8
        assert cw_decode(data, n, w) == v
        seen.add(int.from_bytes(data, "little"))
    assert seen == set(range(total))


def test_cw_empty_and_errors():
    assert cw_encode(BitWord(10), 0) == b""
    assert cw_decode(b"", 10, 0) == BitWord(10)
    with pytest.raises(EncodingError):
        cw_encode(BitWord.ones(10), 3)
    with pytest.raises(EncodingError):
        cw_unrank(math.comb(10, 3), 10, 3)


def test_cw_length_at_p81(rng):
    n, w = 698, 70
    exact = (math.comb(n, w) - 1).bit_length()
    assert cw_bits(n, w) == exact == math.ceil(math.log2(math.comb(n, w))) == 324
    assert cw_bits(n, w) <= 349
    for _ in range(20):
        v = sample_fixed_weight(n, w, rng)
        assert cw_decode(cw_encode(v, w), n, w) == v


# ---------- bit packing

def test_bitwriter_reader_round_trip():
    out = BitWriter()
    out.write(5, 3)
    out.write_word(W(1, 1, 0, 1))
    out.write_bytes(b"\xab")
    data = out.getvalue()
    assert out.nbits == 15 and len(data) == 2
    rd = BitReader(data)
    assert rd.read(3) == 5
    assert rd.read_word(4) == W(1, 1, 0, 1)
    assert rd.read_bytes(1) == b"\xab"
    rd.finish()


def test_bitreader_errors():
    with pytest.raises(EncodingError):
        BitReader(b"\x01").read(9)
    rd = BitReader(b"\x80")
    rd.read(3)
    with pytest.raises(EncodingError):
        rd.finish()
    rd = BitReader(b"\x00\x00")
    rd.read(3)
    with pytest.raises(EncodingError):
        rd.finish()


@pytest.mark.parametrize("k", [1, 2, 8, 9, 349])
def test_windowed_circ_mul_matches_bitwise(k, rng):
    from dcident.gf2 import _circ_mul_bitwise
    for _ in range(100):
        a, m = BitWord.random(k, rng), BitWord.random(k, rng)
        assert circ_mul(a, m) == _circ_mul_bitwise(a, m)
