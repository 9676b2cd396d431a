"""
Bit vectors over GF(2), double-circulant codes and permutations.

A :class:`BitWord` stores its bits in a Python integer: bit ``j`` of the
word is bit ``j`` of the integer.  Serialisation is little-endian at both
the bit and the byte level, so bit ``j`` lands in byte ``j // 8`` at bit
position ``j % 8``.  Bits above the logical length are always zero.

Rotations move bit ``j`` to position ``(j + r) mod k``.  Under the integer
representation this is multiplication by ``X**r`` modulo ``X**k - 1``, which
is why circulant products commute with rotations.
"""

import functools
import hashlib
import math
from itertools import combinations

import numpy as np

from .errors import EncodingError, ParameterError


class BitWord:
    """Immutable fixed-length vector over GF(2)."""

    __slots__ = ("length", "value")

    def __init__(self, length, value=0):
        if length < 0:
            raise ParameterError("negative length")
        if value < 0 or value >> length:
            raise ParameterError("value does not fit in %d bits" % length)
        object.__setattr__(self, "length", length)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, val):
        raise AttributeError("BitWord is immutable")

    @classmethod
    def zeros(cls, length):
        return cls(length, 0)

    @classmethod
    def ones(cls, length):
        return cls(length, (1 << length) - 1)

    @classmethod
    def from_bits(cls, bits):
        bits = list(bits)
        value = 0
        for j, b in enumerate(bits):
            if b not in (0, 1):
                raise ParameterError("bits must be 0 or 1")
            value |= b << j
        return cls(len(bits), value)

    @classmethod
    def from_support(cls, length, positions):
        value = 0
        for p in positions:
            if not 0 <= p < length:
                raise ParameterError("position %d out of range" % p)
            value |= 1 << p
        return cls(length, value)

    @classmethod
    def from_bytes(cls, data, length):
        """Inverse of :meth:`to_bytes`; rejects wrong sizes and dirty padding."""
        if len(data) != (length + 7) // 8:
            raise EncodingError("expected %d bytes for a %d-bit word, got %d"
                                % ((length + 7) // 8, length, len(data)))
        value = int.from_bytes(data, "little")
        if value >> length:
            raise EncodingError("non-zero padding bits")
        return cls(length, value)

    @classmethod
    def random(cls, length, rng):
        return cls(length, rng.getrandbits(length) if length else 0)

    def to_bytes(self):
        return self.value.to_bytes((self.length + 7) // 8, "little")

    def bits(self):
        return [(self.value >> j) & 1 for j in range(self.length)]

    def support(self):
        v, out = self.value, []
        while v:
            low = v & -v
            out.append(low.bit_length() - 1)
            v ^= low
        return out

    def weight(self):
        return self.value.bit_count()

    def halves(self):
        if self.length % 2:
            raise ParameterError("odd-length word has no halves")
        k = self.length // 2
        return BitWord(k, self.value & ((1 << k) - 1)), BitWord(k, self.value >> k)

    def concat(self, other):
        return BitWord(self.length + other.length, self.value | (other.value << self.length))

    def __xor__(self, other):
        if not isinstance(other, BitWord):
            return NotImplemented
        if other.length != self.length:
            raise ParameterError("length mismatch: %d vs %d" % (self.length, other.length))
        return BitWord(self.length, self.value ^ other.value)

    def __getitem__(self, j):
        if not 0 <= j < self.length:
            raise IndexError(j)
        return (self.value >> j) & 1

    def __len__(self):
        return self.length

    def __eq__(self, other):
        if not isinstance(other, BitWord):
            return NotImplemented
        return self.length == other.length and self.value == other.value

    def __hash__(self):
        return hash((self.length, self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        if self.length <= 32:
            return "BitWord(%s)" % "".join(map(str, self.bits()))
        return "BitWord(len=%d, weight=%d)" % (self.length, self.weight())


# ---------- rotations and circulant arithmetic

def _rot(value, r, k):
    mask = (1 << k) - 1
    return ((value << r) | (value >> (k - r))) & mask if r else value


def rot_block(v, r):
    """Cyclically shift a k-bit word so that bit j moves to (j + r) mod k."""
    k = v.length
    if not 0 <= r < k:
        raise ParameterError("shift %d outside 0..%d" % (r, k - 1))
    return BitWord(k, _rot(v.value, r, k))


def block_rot(y, r):
    """Rotate both halves of a 2k-bit word independently by r."""
    if y.length % 2:
        raise ParameterError("block rotation needs an even length")
    k = y.length // 2
    if not 0 <= r < k:
        raise ParameterError("shift %d outside 0..%d" % (r, k - 1))
    mask = (1 << k) - 1
    lo, hi = y.value & mask, y.value >> k
    return BitWord(y.length, _rot(lo, r, k) | (_rot(hi, r, k) << k))


@functools.lru_cache(maxsize=64)
def _window_table(a, k):
    """Carry-less products a * t for every byte t, before reduction mod x^k - 1."""
    table = [0] * 256
    for t in range(1, 256):
        low = t & -t
        table[t] = table[t ^ low] ^ (a << (low.bit_length() - 1))
    return table


def circ_mul(a_row, m):
    """Row vector m times the circulant matrix whose row j is rot_block(a_row, j).

    Equivalently the product of a(x) and m(x) modulo x^k - 1, computed a byte
    of m at a time from a cached table.
    """
    if a_row.length != m.length:
        raise ParameterError("length mismatch: %d vs %d" % (a_row.length, m.length))
    k = a_row.length
    table = _window_table(a_row.value, k)
    acc, shift, v = 0, 0, m.value
    while v:
        acc ^= table[v & 0xFF] << shift
        v >>= 8
        shift += 8
    mask = (1 << k) - 1
    while acc >> k:
        acc = (acc & mask) ^ (acc >> k)
    return BitWord(k, acc)


def _circ_mul_bitwise(a_row, m):
    """One rotation per set bit of m; kept as the reference for circ_mul."""
    k, a, acc = a_row.length, a_row.value, 0
    v = m.value
    while v:
        low = v & -v
        acc ^= _rot(a, low.bit_length() - 1, k)
        v ^= low
    return BitWord(k, acc)


def circulant_rows(a_row):
    """Dense rows of the circulant matrix generated by ``a_row`` (test oracle helper)."""
    return [rot_block(a_row, j) for j in range(a_row.length)]


class DoubleCirculantCode:
    """Systematic code with generator G = [I | A], A circulant with first row ``a_row``.

    ``encode(m) = (m, m A)`` and ``syndrome(y1, y2) = y1 A + y2``, i.e. the
    parity check is H = [A^T | I] so that every codeword has zero syndrome.
    """

    __slots__ = ("a_row",)

    def __init__(self, a_row):
        self.a_row = a_row

    @property
    def k(self):
        return self.a_row.length

    @property
    def n(self):
        return 2 * self.a_row.length

    def encode(self, m):
        if m.length != self.k:
            raise ParameterError("message must have %d bits" % self.k)
        return m.concat(circ_mul(self.a_row, m))

    def syndrome(self, y):
        if y.length != self.n:
            raise ParameterError("word must have %d bits" % self.n)
        y1, y2 = y.halves()
        return circ_mul(self.a_row, y1) ^ y2

    def is_codeword(self, y):
        return not self.syndrome(y)

    def message_of(self, codeword):
        """Recover m from a codeword (m, m A) by reading the systematic half."""
        return codeword.halves()[0]

    def __eq__(self, other):
        return isinstance(other, DoubleCirculantCode) and self.a_row == other.a_row

    def __hash__(self):
        return hash(self.a_row)

    def __repr__(self):
        return "DoubleCirculantCode(k=%d)" % self.k


def encode(code, m):
    return code.encode(m)


def syndrome(code, y):
    return code.syndrome(y)


# ---------- permutations

def _expand(tag, seed, nbytes):
    return hashlib.shake_256(tag + seed).digest(nbytes)


def _swaps_with_rejection(seed, n):
    """Swap indices for Fisher-Yates, skipping 32-bit draws above the largest multiple of i + 1."""
    want = 4 * n + 64
    stream = np.frombuffer(_expand(b"perm", seed, want), dtype="<u4").tolist()
    pos, out = 0, []
    for i in range(n - 1, 0, -1):
        bound = i + 1
        limit = (1 << 32) - (1 << 32) % bound
        while True:
            if pos == len(stream):
                want *= 2
                stream = np.frombuffer(_expand(b"perm", seed, want), dtype="<u4").tolist()
            x = stream[pos]
            pos += 1
            if x < limit:
                break
        out.append(x % bound)
    return out


class Permutation:
    """Bijection on {0, ..., n-1}; applying it sends input bit j to position map[j]."""

    __slots__ = ("map", "seed")

    def __init__(self, mapping, seed=None):
        arr = np.asarray(mapping, dtype=np.int64)
        n = arr.shape[0]
        if arr.ndim != 1 or not np.array_equal(np.sort(arr), np.arange(n)):
            raise ParameterError("mapping is not a bijection")
        arr = arr.astype(np.uint16 if n <= 0xFFFF else np.uint32)
        arr.setflags(write=False)
        self.map = arr
        self.seed = seed

    @property
    def n(self):
        return self.map.shape[0]

    @classmethod
    def identity(cls, n):
        return cls(np.arange(n))

    @classmethod
    def from_seed(cls, seed, n):
        """Fisher-Yates shuffle driven by a SHAKE-256 expansion of ``seed``.

        Each swap index is drawn from a 32-bit chunk with rejection, so the
        result is exactly uniform given a uniform stream.
        """
        seed = bytes(seed)
        if n < 2:
            return cls(list(range(n)), seed=seed)
        bounds = np.arange(n, 1, -1, dtype=np.uint64)
        limits = (1 << 32) - (1 << 32) % bounds
        stream = np.frombuffer(_expand(b"perm", seed, 4 * (n - 1)), dtype="<u4").astype(np.uint64)
        if np.all(stream < limits):
            swaps = (stream % bounds).tolist()
        else:
            swaps = _swaps_with_rejection(seed, n)
        perm = list(range(n))
        for i, j in zip(range(n - 1, 0, -1), swaps):
            perm[i], perm[j] = perm[j], perm[i]
        return cls(perm, seed=seed)

    @classmethod
    def random(cls, n, rng, seed_bytes=16):
        return cls.from_seed(rng.randbytes(seed_bytes), n)

    def apply(self, v):
        if v.length != self.n:
            raise ParameterError("permutation size %d vs word length %d" % (self.n, v.length))
        n = self.n
        bits = np.unpackbits(np.frombuffer(v.to_bytes(), dtype=np.uint8),
                             bitorder="little", count=n)
        out = np.empty(n, dtype=np.uint8)
        out[self.map] = bits
        return BitWord(n, int.from_bytes(np.packbits(out, bitorder="little").tobytes(), "little"))

    def inverse(self):
        inv = np.empty(self.n, dtype=np.int64)
        inv[self.map] = np.arange(self.n)
        return Permutation(inv)

    def compose(self, other):
        """Permutation applying ``other`` first, then ``self``."""
        return Permutation(self.map[other.map])

    def to_bytes(self):
        """Canonical encoding of the explicit map (what commitments bind to)."""
        return self.map.astype("<u2").tobytes()

    def __eq__(self, other):
        return isinstance(other, Permutation) and np.array_equal(self.map, other.map)

    def __hash__(self):
        return hash(self.map.tobytes())

    def __repr__(self):
        return "Permutation(n=%d)" % self.n


def apply_perm(sigma, v):
    return sigma.apply(v)


def invert_perm(sigma):
    return sigma.inverse()


# ---------- fixed-weight words

def sample_fixed_weight(n, w, rng):
    """Uniform word of length n and Hamming weight exactly w."""
    if not 0 <= w <= n:
        raise ParameterError("weight %d outside 0..%d" % (w, n))
    return BitWord.from_support(n, rng.sample(range(n), w))


def cw_bits(n, w):
    """Bits needed to index every weight-w word of length n."""
    return (math.comb(n, w) - 1).bit_length()


def cw_rank(v, w):
    """Lexicographic rank of the support of ``v`` among all w-subsets."""
    n = v.length
    positions = v.support()
    if len(positions) != w:
        raise EncodingError("word has weight %d, expected %d" % (len(positions), w))
    rank, prev = 0, -1
    for idx, p in enumerate(positions):
        left = w - idx - 1
        for q in range(prev + 1, p):
            rank += math.comb(n - 1 - q, left)
        prev = p
    return rank


def cw_unrank(rank, n, w):
    total = math.comb(n, w)
    if not 0 <= rank < total:
        raise EncodingError("rank %d outside 0..%d" % (rank, total - 1))
    positions, q = [], 0
    for idx in range(w):
        left = w - idx - 1
        while True:
            block = math.comb(n - 1 - q, left)
            if rank < block:
                break
            rank -= block
            q += 1
        positions.append(q)
        q += 1
    return BitWord.from_support(n, positions)


def cw_encode(v, w):
    """Constant-weight compression: the rank, packed into ceil(log2 C(n, w)) bits."""
    nbits = cw_bits(v.length, w)
    return cw_rank(v, w).to_bytes((nbits + 7) // 8, "little")


def cw_decode(data, n, w):
    nbits = cw_bits(n, w)
    if len(data) != (nbits + 7) // 8:
        raise EncodingError("expected %d bytes of constant-weight payload" % ((nbits + 7) // 8))
    return cw_unrank(int.from_bytes(data, "little"), n, w)


def fixed_weight_words(n, w):
    """Every weight-w word of length n in lexicographic order of supports."""
    for support in combinations(range(n), w):
        yield BitWord.from_support(n, support)


# ---------- bit packing

class BitWriter:
    """Appends little-endian bit fields; ``getvalue`` pads to whole bytes with zeros."""

    def __init__(self):
        self._acc = 0
        self.nbits = 0

    def write(self, value, nbits):
        if value < 0 or value >> nbits:
            raise EncodingError("value does not fit in %d bits" % nbits)
        self._acc |= value << self.nbits
        self.nbits += nbits

    def write_word(self, word):
        self.write(word.value, word.length)

    def write_bytes(self, data):
        self.write(int.from_bytes(data, "little"), 8 * len(data))

    def getvalue(self):
        return self._acc.to_bytes((self.nbits + 7) // 8, "little")


class BitReader:
    """Reads fields written by :class:`BitWriter`; every failure is an EncodingError."""

    def __init__(self, data, error=EncodingError):
        self._acc = int.from_bytes(data, "little")
        self._total = 8 * len(data)
        self._error = error
        self.pos = 0

    def read(self, nbits, field="field"):
        if self.pos + nbits > self._total:
            raise self._error("truncated while reading %s" % field, field)
        value = (self._acc >> self.pos) & ((1 << nbits) - 1)
        self.pos += nbits
        return value

    def read_word(self, length, field="word"):
        return BitWord(length, self.read(length, field))

    def read_bytes(self, nbytes, field="bytes"):
        return self.read(8 * nbytes, field).to_bytes(nbytes, "little")

    def finish(self):
        """Require that only zero padding (less than one byte) remains."""
        left = self._total - self.pos
        if left >= 8:
            raise self._error("%d trailing bytes" % (left // 8), "trailing")
        if self._acc >> self.pos:
            raise self._error("non-zero padding bits", "padding")
