"""
Key generation, shifted public keys and the binary key-file format.

Key files::

    magic   4 bytes   b"DCPK" public, b"DCSK" secret (e, m), b"DCSC" compact secret (e only)
    version 1 byte    currently 1
    params  2 bytes   big-endian preset id
    payload           bit-packed little-endian fields, zero padded to a byte
                      public: a_row (k bits) | x (n bits)
                      secret: e (n bits) | m (k bits)
                      compact secret: e (n bits); m is recovered from x + e
"""

import struct
from dataclasses import dataclass

from .errors import KeyFormatError, ParameterError
from .gf2 import BitReader, BitWord, BitWriter, DoubleCirculantCode, block_rot, rot_block, sample_fixed_weight
from .params import ParamSet, get_params

PUBLIC_MAGIC = b"DCPK"
SECRET_MAGIC = b"DCSK"
COMPACT_MAGIC = b"DCSC"
VERSION = 1
_HEADER = struct.Struct(">4sBH")

MAX_KEYGEN_ATTEMPTS = 1000


@dataclass(frozen=True)
class PublicKey:
    params: ParamSet
    a_row: BitWord
    x: BitWord

    @property
    def code(self):
        return DoubleCirculantCode(self.a_row)

    @property
    def w(self):
        return self.params.w


@dataclass(frozen=True)
class SecretKey:
    params: ParamSet
    e: BitWord
    m: BitWord

    def __post_init__(self):
        p = self.params
        if self.e.length != p.n or self.m.length != p.k:
            raise ParameterError("secret key field sizes do not match %s" % p.name)
        if self.e.weight() != p.w:
            raise ParameterError("secret word has weight %d, expected %d" % (self.e.weight(), p.w))


def is_orbit_degenerate(e):
    """True when some non-trivial block rotation fixes e."""
    k = e.length // 2
    return any(block_rot(e, r) == e for r in range(1, k))


def generate_keypair(a_row_len, w, rng, reject_degenerate=True):
    """Raw key material (a_row, e, m, x) for a double-circulant code of size k.

    Secrets that are fixed by a non-trivial rotation are redrawn, unless no
    other choice exists (w = 0 or w = n).
    """
    k = a_row_len
    n = 2 * k
    a_row = BitWord.random(k, rng)
    m = BitWord.random(k, rng)
    avoidable = 0 < w < n
    for _ in range(MAX_KEYGEN_ATTEMPTS):
        e = sample_fixed_weight(n, w, rng)
        if not (reject_degenerate and avoidable and is_orbit_degenerate(e)):
            break
    else:
        raise ParameterError("could not draw a non-degenerate secret")
    x = e ^ DoubleCirculantCode(a_row).encode(m)
    return a_row, e, m, x


def keygen(params, rng):
    params = get_params(params)
    a_row, e, m, x = generate_keypair(params.k, params.w, rng)
    return SecretKey(params, e, m), PublicKey(params, a_row, x)


def shifted_public(pk, r):
    """The public word rotated blockwise by r positions."""
    return block_rot(pk.x, r)


def rotated_secret(sk, r):
    """(block_rot(e, r), rot_block(m, r)), the secret matching shifted_public(pk, r)."""
    return SecretKey(sk.params, block_rot(sk.e, r), rot_block(sk.m, r))


def is_consistent(sk, pk):
    return (sk.params == pk.params and sk.e.weight() == pk.w
            and sk.e ^ pk.code.encode(sk.m) == pk.x)


def secret_from_error(pk, e):
    """Rebuild the full secret from the error word: x + e = (m, m A)."""
    cw = pk.x ^ e
    if not pk.code.is_codeword(cw):
        raise ParameterError("x + e is not a codeword")
    return SecretKey(pk.params, e, pk.code.message_of(cw))


# ---------- serialisation

def _pack(magic, params, words):
    out = BitWriter()
    for word in words:
        out.write_word(word)
    return _HEADER.pack(magic, VERSION, params.id) + out.getvalue()


def _unpack(data, expected_magic):
    data = bytes(data)
    if len(data) < _HEADER.size:
        raise KeyFormatError("truncated header")
    magic, version, pid = _HEADER.unpack_from(data)
    if magic not in expected_magic:
        raise KeyFormatError("bad magic %r" % magic)
    if version != VERSION:
        raise KeyFormatError("unsupported version %d" % version)
    try:
        params = get_params(pid)
    except ParameterError:
        raise KeyFormatError("unknown parameter set id %d" % pid) from None
    return magic, params, data[_HEADER.size:]


def _read_words(body, lengths, params):
    expected = (sum(lengths) + 7) // 8
    if len(body) != expected:
        raise KeyFormatError("payload is %d bytes, expected %d for %s" % (len(body), expected, params.name))
    reader = BitReader(body, KeyFormatError)
    words = [reader.read_word(n) for n in lengths]
    reader.finish()
    return words


def serialize_public(pk):
    return _pack(PUBLIC_MAGIC, pk.params, [pk.a_row, pk.x])


def deserialize_public(data):
    _, params, body = _unpack(data, (PUBLIC_MAGIC,))
    a_row, x = _read_words(body, [params.k, params.n], params)
    return PublicKey(params, a_row, x)


def serialize_secret(sk, compact=False):
    if compact:
        return _pack(COMPACT_MAGIC, sk.params, [sk.e])
    return _pack(SECRET_MAGIC, sk.params, [sk.e, sk.m])


def deserialize_secret(data, pk=None):
    """Parse a secret key file; compact files need the matching public key."""
    magic, params, body = _unpack(data, (SECRET_MAGIC, COMPACT_MAGIC))
    if magic == COMPACT_MAGIC:
        (e,) = _read_words(body, [params.n], params)
        if pk is None:
            raise KeyFormatError("compact secret key needs the public key")
        if pk.params != params:
            raise KeyFormatError("public key is for a different parameter set")
        if e.weight() != params.w:
            raise KeyFormatError("secret word has weight %d, expected %d" % (e.weight(), params.w))
        try:
            return secret_from_error(pk, e)
        except ParameterError as exc:
            raise KeyFormatError(str(exc)) from None
    e, m = _read_words(body, [params.n, params.k], params)
    if e.weight() != params.w:
        raise KeyFormatError("secret word has weight %d, expected %d" % (e.weight(), params.w))
    return SecretKey(params, e, m)


def key_sizes(params):
    """Payload sizes in bits (header excluded) for every key convention."""
    return {
        "matrix": params.k,
        "public_id": params.n,
        "public": params.k + params.n,
        "secret_raw": params.n + params.k,
        "secret_compact": params.n,
    }
