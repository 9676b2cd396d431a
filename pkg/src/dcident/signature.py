"""
Fiat-Shamir signatures built from the compressed 5-pass protocol.

The shifts are derived from the first master digest and the message, the
challenge bits from both masters and the message, so a signature carries only
the two masters and, per round, the revealed leaf digest and the answer.

Signature layout::

    magic b"DCSG" | version u8 | params id u16 BE | rounds u16 BE |
    flags u8 (2 cw encoding, 4 rejection-sampled shifts) |
    hash bits u16 BE | seed bits u16 BE | master1 | master2 |
    bit-packed per-round records as in the Answers pass of the wire format
"""

import hashlib
import struct
from dataclasses import dataclass

from . import commit as cm
from .cost import CostModel, signature_expected_cost
from .errors import EncodingError, ParameterError
from .gf2 import BitReader, BitWriter, cw_bits, cw_rank, cw_unrank
from .keys import serialize_public
from .params import get_params
from .protocol import HonestRound, RoundAnswer, SessionConfig, reconstruct_leaves

MAGIC = b"DCSG"
VERSION = 1
_HEADER = struct.Struct(">4sBHHBHH")
FLAG_CW = 2
FLAG_REJECTION = 4


@dataclass(frozen=True)
class Signature:
    params_id: int
    rounds: int
    cw_encoding: bool
    rejection: bool
    hash_bits: int
    seed_bits: int
    master1: bytes
    master2: bytes
    answers: tuple

    @property
    def config(self):
        return SessionConfig(self.rounds, True, self.cw_encoding, self.hash_bits, self.seed_bits)

    def to_bytes(self):
        params = get_params(self.params_id)
        flags = (FLAG_CW if self.cw_encoding else 0) | (FLAG_REJECTION if self.rejection else 0)
        head = _HEADER.pack(MAGIC, VERSION, self.params_id, self.rounds, flags,
                            self.hash_bits, self.seed_bits)
        out = BitWriter()
        for ans in self.answers:
            out.write_bytes(ans.revealed)
            if ans.b == 0:
                out.write_word(ans.y)
                out.write_bytes(ans.sigma_seed)
            else:
                out.write_word(ans.v)
                if self.cw_encoding:
                    out.write(cw_rank(ans.t, params.w), cw_bits(params.n, params.w))
                else:
                    out.write_word(ans.t)
        return head + self.master1 + self.master2 + out.getvalue()

    def payload_bits(self):
        """Unpadded size of the cryptographic content (header excluded)."""
        params = get_params(self.params_id)
        t_bits = cw_bits(params.n, params.w) if self.cw_encoding else params.n
        bits = 2 * self.hash_bits
        for ans in self.answers:
            bits += self.hash_bits
            bits += params.k + self.seed_bits if ans.b == 0 else params.n + t_bits
        return bits


def message_digest(pk, message):
    return hashlib.sha256(bytes([cm.TAG_SIG_MESSAGE]) + serialize_public(pk) + bytes(message)).digest()


def derive_shifts(master1, mdigest, rounds, k, hasher=cm.DEFAULT_HASHER, rejection=False):
    """Shifts from 16-bit chunks of a SHAKE-256 stream.

    Without rejection each draw is ``chunk mod k``, biased by at most
    k / 2**16 in statistical distance.  With rejection the draws are uniform.
    """
    seed = hasher.full(cm.TAG_SIG_SHIFTS, master1 + mdigest)
    limit = (1 << 16) - (1 << 16) % k if rejection else 1 << 16
    want = 2 * rounds + 64
    out, pos = [], 0
    stream = hashlib.shake_256(seed).digest(want)
    while len(out) < rounds:
        if pos + 2 > len(stream):
            want *= 2
            stream = hashlib.shake_256(seed).digest(want)
        chunk = int.from_bytes(stream[pos:pos + 2], "little")
        pos += 2
        if chunk < limit:
            out.append(chunk % k)
    return tuple(out)


def derive_bits(master1, master2, mdigest, rounds, hasher=cm.DEFAULT_HASHER):
    seed = hasher.full(cm.TAG_SIG_BITS, master1 + master2 + mdigest)
    stream = int.from_bytes(hashlib.shake_256(seed).digest((rounds + 7) // 8), "little")
    return tuple((stream >> j) & 1 for j in range(rounds))


def sign(sk, pk, message, rng, rounds=None, cw_encoding=False, hash_bits=160, seed_bits=128,
         rejection=False):
    params = pk.params
    if sk.params != params:
        raise ParameterError("secret and public keys use different parameter sets")
    rounds = rounds or params.sig_rounds
    cfg = SessionConfig(rounds, True, cw_encoding, hash_bits, seed_bits)
    hasher = cfg.hasher
    provers = [HonestRound(sk, pk, rng, hasher, cfg.seed_bytes) for _ in range(rounds)]
    first = [d for rd in provers for d in rd.commit()]
    master1 = cm.compress(first, cm.TAG_MASTER1, hasher).digest
    mdigest = message_digest(pk, message)
    shifts = derive_shifts(master1, mdigest, rounds, params.k, hasher, rejection)
    third = [rd.shift(r) for rd, r in zip(provers, shifts)]
    master2 = cm.compress(third, cm.TAG_MASTER2, hasher).digest
    bits = derive_bits(master1, master2, mdigest, rounds, hasher)
    answers = tuple(rd.answer(b, True) for rd, b in zip(provers, bits))
    return Signature(params.id, rounds, cw_encoding, rejection, hash_bits, seed_bits,
                     master1, master2, answers)


def decode_signature(data, pk, message):
    """Parse signature bytes; the challenge bits are re-derived to know each record's shape."""
    data = bytes(data)
    if len(data) < _HEADER.size:
        raise EncodingError("truncated signature header")
    magic, version, pid, rounds, flags, hash_bits, seed_bits = _HEADER.unpack_from(data)
    if magic != MAGIC or version != VERSION:
        raise EncodingError("bad signature magic or version")
    if flags & ~(FLAG_CW | FLAG_REJECTION) or rounds == 0:
        raise EncodingError("invalid signature header")
    if pid != pk.params.id:
        raise EncodingError("signature is for a different parameter set")
    try:
        cfg = SessionConfig(rounds, True, bool(flags & FLAG_CW), hash_bits, seed_bits)
        hasher = cfg.hasher
    except ParameterError as exc:
        raise EncodingError(str(exc)) from None
    params, hb = pk.params, hasher.nbytes
    pos = _HEADER.size
    if len(data) < pos + 2 * hb:
        raise EncodingError("truncated masters")
    master1, master2 = data[pos:pos + hb], data[pos + hb:pos + 2 * hb]
    mdigest = message_digest(pk, message)
    bits = derive_bits(master1, master2, mdigest, rounds, hasher)
    reader = BitReader(data[pos + 2 * hb:])
    answers = []
    for b in bits:
        revealed = reader.read_bytes(hb, "revealed")
        if b == 0:
            answers.append(RoundAnswer(0, y=reader.read_word(params.k, "y"),
                                       sigma_seed=reader.read_bytes(cfg.seed_bytes, "seed"),
                                       revealed=revealed))
        else:
            v = reader.read_word(params.n, "v")
            if cfg.cw_encoding:
                t = cw_unrank(reader.read(cw_bits(params.n, params.w), "t"), params.n, params.w)
            else:
                t = reader.read_word(params.n, "t")
            answers.append(RoundAnswer(1, v=v, t=t, revealed=revealed))
    reader.finish()
    return Signature(pid, rounds, cfg.cw_encoding, bool(flags & FLAG_REJECTION), hash_bits,
                     seed_bits, master1, master2, tuple(answers))


def verify_signature(pk, message, sig):
    """True iff ``sig`` (a Signature or its bytes) is valid for ``message``.  Never raises."""
    try:
        if not isinstance(sig, Signature):
            sig = decode_signature(sig, pk, message)
        return _verify(pk, message, sig)
    except (EncodingError, ParameterError, TypeError, ValueError):
        return False


def _verify(pk, message, sig):
    params = pk.params
    if sig.params_id != params.id or len(sig.answers) != sig.rounds:
        return False
    hasher = sig.config.hasher
    mdigest = message_digest(pk, message)
    shifts = derive_shifts(sig.master1, mdigest, sig.rounds, params.k, hasher, sig.rejection)
    bits = derive_bits(sig.master1, sig.master2, mdigest, sig.rounds, hasher)
    first, third = [], []
    for ans, r, b in zip(sig.answers, shifts, bits):
        if not isinstance(ans, RoundAnswer) or ans.b != b or ans.revealed is None:
            return False
        leaves = reconstruct_leaves(pk, r, ans, hasher)
        if leaves is None or None in leaves:
            return False
        first.extend(leaves[:2])
        third.append(leaves[2])
    return (cm.verify_master(cm.MasterCommitment(sig.master1, 2 * sig.rounds), first, cm.TAG_MASTER1, hasher)
            and cm.verify_master(cm.MasterCommitment(sig.master2, sig.rounds), third, cm.TAG_MASTER2, hasher))


def size_report(sig, params=None):
    """Measured payload size, the expected size under the same model, and the published figure."""
    params = params or get_params(sig.params_id)
    model = CostModel(hash_bits=sig.hash_bits, seed_bits=sig.seed_bits, count_challenges=False,
                      cw_encoding=sig.cw_encoding)
    return {
        "rounds": sig.rounds,
        "payload_bits": sig.payload_bits(),
        "file_bytes": len(sig.to_bytes()),
        "expected_bits": signature_expected_cost(params, sig.rounds, model).total,
        "b0_rounds": sum(1 for a in sig.answers if a.b == 0),
        "b1_rounds": sum(1 for a in sig.answers if a.b == 1),
    }
