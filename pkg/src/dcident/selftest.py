"""Exhaustive invariant checks at toy sizes, run by ``dcident selftest``."""

import random

from . import keys, params, protocol, signature
from .gf2 import (BitWord, DoubleCirculantCode, block_rot, cw_bits, cw_decode, cw_encode,
                  fixed_weight_words, rot_block)


def _shift_commutation(rng):
    for k in (3, 5, 7, 16):
        for _ in range(4):
            code = DoubleCirculantCode(BitWord.random(k, rng))
            y = BitWord.random(2 * k, rng)
            s = code.syndrome(y)
            if any(code.syndrome(block_rot(y, r)) != rot_block(s, r) for r in range(k)):
                return False
    return True


def _duality(rng):
    code = DoubleCirculantCode(BitWord.random(7, rng))
    return all(code.is_codeword(code.encode(BitWord(7, m))) for m in range(1 << 7))


def _honest_round(sk, pk, rng, r, b):
    st, c1, c2 = protocol.prover_pass1(sk, pk, rng)
    c3 = protocol.prover_pass3(st, r)
    ans = protocol.prover_pass5(st, b)
    return protocol.verify_round(pk, c1, c2, c3, protocol.RoundChallenge(r, b), ans)


def _completeness(sk, pk, rng):
    return all(_honest_round(sk, pk, rng, r, b) for r in range(pk.params.k) for b in (0, 1))


def _cheating_floor(pk, rng):
    k = pk.params.k
    for strategy in protocol.CHEAT_STRATEGIES:
        passed = 0
        for r in range(k):
            for b in (0, 1):
                cfg = protocol.SessionConfig(rounds=1, compressed=False)
                prover = protocol.cheat_prover(pk, strategy, rng, cfg)
                verifier = protocol.VerifierSession(pk, cfg, protocol.FixedChallenges([r], [b]))
                passed += protocol.run_identification(prover, verifier).accept
        if passed != k:
            return False
    return True


def _extraction(sk, pk, rng):
    for r in range(pk.params.k):
        st, c1, c2 = protocol.prover_pass1(sk, pk, rng)
        c3 = protocol.prover_pass3(st, r)
        t0 = protocol.RoundRecord(c1, c2, r, c3, 0, protocol.prover_pass5(st, 0))
        t1 = protocol.RoundRecord(c1, c2, r, c3, 1, protocol.prover_pass5(st, 1))
        if protocol.extract_secret(pk, t0, t1) != sk:
            return False
    return True


def _constant_weight():
    n, w = 10, 3
    seen = set()
    for v in fixed_weight_words(n, w):
        data = cw_encode(v, w)
        if cw_decode(data, n, w) != v:
            return False
        seen.add(int.from_bytes(data, "little"))
    return seen == set(range(120)) and cw_bits(n, w) == 7


def _keys_roundtrip(sk, pk):
    pub = keys.deserialize_public(keys.serialize_public(pk))
    sec = keys.deserialize_secret(keys.serialize_secret(sk))
    compact = keys.deserialize_secret(keys.serialize_secret(sk, compact=True), pk)
    return pub == pk and sec == sk and compact == sk


def _signature(sk, pk, rng):
    sig = signature.sign(sk, pk, b"selftest", rng)
    data = sig.to_bytes()
    return signature.verify_signature(pk, b"selftest", data) and not signature.verify_signature(pk, b"other", data)


def run_selftest(seed=0):
    """Return a list of (check name, passed)."""
    rng = random.Random(seed)
    sk, pk = keys.keygen(params.TOY, rng)
    return [
        ("shift commutation k in {3,5,7,16}", _shift_commutation(rng)),
        ("encode/syndrome duality k=7", _duality(rng)),
        ("completeness, all 2k challenges", _completeness(sk, pk, rng)),
        ("cheating floor exactly k of 2k", _cheating_floor(pk, rng)),
        ("extraction for every shift", _extraction(sk, pk, rng)),
        ("constant-weight bijection n=10 w=3", _constant_weight()),
        ("key serialisation round-trip", _keys_roundtrip(sk, pk)),
        ("signature round-trip", _signature(sk, pk, rng)),
    ]
