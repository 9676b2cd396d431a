"""
The 5-pass double-circulant identification protocol, its 3-pass baseline,
the knowledge extractor and the zero-knowledge simulator.

One round of the 5-pass scheme::

    P -> V   c1 = h(sigma), c2 = h(sigma(uG))
    V -> P   shift r in 0..k-1
    P -> V   c3 = h(sigma(uG + e_r)),  e_r = block_rot(e, r)
    V -> P   bit b
    P -> V   b = 0: y = u + m_r and the seed of sigma
             b = 1: v = sigma(uG) and t = sigma(e_r)

Sessions run many rounds in parallel.  In compressed mode the prover sends
one master digest over every (c1, c2) and one over every c3 instead of the
leaves, and attaches to each answer the single leaf the verifier cannot
recompute (c2 when b = 0, c1 when b = 1).
"""

import enum
from dataclasses import dataclass, field, replace
from typing import List, Optional

from . import commit as cm
from .commit import Hasher, MasterCommitment
from .errors import CollisionWitness, ExtractionError, ParameterError, ProtocolError
from .gf2 import BitWord, Permutation, block_rot, rot_block, sample_fixed_weight
from .keys import SecretKey, shifted_public


@dataclass(frozen=True)
class SessionConfig:
    rounds: int
    compressed: bool = True
    cw_encoding: bool = False
    hash_bits: int = 160
    seed_bits: int = 128
    hash_name: str = "sha256"

    def __post_init__(self):
        if self.rounds < 1 or self.rounds > 0xFFFF:
            raise ParameterError("rounds must be in 1..65535")
        if self.seed_bits <= 0 or self.seed_bits % 8:
            raise ParameterError("seed length must be a positive multiple of 8")

    @property
    def hasher(self):
        return Hasher(self.hash_name, self.hash_bits)

    @property
    def seed_bytes(self):
        return self.seed_bits // 8


@dataclass(frozen=True)
class RoundChallenge:
    r: int
    b: int


@dataclass(frozen=True)
class RoundAnswer:
    """Exactly one of (y, sigma_seed) for b = 0 or (v, t) for b = 1 is set."""

    b: int
    y: Optional[BitWord] = None
    sigma_seed: Optional[bytes] = None
    v: Optional[BitWord] = None
    t: Optional[BitWord] = None
    revealed: Optional[bytes] = None

    def without_reveal(self):
        return RoundAnswer(self.b, self.y, self.sigma_seed, self.v, self.t, None)


@dataclass
class RoundProverState:
    sk: SecretKey
    pk: object
    u: BitWord
    sigma: Permutation
    c1: bytes
    c2: bytes
    hasher: Hasher
    masked: BitWord  # sigma(uG), reused by pass 3 and the b = 1 answer
    r: Optional[int] = None
    e_r: Optional[BitWord] = None
    c3: Optional[bytes] = None


@dataclass(frozen=True)
class RoundRecord:
    """Everything exchanged in one round, as seen by the verifier."""

    c1: Optional[bytes]
    c2: Optional[bytes]
    r: int
    c3: Optional[bytes]
    b: int
    answer: RoundAnswer


class Reason(enum.IntEnum):
    OK = 0
    MALFORMED = 1
    DESYNC = 2
    CONFIG_MISMATCH = 3
    ROUND_FAILED = 4
    MASTER1_MISMATCH = 5
    MASTER2_MISMATCH = 6
    TIMEOUT = 7
    TRANSPORT = 8
    ABORTED = 9


# ---------- single-round operations

def prover_pass1(sk, pk, rng, hasher=cm.DEFAULT_HASHER, seed_bytes=16):
    """Fresh u and sigma; returns the round state and (c1, c2)."""
    n, k = pk.params.n, pk.params.k
    u = BitWord.random(k, rng)
    sigma = Permutation.random(n, rng, seed_bytes)
    masked = sigma.apply(pk.code.encode(u))
    c1 = hasher(cm.TAG_C1, sigma.to_bytes())
    c2 = hasher(cm.TAG_C2, masked.to_bytes())
    return RoundProverState(sk, pk, u, sigma, c1, c2, hasher, masked), c1, c2


def prover_pass3(state, r):
    k = state.pk.params.k
    if not 0 <= r < k:
        raise ProtocolError("shift %d outside 0..%d" % (r, k - 1))
    state.r = r
    state.e_r = block_rot(state.sk.e, r)
    state.c3 = state.hasher(cm.TAG_C3, (state.masked ^ state.sigma.apply(state.e_r)).to_bytes())
    return state.c3


def prover_pass5(state, b, compressed=False):
    if state.c3 is None:
        raise ProtocolError("answer requested before the shift was received")
    if b == 0:
        y = state.u ^ rot_block(state.sk.m, state.r)
        return RoundAnswer(0, y=y, sigma_seed=state.sigma.seed,
                           revealed=state.c2 if compressed else None)
    if b == 1:
        t = state.sigma.apply(state.e_r)
        return RoundAnswer(1, v=state.masked, t=t, revealed=state.c1 if compressed else None)
    raise ProtocolError("challenge bit must be 0 or 1")


def reconstruct_leaves(pk, r, answer, hasher=cm.DEFAULT_HASHER):
    """Recompute the digests an answer opens, or None if the answer is unusable.

    Returns (c1, c2, c3) where the leaf the answer does not open is taken from
    ``answer.revealed`` (possibly None).  The weight test for b = 1 is part of
    this check.
    """
    p = pk.params
    if not isinstance(answer, RoundAnswer) or not 0 <= r < p.k:
        return None
    try:
        if answer.b == 0:
            if answer.y is None or answer.sigma_seed is None or answer.y.length != p.k:
                return None
            sigma = Permutation.from_seed(answer.sigma_seed, p.n)
            c1 = hasher(cm.TAG_C1, sigma.to_bytes())
            word = sigma.apply(pk.code.encode(answer.y) ^ shifted_public(pk, r))
            return c1, answer.revealed, hasher(cm.TAG_C3, word.to_bytes())
        if answer.b == 1:
            v, t = answer.v, answer.t
            if v is None or t is None or v.length != p.n or t.length != p.n:
                return None
            if t.weight() != p.w:
                return None
            return answer.revealed, hasher(cm.TAG_C2, v.to_bytes()), hasher(cm.TAG_C3, (v ^ t).to_bytes())
    except (ParameterError, TypeError, ValueError):
        return None
    return None


def verify_round(pk, c1, c2, c3, challenge, answer, hasher=cm.DEFAULT_HASHER):
    """Check one uncompressed round.  Never raises on malformed input."""
    if not isinstance(answer, RoundAnswer) or answer.b != challenge.b:
        return False
    leaves = reconstruct_leaves(pk, challenge.r, answer, hasher)
    if leaves is None:
        return False
    r1, r2, r3 = leaves
    if r3 != c3:
        return False
    return r1 == c1 if challenge.b == 0 else r2 == c2


# ---------- round provers used by sessions

class HonestRound:
    def __init__(self, sk, pk, rng, hasher, seed_bytes):
        self.state, self.c1, self.c2 = prover_pass1(sk, pk, rng, hasher, seed_bytes)

    def commit(self):
        return self.c1, self.c2

    def shift(self, r):
        return prover_pass3(self.state, r)

    def answer(self, b, compressed):
        return prover_pass5(self.state, b, compressed)


class GuessZeroRound:
    """Prover without the secret that can always answer b = 0.

    It pretends m_r = 0: y = u, and c3 is built from the shifted public word
    after r is known.  c2 is random, so b = 1 always fails.
    """

    def __init__(self, pk, rng, hasher, seed_bytes):
        p = pk.params
        self.pk, self.hasher = pk, hasher
        self.u = BitWord.random(p.k, rng)
        self.sigma = Permutation.random(p.n, rng, seed_bytes)
        self.c1 = hasher(cm.TAG_C1, self.sigma.to_bytes())
        self.c2 = rng.randbytes(hasher.nbytes)
        self.filler = sample_fixed_weight(p.n, p.w, rng)
        self.c3 = None

    def commit(self):
        return self.c1, self.c2

    def shift(self, r):
        word = self.sigma.apply(self.pk.code.encode(self.u) ^ shifted_public(self.pk, r))
        self.c3 = self.hasher(cm.TAG_C3, word.to_bytes())
        return self.c3

    def answer(self, b, compressed):
        if b == 0:
            return RoundAnswer(0, y=self.u, sigma_seed=self.sigma.seed,
                               revealed=self.c2 if compressed else None)
        masked = self.sigma.apply(self.pk.code.encode(self.u))
        return RoundAnswer(1, v=masked, t=self.filler, revealed=self.c1 if compressed else None)


class GuessOneRound:
    """Prover without the secret that can always answer b = 1.

    A random weight-w word z stands in for sigma(e_r).  c1 is random and c3
    is unrelated to the public key, so b = 0 always fails.
    """

    def __init__(self, pk, rng, hasher, seed_bytes):
        p = pk.params
        self.pk, self.hasher = pk, hasher
        self.u = BitWord.random(p.k, rng)
        self.sigma = Permutation.random(p.n, rng, seed_bytes)
        self.v = self.sigma.apply(pk.code.encode(self.u))
        self.z = sample_fixed_weight(p.n, p.w, rng)
        self.c1 = rng.randbytes(hasher.nbytes)
        self.c2 = hasher(cm.TAG_C2, self.v.to_bytes())
        self.c3 = hasher(cm.TAG_C3, (self.v ^ self.z).to_bytes())

    def commit(self):
        return self.c1, self.c2

    def shift(self, r):
        return self.c3

    def answer(self, b, compressed):
        if b == 1:
            return RoundAnswer(1, v=self.v, t=self.z, revealed=self.c1 if compressed else None)
        return RoundAnswer(0, y=self.u, sigma_seed=self.sigma.seed,
                           revealed=self.c2 if compressed else None)


CHEAT_STRATEGIES = {"guess_b0": GuessZeroRound, "guess_b1": GuessOneRound}


# ---------- challenge sources

class RandomChallenges:
    """Honest verifier coins: r uniform on 0..k-1, b uniform."""

    def __init__(self, rng):
        self.rng = rng

    def draw_shift(self, k):
        return self.rng.randrange(k)

    def draw_bit(self):
        return self.rng.getrandbits(1)


class FixedChallenges:
    """Replays given challenges in order; used for replay and exhaustive sweeps."""

    def __init__(self, shifts, bits):
        self._shifts = iter(shifts)
        self._bits = iter(bits)

    def draw_shift(self, k):
        try:
            return next(self._shifts)
        except StopIteration:
            raise ProtocolError("challenge source exhausted") from None

    def draw_bit(self):
        try:
            return next(self._bits)
        except StopIteration:
            raise ProtocolError("challenge source exhausted") from None


# ---------- pass messages

@dataclass(frozen=True)
class Commit1:
    params_id: int
    rounds: int
    compressed: bool
    cw_encoding: bool
    hash_bits: int
    seed_bits: int
    master: Optional[bytes] = None
    leaves: Optional[tuple] = None  # ((c1, c2), ...) in uncompressed mode


@dataclass(frozen=True)
class Shifts:
    shifts: tuple


@dataclass(frozen=True)
class Commit3:
    master: Optional[bytes] = None
    leaves: Optional[tuple] = None


@dataclass(frozen=True)
class Bits:
    bits: tuple


@dataclass(frozen=True)
class Answers:
    answers: tuple


@dataclass(frozen=True)
class Result:
    accept: bool
    reason: Reason = Reason.OK
    index: Optional[int] = None


PASS_ORDER = (Commit1, Shifts, Commit3, Bits, Answers, Result)


@dataclass
class Transcript:
    params: object
    config: SessionConfig
    messages: List[object] = field(default_factory=list)
    accept: bool = False
    reason: Reason = Reason.ABORTED
    fail_index: Optional[int] = None
    detail: str = ""
    frames: List[bytes] = field(default_factory=list)

    def _first(self, cls):
        for msg in self.messages:
            if isinstance(msg, cls):
                return msg
        return None

    @property
    def complete(self):
        return all(self._first(cls) is not None for cls in PASS_ORDER[:5])

    def rounds(self):
        """Per-round records (leaf digests are None where only masters were sent)."""
        c1m, sh, c3m, bi, an = (self._first(c) for c in PASS_ORDER[:5])
        if None in (c1m, sh, c3m, bi, an):
            raise ProtocolError("transcript is incomplete")
        out = []
        for j in range(len(an.answers)):
            c1 = c2 = c3 = None
            if c1m.leaves is not None:
                c1, c2 = c1m.leaves[j]
            if c3m.leaves is not None:
                c3 = c3m.leaves[j]
            out.append(RoundRecord(c1, c2, sh.shifts[j], c3, bi.bits[j], an.answers[j]))
        return out


# ---------- session state machines

class ProverSession:
    """Drives R parallel rounds; ``round_factory()`` builds one round prover."""

    def __init__(self, pk, config, round_factory):
        self.pk = pk
        self.config = config
        self._factory = round_factory
        self._rounds = None
        self._expect = Shifts
        self.result = None

    @classmethod
    def honest(cls, sk, pk, config, rng):
        hasher, sb = config.hasher, config.seed_bytes
        return cls(pk, config, lambda: HonestRound(sk, pk, rng, hasher, sb))

    @classmethod
    def cheating(cls, pk, config, rng, strategy):
        try:
            round_cls = CHEAT_STRATEGIES[strategy]
        except KeyError:
            raise ParameterError("unknown strategy %r" % strategy) from None
        hasher, sb = config.hasher, config.seed_bytes
        return cls(pk, config, lambda: round_cls(pk, rng, hasher, sb))

    def start(self):
        cfg, p = self.config, self.pk.params
        self._rounds = [self._factory() for _ in range(cfg.rounds)]
        pairs = tuple(rd.commit() for rd in self._rounds)
        header = dict(params_id=p.id, rounds=cfg.rounds, compressed=cfg.compressed,
                      cw_encoding=cfg.cw_encoding, hash_bits=cfg.hash_bits, seed_bits=cfg.seed_bits)
        if cfg.compressed:
            leaves = [d for pair in pairs for d in pair]
            return Commit1(master=cm.compress(leaves, cm.TAG_MASTER1, cfg.hasher).digest, **header)
        return Commit1(leaves=pairs, **header)

    def handle(self, msg):
        """Consume one verifier message; returns the reply or None when finished."""
        if self._rounds is None:
            raise ProtocolError("session not started")
        if isinstance(msg, Result):
            self.result = msg
            self._expect = None
            return None
        if not isinstance(msg, self._expect or ()):
            raise ProtocolError("expected %s, got %s" % (getattr(self._expect, "__name__", "nothing"),
                                                         type(msg).__name__))
        cfg, k = self.config, self.pk.params.k
        if isinstance(msg, Shifts):
            if len(msg.shifts) != cfg.rounds or any(not 0 <= r < k for r in msg.shifts):
                raise ProtocolError("malformed shifts")
            c3s = tuple(rd.shift(r) for rd, r in zip(self._rounds, msg.shifts))
            self._expect = Bits
            if cfg.compressed:
                return Commit3(master=cm.compress(c3s, cm.TAG_MASTER2, cfg.hasher).digest)
            return Commit3(leaves=c3s)
        if len(msg.bits) != cfg.rounds or any(b not in (0, 1) for b in msg.bits):
            raise ProtocolError("malformed bits")
        self._expect = Result
        return Answers(tuple(rd.answer(b, cfg.compressed) for rd, b in zip(self._rounds, msg.bits)))


class VerifierSession:
    """Honest verifier.  Every failure becomes a rejecting Result, never an exception."""

    def __init__(self, pk, config, challenges):
        self.pk = pk
        self.config = config
        self.challenges = challenges
        self._expect = Commit1
        self._c1 = self._c3 = None
        self._shifts = self._bits = None
        self.result = None
        self.detail = ""

    @property
    def done(self):
        return self.result is not None

    def reject(self, reason, index=None, detail=""):
        self.result = Result(False, reason, index)
        self.detail = detail or reason.name.lower()
        self._expect = None
        return self.result

    def handle(self, msg):
        if self.done:
            return self.result
        if not isinstance(msg, self._expect):
            return self.reject(Reason.DESYNC, detail="expected %s, got %s"
                               % (self._expect.__name__, type(msg).__name__))
        cfg, p = self.config, self.pk.params
        try:
            if isinstance(msg, Commit1):
                return self._on_commit1(msg, cfg, p)
            if isinstance(msg, Commit3):
                return self._on_commit3(msg, cfg)
            return self._on_answers(msg, cfg)
        except ProtocolError as exc:
            return self.reject(Reason.MALFORMED, detail=str(exc))

    def _on_commit1(self, msg, cfg, p):
        got = (msg.params_id, msg.rounds, msg.compressed, msg.cw_encoding, msg.hash_bits, msg.seed_bits)
        want = (p.id, cfg.rounds, cfg.compressed, cfg.cw_encoding, cfg.hash_bits, cfg.seed_bits)
        if got != want:
            return self.reject(Reason.CONFIG_MISMATCH, detail="session settings %r != %r" % (got, want))
        if cfg.compressed:
            if msg.master is None or msg.leaves is not None or len(msg.master) != cfg.hash_bits // 8:
                return self.reject(Reason.MALFORMED, detail="bad first master")
        elif msg.leaves is None or len(msg.leaves) != cfg.rounds:
            return self.reject(Reason.MALFORMED, detail="bad first commitments")
        self._c1 = msg
        self._shifts = tuple(self.challenges.draw_shift(p.k) for _ in range(cfg.rounds))
        self._expect = Commit3
        return Shifts(self._shifts)

    def _on_commit3(self, msg, cfg):
        if cfg.compressed:
            if msg.master is None or msg.leaves is not None or len(msg.master) != cfg.hash_bits // 8:
                return self.reject(Reason.MALFORMED, detail="bad second master")
        elif msg.leaves is None or len(msg.leaves) != cfg.rounds:
            return self.reject(Reason.MALFORMED, detail="bad third commitments")
        self._c3 = msg
        self._bits = tuple(self.challenges.draw_bit() for _ in range(cfg.rounds))
        self._expect = Answers
        return Bits(self._bits)

    def _on_answers(self, msg, cfg):
        answers = msg.answers
        if len(answers) != cfg.rounds:
            return self.reject(Reason.MALFORMED, detail="wrong number of answers")
        hasher = cfg.hasher
        if not cfg.compressed:
            for j, (ans, r, b) in enumerate(zip(answers, self._shifts, self._bits)):
                c1, c2 = self._c1.leaves[j]
                if not verify_round(self.pk, c1, c2, self._c3.leaves[j], RoundChallenge(r, b), ans, hasher):
                    return self.reject(Reason.ROUND_FAILED, j, "round %d failed" % j)
            self.result = Result(True)
            return self.result
        first, third = [], []
        for j, (ans, r, b) in enumerate(zip(answers, self._shifts, self._bits)):
            if not isinstance(ans, RoundAnswer) or ans.b != b:
                return self.reject(Reason.MALFORMED, j, "answer %d does not match its challenge" % j)
            leaves = reconstruct_leaves(self.pk, r, ans, hasher)
            if leaves is None or None in leaves:
                return self.reject(Reason.ROUND_FAILED, j, "round %d failed" % j)
            first.extend(leaves[:2])
            third.append(leaves[2])
        if not cm.verify_master(MasterCommitment(self._c1.master, 2 * cfg.rounds), first,
                                cm.TAG_MASTER1, hasher):
            return self.reject(Reason.MASTER1_MISMATCH)
        if not cm.verify_master(MasterCommitment(self._c3.master, cfg.rounds), third,
                                cm.TAG_MASTER2, hasher):
            return self.reject(Reason.MASTER2_MISMATCH)
        self.result = Result(True)
        return self.result


def run_identification(prover, verifier):
    """Run a prover and verifier session in-process and return the transcript."""
    transcript = Transcript(verifier.pk.params, verifier.config)
    msg = prover.start()
    while True:
        transcript.messages.append(msg)
        reply = verifier.handle(msg)
        transcript.messages.append(reply)
        if isinstance(reply, Result):
            prover.handle(reply)
            break
        try:
            msg = prover.handle(reply)
        except ProtocolError as exc:
            transcript.reason, transcript.detail = Reason.ABORTED, str(exc)
            return transcript
    transcript.accept = reply.accept
    transcript.reason = reply.reason
    transcript.fail_index = reply.index
    transcript.detail = verifier.detail
    return transcript


def run_sequential(make_prover, make_verifier, rounds):
    """Run ``rounds`` one-round sessions back to back, stopping at the first rejection.

    ``make_prover()`` and ``make_verifier()`` must build sessions configured for
    one round.  The returned transcript concatenates every exchanged message
    and reports the failing round as ``fail_index``.
    """
    total = None
    for j in range(rounds):
        tr = run_identification(make_prover(), make_verifier())
        if total is None:
            total = Transcript(tr.params, replace(tr.config, rounds=rounds))
        total.messages.extend(tr.messages)
        if not tr.accept:
            total.reason, total.fail_index, total.detail = tr.reason, j, tr.detail
            return total
    total.accept, total.reason = True, Reason.OK
    return total


def identify(sk, pk, config, prover_rng, verifier_rng):
    """Honest in-process identification; convenience wrapper around the sessions."""
    prover = ProverSession.honest(sk, pk, config, prover_rng)
    verifier = VerifierSession(pk, config, RandomChallenges(verifier_rng))
    return run_identification(prover, verifier)


def cheat_prover(pk, strategy, rng, config=None):
    config = config or SessionConfig(rounds=pk.params.id_rounds)
    return ProverSession.cheating(pk, config, rng, strategy)


# ---------- extraction

def extract_secret(pk, t0, t1, hasher=cm.DEFAULT_HASHER):
    """Recover the secret key from accepting b = 0 and b = 1 answers to one commitment.

    Raises ExtractionError if the records do not share (c1, c2, r, c3) or do
    not verify, and CollisionWitness if the two openings of c3 differ.
    """
    if t0.b == 1 and t1.b == 0:
        t0, t1 = t1, t0
    if (t0.b, t1.b) != (0, 1):
        raise ExtractionError("need one b = 0 and one b = 1 record")
    if (t0.c1, t0.c2, t0.r, t0.c3) != (t1.c1, t1.c2, t1.r, t1.c3):
        raise ExtractionError("records do not share the same commitments and shift")
    for rec in (t0, t1):
        if not verify_round(pk, rec.c1, rec.c2, rec.c3, RoundChallenge(rec.r, rec.b), rec.answer, hasher):
            raise ExtractionError("record with b = %d does not verify" % rec.b)
    p = pk.params
    sigma = Permutation.from_seed(t0.answer.sigma_seed, p.n)
    opened0 = sigma.apply(pk.code.encode(t0.answer.y) ^ shifted_public(pk, t0.r))
    opened1 = t1.answer.v ^ t1.answer.t
    if opened0 != opened1:
        raise CollisionWitness(t0.c3, opened0.to_bytes(), opened1.to_bytes())
    inv = sigma.inverse()
    e_r = inv.apply(t1.answer.t)
    e = block_rot(e_r, (p.k - t0.r) % p.k)
    codeword = pk.x ^ e
    if not pk.code.is_codeword(codeword):
        offset = pk.code.syndrome(inv.apply(t1.answer.v))
        raise ExtractionError("mask sigma^-1(v) has non-zero syndrome (weight %d); "
                              "one shift does not determine the secret" % offset.weight())
    return SecretKey(p, e, pk.code.message_of(codeword))


# ---------- simulator

@dataclass
class SimulatedTranscript:
    records: List[RoundRecord]
    attempts: List[int]

    @property
    def mean_attempts(self):
        return sum(self.attempts) / len(self.attempts)


def simulate_transcript(pk, challenges, rng, rounds, hasher=cm.DEFAULT_HASHER, seed_bytes=16,
                        max_attempts=200):
    """Produce accepting rounds from the public key alone by guessing b and rewinding.

    ``challenges`` answers ``draw_shift(k)`` after the first commitments and
    ``draw_bit()`` after c3, like the verifier it stands in for.
    """
    records, attempts = [], []
    k = pk.params.k
    for _ in range(rounds):
        for attempt in range(1, max_attempts + 1):
            guess = rng.getrandbits(1)
            rd = (GuessZeroRound if guess == 0 else GuessOneRound)(pk, rng, hasher, seed_bytes)
            c1, c2 = rd.commit()
            r = challenges.draw_shift(k)
            c3 = rd.shift(r)
            b = challenges.draw_bit()
            if b == guess:
                records.append(RoundRecord(c1, c2, r, c3, b, rd.answer(b, False)))
                attempts.append(attempt)
                break
        else:
            raise ProtocolError("simulation did not converge in %d attempts" % max_attempts)
    return SimulatedTranscript(records, attempts)


# ---------- 3-pass baseline

@dataclass(frozen=True)
class VeronAnswer:
    b: int
    y: Optional[BitWord] = None  # u + m for b = 0, u for b = 2
    sigma_seed: Optional[bytes] = None
    v: Optional[BitWord] = None
    t: Optional[BitWord] = None


@dataclass
class VeronState:
    sk: SecretKey
    u: BitWord
    sigma: Permutation
    masked: BitWord  # sigma((u + m)G)


def veron_commit(sk, pk, rng, hasher=cm.DEFAULT_HASHER, seed_bytes=16):
    p = pk.params
    u = BitWord.random(p.k, rng)
    sigma = Permutation.random(p.n, rng, seed_bytes)
    masked = sigma.apply(pk.code.encode(u ^ sk.m))
    c1 = hasher(cm.TAG_VERON_C1, sigma.to_bytes())
    c2 = hasher(cm.TAG_VERON_C2, masked.to_bytes())
    c3 = hasher(cm.TAG_VERON_C3, sigma.apply(pk.code.encode(u) ^ pk.x).to_bytes())
    return VeronState(sk, u, sigma, masked), (c1, c2, c3)


def veron_answer(state, b):
    if b == 0:
        return VeronAnswer(0, y=state.u ^ state.sk.m, sigma_seed=state.sigma.seed)
    if b == 1:
        return VeronAnswer(1, v=state.masked, t=state.sigma.apply(state.sk.e))
    if b == 2:
        return VeronAnswer(2, y=state.u, sigma_seed=state.sigma.seed)
    raise ProtocolError("challenge must be 0, 1 or 2")


def veron_leaves(pk, b, answer, hasher=cm.DEFAULT_HASHER):
    """The two digests an answer opens, as a dict {index: digest}, or None."""
    p = pk.params
    if not isinstance(answer, VeronAnswer) or answer.b != b:
        return None
    try:
        if b in (0, 2):
            if answer.y is None or answer.sigma_seed is None or answer.y.length != p.k:
                return None
            sigma = Permutation.from_seed(answer.sigma_seed, p.n)
            c1 = hasher(cm.TAG_VERON_C1, sigma.to_bytes())
            if b == 0:
                return {0: c1, 1: hasher(cm.TAG_VERON_C2, sigma.apply(pk.code.encode(answer.y)).to_bytes())}
            word = sigma.apply(pk.code.encode(answer.y) ^ pk.x)
            return {0: c1, 2: hasher(cm.TAG_VERON_C3, word.to_bytes())}
        if b == 1:
            v, t = answer.v, answer.t
            if v is None or t is None or v.length != p.n or t.length != p.n or t.weight() != p.w:
                return None
            return {1: hasher(cm.TAG_VERON_C2, v.to_bytes()), 2: hasher(cm.TAG_VERON_C3, (v ^ t).to_bytes())}
    except (ParameterError, TypeError, ValueError):
        return None
    return None


def veron_verify(pk, commitments, b, answer, hasher=cm.DEFAULT_HASHER):
    opened = veron_leaves(pk, b, answer, hasher)
    if opened is None:
        return False
    return all(commitments[idx] == digest for idx, digest in opened.items())


def veron_round(sk, pk, rng, b, hasher=cm.DEFAULT_HASHER, seed_bytes=16):
    state, commitments = veron_commit(sk, pk, rng, hasher, seed_bytes)
    answer = veron_answer(state, b)
    return commitments, answer, veron_verify(pk, commitments, b, answer, hasher)
