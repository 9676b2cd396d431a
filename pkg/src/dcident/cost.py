"""
Communication accounting.

Reports count the protocol fields at their idealised widths (digests at
``hash_bits``, seeds at ``seed_bits``, words at their bit length) before any
byte padding.  Padded wire bytes, when a real session is available, are kept
separately in ``wire_bytes``.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional

from .errors import ProtocolError
from .gf2 import cw_bits
from .protocol import Answers, Bits, Commit1, Commit3, Shifts

P2V = "P->V"
V2P = "V->P"

VERON_CHALLENGE_BITS = 2  # ceil(log2 3)


@dataclass(frozen=True)
class CostModel:
    hash_bits: int = 160
    seed_bits: int = 128
    count_challenges: bool = True
    cw_encoding: bool = False

    def __post_init__(self):
        if self.hash_bits <= 0 or self.seed_bits <= 0:
            raise ValueError("field widths must be positive")

    def t_bits(self, params):
        return cw_bits(params.n, params.w) if self.cw_encoding else params.n


@dataclass(frozen=True)
class CostLine:
    name: str
    direction: str
    bits: float
    counted: bool = True


@dataclass
class CostReport:
    scheme: str
    rounds: int
    lines: List[CostLine] = field(default_factory=list)
    digests_sent: float = 0.0
    wire_bytes: Optional[int] = None
    notes: List[str] = field(default_factory=list)

    def add(self, name, direction, bits, counted=True):
        self.lines.append(CostLine(name, direction, bits, counted))

    @property
    def total(self):
        return sum(line.bits for line in self.lines if line.counted)

    @property
    def prover_bits(self):
        return sum(line.bits for line in self.lines if line.direction == P2V)

    @property
    def verifier_bits(self):
        return sum(line.bits for line in self.lines if line.direction == V2P)

    @property
    def digests_per_round(self):
        return self.digests_sent / self.rounds

    def as_dict(self):
        return {
            "scheme": self.scheme,
            "rounds": self.rounds,
            "lines": [dict(name=l.name, direction=l.direction, bits=l.bits, counted=l.counted)
                      for l in self.lines],
            "total_bits": self.total,
            "prover_bits": self.prover_bits,
            "verifier_bits": self.verifier_bits,
            "digests_per_round": self.digests_per_round,
            "wire_bytes": self.wire_bytes,
            "notes": list(self.notes),
        }

    def format(self):
        out = ["%s, %d rounds" % (self.scheme, self.rounds)]
        for line in self.lines:
            mark = "" if line.counted else "  (not counted)"
            out.append("  %-26s %-5s %10.1f%s" % (line.name, line.direction, line.bits, mark))
        out.append("  %-26s %-5s %10.1f" % ("total", "", self.total))
        out.append("  %-26s %-5s %10.1f" % ("prover only", P2V, self.prover_bits))
        out.append("  digests sent per round: %.2f" % self.digests_per_round)
        if self.wire_bytes is not None:
            out.append("  framed wire bytes: %d" % self.wire_bytes)
        out.extend("  note: " + n for n in self.notes)
        return "\n".join(out)


def _challenge_lines(report, shift_bits, bit_bits, model):
    report.add("shifts", V2P, shift_bits, model.count_challenges)
    report.add("bits", V2P, bit_bits, model.count_challenges)


def expected_cost(params, rounds, model=CostModel(), compressed=True):
    """Expected cost of an identification session, averaging over the challenge bit."""
    h, R = model.hash_bits, rounds
    rep = CostReport("double-circulant 5-pass%s" % (" (compressed)" if compressed else ""), R)
    rep.add("commit1", P2V, h if compressed else 2 * R * h)
    rep.add("shifts", V2P, R * params.shift_bits, model.count_challenges)
    rep.add("commit3", P2V, h if compressed else R * h)
    rep.add("bits", V2P, R, model.count_challenges)
    if compressed:
        rep.add("answers: revealed digests", P2V, R * h)
    rep.add("answers: b=0 (y, seed)", P2V, R / 2 * (params.k + model.seed_bits))
    rep.add("answers: b=1 (v, t)", P2V, R / 2 * (params.n + model.t_bits(params)))
    rep.digests_sent = (2 + R) if compressed else 3 * R
    if model.cw_encoding:
        rep.notes.append("t sent as a %d-bit constant-weight rank" % model.t_bits(params))
    return rep


def veron_expected_cost(params, rounds, model=CostModel(), compressed=False):
    """Expected cost of the 3-pass baseline, averaging over the three challenges."""
    h, R = model.hash_bits, rounds
    rep = CostReport("Veron 3-pass%s" % (" (compressed)" if compressed else ""), R)
    rep.add("commitments", P2V, h if compressed else 3 * R * h)
    rep.add("challenges", V2P, R * VERON_CHALLENGE_BITS, model.count_challenges)
    if compressed:
        rep.add("answers: revealed digests", P2V, R * h)
    rep.add("answers: b=0,2 (word, seed)", P2V, R * 2 / 3 * (params.k + model.seed_bits))
    rep.add("answers: b=1 (v, t)", P2V, R / 3 * (params.n + model.t_bits(params)))
    rep.digests_sent = (1 + R) if compressed else 3 * R
    return rep


def _first(transcript, cls):
    for msg in transcript.messages:
        if isinstance(msg, cls):
            return msg
    return None


def measure_cost(transcript, model=CostModel()):
    """Cost of an actual session transcript under ``model``."""
    c1, sh, c3, bi, an = (_first(transcript, c) for c in (Commit1, Shifts, Commit3, Bits, Answers))
    if None in (c1, sh, c3, bi, an):
        raise ProtocolError("cannot measure an incomplete transcript")
    params = transcript.params
    h, R = model.hash_bits, len(an.answers)
    compressed = c1.master is not None
    rep = CostReport("double-circulant 5-pass%s" % (" (compressed)" if compressed else ""), R)
    rep.add("commit1", P2V, h if compressed else 2 * R * h)
    rep.add("shifts", V2P, R * params.shift_bits, model.count_challenges)
    rep.add("commit3", P2V, h if c3.master is not None else R * h)
    rep.add("bits", V2P, R, model.count_challenges)
    n0 = sum(1 for a in an.answers if a.b == 0)
    n1 = R - n0
    if compressed:
        rep.add("answers: revealed digests", P2V, R * h)
    rep.add("answers: b=0 (y, seed)", P2V, n0 * (params.k + model.seed_bits))
    rep.add("answers: b=1 (v, t)", P2V, n1 * (params.n + model.t_bits(params)))
    rep.digests_sent = (2 + R) if compressed else 3 * R
    if transcript.frames:
        rep.wire_bytes = sum(len(f) for f in transcript.frames)
    return rep


def measure_veron(params, answers, model=CostModel(), compressed=False):
    """Cost of a list of baseline answers (one per round)."""
    h, R = model.hash_bits, len(answers)
    rep = CostReport("Veron 3-pass%s" % (" (compressed)" if compressed else ""), R)
    rep.add("commitments", P2V, h if compressed else 3 * R * h)
    rep.add("challenges", V2P, R * VERON_CHALLENGE_BITS, model.count_challenges)
    if compressed:
        rep.add("answers: revealed digests", P2V, R * h)
    n1 = sum(1 for a in answers if a.b == 1)
    rep.add("answers: b=0,2 (word, seed)", P2V, (R - n1) * (params.k + model.seed_bits))
    rep.add("answers: b=1 (v, t)", P2V, n1 * (params.n + model.t_bits(params)))
    rep.digests_sent = (1 + R) if compressed else 3 * R
    return rep


def signature_expected_cost(params, rounds, model=CostModel()):
    """Expected signature size: two masters plus one revealed digest and one answer per round."""
    h, R = model.hash_bits, rounds
    rep = CostReport("signature", R)
    rep.add("masters", P2V, 2 * h)
    rep.add("revealed digests", P2V, R * h)
    rep.add("b=0 records (y, seed)", P2V, R / 2 * (params.k + model.seed_bits))
    rep.add("b=1 records (v, t)", P2V, R / 2 * (params.n + model.t_bits(params)))
    rep.digests_sent = 2 + R
    rep.notes.append("challenges are derived by hashing and never transmitted")
    return rep


def relative_gap(value, target):
    return abs(value - target) / target


def log2_cheating(rounds, per_round):
    """log2 of the overall cheating probability after ``rounds`` rounds."""
    return rounds * math.log2(per_round)
