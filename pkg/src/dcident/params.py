"""
Parameter presets and the arithmetic around them: cheating probability,
round counts, the soundness failure term and the Gilbert-Varshamov distance.

Everything combinatorial is done with exact integers or Fractions; floats only
appear when a log2 value is reported.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParameterError


@dataclass(frozen=True)
class ParamSet:
    id: int
    name: str
    n: int
    k: int
    w: int
    i: int
    id_rounds: int
    sig_rounds: int
    security_bits: int

    def __post_init__(self):
        if self.n != 2 * self.k:
            raise ParameterError("n must equal 2k")
        if not 0 < self.w < self.k:
            raise ParameterError("need 0 < w < k")
        if not 0 < self.i < self.k:
            raise ParameterError("need 0 < i < k")
        if self.id_rounds < 1 or self.sig_rounds < 1:
            raise ParameterError("round counts must be positive")

    @property
    def shift_bits(self):
        """Width of one serialised shift value."""
        return (self.k - 1).bit_length()


def cheat_probability(k, i):
    """Per-round acceptance bound (k + i) / 2k as an exact Fraction."""
    if k <= 0 or not 0 <= i < k:
        raise ParameterError("need k > 0 and 0 <= i < k")
    return Fraction(k + i, 2 * k)


def rounds_for_probability(p, target_log2):
    """Smallest R with p**R <= 2**-target_log2, decided exactly."""
    p = Fraction(p)
    if target_log2 < 1:
        raise ParameterError("target must be at least 1 bit")
    if not 0 < p < 1:
        raise ParameterError("probability must lie in (0, 1)")
    bound = Fraction(1, 2 ** target_log2)
    # float estimate, then settle the boundary with exact powers
    r = max(1, math.ceil(target_log2 / -math.log2(p)) - 2)
    while p ** r > bound:
        r += 1
    while r > 1 and p ** (r - 1) <= bound:
        r -= 1
    return r


def rounds_for(target_log2, k, i):
    return rounds_for_probability(cheat_probability(k, i), target_log2)


def veron_rounds(target_log2):
    """Rounds of the 3-challenge baseline, whose cheating probability is 2/3."""
    return rounds_for_probability(Fraction(2, 3), target_log2)


def log2_int(x):
    """log2 of a positive integer of any size, to double precision."""
    if x <= 0:
        raise ParameterError("log2 of a non-positive integer")
    shift = max(0, x.bit_length() - 64)
    return shift + math.log2(x >> shift)


def log2_fraction(num, den):
    return log2_int(num) - log2_int(den)


def log2_binomial(n, w):
    """log2 C(n, w) from the product formula, without forming the big integer."""
    return math.fsum(math.log2(n - j) - math.log2(j + 1) for j in range(w))


def soundness_bound(n, k, w, i):
    """log2 of the failure term ((2^(n-k) - i) / (2^(n-k) + n - 1)^i) * C(n, w)^i.

    The expression is evaluated exactly as stated, with no attempt to repair
    its grouping.  Extraction succeeds with probability at least
    ``1 - 2**soundness_bound(...)``.
    """
    if not (n == 2 * k and 0 < w < n and 0 < i):
        raise ParameterError("invalid parameters")
    q = 2 ** (n - k)
    num = (q - i) * math.comb(n, w) ** i
    den = (q + n - 1) ** i
    return log2_fraction(num, den)


def gv_distance(n, k):
    """Largest d with sum_{j<d} C(n, j) <= 2^(n-k)."""
    if n <= 0 or not 0 <= k <= n:
        raise ParameterError("invalid code dimensions")
    budget = 2 ** (n - k)
    total, d = 0, 0
    while d <= n:
        total += math.comb(n, d)
        if total > budget:
            return d
        d += 1
    return n + 1


def _preset(pid, name, n, k, w, i, security_bits):
    id_rounds = rounds_for(16, k, i)
    return ParamSet(pid, name, n, k, w, i, id_rounds, 5 * id_rounds, security_bits)


P81 = _preset(0, "p81", 698, 349, 70, 19, 81)
P100 = _preset(1, "p100", 838, 419, 86, 20, 100)
P128 = _preset(2, "p128", 1094, 547, 109, 14, 128)
TOY = _preset(255, "toy", 14, 7, 2, 1, 0)

PRESETS = {p.name: p for p in (P81, P100, P128, TOY)}
PRESETS_BY_ID = {p.id: p for p in PRESETS.values()}

# Figures reported for other schemes, kept only for comparison tables.
REFERENCE_TABLE = {
    "Stern 3": {"rounds": 28, "matrix": 122500, "public": 350, "secret": 700, "communication": 42019},
    "Stern 5": {"rounds": 16, "matrix": 122500, "public": 2450, "secret": 4900, "communication": 62272},
    "Veron": {"rounds": 28, "matrix": 122500, "public": 700, "secret": 1050, "communication": 35486},
    "CVE": {"rounds": 16, "matrix": 32768, "public": 512, "secret": 1024, "communication": 31888},
    "New protocol": {"rounds": 18, "matrix": 350, "public": 700, "secret": 700, "communication": 20080},
}
PUBLISHED_SIGNATURE_BITS = 93_000
PUBLISHED_SIGNATURE_CW_BITS = 79_000
PUBLISHED_AUTH_CW_BITS = 17_000


def get_params(key):
    """Look a preset up by name or numeric id."""
    if isinstance(key, ParamSet):
        return key
    try:
        if isinstance(key, int):
            return PRESETS_BY_ID[key]
        return PRESETS[key]
    except KeyError:
        raise ParameterError("unknown parameter set %r" % (key,)) from None
