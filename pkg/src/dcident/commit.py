"""Hash commitments and the master-digest compression of per-round commitments."""

import hashlib
from dataclasses import dataclass

from .errors import ParameterError

# Domain-separation tags, one per independent oracle.
TAG_C1 = 0x01
TAG_C2 = 0x02
TAG_C3 = 0x03
TAG_MASTER1 = 0x10
TAG_MASTER2 = 0x11
TAG_MASTER_VERON = 0x12
TAG_SIG_SHIFTS = 0x20
TAG_SIG_BITS = 0x21
TAG_SIG_MESSAGE = 0x22
TAG_VERON_C1 = 0x31
TAG_VERON_C2 = 0x32
TAG_VERON_C3 = 0x33

TAGS = {
    "c1": TAG_C1, "c2": TAG_C2, "c3": TAG_C3,
    "master1": TAG_MASTER1, "master2": TAG_MASTER2, "master-veron": TAG_MASTER_VERON,
    "sig-shifts": TAG_SIG_SHIFTS, "sig-bits": TAG_SIG_BITS, "sig-message": TAG_SIG_MESSAGE,
    "veron-c1": TAG_VERON_C1, "veron-c2": TAG_VERON_C2, "veron-c3": TAG_VERON_C3,
}


@dataclass(frozen=True)
class Hasher:
    """A hashlib algorithm truncated to ``bits`` output bits."""

    name: str = "sha256"
    bits: int = 160

    def __post_init__(self):
        if self.bits <= 0 or self.bits % 8:
            raise ParameterError("hash length must be a positive multiple of 8")
        if self.bits > 8 * hashlib.new(self.name).digest_size:
            raise ParameterError("%s cannot produce %d bits" % (self.name, self.bits))

    @property
    def nbytes(self):
        return self.bits // 8

    def __call__(self, tag, payload):
        return hashlib.new(self.name, bytes([tag]) + bytes(payload)).digest()[: self.nbytes]

    def full(self, tag, payload):
        """Untruncated output, used where a longer seed is needed."""
        return hashlib.new(self.name, bytes([tag]) + bytes(payload)).digest()


DEFAULT_HASHER = Hasher()


def hash_bits_of(config):
    """Digest length in bits of a Hasher, CostModel or anything with ``hash_bits``/``bits``."""
    if isinstance(config, Hasher):
        return config.bits
    return config.hash_bits


def commit(tag, payload, hasher=DEFAULT_HASHER):
    return hasher(tag, payload)


@dataclass(frozen=True)
class MasterCommitment:
    digest: bytes
    count: int


def compress(leaves, tag=TAG_MASTER1, hasher=DEFAULT_HASHER):
    """Hash an ordered list of leaf digests into a single master digest."""
    leaves = list(leaves)
    if not leaves:
        raise ParameterError("cannot compress an empty leaf list")
    for leaf in leaves:
        if len(leaf) != hasher.nbytes:
            raise ParameterError("leaf digest of %d bytes, expected %d" % (len(leaf), hasher.nbytes))
    return MasterCommitment(hasher(tag, b"".join(leaves)), len(leaves))


def check_master(master, leaves, tag=TAG_MASTER1, hasher=DEFAULT_HASHER):
    """Return a failure reason, or None when the leaves reproduce the master."""
    leaves = list(leaves)
    if len(leaves) != master.count:
        return "leaf count %d does not match committed count %d" % (len(leaves), master.count)
    if any(len(leaf) != hasher.nbytes for leaf in leaves):
        return "leaf digest has the wrong length"
    if hasher(tag, b"".join(leaves)) != master.digest:
        return "master digest mismatch"
    return None


def verify_master(master, leaves, tag=TAG_MASTER1, hasher=DEFAULT_HASHER):
    return check_master(master, leaves, tag, hasher) is None
