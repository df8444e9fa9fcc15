"""Value model, multiset helpers and brute-force oracles.

Everything in here is deliberately naive: the protocols are checked against
these functions, so they sort and count instead of being clever.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

DEFAULT_MAX_Q = 100


class ProtocolError(ValueError):
    """A precondition of an operation or protocol does not hold."""


class InvariantViolation(AssertionError):
    """An internal invariant failed; this is a bug, never a user error."""


def ceil_log2(x: int) -> int:
    """Smallest w >= 0 with 2**w >= x (x >= 1)."""
    if x < 1:
        raise ValueError("ceil_log2 needs x >= 1")
    return (x - 1).bit_length()


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class Universe:
    """Values live in [1, bound]; ``bound`` defaults to ``n``."""

    n: int
    bound: Optional[int] = None

    def __post_init__(self):
        if self.n < 1:
            raise ProtocolError("universe needs n >= 1")
        if self.bound is None:
            object.__setattr__(self, "bound", self.n)
        if self.bound < self.n:
            raise ProtocolError("embedding bound below n")

    @property
    def bit_width(self) -> int:
        return max(1, ceil_log2(self.bound))

    def contains(self, v: int) -> bool:
        return 1 <= v <= self.bound


@dataclass(frozen=True)
class MultisetSeq:
    """A player's input as a sorted tuple (duplicates kept)."""

    values: tuple = ()
    owner: int = 0

    def __post_init__(self):
        vals = tuple(sorted(int(v) for v in self.values))
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def validate(self, universe: Universe, cap: Optional[int] = None) -> None:
        if self.values and not (
            universe.contains(self.values[0]) and universe.contains(self.values[-1])
        ):
            raise ProtocolError(
                f"player {self.owner}: value outside [1, {universe.bound}]"
            )
        if cap is None:
            cap = universe.n ** 2
        if len(self.values) > cap:
            raise ProtocolError(f"player {self.owner}: size {len(self)} exceeds cap {cap}")

    def is_set(self) -> bool:
        return all(x < y for x, y in zip(self.values, self.values[1:]))


Ground = Union[MultisetSeq, Iterable[int]]


def _sorted(x: Ground) -> Sequence[int]:
    if isinstance(x, MultisetSeq):
        return x.values
    return sorted(x)


def union(players: Iterable[Ground]) -> MultisetSeq:
    """Multiset sum of all player inputs."""
    out: list = []
    for p in players:
        out.extend(p)
    return MultisetSeq(tuple(out))


@dataclass(frozen=True)
class AlphaRatio:
    """Mediocrity parameter p/q with 0 < p/q < 1/2."""

    p: int
    q: int
    max_q: int = field(default=DEFAULT_MAX_Q, compare=False, repr=False)

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise ProtocolError("alpha needs positive p and q")
        if 2 * self.p >= self.q:
            raise ProtocolError(f"alpha={self.p}/{self.q} must be below 1/2")
        if self.q > self.max_q:
            raise ProtocolError(f"q={self.q} exceeds the configured maximum {self.max_q}")

    @classmethod
    def parse(cls, text: str, max_q: int = DEFAULT_MAX_Q) -> "AlphaRatio":
        p, _, q = text.partition("/")
        return cls(int(p), int(q or 1), max_q=max_q)

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    def __str__(self):
        return f"{self.p}/{self.q}"


@dataclass(frozen=True)
class MediocreSpec:
    i: int  # excluded from the top
    j: int  # excluded from the bottom
    t: int

    def __post_init__(self):
        if self.i < 0 or self.j < 0:
            raise ProtocolError("mediocrity counts must be nonnegative")
        if self.i + self.j >= self.t:
            raise ProtocolError("no mediocre element exists when i + j >= t")


@dataclass(frozen=True)
class RankInfo:
    below: int
    equal: int
    above: int

    @property
    def total(self) -> int:
        return self.below + self.equal + self.above

    @property
    def positions(self) -> range:
        """1-based rank positions a member with this value can occupy."""
        return range(self.below + 1, self.below + self.equal + 1)


def kth_smallest(x: Ground, k: int):
    vals = _sorted(x)
    if not 1 <= k <= len(vals):
        raise ProtocolError(f"rank {k} out of range 1..{len(vals)}")
    return vals[k - 1]


def oracle_median(x: Ground):
    """The ceil(|x|/2)-th smallest element, counting multiplicity."""
    vals = _sorted(x)
    if not vals:
        raise ProtocolError("empty multiset")
    return vals[ceil_div(len(vals), 2) - 1]


def oracle_rank(ground: Ground, z) -> RankInfo:
    vals = _sorted(ground)
    lo = bisect_left(vals, z)
    hi = bisect_right(vals, z)
    return RankInfo(lo, hi - lo, len(vals) - hi)


def is_mediocre(ground: Ground, z, spec: MediocreSpec) -> bool:
    """True iff some rank position of member z lies in (j, t - i]."""
    info = oracle_rank(ground, z)
    if info.equal == 0:
        raise ProtocolError("not a member")
    if info.total != spec.t:
        raise ProtocolError(f"spec.t={spec.t} but ground has {info.total} elements")
    first = max(info.below + 1, spec.j + 1)
    last = min(info.below + info.equal, spec.t - spec.i)
    return first <= last


def alpha_mediocre_spec(alpha: AlphaRatio, t: int) -> MediocreSpec:
    """(alpha*t, alpha*t) with the usual floor convention."""
    k = (alpha.p * t) // alpha.q
    return MediocreSpec(k, k, t)


def prefix_bits(x: int, ell: int, width: int) -> int:
    if ell > width:
        raise ProtocolError("prefix wider than representation")
    if ell < 1:
        raise ProtocolError("prefix needs at least one bit")
    if not 0 <= x < (1 << width):
        raise ProtocolError(f"{x} does not fit in {width} bits")
    return x >> (width - ell)


def pred_succ(sorted_seq: Ground, z):
    vals = _sorted(sorted_seq)
    i = bisect_left(vals, z)
    if i == len(vals) or vals[i] != z:
        raise ProtocolError("not a member")
    j = bisect_right(vals, z)
    pred = vals[i - 1] if i > 0 else None
    succ = vals[j] if j < len(vals) else None
    return pred, succ


def reduce_selection_to_median(a: Ground, i: int) -> MultisetSeq:
    """Pad ``a`` so that its median is the i-th smallest of ``a``."""
    vals = list(_sorted(a))
    n = len(vals)
    if not 1 <= i <= n:
        raise ProtocolError(f"selection index {i} out of range 1..{n}")
    owner = a.owner if isinstance(a, MultisetSeq) else 0
    if 2 * i < n:
        vals = [vals[0]] * (n - 2 * i) + vals
    elif 2 * i > n:
        vals = vals + [vals[-1]] * (2 * i - n)
    return MultisetSeq(tuple(vals), owner)


def padding_split(total: int, deficit: int) -> tuple:
    """Number of (minima, maxima) sentinels that keep the union median fixed."""
    low = ceil_div(total + deficit, 2) - ceil_div(total, 2)
    return low, deficit - low


def pad_preserving_median(
    players: Sequence[MultisetSeq], targets: Sequence[int], lo: int = 1, hi: Optional[int] = None
) -> list:
    """Pad each player to its target size with ``lo``/``hi`` sentinels.

    Minima go out first, greedily in player order, then maxima. ``hi``
    defaults to the largest value present.
    """
    if len(players) != len(targets):
        raise ProtocolError("one target per player")
    deficits = []
    for p, tgt in zip(players, targets):
        if tgt < len(p):
            raise ProtocolError(f"target {tgt} below current size {len(p)}")
        deficits.append(tgt - len(p))
    total = sum(len(p) for p in players)
    if hi is None:
        hi = max((p.values[-1] for p in players if len(p)), default=lo)
    low_left, _ = padding_split(total, sum(deficits))
    out = []
    for p, d in zip(players, deficits):
        nlow = min(d, low_left)
        low_left -= nlow
        vals = [lo] * nlow + list(p.values) + [hi] * (d - nlow)
        out.append(MultisetSeq(tuple(vals), p.owner))
    return out
