"""k-party approximate median by counting binary search.

Players shrink a shared value interval (a, b] that always holds the median,
using one COUNT per player per round, until the interval is short enough
that every element inside it is close to the median in rank. Then the
players report in id order and the first holder of such an element posts it.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .channel import ZERO, Board, CostModel, Kind, ProtocolOutcome, Transcript
from .core import (
    AlphaRatio,
    MultisetSeq,
    ProtocolError,
    Universe,
    ceil_div,
    ceil_log2,
)


@dataclass(frozen=True)
class ApproxParams:
    alpha: AlphaRatio
    c: Fraction
    n: int
    t: int

    def __post_init__(self):
        c = Fraction(self.c)
        object.__setattr__(self, "c", c)
        if not 0 < c <= 1:
            raise ProtocolError("c must lie in (0, 1]")
        if self.t < c * self.n:
            raise ProtocolError("density precondition")

    @property
    def ell(self) -> int:
        # ceil(log2(2q/c)) on exact rationals
        x = 2 * self.alpha.q / self.c
        return ceil_log2(ceil_div(x.numerator, x.denominator))

    @property
    def slack(self) -> Fraction:
        """(1/2 - alpha) * t, the largest admissible interval length."""
        return (Fraction(1, 2) - self.alpha.value) * self.t

    def rank_bounds(self) -> tuple:
        a = self.alpha.value
        return a * self.t, (1 - a) * self.t


def check_disjoint(players: Sequence[MultisetSeq]) -> None:
    seen: set = set()
    for p in players:
        if not p.is_set():
            raise ProtocolError(f"player {p.owner}: duplicate elements")
        if seen.intersection(p.values):
            raise ProtocolError("disjointness violated")
        seen.update(p.values)


def approx_medk(players: Sequence, params: ApproxParams, *,
                expected: Optional[Transcript] = None) -> ProtocolOutcome:
    seqs = [
        p if isinstance(p, MultisetSeq) and p.owner == i else MultisetSeq(tuple(p), i)
        for i, p in enumerate(players, start=1)
    ]
    n, t = params.n, params.t
    universe = Universe(n)
    for s in seqs:
        s.validate(universe, cap=n)
    check_disjoint(seqs)
    if sum(len(s) for s in seqs) != t:
        raise ProtocolError("t does not match the players' inputs")
    if t == 0:
        raise ProtocolError("empty multiset")

    board = Board(CostModel(value_range=n, count_range=n), expected)
    half = ceil_div(t, 2)
    slack = params.slack
    # fewer than ceil(t/2) elements are <= a, at least ceil(t/2) are <= b;
    # starting below the universe keeps that true even when the median is 1
    a, b = 0, n
    limit = max(1, int(slack))
    intervals = [(a, b)]
    halvings = 0
    while b - a > limit:
        mid = (a + b) // 2
        total = sum(board.post(s.owner, Kind.COUNT, bisect_right(s.values, mid)) for s in seqs)
        if total < half:
            a = mid
        else:
            b = mid
        halvings += 1
        intervals.append((a, b))
        board.next_round()

    info = {"intervals": intervals, "halvings": halvings, "ell": params.ell}
    if slack < 1:
        # interval is (b - 1, b], so b is the median itself and everyone knows it
        info["path"] = "exact"
        tr = board.finalize()
        return ProtocolOutcome(b, {s.owner: b for s in seqs}, tr, info)

    info["path"] = "report"
    value = holder = None
    for s in seqs:
        j = bisect_right(s.values, a)
        if j < len(s) and s.values[j] <= b:
            value = board.post(s.owner, Kind.VALUE, s.values[j])
            holder = s.owner
            break
        board.post(s.owner, Kind.SIGNAL, ZERO)
    if value is None:
        raise ProtocolError("no player holds an element of the final interval")
    tr = board.finalize()
    info["holder"] = holder
    return ProtocolOutcome(value, {s.owner: value for s in seqs}, tr, info)
