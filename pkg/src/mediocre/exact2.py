"""Two-party exact median protocols.

``median2_count``     counting binary search over [1, n], O(log^2 n) bits
``median2_halving``   median exchange with exact halving, O(log^2 n) bits
``median2_interval``  the halving protocol steered by O(1)-bit comparisons
                      against the midpoint of a shared interval, O(log n) bits

All three return the ceil(|A+B|/2)-th smallest element of the multiset sum.
Players only ever see their own slice plus the board.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from typing import Optional

from .channel import EQ, GT, LT, Board, CostModel, Kind, ProtocolOutcome, Transcript, compare
from .core import (
    InvariantViolation,
    MultisetSeq,
    ProtocolError,
    Universe,
    ceil_div,
    ceil_log2,
    pad_preserving_median,
)

ALICE, BOB = 1, 2


class Chain:
    """A contiguous live slice of one player's sorted input."""

    __slots__ = ("values", "lo", "hi", "owner")

    def __init__(self, values, owner: int = 0):
        self.values = tuple(values)
        self.lo = 0
        self.hi = len(self.values)
        self.owner = owner

    def __len__(self):
        return self.hi - self.lo

    def live(self) -> tuple:
        return self.values[self.lo:self.hi]

    def at(self, i: int):
        return self.values[self.lo + i]

    def lower_median(self):
        return self.at((len(self) - 1) // 2)

    def drop_low(self, d: int) -> None:
        if not 0 <= d <= len(self):
            raise InvariantViolation(f"cannot drop {d} of {len(self)} elements")
        self.lo += d

    def drop_high(self, d: int) -> None:
        if not 0 <= d <= len(self):
            raise InvariantViolation(f"cannot drop {d} of {len(self)} elements")
        self.hi -= d

    def counts(self, m):
        """(below, equal, above) counts of ``m`` within the live slice."""
        i = bisect_left(self.values, m, self.lo, self.hi)
        j = bisect_right(self.values, m, self.lo, self.hi)
        return i - self.lo, j - i, self.hi - j


def _as_seq(x, owner: int) -> MultisetSeq:
    if isinstance(x, MultisetSeq):
        return x if x.owner == owner else MultisetSeq(x.values, owner)
    return MultisetSeq(tuple(x), owner)


def _prepare(a, b, n: Optional[int], cap: Optional[int]):
    a, b = _as_seq(a, ALICE), _as_seq(b, BOB)
    if not len(a) or not len(b):
        raise ProtocolError("empty multiset")
    if n is None:
        n = max(a.values[-1], b.values[-1])
    universe = Universe(n)
    cap = n * n if cap is None else cap
    a.validate(universe, cap)
    b.validate(universe, cap)
    return a, b, n, cap


def median2_count(a, b, n: Optional[int] = None, *, cap: Optional[int] = None,
                  expected: Optional[Transcript] = None) -> ProtocolOutcome:
    a, b, n, cap = _prepare(a, b, n, cap)
    board = Board(CostModel(value_range=n, count_range=len(a)), expected)
    alice, bob = Chain(a.values), Chain(b.values)
    lo, hi = 1, n
    intervals = [(lo, hi)]
    value = None
    while lo < hi:
        m = (lo + hi) // 2
        below, equal, above = (board.post(ALICE, Kind.COUNT, c) for c in alice.counts(m))
        # Bob's side of the round: sum the board counts with his own
        b_below, b_equal, _ = bob.counts(m)
        k = ceil_div(below + equal + above + len(bob), 2)
        if k <= below + b_below:
            verdict = LT
        elif k <= below + b_below + equal + b_equal:
            verdict = EQ
        else:
            verdict = GT
        verdict = board.post(BOB, Kind.SIGNAL, verdict)
        if verdict == EQ:
            value = m
            break
        if verdict == LT:
            hi = m - 1
        else:
            lo = m + 1
        intervals.append((lo, hi))
        board.next_round()
    if value is None:
        value = lo
    tr = board.finalize()
    return ProtocolOutcome(value, {ALICE: value, BOB: value}, tr, {"intervals": intervals})


def _pad_to_power(a: MultisetSeq, b: MultisetSeq, n: int, size_a: int, size_b: int):
    # sizes come off the board so both players compute the same padding
    target = 1 << ceil_log2(max(size_a, size_b))
    pa, pb = pad_preserving_median([a, b], [target, target], lo=1, hi=n)
    return Chain(pa.values, a.owner), Chain(pb.values, b.owner)


def _halve(first: Chain, second: Chain, first_is_lower: bool, d: int) -> None:
    if first_is_lower:
        first.drop_low(d)
        second.drop_high(d)
    else:
        second.drop_low(d)
        first.drop_high(d)


def median2_halving(a, b, n: Optional[int] = None, *, cap: Optional[int] = None,
                    expected: Optional[Transcript] = None) -> ProtocolOutcome:
    a, b, n, cap = _prepare(a, b, n, cap)
    board = Board(CostModel(value_range=n, count_range=cap), expected)
    sa = board.post(ALICE, Kind.COUNT, len(a))
    sb = board.post(BOB, Kind.COUNT, len(b))
    alice, bob = _pad_to_power(a, b, n, sa, sb)
    sizes, pairs = [], []
    while True:
        sizes.append(len(alice) + len(bob))
        x = board.post(ALICE, Kind.VALUE, alice.lower_median())
        y = board.post(BOB, Kind.VALUE, bob.lower_median())
        pairs.append((x, y))
        if x == y:
            value = x
            break
        if len(alice) == 1:
            value = min(x, y)
            break
        _halve(alice, bob, x < y, len(alice) // 2)
        board.next_round()
    tr = board.finalize()
    info = {"union_sizes": sizes, "medians": pairs, "padded_size": sizes[0]}
    return ProtocolOutcome(value, {ALICE: value, BOB: value}, tr, info)


def interval_endgame(board: Board, alice: Chain, bob: Chain, n: int, info: dict) -> int:
    """Run the comparison-steered halving between two equal power-of-two slices.

    Shared with the k-party protocol, which calls it once two players remain.
    """
    if len(alice) != len(bob) or len(alice) & (len(alice) - 1):
        raise InvariantViolation("interval endgame needs equal power-of-two slices")
    lo, hi = 1, n
    tests = 0
    trace = info.setdefault("interval_trace", [])
    while True:
        x, y = alice.lower_median(), bob.lower_median()
        trace.append((lo, hi, x, y))
        if lo == hi:
            return lo
        if len(alice) == 1:
            board.next_round()
            x = board.post(alice.owner, Kind.VALUE, x)
            y = board.post(bob.owner, Kind.VALUE, y)
            return min(x, y)
        mid = (lo + hi) // 2
        cx = board.post(alice.owner, Kind.SIGNAL, compare(x, mid))
        cy = board.post(bob.owner, Kind.SIGNAL, compare(y, mid))
        tests += 1
        info["tests"] = tests
        if cx == EQ and cy == EQ:
            return mid
        if cx != GT and cy != LT:
            # x <= mid <= y and not both equal, so x < y
            _halve(alice, bob, True, len(alice) // 2)
        elif cy != GT and cx != LT:
            _halve(alice, bob, False, len(alice) // 2)
        elif cx == LT:
            hi = mid - 1
        else:
            lo = mid + 1
        board.next_round()


def median2_interval(a, b, n: Optional[int] = None, *, cap: Optional[int] = None,
                     expected: Optional[Transcript] = None) -> ProtocolOutcome:
    a, b, n, cap = _prepare(a, b, n, cap)
    board = Board(CostModel(value_range=n, count_range=cap), expected)
    sa = board.post(ALICE, Kind.COUNT, len(a))
    sb = board.post(BOB, Kind.COUNT, len(b))
    alice, bob = _pad_to_power(a, b, n, sa, sb)
    info = {"tests": 0, "padded_size": len(alice)}
    value = interval_endgame(board, alice, bob, n, info)
    tr = board.finalize()
    return ProtocolOutcome(value, {ALICE: value, BOB: value}, tr, info)


PROTOCOLS = {
    "count2": median2_count,
    "halve2": median2_halving,
    "interval2": median2_interval,
}
