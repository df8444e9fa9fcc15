"""Two-party mediocre element with communication independent of n.

Both inputs are shifted into (n, 2n] and the smaller one is padded with
distinct small and large sentinels so that both have size m and the median
of the padded union has rank m. Each player then keeps h evenly spaced
samples of its set and the players binary-search the median of the 2h
samples, comparing only l-bit prefixes. Outputs are shifted back into [n].
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .approxk import check_disjoint
from .channel import EQ, LT, Board, CostModel, Kind, ProtocolOutcome, Transcript, compare
from .core import (
    AlphaRatio,
    InvariantViolation,
    MultisetSeq,
    ProtocolError,
    Universe,
    ceil_div,
    ceil_log2,
    oracle_median,
    prefix_bits,
)
from .exact2 import median2_interval

ALICE, BOB = 1, 2


@dataclass(frozen=True)
class ConstParams:
    """Parameters shared by both players; derived, never communicated.

    ``n_pow2`` and ``c_eff`` are the power-of-two normalisations of n and c
    (t >= c_eff * n_pow2 still holds); ``h`` and ``ell`` are computed from
    them, and ``width`` is the bit length every padded value is written in.
    """

    alpha: AlphaRatio
    c: Fraction
    n: int
    s: int
    m: int
    n_pow2: int
    c_eff: Fraction
    h: int
    ell: int
    width: int

    @property
    def t(self) -> int:
        return self.s + self.m

    @property
    def main_path(self) -> bool:
        return self.c_eff * self.n_pow2 >= 8 * self.alpha.q ** 2

    @property
    def small_pads(self) -> int:
        return self.m - ceil_div(self.m + self.s, 2)

    @property
    def large_pads(self) -> int:
        return ceil_div(self.m + self.s, 2) - self.s


def quantile_count(alpha: AlphaRatio) -> int:
    return ceil_div(2 * alpha.q, alpha.q - 2 * alpha.p)


def const_params(alpha: AlphaRatio, c, n: int, s: int, m: int) -> ConstParams:
    c = Fraction(c)
    if not 0 < c <= 1:
        raise ProtocolError("c must lie in (0, 1]")
    n_pow2 = 1 << ceil_log2(n)
    # largest 2^-e not exceeding c * n / n_pow2
    scaled = c * n / n_pow2
    e = 0
    while Fraction(1, 1 << e) > scaled:
        e += 1
    c_eff = Fraction(1, 1 << e)
    h = quantile_count(alpha)
    ell = ceil_log2(12 * h * (1 << e))
    width = ceil_log2(n_pow2) + 2
    return ConstParams(alpha, c, n, s, m, n_pow2, c_eff, h, ell, width)


def pad_to_3n(a, b, n: int, alpha: AlphaRatio, c) -> tuple:
    """Shift both sets by +n and pad ``a`` (the smaller) up to ``|b|``."""
    a = a if isinstance(a, MultisetSeq) else MultisetSeq(tuple(a), ALICE)
    b = b if isinstance(b, MultisetSeq) else MultisetSeq(tuple(b), BOB)
    check_disjoint([a, b])
    s, m = len(a), len(b)
    if s > m:
        raise ProtocolError("the first set must be the smaller one")
    params = const_params(alpha, c, n, s, m)
    small = tuple(range(1, params.small_pads + 1))
    large = tuple(range(2 * n + 1, 2 * n + params.large_pads + 1))
    pa = MultisetSeq(small + tuple(x + n for x in a.values) + large, a.owner)
    pb = MultisetSeq(tuple(x + n for x in b.values), b.owner)
    if len(pa) != m or (pa.values and pa.values[-1] > 3 * n) or (pa.values and pa.values[0] < 1):
        raise InvariantViolation("padding left [3n]")
    return pa, pb, params


@dataclass(frozen=True)
class QuantileSet:
    elements: tuple
    h: int
    gap_lower_bound: int


def build_quantiles(x, params: ConstParams, check_prefixes: bool = True) -> QuantileSet:
    vals = x.values if isinstance(x, MultisetSeq) else tuple(sorted(x))
    m, h = len(vals), params.h
    if m < h:
        raise ProtocolError(f"need at least h={h} elements, got {m}")
    step = m // h
    elems = tuple(vals[i * step - 1] for i in range(1, h + 1))
    if check_prefixes:
        prefixes = [prefix_bits(v, params.ell, params.width) for v in elems]
        if len(set(prefixes)) != len(prefixes):
            raise InvariantViolation("quantile prefixes collide")
    return QuantileSet(elems, h, step)


def _fallback(a: MultisetSeq, b: MultisetSeq, n: int, params, expected) -> ProtocolOutcome:
    if not len(a) or not len(b):
        # one player holds everything and knows the median without talking
        owner, vals = (b.owner, b) if not len(a) else (a.owner, a)
        value = oracle_median(vals)
        board = Board(CostModel(value_range=n, count_range=n), expected)
        out = ProtocolOutcome(value, {owner: value}, board.finalize(), {})
    else:
        out = median2_interval(a, b, n, cap=n, expected=expected)
    out.info.update(path="fallback", params=params, search_bits=0)
    return out


def approx_med2(a, b, alpha: AlphaRatio, c, n: int, *,
                expected: Optional[Transcript] = None) -> ProtocolOutcome:
    """Outputs map player id (1 for ``a``, 2 for ``b``) to a mediocre element.

    At least one player outputs; the two outputs may differ.
    """
    a = MultisetSeq(tuple(a), ALICE)
    b = MultisetSeq(tuple(b), BOB)
    universe = Universe(n)
    a.validate(universe, cap=n)
    b.validate(universe, cap=n)
    check_disjoint([a, b])
    c = Fraction(c)
    t = len(a) + len(b)
    if t < c * n or t == 0:
        raise ProtocolError("density precondition")

    # both players know t and their own size, so both agree who pads
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    params = const_params(alpha, c, n, len(small), len(large))
    if not params.main_path:
        return _fallback(a, b, n, params, expected)

    pa, pb, params = pad_to_3n(small, large, n, alpha, c)
    qa = list(build_quantiles(pa, params).elements)
    qb = list(build_quantiles(pb, params).elements)
    ia, ib = pa.owner, pb.owner  # ia pads; ia is "Alice" in the search below

    board = Board(CostModel(value_range=4 * params.n_pow2, count_range=n), expected)
    ell, width = params.ell, params.width
    info: dict = {
        "path": "main",
        "params": params,
        "quantiles": {ia: tuple(qa), ib: tuple(qb)},
        "padder": ia,
        "collisions": [],
        "steps": [],
        "live": [],  # (Alice's, Bob's) surviving quantiles before each step
    }
    outputs: dict = {}
    while True:
        size = len(qa)
        if size != len(qb) or size == 0:
            raise InvariantViolation("quantile sets lost their common size")
        info["live"].append((tuple(qa), tuple(qb)))
        xa, xb = qa[(size - 1) // 2], qb[(size - 1) // 2]
        p_a = board.post(ia, Kind.PREFIX, prefix_bits(xa, ell, width), limit=ell)
        # Bob answers with how Alice's prefix compares to his
        verdict = board.post(ib, Kind.SIGNAL, compare(p_a, prefix_bits(xb, ell, width)))
        info["steps"].append((size, xa, xb, verdict))
        if verdict == EQ:
            info["collisions"].append((xa, xb))
            if size <= 2:
                outputs = {ia: xa, ib: xb}
                break
            d = (size - 1) // 2
            del qa[:d]
            del qb[size - d:]
        else:
            if size == 1:
                outputs = {ia: xa} if verdict == LT else {ib: xb}
                break
            d = size // 2
            if verdict == LT:
                del qa[:d]
                del qb[size - d:]
            else:
                del qb[:d]
                del qa[size - d:]
        board.next_round()

    tr = board.finalize()
    info["padded_outputs"] = dict(outputs)
    info["search_bits"] = tr.total_bits
    shifted = {pid: v - n for pid, v in outputs.items()}
    for v in shifted.values():
        if not 1 <= v <= n:
            raise InvariantViolation(f"a padding element ({v + n}) was returned")
    value = next(iter(shifted.values())) if len(set(shifted.values())) == 1 else None
    return ProtocolOutcome(value, shifted, tr, info)
