"""k-party exact median over a broadcast board.

Each round every live player has a designated median (lower or upper for
even-size slices, balanced across players). The players holding the smallest
and largest designated medians discard the same number of elements from the
bottom and the top respectively, so the median of the union never moves.
With two players left the two-party interval protocol finishes the job.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

from .channel import Board, CostModel, Kind, ProtocolOutcome, Transcript
from .core import (
    InvariantViolation,
    MultisetSeq,
    ProtocolError,
    Universe,
    ceil_div,
    ceil_log2,
    pad_preserving_median,
)
from .exact2 import Chain, interval_endgame


class Role(enum.Enum):
    LOWER_MEDIAN = "LOWER"
    UPPER_MEDIAN = "UPPER"
    ODD = "ODD"


def median_index(size: int, role: Role) -> int:
    if role is Role.ODD:
        return (size - 1) // 2
    if role is Role.LOWER_MEDIAN:
        return size // 2 - 1
    return size // 2


def assign_median_roles(chains: Sequence) -> list:
    """Roles for players listed in ascending id order.

    Accepts chains (anything with ``len``) or plain sizes.
    """
    sizes = [c if isinstance(c, int) else len(c) for c in chains]
    if any(s <= 0 for s in sizes):
        raise ProtocolError("empty slice has no median")
    n_even = sum(1 for s in sizes if s % 2 == 0)
    lower_left = ceil_div(n_even, 2)
    roles = []
    for s in sizes:
        if s % 2:
            roles.append(Role.ODD)
        elif lower_left:
            roles.append(Role.LOWER_MEDIAN)
            lower_left -= 1
        else:
            roles.append(Role.UPPER_MEDIAN)
    return roles


@dataclass(frozen=True)
class PrunePoset:
    medians: tuple  # ((value, player id), ...) ascending
    roles: tuple  # ((player id, Role), ...)
    sizes: tuple  # ((player id, live size before pruning), ...)
    t: int
    u: int
    v: int
    alice: int
    bob: int
    charged: int
    discard_count: int

    @property
    def lemma1_ok(self) -> bool:
        return self.u >= ceil_div(self.t + 1, 2) and self.v >= ceil_div(self.t, 2)

    def dump(self) -> str:
        meds = ",".join(f"{pid}:{val}" for val, pid in self.medians)
        return (
            f"prune t={self.t} u={self.u} v={self.v} alice={self.alice} bob={self.bob} "
            f"charged={self.charged} discard={self.discard_count} medians={meds}"
        )


def prune_round(chains: Sequence[Chain], medians: Optional[dict] = None) -> PrunePoset:
    """One pruning step over chains listed in ascending id order.

    ``medians`` maps player id to the designated median as read off the
    board; when omitted each chain's own designated median is used. Chains
    are pruned in place.
    """
    if len(chains) < 3:
        raise ProtocolError("use two-party endgame")
    roles = assign_median_roles(chains)
    sizes = [len(c) for c in chains]
    idx = [median_index(s, r) for s, r in zip(sizes, roles)]
    if medians is None:
        medians = {c.owner: c.at(i) for c, i in zip(chains, idx)}
    order = sorted(range(len(chains)), key=lambda j: (medians[chains[j].owner], chains[j].owner))
    ia, ib = order[0], order[-1]
    a, b = sizes[ia], sizes[ib]
    alice, bob = chains[ia], chains[ib]
    if a <= b:
        d = ceil_div(a, 2)
        expected_low = idx[ia] + (0 if roles[ia] is Role.UPPER_MEDIAN else 1)
        if d != expected_low:
            raise InvariantViolation("charged discard does not match the median role")
        charged = alice.owner
    else:
        d = ceil_div(b, 2)
        expected_high = sizes[ib] - idx[ib] - (1 if roles[ib] is Role.LOWER_MEDIAN else 0)
        if d != expected_high:
            raise InvariantViolation("charged discard does not match the median role")
        charged = bob.owner
    if d > a or d > b:
        raise InvariantViolation("infeasible discard count")
    # poset counts, taken before anything is removed
    u = (a - d) + sum(s - i for j, (s, i) in enumerate(zip(sizes, idx)) if j != ia)
    v = (b - d) + sum(i + 1 for j, i in enumerate(idx) if j != ib)
    alice.drop_low(d)
    bob.drop_high(d)
    return PrunePoset(
        medians=tuple((medians[chains[j].owner], chains[j].owner) for j in order),
        roles=tuple((c.owner, r) for c, r in zip(chains, roles)),
        sizes=tuple((c.owner, s) for c, s in zip(chains, sizes)),
        t=sum(sizes),
        u=u,
        v=v,
        alice=alice.owner,
        bob=bob.owner,
        charged=charged,
        discard_count=d,
    )


def mediank(players: Sequence, n: Optional[int] = None, *, cap: Optional[int] = None,
            assert_lemma1: bool = False, expected: Optional[Transcript] = None) -> ProtocolOutcome:
    """Median of the multiset sum of ``players`` (player ids are 1-based)."""
    seqs = [
        p if isinstance(p, MultisetSeq) and p.owner == i else MultisetSeq(tuple(p), i)
        for i, p in enumerate(players, start=1)
    ]
    if not seqs or not any(len(s) for s in seqs):
        raise ProtocolError("empty multiset")
    if n is None:
        n = max(s.values[-1] for s in seqs if len(s))
    universe = Universe(n)
    cap = n * n if cap is None else cap
    for s in seqs:
        s.validate(universe, cap)

    board = Board(CostModel(value_range=n, count_range=cap), expected)
    chains = {s.owner: Chain(s.values, s.owner) for s in seqs}
    if len(seqs) > 1:
        known = {pid: board.post(pid, Kind.COUNT, len(c)) for pid, c in chains.items()}
    else:
        known = {pid: len(c) for pid, c in chains.items()}

    info: dict = {"posets": [], "reposts": [], "k": len(seqs)}
    last_posted: dict = {}  # pid -> (value, role)
    dirty = set(chains)
    value = None
    while True:
        active = sorted(pid for pid, size in known.items() if size > 0)
        for pid in active:
            if len(chains[pid]) != known[pid]:
                raise InvariantViolation("cardinality bookkeeping diverged")
        if len(active) == 1:
            pid = active[0]
            value = board.post(pid, Kind.VALUE, chains[pid].lower_median())
            info["endgame"] = "local"
            break
        if len(active) == 2:
            p, q = (chains[pid] for pid in active)
            target = 1 << ceil_log2(max(known[pid] for pid in active))
            pa, pb = pad_preserving_median(
                [MultisetSeq(p.live(), p.owner), MultisetSeq(q.live(), q.owner)],
                [target, target], lo=1, hi=n,
            )
            info["endgame"] = "interval"
            info["endgame_size"] = target
            value = interval_endgame(board, Chain(pa.values, p.owner), Chain(pb.values, q.owner), n, info)
            break

        live = [chains[pid] for pid in active]
        roles = assign_median_roles([known[pid] for pid in active])
        medians = {}
        reposts = 0
        for c, role in zip(live, roles):
            prev = last_posted.get(c.owner)
            if c.owner in dirty or prev is None or prev[1] is not role:
                x = c.at(median_index(len(c), role))
                board.post(c.owner, Kind.VALUE, x)
                last_posted[c.owner] = (x, role)
                reposts += 1
            medians[c.owner] = last_posted[c.owner][0]
        info["reposts"].append(reposts)

        poset = prune_round(live, medians)
        info["posets"].append(poset)
        if assert_lemma1:
            board.note(poset.dump())
            if not poset.lemma1_ok:
                raise InvariantViolation(f"Lemma 1 violated: {poset.dump()}")
        known[poset.alice] -= poset.discard_count
        known[poset.bob] -= poset.discard_count
        dirty = {poset.alice, poset.bob}
        board.next_round()

    tr = board.finalize()
    return ProtocolOutcome(value, {pid: value for pid in chains}, tr, info)
