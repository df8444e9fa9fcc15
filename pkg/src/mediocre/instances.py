"""Instance files and seeded instance generators.

File format::

    n=<int> k=<int>
    player 1: v1 v2 ...
    ...
    player k: ...
"""
from __future__ import annotations

import enum
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import MultisetSeq, ProtocolError, Universe, ceil_div


class Mode(enum.Enum):
    MULTISET = "MULTISET"
    DISJOINT_DENSE = "DISJOINT_DENSE"


@dataclass(frozen=True)
class Instance:
    n: int
    players: tuple

    @property
    def k(self) -> int:
        return len(self.players)

    @property
    def t(self) -> int:
        return sum(len(p) for p in self.players)

    def to_text(self) -> str:
        lines = [f"n={self.n} k={self.k}"]
        for p in self.players:
            lines.append(f"player {p.owner}: " + " ".join(map(str, p.values)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Instance":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ProtocolError("empty instance file")
        head = re.fullmatch(r"\s*n=(\d+)\s+k=(\d+)\s*", lines[0])
        if not head:
            raise ProtocolError(f"bad header line: {lines[0]!r}")
        n, k = int(head.group(1)), int(head.group(2))
        players = {}
        for ln in lines[1:]:
            m = re.fullmatch(r"\s*player\s+(\d+)\s*:(.*)", ln)
            if not m:
                raise ProtocolError(f"bad player line: {ln!r}")
            pid = int(m.group(1))
            if pid in players:
                raise ProtocolError(f"player {pid} listed twice")
            players[pid] = MultisetSeq(tuple(int(v) for v in m.group(2).split()), pid)
        if sorted(players) != list(range(1, k + 1)):
            raise ProtocolError(f"expected players 1..{k}, got {sorted(players)}")
        inst = cls(n, tuple(players[i] for i in range(1, k + 1)))
        universe = Universe(n)
        for p in inst.players:
            p.validate(universe)
        return inst


def gen_instance(seed: int, n: int, k: int, mode: Mode = Mode.MULTISET, *,
                 c: Fraction = Fraction(1, 2), max_size: Optional[int] = None) -> Instance:
    """Deterministic random instance.

    MULTISET draws k nonempty multisets over [n] with sizes up to
    ``max_size`` (default min(n^2, 4n)). DISJOINT_DENSE picks at least
    ceil(c*n) distinct values of [n] and hands each to a uniformly random
    player.
    """
    if n < 2 or k < 1:
        raise ProtocolError("need n >= 2 and k >= 1")
    mode = Mode(mode)
    rng = random.Random(f"{seed}:{n}:{k}:{mode.value}")
    if mode is Mode.MULTISET:
        cap = min(n * n, 4 * n) if max_size is None else min(max_size, n * n)
        players = tuple(
            MultisetSeq(tuple(rng.randint(1, n) for _ in range(rng.randint(1, cap))), i)
            for i in range(1, k + 1)
        )
        return Instance(n, players)
    c = Fraction(c)
    if not 0 < c <= 1:
        raise ProtocolError("infeasible density: c must lie in (0, 1]")
    lo = ceil_div(c.numerator * n, c.denominator)
    t = rng.randint(lo, n)
    chosen = rng.sample(range(1, n + 1), t)
    buckets: list = [[] for _ in range(k)]
    for v in chosen:
        buckets[rng.randrange(k)].append(v)
    return Instance(n, tuple(MultisetSeq(tuple(b), i) for i, b in enumerate(buckets, start=1)))


def scaled_instance(seed: int, n: int, base: int = 512) -> Instance:
    """Two-player disjoint instance whose shape does not depend on n.

    A random pattern over ``base`` cells (one of: fine interleave, blocks,
    skewed split, random) is blown up so that each cell becomes n/base
    consecutive values, owned by the cell's player. ``n`` must be a
    multiple of ``base``.
    """
    if n % base:
        raise ProtocolError(f"n={n} is not a multiple of base={base}")
    rng = random.Random(f"scaled:{seed}")
    kind = seed % 4
    cells = []
    for i in range(base):
        if rng.random() < 0.25:
            cells.append(0)
        elif kind == 0:
            cells.append(1 + i % 2)
        elif kind == 1:
            cells.append(1 + (i * 8 // base) % 2)
        elif kind == 2:
            cells.append(1 if rng.random() < 0.15 else 2)
        else:
            cells.append(rng.choice((1, 2)))
    width = n // base
    a, b = [], []
    for i, owner in enumerate(cells):
        block = range(i * width + 1, (i + 1) * width + 1)
        if owner == 1:
            a.extend(block)
        elif owner == 2:
            b.extend(block)
    return Instance(n, (MultisetSeq(tuple(a), 1), MultisetSeq(tuple(b), 2)))
