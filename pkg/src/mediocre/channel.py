"""Broadcast blackboard with bit metering and transcript replay.

A protocol drives one :class:`Board`. Players read only what has been
posted; the board charges every post according to a :class:`CostModel`.
Passing ``expected=`` turns the board into a replay checker: every post must
match the recorded transcript message for message.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import InvariantViolation, ProtocolError, ceil_log2


class Kind(enum.Enum):
    VALUE = "VALUE"
    COUNT = "COUNT"
    SIGNAL = "SIGNAL"
    PREFIX = "PREFIX"


# ternary comparison outcomes carried by SIGNAL messages
LT, EQ, GT = 0, 1, 2
ZERO = 0


def compare(x, y) -> int:
    return LT if x < y else (GT if x > y else EQ)


@dataclass(frozen=True)
class CostModel:
    value_range: int
    count_range: int
    signal_bits: int = 2

    def __post_init__(self):
        if self.value_range < 1 or self.count_range < 0 or self.signal_bits < 1:
            raise ProtocolError("invalid cost model")

    def cost(self, kind: Kind, payload: int, limit: Optional[int] = None) -> int:
        """Bits charged for ``payload``; raises if it is outside the range."""
        if kind is Kind.VALUE:
            rng = self.value_range if limit is None else limit
            if not 1 <= payload <= rng:
                raise ProtocolError("payload exceeds cost-model range")
            return max(1, ceil_log2(rng))
        if kind is Kind.COUNT:
            rng = self.count_range if limit is None else limit
            if not 0 <= payload <= rng:
                raise ProtocolError("payload exceeds cost-model range")
            return max(1, ceil_log2(rng + 1))
        if kind is Kind.SIGNAL:
            if not 0 <= payload < (1 << self.signal_bits):
                raise ProtocolError("payload exceeds cost-model range")
            return self.signal_bits
        if limit is None or limit < 1:
            raise ProtocolError("PREFIX posts need their width")
        if not 0 <= payload < (1 << limit):
            raise ProtocolError("payload exceeds cost-model range")
        return limit


@dataclass(frozen=True)
class Message:
    sender: int
    round: int
    kind: Kind
    payload: int
    bit_cost: int

    def line(self) -> str:
        return f"{self.round} {self.sender} {self.kind.value} {self.payload} {self.bit_cost}"


@dataclass(frozen=True)
class Transcript:
    messages: tuple = ()
    trailer: tuple = field(default=(), compare=False)

    @property
    def total_bits(self) -> int:
        return sum(m.bit_cost for m in self.messages)

    @property
    def rounds(self) -> int:
        return self.messages[-1].round + 1 if self.messages else 0

    def bits_by_round(self) -> dict:
        out: dict = {}
        for m in self.messages:
            out[m.round] = out.get(m.round, 0) + m.bit_cost
        return out

    def export(self) -> str:
        lines = [m.line() for m in self.messages]
        lines.extend(f"# {t}" for t in self.trailer)
        lines.append(f"TOTAL bits={self.total_bits} rounds={self.rounds}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "Transcript":
        msgs, trailer = [], []
        total = rounds = None
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                trailer.append(line[1:].strip())
            elif line.startswith("TOTAL"):
                kv = dict(part.split("=") for part in line.split()[1:])
                total, rounds = int(kv["bits"]), int(kv["rounds"])
            else:
                r, s, k, p, b = line.split()
                msgs.append(Message(int(s), int(r), Kind(k), int(p), int(b)))
        tr = cls(tuple(msgs), tuple(trailer))
        if total is not None and (total != tr.total_bits or rounds != tr.rounds):
            raise ProtocolError("transcript trailer does not match its messages")
        return tr


class ReplayMismatch(InvariantViolation):
    pass


class Board:
    def __init__(self, cost: CostModel, expected: Optional[Transcript] = None):
        self.cost = cost
        self.round = 0
        self._messages: list = []
        self._expected = expected
        self.trailer: list = []

    @property
    def messages(self) -> tuple:
        return tuple(self._messages)

    def post(self, sender: int, kind: Kind, payload: int, limit: Optional[int] = None) -> int:
        """Broadcast ``payload`` and return it (what every player now sees)."""
        bits = self.cost.cost(kind, payload, limit)
        msg = Message(sender, self.round, kind, payload, bits)
        if self._expected is not None:
            idx = len(self._messages)
            if idx >= len(self._expected.messages) or self._expected.messages[idx] != msg:
                got = self._expected.messages[idx] if idx < len(self._expected.messages) else None
                raise ReplayMismatch(f"message {idx}: produced {msg}, recorded {got}")
        self._messages.append(msg)
        return payload

    def next_round(self) -> None:
        # empty rounds are not counted: only advance after something was posted
        if self._messages and self._messages[-1].round == self.round:
            self.round += 1

    def note(self, line: str) -> None:
        self.trailer.append(line)

    def finalize(self) -> Transcript:
        if self._expected is not None and len(self._messages) != len(self._expected.messages):
            raise ReplayMismatch(
                f"replay produced {len(self._messages)} messages, "
                f"recorded {len(self._expected.messages)}"
            )
        return Transcript(tuple(self._messages), tuple(self.trailer))


def total_bits(messages: Iterable[Message]) -> int:
    return sum(m.bit_cost for m in messages)


@dataclass
class ProtocolOutcome:
    """What a protocol run produced.

    ``value`` is the element every player agrees on (None when outputs are
    per-player only); ``outputs`` maps player id to the element it returns.
    ``info`` holds instrumentation (intervals, pruning posets, phases).
    """

    value: Optional[int]
    outputs: dict
    transcript: Transcript
    info: dict = field(default_factory=dict)

    @property
    def total_bits(self) -> int:
        return self.transcript.total_bits

    @property
    def rounds(self) -> int:
        return self.transcript.rounds


def replay(protocol, transcript: Transcript, *args, **kwargs) -> ProtocolOutcome:
    """Re-run ``protocol`` against a recorded transcript.

    Raises :class:`ReplayMismatch` as soon as a player posts anything other
    than what was recorded.
    """
    return protocol(*args, expected=transcript, **kwargs)
