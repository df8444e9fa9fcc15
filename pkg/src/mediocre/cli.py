"""Experiment harness: generate instances, run protocols, verify, emit CSV.

Verdicts come from the brute-force oracles in :mod:`mediocre.core`; a
protocol never certifies its own answer.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .approx2 import approx_med2
from .approxk import ApproxParams, approx_medk
from .channel import ProtocolOutcome
from .core import (
    AlphaRatio,
    InvariantViolation,
    ProtocolError,
    alpha_mediocre_spec,
    is_mediocre,
    oracle_median,
    oracle_rank,
    union,
)
from .exact2 import PROTOCOLS as TWO_PARTY
from .exactk import mediank
from .instances import Instance, Mode, gen_instance

EXACT = ("count2", "halve2", "interval2", "mediank")
APPROX = ("approxk", "approx2")
ALL_PROTOCOLS = EXACT + APPROX

SWEEP_HEADER = ["protocol", "n", "k", "t", "alpha", "c", "total_bits", "rounds", "verdict"]
RUN_HEADER = SWEEP_HEADER + ["outputs", "rank_lo", "rank_hi"]

EXACT_MATCH, MEDIOCRE_OK, FAIL, SKIPPED = "EXACT_MATCH", "MEDIOCRE_OK", "FAIL", "SKIPPED"


@dataclass
class RunRecord:
    protocol: str
    n: int
    k: int
    t: int
    alpha: Optional[AlphaRatio]
    c: Optional[Fraction]
    total_bits: int
    rounds: int
    verdict: str
    outputs: list = field(default_factory=list)  # (player, value, rank)
    rank_bounds: tuple = ("", "")
    outcome: Optional[ProtocolOutcome] = field(default=None, repr=False)

    def row(self, extended: bool = False) -> list:
        base = [
            self.protocol, self.n, self.k, self.t,
            "" if self.alpha is None else str(self.alpha),
            "" if self.c is None else str(self.c),
            self.total_bits, self.rounds, self.verdict,
        ]
        if not extended:
            return base
        outs = ";".join(f"{p}:{v}:{r}" for p, v, r in self.outputs)
        return base + [outs, *map(str, self.rank_bounds)]


def default_mode(protocol: str) -> Mode:
    return Mode.DISJOINT_DENSE if protocol in APPROX else Mode.MULTISET


def execute(protocol: str, inst: Instance, alpha: Optional[AlphaRatio] = None,
            c: Optional[Fraction] = None, assert_lemma1: bool = False) -> ProtocolOutcome:
    if protocol in TWO_PARTY:
        if inst.k != 2:
            raise ProtocolError(f"{protocol} needs exactly 2 players, instance has {inst.k}")
        a, b = inst.players
        return TWO_PARTY[protocol](a, b, inst.n)
    if protocol == "mediank":
        return mediank(inst.players, inst.n, assert_lemma1=assert_lemma1)
    if protocol == "approxk":
        params = ApproxParams(alpha, c, inst.n, inst.t)
        return approx_medk(inst.players, params)
    if protocol == "approx2":
        if inst.k != 2:
            raise ProtocolError(f"approx2 needs exactly 2 players, instance has {inst.k}")
        a, b = inst.players
        return approx_med2(a, b, alpha, c, inst.n)
    raise ProtocolError(f"unknown protocol {protocol!r}")


def verify(protocol: str, inst: Instance, out: ProtocolOutcome, alpha=None) -> tuple:
    """Return (verdict, outputs-with-ranks, rank bounds) from oracle calls only."""
    ground = union(inst.players)
    t = len(ground)
    ranked = []
    for pid, z in sorted(out.outputs.items()):
        info = oracle_rank(ground, z)
        ranked.append((pid, z, info.below + 1 if info.equal else 0))
    if protocol in EXACT or (protocol == "approx2" and out.info.get("path") == "fallback"):
        want = oracle_median(ground)
        ok = bool(out.outputs) and all(z == want for _, z, _ in ranked)
        return (EXACT_MATCH if ok else FAIL), ranked, ("", "")
    if protocol == "approxk":
        lo, hi = alpha.value * t, (1 - alpha.value) * t
        ok = all(r and lo <= r <= hi for _, _, r in ranked) and bool(ranked)
        return (MEDIOCRE_OK if ok else FAIL), ranked, (lo, hi)
    spec = alpha_mediocre_spec(alpha, t)
    ok = bool(ranked) and all(r and is_mediocre(ground, z, spec) for _, z, r in ranked)
    return (MEDIOCRE_OK if ok else FAIL), ranked, (spec.j + 1, t - spec.i)


def run(protocol: str, inst: Instance, alpha: Optional[AlphaRatio] = None,
        c: Optional[Fraction] = None, *, assert_lemma1: bool = False,
        verify_result: bool = True) -> RunRecord:
    if protocol in APPROX:
        alpha = alpha or AlphaRatio(1, 4)
        c = Fraction(1, 2) if c is None else Fraction(c)
    else:
        alpha = c = None
    try:
        out = execute(protocol, inst, alpha, c, assert_lemma1)
    except InvariantViolation as exc:
        return RunRecord(protocol, inst.n, inst.k, inst.t, alpha, c, 0, 0, FAIL,
                         outputs=[("error", str(exc), 0)])
    if verify_result:
        verdict, ranked, bounds = verify(protocol, inst, out, alpha)
    else:
        verdict, ranked, bounds = SKIPPED, [(p, z, "") for p, z in sorted(out.outputs.items())], ("", "")
    return RunRecord(protocol, inst.n, inst.k, inst.t, alpha, c, out.total_bits, out.rounds,
                     verdict, ranked, bounds, out)


def sweep(protocol: str, ns, ks, trials: int, *, seed: int = 0, alpha=None, c=None,
          mode: Optional[Mode] = None, assert_lemma1: bool = False,
          verify_result: bool = True) -> list:
    """One record per (n, k, trial), in deterministic order."""
    mode = default_mode(protocol) if mode is None else Mode(mode)
    c_gen = Fraction(1, 2) if c is None else Fraction(c)
    records = []
    for n in ns:
        for k in ks:
            for trial in range(trials):
                inst = gen_instance(seed * 1_000_003 + trial, n, k, mode, c=c_gen)
                records.append(run(protocol, inst, alpha, c, assert_lemma1=assert_lemma1,
                                   verify_result=verify_result))
    return records


def to_csv(records, extended: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RUN_HEADER if extended else SWEEP_HEADER)
    for r in records:
        w.writerow(r.row(extended))
    return buf.getvalue()


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _alpha(text: str) -> AlphaRatio:
    try:
        return AlphaRatio.parse(text)
    except (ValueError, ProtocolError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mediocre", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, many: bool):
        p.add_argument("--protocol", choices=ALL_PROTOCOLS, required=True)
        p.add_argument("--n", type=int, nargs="+" if many else None, default=[64] if many else 64)
        p.add_argument("--k", type=int, nargs="+" if many else None, default=[2] if many else 2)
        p.add_argument("--alpha", type=_alpha, default=None, help="p/q, default 1/4")
        p.add_argument("--c", type=_fraction, default=None, help="density, default 1/2")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=1)
        p.add_argument("--mode", choices=[m.value for m in Mode], default=None)
        p.add_argument("--assert-lemma1", action="store_true")
        p.add_argument("--no-verify", action="store_true", help="timing runs; verdict SKIPPED")
        p.add_argument("--out", default=None, help="CSV path (default stdout)")

    g = sub.add_parser("gen", help="write a random instance file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.MULTISET.value)
    g.add_argument("--c", type=_fraction, default=Fraction(1, 2))
    g.add_argument("--max-size", type=int, default=None)
    g.add_argument("--out", default=None)

    r = sub.add_parser("run", help="run a protocol on an instance file or generated trials")
    common(r, many=False)
    r.add_argument("--instance", default=None)
    r.add_argument("--transcript", default=None, help="write the transcript of a single run here")

    s = sub.add_parser("sweep", help="CSV of bits/rounds over ranges of n and k")
    common(s, many=True)
    return ap


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            inst = gen_instance(args.seed, args.n, args.k, Mode(args.mode), c=args.c,
                                max_size=args.max_size)
            _emit(inst.to_text(), args.out)
            return 0
        mode = Mode(args.mode) if args.mode else None
        verify_result = not args.no_verify
        if args.command == "run":
            if args.instance:
                with open(args.instance, encoding="utf-8") as fh:
                    instances = [Instance.from_text(fh.read())]
            else:
                m = mode or default_mode(args.protocol)
                c_gen = args.c if args.c is not None else Fraction(1, 2)
                instances = [gen_instance(args.seed * 1_000_003 + i, args.n, args.k, m, c=c_gen)
                             for i in range(args.trials)]
            records = [run(args.protocol, inst, args.alpha, args.c,
                           assert_lemma1=args.assert_lemma1, verify_result=verify_result)
                       for inst in instances]
            if args.transcript and records and records[0].outcome is not None:
                with open(args.transcript, "w", encoding="utf-8") as fh:
                    fh.write(records[0].outcome.transcript.export())
            _emit(to_csv(records, extended=True), args.out)
        else:
            records = sweep(args.protocol, args.n, args.k, args.trials, seed=args.seed,
                            alpha=args.alpha, c=args.c, mode=mode,
                            assert_lemma1=args.assert_lemma1, verify_result=verify_result)
            _emit(to_csv(records), args.out)
    except (ProtocolError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 1 if any(r.verdict == FAIL for r in records) else 0


if __name__ == "__main__":
    sys.exit(main())
