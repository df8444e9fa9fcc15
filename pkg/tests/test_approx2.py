import random
from fractions import Fraction

import pytest

from mediocre.approx2 import (
    approx_med2,
    build_quantiles,
    const_params,
    pad_to_3n,
    quantile_count,
)
from mediocre.core import (
    AlphaRatio,
    ProtocolError,
    alpha_mediocre_spec,
    ceil_log2,
    is_mediocre,
    oracle_median,
    oracle_rank,
    prefix_bits,
)
from mediocre.instances import Mode, gen_instance

QUARTER = AlphaRatio(1, 4)
HALF = Fraction(1, 2)


def test_quantile_count():
    assert quantile_count(QUARTER) == 4
    assert quantile_count(AlphaRatio(1, 3)) == 6
    assert quantile_count(AlphaRatio(49, 100)) == 100


def test_params_for_quarter_half():
    p = const_params(QUARTER, HALF, 4096, 100, 1900)
    assert (p.h, p.ell, p.width, p.n_pow2, p.c_eff) == (4, 7, 14, 4096, HALF)
    assert p.main_path


def test_params_normalise_n_and_c():
    p = const_params(QUARTER, HALF, 1000, 200, 300)
    assert p.n_pow2 == 1024 and p.width == 12
    # c * n / n_pow2 = 500/1024 rounds down to 1/4
    assert p.c_eff == Fraction(1, 4) and p.ell == 8
    assert p.c_eff * p.n_pow2 <= p.c * p.n


def test_pad_equal_sizes_is_a_shift():
    pa, pb, p = pad_to_3n((1, 5), (2, 7), 8, QUARTER, 1)
    assert pa.values == (9, 13) and pb.values == (10, 15)
    assert p.small_pads == p.large_pads == 0


def test_pad_example():
    pa, pb, p = pad_to_3n((2,), (4, 6, 8), 8, QUARTER, HALF)
    assert (p.small_pads, p.large_pads) == (1, 1)
    assert pa.values == (1, 10, 17) and pb.values == (12, 14, 16)
    # the union median is now the m-th element
    assert oracle_median(pa.values + pb.values) == sorted(pa.values + pb.values)[2]


def test_pad_rejects_wrong_order_and_overlap():
    with pytest.raises(ProtocolError):
        pad_to_3n((1, 2, 3), (4,), 8, QUARTER, HALF)
    with pytest.raises(ProtocolError, match="disjointness violated"):
        pad_to_3n((1, 2), (2, 3), 8, QUARTER, HALF)


def test_build_quantiles_example():
    p = const_params(QUARTER, HALF, 32, 12, 12)
    assert (p.h, p.width, p.ell) == (4, 7, 7)
    q = build_quantiles(tuple(range(10, 121, 10)), p)
    assert q.elements == (30, 60, 90, 120) and q.gap_lower_bound == 3
    assert build_quantiles((5, 6, 7, 8), p).elements == (5, 6, 7, 8)
    with pytest.raises(ProtocolError):
        build_quantiles((5, 6, 7), p)


def test_small_n_falls_back_to_exact():
    inst = gen_instance(1, 64, 2, Mode.DISJOINT_DENSE)
    out = approx_med2(*inst.players, QUARTER, HALF, 64)
    assert out.info["path"] == "fallback"
    assert out.value == oracle_median([x for p in inst.players for x in p.values])


def test_one_sided_input():
    # below the main-path threshold the sole holder answers without talking
    out = approx_med2((), tuple(range(1, 65, 2)), QUARTER, HALF, 64)
    assert out.outputs == {2: 31} and out.total_bits == 0
    # on the main path the empty side is all padding and never outputs
    out = approx_med2((), tuple(range(1, 4097, 2)), QUARTER, HALF, 4096)
    assert set(out.outputs) == {2}
    assert is_mediocre(range(1, 4097, 2), out.outputs[2], alpha_mediocre_spec(QUARTER, 2048))


def test_preconditions():
    with pytest.raises(ProtocolError, match="density precondition"):
        approx_med2((1,), (2,), QUARTER, HALF, 4096)
    with pytest.raises(ProtocolError, match="disjointness violated"):
        approx_med2((1, 2), (2, 3), QUARTER, 1, 4)


def test_odd_even_interleave():
    n = 4096
    a, b = tuple(range(1, n + 1, 2)), tuple(range(2, n + 1, 2))
    out = approx_med2(a, b, QUARTER, HALF, n)
    spec = alpha_mediocre_spec(QUARTER, n)
    assert out.info["path"] == "main" and out.outputs
    assert all(is_mediocre(range(1, n + 1), z, spec) for z in out.outputs.values())


def _main_runs(count, alphas=(QUARTER, AlphaRatio(1, 3), AlphaRatio(2, 5))):
    runs = []
    for seed in range(count):
        r = random.Random(seed)
        alpha = r.choice(alphas)
        n = r.choice([512, 1000, 4096])
        inst = gen_instance(seed, n, 2, Mode.DISJOINT_DENSE)
        out = approx_med2(*inst.players, alpha, HALF, n)
        if out.info["path"] == "main":
            runs.append((inst, alpha, out))
    return runs


RUNS = _main_runs(600)


def test_fuzz_corpus_is_mostly_main_path():
    assert len(RUNS) > 500


def test_outputs_are_mediocre_and_nonempty():
    for inst, alpha, out in RUNS:
        ground = sorted(x for p in inst.players for x in p.values)
        spec = alpha_mediocre_spec(alpha, len(ground))
        assert out.outputs
        for z in out.outputs.values():
            assert is_mediocre(ground, z, spec)


def test_search_keeps_sizes_equal_and_shrinks():
    for _, _, out in RUNS:
        live = out.info["live"]
        sizes = [len(qa) for qa, _ in live]
        assert all(len(qa) == len(qb) for qa, qb in live)
        assert all(x > y for x, y in zip(sizes, sizes[1:]))


def test_median_of_quantiles_is_preserved():
    for _, _, out in RUNS:
        meds = {sorted(qa + qb)[len(qa) - 1] for qa, qb in out.info["live"]}
        assert len(meds) == 1


def test_search_bits_bounded():
    for _, _, out in RUNS:
        p = out.info["params"]
        assert out.total_bits == out.info["search_bits"]
        assert out.total_bits <= (p.ell + 2) * (ceil_log2(p.h) + 2)


def test_prefixes_distinct_within_each_side():
    for _, _, out in RUNS:
        p = out.info["params"]
        for qs in out.info["quantiles"].values():
            prefixes = [prefix_bits(x, p.ell, p.width) for x in qs]
            assert len(set(prefixes)) == len(prefixes)


def test_collisions_stay_inside_one_prefix_bucket():
    collisions = 0
    for _, _, out in RUNS:
        p = out.info["params"]
        for x, y in out.info["collisions"]:
            collisions += 1
            assert abs(x - y) < 1 << (p.width - p.ell)
    assert collisions > 50


def test_equal_prefix_predecessor_is_strictly_below():
    for _, _, out in RUNS:
        p = out.info["params"]
        for (qa, _), (_, xa, xb, verdict) in zip(out.info["live"], out.info["steps"]):
            i = qa.index(xa)
            if verdict == 1 and i:
                assert prefix_bits(qa[i - 1], p.ell, p.width) < prefix_bits(xb, p.ell, p.width)


def test_colliding_ranks_are_close():
    for inst, alpha, out in RUNS:
        if not out.info["collisions"]:
            continue
        a, b = inst.players
        small, large = (a, b) if len(a) <= len(b) else (b, a)
        pa, pb, p = pad_to_3n(small, large, inst.n, alpha, HALF)
        ground = sorted(pa.values + pb.values)
        for x, y in out.info["collisions"]:
            gap = abs(oracle_rank(ground, x).below - oracle_rank(ground, y).below)
            assert gap <= Fraction(p.t, 4 * p.h)


def test_known_rank_bound_counterexample():
    # Evenly spaced samples of the padded smaller set lean upward, and with a
    # two-element smaller set and h(1/2 - alpha) = 1 that lean is enough to
    # push Alice's output one rank past the mediocrity window.
    alpha = AlphaRatio(1, 3)
    a = (87, 88)
    b = tuple(x for x in range(1, 129) if x not in a)
    out = approx_med2(a, b, alpha, 1, 128)
    spec = alpha_mediocre_spec(alpha, 128)
    assert out.info["path"] == "main"
    assert out.outputs == {1: 87, 2: 84}
    assert is_mediocre(range(1, 129), 84, spec)
    assert not is_mediocre(range(1, 129), 87, spec)
