import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mediocre.core import (
    AlphaRatio,
    MediocreSpec,
    MultisetSeq,
    ProtocolError,
    Universe,
    ceil_div,
    is_mediocre,
    oracle_median,
    oracle_rank,
    pad_preserving_median,
    pred_succ,
    prefix_bits,
    reduce_selection_to_median,
)


def kth(xs, k):
    return sorted(xs)[k - 1]


@pytest.mark.parametrize("xs, want", [((1, 2, 3, 4), 2), ((5,), 5), ((1, 1, 2, 3), 1)])
def test_oracle_median_examples(xs, want):
    assert oracle_median(MultisetSeq(xs)) == want


def test_oracle_median_empty():
    with pytest.raises(ProtocolError, match="empty multiset"):
        oracle_median([])


@pytest.mark.parametrize(
    "ground, z, want",
    [((1, 2, 3, 4), 3, (2, 1, 1)), ((1, 1, 2), 1, (0, 2, 1)), ((2, 4, 6), 5, (2, 0, 1))],
)
def test_oracle_rank_examples(ground, z, want):
    r = oracle_rank(ground, z)
    assert (r.below, r.equal, r.above) == want


@pytest.mark.parametrize(
    "z, i, j, want", [(5, 3, 3, True), (10, 1, 0, False), (5, 5, 4, True)]
)
def test_is_mediocre_examples(z, i, j, want):
    assert is_mediocre(range(1, 11), z, MediocreSpec(i, j, 10)) is want


def test_is_mediocre_rejects_non_member():
    with pytest.raises(ProtocolError, match="not a member"):
        is_mediocre([1, 2, 3], 7, MediocreSpec(0, 0, 3))


def test_is_mediocre_uses_any_position_of_duplicates():
    # 2 occupies ranks 2..4 of 5; only rank 4 clears the bottom three
    assert is_mediocre([1, 2, 2, 2, 9], 2, MediocreSpec(1, 3, 5))
    assert is_mediocre([2, 2, 5, 6, 7, 8], 2, MediocreSpec(0, 1, 6))
    assert not is_mediocre([2, 2, 5, 6, 7, 8], 2, MediocreSpec(0, 2, 6))


def test_mediocre_spec_needs_room():
    with pytest.raises(ProtocolError):
        MediocreSpec(3, 2, 5)


def test_prefix_bits_examples():
    assert prefix_bits(0b1011, 2, 4) == 0b10
    assert prefix_bits(1, 1, 12) == 0
    for x in (0, 5, 13, 15):
        assert prefix_bits(x, 4, 4) == x
    with pytest.raises(ProtocolError, match="prefix wider than representation"):
        prefix_bits(3, 5, 4)


def test_pred_succ_examples():
    assert pred_succ([2, 4, 6], 4) == (2, 6)
    assert pred_succ([2, 4, 6], 2) == (None, 4)
    assert pred_succ([2, 4, 6], 6) == (4, None)
    with pytest.raises(ProtocolError):
        pred_succ([2, 4, 6], 5)


def test_reduce_selection_examples():
    a = (5, 1, 4, 2, 3)
    padded = reduce_selection_to_median(a, 2)
    assert len(padded) == 6 and oracle_median(padded) == kth(a, 2) == 2
    assert reduce_selection_to_median((1, 2, 3, 4), 2).values == (1, 2, 3, 4)
    up = reduce_selection_to_median((1, 2, 3, 4), 3)
    assert len(up) == 6 and up.values.count(4) == 3 and oracle_median(up) == 3
    with pytest.raises(ProtocolError):
        reduce_selection_to_median((1, 2), 3)


def test_reduce_selection_exhaustive_small():
    for size in range(1, 6):
        for xs in itertools.product(range(1, 4), repeat=size):
            for i in range(1, size + 1):
                assert oracle_median(reduce_selection_to_median(xs, i)) == kth(xs, i)


def test_pad_preserving_median_examples():
    single = pad_preserving_median([MultisetSeq((1, 2, 3))], [5], lo=1, hi=9)
    assert single[0].values == (1, 1, 2, 3, 9)
    assert oracle_median(single[0]) == 2

    players = [MultisetSeq((1, 2), 1), MultisetSeq((3,), 2)]
    assert pad_preserving_median(players, [2, 1]) == players
    out = pad_preserving_median(players, [2, 3], lo=1, hi=9)
    assert [len(p) for p in out] == [2, 3]
    assert oracle_median(out[0].values + out[1].values) == 2

    with pytest.raises(ProtocolError, match="below current size"):
        pad_preserving_median(players, [1, 1])


def test_alpha_ratio_validation():
    assert AlphaRatio(1, 3).value * 3 == 1
    assert AlphaRatio.parse("49/100").q == 100
    for p, q in [(1, 2), (0, 3), (3, 5)]:
        with pytest.raises(ProtocolError):
            AlphaRatio(p, q)
    with pytest.raises(ProtocolError):
        AlphaRatio(1, 200)


def test_universe_width():
    assert Universe(16).bit_width == 4
    assert Universe(5, 20).bit_width == 5
    assert Universe(1).bit_width == 1
    with pytest.raises(ProtocolError):
        Universe(0)


def test_multiset_validate():
    u = Universe(4)
    MultisetSeq((1, 4, 4)).validate(u)
    with pytest.raises(ProtocolError):
        MultisetSeq((0, 2)).validate(u)
    with pytest.raises(ProtocolError):
        MultisetSeq((1,) * 17).validate(u)


small_multisets = st.lists(st.integers(1, 12), min_size=1, max_size=8)


@given(small_multisets, st.data())
def test_reduction_matches_sort_and_index(xs, data):
    i = data.draw(st.integers(1, len(xs)))
    assert oracle_median(reduce_selection_to_median(xs, i)) == kth(xs, i)


@given(st.lists(small_multisets, min_size=1, max_size=4), st.data())
def test_padding_keeps_union_median(players, data):
    seqs = [MultisetSeq(tuple(p), i) for i, p in enumerate(players, 1)]
    targets = [len(p) + data.draw(st.integers(0, 6)) for p in players]
    out = pad_preserving_median(seqs, targets, lo=1, hi=12)
    before = [x for p in players for x in p]
    after = [x for p in out for x in p.values]
    assert [len(p) for p in out] == targets
    assert oracle_median(after) == oracle_median(before)


@given(small_multisets, st.integers(0, 14))
def test_rank_components_sum(xs, z):
    assert oracle_rank(xs, z).total == len(xs)


@given(st.integers(1, 12), st.data())
def test_prefix_monotone(width, data):
    ell = data.draw(st.integers(1, width))
    x = data.draw(st.integers(0, (1 << width) - 2))
    assert prefix_bits(x, ell, width) <= prefix_bits(x + 1, ell, width)


@settings(max_examples=200)
@given(st.sets(st.integers(1, 50), min_size=1, max_size=20))
def test_median_sits_in_its_own_window(xs):
    t = len(xs)
    spec = MediocreSpec(t // 2, ceil_div(t, 2) - 1, t)
    assert is_mediocre(xs, oracle_median(xs), spec)


def test_ceil_div():
    assert [ceil_div(a, 2) for a in range(5)] == [0, 1, 1, 2, 2]
