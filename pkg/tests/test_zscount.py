from __future__ import annotations

import math

import numpy as np
import pytest
from oracles import subset_counts

from zerosum.errors import BudgetExceeded, NotASubsequence
from zerosum.groups import make_group
from zerosum.lengths import LengthSet
from zerosum.sequences import GSequence, sample_uniform
from zerosum.zscount import brute_force_profile, has_zero_sum_with_length_in, profile, profile_without

C3 = make_group([3])
C5 = make_group([5])
C33 = make_group([3, 3])
C24 = make_group([2, 4])


def test_profile_examples():
    assert profile(GSequence.from_indices(C3, [0] * 5)).counts == tuple(math.comb(5, k) for k in range(6))
    assert profile(GSequence.from_indices(C3, [1] * 3)).counts == (1, 0, 0, 1)
    P = profile(GSequence.empty(C33))
    assert P.counts == (1,) and P[0] == 1 and P[-1] == 0 and P[3] == 0


def test_profile_without_examples():
    X = GSequence.from_indices(C3, [0] * 4)
    assert profile_without(X, GSequence.empty(C3)) == profile(X)
    assert profile_without(X, X).counts == (1,)
    assert profile_without(X, GSequence.from_indices(C3, [0])).counts == (1, 3, 3, 1)
    with pytest.raises(NotASubsequence):
        profile_without(X, GSequence.from_indices(C3, [1]))


def test_has_zero_sum_examples():
    assert has_zero_sum_with_length_in(GSequence.from_indices(C5, [1, 4]), {2})
    free = GSequence.from_indices(C33, [1, 1, 3, 3])  # (1,0)^2 (0,1)^2
    assert not has_zero_sum_with_length_in(free, LengthSet.all())
    rng = np.random.default_rng(5)
    for _ in range(200):
        assert has_zero_sum_with_length_in(sample_uniform(C3, 5, rng), {3})


@pytest.mark.parametrize("G", [C3, C5, C33, C24], ids=lambda G: G.canonical())
def test_oracle_equivalence(G):
    rng = np.random.default_rng(G.order)
    for _ in range(500):
        X = sample_uniform(G, int(rng.integers(0, 13)), rng)
        want = subset_counts(G, X.indices())
        P = profile(X)
        assert list(P.counts) == want
        assert list(brute_force_profile(X)) == want
        for m in (2, 3, 5):
            assert profile(X, "mod", m).counts == tuple(c % m for c in want)
        lengths = {int(k) for k in rng.integers(1, 13, size=3)}
        assert has_zero_sum_with_length_in(X, lengths) == any(want[k] for k in lengths if k < len(want))


def test_complement_symmetry():
    rng = np.random.default_rng(11)
    G = make_group([3, 9])
    seen = 0
    for _ in range(400):
        X = sample_uniform(G, int(rng.integers(1, 25)), rng)
        if any(X.sum().coords):
            continue
        seen += 1
        c = profile(X).counts
        assert c == c[::-1]
    assert seen > 5


def test_automorphism_invariance():
    G = make_group([3, 3, 3])
    rng = np.random.default_rng(12)
    for _ in range(50):
        X = sample_uniform(G, int(rng.integers(0, 20)), rng)
        perm = rng.permutation(3)
        Y = GSequence.from_elements(G, [tuple(g.coords[i] for i in perm) for g in X.elements()])
        assert profile(X) == profile(Y)


def test_total_count_detects_zero_sum_free():
    rng = np.random.default_rng(13)
    for _ in range(300):
        X = sample_uniform(C33, int(rng.integers(0, 7)), rng)
        total = sum(profile(X).counts)
        assert total >= 1
        assert (total == 1) == (not has_zero_sum_with_length_in(X, LengthSet.all()))


def test_exact_counts_beyond_int64():
    X = GSequence.from_indices(C3, [0] * 70)
    c = profile(X).counts
    assert c[35] == math.comb(70, 35)
    assert profile(X, "mod", 3).counts == tuple(v % 3 for v in c)


def test_exact_counts_bounded_by_binomials():
    rng = np.random.default_rng(14)
    for _ in range(50):
        X = sample_uniform(C24, int(rng.integers(0, 30)), rng)
        c = profile(X).counts
        assert all(v <= math.comb(X.length, k) for k, v in enumerate(c))


def test_budget():
    X = GSequence.from_indices(C33, [0] * 40)
    with pytest.raises(BudgetExceeded):
        profile(X, budget=1000)
