import numpy as np
import pytest
from hypothesis import given, strategies as st

from sparsecs.binmat import ExplicitBinaryMatrix
from sparsecs.devore import DeVorePlan, column_support, materialize
from sparsecs.oracle import (
    InapplicableBound,
    best_k_term,
    check_guarantee,
    dense_apply,
    error_budget,
    interval_count,
)


def test_best_k_term_examples():
    S, xo, b = best_k_term(np.array([3.0, -5.0, 1.0]), 1)
    assert S == {1} and b.tail_l1 == 4 and xo.tolist() == [0, -5, 0]
    x = np.array([1.0, -2.0, 3.0])
    assert best_k_term(x, 3)[2].tail_l1 == 0 and best_k_term(x, 3)[2].tail_l2 == 0
    S, xo, b = best_k_term(x, 0)
    assert S == set() and not xo.any() and b.tail_l1 == 6


def test_best_k_term_ties_smaller_index():
    S, _, _ = best_k_term(np.array([2.0, -2.0, 2.0, 1.0]), 2)
    assert S == {0, 1}


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=200), st.data())
def test_best_k_term_vs_full_sort(xs, data):
    x = np.array(xs)
    k = data.draw(st.integers(0, x.size))
    S, xo, b = best_k_term(x, k)
    ordered = sorted(range(x.size), key=lambda i: (-abs(x[i]), i))
    assert S == set(ordered[:k])
    assert b.tail_l1 == pytest.approx(sum(abs(x[i]) for i in ordered[k:]), rel=1e-9, abs=1e-9)
    assert b.heavy_threshold == 4 * b.interval_halfwidth


def test_best_k_term_large_random(rng):
    x = rng.normal(size=10**4)
    S, _, _ = best_k_term(x, 50)
    assert S == set(np.argsort(-np.abs(x), kind="stable")[:50].tolist())


@given(st.lists(st.floats(-100, 100), min_size=2, max_size=50))
def test_tails_nonincreasing(xs):
    x = np.array(xs)
    t = [error_budget(x, k).tail_l1 for k in range(1, x.size + 1)]
    assert all(a >= b - 1e-9 for a, b in zip(t, t[1:]))


def test_dense_apply_examples(rng):
    I = ExplicitBinaryMatrix.from_dense(np.eye(4, dtype=int))
    x = rng.normal(size=4)
    assert np.allclose(dense_apply(I, x), x)
    ones = ExplicitBinaryMatrix.from_dense(np.ones((1, 4), dtype=int))
    assert dense_apply(ones, x)[0] == pytest.approx(x.sum())
    plan = DeVorePlan(3, 9)
    for _ in range(10):
        x = rng.normal(size=9)
        y = dense_apply(plan, x)
        want = np.zeros(9)
        for j in range(9):
            for r in column_support(plan, j):
                want[r] += x[j]
        assert np.allclose(y, want)
    with pytest.raises(ValueError):
        dense_apply(plan, np.zeros(8))


def test_interval_count_examples():
    plan = DeVorePlan(29, 121)
    x = np.zeros(121)
    assert all(interval_count(plan, 29, n, x, 2, 1.0, 14) == 1.0 for n in range(0, 121, 7))
    x[17] = 4.0
    assert interval_count(plan, 29, 17, x, 2, 1.0, 14) == 1.0


def test_interval_count_preconditions():
    with pytest.raises(InapplicableBound):
        interval_count(DeVorePlan(11, 121), 11, 0, np.zeros(121), 2, 1.0, 14)


def test_interval_count_adversarial(rng):
    """Tail mass concentrated on the columns that overlap most with n."""
    plan = DeVorePlan(29, 121)
    M = materialize(plan)
    D = M.to_dense()
    for n in range(0, 121, 10):
        overlap = D.T @ D[:, n]
        overlap[n] = -1
        x = np.zeros(121)
        x[n] = 5.0
        others = np.argsort(-overlap)[:20]
        x[others[:2]] = [9.0, -9.0]
        x[others[2:]] = rng.normal(size=18) * 0.1
        assert interval_count(M, 29, n, x, 2, 1.0, 14, alpha=1) > 12 / 14


def test_check_guarantee_examples():
    x = np.array([1.0, 0, 0, 0])
    assert check_guarantee(x, x, 1, 1.0).holds
    c = check_guarantee(x, np.zeros(4), 1, 1.0)
    assert not c.holds and c.lhs == 1 and c.rhs == 0
