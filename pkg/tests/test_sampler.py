import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sparsecs.binmat import ExplicitBinaryMatrix
from sparsecs.devore import DeVorePlan, materialize
from sparsecs.oracle import error_budget, head, in_interval
from sparsecs.sampler import (
    EST,
    IDENT,
    RowSample,
    blocks_sample,
    estimation_count,
    identification_count,
    sample_blocks,
    sample_rows,
    submatrix_column_support,
)


def test_identification_count_examples():
    assert 7 / 3 * math.log(12) == pytest.approx(5.80, abs=0.01)
    assert identification_count(100, 50, 2, 1.0, 2 / 3) == 6
    assert identification_count(50, 50, 1, 1.0, 2 / 3) == math.ceil(7 / 6 * math.log(6)) == 3


@given(st.floats(2 / 3, 0.99), st.floats(2 / 3, 0.99), st.integers(1, 50), st.integers(1, 10**4))
def test_identification_count_monotone_in_sigma(s1, s2, k, m):
    lo, hi = sorted((s1, s2))
    assert identification_count(m, 7, k, 0.5, lo) <= identification_count(m, 7, k, 0.5, hi)


def test_identification_count_domain():
    with pytest.raises(ValueError):
        identification_count(100, 50, 2, 1.0, 0.5)
    with pytest.raises(ValueError):
        identification_count(100, 50, 2, 0.3, 2 / 3)


def test_estimation_count_examples():
    beta, lt = estimation_count(100, 50, 4, 2 / 3)
    assert lt == pytest.approx(21 * math.log(24)) and round(lt, 2) == 66.74
    assert beta == math.ceil(57.12 * math.log(24)) == 182
    assert estimation_count(40, 40, 1, 2 / 3)[0] == math.ceil(28.56 * math.log(6)) == 52
    # beta / l_tilde = 1.36 m/K before rounding
    assert 28.56 / 21 == pytest.approx(1.36)


def test_sample_rows_single_row_universe():
    base = ExplicitBinaryMatrix.from_dense(np.ones((1, 3), dtype=int))
    est = sample_rows(base, 5, 0, dedupe=False)
    assert est.rows.tolist() == [0] * 5
    assert est.distinct.tolist() == [0] and est.multiplicities.tolist() == [5]
    ident = sample_rows(base, 5, 0, dedupe=True)
    assert ident.rows.tolist() == [0] and ident.kind == IDENT


def test_sample_rows_deterministic_and_uniform():
    plan = DeVorePlan(11, 121)
    a, b = sample_rows(plan, 500, 3, False), sample_rows(plan, 500, 3, False)
    assert a.rows.tolist() == b.rows.tolist()
    assert a.rows.tolist() != sample_rows(plan, 500, 4, False).rows.tolist()
    draws = sample_rows(plan, 121 * 400, 9, False).rows
    counts = np.bincount(draws, minlength=121)
    # chi-square against uniform, 120 dof: mean 120, sd ~15.5
    chi2 = ((counts - 400) ** 2 / 400).sum()
    assert chi2 < 120 + 5 * 15.5


def test_sample_blocks_examples():
    plan = DeVorePlan(3, 9)
    s = blocks_sample(plan, [2])
    assert sorted(s.rows.tolist()) == [6, 7, 8]
    assert s.random_bits == math.ceil(math.log2(3))
    assert sample_blocks(DeVorePlan(11, 121), 10, 0).random_bits == 40
    s = sample_blocks(DeVorePlan(11, 121), 10, 5)
    C = s.column_matrix(np.arange(121)).toarray()
    weights = (C * s.multiplicities[:, None]).sum(axis=0)
    assert (weights == 10).all()


def test_submatrix_column_support_examples():
    plan = DeVorePlan(3, 9)
    s = blocks_sample(plan, [2])
    assert submatrix_column_support(s, 5) == [(s.position(7), 1)]
    base = ExplicitBinaryMatrix.from_dense([[1, 0], [0, 1]])
    s = RowSample(base, [0, 0], EST)
    assert submatrix_column_support(s, 0) == [(0, 2)]
    assert submatrix_column_support(s, 1) == []


def test_column_matrix_matches_submatrix():
    plan = DeVorePlan(7, 49)
    D = materialize(plan).to_dense()
    for s in (sample_rows(plan, 30, 1, True), sample_rows(plan, 30, 2, False),
              sample_blocks(plan, 4, 3, kind=IDENT), sample_blocks(plan, 4, 3)):
        C = s.column_matrix(np.arange(49)).toarray()
        assert (C == D[s.distinct]).all()


def spike_tail(N, rng, k=2):
    x = rng.laplace(size=N)
    x /= np.abs(x).sum()
    S = rng.choice(N, k, replace=False)
    x[S] = rng.uniform(2, 10, k) * rng.choice([-1, 1], k)
    return x


def test_coupon_collection_identification():
    plan = DeVorePlan(11, 121)
    D = materialize(plan).to_dense().astype(float)
    k, eps, sigma = 2, 1.0, 2 / 3
    gamma = identification_count(plan.m, plan.K, k, eps, sigma)
    hits = 0
    for t in range(200):
        rng = np.random.default_rng(t)
        x = spike_tail(121, rng)
        h = error_budget(x, k, eps).interval_halfwidth
        S, _ = head(x, round(2 * k / eps))
        s = sample_rows(plan, gamma, t, dedupe=True)
        vals = D[s.distinct] @ x
        hits += all(
            any(D[r, n] and in_interval([v], x[n], h)[0] for r, v in zip(s.distinct, vals)) for n in S
        )
    assert hits / 200 >= sigma - 0.1


def test_estimation_properties():
    plan = DeVorePlan(11, 121)
    D = materialize(plan).to_dense().astype(float)
    k, eps, sigma = 2, 1.0, 2 / 3
    S_size = 4
    beta, l_tilde = estimation_count(plan.m, plan.K, S_size, sigma)
    ok = 0
    for t in range(200):
        rng = np.random.default_rng(1000 + t)
        x = spike_tail(121, rng)
        h = error_budget(x, k, eps).interval_halfwidth
        S, _ = head(x, S_size)
        s = sample_rows(plan, beta, t, dedupe=False)
        vals = D[s.rows] @ x  # physical duplicates
        good = True
        for n in S:
            through = D[s.rows, n] > 0
            ln = through.sum()
            if ln < l_tilde or 2 * in_interval(vals[through], x[n], h).sum() <= ln:
                good = False
                break
        ok += good
    assert ok / 200 >= sigma - 0.1
