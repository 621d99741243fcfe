import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sparsecs.binmat import ExplicitBinaryMatrix
from sparsecs.devore import DeVorePlan
from sparsecs.measure import bit_length, measure_stream
from sparsecs.pipeline import build_scheme, default_devore_K, noisy_signal, run_trial, sparse_signal
from sparsecs.recover import (
    ESTIMATE_ONLY,
    RecoveryConfig,
    estimate,
    grouped_weighted_median,
    identify,
    recover,
    truncate,
)
from sparsecs.sampler import EST, IDENT, RowSample, full_sample


def test_identify_one_sparse():
    base = ExplicitBinaryMatrix.from_dense(np.ones((1, 4), dtype=int))
    ident = RowSample(base, [0], IDENT)
    b = measure_stream(ident, RowSample(base, [0], EST), np.array([0, 0, 5.0, 0]))
    n, discarded = identify(b)
    assert n.tolist() == [2] and discarded == 0


def test_identify_zero_signal():
    base = ExplicitBinaryMatrix.from_dense(np.ones((3, 16), dtype=int))
    b = measure_stream(RowSample(base, [0, 1, 2], IDENT), RowSample(base, [0], EST), np.zeros(16))
    assert identify(b)[0].tolist() == [0, 0, 0]


def test_identify_two_isolated_spikes():
    # rows 0 and 1 each isolate one spike, row 2 sees both
    D = np.zeros((3, 16), dtype=int)
    D[0, [3, 5, 8]] = 1
    D[1, [11, 8, 0]] = 1
    D[2, [3, 11]] = 1
    base = ExplicitBinaryMatrix.from_dense(D)
    x = np.zeros(16)
    x[3], x[11] = 2.0, -7.0
    b = measure_stream(RowSample(base, [0, 1, 2], IDENT), RowSample(base, [0], EST), x)
    assert {3, 11} <= set(identify(b)[0].tolist())


def test_identify_discards_out_of_range():
    N = 5  # 3 bits can encode up to 7
    base = ExplicitBinaryMatrix.from_dense(np.ones((1, N), dtype=int))
    b = measure_stream(RowSample(base, [0], IDENT), RowSample(base, [0], EST), np.zeros(N))
    b.ident[:] = 1.0  # every bit row equals the total: decodes 7
    n, discarded = identify(b)
    assert n.size == 0 and discarded == 1 and bit_length(N) == 3


def test_median_examples():
    assert grouped_weighted_median([0] * 5, [3.0, 3.1, 2.9, 10.0, 3.0], [1] * 5, 1)[0] == 3.0
    assert grouped_weighted_median([0, 0], [1.0, 2.0], [1, 1], 1)[0] == 1.5
    assert grouped_weighted_median([0, 0], [1.0, 2.0], [2, 1], 1)[0] == 1.0
    assert np.isnan(grouped_weighted_median([0], [1.0], [1], 2)[1])


@settings(max_examples=200)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(-20, 20), st.integers(1, 4)), max_size=40))
def test_weighted_median_equals_physical_duplication(items):
    g = np.array([i[0] for i in items], dtype=int)
    v = np.array([i[1] for i in items], dtype=float)
    w = np.array([i[2] for i in items], dtype=int)
    got = grouped_weighted_median(g, v, w, 5)
    for grp in range(5):
        vals = np.repeat(v[g == grp], w[g == grp])
        if vals.size:
            assert got[grp] == np.median(vals)
        else:
            assert np.isnan(got[grp])


def test_duplicated_row_counts_twice():
    D = np.zeros((3, 4), dtype=int)
    D[:, 1] = 1
    D[0, 2] = 1
    base = ExplicitBinaryMatrix.from_dense(D)
    x = np.array([0, 1.0, 9.0, 0])
    # rows through column 1 give values 10, 1, 1; duplicating row 0 ties the median
    once = measure_stream(None, RowSample(base, [0, 1, 2], EST), x)
    twice = measure_stream(None, RowSample(base, [0, 0, 1, 2], EST), x)
    assert estimate([1], once)[0][1] == 1.0
    assert estimate([1], twice)[0][1] == np.median([10, 10, 1, 1])


def test_estimate_drops_uncovered():
    D = np.zeros((2, 3), dtype=int)
    D[:, 0] = 1
    base = ExplicitBinaryMatrix.from_dense(D)
    b = measure_stream(None, RowSample(base, [0, 1], EST), np.array([2.0, 0, 0]))
    ests, dropped = estimate([0, 2], b)
    assert ests == {0: 2.0} and dropped == [2]


def test_truncate_examples():
    assert truncate({4: 1.5}, 2)[0].tolist() == [4]
    idx, val = truncate({0: 5.0, 1: -7.0, 2: 1.0}, 1)
    assert set(idx.tolist()) == {0, 1}
    idx, _ = truncate({3: 2.0, 5: -2.0, 1: 9.0, 7: 0.5}, 1)
    assert set(idx.tolist()) == {1, 3}
    assert truncate({0: 0.0, 1: 1.0}, 3)[0].tolist() == [1]


@settings(max_examples=100)
@given(st.dictionaries(st.integers(0, 1000), st.floats(-10, 10), max_size=50), st.integers(1, 10))
def test_truncate_support_bound(ests, k):
    idx, val = truncate(ests, k)
    assert idx.size <= 2 * k and set(idx.tolist()) <= set(ests)


def test_recover_one_sparse_exact():
    x = np.zeros(16)
    x[9] = 7.0
    for config in (2, 3):
        s = build_scheme(16, 1, 1.0, 2 / 3, config, 4)
        out = run_trial(s, x)
        assert out.exact


def test_recover_zero_signal():
    s = build_scheme(64, 2, 1.0, 2 / 3, 3, 1)
    b = measure_stream(s.ident, s.est, np.zeros(64))
    r = recover(b, s.recovery_config)
    assert r.support.size == 0 and not r.z.any()


def test_estimate_only_full_devore_zero_tail():
    plan = DeVorePlan(default_devore_K(2, 1.0, 200), 200)
    est = full_sample(plan)
    x = np.zeros(200)
    x[[4, 150]] = [3.0, -1.0]
    r = recover(measure_stream(None, est, x), RecoveryConfig(2, mode=ESTIMATE_ONLY))
    assert (r.z == x).all()


@pytest.mark.parametrize("config", [2, 3])
def test_exact_sparse_recovery_rate(config):
    ok = 0
    for t in range(200):
        s = build_scheme(256, 2, 1.0, 2 / 3, config, t)
        x = sparse_signal(256, 2, np.random.default_rng(t))
        ok += run_trial(s, x).exact
    assert ok / 200 >= 2 / 3 - 0.1


@pytest.mark.parametrize("config", [2, 3])
def test_noisy_guarantee_rate(config):
    ok = 0
    for t in range(200):
        s = build_scheme(256, 4, 0.5, 2 / 3, config, 500 + t)
        x = noisy_signal(256, 4, np.random.default_rng(500 + t))
        out = run_trial(s, x)
        ok += out.holds
        assert out.measurements == s.ident.size * (1 + 8) + s.est.size
    assert ok / 200 >= 2 / 3 - 0.1


def test_estimate_only_bernoulli_config():
    s = build_scheme(64, 1, 1.0, 2 / 3, 1, 3)
    x = noisy_signal(64, 1, np.random.default_rng(3))
    out = run_trial(s, x)
    assert out.holds
    assert out.measurements == s.est.size <= s.info["beta"]


def test_parallel_equals_serial():
    from sparsecs.pipeline import bench
    a = bench([256], [2], configs=(2,), trials=2, seed=3)
    b = bench([256], [2], configs=(2,), trials=2, seed=3, workers=2)
    strip = lambda rows: [{k: v for k, v in r.items() if "time" not in k} for r in rows]
    assert strip(a) == strip(b)
