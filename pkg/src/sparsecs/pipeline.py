"""End-to-end schemes (sample -> measure -> recover) and the benchmark harness.

Three pairings of identification and estimation matrices are supported:

1. Bernoulli matrix, estimation only with |S| = N.
2. DeVore matrix for both phases, block sampling.
3. Bernoulli identification rows, DeVore estimation blocks.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import bernoulli, devore
from .finite_field import find_prime_at_least
from .measure import measure_stream
from .oracle import check_guarantee
from .recover import ESTIMATE_ONLY, FULL, RecoveryConfig, recover
from .sampler import (
    EST,
    IDENT,
    RowSample,
    estimation_count,
    identification_count,
    sample_blocks,
    sample_rows,
)

C_INTERVAL = 14


def default_devore_K(k: int, epsilon: float, N: int, c: int = C_INTERVAL) -> int:
    """Smallest K_target with P = nextprime(K_target) and P > c k alpha(P) / eps."""
    alpha = 0
    while True:
        K = max(2, math.ceil(c * k * alpha / epsilon - 1e-9) + 1)
        P = find_prime_at_least(K)
        if devore.DeVorePlan(P, N).alpha <= alpha:
            return K
        alpha += 1


def default_bernoulli_K(k: int, epsilon: float, N: int, sigma: float, c: int = C_INTERVAL) -> int:
    """Fixed point of K = ceil(c k alpha / eps) + 1 with alpha from the rounded plan."""
    alpha = bernoulli.alpha_floor(N, sigma)
    for _ in range(100):
        K = math.ceil(c * k * alpha / epsilon - 1e-9) + 1
        plan = bernoulli.plan_parameters(K, N, sigma)
        if K > c * k * plan.alpha / epsilon:
            return K
        alpha = plan.alpha
    raise RuntimeError("default K iteration did not converge")


@dataclass
class Scheme:
    config: int
    N: int
    k: int
    epsilon: float
    sigma: float
    ident: Optional[RowSample]
    est: RowSample
    info: dict = field(default_factory=dict)

    @property
    def recovery_config(self) -> RecoveryConfig:
        mode = ESTIMATE_ONLY if self.config == 1 else FULL
        return RecoveryConfig(self.k, self.epsilon, self.sigma, mode)


def _sub_seeds(seed: int, n: int):
    ss = np.random.SeedSequence([int(seed), 0xC5])
    return [int(s.generate_state(1, np.uint64)[0]) for s in ss.spawn(n)]


def _devore_est(plan, S_bound, sigma, seed) -> RowSample:
    # block variant: every block puts exactly one row through each column, so
    # l_tilde blocks give every column l_tilde estimation rows
    _, l_tilde = estimation_count(plan.P, plan.P, S_bound, sigma)
    return sample_blocks(plan, math.ceil(l_tilde - 1e-9), seed, kind=EST)


def build_scheme(N: int, k: int, epsilon: float, sigma: float, config: int, seed: int,
                 K: Optional[int] = None) -> Scheme:
    """Construct the base matrices and row samples for one of the three matrix pairings."""
    s_mat, s_ident, s_est = _sub_seeds(seed, 3)
    if config == 1:
        K = K or default_bernoulli_K(k, epsilon, N, sigma)
        plan = bernoulli.plan_parameters(K, N, sigma)
        base = bernoulli.ImplicitBernoulli(plan, s_mat)
        beta, l_tilde = estimation_count(plan.m, K, N, sigma)
        est = sample_rows(base, beta, s_est, dedupe=False)
        info = dict(family="bernoulli", K=K, m=plan.m, alpha=plan.alpha, beta=beta, l_tilde=l_tilde)
        return Scheme(config, N, k, epsilon, sigma, None, est, info)
    if config == 2:
        K = K or default_devore_K(k, epsilon, N)
        plan = devore.make_plan(K, N)
        blocks = identification_count(plan.P, plan.P, k, epsilon, sigma)
        ident = sample_blocks(plan, blocks, s_ident, kind=IDENT)
        est = _devore_est(plan, ident.size, sigma, s_est)
        info = dict(family="devore", K=plan.K, P=plan.P, m=plan.m, alpha=plan.alpha,
                    ident_blocks=blocks, est_blocks=est.count)
        return Scheme(config, N, k, epsilon, sigma, ident, est, info)
    if config == 3:
        Kb = K or default_bernoulli_K(k, epsilon, N, sigma)
        bplan = bernoulli.plan_parameters(Kb, N, sigma)
        base = bernoulli.ImplicitBernoulli(bplan, s_mat)
        gamma = identification_count(bplan.m, Kb, k, epsilon, sigma)
        ident = sample_rows(base, gamma, s_ident, dedupe=True)
        dplan = devore.make_plan(default_devore_K(k, epsilon, N), N)
        est = _devore_est(dplan, gamma, sigma, s_est)
        info = dict(family="bernoulli+devore", K=Kb, m=bplan.m, alpha=bplan.alpha, gamma=gamma,
                    P=dplan.P, est_blocks=est.count)
        return Scheme(config, N, k, epsilon, sigma, ident, est, info)
    raise ValueError(f"unknown configuration {config}")


def sparse_signal(N: int, k: int, rng, low=1.0, high=10.0) -> np.ndarray:
    x = np.zeros(N)
    S = rng.choice(N, size=k, replace=False)
    x[S] = rng.uniform(low, high, size=k) * rng.choice([-1.0, 1.0], size=k)
    return x


def noisy_signal(N: int, k: int, rng, tail_l1=1.0, low=1.0, high=10.0) -> np.ndarray:
    """k spikes plus a dense Laplace tail with expected l1 mass ``tail_l1``."""
    return sparse_signal(N, k, rng, low, high) + rng.laplace(0.0, tail_l1 / N, size=N)


@dataclass
class TrialOutcome:
    exact: bool
    holds: bool
    lhs: float
    rhs: float
    measurements: int
    measure_time: float
    recover_time: float
    sample_time: float


def run_trial(scheme: Scheme, x) -> TrialOutcome:
    t0 = time.perf_counter()
    bundle = measure_stream(scheme.ident, scheme.est, x, scheme.k, scheme.epsilon, scheme.sigma)
    t1 = time.perf_counter()
    res = recover(bundle, scheme.recovery_config)
    t2 = time.perf_counter()
    z = res.z
    chk = check_guarantee(x, z, scheme.k, scheme.epsilon)
    return TrialOutcome(bool(np.array_equal(z, x)), chk.holds, chk.lhs, chk.rhs,
                        bundle.measurement_count, t1 - t0, t2 - t1, 0.0)


def seeded_trial(N, k, epsilon, sigma, config, seed, noisy=True, K=None, tail_l1=1.0):
    """Fresh matrices, samples and signal, all derived from ``seed``."""
    t0 = time.perf_counter()
    scheme = build_scheme(N, k, epsilon, sigma, config, seed, K)
    if scheme.ident is not None:
        scheme.ident.column_matrix([0])  # force row generation before timing measurement
    ts = time.perf_counter() - t0
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x516]))
    x = noisy_signal(N, k, rng, tail_l1) if noisy else sparse_signal(N, k, rng)
    out = run_trial(scheme, x)
    out.sample_time = ts
    return out


def _cell(args):
    N, k, epsilon, sigma, config, seeds, noisy = args
    outs = [seeded_trial(N, k, epsilon, sigma, config, s, noisy) for s in seeds]
    return dict(
        N=N, k=k, family=config,
        measurements=int(np.median([o.measurements for o in outs])),
        recover_time=float(np.median([o.recover_time for o in outs])),
        measure_time=float(np.median([o.measure_time for o in outs])),
        success_rate=float(np.mean([o.holds for o in outs])),
    )


BENCH_FIELDS = ["N", "k", "family", "measurements", "recover_time", "measure_time", "success_rate"]


def bench(Ns, ks, configs=(3,), trials=5, seed=0, epsilon=1.0, sigma=2 / 3, noisy=True, workers=1):
    """One row per (N, k, config) grid cell, in grid order."""
    cells = []
    for ci, (N, k, config) in enumerate((N, k, c) for N in Ns for k in ks for c in configs):
        seeds = [int(s) for s in np.random.SeedSequence([int(seed), ci]).generate_state(trials, np.uint32)]
        cells.append((N, k, epsilon, sigma, config, seeds, noisy))
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(_cell, cells))
    return [_cell(c) for c in cells]
