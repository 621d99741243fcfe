"""Random (K, alpha)-coherent matrices with i.i.d. Bernoulli(p) entries.

Row i of a matrix generated from ``seed`` is drawn from its own stream
``SeedSequence([seed, i])``: one uniform double per entry, left to right,
compared against p. Any subset of rows can therefore be regenerated without
touching the others, which is what the sampler relies on for matrices far too
large to store.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .binmat import DEFAULT_BUDGET, BudgetExceeded, ExplicitBinaryMatrix

LN_4_OVER_E = math.log(4.0 / math.e)


class PreconditionError(ValueError):
    pass


class AttemptsExhausted(RuntimeError):
    def __init__(self, attempts):
        super().__init__(f"no coherent matrix after {attempts} attempts")
        self.attempts = attempts


@dataclass(frozen=True)
class BernoulliPlan:
    K: int
    N: int
    sigma: float
    p: float
    m: int
    alpha: float
    mp: float = float("nan")  # unrounded right-hand side of the mp equation

    @property
    def alpha_threshold(self) -> int:
        # inner products are integers; round the bound up
        return math.ceil(self.alpha - 1e-9)


def column_weight_target(K: int, N: int, sigma: float) -> float:
    """Required mean column weight mp for every column to hold >= K ones."""
    L = math.log(3 * N / (1 - sigma))
    return K + L + math.sqrt(2 * K * L + L * L)


def alpha_floor(N: int, sigma: float) -> float:
    """2 log_{4/e}(3N^2/(1-sigma)): the smallest admissible alpha."""
    return 2 * math.log(3 * N * N / (1 - sigma)) / LN_4_OVER_E


def plan_parameters(K: int, N: int, sigma: float) -> BernoulliPlan:
    if not 0 <= sigma < 1:
        raise ValueError(f"sigma must lie in [0, 1), got {sigma}")
    if K < 1 or N < 2:
        raise ValueError("need K >= 1 and N >= 2")
    mp = column_weight_target(K, N, sigma)
    half_alpha = alpha_floor(N, sigma) / 2  # = m p^2
    p = half_alpha / mp
    m = math.ceil(mp / p - 1e-9)
    alpha = 2 * m * p * p
    if not K >= alpha >= 2 * half_alpha - 1e-9:
        raise PreconditionError(
            f"K={K} too small for N={N}, sigma={sigma}: need K >= alpha = {alpha:.4g}"
        )
    return BernoulliPlan(K=K, N=N, sigma=sigma, p=p, m=m, alpha=alpha, mp=mp)


def _row_stream(seed: int, row: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(row)])))


def generate_rows(p: float, N: int, seed: int, rows) -> ExplicitBinaryMatrix:
    """The listed rows (in the given order) of the matrix defined by (p, N, seed)."""
    supports = []
    for i in rows:
        u = _row_stream(seed, i).random(N)
        supports.append(np.flatnonzero(u < p))
    return ExplicitBinaryMatrix.from_rows(supports, N)


def generate(plan: BernoulliPlan, seed: int, budget: int = DEFAULT_BUDGET) -> ExplicitBinaryMatrix:
    if plan.m * plan.N > budget:
        raise BudgetExceeded(f"{plan.m}x{plan.N} exceeds explicit budget {budget}")
    return generate_rows(plan.p, plan.N, seed, range(plan.m))


@dataclass(frozen=True)
class ImplicitBernoulli:
    """Header-only Bernoulli matrix; rows are regenerated from the seed."""

    plan: BernoulliPlan
    seed: int

    @property
    def m(self) -> int:
        return self.plan.m

    @property
    def N(self) -> int:
        return self.plan.N

    @property
    def K(self) -> int:
        return self.plan.K

    @property
    def alpha(self) -> float:
        return self.plan.alpha

    def rows(self, idx) -> ExplicitBinaryMatrix:
        return generate_rows(self.plan.p, self.plan.N, self.seed, idx)

    def materialize(self, budget: int = DEFAULT_BUDGET) -> ExplicitBinaryMatrix:
        return generate(self.plan, self.seed, budget)


@dataclass(frozen=True)
class CoherenceReport:
    min_column_weight: int
    max_pair_inner_product: int
    K: int
    alpha: int
    max_row_weight: int  # informational only

    @property
    def satisfies(self) -> bool:
        return self.min_column_weight >= self.K and self.max_pair_inner_product <= self.alpha


def max_pair_inner_product(matrix: ExplicitBinaryMatrix) -> int:
    if matrix.N < 2:
        return 0
    if matrix.m * matrix.N <= DEFAULT_BUDGET and matrix.N <= 20_000:
        A = matrix.to_dense().astype(np.float32)
        G = A.T @ A  # exact: entries < 2**24
    else:
        c = matrix.csc.astype(np.int32)
        G = (c.T @ c).toarray()
    np.fill_diagonal(G, -1)
    return int(G.max())


def verify_coherence(matrix: ExplicitBinaryMatrix, K: int, alpha: int) -> CoherenceReport:
    w = matrix.column_weights()
    rw = matrix.row_weights()
    return CoherenceReport(
        min_column_weight=int(w.min()) if w.size else 0,
        max_pair_inner_product=max_pair_inner_product(matrix),
        K=int(K),
        alpha=int(alpha),
        max_row_weight=int(rw.max()) if rw.size else 0,
    )


class Verified(NamedTuple):
    matrix: ExplicitBinaryMatrix
    seed: int
    attempts: int


def attempt_seed(seed: int, attempt: int) -> int:
    ss = np.random.SeedSequence([int(seed), int(attempt), 0x5EED])
    return int(ss.generate_state(1, np.uint64)[0])


def generate_verified(plan: BernoulliPlan, seed: int, max_attempts: int) -> Verified:
    """Las Vegas generation: redraw with derived sub-seeds until coherent."""
    for a in range(max_attempts):
        s = attempt_seed(seed, a)
        M = generate(plan, s)
        if verify_coherence(M, plan.K, plan.alpha_threshold).satisfies:
            return Verified(M, s, a + 1)
    raise AttemptsExhausted(max_attempts)

