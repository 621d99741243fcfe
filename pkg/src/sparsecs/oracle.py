"""Brute-force ground truth used to adjudicate the fast paths."""

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .binmat import ExplicitBinaryMatrix
from .devore import DeVorePlan, materialize


class InapplicableBound(ValueError):
    pass


@dataclass(frozen=True)
class ErrorBudget:
    k: int
    epsilon: float
    tail_l1: float  # ||x - x_opt(k/eps)||_1
    tail_l2: float  # ||x - x_opt(k)||_2

    @property
    def interval_halfwidth(self) -> float:
        return self.epsilon * self.tail_l1 / self.k if self.k else math.inf

    @property
    def heavy_threshold(self) -> float:
        return 4 * self.interval_halfwidth


def magnitude_order(x) -> np.ndarray:
    """Indices by decreasing |x|, ties broken by smaller index."""
    x = np.asarray(x, dtype=float)
    return np.lexsort((np.arange(x.size), -np.abs(x)))


def head(x, k: int):
    """(support, x_opt) for the best k-term approximation."""
    x = np.asarray(x, dtype=float)
    k = max(0, min(int(k), x.size))
    S = magnitude_order(x)[:k]
    xo = np.zeros_like(x)
    xo[S] = x[S]
    return S, xo


def error_budget(x, k: int, epsilon: float = 1.0) -> ErrorBudget:
    x = np.asarray(x, dtype=float)
    _, xk = head(x, k)
    _, xke = head(x, round(k / epsilon))
    return ErrorBudget(k, epsilon, float(np.abs(x - xke).sum()), float(np.linalg.norm(x - xk)))


def best_k_term(x, k: int, epsilon: float = 1.0):
    if not 0 <= k <= len(x):
        raise ValueError(f"k={k} outside [0, {len(x)}]")
    S, xo = head(x, k)
    return set(int(i) for i in S), xo, error_budget(x, k, epsilon)


def _explicit(M) -> ExplicitBinaryMatrix:
    return materialize(M) if isinstance(M, DeVorePlan) else M


def dense_apply(M: Union[ExplicitBinaryMatrix, DeVorePlan, np.ndarray], x) -> np.ndarray:
    """Full-scan matrix-vector product."""
    if not isinstance(M, np.ndarray):
        M = _explicit(M).to_dense()
    x = np.asarray(x, dtype=float)
    if M.shape[1] != x.size:
        raise ValueError(f"dimension mismatch: {M.shape} vs {x.size}")
    out = np.zeros(M.shape[0])
    for i in range(M.shape[0]):
        out[i] = math.fsum(x[M[i] != 0])
    return out


def in_interval(values, centre: float, halfwidth: float) -> np.ndarray:
    """Open interval test; a zero-width interval degenerates to equality."""
    values = np.asarray(values)
    if halfwidth == 0:
        return values == centre
    return np.abs(values - centre) < halfwidth


def interval_count(M, K: int, n: int, x, k: int, epsilon: float, c: int,
                   alpha=None, enforce: bool = True) -> float:
    """Fraction of the first K rows through column n whose value lies in
    (x_n - eps*tail/k, x_n + eps*tail/k)."""
    E = _explicit(M)
    x = np.asarray(x, dtype=float)
    col = E.column(n)
    if enforce:
        if alpha is None:
            from .bernoulli import max_pair_inner_product
            alpha = max_pair_inner_product(E)
        if c < 2:
            raise InapplicableBound("need c >= 2")
        if E.column_weights().min() < K:
            raise InapplicableBound(f"some column has fewer than K={K} ones")
        if alpha and k > K / alpha:
            raise InapplicableBound(f"k={k} exceeds K/alpha={K / alpha:.3g}")
        if not K > c * k * alpha / epsilon:
            raise InapplicableBound(f"K={K} not > c*k*alpha/eps={c * k * alpha / epsilon:.4g}")
    if col.size < K:
        raise InapplicableBound(f"column {n} has fewer than K={K} ones")
    rows = np.sort(col)[:K]
    vals = dense_apply(E.csr[rows].toarray(), x)
    h = error_budget(x, k, epsilon).interval_halfwidth
    return float(in_interval(vals, x[n], h).sum()) / K


class GuaranteeCheck(NamedTuple):
    holds: bool
    lhs: float
    rhs: float


def check_guarantee(x, z, k: int, epsilon: float) -> GuaranteeCheck:
    """||x - z||_2 <= ||x - x_opt(k)||_2 + 22 eps ||x - x_opt(k/eps)||_1 / sqrt(k)."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    b = error_budget(x, k, epsilon)
    lhs = float(np.linalg.norm(x - z))
    rhs = b.tail_l2 + 22 * epsilon * b.tail_l1 / math.sqrt(k)
    return GuaranteeCheck(lhs <= rhs * (1 + 1e-12), lhs, rhs)
