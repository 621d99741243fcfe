"""DeVore's deterministic P^2 x N coherent matrices, stored implicitly.

Column j has a single 1 in every block p (rows p*P .. p*P + P-1), located at
row p*P + Q_j(p) where Q_j is the polynomial whose coefficients are the base-P
digits of j. Only (P, N) is stored; columns are regenerated on demand.
"""

from dataclasses import dataclass, field

import numpy as np

from .binmat import DEFAULT_BUDGET, BudgetExceeded, ExplicitBinaryMatrix
from .finite_field import (
    UINT64_MAX,
    base_p_digits,
    digit_count,
    eval_columns,
    eval_poly_horner,
    find_prime_at_least,
    is_prime,
)


class ParametersTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class DeVorePlan:
    P: int
    N: int
    d: int = field(init=False)

    def __post_init__(self):
        if not is_prime(self.P):
            raise ValueError(f"P={self.P} is not prime")
        if self.N < 1:
            raise ValueError("N must be positive")
        d = digit_count(self.N, self.P)
        if self.P * self.P > UINT64_MAX or self.P**d > UINT64_MAX or self.P**d >= 2**63:
            raise ParametersTooLarge(f"P={self.P}, N={self.N} overflow 64-bit indices")
        object.__setattr__(self, "d", d)

    @property
    def m(self) -> int:
        return self.P * self.P

    @property
    def K(self) -> int:
        return self.P

    @property
    def alpha(self) -> int:
        # distinct polynomials of degree < d agree on at most d-1 points
        return self.d - 1

    def to_text(self) -> str:
        return f"devore P={self.P} N={self.N}"

    def column_support(self, j: int) -> list:
        return column_support(self, j)

    def block_column_entry(self, p: int, j: int) -> int:
        return block_column_entry(self, p, j)


def make_plan(K_target: int, N: int) -> DeVorePlan:
    if K_target < 2 or N < 2:
        raise ValueError("need K_target >= 2 and N >= 2")
    return DeVorePlan(find_prime_at_least(K_target), N)


def _check_col(plan: DeVorePlan, j: int):
    if not 0 <= j < plan.N:
        raise IndexError(f"column {j} out of range [0, {plan.N})")


def column_support(plan: DeVorePlan, j: int) -> list:
    _check_col(plan, j)
    digits = base_p_digits(j, plan.P, plan.d)
    return [p * plan.P + eval_poly_horner(digits, p) for p in range(plan.P)]


def block_column_entry(plan: DeVorePlan, p: int, j: int) -> int:
    _check_col(plan, j)
    if not 0 <= p < plan.P:
        raise IndexError(f"block {p} out of range [0, {plan.P})")
    return p * plan.P + eval_poly_horner(base_p_digits(j, plan.P, plan.d), p)


def block_entries(plan: DeVorePlan, blocks, cols) -> np.ndarray:
    """Row offsets Q_j(p) within each block, shape (len(cols), len(blocks))."""
    cols = np.asarray(cols, dtype=np.int64)
    blocks = np.asarray(blocks, dtype=np.int64)
    return eval_columns(cols[:, None], blocks[None, :], plan.P, plan.d)


def materialize(plan: DeVorePlan, budget: int = DEFAULT_BUDGET) -> ExplicitBinaryMatrix:
    if plan.m * plan.N > budget:
        raise BudgetExceeded(f"{plan.m}x{plan.N} exceeds explicit budget {budget}")
    offs = block_entries(plan, np.arange(plan.P), np.arange(plan.N))
    rows = np.arange(plan.P)[None, :] * plan.P + offs
    return ExplicitBinaryMatrix.from_columns(list(rows), plan.m)


def parse_plan(text: str) -> DeVorePlan:
    parts = text.split()
    if not parts or parts[0] != "devore":
        raise ValueError(f"not a devore plan record: {text!r}")
    kv = dict(p.split("=", 1) for p in parts[1:])
    return DeVorePlan(int(kv["P"]), int(kv["N"]))
