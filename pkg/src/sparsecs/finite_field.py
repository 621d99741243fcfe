"""Prime-field arithmetic used by the DeVore construction.

Everything here works on plain Python ints; the vectorised variants accept
numpy integer arrays so whole batches of columns can be evaluated at once.
"""

from dataclasses import dataclass
from math import isqrt

import numpy as np

UINT64_MAX = 2**64 - 1


def is_prime(n: int) -> bool:
    """Deterministic trial division; fine for the small moduli used here."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    f = 5
    limit = isqrt(n)
    while f <= limit:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


def find_prime_at_least(K: int) -> int:
    """Smallest prime P >= K. Bertrand's postulate gives P < 2K."""
    if K < 2:
        raise ValueError(f"K must be >= 2, got {K}")
    P = K
    while not is_prime(P):
        P += 1
    return P


@dataclass(frozen=True)
class PrimeField:
    P: int

    def __post_init__(self):
        if not is_prime(self.P):
            raise ValueError(f"{self.P} is not prime")

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.P

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.P


@dataclass(frozen=True)
class DigitVector:
    """Base-P digits of ``j``, least significant first."""

    digits: tuple
    P: int
    j: int

    def value(self) -> int:
        out = 0
        for d in reversed(self.digits):
            out = out * self.P + d
        return out


def digit_count(N: int, P: int) -> int:
    """Minimal d with P**d >= N (at least 1)."""
    d, cap = 1, P
    while cap < N:
        cap *= P
        d += 1
    return d


def base_p_digits(j: int, P: int, d: int) -> DigitVector:
    if j < 0 or j >= P**d:
        raise IndexError(f"column index {j} out of range for P={P}, d={d}")
    digits = []
    r = j
    for _ in range(d):
        r, q = divmod(r, P)
        digits.append(q)
    return DigitVector(tuple(digits), P, j)


def eval_poly_horner(digits: DigitVector, x: int) -> int:
    """Q_j(x) = sum_i digits[i] * x**i mod P, by Horner's rule."""
    P = digits.P
    acc = 0
    for c in reversed(digits.digits):
        acc = (acc * x + c) % P
    return acc


def eval_columns(cols, x, P: int, d: int) -> np.ndarray:
    """Vectorised Horner: Q_j(x) for arrays of columns ``cols``.

    ``cols`` and ``x`` broadcast against each other. Intermediate values stay
    below P**2 + P, so int64 is safe for any P that passed plan validation.
    """
    cols = np.asarray(cols, dtype=np.int64)
    x = np.asarray(x, dtype=np.int64)
    # digits most-significant first
    pows = P ** np.arange(d - 1, -1, -1, dtype=np.int64)
    acc = np.zeros(np.broadcast_shapes(cols.shape, x.shape), dtype=np.int64)
    for pw in pows:
        digit = (cols // pw) % P
        acc = (acc * x + digit) % P
    return acc
