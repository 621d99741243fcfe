"""Linear measurements: bit-test matrix, row tensor product, streaming updates.

The identification vector is laid out bit-row major: entry i pairs sampled
row ``i % R`` with bit-test row ``i // R`` where R is the number of distinct
identification rows. Bit-test row 0 is all ones; rows 1..L hold the bits of
the column index, least significant first.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .sampler import RowSample

CHUNK = 1 << 16


def bit_length(N: int) -> int:
    """ceil(log2 N): number of bits needed for indices in [N]."""
    return max(0, math.ceil(math.log2(N))) if N > 1 else 0


@dataclass(frozen=True)
class BitTestMatrix:
    N: int

    @property
    def bits(self) -> int:
        return bit_length(self.N)

    @property
    def rows(self) -> int:
        return 1 + self.bits

    def columns(self, cols) -> np.ndarray:
        """Dense (rows, len(cols)) slice."""
        cols = np.asarray(cols, dtype=np.int64)
        out = np.ones((self.rows, cols.size), dtype=np.int8)
        for b in range(self.bits):
            out[b + 1] = (cols >> b) & 1
        return out

    def dense(self) -> np.ndarray:
        return self.columns(np.arange(self.N))


def row_tensor_entry(A, B, i: int, j: int):
    m1 = len(A)
    return A[i % m1][j] * B[(i - i % m1) // m1][j]


def row_tensor(A, B) -> np.ndarray:
    """Dense A (*) B: row i is A[i mod m1] * B[i // m1] elementwise."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape[1] != B.shape[1]:
        raise ValueError("column counts differ")
    return (B[:, None, :] * A[None, :, :]).reshape(A.shape[0] * B.shape[0], A.shape[1])


def signal_entries(x, N: Optional[int] = None):
    """Normalise a signal to (indices, values) of its nonzero entries.

    Accepts a dense array, a mapping ``{index: value}`` or an iterable of
    ``(index, value)`` pairs. Repeated indices are summed.
    """
    if isinstance(x, np.ndarray) or (isinstance(x, (list, tuple)) and x and np.isscalar(x[0])):
        arr = np.asarray(x, dtype=float)
        if arr.ndim != 1:
            raise ValueError("signal must be one-dimensional")
        if N is not None and arr.size != N:
            raise ValueError(f"signal length {arr.size} != N={N}")
        if not np.isfinite(arr).all():
            raise ValueError("signal has non-finite entries")
        idx = np.flatnonzero(arr)
        return idx, arr[idx]
    items = x.items() if isinstance(x, dict) else x
    pairs = list(items)
    if not pairs:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    idx = np.array([int(p[0]) for p in pairs], dtype=np.int64)
    val = np.array([float(p[1]) for p in pairs])
    if N is not None and idx.size and (idx.min() < 0 or idx.max() >= N):
        raise IndexError("signal index out of range")
    if not np.isfinite(val).all():
        raise ValueError("signal has non-finite entries")
    return idx, val


@dataclass
class MeasurementBundle:
    N: int
    ident: np.ndarray
    est: np.ndarray
    ident_sample: Optional[RowSample]
    est_sample: RowSample
    k: int = 1
    epsilon: float = 1.0
    sigma: float = 2 / 3

    @property
    def bits(self) -> int:
        return bit_length(self.N)

    @property
    def ident_rows(self) -> int:
        return 0 if self.ident_sample is None else self.ident_sample.size

    @property
    def est_rows(self) -> int:
        return self.est_sample.size

    @property
    def measurement_count(self) -> int:
        return self.ident.size + self.est.size

    def ident_matrix(self) -> np.ndarray:
        """Identification values as (bit rows, sampled rows)."""
        return self.ident.reshape(1 + self.bits, self.ident_rows)

    def copy(self) -> "MeasurementBundle":
        return MeasurementBundle(self.N, self.ident.copy(), self.est.copy(), self.ident_sample,
                                 self.est_sample, self.k, self.epsilon, self.sigma)

    def __add__(self, other):
        out = self.copy()
        out.ident += other.ident
        out.est += other.est
        return out


def empty_bundle(ident_sample, est_sample, k=1, epsilon=1.0, sigma=2 / 3) -> MeasurementBundle:
    N = est_sample.N
    if ident_sample is not None and ident_sample.N != N:
        raise ValueError("samples disagree on N")
    R = 0 if ident_sample is None else ident_sample.size
    return MeasurementBundle(N, np.zeros(R * (1 + bit_length(N))), np.zeros(est_sample.size),
                             ident_sample, est_sample, k, epsilon, sigma)


def _accumulate(bundle: MeasurementBundle, idx: np.ndarray, val: np.ndarray):
    if idx.size == 0:
        return
    if idx.min() < 0 or idx.max() >= bundle.N:
        raise IndexError("signal index out of range")
    bundle.est += bundle.est_sample.column_matrix(idx) @ val
    if bundle.ident_sample is not None:
        C = bundle.ident_sample.column_matrix(idx)
        V = BitTestMatrix(bundle.N).columns(idx).T * val[:, None]  # (c, 1+L)
        Y = np.asarray(C @ V)  # (R, 1+L)
        bundle.ident += Y.T.ravel()


def measure_stream(ident_sample, est_sample, x, k=1, epsilon=1.0, sigma=2 / 3) -> MeasurementBundle:
    """One pass over the nonzero entries of x, processed in chunks."""
    bundle = empty_bundle(ident_sample, est_sample, k, epsilon, sigma)
    idx, val = signal_entries(x, bundle.N)
    for a in range(0, idx.size, CHUNK):
        _accumulate(bundle, idx[a:a + CHUNK], val[a:a + CHUNK])
    return bundle


def update(bundle: MeasurementBundle, n: int, delta: float) -> MeasurementBundle:
    """Apply x[n] += delta in place (single writer) and return the bundle."""
    if not 0 <= n < bundle.N:
        raise IndexError(f"index {n} out of range [0, {bundle.N})")
    _accumulate(bundle, np.array([n], dtype=np.int64), np.array([float(delta)]))
    return bundle
