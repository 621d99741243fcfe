"""Explicit sparse 0/1 matrices (row-major supports)."""

import numpy as np
import scipy.sparse as sp


class BudgetExceeded(ValueError):
    pass


DEFAULT_BUDGET = 50_000_000  # max m*N cells materialised explicitly


class ExplicitBinaryMatrix:
    """An m x N binary matrix stored as one sorted column-index array per row.

    Backed by a CSR matrix; ``indptr``/``indices`` are exactly the per-row
    supports.
    """

    def __init__(self, csr: sp.csr_matrix):
        csr = sp.csr_matrix(csr, dtype=np.int8)
        csr.sum_duplicates()
        csr.sort_indices()
        csr.eliminate_zeros()
        if csr.nnz and (csr.data != 1).any():
            raise ValueError("entries must be 0/1")
        self._csr = csr
        self._csc = None

    @classmethod
    def from_rows(cls, rows, N: int) -> "ExplicitBinaryMatrix":
        rows = [np.unique(np.asarray(r, dtype=np.int64)) for r in rows]
        for r in rows:
            if r.size and (r[0] < 0 or r[-1] >= N):
                raise IndexError("column index out of range")
        indptr = np.concatenate([[0], np.cumsum([r.size for r in rows])]).astype(np.int64)
        indices = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
        data = np.ones(indices.size, dtype=np.int8)
        return cls(sp.csr_matrix((data, indices, indptr), shape=(len(rows), N)))

    @classmethod
    def from_columns(cls, columns, m: int) -> "ExplicitBinaryMatrix":
        cols = [np.asarray(c, dtype=np.int64) for c in columns]
        ci = np.concatenate([np.full(c.size, j) for j, c in enumerate(cols)]) if cols else np.zeros(0, int)
        ri = np.concatenate(cols) if cols else np.zeros(0, int)
        if ri.size and (ri.min() < 0 or ri.max() >= m):
            raise IndexError("row index out of range")
        data = np.ones(ri.size, dtype=np.int8)
        coo = sp.coo_matrix((data, (ri, ci)), shape=(m, len(cols)))
        csr = coo.tocsr()
        if csr.nnz and csr.data.max() > 1:
            raise ValueError("duplicate (row, column) pair")
        return cls(csr)

    @classmethod
    def from_dense(cls, dense) -> "ExplicitBinaryMatrix":
        return cls(sp.csr_matrix(np.asarray(dense, dtype=np.int8)))

    @property
    def shape(self):
        return self._csr.shape

    @property
    def m(self) -> int:
        return self._csr.shape[0]

    @property
    def N(self) -> int:
        return self._csr.shape[1]

    @property
    def csr(self) -> sp.csr_matrix:
        return self._csr

    @property
    def csc(self) -> sp.csc_matrix:
        if self._csc is None:
            self._csc = self._csr.tocsc()
            self._csc.sort_indices()
        return self._csc

    def row(self, i: int) -> np.ndarray:
        a, b = self._csr.indptr[i], self._csr.indptr[i + 1]
        return self._csr.indices[a:b]

    def column(self, j: int) -> np.ndarray:
        c = self.csc
        a, b = c.indptr[j], c.indptr[j + 1]
        return c.indices[a:b]

    def column_weights(self) -> np.ndarray:
        return np.diff(self.csc.indptr)

    def row_weights(self) -> np.ndarray:
        return np.diff(self._csr.indptr)

    def to_dense(self) -> np.ndarray:
        return self._csr.toarray()

    def __eq__(self, other):
        if not isinstance(other, ExplicitBinaryMatrix) or self.shape != other.shape:
            return NotImplemented
        return (self._csr != other._csr).nnz == 0

    def __repr__(self):
        return f"ExplicitBinaryMatrix(m={self.m}, N={self.N}, nnz={self._csr.nnz})"
