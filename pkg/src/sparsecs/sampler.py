"""Row sampling from coherent matrices: identification sets, estimation multisets,
and whole-block sampling for DeVore matrices.

A ``RowSample`` keeps the draw order in ``rows`` and the deduplicated view in
``distinct``/``multiplicities``; measurements are stored once per distinct row.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp

from .bernoulli import ImplicitBernoulli
from .binmat import ExplicitBinaryMatrix
from .devore import DeVorePlan, block_entries

Base = Union[DeVorePlan, ExplicitBinaryMatrix, ImplicitBernoulli]

IDENT = "ident"
EST = "est"


def _check_sigma(sigma):
    if not 2 / 3 - 1e-12 <= sigma < 1:
        raise ValueError(f"sigma must lie in [2/3, 1), got {sigma}")


def _check_eps(epsilon):
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    inv = 1 / epsilon
    if abs(inv - round(inv)) > 1e-9:
        raise ValueError(f"1/epsilon must be a positive integer, got {inv}")


def identification_count(m, K, k, epsilon, sigma) -> int:
    """Smallest gamma >= (7/6)(m/K) ln((2k/eps)/(1-sigma))."""
    _check_sigma(sigma)
    _check_eps(epsilon)
    if k < 1 or K < 1 or m < 1:
        raise ValueError("m, K, k must be positive")
    bound = 7 / 6 * (m / K) * math.log((2 * k / epsilon) / (1 - sigma))
    return max(1, math.ceil(bound - 1e-9))


def estimation_count(m, K, S_size, sigma):
    """(beta, l_tilde): beta >= 28.56 (m/K) ln(2|S|/(1-sigma)), l_tilde = 21 ln(...)."""
    _check_sigma(sigma)
    if S_size < 1 or K < 1 or m < 1:
        raise ValueError("m, K, |S| must be positive")
    L = math.log(2 * S_size / (1 - sigma))
    l_tilde = 21 * L
    beta = max(1, math.ceil(28.56 * (m / K) * L - 1e-9))
    return beta, l_tilde


@dataclass
class RowSample:
    base: Base
    rows: np.ndarray  # draw order (deduplicated for identification)
    kind: str
    seed: Optional[int] = None
    block_mode: bool = False
    blocks: Optional[np.ndarray] = None  # drawn blocks, with repeats, block_mode only
    random_bits: int = 0
    count: int = 0  # number of draws
    distinct: np.ndarray = field(init=False)
    multiplicities: np.ndarray = field(init=False)

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=np.int64)
        if self.rows.size and (self.rows.min() < 0 or self.rows.max() >= self.base.m):
            raise IndexError("sampled row out of range")
        if self.kind not in (IDENT, EST):
            raise ValueError(f"unknown sample kind {self.kind!r}")
        if self.block_mode:
            P = self.base.P
            self.blocks = np.asarray(self.blocks, dtype=np.int64)
            ublocks, first, counts = np.unique(self.blocks, return_index=True, return_counts=True)
            order = np.argsort(first)
            self.distinct_blocks = ublocks[order]
            self.block_multiplicities = counts[order]
            self.distinct = (self.distinct_blocks[:, None] * P + np.arange(P)[None, :]).ravel()
            self.multiplicities = np.repeat(self.block_multiplicities, P)
        else:
            u, first, counts = np.unique(self.rows, return_index=True, return_counts=True)
            order = np.argsort(first)
            self.distinct = u[order]
            self.multiplicities = counts[order]
        if not self.count:
            self.count = len(self.blocks) if self.block_mode else len(self.rows)
        self._pos = {int(r): i for i, r in enumerate(self.distinct)}
        self._sub = None

    @property
    def N(self) -> int:
        return self.base.N

    @property
    def size(self) -> int:
        return len(self.distinct)

    def position(self, row: int) -> int:
        return self._pos[int(row)]

    def submatrix(self) -> ExplicitBinaryMatrix:
        """Explicit distinct-row submatrix (cached). Not used in block mode."""
        if self._sub is None:
            b = self.base
            if isinstance(b, ImplicitBernoulli):
                self._sub = b.rows(self.distinct)
            elif isinstance(b, ExplicitBinaryMatrix):
                self._sub = ExplicitBinaryMatrix(b.csr[self.distinct])
            else:
                cols = np.arange(b.N)
                p = self.distinct // b.P
                r = self.distinct % b.P
                hit = block_entries(b, p, cols) == r[None, :]
                self._sub = ExplicitBinaryMatrix(sp.csr_matrix(hit.T.astype(np.int8)))
        return self._sub

    def column_matrix(self, cols) -> sp.csc_matrix:
        """0/1 matrix of shape (distinct rows, len(cols)): which sampled rows hit each column."""
        cols = np.asarray(cols, dtype=np.int64)
        if cols.size and (cols.min() < 0 or cols.max() >= self.N):
            raise IndexError("column index out of range")
        if self.block_mode:
            b = self.base
            nb = len(self.distinct_blocks)
            offs = block_entries(b, self.distinct_blocks, cols)  # (len(cols), nb)
            pos = np.arange(nb)[None, :] * b.P + offs
            data = np.ones(pos.size, dtype=np.int8)
            indptr = np.arange(0, pos.size + 1, nb)
            return sp.csc_matrix((data, pos.ravel(), indptr), shape=(self.size, cols.size))
        if isinstance(self.base, DeVorePlan) and self._sub is None:
            b = self.base
            hit = block_entries(b, self.distinct // b.P, cols) == (self.distinct % b.P)[None, :]
            return sp.csc_matrix(hit.T.astype(np.int8))
        return self.submatrix().csc[:, cols]

    def column_support(self, j: int) -> list:
        return submatrix_column_support(self, j)

    def header(self, base_ref: str) -> str:
        return (
            f"sample kind={self.kind} base={base_ref} seed={self.seed} "
            f"count={self.count} block={str(self.block_mode).lower()}"
        )


def _rng(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), tag]))


def sample_rows(base: Base, count: int, seed: int, dedupe: bool) -> RowSample:
    """``count`` uniform draws from [m] with replacement; a set if ``dedupe``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    draws = _rng(seed, 1).integers(0, base.m, size=count)
    if dedupe:
        _, first = np.unique(draws, return_index=True)
        rows = draws[np.sort(first)]
    else:
        rows = draws
    bits = count * max(1, math.ceil(math.log2(base.m))) if base.m > 1 else 0
    return RowSample(base, rows, IDENT if dedupe else EST, seed=seed,
                     random_bits=bits, count=count)


def sample_blocks(plan: DeVorePlan, block_count: int, seed: int, kind: str = EST) -> RowSample:
    """``block_count`` uniform block draws from [P]; each expands to P rows."""
    if block_count < 1:
        raise ValueError("block_count must be >= 1")
    blocks = _rng(seed, 2).integers(0, plan.P, size=block_count)
    return blocks_sample(plan, blocks, kind=kind, seed=seed)


def blocks_sample(plan: DeVorePlan, blocks, kind: str = EST, seed=None) -> RowSample:
    blocks = np.asarray(blocks, dtype=np.int64)
    count = len(blocks)
    bits = count * math.ceil(math.log2(plan.P))
    if kind == IDENT:
        _, first = np.unique(blocks, return_index=True)
        blocks = blocks[np.sort(first)]
    rows = (blocks[:, None] * plan.P + np.arange(plan.P)[None, :]).ravel()
    return RowSample(plan, rows, kind, seed=seed, block_mode=True, blocks=blocks,
                     random_bits=bits, count=count)


def full_sample(base: Base) -> RowSample:
    """Every row exactly once (no sampling)."""
    if isinstance(base, DeVorePlan):
        return blocks_sample(base, np.arange(base.P))
    return RowSample(base, np.arange(base.m), EST, count=base.m)


def submatrix_column_support(sample: RowSample, j: int) -> list:
    """(position among distinct sampled rows, multiplicity) for rows hitting column j."""
    c = sample.column_matrix([j])
    pos = np.sort(c.indices[c.indptr[0]:c.indptr[1]])
    return [(int(i), int(sample.multiplicities[i])) for i in pos]
