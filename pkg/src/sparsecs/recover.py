"""Two-phase sublinear recovery: bit-test identification, then median estimation.

Phase 1 decodes one candidate index per identification row by comparing each
bit-test measurement against its complement. Phase 2 estimates every
candidate by the median of the estimation measurements through that column,
counted with multiplicity, and keeps the 2k largest.
"""

from dataclasses import dataclass, field

import numpy as np

from .measure import MeasurementBundle

FULL = "full"
ESTIMATE_ONLY = "estimate_only"
CHUNK = 1 << 15


class PreconditionError(ValueError):
    pass


def max_sparsity(K, alpha, epsilon, c=14) -> float:
    """Largest k allowed by k <= K eps / (c alpha)."""
    return np.inf if alpha == 0 else K * epsilon / (c * alpha)


@dataclass(frozen=True)
class RecoveryConfig:
    k: int
    epsilon: float = 1.0
    sigma: float = 2 / 3
    mode: str = FULL

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.mode not in (FULL, ESTIMATE_ONLY):
            raise ValueError(f"unknown mode {self.mode!r}")

    def check(self, K, alpha, c=14):
        if self.k > max_sparsity(K, alpha, self.epsilon, c):
            raise PreconditionError(
                f"k={self.k} exceeds K*eps/({c}*alpha) = {max_sparsity(K, alpha, self.epsilon, c):.4g}"
            )


@dataclass
class RecoveryResult:
    N: int
    candidates: np.ndarray
    support: np.ndarray
    values: np.ndarray
    per_index_estimates: dict = field(default_factory=dict)
    raw_candidates: int = 0
    discarded: int = 0  # decoded indices >= N
    dropped: list = field(default_factory=list)  # candidates with no estimation rows

    @property
    def z(self) -> np.ndarray:
        out = np.zeros(self.N)
        out[self.support] = self.values
        return out

    def diagnostics(self) -> str:
        return (f"raw_candidates={self.raw_candidates} deduped={len(self.candidates)} "
                f"discarded={self.discarded} dropped={len(self.dropped)}")


def identify(bundle: MeasurementBundle):
    """Decode one index per identification row.

    Returns (decoded indices in row order, count discarded as >= N).
    """
    Y = bundle.ident_matrix()
    total = Y[0]
    n = np.zeros(Y.shape[1], dtype=np.int64)
    for b in range(1, Y.shape[0]):
        bit = np.abs(Y[b]) > np.abs(total - Y[b])
        n |= bit.astype(np.int64) << (b - 1)
    ok = n < bundle.N
    return n[ok], int((~ok).sum())


def grouped_weighted_median(groups, values, weights, n_groups) -> np.ndarray:
    """Median of each group's multiset (value repeated ``weight`` times).

    Even totals average the two middle order statistics; empty groups give nan.
    """
    groups = np.asarray(groups, dtype=np.int64)
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=np.int64)
    out = np.full(n_groups, np.nan)
    if groups.size == 0:
        return out
    order = np.lexsort((values, groups))
    v = values[order]
    cw = np.cumsum(weights[order])
    totals = np.bincount(groups, weights=weights, minlength=n_groups).astype(np.int64)
    offsets = np.cumsum(totals) - totals
    has = totals > 0
    lo = offsets[has] + (totals[has] - 1) // 2
    hi = offsets[has] + totals[has] // 2
    out[has] = 0.5 * (v[np.searchsorted(cw, lo, side="right")]
                      + v[np.searchsorted(cw, hi, side="right")])
    return out


def estimate(S, bundle: MeasurementBundle):
    """Median estimates for the indices in S.

    Returns ({n: z_n}, dropped) where dropped lists indices with no
    estimation row through them.
    """
    S = np.asarray(S, dtype=np.int64)
    sample = bundle.est_sample
    est, mult = bundle.est, sample.multiplicities
    z = np.full(S.size, np.nan)
    for a in range(0, S.size, CHUNK):
        part = S[a:a + CHUNK]
        C = sample.column_matrix(part).tocsc()
        groups = np.repeat(np.arange(part.size), np.diff(C.indptr))
        z[a:a + CHUNK] = grouped_weighted_median(groups, est[C.indices], mult[C.indices], part.size)
    bad = np.isnan(z)
    return dict(zip(S[~bad].tolist(), z[~bad].tolist())), S[bad].tolist()


def truncate(estimates, k: int):
    """Keep the 2k largest-magnitude nonzero estimates; ties go to the smaller index."""
    idx = np.array(list(estimates.keys()), dtype=np.int64)
    val = np.array(list(estimates.values()), dtype=float)
    nz = val != 0
    idx, val = idx[nz], val[nz]
    order = np.lexsort((idx, -np.abs(val)))[: 2 * k]
    keep = order[np.argsort(idx[order])]
    return idx[keep], val[keep]


def recover(bundle: MeasurementBundle, config: RecoveryConfig) -> RecoveryResult:
    if config.mode == ESTIMATE_ONLY:
        S = np.arange(bundle.N)
        raw, discarded = bundle.N, 0
    else:
        if bundle.ident_sample is None:
            raise ValueError("full recovery needs identification measurements")
        decoded, discarded = identify(bundle)
        raw = decoded.size
        S = np.unique(decoded)
    ests, dropped = estimate(S, bundle)
    support, values = truncate(ests, config.k)
    return RecoveryResult(bundle.N, S, support, values, ests, raw, discarded, dropped)
