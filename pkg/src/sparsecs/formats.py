"""Plain-text file formats for plans, matrices, samples, bundles, signals and results."""

import os
from pathlib import Path

import numpy as np

from .bernoulli import BernoulliPlan, ImplicitBernoulli
from .binmat import ExplicitBinaryMatrix
from .devore import DeVorePlan
from .measure import MeasurementBundle
from .sampler import IDENT, RowSample, blocks_sample


def _kv(tokens):
    out = {}
    for t in tokens:
        if "=" not in t:
            raise ValueError(f"malformed header token {t!r}")
        k, v = t.split("=", 1)
        out[k] = v
    return out


def _header(line: str, tag: str) -> dict:
    parts = line.split()
    if not parts or parts[0] != tag:
        raise ValueError(f"expected a '{tag}' header, got {line!r}")
    return _kv(parts[1:])


# matrices -----------------------------------------------------------------

def write_devore(path, plan: DeVorePlan):
    Path(path).write_text(plan.to_text() + "\n")


def write_bernoulli(path, plan: BernoulliPlan, seed: int, matrix: ExplicitBinaryMatrix = None):
    """Explicit rows if ``matrix`` is given, otherwise a header-only record."""
    head = (f"bernoulli m={plan.m} N={plan.N} p={plan.p!r} seed={seed} "
            f"K={plan.K} sigma={plan.sigma!r} alpha={plan.alpha!r}")
    with open(path, "w") as f:
        if matrix is None:
            f.write(head + " implicit=true\n")
            return
        f.write(head + "\n")
        for i in range(matrix.m):
            f.write(" ".join(map(str, matrix.row(i))) + "\n")


def read_matrix(path):
    """Returns a DeVorePlan, an ImplicitBernoulli, or (ExplicitBinaryMatrix, ImplicitBernoulli)."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    tag = lines[0].split()[0]
    if tag == "devore":
        kv = _header(lines[0], "devore")
        return DeVorePlan(int(kv["P"]), int(kv["N"]))
    kv = _header(lines[0], "bernoulli")
    m, N, p = int(kv["m"]), int(kv["N"]), float(kv["p"])
    plan = BernoulliPlan(K=int(kv.get("K", 0)), N=N, sigma=float(kv.get("sigma", "nan")), p=p, m=m,
                         alpha=float(kv.get("alpha", "nan")))
    implicit = ImplicitBernoulli(plan, int(kv["seed"]))
    if kv.get("implicit", "false") == "true":
        return implicit
    rows = [np.array(l.split(), dtype=np.int64) for l in lines[1:1 + m]]
    if len(rows) != m:
        raise ValueError(f"{path}: expected {m} rows, found {len(rows)}")
    return ExplicitBinaryMatrix.from_rows(rows, N), implicit


def load_base(path):
    M = read_matrix(path)
    return M[0] if isinstance(M, tuple) else M


# samples ------------------------------------------------------------------

def write_sample(path, sample: RowSample, base_ref: str):
    with open(path, "w") as f:
        f.write(sample.header(base_ref) + "\n")
        f.write("\n".join(map(str, sample.rows)) + "\n")


def read_sample(path) -> RowSample:
    lines = Path(path).read_text().splitlines()
    kv = _header(lines[0], "sample")
    ref = kv["base"]
    if not os.path.isabs(ref):
        ref = os.path.join(os.path.dirname(os.path.abspath(path)), ref)
    base = load_base(ref)
    rows = np.array([int(l) for l in lines[1:] if l.strip()], dtype=np.int64)
    seed = None if kv.get("seed") in (None, "None") else int(kv["seed"])
    count = int(kv["count"])
    if kv.get("block") == "true":
        blocks = rows[:: base.P] // base.P
        s = blocks_sample(base, blocks, kind=kv["kind"], seed=seed)
        s.count = count
        return s
    return RowSample(base, rows, kv["kind"], seed=seed, count=count)


# bundles ------------------------------------------------------------------

def write_bundle(path, b: MeasurementBundle):
    with open(path, "w") as f:
        f.write(f"bundle N={b.N} ident_rows={b.ident_rows} est_rows={b.est_rows} "
                f"k={b.k} eps={b.epsilon!r} sigma={b.sigma!r}\n")
        for v in b.ident:
            f.write(repr(float(v)) + "\n")
        for v in b.est:
            f.write(repr(float(v)) + "\n")


def read_bundle(path, ident_sample, est_sample) -> MeasurementBundle:
    lines = Path(path).read_text().splitlines()
    kv = _header(lines[0], "bundle")
    N, R, E = int(kv["N"]), int(kv["ident_rows"]), int(kv["est_rows"])
    vals = np.array([float(l) for l in lines[1:] if l.strip()])
    from .measure import bit_length
    n_ident = R * (1 + bit_length(N))
    if vals.size != n_ident + E:
        raise ValueError(f"{path}: expected {n_ident + E} values, found {vals.size}")
    if est_sample.size != E or (ident_sample.size if ident_sample is not None else 0) != R:
        raise ValueError(f"{path}: bundle does not match the given samples")
    return MeasurementBundle(N, vals[:n_ident], vals[n_ident:], ident_sample, est_sample,
                             int(kv["k"]), float(kv["eps"]), float(kv["sigma"]))


# signals and results ------------------------------------------------------

def _csv_pairs(path):
    first = True
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        a, b = line.split(",")[:2]
        try:
            yield int(a), float(b)
        except ValueError:
            if not first:  # only the first data line may be a header
                raise ValueError(f"{path}: malformed line {line!r}") from None
        first = False


def read_signal(path, N: int) -> np.ndarray:
    x = np.zeros(N)
    for i, v in _csv_pairs(path):
        if not 0 <= i < N:
            raise IndexError(f"{path}: index {i} out of range [0, {N})")
        x[i] += v
    return x


def write_signal(path, x):
    x = np.asarray(x)
    with open(path, "w") as f:
        f.write("index,value\n")
        for i in np.flatnonzero(x):
            f.write(f"{i},{float(x[i])!r}\n")


def write_result(path, result):
    with open(path, "w") as f:
        f.write(f"# {result.diagnostics()}\n")
        f.write("index,estimate\n")
        for i, v in zip(result.support, result.values):
            f.write(f"{int(i)},{float(v)!r}\n")


def read_result(path, N: int) -> np.ndarray:
    return read_signal(path, N)
