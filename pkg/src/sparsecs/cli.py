"""Command-line front end.

Exit codes: 0 success, 1 precondition/usage error, 2 I/O error.
Any flag may also be supplied through ``--config-file`` (``key=value`` lines,
keys spelled like the long flags with dashes or underscores); explicit flags win.
"""

import argparse
import csv
import math
import sys
import time

from . import bernoulli, devore, formats
from .measure import measure_stream, update
from .oracle import check_guarantee
from .pipeline import (
    BENCH_FIELDS,
    bench,
    build_scheme,
    default_bernoulli_K,
    default_devore_K,
)
from .recover import ESTIMATE_ONLY, FULL, RecoveryConfig, recover
from .sampler import (
    EST,
    IDENT,
    estimation_count,
    identification_count,
    sample_blocks,
    sample_rows,
)


class UsageError(ValueError):
    pass


def _sigma(s):
    v = float(s)
    if not 2 / 3 - 1e-3 <= v < 1:  # accept 0.667 as 2/3
        raise UsageError(f"sigma must lie in [2/3, 1), got {v}")
    return max(v, 2 / 3)


def _eps(s):
    v = float(s)
    if not 0 < v <= 1 or abs(1 / v - round(1 / v)) > 1e-9:
        raise UsageError(f"1/epsilon must be a positive integer, got epsilon={v}")
    return v


def _ints(s):
    out = []
    for tok in str(s).split(","):
        tok = tok.strip()
        out.append(2 ** int(tok[2:]) if tok.startswith("2^") else int(tok))
    return out


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def cmd_gen_matrix(args):
    _need(args, "N", "out")
    if args.K is None:
        _need(args, "k")
    if args.family == "devore":
        K = args.K or default_devore_K(args.k, args.eps, args.N)
        plan = devore.make_plan(K, args.N)
        formats.write_devore(args.out, plan)
        print(plan.to_text())
        print(f"m=P^2={plan.m} K=P={plan.K} alpha=d-1={plan.alpha} (d=ceil(log_P N)={plan.d}; "
              f"floor(ln N/ln P)={math.floor(math.log(args.N) / math.log(plan.P))})")
        return
    K = args.K or default_bernoulli_K(args.k, args.eps, args.N, args.sigma)
    plan = bernoulli.plan_parameters(K, args.N, args.sigma)
    matrix = None if args.implicit else bernoulli.generate(plan, args.seed)
    formats.write_bernoulli(args.out, plan, args.seed, matrix)
    print(f"bernoulli m={plan.m} N={plan.N} p={plan.p:.6g} seed={args.seed}")
    print(f"K={K} alpha=2mp^2={plan.alpha:.6g} mp={plan.mp:.6g} "
          f"(mp = K + L + sqrt(2KL + L^2), L = ln(3N/(1-sigma)); p = log_(4/e)(3N^2/(1-sigma)) / mp)")


def cmd_sample(args):
    _need(args, "matrix", "out")
    M = formats.read_matrix(args.matrix)
    base = M[0] if isinstance(M, tuple) else M
    K = args.K or (M[1].K if isinstance(M, tuple) else base.K)
    kind = args.kind
    if args.blocks is not None or (args.count is None and isinstance(base, devore.DeVorePlan)):
        if not isinstance(base, devore.DeVorePlan):
            raise UsageError("block sampling needs a devore matrix")
        n = args.blocks
        if n is None:
            n = _auto_count(args, base.P, base.P, kind, blocks=True)
        s = sample_blocks(base, n, args.seed, kind=kind)
    else:
        n = args.count
        if n is None:
            n = _auto_count(args, base.m, K, kind)
        s = sample_rows(base, n, args.seed, dedupe=(kind == IDENT))
    formats.write_sample(args.out, s, args.base_ref or args.matrix)
    print(f"{s.header(args.base_ref or args.matrix)} distinct={s.size} random_bits={s.random_bits}")


def _auto_count(args, m, K, kind, blocks=False):
    _need(args, "k")
    if kind == IDENT:
        return identification_count(m, K, args.k, args.eps, args.sigma)
    _need(args, "S_size")
    beta, l_tilde = estimation_count(m, K, args.S_size, args.sigma)
    return math.ceil(l_tilde - 1e-9) if blocks else beta


def _samples(args):
    ident = formats.read_sample(args.ident_sample) if args.ident_sample else None
    _need(args, "est_sample")
    return ident, formats.read_sample(args.est_sample)


def cmd_measure(args):
    _need(args, "signal", "out")
    ident, est = _samples(args)
    x = formats.read_signal(args.signal, est.N)
    b = measure_stream(ident, est, x, args.k or 1, args.eps, args.sigma)
    formats.write_bundle(args.out, b)
    print(f"measurements={b.measurement_count} ident={b.ident.size} est={b.est.size}")


def cmd_update(args):
    _need(args, "bundle", "index", "delta")
    ident, est = _samples(args)
    b = formats.read_bundle(args.bundle, ident, est)
    update(b, args.index, args.delta)
    formats.write_bundle(args.out or args.bundle, b)


def cmd_recover(args):
    _need(args, "bundle", "out")
    ident, est = _samples(args)
    b = formats.read_bundle(args.bundle, ident, est)
    mode = ESTIMATE_ONLY if args.mode in ("estimate-only", "estimate_only", "1") else FULL
    res = recover(b, RecoveryConfig(args.k or b.k, b.epsilon, b.sigma, mode))
    formats.write_result(args.out, res)
    print(res.diagnostics())


def cmd_verify(args):
    _need(args, "matrix", "K", "alpha")
    M = formats.read_matrix(args.matrix)
    if isinstance(M, tuple):
        M = M[0]
    elif isinstance(M, devore.DeVorePlan):
        M = devore.materialize(M)
    else:
        M = M.materialize()
    r = bernoulli.verify_coherence(M, args.K, math.ceil(args.alpha - 1e-9))
    print(f"min_column_weight={r.min_column_weight} max_pair_inner_product={r.max_pair_inner_product} "
          f"max_row_weight={r.max_row_weight} satisfies={str(r.satisfies).lower()}")
    return 0 if r.satisfies else 1


def cmd_oracle_check(args):
    _need(args, "signal", "result", "N", "k")
    x = formats.read_signal(args.signal, args.N)
    z = formats.read_result(args.result, args.N)
    c = check_guarantee(x, z, args.k, args.eps)
    print(f"lhs={c.lhs!r} rhs={c.rhs!r} holds={str(c.holds).lower()}")
    return 0 if c.holds else 1


def cmd_pipeline(args):
    _need(args, "signal", "N", "k", "out")
    config = 1 if args.mode in ("1", "estimate-only", "estimate_only") else int(args.mode)
    x = formats.read_signal(args.signal, args.N)
    try:
        scheme = build_scheme(args.N, args.k, args.eps, args.sigma, config, args.seed, args.K)
    except ValueError as e:
        raise UsageError(f"[sample] {e}") from e
    t0 = time.perf_counter()
    b = measure_stream(scheme.ident, scheme.est, x, args.k, args.eps, args.sigma)
    t1 = time.perf_counter()
    res = recover(b, scheme.recovery_config)
    t2 = time.perf_counter()
    formats.write_result(args.out, res)
    info = " ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in scheme.info.items())
    print(f"config={config} {info}")
    print(f"measurements={b.measurement_count} ident={b.ident.size} est={b.est.size} "
          f"measure_time={t1 - t0:.6f} recover_time={t2 - t1:.6f} {res.diagnostics()}")


def cmd_bench(args):
    _need(args, "out")
    rows = bench(_ints(args.Ns), _ints(args.ks), configs=[int(c) for c in str(args.mode).split(",")],
                 trials=args.trials, seed=args.seed, epsilon=args.eps, sigma=args.sigma,
                 workers=args.workers)
    with open(args.out, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=BENCH_FIELDS)
        w.writeheader()
        w.writerows(rows)
    for r in rows:
        print(",".join(str(r[k]) for k in BENCH_FIELDS))


DEFAULTS = dict(eps=1.0, sigma=2 / 3, seed=0, family="devore", kind=EST, mode="3",
                trials=5, workers=1, Ns="2^14,2^16,2^18", ks="8,32")
CONVERT = dict(N=int, K=int, k=int, seed=int, count=int, blocks=int, S_size=int, index=int,
               delta=float, alpha=float, trials=int, workers=int, eps=_eps, sigma=_sigma)


def build_parser():
    p = argparse.ArgumentParser(prog="sparsecs", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, *opts):
        sp = sub.add_parser(name)
        sp.set_defaults(func=func)
        sp.add_argument("--config-file")
        for o in opts:
            dest = o.lstrip("-").replace("-", "_")
            kw = {"dest": dest, "default": None}
            if dest == "implicit":
                kw.update(action="store_true", default=False)
            sp.add_argument(o, **kw)
        return sp

    common = ("--N", "--k", "--eps", "--sigma", "--seed")
    add("gen-matrix", cmd_gen_matrix, "--family", "--K", "--out", "--implicit", *common)
    add("sample", cmd_sample, "--matrix", "--K", "--kind", "--count", "--blocks", "--S-size",
        "--base-ref", "--out", *common)
    add("measure", cmd_measure, "--ident-sample", "--est-sample", "--signal", "--out", *common)
    add("update", cmd_update, "--ident-sample", "--est-sample", "--bundle", "--index", "--delta", "--out")
    add("recover", cmd_recover, "--ident-sample", "--est-sample", "--bundle", "--mode", "--out", "--k")
    add("verify-coherence", cmd_verify, "--matrix", "--K", "--alpha")
    add("oracle-check", cmd_oracle_check, "--signal", "--result", "--N", "--k", "--eps")
    add("pipeline", cmd_pipeline, "--signal", "--mode", "--K", "--out", *common)
    add("bench", cmd_bench, "--Ns", "--ks", "--mode", "--trials", "--workers", "--out",
        "--eps", "--sigma", "--seed")
    return p


def _read_config_file(path):
    out = {}
    with open(path) as f:
        for line in f:
            line = line.split("#", 1)[0].strip()
            if line:
                k, v = line.split("=", 1)
                out[k.strip().lstrip("-").replace("-", "_")] = v.strip()
    return out


def resolve(args):
    """Fill unset options from the config file, then defaults, then convert types."""
    path = args.config_file
    fileopts = _read_config_file(path) if path else {}
    for k, v in vars(args).items():
        if v is None and k in fileopts:
            setattr(args, k, fileopts[k])
    for k, v in DEFAULTS.items():
        if getattr(args, k, "absent") is None:
            setattr(args, k, v)
    for k, conv in CONVERT.items():
        v = getattr(args, k, None)
        if v is not None:
            try:
                setattr(args, k, conv(v))
            except UsageError:
                raise
            except ValueError as e:
                raise UsageError(f"bad value for --{k}: {v!r}") from e
    return args


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = resolve(parser.parse_args(argv))
        rc = args.func(args)
        return rc or 0
    except SystemExit as e:
        return 1 if e.code else 0
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return 2
    except (ValueError, IndexError, KeyError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
