"""Worst-case fraction of rows through each column that land near x_n.

Sweeps DeVore plans over a fixed N and prints the smallest interval_count
seen across all columns and trials, next to the (c-2)/c target.

    python3 scripts/interval_check.py --primes 11,13,29 --N 121
"""

import argparse

import numpy as np

from sparsecs.devore import DeVorePlan, materialize
from sparsecs.oracle import interval_count


def signal(N, k, rng):
    x = rng.normal(size=N)
    x /= np.abs(x).sum()
    S = rng.choice(N, size=k, replace=False)
    x[S] = rng.uniform(2, 10, size=k) * rng.choice([-1, 1], size=k)
    return x


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--primes", default="11,13,17,23,29,31")
    ap.add_argument("--N", type=int, default=121)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--c", type=int, default=14)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=3)
    a = ap.parse_args()
    target = (a.c - 2) / a.c
    print(f"{'P':>4} {'alpha':>5} {'K>ck*alpha':>10} {'worst':>7} {'failing trials':>14}")
    for P in map(int, a.primes.split(",")):
        plan = DeVorePlan(P, a.N)
        M = materialize(plan)
        rng = np.random.default_rng(a.seed)
        worst, bad = 1.0, 0
        for _ in range(a.trials):
            x = signal(a.N, a.k, rng)
            w = min(interval_count(M, P, n, x, a.k, 1.0, a.c, enforce=False) for n in range(a.N))
            worst = min(worst, w)
            bad += w <= target
        ok = P > a.c * a.k * plan.alpha
        print(f"{P:>4} {plan.alpha:>5} {str(ok):>10} {worst:>7.4f} {bad:>8}/{a.trials}")
    print(f"target: > {target:.4f}")


if __name__ == "__main__":
    main()
