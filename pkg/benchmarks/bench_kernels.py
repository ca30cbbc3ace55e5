"""Time the jitted kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The numpy versions are what runs when TSSORT_DISABLE_NUMBA=1.
"""
import argparse
import time

import numpy as np

from tssort import kernels
from tssort.graphs import GraphGenConfig, topological_order
from tssort.harness import draw_stable
from tssort.svar import SimConfig


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def lasso_case(rng, n=500, p=40):
    x = rng.normal(size=(n, p))
    y = x[:, :5] @ rng.normal(size=5) + rng.normal(size=n)
    x = (x - x.mean(0)) / x.std(0)
    gram, xty = x.T @ x / n, x.T @ (y - y.mean()) / n
    lam = np.geomspace(np.abs(xty).max(), np.abs(xty).max() * 1e-3, 30)
    return gram, xty, lam, 1e-7, 100_000


def svar_case(rng, d=10, n=20_000):
    g, _, _ = draw_stable(GraphGenConfig(d=d, d_c=2, d_l=1, tau_max=3), SimConfig(n=2), rng, 100_000)
    order = np.array(topological_order(g.contemporaneous), dtype=np.int64)
    noise = rng.normal(size=(n, d))
    return (np.ascontiguousarray(g.contemporaneous), np.ascontiguousarray(g.lagged), order, noise, 1e12)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    cases = [
        ("cd_lasso_path (500x40, 30 lambdas)", kernels.cd_lasso_path_jit, kernels.cd_lasso_path_numpy, lasso_case(rng)),
        ("simulate_svar (d=10, tau=3, 20k steps)", kernels.simulate_svar_jit, kernels.simulate_svar_numpy, svar_case(rng)),
    ]
    print(f"{'kernel':42s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s}")
    for name, jit_fn, np_fn, case in cases:
        jit_fn(*case)  # compile (or load from cache) outside the timing
        tj, a = best_of(lambda: jit_fn(*case), args.repeat)
        tn, b = best_of(lambda: np_fn(*case), args.repeat)
        np.testing.assert_allclose(a[0], b[0], rtol=1e-9, atol=1e-9)
        print(f"{name:42s} {tj * 1e3:11.2f} {tn * 1e3:11.2f} {tn / tj:7.1f}x")


if __name__ == "__main__":
    main()
