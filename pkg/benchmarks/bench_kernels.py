"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--K 100] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from sparserls import kernels


def problem(K, seed=0):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((2 * K, K))
    G = A.T @ A / (2 * K)
    b = rng.standard_normal(K)
    x = rng.standard_normal(K) * (rng.random(K) < 0.3)
    d = rng.standard_normal(K)
    return G, b, x, d


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--K", type=int, default=100)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    if not kernels.cython_available():
        raise SystemExit("compiled kernels not built; run pip install -e . --no-build-isolation")
    G, b, x, d = problem(args.K)
    mu = np.full(args.K, 0.05)
    cases = {
        "cd_lasso": lambda be: kernels.cd_lasso(G, b, mu, np.zeros(args.K), 1e-12, 100_000, backend=be),
        "exact_linesearch": lambda be: kernels.exact_linesearch(d @ G @ d, (G @ x - b) @ d, x, d, mu,
                                                                backend=be),
    }
    print(f"K={args.K}, best of {args.repeat}")
    print(f"{'kernel':<18}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for name, fn in cases.items():
        n = 3 if name == "cd_lasso" else 200
        t = {be: min(timeit.repeat(lambda: fn(be), number=n, repeat=args.repeat)) / n * 1e3
             for be in ("python", "cython")}
        print(f"{name:<18}{t['python']:>14.3f}{t['cython']:>14.3f}{t['python'] / t['cython']:>9.1f}x")


if __name__ == "__main__":
    main()
