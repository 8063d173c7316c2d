"""Benchmark the compiled kernels against the numpy fallback.

Times the two hot kernels (modified Gram-Schmidt sweep, projected residual
march) through both implementations in-process, then optionally times a
full conv-diff solve in subprocesses with and without EXPMRT_PURE_PYTHON=1
to show the end-to-end effect of the import-time selector.

Usage:
    python3 benchmarks/bench_kernels.py [--repeats 7] [--solve]
"""

import argparse
import os
import statistics
import subprocess
import sys
import time

import numpy as np

from expmrt._kernels import _fallback

try:
    from expmrt._kernels import _compiled
except ImportError:
    _compiled = None


def _time(fn, repeats):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def bench_mgs(impl, n, k, repeats, seed=0):
    rng = np.random.default_rng(seed)
    V, _ = np.linalg.qr(rng.standard_normal((n, k)))
    V = np.asfortranarray(V, dtype=np.float64)  # column-major, as the basis is stored
    w0 = rng.standard_normal(n)
    h = np.empty(k)

    def run():
        w = w0.copy()
        impl.mgs_sweep(V, w, k, h)

    return _time(run, repeats)


def bench_march(impl, k, n_t, repeats, seed=1):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((k, k)) * 0.01
    E = np.ascontiguousarray(np.eye(k) + M - M.T)  # near-rotation, stays bounded
    u0 = np.zeros(k)
    u0[0] = 1.0

    def run():
        u = u0.copy()
        impl.residual_march(E, u, 1.0, 1e30, n_t)  # tolerance never trips

    return _time(run, repeats)


def bench_solve(pure, repeats):
    env = dict(os.environ)
    env.pop("EXPMRT_PURE_PYTHON", None)
    if pure:
        env["EXPMRT_PURE_PYTHON"] = "1"
    code = (
        "import time; t0=time.perf_counter(); "
        "from expmrt import SolverConfig, rt_solve, build_conv_diff, ConvDiffSpec; "
        "op, v = build_conv_diff(ConvDiffSpec(N=42, pe=100.0)); "
        "t1=time.perf_counter(); "
        "rt_solve(op, v, SolverConfig(t=1.0, tol=1e-6, k_max=10)); "
        "print(time.perf_counter()-t1)"
    )
    samples = []
    for _ in range(repeats):
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        out.check_returncode()
        samples.append(float(out.stdout.strip().splitlines()[-1]))
    return statistics.median(samples)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000, help="vector length for mgs")
    ap.add_argument("--k", type=int, default=30, help="basis size for mgs")
    ap.add_argument("--march-k", type=int, default=12, help="block size for the march")
    ap.add_argument("--n-t", type=int, default=200_000, help="march grid points")
    ap.add_argument("--repeats", type=int, default=7)
    ap.add_argument("--solve", action="store_true", help="also time a full solve per path")
    args = ap.parse_args()

    impls = [("fallback", _fallback)]
    if _compiled is not None:
        impls.append(("compiled", _compiled))
    else:
        print("compiled extension not available; timing fallback only", file=sys.stderr)

    results = {}
    for name, impl in impls:
        results[name] = {
            "mgs_sweep": bench_mgs(impl, args.n, args.k, args.repeats),
            "residual_march": bench_march(impl, args.march_k, args.n_t, args.repeats),
        }

    width = max(len(k) for k in results["fallback"])
    print(f"{'kernel':<{width}}  {'fallback':>10}  {'compiled':>10}  {'speedup':>8}")
    for kernel in ("mgs_sweep", "residual_march"):
        fb = results["fallback"][kernel]
        if "compiled" in results:
            co = results["compiled"][kernel]
            print(f"{kernel:<{width}}  {fb * 1e3:9.3f}ms  {co * 1e3:9.3f}ms  {fb / co:7.2f}x")
        else:
            print(f"{kernel:<{width}}  {fb * 1e3:9.3f}ms  {'-':>10}  {'-':>8}")

    if args.solve:
        fb = bench_solve(pure=True, repeats=max(3, args.repeats // 2))
        print(f"\nfull solve (cd2d N=42, rt, k_max=10), pure python: {fb:.3f}s")
        if _compiled is not None:
            co = bench_solve(pure=False, repeats=max(3, args.repeats // 2))
            print(f"full solve (cd2d N=42, rt, k_max=10), compiled:    {co:.3f}s  ({fb / co:.2f}x)")


if __name__ == "__main__":
    main()
