#!/usr/bin/env python3
"""Benchmark the contour-inversion kernel: numba backend vs pure numpy.

Runs the same batched density/distribution evaluations through both
implementations and prints a timing table.  Select what the library itself
uses at import time with FBSEC_BACKEND=auto|numba|numpy.

Usage: python benchmarks/bench_inversion.py [--batch 4096] [--repeats 7]
"""

import argparse
import statistics
import time

import numpy as np

from fbsec import FBParams, InversionControl, derive
from fbsec import _kernels
from fbsec.inversion import _Inverter


CASES = {
    "gamma-reduction": FBParams(2, 1, 0, 1, 1, 1),
    "case1-mixed": FBParams(1.5, 1.5, 1.0, 0.1, 0.1, 10**0.5),
    "stiff-surrogate": FBParams(1.0, 1e6, 1.5, 0.3, 0.64, 1.0),
}


def time_fn(fn, repeats):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return min(samples), statistics.median(samples)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--batch", type=int, default=4096)
    ap.add_argument("--repeats", type=int, default=7)
    args = ap.parse_args()

    print(f"numba available: {_kernels.NUMBA_AVAILABLE}; active backend: {_kernels.backend_name()}")
    print(f"batch={args.batch} abscissae, talbot_nodes=48\n")
    header = f"{'case':18s} {'impl':6s} {'best':>10s} {'median':>10s} {'Mevals/s':>10s}"
    print(header)
    print("-" * len(header))

    for name, params in CASES.items():
        inv = _Inverter(derive(params), params.avg_snr, InversionControl())
        g = np.linspace(0.05, 8.0, args.batch) * params.avg_snr
        impls = {"numpy": _kernels._talbot_sum_numpy}
        if _kernels.NUMBA_AVAILABLE:
            impls["numba"] = _kernels._talbot_sum_numba
        results = {}
        for impl_name, fn in impls.items():
            call = lambda: fn(g, inv.base, inv.w, *inv.factors, inv.ln_omega, 0.0, inv.lam)
            call()  # warm-up / compile
            best, med = time_fn(call, args.repeats)
            results[impl_name] = call()
            rate = args.batch * 48 / best / 1e6
            print(f"{name:18s} {impl_name:6s} {best*1e3:9.2f}ms {med*1e3:9.2f}ms {rate:10.1f}")
        if len(results) == 2:
            delta = np.max(np.abs(results["numba"] - results["numpy"]))
            print(f"{'':18s} agreement max|diff| = {delta:.2e}")
    print("\n(Mevals/s counts transform evaluations: batch x nodes / time.)")


if __name__ == "__main__":
    main()
