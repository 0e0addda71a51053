#!/usr/bin/env python3
"""Benchmark the compiled kernel backend against the pure-Python fallback.

Two workloads:
  * bracket — the explicit closed-form efficiency sum over a full sweep
    column (cost grows as n_max^2 / 2);
  * trials  — long streak-free photon windows through trial_chunk
    (per-photon branchy work).

Run:  python benchmarks/bench_kernels.py [--n-max 800] [--photons 2000000]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from motirr import _kernels_py

try:
    from motirr import _kernels
except ImportError:
    _kernels = None


def bench_bracket(impl, n_max: int) -> float:
    start = time.perf_counter()
    acc = 0.0
    for n in range(n_max + 1):
        acc += impl.eta_bracket_sum(0.998, n)
    elapsed = time.perf_counter() - start
    assert acc > 0.0
    return elapsed


def bench_trials(impl, photons: int) -> float:
    rng = np.random.Generator(np.random.Philox(key=np.array([1, 2], dtype=np.uint64)))
    u = rng.random(2 * photons)
    events = np.empty(photons, dtype=np.uint8)
    # absorbed-only outcomes never build a streak, so the loop runs full length
    start = time.perf_counter()
    done, decision, _, _ = impl.trial_chunk(
        u, events, 0.0, 0.0, 1.0, 0.85, 0.0, 0.0, 3, True, 0, 0, False)
    elapsed = time.perf_counter() - start
    assert done == photons and decision == impl.DECISION_PENDING
    return elapsed


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n-max", type=int, default=800,
                        help="sweep column depth for the bracket workload")
    parser.add_argument("--photons", type=int, default=2_000_000,
                        help="photon windows for the trial workload")
    args = parser.parse_args()

    backends = [("python", _kernels_py)]
    if _kernels is not None:
        backends.insert(0, ("cython", _kernels))
    else:
        print("compiled backend not importable; benchmarking the fallback only")

    results: dict[str, dict[str, float]] = {}
    for name, impl in backends:
        results[name] = {
            "bracket": bench_bracket(impl, args.n_max),
            "trials": bench_trials(impl, args.photons),
        }

    print(f"{'workload':<10} " + " ".join(f"{name:>12}" for name, _ in backends) +
          ("      speedup" if len(backends) == 2 else ""))
    for workload in ("bracket", "trials"):
        row = f"{workload:<10} "
        row += " ".join(f"{results[name][workload]:>10.4f} s" for name, _ in backends)
        if len(backends) == 2:
            row += f"   {results['python'][workload] / results['cython'][workload]:>8.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
