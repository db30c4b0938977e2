#!/usr/bin/env python3
"""Timing comparison of the numba kernels against the pure fallbacks.

Two hot paths are measured:

  * the exact integer simplex, on the membership LPs generated by a
    constrained enumeration run;
  * the sampler's evaluate-and-rank kernel, on a block of integer draws.

Run:  python3 benchmarks/bench_backends.py [--samples N] [--repeat K]
"""

from __future__ import annotations

import argparse
import os
import time


def _with_backend(mode: str, fn):
    old = os.environ.get("LEXCONE_BACKEND")
    os.environ["LEXCONE_BACKEND"] = mode
    try:
        return fn()
    finally:
        if old is None:
            os.environ.pop("LEXCONE_BACKEND", None)
        else:
            os.environ["LEXCONE_BACKEND"] = old


def bench_solver(repeat: int) -> dict[str, float]:
    from lexcone.psd import InteractionType, solve_psd

    def run():
        t0 = time.perf_counter()
        for _ in range(repeat):
            report = solve_psd(InteractionType((2, 1, 1)), "linearized-constrained")
            assert report.candidate_count == 1344
        return (time.perf_counter() - t0) / repeat

    return {mode: _with_backend(mode, run) for mode in ("numba", "python")}


def bench_sampler(samples: int) -> dict[str, float]:
    from lexcone.psd import InteractionType, build_psd
    from lexcone.sampler import SampleConfig, sample

    inst = build_psd(InteractionType((2, 2)))
    cfg = SampleConfig(radius=1000, sample_count=samples, seed=42)

    def run():
        t0 = time.perf_counter()
        report = sample(inst, cfg)
        elapsed = time.perf_counter() - t0
        assert report.drawn == samples
        return elapsed

    return {mode: _with_backend(mode, run) for mode in ("numba", "python")}


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--samples", type=int, default=500_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    import lexcone._backend as backend

    if not backend.HAS_NUMBA:
        print("numba not importable; only the fallback path can run")

    print(f"{'benchmark':<28}{'numba':>12}{'python/numpy':>16}{'speedup':>10}")
    solver = bench_solver(args.repeat)
    print(
        f"{'constrained solve (2,1,1)':<28}{solver['numba']:>11.3f}s"
        f"{solver['python']:>15.3f}s{solver['python'] / solver['numba']:>9.1f}x"
    )
    sampler = bench_sampler(args.samples)
    print(
        f"{'sample (2,2) x{:.0e}'.format(args.samples):<28}{sampler['numba']:>11.3f}s"
        f"{sampler['python']:>15.3f}s{sampler['python'] / sampler['numba']:>9.1f}x"
    )


if __name__ == "__main__":
    main()
