#!/usr/bin/env python3
"""Benchmark the compiled rasterizer kernel against the numpy fallback.

Usage: python benchmarks/bench_rasterize.py [--size 256] [--triangles 200]
"""

import argparse
import statistics
import sys
import time

import numpy as np

sys.path.insert(0, "tests")  # reuse the random-scene generator

from aav._kernels import KERNEL_BACKEND, fill_triangles, fill_triangles_py
from aav.marks import Camera, project_vertices


def make_screen_triangles(rng, n, size):
    """Pre-projected triangle soup (screen coords + inverse depth)."""
    tx = rng.uniform(-size * 0.2, size * 1.2, (n, 3))
    ty = rng.uniform(-size * 0.2, size * 1.2, (n, 3))
    tz = rng.uniform(0.05, 1.0, (n, 3))
    tobj = rng.integers(1, 255, n, dtype=np.int32)
    tface = rng.integers(0, 65535, n, dtype=np.int32)
    return tx, ty, tz, tobj, tface


def bench(fn, args, size, repeats=7):
    times = []
    for _ in range(repeats):
        obj = np.zeros((size, size), np.int32)
        face = np.zeros((size, size), np.int32)
        depth = np.zeros((size, size), np.float64)
        t0 = time.perf_counter()
        fn(*args, obj, face, depth)
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times), (obj, face, depth)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--size", type=int, default=256)
    parser.add_argument("--triangles", type=int, default=200)
    parser.add_argument("--repeats", type=int, default=7)
    opts = parser.parse_args()

    rng = np.random.default_rng(0)
    args = make_screen_triangles(rng, opts.triangles, opts.size)
    px = opts.size * opts.size

    print(f"pick buffer {opts.size}x{opts.size}, {opts.triangles} triangles, "
          f"best of {opts.repeats}")
    print(f"active kernel backend at import: {KERNEL_BACKEND}")

    results = {}
    for name, fn in (("compiled", fill_triangles),
                     ("numpy fallback", fill_triangles_py)):
        if name == "compiled" and KERNEL_BACKEND != "c":
            print("compiled kernel not built; skipping")
            continue
        best, median, bufs = bench(fn, args, opts.size, opts.repeats)
        results[name] = (best, bufs)
        rate = px / best / 1e6
        print(f"  {name:<16} best {best * 1e3:8.2f} ms   median "
              f"{median * 1e3:8.2f} ms   {rate:7.1f} Mpx/s")

    if len(results) == 2:
        speedup = results["numpy fallback"][0] / results["compiled"][0]
        print(f"  speedup: {speedup:.1f}x")
        for a, b in zip(results["compiled"][1], results["numpy fallback"][1]):
            assert np.array_equal(a, b), "backends diverged"
        print("  outputs bit-identical: yes")


if __name__ == "__main__":
    main()
