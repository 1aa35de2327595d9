"""Compiled kernels against the NumPy fallback on dense base functions.

Usage: python benchmarks/bench_kernels.py [--shape 1296 36 36] [--repeat 5]

The default shape is the full active group Z_1296 x Z_36 x Z_36 used for
S3 on the finite route; values are random codes of S3 (order 6) or of a
larger symmetric group with --degree.
"""

import argparse
import statistics
import time

import numpy as np

from wreathembed import _kernels
from wreathembed.finite import FiniteCodec
from wreathembed.specfile import symmetric_group


def timed(fn, repeat):
    runs = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t)
    return statistics.median(runs)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--shape", type=int, nargs=3, default=(1296, 36, 36))
    ap.add_argument("--degree", type=int, default=3, help="codes drawn from the symmetric group of this degree")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    codec = FiniteCodec.for_group(symmetric_group(args.degree))
    rng = np.random.default_rng(args.seed)
    n = len(codec)
    shape = tuple(args.shape)
    f = rng.integers(0, n, size=shape, dtype=np.int32)
    g = rng.integers(0, n, size=shape, dtype=np.int32)
    start = rng.integers(0, n, size=shape[:2], dtype=np.int32)
    table = codec.table

    backends = [("numpy", _kernels.python_kernels)]
    if _kernels.compiled_kernels is not None:
        backends.append(("cython", _kernels.compiled_kernels))
    else:
        print("compiled kernels not built; only the fallback is timed")

    cases = {
        "shifted_product": lambda k: k.shifted_product(table, f, (0, 0, 0), g, (0, 1, 0)),
        "shifted_product (both shifted)": lambda k: k.shifted_product(table, f, (3, 0, 1), g, (0, 1, 0)),
        "scan_axis": lambda k: k.scan_axis(table, f, start, 2),
    }
    points = int(np.prod(shape))
    print(f"shape {shape} ({points} points), |G| = {n}, median of {args.repeat}")
    print(f"{'kernel':32s}" + "".join(f"{name:>12s}" for name, _ in backends) + "     speedup")
    for label, case in cases.items():
        ref = case(_kernels.python_kernels)
        times = []
        for name, k in backends:
            out = case(k)
            same = all(np.array_equal(a, b) for a, b in zip(_tuple(ref), _tuple(out)))
            if not same:
                raise SystemExit(f"{label}: {name} disagrees with the fallback")
            times.append(timed(lambda: case(k), args.repeat))
        cols = "".join(f"{t * 1e3:10.2f}ms" for t in times)
        speed = f"{times[0] / times[-1]:10.2f}x" if len(times) > 1 else ""
        print(f"{label:32s}{cols}{speed}")


def _tuple(x):
    return x if isinstance(x, tuple) else (x,)


if __name__ == "__main__":
    main()
