"""Time the compiled and pure-Python GF(2) kernels side by side.

    python3 benchmarks/bench_kernels.py [--sizes 64 256 1024] [--repeat 5]

Inputs are random sparse columns (a few bits each, like boundary
matrices) plus random dense families for elimination.  Both kernels
must return identical results; the script stops if they don't.
"""

from __future__ import annotations

import argparse
import random
import sys
import timeit

from rectbar import _kernels_py

try:
    from rectbar import _ckernels
except ImportError:
    _ckernels = None


def sparse_columns(n: int, rng: random.Random, nnz: int = 3):
    # column j may only hit rows below j, as in a boundary matrix
    cols = [0]
    for j in range(1, n):
        rows = rng.sample(range(j), min(nnz, j))
        cols.append(sum(1 << r for r in rows))
    return cols


def dense_family(n: int, rng: random.Random):
    return [rng.getrandbits(n) for _ in range(n)]


def best_of(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 256, 1024, 2048])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if _ckernels is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation`")
        return 1

    rng = random.Random(args.seed)
    print(f"{'kernel':<16}{'n':>6}{'python (ms)':>14}{'cython (ms)':>14}{'speedup':>10}")
    for n in args.sizes:
        cases = [
            ("reduce_boundary", "reduce_boundary", (sparse_columns(n, rng),)),
            ("eliminate", "eliminate", (dense_family(n, rng), n)),
        ]
        for label, name, inputs in cases:
            py, cy = getattr(_kernels_py, name), getattr(_ckernels, name)
            if py(*inputs) != cy(*inputs):
                print(f"{label}: kernels disagree at n={n}", file=sys.stderr)
                return 2
            t_py = best_of(lambda: py(*inputs), args.repeat)
            t_cy = best_of(lambda: cy(*inputs), args.repeat)
            print(f"{label:<16}{n:>6}{t_py * 1e3:>14.2f}{t_cy * 1e3:>14.2f}{t_py / t_cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
