"""Compare the compiled and pure-Python greedy kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--sizes 1000,10000,100000] [--L 64] [--repeats 3]

For every size both backends run on the same posterior-sorted binary view;
the script reports the best wall time of each, the speed-up, and whether the
outputs are bit-identical.
"""
import argparse
import time

import numpy as np

from chanquant._kernels import _pycore
from chanquant.channels import random_channel
from chanquant.dist import to_binary_view

try:
    from chanquant._kernels import _core
except ImportError:
    _core = None


def best_of(fn, repeats):
    best, out = float("inf"), None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def same(a, b):
    return all(np.array_equal(np.asarray(x), np.asarray(y)) for x, y in zip(a, b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="1000,10000,100000")
    ap.add_argument("--L", type=int, default=64)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    if _core is None:
        print("compiled kernels not built; run `pip install --no-build-isolation -e .` first")
        return 1
    print(f"{'kernel':<6} {'n':>8} {'python_ms':>11} {'cython_ms':>10} {'speedup':>8} identical")
    for n in (int(s) for s in args.sizes.split(",")):
        v = to_binary_view(random_channel(2, n, args.seed))
        mass, post = v.mass, v.post
        for name in ("split_run", "merge_run"):
            tp, rp = best_of(lambda: getattr(_pycore, name)(mass, post, args.L), args.repeats)
            tc, rc = best_of(lambda: getattr(_core, name)(mass, post, args.L), args.repeats)
            print(f"{name[:5]:<6} {len(v):>8} {tp * 1e3:>11.1f} {tc * 1e3:>10.2f} "
                  f"{tp / tc:>8.1f} {same(rp, rc)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
