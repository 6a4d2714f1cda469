"""Compiled vs pure-Python chain kernels on the semi-hyperbolicity scan.

    python benchmarks/bench_kernels.py [--grid 1024] [--depth 20] [--repeat 3]

Times ``criticality_table`` with both backends on the corpus maps, checks the
outputs are identical, and prints the speedup.  Skips the compiled column if
the extension is not built.
"""
import argparse
import time

import numpy as np

from intervalqs import kernels
from intervalqs.classify import corpus_maps
from intervalqs.pullback import _crit_array, scan_grid


def best_time(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=2**10)
    ap.add_argument("--depth", type=int, default=20)
    ap.add_argument("--radius", type=float, default=0.01)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = ["python"] + (["compiled"] if kernels.HAVE_COMPILED else [])
    print(f"grid {args.grid + 1} points, depth {args.depth}, r = {args.radius}, best of {args.repeat}")
    print(f"{'map':<20}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}{'identical':>11}")
    for name, fmap in corpus_maps().items():
        xs = scan_grid(fmap, args.grid)
        crit = _crit_array(fmap, "turning")
        res = {}
        for b in backends:
            res[b] = best_time(lambda: kernels.criticality_table(fmap, xs, args.depth, args.radius, crit, b),
                               args.repeat)
        row = f"{name:<20}" + "".join(f"{res[b][0]:>11.4f}s" for b in backends)
        if "compiled" in res:
            (tp, (cp, tp_)), (tc, (cc, tc_)) = res["python"], res["compiled"]
            same = np.array_equal(cp, cc) and np.array_equal(tp_, tc_)
            row += f"{tp / tc:>9.1f}x{str(same):>11}"
        print(row)


if __name__ == "__main__":
    main()
