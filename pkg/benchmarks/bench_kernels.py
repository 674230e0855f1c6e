"""Compiled kernels against the pure-Python mirror.

    python3 benchmarks/bench_kernels.py [--size N] [--repeat R] [--end-to-end]

Each kernel runs on identical random sparse inputs over F_101 and Q.  The
results of the two implementations are compared before timing.  With
``--end-to-end`` the bar homology of kFI on objects 0..4 is also timed in a
subprocess per implementation.
"""

import argparse
import os
import random
import subprocess
import sys
import time

from koszulcat import _kernels_py
from koszulcat.field import GF, QQ

try:
    from koszulcat import _kernels
except ImportError:
    _kernels = None


def sparse_rows(rng, field, n, ncols, density):
    rows = []
    for _ in range(n):
        r = {}
        for c in range(ncols):
            if rng.random() < density:
                x = field.coerce(rng.randint(-5, 5))
                if x:
                    r[c] = x
        rows.append(r)
    return rows


def columns(rows):
    return {j: r for j, r in enumerate(rows) if r}


def best(fn, repeat):
    out = None
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench(size, repeat, seed):
    rng = random.Random(seed)
    print(f"{'kernel':<12}{'field':<8}{'python s':>10}{'compiled s':>12}{'speedup':>9}")
    for field in (GF(101), QQ):
        rows = sparse_rows(rng, field, size, size, 4 / size)
        a, b = columns(rows), columns(sparse_rows(rng, field, size, size, 4 / size))
        cases = {
            "echelonize": lambda K: K.echelonize([dict(r) for r in rows], field.p),
            "matmul": lambda K: K.matmul_cols(a, b, field.p),
        }
        for name, run in cases.items():
            tp, rp = best(lambda: run(_kernels_py), repeat)
            if _kernels is None:
                print(f"{name:<12}{field.tag:<8}{tp:>10.4f}{'n/a':>12}{'':>9}")
                continue
            tc, rc = best(lambda: run(_kernels), repeat)
            if name == "echelonize":
                rp, rc = rp[0], rc[0]
            assert rp == rc, f"{name} over {field.tag}: implementations disagree"
            print(f"{name:<12}{field.tag:<8}{tp:>10.4f}{tc:>12.4f}{tp / tc:>8.1f}x")


def end_to_end():
    argv = [sys.executable, "-m", "koszulcat", "bar", "--example", "kfi", "--window", "4", "--format", "json"]
    outs = {}
    for label, pure in (("python", "1"), ("compiled", "0")):
        env = dict(os.environ, KOSZULCAT_PURE=pure)
        t0 = time.perf_counter()
        outs[label] = subprocess.run(argv, capture_output=True, text=True, env=env, check=True).stdout
        print(f"bar kFI 0..4, {label}: {time.perf_counter() - t0:.2f}s")
    assert outs["python"] == outs["compiled"], "reports differ between implementations"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=400)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args()
    print(f"compiled extension: {'available' if _kernels else 'missing'}")
    bench(args.size, args.repeat, args.seed)
    if args.end_to_end:
        end_to_end()


if __name__ == "__main__":
    main()
