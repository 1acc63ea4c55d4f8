"""Compare the numba and pure-numpy integer kernels.

    python3 benchmarks/bench_kernels.py [--levels 64,256,512] [--repeat 5]

Each kernel is called once per backend before timing so that JIT
compilation (or the on-disk cache load) is not counted.  Outputs of the two
backends are compared before any timing is reported.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from hecke_lab import _kernels
from hecke_lab.cosets import build_index_table
from hecke_lab.gl2 import Mat2

BACKENDS = ("numba", "numpy")


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_level(n: int, repeat: int) -> list[tuple[str, int, dict]]:
    table = build_index_table(n)
    canon, ordinal = table._dense
    xs, ys = table._rows
    g = Mat2(5, 2, 7, 3)
    g_mod = tuple(v % n for v in g)
    sn_level = min(n, 96)

    jobs = {
        "proj_canon_table": lambda b: _kernels.proj_canon_table(n, b),
        "act_rows": lambda b: _kernels.act_rows(xs, ys, g_mod, n, canon, ordinal, b),
        f"enumerate_sn[{sn_level}]": lambda b: _kernels.enumerate_sn(sn_level, b),
    }
    rows = []
    for name, job in jobs.items():
        outputs = {b: job(b) for b in BACKENDS}
        if not np.array_equal(outputs["numba"], outputs["numpy"]):
            raise SystemExit(f"backends disagree on {name} at n={n}")
        rows.append((name, n, {b: best_of(lambda b=b: job(b), repeat) for b in BACKENDS}))
    return rows


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--levels", default="64,256,512")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")
    print(f"{'kernel':<22} {'n':>5} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}")
    for n in (int(x) for x in args.levels.split(",")):
        for name, level, t in bench_level(n, args.repeat):
            speedup = t["numpy"] / t["numba"] if t["numba"] > 0 else float("inf")
            print(f"{name:<22} {level:>5} {1e3 * t['numba']:>10.3f} {1e3 * t['numpy']:>10.3f} {speedup:>8.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
