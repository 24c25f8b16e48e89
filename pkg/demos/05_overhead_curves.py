"""Cumulative cost of assessing one row per iteration, ER vs the naive routes.

Run: python3 demos/05_overhead_curves.py
"""

from pathlib import Path

from svmer.evaluation import run_overhead

data_dir = str(Path(__file__).resolve().parent.parent / "data")

for naive in ("gnb", "combination"):
    recs = run_overhead({"data_dir": data_dir, "dataset": "hdds", "iterations": 100, "naive": naive})
    er = [r for r in recs if r.method == "er"]
    nv = [r for r in recs if r.method == "naive"]
    print(f"naive = {naive}")
    print(" iter   er ms   naive ms   er kernels   naive kernels")
    for t in (1, 10, 25, 50, 100):
        a, b = er[t - 1], nv[t - 1]
        print(f"{t:5d} {a.cum_time_ns / 1e6:7.2f} {b.cum_time_ns / 1e6:10.2f} "
              f"{a.cum_kernel_evals:12d} {b.cum_kernel_evals:15d}")
    print()
