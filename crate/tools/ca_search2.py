#!/usr/bin/env python3
"""Incremental covering-array search; writes the output JSON after every
target so partial results survive interruption.

Usage: python3 tools/ca_search2.py tools/ca_found.json
"""

import itertools
import json
import math
import random
import sys
import time
from multiprocessing import Pool

from ca_search import anneal2, verify, ca_3_11_2_from_h12, roux_double, ca_2_k_2_katona

OUT_PATH = sys.argv[1] if len(sys.argv) > 1 else "tools/ca_found.json"
OUT = {}
T0 = time.time()


def save():
    with open(OUT_PATH, "w") as f:
        json.dump(OUT, f)


def try_one(args):
    n_try, t, k, v, seed, iters = args
    r = anneal2(n_try, t, k, v, seed, max_iters=iters)
    if r is not None and verify(r, t, k, v):
        return r
    return None


def search(t, k, v, n_opt, budget_per_n=90.0, final_budget=600.0):
    """Try N = n_opt .. n_opt+2 with a wall-clock budget each, running 8
    seeds at a time in parallel; a long last-ditch pass at n_opt+2."""
    with Pool(8) as pool:
        for n_try, budget in [(n_opt, budget_per_n), (n_opt + 1, budget_per_n),
                              (n_opt + 2, budget_per_n), (n_opt + 2, final_budget)]:
            start = time.time()
            batch = 0
            while time.time() - start < budget:
                seeds = [random.randrange(2**31) for _ in range(8)]
                iters = 1_500_000 if k < 15 else 3_000_000
                args = [(n_try, t, k, v, s, iters) for s in seeds]
                for r in pool.map(try_one, args):
                    if r is not None:
                        return n_try, r
                batch += 1
    return None


def record(t, k, v, n, rows, note=""):
    assert verify(rows, t, k, v) and len(rows) == n
    OUT[f"{t},{k},{v}"] = {"N": n, "rows": rows}
    save()
    print(f"CA({t},{k},{v}): N={n} {note} [{time.time()-T0:.0f}s]", flush=True)


def main():
    random.seed(20260823)

    # constructive pieces first, so they are on disk immediately
    h12 = ca_3_11_2_from_h12()
    record(3, 11, 2, 12, h12, "(Paley H12)")

    # Roux fallbacks for (3,k,2), k = 12..20: always available
    for k in (12, 14, 16, 20):
        m = (k + 1) // 2
        a3 = [r[:m] for r in h12]
        a2 = ca_2_k_2_katona(m)
        rr = [r[:k] for r in roux_double(a3, a2)]
        if verify(rr, 3, k, 2):
            record(3, k, 2, len(rr), rr, "(Roux)")

    # (2,k,3) representatives: slack limits from the target table + 2
    for k, n_opt, cap in [(5, 11, 13), (7, 12, 14), (9, 13, 15),
                          (10, 14, 16), (20, 15, 17)]:
        got = search(2, k, 3, n_opt)
        assert got is not None and got[0] <= cap, f"no CA(2,{k},3) <= {cap}"
        record(2, k, 3, got[0], got[1])

    # (3,k,2) targets the Roux construction overshoots
    for k, n_opt, cap in [(5, 10, 12), (12, 15, 17)]:
        got = search(3, k, 2, n_opt)
        if got is not None and got[0] <= cap:
            record(3, k, 2, got[0], got[1])
        else:
            print(f"WARN: CA(3,{k},2) <= {cap} not found", flush=True)

    # improve the remaining Roux sizes if easy (optional)
    for k, n_opt in [(14, 16), (16, 17), (20, 18)]:
        got = search(3, k, 2, n_opt, budget_per_n=60.0, final_budget=60.0)
        if got is not None and got[0] < OUT[f"3,{k},2"]["N"]:
            record(3, k, 2, got[0], got[1], "(improved)")

    print("done", flush=True)


if __name__ == "__main__":
    main()
