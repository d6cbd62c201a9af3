#!/usr/bin/env python3
"""Audit the annealer against the exhaustive oracle across random instances.

Draws random load splits, solves each with both the annealer (several seeds)
and the grid oracle, and reports the worst relative gap. Useful when tuning
SA parameters or changing the neighbor move.
"""

import argparse
import sys
from dataclasses import replace

import numpy as np

from edgegensim import alloc
from edgegensim.config import default_config, load_config


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=None)
    parser.add_argument("--instances", type=int, default=30)
    parser.add_argument("--sa-seeds", type=int, default=5)
    parser.add_argument("--grid", type=int, default=20)
    parser.add_argument("--tasks", type=int, default=100)
    args = parser.parse_args()

    cfg = load_config(args.config) if args.config else default_config()
    rng = np.random.default_rng(0)
    worst = 1.0
    for k in range(args.instances):
        shares = rng.dirichlet([2.0, 4.0, 1.5])
        loads = {m: int(round(s * args.tasks)) for m, s in zip(sorted(cfg.profiles), shares)}
        if sum(loads.values()) == 0:
            continue
        quality = {m: 30.0 for m in loads if loads[m] > 0}
        _, u_star = alloc.exhaustive_search(
            loads, cfg.profiles, cfg.weights, args.grid, cfg.sa.latency_bound, quality
        )
        ratios = []
        for seed in range(args.sa_seeds):
            _, u = alloc.anneal(
                loads, cfg.profiles, cfg.weights, replace(cfg.sa, seed=seed), quality
            )
            ratios.append(u / u_star)
        worst = min(worst, min(ratios))
        print(f"instance {k:2d} loads={loads} oracle={u_star:.4f} "
              f"sa_ratio=[{min(ratios):.5f}, {max(ratios):.5f}]")
    print(f"\nworst anneal/oracle ratio over all instances: {worst:.5f}")
    return 0 if worst >= 0.99 else 1


if __name__ == "__main__":
    sys.exit(main())
