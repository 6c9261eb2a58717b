#!/usr/bin/env python3
"""Optimize the 2x2 grid fixture and compare against the even-split baseline.

For each seed, simulates the evenly-split programme, runs the PBIL optimizer
with the same simulation settings, and prints both fitnesses plus the margin.
"""

import argparse
import time

from signalopt.evo import PbilParams, pbil_run
from signalopt.fixtures import grid_2x2, grid_2x2_params
from signalopt.lights import even_split_programme
from signalopt.sim import SimConfig, aggregate_fitness, init_world, run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=3, help="number of seeds to try")
    ap.add_argument("--ticks", type=int, default=400)
    ap.add_argument("--pop-size", type=int, default=20)
    ap.add_argument("--generations", type=int, default=30)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    net, params = grid_2x2(), grid_2x2_params()
    baseline_prog = even_split_programme(params, net)

    print(f"{'seed':>4} {'baseline':>10} {'optimized':>10} {'margin':>9}  gens  time")
    wins = 0
    for seed in range(args.seeds):
        cfg = SimConfig(total_ticks=args.ticks, seed=seed, record_traces=False)
        baseline = aggregate_fitness(run(init_world(net, baseline_prog, cfg)))
        pbil = PbilParams(pop_size=args.pop_size, max_generations=args.generations,
                          patience=args.generations, seed=seed)
        t0 = time.perf_counter()
        best, reports = pbil_run(net, params, pbil, cfg, jobs=args.jobs)
        elapsed = time.perf_counter() - t0
        margin = best.fitness - baseline
        wins += margin >= 0
        print(f"{seed:>4} {baseline:>10.4f} {best.fitness:>10.4f} {margin:>+9.4f} "
              f"{reports[-1].generation:>5} {elapsed:>5.1f}s")
    print(f"optimizer won {wins}/{args.seeds} seeds")


if __name__ == "__main__":
    main()
