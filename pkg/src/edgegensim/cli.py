"""Command-line drivers: run, compare, sweep, oracle.

Exit codes: 0 success, 2 usage/config error, 3 infeasibility,
4 internal invariant violation.
"""

import argparse
import os
import sys

from . import alloc, artifacts, engine
from .assign import assign, build_assignment_table, per_model_counts
from .config import RunConfig, load_config
from .errors import (
    ComparisonAborted,
    ConfigError,
    InfeasibleAllocationError,
    SimulationError,
)
from .workload import generate_slot

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_INVARIANT = 4

# The six reference strategy bundles: our system, the two assignment
# baselines, the two allocation baselines, and the oracle allocator.
STRATEGY_NAMES = (
    "probabilistic+anneal",
    "direct+anneal",
    "random+anneal",
    "probabilistic+equal",
    "probabilistic+optimal-step",
    "probabilistic+exhaustive",
)

_ALLOC_ALIASES = {
    "anneal": "anneal",
    "equal": "equal_allocation",
    "equal_allocation": "equal_allocation",
    "optimal-step": "optimal_step",
    "optimal_step": "optimal_step",
    "exhaustive": "exhaustive",
}


def make_bundle(name: str, config: RunConfig, grid_points: int = 20) -> engine.StrategyBundle:
    """Resolve a 'assignment+allocation' bundle name against a config."""
    parts = name.split("+")
    if len(parts) != 2:
        raise ConfigError(
            f"unknown strategy {name!r}; valid names: {', '.join(STRATEGY_NAMES)}"
        )
    kind, alloc_name = parts
    if kind not in ("probabilistic", "direct", "random") or alloc_name not in _ALLOC_ALIASES:
        raise ConfigError(
            f"unknown strategy {name!r}; valid names: {', '.join(STRATEGY_NAMES)}"
        )
    from dataclasses import replace

    policy = replace(config.assignment, kind=kind)
    return engine.StrategyBundle(
        assignment_policy=policy,
        allocation_strategy=_ALLOC_ALIASES[alloc_name],
        label=name,
        grid_points=grid_points,
    )


def _default_bundle(config: RunConfig) -> engine.StrategyBundle:
    return engine.StrategyBundle(
        assignment_policy=config.assignment,
        allocation_strategy="anneal",
        label=f"{config.assignment.kind}+anneal",
    )


def cmd_run(config: RunConfig, out_dir: str) -> int:
    fingerprint = config.fingerprint()
    report = engine.run_bundle(
        config.workload, _default_bundle(config), config.profiles,
        config.categories, config.weights, config.sa, fingerprint,
    )
    paths = artifacts.write_run_artifacts(
        out_dir, report, config.categories, fingerprint, config.output.formats
    )
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_compare(config: RunConfig, strategies: list, grid_points: int, out_dir: str) -> int:
    fingerprint = config.fingerprint()
    bundles = [make_bundle(name, config, grid_points) for name in strategies]
    reports = engine.run_comparison(
        config.workload, bundles, config.profiles, config.categories,
        config.weights, config.sa, fingerprint,
    )
    slots = []
    plans = []
    for label, rep in reports.items():
        slots.extend(artifacts.slots_rows(rep))
        plans.extend(artifacts.plans_rows(rep))
        strat_dir = os.path.join(out_dir, f"strategy_{label}")
        artifacts.write_text(
            os.path.join(strat_dir, "run.json"),
            artifacts.json_text(artifacts.run_report_dict(rep)) + "\n",
        )
        artifacts.write_text(
            os.path.join(strat_dir, "tasks.csv"),
            artifacts.csv_text(
                artifacts.TASKS_HEADER,
                artifacts.tasks_rows(rep, config.categories),
                fingerprint,
            ),
        )
    for name, header, rows in (
        ("compare.csv", artifacts.COMPARE_HEADER,
         artifacts.compare_rows(reports, config.profiles)),
        ("slots.csv", artifacts.SLOTS_HEADER, slots),
        ("plans.csv", artifacts.PLANS_HEADER, plans),
    ):
        path = os.path.join(out_dir, name)
        artifacts.write_text(path, artifacts.csv_text(header, rows, fingerprint))
        print(path)
    return EXIT_OK


def cmd_sweep(config: RunConfig, omegas: list, strategy: str, grid_points: int,
              out_dir: str) -> int:
    if not omegas:
        raise ConfigError("sweep needs a non-empty --omegas list")
    fingerprint = config.fingerprint()
    bundle = (
        make_bundle(strategy, config, grid_points)
        if strategy
        else _default_bundle(config)
    )
    points = engine.omega_sweep(
        config.workload, bundle, omegas, config.profiles,
        config.categories, config.weights, config.sa,
    )
    rows = [[p.omega, p.mean_score, p.mean_delay, p.utility] for p in points]
    path = os.path.join(out_dir, "sweep.csv")
    artifacts.write_text(
        path, artifacts.csv_text(artifacts.SWEEP_HEADER, rows, fingerprint)
    )
    print(path)
    return EXIT_OK


def cmd_oracle(config: RunConfig, grid_points: int, out_dir: str) -> int:
    """Exhaustive optimum vs the annealer on the first slot's instance."""
    fingerprint = config.fingerprint()
    tasks = generate_slot(config.workload, config.categories, 0)
    policy = config.assignment
    table = None
    if policy.kind == "probabilistic":
        table = build_assignment_table(
            config.categories, policy.thresholds, config.profiles
        )
    assignment = assign(tasks, policy, table=table, model_ids=tuple(config.profiles))
    counts = per_model_counts(assignment, config.profiles.keys())
    quality_sum = {m: 0.0 for m in config.profiles}
    for t in tasks:
        quality_sum[assignment.model_of[t.task_id]] += t.latent_quality
    qualities = {m: quality_sum[m] / counts[m] for m in config.profiles if counts[m] > 0}

    best_plan, best_u = alloc.exhaustive_search(
        counts, config.profiles, config.weights, grid_points,
        config.sa.latency_bound, qualities,
    )
    sa_plan, sa_u = alloc.anneal(
        counts, config.profiles, config.weights, config.sa, qualities
    )
    gap = (best_u - sa_u) / abs(best_u) if best_u != 0 else 0.0

    def plan_dict(plan):
        return {
            str(m): {"steps": plan.steps[m], "gamma_tflops": plan.resource[m]}
            for m in sorted(plan.steps)
        }

    payload = {
        "fingerprint": fingerprint,
        "grid_points": grid_points,
        "loads": {str(m): counts[m] for m in sorted(counts)},
        "optimal": {"plan": plan_dict(best_plan), "utility": best_u},
        "anneal": {"plan": plan_dict(sa_plan), "utility": sa_u},
        "relative_gap": max(gap, 0.0),
    }
    path = os.path.join(out_dir, "oracle.json")
    artifacts.write_text(path, artifacts.json_text(payload) + "\n")
    print(path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _csv_list(text: str) -> list:
    return [item.strip() for item in text.split(",") if item.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgegensim",
        description="Slot simulator for multi-model generative serving on an edge budget",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--seed", type=int, default=None,
                       help="override every stream seed")
        p.add_argument("--out", default=None, help="output directory")

    p_run = sub.add_parser("run", help="run the configured system, write artifacts")
    common(p_run)

    p_cmp = sub.add_parser("compare", help="run strategy bundles on one workload")
    common(p_cmp)
    p_cmp.add_argument("--strategies", default=",".join(STRATEGY_NAMES),
                       help="comma-separated bundle names")
    p_cmp.add_argument("--grid", type=int, default=20,
                       help="resource grid points for exhaustive bundles")

    p_swp = sub.add_parser("sweep", help="sweep the score/latency trade-off weight")
    common(p_swp)
    p_swp.add_argument("--omegas", required=True,
                       help="comma-separated ascending omega values")
    p_swp.add_argument("--strategies", default="",
                       help="single bundle name (default: config assignment + anneal)")
    p_swp.add_argument("--grid", type=int, default=20)

    p_orc = sub.add_parser("oracle", help="exhaustive optimum vs annealer on slot 0")
    common(p_orc)
    p_orc.add_argument("--grid", type=int, default=20)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError(f"--seed must be non-negative, got {args.seed}")
            config = config.with_seed(args.seed)
        out_dir = args.out if args.out else config.output.directory

        if args.command == "run":
            return cmd_run(config, out_dir)
        if args.command == "compare":
            return cmd_compare(config, _csv_list(args.strategies), args.grid, out_dir)
        if args.command == "sweep":
            omegas = [float(x) for x in _csv_list(args.omegas)]
            names = _csv_list(args.strategies)
            if len(names) > 1:
                raise ConfigError("sweep takes at most one strategy bundle")
            return cmd_sweep(config, omegas, names[0] if names else "", args.grid, out_dir)
        return cmd_oracle(config, args.grid, out_dir)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ComparisonAborted as exc:
        print(f"error: {exc} (completed: {sorted(exc.partial)})", file=sys.stderr)
        if isinstance(exc.cause, InfeasibleAllocationError):
            return EXIT_INFEASIBLE
        return EXIT_INVARIANT
    except InfeasibleAllocationError as exc:
        print(f"error: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (SimulationError, AssertionError, ValueError) as exc:
        print(f"error: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
