"""Per-slot simulation: workload -> assignment -> allocation -> realized metrics.

The comparison protocol is paired by construction: every strategy bundle
sees byte-identical tasks, and a task's realized generation noise is keyed
to (task, model, steps) rather than to the strategy that scheduled it.
"""

import math
from dataclasses import dataclass, replace

from scipy.special import ndtr

from . import alloc
from .assign import (
    AssignmentPolicy,
    assign,
    build_assignment_table,
    per_model_counts,
)
from .errors import ComparisonAborted, ConfigError, SimulationError
from .profiles import TIERS, eval_expected_score, eval_latency, eval_score
from .streams import SA_STREAM, child_seed, noise_draw
from .workload import WorkloadSpec, generate_slot

ALLOCATION_STRATEGIES = ("anneal", "equal_allocation", "optimal_step", "exhaustive")


@dataclass(frozen=True)
class StrategyBundle:
    """One (assignment policy, allocation strategy) pairing under a label."""

    assignment_policy: AssignmentPolicy
    allocation_strategy: str
    label: str
    grid_points: int = 20  # used by the exhaustive allocator only

    def __post_init__(self):
        if self.allocation_strategy not in ALLOCATION_STRATEGIES:
            raise ConfigError(
                f"allocation_strategy must be one of {ALLOCATION_STRATEGIES}, "
                f"got {self.allocation_strategy!r}"
            )


@dataclass(frozen=True)
class TaskRecord:
    """Realized outcome of one task."""

    task_id: int
    category_id: int
    latent_quality: float
    model_id: int
    steps: int
    score: float
    delay_s: float
    expected_score: float


@dataclass(frozen=True)
class SlotReport:
    """All metrics for one slot under one strategy."""

    slot: int
    strategy: str
    plan: alloc.AllocationPlan
    records: tuple
    model_counts: dict
    model_mean_score: dict
    model_mean_delay: dict
    mean_score: float
    mean_delay: float
    utility: float  # realized: mean_score - omega * mean_delay, exact
    mean_expected_score: float
    expected_utility: float


@dataclass(frozen=True)
class RunReport:
    """Per-strategy aggregate over all slots of one run."""

    strategy: str
    seed: int
    fingerprint: str
    slots: tuple
    mean_score: float
    mean_delay: float
    mean_utility: float
    mean_expected_score: float
    mean_expected_utility: float
    model_mean_score: dict
    model_mean_delay: dict
    model_counts: dict

    def score_samples(self) -> list:
        """All realized scores, pooled; the CDF sample set."""
        return [r.score for s in self.slots for r in s.records]


def _solve_allocation(bundle, counts, qualities, profiles, weights, sa_params, slot):
    """Dispatch to the configured allocator; returns the plan."""
    kind = bundle.allocation_strategy
    if kind == "anneal":
        slot_params = replace(
            sa_params, seed=child_seed(sa_params.seed, SA_STREAM, slot)
        )
        plan, _ = alloc.anneal(counts, profiles, weights, slot_params, qualities)
    elif kind == "exhaustive":
        plan, _ = alloc.exhaustive_search(
            counts, profiles, weights, bundle.grid_points,
            sa_params.latency_bound, qualities,
        )
    elif kind == "equal_allocation":
        plan = alloc.equal_allocation(counts, profiles, weights, sa_params.latency_bound)
    else:
        plan = alloc.optimal_step(counts, profiles, weights, sa_params.latency_bound)
    return plan


def run_slot(
    tasks: list,
    bundle: StrategyBundle,
    profiles: dict,
    categories: tuple,
    weights: alloc.UtilityWeights,
    sa_params: alloc.SAParams,
    noise_seed: int,
) -> SlotReport:
    """Assign, allocate, and realize one slot's batch under one bundle."""
    if not tasks:
        raise ValueError("run_slot needs a non-empty task list")
    slot = tasks[0].arrival_slot

    policy = bundle.assignment_policy
    table = None
    if policy.kind == "probabilistic":
        table = build_assignment_table(categories, policy.thresholds, profiles)
    assignment = assign(tasks, policy, table=table, model_ids=tuple(profiles))
    assert len(assignment) == len(tasks), "assignment must be total"

    counts = per_model_counts(assignment, profiles.keys())
    quality_sum = {m: 0.0 for m in profiles}
    for t in tasks:
        quality_sum[assignment.model_of[t.task_id]] += t.latent_quality
    qualities = {
        m: quality_sum[m] / counts[m] for m in profiles if counts[m] > 0
    }

    try:
        plan = _solve_allocation(
            bundle, counts, qualities, profiles, weights, sa_params, slot
        )
    except SimulationError as exc:
        exc.args = (f"slot {slot} ({bundle.label}): {exc}",)
        raise
    alloc.check_plan(plan, counts, profiles, weights)

    records = []
    for t in tasks:
        m = assignment.model_of[t.task_id]
        s = plan.steps[m]
        delay = eval_latency(profiles[m], s, plan.resource[m], weights.total_resource)
        z = noise_draw(noise_seed, t.task_id, m, s)
        score = eval_score(profiles[m], t.latent_quality, s, z)
        expected = eval_expected_score(profiles[m], t.latent_quality, s)
        records.append(
            TaskRecord(
                task_id=t.task_id,
                category_id=t.category_id,
                latent_quality=t.latent_quality,
                model_id=m,
                steps=s,
                score=score,
                delay_s=delay,
                expected_score=expected,
            )
        )

    n = len(records)
    mean_score = sum(r.score for r in records) / n
    mean_delay = sum(r.delay_s for r in records) / n
    mean_expected = sum(r.expected_score for r in records) / n
    score_by_m: dict = {}
    delay_by_m: dict = {}
    for r in records:
        score_by_m[r.model_id] = score_by_m.get(r.model_id, 0.0) + r.score
        delay_by_m[r.model_id] = delay_by_m.get(r.model_id, 0.0) + r.delay_s
    model_mean_score = {m: score_by_m[m] / counts[m] for m in score_by_m}
    model_mean_delay = {m: delay_by_m[m] / counts[m] for m in delay_by_m}

    return SlotReport(
        slot=slot,
        strategy=bundle.label,
        plan=plan,
        records=tuple(records),
        model_counts={m: c for m, c in counts.items()},
        model_mean_score=model_mean_score,
        model_mean_delay=model_mean_delay,
        mean_score=mean_score,
        mean_delay=mean_delay,
        utility=mean_score - weights.omega * mean_delay,
        mean_expected_score=mean_expected,
        expected_utility=mean_expected - weights.omega * mean_delay,
    )


def _aggregate(label, seed, fingerprint, slot_reports, weights) -> RunReport:
    records = [r for s in slot_reports for r in s.records]
    n = len(records)
    mean_score = sum(r.score for r in records) / n
    mean_delay = sum(r.delay_s for r in records) / n
    mean_expected = sum(r.expected_score for r in records) / n
    score_by_m: dict = {}
    delay_by_m: dict = {}
    count_by_m: dict = {}
    for r in records:
        score_by_m[r.model_id] = score_by_m.get(r.model_id, 0.0) + r.score
        delay_by_m[r.model_id] = delay_by_m.get(r.model_id, 0.0) + r.delay_s
        count_by_m[r.model_id] = count_by_m.get(r.model_id, 0) + 1
    return RunReport(
        strategy=label,
        seed=seed,
        fingerprint=fingerprint,
        slots=tuple(slot_reports),
        mean_score=mean_score,
        mean_delay=mean_delay,
        mean_utility=mean_score - weights.omega * mean_delay,
        mean_expected_score=mean_expected,
        mean_expected_utility=mean_expected - weights.omega * mean_delay,
        model_mean_score={m: score_by_m[m] / count_by_m[m] for m in count_by_m},
        model_mean_delay={m: delay_by_m[m] / count_by_m[m] for m in count_by_m},
        model_counts=count_by_m,
    )


def run_bundle(
    spec: WorkloadSpec,
    bundle: StrategyBundle,
    profiles: dict,
    categories: tuple,
    weights: alloc.UtilityWeights,
    sa_params: alloc.SAParams,
    fingerprint: str = "",
) -> RunReport:
    """Run one bundle over the whole workload."""
    slot_reports = [
        run_slot(
            generate_slot(spec, categories, k),
            bundle, profiles, categories, weights, sa_params,
            noise_seed=spec.seed,
        )
        for k in range(spec.num_slots)
    ]
    return _aggregate(bundle.label, spec.seed, fingerprint, slot_reports, weights)


def run_comparison(
    spec: WorkloadSpec,
    bundles: list,
    profiles: dict,
    categories: tuple,
    weights: alloc.UtilityWeights,
    sa_params: alloc.SAParams,
    fingerprint: str = "",
) -> dict:
    """Run every bundle on the identical workload; label -> RunReport.

    A bundle failure aborts the comparison with the completed reports
    attached (ComparisonAborted.partial).
    """
    labels = [b.label for b in bundles]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"bundle labels must be unique, got {labels}")
    results: dict = {}
    for bundle in bundles:
        try:
            results[bundle.label] = run_bundle(
                spec, bundle, profiles, categories, weights, sa_params, fingerprint
            )
        except SimulationError as exc:
            raise ComparisonAborted(bundle.label, results, exc) from exc
    return results


@dataclass(frozen=True)
class SweepPoint:
    """Aggregates for one trade-off weight; scores are noise-free."""

    omega: float
    mean_score: float
    mean_delay: float
    utility: float


def omega_sweep(
    spec: WorkloadSpec,
    bundle: StrategyBundle,
    omega_values: list,
    profiles: dict,
    categories: tuple,
    weights: alloc.UtilityWeights,
    sa_params: alloc.SAParams,
) -> list:
    """Re-run the bundle on the identical workload for each trade-off weight.

    Reports expected (noise-free) scores so the score/delay trends are not
    blurred by re-keyed noise draws when plans change across omega.
    """
    if not omega_values:
        raise ConfigError("omega list must be non-empty")
    if any(w < 0 for w in omega_values):
        raise ConfigError(f"omega values must be >= 0, got {omega_values}")
    if list(omega_values) != sorted(omega_values):
        raise ConfigError(f"omega values must be ascending, got {omega_values}")
    points = []
    for omega in omega_values:
        report = run_bundle(
            spec, bundle, profiles, categories,
            replace(weights, omega=omega), sa_params,
        )
        points.append(
            SweepPoint(
                omega=omega,
                mean_score=report.mean_expected_score,
                mean_delay=report.mean_delay,
                utility=report.mean_expected_utility,
            )
        )
    return points


# ---------------------------------------------------------------------------
# Score-level diagnostic (the three-level, three-model motivation table)
# ---------------------------------------------------------------------------

SCORE_LEVELS = ("low", "mid", "high")


def _interval_stats(mu, sigma, lo, hi):
    """(mass, conditional mean) of N(mu, sigma^2) on [lo, hi)."""
    a = (lo - mu) / sigma
    b = (hi - mu) / sigma if math.isfinite(hi) else math.inf
    phi_a = math.exp(-0.5 * a * a) / math.sqrt(2 * math.pi)
    phi_b = math.exp(-0.5 * b * b) / math.sqrt(2 * math.pi) if math.isfinite(b) else 0.0
    mass = float(ndtr(b) - ndtr(a)) if math.isfinite(b) else float(1.0 - ndtr(a))
    if mass <= 0.0:
        return 0.0, math.nan
    return mass, mu + sigma * (phi_a - phi_b) / mass


def score_level_diagnostic(categories: tuple, profiles: dict, thresholds: tuple) -> dict:
    """Expected (score, delay) per score level and model tier.

    Reproduces the motivation analysis: tasks partitioned by the score
    interval of their medium-model quality, then projected through each
    tier's curve at its reference steps (full resource). Levels with no
    mass under the category mixture are omitted.
    """
    by_tier = {p.tier: p for p in profiles.values()}
    missing = [t for t in TIERS if t not in by_tier]
    if missing:
        raise ConfigError(f"diagnostic needs a three-tier profile set; missing {missing}")
    x1, x2 = thresholds
    bounds = {"low": (0.0, x1), "mid": (x1, x2), "high": (x2, math.inf)}

    out = {}
    for level in SCORE_LEVELS:
        lo, hi = bounds[level]
        mass_sum = 0.0
        weighted_mean = 0.0
        for c in categories:
            mass, cond_mean = _interval_stats(c.mu, c.sigma, lo, hi)
            if mass > 0.0:
                mass_sum += mass
                weighted_mean += mass * cond_mean
        if mass_sum / len(categories) < 1e-12:
            continue
        cond = weighted_mean / mass_sum
        row = {}
        for tier in TIERS:
            p = by_tier[tier]
            s = p.step_fixed if p.step_fixed is not None else p.score_curve.ref_steps
            expected = cond + p.score_curve.base_offset + p.score_curve.relative_gain(s)
            row[tier] = (expected, p.latency_curve.at_full_resource(s))
        out[level] = row
    return out
