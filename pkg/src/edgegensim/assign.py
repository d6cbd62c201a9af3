"""Model assignment: probabilistic interval-mass rule plus the two baselines.

The probabilistic rule integrates each category's Gaussian score law over
three score intervals [0, x1), [x1, x2), [x2, inf) and assigns the category
to the small/medium/large model with those masses as probabilities. Raw
interval masses can sum slightly below 1 (the small interval starts at 0,
not -inf), so rows are renormalized before drawing.
"""

from dataclasses import dataclass

from scipy.special import ndtr

from .errors import ConfigError, ThresholdOrderError
from .profiles import CategoryProfile, TIERS
from .streams import ASSIGN_STREAM, stream_rng

ASSIGNMENT_KINDS = ("probabilistic", "direct", "random")


@dataclass(frozen=True)
class AssignmentPolicy:
    """How tasks get mapped to models for one run."""

    kind: str
    thresholds: tuple = (29.5, 33.8)
    direct_map: dict | None = None  # category_id -> model_id
    seed_stream: int = 0

    def __post_init__(self):
        if self.kind not in ASSIGNMENT_KINDS:
            raise ConfigError(
                f"assignment kind must be one of {ASSIGNMENT_KINDS}, got {self.kind!r}"
            )
        x1, x2 = self.thresholds
        if x1 >= x2:
            raise ThresholdOrderError(
                f"thresholds must satisfy x1 < x2, got ({x1}, {x2})"
            )
        if self.kind == "direct" and not self.direct_map:
            raise ConfigError("direct assignment requires a direct_map")
        if self.seed_stream < 0:
            raise ConfigError(f"seed_stream must be non-negative, got {self.seed_stream}")


@dataclass(frozen=True)
class Assignment:
    """Total mapping task_id -> model_id: exactly one model per task."""

    model_of: dict

    def __len__(self):
        return len(self.model_of)


@dataclass(frozen=True)
class CategoryAssignmentTable:
    """Per-category probability rows over the (small, medium, large) models."""

    model_ids: tuple  # (small_id, medium_id, large_id)
    rows: dict  # category_id -> (p_small, p_medium, p_large)


def assignment_probabilities(category: CategoryProfile, thresholds: tuple) -> tuple:
    """Gaussian interval masses over (small, medium, large), renormalized to 1.

    Uses the erf-based normal CDF; tests check it against adaptive quadrature.
    """
    x1, x2 = thresholds
    if x1 >= x2:
        raise ThresholdOrderError(f"thresholds must satisfy x1 < x2, got ({x1}, {x2})")
    mu, sigma = category.mu, category.sigma
    cdf_zero = float(ndtr((0.0 - mu) / sigma))
    cdf_x1 = float(ndtr((x1 - mu) / sigma))
    cdf_x2 = float(ndtr((x2 - mu) / sigma))
    raw = (cdf_x1 - cdf_zero, cdf_x2 - cdf_x1, 1.0 - cdf_x2)
    total = sum(raw)
    return tuple(p / total for p in raw)


def build_assignment_table(
    categories: tuple,
    thresholds: tuple,
    profiles: dict,
) -> CategoryAssignmentTable:
    """Resolve tier -> model_id and compute every category's probability row."""
    by_tier = {}
    for p in profiles.values():
        if p.tier in by_tier:
            raise ConfigError(
                f"probabilistic assignment needs exactly one model per tier; "
                f"tier {p.tier!r} appears more than once"
            )
        by_tier[p.tier] = p.model_id
    missing = [t for t in TIERS if t not in by_tier]
    if missing:
        raise ConfigError(
            f"probabilistic assignment needs a small/medium/large model set; "
            f"missing tiers: {missing}"
        )
    rows = {
        c.category_id: assignment_probabilities(c, thresholds) for c in categories
    }
    return CategoryAssignmentTable(
        model_ids=tuple(by_tier[t] for t in TIERS), rows=rows
    )


def default_direct_map(categories: tuple, model_ids: tuple) -> dict:
    """Rank-based category -> model map for the direct baseline.

    Highest-mean category goes to the large model, lowest-mean to the small
    one, the rest to the medium, so all three models receive work.
    """
    small_id, medium_id, large_id = model_ids
    ranked = sorted(categories, key=lambda c: c.mu)
    mapping = {c.category_id: medium_id for c in ranked}
    mapping[ranked[0].category_id] = small_id
    mapping[ranked[-1].category_id] = large_id
    return mapping


def assign(
    tasks: list,
    policy: AssignmentPolicy,
    table: CategoryAssignmentTable | None = None,
    model_ids: tuple | None = None,
) -> Assignment:
    """Map every task to exactly one model under the given policy.

    Probabilistic and random draws are keyed per task on the policy's own
    stream, so the mapping is reproducible and independent of workload noise
    and of how tasks are batched into calls.
    """
    if policy.kind == "probabilistic":
        if table is None:
            raise ConfigError("probabilistic assignment requires a category table")
        choice_ids = table.model_ids
    elif policy.kind == "random":
        if model_ids is None:
            model_ids = table.model_ids if table is not None else None
        if not model_ids:
            raise ConfigError("random assignment requires the deployed model ids")
        choice_ids = tuple(sorted(model_ids))

    mapping = {}
    for task in tasks:
        if policy.kind == "direct":
            try:
                mapping[task.task_id] = policy.direct_map[task.category_id]
            except KeyError:
                raise ConfigError(
                    f"direct_map has no entry for category {task.category_id}"
                ) from None
        elif policy.kind == "random":
            rng = stream_rng(policy.seed_stream, ASSIGN_STREAM, task.task_id)
            mapping[task.task_id] = choice_ids[int(rng.integers(len(choice_ids)))]
        else:
            try:
                row = table.rows[task.category_id]
            except KeyError:
                raise ConfigError(
                    f"assignment table has no row for category {task.category_id}"
                ) from None
            rng = stream_rng(policy.seed_stream, ASSIGN_STREAM, task.task_id)
            u = float(rng.random())
            acc = 0.0
            tier_idx = len(row) - 1
            for i, p in enumerate(row):
                acc += p
                if u < acc:
                    tier_idx = i
                    break
            mapping[task.task_id] = choice_ids[tier_idx]
    return Assignment(model_of=mapping)


def per_model_counts(assignment: Assignment, model_ids=None) -> dict:
    """Task count per model; zero entries included for any ids passed in."""
    counts = {m: 0 for m in model_ids} if model_ids is not None else {}
    for model in assignment.model_of.values():
        counts[model] = counts.get(model, 0) + 1
    return counts
