"""Seeded synthetic workload: per-slot task batches with category-Gaussian quality."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .profiles import CategoryProfile
from .streams import WORKLOAD_STREAM, stream_rng


@dataclass(frozen=True)
class Task:
    """One prompt request: category label plus its latent quality draw."""

    task_id: int
    category_id: int
    latent_quality: float
    arrival_slot: int


@dataclass(frozen=True)
class WorkloadSpec:
    """Shape of the synthetic task stream."""

    tasks_per_slot: int
    num_slots: int
    category_mix: dict  # label -> probability weight
    seed: int

    def __post_init__(self):
        if self.tasks_per_slot < 1:
            raise ValueError(f"tasks_per_slot must be >= 1, got {self.tasks_per_slot}")
        if self.num_slots < 1:
            raise ValueError(f"num_slots must be >= 1, got {self.num_slots}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        weights = list(self.category_mix.values())
        if not weights:
            raise ValueError("category_mix must be non-empty")
        if any(w < 0 for w in weights):
            raise ValueError(f"category_mix weights must be >= 0, got {weights}")
        if abs(sum(weights) - 1.0) > 1e-9:
            raise ValueError(f"category_mix weights must sum to 1, got {sum(weights)}")


def generate_slot(
    spec: WorkloadSpec,
    categories: tuple,
    slot_index: int,
) -> list:
    """Generate the task batch arriving at the start of one time slot.

    Randomness is keyed to (seed, slot_index), so slots are independent and
    the whole workload is a pure function of (spec, categories).
    """
    if slot_index < 0 or slot_index >= spec.num_slots:
        raise ValueError(f"slot_index {slot_index} outside [0, {spec.num_slots})")
    by_label = {c.label: c for c in categories}
    unknown = [label for label in spec.category_mix if label not in by_label]
    if unknown:
        raise ConfigError(
            f"category_mix names unknown categories {unknown}; "
            f"known: {sorted(by_label)}"
        )

    labels = sorted(spec.category_mix, key=lambda lab: by_label[lab].category_id)
    weights = np.array([spec.category_mix[lab] for lab in labels], dtype=float)
    weights = weights / weights.sum()
    mus = np.array([by_label[lab].mu for lab in labels])
    sigmas = np.array([by_label[lab].sigma for lab in labels])
    cat_ids = [by_label[lab].category_id for lab in labels]

    rng = stream_rng(spec.seed, WORKLOAD_STREAM, slot_index)
    n = spec.tasks_per_slot
    picks = rng.choice(len(labels), size=n, p=weights)
    qualities = mus[picks] + sigmas[picks] * rng.standard_normal(n)

    base = slot_index * n
    return [
        Task(
            task_id=base + i,
            category_id=cat_ids[picks[i]],
            latent_quality=float(qualities[i]),
            arrival_slot=slot_index,
        )
        for i in range(n)
    ]


def empirical_category_stats(tasks: list) -> dict:
    """Per-category (mean, sample stddev) of latent quality.

    Categories with fewer than two tasks are omitted (no sample stddev).
    """
    groups: dict = {}
    for t in tasks:
        groups.setdefault(t.category_id, []).append(t.latent_quality)
    out = {}
    for cat_id in sorted(groups):
        vals = groups[cat_id]
        if len(vals) < 2:
            continue
        mean = sum(vals) / len(vals)
        var = sum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
        out[cat_id] = (mean, math.sqrt(var))
    return out
