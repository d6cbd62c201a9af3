"""Run configuration: YAML loading, validation, defaults, fingerprinting.

Every section mirrors one module's types and is validated on load with
path-qualified messages. The shipped defaults reproduce the reference
setup: a 1-step turbo-style small model, a medium and a large model over
the nine-value step set, omega = 0.2, thresholds (29.5, 33.8), and a
100 TFLOPS edge budget.
"""

import hashlib
from dataclasses import dataclass, replace

import yaml

from .alloc import SAParams, UtilityWeights
from .assign import AssignmentPolicy, default_direct_map
from .errors import ConfigError, ThresholdOrderError
from .profiles import (
    TIERS,
    CategoryProfile,
    LatencyCurve,
    ModelProfile,
    ScoreCurve,
)
from .workload import WorkloadSpec

DEFAULT_STEP_SET = (10, 14, 18, 22, 26, 30, 34, 38, 42)


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    formats: tuple = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    profiles: dict  # model_id -> ModelProfile
    categories: tuple
    workload: WorkloadSpec
    weights: UtilityWeights
    assignment: AssignmentPolicy
    sa: SAParams
    output: OutputConfig

    def to_dict(self) -> dict:
        """Canonical plain-value view (what the fingerprint hashes)."""
        return {
            "profiles": [
                {
                    "model_id": p.model_id,
                    "name": p.name,
                    "tier": p.tier,
                    "step_options": list(p.step_options),
                    "step_fixed": p.step_fixed,
                    "score_curve": {
                        "base_offset": p.score_curve.base_offset,
                        "gain": p.score_curve.gain,
                        "tau": p.score_curve.tau,
                        "ref_steps": p.score_curve.ref_steps,
                        "noise_sigma": p.score_curve.noise_sigma,
                    },
                    "latency_curve": {
                        "intercept": p.latency_curve.intercept,
                        "slope": p.latency_curve.slope,
                    },
                    "param_count": p.param_count,
                    "flops_per_image": p.flops_per_image,
                }
                for _, p in sorted(self.profiles.items())
            ],
            "categories": [
                {
                    "category_id": c.category_id,
                    "label": c.label,
                    "mu": c.mu,
                    "sigma": c.sigma,
                }
                for c in self.categories
            ],
            "workload": {
                "tasks_per_slot": self.workload.tasks_per_slot,
                "num_slots": self.workload.num_slots,
                "category_mix": {
                    k: self.workload.category_mix[k]
                    for k in sorted(self.workload.category_mix)
                },
                "seed": self.workload.seed,
            },
            "weights": {
                "omega": self.weights.omega,
                "total_resource": self.weights.total_resource,
            },
            "assignment": {
                "kind": self.assignment.kind,
                "thresholds": list(self.assignment.thresholds),
                "direct_map": (
                    dict(sorted(self.assignment.direct_map.items()))
                    if self.assignment.direct_map
                    else None
                ),
                "seed_stream": self.assignment.seed_stream,
            },
            "sa": {
                "initial_temperature": self.sa.initial_temperature,
                "min_temperature": self.sa.min_temperature,
                "cooling_coefficient": self.sa.cooling_coefficient,
                "inner_iterations": self.sa.inner_iterations,
                "latency_bound": self.sa.latency_bound,
                "resource_move_scale": self.sa.resource_move_scale,
                "seed": self.sa.seed,
                "cool_per_candidate": self.sa.cool_per_candidate,
            },
            "output": {
                "directory": self.output.directory,
                "formats": list(self.output.formats),
            },
        }

    def fingerprint(self) -> str:
        from .artifacts import json_text

        return hashlib.sha256(json_text(self.to_dict()).encode()).hexdigest()

    def with_seed(self, seed: int) -> "RunConfig":
        """Re-seed every randomness stream for a paired-seed experiment."""
        return replace(
            self,
            workload=replace(self.workload, seed=seed),
            assignment=replace(self.assignment, seed_stream=seed),
            sa=replace(self.sa, seed=seed),
        )


# ---------------------------------------------------------------------------
# Defaults
# ---------------------------------------------------------------------------

def default_profiles() -> dict:
    """Three-tier surrogate calibration (configuration, not ground truth)."""
    small = ModelProfile(
        model_id=1,
        name="turbo-small",
        tier="small",
        step_options=(1,),
        step_fixed=1,
        score_curve=ScoreCurve(
            base_offset=-1.5, gain=0.0, tau=8.0, ref_steps=1.0, noise_sigma=0.8
        ),
        latency_curve=LatencyCurve(intercept=0.2, slope=0.15),
        param_count=3.5,
        flops_per_image=14.0,
    )
    medium = ModelProfile(
        model_id=2,
        name="base-medium",
        tier="medium",
        step_options=DEFAULT_STEP_SET,
        score_curve=ScoreCurve(
            base_offset=0.0, gain=3.0, tau=8.0, ref_steps=26.0, noise_sigma=0.8
        ),
        latency_curve=LatencyCurve(intercept=0.3, slope=0.22),
        param_count=1.06,
        flops_per_image=35.0,
    )
    large = ModelProfile(
        model_id=3,
        name="xl-large",
        tier="large",
        step_options=DEFAULT_STEP_SET,
        score_curve=ScoreCurve(
            base_offset=2.5, gain=4.0, tau=10.0, ref_steps=26.0, noise_sigma=0.8
        ),
        latency_curve=LatencyCurve(intercept=0.8, slope=0.9),
        param_count=3.5,
        flops_per_image=338.0,
    )
    return {p.model_id: p for p in (small, medium, large)}


def default_categories() -> tuple:
    return (
        CategoryProfile(category_id=0, label="Basic", mu=32.5, sigma=1.8),
        CategoryProfile(category_id=1, label="Detail", mu=31.5, sigma=2.0),
        CategoryProfile(category_id=2, label="Imagination", mu=30.0, sigma=2.2),
        CategoryProfile(category_id=3, label="Complex", mu=29.0, sigma=2.4),
    )


def default_config() -> RunConfig:
    profiles = default_profiles()
    categories = default_categories()
    seed = 42
    tier_ids = {p.tier: m for m, p in profiles.items()}
    model_ids = tuple(tier_ids[t] for t in TIERS)
    return RunConfig(
        profiles=profiles,
        categories=categories,
        workload=WorkloadSpec(
            tasks_per_slot=100,
            num_slots=10,
            category_mix={c.label: 0.25 for c in categories},
            seed=seed,
        ),
        weights=UtilityWeights(omega=0.2, total_resource=100.0),
        assignment=AssignmentPolicy(
            kind="probabilistic",
            thresholds=(29.5, 33.8),
            direct_map=default_direct_map(categories, model_ids),
            seed_stream=seed,
        ),
        sa=SAParams(seed=seed),
        output=OutputConfig(),
    )


# ---------------------------------------------------------------------------
# YAML loading
# ---------------------------------------------------------------------------

def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}")


def _get(section: dict, path: str, key, expected=None, default=...):
    if key not in section:
        if default is not ...:
            return default
        _fail(f"{path}.{key}", "missing required field")
    value = section[key]
    if expected is not None and not isinstance(value, expected):
        names = (
            expected.__name__
            if isinstance(expected, type)
            else "/".join(t.__name__ for t in expected)
        )
        _fail(f"{path}.{key}", f"expected {names}, got {type(value).__name__}")
    return value


def _build(path: str, factory, **kwargs):
    """Construct a validated type, re-raising its errors with the field path."""
    try:
        return factory(**kwargs)
    except ThresholdOrderError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_profile(i: int, doc: dict) -> ModelProfile:
    path = f"profiles[{i}]"
    sc = _get(doc, path, "score_curve", dict)
    lc = _get(doc, path, "latency_curve", dict)
    curve = _build(
        f"{path}.score_curve",
        ScoreCurve,
        base_offset=float(_get(sc, f"{path}.score_curve", "base_offset", (int, float))),
        gain=float(_get(sc, f"{path}.score_curve", "gain", (int, float))),
        tau=float(_get(sc, f"{path}.score_curve", "tau", (int, float))),
        ref_steps=float(_get(sc, f"{path}.score_curve", "ref_steps", (int, float))),
        noise_sigma=float(_get(sc, f"{path}.score_curve", "noise_sigma", (int, float))),
    )
    latency = _build(
        f"{path}.latency_curve",
        LatencyCurve,
        intercept=float(_get(lc, f"{path}.latency_curve", "intercept", (int, float))),
        slope=float(_get(lc, f"{path}.latency_curve", "slope", (int, float))),
    )
    step_fixed = _get(doc, path, "step_fixed", int, default=None)
    step_options = _get(doc, path, "step_options", list, default=None)
    if step_options is None:
        if step_fixed is None:
            _fail(f"{path}.step_options", "need step_options or step_fixed")
        step_options = [step_fixed]
    return _build(
        path,
        ModelProfile,
        model_id=_get(doc, path, "model_id", int),
        name=str(_get(doc, path, "name", default="")),
        tier=_get(doc, path, "tier", str),
        step_options=tuple(step_options),
        step_fixed=step_fixed,
        score_curve=curve,
        latency_curve=latency,
        param_count=float(_get(doc, path, "param_count", (int, float), default=0.0)),
        flops_per_image=float(
            _get(doc, path, "flops_per_image", (int, float), default=0.0)
        ),
    )


def _parse_config(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("top level: expected a mapping of sections")
    base = default_config()

    profiles = base.profiles
    if "profiles" in doc:
        entries = _get(doc, "", "profiles", list)
        parsed = [_parse_profile(i, _get_entry(entries, i)) for i in range(len(entries))]
        profiles = {}
        for p in parsed:
            if p.model_id in profiles:
                _fail("profiles", f"duplicate model_id {p.model_id}")
            profiles[p.model_id] = p

    categories = base.categories
    if "categories" in doc:
        entries = _get(doc, "", "categories", list)
        cats = []
        for i in range(len(entries)):
            c = _get_entry(entries, i)
            path = f"categories[{i}]"
            cats.append(
                _build(
                    path,
                    CategoryProfile,
                    category_id=_get(c, path, "category_id", int),
                    label=str(_get(c, path, "label")),
                    mu=float(_get(c, path, "mu", (int, float))),
                    sigma=float(_get(c, path, "sigma", (int, float))),
                )
            )
        labels = [c.label for c in cats]
        if len(set(labels)) != len(labels):
            _fail("categories", f"labels must be unique, got {labels}")
        ids = [c.category_id for c in cats]
        if len(set(ids)) != len(ids):
            _fail("categories", f"category_id values must be unique, got {ids}")
        categories = tuple(cats)

    w = doc.get("workload", {})
    workload = _build(
        "workload",
        WorkloadSpec,
        tasks_per_slot=_get(w, "workload", "tasks_per_slot", int,
                            default=base.workload.tasks_per_slot),
        num_slots=_get(w, "workload", "num_slots", int, default=base.workload.num_slots),
        category_mix=_get(w, "workload", "category_mix", dict,
                          default=None) or {c.label: 1.0 / len(categories) for c in categories},
        seed=_get(w, "workload", "seed", int, default=base.workload.seed),
    )
    for label in workload.category_mix:
        if label not in {c.label for c in categories}:
            _fail("workload.category_mix", f"unknown category {label!r}")

    wt = doc.get("weights", {})
    weights = _build(
        "weights",
        UtilityWeights,
        omega=float(_get(wt, "weights", "omega", (int, float), default=base.weights.omega)),
        total_resource=float(
            _get(wt, "weights", "total_resource", (int, float),
                 default=base.weights.total_resource)
        ),
    )

    a = doc.get("assignment", {})
    kind = _get(a, "assignment", "kind", str, default=base.assignment.kind)
    thresholds = _get(a, "assignment", "thresholds", list, default=None)
    thresholds = (
        tuple(float(x) for x in thresholds)
        if thresholds is not None
        else base.assignment.thresholds
    )
    if len(thresholds) != 2:
        _fail("assignment.thresholds", f"expected two values, got {list(thresholds)}")
    direct_map = _get(a, "assignment", "direct_map", dict, default=None)
    if direct_map is not None:
        by_label = {c.label: c.category_id for c in categories}
        resolved = {}
        for label, model_id in direct_map.items():
            if label not in by_label:
                _fail("assignment.direct_map", f"unknown category {label!r}")
            if model_id not in profiles:
                _fail("assignment.direct_map", f"unknown model_id {model_id}")
            resolved[by_label[label]] = int(model_id)
        direct_map = resolved
    else:
        tier_ids = {p.tier: m for m, p in profiles.items()}
        if all(t in tier_ids for t in TIERS) and len(profiles) == len(TIERS):
            direct_map = default_direct_map(
                categories, tuple(tier_ids[t] for t in TIERS)
            )
    if kind == "direct" and direct_map is not None:
        missing = [c.label for c in categories if c.category_id not in direct_map]
        if missing:
            _fail("assignment.direct_map", f"no entry for categories {missing}")
    assignment = _build(
        "assignment",
        AssignmentPolicy,
        kind=kind,
        thresholds=thresholds,
        direct_map=direct_map,
        seed_stream=_get(a, "assignment", "seed_stream", int, default=workload.seed),
    )

    s = doc.get("sa", {})
    sa = _build(
        "sa",
        SAParams,
        initial_temperature=float(
            _get(s, "sa", "initial_temperature", (int, float),
                 default=base.sa.initial_temperature)
        ),
        min_temperature=float(
            _get(s, "sa", "min_temperature", (int, float), default=base.sa.min_temperature)
        ),
        cooling_coefficient=float(
            _get(s, "sa", "cooling_coefficient", (int, float),
                 default=base.sa.cooling_coefficient)
        ),
        inner_iterations=_get(s, "sa", "inner_iterations", int,
                              default=base.sa.inner_iterations),
        latency_bound=float(
            _get(s, "sa", "latency_bound", (int, float), default=base.sa.latency_bound)
        ),
        resource_move_scale=float(
            _get(s, "sa", "resource_move_scale", (int, float),
                 default=base.sa.resource_move_scale)
        ),
        seed=_get(s, "sa", "seed", int, default=workload.seed),
        cool_per_candidate=_get(s, "sa", "cool_per_candidate", bool, default=False),
    )

    o = doc.get("output", {})
    formats = _get(o, "output", "formats", list, default=list(base.output.formats))
    for f in formats:
        if f not in ("csv", "json"):
            _fail("output.formats", f"unknown format {f!r}")
    output = OutputConfig(
        directory=str(_get(o, "output", "directory", default=base.output.directory)),
        formats=tuple(formats),
    )

    return RunConfig(
        profiles=profiles,
        categories=categories,
        workload=workload,
        weights=weights,
        assignment=assignment,
        sa=sa,
        output=output,
    )


def _get_entry(entries: list, i: int) -> dict:
    if not isinstance(entries[i], dict):
        raise ConfigError(f"entry [{i}]: expected a mapping")
    return entries[i]


def load_config(path: str) -> RunConfig:
    """Load and fully validate a YAML run configuration."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"{path}: YAML parse error{where}: {exc.problem}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: YAML parse error: {exc}") from exc
    if doc is None:
        doc = {}
    return _parse_config(doc)
