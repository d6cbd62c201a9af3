"""Model and category profiles: the surrogate score/latency curve families.

Real diffusion models are replaced by three-parameter saturating score
curves and affine latency curves. The medium-tier model is the reference:
at its reference step count the curve contributes nothing, so a task scores
exactly its latent (category-Gaussian) quality there.
"""

import math
from dataclasses import dataclass, field

from .errors import InfeasibleShareError, ResourceShareError, StepDomainError

TIERS = ("small", "medium", "large")


@dataclass(frozen=True)
class ScoreCurve:
    """Saturating-exponential quality curve, relative to the reference steps.

    The curve value added to a task's latent quality is

        base_offset + gain * (exp(-(ref_steps-1)/tau) - exp(-(steps-1)/tau))

    which vanishes at steps == ref_steps, is non-decreasing in steps, and has
    diminishing marginal gain. Generation noise is N(0, noise_sigma^2).
    """

    base_offset: float
    gain: float
    tau: float
    ref_steps: float
    noise_sigma: float

    def __post_init__(self):
        if self.gain < 0:
            raise ValueError(f"gain must be >= 0, got {self.gain}")
        if self.tau <= 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")

    def relative_gain(self, steps: float) -> float:
        """Step-dependent score term; zero at ref_steps, saturating in steps."""
        return self.gain * (
            math.exp(-(self.ref_steps - 1.0) / self.tau)
            - math.exp(-(steps - 1.0) / self.tau)
        )


@dataclass(frozen=True)
class LatencyCurve:
    """Affine generation time at full resource: d*(s) = intercept + slope*s."""

    intercept: float
    slope: float

    def __post_init__(self):
        if self.intercept < 0:
            raise ValueError(f"intercept must be >= 0, got {self.intercept}")
        if self.slope <= 0:
            raise ValueError(f"slope must be > 0, got {self.slope}")

    def at_full_resource(self, steps: float) -> float:
        return self.intercept + self.slope * steps


@dataclass(frozen=True)
class ModelProfile:
    """One deployed generative model: curves plus its admissible step set."""

    model_id: int
    name: str
    tier: str
    step_options: tuple
    score_curve: ScoreCurve
    latency_curve: LatencyCurve
    step_fixed: int | None = None
    param_count: float = 0.0  # billions, informational only
    flops_per_image: float = 0.0  # TFLOPs at reference steps, informational only

    def __post_init__(self):
        if self.tier not in TIERS:
            raise ValueError(f"tier must be one of {TIERS}, got {self.tier!r}")
        opts = tuple(int(s) for s in self.step_options)
        if not opts:
            raise ValueError("step_options must be non-empty")
        if any(s < 1 for s in opts):
            raise ValueError(f"step_options must all be >= 1, got {opts}")
        if any(a >= b for a, b in zip(opts, opts[1:])):
            raise ValueError(f"step_options must be strictly increasing, got {opts}")
        object.__setattr__(self, "step_options", opts)
        if self.step_fixed is not None and self.step_fixed < 1:
            raise ValueError(f"step_fixed must be >= 1, got {self.step_fixed}")

    def admissible_steps(self) -> tuple:
        """Admissible step values; a step_fixed profile admits only that value."""
        if self.step_fixed is not None:
            return (self.step_fixed,)
        return self.step_options

    def is_admissible(self, steps: int) -> bool:
        return steps in self.admissible_steps()


@dataclass(frozen=True)
class CategoryProfile:
    """A prompt category's Gaussian score law on the medium (reference) model."""

    category_id: int
    label: str
    mu: float
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")


# ---------------------------------------------------------------------------
# Curve evaluation
# ---------------------------------------------------------------------------

def eval_score(
    profile: ModelProfile,
    latent_quality: float,
    steps: int,
    noise_draw: float,
) -> float:
    """Realized score of one task on one model at the given steps.

    latent_quality is the task's would-be score on the medium model at its
    reference steps; the profile shifts it by its tier offset and the
    step-dependent saturating term, then adds scaled generation noise.
    """
    if not profile.is_admissible(steps):
        raise StepDomainError(
            f"model {profile.model_id} ({profile.name}): steps={steps} not in "
            f"admissible set {profile.admissible_steps()}"
        )
    if not math.isfinite(latent_quality):
        raise ValueError(f"latent_quality must be finite, got {latent_quality}")
    curve = profile.score_curve
    return (
        latent_quality
        + curve.base_offset
        + curve.relative_gain(steps)
        + curve.noise_sigma * noise_draw
    )


def eval_expected_score(profile: ModelProfile, latent_quality: float, steps: int) -> float:
    """Noise-free score: the estimate the allocator optimizes."""
    return eval_score(profile, latent_quality, steps, 0.0)


def eval_latency(
    profile: ModelProfile,
    steps: int,
    resource_share: float,
    total_resource: float,
) -> float:
    """Per-task inference delay under a partial compute share.

    Scales the full-resource time by total_resource / resource_share;
    transmission legs are zero in this system.
    """
    if not profile.is_admissible(steps):
        raise StepDomainError(
            f"model {profile.model_id} ({profile.name}): steps={steps} not in "
            f"admissible set {profile.admissible_steps()}"
        )
    if resource_share <= 0:
        raise ResourceShareError(
            f"resource_share must be > 0, got {resource_share}"
        )
    if resource_share > total_resource:
        raise InfeasibleShareError(
            f"resource_share {resource_share} exceeds total resource {total_resource}"
        )
    return (total_resource / resource_share) * profile.latency_curve.at_full_resource(steps)
