import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgegensim.errors import InfeasibleShareError, ResourceShareError, StepDomainError
from edgegensim.profiles import (
    LatencyCurve,
    ModelProfile,
    ScoreCurve,
    eval_expected_score,
    eval_latency,
    eval_score,
)


def make_profile(base_offset=0.0, gain=3.0, tau=8.0, ref_steps=26.0,
                 noise_sigma=0.8, intercept=0.3, slope=0.22,
                 step_options=(10, 14, 18, 22, 26, 30, 34, 38, 42),
                 step_fixed=None, tier="medium"):
    return ModelProfile(
        model_id=2,
        name="test",
        tier=tier,
        step_options=step_options,
        step_fixed=step_fixed,
        score_curve=ScoreCurve(base_offset, gain, tau, ref_steps, noise_sigma),
        latency_curve=LatencyCurve(intercept, slope),
    )


# --- eval_score ------------------------------------------------------------

def test_score_vanishes_at_ref_steps():
    p = make_profile()
    assert eval_score(p, 31.0, 26, 0.0) == pytest.approx(31.0, abs=1e-12)


def test_score_closed_form_value():
    # 31 + 4*(exp(-25/8) - exp(-9/8)) evaluated independently
    p = make_profile(gain=4.0, tau=8.0, ref_steps=26.0)
    expected = 29.87713786506023
    assert eval_score(p, 31.0, 10, 0.0) == pytest.approx(expected, abs=1e-12)


def test_score_monotone_in_steps_without_noise():
    p = make_profile()
    opts = p.admissible_steps()
    vals = [eval_score(p, 30.0, s, 0.0) for s in opts]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_score_rejects_inadmissible_steps():
    p = make_profile()
    with pytest.raises(StepDomainError):
        eval_score(p, 30.0, 11, 0.0)


def test_score_rejects_non_finite_quality():
    p = make_profile()
    with pytest.raises(ValueError):
        eval_score(p, math.inf, 10, 0.0)


def test_step_fixed_profile_rejects_every_other_step():
    # turbo-style profile: ref_steps=1 so the 1-step model sits at its base
    p = make_profile(step_options=(1,), step_fixed=1, tier="small",
                     gain=0.0, ref_steps=1.0)
    assert eval_score(p, 30.0, 1, 0.0) == pytest.approx(30.0)
    for s in (2, 10, 26):
        with pytest.raises(StepDomainError):
            eval_score(p, 30.0, s, 0.0)


@given(
    gain=st.floats(0.0, 10.0),
    tau=st.floats(0.5, 50.0),
    q=st.floats(-10.0, 60.0),
)
def test_marginal_gain_non_increasing(gain, tau, q):
    # forward differences of the expected score shrink as steps grow
    p = make_profile(gain=gain, tau=tau, step_options=tuple(range(1, 60)))
    diffs = [
        eval_expected_score(p, q, s + 1) - eval_expected_score(p, q, s)
        for s in range(1, 59)
    ]
    assert all(d >= -1e-12 for d in diffs)
    assert all(a >= b - 1e-9 for a, b in zip(diffs, diffs[1:]))


# --- eval_expected_score ---------------------------------------------------

def test_expected_score_is_noise_free_eval():
    p = make_profile()
    for s in (10, 26, 42):
        assert eval_expected_score(p, 31.5, s) == eval_score(p, 31.5, s, 0.0)


def test_expected_score_matches_monte_carlo_mean():
    p = make_profile()
    rng = np.random.default_rng(7)
    draws = rng.standard_normal(10**5)
    sample_mean = float(
        np.mean([eval_score(p, 31.0, 18, 0.0) + p.score_curve.noise_sigma * z
                 for z in draws])
    )
    tol = 3 * p.score_curve.noise_sigma / math.sqrt(10**5)
    assert abs(sample_mean - eval_expected_score(p, 31.0, 18)) < tol


def test_zero_noise_sigma_makes_score_deterministic():
    p = make_profile(noise_sigma=0.0)
    assert eval_score(p, 31.0, 18, 2.5) == eval_expected_score(p, 31.0, 18)


# --- eval_latency ----------------------------------------------------------

def test_latency_full_share_is_base_curve():
    p = make_profile()
    assert eval_latency(p, 26, 100.0, 100.0) == pytest.approx(0.3 + 0.22 * 26)


def test_latency_halving_share_doubles_delay():
    p = make_profile()
    d1 = eval_latency(p, 18, 40.0, 100.0)
    d2 = eval_latency(p, 18, 20.0, 100.0)
    assert d2 == pytest.approx(2.0 * d1, rel=1e-15)


def test_latency_worked_example():
    p = make_profile(intercept=0.4, slope=0.22, step_options=(25,))
    assert eval_latency(p, 25, 40.0, 100.0) == pytest.approx(14.75, abs=1e-12)


def test_latency_share_errors():
    p = make_profile()
    with pytest.raises(ResourceShareError):
        eval_latency(p, 10, 0.0, 100.0)
    with pytest.raises(ResourceShareError):
        eval_latency(p, 10, -5.0, 100.0)
    with pytest.raises(InfeasibleShareError):
        eval_latency(p, 10, 120.0, 100.0)


@given(share=st.floats(0.5, 100.0), steps=st.sampled_from((10, 18, 26, 42)))
@settings(max_examples=200)
def test_latency_share_product_invariant(share, steps):
    # delay * share constant in share (exact inverse proportionality)
    p = make_profile()
    ref = eval_latency(p, steps, 100.0, 100.0) * 100.0
    assert eval_latency(p, steps, share, 100.0) * share == pytest.approx(ref, rel=1e-12)


def test_latency_strictly_increasing_and_affine_in_steps():
    p = make_profile(step_options=tuple(range(1, 50)))
    vals = [eval_latency(p, s, 60.0, 100.0) for s in range(1, 50)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    second = [vals[i + 2] - 2 * vals[i + 1] + vals[i] for i in range(len(vals) - 2)]
    assert all(abs(d) < 1e-12 * max(vals) for d in second)


# --- type invariants --------------------------------------------------------

def test_score_curve_validation():
    with pytest.raises(ValueError):
        ScoreCurve(0.0, -1.0, 8.0, 26.0, 0.8)
    with pytest.raises(ValueError):
        ScoreCurve(0.0, 3.0, 0.0, 26.0, 0.8)
    with pytest.raises(ValueError):
        ScoreCurve(0.0, 3.0, 8.0, 26.0, -0.1)


def test_latency_curve_validation():
    with pytest.raises(ValueError):
        LatencyCurve(-0.1, 0.2)
    with pytest.raises(ValueError):
        LatencyCurve(0.3, 0.0)


def test_step_options_validation():
    with pytest.raises(ValueError):
        make_profile(step_options=())
    with pytest.raises(ValueError):
        make_profile(step_options=(10, 10, 14))
    with pytest.raises(ValueError):
        make_profile(step_options=(0, 10))
    with pytest.raises(ValueError):
        make_profile(tier="huge")
