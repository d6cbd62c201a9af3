"""Per-slot step selection and resource allocation.

Solves  max (1/N) sum_m N_m [ C_hat_m(s_m) - omega * (Gamma/gamma_m) d*_m(s_m) ]
subject to s_m in the model's step set (C3) and sum gamma_m <= Gamma (C4),
via simulated annealing with Metropolis acceptance and geometric cooling,
plus the equal-allocation and max-step baselines and an exhaustive oracle
over a discretized resource simplex.
"""

import itertools
import math
from dataclasses import dataclass

from .errors import (
    ConstraintViolationError,
    InfeasibleAllocationError,
    SearchSpaceError,
)
from .streams import SA_STREAM, stream_rng

# Floating-point slack for the resource budget; renormalized shares can
# drift from Gamma by a few ulps.
BUDGET_TOL = 1e-9

SEARCH_SPACE_GUARD = 10_000_000


@dataclass(frozen=True)
class AllocationPlan:
    """Per-model denoising steps and compute shares for one slot."""

    steps: dict  # model_id -> int
    resource: dict  # model_id -> TFLOPS


@dataclass(frozen=True)
class UtilityWeights:
    """Score/latency trade-off weight and the edge compute budget."""

    omega: float
    total_resource: float

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        if self.total_resource <= 0:
            raise ValueError(f"total_resource must be > 0, got {self.total_resource}")


@dataclass(frozen=True)
class SAParams:
    """Simulated-annealing knobs.

    cool_per_candidate=False cools once per outer temperature iteration
    (classical placement); True cools after every inner candidate, which is
    where the cooling line literally sits in the source procedure.
    """

    initial_temperature: float = 5.0
    min_temperature: float = 0.01
    cooling_coefficient: float = 0.95
    inner_iterations: int = 50
    latency_bound: float = 60.0
    resource_move_scale: float = 0.05
    seed: int = 0
    cool_per_candidate: bool = False

    def __post_init__(self):
        if not 0 < self.cooling_coefficient < 1:
            raise ValueError(
                f"cooling_coefficient must be in (0,1), got {self.cooling_coefficient}"
            )
        if self.min_temperature <= 0 or self.min_temperature >= self.initial_temperature:
            raise ValueError(
                f"need 0 < min_temperature < initial_temperature, got "
                f"({self.min_temperature}, {self.initial_temperature})"
            )
        if self.inner_iterations < 1:
            raise ValueError(f"inner_iterations must be >= 1, got {self.inner_iterations}")
        if self.latency_bound <= 0:
            raise ValueError(f"latency_bound must be > 0, got {self.latency_bound}")
        if not 0 < self.resource_move_scale < 1:
            raise ValueError(
                f"resource_move_scale must be in (0,1), got {self.resource_move_scale}"
            )
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")


# ---------------------------------------------------------------------------
# Feasibility and the utility objective
# ---------------------------------------------------------------------------

def check_plan(plan: AllocationPlan, loads: dict, profiles: dict, weights: UtilityWeights):
    """Raise ConstraintViolationError on the first violated constraint."""
    for m, s in plan.steps.items():
        if not profiles[m].is_admissible(s):
            raise ConstraintViolationError(
                "C3",
                f"model {m}: steps={s} not in {profiles[m].admissible_steps()}",
            )
    total = sum(plan.resource.values())
    if total > weights.total_resource + BUDGET_TOL:
        raise ConstraintViolationError(
            "C4",
            f"sum of shares {total} exceeds budget {weights.total_resource}",
        )
    for m, n in loads.items():
        if n > 0 and plan.resource.get(m, 0.0) <= 0:
            raise ConstraintViolationError(
                "gamma-positivity",
                f"model {m} carries {n} tasks but share is {plan.resource.get(m, 0.0)}",
            )


def plan_latency(plan: AllocationPlan, loads: dict, profiles: dict, weights: UtilityWeights) -> float:
    """Worst per-task delay over loaded models (the Alg.-style latency probe)."""
    worst = 0.0
    for m, n in loads.items():
        if n <= 0:
            continue
        d = (weights.total_resource / plan.resource[m]) * profiles[
            m
        ].latency_curve.at_full_resource(plan.steps[m])
        if d > worst:
            worst = d
    return worst


def slot_utility(
    plan: AllocationPlan,
    loads: dict,
    profiles: dict,
    weights: UtilityWeights,
    mean_quality: dict | None = None,
) -> float:
    """Expected per-task utility of a plan for the given per-model loads.

    mean_quality carries the mean latent quality of the tasks on each model;
    because the score curve is affine in latent quality, evaluating it at the
    mean reproduces the exact per-task sum. Omitted models default to 0,
    which shifts utility by a plan-independent constant.
    """
    check_plan(plan, loads, profiles, weights)
    n_total = sum(loads.values())
    if n_total <= 0:
        raise ValueError("loads must contain at least one task")
    mq = mean_quality or {}
    acc = 0.0
    for m, n in loads.items():
        if n <= 0:
            continue
        p = profiles[m]
        s = plan.steps[m]
        expected = mq.get(m, 0.0) + p.score_curve.base_offset + p.score_curve.relative_gain(s)
        delay = (weights.total_resource / plan.resource[m]) * p.latency_curve.at_full_resource(s)
        acc += n * (expected - weights.omega * delay)
    return acc / n_total


# ---------------------------------------------------------------------------
# Dense instance view shared by the search routines
# ---------------------------------------------------------------------------

class _Instance:
    """Loaded models flattened to parallel lists with per-step tables."""

    def __init__(self, loads, profiles, weights, mean_quality=None):
        mq = mean_quality or {}
        self.total = float(weights.total_resource)
        self.omega = float(weights.omega)
        self.ids = sorted(m for m, n in loads.items() if n > 0)
        if not self.ids:
            raise ValueError("loads must contain at least one task")
        self.n_total = sum(loads[m] for m in self.ids)
        self.counts = [loads[m] for m in self.ids]
        self.steps = []  # admissible step values per model
        self.escore = []  # expected score per step index (incl. mean quality)
        self.cost = []  # full-resource latency per step index
        self.slope = []  # latency slope, for the proportional initial shares
        for m in self.ids:
            p = profiles[m]
            opts = p.admissible_steps()
            curve = p.score_curve
            self.steps.append(opts)
            self.escore.append(
                [mq.get(m, 0.0) + curve.base_offset + curve.relative_gain(s) for s in opts]
            )
            self.cost.append([p.latency_curve.at_full_resource(s) for s in opts])
            self.slope.append(p.latency_curve.slope)
        self.size = len(self.ids)

    def utility(self, idx, gamma) -> float:
        og = self.omega * self.total
        acc = 0.0
        for i in range(self.size):
            k = idx[i]
            acc += self.counts[i] * (self.escore[i][k] - og * self.cost[i][k] / gamma[i])
        return acc / self.n_total

    def latency(self, idx, gamma) -> float:
        worst = 0.0
        for i in range(self.size):
            d = self.total / gamma[i] * self.cost[i][idx[i]]
            if d > worst:
                worst = d
        return worst

    def proportional_shares(self) -> list:
        """Shares proportional to N_m * latency slope, summing to the budget."""
        w = [c * s for c, s in zip(self.counts, self.slope)]
        tot = sum(w)
        return [self.total * x / tot for x in w]

    def balanced_shares(self, idx) -> list:
        """Shares proportional to d*_m, equalizing per-task latencies.

        For fixed steps this minimizes the max latency over loaded models
        (the minimum equals sum_m d*_m), so it is the exact feasibility
        certificate for the latency bound.
        """
        d = [self.cost[i][idx[i]] for i in range(self.size)]
        tot = sum(d)
        return [self.total * x / tot for x in d]

    def to_plan(self, idx, gamma, profiles) -> AllocationPlan:
        """Expand to a full plan; unloaded models get min steps and zero share."""
        steps = {}
        resource = {}
        for m, p in profiles.items():
            steps[m] = p.admissible_steps()[0]
            resource[m] = 0.0
        for i, m in enumerate(self.ids):
            steps[m] = self.steps[i][idx[i]]
            resource[m] = gamma[i]
        return AllocationPlan(steps=steps, resource=resource)


# ---------------------------------------------------------------------------
# Simulated annealing
# ---------------------------------------------------------------------------

def metropolis_accept(delta_u: float, temperature: float, rng) -> bool:
    """Always accept improvements; accept a worsening with prob exp(dU/T)."""
    if delta_u > 0:
        return True
    return float(rng.random()) < math.exp(delta_u / temperature)


def cooling_schedule(params: SAParams) -> list:
    """The geometric outer-loop temperature sequence (classical placement)."""
    temps = []
    t = params.initial_temperature
    while t > params.min_temperature:
        temps.append(t)
        t *= params.cooling_coefficient
    return temps


def _neighbor(inst: _Instance, idx, gamma, params, rng):
    """One small move: a +-1 step index shift or a share transfer.

    The transfer clamps the donor above a small positive floor and
    renormalizes so shares keep summing to the budget exactly.
    """
    new_idx = list(idx)
    new_gamma = list(gamma)
    if inst.size >= 2 and rng.random() < 0.5:
        i = int(rng.integers(inst.size))
        j = int(rng.integers(inst.size - 1))
        if j >= i:
            j += 1
        floor = 1e-6 * inst.total
        amount = min(params.resource_move_scale * inst.total, new_gamma[i] - floor)
        if amount > 0:
            new_gamma[i] -= amount
            new_gamma[j] += amount
        scale = inst.total / sum(new_gamma)
        new_gamma = [g * scale for g in new_gamma]
    else:
        i = int(rng.integers(inst.size))
        k = idx[i] + (1 if rng.random() < 0.5 else -1)
        if 0 <= k < len(inst.steps[i]):
            new_idx[i] = k
    return new_idx, new_gamma


def anneal(
    loads: dict,
    profiles: dict,
    weights: UtilityWeights,
    params: SAParams,
    mean_quality: dict | None = None,
):
    """Simulated-annealing search over (steps, shares); returns (plan, utility).

    Feasibility is certified up front with the min-step, latency-balanced
    plan (exact: its latency is the minimum achievable). The chain starts
    from midpoint steps with load-proportional shares when that is feasible,
    falling back to min steps and then to the balanced certificate plan.
    Candidates violating the latency bound are discarded without
    evaluation. The best-so-far plan is tracked separately from the chain,
    so the result is never worse than the initial plan.
    """
    inst = _Instance(loads, profiles, weights, mean_quality)
    rng = stream_rng(params.seed, SA_STREAM)

    min_idx = [0] * inst.size
    certificate = inst.balanced_shares(min_idx)
    if inst.latency(min_idx, certificate) >= params.latency_bound:
        raise InfeasibleAllocationError(
            f"no feasible plan: even minimum steps with latency-balanced "
            f"shares reach {inst.latency(min_idx, certificate):.3f}s, above "
            f"the bound t={params.latency_bound}s",
        )

    cur_idx = [len(s) // 2 for s in inst.steps]
    cur_gamma = inst.proportional_shares()
    if inst.latency(cur_idx, cur_gamma) >= params.latency_bound:
        cur_idx = min_idx
    if inst.latency(cur_idx, cur_gamma) >= params.latency_bound:
        cur_gamma = certificate
    cur_u = inst.utility(cur_idx, cur_gamma)
    best_u, best_idx, best_gamma = cur_u, list(cur_idx), list(cur_gamma)

    beta = params.cooling_coefficient
    t = params.initial_temperature
    while t > params.min_temperature:
        for _ in range(params.inner_iterations):
            cand_idx, cand_gamma = _neighbor(inst, cur_idx, cur_gamma, params, rng)
            if inst.latency(cand_idx, cand_gamma) < params.latency_bound:
                u = inst.utility(cand_idx, cand_gamma)
                if metropolis_accept(u - cur_u, t, rng):
                    cur_idx, cur_gamma, cur_u = cand_idx, cand_gamma, u
                    if u > best_u:
                        best_u, best_idx, best_gamma = u, list(cand_idx), list(cand_gamma)
            if params.cool_per_candidate:
                t *= beta
        if not params.cool_per_candidate:
            t *= beta

    plan = inst.to_plan(best_idx, best_gamma, profiles)
    return plan, best_u


# ---------------------------------------------------------------------------
# Exhaustive oracle
# ---------------------------------------------------------------------------

def _compositions(total: int, parts: int):
    """Positive integer compositions of total, in lexicographic order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def exhaustive_search(
    loads: dict,
    profiles: dict,
    weights: UtilityWeights,
    resource_grid_points: int,
    latency_bound: float,
    mean_quality: dict | None = None,
):
    """Global optimum over step combinations x a discretized resource simplex.

    The simplex uses resource_grid_points quanta per loaded model (so one
    grid point degenerates to the equal split). Ties break to the
    lexicographically smallest plan in (steps, shares) order over ascending
    model ids.
    """
    if resource_grid_points < 1:
        raise ValueError(f"resource_grid_points must be >= 1, got {resource_grid_points}")
    inst = _Instance(loads, profiles, weights, mean_quality)
    quanta = resource_grid_points * inst.size
    n_combos = 1
    for s in inst.steps:
        n_combos *= len(s)
    n_comp = math.comb(quanta - 1, inst.size - 1)
    if n_combos * n_comp > SEARCH_SPACE_GUARD:
        raise SearchSpaceError(
            f"{n_combos} step combinations x {n_comp} grid allocations exceeds "
            f"the {SEARCH_SPACE_GUARD} guard; use a coarser resource grid"
        )

    unit = inst.total / quanta
    gammas = [[p * unit for p in parts] for parts in _compositions(quanta, inst.size)]
    best = None
    for idx in itertools.product(*[range(len(s)) for s in inst.steps]):
        for gamma in gammas:
            if inst.latency(idx, gamma) < latency_bound:
                u = inst.utility(idx, gamma)
                if best is None or u > best[0]:
                    best = (u, list(idx), gamma)
    if best is None:
        raise InfeasibleAllocationError(
            f"no grid plan satisfies the latency bound t={latency_bound}s"
        )
    u, idx, gamma = best
    return inst.to_plan(idx, gamma, profiles), u


# ---------------------------------------------------------------------------
# Baselines
# ---------------------------------------------------------------------------

def equal_allocation(
    loads: dict,
    profiles: dict,
    weights: UtilityWeights,
    latency_bound: float,
) -> AllocationPlan:
    """Budget split equally over every deployed model; steps chosen per model.

    Each loaded model picks the step count maximizing its own utility term
    under the latency bound; unloaded models take their minimum steps.
    """
    ids = sorted(profiles)
    share = weights.total_resource / len(ids)
    alpha = float(len(ids))  # total / share
    steps = {}
    resource = {}
    for m in ids:
        p = profiles[m]
        opts = p.admissible_steps()
        resource[m] = share
        if loads.get(m, 0) > 0:
            feasible = [
                s for s in opts if alpha * p.latency_curve.at_full_resource(s) < latency_bound
            ]
            if not feasible:
                raise InfeasibleAllocationError(
                    f"equal allocation: model {m} has no step under the latency "
                    f"bound t={latency_bound}s at share {share}"
                )
            curve = p.score_curve
            steps[m] = max(
                feasible,
                key=lambda s: curve.relative_gain(s)
                - weights.omega * alpha * p.latency_curve.at_full_resource(s),
            )
        else:
            steps[m] = opts[0]
    return AllocationPlan(steps=steps, resource=resource)


def _min_ratio_shares(a: dict, lower: dict, budget: float) -> dict:
    """Minimize sum a_m/gamma_m s.t. sum gamma = budget, gamma_m >= lower_m.

    Unconstrained optimum is gamma ~ sqrt(a); models pushed below their
    lower bound get pinned there and the remainder is re-split. Terminates
    in at most len(a) rounds.
    """
    free = set(a)
    pinned = {}
    while True:
        remaining = budget - sum(pinned.values())
        root_sum = sum(math.sqrt(a[m]) for m in free)
        shares = {m: remaining * math.sqrt(a[m]) / root_sum for m in free}
        violated = [m for m in free if shares[m] < lower[m]]
        if not violated:
            shares.update(pinned)
            return shares
        for m in violated:
            pinned[m] = lower[m]
            free.remove(m)
        if not free:
            # every model pinned: spread the leftover budget evenly
            slack = (budget - sum(pinned.values())) / len(pinned)
            return {m: g + slack for m, g in pinned.items()}


def optimal_step(
    loads: dict,
    profiles: dict,
    weights: UtilityWeights,
    latency_bound: float,
) -> AllocationPlan:
    """Max-step baseline: highest admissible steps, shares optimized exactly.

    With steps fixed the utility is concave in the shares; the closed-form
    optimum (shares proportional to sqrt(N_m d*_m)) is projected onto the
    latency-feasible region.
    """
    ids = sorted(profiles)
    loaded = [m for m in ids if loads.get(m, 0) > 0]
    if not loaded:
        raise ValueError("loads must contain at least one task")
    steps = {m: profiles[m].admissible_steps()[-1] for m in ids}
    cost = {m: profiles[m].latency_curve.at_full_resource(steps[m]) for m in loaded}
    # latency < bound requires gamma_m strictly above Gamma * d*_m / t
    lower = {
        m: weights.total_resource * cost[m] / latency_bound * (1.0 + 1e-9)
        for m in loaded
    }
    if sum(lower.values()) >= weights.total_resource:
        raise InfeasibleAllocationError(
            f"optimal-step: max-step plan cannot meet the latency bound "
            f"t={latency_bound}s within the budget"
        )
    a = {m: loads[m] * cost[m] for m in loaded}
    shares = _min_ratio_shares(a, lower, weights.total_resource)
    resource = {m: 0.0 for m in ids}
    resource.update(shares)
    return AllocationPlan(steps=steps, resource=resource)
