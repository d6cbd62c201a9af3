"""edgegensim: slot-based simulator and optimizer for multi-model
text-to-image serving under an edge compute budget.

Pipeline per time slot: a seeded synthetic workload is assigned to models
(probabilistic interval-mass rule or a baseline), then denoising steps and
compute shares are chosen by simulated annealing (or a baseline / the
exhaustive oracle), and realized scores and delays are aggregated.
"""

from .alloc import (
    AllocationPlan,
    SAParams,
    UtilityWeights,
    anneal,
    equal_allocation,
    exhaustive_search,
    optimal_step,
    slot_utility,
)
from .assign import (
    Assignment,
    AssignmentPolicy,
    CategoryAssignmentTable,
    assign,
    assignment_probabilities,
    build_assignment_table,
    per_model_counts,
)
from .config import RunConfig, default_config, load_config
from .engine import (
    RunReport,
    SlotReport,
    StrategyBundle,
    omega_sweep,
    run_bundle,
    run_comparison,
    run_slot,
    score_level_diagnostic,
)
from .profiles import (
    CategoryProfile,
    LatencyCurve,
    ModelProfile,
    ScoreCurve,
    eval_expected_score,
    eval_latency,
    eval_score,
)
from .workload import Task, WorkloadSpec, empirical_category_stats, generate_slot

__version__ = "0.1.0"
