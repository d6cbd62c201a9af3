"""Named randomness streams.

Every random draw in the simulator is keyed by (seed, stream tag, entity ids)
so that changing one stage (say, the assignment policy) never perturbs the
draws of another (the workload realization, the per-task generation noise).
This is what makes cross-strategy comparisons paired.
"""

import numpy as np

WORKLOAD_STREAM = 0
ASSIGN_STREAM = 1
NOISE_STREAM = 2
SA_STREAM = 3


def stream_rng(*key: int) -> np.random.Generator:
    """A fresh generator keyed by a tuple of non-negative integers."""
    return np.random.default_rng(list(key))


def noise_draw(seed: int, task_id: int, model_id: int, steps: int) -> float:
    """Standard-normal draw keyed to (task, model, steps).

    Keyed this way, two strategies that send the same task to the same model
    with the same step count see the identical realized score.
    """
    rng = stream_rng(seed, NOISE_STREAM, task_id, model_id, steps)
    return float(rng.standard_normal())


def child_seed(*key: int) -> int:
    """Derive a deterministic 32-bit child seed from a key tuple."""
    return int(np.random.SeedSequence(list(key)).generate_state(1)[0])
