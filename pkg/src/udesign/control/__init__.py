"""Pulse synthesis, noisy propagation and robustness metrics."""

from .dyson import filter_function, first_moment, fidelity_second_order, pair_rotations, rotation_integral
from .montecarlo import (
    FidelityEstimate,
    MemoryResult,
    equal_time_repetitions,
    fidelity_sweep,
    memory_decay,
    noise_averaged_fidelity,
    separation_sigma,
)
from .noise import Fixed, MonteCarloConfig, NoiseSpec, UniformUpTo, sample_noise_direction, trial_rng
from .propagate import PropagationConfig, gate_fidelity, hamiltonian_at, propagate, resolve_grid
from .pulses import (
    CompositeKind,
    Constant,
    DDKind,
    PulseProgram,
    Segment,
    URCWave,
    composite_pulse,
    count_pulses,
    dd_sequence,
    named_pulse,
    urc_pulse,
    urc_pulse_for_path,
)

__all__ = [
    "CompositeKind",
    "Constant",
    "DDKind",
    "FidelityEstimate",
    "Fixed",
    "MemoryResult",
    "MonteCarloConfig",
    "NoiseSpec",
    "PropagationConfig",
    "PulseProgram",
    "Segment",
    "URCWave",
    "UniformUpTo",
    "composite_pulse",
    "count_pulses",
    "dd_sequence",
    "equal_time_repetitions",
    "fidelity_second_order",
    "fidelity_sweep",
    "filter_function",
    "first_moment",
    "gate_fidelity",
    "hamiltonian_at",
    "memory_decay",
    "named_pulse",
    "noise_averaged_fidelity",
    "pair_rotations",
    "propagate",
    "resolve_grid",
    "rotation_integral",
    "sample_noise_direction",
    "separation_sigma",
    "trial_rng",
    "urc_pulse",
    "urc_pulse_for_path",
]
