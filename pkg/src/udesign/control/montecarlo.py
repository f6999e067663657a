"""Seeded Monte Carlo robustness studies.

Trial ``i`` draws its noise from ``SeedSequence(seed, spawn_key=(i,))`` so
results do not depend on how trials are scheduled, and means are reduced
with ``math.fsum``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import _kernels
from ..qmat import ValidationError
from .noise import Fixed, MonteCarloConfig, UniformUpTo, draw_trials
from .propagate import PropagationConfig, pair_fidelity, propagate_fields
from .pulses import PulseProgram, dd_sequence

IDENTITY = np.eye(2, dtype=complex)


def _mean_se(x):
    x = np.asarray(x, dtype=float)
    mean = math.fsum(x) / x.size
    if x.size < 2:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2) / (x.size - 1)
    return mean, math.sqrt(var / x.size)


@dataclass(frozen=True)
class FidelityEstimate:
    mean: float
    stderr: float
    samples: np.ndarray = field(repr=False)

    def __iter__(self):
        return iter((self.mean, self.stderr))


def noise_averaged_fidelity(pulse: PulseProgram, target=IDENTITY, mc: MonteCarloConfig | None = None,
                            eta: float | None = None, cfg: PropagationConfig | None = None) -> FidelityEstimate:
    """Mean gate fidelity over random static noise directions.

    ``eta`` fixes the strength; otherwise ``mc.eta_mode`` is used.
    """
    mc = mc or MonteCarloConfig()
    mode = Fixed(float(eta)) if eta is not None else mc.eta_mode
    if mode is None:
        raise ValidationError("give eta or an eta_mode")
    dirs, etas = draw_trials(mc, mode)
    pairs = propagate_fields(pulse, dirs * etas[:, None], cfg)
    f = pair_fidelity(target, pairs)
    mean, se = _mean_se(f)
    return FidelityEstimate(mean, se, f)


def fidelity_sweep(pulse: PulseProgram, etas, mc: MonteCarloConfig | None = None,
                   cfg: PropagationConfig | None = None, target=IDENTITY) -> list[tuple[float, float, float]]:
    """(eta, mean F, stderr) rows; every eta reuses the same directions."""
    return [(float(e), *noise_averaged_fidelity(pulse, target, mc, float(e), cfg)) for e in etas]


def equal_time_repetitions(kinds, reps: int, tau: float | None = None, omega: float = 1.0) -> dict:
    """Repetitions per kind so all span ``reps`` cycles of the longest one.

    Counts are rounded to the nearest integer, so totals agree within one
    cycle of each sequence.
    """
    if reps < 1:
        raise ValidationError("repetitions must be >= 1")
    cycles = {k: dd_sequence(k, tau, omega).total_duration for k in kinds}
    total = reps * max(cycles.values())
    return {k: max(1, int(round(total / c))) for k, c in cycles.items()}


@dataclass(frozen=True)
class MemoryResult:
    kind: str
    repetitions: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    samples: np.ndarray = field(repr=False)
    cycle_time: float

    def rows(self):
        return list(zip(self.repetitions.tolist(), self.mean.tolist(), self.stderr.tolist()))

    def run_mean(self) -> tuple[float, float]:
        """Mean over repetitions, then over realizations, with its stderr."""
        return _mean_se(self.samples.mean(axis=1))


def memory_decay(kind, repetitions: int, mc: MonteCarloConfig | None = None,
                 cfg: PropagationConfig | None = None, tau: float | None = None,
                 omega: float = 1.0, eta_max: float = 0.05) -> MemoryResult:
    """Fidelity with the identity after r = 1..R cycles of a decoupling sequence.

    Each realization freezes one direction and one strength (uniform on
    [0, eta_max] unless ``mc.eta_mode`` says otherwise) for all cycles.
    """
    if repetitions < 1:
        raise ValidationError("repetitions must be >= 1")
    mc = mc or MonteCarloConfig(trials=100)
    mode = mc.eta_mode or UniformUpTo(eta_max * omega)
    cycle = dd_sequence(kind, tau, omega)
    dirs, etas = draw_trials(mc, mode)
    pairs = propagate_fields(cycle, dirs * etas[:, None], cfg)
    f = _kernels.powers_trace(pairs, repetitions)
    mean = np.array([_mean_se(col)[0] for col in f.T])
    se = np.array([_mean_se(col)[1] for col in f.T])
    return MemoryResult(cycle.name, np.arange(1, repetitions + 1), mean, se, f, cycle.total_duration)


def separation_sigma(a, b) -> float:
    """(mean_a - mean_b) / sqrt(se_a^2 + se_b^2)."""
    (ma, sa), (mb, sb) = a, b
    den = math.hypot(sa, sb)
    return math.inf if den == 0 else (ma - mb) / den
