"""Static noise descriptions and seeded Monte Carlo streams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..qmat import ValidationError, pauli_dot, unit_axis


@dataclass(frozen=True)
class NoiseSpec:
    """Static perturbation V = (eta/2) v . sigma."""

    direction: np.ndarray = (0.0, 0.0, 1.0)
    strength: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "direction", unit_axis(self.direction))
        if not self.strength >= 0:
            raise ValidationError("noise strength must be >= 0")

    @property
    def field(self) -> np.ndarray:
        """Field offset added to u, so that H = (u + eta v) . sigma / 2."""
        return self.strength * self.direction

    def operator(self) -> np.ndarray:
        return 0.5 * self.strength * pauli_dot(self.direction)


NO_NOISE = NoiseSpec()


@dataclass(frozen=True)
class Fixed:
    eta: float

    def draw(self, rng) -> float:
        return float(self.eta)


@dataclass(frozen=True)
class UniformUpTo:
    eta_max: float

    def draw(self, rng) -> float:
        return float(rng.uniform(0.0, self.eta_max))


@dataclass(frozen=True)
class MonteCarloConfig:
    trials: int = 1000
    seed: int = 7
    eta_mode: object = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValidationError("seed must be a 64-bit unsigned integer")


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for trial ``index``; independent of execution order."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def sample_noise_direction(rng: np.random.Generator) -> np.ndarray:
    """Uniform unit vector by normalising a 3-D standard normal draw."""
    while True:
        g = rng.standard_normal(3)
        n = np.linalg.norm(g)
        if n > 1e-300:
            return g / n


def draw_trials(mc: MonteCarloConfig, eta_mode=None):
    """Directions (trials, 3) and strengths (trials,) for all trials."""
    mode = eta_mode if eta_mode is not None else mc.eta_mode
    if mode is None:
        raise ValidationError("no eta mode given")
    dirs = np.empty((mc.trials, 3))
    etas = np.empty(mc.trials)
    for i in range(mc.trials):
        rng = trial_rng(mc.seed, i)
        dirs[i] = sample_noise_direction(rng)
        etas[i] = mode.draw(rng)
    return dirs, etas
