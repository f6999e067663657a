"""Pulse programs: URC pulses, composite pulses and decoupling sequences.

Times are in units of 1/Omega and fields in units of Omega when
``omega=1`` (the default everywhere). The control Hamiltonian is
``H(t) = u(t) . sigma / 2``.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..qmat import ValidationError, unit_axis
from ..upath import OpenTarget, ReparamPL, TwoAxis

log = logging.getLogger(__name__)

SQRT5 = math.sqrt(5.0)
AMPLITUDE_TOL = 1e-9


class Constant:
    """Constant field ``u``."""

    is_constant = True

    def __init__(self, u):
        u = np.asarray(u, dtype=float)
        if u.shape != (3,) or not np.all(np.isfinite(u)):
            raise ValidationError("constant field must be a finite 3-vector")
        self.u = u
        self.u.flags.writeable = False

    def field(self, t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(self.u, t.shape + (3,)).copy()

    def describe(self):
        return {"type": "constant", "u": self.u.tolist()}


class URCWave:
    """u = rate [n1 + 2 cos(theta) n2 + 2 sin(theta) n1 x n2], theta = theta0 + rate t."""

    is_constant = False

    def __init__(self, n1, n2, theta0: float, rate: float):
        self.n1 = unit_axis(n1)
        self.n2 = unit_axis(n2)
        if abs(float(self.n1 @ self.n2)) > 1e-12:
            raise ValidationError("URC axes must be perpendicular")
        self.n3 = np.cross(self.n1, self.n2)
        self.theta0 = float(theta0)
        self.rate = float(rate)

    def theta(self, t):
        return self.theta0 + self.rate * np.asarray(t, dtype=float)

    def field(self, t):
        th = self.theta(t)[..., None]
        return self.rate * (self.n1 + 2 * np.cos(th) * self.n2 + 2 * np.sin(th) * self.n3)

    def describe(self):
        return {"type": "urc", "n1": self.n1.tolist(), "n2": self.n2.tolist(),
                "theta0": self.theta0, "rate": self.rate}


@dataclass(frozen=True)
class Segment:
    duration: float
    waveform: object

    def __post_init__(self):
        if not self.duration > 0:
            raise ValidationError("segment durations must be positive")

    def rotation_angle(self, probes: int = 64) -> float:
        """Approximate integral of |u| over the segment."""
        if self.waveform.is_constant:
            return float(np.linalg.norm(self.waveform.u)) * self.duration
        t = (np.arange(probes) + 0.5) / probes * self.duration
        return float(np.linalg.norm(self.waveform.field(t), axis=-1).mean() * self.duration)


@dataclass(frozen=True)
class PulseProgram:
    """Ordered segments with Rabi bound ``omega_max``."""

    segments: tuple
    omega_max: float = 1.0
    name: str = "pulse"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise ValidationError("a pulse needs at least one segment")
        if not self.omega_max > 0:
            raise ValidationError("omega_max must be positive")
        for seg in self.segments:
            t = np.linspace(0, seg.duration, 257)
            amp = np.linalg.norm(seg.waveform.field(t), axis=-1).max()
            if amp > self.omega_max + AMPLITUDE_TOL:
                raise ValidationError(f"|u| = {amp:.6g} exceeds the Rabi bound {self.omega_max}")

    @property
    def total_duration(self) -> float:
        return math.fsum(s.duration for s in self.segments)

    @property
    def boundaries(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum([s.duration for s in self.segments])])

    def locate(self, t: float):
        """Segment index and local time for absolute ``t``."""
        if t < 0 or t > self.total_duration + 1e-12:
            raise ValidationError("t outside [0, T]")
        b = self.boundaries
        i = int(min(np.searchsorted(b, t, side="right") - 1, len(self.segments) - 1))
        return i, t - b[i]

    def field(self, t: float) -> np.ndarray:
        i, tl = self.locate(t)
        return self.segments[i].waveform.field(tl)

    def then(self, other: "PulseProgram", name=None) -> "PulseProgram":
        return PulseProgram(self.segments + other.segments, max(self.omega_max, other.omega_max),
                            name or f"{self.name}+{other.name}")

    def repeat(self, k: int, name=None) -> "PulseProgram":
        if k < 1:
            raise ValidationError("repetitions must be >= 1")
        return PulseProgram(self.segments * k, self.omega_max, name or f"{self.name}x{k}", dict(self.meta))

    def describe(self) -> dict:
        return {
            "name": self.name,
            "omega_max": self.omega_max,
            "total_duration": self.total_duration,
            "segments": [{"duration": s.duration, **s.waveform.describe()} for s in self.segments],
        }


# ---------------------------------------------------------------------------
# URC
# ---------------------------------------------------------------------------

def urc_pulse(n1="z", n2="y", omega: float = 1.0, theta_profile: ReparamPL | None = None,
              rate: float | None = None) -> PulseProgram:
    """Pulse whose noise-free evolution is R_{n1}(theta) R_{n2}(2 theta).

    With no profile theta runs linearly from 0 to 2 pi at ``rate``
    (default the largest allowed, Omega/sqrt(5)). A :class:`ReparamPL`
    profile theta(s) is traversed in time T chosen so that its steepest
    piece runs at the bound.
    """
    bound = omega / SQRT5
    if theta_profile is None:
        rate = bound if rate is None else float(rate)
        if abs(rate) > bound * (1 + 1e-12) or rate == 0:
            raise ValidationError(f"|d theta/dt| must lie in (0, Omega/sqrt(5)], got {rate}")
        seg = Segment(2 * np.pi / abs(rate), URCWave(n1, n2, 0.0, rate))
        return PulseProgram((seg,), omega, "urc")
    k = np.asarray(theta_profile.knots)
    slopes = np.diff(k[:, 1]) / np.diff(k[:, 0])
    total = float(np.max(np.abs(slopes))) / bound
    segs = []
    for (s0, th0), (s1, _), sl in zip(k[:-1], k[1:], slopes):
        segs.append(Segment((s1 - s0) * total, URCWave(n1, n2, th0, sl / total)))
    return PulseProgram(tuple(segs), omega, "urc-open")


def urc_pulse_for_path(path, omega: float = 1.0) -> PulseProgram:
    """URC pulse driving a TwoAxis or OpenTarget path."""
    if isinstance(path, TwoAxis):
        return urc_pulse(path.n1, path.n2, omega)
    if isinstance(path, OpenTarget):
        # conjugation by W rotates both axes by its adjoint action
        return urc_pulse(path.n1, path.n2, omega, path.reparam)
    raise ValidationError(f"no URC pulse for path kind {path.kind!r}")


# ---------------------------------------------------------------------------
# composite pulses
# ---------------------------------------------------------------------------

class CompositeKind(str, enum.Enum):
    SQUARE = "square"
    CORPSE = "corpse"
    BB1 = "bb1"


# (rotation angle, phase) of each elementary gate, phases as printed
COMPOSITE_TABLE = {
    CompositeKind.SQUARE: ((2 * np.pi, np.pi / 2),),
    CompositeKind.CORPSE: ((3 * np.pi, np.pi / 2), (2 * np.pi, 3 * np.pi / 2), (np.pi, np.pi / 2)),
    CompositeKind.BB1: ((np.pi, 7 * np.pi / 6), (2 * np.pi, 5 * np.pi / 2),
                        (np.pi, 7 * np.pi / 6), (2 * np.pi, np.pi / 2)),
}


def rect_rotation(angle: float, phase: float, omega: float = 1.0) -> Segment:
    """In-plane drive at amplitude Omega, axis (cos phase, sin phase, 0)."""
    return Segment(angle / omega, Constant(omega * np.array([np.cos(phase), np.sin(phase), 0.0])))


def composite_pulse(kind, omega: float = 1.0) -> PulseProgram:
    kind = CompositeKind(str(kind).lower())
    segs = []
    for angle, phase in COMPOSITE_TABLE[kind]:
        wrapped = math.fmod(phase, 2 * np.pi)
        if wrapped != phase:
            log.info("%s phase %.6g taken modulo 2 pi -> %.6g", kind.value, phase, wrapped)
        segs.append(rect_rotation(angle, wrapped, omega))
    return PulseProgram(tuple(segs), omega, kind.value)


# ---------------------------------------------------------------------------
# dynamical decoupling
# ---------------------------------------------------------------------------

class DDKind(str, enum.Enum):
    CPMG = "cpmg"
    XY4 = "xy4"
    URC_REP = "urc"


def free(duration: float) -> Segment:
    return Segment(duration, Constant(np.zeros(3)))


def dd_sequence(kind, tau: float | None = None, omega: float = 1.0, repetitions: int = 1) -> PulseProgram:
    """One cycle (or ``repetitions`` cycles) of a decoupling sequence.

    CPMG:  f_tau Y f_2tau Y f_tau
    XY4:   f_tau Y f_2tau X f_2tau Y f_2tau X f_tau
    URC:   the closed URC pulse

    pi pulses are rectangles of length pi/Omega. ``tau`` defaults to 2 pi/Omega.
    """
    kind = DDKind(str(kind).lower().replace("_rep", ""))
    tau = 2 * np.pi / omega if tau is None else float(tau)
    if tau < 0:
        raise ValidationError("tau must be >= 0")

    def f(k):
        return [free(k * tau)] if k * tau > 0 else []

    x = rect_rotation(np.pi, 0.0, omega)
    y = rect_rotation(np.pi, np.pi / 2, omega)
    if kind is DDKind.CPMG:
        segs = f(1) + [y] + f(2) + [y] + f(1)
    elif kind is DDKind.XY4:
        segs = f(1) + [y] + f(2) + [x] + f(2) + [y] + f(2) + [x] + f(1)
    else:
        segs = list(urc_pulse(omega=omega).segments)
    prog = PulseProgram(tuple(segs), omega, kind.value, {"tau": tau})
    return prog.repeat(repetitions, kind.value) if repetitions > 1 else prog


def count_pulses(prog: PulseProgram) -> int:
    """Number of nonzero constant-field segments."""
    return sum(1 for s in prog.segments if s.waveform.is_constant and np.any(s.waveform.u != 0))


def named_pulse(name: str, omega: float = 1.0) -> PulseProgram:
    key = name.strip().lower()
    if key == "urc":
        return urc_pulse(omega=omega)
    if key in {k.value for k in CompositeKind}:
        return composite_pulse(key, omega)
    if key in {"cpmg", "xy4"}:
        return dd_sequence(key, omega=omega)
    raise ValidationError(f"unknown pulse {name!r}")
