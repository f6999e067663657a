"""Design curves on spheres, discrete spherical designs and S^3 geometry.

Every curve here is a trigonometric polynomial. A point on S^{2d-1} is
stored as d complex coordinates ``z_j(theta) = sum_k a_jk exp(i w_jk theta)``
with ``theta = 2 pi s``, and mapped to the real vector
``(Re z_1, Im z_1, Re z_2, Im z_2, ...)``. On S^3 this is the convention
``(z1, z2) = (x1 + i x2, x3 + i x4)`` used for SU(2).
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .qmat import ValidationError

TWO_PI = 2.0 * np.pi
S2 = np.sqrt(2.0)

_closed_tol = 1e-12


class CurveKind(str, enum.Enum):
    XI = "xi"
    GAMMA = "gamma"
    GAMMA_TILDE = "gamma-tilde"
    XI_PRIME = "xi-prime"
    GAMMA_PRIME = "gamma-prime"
    GAMMA_TILDE_PRIME = "gamma-tilde-prime"
    XI_PHI = "xi-phi"
    GAMMA_PHI = "gamma-phi"
    GAMMA_TILDE_PHI = "gamma-tilde-phi"
    CANONICAL_TRIG = "canonical-trig"


PHI_KINDS = {CurveKind.XI_PHI, CurveKind.GAMMA_PHI, CurveKind.GAMMA_TILDE_PHI}
ANTIPODAL_KINDS = {CurveKind.GAMMA_TILDE, CurveKind.GAMMA_TILDE_PRIME, CurveKind.GAMMA_TILDE_PHI}


@dataclass(frozen=True)
class TrigCurve:
    """Curve given by complex trig terms: ``coords[j] = ((amp, freq), ...)``."""

    coords: tuple
    name: str = "trig"

    @property
    def ambient_dim(self) -> int:
        return 2 * len(self.coords)

    @property
    def bandwidth(self) -> float:
        """Largest |frequency| in theta appearing in any coordinate."""
        return max((abs(w) for c in self.coords for _, w in c), default=0.0)

    def _complex(self, theta, deriv: bool):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros((len(self.coords),) + theta.shape, dtype=complex)
        for j, terms in enumerate(self.coords):
            for amp, w in terms:
                e = amp * np.exp(1j * w * theta)
                out[j] += 1j * w * e if deriv else e
        return out

    def points(self, s) -> np.ndarray:
        """Real coordinates, shape (..., ambient_dim)."""
        z = self._complex(TWO_PI * np.asarray(s, dtype=float), deriv=False)
        return _to_real(z)

    def velocity(self, s) -> np.ndarray:
        """d/ds of :meth:`points`, analytic."""
        z = self._complex(TWO_PI * np.asarray(s, dtype=float), deriv=True)
        return TWO_PI * _to_real(z)

    def speed(self, s) -> np.ndarray:
        return np.linalg.norm(self.velocity(s), axis=-1)


def _to_real(z):
    x = np.stack([z.real, z.imag], axis=1)  # (d, 2, ...)
    x = x.reshape((2 * z.shape[0],) + z.shape[1:])
    return np.moveaxis(x, 0, -1)


def _e(amp, w):
    return (complex(amp), float(w))


def _curve_terms(kind: CurveKind, phi: float, half_dim: int):
    p = np.exp(-1j * phi)
    if kind is CurveKind.XI:
        return ((_e(1 / S2, 1),), (_e(1 / S2, 2),))
    if kind is CurveKind.GAMMA:
        return ((_e(1 / S2, 1),), (_e(1 / S2, -3),))
    if kind is CurveKind.GAMMA_TILDE:
        return ((_e(1 / S2, 0.5),), (_e(1 / S2, -1.5),))
    if kind in (CurveKind.XI_PRIME, CurveKind.XI_PHI):
        q = p if kind is CurveKind.XI_PHI else 1.0
        # cos(t/2) e^{3it/2}, -sin(t/2) e^{3it/2} e^{-i phi}
        return ((_e(0.5, 2), _e(0.5, 1)), (_e(0.5j * q, 2), _e(-0.5j * q, 1)))
    if kind in (CurveKind.GAMMA_PRIME, CurveKind.GAMMA_PHI):
        q = p if kind is CurveKind.GAMMA_PHI else 1.0
        # cos(2t) e^{-it}, sin(2t) e^{-it} e^{-i phi}
        return ((_e(0.5, 1), _e(0.5, -3)), (_e(-0.5j * q, 1), _e(0.5j * q, -3)))
    if kind in (CurveKind.GAMMA_TILDE_PRIME, CurveKind.GAMMA_TILDE_PHI):
        q = p if kind is CurveKind.GAMMA_TILDE_PHI else 1.0
        # cos(t) e^{-it/2}, sin(t) e^{-it/2} e^{-i phi}
        return ((_e(0.5, 0.5), _e(0.5, -1.5)), (_e(-0.5j * q, 0.5), _e(0.5j * q, -1.5)))
    if kind is CurveKind.CANONICAL_TRIG:
        a = 1 / np.sqrt(half_dim)
        return tuple((_e(a, j),) for j in range(1, half_dim + 1))
    raise ValidationError(f"unknown curve kind {kind!r}")


@dataclass(frozen=True)
class CurveSpec:
    """A named curve from the catalogue.

    ``phi`` is used only by the ``*-phi`` kinds and must lie in [0, pi];
    ``half_dim`` only by ``canonical-trig`` (the curve lives on S^{2d-1}).
    """

    kind: CurveKind
    phi: float = 0.0
    half_dim: int = 2
    trig: TrigCurve = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", CurveKind(self.kind))
        if self.kind in PHI_KINDS and not (0.0 <= self.phi <= np.pi):
            raise ValidationError(f"phi must lie in [0, pi], got {self.phi}")
        if self.half_dim < 1:
            raise ValidationError("half_dim must be >= 1")
        trig = TrigCurve(_curve_terms(self.kind, self.phi, self.half_dim), name=self.kind.value)
        object.__setattr__(self, "trig", trig)
        # uniform-s sampling below relies on constant speed
        sp = trig.speed(np.linspace(0, 1, 64, endpoint=False))
        if sp.max() - sp.min() > 1e-9 * sp.max():
            raise ValidationError(f"curve {self.kind.value} is not constant speed")

    @property
    def ambient_dim(self) -> int:
        return self.trig.ambient_dim

    @property
    def closure(self) -> str:
        return "antipodal" if self.kind in ANTIPODAL_KINDS else "closed"

    def default_samples(self) -> int:
        if self.kind is CurveKind.CANONICAL_TRIG:
            return 8 * self.half_dim ** 2
        return 128


def _as_trig(curve) -> TrigCurve:
    if isinstance(curve, CurveSpec):
        return curve.trig
    if isinstance(curve, TrigCurve):
        return curve
    raise ValidationError(f"expected CurveSpec or TrigCurve, got {type(curve).__name__}")


def eval_curve(curve, s) -> np.ndarray:
    """Point(s) on the curve at path parameter ``s`` in [0, 1]."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0) or np.any(s_arr > 1):
        raise ValidationError("s must lie in [0, 1]")
    return _as_trig(curve).points(s_arr)


def arc_length(curve) -> float:
    """Arc length by adaptive quadrature of the analytic speed."""
    trig = _as_trig(curve)
    # split at a few knots so quad sees each oscillation
    pieces = max(4, int(np.ceil(trig.bandwidth)) * 2)
    knots = np.linspace(0.0, 1.0, pieces + 1)
    total = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        val, _ = integrate.quad(lambda s: float(trig.speed(s)), a, b, epsabs=1e-14, epsrel=1e-13, limit=200)
        total += val
    return total


@dataclass(frozen=True)
class Moments:
    m1: np.ndarray
    m2: np.ndarray
    num_samples: int
    undersampled: bool


def curve_moments(curve, num_samples: int | None = None) -> Moments:
    """Arc-length weighted first and second moments by uniform-s Riemann sums.

    For constant-speed trig curves the sum is exact once ``num_samples``
    exceeds twice the curve bandwidth. Fewer samples set ``undersampled``.
    """
    trig = _as_trig(curve)
    if num_samples is None:
        num_samples = curve.default_samples() if isinstance(curve, CurveSpec) else 128
    s = np.arange(num_samples) / num_samples
    x = trig.points(s)
    w = trig.speed(s)
    if w.sum() <= 0:
        w = np.ones_like(w)
    w = w / w.sum()
    m1 = w @ x
    m2 = np.einsum("k,ki,kj->ij", w, x, x)
    # quadratic integrands carry twice the bandwidth
    under = num_samples <= 2 * trig.bandwidth
    if under:
        warnings.warn(f"{num_samples} samples do not exceed twice the bandwidth {trig.bandwidth}", stacklevel=2)
    return Moments(m1, m2, num_samples, under)


def curve_third_moment(curve, num_samples: int = 128) -> np.ndarray:
    """Arc-length weighted E[x_i x_j x_k]; zero on a spherical 3-design."""
    trig = _as_trig(curve)
    s = np.arange(num_samples) / num_samples
    x = trig.points(s)
    w = trig.speed(s)
    w = w / w.sum()
    return np.einsum("n,ni,nj,nk->ijk", w, x, x, x)


@dataclass(frozen=True)
class DesignCheck:
    passed: bool
    first_moment_residual: float
    second_moment_residual: float | None

    def __bool__(self):
        return self.passed


def is_spherical_design(points_or_curve, t: int, tol: float = 1e-9, num_samples: int | None = None) -> DesignCheck:
    """Moment test for spherical 1- and 2-designs.

    A point set passes at strength 1 when its centroid vanishes, and at
    strength 2 when additionally the mean of x x^T equals I/m (m the
    ambient dimension). Curves are tested with their arc-length measure.
    """
    if t not in (1, 2):
        raise ValidationError("t must be 1 or 2")
    if isinstance(points_or_curve, (CurveSpec, TrigCurve)):
        mom = curve_moments(points_or_curve, num_samples)
        m1, m2 = mom.m1, mom.m2
    else:
        x = np.atleast_2d(np.asarray(points_or_curve, dtype=float))
        m1 = x.mean(axis=0)
        m2 = x.T @ x / x.shape[0]
    r1 = float(np.linalg.norm(m1))
    r2 = float(np.max(np.abs(m2 - np.eye(m2.shape[0]) / m2.shape[0]))) if t == 2 else None
    ok = r1 <= tol and (r2 is None or r2 <= tol)
    return DesignCheck(ok, r1, r2)


@dataclass(frozen=True)
class DiscreteDesign:
    points: np.ndarray
    strength: int


def simplex_vertices(ambient_dim: int) -> DiscreteDesign:
    """Regular simplex with ``ambient_dim + 1`` vertices on S^{ambient_dim-1}.

    Vertices are the standard basis of R^{m+1} projected onto the hyperplane
    orthogonal to (1, ..., 1) and written in a Helmert orthonormal basis.
    """
    m = int(ambient_dim)
    if m < 2:
        raise ValidationError("ambient_dim must be >= 2")
    n = m + 1
    # Helmert rows: orthonormal basis of the sum-zero hyperplane
    basis = np.zeros((m, n))
    for k in range(1, n):
        basis[k - 1, :k] = 1.0
        basis[k - 1, k] = -k
        basis[k - 1] /= np.sqrt(k * (k + 1))
    centred = np.eye(n) - 1.0 / n
    pts = centred @ basis.T
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    pts.flags.writeable = False
    return DiscreteDesign(pts, 2)


def regular_polygon(n: int, phase: float = 0.0) -> np.ndarray:
    a = phase + TWO_PI * np.arange(n) / n
    return np.stack([np.cos(a), np.sin(a)], axis=1)


# ---------------------------------------------------------------------------
# S^3 geometry
# ---------------------------------------------------------------------------

def _unit(p, dim, tol=1e-12):
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != dim:
        raise ValidationError(f"expected points in R^{dim}, got shape {p.shape}")
    if np.any(np.abs(np.linalg.norm(p, axis=-1) - 1) > tol):
        raise ValidationError("point is not on the unit sphere")
    return p


def hopf_map(p) -> np.ndarray:
    """S^3 -> S^2, (z1, z2) -> (|z1|^2 - |z2|^2, Re 2 z1 conj z2, Im 2 z1 conj z2)."""
    x = _unit(p, 4, tol=1e-10)
    z1 = x[..., 0] + 1j * x[..., 1]
    z2 = x[..., 2] + 1j * x[..., 3]
    w = 2 * z1 * np.conj(z2)
    return np.stack([abs(z1) ** 2 - abs(z2) ** 2, w.real, w.imag], axis=-1)


def clifford_torus(theta, phi) -> np.ndarray:
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    return np.stack([np.cos(theta), np.sin(theta), np.cos(phi), np.sin(phi)], axis=-1) / S2


def stereographic_project(p) -> np.ndarray:
    """Projection from the south pole (0, 0, 0, -1) onto x4 = 0."""
    x = _unit(p, 4, tol=1e-10)
    den = 1.0 + x[..., 3]
    if np.any(den <= 1e-15):
        raise ValidationError("cannot project the south pole (0, 0, 0, -1)")
    return x[..., :3] / den[..., None]


ROTATION_R = np.array(
    [[1, 0, 1, 0], [0, 1, 0, 1], [0, 1, 0, -1], [-1, 0, 1, 0]], dtype=float
) / S2
INVERSION_T = np.diag([1.0, 1.0, 1.0, -1.0])
ROTATION_R.flags.writeable = False
INVERSION_T.flags.writeable = False


def rotation_q(phi: float) -> np.ndarray:
    """Orthogonal map sending (cos(3t/2), sin(3t/2)) e^{-it/2} onto xi_phi.

    Permutes x2 <-> x3 and applies the phase exp(-i phi) to z2. It is
    orthogonal with determinant -1.
    """
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, c, 0, s], [0, -s, 0, c]], dtype=float)


def fixed_rotation(which: str, phi: float = 0.0) -> np.ndarray:
    w = which.upper()
    if w == "R":
        return ROTATION_R
    if w == "T":
        return INVERSION_T
    if w == "Q":
        return rotation_q(phi)
    raise ValidationError(f"unknown fixed rotation {which!r}")


def apply_fixed_rotation(which: str, p, phi: float = 0.0) -> np.ndarray:
    x = _unit(p, 4, tol=1e-10)
    return x @ fixed_rotation(which, phi).T
