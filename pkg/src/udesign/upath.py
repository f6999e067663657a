"""Continuous unitary 1-design paths.

A path maps ``s`` in [0, 1] to a unitary, with ``theta = 2 pi s`` for the
closed families. All paths are immutable and evaluate vectorised through
:meth:`UnitaryPath.eval_many`, which returns an ``(n, d, d)`` array.

Families
--------
TwoAxis          R_{n1}(theta) R_{n2}(2 theta)
FixedAngleAxis   R_n(theta) R_{n_perp(2 theta)}(pi/2)
CurvePath        an S^3 curve read as SU(2) matrices
OpenTarget       a two-axis path conjugated and reparameterised to end at a target
TensorQubits     per-qubit two-axis factors with multipliers 4**(m-1)
FiberBundle      SU(d) paths built inductively over S^{2d-1}
HeisenbergWeyl   a closed path through the HW group of a qudit
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy import optimize

from . import sphere
from ._kernels import pairs_to_matrices
from .qmat import (
    DRIFT_TOL,
    ValidationError,
    adjoint_rotation,
    as_unitary,
    overlap,
    su2_rotation,
    unit_axis,
)

log = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
PERP_TOL = 1e-12


# ---------------------------------------------------------------------------
# SU(2) <-> S^3
# ---------------------------------------------------------------------------

def su2_from_s3(p) -> np.ndarray:
    """(x1, x2, x3, x4) -> [[x1 + i x2, x3 + i x4], [-x3 + i x4, x1 - i x2]]."""
    x = np.asarray(p, dtype=float)
    if x.shape[-1] != 4:
        raise ValidationError("expected a point in R^4")
    if np.any(np.abs(np.linalg.norm(x, axis=-1) - 1) > 1e-12):
        raise ValidationError("point is not on S^3")
    pairs = np.stack([x[..., 0] + 1j * x[..., 1], x[..., 2] + 1j * x[..., 3]], axis=-1)
    return pairs_to_matrices(pairs)


def s3_from_su2(u) -> np.ndarray:
    u = as_unitary(u, special=True)
    if u.shape != (2, 2):
        raise ValidationError("expected a 2x2 special unitary")
    return np.array([u[0, 0].real, u[0, 0].imag, u[0, 1].real, u[0, 1].imag])


def _rot_pairs(axis, angle):
    """Pairs of R_n(angle) for vectorised ``angle`` and fixed or per-angle axis."""
    n = np.asarray(axis, dtype=float)
    c = np.cos(angle / 2)
    s = np.sin(angle / 2)
    out = np.empty(np.shape(angle) + (2,), dtype=complex)
    out[..., 0] = c - 1j * s * n[..., 2]
    out[..., 1] = -s * n[..., 1] - 1j * s * n[..., 0]
    return out


def _mul_pairs(a, b):
    out = np.empty(np.broadcast(a[..., 0], b[..., 0]).shape + (2,), dtype=complex)
    out[..., 0] = a[..., 0] * b[..., 0] - a[..., 1] * np.conj(b[..., 1])
    out[..., 1] = a[..., 0] * b[..., 1] + a[..., 1] * np.conj(b[..., 0])
    return out


def _perp(n1, n2):
    n1 = unit_axis(n1)
    n2 = unit_axis(n2)
    if abs(float(n1 @ n2)) > PERP_TOL:
        raise ValidationError(f"axes must be perpendicular (n1.n2 = {float(n1 @ n2):.3e})")
    return n1, n2


def _axis_list(v):
    return [float(x) for x in v]


# ---------------------------------------------------------------------------
# base class
# ---------------------------------------------------------------------------

class UnitaryPath:
    """Interface shared by all path families."""

    kind: str = "abstract"
    dim: int = 2
    period_note: str = "closed"
    #: smallest equiangular sample count used by the design checks
    min_samples: int = 8

    def eval_theta(self, theta) -> np.ndarray:
        raise NotImplementedError

    def eval_many(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(s < 0) or np.any(s > 1):
            raise ValidationError("s must lie in [0, 1]")
        return self.eval_theta(TWO_PI * s)

    def eval(self, s: float) -> np.ndarray:
        return self.eval_many([s])[0]

    def parameters(self) -> dict:
        return {}

    def to_dict(self) -> dict:
        return {"kind": self.kind, "dim": self.dim, "parameters": self.parameters()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def __repr__(self):
        return f"{type(self).__name__}({self.parameters()})"


def sample_points(path: UnitaryPath, n: int) -> np.ndarray:
    """Equiangular parameters: k/n for k = 0..n-1, or k = 1..n on open paths."""
    if n < 1:
        raise ValidationError("need at least one sample")
    k = np.arange(1, n + 1) if path.period_note == "open" else np.arange(n)
    return k / n


def sample_path(path: UnitaryPath, n: int) -> np.ndarray:
    return path.eval_many(sample_points(path, n))


# ---------------------------------------------------------------------------
# SU(2) families
# ---------------------------------------------------------------------------

class TwoAxis(UnitaryPath):
    """U(theta) = R_{n1}(theta) R_{n2}(2 theta), n1 perpendicular to n2.

    U(2 pi) = -I, so the path closes up to a global phase.
    """

    kind = "two-axis"
    period_note = "closed-up-to-phase"
    min_samples = 8

    def __init__(self, n1="z", n2="y"):
        self.n1, self.n2 = _perp(n1, n2)

    def eval_theta(self, theta):
        theta = np.asarray(theta, dtype=float)
        p = _mul_pairs(_rot_pairs(self.n1, theta), _rot_pairs(self.n2, 2 * theta))
        return pairs_to_matrices(p)

    def parameters(self):
        return {"n1": _axis_list(self.n1), "n2": _axis_list(self.n2)}


class FixedAngleAxis(UnitaryPath):
    """U(theta) = R_n(theta) R_{m(2 theta)}(pi/2).

    ``m(a) = cos(a) n_perp + twist sin(a) (n x n_perp)`` turns about ``n``;
    ``twist=-1`` turns the other way. Both handedness choices are designs.
    The path is based at R_{n_perp}(pi/2) rather than the identity.
    """

    kind = "fixed-angle-axis"
    period_note = "closed-up-to-phase"
    min_samples = 8

    def __init__(self, n="z", n_perp="x", twist: int = 1):
        self.n, self.n_perp = _perp(n, n_perp)
        if twist not in (1, -1):
            raise ValidationError("twist must be +1 or -1")
        self.twist = int(twist)

    def moving_axis(self, angle):
        angle = np.asarray(angle, dtype=float)[..., None]
        return np.cos(angle) * self.n_perp + self.twist * np.sin(angle) * np.cross(self.n, self.n_perp)

    def eval_theta(self, theta):
        theta = np.asarray(theta, dtype=float)
        m = self.moving_axis(2 * theta)
        p = _mul_pairs(_rot_pairs(self.n, theta), _rot_pairs(m, np.full(theta.shape, np.pi / 2)))
        return pairs_to_matrices(p)

    def parameters(self):
        return {"n": _axis_list(self.n), "n_perp": _axis_list(self.n_perp), "twist": self.twist}


class CurvePath(UnitaryPath):
    """An S^3 design curve read as a path in SU(2)."""

    kind = "curve"
    min_samples = 8

    def __init__(self, curve: sphere.CurveSpec):
        if not isinstance(curve, sphere.CurveSpec):
            curve = sphere.CurveSpec(curve)
        if curve.ambient_dim != 4:
            raise ValidationError("only S^3 curves define SU(2) paths")
        self.curve = curve
        self.period_note = "closed" if curve.closure == "closed" else "closed-up-to-phase"

    def eval_theta(self, theta):
        x = self.curve.trig.points(np.asarray(theta, dtype=float) / TWO_PI)
        return su2_from_s3(x)

    def parameters(self):
        return {"curve": self.curve.kind.value, "phi": self.curve.phi}


# ---------------------------------------------------------------------------
# open paths
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReparamPL:
    """Continuous piecewise-linear theta(s) through ``knots`` (s, theta)."""

    knots: tuple

    def __post_init__(self):
        k = np.asarray(self.knots, dtype=float)
        if k.ndim != 2 or k.shape[1] != 2 or k.shape[0] < 2:
            raise ValidationError("knots must be a list of (s, theta) pairs")
        if abs(k[0, 0]) > 0 or abs(k[-1, 0] - 1) > 0 or np.any(np.diff(k[:, 0]) <= 0):
            raise ValidationError("knot s values must increase strictly from 0 to 1")

    @classmethod
    def three_segment(cls, s_star: float) -> "ReparamPL":
        """Double speed on [0, s*/2] and [1 - s*/2, 1], single speed between."""
        if not 0 < s_star <= 1:
            raise ValidationError("s_star must lie in (0, 1]")
        a = s_star / 2
        knots = [(0.0, 0.0), (a, TWO_PI * s_star)]
        if 1 - a > a:
            knots.append((1 - a, TWO_PI))
        knots.append((1.0, TWO_PI * (1 + s_star)))
        return cls(tuple(knots))

    def __call__(self, s):
        k = np.asarray(self.knots)
        return np.interp(np.asarray(s, dtype=float), k[:, 0], k[:, 1])

    def rate(self, s):
        """d theta / d s (right derivative at knots)."""
        k = np.asarray(self.knots)
        slopes = np.diff(k[:, 1]) / np.diff(k[:, 0])
        idx = np.clip(np.searchsorted(k[:, 0], np.asarray(s, dtype=float), side="right") - 1, 0, len(slopes) - 1)
        return slopes[idx]


def _sorted_eig(u):
    w, v = np.linalg.eig(u)
    order = np.argsort(np.angle(w))
    w, v = w[order], v[:, order]
    # unit columns with the largest-magnitude entry real positive
    v = v / np.linalg.norm(v, axis=0)
    for j in range(v.shape[1]):
        i = np.argmax(np.abs(v[:, j]))
        v[:, j] *= np.exp(-1j * np.angle(v[i, j]))
    return w, v


def conjugator(source, target) -> np.ndarray:
    """Special unitary W with W source W^dag proportional to target.

    Both must share their spectrum up to a global phase. Eigenvalues are
    sorted by phase and the eigenvector columns matched in that order.
    """
    source = np.asarray(source, dtype=complex)
    target = np.asarray(target, dtype=complex)
    # remove the relative phase so the spectra coincide
    tr_s, tr_t = np.trace(source), np.trace(target)
    phase = 1.0
    if abs(tr_s) > 1e-12 and abs(tr_t) > 1e-12:
        phase = (tr_s / abs(tr_s)) / (tr_t / abs(tr_t))
    ws, vs = _sorted_eig(source)
    wt, vt = _sorted_eig(target * phase)
    if np.max(np.abs(ws - wt)) > 1e-8:
        raise ValidationError("operators are not conjugate up to phase")
    # Gram-Schmidt guards against nearly degenerate eigenvectors
    vs, _ = np.linalg.qr(vs)
    vt, _ = np.linalg.qr(vt)
    w = vt @ vs.conj().T
    det = np.linalg.det(w)
    return w * det ** (-1.0 / w.shape[0])


def frame_metric(u, v) -> float:
    """f(U, V) = |Tr(U V^dag)| / 2."""
    return overlap(v, u) / 2.0


def _find_theta_star(base: TwoAxis, target, cells: int = 256):
    """Roots of Re Tr U(theta)/2 = +-|Tr target|/2 on (0, 2 pi]."""
    a = abs(np.trace(target)) / 2
    grid = np.linspace(0, TWO_PI, cells + 1)

    def h(t, sign):
        return float(base.eval_theta(np.array([t]))[0, 0, 0].real) - sign * a

    roots = []
    for sign in (1.0, -1.0):
        vals = np.array([h(t, sign) for t in grid])
        for i in range(cells):
            lo, hi = grid[i], grid[i + 1]
            if vals[i] == 0.0 and i > 0:
                roots.append(lo)
            elif vals[i] * vals[i + 1] < 0:
                roots.append(optimize.brentq(h, lo, hi, args=(sign,), xtol=1e-14, rtol=4 * np.finfo(float).eps))
        if vals[-1] == 0.0:
            roots.append(grid[-1])
    return sorted(r for r in roots if r > 1e-12)


class OpenTarget(UnitaryPath):
    """Open path from I to a target built from a closed two-axis path.

    ``eval(s) = W U_base(theta(s)) W^dag`` with the three-segment
    reparameterisation. It starts at I and ends at the target up to a
    global phase.
    """

    kind = "open"
    period_note = "open"
    min_samples = 8

    def __init__(self, base: TwoAxis, target, s_star: float, conj: np.ndarray):
        self.base = base
        self.target = as_unitary(target)
        self.s_star = float(s_star)
        self.conjugator = np.array(conj, dtype=complex)
        self.reparam = ReparamPL.three_segment(self.s_star)
        self.n1 = adjoint_rotation(self.conjugator) @ base.n1
        self.n2 = adjoint_rotation(self.conjugator) @ base.n2

    def eval_many(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(s < 0) or np.any(s > 1):
            raise ValidationError("s must lie in [0, 1]")
        u = self.base.eval_theta(self.reparam(s))
        w = self.conjugator
        return w @ u @ w.conj().T

    def eval_theta(self, theta):
        return self.eval_many(np.asarray(theta) / TWO_PI)

    def parameters(self):
        t = self.target
        return {
            "base": self.base.to_dict(),
            "target": {"re": t.real.tolist(), "im": t.imag.tolist()},
            "s_star": self.s_star,
        }


def build_open_path(base: TwoAxis, target) -> UnitaryPath:
    """Open 1-design-convergent path from I to ``target``.

    Returns ``base`` unchanged when the target is proportional to I.
    """
    if not isinstance(base, TwoAxis):
        raise ValidationError("base must be a TwoAxis path")
    target = as_unitary(target, special=True, tol=1e-10)
    if target.shape != (2, 2):
        raise ValidationError("target must be 2x2")
    if overlap(target, np.eye(2)) > 2 - 1e-12:
        return base
    roots = _find_theta_star(base, target)
    if not roots:
        raise ValidationError("no theta* found for target")  # pragma: no cover
    theta_star = roots[0]
    for r in roots:
        if overlap(base.eval_theta(np.array([r]))[0], target) > 2 - 1e-9:
            theta_star = r
            break
    u_star = base.eval_theta(np.array([theta_star]))[0]
    w = conjugator(u_star, target)
    # degenerate spectra are excluded above, so this always holds
    if overlap(w @ u_star @ w.conj().T, target) < 2 - 1e-8:
        raise ValidationError("conjugator failed to reproduce the target")  # pragma: no cover
    log.debug("open path: theta* = %.15g, f closed form |cos(t/2) cos(t)| = %.15g",
              theta_star, abs(np.cos(theta_star / 2) * np.cos(theta_star)))
    return OpenTarget(base, target, theta_star / TWO_PI, w)


# ---------------------------------------------------------------------------
# multi-qubit
# ---------------------------------------------------------------------------

class TensorQubits(UnitaryPath):
    """Tensor product of two-axis factors, qubit m (1-based, leftmost first)
    running at frequency ``4**(m-1)``."""

    kind = "tensor"
    period_note = "closed-up-to-phase"

    def __init__(self, axis_pairs=(("z", "y"), ("z", "y"))):
        if len(axis_pairs) < 1:
            raise ValidationError("need at least one qubit")
        self.factors = tuple(TwoAxis(a, b) for a, b in axis_pairs)
        self.multipliers = tuple(4 ** m for m in range(len(self.factors)))
        self.dim = 2 ** len(self.factors)
        self.min_samples = 4 ** len(self.factors)

    def eval_theta(self, theta):
        theta = np.asarray(theta, dtype=float)
        mats = [f.eval_theta(k * theta) for f, k in zip(self.factors, self.multipliers)]
        return reduce(lambda a, b: np.einsum("nij,nkl->nikjl", a, b).reshape(
            a.shape[0], a.shape[1] * b.shape[1], a.shape[2] * b.shape[2]), mats)

    def parameters(self):
        return {"axis_pairs": [[_axis_list(f.n1), _axis_list(f.n2)] for f in self.factors]}


# ---------------------------------------------------------------------------
# SU(d) fiber bundle
# ---------------------------------------------------------------------------

def fiber_coset_representative(c) -> np.ndarray:
    """Special unitary with first row ``c``.

    d = 2 uses [[c1, c2], [-conj c2, conj c1]]. For d >= 3 the last row is
    the Gram-Schmidt completion of e_1, (r, -conj(c1) c_{2:}/r) with
    r = sqrt(1 - |c1|^2), and the middle rows are built recursively from
    the unit vector c_{2:}/r. The chart needs |c_d| > 0.
    """
    c = np.asarray(c, dtype=complex)
    if c.ndim != 1 or c.size < 2:
        raise ValidationError("c must be a complex vector of length >= 2")
    if abs(np.linalg.norm(c) - 1) > 1e-12:
        raise ValidationError("c must be a unit vector")
    if abs(c[-1]) <= 1e-14:
        raise ValidationError("chart boundary: |c_d| must be > 0")
    return _coset(c)


def _coset(c):
    d = c.size
    if d == 2:
        return np.array([[c[0], c[1]], [-np.conj(c[1]), np.conj(c[0])]])
    r = math.sqrt(max(0.0, 1.0 - abs(c[0]) ** 2))
    ch = c[1:] / r
    m = np.zeros((d, d), dtype=complex)
    m[0] = c
    m[-1, 0] = r
    m[-1, 1:] = -np.conj(c[0]) * ch
    inner = _coset(np.conj(ch))
    m[1:-1, 1:] = np.conj(inner[1:])
    det = np.linalg.det(m)
    m[-1] *= np.conj(det) / abs(det)
    return m


def _embed(u):
    """iota: SU(d-1) -> SU(d), acting on the last d-1 basis states."""
    n = u.shape[0]
    d = u.shape[-1] + 1
    out = np.zeros((n, d, d), dtype=complex)
    out[:, 0, 0] = 1.0
    out[:, 1:, 1:] = u
    return out


class FiberBundle(UnitaryPath):
    """Inductive SU(d) path: U(theta) = iota(U_{d-1}(theta)) M(c(theta)).

    ``c(theta) = (1, z^N, z^{2N}, ...)/sqrt(d)`` with ``z = e^{i theta}``
    and ``N = 5**(d-2)`` the sampling threshold of the inner path. The
    recursion bottoms out at the xi curve read in SU(2). With ``based``
    the path is multiplied by U(0)^dag on the right so that U(0) = I.
    """

    kind = "fiber"
    period_note = "closed"

    def __init__(self, d: int = 3, based: bool = True):
        if d < 3:
            raise ValidationError("fiber paths need d >= 3")
        self.dim = int(d)
        self.based = bool(based)
        self.n_prev = 5 ** (d - 2)
        self.min_samples = 5 ** (d - 1)
        if d == 3:
            self.inner = CurvePath(sphere.CurveSpec(sphere.CurveKind.XI))
        else:
            self.inner = FiberBundle(d - 1, based=False)
        self._u0_dag = None
        if self.based:
            self._u0_dag = self._raw(np.zeros(1))[0].conj().T

    def base_curve(self, theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        k = np.arange(self.dim)
        return np.exp(1j * self.n_prev * np.outer(theta, k)) / np.sqrt(self.dim)

    def _raw(self, theta):
        cs = self.base_curve(theta)
        reps = np.array([_coset(c) for c in cs])
        return _embed(self.inner.eval_theta(theta)) @ reps

    def eval_theta(self, theta):
        u = self._raw(np.atleast_1d(theta))
        return u @ self._u0_dag if self.based else u

    def parameters(self):
        return {"d": self.dim, "based": self.based}


# ---------------------------------------------------------------------------
# Heisenberg-Weyl
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HWSet:
    d: int
    X: np.ndarray
    Z: np.ndarray
    omega: complex
    W: np.ndarray
    Q: np.ndarray

    def element(self, a: int, b: int) -> np.ndarray:
        return np.linalg.matrix_power(self.X, a) @ np.linalg.matrix_power(self.Z, b)

    def basis(self) -> list[np.ndarray]:
        """All d^2 operators X^a Z^b, identity first."""
        return [self.element(a, b) for a in range(self.d) for b in range(self.d)]


def hw_set(d: int) -> HWSet:
    """Shift X|j> = |j+1>, phase Z|j> = w^j |j>, W_{kj} = w^{-kj}/sqrt(d)."""
    if d < 2:
        raise ValidationError("d must be >= 2")
    w = np.exp(2j * np.pi / d)
    k = np.arange(d)
    x = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    z = np.diag(w ** k)
    wh = w ** (-np.outer(k, k)) / np.sqrt(d)
    q = wh @ np.diag(np.exp(2j * np.pi * k / d ** 2)) @ wh.conj().T
    for m in (x, z, wh, q):
        m.flags.writeable = False
    return HWSet(d, x, z, complex(w), wh, q)


class HeisenbergWeyl(UnitaryPath):
    """U(theta) = W diag(e^{i k theta}) W^dag diag(e^{i k d theta}).

    At theta_k = 2 pi k / d^2 with k = a d + b it passes through
    Q^b X^a Z^b. The path is unitary but not special.
    """

    kind = "hw"
    period_note = "closed"

    def __init__(self, d: int = 2):
        self.hw = hw_set(d)
        self.dim = int(d)
        self.min_samples = d * d

    def eval_theta(self, theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        k = np.arange(self.dim)
        w = self.hw.W
        left = (w[None] * np.exp(1j * np.outer(theta, k))[:, None, :]) @ w.conj().T
        return left * np.exp(1j * self.dim * np.outer(theta, k))[:, None, :]

    def parameters(self):
        return {"d": self.dim}


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------

def path_from_dict(data: dict) -> UnitaryPath:
    kind = data.get("kind")
    p = data.get("parameters", {})
    if kind == "two-axis":
        return TwoAxis(p["n1"], p["n2"])
    if kind == "fixed-angle-axis":
        return FixedAngleAxis(p["n"], p["n_perp"], p.get("twist", 1))
    if kind == "curve":
        return CurvePath(sphere.CurveSpec(p["curve"], phi=p.get("phi", 0.0)))
    if kind == "open":
        t = np.array(p["target"]["re"]) + 1j * np.array(p["target"]["im"])
        return build_open_path(path_from_dict(p["base"]), t)
    if kind == "tensor":
        return TensorQubits([tuple(pair) for pair in p["axis_pairs"]])
    if kind == "fiber":
        return FiberBundle(p["d"], p.get("based", True))
    if kind == "hw":
        return HeisenbergWeyl(p["d"])
    raise ValidationError(f"unknown path kind {kind!r}")


def closure_defect(path: UnitaryPath) -> float:
    """max |U(0) U(1)^dag - phase I|; zero for closed paths."""
    u = path.eval_theta(np.array([0.0, TWO_PI]))
    m = u[0] @ u[1].conj().T
    ph = np.trace(m) / path.dim
    return float(np.max(np.abs(m - ph * np.eye(path.dim))))


def named_target(name: str) -> np.ndarray:
    from .qmat import I2, SX, SY, SZ

    t = {"I": I2, "X": SX, "Y": SY, "Z": SZ}
    key = name.strip().upper()
    if key in t:
        # i*P is special unitary and equal to P up to phase
        return 1j * t[key] if key != "I" else t[key]
    if key.startswith("R"):
        # R<axis>:<angle> e.g. Rx:1.2
        ax, ang = key[1:].split(":")
        return su2_rotation(ax.lower(), float(ang))
    raise ValidationError(f"unknown target {name!r}")


__all__ = [
    "CurvePath",
    "FiberBundle",
    "FixedAngleAxis",
    "HWSet",
    "HeisenbergWeyl",
    "OpenTarget",
    "ReparamPL",
    "TensorQubits",
    "TwoAxis",
    "UnitaryPath",
    "build_open_path",
    "closure_defect",
    "conjugator",
    "fiber_coset_representative",
    "frame_metric",
    "hw_set",
    "named_target",
    "path_from_dict",
    "s3_from_su2",
    "sample_path",
    "sample_points",
    "su2_from_s3",
]
