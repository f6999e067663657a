"""Design diagnostics for finite ensembles and continuous paths."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .qmat import ValidationError, as_hermitian, pauli_basis
from .upath import UnitaryPath, hw_set, sample_path, sample_points

EXACT_TOL = 1e-10
PROPAGATED_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class SampledEnsemble:
    """Weighted finite set of unitaries, stored as an (n, d, d) array."""

    unitaries: np.ndarray
    weights: np.ndarray

    def __init__(self, unitaries, weights=None):
        u = np.asarray(unitaries, dtype=complex)
        if u.ndim == 2:
            u = u[None]
        if u.ndim != 3 or u.shape[0] == 0 or u.shape[1] != u.shape[2]:
            raise ValidationError("expected a nonempty stack of square matrices")
        if weights is None:
            w = np.full(u.shape[0], 1.0 / u.shape[0])
        else:
            w = np.asarray(weights, dtype=float)
            if w.shape != (u.shape[0],) or np.any(w < 0):
                raise ValidationError("weights must be nonnegative, one per unitary")
            if abs(w.sum() - 1) > 1e-12:
                raise ValidationError("weights must sum to 1")
        u = u.copy()
        w = w.copy()
        u.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "unitaries", u)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.unitaries.shape[1]

    def __len__(self):
        return self.unitaries.shape[0]

    @classmethod
    def from_path(cls, path: UnitaryPath, n: int) -> "SampledEnsemble":
        return cls(sample_path(path, n))


def frame_potential(e: SampledEnsemble, t: int = 1) -> float:
    """sum_{k,j} w_k w_j |Tr(U_k^dag U_j)|^{2t}, summed with math.fsum."""
    if t < 1:
        raise ValidationError("t must be >= 1")
    u = e.unitaries
    g = np.einsum("kab,jab->kj", u.conj(), u)
    terms = np.outer(e.weights, e.weights) * np.abs(g) ** (2 * t)
    return math.fsum(terms.ravel())


def traceless_basis(d: int) -> list[np.ndarray]:
    """Traceless orthogonal operators with Tr(P^dag P) = d.

    Pauli strings when d is a power of two, Heisenberg-Weyl X^a Z^b otherwise.
    """
    if d >= 2 and d & (d - 1) == 0:
        return pauli_basis(int(round(math.log2(d))))[1:]
    hw = hw_set(d)
    return hw.basis()[1:]


def twirl_deviation(e: SampledEnsemble, basis=None) -> float:
    """max_P ||sum_k w_k U_k P U_k^dag||_F over traceless basis elements P."""
    if basis is None:
        basis = traceless_basis(e.dim)
    u = e.unitaries
    worst = 0.0
    for p in basis:
        p = np.asarray(p, dtype=complex)
        p = p * np.sqrt(e.dim / np.vdot(p, p).real)
        avg = np.einsum("k,kab,bc,kdc->ad", e.weights, u, p, u.conj())
        worst = max(worst, float(np.linalg.norm(avg)))
    return worst


def path_first_moment(path: UnitaryPath, v, n: int | None = None) -> np.ndarray:
    """(1/N) sum_k U^dag(s_k) V U(s_k) on the equiangular samples."""
    v = as_hermitian(v)
    if v.shape[0] != path.dim:
        raise ValidationError("operator dimension does not match the path")
    n = path.min_samples if n is None else int(n)
    u = sample_path(path, n)
    return np.einsum("kba,bc,kcd->ad", u.conj(), v, u) / n


def constant_path_first_moment(u, v) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    return u.conj().T @ np.asarray(v) @ u


def design_scan(path: UnitaryPath, n_list) -> list[tuple[int, float]]:
    return [(int(n), frame_potential(SampledEnsemble.from_path(path, int(n)), 1)) for n in n_list]


@dataclass(frozen=True)
class DesignReport:
    frame_potential_t1: float
    twirl_deviation: float
    num_samples: int
    verdict: bool
    tolerance: float
    path: dict | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def design_report(e: SampledEnsemble, tol: float = EXACT_TOL, path: UnitaryPath | None = None) -> DesignReport:
    fp = frame_potential(e, 1)
    tw = twirl_deviation(e)
    ok = abs(fp - 1) <= tol and tw <= math.sqrt(tol)
    return DesignReport(fp, tw, len(e), bool(ok), tol, path.to_dict() if path is not None else None)


def verify_path(path: UnitaryPath, n: int | None = None, tol: float = EXACT_TOL) -> DesignReport:
    n = path.min_samples if n is None else int(n)
    return design_report(SampledEnsemble.from_path(path, n), tol, path)


def quadratic_form_matrices(v) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Symmetric A_1, A_2, A_3 with w_k = x A_k x^T the Bloch vector of U (v.sigma) U^dag.

    ``U = su2_from_s3(x)``. Each A_k is traceless.
    """
    v1, v2, v3 = (float(a) for a in np.asarray(v, dtype=float))
    a1 = np.array([[v1, v2, -v3, 0], [v2, -v1, 0, v3], [-v3, 0, -v1, v2], [0, v3, v2, v1]])
    a2 = np.array([[v2, -v1, 0, v3], [-v1, -v2, v3, 0], [0, v3, v2, v1], [v3, 0, v1, -v2]])
    a3 = np.array([[v3, 0, v1, -v2], [0, v3, v2, v1], [v1, v2, -v3, 0], [-v2, v1, 0, -v3]])
    return a1, a2, a3


def quadratic_form_bloch(v, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.array([x @ a @ x for a in quadratic_form_matrices(v)])


__all__ = [
    "DesignReport",
    "SampledEnsemble",
    "constant_path_first_moment",
    "design_report",
    "design_scan",
    "frame_potential",
    "path_first_moment",
    "quadratic_form_bloch",
    "quadratic_form_matrices",
    "sample_points",
    "traceless_basis",
    "twirl_deviation",
    "verify_path",
]
