"""Dense complex linear algebra for small unitaries and Hermitian operators.

Matrices are plain ``numpy`` complex arrays. The ``as_*`` helpers validate
and return read-only copies so values can be shared freely.
"""

from __future__ import annotations

from functools import reduce
from itertools import product

import numpy as np

UNITARY_TOL = 1e-12
DRIFT_TOL = 1e-10
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)
for _m in (I2, SX, SY, SZ):
    _m.flags.writeable = False

AXES = {
    "x": (1.0, 0.0, 0.0),
    "y": (0.0, 1.0, 0.0),
    "z": (0.0, 0.0, 1.0),
}


class ValidationError(ValueError):
    """Input violates a documented precondition."""


def _frozen(a):
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix has non-finite entries")
    return m


def unitarity_error(u) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def as_unitary(m, special: bool = False, tol: float = UNITARY_TOL) -> np.ndarray:
    """Validate ``m`` as (special) unitary and return a read-only copy."""
    m = as_matrix(m)
    err = unitarity_error(m)
    if err > tol:
        raise ValidationError(f"matrix is not unitary (max |U^dag U - I| = {err:.3e})")
    if special and abs(np.linalg.det(m) - 1) > TRACE_TOL:
        raise ValidationError("matrix is not special (det != 1)")
    return _frozen(m)


def as_hermitian(m, traceless: bool = False, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = as_matrix(m)
    err = float(np.max(np.abs(m - m.conj().T)))
    if err > tol:
        raise ValidationError(f"matrix is not Hermitian (max |H - H^dag| = {err:.3e})")
    if traceless and abs(np.trace(m)) > TRACE_TOL:
        raise ValidationError("matrix is not traceless")
    return _frozen(m)


def unit_axis(n, tol: float = 1e-12) -> np.ndarray:
    """Validate a unit 3-vector. Accepts ``'x'``, ``'-z'`` style names too."""
    if isinstance(n, str):
        return parse_axis(n)
    v = np.asarray(n, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise ValidationError(f"axis must be a finite 3-vector, got {n!r}")
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise ValidationError(f"axis is not unit length (|n| = {np.linalg.norm(v)!r})")
    return _frozen(v)


def parse_axis(text: str) -> np.ndarray:
    """Parse ``x``, ``-y``, ``z`` or a comma list ``a,b,c`` (normalised)."""
    t = text.strip().lower()
    sign = 1.0
    if t.startswith("-") and t[1:] in AXES:
        sign, t = -1.0, t[1:]
    elif t.startswith("+") and t[1:] in AXES:
        t = t[1:]
    if t in AXES:
        return _frozen(sign * np.array(AXES[t]))
    try:
        v = np.array([float(p) for p in t.split(",")])
    except ValueError:
        raise ValidationError(f"cannot parse axis {text!r}") from None
    if v.shape != (3,) or np.linalg.norm(v) == 0:
        raise ValidationError(f"cannot parse axis {text!r}")
    return _frozen(v / np.linalg.norm(v))


def pauli_dot(v) -> np.ndarray:
    """v . sigma for a real 3-vector."""
    v = np.asarray(v, dtype=float)
    return v[0] * SX + v[1] * SY + v[2] * SZ


def su2_rotation(axis, angle: float) -> np.ndarray:
    """R_n(angle) = exp(-i angle n.sigma/2)."""
    n = unit_axis(axis)
    return _frozen(np.cos(angle / 2) * I2 - 1j * np.sin(angle / 2) * pauli_dot(n))


def expm_hermitian(h, t: float = 1.0) -> np.ndarray:
    """exp(-i H t) through the eigendecomposition of Hermitian ``H``."""
    h = as_hermitian(h)
    w, v = np.linalg.eigh(h)
    return _frozen((v * np.exp(-1j * w * t)) @ v.conj().T)


def tensor(*mats) -> np.ndarray:
    """Kronecker product, left factor most significant."""
    if not mats:
        raise ValidationError("tensor() needs at least one factor")
    return reduce(np.kron, [as_matrix(m) for m in mats])


def overlap(u, v) -> float:
    """|Tr(U^dag V)|, invariant under a global phase of either argument."""
    u = as_matrix(u)
    v = as_matrix(v)
    if u.shape != v.shape:
        raise ValidationError(f"dimension mismatch {u.shape} vs {v.shape}")
    return float(abs(np.vdot(u, v)))


def pauli_basis(num_qubits: int) -> list[np.ndarray]:
    """All 4**N Pauli strings, ordered I, X, Y, Z per qubit (qubit 1 leftmost)."""
    if num_qubits < 1:
        raise ValidationError("num_qubits must be >= 1")
    singles = (I2, SX, SY, SZ)
    return [_frozen(reduce(np.kron, combo)) for combo in product(singles, repeat=num_qubits)]


def bloch_decompose(h) -> tuple[float, np.ndarray]:
    """Split a 2x2 Hermitian H into (Tr H, v) with H = (Tr H / 2) I + v . sigma."""
    h = as_hermitian(h)
    if h.shape != (2, 2):
        raise ValidationError("bloch_decompose needs a 2x2 operator")
    tr = float(np.trace(h).real)
    v = np.array([np.trace(h @ p).real / 2 for p in PAULIS])
    return tr, v


def bloch_compose(trace: float, v) -> np.ndarray:
    return trace / 2 * I2 + pauli_dot(v)


def adjoint_rotation(u) -> np.ndarray:
    """SO(3) matrix O with U (n.sigma) U^dag = (O n).sigma for U in SU(2)/U(2)."""
    u = as_matrix(u)
    o = np.empty((3, 3))
    for j, pj in enumerate(PAULIS):
        conj = u @ pj @ u.conj().T
        for i, pi in enumerate(PAULIS):
            o[i, j] = np.trace(pi @ conj).real / 2
    return o
