"""First-order Dyson diagnostics on the noise-free evolution.

Within a propagation step the noise-free propagator is U(t0 + tau) =
exp(-i tau h.sigma/2) P with P the product of all earlier steps, so its
adjoint SO(3) matrix is O(tau) R(P) with O a rotation about h at rate |h|.
Time integrals of R, with or without a Fourier kernel, are evaluated per
step in closed form, so free evolution and constant segments are exact.
"""

from __future__ import annotations

import numpy as np

from .. import _kernels
from ..qmat import PAULIS, ValidationError, as_hermitian, bloch_decompose
from .noise import NoiseSpec
from .propagate import PropagationConfig, resolve_grid
from .pulses import PulseProgram


def _sinc(x):
    return np.sinc(np.asarray(x) / np.pi)


def pair_rotations(pairs) -> np.ndarray:
    """SO(3) matrices R with U (m.sigma) U^dag = (R m).sigma, shape (..., 3, 3)."""
    z1, z2 = pairs[..., 0], pairs[..., 1]
    w = z1.real
    v = np.stack([-z2.imag, -z2.real, -z1.imag], axis=-1)
    r = (w * w - np.sum(v * v, axis=-1))[..., None, None] * np.eye(3)
    r = r + 2 * v[..., :, None] * v[..., None, :]
    cross = np.zeros(v.shape[:-1] + (3, 3))
    cross[..., 0, 1], cross[..., 0, 2] = -v[..., 2], v[..., 1]
    cross[..., 1, 0], cross[..., 1, 2] = v[..., 2], -v[..., 0]
    cross[..., 2, 0], cross[..., 2, 1] = -v[..., 1], v[..., 0]
    return r + 2 * w[..., None, None] * cross


def _step_frames(pulse, cfg):
    grid = resolve_grid(pulse, cfg)
    prefix = _kernels.propagate_prefix(grid.h, grid.dt)
    rk = pair_rotations(prefix[:-1])
    alpha = np.linalg.norm(grid.h, axis=1)
    n = np.where(alpha[:, None] > 0, grid.h / np.where(alpha > 0, alpha, 1.0)[:, None], 0.0)
    nn = n[:, :, None] * n[:, None, :]
    nx = np.zeros((n.shape[0], 3, 3))
    nx[:, 0, 1], nx[:, 0, 2] = -n[:, 2], n[:, 1]
    nx[:, 1, 0], nx[:, 1, 2] = n[:, 2], -n[:, 0]
    nx[:, 2, 0], nx[:, 2, 1] = -n[:, 1], n[:, 0]
    return grid, rk, alpha, nn, nx


def rotation_integral(pulse: PulseProgram, cfg: PropagationConfig | None = None) -> np.ndarray:
    """int_0^T R(U(t)) dt as a 3x3 real matrix."""
    grid, rk, alpha, nn, nx = _step_frames(pulse, cfg)
    x = alpha * grid.dt
    c = grid.dt * _sinc(x)
    s = grid.dt * np.sin(x / 2) * _sinc(x / 2)
    eye = np.eye(3)
    step = (c[:, None, None] * (eye - nn) + s[:, None, None] * nx
            + grid.dt[:, None, None] * nn)
    return np.einsum("kij,kjl->il", step, rk)


def first_moment(pulse: PulseProgram, v, cfg: PropagationConfig | None = None) -> np.ndarray:
    """int_0^T U^dag(t) V U(t) dt on the noise-free evolution (2x2 matrix)."""
    v = as_hermitian(v)
    if v.shape != (2, 2):
        raise ValidationError("single-qubit operator expected")
    tr, vec = bloch_decompose(v)
    r = rotation_integral(pulse, cfg)
    m = vec @ r
    return tr / 2 * pulse.total_duration * np.eye(2) + sum(m[k] * PAULIS[k] for k in range(3))


def fidelity_second_order(pulse: PulseProgram, noise: NoiseSpec, cfg: PropagationConfig | None = None) -> float:
    """1 - (1/d) Tr[(int U^dag V U dt)^2], the Dyson expansion to second order."""
    m = first_moment(pulse, noise.operator(), cfg)
    return float(1.0 - np.trace(m @ m).real / 2.0)


def filter_function(pulse: PulseProgram, omega_grid, cfg: PropagationConfig | None = None,
                    chunk: int = 1 << 22) -> np.ndarray:
    """FF_a(w) = sum_k |-i w int_0^T R_ak(t) e^{i w t} dt|^2, shape (3, n_omega)."""
    w = np.atleast_1d(np.asarray(omega_grid, dtype=float))
    if np.any(w < 0):
        raise ValidationError("frequencies must be >= 0")
    grid, rk, alpha, nn, nx = _step_frames(pulse, cfg)
    dt = grid.dt
    eye = np.eye(3)
    # precompute the three kernel-free frames (K, 3, 3)
    a0 = np.einsum("kij,kjl->kil", nn, rk)
    ac = np.einsum("kij,kjl->kil", eye - nn, rk)
    as_ = np.einsum("kij,kjl->kil", nx, rk)
    out = np.empty((3, w.size))
    per = max(1, chunk // max(1, dt.size))
    for lo in range(0, w.size, per):
        ww = w[lo:lo + per][:, None]

        def j(beta):
            return dt * np.exp(0.5j * beta * dt) * _sinc(0.5 * beta * dt)

        jp, jm = j(ww + alpha), j(ww - alpha)
        j0 = j(ww)
        jc = 0.5 * (jp + jm)
        js = (jp - jm) / 2j
        ph = np.exp(1j * ww * grid.t0)
        integral = (np.einsum("wk,kil->wil", ph * j0, a0) + np.einsum("wk,kil->wil", ph * jc, ac)
                    + np.einsum("wk,kil->wil", ph * js, as_))
        out[:, lo:lo + per] = (ww ** 2 * np.sum(np.abs(integral) ** 2, axis=2)).T
    return out
