"""Hot SU(2) propagation kernels.

Single-qubit propagators are stored as the pair ``(z1, z2)`` of the matrix
``[[z1, z2], [-conj(z2), conj(z1)]]``. Every kernel exists twice: a numba
``@njit`` loop version and a vectorised pure-numpy version. The numba path
is used unless ``UDESIGN_DISABLE_NUMBA=1`` is set or numba cannot be
imported. Both are exposed through :data:`IMPLEMENTATIONS` so they can be
benchmarked and cross-checked side by side.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

_DISABLE = os.environ.get("UDESIGN_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:  # pragma: no cover - exercised implicitly
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
    # an outdated TBB only means numba falls back to OpenMP
    warnings.filterwarnings("ignore", message="The TBB threading layer", category=numba.NumbaWarning)
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLE


def configure_threads() -> int | None:
    """Cap numba's worker pool at ``UDESIGN_THREADS`` if set."""
    if not HAVE_NUMBA:
        return None
    cap = os.environ.get("UDESIGN_THREADS")
    if cap:
        n = max(1, min(int(cap), numba.config.NUMBA_NUM_THREADS))
        numba.set_num_threads(n)
        return n
    return numba.get_num_threads()


# ---------------------------------------------------------------------------
# pure numpy
# ---------------------------------------------------------------------------

def _np_step_pairs(h, dt):
    """exp(-i dt h.sigma/2) for each row of ``h``, as (..., 2) pairs."""
    h = np.asarray(h, dtype=float)
    dt = np.asarray(dt, dtype=float)
    norm = np.sqrt(np.sum(h * h, axis=-1))
    half = 0.5 * norm * dt
    c = np.cos(half)
    # sin(half)/norm, finite at norm == 0
    sinc = np.where(norm > 0, np.sin(half) / np.where(norm > 0, norm, 1.0), 0.5 * dt)
    out = np.empty(h.shape[:-1] + (2,), dtype=complex)
    out[..., 0] = c - 1j * sinc * h[..., 2]
    out[..., 1] = -sinc * h[..., 1] - 1j * sinc * h[..., 0]
    return out


def _np_mul(a, b):
    """Pairwise SU(2) product a @ b on (..., 2) pairs."""
    a1, a2 = a[..., 0], a[..., 1]
    b1, b2 = b[..., 0], b[..., 1]
    out = np.empty(np.broadcast(a1, b1).shape + (2,), dtype=complex)
    out[..., 0] = a1 * b1 - a2 * np.conj(b2)
    out[..., 1] = a1 * b2 + a2 * np.conj(b1)
    return out


def _np_ordered_product(pairs):
    """U_{K-1} ... U_1 U_0 along axis -2 by pairwise tree reduction."""
    p = pairs
    while p.shape[-2] > 1:
        k = p.shape[-2]
        if k % 2:
            ident = np.zeros(p.shape[:-2] + (1, 2), dtype=complex)
            ident[..., 0, 0] = 1.0
            p = np.concatenate([p, ident], axis=-2)
        # later steps multiply from the left
        p = _np_mul(p[..., 1::2, :], p[..., 0::2, :])
    return p[..., 0, :]


def np_propagate_batch(h, dt, noise, chunk_elems=4_000_000):
    h = np.ascontiguousarray(h, dtype=float)
    dt = np.ascontiguousarray(dt, dtype=float)
    noise = np.ascontiguousarray(noise, dtype=float)
    m = noise.shape[0]
    out = np.empty((m, 2), dtype=complex)
    per = max(1, chunk_elems // max(1, h.shape[0]))
    for start in range(0, m, per):
        nz = noise[start:start + per]
        pairs = _np_step_pairs(h[None, :, :] + nz[:, None, :], dt[None, :])
        out[start:start + per] = _np_ordered_product(pairs)
    return out


def np_propagate_prefix(h, dt):
    """Prefix products P_k = U_{k-1}...U_0, P_0 = I (Hillis-Steele scan)."""
    pairs = _np_step_pairs(h, dt)
    k = pairs.shape[0]
    p = np.empty((k + 1, 2), dtype=complex)
    p[0] = (1.0, 0.0)
    p[1:] = pairs
    shift = 1
    while shift <= k:
        p[shift + 1:] = _np_mul(p[shift + 1:], p[1:k + 1 - shift])
        shift *= 2
    return p


def np_powers_trace(pairs, reps):
    """|Tr(U^r)|^2 / 4 for r = 1..reps for each pair; shape (M, reps)."""
    pairs = np.asarray(pairs, dtype=complex)
    out = np.empty((pairs.shape[0], reps))
    acc = pairs.copy()
    for r in range(reps):
        out[:, r] = (2.0 * acc[:, 0].real) ** 2 / 4.0
        acc = _np_mul(pairs, acc)
    return out


# ---------------------------------------------------------------------------
# numba
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True, inline="always")
    def _nb_step(hx, hy, hz, dt):
        norm = np.sqrt(hx * hx + hy * hy + hz * hz)
        half = 0.5 * norm * dt
        c = np.cos(half)
        if norm > 0.0:
            sinc = np.sin(half) / norm
        else:
            sinc = 0.5 * dt
        return complex(c, -sinc * hz), complex(-sinc * hy, -sinc * hx)

    @njit(cache=True, inline="always")
    def _nb_mul(a1, a2, b1, b2):
        return a1 * b1 - a2 * b2.conjugate(), a1 * b2 + a2 * b1.conjugate()

    @njit(cache=True, parallel=True)
    def nb_propagate_batch(h, dt, noise):
        m = noise.shape[0]
        k = h.shape[0]
        out = np.empty((m, 2), dtype=np.complex128)
        for j in prange(m):
            u1 = 1.0 + 0.0j
            u2 = 0.0j
            nx, ny, nz = noise[j, 0], noise[j, 1], noise[j, 2]
            for i in range(k):
                s1, s2 = _nb_step(h[i, 0] + nx, h[i, 1] + ny, h[i, 2] + nz, dt[i])
                u1, u2 = _nb_mul(s1, s2, u1, u2)
            out[j, 0] = u1
            out[j, 1] = u2
        return out

    @njit(cache=True)
    def nb_propagate_prefix(h, dt):
        k = h.shape[0]
        p = np.empty((k + 1, 2), dtype=np.complex128)
        u1 = 1.0 + 0.0j
        u2 = 0.0j
        p[0, 0] = u1
        p[0, 1] = u2
        for i in range(k):
            s1, s2 = _nb_step(h[i, 0], h[i, 1], h[i, 2], dt[i])
            u1, u2 = _nb_mul(s1, s2, u1, u2)
            p[i + 1, 0] = u1
            p[i + 1, 1] = u2
        return p

    @njit(cache=True, parallel=True)
    def nb_powers_trace(pairs, reps):
        m = pairs.shape[0]
        out = np.empty((m, reps))
        for j in prange(m):
            a1 = pairs[j, 0]
            a2 = pairs[j, 1]
            u1 = a1
            u2 = a2
            for r in range(reps):
                out[j, r] = (2.0 * u1.real) ** 2 / 4.0
                u1, u2 = _nb_mul(a1, a2, u1, u2)
        return out


IMPLEMENTATIONS = {
    "numpy": {
        "propagate_batch": np_propagate_batch,
        "propagate_prefix": np_propagate_prefix,
        "powers_trace": np_powers_trace,
    }
}
if HAVE_NUMBA:
    IMPLEMENTATIONS["numba"] = {
        "propagate_batch": nb_propagate_batch,
        "propagate_prefix": nb_propagate_prefix,
        "powers_trace": nb_powers_trace,
    }

BACKEND = "numba" if USE_NUMBA else "numpy"


def propagate_batch(h, dt, noise):
    """Ordered product of step exponentials, one per noise offset row.

    Parameters
    ----------
    h : (K, 3) array
        Control field sampled at step midpoints, ``H_k = h_k . sigma / 2``.
    dt : (K,) array
        Step durations.
    noise : (M, 3) array
        Static field offsets added to every step.

    Returns
    -------
    (M, 2) complex array of SU(2) pairs.
    """
    h = np.ascontiguousarray(h, dtype=np.float64)
    dt = np.ascontiguousarray(dt, dtype=np.float64)
    noise = np.ascontiguousarray(np.atleast_2d(noise), dtype=np.float64)
    return IMPLEMENTATIONS[BACKEND]["propagate_batch"](h, dt, noise)


def propagate_prefix(h, dt):
    """All partial products ``P_k``; ``P_0 = I``. Shape (K+1, 2)."""
    h = np.ascontiguousarray(h, dtype=np.float64)
    dt = np.ascontiguousarray(dt, dtype=np.float64)
    return IMPLEMENTATIONS[BACKEND]["propagate_prefix"](h, dt)


def powers_trace(pairs, reps: int):
    pairs = np.ascontiguousarray(np.atleast_2d(pairs), dtype=np.complex128)
    return IMPLEMENTATIONS[BACKEND]["powers_trace"](pairs, int(reps))


def pairs_to_matrices(pairs):
    pairs = np.asarray(pairs)
    z1, z2 = pairs[..., 0], pairs[..., 1]
    m = np.empty(pairs.shape[:-1] + (2, 2), dtype=complex)
    m[..., 0, 0] = z1
    m[..., 0, 1] = z2
    m[..., 1, 0] = -np.conj(z2)
    m[..., 1, 1] = np.conj(z1)
    return m
