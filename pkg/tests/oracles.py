"""Independent reference implementations used by the tests.

Nothing here imports the package; each oracle is the textbook formula
written with plain loops, dense matrices or scipy.linalg.expm.
"""

import math

import numpy as np
from scipy.linalg import expm

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)

# Frozen baselines, produced by the loop oracles below (seedless, exact paths)
OPEN_Z_FRAME_POTENTIAL = {
    8: 1.0808058261758409,
    16: 1.008916330238012,
    32: 1.002012266054715,
    64: 1.00049185106293,
}


def taylor_expm(h, t, terms=64):
    """exp(-i H t) by scaling and squaring a truncated Taylor series."""
    a = -1j * np.asarray(h, dtype=complex) * t
    norm = np.abs(a).sum(axis=1).max()
    k = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0 else 0
    a = a / 2 ** k
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for j in range(1, terms):
        term = term @ a / j
        out = out + term
    for _ in range(k):
        out = out @ out
    return out


def rot(n, angle):
    n = np.asarray(n, dtype=float)
    return expm(-0.5j * angle * (n[0] * X + n[1] * Y + n[2] * Z))


def frame_potential_loops(us, t=1):
    n = len(us)
    total = 0.0
    for a in us:
        for b in us:
            total += abs(np.trace(a.conj().T @ b)) ** (2 * t)
    return total / n ** 2


def bloch_of_conjugation(u, v):
    """Bloch vector of U (v.sigma) U^dag from explicit traces."""
    m = u @ (v[0] * X + v[1] * Y + v[2] * Z) @ u.conj().T
    return np.array([np.trace(m @ p).real / 2 for p in (X, Y, Z)])


def su2_of(x):
    return np.array([[x[0] + 1j * x[1], x[2] + 1j * x[3]], [-x[2] + 1j * x[3], x[0] - 1j * x[1]]])


def two_axis(n1, n2, theta):
    return rot(n1, theta) @ rot(n2, 2 * theta)


def open_z_theta(s, s_star=0.5):
    """The three-branch reparameterisation written out branch by branch."""
    if s <= s_star / 2:
        return 4 * np.pi * s
    if s <= 1 - s_star / 2:
        return 2 * np.pi * s + np.pi * s_star
    return 4 * np.pi * s - np.pi * (2 - 2 * s_star)


def stepwise_propagate(fields, dt):
    """Ordered product of expm steps; ``fields`` rows are h with H = h.sigma/2."""
    u = I2.copy()
    dts = np.broadcast_to(np.asarray(dt, dtype=float), (len(fields),))
    for h, d in zip(fields, dts):
        u = expm(-0.5j * d * (h[0] * X + h[1] * Y + h[2] * Z)) @ u
    return u
