import os
import subprocess
import sys

import numpy as np
import pytest

from oracles import stepwise_propagate
from udesign import _kernels

IMPLS = sorted(_kernels.IMPLEMENTATIONS)


def random_fields(rng, k):
    return rng.normal(size=(k, 3)), rng.uniform(0.01, 0.2, k)


@pytest.mark.parametrize("impl", IMPLS)
def test_batch_matches_oracle(impl):
    rng = np.random.default_rng(0)
    h, dt = random_fields(rng, 300)
    noise = rng.normal(scale=0.1, size=(5, 3))
    got = _kernels.pairs_to_matrices(_kernels.IMPLEMENTATIONS[impl]["propagate_batch"](h, dt, noise))
    for m in range(5):
        ref = stepwise_propagate(h + noise[m], dt)
        assert np.max(np.abs(got[m] - ref)) <= 1e-12


@pytest.mark.parametrize("impl", IMPLS)
def test_prefix_matches_oracle(impl):
    rng = np.random.default_rng(1)
    h, dt = random_fields(rng, 77)
    p = _kernels.pairs_to_matrices(_kernels.IMPLEMENTATIONS[impl]["propagate_prefix"](h, dt))
    assert p.shape == (78, 2, 2)
    assert np.allclose(p[0], np.eye(2))
    for k in (1, 13, 77):
        assert np.max(np.abs(p[k] - stepwise_propagate(h[:k], dt[:k]))) <= 1e-12


@pytest.mark.parametrize("impl", IMPLS)
def test_powers_trace(impl):
    rng = np.random.default_rng(2)
    h, dt = random_fields(rng, 10)
    pairs = _kernels.propagate_batch(h, dt, rng.normal(size=(3, 3)))
    got = _kernels.IMPLEMENTATIONS[impl]["powers_trace"](pairs, 6)
    mats = _kernels.pairs_to_matrices(pairs)
    for m in range(3):
        for r in range(6):
            ref = abs(np.trace(np.linalg.matrix_power(mats[m], r + 1))) ** 2 / 4
            assert got[m, r] == pytest.approx(ref, abs=1e-12)


@pytest.mark.skipif(len(IMPLS) < 2, reason="numba not installed")
def test_backends_agree():
    rng = np.random.default_rng(3)
    h, dt = random_fields(rng, 1000)
    noise = rng.normal(scale=0.05, size=(17, 3))
    a, b = (_kernels.IMPLEMENTATIONS[k]["propagate_batch"](h, dt, noise) for k in ("numpy", "numba"))
    assert np.max(np.abs(a - b)) <= 1e-12
    a, b = (_kernels.IMPLEMENTATIONS[k]["propagate_prefix"](h, dt) for k in ("numpy", "numba"))
    assert np.max(np.abs(a - b)) <= 1e-12


def test_empty_grid_is_identity():
    out = _kernels.propagate_batch(np.zeros((0, 3)), np.zeros(0), np.zeros((2, 3)))
    assert np.allclose(_kernels.pairs_to_matrices(out), np.eye(2))


def test_disable_flag_selects_numpy():
    env = dict(os.environ, UDESIGN_DISABLE_NUMBA="1")
    code = "import udesign; print(udesign.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_numpy_backend_end_to_end():
    env = dict(os.environ, UDESIGN_DISABLE_NUMBA="1")
    code = ("from udesign.control import *; from udesign.qmat import overlap; import numpy as np;"
            "print(overlap(propagate(urc_pulse()), np.eye(2)))")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert float(out.stdout) == pytest.approx(2, abs=1e-6)


def test_thread_cap(monkeypatch):
    if not _kernels.HAVE_NUMBA:
        pytest.skip("numba not installed")
    monkeypatch.setenv("UDESIGN_THREADS", "1")
    assert _kernels.configure_threads() == 1
    monkeypatch.delenv("UDESIGN_THREADS")
    import numba

    numba.set_num_threads(numba.config.NUMBA_NUM_THREADS)
