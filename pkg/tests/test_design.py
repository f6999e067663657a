import json

import numpy as np
import pytest

from oracles import I2, X, Y, Z, bloch_of_conjugation, frame_potential_loops, su2_of
from udesign import design, upath
from udesign.design import SampledEnsemble
from udesign.qmat import ValidationError

PAULI_GROUP = [I2, 1j * X, 1j * Y, 1j * Z]


def random_su2(rng, n):
    x = rng.normal(size=(n, 4))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return np.array([su2_of(v) for v in x])


class TestEnsemble:
    def test_default_weights(self):
        e = SampledEnsemble(PAULI_GROUP)
        assert np.allclose(e.weights, 0.25)

    def test_bad_weights(self):
        with pytest.raises(ValidationError):
            SampledEnsemble(PAULI_GROUP, [0.5, 0.5, 0.5, -0.5])
        with pytest.raises(ValidationError):
            SampledEnsemble(PAULI_GROUP, [0.3, 0.3, 0.3, 0.3])

    def test_empty(self):
        with pytest.raises(ValidationError):
            SampledEnsemble(np.zeros((0, 2, 2)))


class TestFramePotential:
    def test_pauli_group(self):
        assert design.frame_potential(SampledEnsemble(PAULI_GROUP)) == pytest.approx(1, abs=1e-15)

    def test_single_identity(self):
        assert design.frame_potential(SampledEnsemble([I2])) == pytest.approx(4)

    def test_three_samples(self):
        e = SampledEnsemble.from_path(upath.TwoAxis(), 3)
        got = design.frame_potential(e)
        assert got > 1
        assert got == pytest.approx(frame_potential_loops(list(e.unitaries)), rel=1e-14)

    def test_matches_loops_t2(self):
        us = random_su2(np.random.default_rng(0), 12)
        e = SampledEnsemble(us)
        assert design.frame_potential(e, 2) == pytest.approx(frame_potential_loops(list(us), 2), rel=1e-13)
        assert design.frame_potential(e, 2) >= 2 - 1e-9

    def test_weighted(self):
        e = SampledEnsemble(PAULI_GROUP + [I2], [0.2] * 5)
        w = np.full(5, 0.2)
        g = np.abs(np.einsum("kab,jab->kj", np.conj(e.unitaries), e.unitaries)) ** 2
        assert design.frame_potential(e) == pytest.approx(w @ g @ w)

    def test_invariances(self):
        rng = np.random.default_rng(2)
        us = random_su2(rng, 7)
        a, b = random_su2(rng, 2)
        base = design.frame_potential(SampledEnsemble(us))
        phases = np.exp(1j * rng.uniform(0, 6, 7))[:, None, None]
        for variant in (a @ us, us @ b, us * phases):
            assert design.frame_potential(SampledEnsemble(variant)) == pytest.approx(base, abs=1e-10)

    def test_bad_t(self):
        with pytest.raises(ValidationError):
            design.frame_potential(SampledEnsemble([I2]), 0)


class TestTwirl:
    def test_pauli_group(self):
        assert design.twirl_deviation(SampledEnsemble(PAULI_GROUP)) <= 1e-12

    def test_identity(self):
        assert design.twirl_deviation(SampledEnsemble([I2]), [Z]) == pytest.approx(np.sqrt(2))

    def test_two_axis_64(self):
        assert design.twirl_deviation(SampledEnsemble.from_path(upath.TwoAxis(), 64)) <= 1e-10

    def test_hw_basis_for_qutrits(self):
        b = design.traceless_basis(3)
        assert len(b) == 8
        assert design.twirl_deviation(SampledEnsemble.from_path(upath.HeisenbergWeyl(3), 9)) <= 1e-12

    def test_consistent_with_frame_potential(self):
        rng = np.random.default_rng(4)
        cases = [SampledEnsemble(PAULI_GROUP), SampledEnsemble(random_su2(rng, 5)),
                 SampledEnsemble.from_path(upath.TwoAxis(), 3), SampledEnsemble.from_path(upath.FiberBundle(3), 25),
                 SampledEnsemble.from_path(upath.FiberBundle(3), 24)]
        for e in cases:
            small_tw = design.twirl_deviation(e) <= 1e-6
            small_fp = design.frame_potential(e) <= 1 + 1e-10
            assert small_tw == small_fp


class TestFirstMoment:
    def test_two_axis(self):
        m = design.path_first_moment(upath.TwoAxis(), Z, 64)
        assert np.max(np.abs(m)) <= 1e-10

    def test_constant_path(self):
        assert np.allclose(design.constant_path_first_moment(I2, Z), Z)

    def test_hw(self):
        hw = upath.hw_set(3)
        for p in hw.basis()[1:]:
            v = p + p.conj().T
            w = 1j * (p - p.conj().T)
            for op in (v, w):
                m = design.path_first_moment(upath.HeisenbergWeyl(3), op, 81)
                assert np.max(np.abs(m)) <= 1e-10

    def test_linear(self):
        p = upath.build_open_path(upath.TwoAxis(), 1j * X)
        a = design.path_first_moment(p, X, 16)
        b = design.path_first_moment(p, Y, 16)
        c = design.path_first_moment(p, 2 * X - 3 * Y, 16)
        assert np.allclose(c, 2 * a - 3 * b)

    def test_dimension_check(self):
        with pytest.raises(ValidationError):
            design.path_first_moment(upath.TwoAxis(), np.eye(3), 8)


class TestScan:
    def test_two_axis(self):
        for n, f in design.design_scan(upath.TwoAxis(), range(4, 9)):
            assert abs(f - 1) <= 1e-10

    def test_open_decreasing(self):
        rows = design.design_scan(upath.build_open_path(upath.TwoAxis("z", "y"), 1j * Z), [8, 16, 32])
        vals = [f for _, f in rows]
        assert vals[0] > vals[1] > vals[2] > 1

    def test_fiber(self):
        assert abs(design.design_scan(upath.FiberBundle(3), [25])[0][1] - 1) <= 1e-9


class TestQuadraticForms:
    def test_traceless_symmetric(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            for a in design.quadratic_form_matrices(rng.normal(size=3)):
                assert np.trace(a) == 0
                assert np.array_equal(a, a.T)

    def test_identity_point(self):
        assert np.allclose(design.quadratic_form_bloch([0, 0, 1], [1, 0, 0, 0]), [0, 0, 1])

    def test_conjugation_oracle(self):
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(1000):
            v = rng.normal(size=3)
            x = rng.normal(size=4)
            x /= np.linalg.norm(x)
            worst = max(worst, np.max(np.abs(design.quadratic_form_bloch(v, x) - bloch_of_conjugation(su2_of(x), v))))
        assert worst <= 1e-12


def test_report_json():
    r = design.verify_path(upath.HeisenbergWeyl(2))
    d = json.loads(r.to_json())
    assert d["verdict"] is True and d["num_samples"] == 4
    assert d["frame_potential_t1"] >= 1 - 1e-9
    bad = design.verify_path(upath.TwoAxis(), 3)
    assert not bad.verdict
