import numpy as np
import pytest

from oracles import taylor_expm
from udesign import qmat
from udesign.qmat import SX, SY, SZ, ValidationError


def random_hermitian(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


class TestRotation:
    def test_pi_about_z(self):
        assert np.allclose(qmat.su2_rotation("z", np.pi), np.diag([-1j, 1j]), atol=1e-15)

    def test_zero_angle(self):
        assert np.allclose(qmat.su2_rotation([0.6, 0.8, 0.0], 0.0), np.eye(2))

    def test_half_pi_about_x(self):
        ref = (np.eye(2) - 1j * SX) / np.sqrt(2)
        assert np.allclose(qmat.su2_rotation("x", np.pi / 2), ref, atol=1e-15)

    def test_non_unit_axis_rejected(self):
        with pytest.raises(ValidationError):
            qmat.su2_rotation([1.0, 1.0, 0.0], 0.3)

    def test_inverse_pairs(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            n = rng.normal(size=3)
            n /= np.linalg.norm(n)
            t = rng.uniform(-10, 10)
            prod = qmat.su2_rotation(n, t) @ qmat.su2_rotation(n, -t)
            assert np.max(np.abs(prod - np.eye(2))) <= 1e-12

    def test_result_is_read_only(self):
        u = qmat.su2_rotation("y", 1.0)
        with pytest.raises(ValueError):
            u[0, 0] = 0


class TestExpm:
    def test_zero_time(self):
        h = random_hermitian(np.random.default_rng(1), 3)
        assert np.allclose(qmat.expm_hermitian(h, 0.0), np.eye(3))

    def test_matches_rotation(self):
        assert np.allclose(qmat.expm_hermitian(SZ / 2, np.pi), qmat.su2_rotation("z", np.pi), atol=1e-14)

    @pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
    def test_taylor_oracle(self, d):
        rng = np.random.default_rng(d)
        h = random_hermitian(rng, d)
        t = 0.7 if d == 3 else rng.uniform(-2, 2)
        assert np.max(np.abs(qmat.expm_hermitian(h, t) - taylor_expm(h, t))) <= 1e-10

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValidationError):
            qmat.expm_hermitian(np.array([[0, 1], [0, 0]]), 1.0)


class TestTensor:
    def test_identity(self):
        assert np.array_equal(qmat.tensor(np.eye(2), np.eye(2)), np.eye(4))

    def test_blocks(self):
        m = qmat.tensor(SX, SZ)
        assert np.allclose(m[:2, :2], 0) and np.allclose(m[:2, 2:], SZ) and np.allclose(m[2:, :2], SZ)

    def test_special_unitary_closed(self):
        a, b = qmat.su2_rotation("x", 0.4), qmat.su2_rotation([0, 0.6, 0.8], 2.1)
        m = qmat.tensor(a, b)
        qmat.as_unitary(m, special=True)
        assert abs(np.linalg.det(m) - 1) <= 1e-10


class TestOverlap:
    def test_self(self):
        u = qmat.su2_rotation("y", 0.3)
        assert qmat.overlap(u, u) == pytest.approx(2)

    def test_traceless(self):
        assert qmat.overlap(np.eye(2), 1j * SX) == 0

    def test_phase(self):
        assert qmat.overlap(np.eye(3), np.exp(0.7j) * np.eye(3)) == pytest.approx(3)

    def test_symmetric(self):
        a, b = qmat.su2_rotation("x", 0.4), qmat.su2_rotation("z", 2.2)
        assert qmat.overlap(a, b) == pytest.approx(qmat.overlap(b, a), abs=1e-15)

    def test_mismatch(self):
        with pytest.raises(ValidationError):
            qmat.overlap(np.eye(2), np.eye(3))


class TestPauli:
    def test_single(self):
        b = qmat.pauli_basis(1)
        for got, ref in zip(b, [np.eye(2), SX, SY, SZ]):
            assert np.array_equal(got, ref)

    def test_two_qubits(self):
        b = qmat.pauli_basis(2)
        assert len(b) == 16
        assert sum(abs(np.trace(p)) < 1e-12 for p in b) == 15

    def test_orthogonal(self):
        b = qmat.pauli_basis(2)
        g = np.array([[np.trace(p @ q) for q in b] for p in b])
        assert np.allclose(g, 4 * np.eye(16))

    def test_bad_count(self):
        with pytest.raises(ValidationError):
            qmat.pauli_basis(0)


class TestBloch:
    def test_sigma_z(self):
        tr, v = qmat.bloch_decompose(SZ)
        assert tr == 0 and np.allclose(v, [0, 0, 1])

    def test_identity(self):
        tr, v = qmat.bloch_decompose(np.eye(2))
        assert tr == 2 and np.allclose(v, 0)

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            h = random_hermitian(rng, 2)
            assert np.max(np.abs(qmat.bloch_compose(*qmat.bloch_decompose(h)) - h)) <= 1e-12

    def test_dimension(self):
        with pytest.raises(ValidationError):
            qmat.bloch_decompose(np.eye(3))


def test_adjoint_rotation_matches_conjugation():
    u = qmat.su2_rotation([0, 0.6, 0.8], 1.3)
    o = qmat.adjoint_rotation(u)
    n = np.array([0.2, -0.4, 0.5])
    lhs = u @ qmat.pauli_dot(n) @ u.conj().T
    assert np.allclose(lhs, qmat.pauli_dot(o @ n))
    assert np.allclose(o @ o.T, np.eye(3))


def test_parse_axis():
    assert np.array_equal(qmat.parse_axis("-y"), [0, -1, 0])
    assert np.allclose(qmat.parse_axis("1,1,0"), np.array([1, 1, 0]) / np.sqrt(2))
    with pytest.raises(ValidationError):
        qmat.parse_axis("q")


def test_validators():
    with pytest.raises(ValidationError):
        qmat.as_unitary(np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValidationError):
        qmat.as_unitary(1j * np.eye(2), special=True)
    with pytest.raises(ValidationError):
        qmat.as_hermitian(np.eye(2), traceless=True)
    with pytest.raises(ValidationError):
        qmat.as_matrix(np.array([[np.nan]]))
    assert SY.flags.writeable is False
