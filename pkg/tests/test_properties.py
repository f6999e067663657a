import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bloch_of_conjugation, su2_of
from udesign import design, upath
from udesign.control import NoiseSpec, composite_pulse, fidelity_second_order
from udesign.qmat import adjoint_rotation, su2_rotation

finite = st.floats(-3, 3, allow_nan=False)
vec3 = st.tuples(finite, finite, finite).filter(lambda v: np.linalg.norm(v) > 1e-3)
vec4 = st.tuples(finite, finite, finite, finite).filter(lambda v: np.linalg.norm(v) > 1e-3)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


@settings(max_examples=60, deadline=None)
@given(vec3, st.floats(-20, 20))
def test_rotation_is_special_unitary(n, angle):
    u = su2_rotation(unit(n), angle)
    assert np.allclose(u @ u.conj().T, np.eye(2), atol=1e-13)
    assert abs(np.linalg.det(u) - 1) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(vec3, vec4)
def test_quadratic_forms_match_conjugation(v, x):
    x = unit(x)
    got = design.quadratic_form_bloch(v, x)
    assert np.allclose(got, bloch_of_conjugation(su2_of(x), np.asarray(v)), atol=1e-11)


@settings(max_examples=40, deadline=None)
@given(vec3, st.floats(-6, 6))
def test_adjoint_is_rotation(n, angle):
    o = adjoint_rotation(su2_rotation(unit(n), angle))
    assert np.allclose(o @ o.T, np.eye(3), atol=1e-12)
    assert abs(np.linalg.det(o) - 1) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(vec3, st.floats(0.1, 3.0), st.integers(4, 12))
def test_two_axis_designs_for_any_axes(n1, rot, n):
    n1 = unit(n1)
    helper = np.array([1.0, 0, 0]) if abs(n1[0]) < 0.9 else np.array([0, 1.0, 0])
    n2 = unit(np.cross(n1, helper))
    n2 = adjoint_rotation(su2_rotation(n1, rot)) @ n2
    e = design.SampledEnsemble.from_path(upath.TwoAxis(n1, n2), n)
    assert abs(design.frame_potential(e) - 1) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(vec4)
def test_open_path_reaches_target(x):
    target = su2_of(unit(x))
    path = upath.build_open_path(upath.TwoAxis("z", "y"), target)
    assert abs(abs(np.trace(path.eval(1.0).conj().T @ target)) - 2) <= 1e-8


@settings(max_examples=30, deadline=None)
@given(vec3, st.floats(0, 0.3))
def test_second_order_fidelity_bounded(v, eta):
    f = fidelity_second_order(composite_pulse("square"), NoiseSpec(unit(v), eta))
    assert f <= 1 + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.lists(vec4, min_size=1, max_size=8))
def test_frame_potential_lower_bound(xs):
    us = [su2_of(unit(x)) for x in xs]
    assert design.frame_potential(design.SampledEnsemble(us)) >= 1 - 1e-12
