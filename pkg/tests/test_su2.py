import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from esrpulse import su2
from esrpulse._validation import DomainError

angles = st.floats(-4 * math.pi, 4 * math.pi, allow_nan=False)
phases = st.floats(0, 2 * math.pi, allow_nan=False)


@given(angles, phases)
def test_rotation_matches_matrix_exponential(theta, phi):
    gen = math.cos(phi) * su2.SIGMA_X + math.sin(phi) * su2.SIGMA_Y
    np.testing.assert_allclose(su2.rotation_unitary(theta, phi), expm(-0.5j * theta * gen),
                               atol=1e-12)


@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(-50, 50), st.floats(0, 100))
def test_field_unitary_matches_expm(wx, wy, dz, t):
    h = wx * su2.SIGMA_X + wy * su2.SIGMA_Y + dz * su2.SIGMA_Z
    expected = expm(-1j * math.pi * 1e-3 * t * h)
    np.testing.assert_allclose(su2.field_unitary(wx, wy, dz, t), expected, atol=1e-11)


def test_right_handed_convention():
    # +x pi/2 takes +z to -y; positive detuning precesses x toward +y.
    m = su2.apply_to_bloch(su2.rotation_unitary(math.pi / 2, 0), [0, 0, 1])
    np.testing.assert_allclose(m, [0, -1, 0], atol=1e-15)
    m = su2.apply_to_bloch(su2.field_unitary(0, 0, 1.0, 250.0), [1, 0, 0])
    np.testing.assert_allclose(m, [0, 1, 0], atol=1e-12)


def test_compose_is_time_ordered():
    a = su2.rotation_unitary(math.pi / 2, 0)
    b = su2.rotation_unitary(math.pi / 2, math.pi / 2)
    np.testing.assert_allclose(su2.compose([a, b]), b @ a)
    with pytest.raises(DomainError):
        su2.compose([])


@settings(max_examples=50)
@given(angles, phases, angles, phases)
def test_fidelity_infidelity_consistent(t1, p1, t2, p2):
    u, v = su2.rotation_unitary(t1, p1), su2.rotation_unitary(t2, p2)
    f = su2.gate_fidelity(u, v)
    assert 0 <= f <= 1 + 1e-12
    assert su2.gate_infidelity(u, v) == pytest.approx(1 - f, abs=1e-12)


def test_infidelity_has_no_cancellation():
    eps = 1e-9
    u = su2.rotation_unitary(math.pi, 0)
    v = su2.rotation_unitary(math.pi + eps, 0)
    # 1 - cos(eps/2) ~ eps**2 / 8
    assert su2.gate_infidelity(u, v) == pytest.approx(eps ** 2 / 8, rel=1e-6)
    assert su2.gate_infidelity(u, -u) == 0.0


def test_fidelity_rejects_non_unitary():
    with pytest.raises(DomainError):
        su2.gate_fidelity(2 * su2.IDENTITY, su2.IDENTITY)


@given(st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)))
def test_bloch_density_round_trip(m):
    m = np.array(m)
    m = m / max(1.0, np.linalg.norm(m))
    rho = su2.bloch_to_density(m)
    assert np.trace(rho) == pytest.approx(1)
    np.testing.assert_allclose(su2.density_to_bloch(rho), m, atol=1e-14)


def test_axis_unitary_normalizes_axis():
    np.testing.assert_allclose(su2.axis_unitary(1.0, [0, 0, 5]), su2.rz(1.0), atol=1e-15)
    np.testing.assert_array_equal(su2.axis_unitary(1.0, [0, 0, 0]), su2.IDENTITY)
    with pytest.raises(DomainError):
        su2.axis_unitary(float("nan"), [1, 0, 0])


@given(angles, phases)
def test_rotation_is_unitary_and_phase_shift_law(theta, phi):
    u = su2.rotation_unitary(theta, phi)
    np.testing.assert_allclose(u.conj().T @ u, su2.IDENTITY, atol=1e-12)
    shifted = su2.rz(phi) @ su2.rotation_unitary(theta, 0.0) @ su2.rz(-phi)
    np.testing.assert_allclose(u, shifted, atol=1e-12)


@given(angles, phases, st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)))
def test_bloch_norm_preserved(theta, phi, m):
    m = np.array(m)
    m = m / max(1.0, np.linalg.norm(m))
    out = su2.apply_to_bloch(su2.rotation_unitary(theta, phi), m)
    assert np.linalg.norm(out) == pytest.approx(np.linalg.norm(m), abs=1e-12)


@settings(max_examples=30)
@given(angles, phases, angles, phases, angles, phases)
def test_compose_associative(t1, p1, t2, p2, t3, p3):
    a, b, c = (su2.rotation_unitary(t, p) for t, p in ((t1, p1), (t2, p2), (t3, p3)))
    left = su2.compose([su2.compose([a, b]), c])
    right = su2.compose([a, su2.compose([b, c])])
    np.testing.assert_allclose(left, right, atol=1e-12)
