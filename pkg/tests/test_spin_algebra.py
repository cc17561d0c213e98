"""
Tests for spin operators, Hermitian exponentials and coherent states.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from srcs.spin_algebra import (
    BlochPoint,
    PureState,
    angles_to_point,
    angular_distance,
    build_spin_system,
    coherent_mean,
    coherent_state,
    expectation_vector,
    hermitian_exp,
    point_to_angles,
    validate_j,
)

SPINS = [0.5, 1.0, 1.5, 2.0, 18.0]


@pytest.mark.parametrize("j", SPINS)
def test_commutation_relations(j):
    """[J_x, J_y] = i J_z and cyclic."""
    s = build_spin_system(j)
    assert s.dim == int(round(2 * j)) + 1
    assert np.allclose(s.jx @ s.jy - s.jy @ s.jx, 1j * s.jz, atol=1e-10)
    assert np.allclose(s.jy @ s.jz - s.jz @ s.jy, 1j * s.jx, atol=1e-10)
    assert np.allclose(s.jz @ s.jx - s.jx @ s.jz, 1j * s.jy, atol=1e-10)


@pytest.mark.parametrize("j", SPINS)
def test_casimir(j):
    s = build_spin_system(j)
    casimir = s.jx @ s.jx + s.jy @ s.jy + s.jz @ s.jz
    assert np.allclose(casimir, j * (j + 1) * np.eye(s.dim), atol=1e-9)


@pytest.mark.parametrize("j", SPINS)
def test_operators_hermitian_and_basis_descending(j):
    s = build_spin_system(j)
    for op in (s.jx, s.jy, s.jz):
        assert np.allclose(op, op.conj().T)
    assert s.m[0] == j
    assert s.m[-1] == -j
    assert np.all(np.diff(s.m) == -1.0)


def test_spin_half_is_pauli_over_two():
    s = build_spin_system(0.5)
    assert np.allclose(s.jx, [[0, 0.5], [0.5, 0]])
    assert np.allclose(s.jy, [[0, -0.5j], [0.5j, 0]])
    assert np.allclose(s.jz, [[0.5, 0], [0, -0.5]])


def test_validate_j():
    assert validate_j(2.5) == 5
    assert validate_j(18) == 36
    for bad in (2.3, 0, -1, "x", float("nan")):
        with pytest.raises(ValueError):
            validate_j(bad)


def test_operator_arrays_are_read_only():
    s = build_spin_system(1)
    with pytest.raises(ValueError):
        s.jx[0, 0] = 1.0


def test_basis_state():
    s = build_spin_system(1)
    psi = s.basis_state(0)
    assert np.allclose(psi.amplitudes, [0, 1, 0])
    with pytest.raises(ValueError):
        s.basis_state(2)
    with pytest.raises(ValueError):
        s.basis_state(0.5)


def test_hermitian_exp_matches_closed_form():
    s = build_spin_system(0.5)
    p = 0.7
    R = hermitian_exp(s.jy, -1j * p)
    expected = np.array([[np.cos(p / 2), -np.sin(p / 2)], [np.sin(p / 2), np.cos(p / 2)]])
    assert np.allclose(R, expected, atol=1e-12)


def test_spin_half_pi_rotation_about_x():
    """exp(i pi sigma_x / 2) = i sigma_x."""
    s = build_spin_system(0.5)
    R = hermitian_exp(s.jx, 1j * np.pi)
    assert np.allclose(R, [[0, 1j], [1j, 0]], atol=1e-14)


def test_hermitian_exp_unitary_and_zero_scale():
    s = build_spin_system(3)
    R = hermitian_exp(s.jx + 0.3 * s.jz, -1j * 1.1)
    assert np.allclose(R.conj().T @ R, np.eye(s.dim), atol=1e-10)
    assert np.allclose(hermitian_exp(s.jy, 0.0), np.eye(s.dim), atol=1e-12)


def test_hermitian_exp_rejects_bad_input():
    with pytest.raises(ValueError):
        hermitian_exp(np.array([[0, 1], [0, 0]]), 1j)
    with pytest.raises(ValueError):
        hermitian_exp(np.zeros((2, 3)), 1j)


def test_pure_state_requires_unit_norm():
    with pytest.raises(ValueError):
        PureState(np.array([1.0, 1.0]))
    assert PureState(np.array([0.6, 0.8j])).dim == 2


def test_coherent_state_north_pole_is_top_state():
    s = build_spin_system(2)
    psi = coherent_state(s, 0.0, 1.3)
    assert abs(abs(psi.amplitudes[0]) - 1.0) < 1e-12


def test_coherent_state_spin_half_flip():
    """theta = pi maps |1/2,1/2> to i|1/2,-1/2>."""
    s = build_spin_system(0.5)
    psi = coherent_state(s, np.pi, 0.0)
    assert np.allclose(psi.amplitudes, [0.0, 1j], atol=1e-12)


def test_coherent_state_has_maximal_spin_length():
    s = build_spin_system(18)
    psi = coherent_state(s, 2.25, 0.63)
    mean = expectation_vector(s, psi)
    assert abs(np.linalg.norm(mean) - 18.0) < 1e-8
    assert abs(mean[2] / 18.0 - np.cos(2.25)) < 1e-10
    assert mean[2] < 0


def test_coherent_mean_matches_closed_form():
    s = build_spin_system(18)
    for theta, phi in [(2.25, 0.63), (1.64, 1.50), (0.3, -2.0)]:
        p = coherent_mean(s, coherent_state(s, theta, phi))
        q = angles_to_point(theta, phi)
        assert np.allclose(p.as_array(), q.as_array(), atol=1e-10)


def test_angle_round_trip():
    """angles -> coherent state -> mean direction -> angles lands on the same point."""
    s = build_spin_system(18)
    rng = np.random.default_rng(7)
    for _ in range(100):
        theta = rng.uniform(0.05, np.pi - 0.05)
        phi = rng.uniform(-np.pi, np.pi)
        p = coherent_mean(s, coherent_state(s, theta, phi))
        theta2, phi2 = point_to_angles(p)
        q = angles_to_point(theta2, phi2)
        assert np.linalg.norm(p.as_array() - q.as_array()) < 1e-8


def test_point_to_angles_poles():
    assert point_to_angles(BlochPoint(0.0, 0.0, 1.0)) == (0.0, 0.0)
    theta, phi = point_to_angles(BlochPoint(0.0, 0.0, -1.0))
    assert theta == pytest.approx(np.pi)
    assert phi == 0.0


def test_bloch_point_validation():
    with pytest.raises(ValueError):
        BlochPoint(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        BlochPoint.from_vector([0.0, 0.0, 0.0])
    p = BlochPoint.from_vector([3.0, 0.0, 4.0])
    assert p.x == pytest.approx(0.6)
    assert p.z == pytest.approx(0.8)


def test_angular_distance():
    a = BlochPoint(1.0, 0.0, 0.0)
    b = BlochPoint(0.0, 1.0, 0.0)
    assert angular_distance(a, b) == pytest.approx(np.pi / 2)
    assert angular_distance(a, a) == 0.0
    assert angular_distance(a, BlochPoint(-1.0, 0.0, 0.0)) == pytest.approx(np.pi)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
