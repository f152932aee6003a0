"""2x2 algebra: propagators, single realizations, Bloch round trips."""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from hamens import (DensityMatrix, MemberHamiltonian, UnitVector, evolve_single,
                    purity, unitary_at)
from hamens.su2 import IDENTITY, PAULIS, SIGMA_X, SIGMA_Z

rng = np.random.default_rng(202401)


def random_member():
    return MemberHamiltonian(
        omega=float(rng.uniform(0.0, 5.0)),
        direction=UnitVector(theta=float(rng.uniform(0, math.pi)),
                             phi=float(rng.uniform(0, 2 * math.pi))))


def test_unit_vector_normalization():
    for _ in range(200):
        n = UnitVector(float(rng.uniform(-1, 5)), float(rng.uniform(-9, 9)))
        assert abs(n.nx ** 2 + n.ny ** 2 + n.nz ** 2 - 1.0) < 1e-12
        assert 0.0 <= n.theta <= math.pi
        assert 0.0 <= n.phi < 2 * math.pi


def test_unit_vector_from_cartesian():
    v = UnitVector.from_cartesian([0.0, 0.0, -2.0])
    assert v.nz == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        UnitVector.from_cartesian([0.0, 0.0, 0.0])


def test_member_hamiltonian_rejects_negative_frequency():
    with pytest.raises(ValueError):
        MemberHamiltonian(omega=-1.0, direction=UnitVector(0.0, 0.0))


def test_unitary_at_time_zero_is_identity():
    for _ in range(20):
        u = unitary_at(random_member(), 0.0)
        assert np.allclose(u, IDENTITY, atol=1e-15)


def test_unitary_at_diagonal_generator():
    h = MemberHamiltonian(1.0, UnitVector(0.0, 0.0))
    u = unitary_at(h, math.pi)
    expected = np.diag([np.exp(-1j * math.pi / 2), np.exp(1j * math.pi / 2)])
    assert np.allclose(u, expected, atol=1e-15)


def test_unitary_at_x_axis_vs_matrix_exponential():
    # oracle: scaling-and-squaring matrix exponential of -i H t
    h = MemberHamiltonian(1.0, UnitVector(math.pi / 2, 0.0))
    u = unitary_at(h, math.pi)
    oracle = expm(-1j * h.matrix() * math.pi)
    assert np.allclose(u, oracle, atol=1e-13)
    assert np.allclose(u, -1j * SIGMA_X, atol=1e-13)


def test_unitary_at_random_vs_matrix_exponential():
    for _ in range(50):
        h = random_member()
        t = float(rng.uniform(-3, 3))
        assert np.allclose(unitary_at(h, t), expm(-1j * h.matrix() * t), atol=1e-12)


def test_unitarity_and_determinant():
    for _ in range(100):
        u = unitary_at(random_member(), float(rng.uniform(0, 10)))
        assert np.max(np.abs(u @ u.conj().T - IDENTITY)) < 1e-12
        assert abs(abs(np.linalg.det(u)) - 1.0) < 1e-12


def test_unitary_composition():
    for _ in range(100):
        h = random_member()
        t1, t2 = rng.uniform(0, 4, 2)
        u12 = unitary_at(h, t1 + t2)
        assert np.max(np.abs(u12 - unitary_at(h, t1) @ unitary_at(h, t2))) < 1e-12


def test_evolve_single_commuting_generator_fixes_pole_state():
    h = MemberHamiltonian(2.3, UnitVector(0.0, 0.0))
    out = evolve_single(DensityMatrix([0, 0, 1]), h, 1.7)
    assert np.allclose(out.bloch, [0, 0, 1], atol=1e-15)


def test_evolve_single_quarter_turn():
    # oracle: explicit conjugation U rho U^dagger
    h = MemberHamiltonian(1.0, UnitVector(0.0, 0.0))
    rho0 = DensityMatrix([1, 0, 0])
    out = evolve_single(rho0, h, math.pi / 2)
    u = unitary_at(h, math.pi / 2)
    oracle = DensityMatrix.from_matrix(u @ rho0.matrix() @ u.conj().T)
    assert np.allclose(out.bloch, [0, 1, 0], atol=1e-12)
    assert np.allclose(out.bloch, oracle.bloch, atol=1e-12)


def test_evolve_single_fixed_point_and_conjugation_oracle():
    assert np.allclose(evolve_single(DensityMatrix([0, 0, 0]), random_member(), 2.0).bloch, 0.0)
    for _ in range(50):
        h = random_member()
        t = float(rng.uniform(0, 5))
        r = rng.uniform(-1, 1, 3)
        r *= rng.uniform(0, 1) / max(np.linalg.norm(r), 1e-12)
        rho0 = DensityMatrix(r)
        out = evolve_single(rho0, h, t)
        u = unitary_at(h, t)
        oracle = DensityMatrix.from_matrix(u @ rho0.matrix() @ u.conj().T)
        assert np.allclose(out.bloch, oracle.bloch, atol=1e-12)
        assert abs(out.purity() - rho0.purity()) < 1e-12


def test_bloch_round_trip():
    for _ in range(100):
        r = rng.uniform(-1, 1, 3)
        r *= rng.uniform(0, 1) / max(np.linalg.norm(r), 1e-12)
        rho = DensityMatrix(r)
        back = DensityMatrix.from_matrix(rho.matrix())
        assert np.max(np.abs(back.bloch - rho.bloch)) < 1e-14
        m = rho.matrix()
        assert abs(np.trace(m) - 1.0) < 1e-15
        assert np.max(np.abs(m - m.conj().T)) < 1e-15


def test_purity_values():
    assert purity(DensityMatrix([0, 0, 0])) == pytest.approx(0.5)
    assert purity(DensityMatrix([0, 0, 1])) == pytest.approx(1.0)
    assert purity(DensityMatrix([0.6, 0, 0])) == pytest.approx(0.68)


def test_density_matrix_rejects_bloch_outside_ball():
    with pytest.raises(ValueError):
        DensityMatrix([1.2, 0, 0])


def test_pauli_algebra():
    for i, p in enumerate(PAULIS):
        assert np.allclose(p @ p, IDENTITY)
    assert np.allclose(PAULIS[0] @ PAULIS[1], 1j * SIGMA_Z)
