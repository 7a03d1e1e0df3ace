import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dotqubit.errors import IntegrationError, NonHermitianError, ValidationError
from dotqubit.numerics import (HBAR_MEV_NS, TimeGrid, density, hermitian_eig, integrate_lindblad,
                               is_unitary, kron, propagator, unitarity_error)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([-1.0, 1.0]).astype(complex)  # |e><e| - |v><v| with |v> = index 0
SM = np.array([[0, 1], [0, 0]], dtype=complex)  # |v><e|


def random_hermitian(rng, dim, scale=1.0):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = 0.5 * (a + a.conj().T)
    return scale * h / np.max(np.abs(h))


def rk4_schrodinger(h, psi0, duration, n_steps):
    """Independent oracle: fixed-step RK4 on i hbar dpsi/dt = H psi."""
    dt = duration / n_steps
    psi = np.asarray(psi0, dtype=complex)
    f = lambda y: -1j / HBAR_MEV_NS * (h @ y)
    for _ in range(n_steps):
        k1 = f(psi)
        k2 = f(psi + 0.5 * dt * k1)
        k3 = f(psi + 0.5 * dt * k2)
        k4 = f(psi + dt * k3)
        psi = psi + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return psi


class TestKron:
    def test_identity(self):
        np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_sigma_z_ordering(self):
        np.testing.assert_array_equal(kron(SZ, np.eye(2)), np.diag([-1, -1, 1, 1]))

    def test_mixed_product(self):
        rng = np.random.default_rng(1)
        a, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(2))
        b, d = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(2))
        np.testing.assert_allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d), atol=1e-12)

    def test_shape(self):
        assert kron(np.ones((2, 3)), np.ones((4, 5))).shape == (8, 15)


class TestHermitianEig:
    def test_diagonal(self):
        vals, vecs = hermitian_eig(np.diag([1.0, 2.0, 3.0]))
        np.testing.assert_allclose(vals, [1, 2, 3])
        np.testing.assert_allclose(np.abs(vecs), np.eye(3), atol=1e-15)

    def test_symmetric_two_level(self):
        vals, _ = hermitian_eig([[0, 0.5], [0.5, 0]])
        np.testing.assert_allclose(vals, [-0.5, 0.5], atol=1e-15)

    @pytest.mark.parametrize("e_d,e_dt,t", [(0.0, 10.0, 0.01), (1.0, 3.0, 0.7), (-2.0, -1.5, 0.2)])
    def test_dot_pair_closed_form(self, e_d, e_dt, t):
        vals, _ = hermitian_eig([[e_d, t], [t, e_dt]])
        root = math.sqrt((e_dt - e_d) ** 2 + 4 * t * t)
        np.testing.assert_allclose(vals, [0.5 * (e_d + e_dt - root), 0.5 * (e_d + e_dt + root)], atol=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitianError, match=r"2\.000e-01"):
            hermitian_eig([[0, 1.0], [0.8, 0]])

    def test_eigen_relation(self):
        h = random_hermitian(np.random.default_rng(3), 7)
        vals, vecs = hermitian_eig(h)
        np.testing.assert_allclose(h @ vecs, vecs * vals, atol=1e-12)
        assert is_unitary(vecs)
        assert np.all(np.diff(vals) >= 0)


class TestPropagator:
    def test_zero_time(self):
        np.testing.assert_allclose(propagator(random_hermitian(np.random.default_rng(0), 4), 0.0),
                                   np.eye(4), atol=1e-15)

    def test_diagonal(self):
        e, tau = 0.3, 7.0
        np.testing.assert_allclose(propagator(np.diag([e, 0.0]), tau),
                                   np.diag([np.exp(-1j * e * tau / HBAR_MEV_NS), 1.0]), atol=1e-12)

    def test_rabi_against_rk4_oracle(self):
        omega = 0.01
        period = math.pi * HBAR_MEV_NS / omega
        psi0 = np.array([1, 0], dtype=complex)
        for frac in (0.1, 0.25, 0.5, 0.8, 1.0):
            tau = frac * period
            exact = propagator(omega * SX, tau) @ psi0
            oracle = rk4_schrodinger(omega * SX, psi0, tau, 4000)
            assert abs(exact[1]) ** 2 == pytest.approx(math.sin(omega * tau / HBAR_MEV_NS) ** 2, abs=1e-12)
            assert abs(abs(exact[1]) ** 2 - abs(oracle[1]) ** 2) < 1e-8

    def test_negative_duration(self):
        with pytest.raises(ValidationError):
            propagator(SX, -1.0)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitianError):
            propagator(SM, 1.0)

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 12),
           norm=st.floats(1e-6, 10.0), duration=st.floats(0.0, 1e6))
    def test_unitarity(self, seed, dim, norm, duration):
        h = random_hermitian(np.random.default_rng(seed), dim, norm)
        assert unitarity_error(propagator(h, duration)) < 1e-10

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 12), norm=st.floats(1e-6, 10.0),
           t1=st.floats(0.0, 100.0), t2=st.floats(0.0, 100.0))
    def test_composition(self, seed, dim, norm, t1, t2):
        h = random_hermitian(np.random.default_rng(seed), dim, norm)
        np.testing.assert_allclose(propagator(h, t1 + t2), propagator(h, t2) @ propagator(h, t1),
                                   atol=1e-9, rtol=0)


def test_timegrid_validation():
    with pytest.raises(ValidationError):
        TimeGrid(1.0, 1.0, 10)
    with pytest.raises(ValidationError):
        TimeGrid(0.0, 1.0, 0)
    g = TimeGrid(0.0, 2.0, 4)
    np.testing.assert_allclose(g.times, [0, 0.5, 1, 1.5, 2])


class TestLindblad:
    def test_closed_system_matches_propagator(self):
        rng = np.random.default_rng(5)
        h = random_hermitian(rng, 4, 1e-3)
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        rho0 = density(psi)
        grid = TimeGrid(0.0, 10.0, 4000)
        traj = integrate_lindblad(h, [(np.eye(4), 0.0)], rho0, grid)
        u = propagator(h, 10.0)
        np.testing.assert_allclose(traj[-1], u @ rho0 @ u.conj().T, atol=1e-8)

    def test_exponential_decay(self):
        gamma = 0.2
        grid = TimeGrid(0.0, 2.0 / gamma, 2000)
        traj = integrate_lindblad(np.zeros((2, 2)), [(SM, gamma)], density([0, 1]), grid)
        for t_target in (1 / gamma, 2 / gamma):
            i = int(round(t_target / grid.dt))
            assert traj[i][1, 1].real == pytest.approx(math.exp(-gamma * grid.times[i]), abs=1e-6)

    def test_maximally_mixed_fixed_point(self):
        h = random_hermitian(np.random.default_rng(9), 6, 5.0)
        traj = integrate_lindblad(h, [], np.eye(6) / 6, TimeGrid(0, 1.0, 200))
        np.testing.assert_allclose(traj[-1], np.eye(6) / 6, atol=1e-10)

    def test_rejects_bad_initial_state(self):
        with pytest.raises(ValidationError):
            integrate_lindblad(np.zeros((2, 2)), [], np.diag([0.7, 0.7]), TimeGrid(0, 1, 10))

    def test_rejects_negative_rate(self):
        with pytest.raises(ValidationError):
            integrate_lindblad(np.zeros((2, 2)), [(SM, -1.0)], density([0, 1]), TimeGrid(0, 1, 10))

    def test_unstable_step_detected(self):
        # a step far beyond the RK4 stability limit of the decay destroys the state
        with pytest.raises(IntegrationError, match="reduce the step"):
            integrate_lindblad(0.01 * SX, [(SM, 10.0)], density([0, 1]), TimeGrid(0, 1.0, 2))

    def test_fast_coherent_dynamics_with_coarse_step(self):
        # the coherent part is exact, so a step of hundreds of Rabi radians stays
        # stable and its error is bounded by the decay per step, not by |H| dt
        gamma, n_coarse = 1e-3, 50
        h = 1.0 * SX
        grid = TimeGrid(0, 20.0, n_coarse)
        traj = integrate_lindblad(h, [(SM, gamma)], density([1, 0]), grid)
        fine = integrate_lindblad(h, [(SM, gamma)], density([1, 0]), TimeGrid(0, 20.0, 4000))
        assert np.max(np.abs(traj[-1] - fine[-1])) < 0.1 * gamma * grid.dt

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 18), n_ops=st.integers(0, 3))
    def test_trace_and_hermiticity(self, seed, dim, n_ops):
        rng = np.random.default_rng(seed)
        h = random_hermitian(rng, dim, 1e-3)
        ops = []
        for _ in range(n_ops):
            l = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            ops.append((l / np.linalg.norm(l, 2), float(rng.uniform(0, 0.5))))
        psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        traj = integrate_lindblad(h, ops, density(psi), TimeGrid(0.0, 2.0, 1000))
        for rho in traj:
            assert abs(np.trace(rho) - 1) < 1e-8
            assert np.max(np.abs(rho - rho.conj().T)) < 1e-12
            assert np.linalg.eigvalsh(rho)[0] >= -1e-8
