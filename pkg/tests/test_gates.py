import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dotqubit.errors import ValidationError
from dotqubit.gates import (CNOT_TARGET, CPS_TARGET, N_J, SIGMA_X, SIGMA_Y, SIGMA_Z, X_AXIS,
                            Z_AXIS, PulseSequence, PulseStep, cnot, compile_cps, fidelity,
                            joint_evolution, makhlin_invariants, rotation, search_variants,
                            verify_matrix, verify_sequence)
from dotqubit.model import xy_hamiltonian
from dotqubit.numerics import HBAR_MEV_NS, propagator, unitarity_error


def expm_series(a, terms=60):
    """Independent oracle: truncated Taylor series of exp(a)."""
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for n in range(1, terms):
        term = term @ a / n
        out = out + term
    return out


def random_unitary(rng, d=4):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


unit_axes = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(
    lambda v: np.linalg.norm(v) > 0.1).map(lambda v: tuple(np.array(v) / np.linalg.norm(v)))
angles = st.floats(-10, 10)


class TestPaulis:
    def test_algebra(self):
        np.testing.assert_allclose(SIGMA_X @ SIGMA_Y, 1j * SIGMA_Z, atol=0)
        for s in (SIGMA_X, SIGMA_Y, SIGMA_Z):
            np.testing.assert_allclose(s @ s, np.eye(2))

    def test_raising_convention(self):
        # sigma^z = |e><e| - |v><v| with |v> first
        np.testing.assert_array_equal(SIGMA_Z, np.diag([-1, 1]))


class TestRotation:
    def test_zero_angle(self):
        np.testing.assert_array_equal(rotation(N_J, 0.0), np.eye(2))

    def test_z_half_pi(self):
        # i sigma^z = diag(i, -i) on (e, v), i.e. diag(-i, i) on (v, e)
        np.testing.assert_allclose(rotation(Z_AXIS, math.pi / 2), np.diag([-1j, 1j]), atol=1e-15)

    def test_series_oracle(self):
        n_sigma = sum(c * s for c, s in zip(N_J, (SIGMA_X, SIGMA_Y, SIGMA_Z)))
        np.testing.assert_allclose(rotation(N_J, math.pi / 3), expm_series(1j * math.pi / 3 * n_sigma),
                                   atol=1e-12)

    def test_non_unit_axis(self):
        with pytest.raises(ValidationError):
            rotation((1.0, 1.0, 0.0), 0.3)

    @given(axis=unit_axes, a=angles, b=angles)
    def test_additivity(self, axis, a, b):
        np.testing.assert_allclose(rotation(axis, a) @ rotation(axis, b), rotation(axis, a + b), atol=1e-12)


class TestJointEvolution:
    def test_zero(self):
        np.testing.assert_array_equal(joint_evolution(0.0), np.eye(4))

    def test_swap_point(self):
        u = joint_evolution(math.pi / 2)
        np.testing.assert_allclose(u @ [0, 1, 0, 0], [0, 0, 1j, 0], atol=1e-15)
        np.testing.assert_allclose(u @ [0, 0, 1, 0], [0, 1j, 0, 0], atol=1e-15)
        assert u[0, 0] == 1 and u[3, 3] == 1

    def test_matches_reversed_physical_evolution(self):
        g, phi = 2e-3, math.pi / 4
        t = phi * HBAR_MEV_NS / g
        physical = propagator(xy_hamiltonian(g), t)
        np.testing.assert_allclose(joint_evolution(phi), physical.conj().T, atol=1e-10)
        np.testing.assert_allclose(joint_evolution(-phi), physical, atol=1e-10)

    @given(a=angles, b=angles)
    def test_additivity(self, a, b):
        np.testing.assert_allclose(joint_evolution(a) @ joint_evolution(b), joint_evolution(a + b), atol=1e-12)


class TestSequences:
    def test_cps_literal_structure(self):
        seq, u = compile_cps()
        assert len(seq.steps) == 8 and seq.label == "cps-literal"
        assert unitarity_error(u) < 1e-10
        assert abs(abs(np.linalg.det(u)) - 1) < 1e-10

    def test_written_order_composition(self):
        a = PulseStep("rotation", qubit="j", axis=X_AXIS, angle=0.3)
        b = PulseStep("joint", phi=0.7)
        seq = PulseSequence((a, b))
        np.testing.assert_allclose(seq.matrix(), a.matrix() @ b.matrix(), atol=1e-15)

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            PulseSequence(())

    def test_bad_step(self):
        with pytest.raises(ValidationError):
            PulseStep("rotation", qubit="m", axis=X_AXIS, angle=1.0)
        with pytest.raises(ValidationError):
            PulseStep("teleport")

    def test_json_round_trip_is_bit_exact(self):
        seq, u = compile_cps()
        back = PulseSequence.from_json(seq.to_json())
        assert back == seq
        assert np.array_equal(back.matrix(), u)

    def test_json_strict_keys(self):
        with pytest.raises(ValidationError, match="unexpected"):
            PulseStep.from_dict({"kind": "joint", "phi": 1.0, "extra": 2})

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.one_of(
        st.builds(lambda q, ax, an: PulseStep("rotation", qubit=q, axis=ax, angle=an),
                  st.sampled_from("jk"), unit_axes, angles),
        st.builds(lambda p: PulseStep("joint", phi=p), angles),
        st.builds(lambda t: PulseStep("global_phase", theta=t), angles)), min_size=1, max_size=10))
    def test_compiled_sequences_unitary_and_round_trip(self, steps):
        seq = PulseSequence(tuple(steps), "random")
        assert unitarity_error(seq.matrix()) < 1e-10
        assert PulseSequence.from_json(seq.to_json()) == seq


class TestFidelity:
    def test_self(self):
        seq, u = compile_cps()
        assert verify_sequence(seq, u).fidelity == pytest.approx(1.0, abs=1e-12)

    def test_identity_vs_cps(self):
        assert fidelity(CPS_TARGET, np.eye(4)) == pytest.approx(0.25, abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            verify_matrix(np.eye(2), CPS_TARGET)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), theta=st.floats(-math.pi, math.pi))
    def test_bounds_and_phase_invariance(self, seed, theta):
        rng = np.random.default_rng(seed)
        a, b = random_unitary(rng), random_unitary(rng)
        f = fidelity(a, b)
        assert 0.0 <= f <= 1.0 + 1e-12
        assert f < 1 - 1e-6  # independent Haar draws are never phase-equivalent
        rep = verify_matrix(np.exp(1j * theta) * a, a)
        assert rep.fidelity == pytest.approx(1.0, abs=1e-12) and rep.passed


class TestCPSVerification:
    def test_literal_sequence_report(self):
        seq, _ = compile_cps()
        rep = verify_sequence(seq, CPS_TARGET)
        # the composition is locally equivalent to the CPS but not equal to it
        assert rep.locally_equivalent
        assert not rep.passed
        assert rep.fidelity == pytest.approx(0.25, abs=1e-12)

    def test_makhlin_local_invariance(self):
        rng = np.random.default_rng(4)
        local = np.kron(random_unitary(rng, 2), random_unitary(rng, 2))
        g_a, g_b = makhlin_invariants(CPS_TARGET), makhlin_invariants(local @ CPS_TARGET)
        np.testing.assert_allclose(g_a, g_b, atol=1e-12)
        np.testing.assert_allclose(makhlin_invariants(CPS_TARGET), (0, 1), atol=1e-12)


class TestSearch:
    def test_base_already_matches(self):
        seq, u = compile_cps()
        best, ranked = search_variants(seq, u)
        assert best.fidelity == pytest.approx(1.0, abs=1e-12)
        assert best.signs == (1,) * 8 and best.joint_sign == 1
        assert len(ranked) == 2 ** 9

    def test_recovers_single_flip(self):
        seq, _ = compile_cps()
        steps = list(seq.steps)
        steps[4] = steps[4].flipped()
        target = PulseSequence(tuple(steps)).matrix()
        best, _ = search_variants(seq, target)
        assert best.fidelity == pytest.approx(1.0, abs=1e-12)
        # sign patterns differing only by a global phase tie; any of them is a valid recovery
        assert verify_matrix(best.sequence.matrix(best.joint_sign), target, tol=1e-12).passed

    def test_step_limit(self):
        seq = PulseSequence(tuple(PulseStep("joint", phi=0.1) for _ in range(11)))
        with pytest.raises(ValidationError):
            search_variants(seq, np.eye(4))


class TestCnot:
    def test_ideal_input_gives_cnot(self):
        res = cnot()
        assert res.truth_table_ok and res.equals_cnot and res.warning is None
        assert verify_matrix(res.matrix, CNOT_TARGET, tol=1e-10).passed
        outputs = {r["input"]: r["output"] for r in res.basis_action}
        assert outputs == {"vv": "vv", "ve": "ve", "ev": "ee", "ee": "ev"}

    def test_literal_order_is_controlled_minus_x(self):
        res = cnot(order="literal")
        assert res.truth_table_ok and not res.equals_cnot
        expected = np.diag([1, 1, 0, 0]).astype(complex)
        expected[2, 3] = expected[3, 2] = -1
        np.testing.assert_allclose(res.matrix, expected, atol=1e-12)

    def test_identity_input(self):
        res = cnot(np.eye(4))
        np.testing.assert_allclose(res.matrix, np.eye(4), atol=1e-12)
        assert res.warning is not None

    @pytest.mark.parametrize("order", ["standard", "literal"])
    def test_involution(self, order):
        u = cnot(order=order).matrix
        assert verify_matrix(u @ u, np.eye(4), tol=1e-10).passed

    def test_unverified_literal_cps_warns(self):
        _, u = compile_cps()
        assert cnot(u).warning is not None

    def test_bad_order(self):
        with pytest.raises(ValidationError):
            cnot(order="sideways")
