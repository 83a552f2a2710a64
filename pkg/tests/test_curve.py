import math

import numpy as np
import pytest
from scipy.linalg import expm

from cryptononlocal.curve import (
    CurveSpec,
    curve_point,
    make_curve,
    partition,
    pauli_frame,
    planarity_residual,
    rotation_unitary,
    verify_partition_spacing,
)
from cryptononlocal.ensembles import random_omega, random_schmidt, random_unitary
from cryptononlocal.errors import PreconditionError, SpectrumError
from cryptononlocal.operators import CoefficientVector, HermitianOperator, Side, build_basis, devectorize, vectorize
from cryptononlocal.states import SchmidtBasis, dense_expectation, joint_average, make_state

SZ = np.diag([1.0, -1.0])
SY = np.array([[0, -1j], [1j, 0]])


class TestPauliFrame:
    def test_qubit_sigma_z(self):
        frame = pauli_frame(HermitianOperator(SZ))
        np.testing.assert_allclose(frame.e_plus, [1, 0])
        np.testing.assert_allclose(frame.e_minus, [0, 1])
        assert frame.kernel_basis.shape == (2, 0)

    def test_diagonal_four(self):
        frame = pauli_frame(HermitianOperator(np.diag([1.0, 0, 0, -1.0])))
        k = frame.kernel_basis
        np.testing.assert_allclose(k @ k.conj().T, np.diag([0, 1, 1, 0]), atol=1e-15)

    @pytest.mark.parametrize("n", [2, 3, 4, 6])
    def test_rotated_reconstruction_and_algebra(self, rng, n):
        op = random_omega(rng, n)
        frame = pauli_frame(op)
        sx, sy, sz = (s.matrix for s in frame.sigma)
        np.testing.assert_allclose(sz, op.matrix, atol=1e-10)
        pl = frame.plane_projector
        for s in (sx, sy, sz):
            np.testing.assert_allclose(s @ s, pl, atol=1e-12)
        np.testing.assert_allclose(sx @ sy, 1j * sz, atol=1e-12)
        np.testing.assert_allclose(sy @ sz, 1j * sx, atol=1e-12)
        np.testing.assert_allclose(frame.kernel_basis.conj().T @ pl, 0, atol=1e-12)
        assert np.linalg.norm(frame.a_tilde) == 1.0

    def test_deterministic(self, rng):
        op = random_omega(rng, 4)
        a, b = pauli_frame(op), pauli_frame(op)
        np.testing.assert_array_equal(a.sigma[0].matrix, b.sigma[0].matrix)

    def test_wrong_spectrum(self):
        with pytest.raises(SpectrumError):
            pauli_frame(HermitianOperator(np.diag([2.0, 0.0, -1.0])))


class TestRotationUnitary:
    def test_zero_angle(self, rng):
        frame = pauli_frame(random_omega(rng, 3))
        np.testing.assert_allclose(rotation_unitary(frame, (1, 0, 0), 0.0), np.eye(3), atol=1e-15)

    def test_matches_expm(self, rng):
        frame = pauli_frame(random_omega(rng, 4))
        c = np.array([0.6, 0.8, 0.0])
        cs = sum(ck * s.matrix for ck, s in zip(c, frame.sigma))
        for theta in (0.3, 1.7, math.pi, 2 * math.pi):
            # exp of the generator restricted to L; K stays fixed
            oracle = expm(0.5j * theta * cs)
            v = rotation_unitary(frame, c, theta)
            np.testing.assert_allclose(v, oracle, atol=1e-12)
            np.testing.assert_allclose(v @ v.conj().T, np.eye(4), atol=1e-12)

    def test_double_cover(self):
        op = HermitianOperator(SZ)
        frame = pauli_frame(op)
        v = rotation_unitary(frame, (1, 0, 0), 2 * math.pi)
        np.testing.assert_allclose(v, -np.eye(2), atol=1e-15)
        np.testing.assert_allclose(v @ op.matrix @ v.conj().T, op.matrix, atol=1e-15)

    def test_half_turn_flips_plane_only(self, rng):
        op = random_omega(rng, 5)
        frame = pauli_frame(op)
        v = rotation_unitary(frame, (0, 1, 0), math.pi)
        np.testing.assert_allclose(v @ op.matrix @ v.conj().T, -op.matrix, atol=1e-12)
        k = frame.kernel_basis
        np.testing.assert_allclose(v @ k, k, atol=1e-12)

    def test_axis_checks(self):
        frame = pauli_frame(HermitianOperator(SZ))
        with pytest.raises(PreconditionError):
            rotation_unitary(frame, (0, 0, 1), 1.0)
        with pytest.raises(PreconditionError):
            rotation_unitary(frame, (2, 0, 0), 1.0)


@pytest.fixture
def qubit_basis():
    return build_basis(SchmidtBasis.standard(2))


class TestCurvePoint:
    def test_endpoints(self, rng):
        basis = build_basis(random_schmidt(rng, 3))
        a = vectorize(random_omega(rng, 3), basis)
        spec = make_curve(a, basis)
        np.testing.assert_allclose(curve_point(spec, basis, 0.0).values, a.values, atol=1e-12)
        np.testing.assert_allclose(curve_point(spec, basis, math.pi).values, -a.values, atol=1e-12)

    def test_quarter_turn_gives_sigma_y(self, qubit_basis):
        a = vectorize(HermitianOperator(SZ), qubit_basis)
        spec = make_curve(a, qubit_basis, axis=(1, 0, 0))
        got = curve_point(spec, qubit_basis, math.pi / 2)
        # direct conjugation oracle: cos(t) sz + sin(t) sy at t = pi/2
        u = expm(0.25j * math.pi * np.array([[0, 1], [1, 0]]))
        expected = vectorize(HermitianOperator(u @ SZ @ u.conj().T, symmetrize=True), qubit_basis)
        np.testing.assert_allclose(got.values, expected.values, atol=1e-12)
        np.testing.assert_allclose(got.values, vectorize(HermitianOperator(SY), qubit_basis).values, atol=1e-12)

    def test_norm_and_spectrum_preserved(self, rng):
        basis = build_basis(random_schmidt(rng, 4))
        a = vectorize(random_omega(rng, 4), basis)
        spec = make_curve(a, basis)
        for theta in rng.uniform(0, math.pi, 100):
            p = curve_point(spec, basis, theta)
            assert p.norm == pytest.approx(a.norm, abs=1e-10)
            vals = np.linalg.eigvalsh(devectorize(p, basis).matrix)[::-1]
            np.testing.assert_allclose(vals, [1, 0, 0, -1], atol=1e-8)

    def test_out_of_range(self, qubit_basis):
        spec = make_curve(vectorize(HermitianOperator(SZ), qubit_basis), qubit_basis)
        with pytest.raises(PreconditionError):
            curve_point(spec, qubit_basis, 4.0)

    def test_planarity(self, rng):
        basis = build_basis(random_schmidt(rng, 3))
        spec = make_curve(vectorize(random_omega(rng, 3), basis), basis)
        assert planarity_residual(spec, basis, np.linspace(0, math.pi, 25)) < 1e-10


class TestPartition:
    def test_single_step(self, qubit_basis):
        a = vectorize(HermitianOperator(SZ), qubit_basis)
        pts = partition(make_curve(a, qubit_basis), qubit_basis, 1)
        assert len(pts) == 2
        assert pts[1].dot(pts[0]) == pytest.approx(-a.norm_sq, abs=1e-12)

    def test_two_steps_orthogonal(self, rng):
        basis = build_basis(random_schmidt(rng, 3))
        a = vectorize(random_omega(rng, 3), basis)
        pts = partition(make_curve(a, basis), basis, 2)
        assert pts[1].dot(pts[0]) == pytest.approx(0.0, abs=1e-10)

    def test_eight_steps_via_joint_average(self, rng):
        state = make_state(random_schmidt(rng, 3))
        fa, fb = state.basis(Side.ALICE), state.basis(Side.BOB)
        a = vectorize(random_omega(rng, 3), fa)
        pts = partition(make_curve(a, fa), fa, 8)
        target = a.norm_sq * math.cos(math.pi / 8)
        for p, q in zip(pts, pts[1:]):
            assert q.dot(p) == pytest.approx(target, abs=1e-10)
            # the same number from the quantum side: N <A(a_j) B(a_{j+1})>
            dense = dense_expectation(state, devectorize(p, fa), devectorize(q.on(Side.BOB), fb))
            assert 3 * joint_average(state, p, q.on(Side.BOB)) == pytest.approx(target, abs=1e-10)
            assert 3 * dense == pytest.approx(target, abs=1e-10)

    def test_zero(self, qubit_basis):
        spec = make_curve(vectorize(HermitianOperator(SZ), qubit_basis), qubit_basis)
        with pytest.raises(PreconditionError):
            partition(spec, qubit_basis, 0)

    def test_non_planar_angle_refused(self, qubit_basis):
        spec = make_curve(vectorize(HermitianOperator(SZ), qubit_basis), qubit_basis)
        spec = CurveSpec(spec.source, spec.frame, spec.axis, total_angle=1.5 * math.pi)
        with pytest.raises(PreconditionError):
            partition(spec, qubit_basis, 3)


class TestSpacing:
    def test_partition_is_uniform(self, rng):
        basis = build_basis(random_schmidt(rng, 4))
        spec = make_curve(vectorize(random_omega(rng, 4), basis), basis)
        rep = verify_partition_spacing(partition(spec, basis, 16), math.pi)
        assert rep.uniform_ok and rep.max_deviation < 1e-10

    def test_longer_path(self, qubit_basis):
        # a -> y -> x -> -a: three quarter-circle arcs, total angle 3 pi / 2
        z = vectorize(HermitianOperator(SZ), qubit_basis)
        y = vectorize(HermitianOperator(SY), qubit_basis)
        x = vectorize(HermitianOperator(np.array([[0, 1.0], [1.0, 0]])), qubit_basis)
        pts = [z, y, x, -z]
        assert verify_partition_spacing(pts, 1.5 * math.pi).uniform_ok
        assert not verify_partition_spacing(pts, math.pi).uniform_ok

    def test_perturbed_point(self, rng):
        basis = build_basis(random_schmidt(rng, 3))
        spec = make_curve(vectorize(random_omega(rng, 3), basis), basis)
        pts = partition(spec, basis, 6)
        vals = pts[3].values.copy()
        vals[0] += 1e-3
        pts[3] = CoefficientVector(vals)
        rep = verify_partition_spacing(pts, math.pi)
        assert not rep.uniform_ok and rep.max_deviation > 1e-5
