import math

import numpy as np
import pytest

import vortexmoduli as vm
from vortexmoduli.bradlowmetric import orthonormalizing_map
from vortexmoduli.errors import NotPositiveDefinite


def random_gram(k, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((k + 1, k + 1)) + 1j * rng.standard_normal((k + 1, k + 1))
    return vm.GramMatrix(A @ A.conj().T + (k + 1) * np.eye(k + 1))


class TestBradlowCheck:
    def test_at_limit(self):
        assert vm.bradlow_check(1, 4 * math.pi) == "AtLimit"

    def test_allowed(self):
        assert vm.bradlow_check(1, 20.0) == "Allowed"

    def test_forbidden(self):
        assert vm.bradlow_check(2, 20.0) == "Forbidden"  # 8 pi > 20


class TestGramMatrix:
    def test_rejects_non_hermitian(self):
        with pytest.raises(NotPositiveDefinite):
            vm.GramMatrix(np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex))

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositiveDefinite):
            vm.GramMatrix(np.diag([1.0, -2.0]).astype(complex))

    def test_pairing_convention(self):
        H = random_gram(1, 4)
        b = np.array([1.0, 2j])
        c = np.array([0.5, -1j])
        manual = sum(
            b[i] * H.matrix[i, j] * np.conj(c[j]) for i in range(2) for j in range(2)
        )
        assert abs(H.pairing(b, c) - manual) < 1e-12


class TestGramDirect:
    def test_agrees_with_periods(self, sextic, sextic_periods):
        H_direct = vm.gram_direct(sextic, tol=1e-8)
        H_periods = vm.gram_from_periods(sextic_periods)
        rel = np.linalg.norm(H_direct.matrix - H_periods) / np.linalg.norm(H_periods)
        assert rel <= 1e-6

    def test_agrees_on_lemniscatic(self, lemniscatic, lemniscatic_periods):
        H_direct = vm.gram_direct(lemniscatic, tol=1e-8)
        H_periods = vm.gram_from_periods(lemniscatic_periods)
        rel = np.linalg.norm(H_direct.matrix - H_periods) / np.linalg.norm(H_periods)
        assert rel <= 1e-6

    def test_rotational_symmetry_kills_offdiagonal(self, sextic):
        H = vm.gram_direct(sextic)
        assert abs(H.matrix[0, 1]) <= 1e-6 * np.linalg.norm(H.matrix)

    def test_hermitian_positive_definite(self, sextic):
        H = vm.gram_direct(sextic)  # GramMatrix constructor enforces both
        assert H.dim == sextic.genus


class TestGaugeFixing:
    def test_gauge_direction_annihilated(self):
        H = random_gram(2, 7)
        a = vm.normalize_to_constraint(H, np.array([1.0, 0.3j, -0.2]), 3)
        out = vm.gauge_fixed_velocity(H, a, 1j * a)
        assert np.linalg.norm(out) < 1e-10

    def test_orthogonal_velocity_unchanged(self):
        H = random_gram(2, 8)
        rng = np.random.default_rng(1)
        a = vm.normalize_to_constraint(H, rng.standard_normal(3) + 1j * rng.standard_normal(3), 2)
        v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        v = v - (H.pairing(v, a) / H.pairing(a, a)) * a
        out = vm.gauge_fixed_velocity(H, a, v)
        assert np.linalg.norm(out - v) < 1e-10

    def test_postcondition_orthogonality(self):
        H = random_gram(3, 9)
        rng = np.random.default_rng(2)
        for _ in range(5):
            a = vm.normalize_to_constraint(
                H, rng.standard_normal(4) + 1j * rng.standard_normal(4), 2
            )
            v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            out = vm.gauge_fixed_velocity(H, a, v)
            assert abs(H.pairing(out, a)) < 1e-10 * np.linalg.norm(v)


class TestFibreMetric:
    def test_gauge_and_scaling_zero_modes(self):
        H = random_gram(2, 11)
        rng = np.random.default_rng(3)
        a = vm.normalize_to_constraint(H, rng.standard_normal(3) + 1j * rng.standard_normal(3), 2)
        assert abs(vm.fibre_metric(H, a, 1j * a, 0.01, 2)) < 1e-10
        assert abs(vm.fibre_metric(H, a, a, 0.01, 2)) < 1e-10
        assert abs(vm.fibre_metric(H, a, (2.0 - 1.5j) * a, 0.01, 2)) < 1e-10

    def test_orthonormal_closed_form(self):
        # H = identity, a = (sqrt(4 pi d), 0, ...), adot = (0, v, 0): (eps/2)|v|^2
        d, eps, k = 2, 0.01, 3
        H = vm.GramMatrix(np.eye(k + 1, dtype=complex))
        a = np.zeros(k + 1, dtype=complex)
        a[0] = math.sqrt(4 * math.pi * d)
        for v in (0.7, 1.3j, 0.4 - 0.9j):
            adot = np.zeros(k + 1, dtype=complex)
            adot[1] = v
            got = vm.fibre_metric(H, a, adot, eps, d)
            assert abs(got - 0.5 * eps * abs(v) ** 2) < 1e-12

    def test_nonnegativity_and_zero_set(self):
        H = random_gram(2, 13)
        rng = np.random.default_rng(5)
        for _ in range(20):
            a = vm.normalize_to_constraint(
                H, rng.standard_normal(3) + 1j * rng.standard_normal(3), 1
            )
            adot = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            val = vm.fibre_metric(H, a, adot, 0.01, 1)
            assert val >= 0
            # projecting adot onto span(a) gives exactly zero
            proj = (H.pairing(adot, a) / H.pairing(a, a)) * a
            assert abs(vm.fibre_metric(H, a, proj, 0.01, 1)) < 1e-10

    def test_h_unitary_invariance(self):
        H = random_gram(2, 15)
        T = orthonormalizing_map(H)
        rng = np.random.default_rng(6)
        a = vm.normalize_to_constraint(H, rng.standard_normal(3) + 1j * rng.standard_normal(3), 2)
        adot = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        Q = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))[0]
        U = np.linalg.solve(T, Q @ T)
        m1 = vm.fibre_metric(H, a, adot, 0.01, 2)
        m2 = vm.fibre_metric(H, U @ a, U @ adot, 0.01, 2)
        assert abs(m1 - m2) < 1e-9 * max(1.0, m1)

    def test_constraint_violation_rejected(self):
        H = random_gram(1, 17)
        with pytest.raises(ValueError):
            vm.fibre_metric(H, np.array([1.0, 0.0]), np.array([0.0, 1.0]), 0.01, 1)


class TestVerifyFS:
    def test_curve_derived_gram(self, sextic):
        # canonical fibre of the genus-2 curve: k = 1, d = 2g-2 = 2
        H = vm.gram_direct(sextic)
        report = vm.verify_fs(H, k=1, d=2, epsilon=0.01, trials=100, tol=1e-9)
        assert report["passed"]
        assert report["spread"] <= 1e-9
        assert report["c_fs"] > 0

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_synthetic_grams(self, k):
        for seed in range(3):
            H = random_gram(k, 100 + seed)
            report = vm.verify_fs(H, k=k, d=k, epsilon=0.02, trials=60, tol=1e-8, seed=seed)
            assert report["passed"]
            # c_fs = 2 pi d epsilon for this FS normalisation
            assert abs(report["c_fs"] - 2 * math.pi * k * 0.02) < 1e-6 * report["c_fs"]

    def test_phase_invariance_reported(self):
        H = random_gram(2, 19)
        report = vm.verify_fs(H, k=2, d=2, trials=40, seed=5)
        assert report["phase_residual"] < 1e-12
        assert report["unitary_residual"] < 1e-8

    def test_point_fibre(self):
        H = vm.GramMatrix(np.array([[2.0 + 0j]]))
        report = vm.verify_fs(H, k=0, d=1, trials=20)
        assert report["passed"] and report["c_fs"] == 0.0
