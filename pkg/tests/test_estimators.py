import math

import numpy as np
import numpy.testing as npt
import pytest

from ridgeprec.errors import (
    EmptyDataError,
    InvalidMatrixError,
    InvalidPenaltyError,
    InvalidTargetError,
    NotPositiveDefiniteError,
)
from ridgeprec.estimators import (
    KINDS,
    RidgeEstimate,
    Target,
    alt_ridge1,
    alt_ridge2,
    archetype1,
    archetype2,
    default_diagonal_target,
    fit,
    loglik,
    penalty_map_1,
    penalty_map_2,
    resolve_target,
    sample_cov,
    shrunk_eigenvalues,
    stationarity_residual,
)
from ridgeprec.linalg import inv_pd, is_pd

from oracles import fd_gradient_max_abs, newton_max_penalized, sample_cov_loop


class TestSampleCov:
    def test_identity_rows(self):
        npt.assert_array_equal(sample_cov(np.eye(2)), 0.5 * np.eye(2))

    def test_single_row_centered_is_zero(self):
        npt.assert_array_equal(sample_cov(np.array([[3.7, 3.7]]), center=True), np.zeros((2, 2)))

    def test_matches_outer_product_loop(self, rng):
        Y = rng.standard_normal((10, 4))
        npt.assert_allclose(sample_cov(Y), sample_cov_loop(Y), atol=1e-14)

    def test_centered_matches_loop(self, rng):
        Y = rng.standard_normal((9, 3)) + 5.0
        npt.assert_allclose(sample_cov(Y, center=True), sample_cov_loop(Y, center=True), atol=1e-13)

    def test_centered_divisor_stays_n(self, rng):
        Y = rng.standard_normal((6, 2))
        C = Y - Y.mean(axis=0)
        npt.assert_allclose(sample_cov(Y, center=True), C.T @ C / 6.0, atol=1e-15)

    def test_empty_rejected(self):
        with pytest.raises(EmptyDataError):
            sample_cov(np.empty((0, 3)))

    def test_nonfinite_rejected(self):
        with pytest.raises(InvalidMatrixError):
            sample_cov(np.array([[1.0, np.inf]]))


class TestTarget:
    def test_scalar_validation(self):
        with pytest.raises(InvalidTargetError):
            Target.scalar(-1.0)

    def test_diagonal_validation(self):
        with pytest.raises(InvalidTargetError):
            Target.diagonal([1.0, 0.0])

    def test_full_must_be_pd(self):
        with pytest.raises(InvalidTargetError):
            Target.full(np.diag([1.0, -2.0]))

    def test_zero_variants(self):
        assert Target.zero().is_zero
        assert Target.scalar(0.0).is_zero
        assert not Target.identity().is_zero

    def test_matrix_shapes(self):
        npt.assert_array_equal(Target.identity().matrix(3), np.eye(3))
        npt.assert_array_equal(Target.scalar(2.5).matrix(2), 2.5 * np.eye(2))
        npt.assert_array_equal(Target.diagonal([2.0, 4.0]).matrix(2), np.diag([2.0, 4.0]))

    def test_gamma_is_inverse(self):
        npt.assert_allclose(Target.scalar(2.0).gamma(2), 0.5 * np.eye(2))
        npt.assert_allclose(Target.diagonal([2.0, 4.0]).gamma(2), np.diag([0.5, 0.25]))
        A = np.array([[2.0, 0.5], [0.5, 1.0]])
        npt.assert_allclose(Target.full(A).gamma(2) @ A, np.eye(2), atol=1e-12)

    def test_gamma_rejects_zero(self):
        with pytest.raises(InvalidTargetError):
            Target.zero().gamma(2)

    def test_labels(self):
        assert Target.identity().label() == "identity"
        assert Target.zero().label() == "zero"
        assert Target.scalar(0.5).label() == "scalar:0.5"
        assert Target.diagonal([1.0, 2.0]).label() == "diagonal"

    def test_default_diagonal_target(self):
        T = default_diagonal_target(np.diag([2.0, 4.0]))
        npt.assert_array_equal(T.values, [0.5, 0.25])
        npt.assert_array_equal(default_diagonal_target(np.eye(3)).values, np.ones(3))

    def test_default_diagonal_unit_diag(self, rng):
        B = rng.standard_normal((4, 4)) * 0.2
        S = 0.5 * (B + B.T)
        np.fill_diagonal(S, 1.0)
        npt.assert_array_equal(default_diagonal_target(S).values, np.ones(4))

    def test_default_diagonal_rejects_nonpositive(self):
        with pytest.raises(InvalidTargetError):
            default_diagonal_target(np.diag([1.0, 0.0]))

    def test_resolve_target(self):
        t = Target.identity()
        assert resolve_target(t, np.eye(2)) is t
        got = resolve_target("ddiag", np.diag([2.0, 4.0]))
        npt.assert_array_equal(got.values, [0.5, 0.25])
        with pytest.raises(InvalidTargetError):
            resolve_target("bogus", np.eye(2))


class TestArchetype1:
    def test_full_penalty_returns_target(self):
        S = np.array([[4.0, 1.0], [1.0, 3.0]])
        est = archetype1(S, Target.identity(), 1.0)
        npt.assert_allclose(est.omega, np.eye(2), atol=1e-14)

    def test_scalar_example(self):
        est = archetype1(np.array([[2.0]]), Target.identity(), 0.5)
        npt.assert_allclose(est.omega, [[1.0 / 1.5]], rtol=1e-15)

    def test_singular_sample_cov_is_pd(self, rng):
        Y = rng.standard_normal((3, 6))
        S = sample_cov(Y)
        est = archetype1(S, "ddiag", 0.1)
        assert is_pd(est.omega, tol=0.0)

    def test_penalty_domain(self):
        S = np.eye(2)
        for bad in (0.0, -1.0, 1.5, np.inf):
            with pytest.raises(InvalidPenaltyError):
                archetype1(S, Target.identity(), bad)

    def test_zero_target_rejected(self):
        with pytest.raises(InvalidTargetError):
            archetype1(np.eye(2), Target.zero(), 0.5)


class TestArchetype2:
    def test_zero_matrix(self):
        est = archetype2(np.zeros((3, 3)), 2.0)
        npt.assert_allclose(est.omega, 0.5 * np.eye(3), atol=1e-15)

    def test_scalar_example(self):
        npt.assert_allclose(archetype2(np.array([[2.0]]), 3.0).omega, [[0.2]], rtol=1e-15)

    def test_singular_sample_cov_is_pd(self, rng):
        S = sample_cov(rng.standard_normal((2, 5)))
        assert is_pd(archetype2(S, 1e-3).omega, tol=0.0)

    def test_penalty_domain(self):
        with pytest.raises(InvalidPenaltyError):
            archetype2(np.eye(2), 0.0)


class TestAltRidge1:
    def test_identity_fixed_point(self):
        for lam in (0.1, 1.0, 100.0):
            est = alt_ridge1(np.eye(3), Target.identity(), lam)
            npt.assert_allclose(est.omega, np.eye(3), atol=1e-12)

    def test_scalar_example_closed_form(self):
        est = alt_ridge1(np.array([[2.0]]), Target.identity(), 1.0)
        npt.assert_allclose(est.omega[0, 0], (math.sqrt(5.0) - 1.0) / 2.0, rtol=1e-14)

    def test_scalar_matches_newton_oracle(self, rng):
        for _ in range(25):
            s = float(rng.uniform(0.0, 8.0))
            t = float(rng.uniform(0.1, 4.0))
            lam = float(10.0 ** rng.uniform(-3, 3))
            est = alt_ridge1(np.array([[s]]), Target.scalar(t), lam)
            ref = newton_max_penalized(s, t, lam)
            npt.assert_allclose(est.omega[0, 0], ref, rtol=1e-12)

    def test_large_penalty_reaches_target(self, rng, make_spd):
        S = make_spd(5, rng)
        est = alt_ridge1(S, Target.scalar(2.0), 1e8)
        T = 2.0 * np.eye(5)
        assert np.linalg.norm(est.omega - T) <= 1e-3 * np.linalg.norm(T)

    def test_small_penalty_monotone_to_inverse(self, rng, make_spd):
        S = make_spd(4, rng)
        Sinv = inv_pd(S)
        errs = [
            np.linalg.norm(alt_ridge1(S, "ddiag", lam).omega - Sinv)
            for lam in (1e-2, 1e-4, 1e-6, 1e-8, 1e-10)
        ]
        assert all(a > b for a, b in zip(errs, errs[1:]))
        assert errs[-1] <= 1e-6 * np.linalg.norm(Sinv)

    def test_inversion_free_route_agrees(self, rng):
        S = sample_cov(rng.standard_normal((4, 6)))
        t = default_diagonal_target(S)
        lam = 0.37
        est = alt_ridge1(S, t, lam)
        M = S - lam * t.matrix(6)
        route_b = (est.sigma - M) / lam
        assert np.linalg.norm(route_b - est.omega) <= 1e-9 * np.linalg.norm(est.omega)
        npt.assert_allclose(inv_pd(est.sigma), est.omega, atol=1e-9 * np.linalg.norm(est.omega))

    def test_zero_target_routes_to_type2(self):
        S = np.array([[2.0, 0.3], [0.3, 1.0]])
        est = alt_ridge1(S, Target.zero(), 0.8)
        assert est.kind == "alt-2"
        npt.assert_array_equal(est.omega, alt_ridge2(S, 0.8).omega)

    def test_rotation_equivariance_scalar_target(self, rng, make_spd):
        S = make_spd(5, rng)
        Q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
        lam, psi = 0.9, 1.7
        direct = alt_ridge1(Q @ S @ Q.T, Target.scalar(psi), lam).omega
        rotated = Q @ alt_ridge1(S, Target.scalar(psi), lam).omega @ Q.T
        assert np.linalg.norm(direct - rotated) <= 1e-9 * np.linalg.norm(direct)

    def test_penalty_domain(self):
        with pytest.raises(InvalidPenaltyError):
            alt_ridge1(np.eye(2), Target.identity(), -0.5)


class TestAltRidge2:
    def test_zero_matrix(self):
        npt.assert_allclose(alt_ridge2(np.zeros((2, 2)), 4.0).omega, 0.5 * np.eye(2), atol=1e-15)

    def test_scalar_example(self):
        est = alt_ridge2(np.array([[2.0]]), 4.0)
        npt.assert_allclose(est.omega[0, 0], (math.sqrt(5.0) - 1.0) / 4.0, rtol=1e-14)

    def test_scalar_matches_newton_oracle(self, rng):
        for _ in range(25):
            s = float(rng.uniform(0.0, 8.0))
            lam = float(10.0 ** rng.uniform(-3, 3))
            est = alt_ridge2(np.array([[s]]), lam)
            npt.assert_allclose(est.omega[0, 0], newton_max_penalized(s, 0.0, lam), rtol=1e-12)

    def test_huge_penalty_norm_bound(self, rng, make_spd):
        S = make_spd(6, rng)
        lam = 1e10
        assert np.linalg.norm(alt_ridge2(S, lam).omega) <= 2.0 * 6 / math.sqrt(lam)

    def test_singular_sample_cov_is_pd(self, rng):
        S = sample_cov(rng.standard_normal((2, 7)))
        assert is_pd(alt_ridge2(S, 1e-6).omega, tol=0.0)


class TestSharedInvariants:
    @pytest.fixture()
    def fits(self, rng):
        S = sample_cov(rng.standard_normal((5, 8)))  # singular, p > n
        t = default_diagonal_target(S)
        return S, t, [
            alt_ridge1(S, t, 0.42),
            alt_ridge2(S, 0.42),
            archetype1(S, t, 0.42),
            archetype2(S, 0.42),
        ]

    def test_omega_sigma_mutually_inverse(self, fits):
        S, _, ests = fits
        for est in ests:
            assert np.linalg.norm(est.omega @ est.sigma - np.eye(8)) <= 1e-8 * 8

    def test_covariance_identity_for_alternative_fits(self, fits):
        S, t, ests = fits
        for est in ests[:2]:
            T = est.target.matrix(8)
            lhs = S - est.lam * T
            rhs = est.sigma - est.lam * est.omega
            assert np.linalg.norm(lhs - rhs) <= 1e-10 * (1.0 + np.linalg.norm(S))

    def test_all_fits_pd(self, fits):
        _, _, ests = fits
        for est in ests:
            assert is_pd(est.omega, tol=0.0)


class TestShrunkEigenvalues:
    def test_type2_at_zero(self):
        npt.assert_allclose(shrunk_eigenvalues("alt-2", [0.0], 9.0), [3.0], rtol=1e-15)

    def test_type1_example(self):
        npt.assert_allclose(shrunk_eigenvalues("alt-1", [1.0], 5.0, psi=1.0), [1.0], rtol=1e-12)

    def test_archetype2_example(self):
        npt.assert_allclose(shrunk_eigenvalues("archetype-2", [2.0], 3.0), [5.0], rtol=1e-15)

    def test_archetype1_scalar_formula(self):
        got = shrunk_eigenvalues("archetype-1", [2.0], 0.25, psi=2.0)
        npt.assert_allclose(got, [0.75 * 2.0 + 0.25 / 2.0], rtol=1e-15)

    def test_matches_full_matrix_fit(self, rng):
        d = np.sort(rng.uniform(0.0, 5.0, size=4))[::-1]
        S = np.diag(d)
        lam, psi = 0.8, 1.3
        cov = shrunk_eigenvalues("alt-1", d, lam, psi=psi)
        est = alt_ridge1(S, Target.scalar(psi), lam)
        npt.assert_allclose(np.sort(np.diag(est.sigma)), np.sort(cov), rtol=1e-12)

    def test_domain_errors(self):
        with pytest.raises(InvalidPenaltyError):
            shrunk_eigenvalues("archetype-1", [1.0], 2.0)
        with pytest.raises(InvalidPenaltyError):
            shrunk_eigenvalues("alt-2", [1.0], 0.0)
        with pytest.raises(InvalidPenaltyError):
            shrunk_eigenvalues("nope", [1.0], 1.0)


class TestShrinkageDominance:
    def test_anchored_estimator_shrinks_at_least_as_much(self, rng):
        # covariance-side eigenvalues at matched penalty scales
        for _ in range(200):
            d = rng.uniform(0.0, 10.0, size=6)
            lam_a = float(10.0 ** rng.uniform(-3, 3))
            psi = float(10.0 ** rng.uniform(-1, 1))
            lam_1 = 1.0 - 1.0 / (lam_a * psi * psi + 1.0)
            alt = shrunk_eigenvalues("alt-1", d, lam_a, psi=psi)
            arch = shrunk_eigenvalues("archetype-1", d, lam_1, psi=psi)
            assert np.all(alt >= arch - 1e-12 * (1.0 + np.abs(arch)))

    def test_target_free_estimator_shrinks_less(self, rng):
        for _ in range(200):
            d = rng.uniform(0.0, 10.0, size=6)
            lam_2 = float(10.0 ** rng.uniform(-3, 3))
            alt = shrunk_eigenvalues("alt-2", d, lam_2 * lam_2)
            arch = shrunk_eigenvalues("archetype-2", d, lam_2)
            assert np.all(alt <= arch + 1e-12 * (1.0 + np.abs(arch)))


class TestPenaltyMaps:
    def test_map1_values(self):
        assert penalty_map_1(1.0) == pytest.approx(0.5)
        assert penalty_map_1(1e-9) == pytest.approx(1e-9, rel=1e-6)
        assert penalty_map_1(1e6) == pytest.approx(1.0, abs=2e-6)

    def test_map2_values(self):
        assert penalty_map_2(1.0) == 1.0
        assert penalty_map_2(2.0) == 4.0
        assert penalty_map_2(0.5) == 0.25

    def test_domains(self):
        with pytest.raises(InvalidPenaltyError):
            penalty_map_1(0.0)
        with pytest.raises(InvalidPenaltyError):
            penalty_map_2(-1.0)


class TestStationarityResidual:
    def test_inverse_gives_exact_value(self, rng, make_spd):
        S = make_spd(4, rng)
        T = Target.identity()
        lam = 0.7
        got = stationarity_residual(inv_pd(S), S, T, lam)
        want = lam * np.linalg.norm(inv_pd(S) - np.eye(4))
        npt.assert_allclose(got, want, rtol=1e-9)

    def test_fit_is_near_zero_and_perturbation_larger(self, rng, make_spd):
        S = make_spd(4, rng)
        lam = 0.9
        est = alt_ridge1(S, "ddiag", lam)
        base = stationarity_residual(est.omega, S, "ddiag", lam)
        assert base <= 1e-7 * np.linalg.norm(S)
        bumped = est.omega.copy()
        bumped[0, 0] += 0.1
        assert stationarity_residual(bumped, S, "ddiag", lam) > base

    def test_rejects_non_pd(self):
        with pytest.raises(NotPositiveDefiniteError):
            stationarity_residual(np.diag([1.0, -1.0]), np.eye(2), Target.identity(), 1.0)


class TestLoglik:
    def test_identity_case(self):
        assert loglik(np.eye(2), np.eye(2)) == pytest.approx(-2.0)

    def test_scalar_case(self):
        assert loglik(np.array([[2.0]]), np.zeros((1, 1))) == pytest.approx(math.log(2.0))

    def test_rejects_non_pd(self):
        with pytest.raises(NotPositiveDefiniteError):
            loglik(np.diag([1.0, -1.0]), np.eye(2))

    def test_matched_scale_likelihood_ordering(self, rng, make_spd):
        for _ in range(20):
            S = make_spd(4, rng)
            lam2 = float(10.0 ** rng.uniform(-2, 2))
            arch = loglik(archetype2(S, lam2).omega, S)
            alt = loglik(alt_ridge2(S, lam2 * lam2).omega, S)
            assert arch <= alt + 1e-12


class TestFitDispatch:
    def test_kinds_reachable(self, rng, make_spd):
        S = make_spd(3, rng)
        for kind in KINDS:
            est = fit(kind, S, 0.5, "ddiag")
            assert isinstance(est, RidgeEstimate)
            assert est.kind in KINDS

    def test_target_required(self):
        with pytest.raises(InvalidTargetError):
            fit("alt-1", np.eye(2), 0.5)
        with pytest.raises(InvalidTargetError):
            fit("archetype-1", np.eye(2), 0.5)

    def test_unknown_kind(self):
        with pytest.raises(InvalidPenaltyError):
            fit("lasso", np.eye(2), 0.5)


class TestGradientAtOptimum:
    def test_finite_difference_gradient_vanishes(self, rng, make_spd):
        S = make_spd(4, rng)
        t = Target.identity()
        lam = 1.3
        est = alt_ridge1(S, t, lam)
        assert fd_gradient_max_abs(est.omega, S, np.eye(4), lam) <= 1e-5
