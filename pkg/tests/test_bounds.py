import math

import numpy as np
import pytest

from wassdisc.bounds import (
    Regime,
    b_pd,
    bound_cube,
    bound_real_space,
    bound_w1_exponential_1d,
    bound_w1_moment_1d,
    bound_w1_refined,
    kappa,
    refined_window,
    reverse_bound,
    reverse_constant,
    saturated_level_sum,
    saturated_level_sum_bound,
)
from wassdisc.discrepancy import star_discrepancy
from wassdisc.errors import DomainError, RegimeViolationError
from wassdisc.measures import DiscreteMeasure, Domain, Norm, UniformCube, midpoint_grid, moment
from wassdisc.transport import wasserstein_1d

KAPPA_TABLE = {
    2: 9.7980, 3: 7.5595, 4: 6.7537, 5: 6.3096, 6: 6.0147, 7: 5.7983,
    8: 5.6299, 9: 5.4937, 10: 5.3806, 11: 5.2850, 12: 5.2028,
    20: 4.8087, 50: 4.3867, 100: 4.2182,
}


class TestKappa:
    @pytest.mark.parametrize("d,expected", sorted(KAPPA_TABLE.items()))
    def test_reference_values(self, d, expected):
        assert abs(kappa(d) - expected) <= 5e-5

    def test_strictly_decreasing_and_above_four(self):
        values = [kappa(d) for d in range(2, 201)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert all(v > 4.0 for v in values)
        assert 4.0 < kappa(200) < 4.2

    def test_rejects_dimension_one(self):
        with pytest.raises(RegimeViolationError):
            kappa(1)


class TestBpd:
    def test_hand_values(self):
        assert b_pd(2, 1) == pytest.approx(2.5, abs=0)       # (4+1)/(2*(2-1))
        assert b_pd(3, 1) == pytest.approx(1.5, abs=1e-15)   # (8+1)/(2*(4-1))

    def test_rejects_p_le_d(self):
        with pytest.raises(RegimeViolationError):
            b_pd(2, 2)
        with pytest.raises(RegimeViolationError):
            b_pd(1, 3)


class TestBoundCube:
    def test_zero_discrepancy_all_regimes(self):
        for p, d in [(2, 1), (1, 1), (2, 2), (1, 3), (1.2, 1)]:
            assert bound_cube(p, d, 0.0).value == 0.0

    def test_p_gt_d_linear_form(self):
        res = bound_cube(2, 1, 0.1, Norm.LINF)
        assert res.regime is Regime.P_GT_D
        assert res.value == pytest.approx(0.25, abs=1e-15)  # 2.5 * 0.1
        assert res.recomputed() == pytest.approx(res.value, abs=1e-12)

    def test_p_lt_d_constant(self):
        # 2^(-1/2) * (3 / (1 - 1/2) + 2) = 8 / sqrt(2), exponent p/d = 1/2
        res = bound_cube(1, 2, 0.25, Norm.LINF)
        assert res.regime is Regime.P_LT_D
        assert res.constant == pytest.approx(8 / math.sqrt(2), rel=1e-14)
        assert res.value == pytest.approx(8 / math.sqrt(2) * 0.5, rel=1e-14)

    def test_p_eq_d_log_term(self):
        d_inf = 0.25
        res = bound_cube(1, 1, d_inf)
        expected = (2.5 * d_inf) + 3 / (2 * math.log(2)) * d_inf * math.log(1 / d_inf)
        assert res.regime is Regime.P_EQ_D
        assert res.value == pytest.approx(expected, rel=1e-14)
        assert bound_cube(1, 1, 1.0).secondary == 0.0  # log(1/1) kills the term

    def test_refined_window_boundary(self):
        assert refined_window(1.2, 1)
        assert not refined_window(2, 1)
        assert refined_window(2, 2)
        threshold = 2 + math.log(1 + math.sqrt(1 + 2 ** 0)) / math.log(2) - 1
        assert refined_window(threshold - 1e-9, 2)
        assert not refined_window(threshold + 1e-9, 2)

    def test_refined_below_one_term_bound(self):
        for d_inf in (0.01, 0.2, 0.9, 1.0):
            res = bound_cube(1.2, 1, d_inf)
            assert res.regime is Regime.REFINED
            one_term = 1.0 ** 1.2 * b_pd(1.2, 1) * d_inf
            assert res.value <= one_term + 1e-15
            assert res.secondary <= 0.0
            assert res.recomputed() == pytest.approx(res.value, abs=1e-12)

    def test_norm_diameter_scaling(self):
        r_inf = bound_cube(1, 2, 0.3, Norm.LINF)
        r_l2 = bound_cube(1, 2, 0.3, Norm.L2)
        r_l1 = bound_cube(1, 2, 0.3, Norm.L1)
        assert r_l2.value == pytest.approx(math.sqrt(2) * r_inf.value, rel=1e-14)
        assert r_l1.value == pytest.approx(2 * r_inf.value, rel=1e-14)

    def test_rejects_out_of_range_discrepancy(self):
        with pytest.raises(DomainError):
            bound_cube(2, 1, 1.5)


class TestRefinedW1:
    def test_uniform_discrepancy_form(self):
        res = bound_w1_refined(2, 1.0, Norm.LINF)
        assert res.value == pytest.approx(2 * math.sqrt(6), rel=1e-14)  # 2^(-1/2)*sqrt(3)*4

    def test_star_form_is_kappa(self):
        res = bound_w1_refined(2, 1.0, Norm.LINF, star=True)
        assert res.value == pytest.approx(kappa(2), rel=1e-14)
        assert res.constant == pytest.approx(2 * bound_w1_refined(2, 1.0).constant, rel=1e-14)

    def test_zero(self):
        assert bound_w1_refined(3, 0.0).value == 0.0

    def test_rejects_dimension_one(self):
        with pytest.raises(RegimeViolationError):
            bound_w1_refined(1, 0.5)


class TestSaturatedLevelSum:
    def directsum(self, u, dinf, p, d, terms=400):
        total = 0.0
        for ell in range(terms):
            capped = u if d * ell > 1000 else min(u, 2.0 ** (d * ell) * dinf)
            total += 2.0 ** (-p * ell) * capped
        return total

    def test_worked_example(self):
        # 0.25 + 0.125 + geometric tail 1/12 = 11/24
        assert saturated_level_sum(1, 0.25, 2, 1) == pytest.approx(11 / 24, abs=1e-15)
        assert saturated_level_sum_bound(1, 0.25, 2, 1) == pytest.approx(0.5, abs=1e-15)

    def test_saturated_from_start(self):
        for p in (0.5, 1, 2):
            for d in (1, 2):
                v = saturated_level_sum(0.125, 0.5, p, d)
                assert v == pytest.approx(0.125 / (1 - 2.0 ** -p), rel=1e-14)

    @pytest.mark.parametrize("p", [0.5, 1, 2, 3])
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_matches_direct_summation(self, p, d):
        for u_exp in (0, 2, 5, 9):
            for d_exp in (0, 1, 4, 8):
                u, dinf = 2.0 ** -u_exp, 2.0 ** -d_exp
                assert saturated_level_sum(u, dinf, p, d) == pytest.approx(
                    self.directsum(u, dinf, p, d), rel=1e-12)

    def test_full_sweep_below_case_bound(self):
        count = 0
        for u_exp in range(0, 10):
            for d_exp in range(0, 10):
                for p in (0.5, 1, 2, 3):
                    for d in (1, 2, 3):
                        u, dinf = 2.0 ** -u_exp, 2.0 ** -d_exp
                        lhs = saturated_level_sum(u, dinf, p, d)
                        rhs = saturated_level_sum_bound(u, dinf, p, d)
                        assert lhs <= rhs * (1 + 1e-12) + 1e-15, (u, dinf, p, d)
                        count += 1
        assert count >= 160

    def test_small_u_branch(self):
        for p, d in [(1, 1), (1, 2), (2, 3)]:
            u, dinf = 2.0 ** -(d + 2), 1.0  # u < 2^-d * dinf
            assert saturated_level_sum_bound(u, dinf, p, d) == pytest.approx(
                u / (1 - 2.0 ** -p), rel=1e-14)

    def test_rejects_bad_arguments(self):
        with pytest.raises(DomainError):
            saturated_level_sum(0.0, 0.5, 1, 1)
        with pytest.raises(DomainError):
            saturated_level_sum(1.0, 0.0, 1, 1)


class TestRealSpaceShape:
    def test_exponent_below_crossover(self):
        assert bound_real_space(1, 4, 2, 0.5, 2.0).exponent == pytest.approx(0.5)

    def test_exponent_above_crossover(self):
        assert bound_real_space(3, 4, 2, 0.5, 2.0).exponent == pytest.approx(0.25)

    def test_zero_discrepancy(self):
        assert bound_real_space(1, 4, 2, 0.0, 5.0).value == 0.0

    def test_moment_floor_at_one(self):
        small = bound_real_space(1, 4, 2, 0.5, 0.001)
        assert small.constant == 1.0

    def test_excluded_parameters(self):
        with pytest.raises(RegimeViolationError):
            bound_real_space(2, 4, 2, 0.5, 1.0)  # p = d
        with pytest.raises(RegimeViolationError):
            bound_real_space(4 / 3, 4, 2, 0.5, 1.0)  # p = dq/(q+d)


class TestOneDimensionalBounds:
    def test_moment_bound_values(self):
        assert bound_w1_moment_1d(2, 1.0, 0.25) == pytest.approx(1.0, abs=1e-15)
        assert bound_w1_moment_1d(4, 3.0, 0.0) == 0.0

    def test_moment_bound_dominates_w1(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            n, m = int(rng.integers(2, 20)), int(rng.integers(2, 20))
            mu = DiscreteMeasure(3 * (2 * rng.random((n, 1)) - 1),
                                 rng.dirichlet(np.ones(n)), Domain.REAL_SPACE)
            nu = DiscreteMeasure(3 * (2 * rng.random((m, 1)) - 1),
                                 rng.dirichlet(np.ones(m)), Domain.REAL_SPACE)
            w1 = wasserstein_1d(mu, nu, 1)
            ds = star_discrepancy(mu, nu)
            for q in (2.0, 4.0):
                mq = 0.5 * (moment(mu, q, Norm.LINF) + moment(nu, q, Norm.LINF))
                assert w1 <= bound_w1_moment_1d(q, mq, ds) * (1 + 1e-9) + 1e-12

    def test_exponential_bound_value(self):
        v = bound_w1_exponential_1d(1.0, 2.0, math.exp(-1), math.exp(-1))
        assert v == pytest.approx(4 / math.e, rel=1e-15)

    def test_exponential_bound_dominates_w1(self):
        from wassdisc.discrepancy import uniform_discrepancy
        rng = np.random.default_rng(5)
        lam = 1.0
        for _ in range(20):
            n, m = int(rng.integers(2, 15)), int(rng.integers(2, 15))
            mu = DiscreteMeasure(2 * rng.random((n, 1)) - 1,
                                 rng.dirichlet(np.ones(n)), Domain.REAL_SPACE)
            nu = DiscreteMeasure(2 * rng.random((m, 1)) - 1,
                                 rng.dirichlet(np.ones(m)), Domain.REAL_SPACE)
            eexp = float(np.dot(mu.weights, np.exp(lam * np.abs(mu.points[:, 0])))
                         + np.dot(nu.weights, np.exp(lam * np.abs(nu.points[:, 0]))))
            ds = star_discrepancy(mu, nu)
            di = uniform_discrepancy(mu, nu)
            if ds == 0.0:
                continue
            w1 = wasserstein_1d(mu, nu, 1)
            assert w1 <= bound_w1_exponential_1d(lam, eexp, ds, di) * (1 + 1e-9) + 1e-12

    def test_zero_discrepancy_short_circuits(self):
        assert bound_w1_exponential_1d(2.0, 3.0, 0.0, 0.5) == 0.0


class TestReverseBound:
    def test_constant_values(self):
        assert reverse_constant(1, 1) == pytest.approx(math.sqrt(2), rel=1e-15)
        assert reverse_constant(1, 2) == pytest.approx(
            3 ** (-1 / 3) * (2 ** (1 / 3) + 2 ** (-2 / 3)), rel=1e-14)

    def test_symmetric_in_r_and_d(self):
        assert reverse_constant(2, 1) == pytest.approx(reverse_constant(1, 2), rel=1e-14)

    def test_limit_toward_one(self):
        assert reverse_constant(1, 50) < reverse_constant(1, 5)
        assert reverse_constant(1, 400) == pytest.approx(1.0, abs=3e-3)

    def test_non_integer_r(self):
        # Gamma extension is continuous in r
        vals = [reverse_constant(r, 2) for r in (1.0, 1.5, 2.0)]
        assert vals[0] > vals[1] > vals[2] or vals[0] < vals[1] < vals[2]

    def test_zero_w1(self):
        assert reverse_bound(1, 1, 0.0, 1.0).value == 0.0

    def test_midpoint_family_dominated(self):
        # exact values: dstar = 1/(2n), W1 = 1/(4n) against the uniform law
        for n in (1, 2, 4, 16, 64, 256):
            ds = star_discrepancy(midpoint_grid(n), UniformCube(1))
            w1 = wasserstein_1d(midpoint_grid(n), UniformCube(1), 1)
            rb = reverse_bound(1, 1, w1, 1.0)
            assert ds <= rb.value + 1e-12

    def test_recompute_identity(self):
        res = reverse_bound(2, 2, 0.3, 1.7)
        assert res.recomputed() == pytest.approx(res.value, abs=1e-12)
