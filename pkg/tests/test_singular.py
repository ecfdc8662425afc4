import pytest

from triadne.core import ArgumentError
from triadne.gauss import big_G
from triadne.singular import (
    check_multiplicativity,
    euler_product_sigma,
    hensel_lower_bound_check,
    local_count_nu_d,
    local_count_nu_d_bruteforce,
    local_factor_T,
    singular_series_sigma,
)


class TestLocalCounts:
    def test_q1(self):
        assert local_count_nu_d(1, 4, 7) == 1

    def test_matches_bruteforce_small(self):
        for q, lam, d in [(2, 2, 3), (3, 2, 3), (4, 4, 3), (5, 3, 3),
                          (2, 2, 5), (3, 6, 4)]:
            assert (local_count_nu_d(q, lam, d)
                    == local_count_nu_d_bruteforce(q, lam, d))

    def test_d7_frozen_value(self):
        # frozen from an independent 3^14 brute-force scan
        assert local_count_nu_d(3, 2, 7) == 197316

    def test_crt_composite_modulus(self):
        for lam in (2, 6):
            assert (local_count_nu_d(6, lam, 3)
                    == local_count_nu_d(2, lam, 3) * local_count_nu_d(3, lam, 3))

    def test_invalid_args(self):
        with pytest.raises(ArgumentError):
            local_count_nu_d(0, 2, 3)


class TestOrthogonalityIdentity:
    @pytest.mark.parametrize("p,t", [(2, 1), (2, 2), (3, 1), (5, 1)])
    @pytest.mark.parametrize("lam", [2, 6])
    def test_gauss_series_equals_local_count(self, p, t, lam):
        d = 7
        q = p ** t
        series = sum(big_G(lam, p ** j, [0] * d, [0] * d, d)
                     for j in range(0, t + 1))
        lhs = float(p) ** (t * (2 * d - 3)) * series.real
        rhs = local_count_nu_d(q, lam, d)
        assert lhs == pytest.approx(rhs, rel=1e-6)


class TestLocalFactors:
    def test_odd_lambda_dies_at_two(self):
        est = local_factor_T(2, 3, 7)
        assert est.value == 0.0

    def test_stabilization_flag(self):
        est = local_factor_T(3, 2, 7, t_max=3)
        assert len(est.values) == 3
        assert est.stabilized

    def test_rejects_low_dimension(self):
        with pytest.raises(ArgumentError):
            local_factor_T(3, 2, 5)


class TestSingularSeries:
    @pytest.mark.parametrize("lam", [2, 6])
    def test_series_matches_euler_product(self, lam):
        val, tail = singular_series_sigma(lam, 7, q_max=32)
        prod, _ = euler_product_sigma(lam, 7)
        assert val == pytest.approx(prod, rel=0.02)
        assert tail >= 0.0

    def test_odd_lambda_product_zero(self):
        prod, _ = euler_product_sigma(3, 7)
        assert prod == 0.0

    def test_series_positive(self):
        val, _ = singular_series_sigma(4, 7, q_max=24)
        assert val > 0.5

    def test_rejects_bad_args(self):
        with pytest.raises(ArgumentError):
            singular_series_sigma(2, 5)
        with pytest.raises(ArgumentError):
            singular_series_sigma(2, 7, q_max=0)


class TestMultiplicativity:
    def test_coprime_pass(self):
        rep = check_multiplicativity(6, 3, 4, 7)
        assert rep.status == "pass"

    def test_non_coprime_rejected(self):
        with pytest.raises(ArgumentError):
            check_multiplicativity(6, 4, 6, 7)


class TestHensel:
    def test_full_check_passes(self):
        rep = hensel_lower_bound_check(3, 3, 4, 7)
        assert rep.status == "pass"
        assert rep.checks[0].passed

    def test_odd_lambda_hypothesis_not_met(self):
        rep = hensel_lower_bound_check(3, 3, 5, 7)
        assert rep.status == "hypothesis-not-met"

    def test_small_t_report_only(self):
        rep = hensel_lower_bound_check(3, 2, 4, 7)
        assert rep.status == "report-only"
        assert rep.passed
