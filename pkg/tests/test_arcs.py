import math
from fractions import Fraction

import numpy as np
import pytest

from triadne.core import ArgumentError
from triadne.arcs import (
    ArcLabel,
    RationalPoint3,
    bilinear_sum_F,
    classify_arc,
    dirichlet_approx,
    major_arc_approx,
    minor_arc_scan,
    weyl_sum_S,
)
from triadne.operators import GridFunction


def _brute_S(N, al, xi=0.0, eta=0.0):
    total = 0j
    for x in range(-N, N + 1):
        for y in range(-N, N + 1):
            ph = (al[0] * x * x + al[1] * 2 * x * y + al[2] * y * y
                  + xi * x + eta * y)
            total += np.exp(2j * np.pi * ph)
    return total


class TestWeylSum:
    def test_zero_phase(self):
        for N in (1, 3, 7):
            assert weyl_sum_S(N, (0, 0, 0)) == pytest.approx((2 * N + 1) ** 2)

    def test_half_integer_nine_terms(self):
        # 9-term hand evaluation: rows x = +-1 contribute e(1/2)*3 = -3 each,
        # row x = 0 contributes 3, so the total is -3
        assert weyl_sum_S(1, (0.5, 0, 0)) == pytest.approx(-3.0, abs=1e-12)

    def test_matches_bruteforce(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            al = tuple(rng.random(3))
            xi, eta = rng.random(2)
            assert weyl_sum_S(5, al, xi, eta) == pytest.approx(
                _brute_S(5, al, xi, eta), abs=1e-10)

    def test_conjugation(self):
        rng = np.random.default_rng(8)
        al = tuple(rng.random(3))
        xi, eta = rng.random(2)
        assert weyl_sum_S(4, tuple(-v for v in al), -xi, -eta) == pytest.approx(
            np.conj(weyl_sum_S(4, al, xi, eta)), abs=1e-12)

    def test_integer_shift_invariance(self):
        al = (0.13, 0.27, 0.56)
        shifted = (al[0] + 2, al[1] - 1, al[2] + 3)
        assert weyl_sum_S(3, shifted, 1.25 + 1, 0.4 - 2) == pytest.approx(
            weyl_sum_S(3, al, 1.25, 0.4), abs=1e-9)

    def test_invalid_N(self):
        with pytest.raises(ArgumentError):
            weyl_sum_S(0, (0, 0, 0))


class TestDirichlet:
    def test_one_third(self):
        assert dirichlet_approx(1 / 3, 10, 2) == (3, 1)

    def test_zero(self):
        q, a = dirichlet_approx(0.0, 10, 2)
        assert (q, a) == (1, 0)

    def test_property_random(self):
        rng = np.random.default_rng(10)
        N, P = 40, 5
        for _ in range(1000):
            alpha = float(rng.random())
            q, a = dirichlet_approx(alpha, N, P)
            assert 1 <= q <= N * N // P
            assert abs(q * alpha - a) <= P / (N * N) + 1e-15

    def test_invalid_P(self):
        with pytest.raises(ArgumentError):
            dirichlet_approx(0.5, 10, 11)


class TestClassifyArc:
    def test_origin_major_both_systems(self):
        for system in ("M", "N"):
            lab = classify_arc((0.0, 0.0, 0.0), 16, 3, system)
            assert lab.status == "major"
            q, b = lab.center.joint()
            assert q == 1

    def test_golden_minor(self):
        g = (math.sqrt(5) - 1) / 2
        assert classify_arc((g, g, g), 64, 4, "M").status == "minor"
        assert classify_arc((g, g, g), 64, 4, "N").status == "minor"

    def test_joint_major_subset_of_split_major(self):
        rng = np.random.default_rng(12)
        N, P = 32, 4
        for _ in range(100):
            q = int(rng.integers(1, P + 1))
            b = [int(v) for v in rng.integers(1, q + 1, 3)]
            if math.gcd(math.gcd(q, b[0]), math.gcd(b[1], b[2])) != 1:
                continue
            eps = rng.uniform(-1, 1, 3) * (P / (q * N * N)) * 0.9
            alpha = tuple((bi / q + e) % 1.0 for bi, e in zip(b, eps))
            if classify_arc(alpha, N, P, "M").status == "major":
                assert classify_arc(alpha, N, P, "N").status == "major"

    def test_partition(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            alpha = tuple(rng.random(3))
            lab = classify_arc(alpha, 16, 4, "M")
            assert lab.status in ("major", "minor")
            assert (lab.center is not None) == (lab.status == "major")

    def test_invalid_system(self):
        with pytest.raises(ArgumentError):
            classify_arc((0, 0, 0), 16, 4, "X")
        with pytest.raises(ArgumentError):
            ArcLabel(system="Z", status="major", center=None, P=1, N=4)


class TestRationalPoint3:
    def test_joint_form_primitive(self):
        pt = RationalPoint3.from_fractions([Fraction(1, 2), Fraction(1, 3), 0])
        q, b = pt.joint()
        assert q == 6 and b == (3, 2, 6)
        g = math.gcd(math.gcd(q, b[0]), math.gcd(b[1], b[2]))
        assert g == 1

    def test_rejects_unreduced(self):
        with pytest.raises(ArgumentError):
            RationalPoint3(nums=(2, 1, 1), dens=(4, 1, 1))


class TestMajorArcApprox:
    def test_exact_rational_q1(self):
        center = RationalPoint3.from_fractions([0, 0, 0])
        approx, residual, bound = major_arc_approx(16, center, (0.0, 0.0, 0.0))
        assert approx == pytest.approx(4 * 16 * 16, rel=1e-9)
        assert residual <= 8 * bound
        s = weyl_sum_S(16, (0, 0, 0))
        assert residual <= 2 * abs(s) + 2 * abs(approx)

    def test_sweep_constant(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            N = int(rng.choice([16, 32]))
            q = int(rng.integers(1, 9))
            b = rng.integers(1, q + 1, size=3)
            while math.gcd(math.gcd(q, int(b[0])),
                           math.gcd(int(b[1]), int(b[2]))) != 1:
                b = rng.integers(1, q + 1, size=3)
            center = RationalPoint3.from_fractions(
                [Fraction(int(bi), q) for bi in b])
            beta = rng.uniform(-1, 1, 3) / (q * N * N)
            alpha = tuple((bi / q + be) % 1.0 for bi, be in zip(b, beta))
            xi, eta = rng.uniform(-0.5, 0.5, 2)
            _, residual, bound = major_arc_approx(N, center, alpha,
                                                  float(xi), float(eta))
            assert residual <= 8 * bound


class TestMinorArcScan:
    def test_small_scan_passes(self):
        rep = minor_arc_scan(64, 3, 30, seed=5)
        assert rep.status == "pass"
        assert len(rep.summary["records"]) == 30

    def test_deterministic_in_seed(self):
        a = minor_arc_scan(32, 2, 10, seed=9)
        b = minor_arc_scan(32, 2, 10, seed=9)
        assert a.checks[0].lhs == b.checks[0].lhs
        assert a.summary["records"] == b.summary["records"]

    def test_p1_degenerate_still_works(self):
        rep = minor_arc_scan(16, 1, 5, seed=1)
        assert len(rep.summary["records"]) == 5

    def test_eta_zero_flag(self):
        rep = minor_arc_scan(16, 2, 5, seed=2, eta_zero=True)
        assert all(r["eta"] == 0.0 for r in rep.summary["records"])

    def test_regime_flag(self):
        with pytest.raises(ArgumentError):
            minor_arc_scan(16, 5, 5, seed=0, lemma6_regime=True)


class TestBilinearSum:
    def test_delta_pair_at_zero_phase(self):
        f = GridFunction.delta(2)
        F = bilinear_sum_F(3, (0.0, 0.0, 0.0), f, f)
        ball = {(x, y) for x in range(-3, 4) for y in range(-3, 4)
                if x * x + y * y <= 9}
        assert set(F.entries) == ball
        assert all(v == pytest.approx(1.0) for v in F.entries.values())

    def test_linearity_in_f(self):
        rng = np.random.default_rng(14)
        alpha = tuple(rng.random(3))
        g = GridFunction(1, {(0,): 1.0, (1,): -0.5})
        f1 = GridFunction(1, {(0,): 0.7})
        f2 = GridFunction(1, {(2,): 1.3, (-1,): 0.2})
        lhs = bilinear_sum_F(2, alpha, f1.plus(f2), g)
        rhs = bilinear_sum_F(2, alpha, f1, g).plus(bilinear_sum_F(2, alpha, f2, g))
        keys = set(lhs.entries) | set(rhs.entries)
        for k in keys:
            assert lhs.entries.get(k, 0) == pytest.approx(
                rhs.entries.get(k, 0), abs=1e-12)

    def test_character_multiplier_consistency(self):
        # with f, g pure characters on a long interval, F at interior points
        # equals the truncated multiplier times the same character
        L, N = 24, 2
        alpha = (0.21, 0.37, 0.11)
        ka, kb = 3, 5
        f = GridFunction(1, {(x,): np.exp(2j * np.pi * ka * x / L)
                             for x in range(L)})
        g = GridFunction(1, {(x,): np.exp(2j * np.pi * kb * x / L)
                             for x in range(L)})
        F = bilinear_sum_F(N, alpha, f, g)
        m = 0j
        for u in range(-N, N + 1):
            for v in range(-N, N + 1):
                if u * u <= N * N and v * v <= N * N:
                    ph = (alpha[0] * u * u + alpha[1] * 2 * u * v
                          + alpha[2] * v * v - ka * u / L - kb * v / L)
                    m += np.exp(2j * np.pi * ph)
        for x in (N, L // 2, L - 1 - N):
            want = m * np.exp(2j * np.pi * (ka + kb) * x / L)
            assert F.entries[(x,)] == pytest.approx(want, abs=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(ArgumentError):
            bilinear_sum_F(2, (0, 0, 0), GridFunction.delta(1),
                           GridFunction.delta(2))
