import itertools

import numpy as np
import pytest

from triadne.core import ArgumentError
from triadne import lattice
from triadne.lattice import (
    count_triangle_pairs,
    count_triangle_pairs_dp,
    nu_gram,
    r3,
    sixth_moment_count,
    sum_of_squares_reps,
    triangles_in_box,
    triangles_in_box_bruteforce,
    vinogradov_count,
)


class TestSumOfSquaresReps:
    def test_zero(self):
        reps = sum_of_squares_reps(0, 3)
        assert reps.shape == (1, 3) and tuple(reps[0]) == (0, 0, 0)

    def test_unit_vectors(self):
        reps = sum_of_squares_reps(1, 3)
        assert reps.shape[0] == 6
        assert all(int((r * r).sum()) == 1 for r in reps)

    def test_two(self):
        assert sum_of_squares_reps(2, 3).shape[0] == 12

    def test_lex_order(self):
        reps = sum_of_squares_reps(5, 4)
        rows = [tuple(r) for r in reps]
        assert rows == sorted(rows)

    def test_matches_r3(self):
        for n in range(0, 31):
            assert sum_of_squares_reps(n, 3).shape[0] == r3(n)

    def test_binary_cache_round_trip(self, tmp_path, monkeypatch):
        monkeypatch.setenv(lattice.CACHE_ENV, str(tmp_path))
        a = sum_of_squares_reps(6, 7)
        files = list(tmp_path.rglob("*"))
        files = [f for f in files if f.is_file()]
        assert files, "cache file not written"
        assert files[0].read_bytes()[:4] == b"TRIA"
        b = sum_of_squares_reps(6, 7)
        assert np.array_equal(a, b)


class TestTriangleCounts:
    def test_odd_lambda_empty(self):
        for lam in (1, 3, 7, 15):
            assert count_triangle_pairs(lam, 5).count == 0
            assert count_triangle_pairs_dp(lam, 5) == 0

    def test_planar_empty(self):
        for lam in range(0, 21):
            if lam > 0:
                assert count_triangle_pairs(lam, 2).count == 0

    def test_degenerate_zero(self):
        assert count_triangle_pairs(0, 3).count == 1
        assert count_triangle_pairs_dp(0, 4) == 1

    def test_v2_d7_bruteforce_value(self):
        # frozen from an independent 14-variable brute-force scan
        assert count_triangle_pairs(2, 7).count == 1680
        assert count_triangle_pairs_dp(2, 7) == 1680

    def test_scan_matches_dp(self):
        for d in (3, 4, 5):
            for lam in range(0, 21, 2):
                assert (count_triangle_pairs(lam, d).count
                        == count_triangle_pairs_dp(lam, d))

    def test_materialized_pairs_satisfy_equations(self):
        tps = count_triangle_pairs(6, 3, materialize=True)
        assert tps.pairs.shape[0] == tps.count > 0
        for u, v in tps.pairs:
            assert int((u * u).sum()) == 6
            assert int((v * v).sum()) == 6
            assert 2 * int((u * v).sum()) == 6

    def test_symmetry_invariance(self):
        tps = count_triangle_pairs(4, 4, materialize=True)
        flipped = tps.pairs.copy()
        flipped[:, :, 0] *= -1
        keys = {tuple(p.ravel()) for p in tps.pairs}
        assert {tuple(p.ravel()) for p in flipped} == keys

    def test_negative_lambda_rejected(self):
        with pytest.raises(ArgumentError):
            count_triangle_pairs(-2, 3)
        with pytest.raises(ArgumentError):
            count_triangle_pairs_dp(-2, 3)


class TestNuGramAndR3:
    def test_examples(self):
        assert nu_gram(1, 1, 1) == 6
        assert nu_gram(1, 0, 1) == 24
        assert nu_gram(2, 3, 2) == 0

    def test_symmetries(self):
        for a, b, c in [(2, 1, 3), (4, -2, 4), (5, 0, 1)]:
            assert nu_gram(a, b, c) == nu_gram(c, b, a)
            assert nu_gram(a, b, c) == nu_gram(a, -b, c)

    def test_total_mass(self):
        for lam in (1, 2, 4, 5):
            total = sum(nu_gram(lam, b, lam) for b in range(-lam, lam + 1))
            assert total == r3(lam) ** 2

    def test_d3_triangle_identity(self):
        for lam in (2, 4, 6, 8, 10):
            assert count_triangle_pairs(lam, 3).count == nu_gram(lam, lam // 2, lam)

    def test_r3_values(self):
        assert r3(0) == 1
        assert r3(1) == 6
        assert r3(7) == 0


class TestMomentCounts:
    def test_j1_closed_form(self):
        for n in (1, 2, 5, 9):
            assert vinogradov_count(1, n) == (2 * n + 1) ** 2

    def test_n0(self):
        assert vinogradov_count(3, 0) == 1
        assert sixth_moment_count(0) == 1

    def test_j2_bruteforce_value(self):
        # frozen from an independent 8-variable brute force at N=2
        assert vinogradov_count(2, 2) == 1225

    def test_j2_dict_oracle(self):
        N = 1
        hist = {}
        for x1, y1, x2, y2 in itertools.product(range(-N, N + 1), repeat=4):
            key = (x1 + x2, y1 + y2, x1 * x1 + x2 * x2,
                   x1 * y1 + x2 * y2, y1 * y1 + y2 * y2)
            hist[key] = hist.get(key, 0) + 1
        assert vinogradov_count(2, N) == sum(c * c for c in hist.values())

    def test_j4_dict_oracle(self):
        N = 2
        one = {}
        for x, y in itertools.product(range(-N, N + 1), repeat=2):
            key = (x, y, x * x, x * y, y * y)
            one[key] = one.get(key, 0) + 1
        two = {}
        for k1, c1 in one.items():
            for k2, c2 in one.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                two[k] = two.get(k, 0) + c1 * c2
        four = {}
        for k1, c1 in two.items():
            for k2, c2 in two.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                four[k] = four.get(k, 0) + c1 * c2
        expected = sum(c * c for c in four.values())
        assert vinogradov_count(4, N) == expected

    def test_t1_bruteforce_value(self):
        # frozen from an independent 12-variable brute force over {-1,0,1}^12
        assert sixth_moment_count(1) == 20561

    def test_t2_dict_oracle(self):
        N = 2
        one = {}
        for x, y in itertools.product(range(-N, N + 1), repeat=2):
            key = (x * x, x * y, y * y)
            one[key] = one.get(key, 0) + 1
        three = {}
        for k1, c1 in one.items():
            for k2, c2 in one.items():
                for k3, c3 in one.items():
                    k = tuple(a + b + c for a, b, c in zip(k1, k2, k3))
                    three[k] = three.get(k, 0) + c1 * c2 * c3
        expected = sum(c * c for c in three.values())
        assert sixth_moment_count(N) == expected

    def test_monotone_in_N(self):
        vals = [vinogradov_count(2, n) for n in (1, 2, 3, 4)]
        assert all(a < b for a, b in zip(vals, vals[1:]))


class TestTrianglesInBox:
    def test_planar_zero(self):
        for n in range(0, 7):
            assert triangles_in_box(n, 2) == 0

    def test_point_box(self):
        assert triangles_in_box(0, 3) == 0

    def test_unit_cube(self):
        # the 8 corner triangles of side sqrt(2), frozen from enumeration
        assert triangles_in_box(1, 3) == 8

    def test_matches_bruteforce(self):
        for n in (1, 2):
            assert triangles_in_box(n, 3) == triangles_in_box_bruteforce(n, 3)

    def test_n2_value(self):
        assert triangles_in_box(2, 3) == 80
