import math

import numpy as np
import pytest

from triadne.core import (
    ArgumentError,
    BudgetError,
    CutoffPhi,
    cutoff_phi,
    deterministic_sum,
    factorize,
    gcd_many,
    quadratic_triple,
    root_of_unity,
    sum_components,
    tau,
)


def test_gcd_many():
    assert gcd_many([12, 18, 24]) == 6
    assert gcd_many([0, 0]) == 0
    assert gcd_many([-4, 6]) == 2
    assert gcd_many([7]) == 7


def test_factorize():
    assert factorize(1) == []
    assert factorize(12) == [(2, 2), (3, 1)]
    assert factorize(97) == [(97, 1)]
    with pytest.raises(ArgumentError):
        factorize(0)


def test_tau():
    assert tau(1) == 1
    assert tau(12) == 6
    assert tau(36) == 9


def test_root_of_unity():
    assert root_of_unity(4, 1) == pytest.approx(1j)
    assert root_of_unity(2, 1) == pytest.approx(-1)
    # large k reduced exactly mod q before evaluation
    assert root_of_unity(3, 3 * 10**18 + 1) == pytest.approx(
        root_of_unity(3, 1), abs=1e-15)


def test_quadratic_triple():
    assert quadratic_triple([1, 2], [3, 4]) == (5, 22, 25)
    with pytest.raises(ArgumentError):
        quadratic_triple([1], [1, 2])


def test_deterministic_sum_order_independent():
    rng = np.random.default_rng(0)
    vals = list(rng.normal(size=500))
    a = deterministic_sum(vals)
    b = deterministic_sum(list(reversed(vals)))
    rng.shuffle(vals)
    c = deterministic_sum(vals)
    assert a == b == c
    assert a == pytest.approx(math.fsum(vals), abs=1e-10)


def test_sum_components():
    assert sum_components([1, 2, 3]) == 6
    assert isinstance(sum_components([1, 2]), int)


def test_cutoff_phi_plateau_and_support():
    assert cutoff_phi([0.0, 0.0, 0.0]) == 1.0
    assert cutoff_phi([0.124, 0.0]) == 1.0
    assert cutoff_phi([0.25]) == 0.0
    assert cutoff_phi([0.3, 0.0]) == 0.0
    v = cutoff_phi([0.18])
    assert 0.0 < v < 1.0


def test_cutoff_phi_monotone():
    phi = CutoffPhi()
    ts = np.linspace(0.0, 0.3, 200)
    vals = phi.profile(ts)
    assert np.all(np.diff(vals) <= 1e-12)


def test_budget_error_carries_estimate():
    err = BudgetError("too big", best_estimate=1.5)
    assert err.best_estimate == 1.5
