"""Shared number-theoretic and numeric primitives.

Everything here is a pure function of its inputs; all values are immutable
and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "LatticeVector",
    "CutoffPhi",
    "gcd_many",
    "tau",
    "root_of_unity",
    "quadratic_triple",
    "sum_components",
    "cutoff_phi",
    "deterministic_sum",
    "factorize",
    "ArgumentError",
    "BudgetError",
]


class ArgumentError(ValueError):
    """Raised on invalid arguments to a documented operation."""


class BudgetError(RuntimeError):
    """Raised when a computation would exceed its configured resource budget."""

    def __init__(self, message, best_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate


# A lattice vector is simply a tuple of Python ints; Python integers are
# arbitrary precision, so squared norms never overflow.
LatticeVector = tuple


def gcd_many(values: Iterable[int]) -> int:
    """gcd of the absolute values; gcd() of all zeros is 0."""
    vals = list(values)
    if not vals:
        raise ArgumentError("gcd_many requires at least one value")
    g = 0
    for v in vals:
        g = math.gcd(g, abs(int(v)))
    return g


def factorize(n: int) -> list:
    """Prime factorization of n >= 1 as a list of (p, exponent) pairs."""
    if n < 1:
        raise ArgumentError("factorize requires n >= 1")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def tau(q: int) -> int:
    """Number of positive divisors of q."""
    if q < 1:
        raise ArgumentError("tau requires q >= 1")
    t = 1
    for _, e in factorize(q):
        t *= e + 1
    return t


def root_of_unity(q: int, k: int) -> complex:
    """e^{2 pi i k / q}, with k reduced mod q before evaluation."""
    if q < 1:
        raise ArgumentError("root_of_unity requires q >= 1")
    k = k % q
    return complex(math.cos(2.0 * math.pi * k / q), math.sin(2.0 * math.pi * k / q))


def quadratic_triple(x: Sequence[int], y: Sequence[int]):
    """The triple (|x|^2, 2 x.y, |y|^2), exact in integer arithmetic."""
    if len(x) != len(y):
        raise ArgumentError("quadratic_triple: dimension mismatch")
    xx = sum(int(a) * int(a) for a in x)
    xy = sum(int(a) * int(b) for a, b in zip(x, y))
    yy = sum(int(b) * int(b) for b in y)
    return (xx, 2 * xy, yy)


def _pairwise(vals):
    # balanced pairwise tree; deterministic for a fixed input order
    n = len(vals)
    if n == 1:
        return vals[0]
    half = n // 2
    return _pairwise(vals[:half]) + _pairwise(vals[half:])


def deterministic_sum(values: Iterable[float]) -> float:
    """Order-independent float sum: canonical sort, then a pairwise tree.

    The same multiset of doubles gives a bit-identical result for any
    insertion order.
    """
    vals = [float(v) for v in values]
    if not vals:
        return 0.0
    vals.sort(key=lambda v: (abs(v), v))
    return _pairwise(vals)


def sum_components(x: Sequence):
    """s(x) = x_1 + ... + x_k; exact for ints, deterministic pairwise for floats."""
    vals = list(x)
    if not vals:
        raise ArgumentError("sum_components requires a nonempty vector")
    if all(isinstance(v, (int, np.integer)) for v in vals):
        return sum(int(v) for v in vals)
    return deterministic_sum(vals)


@dataclass(frozen=True)
class CutoffPhi:
    """Smooth sup-norm radial cutoff: 1 on max|xi_j| <= 1/8, 0 beyond 1/4.

    The transition profile is the standard bump ratio
    B(s) = sigma(s) / (sigma(s) + sigma(1-s)), sigma(s) = exp(-1/s) for s > 0,
    applied to s = (1/4 - t) / (1/8) with t = max_j |xi_j|.
    """

    inner: Fraction = Fraction(1, 8)
    outer: Fraction = Fraction(1, 4)

    @staticmethod
    def _sigma(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        pos = s > 0
        out[pos] = np.exp(-1.0 / s[pos])
        return out

    def profile(self, t):
        """Value as a function of the sup-norm radius t >= 0 (vectorized)."""
        t = np.asarray(t, dtype=float)
        s = (float(self.outer) - t) / (float(self.outer) - float(self.inner))
        a = self._sigma(s)
        b = self._sigma(1.0 - s)
        with np.errstate(invalid="ignore"):
            val = np.where(a + b > 0, a / np.where(a + b > 0, a + b, 1.0), 0.0)
        val = np.where(t <= float(self.inner), 1.0, val)
        val = np.where(t >= float(self.outer), 0.0, val)
        return val

    def __call__(self, xi) -> float:
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        return float(self.profile(np.max(np.abs(xi))))


_PHI = CutoffPhi()


def cutoff_phi(xi) -> float:
    """The fixed smooth cutoff Phi on R^d (sup-norm radial)."""
    return _PHI(xi)
