"""Weyl sums, Dirichlet approximation, arc systems, and the bilinear sum.

S_N(alpha; xi, eta) is the exact exponential sum over the (2N+1)^2 grid.
The torus T^3 splits into two families of major arcs: the joint system
(one modulus q for all three coordinates) and the per-coordinate system
(independent moduli q_i); everything outside is minor.  Near a rational
centre, S_N is modelled by g(q; a, m, n) V_N(beta; theta_1, theta_2) and
the residual is measured, not proved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import ArgumentError, BudgetError
from .gauss import gauss_g
from .operators import GridFunction
from .oscillatory import fresnel_V
from .report import VerificationReport

__all__ = [
    "RationalPoint3",
    "ArcLabel",
    "weyl_sum_S",
    "dirichlet_approx",
    "classify_arc",
    "major_arc_approx",
    "minor_arc_scan",
    "bilinear_sum_F",
]

MAX_BILINEAR_POINTS = 20_000_000


@dataclass(frozen=True)
class RationalPoint3:
    """Three reduced fractions a_i/q_i with 1 <= a_i <= q_i.

    The joint form is (b_1, b_2, b_3)/q with q = lcm[q_1, q_2, q_3] and
    b_i = a_i q / q_i, which is automatically primitive:
    gcd(q, b_1, b_2, b_3) = 1.
    """

    nums: tuple
    dens: tuple

    @staticmethod
    def from_fractions(fracs) -> "RationalPoint3":
        nums = []
        dens = []
        for f in fracs:
            f = Fraction(f) % 1
            if f == 0:
                nums.append(1)
                dens.append(1)
            else:
                nums.append(f.numerator)
                dens.append(f.denominator)
        return RationalPoint3(tuple(nums), tuple(dens))

    def __post_init__(self):
        for a, q in zip(self.nums, self.dens):
            if not (1 <= a <= q) or math.gcd(a, q) != 1:
                raise ArgumentError("components must be reduced with 1 <= a <= q")
        q, b = self.joint()
        if math.gcd(math.gcd(q, b[0]), math.gcd(b[1], b[2])) != 1:
            raise AssertionError("joint form must be primitive")

    def joint(self):
        """(q, (b1, b2, b3)) with q = lcm of the denominators."""
        q = math.lcm(*self.dens)
        b = tuple(a * (q // qi) for a, qi in zip(self.nums, self.dens))
        return q, b

    def values(self):
        return tuple(Fraction(a, q) for a, q in zip(self.nums, self.dens))


@dataclass(frozen=True)
class ArcLabel:
    system: str                  # "M" (joint modulus) or "N" (per-coordinate)
    status: str                  # "major" or "minor"
    center: Optional[RationalPoint3]
    P: int
    N: int

    def __post_init__(self):
        if self.system not in ("M", "N"):
            raise ArgumentError("system must be 'M' or 'N'")
        if self.status not in ("major", "minor"):
            raise ArgumentError("status must be 'major' or 'minor'")


def weyl_sum_S(N: int, alpha, xi: float = 0.0, eta: float = 0.0) -> complex:
    """S_N(alpha; xi, eta) = sum over |x|,|y| <= N of
    e(alpha1 x^2 + alpha2 2xy + alpha3 y^2 + xi x + eta y).

    Factorized as A @ (M @ B) with A[x] = e(a1 x^2 + xi x),
    M[x, y] = e(2 a2 x y), B[y] = e(a3 y^2 + eta y): O(N^2) work with a
    fixed reduction order.
    """
    if N < 1:
        raise ArgumentError("N must be >= 1")
    a1, a2, a3 = (float(v) for v in alpha)
    r = np.arange(-N, N + 1, dtype=np.float64)
    tau = 2.0 * np.pi
    A = np.exp(1j * tau * (a1 * r * r + xi * r))
    B = np.exp(1j * tau * (a3 * r * r + eta * r))
    M = np.exp(1j * tau * (2.0 * a2) * np.outer(r, r))
    return complex(A @ (M @ B))


def dirichlet_approx(alpha: float, N: int, P: int):
    """Reduced (q, a) with |q alpha - a| <= P/N^2 and 1 <= q <= N^2/P.

    The continued-fraction convergents p_k/q_k of alpha satisfy
    |q_k alpha - p_k| <= 1/q_{k+1}; taking the last convergent with
    q_k <= N^2/P gives |q_k alpha - p_k| < P/N^2 (Dirichlet's theorem).
    """
    if not (1 <= P <= N):
        raise ArgumentError("need 1 <= P <= N")
    Q = (N * N) // P
    x = Fraction(alpha)
    # convergents via the Euclidean expansion of x
    p_prev, q_prev = 1, 0
    p_cur, q_cur = int(math.floor(x)), 1
    frac = x - int(math.floor(x))
    while q_cur <= Q:
        best = (q_cur, p_cur)
        if frac == 0:
            break
        x = 1 / frac
        a = int(math.floor(x))
        frac = x - a
        p_prev, q_prev, p_cur, q_cur = p_cur, q_cur, a * p_cur + p_prev, a * q_cur + q_prev
    q, a = best
    g = math.gcd(q, abs(a)) if a != 0 else 1
    return q // g, a // g


def _major_center_M(alpha, N: int, P: int):
    """Smallest q <= P whose joint arc contains alpha, or None."""
    fr = [Fraction(float(v)) % 1 for v in alpha]
    lim = Fraction(P, N * N)
    for q in range(1, P + 1):
        bs = []
        ok = True
        for f in fr:
            qa = q * f
            b = round(qa)  # Fraction.__round__ is exact, half-to-even
            if abs(qa - b) > lim:
                ok = False
                break
            bs.append(int(b))
        if not ok:
            continue
        if math.gcd(math.gcd(q, bs[0]), math.gcd(bs[1], bs[2])) != 1:
            continue
        return RationalPoint3.from_fractions([Fraction(b, q) for b in bs])
    return None


def _major_center_N(alpha, N: int, P: int):
    """Per-coordinate centres a_i/q_i with q_i <= P, or None."""
    lim = Fraction(P, N * N)
    fracs = []
    for v in alpha:
        f = Fraction(float(v)) % 1
        hit = None
        for q in range(1, P + 1):
            qa = q * f
            a = round(qa)
            if abs(qa - a) <= lim:
                # first hit is automatically reduced: gcd g > 1 would mean
                # q/g already satisfied the same bound
                hit = Fraction(int(a), q)
                break
        if hit is None:
            return None
        fracs.append(hit)
    return RationalPoint3.from_fractions(fracs)


def classify_arc(alpha, N: int, P: int, system: str = "M") -> ArcLabel:
    """Exact arc membership via rational endpoint comparisons.

    In the joint system alpha is major when some q <= P has
    |alpha_i - b_i/q| <= P/(q N^2) for all i simultaneously; in the
    per-coordinate system each alpha_i gets its own q_i <= P.  Input
    floats are treated as exact dyadic rationals, so the decision has no
    rounding ambiguity.
    """
    if not (1 <= P <= N):
        raise ArgumentError("need 1 <= P <= N")
    if system == "M":
        center = _major_center_M(alpha, N, P)
    elif system == "N":
        center = _major_center_N(alpha, N, P)
    else:
        raise ArgumentError("system must be 'M' or 'N'")
    status = "major" if center is not None else "minor"
    return ArcLabel(system=system, status=status, center=center, P=P, N=N)


def major_arc_approx(N: int, center: RationalPoint3, alpha, xi: float = 0.0,
                     eta: float = 0.0):
    """(approx, residual, bound) for the local model of S_N near a
    rational centre.

    approx = g(q; b, m, n) V_N(beta; theta1, theta2) with
    beta = alpha - b/q, m = round(q xi), n = round(q eta),
    theta1 = xi - m/q, theta2 = eta - n/q;
    bound = q N (1 + N^2 max_i |beta_i|).
    """
    q, b = center.joint()
    # round-half-even keeps |q xi - m| <= 1/2 deterministically
    m = int(round(q * xi))
    n = int(round(q * eta))
    if abs(q * xi - m) > 0.5 + 1e-12 or abs(q * eta - n) > 0.5 + 1e-12:
        raise ArgumentError("rounded (m, n) violate the half-width precondition")
    # recentre mod 1: phases are periodic in alpha under integer shifts,
    # so beta is taken in (-1/2, 1/2]
    beta = []
    for a, bi in zip(alpha, b):
        diff = float(a) - bi / q
        beta.append(diff - round(diff))
    beta = tuple(beta)
    theta1 = xi - m / q
    theta2 = eta - n / q
    approx = gauss_g(q, b, m, n) * fresnel_V(N, beta, theta1, theta2)
    exact = weyl_sum_S(N, alpha, xi, eta)
    residual = abs(exact - approx)
    bound = q * N * (1.0 + N * N * max(abs(v) for v in beta))
    return approx, residual, bound


def _sample_stream(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream: sample `index` gets the same draws no matter
    how samples are partitioned across workers."""
    return np.random.Generator(np.random.Philox(key=[seed, index]))


def minor_arc_scan(N: int, P: int, samples: int, seed: int = 0,
                   eta_zero: bool = False, system: str = "M",
                   lemma6_regime: bool = False) -> VerificationReport:
    """Empirical supremum of |S_N| over random minor-arc points.

    Draws alpha uniformly, rejects into the requested minor system by
    exact classification, and records max |S_N| / (N^2 P^{-1/2}); the
    guard constant is 10 log N.  Evidence only, not a proof.
    """
    if not (1 <= P <= N):
        raise ArgumentError("need 1 <= P <= N")
    if lemma6_regime and P > N ** (2.0 / 7.0):
        raise ArgumentError("regime flag requires P <= N^(2/7)")
    rep = VerificationReport(
        title=f"minor-arc scan N={N} P={P} system={system} samples={samples}")
    scale = N * N * P ** (-0.5)
    worst = 0.0
    worst_rec = None
    records = []
    accepted = 0
    index = 0
    while accepted < samples:
        rng = _sample_stream(seed, index)
        index += 1
        alpha = tuple(rng.random(3))
        if classify_arc(alpha, N, P, system).status != "minor":
            continue
        accepted += 1
        xi = float(rng.random())
        eta = 0.0 if eta_zero else float(rng.random())
        s = weyl_sum_S(N, alpha, xi, eta)
        ratio = abs(s) / scale
        rec = {"alpha": list(alpha), "xi": xi, "eta": eta,
               "abs_S": abs(s), "ratio": ratio}
        records.append(rec)
        if ratio > worst:
            worst = ratio
            worst_rec = rec
    guard = 10.0 * math.log(N)
    rep.add("minor-sup", {"N": N, "P": P, "system": system,
                          "samples": samples, "seed": seed,
                          "eta_zero": eta_zero},
            worst, guard, guard, worst <= guard,
            anchor="sup over minor arcs <= 10 log N * N^2 P^(-1/2)",
            worst_sample=worst_rec, rejected=index - accepted)
    rep.summary["records"] = records
    return rep


def bilinear_sum_F(N: int, alpha, f: GridFunction, g: GridFunction) -> GridFunction:
    """F(x) = sum over |u| <= N, |v| <= N (Euclidean balls in Z^d) of
    e(alpha . phi(u, v)) f(x - u) g(x - v), phi(u, v) = (|u|^2, 2 u.v, |v|^2).

    Substituting u = x - s, v = x - t reduces the sum to pairs of support
    points of f and g with x ranging over the intersection of the two
    balls.  Output support sits inside support(f) + ball(N).
    """
    if f.d != g.d:
        raise ArgumentError("dimension mismatch")
    d = f.d
    if (2 * N + 1) ** d > MAX_BILINEAR_POINTS:
        raise BudgetError("ball enumeration exceeds budget")
    axes = [np.arange(-N, N + 1, dtype=np.int64)] * d
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    pts = pts[(pts * pts).sum(axis=1) <= N * N]      # u = x - s ranges here
    a1, a2, a3 = (float(v) for v in alpha)
    tau = 2.0 * np.pi
    out = {}
    for s, fs in f.entries.items():
        sv = np.asarray(s, dtype=np.int64)
        xs = pts + sv                                 # candidate x
        u = pts
        uu = (u * u).sum(axis=1)
        for t, gt in g.entries.items():
            v = xs - np.asarray(t, dtype=np.int64)    # v = x - t
            vv = (v * v).sum(axis=1)
            keep = vv <= N * N
            if not keep.any():
                continue
            uv = (u[keep] * v[keep]).sum(axis=1)
            phase = np.exp(1j * tau * (a1 * uu[keep] + a2 * 2.0 * uv + a3 * vv[keep]))
            coef = fs * gt
            for x, ph in zip(xs[keep], phase):
                key = tuple(int(c) for c in x)
                out[key] = out.get(key, 0j) + coef * ph
            if len(out) > MAX_BILINEAR_POINTS:
                raise BudgetError("output support exceeds budget")
    return GridFunction(d=d, entries=out)
