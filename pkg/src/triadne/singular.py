"""Local densities, local factors, and the singular series.

nu_d(p^t; lambda) counts solutions x, y in (Z_{p^t})^d of
|x|^2 = |y|^2 = 2 x.y = lambda (mod p^t). Normalizing by p^{(3-2d)t} and
letting t grow gives the local factor T(p); the product over primes is the
singular series S(lambda), which also equals the sum over q of
G_lambda(q; 0, 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ArgumentError, BudgetError, factorize
from .gauss import big_G
from .report import VerificationReport

__all__ = [
    "LocalFactorEstimate",
    "local_count_nu_d",
    "local_count_nu_d_bruteforce",
    "local_factor_T",
    "singular_series_sigma",
    "euler_product_sigma",
    "check_multiplicativity",
    "hensel_lower_bound_check",
]

MAX_STATE = 40_000  # q^3 cells in the DP state


def _pair_distribution(q: int):
    """Multiplicity of each (x^2, 2xy, y^2) mod q over (x, y) in Z_q^2."""
    r = np.arange(q, dtype=np.int64)
    x = r[:, None]
    y = r[None, :]
    t1 = (x * x) % q
    t2 = (2 * x * y) % q
    t3 = (y * y) % q
    keys = (t1 * q + t2) * q + t3
    uniq, counts = np.unique(keys.ravel(), return_counts=True)
    return uniq, counts.astype(np.uint64)


def local_count_nu_d(q: int, lam: int, d: int) -> int:
    """Exact nu_d(q; lambda) by a cyclic-convolution DP over coordinates.

    The state is (sum x_i^2, 2 sum x_i y_i, sum y_i^2) mod q; each
    coordinate convolves the state with the pair distribution of
    (x^2, 2xy, y^2). Arithmetic runs in uint64: individual cell counts stay
    below 2^63 (verified by a float64 shadow), so wraparound never corrupts
    the answer even though the total mass q^{2d} may exceed 2^64.
    """
    if q < 1 or d < 1:
        raise ArgumentError("need q >= 1 and d >= 1")
    if q == 1:
        return 1
    if q ** 3 > MAX_STATE * 8:
        raise BudgetError("DP state space exceeds budget")
    uniq, counts = _pair_distribution(q)
    shifts = np.stack([uniq // (q * q), (uniq // q) % q, uniq % q], axis=1)
    state = np.zeros((q, q, q), dtype=np.uint64)
    shadow = np.zeros((q, q, q), dtype=np.float64)
    state[0, 0, 0] = 1
    shadow[0, 0, 0] = 1.0
    for _ in range(d):
        new = np.zeros_like(state)
        new_sh = np.zeros_like(shadow)
        for (s1, s2, s3), c in zip(shifts, counts):
            rolled = np.roll(state, (int(s1), int(s2), int(s3)), axis=(0, 1, 2))
            new += rolled * c
            new_sh += np.roll(shadow, (int(s1), int(s2), int(s3)),
                              axis=(0, 1, 2)) * float(c)
        state, shadow = new, new_sh
    if float(shadow.max()) >= 2.0 ** 63:
        raise BudgetError("cell count magnitude exceeds exact-reconstruction range")
    t = lam % q
    return int(state[t, t, t])


def local_count_nu_d_bruteforce(q: int, lam: int, d: int) -> int:
    """Independent oracle: direct scan over all (x, y) in (Z_q^d)^2."""
    if q ** (2 * d) > 6_000_000:
        raise BudgetError("brute-force local count too large")
    r = np.arange(q, dtype=np.int64)
    grids = np.meshgrid(*[r] * d, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)  # q^d x d
    xx = (pts * pts).sum(axis=1) % q
    t = lam % q
    sel = np.nonzero(xx == t)[0]
    total = 0
    for i in sel:
        dots = (2 * (pts[sel] @ pts[i])) % q
        total += int(np.count_nonzero(dots == t))
    return total


@dataclass
class LocalFactorEstimate:
    p: int
    lam: int
    d: int
    values: list = field(default_factory=list)  # p^{(3-2d)t} nu_d(p^t) for t=1..
    stabilized: bool = False
    value: float = 0.0


def local_factor_T(p: int, lam: int, d: int, t_max: int = 2,
                   tol: float = 1e-3) -> LocalFactorEstimate:
    """T(p) = lim_t p^{(3-2d)t} nu_d(p^t; lambda), truncated at t_max."""
    if d < 7:
        raise ArgumentError("local factors are computed in the d >= 7 regime")
    est = LocalFactorEstimate(p=p, lam=lam, d=d)
    for t in range(1, t_max + 1):
        q = p ** t
        if q ** 3 <= MAX_STATE * 8:
            nu = local_count_nu_d(q, lam, d)
            est.values.append(nu * float(p) ** ((3 - 2 * d) * t))
        else:
            # partial Gauss-sum series: the normalized count equals
            # sum_{j<=t} G_lambda(p^j; 0, 0)
            z = [0] * d
            s = sum(big_G(lam, p ** j, z, z, d) for j in range(0, t + 1))
            est.values.append(float(s.real))
    est.value = est.values[-1]
    if len(est.values) >= 2:
        est.stabilized = abs(est.values[-1] - est.values[-2]) <= tol
    elif est.value == 0.0:
        est.stabilized = True
    return est


def singular_series_sigma(lam: int, d: int, q_max: int = 32):
    """Direct q-sum of G_lambda(q; 0, 0) for q <= q_max.

    Returns (value, tail_bound). The tail uses the empirical envelope
    |G_lambda(q)| <= C q^{-d/2 + 2.25} with C the worst observed ratio over
    the computed range.
    """
    if d < 7:
        raise ArgumentError("the series is summed in the d >= 7 regime")
    if q_max < 1:
        raise ArgumentError("q_max must be >= 1")
    terms = [complex(1.0)]
    ratios = [0.0]
    expo = -d / 2 + 2.25
    for q in range(2, q_max + 1):
        g = big_G(lam, q, [0] * d, [0] * d, d)
        terms.append(g)
        ratios.append(abs(g) / q ** expo)
    value = sum(terms)
    if abs(value.imag) > 1e-8:
        raise AssertionError("singular series acquired an imaginary part")
    C = max(ratios)
    # integral comparison for the tail of sum q^{expo}, expo < -1
    tail = C * (q_max ** (expo + 1)) / (-(expo + 1))
    return float(value.real), float(tail)


def euler_product_sigma(lam: int, d: int, p_max: int = 13, t_max: int = 2):
    """Truncated Euler product of the local factors T(p).

    Exactly zero for odd lambda (the p = 2 factor vanishes: 2 sum x_i y_i
    is even while lambda is odd).
    """
    primes = [p for p in range(2, p_max + 1) if len(factorize(p)) == 1
              and factorize(p)[0][1] == 1]
    prod = 1.0
    factors = []
    for p in primes:
        tm = t_max + 1 if p in (2, 3) else t_max
        est = local_factor_T(p, lam, d, t_max=tm)
        factors.append(est)
        prod *= est.value
        if prod == 0.0:
            break
    return prod, factors


def check_multiplicativity(lam: int, q1: int, q2: int, d: int) -> VerificationReport:
    """|G(q1 q2) - G(q1) G(q2)| small for coprime q1, q2."""
    if math.gcd(q1, q2) != 1:
        raise ArgumentError("moduli must be coprime")
    rep = VerificationReport(title=f"multiplicativity lam={lam} q1={q1} q2={q2}")
    z = [0] * d
    g12 = big_G(lam, q1 * q2, z, z, d)
    g1 = big_G(lam, q1, z, z, d)
    g2 = big_G(lam, q2, z, z, d)
    err = abs(g12 - g1 * g2)
    tol = 1e-8 * (1 + abs(g1 * g2))
    rep.add("product-rule", {"lambda": lam, "q1": q1, "q2": q2, "d": d},
            err, tol, tol, err <= tol,
            anchor="G(q1 q2) = G(q1) G(q2) for coprime moduli")
    return rep


def hensel_lower_bound_check(p: int, t: int, lam: int, d: int) -> VerificationReport:
    """nu_d(p^t; lambda) >= p^{(t-1)(2d-3)} for p > 2 (8 * 2^{(t-2)(2d-3)}
    at p = 2); stated for even lambda, d >= 7, t >= 3."""
    rep = VerificationReport(title=f"hensel p={p} t={t} lam={lam} d={d}")
    if lam % 2 == 1:
        rep.status = "hypothesis-not-met"
        rep.summary = {"reason": "lambda must be even"}
        return rep
    if t < 3:
        rep.status = "report-only"
    nu = local_count_nu_d(p ** t, lam, d)
    if p > 2:
        bound = p ** ((t - 1) * (2 * d - 3))
    else:
        bound = 8 * 2 ** max(0, (t - 2) * (2 * d - 3))
    ok = nu >= bound
    rep.add("hensel-lift", {"p": p, "t": t, "lambda": lam, "d": d},
            float(nu), float(bound), 0.0, ok,
            anchor="nu_d(p^t) >= p^{(t-1)(2d-3)}", nu=nu, bound=bound)
    return rep
