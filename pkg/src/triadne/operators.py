"""Grid functions, the triangle-averaging operator, and its multipliers.

T_lambda(f,g)(x) = lambda^{3-d} sum over (u,v) in V_lambda of f(x-u) g(x-v);
its Fourier symbol is the exponential sum T^hat over V_lambda. The main-term
multiplier M^hat assembles Gauss sums, the smooth cutoff, and the sphere
transform into the leading approximation of T^hat at eta = 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import ArgumentError, BudgetError, cutoff_phi
from .gauss import gauss_g_table, _primitive_mask, _phase_sa, MAX_Q_TABLE
from .lattice import completion_counts, count_triangle_pairs
from .oscillatory import compute_c_d, sphere_area, _gl
from .report import SCHEMA

__all__ = [
    "GridFunction",
    "TheoryConstants",
    "triangle_average_T",
    "linearized_T",
    "dyadic_maximal",
    "multiplier_T_hat",
    "main_term_multiplier_M_hat",
    "main_term_multiplier_grid",
    "apply_main_term_M",
    "lp_norm",
    "theory_constants",
]

MAX_GRID = 200_000_000  # complex cells in a periodized box


@dataclass
class GridFunction:
    """Finitely supported complex-valued function on Z^d."""

    d: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, v in self.entries.items():
            key = tuple(int(c) for c in k)
            if len(key) != self.d:
                raise ArgumentError("entry dimension mismatch")
            val = complex(v)
            if val != 0:
                clean[key] = val
        self.entries = clean

    @classmethod
    def delta(cls, d: int, at=None) -> "GridFunction":
        at = tuple([0] * d) if at is None else tuple(at)
        return cls(d, {at: 1.0 + 0.0j})

    def __call__(self, x) -> complex:
        return self.entries.get(tuple(int(c) for c in x), 0.0 + 0.0j)

    def scaled(self, c: complex) -> "GridFunction":
        return GridFunction(self.d, {k: c * v for k, v in self.entries.items()})

    def plus(self, other: "GridFunction") -> "GridFunction":
        if other.d != self.d:
            raise ArgumentError("dimension mismatch")
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0.0) + v
        return GridFunction(self.d, out)

    def translated(self, w) -> "GridFunction":
        w = tuple(int(c) for c in w)
        return GridFunction(self.d, {tuple(a + b for a, b in zip(k, w)): v
                                     for k, v in self.entries.items()})

    def support_radius(self) -> int:
        if not self.entries:
            return 0
        return max(max(abs(c) for c in k) for k in self.entries)

    def to_dict(self) -> dict:
        return {"schema": SCHEMA, "d": self.d,
                "entries": [{"coords": list(k), "re": v.real, "im": v.imag}
                            for k, v in sorted(self.entries.items())]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "GridFunction":
        return cls(int(data["d"]),
                   {tuple(e["coords"]): complex(e["re"], e.get("im", 0.0))
                    for e in data["entries"]})


@dataclass(frozen=True)
class TheoryConstants:
    d: int
    p0: float
    delta2: float
    p0_exact: Fraction
    delta2_exact: Fraction
    p0_regime: bool  # True when d >= 9, where the p0 formula is operative


def theory_constants(d: int) -> TheoryConstants:
    """p0(d) = max(32/(d+8), (d+4)/(d-2)); delta2 = min(1/4, (d-8)/8)."""
    if d < 7:
        raise ArgumentError("constants are defined for d >= 7")
    p0 = max(Fraction(32, d + 8), Fraction(d + 4, d - 2))
    delta2 = min(Fraction(1, 4), Fraction(d - 8, 8))
    return TheoryConstants(d, float(p0), float(delta2), p0, delta2, d >= 9)


def triangle_average_T(lam: int, f: GridFunction, g: GridFunction) -> GridFunction:
    """T_lambda(f,g)(x) = lambda^{3-d} sum_{(u,v)} f(x-u) g(x-v)."""
    if f.d != g.d:
        raise ArgumentError("dimension mismatch")
    d = f.d
    if lam % 2 == 1 or lam == 0:
        if lam % 2 == 1:
            return GridFunction(d, {})
    pairs = count_triangle_pairs(lam, d, materialize=True).pairs
    scale = float(lam) ** (3 - d) if lam > 0 else 1.0
    out: dict = {}
    for s, fv in f.entries.items():
        sa = np.array(s, dtype=np.int64)
        xs = sa + pairs[:, 0, :]
        ws = xs - pairs[:, 1, :]
        for x_row, w_row in zip(xs, ws):
            gv = g.entries.get(tuple(int(c) for c in w_row))
            if gv is not None:
                key = tuple(int(c) for c in x_row)
                out[key] = out.get(key, 0.0) + scale * fv * gv
    return GridFunction(d, out)


def linearized_T(lam: int, f: GridFunction) -> GridFunction:
    """T_lambda f = T_lambda(f, 1), with the constant function emulated by
    the completion-count weights c_lambda(u) = #{v : (u,v) in V_lambda}."""
    d = f.d
    if lam % 2 == 1:
        return GridFunction(d, {})
    reps, weights = completion_counts(lam, d)
    scale = float(lam) ** (3 - d) if lam > 0 else 1.0
    out: dict = {}
    for s, fv in f.entries.items():
        sa = np.array(s, dtype=np.int64)
        for u, c in zip(reps, weights):
            if c:
                key = tuple(int(v) for v in (sa + u))
                out[key] = out.get(key, 0.0) + scale * float(c) * fv
    return GridFunction(d, out)


def dyadic_maximal(Lambda: int, f: GridFunction,
                   g: GridFunction = None) -> GridFunction:
    """Pointwise sup of |T_lambda(f,g)| over even lambda in [Lambda/2, Lambda)."""
    if Lambda < 2:
        raise ArgumentError("Lambda must be >= 2")
    lo = (Lambda + 1) // 2
    out: dict = {}
    for lam in range(lo + (lo % 2), Lambda, 2):
        t = triangle_average_T(lam, f, g) if g is not None else linearized_T(lam, f)
        for k, v in t.entries.items():
            out[k] = max(out.get(k, 0.0), abs(v))
    return GridFunction(f.d, out)


def multiplier_T_hat(lam: int, xi, eta, d: int) -> complex:
    """T^hat_lambda(xi, eta) = lambda^{3-d} sum_{(u,v)} e(xi.u + eta.v)."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if xi.size != d or eta.size != d:
        raise ArgumentError("xi, eta must have length d")
    tps = count_triangle_pairs(lam, d, materialize=True)
    if tps.count == 0:
        return 0.0 + 0.0j
    phase = tps.pairs[:, 0, :] @ xi + tps.pairs[:, 1, :] @ eta
    scale = float(lam) ** (3 - d) if lam > 0 else 1.0
    return scale * complex(np.exp(2j * np.pi * phase).sum())


def main_term_multiplier_M_hat(lam: int, xi, d: int, q_max: int = 32) -> complex:
    """M^hat_lambda(xi) = c_d sum_{q <= q_max} G_lambda(q; m, 0)
    Phi(q xi - m) dS~(sqrt(lam) (xi - m/q)), with m the nearest integer
    vector to q xi (the only candidate inside the cutoff's support)."""
    from .gauss import big_G
    from .oscillatory import sphere_ft
    if d < 7:
        raise ArgumentError("d >= 7 regime")
    xi = np.asarray(xi, dtype=float)
    if xi.size != d:
        raise ArgumentError("xi must have length d")
    total = 0.0 + 0.0j
    for q in range(1, q_max + 1):
        m = np.rint(q * xi)
        t = q * xi - m
        phi = cutoff_phi(t)
        if phi == 0.0:
            continue
        g = big_G(lam, q, [int(v) for v in m], [0] * d, d)
        total += g * phi * sphere_ft(d, math.sqrt(lam) * (xi - m / q))
    return compute_c_d(d) * total


def _sphere_ft_radial(d: int, radii: np.ndarray) -> np.ndarray:
    t, w = _gl(160)
    prof = (1.0 - t * t) ** ((d - 3) / 2.0)
    return sphere_area(d - 1) * (np.cos(2.0 * np.pi
                                        * np.multiply.outer(radii, t)) @ (w * prof))


def main_term_multiplier_grid(lam: int, d: int, L: int, q_max: int) -> np.ndarray:
    """M^hat_lambda sampled at all frequencies k/L, k in {0..L-1}^d.

    Per q, the cutoff keeps only coordinate residues k with
    dist(q k / L) < 1/4; the Gauss-sum factor is assembled as a rank-1
    tensor per primitive residue triple a over the surviving sub-grid.
    """
    if L ** d > MAX_GRID:
        raise BudgetError("frequency grid exceeds budget")
    out = np.zeros((L,) * d, dtype=np.complex128)
    ks = np.arange(L)
    for q in range(1, q_max + 1):
        m_res = np.rint(q * ks / L).astype(np.int64)
        t_res = q * ks / L - m_res
        keep = np.abs(t_res) < 0.25
        if not keep.any():
            continue
        kk = ks[keep]
        tt = t_res[keep]
        mm = m_res[keep] % q
        n_keep = kk.size
        shape = (n_keep,) * d
        # radial argument |xi - m/q| = |t|/q
        t_sq = tt * tt
        norm_sq = np.zeros(shape)
        for j in range(d):
            norm_sq = norm_sq + t_sq.reshape((1,) * j + (-1,) + (1,) * (d - 1 - j))
        sup_t = np.zeros(shape)
        for j in range(d):
            sup_t = np.maximum(sup_t, np.abs(tt).reshape(
                (1,) * j + (-1,) + (1,) * (d - 1 - j)))
        from .core import _PHI
        phi_block = _PHI.profile(sup_t)
        ds_block = _sphere_ft_radial(
            d, (math.sqrt(lam) / q) * np.sqrt(norm_sq).ravel()).reshape(shape)
        if q == 1:
            gauss_block = np.ones(shape, dtype=np.complex128)
        else:
            if q > MAX_Q_TABLE:
                raise BudgetError("q exceeds table budget")
            tables = {int(m): gauss_g_table(q, int(m), 0)
                      for m in np.unique(mm)}
            prim = _primitive_mask(q)
            phase = _phase_sa(q, lam)
            gauss_block = np.zeros(shape, dtype=np.complex128)
            idx = np.nonzero(prim)
            for a1, a2, a3 in zip(*idx):
                w_a = phase[a1, a2, a3]
                gvec = np.array([tables[int(m)][a1, a2, a3] for m in mm])
                block = gvec
                for _ in range(d - 1):
                    block = np.multiply.outer(block, gvec)
                gauss_block += w_a * block
        contrib = gauss_block * phi_block * ds_block
        # scatter into the full L^d grid
        index = np.ix_(*([kk] * d))
        out[index] += contrib
    return compute_c_d(d) * out


def apply_main_term_M(lam: int, f: GridFunction, L: int,
                      q_max: int = 8) -> GridFunction:
    """Periodize f on [0, L)^d, multiply its DFT by M^hat at frequencies k/L,
    invert, and read back. L must clear the wraparound guard."""
    d = f.d
    diam = 2 * f.support_radius()
    if L <= 2 * diam + 4 * math.ceil(math.sqrt(lam)):
        raise ArgumentError("periodization guard violated")
    if L ** d > MAX_GRID:
        raise BudgetError("box exceeds budget")
    F = np.zeros((L,) * d, dtype=np.complex128)
    for k, v in f.entries.items():
        F[tuple(c % L for c in k)] += v
    mhat = main_term_multiplier_grid(lam, d, L, q_max)
    # DFT convention: f^hat(xi) = sum f(x) e(-x.xi); multiplier acts there
    out_grid = np.fft.ifftn(np.fft.fftn(F) * mhat)
    out: dict = {}
    half = L // 2
    idx = np.argwhere(np.abs(out_grid) > 1e-12)
    vals = out_grid[tuple(idx.T)]
    for row, v in zip(idx, vals):
        key = tuple(int(c) - L if c > half else int(c) for c in row)
        out[key] = complex(v)
    return GridFunction(d, out)


def lp_norm(f: GridFunction, p) -> float:
    """(sum |f|^p)^{1/p}; sup norm for p = inf."""
    if p != math.inf and p < 1:
        raise ArgumentError("p must be >= 1 or inf")
    vals = [abs(v) for v in f.entries.values()]
    if not vals:
        return 0.0
    if p == math.inf:
        return max(vals)
    vals.sort()
    return float(sum(v ** p for v in vals) ** (1.0 / p))
