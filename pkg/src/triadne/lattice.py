"""Exact lattice-point enumeration and configuration counting.

Counts ordered pairs (u, v) in Z^d x Z^d with |u|^2 = |v|^2 = 2 u.v = lambda
(each such pair spans an equilateral triangle of squared side lambda pinned
at the origin), plus the moment counts used to sanity-check exponential-sum
growth and the box-triangle tables.
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import ArgumentError, BudgetError

__all__ = [
    "TrianglePairSet",
    "sum_of_squares_reps",
    "count_triangle_pairs",
    "count_triangle_pairs_dp",
    "completion_counts",
    "nu_gram",
    "r3",
    "vinogradov_count",
    "sixth_moment_count",
    "triangles_in_box",
]

CACHE_ENV = "TRIADNE_CACHE_DIR"
_CACHE_MAGIC = b"TRIA"
_CACHE_VERSION = 1

# hard caps so a typo cannot eat the machine
MAX_REPS = 30_000_000
MAX_PAIRS = 50_000_000


@dataclass
class TrianglePairSet:
    lam: int
    dimension: int
    count: int
    pairs: Optional[np.ndarray] = None  # shape (count, 2, d) when materialized


def _cache_path(lam: int, d: int) -> Optional[str]:
    base = os.environ.get(CACHE_ENV)
    if not base:
        return None
    return os.path.join(base, f"reps_{lam}_{d}.tria")


def _cache_write(path: str, lam: int, d: int, reps: np.ndarray) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<IQIQ", _CACHE_VERSION, lam, d, reps.shape[0]))
        fh.write(np.ascontiguousarray(reps, dtype="<i8").tobytes())
    os.replace(tmp, path)


def _cache_read(path: str, lam: int, d: int) -> Optional[np.ndarray]:
    try:
        with open(path, "rb") as fh:
            if fh.read(4) != _CACHE_MAGIC:
                return None
            ver, flam, fd, count = struct.unpack("<IQIQ", fh.read(24))
            if ver != _CACHE_VERSION or flam != lam or fd != d:
                return None
            data = np.frombuffer(fh.read(8 * count * d), dtype="<i8")
            return data.reshape(count, d).astype(np.int64)
    except (OSError, ValueError, struct.error):
        return None


def sum_of_squares_reps(lam: int, d: int, use_cache: bool = True) -> np.ndarray:
    """All u in Z^d with |u|^2 = lam, as an (R, d) int64 array in lex order."""
    if lam < 0:
        raise ArgumentError("lambda must be nonnegative")
    if d < 1:
        raise ArgumentError("dimension must be >= 1")
    path = _cache_path(lam, d) if use_cache else None
    if path and os.path.exists(path):
        cached = _cache_read(path, lam, d)
        if cached is not None:
            return cached

    # column-by-column expansion; values iterated in ascending order keeps
    # the final row order lexicographic
    prefixes = np.zeros((1, 0), dtype=np.int64)
    remaining = np.array([lam], dtype=np.int64)
    for j in range(d):
        m = math.isqrt(int(remaining.max())) if remaining.size else 0
        vals = np.arange(-m, m + 1, dtype=np.int64)
        nk, nv = prefixes.shape[0], vals.size
        rem = np.repeat(remaining, nv) - np.tile(vals * vals, nk)
        if j == d - 1:
            keep = rem == 0
        else:
            keep = rem >= 0
        if keep.sum() > MAX_REPS:
            raise BudgetError(f"representation list for lambda={lam}, d={d} exceeds budget")
        pref = np.repeat(prefixes, nv, axis=0)[keep]
        col = np.tile(vals, nk)[keep]
        prefixes = np.column_stack([pref, col]) if pref.size or col.size else np.zeros((0, j + 1), np.int64)
        remaining = rem[keep]
        if prefixes.shape[0] == 0:
            prefixes = np.zeros((0, d), dtype=np.int64)
            break
    reps = prefixes.reshape(-1, d)
    if path:
        _cache_write(path, lam, d, reps)
    return reps


def _canonical_classes(reps: np.ndarray):
    """Group reps by sorted absolute coordinates.

    The per-u completion count #{v : 2 u.v = lam} is constant on these
    classes because the rep list is closed under signed permutations.
    Returns (representative row indices, class sizes).
    """
    canon = np.sort(np.abs(reps), axis=1)
    _, first, counts = np.unique(canon, axis=0, return_index=True, return_counts=True)
    return first, counts


def completion_counts(lam: int, d: int):
    """For each rep u of lam, the count c(u) = #{v : |v|^2 = lam, 2 u.v = lam}.

    Returns (reps, counts) with counts aligned to rep rows.
    """
    reps = sum_of_squares_reps(lam, d)
    if reps.shape[0] == 0 or lam % 2 == 1:
        return reps, np.zeros(reps.shape[0], dtype=np.int64)
    target = lam // 2
    canon = np.sort(np.abs(reps), axis=1)
    uniq, inverse = np.unique(canon, axis=0, return_inverse=True)
    first = np.full(uniq.shape[0], -1, dtype=np.int64)
    # first occurrence per class
    seen = {}
    for i, cls in enumerate(inverse):
        if cls not in seen:
            seen[cls] = i
    class_count = np.zeros(uniq.shape[0], dtype=np.int64)
    for cls, i in seen.items():
        dots = reps @ reps[i]
        class_count[cls] = int(np.count_nonzero(dots == target))
    return reps, class_count[inverse]


def count_triangle_pairs(lam: int, d: int, materialize: bool = False) -> TrianglePairSet:
    """Exact #V_lambda by scanning rep pairs for the dot-product condition."""
    if lam < 0:
        raise ArgumentError("lambda must be nonnegative")
    if lam % 2 == 1:
        return TrianglePairSet(lam, d, 0, np.zeros((0, 2, d), np.int64) if materialize else None)
    reps, cnts = completion_counts(lam, d)
    total = int(cnts.sum())
    pairs = None
    if materialize:
        if total > MAX_PAIRS:
            raise BudgetError(f"materializing {total} pairs exceeds budget")
        target = lam // 2
        chunks = []
        for i in range(reps.shape[0]):
            vs = reps[(reps @ reps[i]) == target]
            if vs.size:
                us = np.broadcast_to(reps[i], vs.shape)
                chunks.append(np.stack([us, vs], axis=1))
        pairs = (np.concatenate(chunks, axis=0) if chunks
                 else np.zeros((0, 2, d), np.int64))
        assert pairs.shape[0] == total
    return TrianglePairSet(lam, d, total, pairs)


def count_triangle_pairs_dp(lam: int, d: int) -> int:
    """Independent #V_lambda oracle: coordinate DP on (sum x^2, sum xy, sum y^2).

    Partial dot products stay in [-lam, lam] by Cauchy-Schwarz once the
    partial square sums are clamped to [0, lam], so clamping is lossless.
    """
    if lam < 0:
        raise ArgumentError("lambda must be nonnegative")
    if lam % 2 == 1:
        return 0
    if lam == 0:
        return 1
    m = math.isqrt(lam)
    off = lam  # dot-product axis offset
    state = np.zeros((lam + 1, 2 * lam + 1, lam + 1), dtype=np.int64)
    state[0, off, 0] = 1
    moves = [(x, y) for x in range(-m, m + 1) for y in range(-m, m + 1)]
    for _ in range(d):
        new = np.zeros_like(state)
        for x, y in moves:
            dx, dz = x * x, y * y
            dy = x * y
            # target slices after shifting by (dx, dy, dz), clipped to range
            ys, yt = (0, dy) if dy >= 0 else (-dy, 0)
            ylen = 2 * lam + 1 - abs(dy)
            src = state[: lam + 1 - dx, ys: ys + ylen, : lam + 1 - dz]
            new[dx:, yt: yt + ylen, dz:] += src
        state = new
    return int(state[lam, off + lam // 2, lam])


def nu_gram(a: int, b: int, c: int) -> int:
    """#{x, y in Z^3 : |x|^2 = a, |y|^2 = c, x.y = b}."""
    if a < 0 or c < 0:
        return 0
    if b * b > a * c:
        return 0  # Cauchy-Schwarz
    xs = sum_of_squares_reps(a, 3)
    ys = sum_of_squares_reps(c, 3)
    if xs.shape[0] == 0 or ys.shape[0] == 0:
        return 0
    dots = xs @ ys.T
    return int(np.count_nonzero(dots == b))


def r3(n: int) -> int:
    """Number of representations of n as a sum of three squares."""
    if n < 0:
        return 0
    return int(sum_of_squares_reps(n, 3).shape[0])


# ---------------------------------------------------------------------------
# moment counts via sparse additive convolution on packed integer keys
# ---------------------------------------------------------------------------


def _make_packer(maxima):
    """Signed mixed-radix packing: additive, injective within the given box."""
    strides = []
    s = 1
    for mx in reversed(maxima):
        strides.append(s)
        s *= 2 * mx + 1
    if s >= 2 ** 62:
        raise BudgetError("packed key space exceeds 64-bit budget")
    strides = np.array(list(reversed(strides)), dtype=np.int64)

    def pack(cols):
        out = np.zeros(cols[0].shape, dtype=np.int64)
        for c, st in zip(cols, strides):
            out += c.astype(np.int64) * st
        return out

    return pack


def _sparse_conv(keys_a, cnt_a, keys_b, cnt_b, chunk=4000):
    """Additive convolution of two packed-key distributions."""
    parts_k, parts_c = [], []
    for lo in range(0, keys_a.size, chunk):
        ka = keys_a[lo: lo + chunk]
        ca = cnt_a[lo: lo + chunk]
        k = (ka[:, None] + keys_b[None, :]).ravel()
        c = (ca[:, None] * cnt_b[None, :]).ravel()
        uk, inv = np.unique(k, return_inverse=True)
        # float64 accumulation is exact here: per-chunk counts stay < 2^53
        parts_k.append(uk)
        parts_c.append(np.bincount(inv, weights=c.astype(np.float64)).astype(np.int64))
        # merge periodically to bound memory
        if len(parts_k) >= 16:
            keys = np.concatenate(parts_k)
            cnts = np.concatenate(parts_c)
            uk, inv = np.unique(keys, return_inverse=True)
            merged = np.zeros(uk.size, dtype=np.int64)
            np.add.at(merged, inv, cnts)
            parts_k, parts_c = [uk], [merged]
    keys = np.concatenate(parts_k) if parts_k else np.zeros(0, np.int64)
    cnts = np.concatenate(parts_c) if parts_c else np.zeros(0, np.int64)
    uk, inv = np.unique(keys, return_inverse=True)
    merged = np.zeros(uk.size, dtype=np.int64)
    np.add.at(merged, inv, cnts)
    return uk, merged


def _moment_point_keys(N: int, with_linear: bool):
    """Packed keys of (x, y, x^2, xy, y^2) (or just the quadratic triple)."""
    g = np.arange(-N, N + 1, dtype=np.int64)
    X, Y = np.meshgrid(g, g, indexing="ij")
    x, y = X.ravel(), Y.ravel()
    if with_linear:
        cols = [x, y, x * x, x * y, y * y]
    else:
        cols = [x * x, x * y, y * y]
    return cols


def vinogradov_count(s: int, N: int) -> int:
    """J_{s,2,2}(N): solutions of the full degree-<=2 moment system in 4s vars."""
    if s < 1 or N < 0:
        raise ArgumentError("need s >= 1 and N >= 0")
    if N == 0:
        return 1
    if s > 4:
        raise BudgetError("s > 4 exceeds the desk-scale budget")
    cols = _moment_point_keys(N, with_linear=True)
    # pack against the widest level actually formed (level 4 for the s=4 path,
    # level s otherwise)
    lvl = 4 if s == 4 else s
    maxima = [lvl * N, lvl * N, lvl * N * N, lvl * N * N, lvl * N * N]
    pack = _make_packer(maxima)
    k1 = pack(cols)
    c1 = np.ones(k1.size, dtype=np.int64)
    if s == 1:
        uk, inv = np.unique(k1, return_inverse=True)
        cc = np.bincount(inv)
        return int((cc.astype(object) ** 2).sum())
    k2, c2 = _sparse_conv(k1, c1, k1, c1)
    if s == 2:
        return int((c2.astype(object) ** 2).sum())
    if s == 3:
        k3, c3 = _sparse_conv(k2, c2, k1, c1)
        return int((c3.astype(object) ** 2).sum())
    return _j4_by_differences(cols, k2, c2, N, maxima)


def _j4_by_differences(point_cols, k2, c2, N, maxima):
    """J_4 = sum_m D(m)^2 with D the autocorrelation of the 2-point distribution.

    Differences are bucketed by their linear part (delta sum-x, delta sum-y)
    so no global difference table is ever held in memory.
    """
    # unpack level-2 keys back into (linear pair, quadratic triple)
    pack_all = _make_packer(maxima)
    # recover fields by division in the same mixed radix
    strides = []
    st = 1
    for mx in reversed(maxima):
        strides.append(st)
        st *= 2 * mx + 1
    strides = list(reversed(strides))

    def unpack(keys):
        out = []
        rem = keys.copy()
        for mx, stv in zip(maxima, strides):
            # balanced digits: the lower-order tail lies in
            # [-(stv-1)/2, (stv-1)/2], so recover by rounding, not flooring
            digit = (rem + (stv - 1) // 2) // stv
            out.append(digit.astype(np.int64))
            rem = rem - digit * stv
        return out

    f = unpack(k2)
    lin = f[0] * (10 ** 9) + f[1]  # composite linear id (values < 2^62)
    quad_pack = _make_packer([8 * N * N, 8 * N * N, 8 * N * N])
    qkeys = quad_pack([f[2], f[3], f[4]])

    order = np.argsort(lin, kind="stable")
    lin, qkeys, c2s = lin[order], qkeys[order], c2[order]
    uniq_lin, starts = np.unique(lin, return_index=True)
    bounds = np.append(starts, lin.size)
    groups = {}
    for i, lv in enumerate(uniq_lin):
        sl = slice(bounds[i], bounds[i + 1])
        groups[int(lv)] = (qkeys[sl], c2s[sl])

    total = 0
    lin_list = sorted(groups)
    lin_set = set(lin_list)
    # iterate over difference buckets (delta_a, delta_b); level-2 linear
    # sums lie in [-2N, 2N], so differences lie in [-4N, 4N].  The
    # autocorrelation satisfies D(-m) = D(m), so only lexicographically
    # nonnegative buckets are scanned and doubled.
    for da in range(0, 4 * N + 1):
        for db in range(-4 * N, 4 * N + 1):
            if da == 0 and db < 0:
                continue
            mult = 1 if (da == 0 and db == 0) else 2
            delta = da * (10 ** 9) + db
            pk_parts, pc_parts = [], []
            for l1 in lin_list:
                l2 = l1 - delta
                if l2 not in lin_set:
                    continue
                qa, ca = groups[l1]
                qb, cb = groups[l2]
                pk_parts.append((qa[:, None] - qb[None, :]).ravel())
                pc_parts.append((ca[:, None] * cb[None, :]).ravel())
            if not pk_parts:
                continue
            keys = np.concatenate(pk_parts)
            cnts = np.concatenate(pc_parts)
            uk, inv = np.unique(keys, return_inverse=True)
            agg = np.zeros(uk.size, dtype=np.int64)
            np.add.at(agg, inv, cnts)
            total += mult * int((agg.astype(object) ** 2).sum())
    return total


def sixth_moment_count(N: int) -> int:
    """T(N): solutions of the three pure-quadratic moment equations, 12 vars."""
    if N < 0:
        raise ArgumentError("N must be nonnegative")
    if N == 0:
        return 1
    if N > 12:
        raise BudgetError("sixth_moment_count budget is N <= 12")
    cols = _moment_point_keys(N, with_linear=False)
    maxima = [3 * N * N, 3 * N * N, 3 * N * N]
    pack = _make_packer(maxima)
    k1 = pack(cols)
    c1 = np.ones(k1.size, dtype=np.int64)
    k2, c2 = _sparse_conv(k1, c1, k1, c1)
    k3, c3 = _sparse_conv(k2, c2, k1, c1)
    return int((c3.astype(object) ** 2).sum())


def triangles_in_box(n: int, d: int) -> int:
    """Unordered equilateral triangles with distinct vertices in [0,n]^d."""
    if n < 0 or d < 1:
        raise ArgumentError("need n >= 0 and d >= 1")
    if (n + 1) ** d > 2_000_000:
        raise BudgetError("box too large")
    if n == 0:
        return 0
    total6 = 0  # pinned, ordered count: 6x the unordered one
    for lam in range(2, d * n * n + 1, 2):
        tps = count_triangle_pairs(lam, d, materialize=True)
        if tps.count == 0:
            continue
        u = tps.pairs[:, 0, :]
        v = tps.pairs[:, 1, :]
        hi = np.maximum(np.maximum(u, v), 0)
        lo = np.minimum(np.minimum(u, v), 0)
        widths = (n + 1) - (hi - lo)
        widths = np.maximum(widths, 0)
        total6 += int(np.prod(widths, axis=1).sum())
    assert total6 % 6 == 0
    return total6 // 6


def triangles_in_box_bruteforce(n: int, d: int) -> int:
    """Direct enumeration oracle over point triples; desk scale only."""
    if (n + 1) ** d > 4000:
        raise BudgetError("brute-force box too large")
    grids = np.meshgrid(*[np.arange(n + 1)] * d, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    m = pts.shape[0]
    total = 0
    for i in range(m):
        for j in range(i + 1, m):
            dij = int(((pts[i] - pts[j]) ** 2).sum())
            for k in range(j + 1, m):
                if int(((pts[i] - pts[k]) ** 2).sum()) == dij and \
                   int(((pts[j] - pts[k]) ** 2).sum()) == dij:
                    total += 1
    return total
