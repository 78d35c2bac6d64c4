"""Projection onto polyhedral cones and projection-volume estimates.

A cone is stored by inward normals ``a_i`` so that ``C = {y : a_i . y >= 0}``.
Its polar is ``cone{-a_i}`` and every ``z`` splits as
``z = proj_C(z) + proj_polar(z)`` with orthogonal parts.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .errors import ConvergenceFailure, NotRank2

DEFAULT_TOL = 1e-9
BLOCK = 1 << 16


@dataclass(frozen=True, eq=False)
class Cone:
    """Closed polyhedral cone ``{y : rows[i] . y >= 0}``.

    ``rows`` are the inward normals ``s_i * normal_i`` as floats.  When the
    cone comes from exact data, ``exact_rows`` keeps the rational originals.
    ``facets`` indexes the irredundant rows (all rows when unknown).
    """

    rows: np.ndarray
    exact_rows: Optional[tuple] = None
    witness: Optional[np.ndarray] = None
    facets: tuple[int, ...] = ()

    @classmethod
    def from_exact(cls, rows, witness=None, facets=None, dim=None) -> "Cone":
        exact = tuple(linalg.vec(r) for r in rows)
        if not exact and dim is None:
            raise ValueError("an empty cone description needs an explicit dim")
        arr = np.array([[float(x) for x in r] for r in exact], dtype=float).reshape(len(exact), -1 if exact else dim)
        if facets is None:
            facets = _exact_facets(exact)
        w = None if witness is None else np.array([float(x) for x in witness])
        return cls(arr, exact, w, tuple(facets))

    @classmethod
    def from_float(cls, rows, witness=None, facets=None) -> "Cone":
        arr = np.atleast_2d(np.asarray(rows, dtype=float))
        if facets is None:
            facets = range(arr.shape[0])
        w = None if witness is None else np.asarray(witness, dtype=float)
        return cls(arr, None, w, tuple(facets))

    @property
    def dim(self) -> int:
        return self.rows.shape[1]

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    @property
    def polar_generators(self) -> np.ndarray:
        return -self.rows

    def extreme_rays(self) -> list[tuple[Fraction, ...]]:
        """Primitive integer extreme rays of a pointed exact cone."""
        if self.exact_rows is None:
            raise ValueError("extreme rays need exact rows")
        d = self.dim
        rows = [self.exact_rows[i] for i in self.facets]
        rays = set()
        for sub in itertools.combinations(range(len(rows)), d - 1):
            ns = linalg.nullspace([rows[i] for i in sub], d)
            if len(ns) != 1:
                continue
            v = ns[0]
            for cand in (v, tuple(-x for x in v)):
                if all(linalg.dot(r, cand) >= 0 for r in rows):
                    rays.add(linalg.primitive(cand))
        return sorted(rays)


def _exact_facets(rows) -> list[int]:
    if not rows:
        return []
    d = len(rows[0])
    out = []
    for i, a in enumerate(rows):
        others = [r for j, r in enumerate(rows) if j != i and linalg.rank([a, r], d) == 2]
        if linalg.strict_witness(others, [a], d) is not None:
            out.append(i)
    return out


@dataclass(frozen=True)
class ProjectionResult:
    point: np.ndarray
    tight_set: frozenset[int]
    face_dim: int
    residual: np.ndarray


@dataclass(frozen=True)
class ExactProjection:
    point: tuple[Fraction, ...]
    tight_set: frozenset[int]
    face_dim: int
    residual: tuple[Fraction, ...]


@dataclass(frozen=True)
class VolumeEstimate:
    nu: list[float]
    samples: int
    stderr: list[float]
    seed: int
    counts: list[int] = field(default_factory=list)


# --- single-point projection -------------------------------------------------


def nnls(G: np.ndarray, z: np.ndarray, maxiter: Optional[int] = None, tol: float = 1e-12) -> np.ndarray:
    """Lawson-Hanson active set for ``min ||G x - z||, x >= 0``.

    The entering column is the one with the largest gradient; ties go to the
    smallest index.  Once a passive set repeats, entering switches to the
    smallest eligible index so the iteration cannot cycle.
    """
    d, m = G.shape
    if maxiter is None:
        maxiter = 50 * max(m, 1)
    x = np.zeros(m)
    passive = np.zeros(m, dtype=bool)
    scale = tol * max(1.0, float(np.abs(z).max(initial=0.0))) * max(1.0, float(np.abs(G).max(initial=0.0)))
    seen = set()
    bland = False
    blocked = np.zeros(m, dtype=bool)
    it = 0
    while True:
        w = G.T @ (z - G @ x)
        cand = np.flatnonzero(~passive & ~blocked & (w > scale))
        if cand.size == 0:
            return x
        j = int(cand[0]) if bland else int(cand[np.argmax(w[cand])])
        trial = passive.copy()
        trial[j] = True
        idx = np.flatnonzero(trial)
        s = np.zeros(m)
        s[idx] = np.linalg.lstsq(G[:, idx], z, rcond=None)[0]
        if s[j] <= 0:
            # numerically dependent column; skip it until the iterate moves
            blocked[j] = True
            continue
        passive = trial
        key = passive.tobytes()
        if key in seen:
            bland = True
        seen.add(key)
        while True:
            it += 1
            if it > maxiter:
                raise ConvergenceFailure(f"NNLS exceeded {maxiter} iterations")
            if (s[idx] > 0).all():
                x = s
                break
            neg = idx[s[idx] <= 0]
            alpha = np.min(x[neg] / (x[neg] - s[neg]))
            x = x + alpha * (s - x)
            passive &= x > tol
            x[~passive] = 0.0
            idx = np.flatnonzero(passive)
            s = np.zeros(m)
            if idx.size:
                s[idx] = np.linalg.lstsq(G[:, idx], z, rcond=None)[0]
        blocked[:] = False


def tight_set(cone: Cone, y: np.ndarray, tol: float = DEFAULT_TOL) -> frozenset[int]:
    y = np.asarray(y, dtype=float)
    ny = float(np.linalg.norm(y))
    norms = np.linalg.norm(cone.rows, axis=1)
    vals = np.abs(cone.rows @ y)
    return frozenset(int(i) for i in np.flatnonzero(vals <= tol * (1 + ny) * norms))


def _numeric_rank(rows: np.ndarray, tol: float) -> int:
    if rows.size == 0:
        return 0
    unit = rows / np.linalg.norm(rows, axis=1, keepdims=True)
    s = np.linalg.svd(unit, compute_uv=False)
    return int((s > 1e-8 * s[0]).sum())


def _face_dim(cone: Cone, tight: frozenset[int], tol: float) -> int:
    idx = sorted(tight)
    if cone.exact_rows is not None:
        return cone.dim - linalg.rank([cone.exact_rows[i] for i in idx], cone.dim)
    return cone.dim - _numeric_rank(cone.rows[idx], tol)


def project_point(cone: Cone, z, tol: float = DEFAULT_TOL) -> ProjectionResult:
    """Orthogonal projection of ``z`` onto ``cone``.

    Computed through the polar: ``proj_C(z) = z - G lam`` where ``lam`` is the
    nonnegative least-squares fit of ``z`` by the polar generators ``G = -A^T``.
    """
    z = np.asarray(z, dtype=float)
    if cone.m == 0:
        return ProjectionResult(z.copy(), frozenset(), cone.dim, np.zeros_like(z))
    G = cone.polar_generators.T
    lam = nnls(G, z)
    residual = G @ lam
    y = z - residual
    tight = tight_set(cone, y, tol)
    return ProjectionResult(y, tight, _face_dim(cone, tight, tol), residual)


def classify_projection(cone: Cone, z, tol: float = DEFAULT_TOL) -> int:
    """Dimension of the face whose relative interior contains ``proj_C(z)``."""
    return project_point(cone, z, tol).face_dim


def project_point_exact(cone: Cone, z) -> ExactProjection:
    """Exact projection by enumerating linearly independent active sets.

    Brute force over subsets; meant as an oracle for small cones.
    """
    if cone.exact_rows is None:
        raise ValueError("exact projection needs exact rows")
    rows = cone.exact_rows
    z = linalg.vec(z)
    d = len(z)
    m = len(rows)
    for size in range(0, min(m, d) + 1):
        for S in itertools.combinations(range(m), size):
            AS = [rows[i] for i in S]
            if linalg.rank(AS, d) < size:
                continue
            if size:
                gram = [[linalg.dot(a, b) for b in AS] for a in AS]
                lam = linalg.solve(gram, [-linalg.dot(a, z) for a in AS])
                if any(l < 0 for l in lam):
                    continue
                y = tuple(zc + sum((l * a[c] for l, a in zip(lam, AS)), Fraction(0)) for c, zc in enumerate(z))
            else:
                y = z
            if all(linalg.dot(a, y) >= 0 for a in rows):
                tight = frozenset(i for i, a in enumerate(rows) if linalg.dot(a, y) == 0)
                k = d - linalg.rank([rows[i] for i in sorted(tight)], d)
                return ExactProjection(y, tight, k, tuple(a - b for a, b in zip(z, y)))
    raise AssertionError("no active set satisfied the optimality conditions")


# --- batched projection --------------------------------------------------------


class _ActiveSetTable:
    """Precomputed projectors for every independent subset of facet rows.

    For a subset ``S`` the candidate is ``y = P_S z`` with multipliers
    ``lam = M_S z``; the subset is optimal for ``z`` iff ``lam >= 0`` and
    ``A y >= 0``.
    """

    def __init__(self, cone: Cone):
        A = cone.rows
        norms = np.linalg.norm(A, axis=1)
        self.unit = A / norms[:, None]
        d = cone.dim
        facets = list(cone.facets)
        self.entries = []
        for size in range(0, min(len(facets), d) + 1):
            for S in itertools.combinations(facets, size):
                AS = self.unit[list(S)]
                if size:
                    gram = AS @ AS.T
                    if np.linalg.matrix_rank(gram) < size:
                        continue
                    inv = np.linalg.inv(gram)
                    M = -inv @ AS
                    P = np.eye(d) + AS.T @ M
                else:
                    M = np.zeros((0, d))
                    P = np.eye(d)
                self.entries.append((M, P, self.unit @ P))

    def project(self, Z: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
        """Return projected points and a mask of rows that no subset accepted."""
        N = Z.shape[0]
        Y = np.empty_like(Z)
        slack = tol * (1 + np.linalg.norm(Z, axis=1))
        remaining = np.arange(N)
        for M, P, Q in self.entries:
            Zr = Z[remaining]
            sr = slack[remaining][:, None]
            ok = (Zr @ Q.T >= -sr).all(axis=1)
            if M.shape[0]:
                ok &= (Zr @ M.T >= -sr).all(axis=1)
            hit = remaining[ok]
            Y[hit] = Zr[ok] @ P.T
            remaining = remaining[~ok]
            if remaining.size == 0:
                break
        missed = np.zeros(N, dtype=bool)
        missed[remaining] = True
        return Y, missed


def project_points(cone: Cone, Z, tol: float = DEFAULT_TOL, table: Optional[_ActiveSetTable] = None) -> np.ndarray:
    """Vectorized projection of the rows of ``Z``; falls back to NNLS per row when needed."""
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    if cone.m == 0:
        return Z.copy()
    table = table or _ActiveSetTable(cone)
    Y, missed = table.project(Z, tol)
    for i in np.flatnonzero(missed):
        Y[i] = project_point(cone, Z[i], tol).point
    return Y


def tight_masks(cone: Cone, Y: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Bitmask (as Python-int-compatible uint64) of tight rows for each projected point."""
    if cone.m > 63:
        raise ValueError("tight masks support at most 63 constraints")
    unit = cone.rows / np.linalg.norm(cone.rows, axis=1, keepdims=True)
    ny = np.linalg.norm(Y, axis=1)
    tight = np.abs(Y @ unit.T) <= tol * (1 + ny)[:, None]
    weights = (np.uint64(1) << np.arange(cone.m, dtype=np.uint64))
    return (tight.astype(np.uint64) * weights).sum(axis=1)


# --- sampling -------------------------------------------------------------------


def _block_directions(d: int, seed: int, stream: int, block: int, count: int) -> np.ndarray:
    """Unit directions for sample indices ``block*BLOCK .. block*BLOCK+count-1``.

    Philox keyed by ``(stream, seed)`` with the block index in the top
    counter word; uniforms become Gaussians by Box-Muller
    (``r = sqrt(-2 log(1-u1))``, angle ``2 pi u2``) and are then normalized.
    """
    if not 0 <= seed < 1 << 64 or not 0 <= stream < 1 << 64:
        raise ValueError("seed and stream must fit in 64 bits")
    gen = np.random.Generator(np.random.Philox(key=(stream << 64) | seed, counter=[0, 0, 0, block]))
    h = (d + 1) // 2
    u = gen.random((count, 2 * h))
    r = np.sqrt(-2.0 * np.log1p(-u[:, :h]))
    theta = 2.0 * np.pi * u[:, h:]
    g = np.concatenate([r * np.cos(theta), r * np.sin(theta)], axis=1)[:, :d]
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    np.divide(g, norms, out=g, where=norms > 0)
    return g


def sample_directions(d: int, n: int, seed: int, stream: int = 0) -> np.ndarray:
    """First ``n`` directions of the ``(seed, stream)`` sequence on the unit sphere."""
    parts = []
    for b in range(0, (n + BLOCK - 1) // BLOCK):
        parts.append(_block_directions(d, seed, stream, b, min(BLOCK, n - b * BLOCK)))
    return np.concatenate(parts) if parts else np.zeros((0, d))


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("ARRLAB_THREADS", "1")))
    except ValueError:
        return 1


def _fan_out(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def tight_mask_counts(
    cone: Cone,
    n: int,
    seed: int,
    stream: int = 0,
    tol: float = DEFAULT_TOL,
    workers: Optional[int] = None,
) -> dict[int, int]:
    """Histogram of tight-row bitmasks of ``proj_C(z)`` over ``n`` sampled directions."""
    workers = default_workers() if workers is None else workers
    table = _ActiveSetTable(cone) if cone.m else None
    d = cone.dim

    def run(b):
        count = min(BLOCK, n - b * BLOCK)
        Z = _block_directions(d, seed, stream, b, count)
        if table is None:
            return {0: count}
        Y = project_points(cone, Z, tol, table)
        masks, freq = np.unique(tight_masks(cone, Y, tol), return_counts=True)
        return dict(zip(masks.tolist(), freq.tolist()))

    total: dict[int, int] = {}
    for part in _fan_out(run, list(range((n + BLOCK - 1) // BLOCK)), workers):
        for k, v in part.items():
            total[k] = total.get(k, 0) + v
    return dict(sorted(total.items()))


def _mask_dims(cone: Cone, masks, tol: float) -> dict[int, int]:
    return {mk: _face_dim(cone, frozenset(i for i in range(cone.m) if mk >> i & 1), tol) for mk in masks}


def estimate_volumes_mc(
    cone: Cone,
    n: int,
    seed: int,
    tol: float = DEFAULT_TOL,
    stream: int = 0,
    workers: Optional[int] = None,
) -> VolumeEstimate:
    """Monte Carlo projection volumes ``nu_0..nu_d`` of ``cone``."""
    if n < 1:
        raise ValueError("need at least one sample")
    hist = tight_mask_counts(cone, n, seed, stream, tol, workers)
    return volumes_from_masks(cone, hist, n, seed, tol)


def volumes_from_masks(cone: Cone, hist: dict[int, int], n: int, seed: int, tol: float = DEFAULT_TOL) -> VolumeEstimate:
    dims = _mask_dims(cone, hist, tol)
    counts = [0] * (cone.dim + 1)
    for mk, c in hist.items():
        counts[dims[mk]] += c
    assert sum(counts) == n
    nu = [c / n for c in counts]
    stderr = [math.sqrt(p * (1 - p) / n) for p in nu]
    return VolumeEstimate(nu, n, stderr, seed, counts)


# --- exact planar angles ---------------------------------------------------------


def exact_volumes_rank2(cone: Cone) -> list[float]:
    """Projection volumes of a cone whose inequality rows span at most a plane.

    Such a cone is a pointed cone of dimension ``rank`` times its lineality
    space of dimension ``l = d - rank``.  For rank 2 with opening angle
    fraction ``a`` of the full circle the volumes are ``nu_{l+2} = a``,
    ``nu_{l+1} = 1/2``, ``nu_l = 1/2 - a``.
    """
    d = cone.dim
    exact = cone.exact_rows
    rows = list(exact) if exact is not None else [tuple(r) for r in cone.rows]
    if exact is not None:
        r = linalg.rank(rows, d)
    else:
        r = _numeric_rank(cone.rows, DEFAULT_TOL) if cone.m else 0
    if r > 2:
        raise NotRank2(f"inequality rows have rank {r}")
    nu = [0.0] * (d + 1)
    if r == 0:
        nu[d] = 1.0
        return nu
    if r == 1:
        nu[d] = nu[d - 1] = 0.5
        return nu
    zero = Fraction(0) if exact is not None else 0.0

    def dotp(u, v):
        return sum((a * b for a, b in zip(u, v)), zero)

    def parallel(u, v):
        c = dotp(u, v)
        gap = dotp(u, u) * dotp(v, v) - c * c
        return gap == 0 if exact is not None else abs(gap) <= 1e-12 * dotp(u, u) * dotp(v, v)

    rays = []
    for a in rows:
        other = next(b for b in rows if not parallel(a, b))
        c = dotp(other, a) / dotp(a, a)
        w = tuple(x - c * y for x, y in zip(other, a))
        for cand in (w, tuple(-x for x in w)):
            slack = [dotp(b, cand) for b in rows]
            if exact is not None:
                ok = all(s >= 0 for s in slack)
            else:
                ok = all(s >= -1e-12 * math.sqrt(dotp(b, b) * dotp(cand, cand)) for b, s in zip(rows, slack))
            if ok and not any(parallel(cand, q) and dotp(cand, q) > 0 for q in rays):
                rays.append(cand)
    if len(rays) != 2:
        raise NotRank2(f"expected two extreme rays in the plane, found {len(rays)}")
    u, v = rays
    uv = dotp(u, v)
    cross2 = dotp(u, u) * dotp(v, v) - uv * uv
    theta = math.atan2(math.sqrt(float(cross2)), float(uv))
    frac = theta / (2 * math.pi)
    l = d - 2
    nu[l + 2] = frac
    nu[l + 1] = 0.5
    nu[l] = 0.5 - frac
    return nu


# --- zonotope vertex cones --------------------------------------------------------


def normal_cone_fraction(rays: Sequence[Sequence[Fraction]], Z: np.ndarray) -> int:
    """Number of rows of ``Z`` inside the polar of ``cone(rays)``.

    ``cone{-s_i eta_i}`` is exactly the set of ``z`` with ``z . v <= 0`` for
    every extreme ray ``v`` of the region cone.
    """
    R = np.array([[float(x) for x in v] for v in rays], dtype=float)
    if R.size == 0:
        return int(Z.shape[0])
    return int((Z @ R.T <= 0).all(axis=1).sum())


def normal_cone_solid_angle(zono, region, n: int, seed: int, stream: int = 0) -> VolumeEstimate:
    """Fraction of directions in the cone spanned by ``-s_i eta_i`` for a region.

    This is the solid angle of the zonotope at the vertex dual to ``region``.
    Returned as a two-entry estimate ``[outside, inside]``.
    """
    signs = region.signs if hasattr(region, "signs") else str(region)
    rows = [g if s == "+" else tuple(-x for x in g) for g, s in zip(zono.generators, signs)]
    rays = Cone.from_exact(rows).extreme_rays()
    inside = 0
    for b in range(0, (n + BLOCK - 1) // BLOCK):
        Z = _block_directions(zono.dim, seed, stream, b, min(BLOCK, n - b * BLOCK))
        inside += normal_cone_fraction(rays, Z)
    p = inside / n
    se = math.sqrt(p * (1 - p) / n)
    return VolumeEstimate([1 - p, p], n, [se, se], seed, [n - inside, inside])
