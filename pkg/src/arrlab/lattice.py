"""Intersection lattices, Moebius functions and characteristic polynomials.

Flats are ordered by reverse inclusion.  Because a flat is determined by the
set of hyperplanes containing it, ``x <= y`` is tested as inclusion of those
index sets; this also works for the abstract (truncated) lattices that have
no geometric realization at hand.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from . import linalg
from .arrangement import Arrangement, canonicalize, essentialize
from .errors import FlatNotFound, NotEssential
from .linalg import Vector


@dataclass(frozen=True)
class Flat:
    id: int
    basis: Optional[tuple[Vector, ...]]
    dim: int
    hyperplanes: frozenset[int]

    def label(self) -> str:
        return "{" + ",".join(str(i) for i in sorted(self.hyperplanes)) + "}"


@dataclass(frozen=True)
class CharPoly:
    """Polynomial with ``coefficients[i]`` the coefficient of ``t**i``."""

    coefficients: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, t):
        return sum(c * t**i for i, c in enumerate(self.coefficients))

    def coefficient(self, power: int) -> int:
        return self.coefficients[power] if 0 <= power < len(self.coefficients) else 0

    def high_first(self) -> list[int]:
        return list(reversed(self.coefficients))

    def __str__(self) -> str:
        terms = []
        for p in range(self.degree, -1, -1):
            c = self.coefficients[p]
            if c == 0:
                continue
            mag = abs(c)
            body = {0: f"{mag}", 1: "t" if mag == 1 else f"{mag}t"}.get(p, f"t^{p}" if mag == 1 else f"{mag}t^{p}")
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        first = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        return " ".join([first] + [f"{s} {b}" for s, b in terms[1:]])


class IntersectionLattice:
    """Graded lattice of flats with rank ``rho(x) = ambient_dim - dim(x)``.

    ``flats`` are sorted by rank and then by their hyperplane sets, so flat
    ids are deterministic.  ``flats[0]`` is the bottom (the ambient space).
    """

    def __init__(self, flats: list[Flat], ambient_dim: int, arrangement: Optional[Arrangement] = None):
        self.flats = tuple(flats)
        self.ambient_dim = ambient_dim
        self.arrangement = arrangement
        self._by_set = {f.hyperplanes: f for f in self.flats}

    def __len__(self) -> int:
        return len(self.flats)

    def __iter__(self):
        return iter(self.flats)

    def rho(self, x: Flat) -> int:
        return self.ambient_dim - x.dim

    @property
    def bottom(self) -> Flat:
        return self.flats[0]

    @property
    def top(self) -> Flat:
        tops = [f for f in self.flats if all(self.leq(g, f) for g in self.flats)]
        if len(tops) != 1:
            raise ValueError("lattice has no unique top element")
        return tops[0]

    @property
    def rank(self) -> int:
        return max(self.rho(f) for f in self.flats)

    @property
    def is_essential(self) -> bool:
        return self.rank == self.ambient_dim

    def leq(self, x: Flat, y: Flat) -> bool:
        return x.hyperplanes <= y.hyperplanes

    def flat(self, key) -> Flat:
        """Look up a flat by id, hyperplane index set, or ``Flat`` instance."""
        if isinstance(key, Flat):
            key = key.hyperplanes
        if isinstance(key, int):
            if 0 <= key < len(self.flats):
                return self.flats[key]
            raise FlatNotFound(key)
        f = self._by_set.get(frozenset(key))
        if f is None:
            raise FlatNotFound(key)
        return f

    def closure(self, hyperplanes) -> Flat:
        """Smallest flat (lowest rank) whose hyperplane set contains ``hyperplanes``."""
        hs = frozenset(hyperplanes)
        f = self._by_set.get(hs)
        if f is not None:
            return f
        return min((g for g in self.flats if hs <= g.hyperplanes), key=self.rho)

    def up(self, x: Flat) -> list[Flat]:
        return [y for y in self.flats if self.leq(x, y)]

    def covers(self) -> list[tuple[int, int]]:
        """Covering pairs ``(x.id, y.id)`` with ``y`` one rank above ``x``."""
        return [
            (x.id, y.id)
            for x in self.flats
            for y in self.flats
            if self.rho(y) == self.rho(x) + 1 and self.leq(x, y)
        ]

    @cached_property
    def mobius(self) -> dict[tuple[int, int], int]:
        """Full table ``mu[(x.id, y.id)]`` for all ``x <= y``."""
        mu: dict[tuple[int, int], int] = {}
        for x in self.flats:
            above = self.up(x)  # sorted by rank, so every z < y is already done
            for y in above:
                if y.id == x.id:
                    mu[x.id, y.id] = 1
                else:
                    mu[x.id, y.id] = -sum(
                        mu[x.id, z.id] for z in above if z.id != y.id and self.leq(z, y)
                    )
        return mu

    def mu(self, x, y=None) -> int:
        """``mu(x, y)``; with one argument, ``mu(bottom, x)``."""
        if y is None:
            x, y = self.bottom, x
        x, y = self.flat(x), self.flat(y)
        if not self.leq(x, y):
            return 0
        return self.mobius[x.id, y.id]


def mobius_values(lat: IntersectionLattice) -> dict[tuple[int, int], int]:
    return lat.mobius


def _make_lattice(entries, ambient_dim, arrangement=None) -> IntersectionLattice:
    """``entries``: iterable of (basis, dim, hyperplane set)."""
    ordered = sorted(entries, key=lambda e: (ambient_dim - e[1], sorted(e[2])))
    flats = [Flat(i, b, dim, hs) for i, (b, dim, hs) in enumerate(ordered)]
    return IntersectionLattice(flats, ambient_dim, arrangement)


def build_lattice(arr: Arrangement) -> IntersectionLattice:
    """All intersections of hyperplanes, found by closing under single-hyperplane intersection."""
    d = arr.dimension
    normals = arr.normals

    def closure(rows):
        red, _ = linalg.rref(rows, d)
        key = tuple(red)
        hs = frozenset(i for i, n in enumerate(normals) if linalg.rank(red + [n], d) == len(red))
        return key, hs

    start = (tuple(), frozenset())
    seen = {start[0]: start[1]}
    queue = deque([start])
    while queue:
        key, hs = queue.popleft()
        for i, n in enumerate(normals):
            if i in hs:
                continue
            nkey, nhs = closure(list(key) + [n])
            if nkey not in seen:
                seen[nkey] = nhs
                queue.append((nkey, nhs))
    entries = [(key, d - len(key), hs) for key, hs in seen.items()]
    return _make_lattice(entries, d, arr)


def characteristic_polynomial(lat: IntersectionLattice) -> CharPoly:
    """Poset-rank form: ``sum_x mu(x) t^(r - rho(x))``, degree ``r``."""
    r = lat.rank
    coeffs = [0] * (r + 1)
    for x in lat.flats:
        coeffs[r - lat.rho(x)] += lat.mu(x)
    return CharPoly(tuple(coeffs))


def region_count_check(lat: IntersectionLattice) -> int:
    """``(-1)^r chi(-1)``, the number of regions."""
    return (-1) ** lat.rank * characteristic_polynomial(lat)(-1)


def _require_essential(lat: IntersectionLattice) -> None:
    if not lat.is_essential:
        raise NotEssential(f"lattice rank {lat.rank} < ambient dimension {lat.ambient_dim}")


def dual_characteristic_polynomial(lat: IntersectionLattice) -> CharPoly:
    """Characteristic polynomial of the order dual: ``[t^i] = sum_{dim x = d-i} mu(x, top)``."""
    _require_essential(lat)
    d = lat.ambient_dim
    top = lat.top
    coeffs = [0] * (d + 1)
    for x in lat.flats:
        coeffs[d - x.dim] += lat.mu(x, top)
    return CharPoly(tuple(coeffs))


def truncate(lat: IntersectionLattice) -> IntersectionLattice:
    """Drop the coatoms; the old top moves down to rank ``d - 1``.

    The result is the lattice of a generic projection of the arrangement
    into ``R^(d-1)``.  Flat dimensions are re-expressed in that space.
    """
    _require_essential(lat)
    d = lat.ambient_dim
    if d < 1:
        raise NotEssential("cannot truncate a rank-0 lattice")
    top = lat.top
    entries = []
    for x in lat.flats:
        if x.id == top.id:
            entries.append((None, 0, x.hyperplanes))
        elif lat.rho(x) <= d - 2:
            entries.append((x.basis, x.dim - 1, x.hyperplanes))
    return _make_lattice(entries, d - 1)


def lower_interval(lat: IntersectionLattice, x) -> IntersectionLattice:
    """The interval ``[bottom, x]``, realized as the lattice of the hyperplanes
    containing ``x`` restricted to the orthogonal complement of ``x``."""
    x = lat.flat(x)
    arr = lat.arrangement
    if arr is None:
        below = [(f.basis, f.dim - x.dim, f.hyperplanes) for f in lat.flats if lat.leq(f, x)]
        return _make_lattice(below, lat.rho(x))
    idx = sorted(x.hyperplanes)
    sub = canonicalize([arr.normals[i] for i in idx], arr.dimension)
    restricted = essentialize(sub).arrangement
    inner = build_lattice(restricted)
    # relabel hyperplanes back to indices of the ambient arrangement
    entries = [(f.basis, f.dim, frozenset(idx[i] for i in f.hyperplanes)) for f in inner.flats]
    out = _make_lattice(entries, inner.ambient_dim)
    out.arrangement = None
    return out


def is_isomorphic_by_labels(a: IntersectionLattice, b: IntersectionLattice) -> bool:
    """Same hyperplane-set labels and same ranks (label-preserving isomorphism)."""
    ra = {f.hyperplanes: a.rho(f) for f in a.flats}
    rb = {f.hyperplanes: b.rho(f) for f in b.flats}
    return ra == rb
