"""Zonotopes of essential central arrangements and their angle sums.

The zonotope ``Z = sum_i [-eta_i, eta_i]`` has one vertex per region.  Its
face numbers follow from the intersection lattice, and the angle sums
``alpha_k`` are obtained two independent ways:

* from face numbers of ``Z`` and of a generic projection of ``Z``
  (``alpha_k = (f_k(Z) - f_k(Z')) / 2`` for equiprojective polytopes), and
* from the characteristic polynomial of the order dual of the lattice.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arrangement import Arrangement, SignVector
from .errors import NotEssential
from .lattice import IntersectionLattice, _require_essential, dual_characteristic_polynomial, truncate
from .linalg import Vector


@dataclass(frozen=True)
class ZonotopeModel:
    generators: tuple[Vector, ...]
    vertex_map: dict[str, Vector]
    dim: int

    def vertex(self, signs: str) -> Vector:
        return self.vertex_map[signs]


@dataclass(frozen=True)
class AngleProfile:
    f: list[int]
    alpha: list[Fraction]


def zonotope_vertices(arr: Arrangement, regions: list[SignVector]) -> ZonotopeModel:
    """Vertex ``sum_i s_i eta_i`` for each region ``s``; its normal cone is the closed region."""
    if not arr.is_essential:
        raise NotEssential("zonotope vertices need an essential arrangement")
    d = arr.dimension
    vmap = {}
    for r in regions:
        v = [Fraction(0)] * d
        for n, s in zip(arr.normals, r.signs):
            sign = 1 if s == "+" else -1
            v = [a + sign * b for a, b in zip(v, n)]
        vmap[r.signs] = tuple(v)
    return ZonotopeModel(tuple(arr.normals), vmap, d)


def _zaslavsky(lat: IntersectionLattice) -> list[int]:
    d = lat.ambient_dim
    f = [0] * (d + 1)
    for x in lat.flats:
        f[d - x.dim] += sum((-1) ** (x.dim - y.dim) * lat.mu(x, y) for y in lat.up(x))
    return f


def f_vector_zaslavsky(lat: IntersectionLattice) -> list[int]:
    """``f_k = sum_{dim x = d-k} sum_{y >= x} (-1)^(dim x - dim y) mu(x, y)``, with ``f_d = 1``."""
    _require_essential(lat)
    return _zaslavsky(lat)


def angle_sums_perles_shephard(lat: IntersectionLattice) -> list[Fraction]:
    """Angle sums from face numbers of ``Z`` and of its generic shadow ``Z'``.

    ``Z'`` is the zonotope of the truncated lattice; its top face count is
    taken as zero.
    """
    _require_essential(lat)
    d = lat.ambient_dim
    if d < 1:
        raise NotEssential("angle sums need d >= 1")
    f = _zaslavsky(lat)
    f_shadow = _zaslavsky(truncate(lat))
    f_shadow[d - 1] = 0
    alpha = [Fraction(f[k] - f_shadow[k], 2) for k in range(d)] + [Fraction(1)]
    if any(a < 0 for a in alpha):
        raise ArithmeticError(f"negative angle sum {alpha}; lattice is inconsistent")
    return alpha


def angle_sums_dual(lat: IntersectionLattice) -> list[Fraction]:
    """``alpha_i = |[t^i] chi_dual(t)|``."""
    coeffs = dual_characteristic_polynomial(lat).coefficients
    return [Fraction(abs(c)) for c in coeffs]


def vertex_lemma_check(lat: IntersectionLattice) -> tuple[Fraction, Fraction]:
    """``(alpha_0, |mu(bottom, top)|)``; the two agree for every zonotope."""
    alpha0 = angle_sums_perles_shephard(lat)[0]
    return alpha0, Fraction(abs(lat.mu(lat.bottom, lat.top)))


def angle_profile(lat: IntersectionLattice) -> AngleProfile:
    return AngleProfile(f_vector_zaslavsky(lat), angle_sums_perles_shephard(lat))
