"""Central hyperplane arrangements with exact rational normals.

Cells of an arrangement are encoded by sign vectors over ``{+, 0, -}``
(one character per hyperplane, in arrangement order).  Every sign vector
produced here carries an integer witness point that reproduces its signs
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence

from . import linalg
from .errors import AffineArrangement, DimensionMismatch, NotARegion, ZeroNormal
from .linalg import Vector

SIGN_ORDER = {"+": 0, "0": 1, "-": 2}


def sign_key(signs: str) -> tuple[int, ...]:
    """Sort key for sign strings: lexicographic with ``+ < 0 < -``."""
    return tuple(SIGN_ORDER[c] for c in signs)


def _sign(x: Fraction) -> str:
    return "+" if x > 0 else "-" if x < 0 else "0"


@dataclass(frozen=True)
class Hyperplane:
    """Linear hyperplane ``{z : normal . z = 0}`` stored in canonical form."""

    normal: Vector

    def __post_init__(self):
        lead = next((x for x in self.normal if x != 0), None)
        if lead is None:
            raise ZeroNormal("hyperplane normal is the zero vector")
        if lead != 1:
            raise ValueError("normal is not canonical; use Hyperplane.from_normal")

    @classmethod
    def from_normal(cls, raw) -> "Hyperplane":
        v = linalg.vec(raw)
        lead = next((x for x in v if x != 0), None)
        if lead is None:
            raise ZeroNormal("hyperplane normal is the zero vector")
        return cls(tuple(x / lead for x in v))

    def __call__(self, point: Sequence[Fraction]) -> Fraction:
        return linalg.dot(self.normal, point)


@dataclass(frozen=True)
class Arrangement:
    dimension: int
    hyperplanes: tuple[Hyperplane, ...]
    rank: int = field(init=False, compare=False)

    def __post_init__(self):
        if self.dimension < 0:
            raise DimensionMismatch("dimension must be nonnegative")
        seen = set()
        for h in self.hyperplanes:
            if len(h.normal) != self.dimension:
                raise DimensionMismatch(f"normal {h.normal} does not live in R^{self.dimension}")
            if h.normal in seen:
                raise ValueError(f"duplicate hyperplane {h.normal}")
            seen.add(h.normal)
        object.__setattr__(self, "rank", linalg.rank(self.normals, self.dimension))

    @property
    def normals(self) -> list[Vector]:
        return [h.normal for h in self.hyperplanes]

    def __len__(self) -> int:
        return len(self.hyperplanes)

    @property
    def is_essential(self) -> bool:
        return self.rank == self.dimension

    def signs_of(self, point: Sequence[Fraction]) -> str:
        return "".join(_sign(h(point)) for h in self.hyperplanes)


@dataclass(frozen=True)
class SignVector:
    signs: str
    witness: Vector

    def __str__(self) -> str:
        return self.signs

    @property
    def is_region(self) -> bool:
        return "0" not in self.signs

    def __neg__(self) -> "SignVector":
        flip = {"+": "-", "-": "+", "0": "0"}
        return SignVector("".join(flip[c] for c in self.signs), tuple(-x for x in self.witness))


@dataclass(frozen=True)
class Face:
    cell: SignVector
    zero_set: frozenset[int]
    dim: int

    @property
    def witness(self) -> Vector:
        return self.cell.witness

    @property
    def signs(self) -> str:
        return self.cell.signs


def canonicalize(raw_normals: Iterable, d: int, offsets: Optional[Iterable] = None) -> Arrangement:
    """Build an :class:`Arrangement` from raw rational normals.

    Normals are scaled so the first nonzero entry is ``+1``; scalar multiples
    collapse onto the first occurrence.  Nonzero ``offsets`` are rejected.
    """
    raw = [list(v) for v in raw_normals]
    if offsets is not None:
        offsets = [linalg.to_fraction(b) for b in offsets]
        if len(offsets) != len(raw):
            raise DimensionMismatch("one offset per hyperplane expected")
        if any(offsets):
            raise AffineArrangement("affine hyperplanes (nonzero offsets) are not supported")
    hyperplanes: list[Hyperplane] = []
    seen = set()
    for v in raw:
        if len(v) != d:
            raise DimensionMismatch(f"normal {v} has length {len(v)}, expected {d}")
        h = Hyperplane.from_normal(v)
        if h.normal not in seen:
            seen.add(h.normal)
            hyperplanes.append(h)
    return Arrangement(d, tuple(hyperplanes))


def rank(arr: Arrangement) -> int:
    return arr.rank


def _cell_rows(normals: Sequence[Vector], signs: str):
    pos, zero = [], []
    for n, s in zip(normals, signs):
        if s == "0":
            zero.append(n)
        else:
            pos.append(n if s == "+" else tuple(-x for x in n))
    return pos, zero


def _neg(v: Vector) -> Vector:
    return tuple(-x for x in v)


def _sweep(arr: Arrangement, regions_only: bool) -> list[SignVector]:
    """Incremental insertion: split the current cells by each new hyperplane."""
    d = arr.dimension
    normals = arr.normals
    cells: list[tuple[str, Vector]] = [("", tuple(Fraction(0) for _ in range(d)))]
    for j, h in enumerate(normals):
        prefix = normals[:j]
        new_cells = []
        for signs, w in cells:
            pos, zero = _cell_rows(prefix, signs)
            v = linalg.dot(h, w)
            if v != 0:
                here, other = ("+", "-") if v > 0 else ("-", "+")
                new_cells.append((signs + here, w))
                target = h if other == "+" else _neg(h)
                p = linalg.strict_witness(pos + [target], zero, d)
                if p is not None:
                    new_cells.append((signs + other, p))
                    if not regions_only:
                        hp = linalg.dot(h, p)
                        t = v / (v - hp)
                        q = linalg.primitive([a + t * (b - a) for a, b in zip(w, p)])
                        new_cells.append((signs + "0", q))
            else:
                if not regions_only:
                    new_cells.append((signs + "0", w))
                p = linalg.strict_witness(pos + [h], zero, d)
                if p is not None:
                    new_cells.append((signs + "+", p))
                    n = linalg.strict_witness(pos + [_neg(h)], zero, d)
                    new_cells.append((signs + "-", n))
        cells = new_cells
    out = [SignVector(s, w) for s, w in cells]
    out.sort(key=lambda sv: sign_key(sv.signs))
    return out


def enumerate_regions(arr: Arrangement) -> list[SignVector]:
    """All regions as full sign vectors, each with an interior witness."""
    return _sweep(arr, regions_only=True)


def enumerate_faces(arr: Arrangement) -> list[Face]:
    """All cells (covectors) of the arrangement, from the minimal flat up to the regions."""
    faces = []
    normals = arr.normals
    for sv in _sweep(arr, regions_only=False):
        zero = frozenset(i for i, c in enumerate(sv.signs) if c == "0")
        dim = arr.dimension - linalg.rank([normals[i] for i in zero], arr.dimension)
        faces.append(Face(sv, zero, dim))
    return faces


def realize(arr: Arrangement, signs: str) -> Optional[SignVector]:
    """Return the sign vector with an exact witness, or ``None`` if it is not a cell."""
    if len(signs) != len(arr) or set(signs) - set(SIGN_ORDER):
        raise ValueError(f"bad sign string {signs!r} for {len(arr)} hyperplanes")
    pos, zero = _cell_rows(arr.normals, signs)
    w = linalg.strict_witness(pos, zero, arr.dimension)
    return None if w is None else SignVector(signs, w)


def region_cone(arr: Arrangement, region):
    """Closed cone ``{y : s_i normal_i . y >= 0}`` of a region."""
    from .cones import Cone

    signs = region.signs if isinstance(region, SignVector) else str(region)
    if len(signs) != len(arr) or set(signs) - {"+", "-"}:
        raise NotARegion(f"{signs!r} is not a full sign vector")
    sv = region if isinstance(region, SignVector) else realize(arr, signs)
    if sv is None:
        raise NotARegion(f"{signs!r} is not realizable")
    rows, _ = _cell_rows(arr.normals, signs)
    return Cone.from_exact(rows, witness=sv.witness, dim=arr.dimension)


class Essentialization(NamedTuple):
    """Restriction of an arrangement to the span ``V`` of its normals.

    ``basis`` rows are pairwise orthogonal exact vectors spanning ``V``;
    coordinates ``c`` of the restricted arrangement correspond to the point
    ``sum_j c_j basis[j]``.  Canonical scaling may reverse a restricted
    normal; ``orientation[i]`` is ``-1`` where that happened.
    """

    arrangement: Arrangement
    basis: tuple[Vector, ...]
    index_shift: int
    orientation: tuple[int, ...]

    @property
    def essentialized(self) -> bool:
        return self.index_shift > 0

    def lift(self, coords: Sequence[Fraction]) -> Vector:
        d = len(self.basis[0]) if self.basis else self.arrangement.dimension + self.index_shift
        out = [Fraction(0)] * d
        for c, b in zip(coords, self.basis):
            out = [o + c * x for o, x in zip(out, b)]
        return tuple(out)

    def restrict_signs(self, signs: str) -> str:
        flip = {"+": "-", "-": "+", "0": "0"}
        return "".join(c if o > 0 else flip[c] for c, o in zip(signs, self.orientation))

    def isometric_normals(self):
        """Float normals of the restricted arrangement in orthonormal coordinates of ``V``."""
        import numpy as np

        scale = np.array([float(linalg.dot(b, b)) ** 0.5 for b in self.basis])
        rows = np.array([[float(x) for x in h.normal] for h in self.arrangement.hyperplanes], dtype=float)
        if rows.size == 0:
            return rows.reshape(len(self.arrangement), len(self.basis))
        return rows / scale


def essentialize(arr: Arrangement) -> Essentialization:
    d = arr.dimension
    if arr.is_essential:
        ident = tuple(tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d))
        return Essentialization(arr, ident, 0, (1,) * len(arr))
    red, _ = linalg.rref(arr.normals, d)
    basis = tuple(linalg.gram_schmidt(red))
    hyperplanes, orientation = [], []
    for n in arr.normals:
        coords = [linalg.dot(n, b) for b in basis]
        lead = next(x for x in coords if x != 0)
        orientation.append(1 if lead > 0 else -1)
        hyperplanes.append(Hyperplane(tuple(x / lead for x in coords)))
    restricted = Arrangement(len(basis), tuple(hyperplanes))
    return Essentialization(restricted, basis, d - len(basis), tuple(orientation))
