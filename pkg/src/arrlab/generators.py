"""Named families of central arrangements."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

from . import linalg
from .arrangement import Arrangement, Hyperplane, canonicalize
from .errors import BadSpec

FAMILIES = ("boolean", "braid", "threelines", "random")


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    params: tuple[int, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "GeneratorSpec":
        """Parse ``family[:p1[:p2...]]``, e.g. ``braid:3`` or ``random:5:3:7:5``."""
        if text.startswith("gen:"):
            text = text[4:]
        family, *rest = text.split(":")
        try:
            params = tuple(int(p) for p in rest)
        except ValueError as exc:
            raise BadSpec(f"non-integer parameter in {text!r}") from exc
        return cls(family, params)

    def __str__(self) -> str:
        return ":".join([self.family, *map(str, self.params)])


def boolean(d: int) -> Arrangement:
    if d < 1:
        raise BadSpec("boolean arrangement needs d >= 1")
    return canonicalize([[int(i == j) for j in range(d)] for i in range(d)], d)


def braid(n: int) -> Arrangement:
    """Hyperplanes ``x_i = x_j`` in ``R^n``; rank ``n - 1``."""
    if n < 2:
        raise BadSpec("braid arrangement needs n >= 2")
    normals = []
    for i in range(n):
        for j in range(i + 1, n):
            v = [0] * n
            v[i], v[j] = 1, -1
            normals.append(v)
    return canonicalize(normals, n)


def threelines() -> Arrangement:
    return canonicalize([(1, 0), (0, 1), (1, 1)], 2)


def _distinct_normals(d: int, coord_range: int) -> float:
    """Number of distinct hyperplanes with integer normals in the box (inf when too many to count)."""
    if (2 * coord_range + 1) ** d > 10**5:
        return math.inf
    box = itertools.product(range(-coord_range, coord_range + 1), repeat=d)
    return len({Hyperplane.from_normal(v).normal for v in box if any(v)})


def random_arrangement(m: int, d: int, seed: int, coord_range: int = 5) -> Arrangement:
    """``m`` distinct integer normals with entries in ``[-coord_range, coord_range]``.

    Draws are repeated (deterministically) until the normals are distinct
    after canonicalization and have full rank ``min(m, d)``.
    """
    if m < 0 or d < 1 or coord_range < 1:
        raise BadSpec("random arrangement needs m >= 0, d >= 1, range >= 1")
    if m > _distinct_normals(d, coord_range):
        raise BadSpec(f"fewer than {m} distinct hyperplanes have normals in [-{coord_range}, {coord_range}]^{d}")
    rng = random.Random(seed)
    while True:
        seen, normals = set(), []
        misses = 0
        while len(normals) < m:
            v = [rng.randint(-coord_range, coord_range) for _ in range(d)]
            key = Hyperplane.from_normal(v).normal if any(v) else None
            if key is None or key in seen:
                misses += 1
                if misses > 10_000 * (m + 1):
                    raise BadSpec("could not draw enough distinct normals")
                continue
            seen.add(key)
            normals.append(v)
        if linalg.rank(normals, d) == min(m, d):
            return canonicalize(normals, d)


def generate(spec: GeneratorSpec) -> Arrangement:
    p = spec.params
    try:
        if spec.family == "boolean":
            return boolean(*p)
        if spec.family == "braid":
            return braid(*p)
        if spec.family == "threelines":
            return threelines(*p)
        if spec.family == "random":
            return random_arrangement(*p)
    except TypeError as exc:
        raise BadSpec(f"wrong parameters for {spec.family}: {p}") from exc
    raise BadSpec(f"unknown family {spec.family!r}; expected one of {FAMILIES}")
