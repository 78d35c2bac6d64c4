"""Exact linear algebra over the rationals.

Everything here works on plain sequences of :class:`fractions.Fraction`
(ints are accepted and promoted).  Nothing in this module ever rounds.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Optional, Sequence

Vector = tuple[Fraction, ...]
Matrix = list[list[Fraction]]


def to_fraction(value) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string into a Fraction."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rational entries")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def vec(values) -> Vector:
    return tuple(to_fraction(v) for v in values)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def rref(rows: Sequence[Sequence[Fraction]], ncols: Optional[int] = None) -> tuple[list[Vector], list[int]]:
    """Reduced row echelon form.

    Returns the nonzero rows of the RREF and their pivot columns.  The RREF of
    a row space is unique, so the returned tuple is a canonical key for the
    span of ``rows``.
    """
    m = [list(map(to_fraction, r)) for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return [tuple(row) for row in m[:r]], pivots


def rank(rows: Sequence[Sequence[Fraction]], ncols: Optional[int] = None) -> int:
    return len(rref(rows, ncols)[0])


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[Vector]:
    """Basis of ``{x : row . x = 0 for every row}``, one vector per free column."""
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def in_span(rows: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> bool:
    ncols = len(v)
    return rank(list(rows) + [v], ncols) == rank(rows, ncols)


def gram_schmidt(rows: Sequence[Sequence[Fraction]]) -> list[Vector]:
    """Pairwise orthogonal (unnormalized) basis of the span of ``rows``."""
    out: list[Vector] = []
    for r in rows:
        v = list(map(to_fraction, r))
        for b in out:
            c = dot(v, b) / dot(b, b)
            v = [x - c * y for x, y in zip(v, b)]
        if any(v):
            out.append(primitive(v))
    return out


def primitive(v: Sequence[Fraction]) -> Vector:
    """Positive rescaling of ``v`` to a primitive integer vector."""
    v = [to_fraction(x) for x in v]
    if not any(v):
        return tuple(v)
    den = lcm(*(x.denominator for x in v))
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(Fraction(x // g) for x in ints)


def solve(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Vector:
    """Solve the square nonsingular system ``a x = b`` exactly."""
    n = len(a)
    aug = [list(map(to_fraction, row)) + [to_fraction(bi)] for row, bi in zip(a, b)]
    red, pivots = rref(aug, n + 1)
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular system")
    return tuple(row[n] for row in red)


def _simplex_max(tab: Matrix, basis: list[int], nvars: int) -> None:
    """In-place tableau simplex with Bland's rule.

    ``tab`` rows are constraints ``[coeffs..., rhs]``; the last row is the
    objective in the form ``[-c..., value]``.  Assumes a feasible starting
    basis and a bounded objective.
    """
    while True:
        obj = tab[-1]
        enter = next((j for j in range(nvars) if obj[j] < 0), None)
        if enter is None:
            return
        best = None
        for i in range(len(tab) - 1):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise ArithmeticError("unbounded LP")
        i = best[1]
        piv = tab[i][enter]
        tab[i] = [x / piv for x in tab[i]]
        for k in range(len(tab)):
            if k != i and tab[k][enter] != 0:
                f = tab[k][enter]
                tab[k] = [x - f * y for x, y in zip(tab[k], tab[i])]
        basis[i] = enter


def strict_witness(
    positive: Sequence[Sequence[Fraction]],
    zero: Sequence[Sequence[Fraction]],
    dim: int,
) -> Optional[Vector]:
    """Find ``y`` with ``a . y > 0`` for rows in ``positive`` and ``e . y = 0`` for rows in ``zero``.

    Returns a primitive integer witness or ``None`` when the (homogeneous)
    system is infeasible.  Decided exactly by the LP

        max t  s.t.  B w >= t,  t <= 1

    on a rational basis of the equality subspace, which always has the
    origin as a feasible starting vertex.
    """
    basis = nullspace(zero, dim) if zero else [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)]
    p = len(basis)
    if not positive:
        return tuple(Fraction(0) for _ in range(dim))
    if p == 0:
        return None
    B = [[dot(a, b) for b in basis] for a in positive]
    if any(not any(row) for row in B):
        return None
    q = len(B)
    # variables: u (p), v (p), t, slacks (q + 1); w = u - v
    nvars = 2 * p + 1 + q + 1
    tab: Matrix = []
    for i, row in enumerate(B):
        line = [-x for x in row] + list(row) + [Fraction(1)]
        line += [Fraction(int(k == i)) for k in range(q + 1)] + [Fraction(0)]
        tab.append(line)
    line = [Fraction(0)] * (2 * p) + [Fraction(1)] + [Fraction(int(k == q)) for k in range(q + 1)] + [Fraction(1)]
    tab.append(line)
    tab.append([Fraction(0)] * (2 * p) + [Fraction(-1)] + [Fraction(0)] * (q + 1) + [Fraction(0)])
    bas = [2 * p + 1 + k for k in range(q + 1)]
    _simplex_max(tab, bas, nvars)
    if tab[-1][-1] <= 0:
        return None
    x = [Fraction(0)] * nvars
    for i, j in enumerate(bas):
        x[j] = tab[i][-1]
    w = [x[j] - x[p + j] for j in range(p)]
    y = [sum((w[j] * basis[j][c] for j in range(p)), Fraction(0)) for c in range(dim)]
    return primitive(y)
