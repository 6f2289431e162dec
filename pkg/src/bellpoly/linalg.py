"""Exact integer/rational linear algebra on small dense matrices."""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Sequence

Matrix = Sequence[Sequence[int]]


def rank(rows: Matrix) -> int:
    """Exact rank by fraction-free (Bareiss) elimination on Python ints."""
    a = [list(map(int, r)) for r in rows]
    if not a:
        return 0
    m, n = len(a), len(a[0])
    r = 0
    prev = 1
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, m):
            f = a[i][c]
            row_i, row_r = a[i], a[r]
            for k in range(c, n):
                row_i[k] = (p * row_i[k] - f * row_r[k]) // prev
        prev = p
        r += 1
        if r == m:
            break
    return r


def affine_rank(points: Matrix) -> int:
    """Dimension of the affine hull of a nonempty point set."""
    pts = [list(map(int, p)) for p in points]
    if not pts:
        raise ValueError("empty point set")
    base = pts[0]
    return rank([[x - y for x, y in zip(p, base)] for p in pts[1:]]) if len(pts) > 1 else 0


def rref(rows: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    a = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    if not a:
        return a, pivots
    m, n = len(a), len(a[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [x / p for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a[:r], pivots


def nullspace(rows: Matrix, ncols: int | None = None) -> list[tuple[int, ...]]:
    """Integer basis (primitive vectors) of the right null space."""
    if ncols is None:
        ncols = len(rows[0])
    red, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for row, p in zip(red, pivots):
            vec[p] = -row[f]
        basis.append(primitive(vec))
    return basis


def inverse(rows: Matrix) -> list[list[Fraction]]:
    n = len(rows)
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(rows)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ValueError("singular matrix")
    return [row[n:] for row in red]


def primitive(vec: Sequence[int | Fraction]) -> tuple[int, ...]:
    """Scale a rational vector to integers with gcd 1, keeping its direction."""
    fr = [Fraction(x) for x in vec]
    den = reduce(lcm, (x.denominator for x in fr), 1)
    ints = [int(x * den) for x in fr]
    g = reduce(gcd, ints, 0)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(x // g for x in ints)


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(u, v))
