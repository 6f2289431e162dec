"""Boolean functions of two pairs of +-1 arguments and the CHSH combination f2.

A function ``{+1,-1}^4 -> {+1,-1}`` of ``(a1, a2, b1, b2)`` is stored as its
truth table over inputs in ``itertools.product((1, -1), repeat=4)`` order.
Its multilinear expansion has one coefficient per subset of the arguments.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

ARGS = ("a1", "a2", "b1", "b2")
INPUTS = tuple(itertools.product((1, -1), repeat=4))
MONOMIALS = tuple(
    tuple(k for k in range(4) if mask >> k & 1) for mask in range(16)
)
# character table: CHARS[x, S] = prod_{k in S} x_k
CHARS = np.array([[np.prod([x[k] for k in m], dtype=np.int64) for m in MONOMIALS] for x in INPUTS])


def f2_eval(a1: int, a2: int, b1: int, b2: int) -> int:
    """``(a1 b1 + a1 b2 + a2 b1 - a2 b2) / 2`` on +-1 arguments."""
    if any(v not in (1, -1) for v in (a1, a2, b1, b2)):
        raise ValueError("f2 arguments must be +1 or -1")
    twice = a1 * b1 + a1 * b2 + a2 * b1 - a2 * b2
    return twice // 2


@dataclass(frozen=True)
class BooleanForm:
    truth_table: tuple[int, ...]

    @cached_property
    def coefficients(self) -> dict[tuple[int, ...], Fraction]:
        """Nonzero multilinear coefficients keyed by argument-index tuples."""
        raw = np.asarray(self.truth_table, dtype=np.int64) @ CHARS
        return {m: Fraction(int(c), 16) for m, c in zip(MONOMIALS, raw) if c}

    def depends_on(self, k: int) -> bool:
        return any(k in m for m in self.coefficients)

    def expression(self) -> str:
        terms = []
        for m, c in sorted(self.coefficients.items(), key=lambda kv: (len(kv[0]), kv[0])):
            name = "".join(ARGS[k] for k in m) or "1"
            terms.append(f"{'+' if c > 0 else '-'}{abs(c)}*{name}")
        return " ".join(terms)


def _input_actions() -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Closure of the argument substitutions as (permutation, signs) pairs.

    Generators: a1<->a2, b1<->b2, a1->-a1 (and the other sign flips through
    conjugation), and the exchange of the (a) and (b) pairs.
    """
    gens = [
        ((1, 0, 2, 3), (1, 1, 1, 1)),
        ((0, 1, 3, 2), (1, 1, 1, 1)),
        ((2, 3, 0, 1), (1, 1, 1, 1)),
        ((0, 1, 2, 3), (-1, 1, 1, 1)),
    ]

    def compose(g, h):
        # substitution x -> (s_h * x[p_h]) then (s_g * .[p_g])
        (pg, sg), (ph, sh) = g, h
        return tuple(ph[pg[k]] for k in range(4)), tuple(sg[k] * sh[pg[k]] for k in range(4))

    ident = ((0, 1, 2, 3), (1, 1, 1, 1))
    seen = {ident}
    todo = [ident]
    while todo:
        g = todo.pop()
        for h in gens:
            gh = compose(h, g)
            if gh not in seen:
                seen.add(gh)
                todo.append(gh)
    return sorted(seen)


def _table_permutations() -> np.ndarray:
    """For each substitution, the truth-table index map ``f'(x) = f(sub(x))``."""
    pos = {x: i for i, x in enumerate(INPUTS)}
    maps = []
    for perm, signs in _input_actions():
        maps.append([pos[tuple(signs[k] * x[perm[k]] for k in range(4))] for x in INPUTS])
    return np.array(maps)


def f2_uniqueness_scan() -> list[list[BooleanForm]]:
    """Scan all 2^16 boolean functions of (a1, a2, b1, b2).

    Keeps those whose expansion has no monomial containing both a1 and a2
    or both b1 and b2 and that depend on all four arguments, and groups the
    survivors into classes under the argument substitutions. Classes are
    sorted by their smallest truth table.
    """
    bits = np.arange(2**16, dtype=np.int64)[:, None] >> np.arange(16) & 1
    tables = 1 - 2 * bits
    coeffs = tables @ CHARS
    forbidden = [i for i, m in enumerate(MONOMIALS) if {0, 1} <= set(m) or {2, 3} <= set(m)]
    ok = ~coeffs[:, forbidden].any(axis=1)
    for k in range(4):
        ok &= coeffs[:, [i for i, m in enumerate(MONOMIALS) if k in m]].any(axis=1)
    survivors = {tuple(int(v) for v in t) for t in tables[ok]}

    perms = _table_permutations()
    classes = []
    while survivors:
        seed = min(survivors)
        orbit = {tuple(int(v) for v in np.asarray(seed)[p]) for p in perms}
        survivors -= orbit
        classes.append([BooleanForm(t) for t in sorted(orbit)])
    return classes


F2 = BooleanForm(tuple(f2_eval(*x) for x in INPUTS))
