"""Scenarios, deterministic strategies and correlation-polytope vertices.

Coordinates are homogeneous "tilde" correlations: each site contributes the
list ``(1, X_1, ..., X_n)`` and a coordinate is a multi-index picking one
entry per site, stored row-major with the all-zero (constant) index first.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, reduce

import numpy as np

from bellpoly import linalg

Strategy = tuple[tuple[int, ...], ...]
CorrelationVector = tuple[int, ...]
Inequality = tuple[int, ...]
MultiIndex = tuple[int, ...]


@dataclass(frozen=True)
class Scenario:
    """Number of two-valued observables at each site, e.g. ``(3, 3)``."""

    site_counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(n) for n in self.site_counts)
        if len(counts) < 2:
            raise ValueError("a scenario needs at least 2 sites")
        if any(n < 1 for n in counts):
            raise ValueError("every site needs at least 1 observable")
        object.__setattr__(self, "site_counts", counts)

    @classmethod
    def parse(cls, text: str) -> "Scenario":
        """Parse ``"3,3"`` or ``"2,2,2"``."""
        try:
            counts = tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok)
        except ValueError:
            raise ValueError(f"bad scenario spec {text!r}") from None
        return cls(counts)

    def __str__(self) -> str:
        return ",".join(map(str, self.site_counts))

    @property
    def n_sites(self) -> int:
        return len(self.site_counts)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(n + 1 for n in self.site_counts)

    @property
    def size(self) -> int:
        """Number of homogeneous coordinates, constant included."""
        return math.prod(self.shape)

    @property
    def n_strategies(self) -> int:
        return 2 ** sum(self.site_counts)

    @cached_property
    def indices(self) -> tuple[MultiIndex, ...]:
        return tuple(itertools.product(*(range(k) for k in self.shape)))

    def flat_index(self, multi: MultiIndex) -> int:
        if len(multi) != self.n_sites or any(not 0 <= i < k for i, k in zip(multi, self.shape)):
            raise IndexError(f"multi-index {multi} out of range for scenario {self}")
        return int(np.ravel_multi_index(multi, self.shape))

    def label(self, multi: MultiIndex) -> str:
        """Human readable name of a coordinate, e.g. ``A1B2`` (``1`` for the constant)."""
        name = "".join(f"{chr(ord('A') + x)}{i}" for x, i in enumerate(multi) if i)
        return name or "1"


def enumerate_strategies(scenario: Scenario) -> list[Strategy]:
    """All deterministic strategies, binary counting with +1 before -1.

    The first observable of the first site is the most significant digit.
    """
    out = []
    for flat in itertools.product((1, -1), repeat=sum(scenario.site_counts)):
        it = iter(flat)
        out.append(tuple(tuple(next(it) for _ in range(n)) for n in scenario.site_counts))
    return out


def vertex_coordinates(strategy: Strategy, scenario: Scenario) -> CorrelationVector:
    """Correlation vector of one deterministic strategy."""
    if len(strategy) != scenario.n_sites or any(
        len(vals) != n for vals, n in zip(strategy, scenario.site_counts)
    ):
        raise ValueError(f"strategy shape does not match scenario {scenario}")
    if any(v not in (1, -1) for vals in strategy for v in vals):
        raise ValueError("strategy values must be +1 or -1")
    tilde = [np.array((1,) + tuple(vals), dtype=np.int64) for vals in strategy]
    return tuple(int(x) for x in reduce(np.multiply.outer, tilde).ravel())


def vertex_matrix(scenario: Scenario) -> np.ndarray:
    """All vertices as rows of an int64 array, in strategy order."""
    return np.array(
        [vertex_coordinates(s, scenario) for s in enumerate_strategies(scenario)], dtype=np.int64
    )


def polytope_dimension(vertices) -> int:
    """Affine dimension of the vertex set (exact)."""
    vertices = np.asarray(vertices)
    if len(vertices) == 0:
        raise ValueError("empty vertex list")
    return linalg.affine_rank(vertices.tolist())


def positivity_inequalities(scenario: Scenario) -> list[Inequality]:
    """Joint-outcome positivity constraints, ``2^sites * p(s | settings) >= 0``.

    One inequality per choice of one observable per site and per outcome
    sign pattern, sorted lexicographically.
    """
    result = set()
    for settings in itertools.product(*(range(1, n + 1) for n in scenario.site_counts)):
        for signs in itertools.product((1, -1), repeat=scenario.n_sites):
            coeffs = np.zeros(scenario.shape, dtype=np.int64)
            for subset in itertools.product((False, True), repeat=scenario.n_sites):
                idx = tuple(i if on else 0 for i, on in zip(settings, subset))
                coeffs[idx] = math.prod(s for s, on in zip(signs, subset) if on)
            result.add(tuple(int(x) for x in coeffs.ravel()))
    return sorted(result)
