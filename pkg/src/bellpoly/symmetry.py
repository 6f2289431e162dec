"""Relabelling symmetries of a scenario and orbit classification of inequalities.

The group is generated by sign flips of single observables, permutations
of the observables at one site and permutations of sites carrying the same
number of observables. Each element acts on the coordinate tensor as a
signed permutation of coordinates; for orbit work the whole group is
materialised as two ``(order, size)`` arrays.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from bellpoly.scenario import Inequality, Scenario, positivity_inequalities


class NotClosedError(ValueError):
    """An inequality list is not a union of whole orbits."""


@dataclass(frozen=True)
class SymmetryElement:
    """Relabelling ``(X, i) -> (site_perm[X], obs_perms[X][i-1])`` with sign ``signs[X][i-1]``.

    Observable indices inside ``obs_perms`` are 1-based, matching the tilde
    coordinates where index 0 is the constant.
    """

    site_perm: tuple[int, ...]
    obs_perms: tuple[tuple[int, ...], ...]
    signs: tuple[tuple[int, ...], ...]

    @classmethod
    def identity(cls, scenario: Scenario) -> "SymmetryElement":
        counts = scenario.site_counts
        return cls(
            tuple(range(len(counts))),
            tuple(tuple(range(1, n + 1)) for n in counts),
            tuple((1,) * n for n in counts),
        )

    def validate(self, scenario: Scenario) -> None:
        counts = scenario.site_counts
        if sorted(self.site_perm) != list(range(len(counts))):
            raise ValueError("site_perm is not a permutation")
        for x, y in enumerate(self.site_perm):
            if counts[x] != counts[y]:
                raise ValueError("site_perm must only exchange sites with equal observable counts")
            if sorted(self.obs_perms[x]) != list(range(1, counts[x] + 1)):
                raise ValueError(f"obs_perms[{x}] is not a permutation")
            if len(self.signs[x]) != counts[x] or any(s not in (1, -1) for s in self.signs[x]):
                raise ValueError(f"signs[{x}] must be {counts[x]} values in +1/-1")

    def __mul__(self, other: "SymmetryElement") -> "SymmetryElement":
        """Composition ``self * other``: apply ``other`` first."""
        n_sites = len(self.site_perm)
        site_perm = [0] * n_sites
        obs_perms: list[tuple[int, ...]] = [()] * n_sites
        signs: list[tuple[int, ...]] = [()] * n_sites
        for x in range(n_sites):
            y = other.site_perm[x]
            site_perm[x] = self.site_perm[y]
            obs_perms[x] = tuple(self.obs_perms[y][k - 1] for k in other.obs_perms[x])
            signs[x] = tuple(
                s * self.signs[y][k - 1] for s, k in zip(other.signs[x], other.obs_perms[x])
            )
        return SymmetryElement(tuple(site_perm), tuple(obs_perms), tuple(signs))

    def inverse(self) -> "SymmetryElement":
        n_sites = len(self.site_perm)
        site_perm = [0] * n_sites
        obs_perms: list[list[int]] = [[] for _ in range(n_sites)]
        signs: list[list[int]] = [[] for _ in range(n_sites)]
        for x, y in enumerate(self.site_perm):
            site_perm[y] = x
            n = len(self.obs_perms[x])
            obs_perms[y] = [0] * n
            signs[y] = [0] * n
            for i, k in enumerate(self.obs_perms[x], start=1):
                obs_perms[y][k - 1] = i
                signs[y][k - 1] = self.signs[x][i - 1]
        return SymmetryElement(
            tuple(site_perm), tuple(map(tuple, obs_perms)), tuple(map(tuple, signs))
        )

    def signed_permutation(self, scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
        """``(src, sign)`` with ``(g . a)[j] = sign[j] * a[src[j]]`` on flat coordinates."""
        shape = scenario.shape
        src = np.empty(scenario.size, dtype=np.int64)
        sgn = np.empty(scenario.size, dtype=np.int64)
        for flat, multi in enumerate(scenario.indices):
            image = [0] * len(multi)
            s = 1
            for x, i in enumerate(multi):
                if i:
                    image[self.site_perm[x]] = self.obs_perms[x][i - 1]
                    s *= self.signs[x][i - 1]
            j = int(np.ravel_multi_index(image, shape))
            src[j] = flat
            sgn[j] = s
        return src, sgn


def generators(scenario: Scenario) -> list[SymmetryElement]:
    """Sign flips, adjacent observable swaps and adjacent equal-count site swaps."""
    ident = SymmetryElement.identity(scenario)
    counts = scenario.site_counts
    gens = []
    for x, n in enumerate(counts):
        for i in range(n):
            signs = [list(s) for s in ident.signs]
            signs[x][i] = -1
            gens.append(SymmetryElement(ident.site_perm, ident.obs_perms, tuple(map(tuple, signs))))
        for i in range(n - 1):
            perms = [list(p) for p in ident.obs_perms]
            perms[x][i], perms[x][i + 1] = perms[x][i + 1], perms[x][i]
            gens.append(SymmetryElement(ident.site_perm, tuple(map(tuple, perms)), ident.signs))
    for n in sorted(set(counts)):
        same = [x for x, c in enumerate(counts) if c == n]
        for x, y in zip(same, same[1:]):
            perm = list(ident.site_perm)
            perm[x], perm[y] = y, x
            gens.append(SymmetryElement(tuple(perm), ident.obs_perms, ident.signs))
    return gens


def closure(gens: list[SymmetryElement], identity: SymmetryElement) -> list[SymmetryElement]:
    """All products of the generators, breadth first from the identity."""
    seen = {identity}
    order = [identity]
    todo = deque([identity])
    while todo:
        g = todo.popleft()
        for h in gens:
            gh = h * g
            if gh not in seen:
                seen.add(gh)
                order.append(gh)
                todo.append(gh)
    return order


def group_order_formula(scenario: Scenario) -> int:
    """``prod_X n_X! 2^n_X`` times the number of equal-count site permutations."""
    order = math.prod(math.factorial(n) * 2**n for n in scenario.site_counts)
    for mult in Counter(scenario.site_counts).values():
        order *= math.factorial(mult)
    return order


class SymmetryGroup:
    """The full relabelling group of a scenario, materialised."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.elements = closure(generators(scenario), SymmetryElement.identity(scenario))
        pairs = [g.signed_permutation(scenario) for g in self.elements]
        self.src = np.stack([p[0] for p in pairs])
        self.sgn = np.stack([p[1] for p in pairs])

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def images(self, ineq) -> np.ndarray:
        """Every ``g . ineq`` as rows, one per group element (with repeats)."""
        a = np.asarray(ineq, dtype=np.int64)
        if a.shape != (self.scenario.size,):
            raise ValueError(f"expected {self.scenario.size} coefficients, got {a.shape}")
        return a[self.src] * self.sgn

    def orbit(self, ineq) -> np.ndarray:
        """Distinct orbit members, sorted lexicographically."""
        return np.unique(self.images(ineq), axis=0)

    def canonical(self, ineq) -> Inequality:
        return tuple(int(x) for x in self.orbit(ineq)[0])


@lru_cache(maxsize=None)
def symmetry_group(scenario: Scenario) -> SymmetryGroup:
    return SymmetryGroup(scenario)


def apply(g: SymmetryElement, ineq, scenario: Scenario) -> Inequality:
    """Induced action on a coefficient vector (also valid for correlation vectors).

    The constant coordinate is fixed with sign +1, so canonical (primitive,
    positive constant) inputs stay canonical.
    """
    a = np.asarray(ineq, dtype=np.int64)
    if a.shape != (scenario.size,):
        raise ValueError(f"expected {scenario.size} coefficients, got {a.shape}")
    src, sgn = g.signed_permutation(scenario)
    return tuple(int(x) for x in a[src] * sgn)


def canonical_representative(ineq, scenario: Scenario) -> Inequality:
    """Lexicographic minimum over the orbit of ``ineq``."""
    return symmetry_group(scenario).canonical(ineq)


@dataclass(frozen=True)
class Orbit:
    representative: Inequality
    size: int
    stabilizer_order: int
    members: tuple[Inequality, ...] = field(default=(), repr=False, compare=False)


def orbit_decompose(facets, scenario: Scenario, keep_members: bool = False) -> list[Orbit]:
    """Partition a duplicate-free inequality list into orbits, sorted by representative.

    Raises :class:`NotClosedError` if some image of an input inequality is
    missing from the list.
    """
    group = symmetry_group(scenario)
    remaining = {tuple(int(x) for x in f) for f in facets}
    orbits = []
    while remaining:
        seed = min(remaining)
        members = [tuple(int(x) for x in row) for row in group.orbit(seed)]
        missing = [m for m in members if m not in remaining]
        if missing:
            raise NotClosedError(
                f"{len(missing)} images of {seed} are absent from the list (e.g. {missing[0]})"
            )
        remaining.difference_update(members)
        orbits.append(
            Orbit(
                representative=members[0],
                size=len(members),
                stabilizer_order=group.order // len(members),
                members=tuple(members) if keep_members else (),
            )
        )
    return sorted(orbits, key=lambda o: o.representative)


@lru_cache(maxsize=None)
def _positivity_representatives(scenario: Scenario) -> frozenset:
    group = symmetry_group(scenario)
    return frozenset(group.canonical(p) for p in positivity_inequalities(scenario))


def is_positivity_class(orbit: Orbit, scenario: Scenario) -> bool:
    return orbit.representative in _positivity_representatives(scenario)


def random_element(scenario: Scenario, rng: np.random.Generator) -> SymmetryElement:
    """Uniformly random group element built directly from its three parts."""
    counts = scenario.site_counts
    site_perm = list(range(len(counts)))
    for n in set(counts):
        same = [x for x, c in enumerate(counts) if c == n]
        shuffled = list(rng.permutation(same))
        for x, y in zip(same, shuffled):
            site_perm[x] = int(y)
    obs_perms = tuple(tuple(int(k) + 1 for k in rng.permutation(n)) for n in counts)
    signs = tuple(tuple(int(s) for s in rng.choice((1, -1), size=n)) for n in counts)
    return SymmetryElement(tuple(site_perm), obs_perms, signs)

