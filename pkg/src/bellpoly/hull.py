"""Facets of a correlation polytope, in exact integer arithmetic.

Two engines produce the same sorted list of primitive facet normals:

* ``double_description`` runs :func:`bellpoly.dd.extreme_rays` on the cone
  ``{a : a . v >= 0 for every vertex v}``.
* ``adjacency_decomposition`` finds one facet by pivoting, then walks the
  facet graph one symmetry orbit at a time: the ridges of each orbit
  representative are computed by double description inside the facet and
  every ridge is rotated onto the neighbouring facet.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

import numpy as np

from bellpoly import linalg
from bellpoly.dd import DegenerateInputError, extreme_rays
from bellpoly.scenario import Inequality, Scenario
from bellpoly.symmetry import SymmetryGroup, symmetry_group

log = logging.getLogger(__name__)

Method = Literal["double_description", "adjacency_decomposition"]
METHOD_ALIASES = {"dd": "double_description", "adj": "adjacency_decomposition"}

__all__ = [
    "DegenerateInputError",
    "FacetCertificate",
    "canonicalize",
    "verify_facet",
    "certify_facets",
    "find_facet",
    "facets",
]


def canonicalize(raw: Sequence, vertices=None) -> Inequality:
    """Primitive integer form of a rational coefficient vector.

    With ``vertices`` the sign is chosen so that every vertex satisfies
    ``a . v >= 0`` when one orientation does. Otherwise (or when neither
    orientation is valid) the constant term is made positive, falling back
    to the first nonzero coefficient.
    """
    vec = linalg.primitive(raw)
    if vertices is not None:
        vals = [linalg.dot(vec, v) for v in np.asarray(vertices).tolist()]
        if min(vals) >= 0:
            return vec
        if max(vals) <= 0:
            return tuple(-x for x in vec)
    lead = next(x for x in vec if x != 0)
    return vec if lead > 0 else tuple(-x for x in vec)


@dataclass(frozen=True)
class FacetCertificate:
    inequality: Inequality
    tight_vertices: tuple[int, ...]
    rank: int
    min_value: int
    polytope_dim: int

    @property
    def is_facet(self) -> bool:
        return self.min_value == 0 and self.rank == self.polytope_dim - 1


def verify_facet(vertices, inequality) -> FacetCertificate:
    """Evaluate ``inequality`` on all vertices and measure its tight set exactly."""
    V = np.asarray(vertices).tolist()
    a = [int(x) for x in inequality]
    if len(a) != len(V[0]):
        raise ValueError(f"inequality has {len(a)} coefficients, vertices have {len(V[0])}")
    vals = [linalg.dot(a, v) for v in V]
    lo = min(vals)
    tight = tuple(i for i, x in enumerate(vals) if x == 0)
    rank = linalg.affine_rank([V[i] for i in tight]) if tight else -1
    return FacetCertificate(tuple(a), tight, rank, lo, linalg.affine_rank(V))


_PRIME = 32749


def _modular_ranks(stack: np.ndarray) -> np.ndarray:
    """Ranks mod a prime of a stack of integer matrices (batched Gaussian elimination)."""
    M = np.mod(stack, _PRIME).astype(np.int32)
    n_mat, n_rows, n_cols = M.shape
    used = np.zeros((n_mat, n_rows), dtype=bool)
    ranks = np.zeros(n_mat, dtype=np.int64)
    batch = np.arange(n_mat)
    for col in range(n_cols):
        cand = (M[:, :, col] != 0) & ~used
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = np.argmax(cand, axis=1)
        prow = M[batch, piv]
        inv = _modpow(prow[:, col].astype(np.int64), _PRIME - 2).astype(np.int32)
        factor = M[:, :, col] * inv[:, None] % _PRIME
        factor[batch, piv] = 0
        factor[~has] = 0
        M = (M - factor[:, :, None] * prow[:, None, :]) % _PRIME
        used[batch[has], piv[has]] = True
        ranks += has
    return ranks


def _modpow(base: np.ndarray, exp: int) -> np.ndarray:
    result = np.ones_like(base)
    base = base % _PRIME
    while exp:
        if exp & 1:
            result = result * base % _PRIME
        base = base * base % _PRIME
        exp >>= 1
    return result


def certify_facets(vertices, inequalities, chunk: int = 2048) -> np.ndarray:
    """Batched facet test: valid on every vertex, tight set of full rank ``dim - 1``.

    The tight-set rank is computed modulo a prime. That rank never exceeds
    the rational rank, which in turn is at most ``D - 1`` for the rows
    annihilated by a nonzero normal, so reaching ``D - 1`` is a proof.
    Inequalities falling short are re-checked with :func:`verify_facet`.
    """
    V = np.asarray(vertices, dtype=np.int64)
    A = np.asarray(inequalities, dtype=np.int64)
    D = V.shape[1]
    ok = np.zeros(len(A), dtype=bool)
    for start in range(0, len(A), chunk):
        block = A[start:start + chunk]
        vals = block @ V.T
        valid = vals.min(axis=1) == 0
        tight = np.where((vals == 0)[:, :, None], V[None, :, :], 0)
        ok[start:start + chunk] = valid & (_modular_ranks(tight) == D - 1)
    for i in np.nonzero(~ok)[0]:
        ok[i] = verify_facet(V, A[i]).is_facet
    return ok


def _check_full_dimensional(V: np.ndarray) -> None:
    r = linalg.rank(V.tolist())
    if r < V.shape[1]:
        raise DegenerateInputError(
            f"homogeneous vertex matrix has rank {r} < {V.shape[1]}; polytope is not full-dimensional"
        )


def find_facet(vertices) -> Inequality:
    """One facet, by rotating a supporting hyperplane until its tight set has full rank.

    Starts from the hyperplane of the first non-constant coordinate and
    repeatedly moves along a direction vanishing on the current tight set,
    stopping at the first new vertex.
    """
    V = np.asarray(vertices).tolist()
    dim = len(V[0])
    a = [0] * dim
    a[1] = 1
    a[0] = -min(v[1] for v in V)
    while True:
        vals = [linalg.dot(a, v) for v in V]
        tight = [v for v, x in zip(V, vals) if x == 0]
        if linalg.rank(tight) == dim - 1:
            return canonicalize(a, V)
        beta = next(
            b for b in linalg.nullspace(tight, dim) if linalg.rank([a, b]) == 2
        )
        bvals = [linalg.dot(beta, v) for v in V]
        if not any(b < 0 for b in bvals):
            beta = [-x for x in beta]
            bvals = [-x for x in bvals]
        step = min(Fraction(x, -b) for x, b in zip(vals, bvals) if b < 0)
        a = list(linalg.primitive([x + step * b for x, b in zip(a, beta)]))


def neighbours(inequality: Inequality, vertices) -> list[Inequality]:
    """Facets sharing a ridge with the given facet.

    The ridges are the facets of the tight vertex set, computed after
    dropping one coordinate on which the facet normal is nonzero (an
    injective projection of the facet hyperplane).
    """
    V = np.asarray(vertices)
    a = np.asarray(inequality, dtype=object)
    vals = V.astype(object) @ a
    tight = V[vals == 0]
    k = int(np.nonzero(a)[0][0])
    ridges = extreme_rays(np.delete(tight, k, axis=1))
    loose = V[vals > 0].astype(object)
    loose_vals = vals[vals > 0]
    out = []
    for r in ridges:
        beta = np.insert(r.astype(object), k, 0)
        bv = loose @ beta
        # rotate beta + mu * a until the first loose vertex becomes tight
        mu = max(Fraction(-int(b), int(x)) for b, x in zip(bv, loose_vals))
        out.append(linalg.primitive([mu.denominator * int(b) + mu.numerator * int(x) for b, x in zip(beta, a)]))
    return out


def _neighbours_task(args):
    return neighbours(*args)


def _adjacency_decomposition(V: np.ndarray, group: SymmetryGroup | None, workers: int) -> list[Inequality]:
    def orbit_of(f):
        if group is None:
            return [f]
        return [tuple(int(x) for x in row) for row in group.orbit(f)]

    first = find_facet(V)
    known: set[Inequality] = set()
    reps = []
    frontier = []
    for f in [first]:
        members = orbit_of(f)
        known.update(members)
        reps.append(members[0])
        frontier.append(members[0])
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        while frontier:
            tasks = [(f, V) for f in frontier]
            results = pool.map(_neighbours_task, tasks) if pool else map(_neighbours_task, tasks)
            found = sorted({n for nbrs in results for n in nbrs if n not in known})
            frontier = []
            for n in found:
                if n in known:
                    continue
                members = orbit_of(n)
                known.update(members)
                reps.append(members[0])
                frontier.append(members[0])
            log.debug("%d orbits, %d facets so far", len(reps), len(known))
    finally:
        if pool:
            pool.shutdown()
    return sorted(known)


def facets(
    vertices,
    method: Method = "double_description",
    *,
    scenario: Scenario | None = None,
    workers: int = 1,
) -> list[Inequality]:
    """All facets of ``conv(vertices)`` as sorted, primitive, vertex-nonnegative normals.

    ``vertices`` are homogeneous (first coordinate 1). The adjacency
    decomposition uses the symmetry group of ``scenario`` when given and
    the trivial group otherwise; the output does not depend on the method
    or on ``workers``.
    """
    method = METHOD_ALIASES.get(method, method)
    V = np.asarray(vertices)
    if V.ndim != 2 or len(V) == 0:
        raise ValueError("need a nonempty 2-d vertex array")
    _check_full_dimensional(V)
    if method == "double_description":
        rays = extreme_rays(V)
        return sorted({canonicalize([int(x) for x in r], V) for r in rays})
    if method == "adjacency_decomposition":
        group = symmetry_group(scenario) if scenario is not None else None
        if group is not None and V.shape[1] != scenario.size:
            raise ValueError("vertices do not match the scenario")
        return _adjacency_decomposition(V, group, workers)
    raise ValueError(f"unknown method {method!r}")
