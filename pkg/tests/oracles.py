"""Independent reference computations used to freeze expected values."""

from __future__ import annotations

import itertools

import numpy as np


def brute_force_facets(V: np.ndarray) -> set[tuple[int, ...]]:
    """Facets by trying every (dim)-subset of vertices; only for tiny polytopes.

    Works in floating point on the subset null space and rounds to the
    integer normal, which is exact for +-1 vertex data of this size.
    """
    D = V.shape[1]
    out = set()
    for subset in itertools.combinations(range(len(V)), D - 1):
        M = V[list(subset)].astype(float)
        _, s, vt = np.linalg.svd(M)
        if np.sum(s > 1e-9) != D - 1:
            continue
        n = vt[-1]
        n = n / np.abs(n[np.abs(n) > 1e-9]).min()
        n = np.round(n).astype(np.int64)
        vals = V @ n
        if np.all(vals >= 0) or np.all(vals <= 0):
            n = n if np.all(vals >= 0) else -n
            g = np.gcd.reduce(np.abs(n))
            out.add(tuple(int(x) for x in n // g))
    return out


def float_rank(V) -> int:
    return int(np.linalg.matrix_rank(np.asarray(V, dtype=float)))


def finite_difference_grad(fun, x, h=1e-6):
    g = np.zeros_like(x)
    for k in range(len(x)):
        e = np.zeros_like(x)
        e[k] = h
        g[k] = (fun(x + e) - fun(x - e)) / (2 * h)
    return g


def random_unit(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def monte_carlo_inner_min(b_vectors, pair_coeffs, const, samples, rng, refine_rounds=40):
    """Minimum over A-side unit vectors of ``const - sum_ij alpha_ij a_i . b_j`` by sampling.

    The objective is a sum of one term per A-observable, so the best of
    ``samples`` directions is found per observable (equivalent to searching
    the full product of sampled triples). Each winner is then refined by
    random perturbations of shrinking size.
    """
    w = np.asarray(pair_coeffs, dtype=float) @ np.asarray(b_vectors, dtype=float)
    total = const
    for wi in w:
        scores = samples @ wi
        best = samples[np.argmax(scores)]
        best_val = best @ wi
        step = 1e-2
        for _ in range(refine_rounds):
            trial = best + step * rng.normal(size=(256, 3))
            trial /= np.linalg.norm(trial, axis=1, keepdims=True)
            vals = trial @ wi
            k = int(np.argmax(vals))
            if vals[k] > best_val:
                best, best_val = trial[k], vals[k]
            else:
                step *= 0.5
        total -= best_val
    return total
