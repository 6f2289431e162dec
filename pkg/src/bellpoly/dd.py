"""Double description for the cone ``{a : V a >= 0}`` with exact integers.

Rays are kept in an int64 array while a magnitude bound proves the next
step cannot overflow; otherwise the array is promoted to Python ints
(``dtype=object``). Adjacency uses the combinatorial test on zero sets,
held as packed uint64 bitsets over the constraint rows.
"""

from __future__ import annotations

import logging

import numpy as np

from bellpoly import linalg

log = logging.getLogger(__name__)

_SAFE = 2**62


class DegenerateInputError(ValueError):
    """The constraint rows do not span the space (cone not pointed)."""


def _popcount(bits: np.ndarray) -> np.ndarray:
    return np.bitwise_count(bits).sum(axis=-1, dtype=np.int64)


def _max_abs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return int(max(abs(int(a.max())), abs(int(a.min()))))


def _normalize(rays: np.ndarray) -> np.ndarray:
    if rays.dtype == object:
        g = np.array([np.gcd.reduce(r) for r in rays], dtype=object)
        return rays // np.abs(g)[:, None]
    g = np.gcd.reduce(rays, axis=1)
    return rays // g[:, None]


def _initial_basis(rows: list[list[int]], dim: int) -> list[int]:
    """Greedy first linearly independent rows in the given order."""
    chosen: list[int] = []
    cur = 0
    for i, r in enumerate(rows):
        if linalg.rank([rows[j] for j in chosen] + [r]) > cur:
            chosen.append(i)
            cur += 1
            if cur == dim:
                return chosen
    raise DegenerateInputError(f"constraint rows have rank {cur} < {dim}")


def extreme_rays(constraints) -> np.ndarray:
    """Extreme rays of ``{a : C a >= 0}`` as primitive integer rows, sorted.

    ``constraints`` must have full column rank. Rows are inserted in the
    given order after a greedily chosen initial basis.
    """
    C = np.asarray(constraints)
    m, dim = C.shape
    rows = C.tolist()
    basis = _initial_basis(rows, dim)
    inv = linalg.inverse([rows[i] for i in basis])
    # column k of the inverse is zero on every basis row except row k
    rays = np.array([linalg.primitive([inv[r][k] for r in range(dim)]) for k in range(dim)], dtype=object)
    if _max_abs(rays) < _SAFE:
        rays = rays.astype(np.int64)

    words = (m + 63) // 64
    zeros = np.zeros((dim, words), dtype=np.uint64)
    for k in range(dim):
        for j, row_idx in enumerate(basis):
            if j != k:
                zeros[k, row_idx // 64] |= np.uint64(1) << np.uint64(row_idx % 64)

    Cint = C.astype(np.int64) if _max_abs(C) < _SAFE else C.astype(object)
    in_basis = set(basis)
    for row_idx in range(m):
        if row_idx in in_basis:
            continue
        rays, zeros = _insert(rays, zeros, Cint[row_idx], row_idx, dim)
        log.debug("row %d: %d rays", row_idx, len(rays))
    order = sorted(range(len(rays)), key=lambda i: tuple(int(x) for x in rays[i]))
    return rays[order]


def _insert(rays, zeros, row, row_idx, dim):
    if rays.dtype != object and _max_abs(rays) * int(np.abs(row).sum()) >= _SAFE:
        rays = rays.astype(object)
    s = rays @ row.astype(rays.dtype)
    pos = np.nonzero(s > 0)[0]
    neg = np.nonzero(s < 0)[0]
    zer = np.nonzero(s == 0)[0]
    bit_word, bit = row_idx // 64, np.uint64(1) << np.uint64(row_idx % 64)

    pairs_i, pairs_j = _adjacent_pairs(zeros, pos, neg, dim)
    keep = np.concatenate([pos, zer])
    new_zeros = zeros[keep].copy()
    new_zeros[len(pos):, bit_word] |= bit
    if len(pairs_i) == 0:
        return rays[keep], new_zeros

    sp = s[pairs_i][:, None]
    sn = s[pairs_j][:, None]
    if rays.dtype != object and 2 * _max_abs(s) * _max_abs(rays) >= _SAFE:
        rays, sp, sn = rays.astype(object), sp.astype(object), sn.astype(object)
    combo = _normalize(sp * rays[pairs_j] - sn * rays[pairs_i])
    combo_zeros = zeros[pairs_i] & zeros[pairs_j]
    combo_zeros[:, bit_word] |= bit
    return np.concatenate([rays[keep], combo]), np.concatenate([new_zeros, combo_zeros])


def _adjacent_pairs(zeros, pos, neg, dim, block=4096):
    """Pairs (i in pos, j in neg) of adjacent rays of the current cone."""
    if len(pos) == 0 or len(neg) == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    swap = len(pos) > len(neg)
    outer, inner = (neg, pos) if swap else (pos, neg)
    n = len(zeros)
    is_inner = np.zeros(n, dtype=bool)
    is_inner[inner] = True
    need = dim - 2
    out_a, out_b = [], []
    for i in outer:
        common = zeros & zeros[i]
        cnt = _popcount(common)
        cnt[i] = -1
        near = np.nonzero(cnt >= need)[0]
        cand = near[is_inner[near]]
        if len(cand) == 0:
            continue
        zn = zeros[near]
        for start in range(0, len(cand), block):
            c = cand[start:start + block]
            zc = common[c]
            # rays among `near` whose zero set contains the common zero set;
            # the candidate itself always does
            contains = ((zn[None, :, :] & zc[:, None, :]) == zc[:, None, :]).all(axis=2)
            ok = c[contains.sum(axis=1) == 1]
            out_a.append(np.full(len(ok), i))
            out_b.append(ok)
    if not out_a:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    a = np.concatenate(out_a)
    b = np.concatenate(out_b)
    return (b, a) if swap else (a, b)
