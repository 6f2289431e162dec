"""Reproduction checks: expected counts and values against fresh computations.

Used by ``bellpoly check``; every check recomputes from scratch.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from bellpoly import quantum
from bellpoly.boolean import F2, f2_uniqueness_scan
from bellpoly.hull import facets
from bellpoly.scenario import Scenario, positivity_inequalities, vertex_matrix
from bellpoly.symmetry import canonical_representative, is_positivity_class, orbit_decompose

S22 = Scenario((2, 2))
S33 = Scenario((3, 3))
S222 = Scenario((2, 2, 2))
S222_FACET_COUNT = 53856


@dataclass
class CheckResult:
    case: str
    quantity: str
    expected: object
    computed: object
    passed: bool
    seconds: float = 0.0


def chsh_pair(ineq, scenario: Scenario) -> tuple[int, int] | None:
    """The two B-observables of a CHSH-variant facet of a (2, n) scenario, else None."""
    if scenario.site_counts[0] != 2 or scenario.n_sites != 2:
        raise ValueError("chsh_pair expects a (2, n) scenario")
    alpha = np.asarray(ineq).reshape(scenario.shape)
    support = [j for j in range(1, scenario.shape[1]) if np.any(alpha[:, j])]
    if len(support) != 2:
        return None
    sub = alpha[:, [0] + support]
    if canonical_representative(tuple(int(x) for x in sub.ravel()), S22) != canonical_representative(
        quantum.CHSH, S22
    ):
        return None
    return support[0], support[1]


def match_s33_extremal(config: quantum.MeasurementConfig) -> tuple[float, float]:
    """Fit the maximal-violation family of the 3+3 inequality up to a global rotation.

    Builds the frame ``x ~ b1 - b2``, ``z ~ b1 + b2`` and reads the free angle
    off ``b3``. Returns ``(psi, max deviation)`` against
    :func:`quantum.s33_extremal_config` at that angle.
    """
    b1, b2, b3 = config.b_vectors
    ex = (b1 - b2) / np.linalg.norm(b1 - b2)
    ez = (b1 + b2) / np.linalg.norm(b1 + b2)
    ey = np.cross(ez, ex)
    frame = np.stack([ex, ey, ez])
    psi = math.atan2(float(frame[1] @ b3), float(frame[0] @ b3))
    ref = quantum.s33_extremal_config(psi)
    local = config.rotated(frame)
    dev = max(
        np.abs(local.a_vectors - ref.a_vectors).max(), np.abs(local.b_vectors - ref.b_vectors).max()
    )
    return psi, float(dev)


def _timed(fn: Callable[[], object]):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


def check_s22() -> list[CheckResult]:
    V = vertex_matrix(S22)
    (dd, adj), dt = _timed(lambda: (facets(V), facets(V, "adj", scenario=S22)))
    orbits = orbit_decompose(dd, S22)
    bell = [o for o in orbits if not is_positivity_class(o, S22)]
    chsh = canonical_representative(quantum.CHSH, S22)
    return [
        CheckResult("s22", "vertices", 16, len(V), len(V) == 16),
        CheckResult("s22", "facets (dd = adj)", 24, len(dd), len(dd) == 24 and dd == adj, dt),
        CheckResult("s22", "classes", 2, len(orbits), len(orbits) == 2),
        CheckResult(
            "s22", "Bell class is CHSH", True, [o.representative for o in bell] == [chsh],
            [o.representative for o in bell] == [chsh],
        ),
    ]


def check_s33() -> list[CheckResult]:
    V = vertex_matrix(S33)
    F, dt = _timed(lambda: facets(V))
    orbits = orbit_decompose(F, S33)
    sizes = sorted((o.size for o in orbits), reverse=True)
    by_size = {o.size: o for o in orbits}
    s33_in = 576 in by_size and canonical_representative(quantum.S33, S33) == by_size[576].representative
    pos_ok = 36 in by_size and is_positivity_class(by_size[36], S33)
    pos_count = len(positivity_inequalities(S33))
    return [
        CheckResult("s33", "facets", 684, len(F), len(F) == 684, dt),
        CheckResult("s33", "orbit sizes", [576, 72, 36], sizes, sizes == [576, 72, 36]),
        CheckResult("s33", "tensor in 576-class", True, s33_in, s33_in),
        CheckResult("s33", "36-class is positivity", True, pos_ok, pos_ok and pos_count == 36),
    ]


def check_2n(n: int) -> list[CheckResult]:
    sc = Scenario((2, n))
    V = vertex_matrix(sc)
    F, dt = _timed(lambda: facets(V))
    pos = set(positivity_inequalities(sc))
    bell = [f for f in F if f not in pos]
    bad = [f for f in bell if chsh_pair(f, sc) is None]
    pairs = {chsh_pair(f, sc) for f in bell}
    return [
        CheckResult(f"2n(n={n})", "facets", "-", len(F), True, dt),
        CheckResult(f"2n(n={n})", "non-CHSH Bell facets", 0, len(bad), not bad and bool(bell)),
        CheckResult(f"2n(n={n})", "B-pairs used", math.comb(n, 2), len(pairs), len(pairs) == math.comb(n, 2)),
    ]


def check_s222(methods=("adjacency_decomposition", "double_description"), workers: int = 1) -> list[CheckResult]:
    V = vertex_matrix(S222)
    out = []
    lists = {}
    for m in methods:
        F, dt = _timed(lambda: facets(V, m, scenario=S222, workers=workers))
        lists[m] = F
        out.append(CheckResult("s222", f"facets [{m}]", S222_FACET_COUNT, len(F), len(F) == S222_FACET_COUNT, dt))
    first = next(iter(lists.values()))
    same = all(F == first for F in lists.values())
    out.append(CheckResult("s222", "methods agree", True, same, same))
    orbits, dt = _timed(lambda: orbit_decompose(first, S222))
    out.append(CheckResult("s222", "classes", 46, len(orbits), len(orbits) == 46, dt))
    return out


def check_f2() -> list[CheckResult]:
    classes, dt = _timed(f2_uniqueness_scan)
    return [
        CheckResult("f2", "classes", 1, len(classes), len(classes) == 1, dt),
        CheckResult("f2", "f2 in class", True, bool(classes) and F2 in classes[0], bool(classes) and F2 in classes[0]),
    ]


def check_quantum(seed: int = 0) -> list[CheckResult]:
    out = []
    chsh_min = 2 - 2 * math.sqrt(2)
    r, dt = _timed(lambda: quantum.optimize_violation(quantum.CHSH, S22, "value", seed=seed))
    out.append(CheckResult("quantum", "CHSH min value", round(chsh_min, 6), r.value, abs(r.value - chsh_min) <= 1e-6, dt))
    r, dt = _timed(lambda: quantum.optimize_violation(quantum.S33, S33, "value", seed=seed))
    psi, dev = match_s33_extremal(r.config)
    out.append(CheckResult("quantum", "3+3 min value", -1, r.value, abs(r.value + 1) <= 1e-6, dt))
    out.append(CheckResult("quantum", "3+3 config vs angles", "dev<=1e-6", dev, dev <= 1e-6))
    r, dt = _timed(lambda: quantum.optimize_violation(quantum.CHSH, S22, "ratio", seed=seed))
    out.append(CheckResult("quantum", "CHSH max |E/dE|", 0.585786, r.ratio, abs(r.ratio - 0.585786) <= 1e-4, dt))
    r, dt = _timed(lambda: quantum.optimize_violation(quantum.S33, S33, "ratio", seed=seed))
    out.append(CheckResult("quantum", "3+3 max |E/dE|", 0.342997, r.ratio, abs(r.ratio - 0.342997) <= 1e-4, dt))
    return out


CASES = {
    "s22": check_s22,
    "s33": check_s33,
    "f2": check_f2,
    "quantum": check_quantum,
    "2n": check_2n,
    "s222": check_s222,
}
