"""Bell expressions on the two-qubit singlet.

A two-valued qubit observable is ``a . sigma`` for a unit (Bloch) vector
``a``. On the singlet, single-site expectations vanish and
``<A_i B_j> = -a_i . b_j``, so a two-site inequality tensor ``alpha``
evaluates to ``alpha_00 - sum_ij alpha_ij a_i . b_j`` over the
non-constant indices.

For fixed ``b`` vectors the best ``a_i`` is the unit vector along
``w_i = sum_j alpha_ij b_j``, giving ``alpha_00 - sum_i |w_i|``; the value
optimiser works on this reduced objective over the ``b`` angles only.
The ratio objective ``E / dE`` is optimised over all angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from bellpoly.scenario import Scenario

UNIT_TOL = 1e-12
GRAD_TOL = 1e-9

CHSH = (2, 0, 0, 0, -1, -1, 0, -1, 1)
S33 = (4, 1, 1, 0, 1, 1, 1, 1, 1, 1, 1, -1, 0, 1, -1, 0)


def bloch(theta: float, phi: float) -> np.ndarray:
    return np.array(
        [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)]
    )


def _bloch_arrays(theta, phi):
    st, ct, sp, cp = np.sin(theta), np.cos(theta), np.sin(phi), np.cos(phi)
    v = np.stack([st * cp, st * sp, ct], axis=-1)
    dtheta = np.stack([ct * cp, ct * sp, -st], axis=-1)
    dphi = np.stack([-st * sp, st * cp, np.zeros_like(st)], axis=-1)
    return v, dtheta, dphi


def spherical(v) -> tuple[float, float]:
    x, y, z = (float(c) for c in v)
    return math.acos(max(-1.0, min(1.0, z))), math.atan2(y, x) % (2 * math.pi)


def _check_unit(vectors: np.ndarray) -> None:
    norms = np.linalg.norm(vectors, axis=-1)
    if np.any(np.abs(norms - 1) > UNIT_TOL):
        raise ValueError(f"Bloch vectors must be unit length (norms {norms})")


@dataclass
class MeasurementConfig:
    """One Bloch vector per observable at each of the two sites."""

    a_vectors: np.ndarray
    b_vectors: np.ndarray

    def __post_init__(self):
        self.a_vectors = np.atleast_2d(np.asarray(self.a_vectors, dtype=float))
        self.b_vectors = np.atleast_2d(np.asarray(self.b_vectors, dtype=float))
        _check_unit(self.a_vectors)
        _check_unit(self.b_vectors)

    @classmethod
    def from_angles(cls, a_angles, b_angles) -> "MeasurementConfig":
        return cls([bloch(*t) for t in a_angles], [bloch(*t) for t in b_angles])

    def angles(self) -> dict[str, list[list[float]]]:
        return {
            "a": [list(spherical(v)) for v in self.a_vectors],
            "b": [list(spherical(v)) for v in self.b_vectors],
        }

    def rotated(self, rot: np.ndarray) -> "MeasurementConfig":
        return MeasurementConfig(self.a_vectors @ rot.T, self.b_vectors @ rot.T)


def _two_site(scenario: Scenario) -> None:
    if scenario.n_sites != 2:
        raise ValueError("singlet evaluation needs a two-site scenario")


def singlet_correlation_tensor(config: MeasurementConfig, scenario: Scenario) -> np.ndarray:
    """Tilde-coordinate expectations ``<A~_i B~_j>`` on the singlet."""
    _two_site(scenario)
    n_a, n_b = scenario.site_counts
    if config.a_vectors.shape != (n_a, 3) or config.b_vectors.shape != (n_b, 3):
        raise ValueError(f"configuration does not match scenario {scenario}")
    tensor = np.zeros(scenario.shape)
    tensor[0, 0] = 1.0
    tensor[1:, 1:] = -config.a_vectors @ config.b_vectors.T
    return tensor


def _alpha(ineq, shape) -> np.ndarray:
    a = np.asarray(ineq, dtype=float)
    if a.size != math.prod(shape):
        raise ValueError(f"inequality has {a.size} coefficients, expected shape {shape}")
    return a.reshape(shape)


def evaluate(ineq, tensor: np.ndarray) -> float:
    """``sum alpha * tensor``; negative means the inequality is violated."""
    tensor = np.asarray(tensor, dtype=float)
    return float(np.sum(_alpha(ineq, tensor.shape) * tensor))


def ratio(ineq, tensor: np.ndarray) -> float:
    """``|E| / dE`` with ``dE^2 = sum alpha^2 (1 - tensor^2)`` over non-constant coordinates.

    Each coordinate is treated as an independent +-1 estimator with one unit
    of sample budget, so the constant coordinate carries no variance.
    """
    tensor = np.asarray(tensor, dtype=float)
    alpha = _alpha(ineq, tensor.shape)
    var = 1.0 - tensor**2
    var.flat[0] = 0.0
    denom = float(np.sum(alpha**2 * var))
    if denom <= 0:
        raise ZeroDivisionError("inequality has zero variance on this configuration")
    return abs(evaluate(ineq, tensor)) / math.sqrt(denom)


def closed_form_s33_value(b1, b2, b3) -> float:
    """Minimum over the A-side vectors of the 3+3 inequality for fixed B-side vectors."""
    b1, b2, b3 = (np.asarray(b, dtype=float) for b in (b1, b2, b3))
    _check_unit(np.stack([b1, b2, b3]))
    # |b1|^2 = |b2|^2 makes (b1 + b2) orthogonal to (b1 - b2)
    assert abs(np.dot(b1 + b2, b1 - b2)) < 1e-9
    return float(
        4
        - np.linalg.norm(b1 - b2)
        - np.linalg.norm(b1 + b2 + b3)
        - np.linalg.norm(b1 + b2 - b3)
    )


def best_a_vectors(ineq, b_vectors, scenario: Scenario) -> np.ndarray:
    """Optimal A-side vectors for fixed B-side ones (value objective)."""
    _two_site(scenario)
    alpha = _alpha(ineq, scenario.shape)[1:, 1:]
    w = alpha @ np.asarray(b_vectors, dtype=float)
    out = np.empty_like(w)
    for i, wi in enumerate(w):
        n = np.linalg.norm(wi)
        if n < UNIT_TOL:
            out[i] = _orthogonal_unit(b_vectors[0])
        else:
            out[i] = wi / n
    return out


def _orthogonal_unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    e = np.eye(3)[int(np.argmin(np.abs(v)))]
    u = np.cross(v, e)
    return u / np.linalg.norm(u)


@dataclass
class ViolationResult:
    config: MeasurementConfig
    value: float
    ratio: float
    converged: bool
    objective: str
    grad_norm: float = field(default=float("nan"))

    def report(self) -> dict:
        return {
            "objective": self.objective,
            "value": self.value,
            "ratio": self.ratio,
            "converged": self.converged,
            "grad_norm": self.grad_norm,
            "config": self.config.angles(),
        }


class _Objective:
    """Objective and analytic gradient over packed angles ``(theta, phi)`` per vector."""

    def __init__(self, ineq, scenario: Scenario):
        _two_site(scenario)
        self.scenario = scenario
        self.n_a, self.n_b = scenario.site_counts
        alpha = _alpha(ineq, scenario.shape)
        self.const = alpha[0, 0]
        self.pair = alpha[1:, 1:]
        self.single_sq = float(np.sum(alpha[1:, 0] ** 2) + np.sum(alpha[0, 1:] ** 2))

    def _unpack(self, x, n):
        ang = x.reshape(n, 2)
        return _bloch_arrays(ang[:, 0], ang[:, 1])

    @staticmethod
    def _pack_grad(g_vec, dtheta, dphi):
        return np.stack([np.sum(g_vec * dtheta, axis=1), np.sum(g_vec * dphi, axis=1)], axis=1).ravel()

    def reduced_value(self, x):
        """``const - sum_i |sum_j alpha_ij b_j|`` over B-side angles, with gradient."""
        b, db_t, db_p = self._unpack(x, self.n_b)
        w = self.pair @ b
        norms = np.linalg.norm(w, axis=1)
        safe = np.where(norms > UNIT_TOL, norms, 1.0)
        units = np.where(norms[:, None] > UNIT_TOL, w / safe[:, None], 0.0)
        value = self.const - norms.sum()
        g_b = -self.pair.T @ units
        return value, self._pack_grad(g_b, db_t, db_p)

    def full(self, x, kind):
        """Value (``kind="value"``) or ``E / dE`` (``kind="ratio"``) over all angles."""
        na2 = 2 * self.n_a
        a, da_t, da_p = self._unpack(x[:na2], self.n_a)
        b, db_t, db_p = self._unpack(x[na2:], self.n_b)
        c = a @ b.T
        e = self.const - np.sum(self.pair * c)
        if kind == "value":
            g_c = -self.pair
            f = e
        else:
            d2 = self.single_sq + np.sum(self.pair**2 * (1 - c**2))
            d = math.sqrt(max(d2, 1e-300))
            f = e / d
            g_c = -self.pair / d + e * self.pair**2 * c / d**3
        g_a = g_c @ b
        g_b = g_c.T @ a
        grad = np.concatenate([self._pack_grad(g_a, da_t, da_p), self._pack_grad(g_b, db_t, db_p)])
        return f, grad

    def config_from(self, x) -> MeasurementConfig:
        na2 = 2 * self.n_a
        a, _, _ = self._unpack(x[:na2], self.n_a)
        b, _, _ = self._unpack(x[na2:], self.n_b)
        return MeasurementConfig(a, b)

    def angles_of(self, config: MeasurementConfig) -> np.ndarray:
        return np.array(
            [spherical(v) for v in config.a_vectors] + [spherical(v) for v in config.b_vectors]
        ).ravel()


def _random_angles(rng: np.random.Generator, n: int) -> np.ndarray:
    theta = np.arccos(rng.uniform(-1, 1, n))
    phi = rng.uniform(0, 2 * np.pi, n)
    return np.stack([theta, phi], axis=1).ravel()


def _newton_polish(fun, x, steps: int = 30, h: float = 1e-6) -> np.ndarray:
    """Newton steps with a finite-difference Hessian of the analytic gradient.

    The least-squares solve ignores the flat directions of the objective.
    Steps are kept only while they lower the gradient norm without raising
    the objective.
    """
    f, g = fun(x)
    for _ in range(steps):
        if np.linalg.norm(g) <= 1e-13:
            break
        eye = np.eye(len(x))
        hess = np.stack([(fun(x + h * e)[1] - fun(x - h * e)[1]) / (2 * h) for e in eye])
        hess = (hess + hess.T) / 2
        dx = -np.linalg.lstsq(hess, g, rcond=1e-8)[0]
        f_new, g_new = fun(x + dx)
        if f_new > f + 1e-14 or np.linalg.norm(g_new) >= np.linalg.norm(g):
            break
        x, f, g = x + dx, f_new, g_new
    return x


def optimize_violation(
    ineq,
    scenario: Scenario,
    objective: str = "value",
    *,
    restarts: int = 100,
    seed: int = 0,
    maxiter: int = 10_000,
) -> ViolationResult:
    """Multi-start BFGS over spherical angles; returns the best restart.

    ``objective="value"`` minimises the inequality value on the singlet;
    ``objective="ratio"`` minimises ``E / dE``, i.e. maximises ``|E| / dE``
    over violating configurations. Ties go to the earliest restart.
    """
    if objective not in ("value", "ratio"):
        raise ValueError(f"unknown objective {objective!r}")
    obj = _Objective(ineq, scenario)
    rng = np.random.default_rng(seed)
    opts = {"gtol": 1e-13, "maxiter": maxiter}
    best_f, best_x = math.inf, None
    for _ in range(restarts):
        if objective == "value":
            x0 = _random_angles(rng, obj.n_b)
            res = minimize(obj.reduced_value, x0, jac=True, method="BFGS", options=opts)
            b, _, _ = obj._unpack(res.x, obj.n_b)
            a = best_a_vectors(ineq, b, scenario)
            x = obj.angles_of(MeasurementConfig(a, b))
        else:
            x0 = _random_angles(rng, obj.n_a + obj.n_b)
            res = minimize(lambda z: obj.full(z, "ratio"), x0, jac=True, method="BFGS", options=opts)
            x = res.x
        f, _ = obj.full(x, objective)
        if f < best_f:
            best_f, best_x = f, x
    best_x = _newton_polish(lambda z: obj.full(z, objective), best_x)
    f, g = obj.full(best_x, objective)
    config = obj.config_from(best_x)
    tensor = singlet_correlation_tensor(config, scenario)
    gnorm = float(np.linalg.norm(g))
    return ViolationResult(
        config=config,
        value=evaluate(ineq, tensor),
        ratio=ratio(ineq, tensor),
        converged=gnorm <= GRAD_TOL,
        objective=objective,
        grad_norm=gnorm,
    )


def tsirelson_config() -> MeasurementConfig:
    """Coplanar CHSH configuration attaining ``2 - 2 sqrt 2`` for :data:`CHSH`."""
    ang = lambda t: (math.pi / 2, t)  # noqa: E731
    return MeasurementConfig.from_angles(
        [ang(math.pi), ang(-math.pi / 2)], [ang(math.pi / 4), ang(-math.pi / 4)]
    )


def s33_extremal_config(psi: float = 0.0) -> MeasurementConfig:
    """Maximal-violation configuration of :data:`S33`; ``psi`` is the free angle of ``b3``."""
    pi = math.pi
    return MeasurementConfig.from_angles(
        [(pi / 6, psi), (pi / 6, psi + pi), (pi / 2, 0.0)],
        [(pi / 6, 0.0), (pi / 6, pi), (pi / 2, psi)],
    )
