import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from bellpoly import quantum as q
from bellpoly.checks import match_s33_extremal
from bellpoly.scenario import Scenario, vertex_matrix
from oracles import finite_difference_grad, monte_carlo_inner_min, random_unit

S22, S33 = Scenario((2, 2)), Scenario((3, 3))
TSIRELSON = 2 - 2 * math.sqrt(2)


def random_config(rng, sc):
    return q.MeasurementConfig(random_unit(rng, sc.site_counts[0]), random_unit(rng, sc.site_counts[1]))


def test_singlet_tensor_entries():
    z, x = [0, 0, 1], [1, 0, 0]
    T = q.singlet_correlation_tensor(q.MeasurementConfig([z, x], [z, z]), S22)
    assert T[0, 0] == 1
    assert np.all(T[1:, 0] == 0) and np.all(T[0, 1:] == 0)
    assert T[1, 1] == -1
    assert abs(T[2, 1]) < 1e-15


def test_singlet_tensor_errors():
    with pytest.raises(ValueError):
        q.MeasurementConfig([[1, 1, 0]], [[0, 0, 1]])
    cfg = q.MeasurementConfig([[0, 0, 1]] * 2, [[0, 0, 1]] * 2)
    with pytest.raises(ValueError):
        q.singlet_correlation_tensor(cfg, Scenario((2, 2, 2)))


def test_evaluate_examples():
    z = [0, 0, 1]
    classical = q.singlet_correlation_tensor(q.MeasurementConfig([z, z], [z, z]), S22)
    assert q.evaluate(q.CHSH, classical) >= 0
    T = q.singlet_correlation_tensor(q.tsirelson_config(), S22)
    assert q.evaluate(q.CHSH, T) == pytest.approx(TSIRELSON, abs=1e-12)
    for psi in (0.0, 0.7, 2.5):
        T = q.singlet_correlation_tensor(q.s33_extremal_config(psi), S33)
        assert q.evaluate(q.S33, T) == pytest.approx(-1, abs=1e-12)
    with pytest.raises(ValueError):
        q.evaluate(q.CHSH, np.zeros((4, 4)))


def test_ratio_examples():
    T = q.singlet_correlation_tensor(q.tsirelson_config(), S22)
    assert q.ratio(q.CHSH, T) == pytest.approx(2 - math.sqrt(2), abs=1e-12)
    assert q.ratio(q.CHSH, T) == pytest.approx((2 * math.sqrt(2) - 2) / math.sqrt(2), abs=1e-12)
    rng = np.random.default_rng(1)
    T = q.singlet_correlation_tensor(random_config(rng, S33), S33)
    assert q.ratio([7 * a for a in q.S33], T) == pytest.approx(q.ratio(q.S33, T), rel=1e-12)
    with pytest.raises(ZeroDivisionError):
        q.ratio((1,) + (0,) * 8, T[:3, :3])


def test_closed_form_examples():
    alpha, beta = math.pi / 3, math.pi / 2
    # b1 +- b2 along z / x with |b1 - b2| = 2 cos(alpha); b3 at angle beta from b1 + b2
    b1 = np.array([math.cos(alpha), 0, math.sin(alpha)])
    b2 = np.array([-math.cos(alpha), 0, math.sin(alpha)])
    b3 = np.array([0, math.sin(beta), math.cos(beta)])
    assert q.closed_form_s33_value(b1, b2, b3) == pytest.approx(-1, abs=1e-12)
    z = np.array([0, 0, 1.0])
    assert q.closed_form_s33_value(z, z, z) == pytest.approx(0, abs=1e-12)
    with pytest.raises(ValueError):
        q.closed_form_s33_value(2 * z, z, z)


def test_closed_form_matches_monte_carlo_oracle():
    rng = np.random.default_rng(7)
    samples = random_unit(rng, 200_000)
    alpha = np.asarray(q.S33, dtype=float).reshape(4, 4)
    for _ in range(5):
        b = random_unit(rng, 3)
        oracle = monte_carlo_inner_min(b, alpha[1:, 1:], alpha[0, 0], samples, rng)
        closed = q.closed_form_s33_value(*b)
        assert oracle >= closed - 1e-12
        assert oracle - closed <= 1e-6


def test_closed_form_equals_best_a_vectors():
    rng = np.random.default_rng(3)
    for _ in range(20):
        b = random_unit(rng, 3)
        a = q.best_a_vectors(q.S33, b, S33)
        T = q.singlet_correlation_tensor(q.MeasurementConfig(a, b), S33)
        assert q.evaluate(q.S33, T) == pytest.approx(q.closed_form_s33_value(*b), abs=1e-12)


def test_degenerate_inner_step_is_continuous():
    z = np.array([0, 0, 1.0])
    a = q.best_a_vectors(q.CHSH, [z, z], S22)
    assert np.allclose(np.linalg.norm(a, axis=1), 1)
    T = q.singlet_correlation_tensor(q.MeasurementConfig(a, [z, z]), S22)
    eps = 1e-7
    b2 = np.array([eps, 0, 1.0]) / math.hypot(eps, 1)
    a2 = q.best_a_vectors(q.CHSH, [z, b2], S22)
    T2 = q.singlet_correlation_tensor(q.MeasurementConfig(a2, [z, b2]), S22)
    assert q.evaluate(q.CHSH, T) == pytest.approx(q.evaluate(q.CHSH, T2), abs=1e-6)


@pytest.mark.parametrize("ineq,sc", [(q.CHSH, S22), (q.S33, S33)])
@pytest.mark.parametrize("kind", ["value", "ratio"])
def test_gradient_matches_finite_differences(ineq, sc, kind):
    obj = q._Objective(ineq, sc)
    rng = np.random.default_rng(11)
    n = sum(sc.site_counts)
    for _ in range(10):
        x = np.stack([np.arccos(rng.uniform(-0.9, 0.9, n)), rng.uniform(0, 2 * np.pi, n)], 1).ravel()
        _, g = obj.full(x, kind)
        fd = finite_difference_grad(lambda z: obj.full(z, kind)[0], x)
        assert np.linalg.norm(g - fd) <= 1e-5 * np.linalg.norm(g)


def test_reduced_gradient_matches_finite_differences():
    obj = q._Objective(q.S33, S33)
    rng = np.random.default_rng(12)
    for _ in range(10):
        x = np.stack([np.arccos(rng.uniform(-0.9, 0.9, 3)), rng.uniform(0, 2 * np.pi, 3)], 1).ravel()
        _, g = obj.reduced_value(x)
        fd = finite_difference_grad(lambda z: obj.reduced_value(z)[0], x)
        assert np.linalg.norm(g - fd) <= 1e-5 * np.linalg.norm(g)


def test_rotation_invariance():
    rng = np.random.default_rng(5)
    for _ in range(10):
        cfg = random_config(rng, S33)
        rot = Rotation.random(random_state=rng).as_matrix()
        T1 = q.singlet_correlation_tensor(cfg, S33)
        T2 = q.singlet_correlation_tensor(cfg.rotated(rot), S33)
        assert abs(q.evaluate(q.S33, T1) - q.evaluate(q.S33, T2)) <= 1e-10
        assert abs(q.ratio(q.S33, T1) - q.ratio(q.S33, T2)) <= 1e-10


def test_classical_tensors_satisfy_every_facet(small_facets):
    V = vertex_matrix(S33)
    for f in small_facets["3,3"]:
        assert min(q.evaluate(f, v.reshape(4, 4)) for v in V) >= 0


def test_optimize_chsh_value():
    r = q.optimize_violation(q.CHSH, S22, "value", restarts=20)
    assert r.value == pytest.approx(TSIRELSON, abs=1e-6)
    assert r.converged and r.grad_norm <= 1e-9


def test_optimize_s33_value_matches_paper_family():
    r = q.optimize_violation(q.S33, S33, "value", restarts=20)
    assert r.value == pytest.approx(-1, abs=1e-6)
    _, dev = match_s33_extremal(r.config)
    assert dev <= 1e-6


def test_optimize_is_deterministic():
    r1 = q.optimize_violation(q.CHSH, S22, "ratio", restarts=5, seed=3)
    r2 = q.optimize_violation(q.CHSH, S22, "ratio", restarts=5, seed=3)
    assert r1.value == r2.value and np.array_equal(r1.config.a_vectors, r2.config.a_vectors)


def test_positivity_facet_not_violated():
    pos = (1, -1, 0, -1, 1, 0, 0, 0, 0)
    r = q.optimize_violation(pos, S22, "value", restarts=10)
    assert r.value >= -1e-9


def test_bad_objective():
    with pytest.raises(ValueError):
        q.optimize_violation(q.CHSH, S22, "max")
