import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellpoly import dd, linalg
from bellpoly.hull import (
    _modular_ranks,
    canonicalize,
    certify_facets,
    facets,
    find_facet,
    neighbours,
    verify_facet,
)
from bellpoly.quantum import CHSH, S33
from bellpoly.scenario import Scenario, positivity_inequalities, vertex_matrix
from oracles import brute_force_facets


def test_s22_matches_brute_force(vertices):
    V = vertices["2,2"]
    expected = brute_force_facets(V)
    assert len(expected) == 24
    assert facets(V) == sorted(expected)
    assert facets(V, "adjacency_decomposition", scenario=Scenario((2, 2))) == sorted(expected)


def test_s22_decomposition(vertices):
    F = facets(vertices["2,2"])
    pos = set(positivity_inequalities(Scenario((2, 2))))
    assert pos <= set(F)
    assert len(set(F) - pos) == 8


@pytest.mark.parametrize("spec", ["2,2", "2,3", "2,4", "3,3"])
def test_methods_agree(spec, vertices, small_facets):
    sc = Scenario.parse(spec)
    assert facets(vertices[spec], "adj", scenario=sc) == small_facets[spec]
    if spec != "3,3":
        # without a group the walk visits every facet on its own
        assert facets(vertices[spec], "adj") == small_facets[spec]


def test_adjacency_decomposition_worker_count_invariant(vertices, small_facets):
    sc = Scenario((3, 3))
    assert facets(vertices["3,3"], "adj", scenario=sc, workers=2) == small_facets["3,3"]


@pytest.mark.parametrize("spec", ["2,2", "2,3", "2,4", "3,3"])
def test_every_facet_certified(spec, vertices, small_facets):
    V = vertices[spec]
    dim = V.shape[1] - 1
    F = small_facets[spec]
    assert F == sorted(set(F))
    vals = V @ np.array(F).T
    assert np.all(vals.min(axis=0) == 0)
    for f in F:
        cert = verify_facet(V, f)
        assert cert.is_facet and cert.rank == dim - 1
        assert f[0] > 0


def test_canonicalize_examples():
    half_chsh = [1, 0, 0, 0, -0.5, -0.5, 0, -0.5, 0.5]
    from fractions import Fraction

    half_chsh = [Fraction(x).limit_denominator() for x in half_chsh]
    assert canonicalize(half_chsh) == CHSH
    assert canonicalize(CHSH) == CHSH
    V = vertex_matrix(Scenario((2, 2)))
    assert canonicalize([-x for x in CHSH], V) == CHSH
    with pytest.raises(ValueError):
        canonicalize([0] * 9)


def test_verify_facet_examples():
    V22 = vertex_matrix(Scenario((2, 2)))
    cert = verify_facet(V22, CHSH)
    assert cert.is_facet and len(cert.tight_vertices) == 8 and cert.rank == 7

    cert = verify_facet(vertex_matrix(Scenario((3, 3))), S33)
    assert cert.is_facet and cert.rank == 14

    loose = (5,) + CHSH[1:]
    cert = verify_facet(V22, loose)
    assert not cert.is_facet and cert.min_value > 0


def test_find_facet_and_neighbours(vertices, small_facets):
    V = vertices["3,3"]
    f = find_facet(V)
    assert f in small_facets["3,3"]
    nbrs = neighbours(f, V)
    assert nbrs and set(nbrs) <= set(small_facets["3,3"])


def test_degenerate_input_reported():
    V = vertex_matrix(Scenario((2, 2)))
    flat = V[V[:, 1] == 1]
    with pytest.raises(dd.DegenerateInputError):
        facets(flat)


def test_big_integer_path_matches_int64():
    # scaling the constraints forces the Python-int branch; rays must not change
    V = vertex_matrix(Scenario((2, 2)))
    scaled = V.astype(object) * (2**70)
    rays = dd.extreme_rays(scaled)
    assert rays.dtype == object
    assert sorted(tuple(int(x) for x in r) for r in rays) == facets(V)


def test_unknown_method(vertices):
    with pytest.raises(ValueError):
        facets(vertices["2,2"], "qhull")


def test_certify_facets_agrees_with_verify_facet(vertices, small_facets):
    V = vertices["3,3"]
    F = small_facets["3,3"]
    loose = [(f[0] + 1,) + f[1:] for f in F[:20]]
    cert = certify_facets(V, F + loose)
    assert cert[: len(F)].all() and not cert[len(F):].any()


@given(st.lists(st.lists(st.integers(-2, 2), min_size=4, max_size=4), min_size=1, max_size=6))
@settings(max_examples=100)
def test_modular_rank_bounded_by_exact_rank(rows):
    r = int(_modular_ranks(np.array([rows]))[0])
    assert r <= linalg.rank(rows)
    # entries this small keep every minor below the modulus
    assert r == linalg.rank(rows)
