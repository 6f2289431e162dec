"""Exact facet enumeration, symmetry classification and singlet violations
of Bell correlation polytopes for two-valued observables."""

from bellpoly.scenario import (
    Scenario,
    enumerate_strategies,
    polytope_dimension,
    positivity_inequalities,
    vertex_coordinates,
    vertex_matrix,
)
from bellpoly.hull import FacetCertificate, canonicalize, facets, verify_facet
from bellpoly.symmetry import (
    Orbit,
    SymmetryElement,
    SymmetryGroup,
    canonical_representative,
    generators,
    is_positivity_class,
    orbit_decompose,
)

__all__ = [
    "Scenario",
    "enumerate_strategies",
    "vertex_coordinates",
    "vertex_matrix",
    "polytope_dimension",
    "positivity_inequalities",
    "FacetCertificate",
    "canonicalize",
    "facets",
    "verify_facet",
    "SymmetryElement",
    "SymmetryGroup",
    "Orbit",
    "generators",
    "canonical_representative",
    "orbit_decompose",
    "is_positivity_class",
]

__version__ = "0.1.0"
