"""Finite models of the pro-étale homotopy type.

Two site models stand in for the pro-étale site: finite G-sets (a field with
Galois group G) and finite sets over a finite base.  The package builds
split weakly contractible hypercoverings in them, applies the component
functor, and computes classifying spaces, edge-path groups and cohomology.
"""
from .category import SETS, SizeCapError, Verdict
from .cohomology import (Coefficients, PiSheaf, cochain_complex, cohomology, cohomology_table,
                         group_cohomology_oracle, verdier_colimit)
from .finspace import FiniteSpace, SpaceMap, components, fibre_product_over_components
from .groups import FiniteGroup, cyclic, direct_product, symmetric, trivial
from .homotopy_type import (GaloisSystem, classifying_space, nerve, pi0, pi1_edge_path, pi_of_hypercovering,
                            pro_homotopy_type)
from .simplicial import (ReducedHomotopy, SimpMap, TruncSimp, check_reduced_homotopy, coskeleton,
                         extend_reduced_homotopy, skeleton, validate)
from .site import (GSetSite, SliceSite, check_hypercovering, homotopy_between, map_from_split_wc,
                   refine_to_split_wc)

__all__ = [
    "SETS", "SizeCapError", "Verdict", "Coefficients", "PiSheaf", "cochain_complex", "cohomology",
    "cohomology_table", "group_cohomology_oracle", "verdier_colimit", "FiniteSpace", "SpaceMap",
    "components", "fibre_product_over_components", "FiniteGroup", "cyclic", "direct_product",
    "symmetric", "trivial", "GaloisSystem", "classifying_space", "nerve", "pi0", "pi1_edge_path",
    "pi_of_hypercovering", "pro_homotopy_type", "ReducedHomotopy", "SimpMap", "TruncSimp",
    "check_reduced_homotopy", "coskeleton", "extend_reduced_homotopy", "skeleton", "validate",
    "GSetSite", "SliceSite", "check_hypercovering", "homotopy_between", "map_from_split_wc",
    "refine_to_split_wc",
]
