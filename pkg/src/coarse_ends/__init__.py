"""Coarse ends of pointed metric spaces.

Finite models of coarse spaces, certified coarse maps, K-chain components
and annulus towers, the calculus of coarse sequences (subsequences,
confluence, the distance ``d_S``), and the sequential ends ``σ(X, ξ)``
built from it.
"""

from . import extdist
from .chains import EndReport, Partition, UnionFind, annulus_tower, coarsely_connected_components, end_count, k_chain_components
from .classify import EndClass, classify_sequence
from .ends import ClassMap, SigmaReport, crosscheck_equivalence, generate_representatives, sigma, sigma_map
from .errors import CertificationError, CoarseError, HorizonError, InputError
from .extdist import INF
from .maps import (
    Certificate,
    MapModel,
    certify_bornologous,
    certify_bornotopic,
    certify_coarse,
    certify_coarse_equivalence,
    certify_proper,
    compose_maps,
    identity_map,
    map_from_json,
    verify_map,
)
from .space import FiniteModel, Geometry, Relation, SpaceModel, ball, distance
from .zoo import (
    disjoint_union,
    free_group,
    integers,
    lattice,
    matrix_group,
    naturals,
    rescale,
    space_from_json,
    space_to_json,
    tree,
)

__version__ = "0.1.0"

__all__ = [
    "extdist", "INF",
    "CoarseError", "InputError", "CertificationError", "HorizonError",
    "Geometry", "SpaceModel", "FiniteModel", "Relation", "ball", "distance",
    "naturals", "integers", "lattice", "tree", "free_group", "matrix_group", "disjoint_union", "rescale",
    "space_from_json", "space_to_json",
    "MapModel", "Certificate", "identity_map", "compose_maps", "map_from_json", "certify_bornologous",
    "certify_proper", "certify_bornotopic", "certify_coarse", "certify_coarse_equivalence", "verify_map",
    "UnionFind", "Partition", "k_chain_components", "coarsely_connected_components", "annulus_tower",
    "end_count", "EndReport",
    "EndClass", "classify_sequence", "SigmaReport", "sigma", "sigma_map", "ClassMap",
    "crosscheck_equivalence", "generate_representatives",
]
