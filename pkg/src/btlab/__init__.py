"""Local models of Bruhat-Tits trees for rank-one groups over local fields."""

from __future__ import annotations

from .cyclic_algebra import CyclicAlgebraSpec, algebra_context, algebra_iso_search, hasse_equivalent, nrd_code
from .errors import BtlabError
from .kernels import BACKEND
from .local_groups import (
    FAMILIES,
    LocalGroup,
    contains,
    enumerate_group,
    group_order,
    in_Px,
    make_group,
    su3_degeneration,
    truncate_elem,
)
from .local_tree import LocalBall, action_kernel, ball_isomorphic, build_ball, sphere_orbits, to_dot, to_json
from .proximity import catalog_distances, convergence_trace, krasner_distance, transport
from .quad_pair import QuadPair, pair_iso_search
from .trunc_ring import LocalFieldSpec, TruncRing, make_ring, ring_iso_search

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BtlabError",
    "CyclicAlgebraSpec",
    "FAMILIES",
    "LocalBall",
    "LocalFieldSpec",
    "LocalGroup",
    "QuadPair",
    "TruncRing",
    "action_kernel",
    "algebra_context",
    "algebra_iso_search",
    "ball_isomorphic",
    "build_ball",
    "catalog_distances",
    "contains",
    "convergence_trace",
    "enumerate_group",
    "group_order",
    "hasse_equivalent",
    "in_Px",
    "krasner_distance",
    "make_group",
    "make_ring",
    "nrd_code",
    "pair_iso_search",
    "ring_iso_search",
    "sphere_orbits",
    "su3_degeneration",
    "to_dot",
    "to_json",
    "transport",
    "truncate_elem",
]
