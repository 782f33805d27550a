"""Incidence counting over finite relations."""

from ._expd import (
    CapacityError,
    ExpdError,
    Relation2,
    Relation3,
    canonical,
    certify,
    count,
    delta_degree,
    derive_g_size,
    epsilon_limit,
    exponent_params,
    find_kst,
    identity_matching,
    instantiate,
    interval_cutting,
    kst_bound,
    projective_plane,
    random_intervals,
    scan,
)

__all__ = [
    "CapacityError",
    "ExpdError",
    "Relation2",
    "Relation3",
    "canonical",
    "certify",
    "count",
    "delta_degree",
    "derive_g_size",
    "epsilon_limit",
    "exponent_params",
    "find_kst",
    "identity_matching",
    "instantiate",
    "interval_cutting",
    "kst_bound",
    "projective_plane",
    "random_intervals",
    "scan",
]
