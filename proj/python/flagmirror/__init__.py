"""Mirror superpotentials of full flag varieties G/B."""

from ._core import (
    ConvergenceError,
    DomainError,
    OffChartError,
    braid_compare,
    critical_census,
    critical_point,
    identities,
    kim_invariants,
    peterson_check,
    root_data,
    s_gamma,
    superpotential,
    verify_toda,
)

__all__ = [
    "ConvergenceError",
    "DomainError",
    "OffChartError",
    "braid_compare",
    "critical_census",
    "critical_point",
    "identities",
    "kim_invariants",
    "peterson_check",
    "root_data",
    "s_gamma",
    "superpotential",
    "verify_toda",
]
