"""Parallel n-level hypergraph partitioning (connectivity objective)."""

from ._core import (
    Hypergraph,
    InvalidInput,
    InvariantViolation,
    connectivity,
    generate_netlist,
    imbalance,
    load_hmetis,
    partition,
    save_hmetis,
)

__all__ = [
    "Hypergraph",
    "InvalidInput",
    "InvariantViolation",
    "connectivity",
    "generate_netlist",
    "imbalance",
    "load_hmetis",
    "partition",
    "save_hmetis",
]
