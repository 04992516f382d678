"""Exact optimal transport mapping networks (C++ core)."""

from ._otmap import (
    MAX_ASSIGNMENT_SIZE,
    OtmapError,
    fit_cluster_model,
    generate,
    make_circles,
    make_moons,
    ot_divergence,
    run_cli,
    sample_cluster_model,
    solve_assignment,
)

__all__ = [
    "MAX_ASSIGNMENT_SIZE",
    "OtmapError",
    "fit_cluster_model",
    "generate",
    "make_circles",
    "make_moons",
    "ot_divergence",
    "run_cli",
    "sample_cluster_model",
    "solve_assignment",
]
