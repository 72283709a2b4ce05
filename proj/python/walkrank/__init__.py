"""Personalized PageRank by seed-rooted random walks with incremental repair."""

from ._walkrank import (
    Corpus,
    Delta,
    DeltaKind,
    FormatError,
    Graph,
    StateError,
    convergence_sweep,
    exact_solve,
    ingest,
    power_iteration,
    sample,
)

__all__ = [
    "Corpus",
    "Delta",
    "DeltaKind",
    "FormatError",
    "Graph",
    "StateError",
    "convergence_sweep",
    "exact_solve",
    "ingest",
    "power_iteration",
    "sample",
]
