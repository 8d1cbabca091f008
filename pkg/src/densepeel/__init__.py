"""Approximately densest subgraphs of large graphs by multi-pass peeling.

Public surface: edge-stream ingestion, the undirected and directed peel
loops (with size-constrained and sketched variants), exact oracles, the
sharded two-phase executor, and deterministic graph generators.
"""

__version__ = "0.1.0"

from . import errors
from .directed import (
    DirectedPassTrace,
    DirectedResult,
    densest_directed,
    density_directed,
    ratio_grid,
    sweep_c,
)
from .generators import (
    GeneratedGraph,
    clique_plus_star,
    erdos_renyi,
    preferential_attachment_weighted,
    regular_layers,
)
from .graph_io import EdgeStream, NodeTable, ScanSummary, open_edge_stream, scan
from .mapreduce import (
    MRMetrics,
    PhaseStats,
    ShardSet,
    mr_degree_phase,
    mr_densest_undirected,
    mr_filter_phase,
    partition_stream,
)
from .oracle import (
    DirectedOracleResult,
    OracleResult,
    brute_force_by_min_size,
    brute_force_directed,
    brute_force_undirected,
    exact_flow_undirected,
)
from .peel import (
    DenseResult,
    PassTrace,
    PeelState,
    adjacency_from_edges,
    as_exact_fraction,
    d_core,
    densest_at_least_k,
    densest_undirected,
    density,
    peel_pass,
    recount_density,
    refresh_degrees,
)
from .sketch import SketchEstimator, densest_undirected_sketched

__all__ = [
    "DenseResult",
    "DirectedOracleResult",
    "DirectedPassTrace",
    "DirectedResult",
    "EdgeStream",
    "GeneratedGraph",
    "MRMetrics",
    "NodeTable",
    "OracleResult",
    "PassTrace",
    "PeelState",
    "PhaseStats",
    "ScanSummary",
    "ShardSet",
    "SketchEstimator",
    "adjacency_from_edges",
    "as_exact_fraction",
    "brute_force_by_min_size",
    "brute_force_directed",
    "brute_force_undirected",
    "clique_plus_star",
    "d_core",
    "densest_at_least_k",
    "densest_directed",
    "densest_undirected",
    "densest_undirected_sketched",
    "density",
    "density_directed",
    "erdos_renyi",
    "errors",
    "exact_flow_undirected",
    "mr_degree_phase",
    "mr_densest_undirected",
    "mr_filter_phase",
    "open_edge_stream",
    "partition_stream",
    "peel_pass",
    "preferential_attachment_weighted",
    "ratio_grid",
    "recount_density",
    "refresh_degrees",
    "regular_layers",
    "scan",
    "sweep_c",
]
