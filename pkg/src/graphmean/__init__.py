"""Sample means of attributed graphs under the graph edit kernel metric."""

from graphmean.graph import AttributedGraph, blend, edge_set, frobenius_distance, inner, pad, permute, scale
from graphmean.align import Alignment, SolverConfig, align, align_exact, align_heuristic, distance, distance_matrix, kernel
from graphmean.frechet import FrechetReport, Loss, Sample, frechet_value, first_order_residual, midpoint_check
from graphmean.means import ALGORITHMS, MeanConfig, MeanEstimate, run

__version__ = "0.1.0"

__all__ = [
    "AttributedGraph",
    "Alignment",
    "SolverConfig",
    "Sample",
    "Loss",
    "FrechetReport",
    "MeanConfig",
    "MeanEstimate",
    "ALGORITHMS",
    "pad",
    "permute",
    "scale",
    "inner",
    "frobenius_distance",
    "blend",
    "edge_set",
    "align",
    "align_exact",
    "align_heuristic",
    "kernel",
    "distance",
    "distance_matrix",
    "frechet_value",
    "first_order_residual",
    "midpoint_check",
    "run",
]
