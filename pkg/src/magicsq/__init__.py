"""Simulation and contextuality analysis of the Mermin-Peres magic square."""

from .contextuality import (
    AnalysisReport,
    analyze,
    analyze_counts,
    enumerate_sign_squares,
    hull_distance,
    max_overlap,
    result_from_counts,
    sigma_radius,
    vector_sets,
    violation_score,
)
from .magicsquare import (
    LINES,
    SQUARE,
    LineId,
    MagicSquare,
    PauliObservable,
    build_line_circuit,
    line_product_sign,
    observable_at,
    qnd_measure,
    sequential_line_run,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "LINES",
    "LineId",
    "MagicSquare",
    "PauliObservable",
    "SQUARE",
    "analyze",
    "analyze_counts",
    "build_line_circuit",
    "enumerate_sign_squares",
    "hull_distance",
    "line_product_sign",
    "max_overlap",
    "observable_at",
    "qnd_measure",
    "result_from_counts",
    "sequential_line_run",
    "sigma_radius",
    "vector_sets",
    "violation_score",
]
