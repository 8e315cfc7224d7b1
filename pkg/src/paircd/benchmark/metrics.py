"""Graph-recovery metrics.

Skeleton SHD counts missing plus extra edges; total SHD adds one unit for
every shared-skeleton edge whose orientation class disagrees (directed vs
undirected, or directed with the opposite arrow). Precision, recall and F1
are computed over skeleton edges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..graphs import MixedGraph


@dataclass(frozen=True)
class GraphMetrics:
    shd_total: int
    shd_skeleton: int
    precision: float
    recall: float
    f1: float


def _orientation(graph: MixedGraph, edge: tuple[int, int]) -> str:
    i, j = edge
    if (i, j) in graph.directed:
        return ">"
    if (j, i) in graph.directed:
        return "<"
    return "-"


def graph_metrics(truth: MixedGraph, estimate: MixedGraph) -> GraphMetrics:
    if truth.p != estimate.p:
        raise ValidationError("graphs must share the node count")
    true_edges = truth.skeleton_edges()
    est_edges = estimate.skeleton_edges()
    shared = true_edges & est_edges
    shd_skeleton = len(true_edges ^ est_edges)
    orient_errors = sum(1 for e in shared
                        if _orientation(truth, e) != _orientation(estimate, e))
    shd_total = shd_skeleton + orient_errors

    if est_edges:
        precision = len(shared) / len(est_edges)
    else:
        precision = 1.0 if not true_edges else 0.0
    if true_edges:
        recall = len(shared) / len(true_edges)
    else:
        recall = 1.0
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return GraphMetrics(shd_total, shd_skeleton, float(precision),
                        float(recall), float(f1))


def summarize_metric(values) -> tuple[float, float]:
    """(median, interquartile range) of a metric column."""
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        return float("nan"), float("nan")
    q1, med, q3 = np.percentile(arr, [25, 50, 75])
    return float(med), float(q3 - q1)
