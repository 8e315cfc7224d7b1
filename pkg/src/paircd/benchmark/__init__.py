"""Benchmark harness: synthetic generators, missingness injection, graph
metrics, imputation-bias diagnostics, and grid execution."""

from .dgp import (EDGE_FUNCTIONS, EdgeKind, GraphDGPSpec, HubData,
                  StandaloneDGPSpec, StandaloneData, StandaloneFamily,
                  erdos_renyi_dag, gen_graph_data, gen_hub, gen_standalone,
                  sample_graph_dgp)
from .kappa import KappaDiagnostics, kappa_estimate, kappa_from_stack
from .metrics import GraphMetrics, graph_metrics, summarize_metric
from .missingness import Mechanism, MissingnessSpec, calibrate_intercept, inject_missingness
from .runner import (BenchmarkRecord, CSV_COLUMNS, ExperimentPlan,
                     run_experiment, summarize_results)
from .standalone import StandaloneCell, make_incomplete, rejection_rate, run_flags, run_replicate
from .topology import bundled_topology, load_topology

__all__ = [
    "BenchmarkRecord", "CSV_COLUMNS", "EDGE_FUNCTIONS", "EdgeKind",
    "ExperimentPlan", "GraphDGPSpec", "GraphMetrics", "HubData",
    "KappaDiagnostics", "Mechanism", "MissingnessSpec", "StandaloneCell",
    "StandaloneDGPSpec", "StandaloneData", "StandaloneFamily",
    "bundled_topology", "calibrate_intercept", "erdos_renyi_dag",
    "gen_graph_data", "gen_hub", "gen_standalone", "graph_metrics",
    "kappa_estimate", "kappa_from_stack", "load_topology", "make_incomplete",
    "rejection_rate", "run_experiment", "run_flags", "run_replicate",
    "sample_graph_dgp", "summarize_metric", "summarize_results",
]
