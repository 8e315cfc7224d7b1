"""Experiment grid execution with incremental persistence.

A plan is a JSON document naming methods, data-generating conditions, and
replication counts. The runner walks the grid, derives one seed per cell
from the master seed, appends a CSV row per replicate as it finishes, and
skips rows already present in the output (resume after interruption).
Failures of individual replicates are recorded as failed rows and the run
continues.

Two plan kinds exist: "graph" cells run a full discovery method against a
sampled DAG and score the CPDAG; "ci" cells run one standalone CI test per
replicate and record the decision.
"""

from __future__ import annotations

import dataclasses
import json
import time
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from ..ci_test import fast_config, general_config
from ..discovery import DiscoveryConfig, DISCOVERY_METHODS, dag_to_cpdag, discover
from ..errors import ConfigurationError, PaircdError
from ..imputation import MiceConfig
from .dgp import (EdgeKind, StandaloneFamily, erdos_renyi_dag, gen_graph_data,
                  sample_graph_dgp)
from .metrics import graph_metrics
from .missingness import Mechanism, MissingnessSpec, inject_missingness
from .standalone import CI_METHODS, StandaloneCell, run_replicate
from .topology import bundled_topology

CSV_COLUMNS = ("method", "dgp", "mechanism", "rate", "n", "p", "replicate",
               "shd_total", "shd_skeleton", "precision", "recall", "f1",
               "runtime_s", "status", "p_value", "reject")


@dataclass(frozen=True)
class BenchmarkRecord:
    method: str
    dgp: str
    mechanism: str
    rate: float
    n: int
    p: int
    replicate: int
    shd_total: int | None = None
    shd_skeleton: int | None = None
    precision: float | None = None
    recall: float | None = None
    f1: float | None = None
    runtime_s: float = 0.0
    status: str = "ok"
    p_value: float | None = None
    reject: bool | None = None

    def row(self) -> dict:
        return {c: getattr(self, c) for c in CSV_COLUMNS}


@dataclass(frozen=True)
class ExperimentPlan:
    kind: str                                   # "graph" | "ci"
    methods: tuple[str, ...]
    dgps: tuple[str, ...]                       # graph: er10/er20/sachs/...; ci: family names
    mechanisms: tuple[str, ...]
    rates: tuple[float, ...] = (0.3,)
    sizes: tuple[int, ...] = (1000,)
    replicates: int = 10
    n_graphs: int = 3                           # graph kind: DAG draws per dgp
    signal: float = 0.0                         # ci kind
    d: int = 5                                  # ci kind: conditioning dimension
    variant: str = "fast"
    m_imputations: int = 5
    alpha: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("graph", "ci"):
            raise ConfigurationError("plan kind must be 'graph' or 'ci'")
        if self.kind == "graph":
            bad = set(self.methods) - set(DISCOVERY_METHODS)
        else:
            bad = set(self.methods) - set(CI_METHODS) - {
                f"pairci_{imp}" for imp in ("mean", "marginal")}
        if bad:
            raise ConfigurationError(f"unknown methods in plan: {sorted(bad)}")

    @classmethod
    def from_json(cls, text: str) -> "ExperimentPlan":
        obj = json.loads(text)
        tuple_keys = ("methods", "dgps", "mechanisms", "rates", "sizes")
        kwargs = {k: tuple(v) if k in tuple_keys else v for k, v in obj.items()}
        return cls(**kwargs)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2)


_GRAPH_DGPS = {
    "er10": ("er", 10, 0.25, 3, EdgeKind.LINEAR),
    "er10_nonlinear": ("er", 10, 0.25, 3, EdgeKind.NONLINEAR),
    "er20": ("er", 20, 0.2, 6, EdgeKind.LINEAR),
    "er20_nonlinear": ("er", 20, 0.2, 6, EdgeKind.NONLINEAR),
    "er30": ("er", 30, 0.15, 8, EdgeKind.LINEAR),
    "er30_nonlinear": ("er", 30, 0.15, 8, EdgeKind.NONLINEAR),
    "sachs": ("topo", "sachs", None, 3, EdgeKind.LINEAR),
    "sachs_nonlinear": ("topo", "sachs", None, 3, EdgeKind.NONLINEAR),
    "alarm": ("topo", "alarm", None, 10, EdgeKind.LINEAR),
    "alarm_nonlinear": ("topo", "alarm", None, 10, EdgeKind.NONLINEAR),
    "hailfinder_nonlinear": ("topo", "hailfinder", None, 15, EdgeKind.NONLINEAR),
}

_CI_FAMILIES = {f.value: f for f in StandaloneFamily}


def _graph_for(dgp: str, graph_seed: int):
    kind, arg, prob, n_incomplete, edge_kind = _GRAPH_DGPS[dgp]
    if kind == "er":
        return erdos_renyi_dag(arg, prob, graph_seed), n_incomplete, edge_kind
    return bundled_topology(arg), n_incomplete, edge_kind


def _incomplete_targets(graph, n_targets: int, rng: np.random.Generator):
    """Missingness lands on randomly chosen non-root nodes (all nodes when
    the graph has fewer non-roots than requested targets)."""
    non_roots = [v for v in range(graph.p) if graph.parents(v)]
    pool = non_roots if len(non_roots) >= n_targets else list(range(graph.p))
    return tuple(int(v) for v in rng.choice(pool, size=min(n_targets, len(pool)),
                                            replace=False))


def _run_graph_cell(plan: ExperimentPlan, method: str, dgp: str,
                    mechanism: str, rate: float, n: int, replicate: int,
                    seed_state: int) -> BenchmarkRecord:
    rng = np.random.default_rng(seed_state)
    t0 = time.time()
    # replicates cycle over a fixed pool of n_graphs DAG draws per condition
    graph_idx = replicate % max(plan.n_graphs, 1)
    graph_seed = int(np.random.SeedSequence(
        (plan.seed, zlib.crc32(dgp.encode()), graph_idx)).generate_state(1)[0])
    graph, n_incomplete, edge_kind = _graph_for(dgp, graph_seed)
    spec = sample_graph_dgp(graph, edge_kind, n, int(rng.integers(2**31)))
    values = gen_graph_data(spec)
    mech = Mechanism(mechanism)
    targets = _incomplete_targets(graph, n_incomplete, rng) \
        if mech != Mechanism.MCAR_COMPLETE else ()
    mspec = MissingnessSpec(mech, rate, targets, seed=int(rng.integers(2**31)))
    data = inject_missingness(values, mspec)
    ci = fast_config() if plan.variant == "fast" else general_config()
    config = DiscoveryConfig(alpha=plan.alpha, ci=ci,
                             mice=MiceConfig(m_imputations=plan.m_imputations),
                             seed=int(rng.integers(2**31)))
    estimate = discover(data, method, config)
    truth = dag_to_cpdag(graph)
    m = graph_metrics(truth, estimate)
    return BenchmarkRecord(method, dgp, mechanism, rate, n, graph.p, replicate,
                           m.shd_total, m.shd_skeleton, m.precision, m.recall,
                           m.f1, round(time.time() - t0, 3))


def _run_ci_cell(plan: ExperimentPlan, method: str, dgp: str, mechanism: str,
                 rate: float, n: int, replicate: int,
                 seed_state: int) -> BenchmarkRecord:
    t0 = time.time()
    imputer = "mice"
    base_method = method
    if method.startswith("pairci_"):
        base_method, imputer = "pairci", method.split("_", 1)[1]
    cell = StandaloneCell(_CI_FAMILIES[dgp], Mechanism(mechanism),
                          signal=plan.signal, n=n, d=plan.d, rate=rate,
                          method=base_method, imputer=imputer,
                          m_imputations=plan.m_imputations)
    cfg = fast_config() if plan.variant == "fast" else general_config()
    res = run_replicate(cell, seed_state, ci_config=cfg)
    return BenchmarkRecord(method, dgp, mechanism, rate, n, plan.d + 2,
                           replicate, runtime_s=round(time.time() - t0, 3),
                           p_value=float(res.p_value),
                           reject=bool(res.p_value < plan.alpha))


def _existing_keys(out_path: Path) -> set[tuple]:
    if not out_path.exists():
        return set()
    df = pd.read_csv(out_path)
    return {(r.method, r.dgp, r.mechanism, float(r.rate), int(r.n), int(r.replicate))
            for r in df.itertuples()}


def run_experiment(plan: ExperimentPlan, out_path: str | Path,
                   progress: bool = False) -> list[BenchmarkRecord]:
    """Execute the plan, appending one CSV row per replicate.

    Rows already present in ``out_path`` are skipped, so an interrupted run
    resumes where it left off. Replicate failures become rows with a non-ok
    status and the run continues.
    """
    out_path = Path(out_path)
    done = _existing_keys(out_path)
    new_file = not out_path.exists()
    records: list[BenchmarkRecord] = []
    runner = _run_graph_cell if plan.kind == "graph" else _run_ci_cell

    with open(out_path, "a", newline="") as fh:
        if new_file:
            fh.write(",".join(CSV_COLUMNS) + "\n")
            fh.flush()
        for mi, method in enumerate(plan.methods):
            for di, dgp in enumerate(plan.dgps):
                for hi, mech in enumerate(plan.mechanisms):
                    for ri, rate in enumerate(plan.rates):
                        for ni, n in enumerate(plan.sizes):
                            for rep in range(plan.replicates):
                                key = (method, dgp, mech, float(rate), int(n), rep)
                                if key in done:
                                    continue
                                seed_state = int(np.random.SeedSequence(
                                    (plan.seed, mi, di, hi, ri, ni, rep)
                                ).generate_state(1)[0])
                                try:
                                    rec = runner(plan, method, dgp, mech,
                                                 rate, n, rep, seed_state)
                                except PaircdError as exc:
                                    rec = BenchmarkRecord(
                                        method, dgp, mech, rate, n, 0, rep,
                                        status=f"failed: {type(exc).__name__}")
                                records.append(rec)
                                row = rec.row()
                                fh.write(",".join(
                                    "" if row[c] is None else str(row[c])
                                    for c in CSV_COLUMNS) + "\n")
                                fh.flush()
                                if progress:
                                    print(f"[{len(records)}] {key} -> {rec.status}",
                                          flush=True)
    return records


def summarize_results(csv_path: str | Path) -> pd.DataFrame:
    """Per-(method, condition) medians and interquartile ranges."""
    df = pd.read_csv(csv_path)
    ok = df[df["status"] == "ok"]
    if ok.empty:
        return pd.DataFrame()
    group_cols = ["method", "dgp", "mechanism", "rate", "n"]
    if ok["shd_total"].notna().any():
        value_cols = ["shd_total", "shd_skeleton", "precision", "recall", "f1"]
        grouped = ok.groupby(group_cols)[value_cols]
        med = grouped.median().add_suffix("_median")
        iqr = (grouped.quantile(0.75) - grouped.quantile(0.25)).add_suffix("_iqr")
        out = med.join(iqr).reset_index()
    else:
        out = ok.groupby(group_cols).agg(
            rejection_rate=("reject", "mean"),
            replicates=("reject", "size")).reset_index()
    return out.sort_values(group_cols).reset_index(drop=True)
