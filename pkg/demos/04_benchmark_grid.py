#!/usr/bin/env python3
"""Run a small benchmark grid and summarize it.

The plan mirrors the CSV/JSON interface of the command line: it writes one
row per (method x condition x replicate) as it goes, so an interrupted run
resumes for free. Equivalent CLI:

    paircd benchmark --plan plan.json --out results.csv
    paircd summarize --results results.csv

Run:  python3 demos/04_benchmark_grid.py    (~5 minutes)
"""

import tempfile
from pathlib import Path

from paircd.benchmark import ExperimentPlan, run_experiment, summarize_results

plan = ExperimentPlan(
    kind="graph",
    methods=("pairci", "testwise", "fz_vote"),
    dgps=("er10_nonlinear",),
    mechanisms=("mnar",),
    rates=(0.3,),
    sizes=(600,),
    replicates=3,
    n_graphs=3,
    seed=11,
)

out = Path(tempfile.mkdtemp()) / "results.csv"
records = run_experiment(plan, out, progress=True)
print(f"\n{len(records)} rows -> {out}\n")
print(summarize_results(out).to_string(index=False))
