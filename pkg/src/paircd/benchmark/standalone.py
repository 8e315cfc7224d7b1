"""Replication cells for the standalone CI-test experiments.

A cell fixes (family, signal, n, d, mechanism, method) and runs seeded
replicates; each replicate generates fresh data, injects missingness into
the conditioning columns, imputes, and runs one test. These cells are the
building blocks of the calibration, power, variance-comparison and
degraded-imputation studies.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from ..ci_test import CITestConfig, fast_config, pair_ci
from ..data_model import ImputedStack, IncompleteDataset
from ..imputation import MiceConfig, build_cache, mean_impute, marginal_impute
from ..baselines import fz_rubin, fz_single
from ..errors import ConfigurationError
from .dgp import StandaloneDGPSpec, StandaloneFamily, gen_standalone
from .missingness import Mechanism, MissingnessSpec, inject_missingness

CI_METHODS = ("pairci", "fz_single", "fz_rubin")
IMPUTERS = ("mice", "mean", "marginal")


@dataclass(frozen=True)
class StandaloneCell:
    family: StandaloneFamily
    mechanism: Mechanism
    signal: float = 0.0
    n: int = 500
    d: int = 5
    rate: float = 0.3
    method: str = "pairci"
    imputer: str = "mice"
    m_imputations: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.method not in CI_METHODS:
            raise ConfigurationError(f"unknown method {self.method!r}")
        if self.imputer not in IMPUTERS:
            raise ConfigurationError(f"unknown imputer {self.imputer!r}")


N_INCOMPLETE = 3


def make_incomplete(cell: StandaloneCell, seed: int) -> tuple[np.ndarray, IncompleteDataset]:
    """One replicate's complete matrix and its injected version.

    Missingness goes into (up to) three randomly chosen conditioning
    columns, mirroring the graph experiments' share of incomplete
    variables; the remaining columns stay fully observed and can drive the
    MAR mechanism.
    """
    spec = StandaloneDGPSpec(cell.family, cell.signal, cell.n, cell.d, seed)
    data = gen_standalone(spec)
    rng = np.random.default_rng(seed + 1)
    n_targets = min(N_INCOMPLETE, cell.d)
    targets = tuple(int(c) for c in
                    rng.choice(data.x_cols, size=n_targets, replace=False))
    mspec = MissingnessSpec(cell.mechanism, cell.rate,
                            target_columns=targets, seed=seed + 1)
    return data.values, inject_missingness(data.values, mspec, data.names)


def impute_cell(cell: StandaloneCell, incomplete: IncompleteDataset,
                seed: int) -> ImputedStack:
    m = 1 if cell.method == "fz_single" else cell.m_imputations
    if cell.imputer == "mice":
        return build_cache(incomplete, MiceConfig(m_imputations=m, seed=seed))
    if cell.imputer == "mean":
        return mean_impute(incomplete, m)
    return marginal_impute(incomplete, m, seed)


def run_replicate(cell: StandaloneCell, seed: int,
                  ci_config: CITestConfig | None = None):
    """One replicate; returns the raw test result object."""
    _, incomplete = make_incomplete(cell, seed)
    stack = impute_cell(cell, incomplete, seed + 2)
    cond = tuple(range(2, incomplete.p))
    if cell.method == "pairci":
        cfg = ci_config if ci_config is not None else fast_config()
        cfg = dataclasses.replace(cfg, seed=seed + 3)
        return pair_ci(stack, 0, 1, cond, cfg)
    if cell.method == "fz_single":
        return fz_single(stack, 0, 1, cond)
    return fz_rubin(stack, 0, 1, cond)


def rejection_rate(cell: StandaloneCell, n_replicates: int,
                   alpha: float = 0.05,
                   ci_config: CITestConfig | None = None) -> float:
    """Fraction of replicates rejecting the tested hypothesis."""
    return float(np.mean(run_flags(cell, n_replicates, alpha, ci_config)))


def run_flags(cell: StandaloneCell, n_replicates: int, alpha: float = 0.05,
              ci_config: CITestConfig | None = None) -> np.ndarray:
    """Per-replicate reject flags (deterministic in cell.seed)."""
    seeds = np.random.SeedSequence(cell.seed).generate_state(n_replicates)
    flags = np.zeros(n_replicates, dtype=bool)
    for i, s in enumerate(seeds):
        res = run_replicate(cell, int(s), ci_config)
        flags[i] = res.p_value < alpha
    return flags
