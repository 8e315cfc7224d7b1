"""Imputers: chained-equation Bayesian ridge (default), plus the degraded
column-mean and marginal-draw imputers, and the upfront cache used by the
graph search.

The chained-equation imputer initialises missing cells with column means,
then sweeps incomplete columns in ascending index order, regressing each on
all other included columns and redrawing its missing cells from the ridge
posterior predictive (coefficients drawn from their posterior, plus a noise
draw). That makes the imputation *proper*: the spread across the M chains
reflects parameter uncertainty, not just residual noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data_model import ImputedStack, ImputerId, IncompleteDataset
from .errors import DegenerateDesignError, ImputationError, ValidationError

_NOISE_FLOOR = 1e-12


@dataclass(frozen=True)
class MiceConfig:
    m_imputations: int = 5
    max_iterations: int = 10
    ridge_prior_strength: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.m_imputations < 1:
            raise ValidationError("m_imputations must be >= 1")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be >= 1")
        if self.ridge_prior_strength <= 0:
            raise ValidationError("ridge_prior_strength must be positive")


@dataclass(frozen=True)
class BayesianRidgeFit:
    """Conjugate ridge posterior: N(mean, covariance) over coefficients of
    centred predictors, with a maximum-likelihood plug-in noise variance."""

    coefficient_mean: np.ndarray
    coefficient_covariance: np.ndarray
    noise_variance: float
    predictor_means: np.ndarray
    target_mean: float

    def sample_predictions(self, features: np.ndarray,
                           rng: np.random.Generator) -> np.ndarray:
        """One posterior-predictive draw per row of ``features``."""
        q = self.coefficient_mean.size
        if q == 0:
            mean = np.full(features.shape[0], self.target_mean)
        else:
            chol = np.linalg.cholesky(
                self.coefficient_covariance + 1e-12 * np.eye(q))
            beta = self.coefficient_mean + chol @ rng.standard_normal(q)
            mean = (features - self.predictor_means) @ beta + self.target_mean
        noise = rng.standard_normal(features.shape[0]) * np.sqrt(self.noise_variance)
        return mean + noise


def bayesian_ridge(features: np.ndarray, target: np.ndarray,
                   prior_strength: float) -> BayesianRidgeFit:
    """Fit the conjugate ridge posterior on (features, target).

    A zero-variance design (all predictors constant) degenerates to the
    column-mean model with the target's own marginal noise.
    """
    A = np.asarray(features, dtype=float)
    z = np.asarray(target, dtype=float)
    x_mean = A.mean(axis=0)
    z_mean = float(z.mean())
    Ac = A - x_mean
    zc = z - z_mean
    if Ac.size == 0 or float(np.abs(Ac).max(initial=0.0)) < 1e-12:
        noise = max(float(np.mean(zc ** 2)), _NOISE_FLOOR)
        return BayesianRidgeFit(np.zeros(0), np.zeros((0, 0)), noise,
                                np.zeros(A.shape[1]), z_mean)
    q = A.shape[1]
    G = Ac.T @ Ac + prior_strength * np.eye(q)
    G_inv = np.linalg.inv(G)
    beta = G_inv @ (Ac.T @ zc)
    resid = zc - Ac @ beta
    noise = max(float(np.mean(resid ** 2)), _NOISE_FLOOR)
    cov = noise * G_inv
    cov = 0.5 * (cov + cov.T)
    return BayesianRidgeFit(beta, cov, noise, x_mean, z_mean)


def _mean_filled(data: IncompleteDataset) -> np.ndarray:
    filled = data.values.copy()
    for j in range(data.p):
        miss = ~data.mask[:, j]
        if miss.any():
            filled[miss, j] = data.observed_values(j).mean()
    return filled


def mice_impute(data: IncompleteDataset, config: MiceConfig,
                excluded_columns: frozenset[int] | set[int] = frozenset()) -> ImputedStack:
    """Chained-equation imputation with Bayesian ridge posterior draws.

    ``excluded_columns`` are removed from the chained-equation system: they
    are never used as predictors and are not regression-imputed (any missing
    cells they carry are mean-filled so the output stays complete). The
    per-query experiments exclude the two test columns this way; the default
    cached pipeline excludes nothing.
    """
    excluded = frozenset(excluded_columns)
    if any(j < 0 or j >= data.p for j in excluded):
        raise ValidationError("excluded column index out of range")
    included = [j for j in range(data.p) if j not in excluded]
    for j in included:
        if int(data.mask[:, j].sum()) < 2:
            raise ImputationError(
                f"column {data.column_names[j]!r} has fewer than 2 observed values")
    incomplete = [j for j in included if not data.mask[:, j].all()]
    for j in incomplete:
        if len(included) < 2:
            raise DegenerateDesignError(
                f"no predictors left to impute column {data.column_names[j]!r}")

    base = _mean_filled(data)
    chains = np.random.SeedSequence(config.seed).spawn(config.m_imputations)
    datasets = []
    for child in chains:
        rng = np.random.default_rng(child)
        completed = base.copy()
        for _ in range(config.max_iterations if incomplete else 0):
            for j in incomplete:
                predictors = [c for c in included if c != j]
                obs = data.mask[:, j]
                fit = bayesian_ridge(completed[obs][:, predictors],
                                     data.values[obs, j],
                                     config.ridge_prior_strength)
                completed[~obs, j] = fit.sample_predictions(
                    completed[~obs][:, predictors], rng)
        datasets.append(completed)
    return ImputedStack(tuple(datasets), ImputerId.MICE, config.seed,
                        data.mask, data.column_names)


def mean_impute(data: IncompleteDataset, m: int) -> ImputedStack:
    """Deterministic column-mean fill; all m datasets are identical, so the
    between-imputation variance downstream is exactly zero."""
    if m < 1:
        raise ValidationError("m must be >= 1")
    filled = _mean_filled(data)
    return ImputedStack(tuple(filled.copy() for _ in range(m)),
                        ImputerId.MEAN, 0, data.mask, data.column_names)


def marginal_impute(data: IncompleteDataset, m: int, seed: int) -> ImputedStack:
    """Fill each missing cell with a uniform draw (with replacement) from its
    column's observed values, independently per chain."""
    if m < 1:
        raise ValidationError("m must be >= 1")
    chains = np.random.SeedSequence(seed).spawn(m)
    datasets = []
    for child in chains:
        rng = np.random.default_rng(child)
        completed = data.values.copy()
        for j in range(data.p):
            miss = ~data.mask[:, j]
            if miss.any():
                obs = data.observed_values(j)
                completed[miss, j] = obs[rng.integers(0, obs.size, size=int(miss.sum()))]
        datasets.append(completed)
    return ImputedStack(tuple(datasets), ImputerId.MARGINAL, seed,
                        data.mask, data.column_names)


def build_cache(data: IncompleteDataset, config: MiceConfig) -> ImputedStack:
    """One upfront imputation reused by every CI query of a graph search.

    Deliberately includes all variables (test columns too) as predictors:
    their correlation with missing conditioning values is absorbed into the
    completed data, which shrinks the residual imputation bias.
    """
    return mice_impute(data, config, frozenset())
