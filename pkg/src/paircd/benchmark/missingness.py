"""Missingness injection under logistic models.

Each target column's missingness probability is a logistic function of a
standardized driver: a randomly chosen fully observed non-target column
(MAR) or the column's own values (MNAR). The intercept is calibrated by
bisection so the expected missing rate matches the request. The "mixed"
mechanism splits targets half MAR, half MNAR; the complete mechanism
removes nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import expit

from ..data_model import IncompleteDataset, infer_kinds
from ..errors import ConfigurationError, ValidationError


class Mechanism(Enum):
    MCAR_COMPLETE = "complete"
    MAR = "mar"
    MNAR = "mnar"
    MIXED = "mixed"


@dataclass(frozen=True)
class MissingnessSpec:
    mechanism: Mechanism
    rate: float
    target_columns: tuple[int, ...]
    steepness: float = 5.0
    seed: int = 0

    def __post_init__(self):
        if self.mechanism != Mechanism.MCAR_COMPLETE:
            if not 0.0 < self.rate < 1.0:
                raise ValidationError("rate must lie in (0, 1)")
            if not self.target_columns:
                raise ValidationError("target_columns must be non-empty")


def calibrate_intercept(driver_std: np.ndarray, steepness: float,
                        rate: float, iters: int = 40, tol: float = 1e-3) -> float:
    """Bisection on the logistic intercept so the mean missingness
    probability matches ``rate`` within ``tol``."""
    lo, hi = -50.0, 50.0
    a = 0.0
    for _ in range(iters):
        a = 0.5 * (lo + hi)
        mean_p = float(expit(a + steepness * driver_std).mean())
        if abs(mean_p - rate) <= tol:
            break
        if mean_p < rate:
            lo = a
        else:
            hi = a
    return a


def _standardize(v: np.ndarray) -> np.ndarray:
    sd = v.std()
    return (v - v.mean()) / (sd if sd > 0 else 1.0)


def inject_missingness(values: np.ndarray, spec: MissingnessSpec,
                       column_names: tuple[str, ...] | None = None) -> IncompleteDataset:
    """Apply the missingness mechanism to a complete matrix."""
    values = np.asarray(values, dtype=float)
    n, p = values.shape
    if column_names is None:
        column_names = tuple(f"X{j}" for j in range(p))
    mask = np.ones((n, p), dtype=bool)
    if spec.mechanism == Mechanism.MCAR_COMPLETE:
        return IncompleteDataset(values, mask, column_names,
                                 infer_kinds(values, mask))

    targets = tuple(sorted(set(spec.target_columns)))
    for j in targets:
        if not 0 <= j < p:
            raise ValidationError(f"target column {j} out of range")
    rng = np.random.default_rng(spec.seed)

    if spec.mechanism == Mechanism.MIXED:
        order = rng.permutation(len(targets))
        half = (len(targets) + 1) // 2
        mar_cols = {targets[i] for i in order[:half]}
    elif spec.mechanism == Mechanism.MAR:
        mar_cols = set(targets)
    else:
        mar_cols = set()

    observed_pool = [j for j in range(p) if j not in targets]
    for j in targets:
        if j in mar_cols:
            if not observed_pool:
                raise ConfigurationError(
                    "no fully observed non-target column to drive MAR missingness")
            driver = values[:, observed_pool[rng.integers(0, len(observed_pool))]]
        else:
            driver = values[:, j]
        d_std = _standardize(driver)
        a = calibrate_intercept(d_std, spec.steepness, spec.rate)
        prob = expit(a + spec.steepness * d_std)
        missing = rng.random(n) < prob
        if missing.all():
            missing[rng.integers(0, n)] = False
        mask[missing, j] = False
    return IncompleteDataset(values, mask, column_names, infer_kinds(values, mask))
