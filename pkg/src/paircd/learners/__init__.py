"""Tree-ensemble learners used by the paired CI test.

Two variants are exposed: the *general* variant (bootstrapped random forest
with exhaustive split search) and the *fast* variant (extra-trees: no
bootstrap, one random threshold per candidate feature). Both honor the same
leaf-size and feature-budget rules, and both can flag one column as the
*candidate* so that it is forced into every split's random feature subset.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..data_model import ColumnKind
from ..errors import ContractError, ValidationError
from ._tree_kernels import (_fit_forest_random, _fit_forest_sorted,
                            _predict_forest)

# Observation cap per CI test (applied by the ci_test module).
MAX_SUBSAMPLE = 2000

# Classification probabilities are clipped into [PROB_CLIP, 1 - PROB_CLIP]
# before taking logs, which bounds every per-observation loss by -ln(PROB_CLIP).
PROB_CLIP = 1e-7

_FIXED_BUDGET = 12
_FIXED_LOWER = 12
_FIXED_UPPER = 80


class Variant(Enum):
    GENERAL = "general"
    FAST = "fast"


class Task(Enum):
    REGRESSION = "regression"
    CLASSIFICATION = "classification"


def derive_max_features(n_features: int) -> tuple[str, int]:
    """Split-candidate budget rule: ('all'|'fixed'|'sqrt', budget).

    All features below 12; a fixed budget of 12 between 12 and 80 inclusive;
    floor(sqrt(p)) (at least 1) above 80.
    """
    if n_features < _FIXED_LOWER:
        return "all", n_features
    if n_features <= _FIXED_UPPER:
        return "fixed", _FIXED_BUDGET
    return "sqrt", max(1, int(np.sqrt(n_features)))


@dataclass(frozen=True)
class LearnerConfig:
    variant: Variant = Variant.GENERAL
    n_trees: int = 100
    min_samples_leaf: int = 5
    seed: int = 0
    max_features: int | None = None  # explicit budget; None derives from p

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValidationError("n_trees must be >= 1")
        if self.min_samples_leaf < 1:
            raise ValidationError("min_samples_leaf must be >= 1")


@dataclass(frozen=True)
class FittedModel:
    """An immutable fitted ensemble; use :func:`predict` to evaluate it."""

    task: Task
    feature_count: int
    class_values: np.ndarray | None
    _rec: np.ndarray
    _values: np.ndarray
    _offsets: np.ndarray

    @property
    def n_trees(self) -> int:
        return self._offsets.size - 1

    def split_features(self) -> np.ndarray:
        """Features used by every internal split, across all trees."""
        f = self._rec[:, 0].astype(np.int64)
        return f[f >= 0]


def fit(features: np.ndarray, target: np.ndarray, kind: ColumnKind,
        config: LearnerConfig, candidate_col: int | None = None) -> FittedModel:
    """Fit an ensemble of ``config.n_trees`` trees of ``target`` on ``features``.

    ``candidate_col`` names the column that must appear in every split's
    feature subset (the paired test's candidate variable).
    """
    X = np.ascontiguousarray(features, dtype=np.float64)
    y = np.asarray(target, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValidationError("features must be 2-D and aligned with target")
    n, d = X.shape
    if n == 0 or d == 0:
        raise ValidationError("empty training set")
    if candidate_col is not None and not 0 <= candidate_col < d:
        raise ValidationError(f"candidate column {candidate_col} out of range")

    classification = kind == ColumnKind.DISCRETE
    if classification:
        class_values = np.unique(y)
        y_cls = np.searchsorted(class_values, y).astype(np.int64)
        n_classes = class_values.size
        y_reg = np.zeros(1, dtype=np.float64)
    else:
        class_values = None
        y_cls = np.zeros(1, dtype=np.int64)
        n_classes = 1
        y_reg = y

    if config.max_features is not None:
        budget = config.max_features
    else:
        _, budget = derive_max_features(d)
    fast = config.variant == Variant.FAST

    rng = np.random.default_rng(config.seed)
    seeds = rng.integers(0, 2**32 - 1, size=config.n_trees, dtype=np.int64)
    cand = -1 if candidate_col is None else candidate_col

    XT = X.T.copy()
    if fast:
        rec, values, offsets = _fit_forest_random(
            X, XT, y_reg, y_cls, n_classes, classification,
            config.n_trees, config.min_samples_leaf, budget, cand, seeds)
    else:
        global_order = np.empty((d, n), dtype=np.int64)
        for f in range(d):
            global_order[f] = np.argsort(X[:, f], kind="mergesort")
        rec, values, offsets = _fit_forest_sorted(
            X, XT, global_order, y_reg, y_cls, n_classes, classification,
            config.n_trees, config.min_samples_leaf, budget, cand, seeds)

    return FittedModel(
        task=Task.CLASSIFICATION if classification else Task.REGRESSION,
        feature_count=d, class_values=class_values,
        _rec=rec, _values=values, _offsets=offsets)


def predict(model: FittedModel, features: np.ndarray) -> np.ndarray:
    """Ensemble prediction: a vector for regression, an n x C probability
    matrix (rows sum to 1, pre-clipping) for classification."""
    X = np.ascontiguousarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.feature_count:
        raise ContractError(
            f"feature dimension mismatch: model expects {model.feature_count}, "
            f"got {X.shape[1] if X.ndim == 2 else X.ndim}")
    out = _predict_forest(X, model._rec, model._values, model._offsets)
    if model.task == Task.REGRESSION:
        return out[:, 0]
    return out


def loss(kind: ColumnKind, truth: np.ndarray, prediction: np.ndarray,
         class_values: np.ndarray | None = None) -> np.ndarray:
    """Per-observation loss: squared error (continuous) or cross-entropy
    on clipped probabilities (discrete).

    ``class_values`` maps probability columns to class labels; the default
    is classes 0..C-1. Truth values with no matching class receive zero
    probability mass and hence the clipped maximum loss -ln(PROB_CLIP).
    """
    truth = np.asarray(truth, dtype=float)
    if kind == ColumnKind.CONTINUOUS:
        prediction = np.asarray(prediction, dtype=float)
        if prediction.shape != truth.shape:
            raise ContractError("truth and prediction lengths differ")
        return (truth - prediction) ** 2

    proba = np.asarray(prediction, dtype=float)
    if proba.ndim != 2 or proba.shape[0] != truth.shape[0]:
        raise ContractError("probability matrix must align with truth")
    sums = proba.sum(axis=1)
    if np.abs(sums - 1.0).max() > 1e-6:
        raise ContractError("probability rows do not sum to 1")
    n, c = proba.shape
    if class_values is None:
        class_values = np.arange(c, dtype=float)
    class_values = np.asarray(class_values, dtype=float)
    pos = np.searchsorted(class_values, truth)
    pos = np.clip(pos, 0, c - 1)
    matched = np.isclose(class_values[pos], truth, rtol=0.0, atol=1e-9)
    # a value just below its class lands one slot early
    pos_lo = np.clip(pos - 1, 0, c - 1)
    matched_lo = np.isclose(class_values[pos_lo], truth, rtol=0.0, atol=1e-9)
    pos = np.where(matched, pos, np.where(matched_lo, pos_lo, pos))
    p_true = np.where(matched | matched_lo, proba[np.arange(n), pos], 0.0)
    p_true = np.clip(p_true, PROB_CLIP, 1.0 - PROB_CLIP)
    return -np.log(p_true)


def max_loss_bound() -> float:
    """Upper bound B on any classification loss, from probability clipping."""
    return -np.log(PROB_CLIP)
