"""Core data containers: incomplete datasets, imputed stacks, column typing.

Missing cells are represented by an explicit boolean mask (True = observed);
the ``values`` entries behind masked-out cells are never meaningful and are
normalised to NaN so that accidental use is loud. A column is *discrete* when
its observed entries take at most ``DISCRETE_LEVEL_CAP`` distinct values;
everything else is continuous.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import CsvParseError, ValidationError

DISCRETE_LEVEL_CAP = 20

DEFAULT_NA_MARKERS = ("NA", "", "nan")


class ColumnKind(Enum):
    DISCRETE = "discrete"
    CONTINUOUS = "continuous"


class ImputerId(Enum):
    MICE = "mice"
    MEAN = "mean"
    MARGINAL = "marginal"


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class IncompleteDataset:
    """An n x p numeric table with a missingness mask.

    Attributes
    ----------
    values : ndarray, shape (n, p)
        Cell values; entries where ``mask`` is False are NaN.
    mask : ndarray of bool, shape (n, p)
        True where the cell was observed.
    column_names : tuple of str
    column_kinds : tuple of ColumnKind
    """

    values: np.ndarray
    mask: np.ndarray
    column_names: tuple[str, ...]
    column_kinds: tuple[ColumnKind, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        mask = np.asarray(self.mask, dtype=bool)
        if values.ndim != 2 or mask.shape != values.shape:
            raise ValidationError("values and mask must be 2-D with identical shapes")
        n, p = values.shape
        if n < 1 or p < 1:
            raise ValidationError("dataset must have at least one row and one column")
        if len(self.column_names) != p or len(self.column_kinds) != p:
            raise ValidationError("column metadata length must equal column count")
        col_obs = mask.sum(axis=0)
        if (col_obs == 0).any():
            j = int(np.argmin(col_obs))
            raise ValidationError(f"column {self.column_names[j]!r} is entirely missing")
        values = values.copy()
        values[~mask] = np.nan
        object.__setattr__(self, "values", _freeze(values))
        object.__setattr__(self, "mask", _freeze(mask.copy()))
        object.__setattr__(self, "column_names", tuple(self.column_names))
        object.__setattr__(self, "column_kinds", tuple(self.column_kinds))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def observed_values(self, j: int) -> np.ndarray:
        return self.values[self.mask[:, j], j]

    def column_index(self, name: str) -> int:
        try:
            return self.column_names.index(name)
        except ValueError:
            raise ValidationError(f"unknown column {name!r}") from None

    def is_complete(self) -> bool:
        return bool(self.mask.all())


@dataclass(frozen=True)
class ImputedStack:
    """M completed copies of one incomplete dataset.

    Every matrix agrees with the source data on observed cells; only cells
    that were missing (per ``source_mask``) differ across imputations.
    """

    datasets: tuple[np.ndarray, ...]
    imputer_id: ImputerId
    seed: int
    source_mask: np.ndarray
    column_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if len(self.datasets) < 1:
            raise ValidationError("an imputed stack needs at least one dataset")
        mask = np.asarray(self.source_mask, dtype=bool)
        first = np.asarray(self.datasets[0], dtype=float)
        if first.shape != mask.shape:
            raise ValidationError("dataset shape must match the source mask")
        frozen = []
        for d in self.datasets:
            d = np.asarray(d, dtype=float)
            if d.shape != first.shape:
                raise ValidationError("all imputations must share one shape")
            if not np.isfinite(d).all():
                raise ValidationError("imputed datasets must be fully finite")
            if not np.array_equal(d[mask], first[mask]):
                raise ValidationError("imputations disagree on an observed cell")
            frozen.append(_freeze(d.copy()))
        object.__setattr__(self, "datasets", tuple(frozen))
        object.__setattr__(self, "source_mask", _freeze(mask.copy()))
        object.__setattr__(self, "column_names", tuple(self.column_names))

    @property
    def m(self) -> int:
        return len(self.datasets)

    @property
    def n(self) -> int:
        return self.datasets[0].shape[0]

    @property
    def p(self) -> int:
        return self.datasets[0].shape[1]

    def observed_column(self, j: int) -> np.ndarray:
        """Values of column j restricted to originally observed cells."""
        return self.datasets[0][self.source_mask[:, j], j]


def infer_kinds(values: np.ndarray, mask: np.ndarray) -> tuple[ColumnKind, ...]:
    """Classify each column from its observed entries.

    At most ``DISCRETE_LEVEL_CAP`` distinct observed values (inclusive)
    means discrete; the rule is deterministic and row-order invariant.
    """
    values = np.asarray(values, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    kinds = []
    for j in range(values.shape[1]):
        obs = values[mask[:, j], j]
        if obs.size == 0:
            raise ValidationError(f"column {j} has no observed values")
        n_distinct = np.unique(obs).size
        kinds.append(ColumnKind.DISCRETE if n_distinct <= DISCRETE_LEVEL_CAP
                     else ColumnKind.CONTINUOUS)
    return tuple(kinds)


def from_array(values: np.ndarray, mask: np.ndarray | None = None,
               column_names: tuple[str, ...] | None = None) -> IncompleteDataset:
    """Build a dataset from an array, inferring kinds; NaN cells count as missing."""
    values = np.asarray(values, dtype=float)
    if mask is None:
        mask = ~np.isnan(values)
    if column_names is None:
        column_names = tuple(f"X{j}" for j in range(values.shape[1]))
    kinds = infer_kinds(values, mask)
    return IncompleteDataset(values, np.asarray(mask, dtype=bool), tuple(column_names), kinds)


def load_csv(path: str | Path, na_markers: tuple[str, ...] = DEFAULT_NA_MARKERS) -> IncompleteDataset:
    """Read a rectangular numeric CSV with a header row.

    Cells matching any marker in ``na_markers`` become missing. Non-numeric
    cells that are not NA markers raise :class:`CsvParseError` with row and
    column coordinates (1-based, counting the header as row 1).
    """
    path = Path(path)
    na_set = set(na_markers)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvParseError(f"{path}: empty file") from None
        names = tuple(h.strip() for h in header)
        p = len(names)
        rows: list[list[float]] = []
        mask_rows: list[list[bool]] = []
        for r, rec in enumerate(reader, start=2):
            if len(rec) != p:
                raise CsvParseError(f"{path}: row {r} has {len(rec)} cells, expected {p}")
            vals, obs = [], []
            for c, cell in enumerate(rec):
                cell = cell.strip()
                if cell in na_set:
                    vals.append(np.nan)
                    obs.append(False)
                    continue
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise CsvParseError(
                        f"{path}: row {r}, column {names[c]!r}: "
                        f"cannot parse {cell!r} as a number") from None
                obs.append(True)
            rows.append(vals)
            mask_rows.append(obs)
    if not rows:
        raise CsvParseError(f"{path}: no data rows")
    values = np.array(rows, dtype=float)
    mask = np.array(mask_rows, dtype=bool)
    for j in range(p):
        if not mask[:, j].any():
            raise ValidationError(f"column {names[j]!r} is entirely missing")
    kinds = infer_kinds(values, mask)
    return IncompleteDataset(values, mask, names, kinds)


def save_csv(data: IncompleteDataset, path: str | Path, na_marker: str = "NA") -> None:
    """Write a dataset back to CSV; missing cells become ``na_marker``."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(data.column_names)
        for i in range(data.n):
            row = [repr(float(v)) if m else na_marker
                   for v, m in zip(data.values[i], data.mask[i])]
            writer.writerow(row)
