import numpy as np
import pytest

from paircd.data_model import (ColumnKind, IncompleteDataset, from_array,
                               infer_kinds, load_csv, save_csv)
from paircd.errors import CsvParseError, ValidationError


def write(tmp_path, text, name="d.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_load_csv_single_na_cell(tmp_path):
    path = write(tmp_path, "a,b\n1,2\nNA,4\n5,6\n")
    data = load_csv(path)
    assert data.values.shape == (3, 2)
    assert (~data.mask).sum() == 1
    assert not data.mask[1, 0]


def test_load_csv_custom_markers(tmp_path):
    path = write(tmp_path, "a,b\n1,?\n3,4\n")
    data = load_csv(path, na_markers=("?",))
    assert not data.mask[0, 1]


def test_binary_column_is_discrete(tmp_path):
    rng = np.random.default_rng(0)
    col = rng.integers(0, 2, size=1000)
    text = "a\n" + "\n".join(str(v) for v in col) + "\n"
    data = load_csv(write(tmp_path, text))
    assert data.column_kinds[0] == ColumnKind.DISCRETE


def test_25_distinct_reals_is_continuous(tmp_path):
    vals = [f"{0.1 * i + 0.05:.3f}" for i in range(25)]
    data = load_csv(write(tmp_path, "a\n" + "\n".join(vals) + "\n"))
    assert data.column_kinds[0] == ColumnKind.CONTINUOUS


def test_parse_error_carries_coordinates(tmp_path):
    path = write(tmp_path, "a,b\n1,2\n3,oops\n")
    with pytest.raises(CsvParseError, match="row 3") as err:
        load_csv(path)
    assert "'b'" in str(err.value)


def test_fully_missing_column_rejected(tmp_path):
    with pytest.raises(ValidationError, match="entirely missing"):
        load_csv(write(tmp_path, "a,b\n1,NA\n2,NA\n"))


def test_ragged_row_rejected(tmp_path):
    with pytest.raises(CsvParseError, match="row 3"):
        load_csv(write(tmp_path, "a,b\n1,2\n3\n"))


def test_kind_boundaries():
    # 20 distinct -> discrete (inclusive), 21 -> continuous, constant -> discrete
    v20 = np.arange(20.0)[:, None]
    v21 = np.arange(21.0)[:, None]
    const = np.zeros((50, 1))
    assert infer_kinds(v20, np.ones_like(v20, bool))[0] == ColumnKind.DISCRETE
    assert infer_kinds(v21, np.ones_like(v21, bool))[0] == ColumnKind.CONTINUOUS
    assert infer_kinds(const, np.ones_like(const, bool))[0] == ColumnKind.DISCRETE


def test_kind_inference_row_permutation_invariant():
    rng = np.random.default_rng(3)
    values = np.column_stack([rng.integers(0, 5, 200).astype(float),
                              rng.normal(size=200)])
    mask = rng.random((200, 2)) > 0.2
    mask[0] = True
    base = infer_kinds(values, mask)
    for seed in range(20):
        perm = np.random.default_rng(seed).permutation(200)
        assert infer_kinds(values[perm], mask[perm]) == base


def test_roundtrip_preserves_everything(tmp_path):
    rng = np.random.default_rng(7)
    values = rng.normal(size=(40, 3))
    values[:, 1] = rng.integers(0, 3, size=40)
    mask = rng.random((40, 3)) > 0.25
    mask[0] = True
    data = from_array(np.where(mask, values, np.nan),
                      column_names=("u", "v", "w"))
    out = tmp_path / "round.csv"
    save_csv(data, out)
    back = load_csv(out)
    assert back.column_names == data.column_names
    assert back.column_kinds == data.column_kinds
    assert np.array_equal(back.mask, data.mask)
    assert np.array_equal(back.values[back.mask], data.values[data.mask])


def test_values_are_immutable():
    data = from_array(np.ones((3, 2)))
    with pytest.raises(ValueError):
        data.values[0, 0] = 5.0


def test_masked_cells_ignored():
    values = np.array([[1.0, np.nan], [2.0, 3.0]])
    data = from_array(values)
    assert np.isnan(data.values[0, 1])
    assert np.array_equal(data.observed_values(1), [3.0])
