import numpy as np
import pytest
from scipy import stats

from paircd.baselines import (FisherZResult, complete_cases, fisher_z,
                              fz_rubin, fz_single, majority_edges,
                              testwise_delete, vote_collider_demands)
from paircd.data_model import ImputedStack, ImputerId, from_array
from paircd.errors import InsufficientDataError, ValidationError


def gaussian_triple(n, seed, link=False):
    """z = x + e1, y = x + e2 (conditionally independent given x)."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    z = x + rng.standard_normal(n)
    y = (z if link else x) + rng.standard_normal(n)
    return np.column_stack([z, y, x])


def identical_stack(values, m=5):
    return ImputedStack(tuple(values.copy() for _ in range(m)),
                        ImputerId.MICE, 0, np.ones_like(values, dtype=bool))


# -- fisher_z ------------------------------------------------------------------

def test_independent_normals_near_zero_corr():
    rng = np.random.default_rng(0)
    rows = np.column_stack([rng.standard_normal(10000),
                            rng.standard_normal(10000)])
    res = fisher_z(rows, 0, 1, ())
    assert abs(res.partial_corr) < 0.05
    assert res.p_value > 0.01


def test_identical_columns_fully_dependent():
    z = np.random.default_rng(1).standard_normal(500)
    res = fisher_z(np.column_stack([z, z]), 0, 1, ())
    assert res.partial_corr == pytest.approx(1.0, abs=1e-9)
    assert res.p_value < 1e-12


def test_conditioning_removes_common_cause():
    rows = gaussian_triple(5000, seed=2)
    res = fisher_z(rows, 0, 1, (2,))
    assert abs(res.partial_corr) < 0.05
    marginal = fisher_z(rows, 0, 1, ())
    assert marginal.p_value < 1e-6


def test_singular_design_flagged():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(200)
    rows = np.column_stack([rng.standard_normal(200),
                            rng.standard_normal(200), x, x])
    res = fisher_z(rows, 0, 1, (2, 3))
    assert res.singular
    assert res.p_value == 1.0


def test_insufficient_rows_raise():
    rows = np.random.default_rng(4).standard_normal((5, 4))
    with pytest.raises(InsufficientDataError):
        fisher_z(rows, 0, 1, (2, 3))


def test_null_p_values_uniform():
    # joint Gaussian null, complete data: KS check on the p-value law
    ps = []
    for seed in range(500):
        rows = gaussian_triple(2000, seed=seed)
        ps.append(fisher_z(rows, 0, 1, (2,)).p_value)
    ks = stats.kstest(ps, "uniform").statistic
    assert ks < 0.073  # 1% critical value at 500 draws


# -- deletion helpers -------------------------------------------------------------

def test_testwise_keeps_complete_rows():
    values = np.random.default_rng(5).standard_normal((50, 4))
    data = from_array(values)
    assert testwise_delete(data, 0, 1, (2,)).shape[0] == 50


def test_testwise_drops_exactly_missing_rows():
    values = np.random.default_rng(6).standard_normal((30, 3))
    values[7, 0] = np.nan
    data = from_array(values)
    out = testwise_delete(data, 0, 1, (2,))
    assert out.shape[0] == 29
    # a row missing only outside the test columns survives
    values2 = np.random.default_rng(7).standard_normal((30, 4))
    values2[5, 3] = np.nan
    assert testwise_delete(from_array(values2), 0, 1, (2,)).shape[0] == 30


def test_testwise_mcar_survival_rate():
    rng = np.random.default_rng(8)
    n = 1000
    values = rng.standard_normal((n, 5))
    mask = np.ones((n, 5), dtype=bool)
    mask[:, :3] = rng.random((n, 3)) > 0.3
    mask[0] = True
    data = from_array(np.where(mask, values, np.nan))
    surviving = testwise_delete(data, 0, 1, (2,)).shape[0]
    expect = n * 0.7 ** 3
    assert abs(surviving - expect) < 4 * np.sqrt(n * 0.343 * 0.657)


def test_testwise_insufficient_rows():
    values = np.random.default_rng(9).standard_normal((20, 3))
    values[:18, 0] = np.nan
    values[19, 0] = 0.0
    data = from_array(values)
    with pytest.raises(InsufficientDataError):
        testwise_delete(data, 0, 1, (2,))


def test_complete_cases_listwise():
    values = np.random.default_rng(10).standard_normal((10, 3))
    values[3, 1] = np.nan
    out = complete_cases(from_array(values))
    assert out.shape == (9, 3)


# -- pooled Fisher-Z ----------------------------------------------------------------

def test_fz_rubin_reduces_to_single_on_identical_stacks():
    rows = gaussian_triple(2000, seed=11)
    stack = identical_stack(rows)
    pooled = fz_rubin(stack, 0, 1, (2,))
    single = fisher_z(rows, 0, 1, (2,))
    assert pooled.p_value == pytest.approx(single.p_value, abs=2e-3)
    assert pooled.statistic == pytest.approx(single.z_stat, rel=1e-9)


def test_fz_rubin_requires_multiple_imputations():
    with pytest.raises(ValidationError):
        fz_rubin(identical_stack(gaussian_triple(100, 12), m=1), 0, 1, ())


def test_fz_single_uses_first_dataset():
    rows = gaussian_triple(800, seed=13)
    stack = identical_stack(rows, m=3)
    a = fz_single(stack, 0, 1, (2,))
    b = fisher_z(rows, 0, 1, (2,))
    assert isinstance(a, FisherZResult)
    assert a == b


def test_fz_rubin_strong_signal_power():
    hits = 0
    for seed in range(50):
        rows = gaussian_triple(1000, seed=seed, link=True)
        stack = identical_stack(rows, m=5)
        hits += fz_rubin(stack, 0, 1, (2,)).p_value < 0.05
    assert hits / 50 >= 0.9


# -- vote aggregation ----------------------------------------------------------------

def test_majority_edges_rule():
    runs = [{(0, 1), (1, 2)}, {(0, 1)}, {(0, 1), (1, 2)},
            {(1, 2)}, {(0, 2)}]
    kept = majority_edges(runs)
    assert (0, 1) in kept      # 3 of 5
    assert (1, 2) in kept      # 3 of 5
    assert (0, 2) not in kept  # 1 of 5


def test_majority_single_run_is_identity():
    assert majority_edges([{(0, 1), (2, 3)}]) == {(0, 1), (2, 3)}


def test_vote_collider_majority_and_ties():
    # aggregated skeleton: 0-2, 1-2; pair (0,1) removed everywhere
    agg = {(0, 2), (1, 2)}
    run_edges = [agg, agg, agg]
    # two runs separate (0,1) without node 2, one with it: collider wins
    seps = [{(0, 1): set()}, {(0, 1): set()}, {(0, 1): {2}}]
    demands = vote_collider_demands(agg, run_edges, seps, 3)
    assert demands == {(0, 2), (1, 2)}
    # tie: no v-structure
    seps_tie = [{(0, 1): set()}, {(0, 1): {2}}]
    assert vote_collider_demands(agg, run_edges[:2], seps_tie, 3) == set()
