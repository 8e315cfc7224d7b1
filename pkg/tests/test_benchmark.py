import itertools

import numpy as np
import pytest

from paircd.benchmark.dgp import (EDGE_FUNCTIONS, EdgeKind, StandaloneDGPSpec,
                                  StandaloneFamily, erdos_renyi_dag, gen_graph_data,
                                  gen_hub, gen_standalone, sample_graph_dgp)
from paircd.benchmark.kappa import KappaDiagnostics, kappa_estimate, kappa_from_stack
from paircd.benchmark.metrics import GraphMetrics, graph_metrics
from paircd.benchmark.missingness import (Mechanism, MissingnessSpec,
                                          inject_missingness)
from paircd.benchmark.topology import bundled_topology, load_topology
from paircd.data_model import from_array
from paircd.discovery import dag_to_cpdag
from paircd.errors import ValidationError
from paircd.graphs import MixedGraph
from paircd.imputation import MiceConfig, build_cache


def residual_corr(values, z_col, y_col, x_cols):
    """Correlation of linear-regression residuals: the large-n null oracle."""
    x = np.column_stack([np.ones(values.shape[0]), values[:, x_cols]])
    rz = values[:, z_col] - x @ np.linalg.lstsq(x, values[:, z_col], rcond=None)[0]
    ry = values[:, y_col] - x @ np.linalg.lstsq(x, values[:, y_col], rcond=None)[0]
    return float(np.corrcoef(rz, ry)[0, 1])


# -- standalone DGPs ----------------------------------------------------------

@pytest.mark.parametrize("family", list(StandaloneFamily))
def test_null_families_are_conditionally_independent(family):
    d = 3 if family == StandaloneFamily.LATENT_CONFOUNDER else 4
    spec = StandaloneDGPSpec(family, 0.0, 100_000, d, seed=1)
    data = gen_standalone(spec)
    assert abs(residual_corr(data.values, 0, 1, list(data.x_cols))) < 0.05


def test_latent_confounder_dependence_at_signal():
    spec = StandaloneDGPSpec(StandaloneFamily.LATENT_CONFOUNDER, 1.0, 50_000, 3, 2)
    data = gen_standalone(spec)
    assert abs(residual_corr(data.values, 0, 1, list(data.x_cols))) > 0.1


def test_standalone_determinism():
    spec = StandaloneDGPSpec(StandaloneFamily.LINEAR_GAUSSIAN, 0.3, 500, 5, 7)
    a = gen_standalone(spec)
    b = gen_standalone(spec)
    assert np.array_equal(a.values, b.values)


def test_latent_confounder_needs_three_columns():
    with pytest.raises(ValidationError):
        StandaloneDGPSpec(StandaloneFamily.LATENT_CONFOUNDER, 0.0, 100, 2, 0)


# -- graph DGPs ------------------------------------------------------------------

def test_single_nonlinear_edge_mechanism():
    from paircd.benchmark.dgp import GraphDGPSpec
    graph = MixedGraph(2, {(0, 1)}, set())
    spec = GraphDGPSpec(graph, EdgeKind.NONLINEAR, {(0, 1): 1.0},
                        {(0, 1): "f2"}, 0.6, 5000, 3)
    values = gen_graph_data(spec)
    w = spec.edge_weights[(0, 1)]
    feat = w * np.sin(2 * values[:, 0])
    a = np.column_stack([np.ones(5000), feat])
    coef = np.linalg.lstsq(a, values[:, 1], rcond=None)[0]
    resid = values[:, 1] - a @ coef
    r2 = 1 - resid.var() / values[:, 1].var()
    assert r2 >= 0.5


def test_root_nodes_are_pure_noise():
    graph = MixedGraph(3, {(0, 1)}, set())
    spec = sample_graph_dgp(graph, EdgeKind.LINEAR, 20_000, seed=4, noise_scale=2.0)
    values = gen_graph_data(spec)
    for root in (0, 2):
        assert abs(values[:, root].mean()) < 0.1
        assert abs(values[:, root].std() - 2.0) < 0.1


def test_empty_graph_gives_independent_columns():
    graph = MixedGraph(4, set(), set())
    spec = sample_graph_dgp(graph, EdgeKind.LINEAR, 5000, seed=5)
    values = gen_graph_data(spec)
    corr = np.corrcoef(values.T)
    assert np.abs(corr - np.eye(4)).max() < 0.06


def test_edge_function_tags():
    assert set(EDGE_FUNCTIONS) == {"f1", "f2", "f3", "f4"}
    x = np.array([-1.0, 0.5])
    assert np.allclose(EDGE_FUNCTIONS["f1"](x, 2.0), 2.0 * x ** 2)
    assert np.allclose(EDGE_FUNCTIONS["f2"](x, 2.0), 2.0 * np.sin(2 * x))
    assert np.allclose(EDGE_FUNCTIONS["f3"](x, 2.0), 2.0 * np.abs(x))
    assert np.allclose(EDGE_FUNCTIONS["f4"](x, 2.0), 2.0 * np.tanh(1.5 * x))


def test_erdos_renyi_extremes_and_count():
    assert erdos_renyi_dag(5, 0.0, 0).n_edges() == 0
    full = erdos_renyi_dag(5, 1.0, 1)
    assert full.n_edges() == 10
    assert full.directed_is_acyclic()
    counts = [erdos_renyi_dag(10, 0.25, seed).n_edges() for seed in range(500)]
    expect = 45 * 0.25
    se = np.sqrt(45 * 0.25 * 0.75 / 500)
    assert abs(np.mean(counts) - expect) < 3 * se


def test_hub_layouts():
    lin = gen_hub("linear", 1000, 0)
    non = gen_hub("nonlinear", 1000, 0)
    assert lin.values.shape == (1000, 13)
    hub = lin.values[:, 2]
    assert np.corrcoef(lin.values[:, 0], hub)[0, 1] > 0.5
    assert np.corrcoef(non.values[:, 0], hub ** 2)[0, 1] > 0.5


# -- missingness --------------------------------------------------------------------

def test_mcar_complete_removes_nothing():
    values = np.random.default_rng(6).normal(size=(200, 3))
    data = inject_missingness(values, MissingnessSpec(Mechanism.MCAR_COMPLETE,
                                                      0.3, ()))
    assert data.mask.all()


def test_rate_calibration():
    rng = np.random.default_rng(7)
    values = rng.normal(size=(10_000, 4))
    for mech in (Mechanism.MAR, Mechanism.MNAR):
        spec = MissingnessSpec(mech, 0.3, (1, 2), seed=8)
        data = inject_missingness(values, spec)
        for j in (1, 2):
            rate = 1.0 - data.mask[:, j].mean()
            assert 0.29 - 0.015 <= rate <= 0.31 + 0.015, (mech, rate)


def test_mnar_removes_large_values():
    rng = np.random.default_rng(9)
    values = rng.normal(size=(5000, 2))
    data = inject_missingness(values, MissingnessSpec(Mechanism.MNAR, 0.3, (0,),
                                                      seed=10))
    missing = ~data.mask[:, 0]
    assert values[missing, 0].mean() > values[~missing, 0].mean()


def test_mar_driver_is_observed_column():
    rng = np.random.default_rng(11)
    values = rng.normal(size=(5000, 3))
    data = inject_missingness(values, MissingnessSpec(Mechanism.MAR, 0.3, (0,),
                                                      seed=12))
    missing = ~data.mask[:, 0]
    # missingness must depend on at least one fully observed column
    shifts = [abs(values[missing, j].mean() - values[~missing, j].mean())
              for j in (1, 2)]
    assert max(shifts) > 0.3
    assert abs(values[missing, 0].mean() - values[~missing, 0].mean()) < 0.15


def test_mixed_splits_targets():
    rng = np.random.default_rng(13)
    values = rng.normal(size=(8000, 6))
    spec = MissingnessSpec(Mechanism.MIXED, 0.3, (0, 1, 2, 3), seed=14)
    data = inject_missingness(values, spec)
    self_shift = []
    for j in range(4):
        missing = ~data.mask[:, j]
        self_shift.append(abs(values[missing, j].mean()
                              - values[~missing, j].mean()))
    # half the targets are driven by their own value (clearly shifted)
    assert sum(s > 0.5 for s in self_shift) == 2


# -- metrics -------------------------------------------------------------------------

from oracles import enumerate_cpdags, shd_by_cases


def test_metrics_identical_graphs():
    g = dag_to_cpdag(erdos_renyi_dag(6, 0.4, 15))
    m = graph_metrics(g, g)
    assert (m.shd_total, m.shd_skeleton) == (0, 0)
    assert m.f1 == 1.0


def test_metrics_empty_estimate():
    truth = dag_to_cpdag(erdos_renyi_dag(6, 0.5, 16))
    empty = MixedGraph(6, set(), set())
    m = graph_metrics(truth, empty)
    assert m.shd_total == truth.n_edges()
    assert m.recall == 0.0
    assert m.f1 == 0.0


def test_metrics_orientation_cost():
    truth = MixedGraph(2, {(0, 1)}, set())
    est = MixedGraph(2, set(), {(0, 1)})
    m = graph_metrics(truth, est)
    assert m.shd_skeleton == 0
    assert m.shd_total == 1


def test_metrics_match_exhaustive_oracle_on_3_nodes():
    cpdags = enumerate_cpdags(3)
    assert len(cpdags) > 10
    for a in cpdags:
        for b in cpdags:
            m = graph_metrics(a, b)
            total, skeleton = shd_by_cases(a, b)
            assert (m.shd_total, m.shd_skeleton) == (total, skeleton)


def test_skeleton_shd_symmetric():
    rng_graphs = [dag_to_cpdag(erdos_renyi_dag(6, 0.4, s)) for s in range(10)]
    for a, b in itertools.combinations(rng_graphs, 2):
        assert graph_metrics(a, b).shd_skeleton == graph_metrics(b, a).shd_skeleton
        assert graph_metrics(a, b).shd_total >= abs(a.n_edges() - b.n_edges())


# -- topology ----------------------------------------------------------------------

def test_chain_topology_file(tmp_path):
    path = tmp_path / "chain.txt"
    path.write_text("3\n0 1\n1 2\n")
    g = load_topology(path)
    assert g.p == 3
    assert g.directed == {(0, 1), (1, 2)}


def test_self_loop_rejected(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("2\n0 0\n")
    with pytest.raises(ValidationError):
        load_topology(path)


def test_cycle_rejected(tmp_path):
    two = tmp_path / "cyc2.txt"
    two.write_text("2\n0 1\n1 0\n")
    with pytest.raises(ValidationError):
        load_topology(two)
    three = tmp_path / "cyc3.txt"
    three.write_text("3\n0 1\n1 2\n2 0\n")
    with pytest.raises(ValidationError):
        load_topology(three)


def test_bundled_topologies():
    sachs = bundled_topology("sachs")
    assert (sachs.p, len(sachs.directed)) == (11, 17)
    alarm = bundled_topology("alarm")
    assert (alarm.p, len(alarm.directed)) == (37, 46)
    hail = bundled_topology("hailfinder")
    assert (hail.p, len(hail.directed)) == (56, 66)
    for g in (sachs, alarm, hail):
        assert g.directed_is_acyclic()


# -- kappa diagnostics -----------------------------------------------------------------

def test_kappa_zero_on_complete_data():
    values = np.random.default_rng(17).normal(size=(100, 3))
    data = inject_missingness(values, MissingnessSpec(Mechanism.MCAR_COMPLETE,
                                                      0.3, ()))
    stack = build_cache(data, MiceConfig(m_imputations=2, seed=0))
    diag = kappa_from_stack(values, data, stack, 0, 1)
    assert diag.kappa_imp == 0.0
    assert diag.product == 0.0


def test_mean_imputation_leaves_systematic_residual():
    # y = x0 + noise, x0 mean-imputed: delta = x0 - mean correlates with y
    from paircd.imputation import mean_impute
    rng = np.random.default_rng(18)
    x0 = rng.normal(size=4000)
    y = x0 + 0.3 * rng.normal(size=4000)
    z = x0 + 0.3 * rng.normal(size=4000)
    values = np.column_stack([z, y, x0])
    spec = MissingnessSpec(Mechanism.MNAR, 0.3, (2,), seed=19)
    data = inject_missingness(values, spec)
    stack = mean_impute(data, 3)
    diag = kappa_from_stack(values, data, stack, 0, 1)
    assert diag.kappa_y > 0.3
    assert diag.kappa_z > 0.3
    assert diag.product > 0.1


def test_kappa_estimate_harness():
    def replicate(seed):
        rng = np.random.default_rng(seed)
        x0 = rng.normal(size=500)
        values = np.column_stack([x0 + rng.normal(size=500),
                                  x0 + rng.normal(size=500), x0])
        data = inject_missingness(values, MissingnessSpec(Mechanism.MNAR, 0.3,
                                                          (2,), seed=seed))
        stack = build_cache(data, MiceConfig(m_imputations=3, seed=seed))
        return values, data, stack, 0, 1

    diag = kappa_estimate(replicate, n_replicates=5, seed=20)
    assert isinstance(diag, KappaDiagnostics)
    assert diag.kappa_imp > 0
    assert diag.product == diag.kappa_y * diag.kappa_z
