import json

import numpy as np
import pytest

from paircd.benchmark.dgp import StandaloneDGPSpec, StandaloneFamily, gen_standalone
from paircd.benchmark.missingness import Mechanism, MissingnessSpec, inject_missingness
from paircd.cli import main
from paircd.data_model import from_array, save_csv
from paircd.graphs import load_graph


@pytest.fixture
def small_csv(tmp_path):
    data = gen_standalone(StandaloneDGPSpec(
        StandaloneFamily.LINEAR_GAUSSIAN, 0.0, 240, 3, seed=0))
    injected = inject_missingness(
        data.values, MissingnessSpec(Mechanism.MAR, 0.2, (2,), seed=1),
        data.names)
    path = tmp_path / "data.csv"
    save_csv(injected, path)
    return path


def test_missing_required_flags_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["ci-test"])
    assert exc.value.code == 1
    err = capsys.readouterr().err
    assert "--data" in err or "required" in err


def test_unknown_flag_exit_1():
    with pytest.raises(SystemExit) as exc:
        main(["discover", "--data", "x.csv", "--frobnicate"])
    assert exc.value.code == 1


def test_bad_alpha_exit_1(small_csv):
    with pytest.raises(SystemExit) as exc:
        main(["ci-test", "--data", str(small_csv), "--z", "Z", "--y", "Y",
              "--alpha", "1.5"])
    assert exc.value.code == 1


def test_missing_file_exit_2(capsys):
    rc = main(["ci-test", "--data", "/nonexistent.csv", "--z", "a", "--y", "b"])
    assert rc == 2
    assert "paircd:" in capsys.readouterr().err


def test_ci_test_json_output(small_csv, tmp_path, capsys):
    out = tmp_path / "res.json"
    rc = main(["ci-test", "--data", str(small_csv), "--z", "Z", "--y", "Y",
               "--cond", "X1,X2,X3", "--seed", "3", "--out", str(out)])
    assert rc == 0
    obj = json.loads(capsys.readouterr().out)
    assert set(obj) >= {"p_value", "statistic", "df", "reject", "m_used"}
    assert 0 <= obj["p_value"] <= 1
    assert json.loads(out.read_text()) == obj


def test_ci_test_deterministic_across_invocations(small_csv, capsys):
    args = ["ci-test", "--data", str(small_csv), "--z", "Z", "--y", "Y",
            "--cond", "X1,X2", "--seed", "11"]
    main(args)
    first = capsys.readouterr().out
    main(args)
    second = capsys.readouterr().out
    assert first == second


def test_seed_env_fallback(small_csv, capsys, monkeypatch):
    args = ["ci-test", "--data", str(small_csv), "--z", "Z", "--y", "Y"]
    monkeypatch.setenv("PAIRCD_SEED", "21")
    main(args)
    with_env = capsys.readouterr().out
    monkeypatch.delenv("PAIRCD_SEED")
    main(args + ["--seed", "21"])
    explicit = capsys.readouterr().out
    assert with_env == explicit


def test_discover_writes_graph_json(tmp_path, capsys):
    rng = np.random.default_rng(4)
    a = rng.standard_normal(1200)
    b = a + 0.4 * rng.standard_normal(1200)
    c = b + 0.4 * rng.standard_normal(1200)
    data = from_array(np.column_stack([a, b, c]), column_names=("a", "b", "c"))
    path = tmp_path / "chain.csv"
    save_csv(data, path)
    out = tmp_path / "graph.json"
    rc = main(["discover", "--data", str(path), "--method", "testwise",
               "--out", str(out), "--seed", "5"])
    assert rc == 0
    graph = load_graph(out)
    assert graph.p == 3
    assert graph.skeleton_edges() == {(0, 1), (1, 2)}


def test_benchmark_and_summarize(tmp_path, capsys):
    plan = {
        "kind": "ci", "methods": ["fz_rubin"], "dgps": ["linear_gaussian"],
        "mechanisms": ["mnar"], "rates": [0.3], "sizes": [300],
        "replicates": 2, "d": 3, "seed": 0,
    }
    plan_path = tmp_path / "plan.json"
    plan_path.write_text(json.dumps(plan))
    out = tmp_path / "results.csv"
    rc = main(["benchmark", "--plan", str(plan_path), "--out", str(out)])
    assert rc == 0
    assert "2 new rows" in capsys.readouterr().out
    rc = main(["summarize", "--results", str(out),
               "--out", str(tmp_path / "summary.json")])
    assert rc == 0
    shown = capsys.readouterr().out
    assert "rejection_rate" in shown
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary[0]["replicates"] == 2


def test_summarize_empty_warns(tmp_path, capsys):
    out = tmp_path / "empty.csv"
    from paircd.benchmark.runner import CSV_COLUMNS
    out.write_text(",".join(CSV_COLUMNS) + "\n")
    rc = main(["summarize", "--results", str(out)])
    assert rc == 0
    assert "warning" in capsys.readouterr().err
