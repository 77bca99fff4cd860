import json

import numpy as np
import pytest
from scipy import stats

from css_sketch import bench
from css_sketch.cli import main
from css_sketch.datagen import SyntheticSpec, generate_matrix
from css_sketch.errors import InvalidConfig, NumericalFailure
from css_sketch.leverage import column_leverage_scores, epsilon_bound, format_scores, ScoreVector
from css_sketch.linalg import format_matrix, thin_svd


def small_config(**kw):
    base = dict(data={"family": "T3", "m": 40, "n": 50, "seed": 2}, output_path="-",
                k=3, ell_grid=[8, 12], trials=4, delta=0.1)
    base.update(kw)
    return bench.ExperimentConfig.from_dict(base)


def test_single_row():
    rows = bench.run_css_experiment(small_config(ell_grid=[8], trials=1, schemes=["leverage"]))
    assert len(rows) == 1 and rows[0].scheme == "leverage" and rows[0].trial == 0


def test_rows_sorted_and_complete():
    rows = bench.run_css_experiment(small_config(schemes=["sqrt_leverage", "uniform", "mixed:0.5", "optimized:2"]))
    keys = [(r.scheme, r.ell, r.trial) for r in rows]
    assert len(keys) == len(set(keys)) == 4 * 2 * 4
    assert [k[0] for k in keys[::8]] == ["sqrt_leverage", "uniform", "mixed:0.5", "optimized:2"]


def test_csv_deterministic_and_versioned():
    a = bench.rows_to_csv(bench.run_css_experiment(small_config()))
    b = bench.rows_to_csv(bench.run_css_experiment(small_config()))
    assert a == b
    assert a.splitlines()[0] == "# css-sketch v1"
    assert a.splitlines()[1].split(",") == list(bench.ROW_FIELDS)
    assert "nan" not in a.lower()
    parsed = bench.read_rows(a)
    assert len(parsed) == 3 * 2 * 4 and parsed[0]["wall_time_ms"] == "0"


def test_rows_respect_projection_floor():
    cfg = small_config(trials=10)
    A = cfg.load_matrix()
    svd = thin_svd(A)
    for r in bench.run_css_experiment(cfg):
        assert r.spectral_error >= svd.sigma(r.ell + 1) - 1e-9


def test_row_bounds_match_leverage_module():
    cfg = small_config(schemes=["sqrt_leverage"], ell_grid=[12], trials=1)
    row = bench.run_css_experiment(cfg)[0]
    svd = thin_svd(cfg.load_matrix())
    s_star = column_leverage_scores(svd, 3)
    from css_sketch.sampling import scores_for_scheme
    rep = epsilon_bound(scores_for_scheme(s_star, "sqrt_leverage"), s_star, 3, 12, svd.rank, 0.1)
    assert (row.c, row.q, row.epsilon, row.success_probability) == (rep.c, rep.q, rep.epsilon, rep.success_probability)


def test_gamma_sweep_endpoints_match_schemes():
    cfg = small_config(gamma_grid=[1.0, 1e12], trials=5)
    sweep = bench.run_gamma_sweep(cfg)
    plain = bench.run_css_experiment(small_config(schemes=["leverage", "sqrt_leverage"], trials=5))
    lev = [r for r in sweep if r.scheme == "optimized:1"]
    assert all(abs(r.c - 1.0) <= 1e-9 for r in lev)
    assert [r.spectral_error for r in lev] == [r.spectral_error for r in plain if r.scheme == "leverage"]
    top = [r.spectral_error for r in sweep if r.scheme == "optimized:1e+12"]
    sql = [r.spectral_error for r in plain if r.scheme == "sqrt_leverage"]
    np.testing.assert_allclose(top, sql, rtol=1e-6)


@pytest.mark.parametrize("change, field", [
    ({"ell_grid": [3]}, "ell_grid"),
    ({"trials": 0}, "trials"),
    ({"delta": 1.0}, "delta"),
    ({"schemes": ["dual_set"]}, "schemes"),
    ({"schemes": ["mixed"]}, "schemes"),
    ({"schemes": ["optimized:0.5"]}, "schemes"),
    ({"gamma_grid": [2.0, 1.0]}, "gamma_grid"),
    ({"gamma_grid": [0.5]}, "gamma_grid"),
    ({"data": {"family": "XX", "m": 3, "n": 3}}, "data"),
    ({"bogus": 1}, "bogus"),
])
def test_invalid_config(change, field):
    with pytest.raises(InvalidConfig) as err:
        small_config(**change)
    assert err.value.field == field


def test_missing_required_fields():
    with pytest.raises(InvalidConfig) as err:
        bench.ExperimentConfig.from_dict({"output_path": "x"})
    assert err.value.field == "data"


def test_lsq_without_replacement_full_draw_has_zero_variance():
    cfg = bench.LsqConfig.from_dict({
        "output_path": "-", "data": {"family": "GA", "n_rows": 120, "seed": 1},
        "ell_grid": [120], "schemes": ["uniform"], "trials": 5, "replace": False,
    })
    (cell,) = bench.run_lsq_experiment(cfg)
    assert cell.stats.total_variance <= 1e-20
    assert cell.stats.total_squared_bias <= 1e-20


def test_lsq_variance_decreases_with_ell():
    grid = [100, 150, 200, 300, 450, 600, 800]
    cfg = bench.LsqConfig.from_dict({
        "output_path": "-", "ell_grid": grid, "trials": 60,
        "schemes": ["uniform", "leverage", "sqrt_leverage"],
    })
    cells = bench.run_lsq_experiment(cfg)
    for scheme in ("uniform", "leverage", "sqrt_leverage"):
        var = [c.stats.total_variance for c in cells if c.scheme == scheme]
        rho, p = stats.spearmanr(grid, var)
        assert rho < 0 and p < 0.01, (scheme, var)


def test_lsq_csv_layout():
    cfg = bench.LsqConfig.from_dict({"output_path": "-", "ell_grid": [150], "trials": 3, "schemes": ["leverage"]})
    text = bench.lsq_to_csv(bench.run_lsq_experiment(cfg))
    rows = bench.read_rows(text)
    assert rows[0]["coordinate"] == "all" and len(rows) == 51
    assert float(rows[0]["variance"]) == pytest.approx(sum(float(r["variance"]) for r in rows[1:]))


# -- CLI -------------------------------------------------------------------

@pytest.fixture
def matrix_file(tmp_path):
    A = generate_matrix(SyntheticSpec("T3", 12, 10, seed=1))
    path = tmp_path / "a.txt"
    path.write_text(format_matrix(A))
    return path, A


def test_cli_gen_data(tmp_path, capsys):
    out = tmp_path / "m.txt"
    assert main(["gen-data", "--family", "GA", "--m", "4", "--n", "3", "--seed", "9", "-o", str(out)]) == 0
    assert out.read_text() == format_matrix(generate_matrix(SyntheticSpec("GA", 4, 3, 9)))


def test_cli_leverage(matrix_file, capsys):
    path, A = matrix_file
    assert main(["leverage", "--matrix", str(path), "--k", "2"]) == 0
    text = capsys.readouterr().out
    assert text.splitlines()[0] == "10 2"
    vals = np.array([float(x) for x in text.splitlines()[1:]])
    np.testing.assert_allclose(vals, column_leverage_scores(thin_svd(A), 2).values, rtol=1e-15)
    assert main(["leverage", "--matrix", str(path), "--rows"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "12 10"
    assert main(["leverage", "--matrix", str(path)]) == 2


def test_cli_certify(matrix_file, tmp_path, capsys):
    path, A = matrix_file
    svd = thin_svd(A)
    s_star = column_leverage_scores(svd, 2)
    sfile = tmp_path / "s.txt"
    sfile.write_text(format_scores(s_star))
    assert main(["certify", "--matrix", str(path), "--scores", str(sfile), "--k", "2", "--ell", "30", "--delta", "0.1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["c"] == pytest.approx(1.0)
    rep = epsilon_bound(s_star, s_star, 2, 30, svd.rank, 0.1, svd.sigma(3))
    assert out["epsilon"] == pytest.approx(rep.epsilon, rel=1e-12)
    assert out["certified_error"] == pytest.approx(rep.certified_error, rel=1e-12)

    zeroed = s_star.values.copy()
    zeroed[np.argmax(zeroed)] = 0.0
    sfile.write_text(format_scores(ScoreVector.normalized(zeroed, 2)))
    assert main(["certify", "--matrix", str(path), "--scores", str(sfile), "--k", "2", "--ell", "30"]) == 0
    assert json.loads(capsys.readouterr().out)["certified_error"] == "inf"


def test_cli_certify_fixture_consistency(tmp_path, capsys):
    # two-column matrix whose rank-1 leverage scores are exactly (0.8, 0.2)
    A = np.outer([1.0, 0.0, 0.0], [2.0, 1.0]) + np.outer([0.0, 1.0, 0.0], [-0.1, 0.2])
    s_star = column_leverage_scores(thin_svd(A), 1)
    np.testing.assert_allclose(s_star.values, [0.8, 0.2], atol=1e-12)
    (tmp_path / "a.txt").write_text(format_matrix(A))
    (tmp_path / "s.txt").write_text("2 1\n0.5\n0.5\n")
    assert main(["certify", "--matrix", str(tmp_path / "a.txt"), "--scores", str(tmp_path / "s.txt"),
                 "--k", "1", "--ell", "10", "--delta", "0.2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["c"] == pytest.approx(1.6) and out["q"] == pytest.approx(2 * np.sqrt(0.8))


def test_cli_certify_parse_error(matrix_file, tmp_path, capsys):
    path, _ = matrix_file
    bad = tmp_path / "s.txt"
    bad.write_text("10 2\n0.2\nabc\n")
    assert main(["certify", "--matrix", str(path), "--scores", str(bad), "--k", "2", "--ell", "30"]) == 2
    assert ":3:" in capsys.readouterr().err


def test_cli_optimize_scores(tmp_path, capsys):
    sfile = tmp_path / "s.txt"
    sfile.write_text("2 1\n0.8\n0.2\n")
    meta = tmp_path / "meta.json"
    assert main(["optimize-scores", "--scores", str(sfile), "--gamma", "2", "--meta", str(meta)]) == 0
    lines = capsys.readouterr().out.splitlines()
    np.testing.assert_allclose([float(x) for x in lines[1:]], [2 / 3, 1 / 3], rtol=1e-9)
    assert set(json.loads(meta.read_text())) == {"t_star", "gamma", "iterations", "residual"}
    assert main(["optimize-scores", "--scores", str(sfile), "--ell", "5", "--delta", "0.1"]) == 2


def test_cli_experiment_exit_codes(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"data": {"family": "GA", "m": 30, "n": 30}, "k": 3, "ell_grid": [2]}))
    assert main(["css-experiment", "--config", str(cfg)]) == 2
    assert "ell_grid" in capsys.readouterr().err
    cfg.write_text("{not json")
    assert main(["css-experiment", "--config", str(cfg)]) == 2

    def boom(*a, **k):
        raise NumericalFailure("forced")

    monkeypatch.setattr(bench, "run_css_experiment", boom)
    assert main(["css-experiment", "--family", "GA", "--m", "20", "--n", "20", "--k", "2", "--ell", "5"]) == 3


def test_cli_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"data": {"family": "GA", "m": 30, "n": 30}, "k": 3, "ell_grid": [6], "trials": 2}))
    out = tmp_path / "o.csv"
    assert main(["css-experiment", "--config", str(cfg), "--trials", "3", "--seed", "5", "-o", str(out)]) == 0
    rows = bench.read_rows(out.read_text())
    assert len(rows) == 3 * 3
    assert rows[0]["seed"] == str(bench.cell_seed(5, 6, 0))


def test_module_entry_point(tmp_path):
    import subprocess
    import sys

    out = tmp_path / "m.txt"
    proc = subprocess.run(
        [sys.executable, "-m", "css_sketch", "gen-data", "--family", "T1", "--m", "3", "--n", "2", "-o", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().startswith("3 2\n")
    bad = subprocess.run([sys.executable, "-m", "css_sketch", "gen-data"], capture_output=True)
    assert bad.returncode == 2
