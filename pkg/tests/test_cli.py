"""Command-line interface: subcommands, configs, formats, exit codes."""

import json

import numpy as np
import pytest

from expectsel.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_SOLVER,
    main,
)
from expectsel.data_io import MissingColumn, NonNumericCell, load_csv


def _write_fit_csv(path, n=80, p=4, seed=0, noise=0.3):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, p))
    y = 2.0 * x[:, 0] - 1.5 * x[:, 1] + noise * rng.standard_normal(n)
    header = ["y"] + [f"x{j}" for j in range(p)]
    rows = np.column_stack([y, x])
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    return path


def _sim_config(path, seed=0, replications=3):
    cfg = {
        "sim": {
            "n": 40, "p": 10,
            "beta_active": [3.0, -2.0],
            "error_law": {"name": "std_normal"},
        },
        "seed": seed,
        "replications": replications,
    }
    path.write_text(json.dumps(cfg))
    return str(path)


# ---------------------------------------------------------------------------
# CSV ingestion

def test_load_csv_toy(tmp_path):
    path = tmp_path / "toy.csv"
    path.write_text("y,x1\n1.0,2.0\n3.0,4.0\n5.0,6.0\n")
    d = load_csv(str(path), "y")
    assert (d.n, d.p) == (3, 1)
    np.testing.assert_allclose(d.y, [1.0, 3.0, 5.0])
    assert d.feature_names == ("x1",)


def test_load_csv_response_by_index(tmp_path):
    path = tmp_path / "toy.csv"
    path.write_text("a,b\n1.0,2.0\n")
    d = load_csv(str(path), 1)
    np.testing.assert_allclose(d.y, [2.0])


def test_load_csv_blank_cell_names_location(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("y,x1\n1.0,\n")
    with pytest.raises(Exception) as err:
        load_csv(str(path), "y")
    assert "x1" in str(err.value) and ":2" in str(err.value)


def test_load_csv_non_numeric_cell(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("y,x1\n1.0,oops\n")
    with pytest.raises(NonNumericCell):
        load_csv(str(path), "y")


def test_load_csv_missing_response(tmp_path):
    path = tmp_path / "toy.csv"
    path.write_text("a,b\n1.0,2.0\n")
    with pytest.raises(MissingColumn):
        load_csv(str(path), "z")


# ---------------------------------------------------------------------------
# fit

def test_fit_writes_json_report(tmp_path, capsys):
    data = _write_fit_csv(tmp_path / "d.csv")
    out = tmp_path / "fit.json"
    code = main(["fit", "--input", str(data), "--response", "y",
                 "--output", str(out)])
    assert code == EXIT_OK
    report = json.loads(out.read_text())
    labels = [e["label"] for e in report["selected"]]
    assert "x0" in labels and "x1" in labels
    assert report["standardized_response"] is True
    for entry in report["selected"]:
        assert entry["ci_lower"] <= entry["coefficient"] <= entry["ci_upper"]
    assert "selected" in capsys.readouterr().out


def test_fit_csv_format(tmp_path):
    data = _write_fit_csv(tmp_path / "d.csv")
    out = tmp_path / "fit.csv"
    code = main(["fit", "--input", str(data), "--response", "y",
                 "--output", str(out), "--format", "csv"])
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0].startswith("index,label,coefficient")
    assert len(lines) >= 2


def test_fit_noiseless_flags_degenerate_intervals(tmp_path):
    data = _write_fit_csv(tmp_path / "d.csv", noise=0.0, p=3)
    out = tmp_path / "fit.json"
    code = main(["fit", "--input", str(data), "--response", "y",
                 "--standardize", "off", "--output", str(out)])
    assert code == EXIT_OK
    report = json.loads(out.read_text())
    assert report["degenerate_inference"] is True


def test_fit_missing_input_is_config_error(capsys):
    assert main(["fit"]) == EXIT_CONFIG
    assert "usage" in capsys.readouterr().err


def test_fit_unreadable_csv_is_parse_error(tmp_path, capsys):
    assert main(["fit", "--input", str(tmp_path / "no.csv")]) == EXIT_PARSE
    assert "error" in capsys.readouterr().err


def test_fit_constant_response_without_standardize_is_solver_error(tmp_path):
    path = tmp_path / "flat.csv"
    path.write_text("y,x1\n" + "2.0,1.0\n" * 6)
    code = main(["fit", "--input", str(path), "--response", "y",
                 "--standardize", "off"])
    assert code == EXIT_SOLVER


def test_no_command_prints_usage(capsys):
    assert main([]) == EXIT_CONFIG
    assert "usage" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# tau / diagnose

def test_tau_subcommand(tmp_path, capsys):
    data = _write_fit_csv(tmp_path / "d.csv")
    out = tmp_path / "tau.json"
    code = main(["tau", "--input", str(data), "--response", "y",
                 "--output", str(out)])
    assert code == EXIT_OK
    tau = json.loads(out.read_text())["tau"]
    assert 0.0 < tau < 1.0
    assert "tau=" in capsys.readouterr().out


def test_diagnose_subcommand(tmp_path, capsys):
    data = _write_fit_csv(tmp_path / "d.csv")
    code = main(["diagnose", "--input", str(data), "--response", "y"])
    assert code == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["n"] == 80 and payload["p"] == 4
    assert payload["near_singular"] is False


# ---------------------------------------------------------------------------
# simulate / sweep

def test_simulate_with_config(tmp_path, capsys):
    cfg = _sim_config(tmp_path / "cfg.json")
    out = tmp_path / "cell.csv"
    code = main(["simulate", "--config", cfg, "--output", str(out)])
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0].startswith("n,p,gamma,seed,mean_true_nonzero")
    assert len(lines) == 2
    assert "true_nonzero" in capsys.readouterr().out


def test_simulate_same_seed_byte_identical(tmp_path):
    cfg = _sim_config(tmp_path / "cfg.json")
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", "--config", cfg, "--output", str(out1)]) == EXIT_OK
    assert main(["simulate", "--config", cfg, "--output", str(out2)]) == EXIT_OK
    assert out1.read_bytes() == out2.read_bytes()


def test_simulate_flag_overrides_config_seed(tmp_path):
    cfg = _sim_config(tmp_path / "cfg.json", seed=0)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["simulate", "--config", cfg, "--output", str(out1)])
    main(["simulate", "--config", cfg, "--seed", "99", "--output", str(out2)])
    assert out1.read_bytes() != out2.read_bytes()


def test_simulate_json_format(tmp_path):
    cfg = _sim_config(tmp_path / "cfg.json")
    out = tmp_path / "cell.json"
    code = main(["simulate", "--config", cfg, "--output", str(out),
                 "--format", "json"])
    assert code == EXIT_OK
    [row] = json.loads(out.read_text())
    assert row["n"] == 40 and row["replications_done"] == 3


def test_simulate_requires_sim_block(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{}")
    assert main(["simulate", "--config", str(cfg)]) == EXIT_CONFIG


def test_simulate_invalid_json_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    assert main(["simulate", "--config", str(cfg)]) == EXIT_CONFIG


def test_simulate_unknown_error_law(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"sim": {"n": 10, "p": 2, "beta_active": [1.0],
                                       "error_law": {"name": "cauchy"}}}))
    assert main(["simulate", "--config", str(cfg)]) == EXIT_CONFIG


def test_sweep_with_gammas(tmp_path, capsys):
    cfg = _sim_config(tmp_path / "cfg.json")
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "--config", cfg, "--gammas", "0.5,1.0",
                 "--output", str(out)])
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert len(lines) == 3  # header + one row per gamma
    gammas = [float(line.split(",")[2]) for line in lines[1:]]
    assert gammas == [0.5, 1.0]


def test_sweep_requires_gammas(tmp_path):
    cfg = _sim_config(tmp_path / "cfg.json")
    assert main(["sweep", "--config", cfg]) == EXIT_CONFIG
