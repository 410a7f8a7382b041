"""End-to-end CLI runs against frozen golden outputs."""

import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

GOLDEN = Path(__file__).parent / "golden"

GOLDEN_ARGS = {
    "decovid": ["decovid"],
    "factors": ["factors", "--r-m", "3"],
    "uncertainty": ["uncertainty", "--r-m", "3"],
    "var": ["var", "--p", "2", "--horizon", "8", "--reps", "25", "--seed", "0"],
}


def read_csv(path: Path):
    """(dates, {column: float array}); trailing non-data lines are returned raw."""
    lines = path.read_text().splitlines()
    names = lines[0].split(",")[1:]
    dates, rows, extra = [], [], []
    for line in lines[1:]:
        first = line.split(",", 1)[0]
        if first == "cor":
            extra.append(line)
            continue
        cells = line.split(",")
        dates.append(cells[0])
        rows.append([float(c) if c else np.nan for c in cells[1:]])
    data = np.array(rows)
    return dates, {nm: data[:, j] for j, nm in enumerate(names)}, extra


def assert_matches_golden(fresh: Path, golden: Path):
    d1, c1, x1 = read_csv(fresh)
    d2, c2, x2 = read_csv(golden)
    assert d1 == d2
    assert list(c1) == list(c2)
    for nm in c1:
        assert np.allclose(c1[nm], c2[nm], atol=1e-9, equal_nan=True), nm
    assert x1 == x2


@pytest.mark.parametrize("name", list(GOLDEN_ARGS))
def test_golden_outputs(name, run_cli, tmp_path):
    code, out, err = run_cli(*GOLDEN_ARGS[name], "--outdir", tmp_path)
    assert code == 0, err
    golden_files = sorted(p.name for p in (GOLDEN / name).glob("*.csv"))
    assert golden_files
    for fname in golden_files:
        assert_matches_golden(tmp_path / fname, GOLDEN / name / fname)
        assert fname in out


def test_manifest_reproducibility(run_cli, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        code, _, err = run_cli("decovid", "--outdir", d)
        assert code == 0, err
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    assert ma["outputs"] == mb["outputs"]
    assert ma["command"] == "decovid"
    assert ma["seed"] == 0
    assert ma["config"]["model_id"] == 4
    for fname, digest in ma["outputs"].items():
        assert hashlib.sha256((a / fname).read_bytes()).hexdigest() == digest


def test_outdir_env_override(run_cli, tmp_path, monkeypatch):
    target = tmp_path / "env_out"
    monkeypatch.setenv("DECOVID_OUTDIR", str(target))
    code, _, err = run_cli("decovid", "--outdir", tmp_path / "ignored")
    assert code == 0, err
    assert (target / "mu1.csv").exists()
    assert not (tmp_path / "ignored").exists()


def test_config_file_json_and_kv(run_cli, tmp_path):
    js = tmp_path / "cfg.json"
    js.write_text(json.dumps({"model_id": 2, "q": 1}))
    code, _, err = run_cli("decovid", "--config", js, "--outdir", tmp_path / "j")
    assert code == 0, err
    m = json.loads((tmp_path / "j" / "manifest.json").read_text())
    assert m["config"]["model_id"] == 2 and m["config"]["q"] == 1

    kv = tmp_path / "cfg.txt"
    kv.write_text("model_id = 3\n# comment\nq = 0\n")
    code, _, err = run_cli("decovid", "--config", kv, "--outdir", tmp_path / "k")
    assert code == 0, err
    m = json.loads((tmp_path / "k" / "manifest.json").read_text())
    assert m["config"]["model_id"] == 3 and m["config"]["q"] == 0

    # explicit flags win over the config file
    code, _, err = run_cli("decovid", "--config", js, "--model", "1",
                           "--outdir", tmp_path / "o")
    assert code == 0, err
    m = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert m["config"]["model_id"] == 1


@pytest.mark.parametrize(
    "args, message",
    [
        (["decovid", "--macro", "/nonexistent/panel.csv"], "file not found: /nonexistent/panel.csv"),
        (["decovid", "--model", "5"], "model_id must be 1..4"),
        (["decovid", "--p", "0"], "p >= 1"),
        (["factors"], "r_m=8 exceeds the 6 available series"),
        (["var", "--series", "OUTPUT,BOGUS"], "series not in panel: BOGUS"),
    ],
)
def test_cli_errors(args, message, run_cli, tmp_path):
    code, _, err = run_cli(*args, "--outdir", tmp_path)
    assert code == 1
    assert "error: " in err and message in err


def test_unknown_config_key(run_cli, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("bogus = 1\n")
    code, _, err = run_cli("decovid", "--config", bad, "--outdir", tmp_path)
    assert code == 1
    assert "unknown config key 'bogus'" in err


def test_decovid_output_shapes(run_cli, tmp_path):
    code, _, _ = run_cli("decovid", "--outdir", tmp_path)
    assert code == 0
    dates, cols, _ = read_csv(tmp_path / "mu1.csv")
    assert len(dates) == 10
    assert dates[0] == "2020-03" and dates[-1] == "2020-12"
    assert list(cols) == ["OUTPUT", "EMPLOY", "URATE", "PRICES", "FFRATE", "HSTART"]
    dates_x, cols_x, _ = read_csv(tmp_path / "x_panel.csv")
    assert len(dates_x) == 730   # two rows lost to double-difference codes
    assert dates_x[-1] == "2020-12"


def test_forecast_subcommand(run_cli, tmp_path):
    code, out, err = run_cli("forecast", "--r-m", "3", "--outdir", tmp_path)
    assert code == 0, err
    dates, cols, _ = read_csv(tmp_path / "errors.csv")
    assert len(cols) == 6
    for nm, col in cols.items():
        finite = np.isfinite(col)
        assert finite.sum() > 600, nm
        assert abs(col[finite].mean()) < 0.1
    lines = (tmp_path / "selected.csv").read_text().splitlines()
    assert lines[0] == "series,selected"
    assert len(lines) == 7


def test_uncertainty_gap_identity(run_cli, tmp_path):
    code, _, err = run_cli("uncertainty", "--r-m", "3", "--outdir", tmp_path)
    assert code == 0, err
    _, ux, _ = read_csv(tmp_path / "U_X.csv")
    _, un, _ = read_csv(tmp_path / "U_x.csv")
    _, gap, _ = read_csv(tmp_path / "covid_U.csv")
    assert np.allclose(gap["U"], ux["U"] - un["U"], atol=1e-12, equal_nan=True)
    finite = np.isfinite(un["U"])
    assert np.all(un["U"][finite] > 0)


def test_var_horizon_zero_skips_bands(run_cli, tmp_path):
    code, out, err = run_cli("var", "--p", "2", "--horizon", "0", "--reps", "0",
                             "--outdir", tmp_path)
    assert code == 0, err
    assert not (tmp_path / "irf_bands.csv").exists()
    dates, cols, _ = read_csv(tmp_path / "irf.csv")
    assert dates == ["0"]
    assert cols["OUTPUT<-EMPLOY"][0] == 0.0   # impact matrix is lower triangular
    assert cols["OUTPUT<-OUTPUT"][0] > 0.0


def test_var_bands_and_shock_table(run_cli, tmp_path):
    code, _, err = run_cli("var", "--p", "2", "--horizon", "4", "--reps", "25",
                           "--outdir", tmp_path)
    assert code == 0, err
    _, resp, _ = read_csv(tmp_path / "irf.csv")
    _, bands, _ = read_csv(tmp_path / "irf_bands.csv")
    for key in resp:
        assert np.all(bands[f"lo:{key}"] <= bands[f"hi:{key}"] + 1e-15)
    dates, cols, extra = read_csv(tmp_path / "shocks_table.csv")
    assert dates[0] == "2020-03" and len(dates) == 10
    assert list(cols) == ["M0_OUTPUT", "M4_OUTPUT"]
    assert len(extra) == 1
    cors = [float(c) for c in extra[0].split(",")[1:]]
    assert all(-1.0 <= c <= 1.0 for c in cors)


def test_simulate_determinism(run_cli, tmp_path):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    for d in (a, b):
        code, _, err = run_cli("simulate", "--n", "8", "--T", "40", "--dgp-t0", "29",
                               "--seed", "5", "--outdir", d)
        assert code == 0, err
    assert (a / "X.csv").read_bytes() == (b / "X.csv").read_bytes()
    code, _, _ = run_cli("simulate", "--n", "8", "--T", "40", "--dgp-t0", "29",
                         "--seed", "6", "--outdir", c)
    assert code == 0
    assert (a / "X.csv").read_bytes() != (c / "X.csv").read_bytes()
    dates, cols, _ = read_csv(a / "factors_true.csv")
    assert list(cols) == ["F1", "F2", "F3", "V", "v"]
    v = cols["v"]
    assert np.all(v[:30] == 0.0) and v[30] == 9.0
