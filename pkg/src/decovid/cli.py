"""Command-line pipeline driver.

Subcommands mirror the analysis stages: decovid, factors, forecast,
uncertainty, var, simulate.  Every run writes its outputs plus a
manifest.json carrying the configuration echo, the master seed, and a
sha256 per artifact, so a run can be reproduced bit for bit.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import factors as factors_mod
from . import forecast as forecast_mod
from . import uncertainty as unc_mod
from . import var as var_mod
from .indicators import build_indicator
from .ingest import parse_covid_tracking, parse_fredmd
from .panel import MacroPanel, resolve_t0
from .purge import DecovidSpec, decovid_panel
from .synthetic import DgpConfig, simulate_dgp
from .transform import apply_tcodes, em_impute, standardize_panel

OUTDIR_ENV = "DECOVID_OUTDIR"


@dataclass
class PipelineConfig:
    macro_csv: str | None = None
    covid_csv: str | None = None       # None = bundled 2021-02-21 vintage
    financial_csv: str | None = None
    model_id: int = 4
    kind: str = "P"
    q: int = 2
    r_m: int = 8
    r_f: int = 4
    p: int = 6
    horizon: int = 20
    p_y: int = 4
    p_w: int = 2
    threshold: float = 2.56
    reps: int = 1000
    level: float = 0.95
    seed: int = 0
    t0: str = "2020-02"                # last pre-shock month, or an integer count
    series: list[str] = field(default_factory=list)
    outdir: str = "out"

    def validate(self):
        if self.model_id not in (1, 2, 3, 4):
            raise ValueError(f"model_id must be 1..4, got {self.model_id}")
        if self.kind not in ("H", "P", "D"):
            raise ValueError(f"kind must be H, P or D, got {self.kind!r}")
        if self.q < 0 or self.p < 1 or self.r_m < 1 or self.horizon < 0:
            raise ValueError("q >= 0, p >= 1, r_m >= 1, horizon >= 0 required")
        if self.reps < 0 or not 0 < self.level < 1:
            raise ValueError("reps >= 0 and 0 < level < 1 required")
        for path in (self.macro_csv, self.covid_csv, self.financial_csv):
            if path is not None and not Path(path).exists():
                raise FileNotFoundError(f"file not found: {path}")


def bundled_covid_csv() -> str:
    return str(resources.files("decovid.data") / "national_history_20210221.csv")


def bundled_macro_csv() -> str:
    return str(resources.files("decovid.data") / "macro_sample.csv")


def load_config(args) -> PipelineConfig:
    cfg = PipelineConfig()
    if getattr(args, "config", None):
        text = Path(args.config).read_text()
        data = json.loads(text) if text.lstrip().startswith("{") else _parse_kv(text)
        for key, val in data.items():
            if not hasattr(cfg, key):
                raise ValueError(f"unknown config key {key!r}")
            setattr(cfg, key, _coerce(getattr(cfg, key), val))
    for key in vars(cfg):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    env_out = os.environ.get(OUTDIR_ENV)
    if env_out:
        cfg.outdir = env_out
    if cfg.covid_csv is None:
        cfg.covid_csv = bundled_covid_csv()
    cfg.validate()
    return cfg


def _parse_kv(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"bad config line {line!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def _coerce(default, val):
    if isinstance(val, str):
        if isinstance(default, bool):
            return val.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(val)
        if isinstance(default, float):
            return float(val)
        if isinstance(default, list):
            return [s for s in val.split(",") if s]
    return val


def write_csv(path: Path, dates, columns: dict[str, np.ndarray]):
    names = list(columns)
    with open(path, "w") as fh:
        fh.write("date," + ",".join(names) + "\n")
        n = len(next(iter(columns.values())))
        dates = list(dates) if dates is not None else range(n)
        for t in range(n):
            cells = []
            for nm in names:
                v = columns[nm][t]
                cells.append("" if v is None or (isinstance(v, float) and np.isnan(v)) else repr(float(v)))
            fh.write(f"{dates[t]}," + ",".join(cells) + "\n")


def write_manifest(outdir: Path, command: str, cfg: PipelineConfig, files: list[Path]):
    manifest = {
        "command": command,
        "config": asdict(cfg),
        "seed": cfg.seed,
        "outputs": {
            f.name: hashlib.sha256(f.read_bytes()).hexdigest() for f in files
        },
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _load_pipeline_inputs(cfg: PipelineConfig):
    """Parse, transform, and align the macro panel and the virus indicator."""
    if cfg.macro_csv is None:
        cfg.macro_csv = bundled_macro_csv()
        print("note: no --macro given, using the bundled synthetic sample panel")
    raw = parse_fredmd(Path(cfg.macro_csv).read_text())
    panel = apply_tcodes(raw)
    daily = parse_covid_tracking(Path(cfg.covid_csv).read_text())
    indicator = build_indicator(daily, cfg.kind)
    t0 = resolve_t0(int(cfg.t0) if str(cfg.t0).isdigit() else cfg.t0, panel.dates)
    v = indicator.aligned_growth(panel.dates)
    return panel, indicator, v, t0


def _decovid(cfg: PipelineConfig):
    panel, indicator, v, t0 = _load_pipeline_inputs(cfg)
    spec = DecovidSpec(model_id=cfg.model_id, t0=t0, q=cfg.q, kind=cfg.kind)
    return panel, indicator, v, decovid_panel(panel, spec, v)


def cmd_decovid(cfg: PipelineConfig) -> list[Path]:
    panel, _, _, result = _decovid(cfg)
    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    post_dates = panel.dates[result.design.rows]
    f1 = outdir / "mu1.csv"
    write_csv(f1, post_dates, {nm: result.mu1[:, j] for j, nm in enumerate(result.names)})
    f2 = outdir / "x_panel.csv"
    write_csv(f2, panel.dates, {nm: result.x[:, j] for j, nm in enumerate(result.names)})
    return [f1, f2]


def _impute_standardize(values: np.ndarray, dates, names, r: int):
    r_eff = min(r, min(values.shape) - 1)
    em = em_impute(values, r_eff) if np.isnan(values).any() else None
    filled = em.values if em is not None else values
    from .transform import TransformedPanel

    return standardize_panel(TransformedPanel(dates=dates, names=list(names), values=filled))


def cmd_factors(cfg: PipelineConfig) -> list[Path]:
    panel, _, _, result = _decovid(cfg)
    if cfg.r_m > len(panel.names):
        raise ValueError(f"r_m={cfg.r_m} exceeds the {len(panel.names)} available series")
    t0 = result.spec.t0
    std_full = _impute_standardize(result.x, panel.dates, panel.names, cfg.r_m)
    fs_full = factors_mod.pca(std_full, cfg.r_m)
    std_pre = _impute_standardize(result.x[: t0 + 1], panel.dates[: t0 + 1], panel.names, cfg.r_m)
    fs_pre = factors_mod.pca(std_pre, cfg.r_m)
    corr = factors_mod.factor_correlations(fs_pre.F, fs_full.F[: t0 + 1])

    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    f1 = outdir / "factors.csv"
    write_csv(f1, panel.dates, {f"F{k + 1}": fs_full.F[:, k] for k in range(fs_full.r)})
    f2 = outdir / "variance_shares.csv"
    write_csv(f2, [f"F{k + 1}" for k in range(fs_full.r)], {"share": fs_full.variance_shares})
    f3 = outdir / "correlations.csv"
    write_csv(f3, [f"pre_F{k + 1}" for k in range(fs_pre.r)],
              {f"full_F{j + 1}": corr[:, j] for j in range(fs_full.r)})
    return [f1, f2, f3]


def _predictors_for(cfg: PipelineConfig, values, dates, names, indicator_v_P, indicator_v_D):
    std = _impute_standardize(values, dates, names, cfg.r_m)
    r_m = min(cfg.r_m, len(names) - 1)
    fs = factors_mod.pca(std, r_m)
    return forecast_mod.build_predictors(
        fs, None, mode="post", v_P=indicator_v_P, v_D=indicator_v_D
    ), std


def _forecast_errors(cfg: PipelineConfig, values, dates, names, v_P, v_D):
    predictors, std = _predictors_for(cfg, values, dates, names, v_P, v_D)
    results, errors = forecast_mod.forecast_panel(
        std.values, predictors, h=1, p_y=cfg.p_y, p_w=cfg.p_w, threshold=cfg.threshold
    )
    return predictors, results, errors, std


def _both_growths(cfg: PipelineConfig, dates):
    daily = parse_covid_tracking(Path(cfg.covid_csv).read_text())
    vP = build_indicator(daily, "P").aligned_growth(dates)
    vD = build_indicator(daily, "D").aligned_growth(dates)
    return vP, vD


def cmd_forecast(cfg: PipelineConfig) -> list[Path]:
    panel, _, _, result = _decovid(cfg)
    vP, vD = _both_growths(cfg, panel.dates)
    _, results, errors, _ = _forecast_errors(cfg, result.x, panel.dates, panel.names, vP, vD)
    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    f1 = outdir / "errors.csv"
    write_csv(f1, panel.dates, {nm: errors[:, j] for j, nm in enumerate(panel.names)})
    f2 = outdir / "selected.csv"
    with open(f2, "w") as fh:
        fh.write("series,selected\n")
        for nm, res in zip(panel.names, results):
            fh.write(f"{nm},{';'.join(res.selected)}\n")
    return [f1, f2]


def cmd_uncertainty(cfg: PipelineConfig) -> list[Path]:
    panel, _, _, result = _decovid(cfg)
    vP, vD = _both_growths(cfg, panel.dates)
    _, _, err_X, std_X = _forecast_errors(cfg, panel.values, panel.dates, panel.names, vP, vD)
    _, _, err_x, std_x = _forecast_errors(cfg, result.x, panel.dates, panel.names, vP, vD)
    # errors come back in each panel's own standardized units; rescale the
    # unadjusted pass onto the adjusted panel's units so U(X) - U(x) is not
    # distorted by the outbreak inflating X's standard deviations
    err_X = err_X * (std_X.sds / std_x.sds)
    U_X, _ = unc_mod.panel_uncertainty(err_X, dates=panel.dates, label="U(X)")
    U_x, _ = unc_mod.panel_uncertainty(err_x, dates=panel.dates, label="U(x)")
    gap = unc_mod.covid_uncertainty(U_X, U_x)

    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    f1 = outdir / "U_X.csv"
    write_csv(f1, panel.dates, {"U": U_X.U})
    f2 = outdir / "U_x.csv"
    write_csv(f2, panel.dates, {"U": U_x.U})
    f3 = outdir / "covid_U.csv"
    write_csv(f3, panel.dates, {"U": gap})
    return [f1, f2, f3]


def cmd_var(cfg: PipelineConfig) -> list[Path]:
    panel, indicator, v, t0 = _load_pipeline_inputs(cfg)
    names = cfg.series or panel.names[:2]
    missing = [nm for nm in names if nm not in panel.names]
    if missing:
        raise ValueError(f"series not in panel: {', '.join(missing)}")
    idx = [panel.names.index(nm) for nm in names]
    Y = panel.values[:, idx]
    if np.isnan(Y).any():
        em = em_impute(panel.values, min(cfg.r_m, len(panel.names) - 1))
        Y = em.values[:, idx]

    spec = DecovidSpec(model_id=cfg.model_id, t0=t0, q=cfg.q, kind=cfg.kind)
    exog = var_mod.build_exog(spec, v)
    model = var_mod.estimate_var(Y, cfg.p, exog=exog.matrix, variables=names, exog_names=exog.names)
    bands = var_mod.bootstrap_ci(model, cfg.horizon, reps=cfg.reps, level=cfg.level, seed=cfg.seed) \
        if cfg.reps else var_mod.irf(model, cfg.horizon)

    plain = var_mod.estimate_var(Y, cfg.p, variables=names)
    pre_model = var_mod.estimate_var(Y[: t0 + 1], cfg.p, variables=names)
    shocks_plain = var_mod.orthogonalized_shocks(plain)
    shocks_adj = var_mod.orthogonalized_shocks(model)
    shocks_pre = var_mod.orthogonalized_shocks(pre_model)
    cor_plain = var_mod.shock_correlation(shocks_plain, plain.rows, shocks_pre, pre_model.rows)
    cor_adj = var_mod.shock_correlation(shocks_adj, model.rows, shocks_pre, pre_model.rows)

    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    f1 = outdir / "irf.csv"
    resp = {f"{names[i]}<-{names[k]}": bands.responses[:, i, k]
            for i in range(len(names)) for k in range(len(names))}
    write_csv(f1, bands.horizons, resp)
    files = [f1]
    f2 = outdir / "irf_bands.csv"
    if bands.lower is not None:
        cols = {}
        for i in range(len(names)):
            for k in range(len(names)):
                cols[f"lo:{names[i]}<-{names[k]}"] = bands.lower[:, i, k]
                cols[f"hi:{names[i]}<-{names[k]}"] = bands.upper[:, i, k]
        write_csv(f2, bands.horizons, cols)
        files.append(f2)
    f3 = outdir / "shocks_table.csv"
    post = model.rows > t0   # plain and augmented fits share the same rows
    write_csv(
        f3,
        panel.dates[model.rows[post]],
        {
            f"M0_{names[0]}": shocks_plain[post, 0],
            f"M{cfg.model_id}_{names[0]}": shocks_adj[post, 0],
        },
    )
    with open(f3, "a") as fh:
        fh.write(f"cor,{repr(float(cor_plain[0]))},{repr(float(cor_adj[0]))}\n")
    files.append(f3)
    return files


def cmd_simulate(cfg: PipelineConfig, args) -> list[Path]:
    base = DgpConfig.__dataclass_fields__["factor_ar"].default
    ar = tuple(base[k % len(base)] for k in range(args.r))
    config = DgpConfig(
        n_series=args.n, n_periods=args.T, t0=args.dgp_t0, r=args.r,
        factor_ar=ar, seed=cfg.seed
    )
    sim = simulate_dgp(config)
    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    f1 = outdir / "X.csv"
    write_csv(f1, range(config.n_periods), {f"x{j + 1}": sim.X[:, j] for j in range(config.n_series)})
    f2 = outdir / "factors_true.csv"
    cols = {f"F{k + 1}": sim.F[:, k] for k in range(config.r)}
    cols["V"] = sim.V
    cols["v"] = sim.v
    write_csv(f2, range(config.n_periods), cols)
    return [f1, f2]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="decovid", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--macro", dest="macro_csv", help="FRED-MD format monthly panel CSV")
        p.add_argument("--covid", dest="covid_csv", help="daily covid CSV (default: bundled vintage)")
        p.add_argument("--financial", dest="financial_csv")
        p.add_argument("--config", help="key=value lines or JSON file")
        p.add_argument("--model", dest="model_id", type=int)
        p.add_argument("--kind", choices=["H", "P", "D"])
        p.add_argument("--q", type=int)
        p.add_argument("--r-m", dest="r_m", type=int)
        p.add_argument("--r-f", dest="r_f", type=int)
        p.add_argument("--p", type=int)
        p.add_argument("--horizon", type=int)
        p.add_argument("--reps", type=int)
        p.add_argument("--level", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--t0")
        p.add_argument("--series", type=lambda s: s.split(","))
        p.add_argument("--outdir", help=f"output directory (env {OUTDIR_ENV} overrides)")

    for name in ("decovid", "factors", "forecast", "uncertainty", "var"):
        common(sub.add_parser(name))
    sim = sub.add_parser("simulate")
    common(sim)
    sim.add_argument("--n", type=int, default=100)
    sim.add_argument("--T", type=int, default=730)
    sim.add_argument("--dgp-t0", type=int, default=719)
    sim.add_argument("--r", type=int, default=3)
    return ap


COMMANDS = {
    "decovid": cmd_decovid,
    "factors": cmd_factors,
    "forecast": cmd_forecast,
    "uncertainty": cmd_uncertainty,
    "var": cmd_var,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "simulate":
            files = cmd_simulate(cfg, args)
        else:
            files = COMMANDS[args.command](cfg)
        write_manifest(Path(cfg.outdir), args.command, cfg, files)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
