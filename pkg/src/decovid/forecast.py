"""Diffusion-index forecasting with hard-threshold predictor screening.

Each target is regressed on its own lags plus a screened subset of
predictor-lag columns; the one-step-ahead residuals feed the uncertainty
module.  Screening keeps a candidate column when its t-statistic clears a
threshold (default 2.56) conditional on the own-lag block.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .factors import FactorSet
from .util import ols

DEFAULT_THRESHOLD = 2.56


@dataclass
class PredictorSet:
    mode: str                  # "pre" or "post"
    columns: np.ndarray        # T x m, date-aligned with the target panel
    names: list[str]

    @property
    def n_columns(self) -> int:
        return self.columns.shape[1]


@dataclass
class ForecastResult:
    selected: list[str]
    selected_idx: np.ndarray
    beta: np.ndarray
    fitted: np.ndarray         # aligned with target rows (NaN outside)
    errors: np.ndarray         # epsilon-hat at t+h, full length, NaN outside
    error_rows: np.ndarray     # indices carrying errors
    tstats: dict = field(default_factory=dict)


def _factor_matrix(f) -> np.ndarray:
    if isinstance(f, FactorSet):
        return f.F
    return np.asarray(f, dtype=float)


def build_predictors(
    factors_m,
    factors_f=None,
    mode: str = "pre",
    v_P: np.ndarray | None = None,
    v_D: np.ndarray | None = None,
    g_m: np.ndarray | None = None,
) -> PredictorSet:
    """Assemble W_t (pre) or W+_t (post).

    Pre-shock: macro factors, financial factors, squared first macro factor,
    and the squared-panel factor G.  Post-shock: G is replaced by the P and
    D virus growth series.
    """
    Fm = _factor_matrix(factors_m)
    cols = [Fm]
    names = [f"Fm{k + 1}" for k in range(Fm.shape[1])]
    if factors_f is not None:
        Ff = _factor_matrix(factors_f)
        if len(Ff) != len(Fm):
            raise ValueError("financial factors misaligned with macro factors")
        cols.append(Ff)
        names += [f"Ff{k + 1}" for k in range(Ff.shape[1])]
    cols.append(Fm[:, :1] ** 2)
    names.append("Fm1_sq")

    if mode == "pre":
        if g_m is None:
            raise ValueError("pre mode needs the squared-panel factor g_m")
        g_m = np.asarray(g_m, dtype=float)
        if len(g_m) != len(Fm):
            raise ValueError("g_m misaligned with factors")
        cols.append(g_m[:, None])
        names.append("Gm")
    elif mode == "post":
        if v_P is None or v_D is None:
            raise ValueError("post mode needs both v_P and v_D")
        for label, v in (("vP", v_P), ("vD", v_D)):
            v = np.asarray(v, dtype=float)
            if len(v) != len(Fm):
                raise ValueError(f"{label} misaligned with factors")
            cols.append(v[:, None])
            names.append(label)
    else:
        raise ValueError(f"mode must be 'pre' or 'post', got {mode!r}")
    return PredictorSet(mode=mode, columns=np.column_stack(cols), names=names)


def screen_predictors(
    y: np.ndarray,
    own_lags: np.ndarray,
    candidates: np.ndarray,
    threshold: float = DEFAULT_THRESHOLD,
    names: list[str] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Keep candidate columns whose |t| clears the threshold given own lags.

    Each candidate is tested one at a time in a regression of y on
    [constant, own lags, candidate]; rows are the common finite support.
    Returns (selected indices, t-statistics).
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    y = np.asarray(y, dtype=float)
    own_lags = np.asarray(own_lags, dtype=float)
    candidates = np.asarray(candidates, dtype=float)
    if candidates.ndim == 1:
        candidates = candidates[:, None]
    rows = np.isfinite(y) & np.all(np.isfinite(own_lags), axis=1) & np.all(np.isfinite(candidates), axis=1)
    k = own_lags.shape[1] + 2
    if rows.sum() <= k:
        raise ValueError(f"{int(rows.sum())} usable rows for {k} regressors")
    base = np.column_stack([np.ones(rows.sum()), own_lags[rows]])
    tstats = np.zeros(candidates.shape[1])
    for j in range(candidates.shape[1]):
        col = candidates[rows, j]
        if np.ptp(col) == 0:
            continue   # constant candidate carries no information
        try:
            fit = ols(y[rows], np.column_stack([base, col]))
        except np.linalg.LinAlgError:
            continue   # collinear with the own-lag block
        tstats[j] = fit.tstat[-1]
    selected = np.flatnonzero(np.abs(tstats) > threshold)
    return selected, tstats


def _lag_block(w: np.ndarray, p_w: int) -> np.ndarray:
    """Lags 0..p_w-1 of each column, NaN-padded at the start."""
    T, m = w.shape
    out = np.full((T, m * p_w), np.nan)
    for k in range(p_w):
        out[k:, k * m:(k + 1) * m] = w[: T - k if k else T]
    return out


def diffusion_forecast(
    y: np.ndarray,
    predictors: PredictorSet,
    h: int = 1,
    p_y: int = 4,
    p_w: int = 2,
    threshold: float = DEFAULT_THRESHOLD,
    exclude: set[str] | None = None,
) -> ForecastResult:
    """Direct h-step regression of y_{t+h} on own lags and screened predictors.

    Own lags are y_t .. y_{t-p_y+1}; candidates are lags 0..p_w-1 of every
    predictor column, screened individually.  For h=1 the in-sample
    residuals are the one-step-ahead prediction errors.
    """
    if h < 1 or p_y < 1 or p_w < 1:
        raise ValueError("h, p_y and p_w must all be >= 1")
    y = np.asarray(y, dtype=float)
    T = len(y)
    if predictors.columns.shape[0] != T:
        raise ValueError("predictors misaligned with target")

    own = np.full((T, p_y), np.nan)
    for k in range(p_y):
        own[k:, k] = y[: T - k if k else T]
    cand = _lag_block(predictors.columns, p_w)
    cand_names = [f"{nm}.L{k}" for k in range(p_w) for nm in predictors.names]
    if exclude:
        keep = [j for j, nm in enumerate(cand_names) if nm.split(".L")[0] not in exclude]
        cand = cand[:, keep]
        cand_names = [cand_names[j] for j in keep]

    target = np.full(T, np.nan)
    target[:T - h] = y[h:]
    sel, tstats = screen_predictors(target, own, cand, threshold)

    X = np.column_stack([np.ones(T), own, cand[:, sel]])
    rows = np.isfinite(target) & np.all(np.isfinite(X), axis=1)
    fit = ols(target[rows], X[rows])

    fitted = np.full(T, np.nan)
    fitted[rows] = fit.fitted
    errors = np.full(T, np.nan)
    idx = np.flatnonzero(rows) + h
    errors[idx] = fit.resid
    return ForecastResult(
        selected=[cand_names[j] for j in sel],
        selected_idx=sel,
        beta=fit.beta,
        fitted=fitted,
        errors=errors,
        error_rows=idx,
        tstats={cand_names[j]: float(tstats[j]) for j in range(len(cand_names))},
    )


def forecast_panel(
    values: np.ndarray,
    predictors: PredictorSet,
    h: int = 1,
    p_y: int = 4,
    p_w: int = 2,
    threshold: float = DEFAULT_THRESHOLD,
) -> tuple[list[ForecastResult], np.ndarray]:
    """Forecast every column; returns the per-series results and error matrix."""
    values = np.asarray(values, dtype=float)
    results = []
    errors = np.full(values.shape, np.nan)
    for j in range(values.shape[1]):
        res = diffusion_forecast(values[:, j], predictors, h, p_y, p_w, threshold)
        results.append(res)
        errors[:, j] = res.errors
    return results, errors


def factor_equation_errors(
    predictors: PredictorSet,
    factor_names: list[str] | None = None,
    h: int = 1,
    p_y: int = 4,
    p_w: int = 2,
    threshold: float = DEFAULT_THRESHOLD,
) -> np.ndarray:
    """One-step errors for each macro factor equation.

    Each factor is forecast from its own lags plus the other predictors,
    mirroring the per-series equations.
    """
    if factor_names is None:
        factor_names = [nm for nm in predictors.names if nm.startswith("Fm") and not nm.endswith("_sq")]
    T = predictors.columns.shape[0]
    out = np.full((T, len(factor_names)), np.nan)
    for i, nm in enumerate(factor_names):
        j = predictors.names.index(nm)
        res = diffusion_forecast(
            predictors.columns[:, j], predictors, h, p_y, p_w, threshold, exclude={nm}
        )
        out[:, i] = res.errors
    return out
