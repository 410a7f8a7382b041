"""Remove virus variation from a macro panel by post-outbreak regression.

Four designs share the template

    X_it = d0 + g_i D_t + b_i0 v_t + b_i1 v_{t-1} + ... + b_iq v_{t-q} + x_it

estimated on the months after the outbreak (t > T0).  They differ in the
treatment of the first two shock months:

    model 1   D dummy, lags only, v at T0+1 zeroed, series pre-adjusted for
              outliers (flagged cells replaced by their pre-shock mean)
    model 2   D dummy, lags only
    model 3   D dummy, contemporaneous v and lags
    model 4   no dummy, contemporaneous v and lags

The adjusted panel x equals X minus the pre-shock mean before T0 and X
minus the regression fit afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .panel import MacroPanel
from .transform import detect_outliers

MODELS_WITH_DUMMY = (1, 2, 3)
MODELS_WITH_CONTEMPORANEOUS = (3, 4)


@dataclass
class DecovidSpec:
    model_id: int
    t0: int                 # 0-based index of the last pre-shock month
    q: int = 2              # lag count for v
    kind: str = "P"         # indicator the v series came from

    def __post_init__(self):
        if self.model_id not in (1, 2, 3, 4):
            raise ValueError(f"model_id must be 1..4, got {self.model_id}")
        if self.q < 0:
            raise ValueError("q must be >= 0")
        if self.t0 < 0:
            raise ValueError("t0 must be >= 0")


@dataclass
class Design:
    matrix: np.ndarray          # T_post x k
    names: list[str]
    rows: np.ndarray            # indices into the full sample
    dropped: list[str] = field(default_factory=list)


@dataclass
class DecovidResult:
    mu0: np.ndarray             # per-series pre-shock mean
    mu1: np.ndarray             # T_post x N fitted shock component
    x: np.ndarray               # full-sample adjusted panel
    betas: np.ndarray           # k x N coefficients
    design: Design
    adjusted: np.ndarray        # the panel the regressions actually saw
    names: list[str]
    dates: np.ndarray
    spec: DecovidSpec
    outlier_mask: np.ndarray | None = None   # model 1 pre-adjustment trace

    def x_panel(self) -> MacroPanel:
        return MacroPanel(dates=self.dates.copy(), names=list(self.names), values=self.x.copy())


def shock_growth(v: np.ndarray, t0: int, model_id: int) -> np.ndarray:
    """v with pre-shock months zeroed; model 1 also zeroes the first shock month."""
    v = np.asarray(v, dtype=float)
    out = np.where(np.arange(len(v)) > t0, v, 0.0)
    if np.isnan(out).any():
        t = int(np.flatnonzero(np.isnan(out))[0])
        raise ValueError(f"v undefined at post-shock position {t}")
    if model_id == 1 and t0 + 1 < len(v):
        out[t0 + 1] = 0.0
    return out


def build_design(spec: DecovidSpec, v: np.ndarray, dates=None) -> Design:
    """Post-shock regressor matrix for one model.

    v is the full-sample growth series; rows cover t = T0+1 .. T-1.  Columns
    that are identically zero (a degenerate shock path) are dropped with a
    record rather than left to break the rank check.
    """
    v = np.asarray(v, dtype=float)
    T = len(v)
    if spec.t0 >= T - 1:
        raise ValueError("no post-shock rows: T0 is at or past the end of the sample")
    if spec.t0 + 1 - spec.q < 0:
        raise ValueError(f"q={spec.q} reaches before the start of the sample")
    vz = shock_growth(v, spec.t0, spec.model_id)
    rows = np.arange(spec.t0 + 1, T)

    cols = [np.ones(len(rows))]
    names = ["const"]
    if spec.model_id in MODELS_WITH_DUMMY:
        d = np.zeros(len(rows))
        d[0] = 1.0
        cols.append(d)
        names.append("D")
    if spec.model_id in MODELS_WITH_CONTEMPORANEOUS:
        cols.append(vz[rows])
        names.append("v")
    for k in range(1, spec.q + 1):
        cols.append(vz[rows - k])
        names.append(f"v_lag{k}")

    matrix = np.column_stack(cols)
    keep = [j for j in range(matrix.shape[1]) if names[j] == "const" or np.any(matrix[:, j] != 0)]
    dropped = [names[j] for j in range(matrix.shape[1]) if j not in keep]
    return Design(matrix=matrix[:, keep], names=[names[j] for j in keep], rows=rows, dropped=dropped)


def _check_rank(design: Design):
    A = design.matrix
    rank = np.linalg.matrix_rank(A)
    if rank < A.shape[1]:
        # pivoted QR names the columns past the numerical rank
        _, _, piv = scipy.linalg.qr(A, pivoting=True)
        bad = sorted(design.names[j] for j in piv[rank:])
        raise ValueError(f"design is rank deficient; collinear column(s): {', '.join(bad)}")


def decovid_series(X_i: np.ndarray, design: Design, t0: int) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Purge one series.  Returns (mu0, mu1 over post rows, x full sample, beta)."""
    X_i = np.asarray(X_i, dtype=float)
    _check_rank(design)
    mu0 = float(np.nanmean(X_i[: t0 + 1]))
    y = X_i[design.rows]
    obs = ~np.isnan(y)
    if obs.sum() < design.matrix.shape[1]:
        raise ValueError("fewer post-shock observations than regressors")
    beta, *_ = np.linalg.lstsq(design.matrix[obs], y[obs], rcond=None)
    mu1 = design.matrix @ beta
    x = X_i.copy()
    x[: t0 + 1] = X_i[: t0 + 1] - mu0
    x[design.rows] = y - mu1
    return mu0, mu1, x, beta


def adjust_outliers(values: np.ndarray, t0: int) -> tuple[np.ndarray, np.ndarray]:
    """Model 1 pre-step: replace IQR outliers with pre-shock means.

    The screen runs on the full sample, so with a shock in the data the
    flags land on the shock months.  Means exclude the flagged cells.
    """
    X = np.asarray(values, dtype=float)
    mask = detect_outliers(X)
    adjusted = X.copy()
    for j in np.flatnonzero(mask.any(axis=0)):
        pre = X[: t0 + 1, j].copy()
        pre[mask[: t0 + 1, j]] = np.nan
        adjusted[mask[:, j], j] = np.nanmean(pre)
    return adjusted, mask


def decovid_panel(panel: MacroPanel, spec: DecovidSpec, v: np.ndarray) -> DecovidResult:
    """Apply the model to every column of the panel."""
    values = panel.values
    outlier_mask = None
    if spec.model_id == 1:
        values, outlier_mask = adjust_outliers(values, spec.t0)

    design = build_design(spec, v)
    T, N = values.shape
    mu0 = np.zeros(N)
    mu1 = np.zeros((len(design.rows), N))
    x = np.zeros((T, N))
    betas = np.zeros((design.matrix.shape[1], N))
    errors = []
    for j in range(N):
        try:
            mu0[j], mu1[:, j], x[:, j], betas[:, j] = decovid_series(values[:, j], design, spec.t0)
        except ValueError as exc:
            errors.append(f"{panel.names[j]}: {exc}")
    if errors:
        raise ValueError("de-covid failed for " + "; ".join(errors))
    return DecovidResult(
        mu0=mu0,
        mu1=mu1,
        x=x,
        betas=betas,
        design=design,
        adjusted=values,
        names=list(panel.names),
        dates=panel.dates.copy(),
        spec=spec,
        outlier_mask=outlier_mask,
    )
