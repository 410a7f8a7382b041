"""Stationarity transforms, outlier screening, and EM imputation.

Transform codes follow the FRED-MD convention:

    1 level            5 delta log
    2 delta            6 delta^2 log
    3 delta^2          7 delta of simple growth rate
    4 log

Outliers are flagged by the deviation-from-median rule |x - med| > 10 IQR
and removed before factors are estimated; the resulting holes (and any
native missing cells) are filled by an iterative rank-r EM step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .panel import MacroPanel

TCODE_HEAD_LOSS = {1: 0, 2: 1, 3: 2, 4: 0, 5: 1, 6: 2, 7: 2}


@dataclass
class TransformedPanel(MacroPanel):
    outlier_mask: np.ndarray | None = None   # True where the IQR rule fired
    means: np.ndarray | None = None          # set once the panel is standardized
    sds: np.ndarray | None = None
    head_dropped: int = 0


@dataclass
class EmResult:
    values: np.ndarray
    n_iter: int
    converged: bool


def _safe_log(x: np.ndarray) -> np.ndarray:
    bad = (x <= 0) & ~np.isnan(x)
    if bad.any():
        raise ValueError(f"non-positive level at position {int(np.flatnonzero(bad)[0])}")
    with np.errstate(invalid="ignore"):
        return np.log(x)


def apply_tcode(x: np.ndarray, code: int) -> np.ndarray:
    """Apply one transform code to a single series (NaN-propagating).

    Log-based codes require strictly positive levels and raise on violation;
    leading entries lost to differencing come back as NaN.
    """
    x = np.asarray(x, dtype=float)
    y = np.full(len(x), np.nan)
    if code == 1:
        y = x.copy()
    elif code == 2:
        y[1:] = np.diff(x)
    elif code == 3:
        y[2:] = np.diff(x, n=2)
    elif code == 4:
        y = _safe_log(x)
    elif code == 5:
        y[1:] = np.diff(_safe_log(x))
    elif code == 6:
        y[2:] = np.diff(_safe_log(x), n=2)
    elif code == 7:
        with np.errstate(invalid="ignore", divide="ignore"):
            g = x[1:] / x[:-1] - 1.0
        y[2:] = np.diff(g)
    else:
        raise ValueError(f"unknown transform code {code}")
    return y


def apply_tcodes(panel: MacroPanel, drop_head: bool = True) -> TransformedPanel:
    """Transform every column by its code.

    With drop_head the leading rows lost to differencing (the maximum loss
    across the panel's codes) are removed so the sample starts balanced.
    Domain errors are re-raised naming the offending series.
    """
    if panel.tcodes is None:
        raise ValueError("panel has no transform codes")
    cols = []
    for j in range(panel.n_series):
        try:
            cols.append(apply_tcode(panel.values[:, j], int(panel.tcodes[j])))
        except ValueError as exc:
            msg = str(exc)
            if "position" in msg:
                t = int(msg.rsplit(" ", 1)[1])
                raise ValueError(
                    f"{panel.names[j]} at {panel.dates[t]}: non-positive level under log transform"
                ) from exc
            raise ValueError(f"{panel.names[j]}: {msg}") from exc
    out = np.column_stack(cols)
    lost = max(TCODE_HEAD_LOSS[int(c)] for c in panel.tcodes) if drop_head else 0
    return TransformedPanel(
        dates=panel.dates[lost:],
        names=list(panel.names),
        values=out[lost:],
        tcodes=panel.tcodes.copy(),
        warnings=list(panel.warnings),
        head_dropped=lost,
    )


def detect_outliers(values: np.ndarray) -> np.ndarray:
    """Flag cells with |x - median| > 10 interquartile ranges, column-wise.

    Quantiles use midpoint interpolation.  A degenerate spread (q75 = q25)
    flags nothing rather than everything.  Accepts a single series or a
    whole T x N panel.
    """
    X = np.asarray(values, dtype=float)
    one_d = X.ndim == 1
    if one_d:
        X = X[:, None]
    med = np.nanpercentile(X, 50, axis=0, method="midpoint")
    q75 = np.nanpercentile(X, 75, axis=0, method="midpoint")
    q25 = np.nanpercentile(X, 25, axis=0, method="midpoint")
    bound = 10.0 * (q75 - q25)
    with np.errstate(invalid="ignore"):
        mask = np.abs(X - med) > bound
    mask &= bound > 0
    mask &= ~np.isnan(X)
    return mask[:, 0] if one_d else mask


def remove_outliers(panel: TransformedPanel) -> TransformedPanel:
    mask = detect_outliers(panel.values)
    values = panel.values.copy()
    values[mask] = np.nan
    return TransformedPanel(
        dates=panel.dates,
        names=list(panel.names),
        values=values,
        tcodes=None if panel.tcodes is None else panel.tcodes.copy(),
        warnings=list(panel.warnings),
        outlier_mask=mask,
        head_dropped=panel.head_dropped,
    )


def standardize(values: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Column-demean and scale to unit sample variance (n-1 denominator)."""
    X = np.asarray(values, dtype=float)
    mu = np.nanmean(X, axis=0)
    sd = np.nanstd(X, axis=0, ddof=1)
    if np.any(sd == 0) or np.any(np.isnan(sd)):
        j = int(np.flatnonzero((sd == 0) | np.isnan(sd))[0])
        raise ValueError(f"zero-variance column {j}")
    return (X - mu) / sd, mu, sd


def standardize_panel(panel: TransformedPanel) -> TransformedPanel:
    try:
        Z, mu, sd = standardize(panel.values)
    except ValueError as exc:
        j = int(str(exc).rsplit(" ", 1)[1])
        raise ValueError(f"zero-variance series {panel.names[j]}") from exc
    return TransformedPanel(
        dates=panel.dates,
        names=list(panel.names),
        values=Z,
        tcodes=None if panel.tcodes is None else panel.tcodes.copy(),
        warnings=list(panel.warnings),
        outlier_mask=panel.outlier_mask,
        means=mu,
        sds=sd,
        head_dropped=panel.head_dropped,
    )


def em_impute(
    values: np.ndarray,
    r: int,
    tol: float = 1e-6,
    max_iter: int = 200,
) -> EmResult:
    """Fill missing cells by iterated rank-r principal components.

    Start from column means, then alternate (standardize -> rank-r SVD ->
    replace missing cells with the common component) until the largest
    absolute change on an imputed cell falls below tol.  Observed cells are
    never altered.  Non-convergence is reported, not raised.
    """
    X = np.asarray(values, dtype=float)
    if r >= min(X.shape):
        raise ValueError(f"rank {r} not below min(T, N) = {min(X.shape)}")
    miss = np.isnan(X)
    if not miss.any():
        return EmResult(X.copy(), 0, True)
    if np.all(miss, axis=0).any() or np.all(miss, axis=1).any():
        raise ValueError("a full row or column is missing; cannot impute")
    filled = np.where(miss, np.nanmean(X, axis=0), X)
    prev = filled[miss].copy()
    for it in range(1, max_iter + 1):
        mu = filled.mean(axis=0)
        sd = filled.std(axis=0, ddof=1)
        sd = np.where(sd == 0, 1.0, sd)
        Z = (filled - mu) / sd
        U, s, Vt = np.linalg.svd(Z, full_matrices=False)
        common = (U[:, :r] * s[:r]) @ Vt[:r]
        filled = np.where(miss, common * sd + mu, X)
        delta = np.max(np.abs(filled[miss] - prev))
        if delta < tol:
            return EmResult(filled, it, True)
        prev = filled[miss].copy()
    return EmResult(filled, max_iter, False)
