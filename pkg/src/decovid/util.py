"""Small numerical helpers: least squares, lag matrices, canonical correlations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class OlsFit:
    beta: np.ndarray
    fitted: np.ndarray
    resid: np.ndarray
    se: np.ndarray
    sigma2: float
    df_resid: int

    @property
    def tstat(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.beta / self.se


def ols(y: np.ndarray, X: np.ndarray) -> OlsFit:
    """Plain least squares with conventional (homoskedastic) standard errors."""
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    n, k = X.shape
    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < k:
        raise np.linalg.LinAlgError(f"design is rank deficient (rank {rank} < {k} columns)")
    fitted = X @ beta
    resid = y - fitted
    df = n - k
    sigma2 = float(resid @ resid / df) if df > 0 else np.nan
    XtX_inv = np.linalg.inv(X.T @ X)
    se = np.sqrt(np.maximum(sigma2 * np.diag(XtX_inv), 0.0))
    return OlsFit(beta=beta, fitted=fitted, resid=resid, se=se, sigma2=sigma2, df_resid=df)


def lag_matrix(Y: np.ndarray, p: int) -> np.ndarray:
    """Stack [Y_{t-1}, ..., Y_{t-p}] for t = p..T-1; shape (T-p, n*p)."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    T = Y.shape[0]
    if p < 1 or p >= T:
        raise ValueError(f"lag order p={p} incompatible with T={T}")
    blocks = [Y[p - j - 1:T - j - 1] for j in range(p)]
    return np.hstack(blocks)


def canonical_correlations(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Canonical correlations between the column spaces of A and B (demeaned).

    Returns min(rank A, rank B) values in decreasing order; invariant to any
    invertible rotation of either block, which makes it the natural yardstick
    for factor-recovery checks.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if B.ndim == 1:
        B = B[:, None]
    A = A - A.mean(axis=0)
    B = B - B.mean(axis=0)
    Qa, _ = np.linalg.qr(A)
    Qb, _ = np.linalg.qr(B)
    s = np.linalg.svd(Qa.T @ Qb, compute_uv=False)
    return np.clip(s, 0.0, 1.0)


def corr(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation over the jointly non-missing support."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = ~(np.isnan(x) | np.isnan(y))
    if ok.sum() < 2:
        raise ValueError("need at least 2 paired observations for a correlation")
    return float(np.corrcoef(x[ok], y[ok])[0, 1])
