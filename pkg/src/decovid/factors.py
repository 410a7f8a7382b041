"""Principal-component factor estimation for standardized panels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .transform import standardize


@dataclass
class FactorSet:
    F: np.ndarray                   # T x r scores, F'F/T = I
    Lambda: np.ndarray              # N x r loadings
    variance_shares: np.ndarray     # r leading shares of total variance
    r: int
    means: np.ndarray | None = None     # standardization constants, if known
    sds: np.ndarray | None = None
    names: list[str] | None = None
    dates: np.ndarray | None = None

    def common_component(self) -> np.ndarray:
        return self.F @ self.Lambda.T


def pca(values, r: int) -> FactorSet:
    """Estimate r factors from a standardized panel with no missing cells.

    F = sqrt(T) times the leading left singular vectors, Lambda = X'F/T, so
    F'F/T = I and Lambda'Lambda is diagonal.  Signs are fixed so each
    factor's largest-magnitude loading is non-negative.
    """
    means = sds = names = dates = None
    if hasattr(values, "values"):
        panel = values
        means, sds = getattr(panel, "means", None), getattr(panel, "sds", None)
        names, dates = list(panel.names), panel.dates.copy()
        X = np.asarray(panel.values, dtype=float)
    else:
        X = np.asarray(values, dtype=float)
    if np.isnan(X).any():
        raise ValueError("panel has missing cells; impute before factoring")
    T, N = X.shape
    if not 1 <= r <= min(T, N):
        raise ValueError(f"r={r} outside 1..min(T,N)={min(T, N)}")

    U, s, _ = np.linalg.svd(X, full_matrices=False)
    tol = s[0] * max(T, N) * np.finfo(float).eps
    if s[r - 1] <= tol:
        raise ValueError(f"r={r} exceeds the numerical rank of the panel")

    F = np.sqrt(T) * U[:, :r]
    Lambda = X.T @ F / T
    for k in range(r):
        i = int(np.argmax(np.abs(Lambda[:, k])))
        if Lambda[i, k] < 0:
            Lambda[:, k] = -Lambda[:, k]
            F[:, k] = -F[:, k]
    shares = s[:r] ** 2 / np.sum(s**2)
    return FactorSet(F=F, Lambda=Lambda, variance_shares=shares, r=r,
                     means=means, sds=sds, names=names, dates=dates)


def factor_correlations(F_a: np.ndarray, F_b: np.ndarray, overlap=None) -> np.ndarray:
    """Pearson correlations of factor columns over a common window.

    overlap may be a slice, boolean mask, or index array applied to both
    sets (assumed date-aligned); None compares full length.
    """
    A = np.asarray(F_a, dtype=float)
    B = np.asarray(F_b, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if B.ndim == 1:
        B = B[:, None]
    if overlap is not None:
        A, B = A[overlap], B[overlap]
    if len(A) == 0 or len(B) == 0:
        raise ValueError("empty overlap window")
    if len(A) != len(B):
        raise ValueError(f"window lengths differ: {len(A)} vs {len(B)}")
    Ac = A - A.mean(axis=0)
    Bc = B - B.mean(axis=0)
    denom = np.outer(np.sqrt((Ac**2).sum(axis=0)), np.sqrt((Bc**2).sum(axis=0)))
    return (Ac.T @ Bc) / denom


def squared_panel_factor(values) -> np.ndarray:
    """First principal component of the element-wise squared panel.

    The squared panel is re-standardized column-wise before extraction and
    the score itself is returned standardized.  A constant squared column
    (for example a panel of +/-1 entries) surfaces as a zero-variance error.
    """
    X = np.asarray(values.values if hasattr(values, "values") else values, dtype=float)
    S, _, _ = standardize(X**2)
    G = pca(S, 1).F[:, 0]
    return (G - G.mean()) / G.std(ddof=1)
