"""VAR estimation with exogenous virus controls, IRFs, and bootstrap bands.

Two estimation routes give numerically identical economic dynamics:
estimate_var with an exogenous block (the augmented VAR), and
estimate_var_purged, which first projects the dependent and lagged
regressor columns off the exogenous block and then runs a plain VAR on the
purged columns.  The equivalence is exact by the partitioned-regression
algebra and is asserted in the tests at 1e-8.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .purge import Design, DecovidSpec, shock_growth
from .util import lag_matrix


@dataclass
class VarModel:
    variables: list[str]
    p: int
    A: np.ndarray                    # (p, n, n) lag matrices
    intercept: np.ndarray            # (n,)
    exog_coef: np.ndarray | None     # (n_exog, n)
    exog_names: list[str]
    residuals: np.ndarray            # (T_eff, n)
    Sigma: np.ndarray
    B: np.ndarray                    # lower Cholesky of Sigma
    Y: np.ndarray                    # the estimation sample
    exog: np.ndarray | None          # full-sample exogenous block
    rows: np.ndarray                 # sample rows the residuals refer to

    @property
    def n_vars(self) -> int:
        return len(self.variables)


@dataclass
class IrfResult:
    horizons: np.ndarray
    responses: np.ndarray            # (H+1, n, n): [h, i, k] = var i to shock k
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    level: float | None = None
    n_failed: int = 0


def build_exog(spec: DecovidSpec, v: np.ndarray, dates=None) -> Design:
    """Full-sample exogenous block: [D per model; post-shock level; v lags].

    All virus columns are zero before T0+1.  A block that comes out entirely
    zero (a pre-shock-only sample) is dropped with a warning record.
    """
    v = np.asarray(v, dtype=float)
    T = len(v)
    if spec.t0 + 1 - spec.q < 0:
        raise ValueError(f"q={spec.q} reaches before the start of the sample")
    vz = shock_growth(v, spec.t0, spec.model_id) if spec.t0 < T - 1 else np.zeros(T)
    rows = np.arange(T)

    cols, names = [], []
    if spec.model_id in (1, 2, 3):
        d = np.zeros(T)
        if spec.t0 + 1 < T:
            d[spec.t0 + 1] = 1.0
        cols.append(d)
        names.append("D")
    level = (rows > spec.t0).astype(float)
    cols.append(level)
    names.append("post")
    if spec.model_id in (3, 4):
        cols.append(vz)
        names.append("v")
    for k in range(1, spec.q + 1):
        lagged = np.zeros(T)
        lagged[k:] = vz[:-k]
        cols.append(lagged)
        names.append(f"v_lag{k}")

    matrix = np.column_stack(cols)
    keep = [j for j in range(matrix.shape[1]) if np.any(matrix[:, j] != 0)]
    dropped = [names[j] for j in range(matrix.shape[1]) if j not in keep]
    return Design(matrix=matrix[:, keep], names=[names[j] for j in keep], rows=rows, dropped=dropped)


def _design_rows(Y: np.ndarray, p: int, exog: np.ndarray | None):
    T, n = Y.shape
    rows = np.arange(p, T)
    lags = lag_matrix(Y, p)
    const = np.ones((len(rows), 1))
    ex = exog[rows] if exog is not None else np.zeros((len(rows), 0))
    return rows, lags, const, ex


def estimate_var(
    Y: np.ndarray,
    p: int,
    exog: np.ndarray | None = None,
    variables: list[str] | None = None,
    exog_names: list[str] | None = None,
) -> VarModel:
    """Equation-by-equation least squares with optional exogenous block.

    exog is aligned with the full sample (row t of exog belongs to Y_t); the
    effective sample starts at t = p.  Sigma uses a T-k degrees-of-freedom
    correction with k counting every regressor.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    T, n = Y.shape
    if exog is not None:
        exog = np.asarray(exog, dtype=float)
        if exog.ndim == 1:
            exog = exog[:, None]
        if len(exog) != T:
            raise ValueError(f"exog has {len(exog)} rows for a sample of {T}")
    if p < 1:
        raise ValueError("p must be >= 1")
    rows, lags, const, ex = _design_rows(Y, p, exog)
    Z = np.column_stack([const, lags, ex])
    k = Z.shape[1]
    if len(rows) <= k:
        raise ValueError(f"sample of {len(rows)} rows cannot support {k} regressors")
    if np.linalg.matrix_rank(Z) < k:
        raise ValueError("singular regressor cross-product")

    coef, *_ = np.linalg.lstsq(Z, Y[rows], rcond=None)
    resid = Y[rows] - Z @ coef
    Sigma = resid.T @ resid / (len(rows) - k)
    B = cholesky_identify(Sigma)

    A = np.stack([coef[1 + i * n: 1 + (i + 1) * n].T for i in range(p)]) if p else np.zeros((0, n, n))
    n_ex = ex.shape[1]
    exog_coef = coef[1 + n * p:] if n_ex else None
    return VarModel(
        variables=variables or [f"y{i}" for i in range(n)],
        p=p,
        A=A,
        intercept=coef[0],
        exog_coef=exog_coef,
        exog_names=exog_names or [f"z{j}" for j in range(n_ex)],
        residuals=resid,
        Sigma=Sigma,
        B=B,
        Y=Y,
        exog=exog,
        rows=rows,
    )


def estimate_var_purged(
    Y: np.ndarray,
    p: int,
    exog: np.ndarray,
    variables: list[str] | None = None,
    exog_names: list[str] | None = None,
) -> VarModel:
    """VAR on pre-purged columns: the partitioned form of the augmented VAR.

    Over the regression window, the dependent entries and every lagged
    regressor column are projected off [1, exog]; a VAR without intercept on
    the purged columns then reproduces the augmented VAR's lag coefficients
    and residuals exactly, and the exogenous coefficients are recovered by a
    second projection.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    exog = np.asarray(exog, dtype=float)
    if exog.ndim == 1:
        exog = exog[:, None]
    T, n = Y.shape
    rows, lags, const, ex = _design_rows(Y, p, exog)
    P = np.column_stack([const, ex])
    k = 1 + n * p + ex.shape[1]
    if len(rows) <= k:
        raise ValueError(f"sample of {len(rows)} rows cannot support {k} regressors")

    proj, *_ = np.linalg.lstsq(P, np.column_stack([Y[rows], lags]), rcond=None)
    purged = np.column_stack([Y[rows], lags]) - P @ proj
    y_t, lags_t = purged[:, :n], purged[:, n:]
    if np.linalg.matrix_rank(lags_t) < lags_t.shape[1]:
        raise ValueError("singular regressor cross-product")

    theta, *_ = np.linalg.lstsq(lags_t, y_t, rcond=None)
    resid = y_t - lags_t @ theta
    Sigma = resid.T @ resid / (len(rows) - k)
    B = cholesky_identify(Sigma)

    delta, *_ = np.linalg.lstsq(P, Y[rows] - lags @ theta, rcond=None)
    A = np.stack([theta[i * n: (i + 1) * n].T for i in range(p)])
    return VarModel(
        variables=variables or [f"y{i}" for i in range(n)],
        p=p,
        A=A,
        intercept=delta[0],
        exog_coef=delta[1:],
        exog_names=exog_names or [f"z{j}" for j in range(ex.shape[1])],
        residuals=resid,
        Sigma=Sigma,
        B=B,
        Y=Y,
        exog=exog,
        rows=rows,
    )


def cholesky_identify(Sigma: np.ndarray) -> np.ndarray:
    Sigma = np.asarray(Sigma, dtype=float)
    try:
        return np.linalg.cholesky(Sigma)
    except np.linalg.LinAlgError as exc:
        raise ValueError("residual covariance is not positive definite") from exc


def irf(model: VarModel, H: int) -> IrfResult:
    """One-standard-deviation orthogonalized responses, horizons 0..H.

    Psi_0 = B and Psi_h = sum_{i<=min(h,p)} A_i Psi_{h-i}; the exogenous
    block is held fixed, so these are responses to economic shocks only.
    """
    n, p = model.n_vars, model.p
    psi = np.zeros((H + 1, n, n))
    psi[0] = model.B
    for h in range(1, H + 1):
        for i in range(1, min(h, p) + 1):
            psi[h] += model.A[i - 1] @ psi[h - i]
    return IrfResult(horizons=np.arange(H + 1), responses=psi)


def _resimulate(model: VarModel, resid_draw: np.ndarray) -> np.ndarray:
    """Rebuild Y recursively from drawn residuals, exogenous path held fixed."""
    T, n = model.Y.shape
    p = model.p
    Y = model.Y.copy()
    for j, t in enumerate(model.rows):
        y_t = model.intercept.copy()
        for i in range(1, p + 1):
            y_t += model.A[i - 1] @ Y[t - i]
        if model.exog_coef is not None:
            y_t += model.exog[t] @ model.exog_coef
        Y[t] = y_t + resid_draw[j]
    return Y


def bootstrap_ci(
    model: VarModel,
    H: int,
    reps: int = 1000,
    level: float = 0.95,
    seed: int = 0,
) -> IrfResult:
    """Recursive-design residual bootstrap with percentile bands.

    Each replication draws residual rows with replacement, regenerates the
    sample holding the exogenous block fixed, re-estimates, and recomputes
    the IRF.  Replication failures are skipped and counted; more than 5%
    failures is an error.  Seeding is per-replication from a spawned
    sequence, so results do not depend on execution order.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if not 0 < level < 1:
        raise ValueError("level must be in (0, 1)")
    point = irf(model, H)
    n_eff = len(model.rows)
    children = np.random.SeedSequence(seed).spawn(reps)
    draws = []
    failed = 0
    for child in children:
        rng = np.random.default_rng(child)
        take = rng.integers(0, n_eff, size=n_eff)
        Y_star = _resimulate(model, model.residuals[take])
        try:
            if model.exog is not None and model.exog_coef is not None:
                m_star = estimate_var(Y_star, model.p, exog=model.exog,
                                      variables=model.variables, exog_names=model.exog_names)
            else:
                m_star = estimate_var(Y_star, model.p, variables=model.variables)
            draws.append(irf(m_star, H).responses)
        except (ValueError, np.linalg.LinAlgError):
            failed += 1
    if failed > 0.05 * reps:
        raise ValueError(f"{failed}/{reps} bootstrap replications failed")
    stack = np.stack(draws)
    alpha = (1 - level) / 2
    lower = np.quantile(stack, alpha, axis=0)
    upper = np.quantile(stack, 1 - alpha, axis=0)
    return IrfResult(horizons=point.horizons, responses=point.responses,
                     lower=lower, upper=upper, level=level, n_failed=failed)


def orthogonalized_shocks(model: VarModel) -> np.ndarray:
    """Unit-variance structural shocks e_t = B^{-1} u_t, one row per sample row."""
    return scipy.linalg.solve_triangular(model.B, model.residuals.T, lower=True).T


def shock_correlation(
    shocks_a: np.ndarray,
    rows_a: np.ndarray,
    shocks_b: np.ndarray,
    rows_b: np.ndarray,
) -> np.ndarray:
    """Column-wise correlation of two shock sets over their common sample rows."""
    common, ia, ib = np.intersect1d(rows_a, rows_b, return_indices=True)
    if len(common) < 3:
        raise ValueError("overlap too short to correlate")
    A = np.atleast_2d(shocks_a)[ia] if shocks_a.ndim > 1 else shocks_a[ia, None]
    B = np.atleast_2d(shocks_b)[ib] if shocks_b.ndim > 1 else shocks_b[ib, None]
    out = np.zeros(min(A.shape[1], B.shape[1]))
    for j in range(len(out)):
        a = A[:, j] - A[:, j].mean()
        b = B[:, j] - B[:, j].mean()
        out[j] = a @ b / np.sqrt((a @ a) * (b @ b))
    return out
