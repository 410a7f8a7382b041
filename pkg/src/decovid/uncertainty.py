"""Macro uncertainty from stochastic-volatility fits to prediction errors.

The per-series model is

    log(eps_t^2 + c) = mu_h + h0_t + xi_t,   h0_t = rho h0_{t-1} + eta_t

with xi the log chi-square(1) disturbance, approximated as Gaussian with
mean -1.2704 and variance pi^2/2 for quasi-maximum likelihood through a
scalar Kalman filter.  The reported path h_t = mu_h + h0_t is the smoothed
log variance, and one-step uncertainty is the conditional standard
deviation implied by the AR(1) log-normal law.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

LOG_CHI2_MEAN = -1.2704
LOG_CHI2_VAR = np.pi**2 / 2
OFFSET = 1e-8
MIN_SIGMA2_ETA = 1e-6


@dataclass
class SvFit:
    h: np.ndarray            # smoothed log variance, level-inclusive
    rho: float
    mu_h: float
    sigma2_eta: float
    converged: bool
    loglik: float

    def __post_init__(self):
        if not abs(self.rho) < 1:
            raise ValueError(f"rho must be inside the unit circle, got {self.rho}")


@dataclass
class UncertaintyIndex:
    dates: np.ndarray | None
    U: np.ndarray            # equal-weight aggregate
    U_j: np.ndarray          # T x N per-series uncertainties
    label: str


def _kalman(y: np.ndarray, mu_star: float, rho: float, s2: float, smooth: bool = False):
    """Scalar Kalman pass for y_t = mu_star + h0_t + noise(R); h0 AR(1).

    Returns the Gaussian log likelihood, plus the RTS-smoothed state when
    smooth is set.
    """
    T = len(y)
    R = LOG_CHI2_VAR
    a, P = 0.0, s2 / (1.0 - rho**2) if s2 > 0 else 0.0
    ll = 0.0
    a_pred = np.zeros(T)
    P_pred = np.zeros(T)
    a_filt = np.zeros(T)
    P_filt = np.zeros(T)
    for t in range(T):
        a_pred[t], P_pred[t] = a, P
        f = P + R
        iv = y[t] - mu_star - a
        ll -= 0.5 * (np.log(2 * np.pi * f) + iv**2 / f)
        gain = P / f
        a += gain * iv
        P -= gain * P
        a_filt[t], P_filt[t] = a, P
        a, P = rho * a, rho**2 * P + s2
    if not smooth:
        return ll, None
    h = np.zeros(T)
    h[-1] = a_filt[-1]
    for t in range(T - 2, -1, -1):
        nxt = rho**2 * P_filt[t] + s2
        J = rho * P_filt[t] / nxt if nxt > 0 else 0.0
        h[t] = a_filt[t] + J * (h[t + 1] - rho * a_filt[t])
    return ll, h


def fit_sv(errors: np.ndarray, c: float = OFFSET) -> SvFit:
    """Quasi-ML stochastic-volatility fit to a prediction-error series."""
    eps = np.asarray(errors, dtype=float)
    eps = eps[np.isfinite(eps)]
    if len(eps) < 100:
        raise ValueError(f"need at least 100 observations, got {len(eps)}")
    y = np.log(eps**2 + c)

    # moment-based start: var(y) = s2/(1-rho^2) + R, autocov1(y) = rho*var(h0)
    var_y = np.var(y, ddof=1)
    var_h0 = max(var_y - LOG_CHI2_VAR, 1e-4)
    yc = y - y.mean()
    ac1 = (yc[1:] @ yc[:-1]) / len(y)
    rho0 = float(np.clip(ac1 / var_h0, -0.9, 0.9))
    theta0 = np.array([y.mean(), np.arctanh(rho0), np.log(max(var_h0 * (1 - rho0**2), 1e-4))])

    def nll(theta):
        mu_star, a, b = theta
        rho = np.tanh(a)
        s2 = np.exp(b)
        ll, _ = _kalman(y, mu_star, rho, s2)
        return -ll

    res = minimize(nll, theta0, method="L-BFGS-B",
                   bounds=[(None, None), (-5.0, 5.0), (np.log(1e-10), 10.0)])
    mu_star, a, b = res.x
    rho = float(np.tanh(a))
    s2 = float(np.exp(b))
    if s2 < MIN_SIGMA2_ETA:
        # flat likelihood in rho when the state barely moves; pin it
        rho = 0.0
    ll, h0 = _kalman(y, mu_star, rho, s2, smooth=True)
    mu_h = float(mu_star - LOG_CHI2_MEAN)
    return SvFit(h=mu_h + h0, rho=rho, mu_h=mu_h, sigma2_eta=s2,
                 converged=bool(res.success), loglik=float(ll))


def individual_uncertainty(sv: SvFit, h: int = 1) -> np.ndarray:
    """U_t(1) = sqrt(E[exp(log variance at t+1) | t]) from the smoothed path."""
    if h != 1:
        raise ValueError("only the one-step horizon is supported")
    return np.sqrt(np.exp((1 - sv.rho) * sv.mu_h + sv.rho * sv.h + sv.sigma2_eta / 2))


def aggregate_uncertainty(U_all: np.ndarray, dates=None, label: str = "U") -> UncertaintyIndex:
    """Equal-weight mean across series at each date."""
    U_all = np.asarray(U_all, dtype=float)
    if U_all.ndim == 1:
        U_all = U_all[:, None]
    if U_all.shape[1] == 0:
        raise ValueError("no series to aggregate")
    mask = np.isfinite(U_all)
    counts = mask.sum(axis=1)
    sums = np.where(mask, U_all, 0.0).sum(axis=1)
    U = np.divide(sums, counts, out=np.full(U_all.shape[0], np.nan), where=counts > 0)
    return UncertaintyIndex(dates=dates, U=U, U_j=U_all, label=label)


def covid_uncertainty(U_X: UncertaintyIndex, U_x: UncertaintyIndex) -> np.ndarray:
    """Pointwise U(X) - U(x); the two indices must cover the same dates."""
    if len(U_X.U) != len(U_x.U):
        raise ValueError("uncertainty indices have different lengths")
    if U_X.dates is not None and U_x.dates is not None and not np.array_equal(U_X.dates, U_x.dates):
        raise ValueError("uncertainty indices are dated differently")
    return U_X.U - U_x.U


def panel_uncertainty(
    error_matrix: np.ndarray,
    dates=None,
    label: str = "U",
    c: float = OFFSET,
) -> tuple[UncertaintyIndex, list[SvFit]]:
    """Fit SV per column of a prediction-error matrix and aggregate.

    Columns are fit on their finite support; the per-series U series are
    re-aligned to the full length with NaN elsewhere.
    """
    E = np.asarray(error_matrix, dtype=float)
    if E.ndim == 1:
        E = E[:, None]
    T, N = E.shape
    U_all = np.full((T, N), np.nan)
    fits = []
    for j in range(N):
        idx = np.flatnonzero(np.isfinite(E[:, j]))
        fit = fit_sv(E[idx, j], c=c)
        fits.append(fit)
        U_all[idx, j] = individual_uncertainty(fit)
    return aggregate_uncertainty(U_all, dates=dates, label=label), fits
