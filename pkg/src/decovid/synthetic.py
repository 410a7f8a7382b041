"""Synthetic data generators used as ground-truth oracles in the tests.

simulate_dgp draws from the extended factor representation

    X_it = Lambda_i' F_t + Gamma_i V_t + e_it

where the virus level V is zero through T0 and follows a persistent process
driven by a growth path v afterwards: two spike months followed by
mean-reverting noise, mimicking the observed outbreak profile.

simulate_var draws from a known VAR, optionally with a distributed lag of a
virus growth path entering the final months of the recursion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BURN_IN = 100


@dataclass
class DgpConfig:
    n_series: int = 100
    n_periods: int = 730
    t0: int = 719                    # 0-based index of the last pre-shock month
    r: int = 3
    lambda_scale: float = 1.0
    gamma_scale: float = 1.0
    gamma_fraction: float = 0.6      # fraction of series the virus loads on
    factor_ar: tuple = (0.7, 0.5, 0.3)
    idio_ar: float = 0.3
    sigma_factor: float = 1.0
    sigma_idio: float = 1.0
    rho_V: float = 0.5               # persistence of the virus level
    v_spike: tuple = (9.0, 1.5)      # deterministic outbreak growth
    rho_v: float = 0.3               # growth mean reversion after the spike
    sigma_v: float = 0.5
    sv_rho: float = 0.0              # log-vol AR(1) of idio innovations (0 = homoskedastic)
    sv_sigma_eta: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if len(self.factor_ar) != self.r:
            raise ValueError(f"need {self.r} factor AR coefficients, got {len(self.factor_ar)}")
        for phi in (*self.factor_ar, self.idio_ar, self.rho_V, self.rho_v, self.sv_rho):
            if abs(phi) >= 1:
                raise ValueError(f"AR coefficient {phi} is not stable")
        if not 0 <= self.t0 < self.n_periods:
            raise ValueError("t0 must lie inside the sample")
        if not 0 < self.gamma_fraction <= 1:
            raise ValueError("gamma_fraction must be in (0, 1]")


@dataclass
class SimulatedPanel:
    X: np.ndarray          # T x N
    F: np.ndarray          # T x r true factors
    V: np.ndarray          # virus level, zero through t0
    v: np.ndarray          # virus growth (innovations), zero through t0
    e: np.ndarray          # idiosyncratic component
    Lambda: np.ndarray     # N x r
    Gamma: np.ndarray      # N
    config: DgpConfig


def _ar1_path(rng, T: int, phi: float, sigma: float, size: int) -> np.ndarray:
    shocks = rng.normal(0.0, sigma, size=(T + BURN_IN, size))
    out = np.zeros((T + BURN_IN, size))
    for t in range(1, T + BURN_IN):
        out[t] = phi * out[t - 1] + shocks[t]
    return out[BURN_IN:]


def _sv_ar1_path(rng, T: int, phi: float, sigma: float, size: int,
                 sv_rho: float, sv_sigma_eta: float) -> np.ndarray:
    """AR(1) whose innovation log-variance follows its own AR(1)."""
    total = T + BURN_IN
    h = np.zeros((total, size))
    eta = rng.normal(0.0, sv_sigma_eta, size=(total, size))
    for t in range(1, total):
        h[t] = sv_rho * h[t - 1] + eta[t]
    shocks = sigma * np.exp(0.5 * h) * rng.standard_normal((total, size))
    out = np.zeros((total, size))
    for t in range(1, total):
        out[t] = phi * out[t - 1] + shocks[t]
    return out[BURN_IN:]


def virus_path(config: DgpConfig, rng) -> tuple[np.ndarray, np.ndarray]:
    """Growth v and level V: zero pre-shock, spike then mean-reverting growth."""
    T, t0 = config.n_periods, config.t0
    v = np.zeros(T)
    spike = list(config.v_spike)
    for k, s in enumerate(spike):
        if t0 + 1 + k < T:
            v[t0 + 1 + k] = s
    start = t0 + 1 + len(spike)
    for t in range(start, T):
        v[t] = config.rho_v * v[t - 1] + rng.normal(0.0, config.sigma_v)
    V = np.zeros(T)
    for t in range(t0 + 1, T):
        V[t] = config.rho_V * V[t - 1] + v[t]
    return v, V


def simulate_dgp(config: DgpConfig) -> SimulatedPanel:
    """Draw one panel; identical config and seed give bit-identical output."""
    rng = np.random.default_rng(config.seed)
    T, N, r = config.n_periods, config.n_series, config.r

    F = np.column_stack(
        [_ar1_path(rng, T, phi, config.sigma_factor, 1)[:, 0] for phi in config.factor_ar]
    ) if r else np.zeros((T, 0))
    if config.sigma_idio <= 0:
        e = np.zeros((T, N))
    elif config.sv_sigma_eta > 0:
        e = _sv_ar1_path(rng, T, config.idio_ar, config.sigma_idio, N,
                         config.sv_rho, config.sv_sigma_eta)
    else:
        e = _ar1_path(rng, T, config.idio_ar, config.sigma_idio, N)
    v, V = virus_path(config, rng)

    Lambda = rng.normal(0.0, config.lambda_scale, size=(N, r))
    Gamma = np.zeros(N)
    n_loaded = int(np.ceil(config.gamma_fraction * N))
    loaded = rng.choice(N, size=n_loaded, replace=False)
    Gamma[loaded] = rng.normal(0.0, config.gamma_scale, size=n_loaded) if config.gamma_scale > 0 else 0.0

    X = F @ Lambda.T + np.outer(V, Gamma) + e
    return SimulatedPanel(X=X, F=F, V=V, v=v, e=e, Lambda=Lambda, Gamma=Gamma, config=config)


@dataclass
class CovidInjection:
    v: np.ndarray                  # growth path over the injection window
    start: int                     # index of the first injected period
    theta: np.ndarray              # n x (q+1) distributed-lag weights

    def term(self, t: int, n: int) -> np.ndarray:
        theta = np.atleast_2d(self.theta)
        out = np.zeros(n)
        for k in range(theta.shape[1]):
            i = t - k - self.start
            if 0 <= i < len(self.v):
                out += theta[:, k] * self.v[i]
        return out

    def growth_series(self, T: int) -> np.ndarray:
        v = np.zeros(T)
        stop = min(T, self.start + len(self.v))
        v[self.start:stop] = self.v[: stop - self.start]
        return v


def simulate_var(
    A: np.ndarray,
    B: np.ndarray,
    T: int,
    injection: CovidInjection | None = None,
    seed: int = 0,
    burn: int = BURN_IN,
) -> np.ndarray:
    """Simulate Y_t = sum_i A_i Y_{t-i} + theta(L) v_t + B eps_t.

    A is (p, n, n); the injection term enters the recursion so it propagates
    through the lags exactly like any other shock.  A zero-amplitude
    injection reproduces the uninjected path for the same seed.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim == 2:
        A = A[None]
    p, n, _ = A.shape
    if np.max(np.abs(np.linalg.eigvals(companion(A)))) >= 1:
        raise ValueError("companion matrix is unstable")
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal((T + burn, n))
    shocks = eps @ np.asarray(B, dtype=float).T
    Y = np.zeros((T + burn, n))
    for t in range(T + burn):
        for i in range(1, min(t, p) + 1):
            Y[t] += A[i - 1] @ Y[t - i]
        Y[t] += shocks[t]
        if injection is not None:
            Y[t] += injection.term(t - burn, n)
    return Y[burn:]


def companion(A: np.ndarray) -> np.ndarray:
    """Stack VAR lag matrices into the (np x np) companion form."""
    A = np.asarray(A, dtype=float)
    if A.ndim == 2:
        A = A[None]
    p, n, _ = A.shape
    C = np.zeros((n * p, n * p))
    C[:n] = np.concatenate(list(A), axis=1)
    if p > 1:
        C[n:, :-n] = np.eye(n * (p - 1))
    return C
