"""Decompose macro uncertainty into its covid share on a planted oracle.

U(X) aggregates stochastic-volatility fits to the forecast errors of the
raw panel; U(x) does the same after the de-covid pass.  Their difference
is the uncertainty the virus variation itself contributes, and on this
DGP it should spike at the outbreak and die out within the year.

    python3 demos/03_uncertainty_gap.py   (about half a minute)
"""

import numpy as np

from decovid import (
    DecovidSpec,
    DgpConfig,
    MacroPanel,
    build_predictors,
    decovid_panel,
    forecast_panel,
    month_range,
    panel_uncertainty,
    pca,
    simulate_dgp,
    standardize,
)

T, t0 = 760, 719
cfg = DgpConfig(seed=0, n_series=40, n_periods=T, lambda_scale=0.7,
                sigma_idio=1.5, gamma_scale=6.0, sv_rho=0.95, sv_sigma_eta=0.35)
sim = simulate_dgp(cfg)

# plant a short, clean virus path so the gap has a known shape
rng = np.random.default_rng(7)
v = np.zeros(T)
v[t0 + 1], v[t0 + 2] = 9.0, 1.5
v[t0 + 3: t0 + 6] = np.array([2.5, 1.2, 0.5]) * rng.standard_normal(3)
X = sim.X - np.outer(sim.V, sim.Gamma) + np.outer(v, sim.Gamma)

# dates chosen so the planted outbreak lands on 2020-03
panel = MacroPanel(dates=month_range("1960-03", T),
                   names=[f"S{j:03d}" for j in range(X.shape[1])], values=X)
res = decovid_panel(panel, DecovidSpec(model_id=4, t0=t0, q=2), v)

# -- diffusion-index forecast errors for both panels

def one_step_errors(values):
    Z, _, sds = standardize(values)
    pred = build_predictors(pca(Z, 3), None, mode="post", v_P=v, v_D=np.zeros(T))
    _, err = forecast_panel(Z, pred, h=1, p_y=4, p_w=2)
    return err, sds

err_X, sd_X = one_step_errors(X)
err_x, sd_x = one_step_errors(res.x)
err_X = err_X * (sd_X / sd_x)   # common units before comparing

print("fitting stochastic volatility per series (2 x 40 fits)...")
U_X, _ = panel_uncertainty(err_X, dates=panel.dates, label="U(X)")
U_x, _ = panel_uncertainty(err_x, dates=panel.dates, label="U(x)")
gap = U_X.U - U_x.U

# -- the covid window, as text

base = gap[100:700]
mu, sd = base.mean(), base.std()
print(f"\npre-covid gap: mean {mu:.4f}, sd {sd:.4f}")
print(f"\n{'month':>8} {'U(X)':>7} {'U(x)':>7} {'gap':>7}  z")
for i in range(t0 + 1, t0 + 11):
    z = (gap[i] - mu) / sd
    bars = "#" * min(40, max(0, int(round(z))))
    print(f"{str(panel.dates[i]):>8} {U_X.U[i]:7.3f} {U_x.U[i]:7.3f} "
          f"{gap[i]:7.3f}  {bars}")
print(f"\ngap z-score at outbreak {((gap[t0 + 1] - mu) / sd):.1f}, "
      f"ten months later {((gap[t0 + 10] - mu) / sd):.1f}")
