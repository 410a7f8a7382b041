"""De-covid designs and series/panel purging."""

import numpy as np
import pytest

from decovid import (
    DecovidSpec,
    MacroPanel,
    build_design,
    decovid_panel,
    decovid_series,
    month_range,
)
from decovid.purge import adjust_outliers, shock_growth


def spike_v(T=24, t0=11, tail=(2.0, 1.0, 0.5)):
    """Zero pre-shock growth path with a strong two-month spike."""
    v = np.zeros(T)
    v[t0 + 1] = 9.0
    v[t0 + 2] = 1.5
    for k, val in enumerate(tail):
        v[t0 + 3 + k] = val
    return v


def test_shock_growth_zeroes_pre_and_model1_first_month():
    v = np.arange(10, dtype=float)
    out = shock_growth(v, t0=4, model_id=4)
    assert np.array_equal(out[:5], np.zeros(5))
    assert np.array_equal(out[5:], v[5:])
    m1 = shock_growth(v, t0=4, model_id=1)
    assert m1[5] == 0.0
    assert np.array_equal(m1[6:], v[6:])


def test_shock_growth_rejects_nan_post():
    v = np.zeros(8)
    v[6] = np.nan
    with pytest.raises(ValueError, match="v undefined at post-shock position 6"):
        shock_growth(v, t0=3, model_id=4)


def test_design_columns_per_model():
    v = spike_v()
    t0 = 11
    d1 = build_design(DecovidSpec(model_id=1, t0=t0), v)
    d2 = build_design(DecovidSpec(model_id=2, t0=t0), v)
    d3 = build_design(DecovidSpec(model_id=3, t0=t0), v)
    d4 = build_design(DecovidSpec(model_id=4, t0=t0), v)
    assert d1.names == ["const", "D", "v_lag1", "v_lag2"]
    assert d2.names == ["const", "D", "v_lag1", "v_lag2"]
    assert d3.names == ["const", "D", "v", "v_lag1", "v_lag2"]
    assert d4.names == ["const", "v", "v_lag1", "v_lag2"]
    for d in (d1, d2, d3, d4):
        assert np.array_equal(d.rows, np.arange(t0 + 1, 24))
        assert np.all(d.matrix[:, 0] == 1.0)

    # dummy marks only the first shock month
    assert d1.matrix[0, 1] == 1.0 and np.all(d1.matrix[1:, 1] == 0.0)

    # model 1 zeroes the first shock month's growth wherever it lags in
    assert d1.matrix[1, 2] == 0.0           # v_lag1 in month t0+2
    assert d1.matrix[2, 3] == 0.0           # v_lag2 in month t0+3
    assert d1.matrix[2, 2] == 1.5
    # model 2 keeps it
    assert d2.matrix[1, 2] == 9.0
    assert d2.matrix[2, 3] == 9.0
    # contemporaneous column only in models 3 and 4
    assert np.allclose(d3.matrix[:, 2], v[t0 + 1:])
    assert np.allclose(d4.matrix[:, 1], v[t0 + 1:])


def test_design_lag_alignment():
    v = spike_v()
    d4 = build_design(DecovidSpec(model_id=4, t0=11), v)
    for k in (1, 2):
        j = d4.names.index(f"v_lag{k}")
        assert np.allclose(d4.matrix[:, j], v[d4.rows - k])


def test_design_errors():
    v = np.zeros(12)
    with pytest.raises(ValueError, match="no post-shock rows"):
        build_design(DecovidSpec(model_id=4, t0=11), v)
    with pytest.raises(ValueError, match="reaches before the start"):
        build_design(DecovidSpec(model_id=4, t0=1, q=4), np.zeros(8))


def test_design_drops_all_zero_columns():
    # degenerate flat path: every v column is zero and gets dropped
    d = build_design(DecovidSpec(model_id=4, t0=5), np.zeros(12))
    assert d.names == ["const"]
    assert set(d.dropped) == {"v", "v_lag1", "v_lag2"}


def test_rank_check_names_collinear_columns():
    # constant nonzero growth makes v and its lags copies of the intercept
    v = np.full(40, 3.0)
    spec = DecovidSpec(model_id=4, t0=19)
    X = np.random.default_rng(0).standard_normal(40)
    with pytest.raises(ValueError, match="collinear column"):
        decovid_series(X, build_design(spec, v), t0=19)


def test_zero_series_gives_zero_everything():
    v = spike_v()
    design = build_design(DecovidSpec(model_id=4, t0=11), v)
    mu0, mu1, x, beta = decovid_series(np.zeros(24), design, t0=11)
    assert mu0 == 0.0
    assert np.allclose(mu1, 0.0)
    assert np.allclose(x, 0.0)
    assert np.allclose(beta, 0.0)


def test_planted_contemporaneous_coefficient():
    rng = np.random.default_rng(42)
    T, t0 = 400, 319
    v = np.zeros(T)
    v[t0 + 1 :] = np.r_[9.0, 1.5, rng.normal(0, 0.8, T - t0 - 3)]
    X = 0.3 + rng.normal(0, 0.01, T)
    X[t0 + 1 :] += 2.0 * v[t0 + 1 :]
    design = build_design(DecovidSpec(model_id=4, t0=t0), v)
    _, _, _, beta = decovid_series(X, design, t0)
    assert beta[design.names.index("v")] == pytest.approx(2.0, abs=0.05)


def test_model4_zero_growth_reduces_to_demeaning():
    rng = np.random.default_rng(1)
    T, t0 = 30, 14
    X = rng.standard_normal(T) + 5
    design = build_design(DecovidSpec(model_id=4, t0=t0), np.zeros(T))
    mu0, mu1, x, beta = decovid_series(X, design, t0)
    assert mu0 == pytest.approx(X[: t0 + 1].mean())
    assert np.allclose(mu1, X[t0 + 1 :].mean())
    assert np.allclose(x[: t0 + 1], X[: t0 + 1] - X[: t0 + 1].mean())
    assert np.allclose(x[t0 + 1 :], X[t0 + 1 :] - X[t0 + 1 :].mean())


def test_piecewise_definition_and_orthogonality():
    rng = np.random.default_rng(3)
    T, t0 = 200, 149
    v = np.zeros(T)
    v[t0 + 1 :] = np.r_[9.0, 1.5, rng.normal(0, 1, T - t0 - 3)]
    panel = MacroPanel(
        dates=month_range("2004-01", T),
        names=["s1", "s2", "s3"],
        values=rng.standard_normal((T, 3)) + np.outer(v, [0.5, -1.0, 2.0]),
    )
    spec = DecovidSpec(model_id=4, t0=t0)
    res = decovid_panel(panel, spec, v)

    pre = slice(0, t0 + 1)
    assert np.allclose(res.x[pre], panel.values[pre] - res.mu0, atol=1e-10)
    post = slice(t0 + 1, T)
    assert np.allclose(res.x[post], panel.values[post] - res.mu1, atol=1e-10)
    # post-sample residuals orthogonal to every design column
    Z = res.design.matrix
    assert np.max(np.abs(Z.T @ res.x[post])) < 1e-8


def test_panel_mixed_columns():
    rng = np.random.default_rng(7)
    T, t0 = 300, 249
    v = np.zeros(T)
    v[t0 + 1 :] = np.r_[9.0, 1.5, rng.normal(0, 1, T - t0 - 3)]
    noise = rng.standard_normal(T)
    panel = MacroPanel(
        dates=month_range("1995-01", T),
        names=["noise", "virus"],
        values=np.column_stack([noise, v]),
    )
    res = decovid_panel(panel, DecovidSpec(model_id=4, t0=t0), v)
    pre = slice(0, t0 + 1)
    assert np.allclose(res.x[pre, 0], noise[pre] - res.mu0[0], atol=1e-10)
    post = slice(t0 + 1, T)
    assert np.corrcoef(res.x[post, 0], noise[post])[0, 1] > 0.9
    assert np.max(np.abs(res.x[post, 1])) < 1e-8


def test_empty_panel_passes_through():
    T = 40
    panel = MacroPanel(month_range("2010-01", T), [], np.zeros((T, 0)))
    v = spike_v(T, t0=29, tail=())
    res = decovid_panel(panel, DecovidSpec(model_id=4, t0=29), v)
    assert res.x.shape == (T, 0)
    assert res.mu1.shape[1] == 0


def test_models_2_and_3_agree_when_contemporaneous_loading_is_zero():
    rng = np.random.default_rng(11)
    T, t0 = 120, 99
    v = np.zeros(T)
    v[t0 + 1 :] = np.r_[9.0, 1.5, rng.normal(0, 1.2, T - t0 - 3)]
    d2 = build_design(DecovidSpec(model_id=2, t0=t0), v)
    d3 = build_design(DecovidSpec(model_id=3, t0=t0), v)

    # exact fit with no contemporaneous term: identical mu1 to machine precision
    X = np.zeros(T)
    X[t0 + 1 :] = 0.5 + 2.0 * v[t0 : T - 1] - 1.0 * v[t0 - 1 : T - 2]
    _, mu1_m2, _, _ = decovid_series(X, d2, t0)
    _, mu1_m3, _, _ = decovid_series(X, d3, t0)
    assert np.allclose(mu1_m2, mu1_m3, atol=1e-10)

    # with noise they agree up to estimation error
    Xn = X + rng.normal(0, 0.05, T)
    _, n2, _, _ = decovid_series(Xn, d2, t0)
    _, n3, _, _ = decovid_series(Xn, d3, t0)
    assert np.max(np.abs(n2 - n3)) < 0.25


def test_too_few_post_rows():
    rng = np.random.default_rng(0)
    T, t0 = 26, 19
    v = np.zeros(T)
    v[t0 + 1 :] = np.r_[9.0, 1.5, rng.normal(0, 1, 4)]
    design = build_design(DecovidSpec(model_id=4, t0=t0), v)
    y = rng.standard_normal(T)
    y[t0 + 2 : t0 + 5] = np.nan  # three of six post rows unusable
    with pytest.raises(ValueError, match="fewer post-shock observations"):
        decovid_series(y, design, t0)


def test_adjust_outliers_uses_preshock_mean():
    rng = np.random.default_rng(13)
    x = rng.normal(5.0, 1.0, (100, 1))
    x[40, 0] = 500.0
    adjusted, mask = adjust_outliers(x, t0=79)
    assert mask[40, 0] and mask.sum() == 1
    clean_pre = np.r_[x[:40, 0], x[41:80, 0]]
    assert adjusted[40, 0] == pytest.approx(clean_pre.mean())
    assert np.array_equal(adjusted[~mask], x[~mask])


def test_model1_panel_adjusts_outliers():
    rng = np.random.default_rng(17)
    T, t0 = 200, 149
    v = np.zeros(T)
    v[t0 + 1 :] = np.r_[9.0, 1.5, rng.normal(0, 1, T - t0 - 3)]
    values = rng.standard_normal((T, 1))
    values[30, 0] = 300.0
    panel = MacroPanel(month_range("1990-01", T), ["y"], values)
    res = decovid_panel(panel, DecovidSpec(model_id=1, t0=t0), v)
    assert res.outlier_mask is not None and res.outlier_mask[30, 0]
    assert abs(res.adjusted[30, 0]) < 1.0
    # model 4 leaves the data alone
    res4 = decovid_panel(panel, DecovidSpec(model_id=4, t0=t0), v)
    assert res4.adjusted[30, 0] == 300.0


def test_model1_first_shock_month_stays_economic():
    """Month t0+1 is absorbed by the dummy; month t0+2 has no active covid
    regressor under model 1 (its only lag is the zeroed first-month growth),
    so its fitted value is the post-sample constant alone."""
    rng = np.random.default_rng(19)
    T, t0 = 150, 119
    v = np.zeros(T)
    v[t0 + 1 :] = np.r_[9.0, 1.5, rng.normal(0, 1, T - t0 - 3)]
    X = rng.standard_normal(T)
    design = build_design(DecovidSpec(model_id=1, t0=t0), v)
    _, mu1, x, beta = decovid_series(X, design, t0)
    # row t0+1: const + dummy reproduce the observation exactly
    assert x[t0 + 1] == pytest.approx(0.0, abs=1e-10)
    # row t0+2: the fit is the constant, all covid regressors are zero there
    assert mu1[1] == pytest.approx(beta[0], abs=1e-12)


def test_panel_error_names_series():
    T, t0 = 60, 49
    v = np.full(T, 2.0)  # collinear with the constant once lagged
    panel = MacroPanel(
        month_range("2001-01", T),
        ["OK1", "OK2"],
        np.random.default_rng(23).standard_normal((T, 2)),
    )
    with pytest.raises(ValueError, match="de-covid failed for OK1"):
        decovid_panel(panel, DecovidSpec(model_id=4, t0=t0), v)


def test_spec_validation():
    with pytest.raises(ValueError, match="model_id"):
        DecovidSpec(model_id=5, t0=10)
    with pytest.raises(ValueError, match="q"):
        DecovidSpec(model_id=4, t0=10, q=-1)
    with pytest.raises(ValueError, match="t0"):
        DecovidSpec(model_id=4, t0=-3)
