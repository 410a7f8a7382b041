"""Principal-component machinery: recovery, normalization, comparisons, G."""

import numpy as np
import pytest

from decovid import (
    MacroPanel,
    factor_correlations,
    month_range,
    pca,
    squared_panel_factor,
    standardize,
)
from decovid.util import canonical_correlations


def test_rank_one_exact_recovery():
    rng = np.random.default_rng(0)
    f = rng.standard_normal(200)
    lam = rng.standard_normal(15)
    fs = pca(np.outer(f, lam), r=1)
    assert abs(np.corrcoef(fs.F[:, 0], f)[0, 1]) > 1 - 1e-10


def test_planted_three_factor_recovery():
    # 50 replications, noise sigma 0.5: canonical correlations stay >= 0.95
    worst = 1.0
    for rep in range(50):
        rng = np.random.default_rng(1000 + rep)
        F = rng.standard_normal((300, 3))
        L = rng.standard_normal((100, 3))
        X = F @ L.T + 0.5 * rng.standard_normal((300, 100))
        fs = pca(standardize(X)[0], r=3)
        worst = min(worst, canonical_correlations(fs.F, F).min())
    assert worst >= 0.95


def test_normalization_and_shares():
    rng = np.random.default_rng(2)
    X = standardize(rng.standard_normal((120, 30)))[0]
    fs = pca(X, r=5)
    T = X.shape[0]
    assert np.allclose(fs.F.T @ fs.F / T, np.eye(5), atol=1e-8)
    # loading cross-product is diagonal under the complementary normalization
    LtL = fs.Lambda.T @ fs.Lambda
    off = LtL - np.diag(np.diag(LtL))
    assert np.max(np.abs(off)) < 1e-8 * np.max(np.diag(LtL))
    assert np.all(np.diff(fs.variance_shares) <= 1e-12)
    assert fs.variance_shares.sum() <= 1 + 1e-12

    full = pca(X, r=30)
    assert full.variance_shares.sum() == pytest.approx(1.0, abs=1e-10)


def test_sign_convention():
    rng = np.random.default_rng(3)
    X = standardize(rng.standard_normal((80, 12)))[0]
    fs = pca(X, r=4)
    for k in range(4):
        j = np.argmax(np.abs(fs.Lambda[:, k]))
        assert fs.Lambda[j, k] >= 0


def test_common_component_matches_truncated_svd():
    rng = np.random.default_rng(4)
    X = standardize(rng.standard_normal((90, 25)))[0]
    fs = pca(X, r=3)
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    oracle = U[:, :3] * s[:3] @ Vt[:3]
    assert np.allclose(fs.common_component(), oracle, atol=1e-8)


def test_pca_input_errors():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((40, 10))
    X[3, 2] = np.nan
    with pytest.raises(ValueError, match="impute before factoring"):
        pca(X, r=2)
    with pytest.raises(ValueError, match="outside 1.."):
        pca(rng.standard_normal((40, 10)), r=11)
    rank1 = np.outer(rng.standard_normal(40), rng.standard_normal(10))
    with pytest.raises(ValueError, match="rank"):
        pca(rank1, r=3)


def test_pca_accepts_panel():
    rng = np.random.default_rng(6)
    panel = MacroPanel(month_range("2000-01", 60), [f"s{i}" for i in range(8)],
                       standardize(rng.standard_normal((60, 8)))[0])
    fs = pca(panel, r=2)
    assert fs.F.shape == (60, 2)
    assert fs.names == panel.names
    assert np.array_equal(fs.dates, panel.dates)


def test_factor_correlations_basics():
    rng = np.random.default_rng(7)
    F = rng.standard_normal((100, 3))
    same = factor_correlations(F, F)
    assert np.allclose(np.diag(same), 1.0, atol=1e-12)
    flipped = factor_correlations(F, -F)
    assert np.allclose(np.diag(flipped), -1.0, atol=1e-12)


def test_factor_correlations_overlap_window():
    rng = np.random.default_rng(8)
    F = rng.standard_normal((100, 2))
    win = slice(20, 80)
    c = factor_correlations(F, F, overlap=win)
    assert np.allclose(np.diag(c), 1.0)
    mask = np.zeros(100, dtype=bool)
    mask[20:80] = True
    c2 = factor_correlations(F, F + 0.01, overlap=mask)
    assert c2.shape == (2, 2)
    with pytest.raises(ValueError, match="empty overlap"):
        factor_correlations(F, F, overlap=np.zeros(100, dtype=bool))
    with pytest.raises(ValueError, match="window lengths differ"):
        factor_correlations(F, rng.standard_normal((90, 2)))


def test_squared_factor_single_column():
    rng = np.random.default_rng(9)
    x = standardize(rng.standard_normal((150, 1)))[0]
    G = squared_panel_factor(x)
    z = (x[:, 0] ** 2 - (x[:, 0] ** 2).mean()) / (x[:, 0] ** 2).std(ddof=1)
    assert np.allclose(np.abs(G), np.abs(z), atol=1e-10)
    assert G.std(ddof=1) == pytest.approx(1.0, abs=1e-10)


def test_squared_factor_degenerate_panel():
    signs = np.where(np.random.default_rng(10).random((60, 5)) < 0.5, -1.0, 1.0)
    with pytest.raises(ValueError, match="zero-variance"):
        squared_panel_factor(signs)


def test_squared_factor_tracks_common_volatility():
    for seed in range(5):
        rng = np.random.default_rng(seed)
        T, N = 400, 150
        t = np.arange(T)
        sig2 = 1.0 + 0.8 * np.sin(2 * np.pi * t / 120) \
            + 0.3 * rng.standard_normal(T).cumsum() / np.sqrt(T)
        sig2 = np.clip(sig2, 0.2, None)
        X = np.sqrt(sig2)[:, None] * rng.standard_normal((T, N))
        G = squared_panel_factor(standardize(X)[0])
        assert abs(np.corrcoef(G, sig2)[0, 1]) >= 0.9
