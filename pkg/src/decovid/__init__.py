"""De-covid macro econometrics: purge virus variation from monthly panels,
then estimate factors, forecasts, uncertainty, and VAR impulse responses."""

from .panel import MacroPanel, month_range, resolve_t0, to_month
from .ingest import DailyCovidSeries, FormatError, parse_covid_tracking, parse_fredmd, serialize_fredmd
from .indicators import CovidIndicator, aggregate_monthly, build_indicator, growth_rate
from .transform import (
    EmResult,
    TransformedPanel,
    apply_tcode,
    apply_tcodes,
    detect_outliers,
    em_impute,
    remove_outliers,
    standardize,
    standardize_panel,
)
from .purge import DecovidResult, DecovidSpec, Design, build_design, decovid_panel, decovid_series
from .factors import FactorSet, factor_correlations, pca, squared_panel_factor
from .forecast import (
    ForecastResult,
    PredictorSet,
    build_predictors,
    diffusion_forecast,
    factor_equation_errors,
    forecast_panel,
    screen_predictors,
)
from .uncertainty import (
    SvFit,
    UncertaintyIndex,
    aggregate_uncertainty,
    covid_uncertainty,
    fit_sv,
    individual_uncertainty,
    panel_uncertainty,
)
from .var import (
    IrfResult,
    VarModel,
    bootstrap_ci,
    build_exog,
    cholesky_identify,
    estimate_var,
    estimate_var_purged,
    irf,
    orthogonalized_shocks,
    shock_correlation,
)
from .synthetic import CovidInjection, DgpConfig, SimulatedPanel, simulate_dgp, simulate_var

__version__ = "0.1.0"

__all__ = [
    "MacroPanel", "month_range", "resolve_t0", "to_month",
    "DailyCovidSeries", "FormatError", "parse_covid_tracking", "parse_fredmd", "serialize_fredmd",
    "CovidIndicator", "aggregate_monthly", "build_indicator", "growth_rate",
    "EmResult", "TransformedPanel", "apply_tcode", "apply_tcodes", "detect_outliers",
    "em_impute", "remove_outliers", "standardize", "standardize_panel",
    "DecovidResult", "DecovidSpec", "Design", "build_design", "decovid_panel", "decovid_series",
    "FactorSet", "factor_correlations", "pca", "squared_panel_factor",
    "ForecastResult", "PredictorSet", "build_predictors", "diffusion_forecast",
    "factor_equation_errors", "forecast_panel", "screen_predictors",
    "SvFit", "UncertaintyIndex", "aggregate_uncertainty", "covid_uncertainty",
    "fit_sv", "individual_uncertainty", "panel_uncertainty",
    "IrfResult", "VarModel", "bootstrap_ci", "build_exog", "cholesky_identify",
    "estimate_var", "estimate_var_purged", "irf", "orthogonalized_shocks", "shock_correlation",
    "CovidInjection", "DgpConfig", "SimulatedPanel", "simulate_dgp", "simulate_var",
]
