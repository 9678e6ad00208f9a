"""Heterogeneous-agent realized-volatility toolkit (python bindings)."""

from _hetvol import (  # noqa: F401
    arfima,
    density_band,
    fit,
    gph,
    log_vol_from_rv,
    ma_coefficients,
    model_acf,
    model_acf_ma,
    realized_variance,
    rs_hurst,
    sample_acf,
    sample_autocov,
    simulate_aggregate,
    simulate_panel,
    spectral_density,
)

__all__ = [
    "arfima",
    "density_band",
    "fit",
    "gph",
    "log_vol_from_rv",
    "ma_coefficients",
    "model_acf",
    "model_acf_ma",
    "realized_variance",
    "rs_hurst",
    "sample_acf",
    "sample_autocov",
    "simulate_aggregate",
    "simulate_panel",
    "spectral_density",
]
