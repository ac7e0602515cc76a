"""Variance ratio and competing residual-based no-cointegration tests."""

from ._core import (
    VrcointError,
    adf_statistic,
    calibrate_cbar,
    generate_sample,
    local_power_curve,
    longrun_covariance,
    msb_statistic,
    published_cbar,
    residuals,
    run_test,
    select_lag,
    simulate_limit,
    tabulate,
    vr_statistic,
    zalpha_statistic,
)

__all__ = [
    "VrcointError",
    "adf_statistic",
    "calibrate_cbar",
    "generate_sample",
    "local_power_curve",
    "longrun_covariance",
    "msb_statistic",
    "published_cbar",
    "residuals",
    "run_test",
    "select_lag",
    "simulate_limit",
    "tabulate",
    "vr_statistic",
    "zalpha_statistic",
]
