"""Two-slot device-to-device aided multicast: simulation, analysis, optimization."""

from ._core import (
    ClassModel,
    ConfigError,
    GainMatrix,
    PathlossParams,
    SchemeEval,
    SimEstimate,
    approx_failure_prob,
    approx_mean_success,
    asymptotic_outage_prob,
    baseline_mean_success,
    baseline_multicast_rate,
    baseline_outage_rate,
    beta_thresholds,
    db_to_linear,
    default_s_max,
    maximize_effective_rate,
    outage_snr_taylor,
    phase_limit_mean_success,
    run_experiments,
    scenario_a_model,
    scenario_b_model,
    simulate_baseline,
    simulate_collapsed,
    simulate_full,
    solve_outage_snr_asymptotic,
    solve_outage_snr_mc,
)

__all__ = [
    "ClassModel",
    "ConfigError",
    "GainMatrix",
    "PathlossParams",
    "SchemeEval",
    "SimEstimate",
    "approx_failure_prob",
    "approx_mean_success",
    "asymptotic_outage_prob",
    "baseline_mean_success",
    "baseline_multicast_rate",
    "baseline_outage_rate",
    "beta_thresholds",
    "db_to_linear",
    "default_s_max",
    "maximize_effective_rate",
    "outage_snr_taylor",
    "phase_limit_mean_success",
    "run_experiments",
    "scenario_a_model",
    "scenario_b_model",
    "simulate_baseline",
    "simulate_collapsed",
    "simulate_full",
    "solve_outage_snr_asymptotic",
    "solve_outage_snr_mc",
]

__version__ = "1.0.0"
