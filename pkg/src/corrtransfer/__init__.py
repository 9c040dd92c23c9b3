"""Correlation transfer in noise-driven phase oscillators.

Analytic output correlation over long windows (total-phase proxy) and short
windows (spike-presence indicators) for the sinusoidal PRC family, plus a
deterministic Monte Carlo simulator to check them.
"""

from .density import DensityGrid, NoiseSpec, density_grid, g_function, stationary_density
from .longtime import (
    LongTimeResult,
    cout_long,
    cout_long_closed_type1,
    cout_long_closed_type2,
    cout_long_small_c,
)
from .montecarlo import (
    CorrelationEstimate,
    SimConfig,
    TrialRecords,
    empirical_phase_density,
    estimate_binary_corr,
    estimate_spike_corr,
    estimate_total_phase_corr,
    run_trials,
    run_windows,
)
from .prc import PrcShape, autocorr, autocorr_integral, delta, delta_prime
from .shorttime import JointSpikeProbs, cout_short, cout_short_slope, joint_spike_probs, susceptibility_ratio

__all__ = [
    "CorrelationEstimate",
    "DensityGrid",
    "JointSpikeProbs",
    "LongTimeResult",
    "NoiseSpec",
    "PrcShape",
    "SimConfig",
    "TrialRecords",
    "autocorr",
    "autocorr_integral",
    "cout_long",
    "cout_long_closed_type1",
    "cout_long_closed_type2",
    "cout_long_small_c",
    "cout_short",
    "cout_short_slope",
    "delta",
    "delta_prime",
    "density_grid",
    "empirical_phase_density",
    "estimate_binary_corr",
    "estimate_spike_corr",
    "estimate_total_phase_corr",
    "g_function",
    "joint_spike_probs",
    "run_trials",
    "run_windows",
    "stationary_density",
    "susceptibility_ratio",
]
