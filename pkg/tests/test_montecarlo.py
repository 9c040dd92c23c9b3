import math

import numpy as np
import pytest
from scipy import stats

from corrtransfer.density import stationary_density
from corrtransfer.montecarlo import (
    ConfigError,
    DegenerateStatisticError,
    SimConfig,
    combined_se,
    correlated_noise_step,
    empirical_phase_density,
    estimate_binary_corr,
    estimate_spike_corr,
    estimate_total_phase_corr,
    integrate_pair,
    pearson_with_bootstrap,
    run_trials,
    run_windows,
    step_pair,
    trial_rng,
)
from corrtransfer.shorttime import cout_short

TWO_PI = 2 * math.pi
DT = TWO_PI * 1e-3


# --- noise ---------------------------------------------------------------------


@pytest.mark.parametrize("c", [0.0, 0.4])
def test_noise_cross_correlation(c):
    dw1, dw2 = correlated_noise_step(c, np.random.default_rng(11), DT, size=1_000_000)
    assert np.corrcoef(dw1, dw2)[0, 1] == pytest.approx(c, abs=0.005)


def test_noise_identical_at_full_correlation():
    dw1, dw2 = correlated_noise_step(1.0, np.random.default_rng(3), DT, size=1000)
    np.testing.assert_array_equal(dw1, dw2)


@pytest.mark.parametrize("c", [0.0, 0.3, 0.8])
def test_noise_moments(c):
    n = 1_000_000
    dw1, dw2 = correlated_noise_step(c, np.random.default_rng(5), DT, size=n)
    # var of a sample variance of N(0, dt) is 2 dt^2 / n
    assert abs(np.mean(dw1 * dw1) - DT) < 5 * DT * math.sqrt(2 / n)
    prod = dw1 * dw2
    assert abs(prod.mean() - c * DT) < 5 * prod.std() / math.sqrt(n)


# --- stepping --------------------------------------------------------------------


def test_deterministic_rotation():
    cfg = SimConfig(sigma=0.0, window_T=TWO_PI)
    rng = np.random.default_rng(0)
    t1, t2, w1, w2 = step_pair(1.0, 2.0, cfg, rng)
    assert (t1, t2, w1, w2) == (1.0 + DT, 2.0 + DT, False, False)
    t1, t2, w1, w2 = step_pair(TWO_PI - DT / 2, 0.5, cfg, rng)
    assert w1 and not w2
    assert t1 == pytest.approx(DT / 2, abs=1e-15)


def test_common_noise_keeps_equal_phases_equal():
    cfg = SimConfig(sigma=0.05, c=1.0, window_T=TWO_PI)
    rng = np.random.default_rng(2)
    t1 = t2 = 0.3
    for _ in range(500):
        t1, t2, _, _ = step_pair(t1, t2, cfg, rng)
        assert t1 == t2


def test_ito_drift_term():
    base = SimConfig(sigma=0.3, c=0.5, alpha=0.9, window_T=TWO_PI)
    ito = SimConfig(sigma=0.3, c=0.5, alpha=0.9, window_T=TWO_PI, include_ito_drift=True)
    a = step_pair(1.2, 4.0, base, np.random.default_rng(8))
    b = step_pair(1.2, 4.0, ito, np.random.default_rng(8))
    for theta, x, y in ((1.2, a[0], b[0]), (4.0, a[1], b[1])):
        d = -math.sin(theta + 0.9) + math.sin(0.9)
        dp = -math.cos(theta + 0.9)
        assert y - x == pytest.approx(DT * 0.5 * 0.09 * dp * d, abs=1e-15)


@pytest.mark.parametrize("ito", [False, True])
def test_kernel_matches_step_pair(ito):
    cfg = SimConfig(sigma=0.2, c=0.6, alpha=1.1, window_T=TWO_PI, include_ito_drift=ito)
    n = 3000
    z = np.random.default_rng(21).standard_normal((n, 3))
    u1, u2 = integrate_pair(0.4, 2.5, z, cfg)
    rng = np.random.default_rng(21)
    t1, t2, laps1, laps2 = 0.4, 2.5, 0, 0
    for _ in range(n):
        t1, t2, w1, w2 = step_pair(t1, t2, cfg, rng)
        laps1 += w1
        laps2 += w2
    assert u1 == pytest.approx(t1 + TWO_PI * laps1, abs=1e-9)
    assert u2 == pytest.approx(t2 + TWO_PI * laps2, abs=1e-9)


@pytest.mark.parametrize("ito", [False, True])
def test_mean_frequency(ito):
    cfg = SimConfig(sigma=0.05, c=0.0, alpha=math.pi / 2, window_T=TWO_PI, include_ito_drift=ito)
    rng = np.random.default_rng(4)
    n = 10_000 * 1000
    u1 = u2 = 0.0
    for _ in range(10):
        u1, u2 = integrate_pair(u1, u2, rng.standard_normal((n // 10, 3)), cfg)
    T = n * DT
    assert abs(u1 / T - 1) < 5 * 0.05**2
    assert abs(u2 / T - 1) < 5 * 0.05**2


# --- config ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "kwargs, key",
    [
        (dict(alpha=2.0), "alpha"),
        (dict(c=1.5), "c"),
        (dict(sigma=-1.0), "sigma"),
        (dict(trials=1), "trials"),
        (dict(dt=0.0), "dt"),
        (dict(window_T=0.5), "dt"),
        (dict(window_T=1.0001), "window_T"),
        (dict(master_seed=-1), "seed"),
        (dict(burn_in=-2.0), "burn_in"),
    ],
)
def test_config_errors_name_the_key(kwargs, key):
    with pytest.raises(ConfigError) as err:
        SimConfig(**kwargs)
    assert err.value.key == key


def test_burn_in_resolution():
    assert SimConfig().resolved_burn_in == pytest.approx(20 * TWO_PI)
    assert SimConfig(burn_in_only=True).resolved_burn_in == pytest.approx(200 * TWO_PI)
    assert SimConfig(burn_in=3.0).resolved()["burn_in"] == 3.0


# --- trials ---------------------------------------------------------------------


def test_full_correlation_gives_identical_counts():
    cfg = SimConfig(c=1.0, sigma=0.05, window_T=20 * TWO_PI, trials=30, master_seed=9)
    rec = run_trials(cfg)
    np.testing.assert_array_equal(rec.spike_count_1, rec.spike_count_2)
    np.testing.assert_array_equal(rec.total_phase_1, rec.total_phase_2)


def test_noiseless_trials():
    rec = run_trials(SimConfig(sigma=0.0, c=0.3, window_T=4 * TWO_PI, trials=25))
    assert np.all(rec.spike_count_1 == 4) and np.all(rec.spike_count_2 == 4)
    np.testing.assert_allclose(rec.total_phase_1, 4 * TWO_PI, atol=1e-9)
    with pytest.raises(DegenerateStatisticError):
        estimate_total_phase_corr(rec)
    with pytest.raises(DegenerateStatisticError):
        estimate_spike_corr(rec)


def test_determinism_across_workers_and_runs():
    cfg = SimConfig(alpha=0.6, c=0.5, sigma=0.1, window_T=3 * TWO_PI, trials=23, master_seed=2024, burn_in=TWO_PI)
    a = run_trials(cfg, workers=1)
    b = run_trials(cfg, workers=3)
    c = run_trials(cfg, workers=1)
    for name in ("spike_count_1", "spike_count_2", "total_phase_1", "total_phase_2", "final_phase_diff"):
        assert getattr(a, name).tobytes() == getattr(b, name).tobytes() == getattr(c, name).tobytes()


def test_trial_streams_are_distinct():
    draws = {trial_rng(7, i).standard_normal() for i in range(100)}
    assert len(draws) == 100
    assert trial_rng(7, 3).standard_normal() == trial_rng(7, 3).standard_normal()


def test_nested_windows_agree_with_single_runs():
    cfg = SimConfig(alpha=0.3, c=0.7, sigma=0.1, window_T=2 * TWO_PI, trials=12, master_seed=1)
    short, long = run_windows(cfg, [TWO_PI / 2, 2 * TWO_PI])
    alone = run_trials(cfg)
    np.testing.assert_array_equal(long.total_phase_1, alone.total_phase_1)
    assert short.T == TWO_PI / 2 and len(short) == 12


def test_record_access_and_proxy_bound():
    cfg = SimConfig(alpha=1.0, c=0.4, sigma=0.2, window_T=7 * TWO_PI, trials=200, master_seed=5)
    rec = run_trials(cfg)
    assert rec.proxy_gap() <= 1 + cfg.dt / TWO_PI
    r = rec[3]
    assert r.spike_count_1 == rec.spike_count_1[3]
    assert r.spiked_1 == (r.spike_count_1 > 0)
    assert 0 <= r.final_phase_diff < TWO_PI
    assert len(list(rec)) == 200


# --- estimators -------------------------------------------------------------------


def test_pearson_identical_pairs():
    x = np.arange(50) % 7
    est = pearson_with_bootstrap(x, x, "pearson_counts")
    assert est.value == pytest.approx(1.0)
    assert est.std_error >= 0 and est.n == 50


def test_bootstrap_se_is_reproducible_and_sensible():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(4000)
    y = 0.5 * x + math.sqrt(0.75) * rng.standard_normal(4000)
    a = pearson_with_bootstrap(x, y, "t")
    b = pearson_with_bootstrap(x, y, "t")
    assert a == b
    # normal theory: (1 - r^2) / sqrt(n)
    assert a.std_error == pytest.approx(0.75 / math.sqrt(4000), rel=0.25)


def test_degenerate_estimators():
    with pytest.raises(DegenerateStatisticError):
        pearson_with_bootstrap(np.ones(10), np.arange(10), "x")


def test_uncorrelated_inputs_give_zero_correlation():
    cfg = SimConfig(alpha=math.pi / 2, c=0.0, sigma=0.05, window_T=TWO_PI / 2, trials=3000, master_seed=17)
    rec = run_trials(cfg)
    for est in (estimate_binary_corr(rec), estimate_total_phase_corr(rec)):
        assert abs(est.value) < 3 * est.std_error


def test_binary_estimator_window_limit_and_degenerate_path():
    fine = TWO_PI * 1e-4
    cfg = SimConfig(sigma=0.02, c=0.5, dt=fine, window_T=9999 * fine, burn_in=TWO_PI, trials=50)
    with pytest.raises(DegenerateStatisticError):
        estimate_binary_corr(run_trials(cfg))
    with pytest.raises(ValueError):
        estimate_binary_corr(run_trials(SimConfig(sigma=0.02, window_T=2 * TWO_PI, trials=3)))


@pytest.mark.slow
def test_binary_estimate_matches_theory():
    cfg = SimConfig(alpha=0.0, c=0.8, sigma=0.05, window_T=math.pi / 4, trials=6000, master_seed=31)
    est = estimate_binary_corr(run_trials(cfg))
    assert abs(est.value - cout_short(cfg.shape, 0.8, math.pi / 4)) < 3 * est.std_error


@pytest.mark.slow
def test_dt_halving_with_coupled_noise():
    """Coarse noise is the pairwise sum of the fine noise, so both runs share one Brownian path."""
    trials, steps = 1000, 5000
    fine_cfg = SimConfig(alpha=math.pi / 2, c=0.4, sigma=0.2, dt=DT / 2, window_T=5 * TWO_PI)
    coarse_cfg = SimConfig(alpha=math.pi / 2, c=0.4, sigma=0.2, dt=DT, window_T=5 * TWO_PI)
    q = np.zeros((2, 2, trials))
    for i in range(trials):
        rng = trial_rng(99, i)
        t1 = rng.uniform(0, TWO_PI)
        t2 = (t1 + rng.uniform(-1, 1)) % TWO_PI
        z = rng.standard_normal((2 * steps, 3))
        zc = (z[0::2] + z[1::2]) / math.sqrt(2)
        f = integrate_pair(t1, t2, z, fine_cfg)
        c = integrate_pair(t1, t2, zc, coarse_cfg)
        q[0, :, i] = f[0] - t1, f[1] - t2
        q[1, :, i] = c[0] - t1, c[1] - t2
    fine = pearson_with_bootstrap(q[0, 0], q[0, 1], "pearson_total_phase")
    coarse = pearson_with_bootstrap(q[1, 0], q[1, 1], "pearson_total_phase")
    assert abs(fine.value - coarse.value) < combined_se(fine, coarse)


# --- empirical density ------------------------------------------------------------


def test_uniform_histogram_at_zero_correlation():
    cfg = SimConfig(alpha=math.pi / 4, c=0.0, sigma=0.05, window_T=TWO_PI, trials=3000, master_seed=4)
    hist = empirical_phase_density(cfg, n_bins=32)
    assert hist.samples == 3000
    assert hist.mass.sum() == pytest.approx(1.0)
    counts = hist.mass * hist.samples
    assert stats.chisquare(counts).pvalue > 0.01


@pytest.mark.slow
@pytest.mark.parametrize("alpha, c", [(0.0, 0.8), (math.pi / 4, 0.4)])
def test_histogram_matches_analytic_density(alpha, c):
    cfg = SimConfig(alpha=alpha, c=c, sigma=0.05, window_T=5 * TWO_PI, trials=4000, master_seed=8)
    hist = empirical_phase_density(cfg, n_bins=64)
    assert hist.l1_distance(lambda phi: stationary_density(cfg.shape, c, phi)) < 0.1


@pytest.mark.slow
def test_burn_in_only_mode_reaches_the_analytic_density():
    cfg = SimConfig(alpha=0.0, c=0.8, sigma=0.2, window_T=10 * TWO_PI, trials=1500, master_seed=8, burn_in_only=True)
    hist = empirical_phase_density(cfg, n_bins=32)
    assert hist.l1_distance(lambda phi: stationary_density(cfg.shape, 0.8, phi)) < 0.1


def test_histogram_rejects_too_few_bins():
    with pytest.raises(ValueError):
        empirical_phase_density(SimConfig(window_T=TWO_PI, trials=2), n_bins=16)
