"""Monte Carlo simulation of two phase oscillators with partially shared noise.

Each oscillator follows ``dtheta = (1 + drift) dt + sigma * Delta(theta) dW_i``
with ``dW_i = sqrt(c) dW_C + sqrt(1 - c) dW_{A,B}``. The drift is zero unless
``include_ito_drift`` is set, in which case it is ``sigma^2/2 Delta' Delta``.

Seeding contract: trial ``i`` draws everything (initial phases, then noise in
blocks) from ``Generator(PCG64(SeedSequence(master_seed, spawn_key=(i,))))``.
Trials never share a stream, so the record array does not depend on how
trials are split across workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numba
import numpy as np

from .density import check_correlation, density_grid, stationary_density
from .prc import PrcShape, delta, delta_prime
from .quadrature import TWO_PI

DEFAULT_DT = TWO_PI * 1e-3
SEEDED_BURN_IN = 20 * TWO_PI
UNSEEDED_BURN_IN = 200 * TWO_PI
BOOTSTRAP_RESAMPLES = 200
_NOISE_BLOCK = 1 << 14
_CDF_NODES = 4096


class ConfigError(ValueError):
    """Invalid simulation setting; ``key`` names the offending field."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class DegenerateStatisticError(ArithmeticError):
    """Correlation undefined because one of the samples has zero variance."""


@dataclass(frozen=True)
class SimConfig:
    alpha: float = math.pi / 2
    c: float = 0.4
    sigma: float = 0.05
    window_T: float = 100 * TWO_PI
    trials: int = 2000
    master_seed: int = 0
    dt: float = DEFAULT_DT
    # None resolves to 20 periods after analytic seeding, 200 without it
    burn_in: float | None = None
    include_ito_drift: bool = False
    burn_in_only: bool = False

    def __post_init__(self):
        try:
            PrcShape(self.alpha)
        except ValueError as exc:
            raise ConfigError("alpha", str(exc)) from None
        try:
            check_correlation(self.c, allow_one=True)
        except ValueError as exc:
            raise ConfigError("c", str(exc)) from None
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ConfigError("sigma", f"must be finite and >= 0, got {self.sigma!r}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError("dt", f"must be positive, got {self.dt!r}")
        if not (math.isfinite(self.window_T) and self.window_T > 0):
            raise ConfigError("window_T", f"must be positive, got {self.window_T!r}")
        if self.window_T < TWO_PI and self.dt > self.window_T / 100:
            raise ConfigError("dt", f"must be <= window_T/100 = {self.window_T / 100:.6g} for sub-period windows")
        steps_for(self.window_T, self.dt, "window_T")
        if self.burn_in is not None and not (math.isfinite(self.burn_in) and self.burn_in >= 0):
            raise ConfigError("burn_in", f"must be >= 0, got {self.burn_in!r}")
        if int(self.trials) != self.trials or self.trials < 2:
            raise ConfigError("trials", f"must be an integer >= 2, got {self.trials!r}")
        if int(self.master_seed) != self.master_seed or not 0 <= self.master_seed < 2**64:
            raise ConfigError("seed", f"must be an unsigned 64-bit integer, got {self.master_seed!r}")

    @property
    def shape(self) -> PrcShape:
        return PrcShape(self.alpha)

    @property
    def resolved_burn_in(self) -> float:
        if self.burn_in is not None:
            return float(self.burn_in)
        return UNSEEDED_BURN_IN if self.burn_in_only else SEEDED_BURN_IN

    def resolved(self) -> dict:
        """All fields with defaults filled in, as plain values."""
        out = asdict(self)
        out["burn_in"] = self.resolved_burn_in
        return out


def steps_for(T: float, dt: float, key: str = "window_T") -> int:
    """Number of ``dt`` steps spanning ``T``; ``T`` must be a multiple of ``dt``."""
    n = round(T / dt)
    if n < 1 or abs(n * dt - T) > 1e-9 * max(T, 1.0):
        raise ConfigError(key, f"{T!r} is not a whole number of time steps dt={dt!r}")
    return int(n)


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Independent generator for one trial (see module docstring)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(trial_index,))))


def correlated_noise_step(c: float, rng: np.random.Generator, dt: float = DEFAULT_DT, size=None):
    """Wiener increments ``(dW1, dW2)`` with variance ``dt`` and covariance ``c*dt``.

    Draws ``(z_A, z_B, z_C)`` in that order for each step.
    """
    shape = (3,) if size is None else (size, 3)
    z = rng.standard_normal(shape)
    return _mix(z, c, dt)


def _mix(z: np.ndarray, c: float, dt: float):
    sq = math.sqrt(dt)
    common = math.sqrt(c) * z[..., 2]
    private = math.sqrt(1.0 - c)
    return sq * (common + private * z[..., 0]), sq * (common + private * z[..., 1])


def step_pair(theta1: float, theta2: float, config: SimConfig, rng: np.random.Generator):
    """One Euler-Maruyama step of both oscillators.

    Returns the new phases, wrapped into ``[0, 2pi)``, and whether each
    unwrapped phase crossed a multiple of ``2pi``.
    """
    dw1, dw2 = correlated_noise_step(config.c, rng, config.dt)
    return _step_from_increments(theta1, theta2, dw1, dw2, config)


def _step_from_increments(theta1, theta2, dw1, dw2, config: SimConfig):
    shape = config.shape
    out = []
    for theta, dw in ((theta1, dw1), (theta2, dw2)):
        d = float(delta(shape, theta))
        drift = 0.5 * config.sigma**2 * float(delta_prime(shape, theta)) * d if config.include_ito_drift else 0.0
        u = theta + config.dt * (1.0 + drift) + config.sigma * d * dw
        out.append(u)
    u1, u2 = out
    return (
        u1 % TWO_PI,
        u2 % TWO_PI,
        math.floor(u1 / TWO_PI) != 0,
        math.floor(u2 / TWO_PI) != 0,
    )


@numba.njit(cache=True)
def _advance(u1, u2, z, dt, sigma, alpha, c, ito):
    # same update as _step_from_increments, on unwrapped phases
    sq = math.sqrt(dt)
    a = math.sqrt(c)
    b = math.sqrt(1.0 - c)
    sa = math.sin(alpha)
    half_s2 = 0.5 * sigma * sigma
    for k in range(z.shape[0]):
        common = a * z[k, 2]
        dw1 = sq * (common + b * z[k, 0])
        dw2 = sq * (common + b * z[k, 1])
        d1 = -math.sin(u1 + alpha) + sa
        d2 = -math.sin(u2 + alpha) + sa
        f1 = 1.0
        f2 = 1.0
        if ito:
            f1 += half_s2 * -math.cos(u1 + alpha) * d1
            f2 += half_s2 * -math.cos(u2 + alpha) * d2
        u1 = u1 + dt * f1 + sigma * d1 * dw1
        u2 = u2 + dt * f2 + sigma * d2 * dw2
    return u1, u2


def integrate_pair(theta1: float, theta2: float, normals: np.ndarray, config: SimConfig, dt: float | None = None):
    """Advance unwrapped phases through ``len(normals)`` steps.

    ``normals`` has shape ``(n, 3)`` holding ``(z_A, z_B, z_C)`` per step.
    """
    dt = config.dt if dt is None else dt
    z = np.ascontiguousarray(normals, dtype=np.float64)
    return _advance(float(theta1), float(theta2), z, dt, config.sigma, config.alpha, config.c, config.include_ito_drift)


class _Driver:
    """Runs one trial at a time, pulling noise in fixed-size blocks."""

    def __init__(self, config: SimConfig):
        self.config = config
        if not config.burn_in_only and config.c < 1.0:
            grid = density_grid(config.shape, config.c, _CDF_NODES)
            # cumulative trapezoid over [0, 2pi] with the periodic endpoint appended
            vals = np.append(grid.values, grid.values[0])
            cdf = np.concatenate(([0.0], np.cumsum(0.5 * (vals[1:] + vals[:-1])) * (TWO_PI / grid.n)))
            self._cdf = cdf / cdf[-1]
            self._cdf_phi = np.append(grid.phi, TWO_PI)
        self.burn_steps = round(config.resolved_burn_in / config.dt)

    def initial_phases(self, rng):
        theta1 = rng.uniform(0.0, TWO_PI)
        if self.config.burn_in_only:
            return theta1, rng.uniform(0.0, TWO_PI)
        if self.config.c == 1.0:
            return theta1, theta1
        phi0 = float(np.interp(rng.uniform(), self._cdf, self._cdf_phi))
        return theta1, (theta1 + phi0) % TWO_PI

    def advance(self, u1, u2, n, rng):
        cfg = self.config
        while n > 0:
            k = min(n, _NOISE_BLOCK)
            z = rng.standard_normal((k, 3))
            u1, u2 = _advance(u1, u2, z, cfg.dt, cfg.sigma, cfg.alpha, cfg.c, cfg.include_ito_drift)
            n -= k
        return u1, u2


def _simulate_chunk(config: SimConfig, start: int, stop: int, window_steps: tuple[int, ...]):
    drv = _Driver(config)
    n = stop - start
    nw = len(window_steps)
    counts = np.zeros((nw, 2, n), dtype=np.int64)
    q = np.zeros((nw, 2, n))
    phase_diff = np.zeros((nw, n))
    for j in range(n):
        rng = trial_rng(config.master_seed, start + j)
        u1, u2 = drv.initial_phases(rng)
        u1, u2 = drv.advance(u1, u2, drv.burn_steps, rng)
        u1, u2 = u1 % TWO_PI, u2 % TWO_PI
        s1, s2 = u1, u2
        done = 0
        for w, steps in enumerate(window_steps):
            u1, u2 = drv.advance(u1, u2, steps - done, rng)
            done = steps
            counts[w, 0, j] = math.floor(u1 / TWO_PI)
            counts[w, 1, j] = math.floor(u2 / TWO_PI)
            q[w, 0, j] = u1 - s1
            q[w, 1, j] = u2 - s2
            phase_diff[w, j] = (u2 - u1) % TWO_PI
    return counts, q, phase_diff


def _chunks(trials: int, workers: int) -> list[tuple[int, int]]:
    n_chunks = max(1, min(trials, 4 * workers))
    edges = np.linspace(0, trials, n_chunks + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _map_chunks(fn, config: SimConfig, extra, workers: int):
    chunks = _chunks(config.trials, workers)
    if workers <= 1:
        return [fn(config, a, b, extra) for a, b in chunks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, config, a, b, extra) for a, b in chunks]
        return [f.result() for f in futures]


@dataclass(frozen=True)
class TrialRecord:
    spike_count_1: int
    spike_count_2: int
    total_phase_1: float
    total_phase_2: float
    spiked_1: bool
    spiked_2: bool
    final_phase_diff: float


@dataclass(frozen=True)
class TrialRecords:
    """Per-trial outcomes for one observation window, stored column-wise."""

    T: float
    dt: float
    spike_count_1: np.ndarray
    spike_count_2: np.ndarray
    total_phase_1: np.ndarray
    total_phase_2: np.ndarray
    final_phase_diff: np.ndarray
    config: SimConfig | None = field(default=None, compare=False)

    @property
    def spiked_1(self) -> np.ndarray:
        return self.spike_count_1 > 0

    @property
    def spiked_2(self) -> np.ndarray:
        return self.spike_count_2 > 0

    def __len__(self) -> int:
        return len(self.spike_count_1)

    def __getitem__(self, i: int) -> TrialRecord:
        return TrialRecord(
            int(self.spike_count_1[i]),
            int(self.spike_count_2[i]),
            float(self.total_phase_1[i]),
            float(self.total_phase_2[i]),
            bool(self.spiked_1[i]),
            bool(self.spiked_2[i]),
            float(self.final_phase_diff[i]),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def proxy_gap(self) -> float:
        """Largest ``|q_i/2pi - count_i|`` over trials and both oscillators."""
        g1 = np.abs(self.total_phase_1 / TWO_PI - self.spike_count_1)
        g2 = np.abs(self.total_phase_2 / TWO_PI - self.spike_count_2)
        return float(max(g1.max(), g2.max()))

    def columns(self) -> dict[str, np.ndarray]:
        return {
            "trial": np.arange(len(self)),
            "spike_count_1": self.spike_count_1,
            "spike_count_2": self.spike_count_2,
            "total_phase_1": self.total_phase_1,
            "total_phase_2": self.total_phase_2,
            "spiked_1": self.spiked_1.astype(int),
            "spiked_2": self.spiked_2.astype(int),
            "final_phase_diff": self.final_phase_diff,
        }


def run_windows(config: SimConfig, windows, workers: int = 1) -> list[TrialRecords]:
    """Simulate once and record nested windows ``[0, T_k]`` after the burn-in.

    All windows share the same trials, so estimates for different ``T`` are
    correlated with each other but each one is individually valid.
    """
    windows = [float(T) for T in windows]
    if not windows:
        raise ConfigError("window_T", "need at least one window")
    steps = tuple(steps_for(T, config.dt) for T in windows)
    order = np.argsort(steps, kind="stable")
    sorted_steps = tuple(steps[i] for i in order)
    parts = _map_chunks(_simulate_chunk, config, sorted_steps, workers)
    counts = np.concatenate([p[0] for p in parts], axis=2)
    q = np.concatenate([p[1] for p in parts], axis=2)
    diff = np.concatenate([p[2] for p in parts], axis=1)
    out: list[TrialRecords | None] = [None] * len(windows)
    for w, i in enumerate(order):
        out[i] = TrialRecords(
            T=windows[i],
            dt=config.dt,
            spike_count_1=counts[w, 0],
            spike_count_2=counts[w, 1],
            total_phase_1=q[w, 0],
            total_phase_2=q[w, 1],
            final_phase_diff=diff[w],
            config=replace(config, window_T=windows[i]),
        )
    return out


def run_trials(config: SimConfig, workers: int = 1) -> TrialRecords:
    """Simulate ``config.trials`` independent trials of one window."""
    return run_windows(config, [config.window_T], workers)[0]


# --- estimators -------------------------------------------------------------


@dataclass(frozen=True)
class CorrelationEstimate:
    value: float
    std_error: float
    n: int
    estimator: str


def _pearson_rows(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    xm = x - x.mean(axis=-1, keepdims=True)
    ym = y - y.mean(axis=-1, keepdims=True)
    sxy = np.sum(xm * ym, axis=-1)
    sxx = np.sum(xm * xm, axis=-1)
    syy = np.sum(ym * ym, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return sxy / np.sqrt(sxx * syy)


def _flat(x: np.ndarray) -> bool:
    # rounding in long deterministic runs leaves ~1e-13 spread in the total phase
    return np.ptp(x) <= 1e-9 * max(1.0, float(np.max(np.abs(x))))


def pearson_with_bootstrap(x, y, estimator: str, resamples: int = BOOTSTRAP_RESAMPLES, seed: int = 0) -> CorrelationEstimate:
    """Pearson correlation with a nonparametric bootstrap standard error.

    The bootstrap stream is seeded, so repeated calls give identical output.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    if n < 2 or len(y) != n:
        raise ValueError("need two equally long samples of size >= 2")
    if _flat(x) or _flat(y):
        raise DegenerateStatisticError(f"{estimator}: zero variance in one of the samples")
    value = float(np.clip(_pearson_rows(x, y), -1.0, 1.0))
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    idx = rng.integers(0, n, size=(resamples, n))
    boot = _pearson_rows(x[idx], y[idx])
    boot = boot[np.isfinite(boot)]
    se = float(np.std(boot, ddof=1)) if len(boot) > 1 else float("nan")
    return CorrelationEstimate(value=value, std_error=se, n=n, estimator=estimator)


def estimate_spike_corr(records: TrialRecords, seed: int = 0) -> CorrelationEstimate:
    return pearson_with_bootstrap(records.spike_count_1, records.spike_count_2, "pearson_counts", seed=seed)


def estimate_total_phase_corr(records: TrialRecords, seed: int = 0) -> CorrelationEstimate:
    return pearson_with_bootstrap(records.total_phase_1, records.total_phase_2, "pearson_total_phase", seed=seed)


def estimate_binary_corr(records: TrialRecords, seed: int = 0) -> CorrelationEstimate:
    """Phi coefficient of the spike-presence indicators (windows up to one period)."""
    if records.T > TWO_PI * (1 + 1e-12):
        raise ValueError(f"binary spike correlation needs T <= 2pi, got {records.T!r}")
    return pearson_with_bootstrap(records.spiked_1, records.spiked_2, "phi_binary", seed=seed)


def combined_se(a: CorrelationEstimate, b: CorrelationEstimate) -> float:
    return math.hypot(a.std_error, b.std_error)


# --- empirical density --------------------------------------------------------


@dataclass(frozen=True)
class PhaseHistogram:
    """Histogram of the phase difference with bins centred on ``2 pi k / n``."""

    phi: np.ndarray
    mass: np.ndarray
    samples: int

    @property
    def n(self) -> int:
        return len(self.phi)

    @property
    def values(self) -> np.ndarray:
        """Density estimate per radian."""
        return self.mass / (TWO_PI / self.n)

    def l1_distance(self, density) -> float:
        """``int |hist - P| dphi`` against a density callable, midpoint rule."""
        return float(np.sum(np.abs(self.values - density(self.phi))) * (TWO_PI / self.n))


def _sample_chunk(config: SimConfig, start: int, stop: int, period_steps: int):
    drv = _Driver(config)
    per_trial = steps_for(config.window_T, config.dt) // period_steps
    out = np.empty((stop - start, per_trial))
    for j in range(stop - start):
        rng = trial_rng(config.master_seed, start + j)
        u1, u2 = drv.initial_phases(rng)
        u1, u2 = drv.advance(u1, u2, drv.burn_steps, rng)
        for k in range(per_trial):
            u1, u2 = drv.advance(u1, u2, period_steps, rng)
            out[j, k] = (u2 - u1) % TWO_PI
    return out


def empirical_phase_density(config: SimConfig, n_bins: int = 64, workers: int = 1) -> PhaseHistogram:
    """Histogram of ``theta2 - theta1`` sampled once per period after the burn-in.

    Each trial contributes ``window_T / 2pi`` samples; consecutive samples of
    one trial are correlated.
    """
    if n_bins < 32:
        raise ValueError(f"n_bins must be >= 32, got {n_bins}")
    period_steps = steps_for(TWO_PI, config.dt, "dt")
    if steps_for(config.window_T, config.dt) < period_steps:
        raise ConfigError("window_T", "must cover at least one period")
    parts = _map_chunks(_sample_chunk, config, period_steps, workers)
    phi = np.concatenate([p.ravel() for p in parts])
    width = TWO_PI / n_bins
    # bin k is centred on 2 pi k / n, wrapping the last half-bin onto bin 0
    idx = np.floor((phi + 0.5 * width) / width).astype(np.int64) % n_bins
    mass = np.bincount(idx, minlength=n_bins) / len(phi)
    return PhaseHistogram(phi=np.arange(n_bins) * width, mass=mass, samples=len(phi))


def analytic_density_callable(config: SimConfig):
    shape = config.shape
    return lambda phi: stationary_density(shape, config.c, phi)


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)

