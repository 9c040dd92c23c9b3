"""Quadrature on the circle and over the square spike windows.

Periodic integrands are integrated with the equal-weight trapezoid rule,
which converges geometrically for analytic periodic functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

TWO_PI = 2.0 * np.pi


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid ``phi_k = 2*pi*k/n`` on ``[0, 2*pi)``."""

    n: int

    def __post_init__(self):
        if not is_power_of_two(self.n) or self.n < 64:
            raise ValueError(f"grid size must be a power of two >= 64, got {self.n}")

    @property
    def spacing(self) -> float:
        return TWO_PI / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n) * self.spacing


def periodic_trapezoid(samples) -> float:
    """Integral over one period from ``n`` equally spaced samples.

    The right endpoint is the left endpoint again, so all weights are equal.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[-1]
    if n < 2:
        raise ValueError("need at least two samples")
    return float(np.sum(samples, axis=-1) * (TWO_PI / n))


def _window_trapezoid(density, T: float, n: int) -> float:
    w = np.full(n + 1, T / n)
    w[0] = w[-1] = 0.5 * T / n
    # P(y - x) only depends on the lag; evaluate each distinct lag once.
    lags = np.arange(-n, n + 1) * (T / n)
    p_lag = np.asarray(density(lags), dtype=float)
    idx = np.arange(n + 1)
    vals = p_lag[idx[None, :] - idx[:, None] + n]
    return float(w @ vals @ w) / TWO_PI


def window_double_integral(density: Callable[[np.ndarray], np.ndarray], T: float, n: int = 2048) -> float:
    """Direct 2-D value of ``(1/2pi) * int int P(y - x) dx dy`` over
    ``[2pi - T, 2pi]^2``.

    Tensor-product trapezoid on ``n`` and ``n/2`` panels per side, combined
    by one Richardson step (the square is not a period, so the plain rule is
    only second order). Kept as a reference for the reduced one-dimensional
    form in :mod:`corrtransfer.shorttime`.
    """
    if not 0.0 < T <= TWO_PI:
        raise ValueError(f"window length must lie in (0, 2pi], got {T}")
    if n < 4 or n % 2:
        raise ValueError("n must be an even number >= 4")
    fine = _window_trapezoid(density, T, n)
    coarse = _window_trapezoid(density, T, n // 2)
    return fine + (fine - coarse) / 3.0
