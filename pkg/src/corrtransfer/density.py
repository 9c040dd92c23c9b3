"""Stationary density of the phase difference ``phi = theta2 - theta1``.

In the weak-noise limit the density is ``P = N / G`` with
``G(x) = 1 - c*h(x)/h(0)``; for the sinusoidal PRC family the
normalization is available in closed form. The density does not depend on
the noise amplitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .prc import PrcShape, autocorr
from .quadrature import TWO_PI, PeriodicGrid, periodic_trapezoid


class DegenerateDensityError(ValueError):
    """Raised at ``c = 1``, where the density collapses onto ``phi = 0``."""


@dataclass(frozen=True)
class NoiseSpec:
    """Input correlation ``c`` and noise amplitude ``sigma``."""

    c: float
    sigma: float = 0.05

    def __post_init__(self):
        check_correlation(self.c, allow_one=True)
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError(f"sigma must be finite and >= 0, got {self.sigma!r}")


def check_correlation(c: float, allow_one: bool = False) -> float:
    c = float(c)
    if not (0.0 <= c <= 1.0):
        raise ValueError(f"input correlation must lie in [0, 1], got {c!r}")
    if c == 1.0 and not allow_one:
        raise DegenerateDensityError("the stationary density is a point mass at c = 1")
    return c


def g_function(shape: PrcShape, c: float, x):
    """``G(x) = 1 - c*h(x)/h(0)``; strictly positive for ``c < 1``."""
    c = check_correlation(c, allow_one=True)
    g = 1.0 - c * autocorr(shape, x) / autocorr(shape, 0.0)
    if c == 1.0 and np.any(g <= 1e-15):
        raise DegenerateDensityError("G vanishes at x = 0 when c = 1")
    return g


def stationary_density(shape: PrcShape, c: float, phi):
    """Closed-form stationary density ``P(phi; c, alpha)`` (per radian)."""
    c = check_correlation(c)
    cos2a = math.cos(2 * shape.alpha)
    numer = math.sqrt((c - 1) * (cos2a - 2) * (2 + (c - 1) * cos2a))
    return numer / (TWO_PI * (2 - c + (c - 1) * cos2a - c * np.cos(phi)))


def density_type_i(c: float, phi):
    """Closed form at ``alpha = pi/2``."""
    c = check_correlation(c)
    return math.sqrt(3.0) / TWO_PI * math.sqrt(c * c - 4 * c + 3) / (3 - 2 * c - c * np.cos(phi))


def density_type_ii(c: float, phi):
    """Closed form at ``alpha = 0``."""
    c = check_correlation(c)
    return math.sqrt(1 - c * c) / (TWO_PI * (1 - c * np.cos(phi)))


def density_peak(shape: PrcShape, c: float) -> float:
    """``P(0; c, alpha)``."""
    return float(stationary_density(shape, c, 0.0))


@dataclass(frozen=True)
class DensityGrid:
    """Density samples at ``phi_k = 2 pi k / n``."""

    n: int
    values: np.ndarray
    c: float
    alpha: float

    def __post_init__(self):
        PeriodicGrid(self.n)
        if self.values.shape != (self.n,):
            raise ValueError("values must have length n")

    @property
    def phi(self) -> np.ndarray:
        return PeriodicGrid(self.n).nodes

    def total_mass(self) -> float:
        return periodic_trapezoid(self.values)


def density_grid(shape: PrcShape, c: float, n: int = 4096) -> DensityGrid:
    """Sample the stationary density on a periodic grid of ``n`` nodes."""
    grid = PeriodicGrid(n)
    values = np.asarray(stationary_density(shape, c, grid.nodes), dtype=float)
    values.setflags(write=False)
    return DensityGrid(n=n, values=values, c=float(c), alpha=shape.alpha)


def normalized_inverse_g(shape: PrcShape, c: float, phi, n: int = 4096):
    """``N / G(phi)`` with ``N`` found by periodic quadrature of ``1/G``.

    Independent of the closed form; used to cross-check it.
    """
    nodes = PeriodicGrid(n).nodes
    norm = 1.0 / periodic_trapezoid(1.0 / g_function(shape, check_correlation(c), nodes))
    return norm / g_function(shape, c, phi)
