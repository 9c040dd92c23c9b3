"""Sinusoidal phase resetting curve family.

``Delta(theta; alpha) = -sin(theta + alpha) + sin(alpha)`` interpolates between
a type II curve (``alpha = 0``, ``-sin theta``) and a type I curve
(``alpha = pi/2``, ``1 - cos theta``). Phases are in radians with period 2*pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TYPE_I = math.pi / 2
TYPE_II = 0.0


@dataclass(frozen=True)
class PrcShape:
    """PRC shape parameter ``alpha`` in ``[0, pi/2]``."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not math.isfinite(a) or a < 0.0 or a > math.pi / 2 + 1e-15:
            raise ValueError(f"alpha must lie in [0, pi/2], got {self.alpha!r}")
        object.__setattr__(self, "alpha", min(a, math.pi / 2))

    @classmethod
    def type_i(cls) -> "PrcShape":
        return cls(TYPE_I)

    @classmethod
    def type_ii(cls) -> "PrcShape":
        return cls(TYPE_II)

    @property
    def sin2(self) -> float:
        """``sin(alpha)**2``, the quantity every closed form depends on."""
        return math.sin(self.alpha) ** 2


def delta(shape: PrcShape, theta):
    """PRC value at phase ``theta``."""
    theta = np.mod(theta, 2 * np.pi)
    return -np.sin(theta + shape.alpha) + math.sin(shape.alpha)


def delta_prime(shape: PrcShape, theta):
    """Derivative of the PRC with respect to phase."""
    theta = np.mod(theta, 2 * np.pi)
    return -np.cos(theta + shape.alpha)


def autocorr(shape: PrcShape, x):
    """PRC autocorrelation ``h(x) = int_0^{2pi} Delta(y) Delta(y + x) dy``.

    For this family ``h(x) = pi*cos(x) + 2*pi*sin(alpha)**2``.
    """
    return np.pi * np.cos(x) + 2 * np.pi * shape.sin2


def autocorr_integral(shape: PrcShape) -> float:
    """``int_0^{2pi} h(x) dx = 4*pi**2*sin(alpha)**2``; zero for the pure sinusoid."""
    return 4 * math.pi**2 * shape.sin2
