"""Binary spike correlation over windows shorter than one period.

With ``X``, ``Y`` the spike-presence indicators of the two oscillators in a
window of length ``T``, the correlation is
``(f11 - (T/2pi)^2) / ((T/2pi) (1 - T/2pi))``. The double integral for
``f11`` depends on ``y - x`` only, so it collapses to
``f11 = (1/2pi) int_{-T}^{T} (T - |u|) P(u) du``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import check_correlation, density_peak, stationary_density
from .prc import PrcShape
from .quadrature import TWO_PI

# Gauss-Legendre on [0, T] for the reduced integral; the integrand is
# analytic there (the |u| kink sits at the endpoint).
_GL_NODES = 512


def _check_window(T: float) -> float:
    T = float(T)
    if not (0.0 < T < TWO_PI):
        raise ValueError(f"window length must lie in (0, 2pi), got {T!r}")
    return T


@dataclass(frozen=True)
class JointSpikeProbs:
    f00: float
    f01: float
    f10: float
    f11: float
    T: float

    @property
    def spike_prob(self) -> float:
        """Marginal probability that one oscillator spikes, ``f10 + f11``."""
        return self.f10 + self.f11


def _f11(shape: PrcShape, c: float, T: float) -> float:
    nodes, weights = np.polynomial.legendre.leggauss(_GL_NODES)
    u = 0.5 * T * (nodes + 1.0)
    w = 0.5 * T * weights
    # P is even: the integral over [-T, T] is twice the one over [0, T].
    return 2.0 * float(np.sum(w * (T - u) * stationary_density(shape, c, u))) / TWO_PI


def joint_spike_probs(shape: PrcShape, c: float, T: float) -> JointSpikeProbs:
    T = _check_window(T)
    c = check_correlation(c)
    f11 = _f11(shape, c, T)
    f10 = T / TWO_PI - f11
    f00 = 1.0 - 2.0 * f10 - f11
    return JointSpikeProbs(f00=f00, f01=f10, f10=f10, f11=f11, T=T)


def cout_short(shape: PrcShape, c: float, T: float) -> float:
    """Spike-presence correlation for a window ``0 < T < 2pi``."""
    probs = joint_spike_probs(shape, c, T)
    p = T / TWO_PI
    return (probs.f11 - p * p) / (p * (1.0 - p))


def cout_short_slope(shape: PrcShape, c: float) -> float:
    """Initial slope ``d c_out / dT`` at ``T = 0``: ``P(0) - 1/2pi``."""
    return density_peak(shape, c) - 1.0 / TWO_PI


def susceptibility_ratio(c: float) -> float:
    """Type II over type I initial slope; tends to 3 as ``c -> 0``."""
    c = float(c)
    if not 0.0 < c < 1.0:
        raise ValueError(f"c must lie in (0, 1), got {c!r}")
    slope_i = cout_short_slope(PrcShape.type_i(), c)
    if c < 1e-12 or slope_i <= 0.0:
        raise ZeroDivisionError(f"type I slope underflows at c={c!r}")
    return cout_short_slope(PrcShape.type_ii(), c) / slope_i


def slope_type_i_closed(c: float) -> float:
    """``(1/pi) c / (3(1 - c) + sqrt(3(c - 1)(c - 3)))``, cancellation-free for small c."""
    return c / (math.pi * (3 * (1 - c) + math.sqrt(3 * (c - 1) * (c - 3))))


def slope_type_ii_closed(c: float) -> float:
    return ((1 + c) / math.sqrt(1 - c * c) - 1) / TWO_PI
