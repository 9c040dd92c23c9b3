"""Output correlation of the total elapsed phase over long windows.

To lowest order in the noise amplitude the window length cancels and

    c_out = c * int_0^{2pi} P(phi) h(phi) / h(0) dphi,

which is evaluated here by periodic quadrature, together with the type I /
type II closed forms and the expansion for weak input correlation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .density import check_correlation, stationary_density
from .prc import PrcShape, autocorr
from .quadrature import PeriodicGrid, periodic_trapezoid

QUADRATURE_NODES = 4096


class Method(str, enum.Enum):
    QUADRATURE = "quadrature"
    CLOSED_FORM_I = "closed_form_I"
    CLOSED_FORM_II = "closed_form_II"
    SMALL_C_EXPANSION = "small_c_expansion"


@dataclass(frozen=True)
class LongTimeResult:
    c_out: float
    method: Method
    c: float
    alpha: float

    def __float__(self) -> float:
        return self.c_out


def cout_long(shape: PrcShape, c: float, n: int = QUADRATURE_NODES) -> LongTimeResult:
    """Long-window output correlation by periodic quadrature.

    ``c = 1`` is returned as its limit value 1 rather than integrated.
    """
    c = check_correlation(c, allow_one=True)
    if c == 1.0:
        return LongTimeResult(1.0, Method.QUADRATURE, c, shape.alpha)
    phi = PeriodicGrid(n).nodes
    integrand = c * stationary_density(shape, c, phi) * autocorr(shape, phi) / autocorr(shape, 0.0)
    value = min(max(periodic_trapezoid(integrand), 0.0), 1.0)
    return LongTimeResult(value, Method.QUADRATURE, c, shape.alpha)


def cout_long_closed_type1(c: float) -> float:
    c = check_correlation(c, allow_one=True)
    return 1.0 - math.sqrt(3.0 * (c - 3.0) * (c - 1.0)) / 3.0


def cout_long_closed_type2(c: float) -> float:
    c = check_correlation(c, allow_one=True)
    return 1.0 - math.sqrt(1.0 - c * c)


def cout_long_small_c(shape: PrcShape, c: float) -> float:
    """First-order expansion in ``c``: ``2c sin^2(a) / (2 + c - (1 + c) cos(2a))``.

    Vanishes identically for the pure sinusoid, whose autocorrelation
    integrates to zero.
    """
    c = check_correlation(c, allow_one=True)
    return 2 * c * shape.sin2 / (2 + c - (1 + c) * math.cos(2 * shape.alpha))


def cout_long_window(shape: PrcShape, c: float, T: float, n_phase: int = 256, n_time: int = 256) -> float:
    """Total-phase correlation at window length ``T`` before the order of
    integration is switched.

    Numerator and denominator are the triple integrals
    ``int int P(y - x) int_0^T Delta(s + x) Delta(s + y) ds dx dy`` (and the
    same with ``Delta(s + x)**2``); slow, for checking that ``T`` cancels.
    """
    from .prc import delta  # local: only this check needs Delta itself

    c = check_correlation(c)
    nodes = PeriodicGrid(n_phase).nodes
    x, y = np.meshgrid(nodes, nodes, indexing="ij")
    weight = stationary_density(shape, c, y - x)
    # Gauss-Legendre in s: the time integrand is not periodic unless T is a multiple of 2pi.
    gl_s, gl_w = np.polynomial.legendre.leggauss(n_time)
    s = 0.5 * T * (gl_s + 1.0)
    w = 0.5 * T * gl_w
    num = 0.0
    den = 0.0
    for sk, wk in zip(s, w):
        dx = delta(shape, sk + x)
        num += wk * np.sum(weight * dx * delta(shape, sk + y))
        den += wk * np.sum(weight * dx * dx)
    return c * num / den


def closed_form_for(shape: PrcShape, c: float) -> LongTimeResult | None:
    """Closed-form value when ``alpha`` is an endpoint of the family, else None."""
    if shape.alpha == math.pi / 2:
        return LongTimeResult(cout_long_closed_type1(c), Method.CLOSED_FORM_I, c, shape.alpha)
    if shape.alpha == 0.0:
        return LongTimeResult(cout_long_closed_type2(c), Method.CLOSED_FORM_II, c, shape.alpha)
    return None
