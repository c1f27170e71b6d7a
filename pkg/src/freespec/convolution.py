"""Transforms of the 1/2-fold free convolution of ``a1 - a2``.

``a1`` and ``a2`` are free copies of ``S``.  The R-transform of ``S`` is

    R_{a1}(y) = (sqrt(1 + 4 y (y + kappa)) - 1) / (2 y)

and ``R_{-a2}(y) = -R_{a2}(-y)``; the object studied here has
``R = (R_{a1} + R_{-a2}) / 2`` and ``K(y) = R(y) + 1/y``.  Clearing the square
roots in ``K(y) = z`` leaves the cubic

    y^3 - h1 y^2 + h2 y - h3 = 0,
    h1 = (2z^2 - 1) / (z (z^2 - 1)),
    h2 = (5z^2 + eps - 1) / (4 z^2 (z^2 - 1)),
    h3 = 1 / (4 z (z^2 - 1)),

whose root behaving like ``1/z`` at infinity is the Cauchy transform.  The
object need not be a probability measure, so only moments and transforms are
computed, never a density.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from .moments import RankParam
from .ncfree import cumulants_of_S, moments_from_cumulants

__all__ = [
    "BranchCutWarning",
    "RootTrackingError",
    "Cubic",
    "cubic_at",
    "cubic_roots",
    "r_transform_a1",
    "r_transform",
    "k_transform",
    "half_convolution_cumulants",
    "half_convolution_moments",
    "cauchy_via_cubic",
    "laurent_moments",
    "reduced_cubic_residual",
    "vieta_residuals",
    "START_Z",
]

SERIES_RADIUS = 1e-6
START_Z = 1e3


class BranchCutWarning(RuntimeWarning):
    pass


class RootTrackingError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Cubic:
    """Coefficients of ``y^3 - h1 y^2 + h2 y - h3`` at the point ``z``."""

    z: complex
    h1: complex
    h2: complex
    h3: complex

    def __call__(self, y: complex) -> complex:
        return ((y - self.h1) * y + self.h2) * y - self.h3

    def derivative(self, y: complex) -> complex:
        return (3 * y - 2 * self.h1) * y + self.h2


def cubic_at(rank: RankParam, z: complex) -> Cubic:
    z = complex(z)
    if z == 0 or z * z == 1:
        raise ValueError("z must avoid 0 and +-1")
    eps = float(rank.eps)
    d = z * z - 1
    return Cubic(
        z=z,
        h1=(2 * z * z - 1) / (z * d),
        h2=(5 * z * z + eps - 1) / (4 * z * z * d),
        h3=1 / (4 * z * d),
    )


def _polish(c: Cubic, y: complex) -> complex:
    d = c.derivative(y)
    if d == 0:
        return y
    nxt = y - c(y) / d
    return nxt if abs(c(nxt)) <= abs(c(y)) else y


def cubic_roots(c: Cubic) -> Tuple[complex, complex, complex]:
    """All three roots.

    Cardano's formula in complex arithmetic supplies the candidates; the best
    conditioned one is polished by Newton and the other two come from the
    deflated quadratic, which keeps a nearly double pair accurate.
    """
    shift = c.h1 / 3
    p = c.h2 - c.h1 * c.h1 / 3
    q = -2 * c.h1 ** 3 / 27 + c.h1 * c.h2 / 3 - c.h3
    disc = cmath.sqrt(q * q / 4 + p ** 3 / 27)
    # the larger of the two cube-root arguments avoids cancellation
    w = -q / 2 + disc
    if abs(-q / 2 - disc) > abs(w):
        w = -q / 2 - disc
    if w == 0:
        return (shift, shift, shift)
    big = w ** (1 / 3)
    omega = cmath.exp(2j * math.pi / 3)
    cands = [big * omega ** k - p / (3 * big * omega ** k) + shift for k in range(3)]
    y1 = max(cands, key=lambda r: abs(c.derivative(r)))
    for _ in range(3):
        y1 = _polish(c, y1)
    if y1 == 0:
        return tuple(cands)
    # y^2 - (h1 - y1) y + h3 / y1
    b = c.h1 - y1
    prod = c.h3 / y1
    root = cmath.sqrt(b * b - 4 * prod)
    y2 = (b + root) / 2 if abs(b + root) >= abs(b - root) else (b - root) / 2
    y3 = prod / y2 if y2 != 0 else 0j
    return (y1, y2, y3)


def r_transform_a1(rank: RankParam, y: complex) -> complex:
    """Principal-branch R-transform of ``S``; a Taylor series near ``y = 0``."""
    kappa = float(rank.kappa)
    y = complex(y)
    if abs(y) < SERIES_RADIUS:
        c = cumulants_of_S(rank, 4)
        return sum(float(ck) * y ** k for k, ck in enumerate(c))
    rad = 1 + 4 * y * (y + kappa)
    if rad.real <= 0 and abs(rad.imag) < 1e-12:
        warnings.warn(f"R-transform evaluated on its branch cut at y={y}", BranchCutWarning)
    return (cmath.sqrt(rad) - 1) / (2 * y)


def r_transform(rank: RankParam, y: complex) -> complex:
    """``(R_{a1}(y) + R_{-a2}(y)) / 2`` with ``R_{-a2}(y) = -R_{a1}(-y)``."""
    return (r_transform_a1(rank, y) - r_transform_a1(rank, -y)) / 2


def k_transform(rank: RankParam, y: complex) -> complex:
    return r_transform(rank, y) + 1 / y


def half_convolution_cumulants(rank: RankParam, k_max: int) -> List[Fraction]:
    """``(c_k(a1) + c_k(-a2)) / 2``; the odd ones cancel."""
    c = cumulants_of_S(rank, k_max)
    return [(ck + (-1) ** k * ck) / 2 for k, ck in enumerate(c, start=1)]


def half_convolution_moments(rank: RankParam, n_max: int) -> List[Fraction]:
    """Moments ``[m_1, ..., m_{n_max}]`` by the free moment-cumulant formula."""
    if not 1 <= n_max <= 12:
        raise ValueError("n_max must lie in 1..12")
    return moments_from_cumulants(half_convolution_cumulants(rank, n_max), n_max)


def _track(rank: RankParam, path: np.ndarray, y0: complex, min_step: float = 1e-9) -> List[complex]:
    """Follow one root of the cubic along the points of ``path``.

    Each leg is cut into sub-steps.  A secant predictor guesses the next value
    and the step is halved until the root nearest the guess is clearly nearer
    than the others (ratio 1/4); it grows again after a success.
    """
    y = y0
    slope = 0j
    out = []
    here = complex(path[0])
    for target in path:
        target = complex(target)
        frac = 1.0
        while here != target:
            step = here + (target - here) * frac
            guess = y + slope * (step - here)
            roots = sorted(cubic_roots(cubic_at(rank, step)), key=lambda r: abs(r - guess))
            if abs(roots[0] - guess) <= abs(roots[1] - guess) / 4:
                slope = (roots[0] - y) / (step - here)
                y, here = roots[0], (target if frac == 1.0 else step)
                frac = min(1.0, 2 * frac)
            elif frac * abs(target - here) < min_step:
                raise RootTrackingError(f"roots collide near z={step}")
            else:
                frac /= 2
        out.append(y)
    return out


def _start_root(rank: RankParam) -> complex:
    roots = cubic_roots(cubic_at(rank, START_Z))
    return min(roots, key=lambda r: abs(r - 1 / START_Z))


def cauchy_via_cubic(rank: RankParam, z: complex, steps: int = 128) -> complex:
    """Root of the cubic continued from ``y ~ 1/z`` at ``z = 1000``.

    For ``eps > 0`` the cubic has complex branch points, so off the real axis
    the result depends on the path.  The path used runs from 1000 up to
    ``Re z + 1000 i sign(Im z)`` and then straight to ``z`` (real ``z < 0``
    is approached from above); for real ``z > 0`` it is the real segment,
    geometrically spaced.
    """
    z = complex(z)
    if z.imag == 0 and z.real > 0:
        path = np.geomspace(START_Z, z.real, steps + 1).astype(complex)
    else:
        corner = complex(z.real, math.copysign(START_Z, z.imag))
        leg1 = START_Z + (corner - START_Z) * np.linspace(0.0, 1.0, steps + 1)
        leg2 = corner + (z - corner) * np.linspace(0.0, 1.0, steps + 1)[1:]
        path = np.concatenate([leg1, leg2])
    return _track(rank, path, _start_root(rank))[-1]


def laurent_moments(rank: RankParam, n_max: int, radius: float = 5.0, points: int = 1024) -> np.ndarray:
    """``[m_1, ..., m_{n_max}]`` from ``m_k = (1/2 pi i) \\oint z^k G(z) dz``.

    ``G`` is continued from ``z = radius`` once around the circle.
    """
    start = cauchy_via_cubic(rank, radius)
    circle = radius * np.exp(2j * np.pi * np.arange(points) / points)
    g = np.asarray(_track(rank, circle, start))
    k = np.arange(1, n_max + 1)
    vals = np.array([np.mean(g * circle ** (kk + 1)) for kk in k])
    return vals.real


def reduced_cubic_residual(rank: RankParam, z: complex, y: complex) -> complex:
    """Residual of ``u^3 + 3u - q`` with ``u = (3y - h1)/s``, ``s^2 = 3h2 - h1^2``
    and ``q = (2 h1^3 - 9 h1 h2 + 27 h3) / s^3``."""
    c = cubic_at(rank, z)
    s = cmath.sqrt(3 * c.h2 - c.h1 ** 2)
    u = (3 * y - c.h1) / s
    q = (2 * c.h1 ** 3 - 9 * c.h1 * c.h2 + 27 * c.h3) / s ** 3
    return u ** 3 + 3 * u - q


def vieta_residuals(c: Cubic, roots=None) -> Tuple[float, float, float]:
    """Deviations of the elementary symmetric functions of the roots from
    ``h1, h2, h3``."""
    if roots is None:
        roots = cubic_roots(c)
    a, b, d = roots
    return (
        abs(a + b + d - c.h1),
        abs(a * b + a * d + b * d - c.h2),
        abs(a * b * d - c.h3),
    )
