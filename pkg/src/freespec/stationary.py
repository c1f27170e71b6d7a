"""The stationary law of ``S U S U*`` (``U`` Haar unitary free from ``S``).

Its Herglotz transform is ``H(z) = sqrt(1 + 4 kappa^2 z / (1 - z)^2)``.  On the
circle ``z = e^{i psi}`` one has ``z / (1 - z)^2 = -1 / (4 sin^2(psi/2))``, so
the law is an atom of mass ``|kappa|`` at ``z = 1`` plus the density

    sqrt(1 - kappa^2 / sin^2(psi/2))   on   |sin(psi/2)| >= |kappa|

with respect to the normalised Haar measure ``dpsi / 2pi``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from .moments import RankParam
from .numeric import Poly, jacobi_P10, pochhammer

__all__ = [
    "CircleMeasure",
    "StationaryMoments",
    "herglotz_stationary",
    "stationary_measure",
    "stationary_density",
    "stationary_moment_jacobi",
    "stationary_moment_sum",
    "stationary_moments_taylor",
]

QUAD_TOL = 1e-13


def herglotz_stationary(rank: RankParam, z: complex) -> complex:
    """Principal-branch ``sqrt(1 + 4 kappa^2 z / (1-z)^2)`` for ``|z| < 1``."""
    if abs(z) >= 1:
        raise ValueError(f"|z| must be < 1, got {abs(z)}")
    z = complex(z)
    return cmath.sqrt(1 + 4 * float(rank.eps) * z / (1 - z) ** 2)


def stationary_density(rank: RankParam, psi):
    """Density of the continuous part w.r.t. ``dpsi/2pi`` (vectorised)."""
    k = abs(float(rank.kappa))
    s = np.abs(np.sin(np.asarray(psi, dtype=float) / 2))
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.where(s > k, (s - k) * (s + k) / (s * s), 0.0)
    out = np.sqrt(np.clip(val, 0.0, None))
    return out if out.ndim else float(out)


@dataclass
class CircleMeasure:
    """Atoms plus a density on the unit circle.

    ``density`` is taken w.r.t. ``dpsi / 2pi``; ``arcs`` are the intervals
    ``(start, end)`` in ``[0, 2pi]`` carrying it.  If ``sqrt_edges`` is set the
    density vanishes like a square root at every arc end and the quadrature
    substitutes ``psi = edge + w^2`` on each half of an arc.
    """

    atoms: List[Tuple[float, Fraction]]
    density: Callable
    arcs: List[Tuple[float, float]]
    sqrt_edges: bool = True
    support: str = field(default="")

    def atom_mass(self) -> float:
        return float(sum(w for _, w in self.atoms))

    def integrate_density(self, f: Callable[[float], float] = None) -> float:
        """``int f(psi) density(psi) dpsi / 2pi`` over the arcs."""
        if f is None:
            f = lambda psi: 1.0
        total = 0.0
        for a, b in self.arcs:
            if b <= a:
                continue
            mid = 0.5 * (a + b)
            if self.sqrt_edges:
                lo = lambda w, a=a: 2 * w * f(a + w * w) * self.density(a + w * w)
                hi = lambda w, b=b: 2 * w * f(b - w * w) * self.density(b - w * w)
                span = math.sqrt(mid - a)
                for g in (lo, hi):
                    val, _ = quad(g, 0.0, span, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=400)
                    total += val
            else:
                val, _ = quad(lambda p: f(p) * self.density(p), a, b,
                              epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=400)
                total += val
        return total / (2 * math.pi)

    def mass(self) -> float:
        return self.atom_mass() + self.integrate_density()

    def moment(self, n: int) -> complex:
        """``int z^n dmu``."""
        atoms = sum(float(w) * cmath.exp(1j * n * a) for a, w in self.atoms)
        re = self.integrate_density(lambda p: math.cos(n * p))
        im = self.integrate_density(lambda p: math.sin(n * p))
        return atoms + complex(re, im)


def stationary_measure(rank: RankParam) -> CircleMeasure:
    k = abs(rank.kappa)
    atoms = [(0.0, k)] if k else []
    if k == 1:
        return CircleMeasure(atoms, lambda psi: 0.0, [], support="{1}")
    edge = 2 * math.asin(float(k))
    arc = (edge, 2 * math.pi - edge)
    return CircleMeasure(
        atoms,
        lambda psi: stationary_density(rank, psi),
        [arc],
        sqrt_edges=k != 0,
        support=f"|sin(psi/2)| >= {k}",
    )


def stationary_moment_jacobi(rank: RankParam, n: int) -> Fraction:
    """``r_n = kappa int_0^kappa P_{n-1}^{(1,0)}(1 - 2 s^2) ds``, exactly."""
    if n < 1:
        raise ValueError("n must be >= 1")
    inner = Poly([1, 0, -2])
    integrand = jacobi_P10(n - 1).compose(inner)
    kappa = rank.kappa
    return kappa * integrand.antiderivative()(kappa)


def stationary_moment_sum(rank: RankParam, n: int) -> Fraction:
    """Finite Pochhammer sum from the binomial expansion of ``H_inf``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x = -4 * rank.eps
    total = Fraction(0)
    for k in range(1, n + 1):
        total += (
            pochhammer(Fraction(-1, 2), k) / math.factorial(k)
            * pochhammer(2 * k, n - k) / math.factorial(n - k)
            * x**k
        )
    return total / 2


def stationary_moments_taylor(
    rank: RankParam, n_max: int, radius: float = 0.5, points: int = 512
) -> np.ndarray:
    """Taylor coefficients of ``(H_inf - 1)/2`` by the trapezoidal Cauchy
    integral on ``|z| = radius``; returns ``[r_1, ..., r_{n_max}]``."""
    if not 0 < radius < 1:
        raise ValueError("radius must lie in (0, 1)")
    w = radius * np.exp(2j * np.pi * np.arange(points) / points)
    h = np.sqrt(1 + 4 * float(rank.eps) * w / (1 - w) ** 2)
    coeffs = np.fft.fft(h) / points
    n = np.arange(1, n_max + 1)
    return (coeffs[n] / radius**n).real / 2


class StationaryMoments:
    """Moment provider returning the exact stationary ``r_n`` for any ``t``."""

    def __init__(self, rank: RankParam):
        self.rank = rank
        self.n_max = None
        self._vals: List[Fraction] = []

    def exact(self, n: int) -> List[Fraction]:
        while len(self._vals) < n:
            self._vals.append(stationary_moment_sum(self.rank, len(self._vals) + 1))
        return self._vals[:n]

    def moments(self, t: float, n: int) -> Sequence[Fraction]:
        return self.exact(n)
