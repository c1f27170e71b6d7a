"""Moments of the free Jacobi process ``P Y_t P Y_t*`` from those of ``S Y_t S Y_t*``.

With ``S = 2P - 1`` and ``r_k = tau((S Y_t S Y_t*)^k)``,

    tau((P Y_t P Y_t*)^n) = binom(2n, n) / 2^{2n+1} + (2 theta - 1)/2
                            + 2^{-2n} sum_{k=1}^{n} binom(2n, n-k) r_k.

Writing ``r_k`` as an integral against the spectral law ``mu_t`` turns the sum
into ``int cos^{2n}(psi/2) dmu_t``, which tends to ``mu_t({1})`` as ``n`` grows.
Since ``mu_t({1}) = |2 theta - 1|`` the limit is ``max(2 theta - 1, 0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import List, Sequence, Tuple

import numpy as np

from .moments import OdeMoments, RankParam

__all__ = [
    "JacobiMoment",
    "LimitTable",
    "binomial_weights",
    "jacobi_moment",
    "cosine_kernel_identity",
    "limit_moment",
    "corollary_weight",
    "stationary_jacobi_moments",
    "stationary_jacobi_series",
    "TAIL_TOL",
]

# binomial tail mass below which the remaining r_k (all |r_k| <= 1) are dropped
TAIL_TOL = 1e-17


@dataclass(frozen=True)
class JacobiMoment:
    n: int
    theta: Fraction
    t: float
    value: float


def binomial_weights(n: int, tail_tol: float = 0.0) -> Tuple[np.ndarray, float]:
    """Weights ``binom(2n, n-k) / 4^n`` for ``k = 1..K`` and the dropped tail mass.

    ``K = n`` when ``tail_tol`` is 0; otherwise ``K`` is the smallest order whose
    remaining tail ``sum_{k > K}`` is below ``tail_tol``.  Each weight is an
    exact integer ratio rounded once.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    denom = 4 ** n
    weights = []
    c = math.comb(2 * n, n - 1)
    for k in range(1, n + 1):
        weights.append(c / denom)
        # binom(2n, n-k-1) = binom(2n, n-k) (n-k) / (n+k+1), exactly
        c = c * (n - k) // (n + k + 1)
    if tail_tol <= 0:
        return np.array(weights), 0.0
    tail = 0.0
    cut = n
    # accumulate from the far end; the terms decrease monotonically in k
    while cut > 0 and tail + weights[cut - 1] < tail_tol:
        tail += weights[cut - 1]
        cut -= 1
    return np.array(weights[:cut]), tail


def jacobi_moment(rank: RankParam, t: float, n: int, r_source, tail_tol: float = 0.0):
    """``tau((P Y_t P Y_t*)^n)``.

    ``r_source`` is a moment provider (``moments(t, k)``).  When it returns
    exact rationals and no truncation is requested the result is a Fraction;
    otherwise a float.  With ``tail_tol > 0`` only the orders whose binomial
    weight matters are requested, and the error is at most ``tail_tol``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    limit = getattr(r_source, "n_max", None)
    if tail_tol <= 0:
        if limit is not None and n > limit:
            raise ValueError(f"moment source holds k <= {limit}, needed {n}")
        r = list(r_source.moments(t, n))
        if all(isinstance(v, Rational) for v in r):
            total = Fraction(math.comb(2 * n, n), 2 ** (2 * n + 1)) + rank.kappa / 2
            total += sum(
                (math.comb(2 * n, n - k) * v for k, v in enumerate(r, start=1)), Fraction(0)
            ) / 4 ** n
            return total
        w, _ = binomial_weights(n)
    else:
        w, _ = binomial_weights(n, tail_tol)
        if limit is not None and w.size > limit:
            raise ValueError(f"moment source holds k <= {limit}, needed {w.size}")
        r = r_source.moments(t, w.size) if w.size else []
    head = math.comb(2 * n, n) / 2 ** (2 * n + 1) + float(rank.kappa) / 2
    return head + float(np.dot(w, np.asarray(r, dtype=float)))


def cosine_kernel_identity(n: int, phi: float) -> Tuple[float, float]:
    """Both sides of

        2^{-2n} sum_k binom(2n, n-k) (e^{ik phi} + e^{-ik phi})
            = cos^{2n}(phi/2) - 2^{-2n} binom(2n, n).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    w, _ = binomial_weights(n)
    k = np.arange(1, n + 1)
    lhs = float(np.dot(w, 2 * np.cos(k * phi)))
    rhs = math.cos(phi / 2) ** (2 * n) - math.comb(2 * n, n) / 4 ** n
    return lhs, rhs


@dataclass(frozen=True)
class LimitTable:
    theta: Fraction
    t: float
    n: List[int]
    values: List[float]
    limit: Fraction

    @property
    def errors(self) -> List[float]:
        return [abs(v - float(self.limit)) for v in self.values]

    def rate_constant(self) -> float:
        """Least-squares ``C`` in ``|error| ~ C / sqrt(n)``."""
        x = 1 / np.sqrt(np.asarray(self.n, dtype=float))
        e = np.asarray(self.errors)
        return float(np.dot(x, e) / np.dot(x, x))


def limit_moment(
    rank: RankParam, t: float, n_grid: Sequence[int], r_source=None, tail_tol: float = TAIL_TOL
) -> LimitTable:
    """``tau((P Y_t P Y_t*)^n)`` along ``n_grid`` and the limit ``max(2 theta - 1, 0)``.

    ``r_k(t)`` comes from the moment ODE by default; the binomial weights are
    cut where their tail drops below ``tail_tol``, so for ``n = 4000`` only
    about 380 orders are needed.
    """
    n_grid = [int(n) for n in n_grid]
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be increasing")
    if r_source is None:
        r_source = OdeMoments(rank)
    if n_grid:
        # one integration up to the largest order needed, reused below
        k_max = binomial_weights(n_grid[-1], tail_tol)[0].size
        if k_max:
            r_source.moments(t, k_max)
    values = [float(jacobi_moment(rank, t, n, r_source, tail_tol)) for n in n_grid]
    limit = max(2 * rank.theta - 1, Fraction(0))
    return LimitTable(rank.theta, t, n_grid, values, limit)


def corollary_weight(rank: RankParam) -> Fraction:
    """Mass at 1 of the normalised law of ``P Y_t P Y_t* P`` in ``P A P``."""
    return max(2 * rank.theta - 1, Fraction(0)) / rank.theta


def _half_binomial(j: int) -> Fraction:
    """``binom(1/2, j)``."""
    out = Fraction(1)
    for i in range(j):
        out *= (Fraction(1, 2) - i) / (i + 1)
    return out


def stationary_jacobi_moments(rank: RankParam, n_max: int) -> List[Fraction]:
    """Normalised stationary moments ``tau((P Y P Y*)^n) / theta``, ``n = 1..n_max``.

    They are the coefficients of
    ``((2 theta - 1) + sqrt(1 - 4 theta (1 - theta) z)) / (2 theta (1 - z)) - 1``.
    """
    theta = rank.theta
    x = -4 * theta * (1 - theta)
    out = []
    partial = Fraction(0)
    for j in range(n_max + 1):
        partial += _half_binomial(j) * x ** j
        if j:
            out.append((2 * theta - 1 + partial) / (2 * theta))
    return out


def stationary_jacobi_series(rank: RankParam, n_max: int, radius: float = 0.5, points: int = 512) -> np.ndarray:
    """Same coefficients from a trapezoidal Cauchy integral of the closed form."""
    theta = float(rank.theta)
    w = radius * np.exp(2j * np.pi * np.arange(points) / points)
    f = ((2 * theta - 1) + np.sqrt(1 - 4 * theta * (1 - theta) * w)) / (2 * theta * (1 - w)) - 1
    c = np.fft.fft(f) / points
    n = np.arange(1, n_max + 1)
    return (c[n] / radius ** n).real
