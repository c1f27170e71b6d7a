"""Characteristics of the Burgers equation for the Herglotz transform.

In the half-plane variable ``y = (1+z)/(1-z)`` the characteristic started at a
real ``y > 0`` is

    phi^2(t, y) = 1 - 4 a lam E / ((b + lam E)^2 - 4 eps a),   E = e^{sqrt(a) t},

with ``a = eps + (1-eps) y^2``, ``b = a + eps`` and
``lam = (1-eps)^2 y^2 (1-y^2) / (1+sqrt(a))^2``.  Along it

    F(t, phi)^2 = eps phi^2 + (1 - eps) y^2.

Only real starting points are handled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .moments import OdeMoments, RankParam, herglotz_series

__all__ = [
    "BlowupError",
    "FlowParams",
    "BlowupPoint",
    "AtomLimit",
    "flow_params",
    "phi_squared_formula",
    "phi_squared",
    "phi",
    "phi_velocity",
    "psi",
    "blowup_time",
    "conserved_identity_residual",
    "blowup_point",
    "atom_weight_mu_t",
    "atom_limit",
    "flow_monotonicity_check",
]


class BlowupError(ArithmeticError):
    """Raised when a characteristic is evaluated at or past its lifespan."""

    def __init__(self, t: float, t_star: float):
        super().__init__(f"t={t} is past the blow-up time T*={t_star}")
        self.t = t
        self.t_star = t_star


@dataclass(frozen=True)
class FlowParams:
    y: float
    a: float
    b: float
    lam: float
    eps: float
    sqrt_a: float

    @property
    def t_star(self) -> float:
        return blowup_time(self)


def flow_params(rank: RankParam, y: float) -> FlowParams:
    if y <= 0:
        raise ValueError("y must be positive")
    eps = float(rank.eps)
    a = eps + (1 - eps) * y * y
    sa = math.sqrt(a)
    lam = (1 - eps) ** 2 * y * y * (1 - y) * (1 + y) / (1 + sa) ** 2
    return FlowParams(y=y, a=a, b=a + eps, lam=lam, eps=eps, sqrt_a=sa)


def phi_squared_formula(y, eps, sqrt_a, growth):
    """``phi^2`` with ``growth = e^{sqrt(a) t}`` supplied by the caller.

    Plain arithmetic only, so exact types (Fraction) go through unchanged
    when ``sqrt_a`` and ``growth`` are exact.
    """
    a = sqrt_a * sqrt_a
    b = a + eps
    lam = (1 - eps) ** 2 * y * y * (1 - y * y) / (1 + sqrt_a) ** 2
    return 1 - 4 * a * lam * growth / ((b + lam * growth) ** 2 - 4 * eps * a)


def blowup_time(p: FlowParams) -> float:
    """Lifespan of the characteristic; ``inf`` for ``0 < y <= 1``."""
    if p.y <= 1:
        return math.inf
    if p.eps == 1:
        y2 = p.y * p.y
        return math.log(y2 / (y2 - 1))
    k = math.sqrt(p.eps)
    return math.log((p.sqrt_a - k) ** 2 / -p.lam) / p.sqrt_a


def phi_squared(p: FlowParams, t: float) -> float:
    if t < 0:
        raise ValueError("t must be non-negative")
    t_star = blowup_time(p)
    if t >= t_star:
        raise BlowupError(t, t_star)
    if p.eps == 1:
        # kappa = +-1: phi' = (phi^2 - 1) phi / 2, so (phi^2-1)/phi^2 = (y^2-1)/y^2 e^t
        y2 = p.y * p.y
        return y2 / (y2 + (1 - y2) * math.exp(t))
    growth = math.exp(p.sqrt_a * t)
    # (b + lam E)^2 - 4 eps a, factored to limit cancellation near blow-up
    r = 2 * math.sqrt(p.eps * p.a)
    denom = (p.b + p.lam * growth - r) * (p.b + p.lam * growth + r)
    return 1 - 4 * p.a * p.lam * growth / denom


def phi(p: FlowParams, t: float) -> float:
    """Signed characteristic.  For ``y < 1`` it decreases through 0 towards
    -1; it is positive exactly while ``lam e^{sqrt(a) t} < (1-eps) y^2``."""
    val = math.sqrt(max(phi_squared(p, t), 0.0))
    if p.y >= 1 or p.eps == 1:
        return val
    if p.lam * math.exp(p.sqrt_a * t) > (1 - p.eps) * p.y * p.y:
        return -val
    return val


def phi_velocity(p: FlowParams, value: float) -> float:
    """Right-hand side of the characteristic ODE,
    ``(phi^2 - 1) sqrt((1-eps) y^2 + eps phi^2) / 2``."""
    return 0.5 * (value * value - 1) * math.sqrt((1 - p.eps) * p.y * p.y + p.eps * value * value)


def _y_of_z(z: float) -> float:
    if not -1 < z < 1:
        raise ValueError(f"z must lie in (-1, 1), got {z}")
    return (1 + z) / (1 - z)


def psi(rank: RankParam, t: float, z: float) -> float:
    """Flow in the disc variable: ``psi = (phi - 1) / (phi + 1)`` with
    ``phi = phi(t, (1+z)/(1-z))``.  The value can leave the unit disc."""
    value = phi(flow_params(rank, _y_of_z(z)), t)
    return (value - 1) / (value + 1)


def conserved_identity_residual(
    rank: RankParam, t: float, z: float, N: int, moments=None
) -> float:
    """``|H(t, psi)^2 - (kappa^2 phi^2 + (1-kappa^2) y^2)|`` with ``H`` the
    degree-``N`` Herglotz partial sum.

    ``moments`` is a moment provider; the default integrates the moment ODE so
    that any ``N`` can be used.
    """
    y = _y_of_z(z)
    p = flow_params(rank, y)
    value = phi(p, t)
    w = (value - 1) / (value + 1)
    if abs(w) >= 1:
        raise ValueError(f"psi(t={t}, z={z}) = {w} lies outside the unit disc")
    if moments is None:
        moments = OdeMoments(rank)
    h = herglotz_series(moments, t, w, N)
    target = p.eps * value * value + (1 - p.eps) * y * y
    return abs(h * h - target)


@dataclass(frozen=True)
class BlowupPoint:
    t: float
    a: float
    y: float
    z: float
    residual: float


def _polish(f, df, x, steps=2):
    for _ in range(steps):
        d = df(x)
        if d == 0:
            break
        nxt = x - f(x) / d
        if not math.isfinite(nxt):
            break
        x = nxt
    return x


def blowup_point(rank: RankParam, t: float) -> BlowupPoint:
    """Starting point whose characteristic blows up exactly at time ``t``.

    Solves ``e^{st}(|kappa| + s) = (s+1)/(s-1) (s - |kappa|)`` for
    ``s = sqrt(a) > 1``; in log form the left minus right side is strictly
    increasing in ``s``, so the root is unique.  For ``kappa = 0`` the
    equation ``z e^{t(1+z)/(1-z)} = 1`` is solved directly.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    k = abs(float(rank.kappa))
    if k >= 1:
        raise ValueError("kappa = +-1 is degenerate: mu_t is the point mass at 1")

    if k == 0:
        g = lambda z: math.log(z) + t * (1 + z) / (1 - z)
        dg = lambda z: 1 / z + 2 * t / (1 - z) ** 2
        lo, hi = 1e-300, 1 - 1e-16
        z = brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
        z = _polish(g, dg, z)
        y = (1 + z) / (1 - z)
        residual = abs(z * math.exp(t * y) - 1)
        return BlowupPoint(t=t, a=y * y, y=y, z=z, residual=residual)

    f = lambda s: s * t + math.log(k + s) + math.log(s - 1) - math.log(s + 1) - math.log(s - k)
    df = lambda s: t + 1 / (k + s) + 1 / (s - 1) - 1 / (s + 1) - 1 / (s - k)
    delta = 1e-12
    while f(1 + delta) > 0:
        delta /= 10
    upper = 2.0
    while f(upper) < 0:
        upper *= 2
    s = brentq(f, 1 + delta, upper, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    s = _polish(f, df, s)
    lhs = math.exp(s * t) * (k + s)
    rhs = (s + 1) / (s - 1) * (s - k)
    eps = k * k
    y = math.sqrt((s - k) * (s + k) / (1 - eps))
    return BlowupPoint(
        t=t, a=s * s, y=y, z=(y - 1) / (y + 1), residual=abs(lhs - rhs) / abs(rhs)
    )


def atom_weight_mu_t(rank: RankParam, t: float) -> Fraction:
    """Mass that ``mu_t`` puts at ``z = 1``: ``|kappa|`` for every ``t``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return abs(rank.kappa)


@dataclass(frozen=True)
class AtomLimit:
    z_t: float
    z: np.ndarray
    phi: np.ndarray
    values: np.ndarray
    limit: float


def atom_limit(
    rank: RankParam, t: float, offsets: Optional[Sequence[float]] = None, degree: int = 3
) -> AtomLimit:
    """Follow ``(1 - psi)^2 H(t, psi)^2`` as ``z`` increases to ``z_t``.

    Along the characteristic, ``H(t, psi)^2 = kappa^2 phi^2 + (1-kappa^2) y^2``
    and ``1 - psi = 2/(phi + 1)``.  The samples are extrapolated to
    ``1/phi = 0`` with a polynomial fit; the limit is ``(2 kappa)^2``.
    """
    bp = blowup_point(rank, t)
    if offsets is None:
        offsets = np.logspace(-3, -9, 13) * min(bp.z, 1 - bp.z)
    zs, phis, vals = [], [], []
    for d in offsets:
        z = bp.z - d
        y = _y_of_z(z)
        p = flow_params(rank, y)
        value = phi(p, t)
        zs.append(z)
        phis.append(value)
        vals.append(4 * (p.eps * value * value + (1 - p.eps) * y * y) / (value + 1) ** 2)
    u = 1 / np.asarray(phis)
    coeffs = np.polyfit(u, np.asarray(vals), degree)
    return AtomLimit(
        z_t=bp.z, z=np.asarray(zs), phi=np.asarray(phis), values=np.asarray(vals),
        limit=float(coeffs[-1]),
    )


def flow_monotonicity_check(
    rank: RankParam, t_grid: Sequence[float], y1: float, y2: float
) -> bool:
    """Comparison principle for ``1 < y1 < y2``: the later trajectory stays
    above the earlier one and blows up first."""
    if not 1 < y1 < y2:
        raise ValueError("need 1 < y1 < y2")
    p1, p2 = flow_params(rank, y1), flow_params(rank, y2)
    t1, t2 = blowup_time(p1), blowup_time(p2)
    if not t2 < t1:
        return False
    for t in t_grid:
        if t >= t2:
            continue
        f1, f2 = phi(p1, t), phi(p2, t)
        if not 1 < f1 < f2:
            return False
    return True
