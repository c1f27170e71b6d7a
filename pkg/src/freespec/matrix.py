"""Monte Carlo check with N x N unitary Brownian motion.

``U`` is advanced by left multiplication with ``exp(i sigma sqrt(dt) H)``,
``H`` an independent GUE matrix normalised to ``tr(H^2)/N = 1``.  For large
``N`` the normalised trace of such an increment is ``J1(2s)/s`` with
``s = sigma sqrt(dt)``; ``sigma`` is chosen so that this equals
``exp(-dt/2)``, which makes ``tr(U_t)/N`` match ``e^{-t/2}`` at every step
while keeping the increments exactly unitary.

``S_N`` is diagonal with ``floor(theta N)`` entries ``+1`` and the rest ``-1``;
the estimates are normalised traces of ``(S_N U_t S_N U_t*)^n``.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import j1

__all__ = [
    "SimConfig",
    "SimResult",
    "UnitarityWarning",
    "increment_scale",
    "jackknife",
    "simulate_moments",
    "simulate_many",
    "worker_count",
]

UNITARITY_TOL = 1e-8
CHECK_EVERY = 25


class UnitarityWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class SimConfig:
    N: int
    theta: float
    dt: float = 0.01
    t_end: float = 1.0
    trials: int = 200
    seed: int = 20240601

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if not 0 < self.theta <= 1:
            raise ValueError("theta must lie in (0, 1]")
        if not 0 < self.dt <= 0.01:
            raise ValueError("dt must lie in (0, 0.01]")
        if self.t_end < 0:
            raise ValueError("t_end must be non-negative")
        if self.trials < 2:
            raise ValueError("need at least two trials for error bars")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def symmetry_diagonal(self, theta: float = None) -> np.ndarray:
        theta = self.theta if theta is None else theta
        plus = int(math.floor(theta * self.N))
        return np.concatenate([np.ones(plus), -np.ones(self.N - plus)])


@dataclass
class SimResult:
    config: SimConfig
    n: List[int]
    mean: np.ndarray
    stderr: np.ndarray
    max_imag: float
    max_unitarity_error: float
    reorthonormalised: int = 0
    samples: np.ndarray = field(default=None, repr=False)


def increment_scale(dt: float) -> float:
    """``sigma`` with ``J1(2 sigma sqrt(dt)) / (sigma sqrt(dt)) = exp(-dt/2)``."""
    target = math.exp(-dt / 2)
    g = lambda s: j1(2 * s) / s - target
    s = brentq(g, 1e-12, 1.9, xtol=1e-16, rtol=1e-15)
    return s / math.sqrt(dt)


def jackknife(samples: np.ndarray):
    """Leave-one-out mean and standard error along axis 0."""
    x = np.asarray(samples)
    n = x.shape[0]
    total = x.sum(axis=0)
    loo = (total - x) / (n - 1)
    mean = loo.mean(axis=0)
    var = (n - 1) / n * ((loo - mean) ** 2).sum(axis=0)
    return total / n, np.sqrt(var)


def worker_count(tasks: int) -> int:
    env = os.environ.get("FREESPEC_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, tasks))


def _gue(rng: np.random.Generator, N: int) -> np.ndarray:
    a = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    a /= math.sqrt(2)
    return (a + a.conj().T) / math.sqrt(2 * N)


def _unitarity_error(u: np.ndarray) -> float:
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())


def _trial(cfg: SimConfig, ss: np.random.SeedSequence, diagonals, n_list, sigma):
    rng = np.random.Generator(np.random.Philox(ss))
    N = cfg.N
    u = np.eye(N, dtype=complex)
    scale = sigma * math.sqrt(cfg.dt)
    reorth = 0
    worst = 0.0
    for step in range(1, cfg.steps + 1):
        lam, v = np.linalg.eigh(_gue(rng, N))
        u = (v * np.exp(1j * scale * lam)) @ (v.conj().T @ u)
        if step % CHECK_EVERY == 0 or step == cfg.steps:
            err = _unitarity_error(u)
            worst = max(worst, err)
            if err > UNITARITY_TOL:
                q, r = np.linalg.qr(u)
                u = q * (np.diag(r) / np.abs(np.diag(r)))
                reorth += 1
    out = np.empty((len(diagonals), len(n_list)), dtype=complex)
    n_top = max(n_list)
    for i, d in enumerate(diagonals):
        # S U S U* with S diagonal
        m = (d[:, None] * u * d[None, :]) @ u.conj().T
        p = np.eye(N, dtype=complex)
        traces = {}
        for k in range(1, n_top + 1):
            p = p @ m
            traces[k] = np.trace(p) / N
        out[i] = [traces[k] for k in n_list]
    return out, worst, reorth


def simulate_many(cfg: SimConfig, thetas: Sequence[float], n_list: Sequence[int]) -> Dict[float, SimResult]:
    """Run ``cfg.trials`` trajectories once and estimate for every ``theta``."""
    n_list = [int(n) for n in n_list]
    if not n_list or min(n_list) < 1:
        raise ValueError("n_list must hold positive integers")
    diagonals = [cfg.symmetry_diagonal(th) for th in thetas]
    sigma = increment_scale(cfg.dt)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.trials)
    with ThreadPoolExecutor(max_workers=worker_count(cfg.trials)) as pool:
        results = list(pool.map(lambda ss: _trial(cfg, ss, diagonals, n_list, sigma), seeds))
    samples = np.stack([r[0] for r in results])  # trials x thetas x n
    worst = max(r[1] for r in results)
    reorth = sum(r[2] for r in results)
    if reorth:
        warnings.warn(
            f"{reorth} re-orthonormalisations: unitarity drift above {UNITARITY_TOL}",
            UnitarityWarning,
        )
    out = {}
    for i, th in enumerate(thetas):
        s = samples[:, i, :]
        mean, err = jackknife(s.real)
        out[th] = SimResult(
            config=cfg, n=n_list, mean=mean, stderr=err,
            max_imag=float(np.abs(s.imag).max()), max_unitarity_error=worst,
            reorthonormalised=reorth, samples=s,
        )
    return out


def simulate_moments(cfg: SimConfig, n_list: Sequence[int]) -> SimResult:
    return simulate_many(cfg, [cfg.theta], n_list)[cfg.theta]
