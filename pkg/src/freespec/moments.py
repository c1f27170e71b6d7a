"""Moments of ``S Y_t S Y_t*``.

The moments ``r_n(t)`` are obtained from ``s_n(t) = e^{nt} r_n(t)`` which obey

    s_1(t) = eps e^t + (1 - eps)
    s_n'(t) = -n sum_{j=1}^{n-1} s_j(t) s_{n-j}(t) + eps n^2 e^{nt},   s_n(0) = 1

with ``eps = kappa**2``.  The right-hand side never leaves the ring of finite
sums ``sum_k e^{kt} p_k(t)`` with rational polynomials ``p_k``, so the whole
table is computed exactly in :class:`ExpPoly`.

For truncation orders beyond what the exact table can reach (the coefficient
size grows quickly) :class:`OdeMoments` integrates the equivalent system for
``r_n`` in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

import mpmath
import numpy as np
from scipy.integrate import solve_ivp

from .numeric import Poly, as_fraction

__all__ = [
    "RankParam",
    "ExpPoly",
    "MomentTable",
    "OdeMoments",
    "PdeReport",
    "solve_recursion",
    "r_moment",
    "herglotz_series",
    "check_pde_coefficients",
    "DEFAULT_N_MAX",
]

DEFAULT_N_MAX = 12


@dataclass(frozen=True)
class RankParam:
    """Trace ``theta = tau(P)`` of the projection, with ``kappa = 2 theta - 1``
    and ``eps = kappa**2``.  All three are exact rationals."""

    theta: Fraction

    def __post_init__(self):
        theta = as_fraction(self.theta)
        if not 0 < theta <= 1:
            raise ValueError(f"theta must lie in (0, 1], got {theta}")
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_kappa(cls, kappa) -> "RankParam":
        return cls((1 + as_fraction(kappa)) / 2)

    @classmethod
    def from_eps(cls, eps) -> "RankParam":
        """Rank with ``kappa = +sqrt(eps)``; ``eps`` must be a rational square."""
        eps = as_fraction(eps)
        num, den = math.isqrt(eps.numerator), math.isqrt(eps.denominator)
        if num * num != eps.numerator or den * den != eps.denominator:
            raise ValueError(f"eps={eps} is not the square of a rational")
        return cls.from_kappa(Fraction(num, den))

    @property
    def kappa(self) -> Fraction:
        return 2 * self.theta - 1

    @property
    def eps(self) -> Fraction:
        return self.kappa**2

    def __str__(self) -> str:
        return f"theta={self.theta}"


class ExpPoly:
    """Finite sum ``sum_k e^{k t} p_k(t)`` with integer frequencies ``k`` and
    rational polynomials ``p_k``.  Immutable; zero parts are never stored."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[int, Poly]] = None):
        clean: Dict[int, Poly] = {}
        for k, p in (terms or {}).items():
            if not isinstance(p, Poly):
                p = Poly([p])
            if p:
                clean[int(k)] = p
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def __setattr__(self, name, value):
        raise AttributeError("ExpPoly is immutable")

    @classmethod
    def constant(cls, c) -> "ExpPoly":
        return cls({0: Poly([c])})

    @classmethod
    def exp(cls, k: int, c=1) -> "ExpPoly":
        """``c * e^{k t}``."""
        return cls({k: Poly([c])})

    # structure -------------------------------------------------------------

    @property
    def frequencies(self) -> Tuple[int, ...]:
        return tuple(self.terms)

    @property
    def max_frequency(self) -> Optional[int]:
        return max(self.terms) if self.terms else None

    def part(self, k: int) -> Poly:
        return self.terms.get(k, Poly())

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, ExpPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == ExpPoly.constant(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self.terms.items()))

    def __repr__(self) -> str:
        return f"ExpPoly({self.to_string()})"

    def to_string(self, var: str = "t") -> str:
        if not self.terms:
            return "0"
        pieces = []
        for k, p in self.terms.items():
            body = p.to_string(var)
            if k == 0:
                pieces.append(f"({body})")
            else:
                pieces.append(f"({body})*exp({k}*{var})")
        return " + ".join(pieces)

    # ring ------------------------------------------------------------------

    def __add__(self, other) -> "ExpPoly":
        if not isinstance(other, ExpPoly):
            other = ExpPoly.constant(other)
        terms = dict(self.terms)
        for k, p in other.terms.items():
            terms[k] = terms[k] + p if k in terms else p
        return ExpPoly(terms)

    __radd__ = __add__

    def __neg__(self) -> "ExpPoly":
        return ExpPoly({k: -p for k, p in self.terms.items()})

    def __sub__(self, other) -> "ExpPoly":
        if not isinstance(other, ExpPoly):
            other = ExpPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other) -> "ExpPoly":
        return ExpPoly.constant(other) - self

    def __mul__(self, other) -> "ExpPoly":
        if not isinstance(other, ExpPoly):
            s = as_fraction(other)
            return ExpPoly({k: p * s for k, p in self.terms.items()})
        terms: Dict[int, Poly] = {}
        for k1, p1 in self.terms.items():
            for k2, p2 in other.terms.items():
                prod = p1 * p2
                k = k1 + k2
                terms[k] = terms[k] + prod if k in terms else prod
        return ExpPoly(terms)

    __rmul__ = __mul__

    def shift(self, k: int) -> "ExpPoly":
        """Multiply by ``e^{k t}``."""
        return ExpPoly({j + k: p for j, p in self.terms.items()})

    # calculus --------------------------------------------------------------

    def derivative(self) -> "ExpPoly":
        return ExpPoly({k: p * k + p.derivative() for k, p in self.terms.items()})

    def antiderivative(self) -> "ExpPoly":
        """The antiderivative vanishing at ``t = 0``.

        For ``k != 0``, ``int e^{kt} p(t) dt = e^{kt} q(t)`` with
        ``q = sum_j (-1)^j p^{(j)} / k^{j+1}``.
        """
        terms: Dict[int, Poly] = {}
        for k, p in self.terms.items():
            if k == 0:
                q = p.antiderivative()
            else:
                q = Poly()
                dp = p
                j = 0
                while dp:
                    q = q + dp * Fraction((-1) ** j, k ** (j + 1))
                    dp = dp.derivative()
                    j += 1
            terms[k] = terms[k] + q if k in terms else q
        out = ExpPoly(terms)
        return out - out.at_zero()

    # evaluation ------------------------------------------------------------

    def at_zero(self) -> Fraction:
        """Exact value at ``t = 0``."""
        return sum((p[0] for p in self.terms.values()), Fraction(0))

    def __call__(self, t: float) -> float:
        total = 0.0
        for k, p in self.terms.items():
            total += math.exp(k * t) * p.evalf(t)
        return total

    def evalf(self, t: float, digits: int = 40) -> float:
        """Evaluate with ``digits`` significant digits of working precision.

        The parts of ``s_n`` carry large alternating coefficients, so plain
        double evaluation loses accuracy for larger ``n``.
        """
        with mpmath.workdps(digits):
            tt = mpmath.mpf(t)
            total = mpmath.mpf(0)
            for k, p in self.terms.items():
                acc = mpmath.mpf(0)
                for c in reversed(p.coeffs):
                    acc = acc * tt + mpmath.mpf(c.numerator) / c.denominator
                total += mpmath.exp(k * tt) * acc
            return float(total)


@dataclass(frozen=True)
class MomentTable:
    """Exact ``s_1 .. s_{n_max}`` for a fixed rank."""

    rank: RankParam
    s: Tuple[ExpPoly, ...]
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def n_max(self) -> int:
        return len(self.s)

    def s_n(self, n: int) -> ExpPoly:
        self._check(n)
        return self.s[n - 1]

    def r_n(self, n: int) -> ExpPoly:
        """``r_n = e^{-nt} s_n`` as an element of the ring (negative frequencies)."""
        return self.s_n(n).shift(-n)

    def stationary_part(self, n: int) -> Fraction:
        """Constant coefficient of ``e^{nt}`` in ``s_n``, i.e. ``r_n(infinity)``."""
        p = self.s_n(n).part(n)
        if p.degree > 0:
            raise ArithmeticError(f"e^{{{n}t}} part of s_{n} is not constant: {p}")
        return p[0]

    def decay_part(self, n: int) -> Poly:
        """Frequency-0 polynomial of ``s_n``, the coefficient of ``e^{-nt}`` in ``r_n``."""
        return self.s_n(n).part(0)

    def r(self, n: int, t: float) -> float:
        key = (n, float(t))
        if key not in self._cache:
            self._cache[key] = self.r_n(n).evalf(t)
        return self._cache[key]

    def moments(self, t: float, n: int) -> np.ndarray:
        """``[r_1(t), ..., r_n(t)]``."""
        if n > self.n_max:
            raise ValueError(f"table holds n <= {self.n_max}, asked for {n}")
        return np.array([self.r(k, t) for k in range(1, n + 1)])

    def _check(self, n: int) -> None:
        if not 1 <= n <= self.n_max:
            raise IndexError(f"n={n} outside 1..{self.n_max}")


def solve_recursion(rank: RankParam, n_max: int = DEFAULT_N_MAX) -> MomentTable:
    """Solve the ``s_n`` recursion exactly for ``1 <= n <= n_max``."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    eps = rank.eps
    s: List[ExpPoly] = [ExpPoly({1: Poly([eps]), 0: Poly([1 - eps])})]
    for n in range(2, n_max + 1):
        conv = ExpPoly()
        for j in range(1, n // 2 + 1):
            prod = s[j - 1] * s[n - j - 1]
            conv = conv + (prod if 2 * j == n else prod * 2)
        rhs = conv * (-n) + ExpPoly.exp(n, eps * n * n)
        s.append(rhs.antiderivative() + 1)
    return MomentTable(rank, tuple(s))


def r_moment(table: MomentTable, n: int, t: float) -> float:
    """``r_n(t) = e^{-nt} s_n(t)``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return table.r(n, t)


def herglotz_series(table, t: float, z: complex, N: int) -> complex:
    """Partial sum ``1 + 2 sum_{n<=N} r_n(t) z^n`` of the Herglotz transform.

    ``table`` is any moment provider with a ``moments(t, N)`` method
    (:class:`MomentTable`, :class:`OdeMoments`, ...).
    """
    if abs(z) >= 1:
        raise ValueError(f"|z| must be < 1, got {abs(z)}")
    if N < 0:
        raise ValueError("N must be non-negative")
    if N == 0:
        return complex(1.0)
    r = np.asarray(table.moments(t, N), dtype=float)
    powers = np.power(complex(z), np.arange(1, N + 1))
    return complex(1.0 + 2.0 * np.dot(r, powers))


@dataclass
class PdeReport:
    rank: RankParam
    results: Dict[int, bool]

    @property
    def all_pass(self) -> bool:
        return all(self.results.values())

    def failures(self) -> List[int]:
        return [n for n, ok in self.results.items() if not ok]


def check_pde_coefficients(table: MomentTable) -> PdeReport:
    """Check, coefficient by coefficient in ``z``, the transport equation of
    the Herglotz transform: exactly, in the ring,

        r_n' = -n r_n - n sum_{j<n} r_j r_{n-j} + kappa^2 n^2.
    """
    eps = table.rank.eps
    r = [table.r_n(n) for n in range(1, table.n_max + 1)]
    results = {}
    for n in range(1, table.n_max + 1):
        rhs = r[n - 1] * (-n) + eps * n * n
        for j in range(1, n):
            rhs = rhs - r[j - 1] * r[n - j - 1] * n
        results[n] = r[n - 1].derivative() == rhs
    return PdeReport(table.rank, results)


class OdeMoments:
    """Floating-point ``r_n(t)`` from the moment ODE system, for any order.

    ``r_n`` is damped at rate ``n``; for the orders used here (a few hundred)
    an explicit high-order scheme is still far cheaper than an implicit one.
    """

    def __init__(self, rank: RankParam, rtol: float = 1e-12, atol: float = 1e-14):
        self.rank = rank
        self.eps = float(rank.eps)
        self.rtol = rtol
        self.atol = atol
        self.n_max = None
        self._cache: Dict[Tuple[float, int], np.ndarray] = {}

    def _rhs(self, t, r):
        n = np.arange(1, r.size + 1, dtype=float)
        conv = np.zeros_like(r)
        if r.size > 1:
            conv[1:] = np.convolve(r, r)[: r.size - 1]
        return -n * r - n * conv + self.eps * n * n

    def moments(self, t: float, n: int) -> np.ndarray:
        if t < 0:
            raise ValueError("t must be non-negative")
        key = (float(t), int(n))
        if key in self._cache:
            return self._cache[key].copy()
        for (tt, nn), val in self._cache.items():
            if tt == key[0] and nn >= n:
                return val[:n].copy()
        r0 = np.ones(n)
        if t == 0:
            out = r0
        else:
            sol = solve_ivp(
                self._rhs, (0.0, float(t)), r0, method="DOP853",
                rtol=self.rtol, atol=self.atol,
            )
            if not sol.success:
                raise RuntimeError(f"moment ODE failed: {sol.message}")
            out = sol.y[:, -1]
        self._cache[key] = out
        return out.copy()

    def r(self, n: int, t: float) -> float:
        return float(self.moments(t, n)[n - 1])
