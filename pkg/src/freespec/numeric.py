"""Exact rational arithmetic helpers, dense polynomials and the two
orthogonal polynomial families used throughout the package.

Rationals are :class:`fractions.Fraction`; everything here stays exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

__all__ = [
    "Fraction",
    "Poly",
    "as_fraction",
    "binomial",
    "pochhammer",
    "jacobi_P10",
    "laguerre_L1",
]

Number = Union[int, Fraction]


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and strings like ``"3/4"`` or ``"0.75"``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        # floats are taken at their decimal repr, so 0.75 -> 3/4, 0.1 -> 1/10
        return Fraction(repr(x))
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def binomial(n: int, k: int) -> int:
    if n < 0:
        raise ValueError("n must be non-negative")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def pochhammer(x, k: int) -> Fraction:
    """Rising factorial ``x (x+1) ... (x+k-1)``; ``(x)_0 = 1``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    x = as_fraction(x)
    out = Fraction(1)
    for i in range(k):
        out *= x + i
    return out


class Poly:
    """Immutable dense polynomial with Fraction coefficients.

    ``coeffs[i]`` is the coefficient of ``x**i``.  Trailing zeros are
    stripped so the zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number] = ()):
        c = [as_fraction(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def constant(cls, c: Number) -> "Poly":
        return cls([c])

    @classmethod
    def monomial(cls, degree: int, c: Number = 1) -> "Poly":
        return cls([0] * degree + [c])

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        return self.to_string()

    def to_string(self, var: str = "x") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                mono = ""
            elif i == 1:
                mono = var
            else:
                mono = f"{var}^{i}"
            if mono and abs(c) == 1:
                term = mono
            elif mono:
                term = f"({abs(c)})*{mono}" if c.denominator != 1 else f"{abs(c)}*{mono}"
            else:
                term = str(abs(c))
            parts.append(("-" if c < 0 else "+", term))
        sign, first = parts[0]
        out = ("-" if sign == "-" else "") + first
        for sign, term in parts[1:]:
            out += f" {sign} {term}"
        return out

    # ring operations -----------------------------------------------------

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly([other])
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly([other])
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return Poly([other]) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            s = as_fraction(other)
            return Poly(c * s for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        out = Poly([1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def derivative(self) -> "Poly":
        return Poly(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def antiderivative(self) -> "Poly":
        """Antiderivative vanishing at 0."""
        return Poly([0] + [c / (i + 1) for i, c in enumerate(self.coeffs)])

    def compose(self, inner: "Poly") -> "Poly":
        out = Poly()
        for c in reversed(self.coeffs):
            out = out * inner + c
        return out

    def scale_argument(self, s: Number) -> "Poly":
        """Return ``x -> p(s*x)``."""
        s = as_fraction(s)
        return Poly(c * s**i for i, c in enumerate(self.coeffs))

    def __call__(self, x):
        """Horner evaluation; works for Fraction, float and complex ``x``."""
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def evalf(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc


def jacobi_P10(n: int) -> Poly:
    """Jacobi polynomial :math:`P_n^{(1,0)}(x)` (Rainville normalisation).

    Built from the terminating series

    .. math::

        P_n^{(1,0)}(x) = (n+1) \\sum_{k=0}^{n}
            \\frac{(-n)_k (n+2)_k}{(2)_k\\, k!} \\left(\\frac{1-x}{2}\\right)^k,

    so ``P_n(1) = n + 1``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    half_one_minus_x = Poly([Fraction(1, 2), Fraction(-1, 2)])
    out = Poly()
    for k in range(n + 1):
        coef = pochhammer(-n, k) * pochhammer(n + 2, k) / (pochhammer(2, k) * math.factorial(k))
        out = out + half_one_minus_x**k * coef
    return out * (n + 1)


def laguerre_L1(n: int) -> Poly:
    """Generalised Laguerre polynomial :math:`L_n^{(1)}(x)`.

    ``L_n^{(1)}(x) = sum_k C(n+1, n-k) (-x)^k / k!``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    return Poly(
        Fraction((-1) ** k * math.comb(n + 1, n - k), math.factorial(k))
        for k in range(n + 1)
    )

