import cmath
import itertools
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import EPS_VALUES
from freespec.convolution import (
    BranchCutWarning,
    cauchy_via_cubic,
    cubic_at,
    cubic_roots,
    half_convolution_cumulants,
    half_convolution_moments,
    k_transform,
    laurent_moments,
    r_transform,
    r_transform_a1,
    reduced_cubic_residual,
    vieta_residuals,
)
from freespec.moments import RankParam
from freespec.ncfree import cumulants_of_S, p_n_at_zero

RANKS = [RankParam.from_eps(e) for e in EPS_VALUES]


def test_r_transform_limit_and_series_switch():
    for rank in RANKS:
        k = float(rank.kappa)
        assert r_transform_a1(rank, 1e-9) == pytest.approx(k, abs=1e-8)
        # both sides of the series threshold agree
        a = r_transform_a1(rank, 0.99e-6)
        b = r_transform_a1(rank, 1.01e-6)
        assert a == pytest.approx(b, abs=1e-7)


def test_r_transform_kappa_zero_odd():
    rank = RankParam(Fraction(1, 2))
    for y in (0.1, 0.37, 0.2 + 0.1j):
        direct = (cmath.sqrt(1 + 4 * y * y) - 1) / (2 * y)
        assert r_transform_a1(rank, y) == pytest.approx(direct)
        assert r_transform_a1(rank, -y) == pytest.approx(-r_transform_a1(rank, y))


@pytest.mark.parametrize("rank", RANKS[:3], ids=str)
def test_r_transform_taylor_coefficients_are_cumulants(rank):
    sympy = pytest.importorskip("sympy")
    y = sympy.symbols("y")
    k = sympy.Rational(rank.kappa.numerator, rank.kappa.denominator)
    series = sympy.series((sympy.sqrt(1 + 4 * y * (y + k)) - 1) / (2 * y), y, 0, 6).removeO()
    c = cumulants_of_S(rank, 6)
    for j in range(6):
        coeff = series.coeff(y, j)
        assert Fraction(int(coeff.p), int(coeff.q)) == c[j]


def test_r_transform_numeric_derivative_is_variance():
    rank = RankParam(Fraction(4, 5))
    h = 1e-3
    d = (r_transform_a1(rank, h) - r_transform_a1(rank, -h)) / (2 * h)
    assert d.real == pytest.approx(float(cumulants_of_S(rank, 2)[1]), abs=1e-5)


def test_branch_cut_warning():
    rank = RankParam(Fraction(1, 2))
    with pytest.warns(BranchCutWarning):
        r_transform_a1(rank, 1j)  # 1 + 4 y^2 = -3


def test_half_convolution_moments():
    for rank in RANKS:
        m = half_convolution_moments(rank, 8)
        assert all(v == 0 for v in m[0::2])
        for n in range(1, 5):
            assert m[2 * n - 1] == p_n_at_zero(rank, n)
        assert m[1] == 1 - rank.eps
        assert m[3] == (1 - rank.eps) * (1 + 3 * rank.eps)
    assert all(v == 0 for v in half_convolution_moments(RankParam(1), 8))
    with pytest.raises(ValueError):
        half_convolution_moments(RANKS[0], 13)


def test_half_convolution_cumulants():
    rank = RankParam(Fraction(3, 4))
    c = cumulants_of_S(rank, 6)
    h = half_convolution_cumulants(rank, 6)
    assert h[0::2] == [0, 0, 0]
    assert h[1::2] == c[1::2]


def test_cubic_coefficients_by_elimination():
    sympy = pytest.importorskip("sympy")
    y, z, k = sympy.symbols("y z k")
    e = k ** 2
    # K(y) = z with R = (sqrt(A) + sqrt(B) - 2) / (4y):
    # sqrt(A) + sqrt(B) = 4yz - 2
    A = 1 + 4 * y * y + 4 * k * y
    B = 1 + 4 * y * y - 4 * k * y
    w = 4 * y * z - 2
    # square twice: (w^2 - A - B)^2 = 4 A B
    poly = sympy.expand((w ** 2 - A - B) ** 2 - 4 * A * B)
    h1 = (2 * z ** 2 - 1) / (z * (z ** 2 - 1))
    h2 = (5 * z ** 2 + e - 1) / (4 * z ** 2 * (z ** 2 - 1))
    h3 = 1 / (4 * z * (z ** 2 - 1))
    cubic = y ** 3 - h1 * y ** 2 + h2 * y - h3
    # the cubic times a factor that never vanishes away from y = 0, z = 0, +-1
    assert sympy.simplify(poly - 256 * y * z ** 2 * (z ** 2 - 1) * cubic) == 0


@given(
    st.sampled_from(RANKS),
    st.complex_numbers(min_magnitude=0.05, max_magnitude=50, allow_nan=False, allow_infinity=False),
)
@settings(max_examples=80, deadline=None)
def test_cardano_against_numpy_roots(rank, z):
    if min(abs(z - 1), abs(z + 1)) < 1e-3:
        return
    c = cubic_at(rank, z)
    ours = np.array(cubic_roots(c))
    ref = np.roots([1, -c.h1, c.h2, -c.h3])
    # compare as multisets; sorting is unstable when real parts are ~0
    ref = min((ref[list(q)] for q in itertools.permutations(range(3))),
              key=lambda cand: np.abs(ours - cand).max())
    scale = max(1.0, abs(c.h1), abs(c.h2) ** 0.5, abs(c.h3) ** (1 / 3))
    # a double root is only determined to about eps^(1/2), a triple one to eps^(1/3)
    spread = np.abs(ref - ref.mean()).max()
    tol = 1e-6 if spread > 1e-4 * scale else 3e-5
    assert np.abs(ours - ref).max() < tol * scale
    assert max(abs(c(r)) for r in ours) < 1e-10 * scale ** 3


def test_triple_root_at_eps_zero():
    # at eps = 0, z = i the cubic is (y + i/2)^3
    c = cubic_at(RankParam(Fraction(1, 2)), 1j)
    assert c.h1 == pytest.approx(-1.5j) and c.h2 == pytest.approx(-0.75) and c.h3 == pytest.approx(0.125j)
    for r in cubic_roots(c):
        assert abs(r + 0.5j) < 1e-12


@pytest.mark.parametrize("rank", RANKS, ids=str)
def test_vieta(rank):
    for z in list(np.geomspace(10, 1e3, 25)) + [2 + 1j, -3.5, 0.4j]:
        assert max(vieta_residuals(cubic_at(rank, z))) < 1e-12


@pytest.mark.parametrize("rank", RANKS, ids=str)
def test_k_of_g_identity_and_back_substitution(rank):
    for z in np.geomspace(10, 1e3, 40):
        y = cauchy_via_cubic(rank, z)
        assert abs(k_transform(rank, y) - z) < 1e-10
        assert abs(cubic_at(rank, z)(y)) < 1e-12
        assert abs(reduced_cubic_residual(rank, z, y)) < 1e-10


@pytest.mark.parametrize("rank", RANKS, ids=str)
def test_laurent_expansion_at_fifty(rank):
    # G(z) = sum m_k / z^{k+1}; with m_0..m_5 the remainder is O(z^-7)
    m = [Fraction(1)] + half_convolution_moments(rank, 5)
    y = cauchy_via_cubic(rank, 50.0)
    assert abs(y - 1 / 50) < 1e-3
    assert abs(y - sum(float(mk) / 50 ** (k + 1) for k, mk in enumerate(m))) < 1e-8
    # two terms leave the m_2/z^3 term, about 6e-6 here
    two = 1 / 50 + float(m[1]) / 50 ** 2
    assert abs(y - two) == pytest.approx(float(m[2]) / 50 ** 3, rel=1e-2, abs=1e-12)


@pytest.mark.parametrize("rank", RANKS[:3], ids=str)
def test_laurent_moments_from_contour(rank):
    lm = laurent_moments(rank, 8)
    ref = np.array([float(v) for v in half_convolution_moments(rank, 8)])
    assert np.abs(lm - ref).max() < 1e-8


def test_cauchy_transform_signs():
    # Im G < 0 in the upper half-plane; G(conj z) = conj G(z)
    rank = RankParam(Fraction(1, 2))
    for z in (0.3 + 0.5j, 5 + 2j, -2 + 0.1j):
        g = cauchy_via_cubic(rank, z)
        assert g.imag < 0
        assert cauchy_via_cubic(rank, z.conjugate()) == pytest.approx(g.conjugate())
    assert cauchy_via_cubic(RankParam(1), 2 + 1j) == pytest.approx(1 / (2 + 1j))


def test_cubic_rejects_poles():
    for z in (0, 1, -1):
        with pytest.raises(ValueError):
            cubic_at(RANKS[1], z)


def test_half_r_transform_series():
    rank = RankParam(Fraction(3, 4))
    h = half_convolution_cumulants(rank, 6)
    for y in (0.01, 0.05, -0.03):
        series = sum(float(h[j]) * y ** j for j in range(6))
        assert r_transform(rank, y) == pytest.approx(series, abs=1e-7)
    assert r_transform(rank, 0.3) == pytest.approx(-r_transform(rank, -0.3))
