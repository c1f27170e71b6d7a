import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import table_for
from freespec.jacobi import (
    TAIL_TOL,
    binomial_weights,
    corollary_weight,
    cosine_kernel_identity,
    jacobi_moment,
    limit_moment,
    stationary_jacobi_moments,
    stationary_jacobi_series,
)
from freespec.moments import OdeMoments, RankParam
from freespec.ncfree import CombinatorialMoments
from freespec.stationary import StationaryMoments

THETAS = [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(4, 5), Fraction(1)]


class Ones:
    n_max = None

    def moments(self, t, n):
        return [Fraction(1)] * n


@pytest.mark.parametrize("theta", THETAS, ids=str)
def test_time_zero_gives_theta(theta):
    rank = RankParam(theta)
    for n in range(1, 15):
        assert jacobi_moment(rank, 0.0, n, Ones()) == theta


@pytest.mark.parametrize("n", range(1, 30))
def test_binomial_identity(n):
    assert sum(math.comb(2 * n, n - k) for k in range(1, n + 1)) * 2 == 4 ** n - math.comb(2 * n, n)


def test_rank_half_two_term_formula():
    rank = RankParam(Fraction(1, 2))
    tab = table_for(0)
    for n in range(1, 8):
        direct = math.comb(2 * n, n) / 2 ** (2 * n + 1) + sum(
            math.comb(2 * n, n - k) * tab.r(k, 0.7) for k in range(1, n + 1)
        ) / 4 ** n
        assert jacobi_moment(rank, 0.7, n, tab) == pytest.approx(direct, rel=1e-14)


@pytest.mark.parametrize("theta", THETAS, ids=str)
def test_stationary_limit_matches_generating_function(theta):
    rank = RankParam(theta)
    st_src = StationaryMoments(rank)
    exact = stationary_jacobi_moments(rank, 8)
    fft = stationary_jacobi_series(rank, 8)
    for n in range(1, 9):
        val = jacobi_moment(rank, 0.0, n, st_src)
        assert isinstance(val, Fraction)
        assert val / theta == exact[n - 1]
        assert abs(float(exact[n - 1]) - fft[n - 1]) < 1e-10


def test_stationary_jacobi_known_case():
    # theta = 1/2: moments of the arcsine law on [0, 1] are binom(2n, n) / 4^n
    rank = RankParam(Fraction(1, 2))
    for n, v in enumerate(stationary_jacobi_moments(rank, 8), start=1):
        assert v == Fraction(math.comb(2 * n, n), 4 ** n)


@pytest.mark.parametrize("theta", [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)], ids=str)
def test_sources_agree_and_moments_are_monotone(theta):
    rank = RankParam(theta)
    tab = table_for((2 * theta - 1) ** 2)
    comb = CombinatorialMoments(rank)
    prev = None
    for n in range(1, 13):
        v = jacobi_moment(rank, 0.8, n, tab)
        if n <= 5:
            assert v == pytest.approx(jacobi_moment(rank, 0.8, n, comb), abs=1e-12)
        assert 0 <= v <= theta + 1e-15
        assert 0 <= v / theta <= 1 + 1e-15
        if prev is not None:
            assert v <= prev + 1e-15
        prev = v


def test_source_range_checked():
    rank = RankParam(Fraction(3, 4))
    with pytest.raises(ValueError):
        jacobi_moment(rank, 0.5, 6, CombinatorialMoments(rank))
    with pytest.raises(ValueError):
        jacobi_moment(rank, 0.5, 0, Ones())


def test_truncated_weights():
    n = 1000
    full, _ = binomial_weights(n)
    cut, tail = binomial_weights(n, 1e-17)
    assert tail < 1e-17
    assert full[cut.size:].sum() == pytest.approx(tail, rel=1e-10, abs=1e-300)
    assert np.array_equal(full[: cut.size], cut)
    assert cut.size < 250
    for k in (1, 17, 200):
        assert full[k - 1] == math.comb(2 * n, n - k) / 4 ** n


def test_truncation_error_is_below_tolerance():
    rank = RankParam(Fraction(3, 4))
    ode = OdeMoments(rank)
    n = 300
    full = jacobi_moment(rank, 1.0, n, ode)
    cut = jacobi_moment(rank, 1.0, n, ode, tail_tol=1e-12)
    assert abs(full - cut) < 1e-12


def test_cosine_kernel_examples():
    for phi in (0.0, 0.3, 2.0):
        lhs, rhs = cosine_kernel_identity(1, phi)
        assert lhs == pytest.approx(math.cos(phi) / 2)
        assert rhs == pytest.approx(math.cos(phi) / 2)
    lhs, rhs = cosine_kernel_identity(6, 1.234)
    assert abs(lhs - rhs) < 1e-12
    for n in (1, 5, 9):
        lhs, _ = cosine_kernel_identity(n, 0.0)
        assert lhs == pytest.approx(1 - math.comb(2 * n, n) / 4 ** n)


@given(st.integers(1, 20), st.floats(-10, 10))
@settings(max_examples=100)
def test_cosine_kernel_property(n, phi):
    lhs, rhs = cosine_kernel_identity(n, phi)
    assert abs(lhs - rhs) < 1e-12


def test_corollary_weight():
    assert corollary_weight(RankParam(Fraction(1, 2))) == 0
    assert corollary_weight(RankParam(Fraction(1, 4))) == 0
    assert corollary_weight(RankParam(Fraction(3, 4))) == Fraction(2, 3)
    assert corollary_weight(RankParam(1)) == 1


@pytest.mark.parametrize("theta,limit", [(Fraction(1, 4), 0), (Fraction(1, 2), 0), (Fraction(3, 4), Fraction(1, 2))], ids=str)
def test_limit_sequence(theta, limit):
    table = limit_moment(RankParam(theta), 1.0, [100, 200, 400, 1000, 2000, 4000])
    assert table.limit == limit
    err = table.errors
    assert err[-1] <= 0.02
    assert all(b <= a + 1e-15 for a, b in zip(err, err[1:]))
    # at most an n^{-1/2} decay
    assert max(e * math.sqrt(n) for e, n in zip(err, table.n)) < 1.0


def test_limit_rate_at_rank_half():
    # uniform-type density near 1 gives error ~ C / sqrt(n)
    table = limit_moment(RankParam(Fraction(1, 2)), 1.0, [250, 1000, 4000])
    e = table.errors
    assert e[0] / e[1] == pytest.approx(2, rel=0.05)
    assert e[1] / e[2] == pytest.approx(2, rel=0.05)
    assert 0.1 < table.rate_constant() < 1


def test_limit_grid_validation():
    with pytest.raises(ValueError):
        limit_moment(RankParam(Fraction(1, 2)), 1.0, [10, 5])
