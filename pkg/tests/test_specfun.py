import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special as sps

from fockdarboux.params import ParameterError
from fockdarboux.specfun import (SymmetricLauricellaSpec, bessel_j, expint_scaled, generalized_binomial,
                                 generalized_laguerre, laguerre_coefficients, laguerre_roots,
                                 lauricella_fa_bruteforce, lauricella_fa_symmetric, log_binomial,
                                 log_pochhammer, pochhammer)


def test_pochhammer_small_cases():
    assert pochhammer(1, 5) == pytest.approx(120)
    assert pochhammer(-3, 4) == 0.0
    assert pochhammer(-2.5, 3) == pytest.approx(-2.5 * -1.5 * -0.5)
    assert log_pochhammer(3, 0) == (1.0, 0.0)


def test_binomials():
    assert math.exp(log_binomial(10, 3)) == pytest.approx(120)
    assert generalized_binomial(0.5, 2) == pytest.approx(-0.125)
    assert generalized_binomial(-1, 3) == pytest.approx(-1)


@pytest.mark.parametrize("n,alpha", [(0, 0), (1, 0), (3, 2), (7, 0.5), (12, 3)])
def test_laguerre_matches_scipy(n, alpha):
    x = np.linspace(0, 30, 61)
    assert np.allclose(generalized_laguerre(n, alpha, x), sps.eval_genlaguerre(n, alpha, x),
                       rtol=1e-11, atol=1e-11)
    poly = np.polynomial.Polynomial(laguerre_coefficients(n, alpha))
    assert np.allclose(poly(x), sps.eval_genlaguerre(n, alpha, x), rtol=1e-9, atol=1e-9)


def test_laguerre_roots_are_zeros():
    for n, a in [(1, 0), (3, 2), (6, 1)]:
        r = laguerre_roots(n, a)
        assert len(r) == n and np.all(np.diff(r) > 0)
        assert np.max(np.abs(generalized_laguerre(n, a, r))) < 1e-9


@pytest.mark.parametrize("m", [0, 1, 2, 5, 10])
def test_bessel_matches_scipy(m):
    x = np.concatenate([np.linspace(0, 40, 401), [150.0, 999.0, 1200.0, 5000.0]])
    assert np.allclose(bessel_j(m, x), sps.jv(m, x), rtol=0, atol=1e-12)


def test_expint_scaled_oracles():
    # mpmath values
    assert expint_scaled(1, 1.0) == pytest.approx(0.596347362323194074, rel=1e-14)
    assert expint_scaled(3, 5.0) == pytest.approx(0.130277203559152523, rel=1e-14)
    # large argument: no overflow, asymptotically 1/z
    assert expint_scaled(2, 1e4) == pytest.approx(1 / (1e4 + 2), rel=1e-7)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.floats(0.01, 60))
def test_expint_scaled_against_mpmath(n, z):
    ref = float(mp.e ** z * mp.expint(n, z))
    assert expint_scaled(n, z) == pytest.approx(ref, rel=1e-12)


def test_expint_rejects_bad_input():
    with pytest.raises(ParameterError):
        expint_scaled(0, 1.0)
    with pytest.raises(ParameterError):
        expint_scaled(1, 0.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 3), st.integers(1, 4), st.integers(0, 3), st.floats(0.1, 1.0))
def test_lauricella_symmetric_equals_bruteforce(n, copies, l, x):
    a = l * 2 + 1.5
    fast = lauricella_fa_symmetric(SymmetricLauricellaSpec(a, n, l + 1, x, copies))
    slow = lauricella_fa_bruteforce(a, [-n] * copies, [l + 1] * copies, [x] * copies)
    assert fast == pytest.approx(slow, rel=1e-9, abs=1e-12)


def test_lauricella_exact_path_beats_cancellation():
    spec = SymmetricLauricellaSpec(7, 3, 3, Fraction(1, 3), 6)
    exact = lauricella_fa_symmetric(spec)
    slow = lauricella_fa_bruteforce(7, [-3] * 6, [3] * 6, [1 / 3] * 6)
    assert exact == pytest.approx(slow, rel=1e-6)
    assert exact > 0
