import math

import numpy as np
import pytest

from pball.specfun import (
    inv_reg_lower_gamma,
    inv_reg_upper_gamma,
    log_gamma,
    reg_lower_gamma,
    reg_upper_gamma,
)

mpmath = pytest.importorskip("mpmath")

# ln Gamma(1/4), from mpmath quadrature of 4 * int_0^inf exp(-s^4) ds (30 digits)
LOG_GAMMA_QUARTER = 1.28802252469807745737061044022
# root of P(0.25, x) = 0.9, bisection on the same quadrature
INV_P_QUARTER_09 = 0.750392872236835728167604309115


def test_log_gamma_examples():
    assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-15)
    assert log_gamma(2.0) == pytest.approx(0.0, abs=1e-15)
    assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), abs=1e-14)
    assert log_gamma(0.25) == pytest.approx(LOG_GAMMA_QUARTER, abs=1e-14)


def test_quarter_oracle_is_independent():
    mpmath.mp.dps = 30
    val = mpmath.log(mpmath.quad(lambda s: 4 * mpmath.exp(-s**4), [0, 1, mpmath.inf]))
    assert float(val) == pytest.approx(LOG_GAMMA_QUARTER, abs=1e-15)


def test_log_gamma_against_mpmath():
    mpmath.mp.dps = 30
    xs = np.geomspace(1e-3, 1e6, 600)
    ref = np.array([float(mpmath.loggamma(mpmath.mpf(float(x)))) for x in xs])
    got = log_gamma(xs)
    # 1e-13 absolute wherever a double can hold it; a few ulps of the value beyond
    tol = np.maximum(1e-13, 8 * np.finfo(float).eps * np.abs(ref))
    assert np.all(np.abs(got - ref) <= tol)


def test_log_gamma_recurrence():
    x = np.linspace(0.1, 100, 2001)
    assert np.max(np.abs(log_gamma(x + 1) - log_gamma(x) - np.log(x))) <= 1e-12


@pytest.mark.parametrize("n", range(11))
def test_gamma_half_integers(n):
    exact = math.factorial(2 * n) * math.sqrt(math.pi) / (4**n * math.factorial(n))
    assert math.exp(log_gamma(n + 0.5)) == pytest.approx(exact, rel=1e-10)


def test_log_gamma_domain():
    with pytest.raises(ValueError):
        log_gamma(0.0)
    with pytest.raises(ValueError):
        log_gamma(np.array([1.0, -2.0]))


def test_reg_lower_gamma_examples():
    assert reg_lower_gamma(1, 2) == pytest.approx(1 - math.exp(-2), abs=1e-15)
    assert reg_lower_gamma(0.5, 0) == 0.0
    assert reg_lower_gamma(0.5, 0.5) == pytest.approx(math.erf(1 / math.sqrt(2)), abs=1e-14)


def test_reg_lower_gamma_against_quadrature():
    mpmath.mp.dps = 25
    for a in (0.2, 1 / 3, 0.5, 1.0, 2.5):
        for x in (1e-6, 0.1, 0.9, a + 1, 3.0, 12.0, 60.0):
            ref = float(mpmath.gammainc(a, 0, x, regularized=True))
            assert reg_lower_gamma(a, x) == pytest.approx(ref, abs=1e-12)


def test_upper_tail_keeps_relative_accuracy():
    mpmath.mp.dps = 30
    for a, x in [(0.5, 40.0), (0.25, 300.0), (2.5, 700.0)]:
        ref = float(mpmath.gammainc(a, x, mpmath.inf, regularized=True))
        assert reg_upper_gamma(a, x) == pytest.approx(ref, rel=1e-12)


def test_reg_lower_gamma_monotone_and_limits():
    x = np.linspace(0, 50, 5001)
    for a in (0.2, 0.5, 1.0, 2.0):
        p = reg_lower_gamma(a, x)
        assert np.all(np.diff(p) >= 0)
        assert p[0] == 0.0 and p[-1] == pytest.approx(1.0, abs=1e-15)


def test_reg_lower_gamma_domain():
    with pytest.raises(ValueError):
        reg_lower_gamma(0.0, 1.0)
    with pytest.raises(ValueError):
        reg_lower_gamma(1.0, -1.0)


def test_inverse_examples():
    assert inv_reg_lower_gamma(1, 0.5) == pytest.approx(math.log(2), rel=1e-12)
    assert inv_reg_lower_gamma(0.5, 0) == 0.0
    assert inv_reg_lower_gamma(0.25, 0.9) == pytest.approx(INV_P_QUARTER_09, rel=1e-10)


@pytest.mark.parametrize("a", [0.2, 1 / 3, 0.5, 1.0, 2.5])
def test_inverse_roundtrip(a):
    q = np.linspace(0.01, 0.99, 99)
    x = inv_reg_lower_gamma(a, q)
    assert np.max(np.abs(reg_lower_gamma(a, x) - q)) <= 1e-9


def test_inverse_upper_tail():
    mpmath.mp.dps = 30
    for a in (0.25, 0.5, 2.0):
        for v in (1e-300, 1e-40, 1e-12, 0.3, 0.7):
            x = inv_reg_upper_gamma(a, v)
            assert float(mpmath.gammainc(a, x, mpmath.inf, regularized=True)) == pytest.approx(v, rel=1e-10)


def test_inverse_domain():
    with pytest.raises(ValueError):
        inv_reg_lower_gamma(1.0, 1.0)
    with pytest.raises(ValueError):
        inv_reg_lower_gamma(1.0, -0.1)
    with pytest.raises(ValueError):
        inv_reg_lower_gamma(-1.0, 0.5)
