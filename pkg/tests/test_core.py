import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from blaschkepow import exact
from blaschkepow.core import (
    BlaschkeParam,
    CoeffQuery,
    ConfigurationError,
    DomainError,
    Region,
    Thresholds,
    alpha0,
    classify_region,
    default_thresholds,
    reduce_phase,
)


def test_alpha0_values():
    assert alpha0(Fraction(1, 2)) == Fraction(1, 3)
    assert alpha0(Fraction(1, 3)) == Fraction(1, 2)
    assert alpha0(1e-12) == pytest.approx(1.0)


@given(st.integers(1, 999).map(lambda p: Fraction(p, 1000)))
def test_alpha0_exact_inverse(lam):
    a0 = alpha0(lam)
    assert 0 < a0 < 1
    assert a0 * (1 / a0) == 1


@given(st.floats(1e-6, 1 - 1e-6))
def test_alpha0_float_inverse(lam):
    a0 = alpha0(lam)
    assert 0 < a0 < 1
    assert a0 * (1 / a0) == pytest.approx(1.0, rel=1e-15)


def test_param_validation():
    with pytest.raises(DomainError):
        BlaschkeParam(Fraction(3, 2))
    with pytest.raises(DomainError):
        BlaschkeParam(0)
    p = BlaschkeParam("1/2")
    assert p.is_exact and p.value == 0.5


def test_reduce_phase_examples():
    assert reduce_phase(0.5, 7, 3) == (0.5, 1 + 0j)
    mod, ph = reduce_phase(0.5j, 2, 1)
    assert mod == pytest.approx(0.5)
    assert ph == pytest.approx(1j, abs=1e-15)
    mod, ph = reduce_phase(-0.5, 4, 4)
    assert mod == pytest.approx(0.5)
    assert ph == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(DomainError):
        reduce_phase(1.0 + 0j, 2, 1)


def _direct_coeffs(lc, n, M=256):
    # coefficients of ((z - lc)/(1 - conj(lc) z))^n from circle samples
    z = np.exp(2j * np.pi * np.arange(M) / M)
    return np.fft.fft(((z - lc) / (1 - np.conj(lc) * z)) ** n) / M


@pytest.mark.parametrize("lc", [0.5j, -0.5, 0.3 + 0.4j, 0.7 * cmath.exp(2.1j)])
@pytest.mark.parametrize("n", [1, 3, 8])
def test_reduce_phase_matches_series(lc, n):
    ref = _direct_coeffs(lc, n)
    mod = abs(lc)
    real = exact.coeff_dft(mod, n, 256).values
    for k in range(20):
        m, ph = reduce_phase(lc, n, k)
        assert abs(ph * real[k] - ref[k]) < 1e-12


def test_classify_examples():
    lam = Fraction(1, 2)
    th = Thresholds(alpha=0.1, beta=0.6, omega=100)
    assert classify_region(CoeffQuery(lam, 1000, 50), th).region == Region.II
    assert classify_region(CoeffQuery(lam, 1000, 1000)).region == Region.V
    assert classify_region(CoeffQuery(lam, 1000, round(1000 / 3)), th).region == Region.IV
    assert classify_region(CoeffQuery(lam, 1000, 333)).region == Region.IV
    assert classify_region(CoeffQuery(lam, 1000, 0)).region == Region.I


def test_boundary_goes_to_lower_region():
    lam = Fraction(1, 2)
    th = Thresholds(alpha=Fraction(1, 10), beta=0.6, omega=10)
    # alpha*n = 100 exactly, alpha0*n - omega = 90
    assert classify_region(CoeffQuery(lam, 1000, 100), th).region == Region.II
    # 3000 - 10 = 2990 is the V/VI edge
    assert classify_region(CoeffQuery(lam, 1000, 2990), th).region == Region.V


def test_inconsistent_thresholds():
    with pytest.raises(ConfigurationError):
        classify_region(CoeffQuery(Fraction(1, 2), 1000, 5),
                        Thresholds(alpha=0.1, beta=0.6, omega=400))
    with pytest.raises(ConfigurationError):
        Thresholds(alpha=0.5, beta=0.6, omega=1).check(Fraction(1, 2), 100)


@given(st.integers(1, 5000), st.integers(0, 50000))
def test_classifier_total_and_monotone(n, k):
    lam = Fraction(1, 2)
    th = default_thresholds(lam, n)
    r = classify_region(CoeffQuery(lam, n, k), th).region
    r2 = classify_region(CoeffQuery(lam, n, k + 1), th).region
    assert r2 >= r


@given(st.integers(10, 5000))
def test_default_thresholds_nested(n):
    for lam in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
        th = default_thresholds(lam, n)
        th.check(lam, n)
        e = th.edges(lam, n)
        assert all(x <= y for x, y in zip(e, e[1:]))


def test_query_views():
    q = CoeffQuery(Fraction(1, 2), 3, 1)
    assert q.ratio == Fraction(1, 3)
    assert q.a == pytest.approx(1 / 3)
    with pytest.raises(DomainError):
        CoeffQuery(Fraction(1, 2), 0, 1)
    with pytest.raises(DomainError):
        CoeffQuery(Fraction(1, 2), 3, -1)
    assert math.isclose(float(q.ratio), q.a)
