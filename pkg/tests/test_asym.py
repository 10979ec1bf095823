import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from blaschkepow import airy, asym, exact
from blaschkepow.asym import WrongRegime
from blaschkepow.core import Region, default_thresholds

HALF = Fraction(1, 2)


def rel(x, ref):
    return abs(x / ref - 1)


def log_exact(n, k):
    return exact.coeff_rational_log(HALF, n, k, limit=10**9)


@pytest.fixture(scope="module")
def dft3000():
    return exact.coeff_dft(HALF, 3000, 2**15).values


def test_region_I_examples():
    assert asym.asym_region_I(HALF, 100, 0) == pytest.approx(2.0**-100, rel=1e-13)
    v = asym.asym_region_I(HALF, 200, 1)
    assert v == pytest.approx((-0.5) ** 199 * 200 * 0.75, rel=1e-14)
    assert rel(v, float(exact.coeff_rational(HALF, 200, 1))) <= 0.02
    assert rel(asym.asym_region_I(HALF, 400, 2), float(exact.coeff_rational(HALF, 400, 2))) <= 0.015
    with pytest.raises(WrongRegime):
        asym.asym_region_I(HALF, 100, 50)


def test_region_II_VIII_examples():
    v = asym.asym_region_II_VIII(HALF, 500, 50)
    assert rel(v, float(exact.coeff_rational(HALF, 500, 50))) <= 0.05
    assert v > 0
    # about 1e-144: far below double DFT noise, so compare in log space
    s, la = asym.asym_region_II_VIII(HALF, 500, 2500, log=True)
    es, el = exact.coeff_dft_shifted(HALF, 500, 2500)[:2]
    assert s == es and abs(math.expm1(la - el)) <= 0.05
    with pytest.raises(WrongRegime):
        asym.asym_region_II_VIII(HALF, 500, 500)
    with pytest.raises(WrongRegime):
        asym.asym_region_II_VIII(HALF, 500, 160, strict=True)


def test_region_II_error_decreases_with_n():
    errs = []
    for n in (500, 1000, 2000):
        s, la = asym.asym_region_II_VIII(HALF, n, n // 10, log=True)
        es, el = log_exact(n, n // 10)
        assert s == es
        errs.append(abs(math.expm1(la - el)))
    assert errs[0] > errs[1] > errs[2]


def test_region_III_VII_examples(dft3000):
    for k, f in ((900, asym.asym_region_III), (9300, asym.asym_region_VII)):
        s, la = f(HALF, 3000, k, log=True)
        es, el = exact.coeff_dft_shifted(HALF, 3000, k)[:2]
        assert s == es
        assert abs(math.expm1(la - el)) <= 0.1
    with pytest.raises(WrongRegime):
        asym.asym_region_III(HALF, 3000, 1500)
    with pytest.raises(WrongRegime):
        asym.asym_region_VII(HALF, 3000, 3000)


@pytest.mark.parametrize("n,k", [(3000, 900), (3000, 300), (500, 50), (3000, 9300),
                                 (3000, 12000), (500, 4000)])
def test_seam_identity(n, k):
    # the exponential-transition laws coincide with the plain saddle law
    f = asym.asym_region_III if k < n else asym.asym_region_VII
    s1, l1 = f(HALF, n, k, log=True)
    s2, l2 = asym.asym_region_II_VIII(HALF, n, k, log=True)
    assert s1 == s2
    assert abs(math.expm1(l1 - l2)) <= 1e-6


def test_region_V_closed_form():
    n = 999
    expected = math.sqrt(2 / (n * math.pi)) * math.cos(n * math.pi / 3 - math.pi / 4) / (4 / 3) ** 0.25
    assert asym.asym_region_V(HALF, n, n) == pytest.approx(expected, rel=1e-10)
    ref = exact.coeff_dft(HALF, n).values[n]
    assert abs(asym.asym_region_V(HALF, n, n) - ref) <= 2 * n**-1.5


def test_region_V_examples():
    n, k = 500, 700
    v = asym.asym_region_V(HALF, n, k)
    env = asym.envelope_V(HALF, n, k)
    ref = exact.coeff_dft(HALF, n).values[k]
    if abs(v) > 0.2 * env:
        assert rel(v, ref) <= 0.02
    else:
        assert abs(v - ref) <= 0.02 * env
    ref = exact.coeff_dft(HALF, 1000).values[1000]
    assert abs(asym.asym_region_V(HALF, 1000, 1000) - ref) <= 2 * 1000**-1.5


def test_uniform_at_transition_point():
    n, k = 3000, 1000
    cl, _ = asym.saddle.edge_constants(0.5)
    a = 1 / 3
    limit = (-1) ** (n - k) * math.sqrt(2 / a) * (cl / (3 - 1 / 3)) ** 0.25 * airy.ai(0.0) / n ** (1 / 3)
    assert asym.asym_airy_uniform(HALF, n, k) == pytest.approx(limit, rel=1e-12)
    assert asym.asym_region_IV(HALF, n, k) == pytest.approx(limit, rel=1e-3)
    # same limit through sqrt(2) (1+lam)^(1/4) / (lam(1-lam))^(1/12) / (sqrt(a) (1/alpha0 - a)^(1/4))
    pref = math.sqrt(2) * 1.5**0.25 / 0.25 ** (1 / 12) / (math.sqrt(a) * (3 - a) ** 0.25)
    assert abs(limit) == pytest.approx(pref * airy.ai(0.0) / n ** (1 / 3), rel=1e-12)


def test_uniform_examples(dft3000):
    for k in (1040, 8960):
        assert rel(asym.asym_airy_uniform(HALF, 3000, k), dft3000[k]) <= 0.05
    with pytest.raises(WrongRegime):
        asym.asym_airy_uniform(HALF, 3000, 3000)


def test_region_IV_VI_examples():
    n = 2000
    seq = exact.coeff_dft(HALF, n, 2**15).values
    k = round(n / 3) + 10
    assert rel(asym.asym_region_IV(HALF, n, k), seq[k]) <= 0.08
    v = asym.asym_region_VI(HALF, n, 6000)
    assert 0.1 <= abs(v) * n ** (1 / 3) <= 10
    with pytest.raises(WrongRegime):
        asym.asym_region_IV(HALF, n, 1000, strict=True)


def test_auto_examples():
    r = asym.asym_auto(HALF, 1000, 0)
    assert r.region.region == Region.I
    assert r.log_abs == pytest.approx(-1000 * math.log(2))
    assert asym.asym_auto(HALF, 1000, 1000).region.region == Region.V
    r = asym.asym_auto(HALF, 1000, 333)
    assert r.region.region == Region.IV
    assert r.airy_arg is not None and r.ingredients is not None


@pytest.mark.parametrize("k", [0, 10, 1000, 200000, 333333, 500000, 1000000, 2000000,
                               3000000, 5000000, 9000000])
def test_log_space_large_n(k):
    r = asym.asym_auto(HALF, 10**6, k, with_saddle=False)
    assert math.isfinite(r.log_abs)
    assert r.sign in (-1, 1)


def test_sign_law_left_regions():
    n = 500
    seq = exact.coeff_dft(HALF, n).values
    peak = np.max(np.abs(seq))
    th = default_thresholds(HALF, n)
    for k in range(int(th.edges(HALF, n)[2]) + 1):
        if abs(seq[k]) > 1e-12 * peak:
            r = asym.asym_auto(HALF, n, k, th, with_saddle=False)
            assert r.region.region <= Region.IV
            assert r.sign == np.sign(seq[k]), k


def _seam_points(n):
    th = default_thresholds(HALF, n)
    e = [float(x) for x in th.edges(HALF, n)]
    return th, [int(e[1]), int(e[2]), int(e[3]), int(e[4])]


@pytest.mark.parametrize("n", [2000, 4000])
def test_adjacent_seams_dispatcher(n):
    # the formulas asym_auto uses on either side of each Airy-band edge
    th, ks = _seam_points(n)
    left = [asym.asym_region_III, asym.asym_region_V, asym.asym_region_V, asym.asym_region_VII]
    for k, f in zip(ks, left):
        s1, l1 = f(HALF, n, k, log=True)
        s2, l2 = asym.asym_airy_uniform(HALF, n, k, log=True, thresholds=th)
        assert s1 == s2
        assert abs(math.expm1(l1 - l2)) <= 0.10


def test_leading_order_seam_mismatch_shrinks():
    # the leading-order Airy law converges to the saddle law only slowly at the band edge
    gaps = []
    for n in (2000, 4000, 8000):
        _, ks = _seam_points(n)
        l1 = asym.asym_region_III(HALF, n, ks[0], log=True)[1]
        l2 = asym.asym_region_IV(HALF, n, ks[0], log=True)[1]
        gaps.append(abs(math.expm1(l1 - l2)))
    assert gaps[0] > gaps[1] > gaps[2]


def test_error_sweep_table():
    t = asym.error_sweep(HALF, 500, range(0, 4001, 50))
    assert t.COLUMNS == ("k", "region", "exact", "asym", "abs_err", "rel_err", "env_err")
    text = t.to_csv()
    assert text.startswith("# lambda=0.5 n=500 exact=DftSampling")
    summary = t.summary()
    assert set(summary) <= {r.name for r in Region}
    assert summary["V"]["max_rel"] < 1
    assert summary["II"]["max_rel"] < 0.05


def test_fit_slope():
    xs = [1, 2, 4, 8]
    assert asym.fit_slope(xs, [x**-1.5 for x in xs]) == pytest.approx(-1.5)


@given(st.integers(200, 3000), st.floats(0.05, 0.3))
def test_exponential_regime_agrees_with_rational(n, a):
    k = max(1, int(a * n))
    s, la = asym.asym_region_II_VIII(HALF, n, k, log=True)
    es, el = log_exact(n, k)
    assert s == es
    assert abs(la - el) < 0.05
