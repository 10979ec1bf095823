import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from blaschkepow import exact, norms
from blaschkepow.core import DomainError

HALF = Fraction(1, 2)
finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_u_p_cases():
    assert norms.u_p(1000, 2) == 1.0
    assert norms.u_p(64, 1) == pytest.approx(8.0)
    assert norms.u_p(1000, 4) == pytest.approx(math.log(1000) ** 0.25 * 1000**-0.25)
    assert norms.u_p(1000, 6) == pytest.approx(1000 ** (1 / 18 - 1 / 3))
    assert norms.u_p(1000, math.inf) == pytest.approx(0.1)
    with pytest.raises(DomainError):
        norms.u_p(1, 2)


@pytest.mark.parametrize("lam", [Fraction(1, 4), HALF, Fraction(3, 4)])
@pytest.mark.parametrize("n", [7, 100, 999])
def test_l2_is_one(lam, n):
    assert norms.lp_norm(exact.coeff_dft(lam, n), 2) == pytest.approx(1, abs=1e-10)


def test_lp_examples():
    seq = exact.coeff_dft(HALF, 400)
    assert norms.lp_norm(seq, math.inf) == np.max(np.abs(seq.values))
    r = [norms.lp_norm(exact.coeff_dft(HALF, n), 1) / math.sqrt(n) for n in (400, 1600, 6400)]
    assert max(r) / min(r) < 1.1
    val, err = norms.lp_norm(seq, 3, full_output=True)
    assert 0 < err < 1e-10


def test_paired_examples():
    alt = np.tile([1.0, 0.0], 50)
    assert norms.paired_min_norm(alt, 2) == 0
    const = np.full(40, 0.3)
    assert norms.paired_min_norm(const, 2) == pytest.approx(norms.lp_norm(const, 2) / math.sqrt(2))
    pairs = np.repeat(np.array([0.3, 0.1, 0.2]), 2)
    assert norms.paired_min_norm(pairs, 3) == pytest.approx(
        math.fsum(np.array([0.3, 0.1, 0.2]) ** 3) ** (1 / 3))
    seq = exact.coeff_dft(HALF, 1000)
    ratio = norms.paired_min_norm(seq, 2) / norms.lp_norm(seq, 2)
    assert 0.2 <= ratio <= 1


def test_paired_odd_length():
    assert norms.paired_min_norm([1.0, 2.0, 3.0], 1) == pytest.approx(1.0)


@given(arrays(float, st.integers(1, 60), elements=finite), st.floats(0.5, 8))
def test_paired_bounded_by_lp(v, p):
    assert norms.paired_min_norm(v, p) <= 2 ** (1 / p) * norms.lp_norm(v, p) * (1 + 1e-12) + 1e-300


@given(arrays(float, st.integers(1, 60), elements=finite), st.floats(1, 8), st.floats(0, 8))
def test_lp_monotone_in_p(v, p, dp):
    assert norms.lp_norm(v, p + dp) <= norms.lp_norm(v, p) * (1 + 1e-12) + 1e-300


def test_gauge_exponents():
    assert norms.gauge_exponent(1) == 0.5
    assert norms.gauge_exponent(2) == 0
    assert norms.gauge_exponent(3) == pytest.approx(-1 / 6)
    assert norms.gauge_exponent(6) == pytest.approx(-5 / 18)
    assert norms.gauge_exponent(math.inf) == pytest.approx(-1 / 3)


NS = [2**j for j in range(8, 14)]


@pytest.fixture(scope="module")
def ladder():
    return {n: exact.coeff_dft(HALF, n) for n in NS}


@pytest.mark.parametrize("p,expected,tol", [(1, 0.5, 0.05), (2, 0.0, 0.02), (math.inf, -1 / 3, 0.05)])
def test_exponent_fit_examples(ladder, p, expected, tol):
    rep = norms.exponent_fit(HALF, p, NS, ladder)
    assert rep.fitted_exponent == pytest.approx(expected, abs=tol)
    assert rep.predicted_exponent == pytest.approx(expected)


def test_exponent_fit_log_case(ladder):
    rep = norms.exponent_fit(HALF, 4, NS, ladder)
    assert rep.log_correction
    assert abs(rep.residual_slope) <= 0.05
    d = json.loads(rep.to_json())
    assert d["p"] == 4 and len(d["norms"]) == len(NS)
    assert rep.to_csv().startswith("# lambda=0.5 p=4")


def test_exponent_fit_needs_a_decade():
    with pytest.raises(DomainError):
        norms.exponent_fit(HALF, 2, [100, 200, 400, 800])
    with pytest.raises(DomainError):
        norms.exponent_fit(HALF, 2, [100, 10000])


@pytest.mark.parametrize("p", [2, 3, 4, 6])
def test_building_block_brackets(p):
    # ||g_N||_p and its paired-min version stay in a fixed bracket of u_p(N)
    lp, pm = [], []
    for N in (512, 1024, 2048, 4096):
        seq = exact.coeff_dft(HALF, N)
        lp.append(norms.lp_norm(seq, p) / norms.u_p(N, p))
        pm.append(norms.paired_min_norm(seq, p) / norms.u_p(N, p))
    for r in (lp, pm):
        assert 0.1 <= min(r) and max(r) <= 10
        assert max(r) / min(r) < 1.5
