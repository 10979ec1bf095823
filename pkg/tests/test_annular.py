import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from blaschkepow import annular, exact
from blaschkepow.annular import AnnularSpec, Mode
from blaschkepow.core import BudgetExceeded, ConfigurationError, DomainError, NumericalRefusal


def test_v_r_cases():
    assert annular.v_r(2) == 0
    assert annular.v_r(6) == pytest.approx(5 / 18)
    assert annular.v_r(2.5) == pytest.approx(0.1)
    with pytest.raises(DomainError):
        annular.v_r(4)
    with pytest.raises(DomainError):
        annular.v_r(1.5)
    assert annular.u_p(12345, 2) == 1.0


def test_lp_gap_single_block():
    spec = AnnularSpec.lp_gap(2, 3, 2.5, A=4, levels=1)
    (b,) = spec.blocks
    assert (b.N, b.shift) == (4, 4)
    assert b.weight == pytest.approx(4**0.1)
    seq = annular.build_annular(spec)
    g = exact.coeff_dft(0.5, 4).values
    assert np.all(seq.values[:4] == 0)
    np.testing.assert_allclose(seq.values[4:4 + len(g)], b.weight * g, rtol=0, atol=1e-15)


def test_zero_levels():
    seq = annular.build_annular(AnnularSpec.lp_gap(2, 3, 2.5, A=4, levels=0))
    assert not np.any(seq.values)


def test_lp_gap_validation():
    with pytest.raises(ConfigurationError):
        AnnularSpec.lp_gap(1.5, 3)
    with pytest.raises(ConfigurationError):
        AnnularSpec.lp_gap(3, 2)
    with pytest.raises(ConfigurationError):
        AnnularSpec.lp_gap(2, 3, 3.5)
    with pytest.raises(ConfigurationError):
        AnnularSpec.lp_gap(3, 5, 4)
    with pytest.raises(ConfigurationError):
        AnnularSpec.lp_gap(2, 3, 2.5, A=16, A0=2.0)
    assert AnnularSpec.lp_gap(3, 5).r == 3.5


def _log1p_pow2(m):
    # log(1 + 2^(m/4)) without overflow
    return m / 4 * math.log(2) + math.log1p(2 ** (-m / 4))


def test_phi_gap_schedule():
    spec = AnnularSpec.phi_gap("log1p", A=4, levels=3)
    ms = spec.exponents
    N = [b.N for b in spec.blocks]
    for k in range(len(N)):
        prev_m = ms[k - 1] if k else 0
        assert N[k] >= 4 * (N[k - 1] if k else 1)
        target = 4 ** (3 * (k + 1))
        assert _log1p_pow2(ms[k]) >= target
        # smallest power of two meeting both conditions
        assert ms[k] - 1 < prev_m + 2 or _log1p_pow2(ms[k] - 1) < target
    with pytest.raises(BudgetExceeded):
        annular.build_annular(spec)


def test_phi_gap_custom_function():
    spec = AnnularSpec.phi_gap(lambda x: x, A=2, levels=3)
    assert [b.N for b in spec.blocks] == [2**12, 2**24, 2**36]
    with pytest.raises(BudgetExceeded):
        annular.build_annular(spec)


def test_bounded_phi_rejected():
    import mpmath
    with pytest.raises(ConfigurationError):
        annular.phi_schedule(lambda x: mpmath.atan(x), 4, 1)


def test_degree_cap_checks():
    spec = AnnularSpec.lp_gap(2, 3, 2.5, A=16, levels=2)
    with pytest.raises(ConfigurationError):
        annular.build_annular(spec, degree_cap=256 + 4 * 256 - 1)


def test_min_modulus_constant():
    assert annular.min_modulus_on_circle(np.array([1.0]), 0.7) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        annular.min_modulus_on_circle(np.array([1.0]), 1.0)


def _block_min(N, r):
    # |b(z)| on |z| = r is smallest on the positive axis
    return abs((r - 0.5) / (1 - 0.5 * r)) ** N


@pytest.mark.parametrize("N", [16, 100, 512])
def test_min_modulus_single_block(N):
    seq = exact.coeff_dft(0.5, N)
    for r in (1 - 1 / N, 1 - 4 / N, 0.9):
        assert annular.min_modulus_on_circle(seq, r) == pytest.approx(_block_min(N, r), rel=1e-9)
    assert annular.min_modulus_on_circle(seq, 1 - 1 / N) >= math.exp(-4)


def test_min_modulus_zero_padding_and_resolution():
    seq = annular.build_annular(AnnularSpec.lp_gap(2, 3, 2.5, A=16, levels=2))
    r = 1 - 1 / 256
    base = annular.min_modulus_on_circle(seq.values, r)
    padded = np.concatenate([seq.values, np.zeros(5000)])
    assert annular.min_modulus_on_circle(padded, r) == pytest.approx(base, rel=1e-12)
    m14 = annular.min_modulus_on_circle(seq.values, r, samples=2**14)
    m16 = annular.min_modulus_on_circle(seq.values, r, samples=2**16)
    assert abs(m14 / m16 - 1) < 0.01


def test_min_modulus_refuses_truncated_tail():
    spec = AnnularSpec.lp_gap(2, 3, 2.5, A=16, levels=1)
    short = annular.build_annular(spec, degree_cap=16 + 64)
    assert short.meta["truncated_mass"] > 0
    with pytest.raises(NumericalRefusal):
        annular.min_modulus_on_circle(short, 1 - 1 / 16)
    full = annular.build_annular(spec)
    assert annular.min_modulus_on_circle(full, 1 - 1 / 16) > 0


@given(st.lists(st.floats(-2, 2), min_size=1, max_size=30), st.floats(0.1, 0.95))
def test_min_modulus_against_direct_grid(c, r):
    c = np.array(c)
    m = annular.min_modulus_on_circle(c, r)
    t = np.linspace(0, 2 * math.pi, 4001)
    direct = np.abs(np.polyval(c[::-1], r * np.exp(1j * t)))
    assert m <= direct.min() + 1e-12
    assert m >= direct.min() - 1e-3 * max(1.0, np.abs(c).sum())


def test_lemma1_small():
    rep = annular.lemma1_verify(512)
    assert abs(rep["i_max_modulus"] - 1) <= 1e-12
    assert rep["ii_min_modulus"] >= math.exp(-4)
    assert rep["iii_delta"] > 0 and rep["iii_r2"] > 0.99
    assert set(rep["v"]) == {2, 3, 4, 6}
    with pytest.raises(DomainError):
        annular.lemma1_verify(5)


def test_lemma1_sup_bracket():
    assert 0.1 <= annular.lemma1_verify(1024)["iv_sup_sqrtN"] <= 10


@pytest.fixture(scope="module")
def small_report():
    spec = AnnularSpec.lp_gap(2, 3, 2.5, A=16, levels=3)
    return spec, annular.annular_verify(spec)


def test_report_structure(small_report):
    spec, rep = small_report
    radii = [row["radius"] for row in rep.circle_minima]
    assert all(a < b < 1 for a, b in zip(radii, radii[1:]))
    assert len(rep.tail_norms["lq_increments"]) == 3
    assert np.allclose(rep.tail_norms["lq_partial"], np.cumsum(rep.tail_norms["lq_increments"]))
    d = json.loads(rep.to_json())
    assert d["spec"]["mode"] == "LpGap"
    assert set(d["verdicts"]) >= {"minima_strictly_increasing", "ratio_spread"}
    lines = rep.to_csv().splitlines()
    assert lines[0].startswith("#") and lines[1] == "k,radius,min_modulus,predicted_scale"


def test_block_bound_is_a_lower_bound(small_report):
    _, rep = small_report
    for row in rep.circle_minima:
        assert row["min_modulus"] >= row["block_lower_bound"] - 1e-12
        assert row["block_lower_bound"] >= row["crude_lower_bound"] - 1e-12 or row["k"] == 1


def test_increments_track_prediction(small_report):
    _, rep = small_report
    got = rep.tail_norms["lq_increments"]
    pred = rep.tail_norms["predicted_lq_increment"]
    ratios = [g / p for g, p in zip(got, pred)]
    assert max(ratios) / min(ratios) < 2


def test_block_l2(small_report):
    spec, rep = small_report
    assert rep.tail_norms["block_l2_sq"] == pytest.approx([b.weight**2 for b in spec.blocks])
    assert spec.mode == Mode.LpGap
