"""Asymptotic formulas for the Taylor coefficients of ``b_lam**n``.

One function per regime, a dispatcher over the region classifier, and an
error harness against the exact oracles.  Every formula is evaluated as a
``(sign, log|value|)`` pair first, so exponentially small coefficients never
underflow; the float value is ``sign * exp(log|value|)``.

Regimes, with ``a = k/n`` and ``Delta = (a - alpha0)(1/alpha0 - a)``:

=======  ==================================================================
I        ``(-lam)^(n-k) (n(1-lam^2))^k / k!``
II/VIII  ``(2 k pi)^(-1/2) [(alpha0-a)(1/alpha0-a)]^(-1/4) (b(z+)/z+^a)^n``
III/VII  same amplitude with ``exp(-(2/3) n |gamma|^3)``
IV/VI    ``sqrt(2) C^(1/4) Ai(n^(2/3) C |a - edge|) / (n^(1/3) sqrt(a) ...)``
V        ``sqrt(2/(n pi)) cos(n h(phi+) - pi/4) / (sqrt(a) Delta^(1/4))``
=======  ==================================================================
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import airy, exact, saddle
from .core import (
    CoeffQuery,
    DomainError,
    Region,
    RegionLabel,
    Thresholds,
    classify_region,
    default_thresholds,
)

__all__ = [
    "WrongRegime",
    "AsymResult",
    "asym_region_I",
    "asym_region_II_VIII",
    "asym_region_III",
    "asym_region_VII",
    "asym_region_IV",
    "asym_region_VI",
    "asym_region_V",
    "asym_airy_uniform",
    "asym_auto",
    "envelope_V",
    "SweepTable",
    "error_sweep",
    "fit_slope",
]


class WrongRegime(DomainError):
    """The formula was asked for a point outside its regime."""


def _signed(sign: int, logabs: float) -> float:
    if sign == 0 or logabs == -math.inf:
        return 0.0
    if logabs > 709.7:
        return sign * math.inf
    return sign * math.exp(logabs) if logabs > -745.2 else sign * 0.0


def _split(v: float) -> tuple[int, float]:
    if v == 0:
        return 0, -math.inf
    return (1 if v > 0 else -1), math.log(abs(v))


def _parity(n: int, k: int) -> int:
    return -1 if (n - k) % 2 else 1


def _setup(lam, n, k):
    lamf = float(lam)
    if not 0 < lamf < 1:
        raise DomainError(f"lambda must lie in (0, 1), got {lam}")
    if int(n) != n or n < 1 or int(k) != k or k < 0:
        raise DomainError(f"need integers n >= 1, k >= 0, got n={n}, k={k}")
    a0 = (1 - lamf) / (1 + lamf)
    return lamf, k / n, a0, 1 / a0


def _omega(lam, n, thresholds):
    th = thresholds if thresholds is not None else default_thresholds(lam, n)
    return th


def _out(sign, logabs, log):
    return (sign, logabs) if log else _signed(sign, logabs)


def asym_region_I(lam, n: int, k: int, log: bool = False):
    """Fixed-k law ``(-lam)^(n-k) (n(1-lam^2))^k / k!``.

    Requires ``k <= max(20, n**(1/4))``.
    """
    lamf, a, a0, _ = _setup(lam, n, k)
    if k > max(20, n**0.25):
        raise WrongRegime(f"k = {k} is not small against n = {n} (limit max(20, n^(1/4)))")
    la = (n - k) * math.log(lamf) + k * math.log(n * (1 - lamf * lamf)) - math.lgamma(k + 1)
    return _out(_parity(n, k), la, log)


def _exp_regime_parts(lamf, n, k, a):
    # Re Phi(z+) and the sign of (b(z+)/z+^a)^n for real z+
    zp, _ = saddle.z_pm(lamf, a)
    x = zp.real
    re = -a * math.log(abs(x)) + math.log(abs(x - lamf)) - math.log(abs(1 - lamf * x))
    sign = _parity(n, k) if x < 0 else 1
    return re, sign


def _check_outside(a, a0, a0inv, n, lam, strict, thresholds):
    if a0 <= a <= a0inv:
        raise WrongRegime(f"a = {a} lies in the transition interval [{a0}, {a0inv}]")
    if strict:
        om = _omega(lam, n, thresholds).omega / n
        if abs(a - a0) <= om or abs(a - a0inv) <= om:
            raise WrongRegime(f"a = {a} within omega/n = {om:.4g} of an edge")


def asym_region_II_VIII(lam, n: int, k: int, log: bool = False, strict: bool = False,
                        thresholds: Thresholds | None = None):
    """Saddle-point law outside the transition interval.

    ``(2 k pi)^(-1/2) [(alpha0-a)(1/alpha0-a)]^(-1/4) (b(z+)/z+^a)^n``; the
    power carries the sign ``(-1)^(n-k)`` when ``z+ < 0``.

    Raises
    ------
    WrongRegime
        If ``a`` lies in ``[alpha0, 1/alpha0]`` or, with ``strict``, within
        ``omega/n`` of an edge.
    """
    lamf, a, a0, a0inv = _setup(lam, n, k)
    if k == 0:
        raise WrongRegime("k = 0 is exact: use (-lam)^n")
    _check_outside(a, a0, a0inv, n, lam, strict, thresholds)
    re, sign = _exp_regime_parts(lamf, n, k, a)
    la = (
        -0.5 * math.log(2 * k * math.pi)
        - 0.25 * math.log((a0 - a) * (a0inv - a))
        + n * re
    )
    return _out(sign, la, log)


def _exp_gamma(lamf, n, k, a, side):
    _, g3, _ = saddle.gamma_quantities(lamf, a, side)
    return abs(g3), g3


def asym_region_III(lam, n: int, k: int, log: bool = False, strict: bool = False,
                    thresholds: Thresholds | None = None):
    """Left exponential transition law with the exact ``gamma^3``.

    ``(-1)^(n-k) / sqrt(2 n pi) / (sqrt(a) [(1/alpha0-a)(alpha0-a)]^(1/4))
    * exp(-(2/3) n |gamma|^3)``, ``gamma^3 = (3/2)[Phi(z+) - i pi (1-a)]``.
    """
    lamf, a, a0, a0inv = _setup(lam, n, k)
    if not 0 < a < a0:
        raise WrongRegime(f"a = {a} not in (0, alpha0 = {a0})")
    _check_outside(a, a0, a0inv, n, lam, strict, thresholds)
    g3abs, _ = _exp_gamma(lamf, n, k, a, saddle.Side.LeftEdge)
    la = (
        -0.5 * math.log(2 * n * math.pi)
        - 0.5 * math.log(a)
        - 0.25 * math.log((a0inv - a) * (a0 - a))
        - (2.0 / 3.0) * n * g3abs
    )
    return _out(_parity(n, k), la, log)


def asym_region_VII(lam, n: int, k: int, log: bool = False, strict: bool = False,
                    thresholds: Thresholds | None = None):
    """Right exponential transition law with ``gamma^3 = (3/2) Phi(z+)``."""
    lamf, a, a0, a0inv = _setup(lam, n, k)
    if not a > a0inv:
        raise WrongRegime(f"a = {a} not above 1/alpha0 = {a0inv}")
    _check_outside(a, a0, a0inv, n, lam, strict, thresholds)
    g3abs, _ = _exp_gamma(lamf, n, k, a, saddle.Side.RightEdge)
    la = (
        -0.5 * math.log(2 * n * math.pi)
        - 0.5 * math.log(a)
        - 0.25 * math.log((a - a0inv) * (a - a0))
        - (2.0 / 3.0) * n * g3abs
    )
    return _out(1, la, log)


def envelope_V(lam, n: int, k: int) -> float:
    """Amplitude of the Region V law without the cosine factor."""
    lamf, a, a0, a0inv = _setup(lam, n, k)
    return math.sqrt(2 / (n * math.pi)) / (math.sqrt(a) * ((a0inv - a) * (a - a0)) ** 0.25)


def asym_region_V(lam, n: int, k: int, log: bool = False, strict: bool = False,
                  thresholds: Thresholds | None = None):
    """Oscillatory law ``sqrt(2/(n pi)) cos(n h(phi+) - pi/4) / (sqrt(a) Delta^(1/4))``."""
    lamf, a, a0, a0inv = _setup(lam, n, k)
    if not a0 < a < a0inv:
        raise WrongRegime(f"a = {a} outside ({a0}, {a0inv})")
    if strict:
        om = _omega(lam, n, thresholds).omega
        if not (a0 * n + om <= k <= a0inv * n - om):
            raise WrongRegime(f"k = {k} outside the Region V band")
    t = saddle.varphi_plus(lamf, a)
    # n h(phi+) = (n-k) phi+ + 2n T(phi+); reduce the two parts separately
    T = math.atan2(lamf * math.sin(t), 1 - lamf * math.cos(t))
    phase = math.fmod((n - k) * t, 2 * math.pi) + math.fmod(2 * n * T, 2 * math.pi)
    val = envelope_V(lamf, n, k) * math.cos(phase - math.pi / 4)
    return _out(*_split(val), log)


def _airy_signed_log(x: float) -> tuple[int, float]:
    if x > airy.SERIES_LIMIT:
        return 1, airy.log_ai_pos(x)
    return _split(airy.ai(x))


def _edge_side(a, a0, a0inv):
    return saddle.Side.LeftEdge if a < 1 else saddle.Side.RightEdge


def asym_region_IV(lam, n: int, k: int, log: bool = False, strict: bool = False,
                   thresholds: Thresholds | None = None):
    """Airy law at the left edge with the leading-order ``gamma^2``.

    ``(-1)^(n-k) sqrt(2) C_L^(1/4) / (n^(1/3) sqrt(a) (1/alpha0 - a)^(1/4))
    * Ai(n^(2/3) C_L (alpha0 - a))``, ``C_L = (1+lam)/(lam(1-lam))^(1/3)``.
    """
    lamf, a, a0, a0inv = _setup(lam, n, k)
    if not 0 < a < 1:
        raise WrongRegime(f"a = {a} not on the left of a = 1")
    if strict:
        om = _omega(lam, n, thresholds).omega
        if abs(k - a0 * n) > om:
            raise WrongRegime(f"|k - alpha0 n| = {abs(k - a0 * n):.4g} > omega = {om:.4g}")
    cl, _ = saddle.edge_constants(lamf)
    x = n ** (2 / 3) * cl * (a0 - a)
    s, lai = _airy_signed_log(x)
    la = (
        0.5 * math.log(2) + 0.25 * math.log(cl) - math.log(n) / 3
        - 0.5 * math.log(a) - 0.25 * math.log(a0inv - a) + lai
    )
    return _out(s * _parity(n, k), la, log)


def asym_region_VI(lam, n: int, k: int, log: bool = False, strict: bool = False,
                   thresholds: Thresholds | None = None):
    """Airy law at the right edge with the leading-order ``gamma^2``.

    ``sqrt(2) C_R^(1/4) / (n^(1/3) sqrt(a) (a - alpha0)^(1/4))
    * Ai(n^(2/3) C_R (a - 1/alpha0))``, ``C_R = (1-lam)/(lam(1+lam))^(1/3)``.
    """
    lamf, a, a0, a0inv = _setup(lam, n, k)
    if not a > 1:
        raise WrongRegime(f"a = {a} not on the right of a = 1")
    if strict:
        om = _omega(lam, n, thresholds).omega
        if abs(k - a0inv * n) > om:
            raise WrongRegime(f"|k - n/alpha0| = {abs(k - a0inv * n):.4g} > omega = {om:.4g}")
    _, cr = saddle.edge_constants(lamf)
    x = n ** (2 / 3) * cr * (a - a0inv)
    s, lai = _airy_signed_log(x)
    la = (
        0.5 * math.log(2) + 0.25 * math.log(cr) - math.log(n) / 3
        - 0.5 * math.log(a) - 0.25 * math.log(a - a0) + lai
    )
    return _out(s, la, log)


def _uniform_amp_sq(lamf, a, a0, a0inv, g2, left):
    # |gamma| / sqrt|Delta|, squared; its limit at the edge is C / (1/alpha0 - alpha0)
    edge = a0 if left else a0inv
    if abs(a - edge) < saddle.COALESCE_GUARD:
        cl, cr = saddle.edge_constants(lamf)
        return (cl if left else cr) / (a0inv - a0)
    return abs(g2) / abs((a - a0) * (a0inv - a))


def asym_airy_uniform(lam, n: int, k: int, side: saddle.Side | str = saddle.Side.Auto,
                      log: bool = False, thresholds: Thresholds | None = None,
                      check_band: bool = True, full_output: bool = False):
    """Uniform Airy law with ``gamma^2`` derived from the exact ``gamma^3``.

    ``(-1)^(n-k) sqrt(2|gamma|/a) |Delta|^(-1/4) Ai(n^(2/3) gamma^2) / n^(1/3)``
    on the left side; the right side has no sign factor.  At the edge itself
    the amplitude takes its limit ``sqrt(2/a) (C/(1/alpha0 - alpha0))^(1/4)``.

    Valid for ``a`` in ``[alpha, beta]`` or ``[1/beta, 1/alpha]``.
    """
    lamf, a, a0, a0inv = _setup(lam, n, k)
    th = _omega(lam, n, thresholds)
    if check_band and not (th.alpha <= a <= th.beta or 1 / th.beta <= a <= 1 / th.alpha):
        raise WrongRegime(
            f"a = {a} outside [{th.alpha:.4g}, {th.beta:.4g}] and "
            f"[{1 / th.beta:.4g}, {1 / th.alpha:.4g}]"
        )
    sd = saddle.Side(side)
    if sd == saddle.Side.Auto:
        sd = _edge_side(a, a0, a0inv)
    left = sd == saddle.Side.LeftEdge
    g2, _, _ = saddle.gamma_quantities(lamf, a, sd)
    amp2 = _uniform_amp_sq(lamf, a, a0, a0inv, g2, left)
    x = n ** (2 / 3) * g2
    s, lai = _airy_signed_log(x)
    la = 0.5 * math.log(2 / a) + 0.25 * math.log(amp2) - math.log(n) / 3 + lai
    sign = s * (_parity(n, k) if left else 1)
    out = _out(sign, la, log)
    if full_output:
        return out, x
    return out


@dataclass
class AsymResult:
    """Outcome of :func:`asym_auto`.

    ``value`` may underflow to zero; ``sign`` and ``log_abs`` do not.
    """

    value: float
    region: RegionLabel
    ingredients: saddle.SaddleData | None
    airy_arg: float | None
    sign: int
    log_abs: float
    formula: str


def asym_auto(lam, n: int, k: int, thresholds: Thresholds | None = None,
              with_saddle: bool = True) -> AsymResult:
    """Classify ``(lam, n, k)`` and evaluate the matching formula.

    Regions IV and VI use :func:`asym_airy_uniform` (``gamma^2`` from the
    exact ``gamma^3``); :func:`asym_region_IV` and :func:`asym_region_VI`
    remain available for the leading-order comparison.
    """
    q = CoeffQuery(lam, n, k)
    label = classify_region(q, thresholds)
    lamf, a, a0, a0inv = _setup(lam, n, k)
    r = label.region
    airy_arg = None
    if r == Region.I:
        s, la = asym_region_I(lamf, n, k, log=True)
        name = "asym_region_I"
    elif r in (Region.II, Region.VIII):
        s, la = asym_region_II_VIII(lamf, n, k, log=True)
        name = "asym_region_II_VIII"
    elif r == Region.III:
        s, la = asym_region_III(lamf, n, k, log=True)
        name = "asym_region_III"
    elif r == Region.VII:
        s, la = asym_region_VII(lamf, n, k, log=True)
        name = "asym_region_VII"
    elif r in (Region.IV, Region.VI):
        # the exact-gamma law; the leading-order laws drift across the wide Airy band
        side = saddle.Side.LeftEdge if r == Region.IV else saddle.Side.RightEdge
        (s, la), airy_arg = asym_airy_uniform(lamf, n, k, side, log=True, check_band=False,
                                              full_output=True)
        name = "asym_airy_uniform"
    else:
        s, la = asym_region_V(lamf, n, k, log=True)
        name = "asym_region_V"
    sd = saddle.saddle_data(lamf, a) if (with_saddle and k > 0) else None
    return AsymResult(_signed(s, la), label, sd, airy_arg, s, la, name)


# -- error harness -----------------------------------------------------------


@dataclass
class SweepTable:
    """Rows ``(k, region, exact, asym, abs_err, rel_err, env_err)`` and a
    per-region summary."""

    lam: float
    n: int
    rows: list = field(default_factory=list)
    provenance: str = ""

    COLUMNS = ("k", "region", "exact", "asym", "abs_err", "rel_err", "env_err")

    def column(self, name):
        i = self.COLUMNS.index(name)
        return np.array([r[i] for r in self.rows], dtype=object if name == "region" else float)

    def summary(self) -> dict:
        out = {}
        for reg in Region:
            sel = [r for r in self.rows if r[1] == reg.name and np.isfinite(r[5])]
            if not sel:
                continue
            rel = np.array([r[5] for r in sel])
            out[reg.name] = {
                "count": len(sel),
                "max_rel": float(rel.max()),
                "med_rel": float(np.median(rel)),
            }
        return out

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        buf.write(f"# lambda={self.lam} n={self.n} exact={self.provenance} "
                  f"units=dimensionless precision=float64\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for r in self.rows:
            w.writerow([r[0], r[1]] + [repr(float(v)) for v in r[2:]])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    def summary_json(self, fitted: dict | None = None) -> str:
        s = self.summary()
        for reg, val in s.items():
            val["fitted_exponent"] = None if fitted is None else fitted.get(reg)
        return json.dumps(s, indent=1, sort_keys=True)


def error_sweep(lam, n: int, k_set, thresholds: Thresholds | None = None,
                exact_seq: exact.CoeffSequence | None = None,
                log_tiny: bool = True) -> SweepTable:
    """Compare :func:`asym_auto` with the exact coefficients over ``k_set``.

    Exact values come from :func:`exact.coeff_dft`.  Where the coefficient is
    below ``1e-12`` of the peak (exponential regimes) it is recomputed in log
    space by :func:`exact.coeff_dft_shifted` and the relative error is taken
    as ``|exp(log|asym| - log|exact|) - 1|`` (``inf`` on a sign mismatch).
    ``env_err`` is ``abs_err`` divided by the Region V envelope when ``k`` is
    inside the transition interval, and equals ``rel_err`` elsewhere.
    """
    lamf = float(lam)
    ks = [int(k) for k in k_set]
    if exact_seq is None:
        M = exact.default_num_samples(lamf, n)
        while M <= max(ks, default=0):
            M *= 2
        exact_seq = exact.coeff_dft(lam, n, M)
    vals = exact_seq.values
    peak = float(np.max(np.abs(vals)))
    a0 = (1 - lamf) / (1 + lamf)
    table = SweepTable(lamf, n, provenance=exact_seq.provenance.value)
    for k in ks:
        res = asym_auto(lam, n, k, thresholds, with_saddle=False)
        ex = float(vals[k])
        if log_tiny and abs(ex) < 1e-12 * peak:
            es, el = exact.coeff_dft_shifted(lam, n, k)[:2]
        else:
            es, el = _split(ex)
        if es == 0 or res.sign != es:
            rel = math.inf if es != 0 or res.sign != 0 else 0.0
        else:
            rel = abs(math.expm1(res.log_abs - el))
        abs_err = abs(res.value - _signed(es, el))
        if a0 < k / n < 1 / a0:
            env = abs_err / envelope_V(lamf, n, k)
        else:
            env = rel
        table.rows.append((k, res.region.name, _signed(es, el), res.value, abs_err, rel, env))
    return table


def fit_slope(xs, ys) -> float:
    """Least-squares slope of ``log ys`` against ``log xs`` (unweighted)."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])
