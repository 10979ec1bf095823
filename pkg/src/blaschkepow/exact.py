"""Exact and high-accuracy Taylor coefficients of ``b_lam**n``.

Three independent routes are provided:

* ``coeff_rational`` expands ``(z - lam)**n * (1 - lam*z)**(-n)`` in exact
  integer arithmetic.
* ``coeff_dft`` samples ``b_lam**n`` on the unit circle and applies an FFT.
  ``coeff_dft_shifted`` does the same on the circle through the saddle point,
  in log space, which resolves exponentially small coefficients.
* ``coeff_quadrature`` integrates the real oscillatory integral
  ``(1/pi) int_0^pi cos((n-k)t + 2n T(t)) dt`` with an adaptive rule,
  where ``T(t) = arctan(lam sin t / (1 - lam cos t))``.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
import os
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np
import scipy.fft
from scipy import integrate, optimize

from .core import BudgetExceeded, DomainError, NumericalRefusal, as_fraction

__all__ = [
    "Provenance",
    "CoeffSequence",
    "work_limit",
    "coeff_rational",
    "coeff_rational_log",
    "coeffs_rational",
    "default_num_samples",
    "aliasing_bound",
    "coeff_dft",
    "coeff_dft_shifted",
    "coeff_quadrature",
    "coeffs_quadrature",
    "duality_check",
    "sequence_invariants",
]

WORK_LIMIT_ENV = "BLASCHKEPOW_WORK_LIMIT"
DEFAULT_WORK_LIMIT = 2_000_000
# np.longdouble(np.pi) only carries double precision
PI_LD = np.longdouble("3.14159265358979323846264338327950288")


class Provenance(str, enum.Enum):
    RationalConvolution = "RationalConvolution"
    DftSampling = "DftSampling"
    ShiftedDftSampling = "ShiftedDftSampling"
    Quadrature = "Quadrature"
    Assembled = "Assembled"


@dataclass
class CoeffSequence:
    """Dense coefficient vector ``values[k]``, ``k = 0..K``.

    ``error_bound`` is a uniform absolute bound on ``|values[k] - c(k)|``
    (zero for exact rationals, the aliasing bound for DFT output).
    """

    values: np.ndarray
    n: int
    lam: object
    provenance: Provenance
    error_bound: float = 0.0
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    @property
    def K(self) -> int:
        return len(self.values) - 1

    def _lam_str(self) -> str:
        return str(self.lam)

    def to_csv(self, path=None, comment: bool = True) -> str:
        buf = io.StringIO()
        if comment:
            buf.write(
                f"# provenance={self.provenance.value} lambda={self._lam_str()} "
                f"n={self.n} precision=float64 units=dimensionless\n"
            )
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "value", "abs_error_bound"])
        for k, v in enumerate(np.asarray(self.values, dtype=float)):
            w.writerow([k, repr(float(v)), repr(float(self.error_bound))])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    def to_dict(self) -> dict:
        return {
            "lambda": self._lam_str(),
            "n": int(self.n),
            "provenance": self.provenance.value,
            "values": [float(v) for v in np.asarray(self.values, dtype=float)],
            "error_bound": float(self.error_bound),
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=1)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_json(cls, text: str) -> "CoeffSequence":
        d = json.loads(text)
        return cls(
            values=np.asarray(d["values"], dtype=float),
            n=d["n"],
            lam=d["lambda"],
            provenance=Provenance(d["provenance"]),
            error_bound=d["error_bound"],
        )


def work_limit() -> int:
    """Work limit for the rational oracle (``n*k``), overridable through the
    ``BLASCHKEPOW_WORK_LIMIT`` environment variable."""
    raw = os.environ.get(WORK_LIMIT_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_WORK_LIMIT
    return int(float(raw))


def _check_nk(n, k=0):
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if int(k) != k or k < 0:
        raise DomainError(f"k must be a nonnegative integer, got {k}")


def _pq(lam) -> tuple[int, int]:
    f = as_fraction(lam)
    if not 0 < f < 1:
        raise DomainError(f"lambda must lie in (0, 1), got {lam}")
    return f.numerator, f.denominator


# -- rational route -----------------------------------------------------------


def _numerator(p: int, q: int, n: int, k: int) -> int:
    # c(k) * q**(n+k) = sum_j C(n,j) (-1)^(n-j) p^(n+k-2j) q^(2j) C(k-j+n-1, n-1)
    jmax = min(k, n)
    t = comb(k + n - 1, n - 1) * p ** (n + k)
    total = -t if n % 2 else t
    p2, q2 = p * p, q * q
    for j in range(1, jmax + 1):
        # ratio of consecutive terms; every t is an integer so division is exact
        t = t * (n - j + 1) * (k - j + 1) * q2 // (j * (k - j + n) * p2)
        total += -t if (n - j) % 2 else t
    return total


def coeff_rational(lam, n: int, k: int, limit: int | None = None) -> Fraction:
    """k-th Taylor coefficient of ``b_lam**n`` as an exact rational.

    Parameters
    ----------
    lam : rational
        ``p/q`` with ``0 < p < q``; strings such as ``"1/2"`` are accepted.
    n, k : int
    limit : int, optional
        Work limit on ``n*k``; defaults to :func:`work_limit`.

    Raises
    ------
    BudgetExceeded
        If ``n*k`` exceeds the work limit.
    """
    _check_nk(n, k)
    p, q = _pq(lam)
    limit = work_limit() if limit is None else limit
    if n * k > limit:
        raise BudgetExceeded(
            f"rational oracle: n*k = {n * k} exceeds work limit {limit} "
            f"(set {WORK_LIMIT_ENV} to override)"
        )
    return Fraction(_numerator(p, q, n, k), q ** (n + k))


def coeff_rational_log(lam, n: int, k: int, limit: int | None = None) -> tuple[int, float]:
    """Sign and natural log of ``|c(k)|`` from the rational route.

    Works far below the float range; returns ``(0, -inf)`` for a zero value.
    """
    c = coeff_rational(lam, n, k, limit)
    if c == 0:
        return 0, -math.inf
    sign = 1 if c > 0 else -1
    return sign, math.log(abs(c.numerator)) - math.log(c.denominator)


def coeffs_rational(lam, n: int, K: int, limit: int | None = None) -> CoeffSequence:
    """Coefficients ``0..K`` from the rational route, rounded to float64."""
    _check_nk(n, K)
    p, q = _pq(lam)
    limit = work_limit() if limit is None else limit
    if n * K > limit:
        raise BudgetExceeded(
            f"rational oracle: n*K = {n * K} exceeds work limit {limit} "
            f"(set {WORK_LIMIT_ENV} to override)"
        )
    # integer convolution over the common denominator q**(n+k)
    a = [comb(n, j) * (-p) ** (n - j) * q ** (2 * j) for j in range(n + 1)]
    vals = np.empty(K + 1)
    pk = [1]
    for m in range(1, K + 1):
        pk.append(pk[-1] * p)
    for k in range(K + 1):
        s = 0
        for j in range(min(k, n) + 1):
            s += a[j] * comb(k - j + n - 1, n - 1) * pk[k - j]
        vals[k] = float(Fraction(s, q ** (n + k)))
    return CoeffSequence(vals, n, Fraction(p, q), Provenance.RationalConvolution, 0.0)


# -- DFT route ----------------------------------------------------------------


def _tan_half(lam, t):
    # T(t) = arg(1 - lam e^{-it}) is the continuous branch arctan2(lam sin t, 1 - lam cos t)
    return np.arctan2(lam * np.sin(t), 1 - lam * np.cos(t))


def aliasing_bound(lam: float, n: int, M: int) -> float:
    """Rigorous bound on ``sum_{m>=1} |c(k + m M)|`` uniform in ``k >= 0``.

    From Cauchy's estimate on ``|z| = r``, ``1 < r < 1/lam``:
    ``|c(j)| <= ((r - lam)/(1 - lam r))**n * r**(-j)``.  The bound is
    minimized over ``r``.
    """
    lam = float(lam)

    def logb(s):
        r = math.exp(s)
        return (
            n * (math.log(r - lam) - math.log(1 - lam * r))
            - M * s
            - math.log1p(-math.exp(-M * s))
        )

    smax = -math.log(lam)
    res = optimize.minimize_scalar(
        logb, bounds=(1e-12 * smax + 1e-14, smax * (1 - 1e-9)), method="bounded",
        options={"xatol": 1e-12 * smax},
    )
    val = float(res.fun)
    return math.exp(val) if val > -745 else 0.0


def default_num_samples(lam: float, n: int, target: float = 1e-17) -> int:
    """Smallest power of two ``M >= 8n`` whose aliasing bound is below ``target``."""
    M = 1 << max(3, math.ceil(math.log2(8 * n)))
    while aliasing_bound(lam, n, M) > target and M < (1 << 30):
        M *= 2
    return M


def _samples(lam, n, M, extended):
    j = np.arange(M)
    if extended:
        dt = np.longdouble
        lam_ = np.longdouble(float(lam)) if not isinstance(lam, Fraction) else (
            np.longdouble(lam.numerator) / np.longdouble(lam.denominator)
        )
        t = (2 * PI_LD) * j.astype(dt) / dt(M)
        twopi = 2 * PI_LD
    else:
        lam_ = float(lam)
        t = 2 * np.pi * j / M
        twopi = 2 * np.pi
    # arg b(e^{it}) = t + 2T(t); the linear part is reduced exactly mod M
    lin = ((n * j) % M).astype(t.dtype) * (twopi / M)
    T = _tan_half(lam_, t)
    twoT = np.fmod(2 * n * T, twopi)
    theta = lin + twoT
    return np.cos(theta) + 1j * np.sin(theta)


def coeff_dft(lam, n: int, num_samples: int | None = None, extended: bool | None = None,
              check_alias: bool = True) -> CoeffSequence:
    """All coefficients ``0..M-1`` of ``b_lam**n`` from ``M`` circle samples.

    Parameters
    ----------
    lam : float or rational
    n : int
    num_samples : int, optional
        ``M``; by default the smallest power of two ``>= 8n`` whose aliasing
        bound is below 1e-17.
    extended : bool, optional
        Use long double arithmetic; defaults to ``n > 10**4``.

    Raises
    ------
    NumericalRefusal
        If ``M < 4n``.
    """
    _check_nk(n)
    lamf = float(lam)
    if not 0 < lamf < 1:
        raise DomainError(f"lambda must lie in (0, 1), got {lam}")
    M = default_num_samples(lamf, n) if num_samples is None else int(num_samples)
    if M < 4 * n:
        raise NumericalRefusal(
            f"M = {M} < 4n = {4 * n}: aliasing not controlled; use M >= {8 * n}"
        )
    if extended is None:
        extended = n > 10_000
    z = _samples(lam, n, M, extended)
    c = scipy.fft.fft(z) / M
    vals = np.real(c)
    eps = float(np.finfo(np.longdouble if extended else float).eps)
    alias = aliasing_bound(lamf, n, M) if check_alias else math.nan
    roundoff = 4 * eps * math.log2(M) + 2 * eps * n
    return CoeffSequence(
        vals.astype(float),
        n,
        lam,
        Provenance.DftSampling,
        error_bound=alias + roundoff,
        meta={"M": M, "extended": bool(extended), "aliasing_bound": alias},
    )


def _log_b_on_circle(lam, rho, t):
    # log b(rho e^{it}) in long double: log|.| and arg
    z = rho * (np.cos(t) + 1j * np.sin(t))
    num = z - lam
    den = 1 - lam * z
    # the circle may pass through the zero z = lam; exp(-inf) = 0 there is exact
    with np.errstate(divide="ignore"):
        logmod = np.log(np.abs(num)) - np.log(np.abs(den))
    ang = np.angle(num) - np.angle(den)
    return logmod, ang


def _saddle_radius(lam: float, a: float) -> tuple[float, int]:
    # real saddle of -a log|z| + log|b(z)| on the axis: radius and sign of z+
    c = (a * (1 + lam * lam) - (1 - lam * lam)) / (2 * lam * a)
    if abs(c) <= 1:
        return 1.0, 1
    s = math.sqrt(c * c - 1)
    if c < 0:
        zp = 1.0 / (c - s)  # c + s suffers cancellation
    else:
        zp = c + s
    return abs(zp), (1 if zp > 0 else -1)


def coeff_dft_shifted(lam, n: int, k: int, radius: float | None = None,
                      rtol: float = 1e-10, max_samples: int = 1 << 22) -> tuple[int, float, dict]:
    """Single coefficient from samples on the circle through the saddle point.

    Works in log space with long double samples, so exponentially small
    coefficients (far below the float range) are resolved to relative
    accuracy.  The number of samples is doubled until the log-magnitude
    stabilizes to ``rtol``.

    Returns
    -------
    (sign, log_abs, info)
    """
    _check_nk(n, k)
    lamf = float(lam)
    if radius is None:
        radius, _ = _saddle_radius(lamf, max(k, 0.5) / n)
        if not 0 < radius < 1 / lamf:
            raise NumericalRefusal(f"saddle radius {radius} outside (0, 1/lambda)")
    rho = np.longdouble(radius)
    lam_ = np.longdouble(lamf) if not isinstance(lam, Fraction) else (
        np.longdouble(lam.numerator) / np.longdouble(lam.denominator))
    M = 1 << max(4, math.ceil(math.log2(max(2 * k + 2, 8 * n))))
    prev = None
    while True:
        j = np.arange(M)
        t = (2 * PI_LD) * j.astype(np.longdouble) / np.longdouble(M)
        logmod, ang = _log_b_on_circle(lam_, rho, t)
        L = n * logmod
        Lmax = L.max()
        # phase of b^n z^{-k}: the z^{-k} factor is folded into the DFT index
        phase = np.fmod(n * ang, 2 * PI_LD)
        g = np.exp(L - Lmax) * (np.cos(phase) + 1j * np.sin(phase))
        G = scipy.fft.fft(g)
        val = G[k % M].real / M
        if val == 0:
            sign, logabs = 0, -math.inf
        else:
            sign = 1 if val > 0 else -1
            logabs = float(Lmax - k * np.log(rho) + np.log(np.abs(val)))
        # relative roundoff: unit-sized samples against |val|
        rel_round = float(np.finfo(np.longdouble).eps) * math.sqrt(M) / max(abs(float(val)), 1e-300)
        if prev is not None and prev[0] == sign and abs(prev[1] - logabs) <= rtol * max(1.0, abs(logabs)):
            return sign, logabs, {"M": M, "radius": float(radius), "rel_roundoff": rel_round}
        if M >= max_samples:
            raise NumericalRefusal(
                f"shifted DFT did not converge by M = {M} (last change "
                f"{abs(prev[1] - logabs) if prev else math.inf:.3g})"
            )
        prev = (sign, logabs)
        M *= 2


# -- quadrature route ---------------------------------------------------------


def _quad_osc(f_cos, f_sin, w, tol, limit):
    # int_0^pi [f_cos cos(w t) - f_sin sin(w t)] dt with QAWO weights
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            if w == 0:
                i1, e1 = integrate.quad(f_cos, 0, math.pi, epsabs=tol, epsrel=0, limit=limit)
                return i1, e1, True
            ws = abs(w)
            sgn = 1 if w > 0 else -1
            i1, e1 = integrate.quad(f_cos, 0, math.pi, weight="cos", wvar=ws,
                                    epsabs=tol / 2, epsrel=0, limit=limit)
            i2, e2 = integrate.quad(f_sin, 0, math.pi, weight="sin", wvar=ws,
                                    epsabs=tol / 2, epsrel=0, limit=limit)
            return i1 - sgn * i2, e1 + e2, True
        except integrate.IntegrationWarning:
            pass
    # retry without raising, report the achieved error
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if w == 0:
            i1, e1 = integrate.quad(f_cos, 0, math.pi, epsabs=tol, epsrel=0, limit=limit)
            return i1, e1, e1 <= tol
        ws = abs(w)
        sgn = 1 if w > 0 else -1
        i1, e1 = integrate.quad(f_cos, 0, math.pi, weight="cos", wvar=ws,
                                epsabs=tol / 2, epsrel=0, limit=limit)
        i2, e2 = integrate.quad(f_sin, 0, math.pi, weight="sin", wvar=ws,
                                epsabs=tol / 2, epsrel=0, limit=limit)
        return i1 - sgn * i2, e1 + e2, (e1 + e2) <= tol


@dataclass(frozen=True)
class QuadResult:
    value: float
    abserr: float
    converged: bool

    def __float__(self):
        return self.value


def coeff_quadrature(lam, n: int, k: int, tol: float = 1e-12, limit: int = 2000,
                     full_output: bool = False):
    """k-th coefficient by adaptive quadrature of the real phase integral.

    ``c(k) = (1/pi) int_0^pi cos((n-k) t + 2 n T(t)) dt``.  The factor
    ``cos/sin((n-k) t)`` is handled by QUADPACK's oscillatory weights.

    Returns the value, or a :class:`QuadResult` when ``full_output`` is set.
    If the subdivision budget is exhausted the achieved error is reported
    through ``QuadResult.abserr`` and ``converged=False``.
    """
    _check_nk(n, k)
    if tol <= 0:
        raise DomainError("tol must be positive")
    lam = float(lam)
    w = n - k

    def fc(t):
        return math.cos(2 * n * math.atan2(lam * math.sin(t), 1 - lam * math.cos(t)))

    def fs(t):
        return math.sin(2 * n * math.atan2(lam * math.sin(t), 1 - lam * math.cos(t)))

    val, err, ok = _quad_osc(fc, fs, w, math.pi * tol, limit)
    res = QuadResult(val / math.pi, err / math.pi, ok)
    return res if full_output else res.value


def coeffs_quadrature(lam, n: int, K: int, tol: float = 1e-12) -> CoeffSequence:
    """Coefficients ``0..K`` by one vector-valued adaptive quadrature."""
    _check_nk(n, K)
    lamf = float(lam)
    ks = np.arange(K + 1)
    w = n - ks

    def f(t):
        return np.cos(w * t + 2 * n * math.atan2(lamf * math.sin(t), 1 - lamf * math.cos(t)))

    val, err = integrate.quad_vec(f, 0, math.pi, epsabs=math.pi * tol, epsrel=0,
                                  norm="max", limit=100_000)
    return CoeffSequence(np.asarray(val) / math.pi, n, lam, Provenance.Quadrature,
                         error_bound=float(err) / math.pi)


def duality_check(lam, n: int, k: int, tol: float = 1e-12, reference=None) -> float:
    """Residual of the duality identity between ``b^n`` and ``b^k`` coefficients.

    The contour integral ``(-1)^(n-k)/(2 pi i) oint P(z)/z exp(k Phi_{n/k}(z)) dz``
    over the unit circle, with the Poisson kernel
    ``P(z) = (1-lam^2)/|1-lam z|^2``, reduces to
    ``(-1)^(n-k)/pi int_0^pi P(t) cos((k-n) t + 2k T(t)) dt``.
    It is compared with the k-th coefficient of ``b^n`` (rational route when
    ``lam`` is rational, otherwise ``reference``).

    Returns
    -------
    float
        ``|rhs - c(k)|``.
    """
    _check_nk(n, k)
    if k < 1:
        raise DomainError("duality_check needs k >= 1")
    lamf = float(lam)
    w = k - n

    def P(t):
        return (1 - lamf * lamf) / (1 + lamf * lamf - 2 * lamf * math.cos(t))

    def fc(t):
        return P(t) * math.cos(2 * k * math.atan2(lamf * math.sin(t), 1 - lamf * math.cos(t)))

    def fs(t):
        return P(t) * math.sin(2 * k * math.atan2(lamf * math.sin(t), 1 - lamf * math.cos(t)))

    val, err, ok = _quad_osc(fc, fs, w, math.pi * tol, 2000)
    rhs = (-1) ** (n - k) * val / math.pi
    if reference is None:
        try:
            reference = float(coeff_rational(as_fraction(lam), n, k))
        except TypeError:
            reference = coeff_quadrature(lamf, n, k, tol)
    return abs(rhs - float(reference))


def sequence_invariants(seq: CoeffSequence) -> dict:
    """Parseval and evaluations at ``+1`` and ``-1``, as deviations.

    Returns a dict with ``parseval = sum c^2 - 1``, ``at_one = sum c - 1`` and
    ``at_minus_one = sum (-1)^k c - (-1)^n`` (all computed with ``math.fsum``).
    """
    v = np.asarray(seq.values, dtype=float)
    sgn = np.where(np.arange(len(v)) % 2 == 0, 1.0, -1.0)
    return {
        "parseval": math.fsum(v * v) - 1.0,
        "at_one": math.fsum(v) - 1.0,
        "at_minus_one": math.fsum(sgn * v) - (-1.0) ** seq.n,
        "error_bound": seq.error_bound,
    }
