"""Real-argument Airy function ``Ai``.

``Ai`` is evaluated from its Maclaurin series for ``|x| <= 12`` and from the
large-argument asymptotic expansions beyond.  The series is summed in
``mpmath`` arithmetic with enough guard digits to absorb the cancellation
between the two power series for positive ``x``.  The asymptotic series are
optimally truncated; their coefficients follow

    u_0 = 1,  u_k = u_{k-1} (6k-5)(6k-3)(6k-1) / ((2k-1) 216 k).

An independent check evaluates the integral definition
``Ai(x) = (1/pi) int_0^inf cos(t^3/3 + x t) dt`` with ``mpmath.quadosc``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .core import DomainError

__all__ = [
    "AiryMethod",
    "AiryValue",
    "ai",
    "ai_value",
    "ai_array",
    "log_ai_pos",
    "ai_asym_neg",
    "ai_asym_pos",
    "ai_quadrature",
    "SERIES_LIMIT",
]

SERIES_LIMIT = 12.0
_MIN_TERMS = 6


class AiryMethod(str, enum.Enum):
    Maclaurin = "Maclaurin"
    AsymptoticNeg = "AsymptoticNeg"
    AsymptoticPos = "AsymptoticPos"
    Quadrature = "Quadrature"


@dataclass(frozen=True)
class AiryValue:
    x: float
    ai: float
    method: AiryMethod
    est_error: float
    underflow: bool = False

    def __float__(self):
        return self.ai


def _maclaurin(x: float) -> tuple[float, float]:
    # Ai = c1 f - c2 g with f, g the two entire power series in x^3
    zeta = (2.0 / 3.0) * abs(x) ** 1.5
    guard = int(2 * zeta / math.log(10)) + 20
    with mpmath.workdps(16 + guard):
        X = mpmath.mpf(x)
        x3 = X**3
        c1 = 1 / (mpmath.power(3, mpmath.mpf(2) / 3) * mpmath.gamma(mpmath.mpf(2) / 3))
        c2 = 1 / (mpmath.power(3, mpmath.mpf(1) / 3) * mpmath.gamma(mpmath.mpf(1) / 3))
        f = mpmath.mpf(1)
        g = X
        tf = mpmath.mpf(1)
        tg = X
        k = 0
        eps = mpmath.mpf(10) ** (-(16 + guard))
        while True:
            k += 1
            tf = tf * x3 / ((3 * k - 1) * (3 * k))
            tg = tg * x3 / ((3 * k) * (3 * k + 1))
            f += tf
            g += tg
            if abs(tf) + abs(tg) <= eps * (abs(f) + abs(g)) and k > 2:
                break
        val = c1 * f - c2 * g
        return float(val), float(abs(val)) * 1e-15 + 1e-300


def _asym_sum(zeta: float, alternating: bool):
    # optimally truncated sum_k (-1)^k u_k / zeta^k; returns terms and the truncation error
    terms = []
    u = 1.0
    k = 0
    prev = math.inf
    while True:
        t = u / zeta**k
        if k >= _MIN_TERMS and (t > prev or t < 1e-18):
            return terms, t
        terms.append(t * ((-1) ** k if alternating else 1))
        prev = t
        k += 1
        u = u * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
        if k > 400:
            return terms, t


def _asym_pos_series(x: float) -> tuple[float, float]:
    # sum (-1)^k u_k zeta^{-k}
    zeta = (2.0 / 3.0) * x**1.5
    terms, err = _asym_sum(zeta, True)
    return math.fsum(terms), err


def log_ai_pos(x: float) -> float:
    """``log Ai(x)`` for ``x > 0``, free of underflow."""
    x = float(x)
    if x <= 0:
        raise DomainError("log_ai_pos needs x > 0")
    if x <= SERIES_LIMIT:
        return math.log(_maclaurin(x)[0])
    s, _ = _asym_pos_series(x)
    zeta = (2.0 / 3.0) * x**1.5
    return -zeta - math.log(2 * math.sqrt(math.pi)) - 0.25 * math.log(x) + math.log(s)


def ai_value(x: float) -> AiryValue:
    """Evaluate ``Ai(x)`` and report the method and an error estimate.

    Notes
    -----
    Relative accuracy is about ``1e-14`` where the Maclaurin series is used
    (``|x| <= 12``).  Beyond, the optimally truncated asymptotic series are
    accurate to ``exp(-4/3 |x|^(3/2))`` relative to the envelope.  For very large
    positive ``x`` the value underflows to ``+0.0`` with ``underflow=True``;
    use :func:`log_ai_pos` there.
    """
    x = float(x)
    if not abs(x) <= 1e6:
        raise DomainError(f"|x| must be <= 1e6, got {x}")
    if abs(x) <= SERIES_LIMIT:
        v, e = _maclaurin(x)
        return AiryValue(x, v, AiryMethod.Maclaurin, e)
    zeta = (2.0 / 3.0) * abs(x) ** 1.5
    if x > 0:
        s, err = _asym_pos_series(x)
        logpref = -zeta - math.log(2 * math.sqrt(math.pi)) - 0.25 * math.log(x)
        if logpref + math.log(s) < -745:
            return AiryValue(x, 0.0, AiryMethod.AsymptoticPos, 0.0, underflow=True)
        pref = math.exp(logpref)
        return AiryValue(x, pref * s, AiryMethod.AsymptoticPos, pref * (err + 1e-16 * s))
    y = -x
    terms, err = _asym_sum(zeta, False)
    # even and odd parts with alternating signs inside each
    even = math.fsum(t * (-1) ** (j // 2) for j, t in enumerate(terms) if j % 2 == 0)
    odd = math.fsum(t * (-1) ** (j // 2) for j, t in enumerate(terms) if j % 2 == 1)
    arg = zeta + math.pi / 4
    env = 1 / (math.sqrt(math.pi) * y**0.25)
    val = env * (math.sin(arg) * even - math.cos(arg) * odd)
    # argument reduction loses |zeta| * eps in absolute phase
    return AiryValue(x, val, AiryMethod.AsymptoticNeg, env * (err + 4e-16 * (1 + zeta)))


def ai(x):
    """``Ai(x)`` as a float (scalar) or an array of floats (array input)."""
    if np.ndim(x):
        return ai_array(x)
    return ai_value(x).ai


def ai_array(xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    out = np.empty(xs.shape)
    for idx, x in np.ndenumerate(xs):
        out[idx] = ai_value(float(x)).ai
    return out


def ai_asym_neg(x: float) -> float:
    """Leading oscillatory term ``cos((2/3) x^(3/2) - pi/4) / (sqrt(pi) x^(1/4))``,
    approximating ``Ai(-x)`` for large ``x > 0``."""
    if x <= 0:
        raise DomainError("ai_asym_neg needs x > 0")
    return math.cos((2.0 / 3.0) * x**1.5 - math.pi / 4) / (math.sqrt(math.pi) * x**0.25)


def ai_asym_pos(x: float) -> float:
    """Leading exponential term ``exp(-(2/3) x^(3/2)) / (2 sqrt(pi) x^(1/4))``,
    approximating ``Ai(x)`` for large ``x > 0``.  Diverges like ``x^(-1/4)``
    as ``x -> 0+``."""
    if x <= 0:
        raise DomainError("ai_asym_pos needs x > 0")
    return math.exp(-(2.0 / 3.0) * x**1.5) / (2 * math.sqrt(math.pi) * x**0.25)


def _real_cbrt(v):
    return mpmath.sign(v) * abs(v) ** (mpmath.mpf(1) / 3)


def ai_quadrature(x: float, dps: int = 30) -> AiryValue:
    """``Ai(x)`` from the oscillatory integral ``(1/pi) int_0^inf cos(t^3/3 + x t) dt``.

    The integration is split at consecutive zeros of the integrand beyond the
    stationary point ``sqrt(max(-x, 0))`` and the tail is extrapolated by
    ``mpmath.quadosc``.
    """
    x = float(x)
    with mpmath.workdps(dps):
        X = mpmath.mpf(x)
        # past this level the phase is monotone and the cubic has one real root
        level = (mpmath.mpf(2) / 3) * max(-X, 0) ** mpmath.mpf(1.5)
        m0 = int(mpmath.ceil(level / mpmath.pi)) + 1

        def zero(m):
            target = mpmath.pi * (m0 + m - mpmath.mpf(1) / 2)
            # t^3 + 3x t - 3 target = 0 by Cardano, then one Newton polish
            q = -3 * target
            p = 3 * X
            disc = (q / 2) ** 2 + (p / 3) ** 3
            s = mpmath.sqrt(disc)
            t = _real_cbrt(-q / 2 + s) + _real_cbrt(-q / 2 - s)
            return mpmath.findroot(lambda u: u**3 / 3 + X * u - target, t)

        def f(t):
            return mpmath.cos(t**3 / 3 + X * t)

        val = mpmath.quadosc(f, [0, mpmath.inf], zeros=zero) / mpmath.pi
    return AiryValue(x, float(val), AiryMethod.Quadrature, 10.0 ** (-(dps // 2)))
