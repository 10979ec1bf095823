"""l^p norms of coefficient sequences and their scaling with n.

For ``b_lam**n`` the l^p norm of the coefficients behaves like the gauge

    u_p(n) = n^(1/p - 1/2)               p < 4
             (log n)^(1/4) n^(-1/4)      p = 4
             n^(1/(3p) - 1/3)            p > 4

(``n^(-1/3)`` for ``p = inf``), and :func:`exponent_fit` recovers the
exponent by least squares over an n-ladder.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import exact
from .core import DomainError

__all__ = [
    "NormReport",
    "u_p",
    "gauge_exponent",
    "lp_norm",
    "paired_min_norm",
    "exponent_fit",
]


def u_p(N, p: float) -> float:
    """Norm gauge ``u_p(N)``; natural log in the ``p = 4`` case."""
    if N < 2:
        raise DomainError("u_p needs N >= 2")
    if p <= 0:
        raise DomainError("p must be positive")
    if math.isinf(p):
        return N ** (-1 / 3)
    if p < 4:
        return N ** (1 / p - 1 / 2)
    if p == 4:
        return math.log(N) ** 0.25 * N**-0.25
    return N ** (1 / (3 * p) - 1 / 3)


def gauge_exponent(p: float) -> float:
    """Power of N in ``u_p(N)``, ignoring the log factor at ``p = 4``."""
    if math.isinf(p):
        return -1 / 3
    if p < 4:
        return (2 - p) / (2 * p)
    if p == 4:
        return -0.25
    return (1 - p) / (3 * p)


def _values(seq):
    if isinstance(seq, exact.CoeffSequence):
        return np.asarray(seq.values, dtype=float), seq.error_bound
    return np.asarray(seq, dtype=float), 0.0


def _pnorm(v, p):
    v = np.abs(v)
    if math.isinf(p):
        return float(v.max()) if v.size else 0.0
    m = float(v.max()) if v.size else 0.0
    if m == 0:
        return 0.0
    # scale by the max to keep |v|^p in range
    return m * math.fsum((v / m) ** p) ** (1 / p)


def lp_norm(seq, p: float, full_output: bool = False):
    """``(sum |c_k|^p)^(1/p)``, or ``max |c_k|`` for ``p = inf``.

    With ``full_output`` returns ``(value, err)`` where ``err`` bounds the
    effect of the sequence's ``error_bound`` (per-entry error plus the
    aliased tail) on the norm.
    """
    if p <= 0:
        raise DomainError("p must be positive")
    v, eb = _values(seq)
    val = _pnorm(v, p)
    if not full_output:
        return val
    if math.isinf(p):
        err = eb
    else:
        err = eb * len(v) ** (1 / p) if p >= 1 else (eb * len(v)) ** (1 / p)
    return val, err


def paired_min_norm(seq, p: float) -> float:
    """``(sum_k min(|c_{2k}|^p, |c_{2k+1}|^p))^(1/p)``; an unpaired last entry
    counts as paired with zero."""
    if p <= 0:
        raise DomainError("p must be positive")
    v, _ = _values(seq)
    if len(v) % 2:
        v = np.append(v, 0.0)
    pairs = np.minimum(np.abs(v[0::2]), np.abs(v[1::2]))
    return _pnorm(pairs, p)


@dataclass
class NormReport:
    """Norms over an n-ladder with the fitted and predicted exponents.

    ``fitted_exponent`` is the slope of ``log ||c||_p`` against ``log n``.
    ``residual_slope`` is the slope of ``log(||c||_p / u_p(n))``, which is
    the relevant check at ``p = 4`` where ``log_correction`` is set.
    """

    lam: float
    p: float
    n_values: list
    norms: list
    fitted_exponent: float
    predicted_exponent: float
    residual_slope: float
    log_correction: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        if math.isinf(self.p):
            d["p"] = "inf"
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def to_csv(self) -> str:
        lines = [f"# lambda={self.lam} p={self.p} oracle=DftSampling precision=float64",
                 "n,norm,u_p,ratio"]
        for n, v in zip(self.n_values, self.norms):
            u = u_p(n, self.p)
            lines.append(f"{n},{v!r},{u!r},{v / u!r}")
        return "\n".join(lines) + "\n"


def _slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def exponent_fit(lam, p: float, n_values, sequences: dict | None = None) -> NormReport:
    """Fit the scaling exponent of ``||c||_p`` over ``n_values``.

    Needs at least four n-values spanning at least one decade.  Coefficients
    come from :func:`exact.coeff_dft` unless ``sequences`` maps ``n`` to a
    precomputed :class:`~exact.CoeffSequence`.
    """
    ns = sorted(int(n) for n in n_values)
    if len(ns) < 4 or ns[-1] < 10 * ns[0]:
        raise DomainError("exponent_fit needs >= 4 n-values spanning >= one decade")
    norms = []
    for n in ns:
        seq = sequences[n] if sequences and n in sequences else exact.coeff_dft(lam, n)
        norms.append(lp_norm(seq, p))
    fitted = _slope(ns, norms)
    resid = _slope(ns, [v / u_p(n, p) for n, v in zip(ns, norms)])
    return NormReport(
        lam=float(lam),
        p=p,
        n_values=ns,
        norms=norms,
        fitted_exponent=fitted,
        predicted_exponent=gauge_exponent(p),
        residual_slope=resid,
        log_correction=(p == 4),
    )
