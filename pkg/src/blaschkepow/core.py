"""Domain parameters, derived constants and the region classifier.

Every coefficient query ``(lambda, n, k)`` is routed to one of eight
k-bands.  Band edges sit at ``alpha*n``, ``alpha0*n -+ omega``,
``n/alpha0 -+ omega`` and ``n/alpha``; ``alpha0 = (1-lambda)/(1+lambda)``
is the transition ratio where the two saddle points coalesce.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

__all__ = [
    "BlaschkeError",
    "DomainError",
    "ConfigurationError",
    "BudgetExceeded",
    "NumericalRefusal",
    "BlaschkeParam",
    "CoeffQuery",
    "Region",
    "Thresholds",
    "RegionLabel",
    "as_fraction",
    "alpha0",
    "reduce_phase",
    "default_thresholds",
    "classify_region",
]


class BlaschkeError(Exception):
    """Base class for errors raised by this package."""


class DomainError(BlaschkeError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(BlaschkeError, ValueError):
    """Thresholds or other settings are mutually inconsistent."""


class BudgetExceeded(BlaschkeError, RuntimeError):
    """The requested computation exceeds the configured work limit."""


class NumericalRefusal(BlaschkeError, RuntimeError):
    """A numerical guard (aliasing, truncation, convergence) refused to run."""


def as_fraction(value) -> Fraction:
    """Convert ``value`` to an exact :class:`~fractions.Fraction`.

    Accepts ints, Fractions, ``"p/q"`` or decimal strings and floats (the
    exact binary value of the float is kept).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational number")


@dataclass(frozen=True)
class BlaschkeParam:
    """The zero of the Blaschke factor, reduced to ``0 < lam < 1``.

    ``lam`` is stored exactly when it was given as a rational, so that the
    classifier and the rational oracle stay exact.
    """

    lam: Fraction | float
    lambda_complex: complex | None = None

    def __post_init__(self):
        lam = self.lam
        if isinstance(lam, (str, int, Rational)) and not isinstance(lam, bool):
            lam = as_fraction(lam)
            object.__setattr__(self, "lam", lam)
        if not 0 < lam < 1:
            raise DomainError(f"lambda must lie in (0, 1), got {lam}")

    @classmethod
    def from_complex(cls, lam: complex) -> "BlaschkeParam":
        if abs(lam) >= 1:
            raise DomainError(f"|lambda| must be < 1, got {abs(lam)}")
        if lam == 0:
            raise DomainError("lambda = 0 gives the trivial factor z")
        return cls(abs(lam), complex(lam))

    @property
    def value(self) -> float:
        return float(self.lam)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.lam, Fraction)

    @property
    def theta(self) -> float:
        if self.lambda_complex is None:
            return 0.0
        return cmath.phase(self.lambda_complex)

    @property
    def alpha0(self) -> Fraction | float:
        return alpha0(self)


def _param(lam) -> BlaschkeParam:
    if isinstance(lam, BlaschkeParam):
        return lam
    return BlaschkeParam(lam)


def alpha0(lam) -> Fraction | float:
    """Transition ratio ``(1 - lam) / (1 + lam)``; exact for rational ``lam``."""
    lam = _param(lam).lam
    return (1 - lam) / (1 + lam)


def reduce_phase(lambda_complex: complex, n: int, k: int) -> tuple[float, complex]:
    """Split a complex zero into its modulus and the coefficient phase.

    The k-th coefficient of ``b_lam**n`` equals the coefficient for
    ``|lam|`` multiplied by ``exp(1j*(n-k)*arg(lam))``.

    Returns
    -------
    (modulus, phase)
    """
    lambda_complex = complex(lambda_complex)
    modulus = abs(lambda_complex)
    if modulus >= 1:
        raise DomainError(f"|lambda| must be < 1, got {modulus}")
    theta = cmath.phase(lambda_complex)
    # exact unit for the common cases so callers can compare with ==
    turns = (n - k) * theta
    if theta == 0.0 or turns == 0.0:
        return modulus, 1 + 0j
    return modulus, cmath.exp(1j * turns)


@dataclass(frozen=True)
class CoeffQuery:
    """A single coefficient request: the k-th coefficient of ``b_lam**n``."""

    param: BlaschkeParam
    n: int
    k: int

    def __post_init__(self):
        if not isinstance(self.param, BlaschkeParam):
            object.__setattr__(self, "param", BlaschkeParam(self.param))
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        if int(self.k) != self.k or self.k < 0:
            raise DomainError(f"k must be a nonnegative integer, got {self.k}")

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.k, self.n)

    @property
    def a(self) -> float:
        return self.k / self.n


class Region(enum.IntEnum):
    I = 1
    II = 2
    III = 3
    IV = 4
    V = 5
    VI = 6
    VII = 7
    VIII = 8

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Thresholds:
    """Band parameters: ``alpha`` in (0, alpha0), ``beta`` in (alpha0, 1),
    the Airy half-width ``omega`` (in units of k) and the largest k treated
    as "fixed" (Region I)."""

    alpha: float
    beta: float
    omega: float
    k_fixed: int = 0

    def edges(self, lam, n: int) -> list[Fraction]:
        """Band edges in k, in increasing order (exact rationals)."""
        a0 = as_fraction(alpha0(lam))
        al = as_fraction(self.alpha)
        om = as_fraction(self.omega)
        return [al * n, a0 * n - om, a0 * n + om, n / a0 - om, n / a0 + om, n / al]

    def check(self, lam, n: int) -> None:
        a0 = float(alpha0(lam))
        if not 0 < self.alpha < a0:
            raise ConfigurationError(f"alpha={self.alpha} not in (0, alpha0={a0})")
        if not a0 < self.beta < 1:
            raise ConfigurationError(f"beta={self.beta} not in (alpha0={a0}, 1)")
        if self.omega <= 0:
            raise ConfigurationError("omega must be positive")
        e = self.edges(lam, n)
        if e[0] < 0 or any(x > y for x, y in zip(e, e[1:])):
            raise ConfigurationError(
                "band edges are not nested: "
                + ", ".join(f"{float(x):.6g}" for x in e)
            )


def default_thresholds(lam, n: int) -> Thresholds:
    """Defaults: ``alpha = alpha0/2``, ``beta = (alpha0+1)/2`` and
    ``omega = n**(1/3) * log(max(n, 3))``.

    For small n the default omega would overlap neighbouring bands; it is
    clamped so that the band edges stay nested.
    """
    a0 = float(alpha0(lam))
    alpha = a0 / 2
    beta = (a0 + 1) / 2
    omega = n ** (1 / 3) * math.log(max(n, 3))
    omega = min(omega, (a0 - alpha) * n, (1 / a0 - a0) * n / 2)
    k_fixed = min(int(math.floor(n**0.25)), int(math.floor(alpha * n)))
    return Thresholds(alpha=alpha, beta=beta, omega=omega, k_fixed=k_fixed)


@dataclass(frozen=True)
class RegionLabel:
    region: Region
    thresholds: Thresholds = field(repr=False)
    edges: tuple[float, ...] = field(default=(), repr=False)

    @property
    def name(self) -> str:
        return self.region.name


def classify_region(q: CoeffQuery, thresholds: Thresholds | None = None) -> RegionLabel:
    """Route ``(lam, n, k)`` to its asymptotic band.

    Band intervals (edges resolve to the lower-indexed region)::

        I     k <= k_fixed
        II    k <= alpha*n
        III   k <= alpha0*n - omega
        IV    k <= alpha0*n + omega
        V     k <= n/alpha0 - omega
        VI    k <= n/alpha0 + omega
        VII   k <  n/alpha
        VIII  otherwise

    All comparisons are done in exact rational arithmetic.
    """
    if not isinstance(q, CoeffQuery):
        raise TypeError("classify_region expects a CoeffQuery")
    lam, n, k = q.param.lam, q.n, q.k
    th = thresholds if thresholds is not None else default_thresholds(lam, n)
    th.check(lam, n)
    e = th.edges(lam, n)
    if k <= th.k_fixed and k <= e[0]:
        region = Region.I
    elif k <= e[0]:
        region = Region.II
    elif k <= e[1]:
        region = Region.III
    elif k <= e[2]:
        region = Region.IV
    elif k <= e[3]:
        region = Region.V
    elif k <= e[4]:
        region = Region.VI
    elif k < e[5]:
        region = Region.VII
    else:
        region = Region.VIII
    return RegionLabel(region, th, tuple(float(x) for x in e))
