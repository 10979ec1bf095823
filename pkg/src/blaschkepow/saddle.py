"""Saddle-point geometry of ``Phi_a(z) = -a log z + log b_lam(z)``.

The k-th coefficient of ``b_lam**n`` is the contour integral of
``exp(n Phi_{k/n}(z)) dz / (2 pi i z)``.  The two stationary points
``z_plus``, ``z_minus`` of ``Phi`` are real and reciprocal when
``a = k/n`` lies outside ``[alpha0, 1/alpha0]``, conjugate on the unit
circle inside it, and coalesce at ``-1`` and ``+1`` on the two edges.

On the unit circle ``Phi(e^{i phi}) = i h(phi)`` with the real phase

    h(phi) = (1 - a) phi + 2 arctan(lam sin(phi) / (1 - lam cos(phi))),

which is the continuous branch with ``h(0) = 0`` and ``h(pi) = (1 - a) pi``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import DomainError

__all__ = [
    "Branch",
    "Side",
    "SaddleData",
    "z_pm",
    "phi",
    "phi_derivs",
    "h_func",
    "h1",
    "h2",
    "h3",
    "varphi_plus",
    "delta",
    "edge_constants",
    "gamma_quantities",
    "saddle_data",
]

COALESCE_GUARD = 1e-8


class Branch(str, enum.Enum):
    """Branch of ``log``: argument in ``[0, 2 pi)`` or ``(-pi, pi]``."""

    CutPositiveAxis = "CutPositiveAxis"
    Principal = "Principal"


class Side(str, enum.Enum):
    LeftEdge = "LeftEdge"
    RightEdge = "RightEdge"
    Auto = "Auto"


def _lam(lam) -> float:
    lam = float(lam)
    if not 0 < lam < 1:
        raise DomainError(f"lambda must lie in (0, 1), got {lam}")
    return lam


def _check_a(a) -> float:
    a = float(a)
    if not a > 0:
        raise DomainError(f"a = k/n must be positive, got {a}")
    return a


def _edges(lam):
    a0 = (1 - lam) / (1 + lam)
    return a0, 1 / a0


def _cos_plus(lam, a):
    # c = cos(phi_plus) together with 1 - c and 1 + c computed without cancellation
    a0, a0inv = _edges(lam)
    c = (a * (1 + lam * lam) - (1 - lam * lam)) / (2 * lam * a)
    one_minus = (1 - lam) ** 2 * (a0inv - a) / (2 * lam * a)
    one_plus = (1 + lam) ** 2 * (a - a0) / (2 * lam * a)
    return c, one_minus, one_plus


def z_pm(lam, a) -> tuple[complex, complex]:
    """Stationary points ``z_plus``, ``z_minus`` of ``Phi_a``.

    ``z = c -+ sqrt(c**2 - 1)`` with ``c = (a(1+lam^2) - (1-lam^2)) / (2 lam a)``.
    For a negative radicand ``z_plus = c + i sqrt(1 - c**2)`` (``Im z_plus >= 0``).
    """
    lam = _lam(lam)
    a = _check_a(a)
    c, om, op = _cos_plus(lam, a)
    rad = -om * op  # c**2 - 1
    if rad >= 0:
        s = math.sqrt(rad)
        if c < 0:
            zm = c - s
            zp = 1 / zm if zm != 0 else -1.0
        else:
            zp = c + s
            zm = 1 / zp
        return complex(zp), complex(zm)
    s = math.sqrt(-rad)
    return complex(c, s), complex(c, -s)


def _log(z: complex, branch: Branch) -> complex:
    ang = math.atan2(z.imag, z.real)
    if z.imag == 0 and z.real < 0:
        # atan2(-0.0, x) = -pi; both branches take log(-1) = i pi
        ang = math.pi
    elif branch == Branch.CutPositiveAxis and ang < 0:
        ang += 2 * math.pi
    return complex(math.log(abs(z)), ang)


def _b(lam, z):
    return (z - lam) / (1 - lam * z)


def phi(lam, a, z, branch: Branch | str = Branch.CutPositiveAxis) -> complex:
    """``Phi_a(z) = -a log z + log b_lam(z)``, each log on ``branch``.

    On ``CutPositiveAxis`` the value at a negative real ``z`` uses
    ``log(-1) = i pi``, so that ``exp(n Phi(z)) = (-1)^(n-k) (|b(z)|/|z|^a)^n``.

    Raises
    ------
    DomainError
        Near the singular points ``0``, ``lam`` and ``1/lam``.
    """
    lam = _lam(lam)
    a = float(a)
    branch = Branch(branch)
    z = complex(z)
    for s, name in ((0.0, "0"), (lam, "lambda"), (1 / lam, "1/lambda")):
        d = abs(z - s)
        if d < 1e-300 or d < 1e-14 * max(1.0, abs(s)):
            raise DomainError(f"Phi is singular at z = {name} (distance {d:.3g})")
    return -a * _log(z, branch) + _log(_b(lam, z), branch)


def phi_derivs(lam, a, z) -> tuple[complex, complex, complex]:
    """First three derivatives of ``Phi_a`` in closed form.

    ``Phi' = 1/(z-lam) - a/z + lam/(1-lam z)``,
    ``Phi'' = -1/(z-lam)^2 + a/z^2 + lam^2/(1-lam z)^2``,
    ``Phi''' = 2/(z-lam)^3 - 2a/z^3 + 2 lam^3/(1-lam z)^3``.
    """
    lam = _lam(lam)
    a = float(a)
    z = complex(z)
    if abs(z) < 1e-300 or abs(z - lam) < 1e-300 or abs(1 - lam * z) < 1e-300:
        raise DomainError(f"Phi derivatives are singular at z = {z}")
    u = 1 / (z - lam)
    v = lam / (1 - lam * z)
    w = 1 / z
    d1 = u - a * w + v
    d2 = -u * u + a * w * w + v * v
    d3 = 2 * u**3 - 2 * a * w**3 + 2 * v**3
    return d1, d2, d3


def _D(lam, t):
    return 1 + lam * lam - 2 * lam * np.cos(t)


def h_func(lam, a, t):
    """Phase ``h(t) = (1-a) t + 2 arctan(lam sin t / (1 - lam cos t))``."""
    lam = _lam(lam)
    if np.ndim(t):
        t = np.asarray(t, dtype=float)
        return (1 - a) * t + 2 * np.arctan2(lam * np.sin(t), 1 - lam * np.cos(t))
    return (1 - a) * t + 2 * math.atan2(lam * math.sin(t), 1 - lam * math.cos(t))


def h1(lam, a, t):
    """``h'(t) = (1 - lam^2)/D - a``, ``D = 1 + lam^2 - 2 lam cos t``."""
    lam = _lam(lam)
    return (1 - lam * lam) / _D(lam, t) - a


def h2(lam, a, t):
    """``h''(t) = -2 lam (1 - lam^2) sin t / D^2``."""
    lam = _lam(lam)
    D = _D(lam, t)
    return -2 * lam * (1 - lam * lam) * np.sin(t) / (D * D)


def h3(lam, a, t):
    """``h'''(t) = -2 lam (1-lam^2) (D cos t - 4 lam sin^2 t) / D^3``."""
    lam = _lam(lam)
    D = _D(lam, t)
    return -2 * lam * (1 - lam * lam) * (D * np.cos(t) - 4 * lam * np.sin(t) ** 2) / D**3


def varphi_plus(lam, a) -> float:
    """Stationary point of ``h`` in ``[0, pi]``: ``arccos(c)``.

    Evaluated as ``atan2(sqrt((1-c)(1+c)), c)`` so that it stays accurate next
    to both edges.
    """
    lam = _lam(lam)
    a = _check_a(a)
    a0, a0inv = _edges(lam)
    if a < a0 * (1 - 1e-15) or a > a0inv * (1 + 1e-15):
        raise DomainError(f"a = {a} outside [alpha0, 1/alpha0] = [{a0}, {a0inv}]")
    c, om, op = _cos_plus(lam, a)
    return math.atan2(math.sqrt(max(om, 0.0) * max(op, 0.0)), c)


def delta(lam, a) -> float:
    """``Delta = (a - alpha0)(1/alpha0 - a)``; positive inside the interval."""
    lam = _lam(lam)
    a0, a0inv = _edges(lam)
    return (a - a0) * (a0inv - a)


def edge_constants(lam) -> tuple[float, float]:
    """Leading-order slopes of ``gamma^2`` at the two edges.

    ``gamma^2 ~ C_L (alpha0 - a)`` near ``alpha0`` and ``gamma^2 ~ C_R (a - 1/alpha0)``
    near ``1/alpha0``, with ``C_L = (1+lam)/(lam(1-lam))^(1/3)`` and
    ``C_R = (1-lam)/(lam(1+lam))^(1/3)``.
    """
    lam = _lam(lam)
    cl = (1 + lam) / (lam * (1 - lam)) ** (1 / 3)
    cr = (1 - lam) / (lam * (1 + lam)) ** (1 / 3)
    return cl, cr


def _resolve_side(lam, a, side) -> Side:
    side = Side(side)
    if side != Side.Auto:
        return side
    # nearer edge in log distance; alpha0 and 1/alpha0 are symmetric about a = 1
    return Side.LeftEdge if a < 1 else Side.RightEdge


def gamma_quantities(lam, a, side: Side | str = Side.Auto) -> tuple[float, complex, complex]:
    """Airy parameters ``(gamma^2, gamma^3, eta)`` at ``a = k/n``.

    ``gamma^3 = (3/4)[Phi(z+) - Phi(z-)]`` evaluated with the branch that
    matches ``side``: ``CutPositiveAxis`` for ``LeftEdge`` (giving
    ``(3/2)[Phi(z+) - i pi (1-a)]``) and ``Principal`` for ``RightEdge``
    (giving ``(3/2) Phi(z+)``).  ``gamma^2`` is the real ``2/3`` power of
    ``|gamma^3|``, positive outside ``[alpha0, 1/alpha0]`` and negative inside.
    ``eta = (Phi(z+) + Phi(z-))/2``.

    Within ``1e-8`` of an edge the leading-order linear law is used instead.
    ``Auto`` picks the nearer edge; ``a = 1`` goes to ``RightEdge``.
    """
    lam = _lam(lam)
    a = _check_a(a)
    side = _resolve_side(lam, a, side)
    a0, a0inv = _edges(lam)
    cl, cr = edge_constants(lam)
    left = side == Side.LeftEdge
    eta = complex(0.0, math.pi * (1 - a)) if left else 0j

    edge = a0 if left else a0inv
    if abs(a - edge) < COALESCE_GUARD:
        g2 = cl * (a0 - a) if left else cr * (a - a0inv)
        g3abs = abs(g2) ** 1.5
        if g2 >= 0:
            g3 = complex(-g3abs, 0.0)
        else:
            g3 = complex(0.0, -g3abs if left else g3abs)
        return g2, g3, eta

    inside = a0 < a < a0inv
    if inside:
        t = varphi_plus(lam, a)
        if left:
            # h(phi+) - pi(1-a) written around pi to avoid cancellation
            psi = math.pi - t
            val = -(1 - a) * psi + 2 * math.atan2(lam * math.sin(psi), 1 + lam * math.cos(psi))
        else:
            val = h_func(lam, a, t)
        g3 = complex(0.0, 1.5 * val)
        g2 = -abs(1.5 * val) ** (2 / 3)
        return g2, g3, eta

    zp, _ = z_pm(lam, a)
    # outside the interval both branches give gamma^3 = (3/2) Re Phi(z+) < 0
    g3 = complex(1.5 * _re_phi_real(lam, a, zp.real), 0.0)
    g2 = abs(g3.real) ** (2 / 3)
    eta = complex(0.0, math.pi * (1 - a)) if zp.real < 0 else 0j
    return g2, g3, eta


def _re_phi_real(lam, a, zp: float) -> float:
    # Re Phi(z+) = -a log|z+| + log|b(z+)| for real z+
    return -a * math.log(abs(zp)) + math.log(abs(zp - lam)) - math.log(abs(1 - lam * zp))


@dataclass(frozen=True)
class SaddleData:
    """All saddle quantities at ``(lam, a)``.

    ``varphi_plus`` and ``h_at_plus`` are ``None`` outside ``[alpha0, 1/alpha0]``.
    """

    lam: float
    a: float
    z_plus: complex
    z_minus: complex
    phi_plus: complex
    phi_minus: complex
    phi2_plus: complex
    varphi_plus: float | None
    h_at_plus: float | None
    gamma_sq: float
    gamma_cubed: complex
    delta: float
    eta: complex
    side: str

    def to_dict(self) -> dict:
        out = {}
        for key, val in asdict(self).items():
            if isinstance(val, complex):
                out[key] = {"re": val.real, "im": val.imag}
            else:
                out[key] = val
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def saddle_data(lam, a, side: Side | str = Side.Auto) -> SaddleData:
    """Collect the saddle geometry and Airy parameters at ``a``."""
    lam = _lam(lam)
    a = _check_a(a)
    sd = _resolve_side(lam, a, side)
    br = Branch.CutPositiveAxis if sd == Side.LeftEdge else Branch.Principal
    zp, zm = z_pm(lam, a)
    a0, a0inv = _edges(lam)
    try:
        pp = phi(lam, a, zp, br)
        pm = phi(lam, a, zm, br)
    except DomainError:
        pp = pm = complex("nan")
    _, d2, _ = phi_derivs(lam, a, zp)
    inside = a0 * (1 - 1e-15) <= a <= a0inv * (1 + 1e-15)
    vp = varphi_plus(lam, a) if inside else None
    hp = float(h_func(lam, a, vp)) if inside else None
    g2, g3, eta = gamma_quantities(lam, a, sd)
    return SaddleData(
        lam=lam,
        a=a,
        z_plus=zp,
        z_minus=zm,
        phi_plus=pp,
        phi_minus=pm,
        phi2_plus=d2,
        varphi_plus=vp,
        h_at_plus=hp,
        gamma_sq=g2,
        gamma_cubed=g3,
        delta=delta(lam, a),
        eta=eta,
        side=sd.value,
    )
