"""Strongly annular functions assembled from powers of ``b_{1/2}``.

The building block is ``g_N = b_{1/2}**N``: unimodular on the circle, at
least ``e^-4`` in modulus on ``|z| = 1 - 1/N``, with coefficients of size
``u_p(N)`` in l^p and an exponentially small tail beyond ``4N``.

Two constructions are provided.

``LpGap``
    ``f = sum_k A^(k v_r) g_{A^k}(z) z^(A^k)`` with ``v_r`` from
    :func:`v_r`; the coefficients are in l^q but not in the paired-min
    class of order p.
``PhiGap``
    ``f = sum_k A^k g_{N_k}(z) z^(N_k)`` with ``N_{k+1} >= A N_k`` and
    ``phi(N_k^(1/4)) >= A^(3k)``.
"""

from __future__ import annotations

import enum
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath
import numpy as np

from . import exact
from .core import BudgetExceeded, ConfigurationError, DomainError, NumericalRefusal
from .norms import lp_norm, paired_min_norm, u_p

__all__ = [
    "v_r",
    "u_p",
    "Mode",
    "Block",
    "AnnularSpec",
    "PHI_FUNCTIONS",
    "phi_schedule",
    "lemma1_verify",
    "build_annular",
    "min_modulus_on_circle",
    "evaluate_on_circle",
    "AnnularReport",
    "annular_verify",
    "DEGREE_LIMIT_ENV",
]

DEGREE_LIMIT_ENV = "BLASCHKEPOW_DEGREE_LIMIT"
DEFAULT_DEGREE_LIMIT = 1 << 23
HALF = Fraction(1, 2)


def v_r(r: float) -> float:
    """Weight exponent: ``1/2 - 1/r`` for ``2 <= r < 4``, ``1/3 - 1/(3r)`` for ``r > 4``."""
    if r < 2:
        raise DomainError(f"v_r needs r >= 2, got {r}")
    if r == 4:
        raise DomainError("v_r is not defined at r = 4")
    if r < 4:
        return 0.5 - 1 / r
    return 1 / 3 - 1 / (3 * r)


def degree_limit() -> int:
    raw = os.environ.get(DEGREE_LIMIT_ENV)
    return DEFAULT_DEGREE_LIMIT if not raw else int(float(raw))


class Mode(str, enum.Enum):
    LpGap = "LpGap"
    PhiGap = "PhiGap"


@dataclass(frozen=True)
class Block:
    """Level ``k``: ``weight * g_N(z) * z**shift``."""

    level: int
    N: int
    weight: float
    shift: int


def _log1p(x):
    return mpmath.log1p(x) if isinstance(x, mpmath.mpf) else math.log1p(x)


PHI_FUNCTIONS: dict[str, Callable] = {
    "log1p": _log1p,
    "sqrt": lambda x: mpmath.sqrt(x) if isinstance(x, mpmath.mpf) else math.sqrt(x),
    "exp": lambda x: mpmath.exp(x) if isinstance(x, mpmath.mpf) else (
        math.exp(x) if x < 700 else mpmath.exp(x)),
    "loglog": lambda x: mpmath.log(1 + mpmath.log1p(x)) if isinstance(x, mpmath.mpf)
    else math.log1p(math.log1p(x)),
}


def _phi_at_pow2(phi: Callable, m: int):
    # phi((2**m)**(1/4)), with an mpmath argument once the float would overflow
    e = m / 4
    if e < 1000:
        return phi(2.0**e)
    return phi(mpmath.power(2, mpmath.mpf(m) / 4))


def phi_schedule(phi: Callable, A: int, levels: int, max_exponent: int = 1 << 62) -> list[int]:
    """Smallest powers of two ``N_k`` with ``N_k >= A N_{k-1}`` (``N_0 = 1``)
    and ``phi(N_k^(1/4)) >= A^(3k)``.

    ``phi`` must be increasing, so the minimum of ``phi`` over
    ``[N_k^(1/4), inf)`` is its value at the left end.

    Returns
    -------
    list of int
        The exponents ``m_k`` with ``N_k = 2**m_k`` (the values can be far
        beyond the float range).
    """
    if A < 2:
        raise ConfigurationError("A must be an integer >= 2")
    out = []
    prev_m = 0
    for k in range(1, levels + 1):
        m_lo = prev_m + math.ceil(math.log2(A))
        target = mpmath.mpf(A) ** (3 * k)

        def ok(m):
            return mpmath.mpf(_phi_at_pow2(phi, m)) >= target

        if ok(m_lo):
            m = m_lo
        else:
            hi = max(m_lo + 1, 2 * m_lo)
            while not ok(hi):
                if hi > max_exponent:
                    raise ConfigurationError(
                        f"phi never reaches A^(3k) = {float(target):.4g} below 2^{max_exponent}"
                    )
                hi *= 2
            lo = m_lo
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if ok(mid):
                    hi = mid
                else:
                    lo = mid
            m = hi
        out.append(m)
        prev_m = m
    return out


@dataclass
class AnnularSpec:
    """Block schedule of an annular construction.

    Use :meth:`lp_gap` or :meth:`phi_gap` to build and validate one.
    """

    mode: Mode
    A: int
    levels: int
    blocks: list[Block]
    p: float | None = None
    q: float | None = None
    r: float | None = None
    phi_name: str | None = None
    phi: Callable | None = field(default=None, repr=False)
    exponents: list[int] | None = None

    @classmethod
    def lp_gap(cls, p: float, q: float, r: float | None = None, A: int = 16,
               levels: int = 4, A0: float = 1.0) -> "AnnularSpec":
        """``f = sum_{k=1..levels} A^(k v_r) g_{A^k} z^(A^k)``.

        Requires ``2 <= p < q``, ``r`` in ``(p, q)`` with ``r != 4`` (default
        the midpoint, nudged off 4) and ``A^(v_r) >= A0``.
        """
        if not 2 <= p < q:
            raise ConfigurationError(f"need 2 <= p < q, got p={p}, q={q}")
        if r is None:
            r = (p + q) / 2
            if r == 4:
                r = (p + 4) / 2
        if not p < r < q or r == 4:
            raise ConfigurationError(f"r={r} must lie in (p, q) and differ from 4")
        if int(A) != A or A < 2:
            raise ConfigurationError("A must be an integer >= 2")
        if levels < 0:
            raise ConfigurationError("levels must be >= 0")
        v = v_r(r)
        if A**v < A0:
            raise ConfigurationError(f"A^v_r = {A ** v:.4g} below the threshold A0 = {A0}")
        blocks = [Block(k, A**k, float(A) ** (k * v), A**k) for k in range(1, levels + 1)]
        return cls(Mode.LpGap, int(A), levels, blocks, p=p, q=q, r=r)

    @classmethod
    def phi_gap(cls, phi: str | Callable = "log1p", A: int = 4, levels: int = 3) -> "AnnularSpec":
        """``f = sum_k A^k g_{N_k} z^(N_k)`` with the schedule of :func:`phi_schedule`."""
        name = phi if isinstance(phi, str) else getattr(phi, "__name__", "phi")
        fn = PHI_FUNCTIONS[phi] if isinstance(phi, str) else phi
        ms = phi_schedule(fn, A, levels)
        blocks = [Block(k, 1 << m, float(A) ** k, 1 << m) for k, m in enumerate(ms, 1)]
        return cls(Mode.PhiGap, int(A), levels, blocks, phi_name=name, phi=fn, exponents=ms)

    @property
    def weight_exponent(self) -> float:
        return v_r(self.r) if self.mode == Mode.LpGap else 1.0

    def radius(self, k: int) -> float:
        """Test circle of level ``k``: ``1 - 1/N_k``."""
        return 1.0 - 1.0 / self.blocks[k - 1].N

    def to_dict(self) -> dict:
        d = {
            "mode": self.mode.value,
            "A": self.A,
            "levels": self.levels,
            "blocks": [
                {"level": b.level,
                 "N": b.N if b.N < 2**63 else f"2^{b.N.bit_length() - 1}",
                 "weight": b.weight,
                 "shift": b.shift if b.shift < 2**63 else f"2^{b.shift.bit_length() - 1}"}
                for b in self.blocks
            ],
        }
        if self.mode == Mode.LpGap:
            d.update(p=self.p, q=self.q, r=self.r, v_r=v_r(self.r))
        else:
            d.update(phi=self.phi_name, exponents=self.exponents)
        return d


def _block_coeffs(N: int) -> exact.CoeffSequence:
    return exact.coeff_dft(HALF, N)


def build_annular(spec: AnnularSpec, degree_cap: int | None = None) -> exact.CoeffSequence:
    """Dense coefficients of the truncated construction.

    Each block's coefficients come from :func:`exact.coeff_dft` (its full
    DFT length, so the block tail is below the aliasing bound) and are
    added at offset ``shift``.  Blocks overlap; nothing assumes disjoint
    supports.

    Raises
    ------
    BudgetExceeded
        If the required degree exceeds the degree limit
        (``BLASCHKEPOW_DEGREE_LIMIT``, default ``2**23``).
    ConfigurationError
        If ``degree_cap`` is below ``shift + 4 N`` of the last block.
    """
    blocks = spec.blocks
    if not blocks:
        return exact.CoeffSequence(np.zeros(1), 0, HALF, exact.Provenance.Assembled, 0.0,
                                   meta={"blocks": [], "truncated_mass": 0.0})
    last = blocks[-1]
    need = last.shift + 4 * last.N
    limit = degree_limit()
    if need > limit:
        raise BudgetExceeded(
            f"budget exceeded: degree {need if need < 10**30 else 'huge'} > limit {limit} "
            f"(set {DEGREE_LIMIT_ENV} to override)"
        )
    lengths = [b.shift + exact.default_num_samples(0.5, b.N) for b in blocks]
    cap = max(lengths) if degree_cap is None else int(degree_cap)
    if cap < need:
        raise ConfigurationError(f"degree_cap {cap} < last shift + 4 N_last = {need}")
    if cap > limit:
        raise BudgetExceeded(f"budget exceeded: degree_cap {cap} > limit {limit}")
    vals = np.zeros(cap + 1)
    err = 0.0
    truncated = 0.0
    meta_blocks = []
    for b in blocks:
        seq = _block_coeffs(b.N)
        c = b.weight * seq.values
        room = cap + 1 - b.shift
        if room < len(c):
            truncated += float(np.abs(c[room:]).sum())
            c = c[:room]
        vals[b.shift:b.shift + len(c)] += c
        err += b.weight * seq.error_bound
        meta_blocks.append({"level": b.level, "N": b.N, "weight": b.weight,
                            "shift": b.shift, "M": seq.meta.get("M")})
    return exact.CoeffSequence(
        vals, last.N, HALF, exact.Provenance.Assembled, error_bound=err + truncated,
        meta={"blocks": meta_blocks, "truncated_mass": truncated, "degree_cap": cap},
    )


# -- evaluation on circles ---------------------------------------------------


def _coeff_values(seq):
    if isinstance(seq, exact.CoeffSequence):
        return np.asarray(seq.values, dtype=float)
    return np.asarray(seq, dtype=float)


def _scaled(c, radius):
    m = np.arange(len(c))
    with np.errstate(under="ignore"):
        return c * np.exp(m * math.log(radius))


def evaluate_on_circle(seq, radius: float, theta) -> np.ndarray:
    """``f(radius e^{i theta})`` by direct summation of ``c_m radius^m e^{i m theta}``."""
    c = _scaled(_coeff_values(seq), radius)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    m = np.arange(len(c))
    out = np.empty(theta.shape, dtype=complex)
    nz = np.nonzero(c)[0]
    cn, mn = c[nz], m[nz]
    for i, t in enumerate(theta):
        out[i] = np.dot(cn, np.exp(1j * ((mn * t) % (2 * math.pi))))
    return out


def _effective_degree(cs, rel=1e-17):
    a = np.abs(cs)
    tot = a.sum()
    if tot == 0:
        return 0
    idx = np.nonzero(a > rel * tot)[0]
    return int(idx[-1]) if idx.size else 0


def min_modulus_on_circle(seq, radius: float, samples: int | None = None,
                          refine: bool = True, candidates: int = 16,
                          full_output: bool = False):
    """Minimum of ``|f|`` on ``|z| = radius``.

    ``f`` is sampled at ``samples`` equispaced points (one FFT of the
    coefficients folded modulo ``samples``), then the ``candidates`` lowest
    local minima are refined by two rounds of ten-fold local subdivision with
    direct evaluation.

    Raises
    ------
    NumericalRefusal
        If the sequence is a truncated series whose tail beyond the last
        stored coefficient could exceed ``1e-14`` of the minimum.
    """
    if not 0 < radius < 1:
        raise DomainError("radius must lie in (0, 1)")
    c = _coeff_values(seq)
    cs = _scaled(c, radius)
    K = _effective_degree(cs)
    if samples is None:
        samples = 1 << max(14, math.ceil(math.log2(max(8 * K, 1))))
    samples = int(samples)
    folded = np.zeros(samples, dtype=complex)
    np.add.at(folded, np.arange(len(cs)) % samples, cs)
    vals = np.abs(np.fft.ifft(folded) * samples)
    j0 = int(np.argmin(vals))
    best, best_t = float(vals[j0]), 2 * math.pi * j0 / samples
    if refine and samples > 2:
        left = np.roll(vals, 1)
        right = np.roll(vals, -1)
        loc = np.nonzero((vals <= left) & (vals <= right))[0]
        loc = loc[np.argsort(vals[loc])][:candidates]
        step = 2 * math.pi / samples
        head = cs[: K + 1]
        for j in loc:
            t0, h = 2 * math.pi * j / samples, step
            for _ in range(2):
                ts = t0 + h * np.linspace(-1, 1, 21)
                fv = np.abs(evaluate_on_circle(head, 1.0, ts))
                i = int(np.argmin(fv))
                t0, h = ts[i], h / 10
                if fv[i] < best:
                    best, best_t = float(fv[i]), float(ts[i])
    if isinstance(seq, exact.CoeffSequence) and seq.provenance != exact.Provenance.RationalConvolution:
        # tail beyond the stored degree: the sequence's own error bound, scaled
        tail = seq.error_bound * radius ** len(c) / (1 - radius)
        if tail > 1e-14 * max(best, 1e-300) and seq.meta.get("truncated_mass", 0.0) > 0:
            raise NumericalRefusal(
                f"truncation tail {tail:.3g} too large against min {best:.3g}; "
                f"raise degree_cap above {len(c) - 1}"
            )
    if full_output:
        return best, {"theta": best_t, "samples": samples, "effective_degree": K}
    return best


# -- Lemma checks ------------------------------------------------------------


def _linfit(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(icpt), r2


def lemma1_verify(N: int, ps=(2, 3, 4, 6), tail_points: int = 33) -> dict:
    """Check the building-block properties of ``g_N = b_{1/2}**N``.

    Returns a dict with

    * ``i_max_modulus``: max of ``|g_N|`` on the unit circle, evaluated from
      the coefficients on a grid offset from the DFT nodes;
    * ``ii_min_modulus``: min of ``|g_N|`` on ``|z| = 1 - 1/N``;
    * ``iii_delta``, ``iii_r2``: decay rate and R^2 of a log-linear fit of
      exact ``|c(k)|`` on ``tail_points`` values of ``k`` in ``[4N, 8N]``;
    * ``iv_sup_sqrtN``: ``max |c(k)| * N^(1/2)``;
    * ``v``: per ``p`` the ratios ``||c||_p / u_p(N)`` and
      ``paired_min / u_p(N)``.
    """
    if N < 10:
        raise DomainError("lemma1_verify needs N >= 10")
    seq = exact.coeff_dft(HALF, N)
    c = seq.values
    S = 4 * len(c)
    # half-step offset grid: z_j = exp(i pi (2j+1)/S)
    shifted = c * np.exp(1j * math.pi * np.arange(len(c)) / S)
    padded = np.zeros(S, dtype=complex)
    padded[: len(c)] = shifted
    onc = np.abs(np.fft.ifft(padded) * S)
    i_max = float(onc.max())
    ii_min = min_modulus_on_circle(seq, 1 - 1 / N)
    ks = np.unique(np.linspace(4 * N, 8 * N, tail_points).round().astype(int))
    lim = max(exact.work_limit(), 8 * N * N + 1)
    logs = [exact.coeff_rational_log(HALF, N, int(k), limit=lim)[1] for k in ks]
    slope, _, r2 = _linfit(ks, logs)
    sup = float(np.abs(c).max())
    v = {}
    for p in ps:
        u = u_p(N, p)
        v[p] = {"lp_ratio": lp_norm(seq, p) / u, "paired_ratio": paired_min_norm(seq, p) / u}
    return {
        "N": N,
        "i_max_modulus": i_max,
        "ii_min_modulus": ii_min,
        "ii_bound": math.exp(-4),
        "iii_delta": -slope,
        "iii_r2": r2,
        "iv_sup_sqrtN": sup * math.sqrt(N),
        "v": v,
    }


# -- verification of the constructions --------------------------------------


@dataclass
class AnnularReport:
    """Per-level circle minima, dominance bounds and partial norm sums."""

    spec: dict
    circle_minima: list = field(default_factory=list)
    tail_norms: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {"spec": self.spec, "circle_minima": self.circle_minima,
             "tail_norms": self.tail_norms, "verdicts": self.verdicts},
            indent=1, default=float,
        )

    def to_csv(self) -> str:
        lines = ["# oracle=DftSampling lambda=1/2 precision=float64",
                 "k,radius,min_modulus,predicted_scale"]
        for row in self.circle_minima:
            lines.append(f"{row['k']},{row['radius']!r},{row['min_modulus']!r},"
                         f"{row['predicted_scale']!r}")
        return "\n".join(lines) + "\n"


def _block_extremes(b: Block, radius: float) -> tuple[float, float]:
    # min and max of |g_N(z) z^N| on |z| = radius, both attained on the real axis
    lam = 0.5
    lo = abs((radius - lam) / (1 - lam * radius)) ** b.N * radius**b.N
    hi = ((radius + lam) / (1 + lam * radius)) ** b.N * radius**b.N
    return lo, hi


def _window_sums(vals, lo, hi, p):
    w = np.abs(vals[lo:hi])
    plain = math.fsum(w**p)
    if lo % 2:
        lo += 1
    w2 = np.abs(vals[lo:hi])
    if len(w2) % 2:
        w2 = w2[:-1]
    paired = math.fsum(np.minimum(w2[0::2], w2[1::2]) ** p)
    return plain, paired


def annular_verify(spec: AnnularSpec, levels_checked: int | None = None,
                   seq: exact.CoeffSequence | None = None, samples: int | None = None) -> AnnularReport:
    """Evaluate the growth and summability claims on the assembled sequence.

    For each level ``k`` the minimum of ``|f|`` on ``|z| = 1 - 1/N_k`` is
    compared with the scale ``weight_k`` and with two lower bounds: the
    crude one ``e^-6 w_k - sum_{s<k} w_s - sum_{s>k} w_s exp(-A^(s-k))`` and
    the exact block extremes on that circle.  Level increments of the
    l^q sum and of the paired-min l^p sum are taken over the index windows
    ``[N_k, N_{k+1})``.
    """
    levels_checked = spec.levels if levels_checked is None else levels_checked
    if seq is None:
        seq = build_annular(spec)
    vals = seq.values
    rep = AnnularReport(spec.to_dict())
    blocks = spec.blocks
    minima = []
    for k in range(1, levels_checked + 1):
        rho = spec.radius(k)
        m = min_modulus_on_circle(seq, rho, samples=samples)
        w = [b.weight for b in blocks]
        crude = math.exp(-6) * w[k - 1] - sum(w[: k - 1]) - sum(
            ws * math.exp(-(blocks[s].N / blocks[k - 1].N)) for s, ws in enumerate(w) if s >= k
        )
        ext = [_block_extremes(b, rho) for b in blocks]
        sharp = w[k - 1] * ext[k - 1][0] - sum(
            w[s] * ext[s][1] for s in range(len(blocks)) if s != k - 1
        )
        rep.circle_minima.append({
            "k": k,
            "radius": rho,
            "min_modulus": m,
            "predicted_scale": w[k - 1],
            "ratio": m / w[k - 1],
            "crude_lower_bound": crude,
            "block_lower_bound": sharp,
        })
        minima.append(m)
    # partial sums over the level windows [N_k, N_{k+1})
    q_inc, pm_inc, phi_inc = [], [], []
    q = spec.q if spec.mode == Mode.LpGap else 2.0
    p = spec.p if spec.mode == Mode.LpGap else 2.0
    for k in range(1, levels_checked + 1):
        lo = blocks[k - 1].shift
        hi = blocks[k].shift if k < len(blocks) else len(vals)
        hi = min(hi, len(vals))
        plain_q, _ = _window_sums(vals, lo, hi, q)
        _, paired_p = _window_sums(vals, lo, hi, p)
        q_inc.append(plain_q)
        pm_inc.append(paired_p)
        if spec.mode == Mode.PhiGap:
            a = np.abs(vals[lo:hi])
            a = a[a > 0]
            phi_vals = np.array([float(spec.phi(float(1 / x))) if 1 / x < 1e300 else math.inf
                                 for x in a])
            phi_inc.append(math.fsum(a**2 / phi_vals))
    rep.tail_norms = {
        "lq_increments": q_inc,
        "lq_partial": list(np.cumsum(q_inc)),
        "paired_min_lp_increments": pm_inc,
        "paired_min_lp_partial": list(np.cumsum(pm_inc)),
    }
    if spec.mode == Mode.LpGap:
        rep.tail_norms["predicted_lq_increment"] = [
            b.weight**q * u_p(b.N, q) ** q for b in blocks[:levels_checked]]
        rep.tail_norms["predicted_paired_increment"] = [
            b.weight**p * u_p(b.N, p) ** p for b in blocks[:levels_checked]]
        rep.tail_norms["block_l2_sq"] = [b.weight**2 for b in blocks[:levels_checked]]
    if phi_inc:
        rep.tail_norms["l2phi_increments"] = phi_inc
        rep.tail_norms["l2phi_partial"] = list(np.cumsum(phi_inc))
    ratios = [row["ratio"] for row in rep.circle_minima]
    rep.verdicts = {
        "minima_strictly_increasing": all(b > a for a, b in zip(minima, minima[1:])),
        "ratio_spread": (max(ratios) / min(ratios)) if ratios and min(ratios) > 0 else math.inf,
        "lq_increments_decreasing": all(b < a for a, b in zip(q_inc, q_inc[1:])),
        "paired_increments_increasing": all(b > a for a, b in zip(pm_inc, pm_inc[1:])),
    }
    return rep
