"""Command line interface.

Subcommands: ``coeff``, ``saddle``, ``airy``, ``compare``, ``table``,
``norms``, ``annular``, ``duality``.  Every command is deterministic; CSV
output starts with a ``#`` line naming the oracle and precision.

Exit codes: 0 success, 2 usage or domain error, 3 numerical refusal,
4 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import airy, annular, asym, exact, norms, saddle
from .core import (
    BudgetExceeded,
    ConfigurationError,
    CoeffQuery,
    DomainError,
    NumericalRefusal,
    Region,
    Thresholds,
    alpha0,
    as_fraction,
    classify_region,
    default_thresholds,
)

EXIT_OK, EXIT_USAGE, EXIT_REFUSAL, EXIT_BUDGET = 0, 2, 3, 4


def _lambda(text: str) -> Fraction:
    try:
        lam = as_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad lambda {text!r}: {exc}") from None
    if not 0 < lam < 1:
        raise argparse.ArgumentTypeError("lambda must lie in (0, 1)")
    return lam


def _range(text: str) -> range:
    # "a:b" inclusive of both ends, or "a:b:step"
    parts = [int(p) for p in text.split(":")]
    if len(parts) == 2:
        return range(parts[0], parts[1] + 1)
    if len(parts) == 3:
        return range(parts[0], parts[1] + 1, parts[2])
    raise argparse.ArgumentTypeError(f"bad range {text!r}, expected a:b or a:b:step")


def _floats(text: str) -> list[float]:
    return [float(v) if v != "inf" else math.inf for v in text.split(",")]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",")]


def _csv_text(comment: str, header, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _thresholds(args, lam, n) -> Thresholds:
    d = default_thresholds(lam, n)
    t = Thresholds(
        alpha=d.alpha if args.alpha is None else args.alpha,
        beta=d.beta if args.beta is None else args.beta,
        omega=d.omega if args.omega is None else args.omega,
        k_fixed=d.k_fixed if args.k_fixed is None else args.k_fixed,
    )
    t.check(lam, n)
    return t


# -- commands ------------------------------------------------------------------


def cmd_coeff(args):
    lam, n = args.lam, args.n
    ks = [args.k] if args.k is not None else list(args.k_range or range(0, 8 * n + 1))
    K = max(ks)
    if args.oracle == "rational":
        seq = exact.coeffs_rational(lam, n, K)
    elif args.oracle == "quadrature":
        seq = exact.coeffs_quadrature(lam, n, K, tol=args.tol)
    else:
        M = args.samples or exact.default_num_samples(float(lam), n)
        while M <= K:
            M *= 2
        seq = exact.coeff_dft(lam, n, M)
    sub = exact.CoeffSequence(seq.values[ks], n, lam, seq.provenance, seq.error_bound)
    if args.out == "json":
        d = sub.to_dict()
        d["k"] = ks
        return json.dumps(d, indent=1) + "\n"
    rows = [(k, float(v), float(seq.error_bound)) for k, v in zip(ks, sub.values)]
    return _csv_text(
        f"provenance={seq.provenance.value} lambda={lam} n={n} precision=float64 units=dimensionless",
        ("k", "value", "abs_error_bound"), rows)


def cmd_saddle(args):
    lam = args.lam
    if args.a is not None:
        a = args.a
    elif args.n is not None and args.k is not None:
        a = args.k / args.n
    else:
        raise ConfigurationError("saddle needs --a or both --n and --k")
    sd = saddle.saddle_data(float(lam), a, args.side)
    if args.out == "json":
        return sd.to_json() + "\n"
    rows = []
    for key, v in sd.to_dict().items():
        if isinstance(v, dict):
            rows.append((key, v["re"], v["im"]))
        else:
            rows.append((key, v, 0.0))
    return _csv_text(f"lambda={lam} a={a!r} precision=float64", ("quantity", "re", "im"), rows)


def cmd_airy(args):
    if args.x is not None:
        xs = args.x
    else:
        lo, hi, num = args.grid.split(":")
        xs = list(np.linspace(float(lo), float(hi), int(num)))
    vals = [airy.ai_value(float(x)) for x in xs]
    if args.out == "json":
        return json.dumps([{"x": v.x, "ai": v.ai, "method": v.method.value,
                            "est_error": v.est_error, "underflow": v.underflow} for v in vals],
                          indent=1) + "\n"
    rows = [(v.x, v.ai, v.method.value, v.est_error) for v in vals]
    return _csv_text("function=Ai precision=float64", ("x", "ai", "method", "est_error"), rows)


def cmd_compare(args):
    lam, n = args.lam, args.n
    ks = list(args.k_range) if args.k_range else list(range(0, 8 * n + 1))
    th = _thresholds(args, lam, n)
    table = asym.error_sweep(lam, n, ks, thresholds=th)
    if args.out == "json":
        return table.summary_json() + "\n"
    return table.to_csv()


def cmd_table(args):
    lam, n = args.lam, args.n
    th = _thresholds(args, lam, n)
    edges = [float(e) for e in th.edges(lam, n)]
    a0 = float(alpha0(lam))
    # representative k per band
    reps = {
        Region.I: min(1, th.k_fixed),
        Region.II: (th.k_fixed + edges[0]) / 2,
        Region.III: (edges[0] + edges[1]) / 2,
        Region.IV: a0 * n,
        Region.V: n,
        Region.VI: n / a0,
        Region.VII: (edges[4] + edges[5]) / 2,
        Region.VIII: 1.5 * edges[5],
    }
    bounds = [0, th.k_fixed] + edges + [math.inf]
    K = int(math.ceil(reps[Region.VIII])) + 1
    M = exact.default_num_samples(float(lam), n)
    while M <= K:
        M *= 2
    seq = exact.coeff_dft(lam, n, M)
    peak = float(np.abs(seq.values).max())
    rows = []
    for reg in Region:
        k = int(round(reps[reg]))
        label = classify_region(CoeffQuery(lam, n, k), th)
        res = asym.asym_auto(lam, n, k, th, with_saddle=False)
        ex = float(seq.values[k])
        if abs(ex) < 1e-12 * peak:
            es, ex_log = exact.coeff_dft_shifted(lam, n, k)[:2]
        else:
            es, ex_log = asym._split(ex)
        rel = abs(math.expm1(res.log_abs - ex_log)) if es == res.sign else math.inf
        lo, hi = bounds[reg.value - 1], bounds[reg.value]
        rows.append((reg.name, label.name, float(lo), float(hi), k, asym._signed(es, ex_log),
                     ex_log, res.value, res.log_abs, rel, res.formula))
    header = ("region", "routed", "k_lo", "k_hi", "k", "exact", "log_abs_exact", "asym",
              "log_abs_asym", "rel_err", "formula")
    if args.out == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=1) + "\n"
    return _csv_text(f"lambda={lam} n={n} exact={seq.provenance.value} precision=float64",
                     header, rows)


def cmd_norms(args):
    reports = [norms.exponent_fit(args.lam, p, args.n_values) for p in args.p]
    if args.out == "json":
        return json.dumps([r.to_dict() for r in reports], indent=1) + "\n"
    return "".join(r.to_csv() for r in reports)


def cmd_annular(args):
    if args.lemma1 is not None:
        rep = annular.lemma1_verify(args.lemma1)
        if args.out == "json":
            return json.dumps(rep, indent=1, default=float) + "\n"
        rows = [(key, val) for key, val in rep.items() if key != "v"]
        for p, d in rep["v"].items():
            rows += [(f"lp_ratio_p{p}", d["lp_ratio"]), (f"paired_ratio_p{p}", d["paired_ratio"])]
        return _csv_text("lemma=building_block lambda=1/2 oracle=DftSampling precision=float64",
                         ("quantity", "value"), rows)
    if args.mode == "phigap":
        spec = annular.AnnularSpec.phi_gap(args.phi, A=args.A, levels=args.levels)
    else:
        spec = annular.AnnularSpec.lp_gap(args.p, args.q, args.r, A=args.A, levels=args.levels,
                                          A0=args.A0)
    rep = annular.annular_verify(spec, args.levels_checked)
    return (rep.to_json() + "\n") if args.out == "json" else rep.to_csv()


def cmd_duality(args):
    lam = args.lam
    ks = [args.k] if args.k is not None else list(args.k_range)
    rows = []
    for k in ks:
        ref = exact.coeff_rational(lam, args.n, k)
        rows.append((args.n, k, float(ref), exact.duality_check(lam, args.n, k, reference=ref)))
    if args.out == "json":
        return json.dumps([dict(zip(("n", "k", "coeff", "residual"), r)) for r in rows],
                          indent=1) + "\n"
    return _csv_text(f"lambda={lam} reference=RationalConvolution precision=float64",
                     ("n", "k", "coeff", "residual"), rows)


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blaschkepow",
                                     description="Taylor coefficients of Blaschke factor powers.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", choices=("csv", "json"), default="csv")
    common.add_argument("--output", help="write to this file instead of stdout")
    lamp = argparse.ArgumentParser(add_help=False)
    lamp.add_argument("--lambda", dest="lam", type=_lambda, default=Fraction(1, 2),
                      help='real parameter as "p/q" or decimal (default 1/2)')
    band = argparse.ArgumentParser(add_help=False)
    band.add_argument("--alpha", type=float)
    band.add_argument("--beta", type=float)
    band.add_argument("--omega", type=float)
    band.add_argument("--k-fixed", type=int)

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeff", parents=[common, lamp], help="exact coefficients")
    p.add_argument("--n", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--k", type=int)
    g.add_argument("--k-range", type=_range)
    p.add_argument("--oracle", choices=("rational", "dft", "quadrature"), default="rational")
    p.add_argument("--samples", type=int, help="DFT length")
    p.add_argument("--tol", type=float, default=1e-12, help="quadrature tolerance")
    p.set_defaults(func=cmd_coeff)

    p = sub.add_parser("saddle", parents=[common, lamp], help="saddle points and phase data")
    p.add_argument("--a", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--side", choices=[s.value for s in saddle.Side], default="Auto")
    p.set_defaults(func=cmd_saddle)

    p = sub.add_parser("airy", parents=[common], help="Airy function values")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--x", type=_floats)
    g.add_argument("--grid", help="lo:hi:num")
    p.set_defaults(func=cmd_airy)

    p = sub.add_parser("compare", parents=[common, lamp, band], help="asymptotics vs exact")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k-range", type=_range)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("table", parents=[common, lamp, band], help="region map with values")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("norms", parents=[common, lamp], help="l^p norm scaling fits")
    p.add_argument("--p", type=_floats, default=[1.0, 2.0, 3.0, 4.0, math.inf])
    p.add_argument("--n-values", type=_ints, default=[2**j for j in range(8, 14)])
    p.set_defaults(func=cmd_norms)

    p = sub.add_parser("annular", parents=[common], help="annular constructions")
    p.add_argument("--mode", choices=("lpgap", "phigap"), default="lpgap")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--q", type=float, default=3.0)
    p.add_argument("--r", type=float, default=2.5)
    p.add_argument("--A", type=int, default=16)
    p.add_argument("--A0", type=float, default=1.0)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--levels-checked", type=int)
    p.add_argument("--phi", choices=sorted(annular.PHI_FUNCTIONS), default="log1p")
    p.add_argument("--lemma1", type=int, metavar="N", help="check the building block g_N instead")
    p.set_defaults(func=cmd_annular)

    p = sub.add_parser("duality", parents=[common, lamp], help="duality identity residuals")
    p.add_argument("--n", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--k", type=int)
    g.add_argument("--k-range", type=_range)
    p.set_defaults(func=cmd_duality)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = args.func(args)
    except BudgetExceeded as exc:
        print(f"blaschkepow: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except NumericalRefusal as exc:
        print(f"blaschkepow: numerical refusal: {exc}", file=sys.stderr)
        return EXIT_REFUSAL
    except (DomainError, ConfigurationError, ValueError) as exc:
        print(f"blaschkepow: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
