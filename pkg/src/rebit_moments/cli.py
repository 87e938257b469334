"""Command-line front end.

Exit codes: 0 success, 1 a verification row failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__, recon
from .exact import moments as mom
from .exact.intermediate import KINDS, intermediate_function
from .sampling import FUNCTIONALS, MEASURES, SamplerConfig, estimate_many
from .density import SCENARIOS
from .serialize import dumps, report_envelope
from .verification import TIERS, run_verify

THREADS_ENV = "REBIT_MOMENTS_THREADS"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}")
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be >= 1")
    return n


def _count(text: str) -> int:
    """Integer sample counts, accepting ``1e6`` style."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if value != int(value) or value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def _emit(text: str, output: Optional[str]) -> None:
    if output is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    path = Path(output)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text if text.endswith("\n") else text + "\n")
    except OSError as exc:
        raise UsageError(f"cannot write {output}: {exc}")


def _config(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output", "threads")}
    return cfg


# -- commands ---------------------------------------------------------------

def cmd_sample(args) -> int:
    threads = args.threads or _default_threads()
    try:
        config = SamplerConfig(args.scenario, args.measure, args.seed, args.samples, threads)
        reports = estimate_many(config, args.functional, args.max_moment)
    except ValueError as exc:
        raise UsageError(str(exc))
    if args.format == "csv":
        parts = [reports[f].to_csv() for f in args.functional]
        header, *_ = parts[0].splitlines()
        rows = [line for p in parts for line in p.splitlines()[1:]]
        _emit("\n".join([header] + rows), args.output)
    else:
        _emit(dumps(report_envelope("sample", _config(args), reports)), args.output)
    return EXIT_OK


def cmd_exact(args) -> int:
    if args.closed_form:
        value = mom.det_moment_closed_form(args.order, args.closed_form)
        payload = {"ensemble": args.closed_form, "m": args.order, "moment": value, "float": float(value)}
    else:
        if args.kind not in KINDS:
            raise UsageError(f"unknown kind {args.kind!r}")
        try:
            I = intermediate_function(args.order, args.kind, allow_large=args.allow_large)
        except ValueError as exc:
            raise UsageError(str(exc))
        value = mom.assemble_moment(I).value
        payload = {"kind": args.kind, "m": args.order, "coefficients": list(I.coefficients),
                   "moment": value, "float": float(value)}
    _emit(dumps(report_envelope("exact", _config(args), payload)), args.output)
    return EXIT_OK


def _sequence(kind: str, K: int) -> recon.MomentSequence:
    try:
        return recon.MomentSequence.from_kind(kind, K)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc))


def _threshold(seq: recon.MomentSequence) -> Fraction:
    return seq.image_of(0)


def _fit(family: str, mapped: recon.MomentSequence) -> recon.FitResult:
    if family == "beta":
        return recon.beta_fit_two_moments(mapped)
    return recon.libby_novick_fit(mapped)


def cmd_recon(args) -> int:
    seq = _sequence(args.kind, args.k)
    mapped = recon.affine_map_moments(seq)
    t = _threshold(seq)
    grid = None
    if args.method == "mnatsakanov":
        estimate = recon.mnatsakanov_estimate(mapped, t, args.k)
        params = {}
        if args.grid:
            ys = [Fraction(i, 1000) for i in range(1001)]
            grid = ("y", "cdf", [(float(y), float(recon.mnatsakanov_cdf(mapped, y, args.k))) for y in ys])
    elif args.method == "provost-ha":
        base = _fit(args.baseline, recon.affine_map_moments(seq.truncated(max(2, min(3, args.k)))))
        try:
            res = recon.provost_ha_density(mapped, base, args.k, threshold=t)
        except ValueError as exc:
            raise UsageError(str(exc))
        estimate, params = res.estimate, {"baseline": base.to_dict(), "lambdas": res.lambdas}
        if args.grid:
            y, p = recon.density_grid(res.density)
            grid = ("y", "pdf", list(zip(y.tolist(), p.tolist())))
    else:
        fit = recon.naive_polynomial_density(seq)
        estimate, params = fit.separability_estimate, {"coefficients": fit.params}
        if args.grid:
            y, p = recon.density_grid(fit.pdf, seq.lo, seq.hi)
            grid = ("x", "pdf", list(zip(y.tolist(), p.tolist())))
    payload = {"method": args.method, "K": args.k, "kind": args.kind, "threshold": t,
               "estimate": estimate, "params": params}
    if grid is not None:
        _write_grid(args.grid, *grid)
    _emit(dumps(report_envelope("recon", _config(args), payload)), args.output)
    return EXIT_OK


def cmd_fit(args) -> int:
    seq = _sequence(args.kind, args.k)
    mapped = recon.affine_map_moments(seq)
    fit = _fit(args.family, mapped)
    estimate = recon.tail_probability(fit, _threshold(seq))
    payload = {"method": args.family, "K": args.k, "estimate": estimate, "params": fit.params,
               "moment_ratios": fit.goodness, "converged": fit.converged}
    if args.grid:
        y, p = recon.density_grid(fit.pdf)
        _write_grid(args.grid, "y", "pdf", list(zip(y.tolist(), p.tolist())))
    _emit(dumps(report_envelope("fit", _config(args), payload)), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    threads = args.threads or _default_threads()
    lines: List[str] = []
    rows = run_verify(args.tier, args.samples, args.seed, threads, echo=lines.append)
    blocking = [r for r in rows if r.primary]
    passed = sum(r.passed for r in blocking)
    lines.append(f"{passed}/{len(blocking)} blocking rows passed (tier {args.tier}, version {__version__})")
    text = "\n".join(lines)
    if args.output:
        _emit(dumps(report_envelope("verify", _config(args), rows)), args.output)
    sys.stdout.write(text + "\n")
    return EXIT_OK if passed == len(blocking) else EXIT_FAIL


def _write_grid(path: str, xname: str, yname: str, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([xname, yname])
    for x, y in rows:
        w.writerow([repr(float(x)), repr(float(y))])
    _emit(buf.getvalue(), path)


def cmd_report(args) -> int:
    out = Path(args.output or ".")
    seq = _sequence("pt-det", 9)
    mapped = recon.affine_map_moments(seq)
    beta = recon.beta_fit_two_moments(mapped)
    if args.figure == "fig1":
        y, p = recon.density_grid(beta.pdf)
        _write_grid(str(out / "fig1_beta_density.csv"), "y", "pdf", zip(y, p))
        payload = {"params": beta.params, "mode": recon.beta_mode(beta), "boundary": seq.image_of(0),
                   "separability_estimate": recon.tail_probability(beta, seq.image_of(0))}
    elif args.figure == "fig2":
        ratios = beta.goodness
        _write_grid(str(out / "fig2_moment_ratios.csv"), "m", "ratio", zip(range(1, len(ratios) + 1), ratios))
        payload = {"moment_ratios": ratios}
    elif args.figure == "fig3":
        ks = list(range(1, 10))
        rows = []
        for k in ks:
            mn = recon.mnatsakanov_estimate(mapped, seq.image_of(0), k)
            ph = recon.provost_ha_density(mapped, beta, k, threshold=seq.image_of(0)).estimate
            rows.append((k, mn, ph))
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["K", "mnatsakanov", "provost_ha"])
        for r in rows:
            w.writerow([r[0], repr(r[1]), repr(r[2])])
        _emit(buf.getvalue(), str(out / "fig3_estimates.csv"))
        payload = {"K": ks, "mnatsakanov": [r[1] for r in rows], "provost_ha": [r[2] for r in rows]}
    elif args.figure == "fig5":
        fit = recon.naive_polynomial_density(seq)
        x, p = recon.density_grid(fit.pdf, seq.lo, seq.hi)
        _write_grid(str(out / "fig5_poly9_density.csv"), "x", "pdf", zip(x, p))
        payload = {"coefficients": fit.params, "mass_nonnegative_x": fit.separability_estimate,
                   "min_density": float(np.min(p))}
    else:
        raise UsageError(f"unknown figure {args.figure!r}")
    report = report_envelope("report", _config(args), payload)
    _emit(dumps(report), str(out / f"{args.figure}.json"))
    sys.stdout.write(dumps(report) + "\n")
    return EXIT_OK


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rebit-moments", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="Monte Carlo moment estimates")
    s.add_argument("--scenario", choices=SCENARIOS, default="real-9d")
    s.add_argument("--measure", choices=MEASURES, default="HS")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--samples", type=_count, default=100_000)
    s.add_argument("--threads", type=int, default=None, help=f"default from ${THREADS_ENV} or 1")
    s.add_argument("--functional", action="append", choices=FUNCTIONALS + ("ppt",))
    s.add_argument("--max-moment", type=int, default=2)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--output")
    s.set_defaults(func=cmd_sample)

    e = sub.add_parser("exact", help="exact intermediate function and moment")
    e.add_argument("--kind", default="pt-det")
    e.add_argument("--m", "--order", dest="order", type=int, default=1, help="moment order")
    e.add_argument("--allow-large", action="store_true")
    e.add_argument("--closed-form", choices=("real", "complex"), help="det moment closed form instead")
    e.add_argument("--output")
    e.set_defaults(func=cmd_exact)

    r = sub.add_parser("recon", help="separability estimate from the exact moments")
    r.add_argument("--k", type=int, default=9)
    r.add_argument("--method", choices=("mnatsakanov", "provost-ha", "poly9"), default="mnatsakanov")
    r.add_argument("--kind", choices=("pt-det",), default="pt-det")
    r.add_argument("--baseline", choices=("beta", "ln"), default="beta")
    r.add_argument("--grid", help="CSV path for a 1001-point density or CDF grid")
    r.add_argument("--output")
    r.set_defaults(func=cmd_recon)

    f = sub.add_parser("fit", help="beta or Libby-Novick fit to the mapped moments")
    f.add_argument("--family", choices=("beta", "ln"), default="beta")
    f.add_argument("--kind", choices=("pt-det", "product"), default="pt-det")
    f.add_argument("--k", type=int, default=None)
    f.add_argument("--grid")
    f.add_argument("--output")
    f.set_defaults(func=cmd_fit)

    v = sub.add_parser("verify", help="computed-versus-reference table")
    v.add_argument("--tier", choices=TIERS, default="exact")
    v.add_argument("--samples", type=_count, default=1_000_000)
    v.add_argument("--seed", type=int, default=7)
    v.add_argument("--threads", type=int, default=None)
    v.add_argument("--output")
    v.set_defaults(func=cmd_verify)

    rp = sub.add_parser("report", help="plot-ready data for one figure")
    rp.add_argument("figure", choices=("fig1", "fig2", "fig3", "fig5"))
    rp.add_argument("--output", help="directory (default: current)")
    rp.set_defaults(func=cmd_report)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if getattr(args, "functional", None) is None and args.command == "sample":
        args.functional = ["det", "detPT", "product"]
    if args.command == "fit" and args.k is None:
        args.k = 9 if args.kind == "pt-det" else 2
    if getattr(args, "threads", None) is not None and args.threads < 1:
        sys.stderr.write("error: --threads must be >= 1\n")
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
