"""Command-line frontend: ``spectral-corners <subcommand> [flags]``.

Exit status is 0 on success, 1 when a verification misses its tolerance and
2 on usage or I/O errors.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import classify, families, fastops, identities, spectra
from .families import FamilyParams
from .report import IdentityReport, emit

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _params(args):
    if args.family is None or args.tau is None or args.rho is None:
        raise UsageError("--family, --tau and --rho are required")
    return FamilyParams(args.family.upper(), args.tau, args.rho, args.q)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing required " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _family_flags(p, size=True):
    p.add_argument("--family", type=str.upper, choices=["A", "B", "C"])
    p.add_argument("--tau", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--q", type=float, help="base in (0, 1); family A only")
    if size:
        p.add_argument("--size", "-N", type=int)


def _output_flags(p, formats=("json",)):
    p.add_argument("--format", choices=list(formats), default=formats[0])
    p.add_argument("--out", help="output path (default: stdout)")


def _tol(args, default):
    return default if args.tol is None else args.tol


def _emit(args, payload, columns=None):
    text = emit(payload, args.format, args.out, columns)
    if not args.out:
        sys.stdout.write(text)


# --- subcommands -------------------------------------------------------------

def cmd_entry(args):
    _need(args, "n", "m")
    value = families.entry(_params(args), args.n, args.m)
    if args.format == "json":
        _emit(args, {"value": value})
    else:
        print(repr(value))
    return OK


def cmd_dense(args):
    _need(args, "size")
    M = families.dense_truncation(_params(args), args.size)
    _emit(args, {"params": M.params.label(), "size": M.size, "origin": M.origin,
                 "entries": M.entries})
    return OK


def cmd_eig(args):
    _need(args, "size")
    M = families.dense_truncation(_params(args), args.size)
    s = spectra.eig_dense(M, method=args.method, tol=args.tol)
    _emit(args, {"params": M.params.label(), "size": s.size, "method": s.method,
                 "sweeps": s.sweeps, "off_norm": s.off_norm, "n_pos": s.n_pos,
                 "n_neg": s.n_neg, "n_zero": s.n_zero, "trace": s.trace,
                 "frobenius": s.frobenius, "eigenvalues": s.eigenvalues})
    return OK


def cmd_lanczos(args):
    _need(args, "size")
    h = fastops.make_handle(_params(args), args.size)
    r = spectra.lanczos_extremes(h, k=args.k, max_iter=args.max_iter, tol=args.tol,
                                 seed=args.seed, which=args.which)
    _emit(args, {"params": h.params.label(), "size": h.size, "top": r.top, "bottom": r.bottom,
                 "top_residuals": r.top_residuals, "bottom_residuals": r.bottom_residuals,
                 "iterations": r.iterations, "converged": r.converged,
                 "breakdown": r.breakdown, "matvecs": h.matvecs})
    return OK


def cmd_matvec_check(args):
    _need(args, "size")
    p = _params(args)
    h = fastops.make_handle(p, args.size)
    D = families.dense_truncation(p, args.size).entries
    rng = np.random.default_rng(args.seed)
    x = rng.standard_normal(args.size)
    fast, dense = fastops.matvec(h, x), D @ x
    scale = np.abs(D) @ np.abs(x)
    gap = np.abs(fast - dense)
    i = int(np.argmax(gap / np.where(scale > 0, scale, 1.0)))
    rep = IdentityReport.from_residual("matvec", fast[i], dense[i], gap[i], scale[i], args.tol,
                                       measure="rel", notes={"params": p.label(), "size": args.size,
                                                             "kind": h.kind, "seed": args.seed})
    _emit(args, rep)
    return OK if rep.passed else FAILED


def _verify_poisson_circle(args):
    _need(args, "q", "tau")
    ns = [args.n] if args.n is not None else list(range(-20, 21))
    return [identities.verify_poisson_circle(args.q, args.tau, n, args.points, _tol(args, 1e-10))
            for n in ns]


def _verify_quadform_a(args):
    p = _params(args)
    rng = np.random.default_rng(args.seed)
    reps = []
    for _ in range(args.trials):
        f = rng.standard_normal(args.degree + 1) + 1j * rng.standard_normal(args.degree + 1)
        reps.append(identities.verify_quadform_A(p, f, args.points, _tol(args, 1e-8)))
    return reps


def _verify_halfplane(args):
    _need(args, "tau", "n", "m")
    return [identities.verify_halfplane_poisson(args.tau, args.n, args.m, tol=_tol(args, 1e-4))]


def _verify_zeta_divisor(args):
    _need(args, "tau", "n", "m")
    return [identities.verify_divisor_sum_zeta(args.tau, args.n, args.m, args.terms or 100_000,
                                               _tol(args, 1e-12))]


def _verify_multiplier_gram(args):
    _need(args, "tau", "size")
    return [identities.verify_multiplier_gram(args.tau, args.size, args.terms or 4096,
                                              _tol(args, 1e-12))]


def _verify_rank_two(args):
    _need(args, "size")
    return [families.rank_two_residual(_params(args), args.size, _tol(args, 1e-12))]


def _verify_tensor(args):
    _need(args, "size")
    if args.family is None:
        args.family = "C"
    return [identities.tensor_factor_report(_params(args), args.size, _tol(args, 1e-12))]


def _verify_scaling(args):
    _need(args, "k", "n", "m")
    return [families.scaling_check(_params(args), args.k, args.n, args.m, _tol(args, 1e-12))]


def _verify_smith(args):
    _need(args, "size")
    return [identities.smith_report(args.size)]


def _verify_symbol_range(args):
    _need(args, "tau", "q", "size")
    lo, hi = identities.toeplitz_symbol_range(args.tau, args.q)
    p = FamilyParams("A", args.tau, 0.0, args.q)
    s = spectra.eig_dense(families.dense_truncation(p, args.size))
    tol = _tol(args, 1e-12)
    notes = {"params": p.label(), "size": args.size}
    # truncation spectra sit inside the symbol range; only overshoot counts
    top = IdentityReport.from_residual("symbol-max", s.lambda_max, hi, max(0.0, s.lambda_max - hi),
                                       hi, tol, measure="rel", notes=dict(notes, gap=hi - s.lambda_max))
    bottom = IdentityReport.from_residual("symbol-min", s.lambda_min, lo, max(0.0, lo - s.lambda_min),
                                          lo, tol, measure="rel",
                                          notes=dict(notes, gap=s.lambda_min - lo))
    return [top, bottom]


VERIFIERS = {
    "poisson-circle": _verify_poisson_circle,
    "quadform-a": _verify_quadform_a,
    "halfplane": _verify_halfplane,
    "zeta-divisor": _verify_zeta_divisor,
    "multiplier-gram": _verify_multiplier_gram,
    "rank-two": _verify_rank_two,
    "tensor": _verify_tensor,
    "scaling": _verify_scaling,
    "smith": _verify_smith,
    "symbol-range": _verify_symbol_range,
}


def cmd_verify(args):
    reports = VERIFIERS[args.identity](args)
    _emit(args, reports)
    return OK if all(r.passed for r in reports) else FAILED


def _grid_args(args):
    taus = classify.grid(args.tau_min, args.tau_max, args.tau_steps)
    rhos = classify.grid(args.rho_min, args.rho_max, args.rho_steps)
    return taus, rhos


def cmd_scan(args):
    if args.family is None:
        raise UsageError("--family is required")
    sizes = [int(s) for s in args.sizes.split(",")] if args.sizes else None
    taus, rhos = _grid_args(args)
    verdicts = classify.empirical_scan(args.family, taus, rhos, sizes=sizes,
                                       q=args.q if args.q is not None else 0.5)
    if args.format == "csv":
        _emit(args, [v.row() for v in verdicts], classify.CSV_COLUMNS)
    else:
        frac, decided = classify.agreement(verdicts)
        _emit(args, {"family": args.family, "agreement": frac, "decided": decided,
                     "points": [dict(v.row(), in_band=v.in_band,
                                     lambda_max_by_size=v.lambda_max_by_size)
                                for v in verdicts]})
    return OK


def cmd_figure1(args):
    if args.family is None:
        raise UsageError("--family is required")
    if args.out is None:
        raise UsageError("--out directory is required")
    fig = classify.figure1_dataset(args.family, args.resolution, args.out,
                                   q=args.q if args.q is not None else 0.5)
    print(f"{fig.paths[0]}\n{fig.paths[1]}\nagreement {fig.agreement:.4f} over {fig.decided} points")
    return OK


def cmd_witness(args):
    _need(args, "size")
    rep = classify.unboundedness_witness(_params(args), args.size, sigma=args.sigma)
    _emit(args, rep)
    return OK if rep.growing else FAILED


# --- parser ------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="spectral-corners",
                                 description="Truncations, spectra and identities of the A/B/C matrix families.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entry", help="one matrix entry")
    _family_flags(p, size=False)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    _output_flags(p, ("text", "json"))
    p.set_defaults(func=cmd_entry)

    p = sub.add_parser("dense", help="dense N x N truncation")
    _family_flags(p)
    _output_flags(p)
    p.set_defaults(func=cmd_dense)

    p = sub.add_parser("eig", help="full spectrum of a truncation")
    _family_flags(p)
    p.add_argument("--method", choices=["auto", "jacobi", "lapack"], default="auto")
    p.add_argument("--tol", type=float, default=1e-12)
    _output_flags(p)
    p.set_defaults(func=cmd_eig)

    p = sub.add_parser("lanczos", help="extreme eigenvalues with fast products")
    _family_flags(p)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--max-iter", type=int, default=300)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--which", choices=["both", "top", "bottom"], default="both")
    p.add_argument("--seed", type=int, default=0)
    _output_flags(p)
    p.set_defaults(func=cmd_lanczos)

    p = sub.add_parser("matvec-check", help="fast product against dense on a random vector")
    _family_flags(p)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--seed", type=int, default=0)
    _output_flags(p)
    p.set_defaults(func=cmd_matvec_check)

    p = sub.add_parser("verify", help="two-sided identity checks")
    p.add_argument("identity", choices=sorted(VERIFIERS))
    _family_flags(p)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--points", type=int, default=identities.CIRCLE_POINTS)
    p.add_argument("--terms", type=int, help="series truncation K")
    p.add_argument("--degree", type=int, default=8)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int, default=0)
    _output_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", help="empirical boundedness scan over a (tau, rho) grid")
    p.add_argument("--family", type=str.upper, choices=["A", "B", "C"])
    p.add_argument("--q", type=float)
    for axis in ("tau", "rho"):
        p.add_argument(f"--{axis}-min", type=float, default=-2.5)
        p.add_argument(f"--{axis}-max", type=float, default=2.5)
        p.add_argument(f"--{axis}-steps", type=int, default=15)
    p.add_argument("--sizes", help="comma-separated truncation sizes")
    _output_flags(p, ("json", "csv"))
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("figure1", help="region dataset (CSV) and diagram (SVG)")
    p.add_argument("--family", type=str.upper, choices=["A", "B", "C"])
    p.add_argument("--q", type=float)
    p.add_argument("--resolution", type=int, default=15)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_figure1)

    p = sub.add_parser("witness", help="growth of an unboundedness witness")
    _family_flags(p)
    p.add_argument("--sigma", type=float)
    _output_flags(p)
    p.set_defaults(func=cmd_witness)
    return ap


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except (UsageError, ValueError, IndexError, OverflowError, OSError) as exc:
        print(f"spectral-corners {args.command}: {exc}", file=sys.stderr)
        return USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
