"""Command-line surface: seeded verification runs with serialized reports.

Exit codes: 0 clean, 2 violations, 3 indeterminate samples only, 64 usage
error.  Reports are byte-identical across reruns of the same argv except for
the wall_time_ms field.  CROWN_THREADS caps the worker pool.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import convexity, domains, siegel
from .errors import CrownError
from .groups import Family, GroupSpec, build_group
from .iwasawa import (
    PIVOT_FLOOR,
    RECON_RTOL,
    decompose_real,
    project_complex,
    reconstruction_residual,
)
from .parallel import thread_count
from .report import VerificationReport, matrix_wire, vector_wire
from .rng import NS_AUX, substream
from .sampling import haar_k
from .weyl import MEMBERSHIP_TOL, OmegaSpec, hull_contains, omega_distance

EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_group(text: str) -> GroupSpec:
    kind, _, value = text.partition(":")
    try:
        return GroupSpec(Family(kind), int(value))
    except (ValueError, KeyError):
        raise argparse.ArgumentTypeError(f"cannot parse group spec {text!r}") from None


def parse_omega(text: str) -> OmegaSpec:
    try:
        return OmegaSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_coords(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse coordinates {text!r}") from None


def _add_common(sub, omega_default=None, samples_default=1000):
    sub.add_argument("--group", type=parse_group, required=True, metavar="sl:N|sp:N")
    if omega_default is not None:
        sub.add_argument("--omega", type=parse_omega, default=parse_omega(omega_default),
                         metavar="scale:C|ball:R")
    sub.add_argument("--samples", type=int, default=samples_default)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--tol", type=float, default=MEMBERSHIP_TOL)


def build_parser() -> _Parser:
    parser = _Parser(prog="crown")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="report path (default: stdout)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_parser(name, help):
        return sub.add_parser(name, help=help, parents=[common])

    p = add_parser("decompose", help="Iwasawa factors of one group element")
    p.add_argument("--group", type=parse_group, required=True)
    p.add_argument("--entries", type=parse_coords, required=True,
                   help="row-major real entries of the group element")
    p.add_argument("--x", type=parse_coords, default=None,
                   help="imaginary direction; tracks the complex projection")

    p = add_parser("hull", help="orbit-hull membership query")
    p.add_argument("--group", type=parse_group, required=True)
    p.add_argument("--x", type=parse_coords, required=True)
    p.add_argument("--y", type=parse_coords, required=True)
    p.add_argument("--tol", type=float, default=MEMBERSHIP_TOL)

    p = add_parser("verify-convexity", help="hull containment of the tracked projection")
    _add_common(p, omega_default="scale:1.0", samples_default=10000)
    p.add_argument("--mode", choices=("k", "full-g"), default="k")

    p = add_parser("verify-kostant", help="real containment and vertex sharpness")
    _add_common(p, samples_default=10000)

    p = add_parser("gradient-check", help="finite-difference gradient validation")
    p.add_argument("--group", type=parse_group, required=True)
    p.add_argument("--configs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    p = add_parser("critical-points", help="gradient ascents against Weyl maxima")
    p.add_argument("--group", type=parse_group, required=True)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gap-tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=1000)

    p = add_parser("tubes", help="crown points against horospherical tubes")
    p.add_argument("--group", type=parse_group, required=True)
    p.add_argument("--omega", type=parse_omega, default=parse_omega("scale:0.8"))
    p.add_argument("--z-count", type=int, default=1000)
    p.add_argument("--k-count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=MEMBERSHIP_TOL)

    p = add_parser("image", help="projection image of the crown domain")
    _add_common(p, omega_default="scale:0.8", samples_default=10000)

    p = add_parser("boundary", help="boundary approach of the projection")
    p.add_argument("--group", type=parse_group, required=True)
    p.add_argument("--omega", type=parse_omega, default=parse_omega("scale:0.8"))
    p.add_argument("--steps", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)

    p = add_parser("siegel", help="upper half-space minor positivity")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cross-check", action="store_true",
                   help="also compare against the crown projection on matched points")

    p = add_parser("lemma24", help="imaginary unipotent part far from the normalizer")
    p.add_argument("--group", type=parse_group, required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    return parser


def _query_report(command, group, seed, tolerances, extras, start) -> VerificationReport:
    return VerificationReport(
        command=command,
        group=group,
        omega=None,
        seed=seed,
        samples_requested=1,
        samples_completed=1,
        samples_indeterminate=0,
        violations=0,
        min_margin=None,
        worst_witness=None,
        wall_time_ms=int((time.monotonic() - start) * 1000),
        tolerance_set=tolerances,
        extras=extras,
    )


def _run_decompose(args) -> VerificationReport:
    start = time.monotonic()
    ctx = build_group(args.group)
    m = ctx.ambient_size
    if args.entries.size != m * m:
        raise CrownError(f"expected {m * m} entries for {args.group.label}")
    g = args.entries.reshape(m, m)
    if args.x is None:
        factors = decompose_real(ctx, g)
        z = g
    else:
        factors = project_complex(ctx, g, args.x)
        z = g @ ctx.a_exp(1j * args.x)
    extras = {
        "n_part": matrix_wire(factors.n_part),
        "log_a": vector_wire(factors.log_a),
        "k_part": matrix_wire(factors.k_part),
        "path_steps": factors.path_steps,
        "max_arg_step": factors.max_arg_step,
        "reconstruction_residual": reconstruction_residual(ctx, factors, z),
    }
    return _query_report("decompose",
                         {"family": ctx.family.value, "n": ctx.n,
                          "killing_scale": ctx.killing_scale},
                         0, {"pivot_floor": PIVOT_FLOOR, "reconstruction_rtol": RECON_RTOL},
                         extras, start)


def _run_hull(args) -> VerificationReport:
    start = time.monotonic()
    ctx = build_group(args.group)
    member, margin = hull_contains(ctx, args.x, args.y, args.tol)
    report = _query_report("hull",
                           {"family": ctx.family.value, "n": ctx.n,
                            "killing_scale": ctx.killing_scale},
                           0, {"membership_tol": args.tol},
                           {"inside": bool(member), "verdict": "inside" if member else "outside"},
                           start)
    report.min_margin = float(margin)
    return report


def _run_boundary(args) -> VerificationReport:
    import scipy.stats

    start = time.monotonic()
    ctx = build_group(args.group)
    rng = substream(args.seed, NS_AUX)
    direction = convexity.sample_regular_direction(ctx, args.omega, rng)
    g = haar_k(ctx, rng)
    path = domains.boundary_path(ctx, args.omega, direction, args.steps)
    input_dists = [omega_distance(ctx, args.omega, x) for x in path]
    pairs = domains.boundary_probe(ctx, args.omega, g, path)
    out_dists = [d for _, d in pairs]
    rho = float(scipy.stats.spearmanr(input_dists, out_dists).statistic)
    report = _query_report("boundary",
                           {"family": ctx.family.value, "n": ctx.n,
                            "killing_scale": ctx.killing_scale},
                           args.seed, {"final_distance_cap": 1e-3},
                           {"input_distances": [float(d) for d in input_dists],
                            "output_distances": out_dists,
                            "spearman": rho,
                            "final_distance": out_dists[-1],
                            "direction": [float(v) for v in direction]},
                           start)
    report.omega = args.omega.as_dict()
    return report


def run(argv) -> tuple[int, str, str | None]:
    """Execute one command line; returns (exit_code, rendered report, out path)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = thread_count()

    if args.command == "decompose":
        report = _run_decompose(args)
    elif args.command == "hull":
        report = _run_hull(args)
    elif args.command == "verify-convexity":
        ctx = build_group(args.group)
        report = convexity.verify_complex_convexity(
            ctx, args.omega, args.samples, args.seed, args.tol,
            mode=args.mode, threads=threads)
    elif args.command == "verify-kostant":
        ctx = build_group(args.group)
        report = convexity.verify_kostant_real(
            ctx, args.samples, args.seed, args.tol, threads=threads)
    elif args.command == "gradient-check":
        ctx = build_group(args.group)
        report = convexity.gradient_check(ctx, args.configs, args.seed)
    elif args.command == "critical-points":
        ctx = build_group(args.group)
        report = convexity.critical_point_scan(
            ctx, args.runs, args.seed, gap_tol=args.gap_tol, max_iter=args.max_iter)
    elif args.command == "tubes":
        ctx = build_group(args.group)
        report = domains.verify_tube_intersection(
            ctx, args.omega, args.z_count, args.k_count, args.seed, args.tol,
            threads=threads)
    elif args.command == "image":
        ctx = build_group(args.group)
        report = domains.verify_image(
            ctx, args.omega, args.samples, args.seed, args.tol, threads=threads)
    elif args.command == "boundary":
        report = _run_boundary(args)
    elif args.command == "siegel":
        if args.cross_check:
            ctx = build_group(GroupSpec(Family.SYMPLECTIC, args.n))
            report = siegel.cross_check_crown(ctx, args.samples, args.seed)
        else:
            report = siegel.verify_siegel(args.n, args.samples, args.seed)
    elif args.command == "lemma24":
        ctx = build_group(args.group)
        rng = substream(args.seed, NS_AUX)
        x = convexity.sample_regular_direction(
            ctx, OmegaSpec("scale", scale=0.9), rng)
        report = convexity.lemma24_probe(ctx, x, args.samples, args.seed, threads=threads)
    else:  # pragma: no cover - argparse enforces the choice
        raise CrownError(f"unknown command {args.command}")

    return report.exit_code, report.render(args.format), args.out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        code, rendered, out = run(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (CrownError, ValueError) as exc:
        print(f"crown: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)
    return code


if __name__ == "__main__":
    sys.exit(main())
