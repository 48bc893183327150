"""``qcod`` command-line interface.

Every command is deterministic given ``--seed`` (default 0): Monte Carlo
work draws from streams derived from the seed, independently of the number
of worker threads (capped by the ``QCOD_THREADS`` environment variable).

Exit codes: 0 success, 1 runtime error (e.g. an untestable set),
2 invalid arguments. Errors are reported as one JSON line on stderr.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path


from . import _streams
from .detection import (
    CalibratedTest,
    CoordinateProjection,
    StatKind,
    mc_calibrate,
    optimal_projection,
    run_test,
    split_sample,
    theoretical_test,
)
from .lower_bound import chi_square_divergence, extremal_vector, extremal_precondition, risk_lower_bound
from .power import power_curve
from .qco_sets import Ellipsoid, load_set, make_sobolev
from .report import atomic_write, curve_csv, curve_svg, json_text, read_vector, widths_csv
from .widths import UntestableError, compare_rates, rate_report, width_profile

REPRODUCTION = dict(n=100, sigma=0.25, level=0.05, grid=10, reps=1000, calib_reps=100_000)
REPRODUCTION_ALPHAS = (("alpha05", 0.5), ("alpha1", 1.0))


class UsageError(Exception):
    pass


def _add_set_flags(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_argument_group("constraint set (exactly one)" if required else "constraint set")
    g.add_argument("--sobolev-alpha", type=float, help="Sobolev ellipsoid smoothness (needs --n)")
    g.add_argument("--n", type=int, help="dimension of the Sobolev ellipsoid")
    g.add_argument("--ellipsoid-file", type=Path, help="file of squared semi-axes a_i, one per line")
    g.add_argument("--hyperrectangle-file", type=Path, help="file of half-widths c_i, one per line")


def _set_from_args(args, required: bool = True):
    given = [
        name
        for name, val in (
            ("--sobolev-alpha", args.sobolev_alpha),
            ("--ellipsoid-file", args.ellipsoid_file),
            ("--hyperrectangle-file", args.hyperrectangle_file),
        )
        if val is not None
    ]
    if len(given) > 1:
        raise UsageError(f"conflicting set specifications: {', '.join(given)}")
    if not given:
        if required:
            raise UsageError("a constraint set is required (--sobolev-alpha/--n, --ellipsoid-file or --hyperrectangle-file)")
        return None
    if args.sobolev_alpha is not None:
        if args.n is None:
            raise UsageError("--sobolev-alpha needs --n")
        return make_sobolev(args.sobolev_alpha, args.n)
    if args.ellipsoid_file is not None:
        return load_set(args.ellipsoid_file, "ellipsoid")
    return load_set(args.hyperrectangle_file, "hyperrectangle")


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        atomic_write(out, text)


def cmd_widths(args) -> None:
    prof = width_profile(_set_from_args(args))
    if args.format == "json":
        _emit(json_text({"d": prof.d, "exact": prof.exact}), args.out)
    else:
        _emit(widths_csv(prof.d), args.out)


def cmd_rate(args) -> None:
    K = _set_from_args(args)
    rep = rate_report(K, args.sigma)
    if rep.untestable:
        raise UntestableError(f"untestable: d0 <= sigma (sigma = {args.sigma})")
    _emit(json_text(rep.as_dict()), args.out)


def cmd_compare_rates(args) -> None:
    _emit(json_text(compare_rates(_set_from_args(args), args.sigma)), args.out)


def _build_test(args, projection: CoordinateProjection):
    s2 = 2.0 * args.sigma**2
    if args.method == "theoretical":
        return theoretical_test(projection, s2, args.level, args.stat)
    return mc_calibrate(projection, s2, args.level, args.reps, args.seed, args.stat)


def cmd_calibrate(args) -> None:
    if args.k < 1:
        raise ValueError("--k must be at least 1")
    test = _build_test(args, CoordinateProjection(tuple(range(args.k)), args.k))
    _emit(
        json_text(
            {
                "threshold": test.threshold,
                "provenance": test.provenance,
                "k": args.k,
                "level": test.level,
                "sample_variance": test.sample_variance,
                "statistic": test.kind.value,
            }
        ),
        args.out,
    )


def cmd_test(args) -> None:
    x = read_vector(args.x)
    K = _set_from_args(args, required=False)
    n = x.size
    if K is not None:
        if K.n != n:
            raise ValueError(f"set has n={K.n} but --x has {n} values")
        if args.k is None:
            raise UsageError("--k is required with a constraint set")
        proj = optimal_projection(K, args.k)
    elif args.indices is not None:
        proj = CoordinateProjection(tuple(int(s) for s in args.indices.split(",") if s), n)
    else:
        raise UsageError("give a constraint set with --k, or --indices")
    if isinstance(K, Ellipsoid):
        # projection is expressed in sorted coordinates
        x = K.to_sorted(x)
    if args.y is not None:
        y = read_vector(args.y)
        if y.size != n:
            raise ValueError(f"--x has {n} values but --y has {y.size}")
        if isinstance(K, Ellipsoid):
            y = K.to_sorted(y)
    else:
        x, y = split_sample(x, args.sigma, _streams.derive(args.seed, 0))
    if args.threshold is not None:
        test = CalibratedTest(proj, 2.0 * args.sigma**2, args.level, args.threshold, args.stat, {"method": "given"})
    else:
        test = _build_test(args, proj)
    res = run_test(test, x, y)
    _emit(
        json_text({"statistic": res.statistic, "threshold": test.threshold, "reject": bool(res.reject)}),
        args.out,
    )


def cmd_extremal(args) -> None:
    K = _set_from_args(args)
    pre = extremal_precondition(K, args.k, args.sigma) if 1 <= args.k <= K.n else False
    prior = extremal_vector(K, args.k, args.sigma, args.kappa)
    if prior is None:
        body = {"theta": None, "norm_sq": None, "sup_norm": None, "feasible": False, "precondition_holds": pre}
    else:
        theta = K.to_original(prior.theta) if isinstance(K, Ellipsoid) else prior.theta
        body = {
            "theta": theta,
            "norm_sq": prior.norm_sq,
            "sup_norm": prior.sup_norm,
            "feasible": True,
            "precondition_holds": pre,
            "kappa": prior.kappa,
            "chi_square": chi_square_divergence(prior),
        }
    _emit(json_text(body), args.out)


def cmd_lower_bound(args) -> None:
    r = risk_lower_bound(args.level, args.kappa)
    _emit(json_text({"risk_lower_bound": r, "vacuous": r <= 0, "level": args.level, "kappa": args.kappa}), args.out)


def _svg_title(alpha, n, sigma, level) -> str:
    return f"minimal power, Sobolev alpha={alpha:g}, n={n}, sigma={sigma:g}, level={level:g}"


def cmd_power_curve(args) -> None:
    K = make_sobolev(args.sobolev_alpha, args.n)
    curve = power_curve(K, args.sigma, args.level, args.grid, args.reps, args.calib_reps, args.stat, args.seed)
    atomic_write(args.out, curve_csv(curve))
    if args.svg is not None:
        title = _svg_title(args.sobolev_alpha, args.n, args.sigma, args.level)
        atomic_write(args.svg, curve_svg([curve], title, math.sqrt(K.a[-1])))
    sys.stdout.write(json_text({"out": str(args.out), **curve.config}))


def reproduce_figure2(outdir, seed: int = 0, svg: bool = False, reps=None, calib_reps=None) -> dict:
    """Both minimal-power curves of the Sobolev experiment, written to ``outdir``."""
    cfg = dict(REPRODUCTION)
    if reps is not None:
        cfg["reps"] = reps
    if calib_reps is not None:
        cfg["calib_reps"] = calib_reps
    outdir = Path(outdir)
    summary = {"config": {**cfg, "seed": seed}, "curves": {}}
    for tag, alpha in REPRODUCTION_ALPHAS:
        K = make_sobolev(alpha, cfg["n"])
        curve = power_curve(
            K, cfg["sigma"], cfg["level"], cfg["grid"], cfg["reps"], cfg["calib_reps"], StatKind.T_PLUS, seed
        )
        atomic_write(outdir / f"figure2_{tag}.csv", curve_csv(curve))
        if svg:
            title = _svg_title(alpha, cfg["n"], cfg["sigma"], cfg["level"])
            atomic_write(outdir / f"figure2_{tag}.svg", curve_svg([curve], title, 1.0))
        summary["curves"][tag] = {
            "sobolev_alpha": alpha,
            "testing_index": curve.config["k"],
            "threshold": curve.config["threshold"],
            "power_at_zero": float(curve.powers[0]),
            "power_at_max": float(curve.powers[-1]),
            "stderr_at_zero": float(curve.stderrs[0]),
            "stderr_at_max": float(curve.stderrs[-1]),
        }
    atomic_write(outdir / "figure2_summary.json", json_text(summary))
    return summary


def cmd_reproduce(args) -> None:
    summary = reproduce_figure2(args.outdir, args.seed, args.svg, args.reps, args.calib_reps)
    sys.stdout.write(json_text(summary))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcod",
        description="Minimax signal detection under QCO constraints. "
        "All commands are deterministic given --seed (default 0).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def out_flag(p):
        p.add_argument("--out", type=Path, help="write output here instead of stdout")

    p = sub.add_parser("widths", help="Kolmogorov widths d_0..d_n as CSV (k,d_k)")
    _add_set_flags(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    out_flag(p)
    p.set_defaults(func=cmd_widths)

    for name, func, help_ in (
        ("rate", cmd_rate, "testing/estimation indices and rates as JSON"),
        ("compare-rates", cmd_compare_rates, "testing radius^2 against estimation risk"),
    ):
        p = sub.add_parser(name, help=help_)
        _add_set_flags(p)
        p.add_argument("--sigma", type=float, required=True)
        out_flag(p)
        p.set_defaults(func=func)

    def test_flags(p, need_k=True):
        p.add_argument("--sigma", type=float, required=True, help="noise sd of the single observation")
        p.add_argument("--level", type=float, default=0.05)
        p.add_argument("--reps", type=int, default=100_000, help="null samples for MC calibration")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--stat", choices=[s.value for s in StatKind], default=StatKind.T_PLUS.value)
        p.add_argument("--method", choices=("mc", "theoretical"), default="mc")
        p.add_argument("--k", type=int, required=need_k)

    p = sub.add_parser("calibrate", help="threshold for a rank-k projection test (s^2 = 2 sigma^2)")
    test_flags(p)
    out_flag(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("test", help="run the projection test on data files")
    p.add_argument("--x", type=Path, required=True)
    p.add_argument("--y", type=Path, help="second sample; if omitted --x is split using --sigma and --seed")
    p.add_argument("--indices", help="comma-separated 0-based coordinates (instead of a set)")
    p.add_argument("--threshold", type=float, help="skip calibration and use this threshold")
    test_flags(p, need_k=False)
    _add_set_flags(p, required=False)
    out_flag(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("extremal", help="extremal vector theta for the lower bound")
    _add_set_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--kappa", type=float, default=0.5)
    out_flag(p)
    p.set_defaults(func=cmd_extremal)

    p = sub.add_parser("lower-bound", help="risk lower bound 1 - level - sqrt(exp(kappa^4/2)-1)/2")
    p.add_argument("--kappa", type=float, default=0.5)
    p.add_argument("--level", type=float, default=0.05)
    out_flag(p)
    p.set_defaults(func=cmd_lower_bound)

    p = sub.add_parser("power-curve", help="minimal-power curve on a Sobolev ellipsoid")
    p.add_argument("--sobolev-alpha", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--level", type=float, default=0.05)
    p.add_argument("--grid", type=int, default=10)
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--calib-reps", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stat", choices=[s.value for s in StatKind], default=StatKind.T_PLUS.value)
    p.add_argument("--out", type=Path, required=True, help="CSV output (norm,power,stderr)")
    p.add_argument("--svg", type=Path)
    p.set_defaults(func=cmd_power_curve)

    p = sub.add_parser("reproduce", help="both Sobolev minimal-power curves (alpha = 0.5 and 1)")
    p.add_argument("--outdir", type=Path, default=Path("."))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--svg", action="store_true")
    p.add_argument("--reps", type=int)
    p.add_argument("--calib-reps", type=int)
    p.set_defaults(func=cmd_reproduce)
    return parser


def _fail(code: int, kind: str, msg: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": msg}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except UntestableError as exc:
        return _fail(1, "untestable", str(exc))
    except (UsageError, ValueError, OSError) as exc:
        return _fail(2, "invalid-argument", str(exc))
    except Exception as exc:  # noqa: BLE001
        return _fail(1, "runtime", f"{type(exc).__name__}: {exc}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
