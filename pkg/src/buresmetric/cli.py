"""Command-line front end: ``buresmetric {metric,curvature,distance,prior,figure,verify}``."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import geometry as geo
from .bures import bures_distance, bures_distance_commuting, metric_at
from .ensemble import EnsembleSpec, full_spectrum
from .errors import BuresError
from .families import family_by_name
from .figures import figure_data, write_csv
from .verify import CRITERIA, run_checks

FAMILIES = ("real", "complex", "real-product", "complex-product", "ensemble")
GRID_RANGE = (2, 4096)
DENSE_CHECK_MAX_N = 5


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive(text: str) -> float:
    val = float(text)
    if not val > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return val


def _grid(text: str) -> int:
    val = int(text)
    if not GRID_RANGE[0] <= val <= GRID_RANGE[1]:
        raise argparse.ArgumentTypeError(f"grid must lie in [{GRID_RANGE[0]}, {GRID_RANGE[1]}], got {val}")
    return val


def _size(text: str) -> int:
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError(f"n must be at least 1, got {val}")
    return val


def _criteria(text: str) -> list[int]:
    nums = sorted({int(v) for v in text.split(",") if v.strip()})
    bad = [k for k in nums if k not in CRITERIA]
    if bad or not nums:
        raise argparse.ArgumentTypeError(f"criteria are numbered {min(CRITERIA)}-{max(CRITERIA)}, got {text!r}")
    return nums


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _field(family: str, n: int) -> geo.MetricField:
    if family == "ensemble":
        return geo.ensemble_field(n)
    return geo.family_field(family_by_name(family, n), diagonal=family.startswith("complex"))


def _expect_coords(at, count: int, family: str) -> None:
    if at is None or len(at) != count:
        raise SystemExit(f"error: --at needs {count} value(s) for family {family}")


def cmd_metric(args) -> int:
    if args.family == "ensemble":
        _expect_coords(args.at, 1, args.family)
        print(_fmt(geo.ensemble_g_bb(args.n, args.at[0])))
        return 0
    fam = family_by_name(args.family, args.n)
    _expect_coords(args.at, fam.n_params, args.family)
    for row in metric_at(fam, args.at):
        print(",".join(_fmt(v) for v in row))
    return 0


def cmd_curvature(args) -> int:
    if args.family == "ensemble":
        raise SystemExit("error: a one-parameter metric has no intrinsic curvature")
    field = _field(args.family, args.n)
    _expect_coords(args.at, field.dim, args.family)
    if field.dim == 2:
        print(f"K = {_fmt(geo.gaussian_curvature_2d(field, args.at))}")
    else:
        print(f"R = {_fmt(geo.scalar_curvature_diag3(field, args.at))}")
    return 0


def cmd_distance(args) -> int:
    s1, s2 = EnsembleSpec(args.n, args.beta1), EnsembleSpec(args.n, args.beta2)
    print(_fmt(bures_distance_commuting(s1, s2)))
    if args.dense_check:
        if args.n > DENSE_CHECK_MAX_N:
            raise SystemExit(f"error: --dense-check supports n <= {DENSE_CHECK_MAX_N}, got {args.n}")
        rho1, rho2 = (np.diag(full_spectrum(s)) for s in (s1, s2))
        print(f"dense: {_fmt(bures_distance(rho1, rho2))}")
    return 0


def cmd_prior(args) -> int:
    field = _field(args.family, args.n)
    if args.family == "ensemble":
        domain = geo.HALF_LINE
    else:
        domain = geo.DISK if field.dim == 2 else geo.BALL
    prior = geo.normalize_prior(field, domain)
    if args.normalizer_only:
        print(_fmt(prior.normalization))
        return 0
    print(f"normalizer = {_fmt(prior.normalization)}")
    if args.at is not None:
        _expect_coords(args.at, field.dim, args.family)
        print(f"density = {_fmt(prior(args.at))}")
    return 0


def cmd_figure(args) -> int:
    header, rows = figure_data(args.which, args.grid)
    path = write_csv(args.out, header, rows)
    print(f"wrote {len(rows)} rows to {path}")
    return 0


def cmd_verify(args) -> int:
    results = run_checks(tol_scale=args.tol_scale, skip_large=args.skip_large, criteria=args.only, report=print)
    failed = [r for r in results if not (r.passed or r.skipped)]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="buresmetric", description="Bures metrics, distances and curvatures.")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_family(p, at_required):
        p.add_argument("--family", choices=FAMILIES, required=True)
        p.add_argument("--n", type=_size, default=1, help="number of tensor factors / ensemble size")
        p.add_argument("--at", type=_floats, required=at_required, help="chart point, e.g. 0.5,1.2")

    p = sub.add_parser("metric", help="metric tensor at a point")
    with_family(p, True)
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("curvature", help="Gaussian (2 params) or scalar (3 params) curvature")
    with_family(p, True)
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("distance", help="Bures distance between zeta_n(beta1) and zeta_n(beta2)")
    p.add_argument("--n", type=_size, required=True)
    p.add_argument("--beta1", type=_positive, required=True)
    p.add_argument("--beta2", type=_positive, required=True)
    p.add_argument("--dense-check", action="store_true", help="also compute with dense matrices (n <= 5)")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("prior", help="normalized volume element")
    with_family(p, False)
    p.add_argument("--normalizer-only", action="store_true")
    p.set_defaults(func=cmd_prior)

    p = sub.add_parser("figure", help="write figure data as CSV")
    p.add_argument("--which", type=int, choices=(1, 2, 3, 4), required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--grid", type=_grid, default=None)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--tol-scale", type=_positive, default=1.0)
    p.add_argument("--skip-large", action="store_true", help="skip the 64- and 128-dimensional metric checks")
    p.add_argument("--only", type=_criteria, default=None, help="comma-separated criterion numbers, e.g. 2,7")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BuresError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
