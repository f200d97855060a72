"""Command-line entry point.

Exit codes: 0 all assertions pass, 2 assertion failure, 3 configuration
error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from ..bodies import BodyParseError, NonConvergenceError, load_body
from ..metrics import SamplingPlan, delta_j, hausdorff, intrinsic_volume
from .config import ConfigError, ExperimentConfig
from .runners import (
    AssertionFailure,
    run_fibers,
    run_lemma,
    run_thm1,
    run_thm2,
    run_thm3,
    run_validation,
)
from .tables import write_csv, write_svg

EXIT_OK = 0
EXIT_ASSERTION = 2
EXIT_CONFIG = 3
EXIT_IO = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse's default exit(2) collides with code 2
        raise ConfigError(message)


def _build_parser() -> _Parser:
    top = _Parser(prog="projmetrics",
                  description="Projection-averaged metrics on convex bodies")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def sampling_flags(p):
        p.add_argument("--subspaces", type=int, default=2000)
        p.add_argument("--points", type=int, default=2000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--mode", choices=["auto", "mc", "exact"], default="auto")

    p = sub.add_parser("metric", help="distance between two bodies (or body vs empty)")
    p.add_argument("--body-a", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--body-b")
    group.add_argument("--empty", action="store_true")
    p.add_argument("-d", type=int, required=True)
    p.add_argument("-j", type=int, required=True)
    sampling_flags(p)

    p = sub.add_parser("intrinsic", help="intrinsic volume of a body")
    p.add_argument("--body", required=True)
    p.add_argument("-j", type=int, required=True)
    sampling_flags(p)

    p = sub.add_parser("hausdorff", help="Hausdorff distance between two bodies")
    p.add_argument("--body-a", required=True)
    p.add_argument("--body-b", required=True)

    def runner_flags(p, svg=True):
        p.add_argument("-d", type=int, required=True)
        p.add_argument("-j", type=int, required=True)
        p.add_argument("--steps", type=int, default=6)
        p.add_argument("--l0", type=float, default=2.0)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True)
        if svg:
            p.add_argument("--svg")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--subspaces", type=int, default=2000)
        p.add_argument("--points", type=int, default=2000)
        p.add_argument("--mode", choices=["auto", "mc", "exact"], default="auto")

    runner_flags(sub.add_parser("thm1", help="drift experiment"))
    runner_flags(sub.add_parser("thm2", help="dyadic-Cauchy experiment"))
    p = sub.add_parser("thm3", help="empty-set floor experiment")
    runner_flags(p)
    p.add_argument("--a0", default="auto")

    p = sub.add_parser("lemma", help="good-subspace statistics")
    p.add_argument("-d", type=int, required=True)
    p.add_argument("-j", type=int, required=True)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("validate", help="cross-validation checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("fibers", help="fiber-difference profile over a 2-plane")
    p.add_argument("--body-a", required=True)
    p.add_argument("--body-b", required=True)
    p.add_argument("--plane", default="e1e2")
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--out", required=True)

    return top


def _mode(name: str) -> str:
    return "monte_carlo" if name == "mc" else name


def _check_dims(d: int, j: int) -> None:
    if not 1 <= j <= d <= 8:
        raise ConfigError(f"need 1 <= j <= d <= 8, got (d={d}, j={j})")


def _load(path):
    try:
        return load_body(path)
    except (BodyParseError, OSError) as exc:
        raise ConfigError(str(exc)) from exc


def _dispatch(args) -> int:
    if args.command == "metric":
        _check_dims(args.d, args.j)
        a = _load(args.body_a)
        b = None if args.empty else _load(args.body_b)
        if a.ambient_dim != args.d or (b is not None and b.ambient_dim != args.d):
            raise ConfigError("body dimension does not match -d")
        plan = SamplingPlan(args.subspaces, args.points, args.seed, _mode(args.mode))
        est = delta_j(a, b, args.j, plan)
        print(f"delta_{args.j} = {est.value:.17g} std_error {est.std_error:.17g} "
              f"n_subspaces {est.n_subspaces} exact {str(est.exact).lower()}")
        return EXIT_OK

    if args.command == "intrinsic":
        body = _load(args.body)
        _check_dims(body.ambient_dim, args.j)
        plan = SamplingPlan(args.subspaces, args.points, args.seed, _mode(args.mode))
        est = intrinsic_volume(body, args.j, plan)
        print(f"V_{args.j} = {est.value:.17g} std_error {est.std_error:.17g} "
              f"n_subspaces {est.n_subspaces} exact {str(est.exact).lower()}")
        return EXIT_OK

    if args.command == "hausdorff":
        a, b = _load(args.body_a), _load(args.body_b)
        print(f"d_H = {hausdorff(a, b):.17g}")
        return EXIT_OK

    if args.command in ("thm1", "thm2", "thm3"):
        cfg = ExperimentConfig(d=args.d, j=args.j, seed=args.seed,
                               n_subspaces=args.subspaces, n_points=args.points,
                               steps=args.steps, l0=args.l0, workers=args.workers,
                               out_csv=args.out, out_svg=args.svg, mode=_mode(args.mode))
        if args.command == "thm1":
            table = run_thm1(cfg)
        elif args.command == "thm2":
            table = run_thm2(cfg)
        else:
            a0 = None if args.a0 == "auto" else float(args.a0)
            table = run_thm3(cfg, a0=a0)
        write_csv(table, cfg.out_csv)
        if cfg.out_svg:
            x_col = "L_i" if args.command == "thm1" else "m"
            y_cols = (["delta_hat", "claimed_bound"] if args.command == "thm1"
                      else ["step_delta_hat", "claimed_step"] if args.command == "thm2"
                      else ["delta_to_empty_hat", "claimed_floor"])
            write_svg(table, x_col, y_cols, cfg.out_svg, log_log=args.command == "thm1")
        return EXIT_OK

    if args.command == "lemma":
        cfg = ExperimentConfig(d=args.d, j=args.j, seed=args.seed,
                               n_subspaces=args.samples, n_points=1)
        write_csv(run_lemma(cfg), args.out)
        return EXIT_OK

    if args.command == "validate":
        table = run_validation(seed=args.seed)
        write_csv(table, args.out)
        passed_col = table.column("passed")
        failed = [table.rows[i][1] for i, v in enumerate(passed_col) if v == "false"]
        if failed:
            raise AssertionFailure("validation checks failed: " + ", ".join(failed))
        return EXIT_OK

    if args.command == "fibers":
        a, b = _load(args.body_a), _load(args.body_b)
        table = run_fibers(a, b, args.plane, args.grid)
        write_csv(table, args.out)
        return EXIT_OK

    raise ConfigError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return _dispatch(args)
    except ValueError as exc:  # ConfigError, parse errors, domain errors
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AssertionFailure as exc:
        print(f"assertion failure: {exc}", file=sys.stderr)
        return EXIT_ASSERTION
    except NonConvergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_ASSERTION
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
