"""Command-line front end.

Exit codes: 0 success, 1 numerical or tolerance failure, 2 usage error.
Output files go to --out, else $MLSEP_OUT, else the current directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bounds, figures, registry
from .fode import IVProblem, solve_ivp
from .zeros import NewtonOptions, alpha_grid, sweep

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def out_dir(args) -> Path:
    d = Path(args.out or os.environ.get("MLSEP_OUT") or ".")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % float(v)


def write_csv(path: Path, columns, rows) -> None:
    """Header plus rows, %.17g reals, comma separated, LF endings."""
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return cfg


def _beta_arg(text: str):
    if text == "alpha":
        return "alpha"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"beta must be a real or 'alpha', got {text!r}") from None


# -- commands --------------------------------------------------------------------


def cmd_figure(args) -> int:
    data = figures.FIGURES[args.name]()
    d = out_dir(args)
    write_csv(d / f"{data.name}.csv", data.columns, data.rows)
    (d / f"{data.name}.gp").write_text(data.script, encoding="ascii")
    print(f"wrote {d / (data.name + '.csv')} and {data.name}.gp")
    return EXIT_OK


def cmd_constants(args) -> int:
    rows = figures.constants_table(args.tol_scale)
    print(f"{'quantity':34s} {'reference':>16s} {'computed':>18s} {'|diff|':>10s} {'tol':>8s}  ok")
    for r in rows:
        print(f"{r.name:34s} {r.reference:16.10f} {r.computed:18.12f} {r.diff:10.2e} {r.tol:8.0e}  "
              f"{'yes' if r.ok else 'NO'}")
    return EXIT_OK if all(r.ok for r in rows) else EXIT_FAIL


def cmd_zeros(args) -> int:
    if not 1.0 < args.alpha_min <= args.alpha_max <= 2.0 or args.step <= 0:
        raise UsageError("need 1 < alpha-min <= alpha-max <= 2 and step > 0")
    opts = NewtonOptions(verify_step=args.verify_step)
    recs = sweep(args.beta, alpha_grid(args.alpha_min, args.alpha_max, args.step), opts, args.workers)
    d = out_dir(args)
    write_csv(d / "zeros.csv", ["alpha", "beta", "z_min", "iterations", "converged", "residual"],
              [(r.alpha, r.beta, r.z_min, r.iterations, r.converged, r.residual) for r in recs])
    bad = sum(not r.found for r in recs)
    print(f"{len(recs)} records, {bad} without a zero or not converged -> {d / 'zeros.csv'}")
    return EXIT_OK


def cmd_demo(args) -> int:
    cfg = load_config(args.config)
    name = cfg.get("problem")
    if name not in registry.REGISTRY:
        raise UsageError(f"unknown problem {name!r}; known: {', '.join(sorted(registry.REGISTRY))}")
    rep = registry.evaluate_pair(registry.get(name), int(cfg.get("n_steps", 1024)), int(cfg.get("stride", 16)))
    d = out_dir(args)
    write_csv(d / "demo.csv", ["t", "abs_diff", "gronwall", "lower", "upper"],
              zip(rep.times, rep.diff, rep.gronwall, rep.lower, rep.upper))
    if rep.envelope is not None:
        e = rep.envelope
        write_csv(d / "envelope.csv", ["t", "lower", "upper", "a_lower", "a_upper"],
                  zip(e.times, e.lower, e.upper, e.a_lower, e.a_upper))
    text = rep.verdict()
    (d / "demo.txt").write_text(text, encoding="ascii")
    sys.stdout.write(text)
    ok = rep.sandwich_ok and rep.dominance_ok and (rep.separation.separated or rep.separation.configuration == "identical")
    return EXIT_OK if ok else EXIT_FAIL


def _problem_from_config(cfg) -> IVProblem:
    if "problem" in cfg:
        pair = registry.REGISTRY.get(cfg["problem"])
        if pair is None:
            raise UsageError(f"unknown problem {cfg['problem']!r}")
        p1, p2 = pair.problems()
        which = cfg.get("which", "second")
        if which not in ("first", "second"):
            raise UsageError("which must be 'first' or 'second'")
        return p1 if which == "first" else p2
    try:
        lam = float(cfg["lambda"])
        return IVProblem(float(cfg["alpha"]), lambda t, y: lam * y, float(cfg.get("y0", 0.0)),
                         float(cfg.get("y1", 0.0)), float(cfg["horizon"]), abs(lam))
    except KeyError as exc:
        raise UsageError(f"config lacks {exc}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    p = _problem_from_config(cfg)
    sol = solve_ivp(p, int(cfg.get("n_steps", 1024)))
    d = out_dir(args)
    write_csv(d / "solve.csv", ["t", "y"], zip(sol.times, sol.values))
    print(f"{sol.times.size} points -> {d / 'solve.csv'}")
    return EXIT_OK


def cmd_horizon(args) -> int:
    conds = args.conditions.split(",")
    if any(c not in bounds.CONDITION_BETAS for c in conds):
        raise UsageError(f"conditions must come from {','.join(bounds.CONDITION_BETAS)}")
    rep = bounds.horizon_Tstar(args.alpha, args.L, conds)
    sys.stdout.write(rep.as_text())
    return EXIT_OK


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mlsep", description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=None, help="output directory (default: $MLSEP_OUT or .)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("figure", help="write <name>.csv and <name>.gp")
    p.add_argument("name", choices=sorted(figures.FIGURES))
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("constants", help="recompute the headline constants; exit 1 on any miss")
    p.add_argument("--tol-scale", type=float, default=1.0, help="multiply every tolerance (default 1)")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("zeros", help="sweep the smallest zero over alpha, write zeros.csv")
    p.add_argument("--beta", type=_beta_arg, required=True, help="a real, or 'alpha' for beta = alpha")
    p.add_argument("--alpha-min", type=float, default=1.001, help="default 1.001")
    p.add_argument("--alpha-max", type=float, default=2.0, help="default 2")
    p.add_argument("--step", type=float, default=1e-3, help="default 1e-3")
    p.add_argument("--verify-step", type=float, default=1e-3,
                   help="sign-scan step used to confirm minimality, 0 to skip (default 1e-3)")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("demo", help="solve a registered pair and check the envelopes",
                       description='config: {"problem": <registry key>, "n_steps": 1024, "stride": 16}; '
                                   f"keys: {', '.join(sorted(registry.REGISTRY))}")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("solve", help="solve one problem, write solve.csv",
                       description='config: {"problem": <key>, "which": "first"|"second", "n_steps": 1024} '
                                   'or {"alpha": a, "lambda": l, "y0": 0, "y1": 0, "horizon": T, "n_steps": 1024} '
                                   "for D^a y = l y")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("horizon", help="print T* for D^a y = f with Lipschitz constant L")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--conditions", default="beta_1,beta_alpha,beta_2")
    p.set_defaults(func=cmd_horizon)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"mlsep: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - numerical failure, reported not raised
        print(f"mlsep: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
