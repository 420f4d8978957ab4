"""``eitent`` command line: run, scan, optimize, figure."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .errors import ConvergenceFailure, EITError, InvalidParams, SingularSystem
from .params import SystemParams

EXIT_OK, EXIT_INVALID, EXIT_CONVERGENCE, EXIT_IO = 0, 2, 3, 4

UNITS_DOC = """\
eitent units convention
  Rates, detunings and Rabi frequencies are in units of the excited-state
  decay rate: Gamma = 1.
  Position along the medium is zeta = z / L in [0, 1]; alpha is the optical
  density. The input probe is Omega_p(0) = r * Omega_c(0) and
  eps = Gamma * delta / Omega_c(0)^2.
"""


def _add_params(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("physical parameters")
    g.add_argument("--alpha", type=float, default=1000.0, help="optical density (default 1000)")
    g.add_argument("--gamma-p", type=float, default=0.0, help="ground-state decoherence rate")
    g.add_argument("--delta", type=float, default=0.0, help="two-photon detuning delta_p - delta_c")
    g.add_argument("--omega-c", type=float, default=1.0, help="input coupling Rabi frequency")
    g.add_argument("--r", type=float, default=0.1, help="input ratio Omega_p / Omega_c")
    g.add_argument("--delta-p", type=float, default=None, help="probe one-photon detuning (default delta/2)")
    g.add_argument("--delta-c", type=float, default=None, help="coupling one-photon detuning (default -delta/2)")
    n = p.add_argument_group("numerics")
    n.add_argument("--steps", type=int, default=200, help="initial RK4 steps; doubled until converged")
    n.add_argument("--conv-tol", type=float, default=1e-6, help="certification tolerance on V and |Omega_p(1)|")


def _add_jobs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--jobs", type=int, default=1, help="worker processes for independent points")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eitent",
        description="Probe/coupling entanglement (Duan V) after propagation through an EIT medium.",
    )
    parser.add_argument("--version", action="version", version=f"eitent {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="single certified run, JSON record")
    _add_params(run)
    run.add_argument("--out", help="write the JSON here instead of stdout")

    scan = sub.add_parser("scan", help="1-D or 2-D sweep, CSV table")
    _add_params(scan)
    _add_jobs(scan)
    scan.add_argument(
        "--axis", action="append", required=True, metavar="name=start:stop:count[:log]",
        help="sweep axis; give once or twice (first is outermost)",
    )  # fmt: skip
    scan.add_argument("--out", help="write the CSV here instead of stdout")

    opt = sub.add_parser("optimize", help="minimise V over one or two parameters, JSON record")
    _add_params(opt)
    _add_jobs(opt)
    opt.add_argument("--free", required=True, help="comma list from delta,gamma_p,omega_c,r")
    opt.add_argument(
        "--bounds", action="append", default=[], metavar="name=lo:hi", help="search bounds of a free variable"
    )
    opt.add_argument("--grid", type=int, default=32, help="coarse log-grid points per axis")
    opt.add_argument("--rtol", type=float, default=1e-4, help="relative tolerance of the refinement")
    opt.add_argument("--out", help="write the JSON here instead of stdout")

    fig = sub.add_parser("figure", help="reproduce the data behind one figure")
    fig.add_argument("fig_id", help="2a 2b 3a 3b 4a 4b 4c 4d 5a 5b 5c 6")
    _add_jobs(fig)
    fig.add_argument("--out-dir", default=".", help="directory for CSV files and manifest")
    fig.add_argument("--count", type=int, default=None, help="override the number of points per axis")
    fig.add_argument("--alphas", default=None, help="comma list of alphas for figure 4 panels")
    fig.add_argument("--steps", type=int, default=200)
    fig.add_argument("--conv-tol", type=float, default=1e-6)
    return parser


def params_from_args(args: argparse.Namespace) -> SystemParams:
    return SystemParams(
        alpha=args.alpha,
        gamma_p=args.gamma_p,
        delta=args.delta,
        omega_c0=args.omega_c,
        r=args.r,
        delta_p=args.delta_p,
        delta_c=args.delta_c,
        n_steps=args.steps,
        conv_tol=args.conv_tol,
    )


def _reject_detuning_override(args, varied: list[str]) -> None:
    # explicit one-photon detunings cannot follow a varying delta
    if (args.delta_p is not None or args.delta_c is not None) and {"delta", "eps"} & set(varied):
        raise InvalidParams("--delta-p/--delta-c cannot be combined with a varying delta or eps")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if hasattr(x, "item"):
        return x.item()
    raise TypeError(f"cannot serialise {type(x).__name__}")


def cmd_run(args) -> int:
    from .sweep import run_single

    rec = run_single(params_from_args(args))
    _emit(_json(rec.to_dict()), args.out)
    return EXIT_OK


def cmd_scan(args) -> int:
    from .sweep import AxisSpec, csv_text, scan

    axes = [AxisSpec.parse(a) for a in args.axis]
    _reject_detuning_override(args, [a.name for a in axes])
    records = scan(params_from_args(args), axes, jobs=args.jobs)
    _emit(csv_text(records), args.out)
    return EXIT_OK


def _parse_bounds(items: list[str]) -> dict[str, tuple[float, float]]:
    bounds = {}
    for item in items:
        try:
            name, rng = item.split("=", 1)
            lo, hi = (float(x) for x in rng.split(":"))
        except ValueError:
            raise InvalidParams(f"malformed bounds {item!r}; expected name=lo:hi") from None
        bounds[name.strip()] = (lo, hi)
    return bounds


def cmd_optimize(args) -> int:
    from .sweep import optimize

    free = [f.strip() for f in args.free.split(",") if f.strip()]
    _reject_detuning_override(args, free)
    bounds = _parse_bounds(args.bounds)
    if set(bounds) - set(free):
        raise InvalidParams(f"bounds given for non-free variables: {', '.join(sorted(set(bounds) - set(free)))}")
    if args.grid < 3 or args.rtol <= 0:
        raise InvalidParams("--grid must be >= 3 and --rtol > 0")
    res = optimize(params_from_args(args), free, bounds or None, grid=args.grid, rtol=args.rtol, jobs=args.jobs)
    _emit(_json(res.record.to_dict()), args.out)
    return EXIT_OK


def cmd_figure(args) -> int:
    from .figures import reproduce_figure

    alphas = None
    if args.alphas:
        try:
            alphas = tuple(float(a) for a in args.alphas.split(","))
        except ValueError:
            raise InvalidParams(f"malformed --alphas {args.alphas!r}") from None
    if args.count is not None and args.count < 2:
        raise InvalidParams("--count must be >= 2")
    manifest = reproduce_figure(
        args.fig_id, args.out_dir, jobs=args.jobs, count=args.count, alphas=alphas,
        n_steps=args.steps, conv_tol=args.conv_tol,
    )  # fmt: skip
    for name in manifest["files"]:
        print(Path(args.out_dir) / name)
    return EXIT_OK


COMMANDS = {"run": cmd_run, "scan": cmd_scan, "optimize": cmd_optimize, "figure": cmd_figure}


def main(argv: list[str] | None = None) -> int:
    if os.environ.get("EITENT_SEED_DOCS") == "1":
        sys.stdout.write(UNITS_DOC)
        return EXIT_OK
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        return COMMANDS[args.command](args)
    except InvalidParams as exc:
        print(f"eitent: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConvergenceFailure, SingularSystem) as exc:
        print(f"eitent: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except EITError as exc:
        print(f"eitent: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"eitent: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
