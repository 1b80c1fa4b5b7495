"""Command-line front end: reproducible runs over the core modules.

Every subcommand emits one JSON document (stdout, or --out FILE), built
from the shared artifact layouts so that repeated runs with identical
inputs produce identical bytes.  Domain failures exit 1 with a
machine-readable error document on stderr; usage failures exit 2.  An
optional --manifest FILE records the command line, input hashes, module
versions, tolerances, and produced outputs for audit replay.
"""

from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, artifacts, corpus
from . import curvlab as cv
from . import functionals as fn
from . import intersect as ix
from . import solver, toric
from .errors import ClassMismatch, KahlerLabError
from .radial import Grid


def _parse_floats(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _parse_labels(text: str) -> tuple:
    return tuple(s.strip() for s in text.split(",") if s.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kahlerlab",
        description="exact intersection theory, toric delta estimators, "
        "radial energy functionals, and the twisted Kahler-Einstein bench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write the JSON document here instead of stdout")
        p.add_argument("--manifest", help="write a run manifest to this path")
        p.add_argument(
            "--jobs",
            type=int,
            default=1,
            help="worker threads where the subcommand supports them",
        )

    p = sub.add_parser("intersect", help="exact pairings on an intersection datum")
    p.add_argument("--variety", required=True, help="corpus name or JSON path")
    p.add_argument(
        "--pairing",
        type=_parse_labels,
        help="comma-separated basis labels to pair, one per degree",
    )
    common(p)
    p.set_defaults(handler=cmd_intersect)

    p = sub.add_parser("toric", help="intersection data from a surface fan")
    p.add_argument("--fan", required=True, help="corpus name or fan JSON path")
    p.add_argument(
        "--emit-intersection",
        action="store_true",
        help="emit the full intersection datum instead of the summary",
    )
    common(p)
    p.set_defaults(handler=cmd_toric)

    p = sub.add_parser("delta", help="delta estimator on the anticanonical polytope")
    p.add_argument("--fan", required=True, help="corpus name or fan JSON path")
    p.add_argument("--k", type=int, required=True, help="basis-divisor level")
    common(p)
    p.set_defaults(handler=cmd_delta)

    p = sub.add_parser("energy", help="energy functionals of a profile")
    p.add_argument("--profile", required=True, help="CSV with header t,phi")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--nodes", type=int, help="require this node count")
    p.add_argument("--T", type=float, help="require this chart half-width")
    common(p)
    p.set_defaults(handler=cmd_energy)

    p = sub.add_parser("solve-tke", help="twisted Kahler-Einstein continuation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument(
        "--eps-grid",
        type=_parse_floats,
        default=solver.DEFAULT_EPS_GRID,
        help="comma-separated, strictly decreasing",
    )
    p.add_argument("--theta", help="unit twist potential CSV; default canonical")
    p.add_argument("--tol", type=float, default=1.0e-8)
    p.add_argument("--max-iter", type=int, default=60)
    p.add_argument(
        "--no-continuation",
        action="store_true",
        help="solve each eps from the cold seed (required for --jobs > 1)",
    )
    p.add_argument("--out", required=True, help="run document path; profiles go beside it")
    p.add_argument("--manifest", help="write a run manifest to this path")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(handler=cmd_solve_tke)

    p = sub.add_parser("curvlab", help="curvature frames and bundle tests")
    p.add_argument("--model", required=True, help="model specification JSON path")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--frame", action="store_true", help="curvature frame at --point")
    mode.add_argument(
        "--chen-ogiue", action="store_true", help="identity check against --variety"
    )
    mode.add_argument("--hym", action="store_true", help="extension mean-curvature test")
    p.add_argument("--point", type=_parse_floats, help="chart coordinates, comma-separated")
    p.add_argument("--variety", help="corpus name or JSON path (with --chen-ogiue)")
    p.add_argument("--labels", type=_parse_labels, help="polarization labels per factor")
    p.add_argument("--a", default="canonical", help="extension weight, or 'canonical'")
    common(p)
    p.set_defaults(handler=cmd_curvlab)

    p = sub.add_parser("report", help="nu, Miyaoka-Yau quantity, and limit bundle")
    p.add_argument("--variety", required=True, help="corpus name or JSON path")
    common(p)
    p.set_defaults(handler=cmd_report)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(handler=None)

    return parser


# -- subcommands --------------------------------------------------------------


def cmd_intersect(args):
    data = corpus.load_intersection(args.variety)
    doc = artifacts.intersect_doc(data, args.variety, pairing=args.pairing)
    return doc, [corpus.resolve(args.variety)], {}, []


def cmd_toric(args):
    fan = corpus.load_fan(args.fan)
    data = toric.build_intersection_data(fan)
    if args.emit_intersection:
        doc = ix.data_to_dict(data)
    else:
        doc = artifacts.toric_summary_doc(fan, data)
    return doc, [corpus.resolve(args.fan)], {}, []


def cmd_delta(args):
    fan = corpus.load_fan(args.fan)
    poly = toric.anticanonical_polytope(fan)
    doc = toric.delta_report_dict(poly, args.k)
    return doc, [corpus.resolve(args.fan)], {}, []


def cmd_energy(args):
    profile = fn.profile_from_csv(args.profile, args.n, args.eps)
    if args.nodes is not None and profile.grid.nodes != args.nodes:
        raise ClassMismatch(
            "profile has %d nodes, --nodes demands %d" % (profile.grid.nodes, args.nodes)
        )
    if args.T is not None and abs(profile.grid.T - args.T) > 1.0e-12:
        raise ClassMismatch(
            "profile chart half-width %g, --T demands %g" % (profile.grid.T, args.T)
        )
    doc = fn.report_to_dict(fn.energy_report(profile))
    return doc, [Path(args.profile)], {"volume_rtol": 1.0e-8}, []


def _theta_builder_from_csv(path, grid: Grid):
    shape = fn.profile_from_csv(path, 1, 0.0)
    if (shape.grid.nodes, shape.grid.T) != (grid.nodes, grid.T):
        raise ClassMismatch(
            "twist grid %s does not match the solve grid %s" % (shape.grid, grid)
        )
    return solver.potential_twist_builder(grid, shape.phi)


def cmd_solve_tke(args):
    if args.jobs > 1 and not args.no_continuation:
        raise UsageError("--jobs > 1 requires --no-continuation")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    if not args.eps_grid or any(
        b >= a for a, b in zip(args.eps_grid, args.eps_grid[1:])
    ):
        raise UsageError("--eps-grid must be nonempty and strictly decreasing")
    grid = Grid()
    inputs = []
    if args.theta:
        theta_builder = _theta_builder_from_csv(args.theta, grid)
        theta_spec = str(args.theta)
        inputs.append(Path(args.theta))
    else:
        theta_builder = solver.canonical_twist
        theta_spec = "canonical"

    def solve_one(eps):
        return solver.continuation_solve(
            args.n,
            (eps,),
            theta_builder=theta_builder,
            grid=grid,
            newton_tol=args.tol,
            max_iter=args.max_iter,
        )[0]

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(solve_one, args.eps_grid))
    else:
        results = solver.continuation_solve(
            args.n,
            args.eps_grid,
            theta_builder=theta_builder,
            grid=grid,
            newton_tol=args.tol,
            max_iter=args.max_iter,
            seed_continuation=not args.no_continuation,
        )

    out = Path(args.out)
    names, outputs = [], []
    for eps, res in zip(args.eps_grid, results):
        name = "%s.eps-%s.csv" % (out.stem, repr(float(eps)))
        fn.profile_to_csv(res.profile, out.parent / name)
        names.append(name)
        outputs.append(out.parent / name)
    config = solver.SolveConfig(
        n=args.n,
        eps=args.eps_grid[0],
        theta=theta_builder(grid, args.eps_grid[0]),
        newton_tol=args.tol,
        max_iter=args.max_iter,
        grid=grid,
    )
    doc = artifacts.tke_run_doc(config, args.eps_grid, results, theta_spec, names)
    return doc, inputs, {"tol": args.tol}, outputs


def cmd_curvlab(args):
    model_path = Path(args.model)
    with open(model_path, "r", encoding="utf-8") as fh:
        model_doc = json.load(fh)
    inputs = [model_path]

    def loader(path, n, eps):
        p = Path(path)
        if not p.is_absolute():
            p = model_path.parent / p
        inputs.append(p)
        return fn.profile_from_csv(p, n, eps)

    model = cv.model_from_dict(model_doc, profile_loader=loader)
    if args.frame:
        if args.point is None:
            raise UsageError("--frame requires --point")
        doc = cv.frame_to_dict(cv.curvature_tensors(model, args.point))
        return doc, inputs, {}, []
    if args.chen_ogiue:
        if args.variety is None:
            raise UsageError("--chen-ogiue requires --variety")
        data = corpus.load_intersection(args.variety)
        inputs.append(corpus.resolve(args.variety))
        rep = cv.chen_ogiue_check(model, data, labels=args.labels)
        return artifacts.chen_ogiue_doc(rep), inputs, {"identity_rtol": 1.0e-4}, []
    a = cv.HYM_CANONICAL if args.a == "canonical" else float(args.a)
    rep = cv.hym_residual(model, a)
    return artifacts.hym_doc(rep), inputs, {}, []


def cmd_report(args):
    data = corpus.load_intersection(args.variety)
    doc = artifacts.variety_report_doc(data, args.variety)
    return doc, [corpus.resolve(args.variety)], {}, []


class UsageError(Exception):
    """Flag combinations argparse cannot express; exits 2 like argparse."""


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = list(sys.argv[1:] if argv is None else argv)

    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    start = time.perf_counter()
    try:
        doc, inputs, tolerances, outputs = args.handler(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits 2
    except (KahlerLabError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(json.dumps(artifacts.error_doc(exc)) + "\n")
        return 1

    text = json.dumps(doc, indent=2) + "\n"
    outputs = list(outputs)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        outputs.append(Path(args.out))
    else:
        sys.stdout.write(text)

    if args.manifest:
        manifest = artifacts.manifest_doc(
            command=command,
            inputs=inputs,
            versions={
                "kahlerlab": __version__,
                "numpy": np.__version__,
                "python": platform.python_version(),
            },
            tolerances=tolerances,
            outputs=outputs,
            wall_clock=time.perf_counter() - start,
        )
        Path(args.manifest).write_text(
            json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
