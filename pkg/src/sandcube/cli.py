"""Command-line front end: stabilize runs, verification reports, raster output.

Exit codes are a stable contract:
    0  success (for `verify`: no proven-statement check failed)
    2  invalid flags, unknown check name, or bad slice spec
    3  step budget exhausted
    4  I/O failure
"""

import argparse
import sys

import numpy as np

from . import engine_ref, engine_sym
from .checkpoint import load_checkpoint, save_checkpoint
from .engine_sym import SymEngine, stabilize_sym
from .errors import (
    BudgetExhaustedError,
    CorruptCheckpointError,
    OutOfDomainError,
    PaletteOverflowError,
)
from .lattice import CubeSpec, indexer_for
from .render import cross_dim_normalization, slice_image, unfold, write_raster
from . import verify as verify_mod
from .report import FAIL

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_IO = 4


def _build_parser():
    p = argparse.ArgumentParser(
        prog="sandcube",
        description="Parallel-toppling sandpiles on hypercubes via the sorted fundamental domain.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    st = sub.add_parser("stabilize", help="run parallel toppling to a fixed point")
    st.add_argument("--dim", type=int, required=True)
    st.add_argument("--side", type=int, required=True)
    st.add_argument("--background", type=int, default=0)
    st.add_argument("--engine", choices=("sym", "full"), default="sym")
    st.add_argument("--steps", type=int, default=None, help="step budget (default 64*N^2*d)")
    st.add_argument("--checkpoint-every", type=int, default=0, metavar="N")
    st.add_argument("--resume", default=None, metavar="PATH")
    st.add_argument("--out", default=None, metavar="PATH")

    ve = sub.add_parser("verify", help="run checks and print one report line each")
    ve.add_argument("--check", required=True)
    ve.add_argument("--dim", type=int, required=True)
    ve.add_argument("--side", type=int, required=True)
    ve.add_argument("--background", type=int, default=0)

    re = sub.add_parser("render", help="emit P6 slice images")
    re.add_argument("--dim", type=int, required=True)
    re.add_argument("--side", type=int, required=True)
    re.add_argument("--background", type=int, default=0)
    re.add_argument("--time", default="inf", help="step count, or 'inf' for the fixed point")
    re.add_argument("--slice", nargs="*", default=None, metavar="OFFSETS",
                    help="comma-separated offsets for coordinates 3..d; one image per token")
    re.add_argument("--out", required=True, metavar="PATH")
    re.add_argument("--normalize-to-dim", type=int, default=None, metavar="D_REF")
    return p


def _cmd_stabilize(args) -> int:
    spec = CubeSpec(args.dim, args.side)
    k = args.background

    if args.engine == "full":
        s0 = engine_ref.constant_sandpile(spec, 2 * spec.d + k)
        traj, _, stabilized = engine_ref.stabilize_full(s0, spec, t_max=args.steps)
        pts = indexer_for(spec).points()
        v = np.array([traj[-1][tuple(x - spec.lo)] for x in pts], dtype=np.int64)
        t = len(traj) - 1
    else:
        v0, t0 = None, 0
        if args.resume:
            try:
                ck = load_checkpoint(args.resume)
            except (OSError, CorruptCheckpointError) as e:
                print(f"error: {e}", file=sys.stderr)
                return EXIT_IO
            if ck.spec != spec or ck.background != k:
                print(
                    f"error: checkpoint is for (d={ck.spec.d}, N={ck.spec.N}, "
                    f"k={ck.background}), flags say (d={spec.d}, N={spec.N}, k={k})",
                    file=sys.stderr,
                )
                return EXIT_USAGE
            v0, t0 = ck.v, ck.t

        sink = None
        if args.checkpoint_every > 0 and args.out:
            every = args.checkpoint_every

            def sink(t, v):
                if t % every == 0:
                    save_checkpoint(args.out, spec, k, t, v)

        traj = stabilize_sym(
            spec, k, t_max=args.steps, snapshot_stride=0,
            checkpoint_sink=sink, v0=v0, t0=t0,
        )
        v, t, stabilized = traj.final, traj.t_end, traj.stabilized_at is not None

    if args.out:
        try:
            save_checkpoint(args.out, spec, k, t, v)
        except OSError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_IO

    if stabilized:
        print(f"STABILIZED t={t} topples={int(v.sum())}")
        return EXIT_OK
    print(f"BUDGET t={t}")
    return EXIT_BUDGET


def _applicable_checks(d, N, k):
    """(name, callable) pairs valid for the given parameters."""
    out = []
    if d >= 2:
        out.append(("dimensional-reduction",
                    lambda: verify_mod.check_dimensional_reduction(d, N, k)))
    if d >= 2 and k == 0:
        out.append(("sandpile-reduction",
                    lambda: verify_mod.check_sandpile_reduction(d, N)))
    if k == 0 and N % 2 == 0:
        out.append(("self-similarity", lambda: verify_mod.check_self_similarity(d, N)))
        out.append(("regularity", lambda: verify_mod.check_regularity(d, N)))
    traj = lambda: verify_mod._run(d, N, k)  # noqa: E731
    out.append(("axis-monotonicity", lambda: verify_mod.check_axis_monotonicity(traj())))
    out.append(("derivative-bound", lambda: verify_mod.check_derivative_bound(traj())))
    out.append(("topple-limit", lambda: verify_mod.check_topple_limit(traj())))
    out.append(("least-action", lambda: verify_mod.check_least_action(traj())))
    if d == 2 and k == 0:
        out.append(("second-differences",
                    lambda: verify_mod.check_second_differences(N)))
    out.append(("table1-probe", lambda: verify_mod.probe_table1([d], [k], N)))
    return out


def _cmd_verify(args) -> int:
    d, N, k = args.dim, args.side, args.background
    table = dict(_applicable_checks(d, N, k))
    if args.check == "all":
        selected = list(table.values())
    elif args.check in table:
        selected = [table[args.check]]
    elif args.check in verify_mod.CHECKS:
        print(
            f"error: check '{args.check}' does not apply to "
            f"(d={d}, N={N}, k={k})",
            file=sys.stderr,
        )
        return EXIT_USAGE
    else:
        print(f"error: unknown check '{args.check}'", file=sys.stderr)
        return EXIT_USAGE

    code = EXIT_OK
    for fn in selected:
        reports = fn()
        if not isinstance(reports, list):
            reports = [reports]
        for rep in reports:
            print(rep.line())
            if rep.verdict == FAIL:
                code = 1
    return code


def _cmd_render(args) -> int:
    spec = CubeSpec(args.dim, args.side)
    k = args.background

    if args.time == "inf":
        traj = stabilize_sym(spec, k, snapshot_stride=0)
        if traj.stabilized_at is None:
            print(f"BUDGET t={traj.t_end}", file=sys.stderr)
            return EXIT_BUDGET
        t_label = "inf"
    else:
        try:
            t = int(args.time)
        except ValueError:
            print(f"error: bad --time value '{args.time}'", file=sys.stderr)
            return EXIT_USAGE
        traj = stabilize_sym(spec, k, t_max=t, snapshot_stride=0)
        t_label = str(t)

    eng = SymEngine(spec, k)
    cube = unfold(eng.sandpile(traj.final), spec)

    tokens = args.slice if args.slice else ([""] if spec.d == 2 else None)
    if tokens is None:
        print(f"error: --slice required for d={spec.d}", file=sys.stderr)
        return EXIT_USAGE

    norm = 0
    if args.normalize_to_dim is not None:
        norm = cross_dim_normalization(spec.d, args.normalize_to_dim)

    stem = args.out
    if stem.endswith(".ppm"):
        stem = stem[:-4]
    for token in tokens:
        try:
            offsets = tuple(int(s) for s in token.split(",")) if token else ()
        except ValueError:
            print(f"error: bad slice spec '{token}'", file=sys.stderr)
            return EXIT_USAGE
        try:
            img = slice_image(cube, spec, offsets)
        except OutOfDomainError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
        suffix = "-o" + "_".join(str(o) for o in offsets) if offsets else ""
        path = f"{stem}-t{t_label}{suffix}.ppm"
        try:
            write_raster(img, path, normalization=norm)
        except PaletteOverflowError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
        except OSError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "stabilize":
            return _cmd_stabilize(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_render(args)
    except BudgetExhaustedError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
