"""Command-line front end.

Exit codes: 0 on success, 1 when a check command returns a negative
verdict (or a requested conversion is impossible), 2 on bad input.
Bloch vectors are comma-separated; pass negative leading components with
``=`` (``--r=-0.8,0,-0.6``) so they are not mistaken for options.
"""

import argparse
import json
import sys

import numpy as np

from .bloch import as_bloch, bloch_of, density
from .channel import (
    DEFAULT_TOL,
    apply,
    choi,
    choi_distance,
    classify_channel,
    classify_operator,
    column_counts,
    dumps_channel,
    io_kraus_bound,
    is_trace_preserving,
    kraus_rank,
    load_channel,
    matrix_to_json,
    permutation_lower_bound_channel,
    save_channel,
    sio_kraus_bound,
)
from .conversion import (
    REGION_HEADER,
    InfeasibleConversion,
    boundary_channel,
    construct_channel,
    region_csv,
    violations,
    write_rows,
)
from .gibbs import GIBBS_HEADER, gibbs_feasible, gibbs_region_csv, s_perp_max, sz_range
from .oracle import SamplerConfig, brute_force_feasible
from .reduction import reduce_by_shape, reduce_qubit_io, reduce_qubit_sio


class InputError(ValueError):
    pass


def _bloch_arg(text):
    try:
        return as_bloch(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _emit(args, payload, text):
    if args.json:
        print(json.dumps(payload))
    else:
        print(text)


def _load(args):
    try:
        return load_channel(args.file)
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read channel from {args.file}: {exc}") from None


def _write_channel(args, channel):
    """Save to ``--out`` when given, otherwise print the JSON."""
    if args.out:
        save_channel(channel, args.out)
    else:
        print(dumps_channel(channel))


def _write_csv(args, header, rows):
    if args.out:
        write_rows(args.out, header, rows)
    if args.json:
        print(json.dumps({"header": list(header), "rows": [list(map(float, r)) for r in rows]}))
    elif not args.out:
        write_rows(sys.stdout, header, rows)


# -- commands ---------------------------------------------------------------

def cmd_classify(args):
    ch = _load(args)
    if not is_trace_preserving(ch, args.tol):
        raise InputError("channel is not trace preserving")
    cls = classify_channel(ch, args.tol)
    ops = [classify_operator(k, args.tol).name for k in ch.kraus]
    _emit(args, {"dim": ch.dim, "class": cls.name, "operators": ops},
          f"dim {ch.dim}, {len(ch)} operators\nclass: {cls.name}\noperators: {', '.join(ops)}")
    return 0


def cmd_choi(args):
    m = choi(_load(args))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(matrix_to_json(m), fh)
    if args.json:
        print(json.dumps(matrix_to_json(m)))
    elif not args.out:
        with np.printoptions(precision=6, suppress=True, linewidth=120):
            print(m)
    return 0


def cmd_rank(args):
    ch = _load(args)
    rank = kraus_rank(ch)
    _emit(args, {"kraus_rank": rank, "operators": len(ch)}, f"kraus rank: {rank}")
    return 0


def cmd_reduce(args):
    ch = _load(args)
    if ch.dim == 2:
        out = (reduce_qubit_io if args.mode == "io" else reduce_qubit_sio)(ch, args.tol)
    else:
        out = reduce_by_shape(ch, args.mode, args.tol)
    dist = choi_distance(ch, out)
    if args.out:
        save_channel(out, args.out)
    if args.json:
        print(json.dumps({
            "input_operators": len(ch),
            "output_operators": len(out),
            "column_counts": column_counts(out, args.tol),
            "choi_distance": dist,
            "channel": json.loads(dumps_channel(out)),
        }))
    elif args.out:
        print(f"reduced {len(ch)} -> {len(out)} operators (choi distance {dist:.3g})")
    else:
        print(dumps_channel(out))
    return 0


def cmd_convert_check(args):
    bad = violations(args.r, args.s)
    payload = {"feasible": not bad, "violated": bad}
    lines = ["feasible" if not bad else "infeasible: violates " + "; ".join(bad)]
    if args.samples:
        cfg = SamplerConfig(seed=args.seed, count=args.samples)
        hit = brute_force_feasible(args.r, args.s, cfg)
        payload["oracle_witness"] = hit
        lines.append("oracle: " + ("witness found" if hit else "no witness found"))
    _emit(args, payload, "\n".join(lines))
    return 0 if not bad else 1


def cmd_convert_build(args):
    if (args.s is None) == (args.theta is None):
        raise InputError("give exactly one of --s and --theta")
    try:
        if args.s is not None:
            ch = construct_channel(args.r, args.s)
        else:
            ch = boundary_channel(args.r, args.theta)
    except InfeasibleConversion as exc:
        print(str(exc), file=sys.stderr)
        return 1
    _write_channel(args, ch)
    if args.out:
        got = bloch_of(apply(ch, density(args.r)))
        print(f"{len(ch)} operators, output state ({got.x:.12g}, {got.y:.12g}, {got.z:.12g})")
    return 0


def cmd_region(args):
    _write_csv(args, REGION_HEADER, region_csv(args.r, args.n))
    return 0


def cmd_gibbs_region(args):
    _write_csv(args, GIBBS_HEADER, gibbs_region_csv(args.r, args.t, args.n))
    return 0


def cmd_gibbs_check(args):
    ok = gibbs_feasible(args.r, args.t, args.s)
    lo, hi = sz_range(args.r, args.t)
    payload = {"feasible": ok, "s_z_range": [lo, hi]}
    text = f"{'feasible' if ok else 'infeasible'} (s_z range [{lo:.12g}, {hi:.12g}]"
    if lo - 1e-12 <= args.s.z <= hi + 1e-12:
        bound = s_perp_max(args.r, args.t, args.s.z)
        payload["s_perp_max"] = bound
        text += f", s_perp_max {bound:.12g}"
    _emit(args, payload, text + ")")
    return 0 if ok else 1


def cmd_lowerbound(args):
    ch = permutation_lower_bound_channel(args.d)
    rank = kraus_rank(ch)
    cls = classify_channel(ch, args.tol)
    if args.out:
        save_channel(ch, args.out)
    _emit(args, {"d": args.d, "kraus_rank": rank, "class": cls.name},
          f"d = {args.d}: kraus rank {rank} (d^2 = {args.d ** 2}), class {cls.name}")
    return 0


def cmd_bounds(args):
    io, sio = io_kraus_bound(args.d), sio_kraus_bound(args.d)
    _emit(args, {"d": args.d, "io": io, "sio": sio}, f"d = {args.d}\nIO {io}\nSIO {sio}")
    return 0


# -- parser -----------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="classification tolerance")
    common.add_argument("--out", help="output file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=_positive_int, default=1)

    parser = argparse.ArgumentParser(prog="incoherent-ops", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    for name, func, help_ in [
        ("classify", cmd_classify, "operator and channel class"),
        ("choi", cmd_choi, "normalised Choi matrix"),
        ("rank", cmd_rank, "Kraus rank"),
    ]:
        add(name, func, help_).add_argument("--file", required=True)

    p = add("reduce", cmd_reduce, "shrink a Kraus decomposition")
    p.add_argument("--file", required=True)
    p.add_argument("--mode", choices=("io", "sio"), default="io")

    p = add("convert-check", cmd_convert_check, "qubit conversion feasibility")
    p.add_argument("--r", type=_bloch_arg, required=True)
    p.add_argument("--s", type=_bloch_arg, required=True)
    p.add_argument("--samples", type=int, default=0, help="also run the Monte-Carlo oracle")

    p = add("convert-build", cmd_convert_build, "SIO realising a conversion")
    p.add_argument("--r", type=_bloch_arg, required=True)
    p.add_argument("--s", type=_bloch_arg)
    p.add_argument("--theta", type=float)

    p = add("region", cmd_region, "boundary polyline as CSV")
    p.add_argument("--r", type=_bloch_arg, required=True)
    p.add_argument("--n", type=_positive_int, default=100)

    p = add("gibbs-region", cmd_gibbs_region, "Gibbs-preserving boundary as CSV")
    p.add_argument("--r", type=_bloch_arg, required=True)
    p.add_argument("--t", type=float, required=True, help="z component of the fixed state")
    p.add_argument("--n", type=_positive_int, default=100)

    p = add("gibbs-check", cmd_gibbs_check, "Gibbs-preserving feasibility")
    p.add_argument("--r", type=_bloch_arg, required=True)
    p.add_argument("--s", type=_bloch_arg, required=True)
    p.add_argument("--t", type=float, required=True)

    add("lowerbound", cmd_lowerbound, "channel needing d^2 operators").add_argument(
        "--d", type=_positive_int, required=True)
    add("bounds", cmd_bounds, "Kraus-count upper bounds").add_argument(
        "--d", type=_positive_int, required=True)
    return parser


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except (InfeasibleConversion,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InputError, ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


__all__ = ["run", "main", "build_parser"]
