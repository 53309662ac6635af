"""``hlab`` command line: generate spaces, estimate content and dimension, run suites.

Exit codes: 0 ok, 1 invariant failure, 2 parse or input error, 3 limit exceeded.
Reports are JSON with sorted keys and embed the config that produced them.
"""

import argparse
import json
import math
import sys

import numpy as np

from ._validation import dp_limit
from .atomic_covering import (
    AtomicSpace,
    IntervalSet,
    exact_content,
    greedy_content,
    interval_content,
    mass_lower_bound,
)
from .curves import circle_path
from .estimators import NetDimensionEstimator
from .exceptions import DegenerateGrid, HlabError, InvalidInput, LimitExceeded
from .metric_core import PointSpace
from .sequence_space import SequenceSpaceSpec, materialize
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_LIMIT = 0, 1, 2, 3


class BadParams(InvalidInput):
    pass


def _float(text):
    try:
        return float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _float_list(text):
    if not text.strip():
        return []
    return [_float(v) for v in text.split(",")]


def _int_list(text):
    if not text.strip():
        return []
    try:
        return [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an index list: {text!r}") from exc


def _encode(obj):
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    if isinstance(obj, dict):
        return {k: _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if isinstance(obj, np.generic):
        return _encode(obj.item())
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    return obj


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _dump(obj):
    return json.dumps(_encode(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# gen


def cantor_points(depth, rho=1.0 / 3.0, n=2):
    """Left endpoints of the depth-``depth`` intervals of the middle-thirds type set."""
    gap = (1.0 - n * rho) / (n - 1) if n > 1 else 0.0
    pts = np.array([0.0])
    scale = 1.0
    for _ in range(depth):
        offsets = np.arange(n) * (rho + gap) * scale
        pts = (pts[:, None] + offsets[None, :]).ravel()
        scale *= rho
    return np.sort(pts)


def cmd_gen(args):
    kind = args.kind
    if kind == "cantor":
        if args.format == "points":
            pts = cantor_points(args.depth)
            return _dump({"points": pts.reshape(-1, 1).tolist()})
        atoms, _ = materialize(SequenceSpaceSpec(2, 1.0 / 3.0, args.depth))
        return _dump(atoms.to_dict())
    if kind == "seqspace":
        spec = SequenceSpaceSpec(args.n, args.rho, args.depth)
        if args.format == "atoms":
            atoms, _ = materialize(spec)
            return _dump(atoms.to_dict())
        out = spec.to_dict()
        out["cells"] = spec.words()
        return _dump(out)
    if kind == "interval-union":
        vals = args.intervals
        if not vals or len(vals) % 2:
            raise BadParams("--intervals needs an even, nonempty list a1,b1,a2,b2,...")
        ivs = IntervalSet(tuple(zip(vals[::2], vals[1::2])))
        return _dump(ivs.to_dict())
    if kind == "circle":
        if args.samples < 1:
            raise BadParams("--samples must be positive")
        return circle_path(args.samples, args.radius, closed=False).to_csv()
    if kind == "grid-cloud":
        rng = np.random.default_rng(args.seed)
        if args.count:
            pts = rng.uniform(0.0, 1.0, size=(args.count, args.dim))
        else:
            if args.side < 1:
                raise BadParams("--side must be positive")
            axes = [np.linspace(0.0, 1.0, args.side)] * args.dim
            pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, args.dim)
            if args.jitter:
                pts = pts + rng.uniform(-args.jitter, args.jitter, size=pts.shape)
        return _dump({"points": pts.tolist()})
    raise BadParams(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# content


def load_space(data):
    """Atomic space from any supported JSON layout, plus the layout name."""
    if "atom_diam" in data:
        return AtomicSpace.from_dict(data), "atomic"
    if "intervals" in data:
        return IntervalSet.from_dict(data), "intervals"
    if "n" in data and "rho" in data:
        atoms, _ = materialize(SequenceSpaceSpec.from_dict(data))
        return atoms, "seqspace"
    if "points" in data or "dist" in data:
        groups = data.get("groups")
        if groups is not None:
            groups = [tuple(g) for g in groups]
        return AtomicSpace.from_point_space(PointSpace.from_dict(data), groups), "points"
    raise InvalidInput("unrecognized space file: expected atom_diam, intervals, n/rho, points or dist")


def cmd_content(args):
    space, layout = load_space(_load_json(args.file))
    limit = dp_limit(args.dp_limit)
    config = {
        "command": "content",
        "file": args.file,
        "layout": layout,
        "alpha": args.alpha,
        "delta": args.delta,
        "mode": args.mode,
        "target": args.target,
        "dp_limit": limit,
    }
    if layout == "intervals":
        if args.target is not None:
            raise BadParams("--target is not supported for interval files")
        if args.mode == "exact":
            est = interval_content(space, args.alpha, args.delta, limit)
            return _dump({"config": config, "result": est.to_dict()})
        space = space.normalized().to_atomic()
    if args.mode == "exact":
        est = exact_content(space, args.target, args.alpha, args.delta, limit)
    elif args.mode == "greedy":
        est = greedy_content(space, args.target, args.alpha, args.delta)
    else:
        est = mass_lower_bound(space, args.target, args.alpha, args.delta, None, limit)
    return _dump({"config": config, "result": est.to_dict()})


# ---------------------------------------------------------------------------
# dim


def cmd_dim(args):
    data = _load_json(args.file)
    if "points" in data:
        X = np.asarray(data["points"], dtype=float)
    else:
        raise InvalidInput("dim needs a point cloud file with a 'points' key")
    if args.bracket is not None and len(args.bracket) != 2:
        raise BadParams("--bracket needs two numbers lo,hi")
    est = NetDimensionEstimator(scales=args.scales, bracket=args.bracket).fit(X)
    config = {
        "command": "dim",
        "file": args.file,
        "scales": args.scales,
        "bracket": args.bracket,
    }
    return _dump({"config": config, "alpha_hat": est.dimension_, "diagnostics": est.diagnostics_})


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args):
    if args.cases < 1:
        raise BadParams("--cases must be positive")
    result = run_suite(args.suite, args.cases, args.seed)
    config = {"command": "verify", "suite": args.suite, "seed": args.seed, "cases": args.cases}
    report = {"config": config, **result.to_dict()}
    return _dump(report), (EXIT_OK if result.passed else EXIT_FAIL)


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="hlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a generated space, interval set or path")
    gen.add_argument("kind", choices=["cantor", "seqspace", "interval-union", "circle", "grid-cloud"])
    gen.add_argument("--depth", type=int, default=3)
    gen.add_argument("--n", type=int, default=2)
    gen.add_argument("--rho", type=_float, default=1.0 / 3.0)
    gen.add_argument("--format", choices=["atoms", "points", "spec"], default=None)
    gen.add_argument("--intervals", type=_float_list, default=None, help="a1,b1,a2,b2,...")
    gen.add_argument("--samples", type=int, default=1000)
    gen.add_argument("--radius", type=_float, default=1.0)
    gen.add_argument("--side", type=int, default=10)
    gen.add_argument("--dim", type=int, default=1)
    gen.add_argument("--count", type=int, default=0, help="uniform random points instead of a grid")
    gen.add_argument("--jitter", type=_float, default=0.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_gen)

    content = sub.add_parser("content", help="H^alpha_delta of a space file")
    content.add_argument("file")
    content.add_argument("--alpha", type=_float, default=1.0)
    content.add_argument("--delta", type=_float, default=math.inf)
    content.add_argument("--mode", choices=["exact", "greedy", "lower"], default="exact")
    content.add_argument("--target", type=_int_list, default=None, help="atom indices, comma separated")
    content.add_argument("--dp-limit", type=int, default=None)
    content.add_argument("--out")
    content.set_defaults(func=cmd_content)

    dim = sub.add_parser("dim", help="net-counting dimension estimate of a point cloud")
    dim.add_argument("file")
    dim.add_argument("--scales", type=_float_list, default=None, help="decreasing, comma separated")
    dim.add_argument("--bracket", type=_float_list, default=None, help="lo,hi")
    dim.add_argument("--out")
    dim.set_defaults(func=cmd_dim)

    ver = sub.add_parser("verify", help="run a randomized invariant suite")
    ver.add_argument("suite", choices=sorted(SUITES))
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--cases", type=int, default=200)
    ver.add_argument("--out")
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        produced = args.func(args)
    except LimitExceeded as exc:
        print(f"hlab: limit exceeded: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except DegenerateGrid as exc:
        print(f"hlab: degenerate grid: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (HlabError, ValueError, KeyError, TypeError) as exc:
        print(f"hlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    text, code = produced if isinstance(produced, tuple) else (produced, EXIT_OK)
    _emit(text, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
