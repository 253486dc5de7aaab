"""Command-line interface: validate, classify, verify, generate, search.

Exit codes: 0 success or distinguishable, 1 negative result,
2 usage or parse error, 3 undecided.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .classifiers import ClassificationError, Status, classify
from .families import (
    GENERATORS,
    PAPER_PARAMS,
    SAMPLERS,
    FamilyConstraintError,
    Thm5Params,
    Thm6Params,
    Thm7Params,
    canonical_multiround_protocol,
    gen_multiround,
)
from .protocol import ProtocolError, count_rounds, verify_perfect_discrimination
from .search import GridSpec, lpcc_grid_search, min_rounds_search
from .states import pairwise_orthogonal, schmidt_rank

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_UNDECIDED = 0, 1, 2, 3
PARAM_TYPES = {"thm5": Thm5Params, "thm6": Thm6Params, "thm7": Thm7Params}


class UsageError(Exception):
    pass


def _emit(args, data, text_lines):
    if args.format == "json":
        print(io.dumps(data))
    else:
        print("\n".join(text_lines))


def cmd_validate(args):
    states = io.load_state_set(args.path)
    ranks = [schmidt_rank(c) for c in states.states]
    n_prod = sum(r == 1 for r in ranks)
    ok, pair = pairwise_orthogonal(states, args.tol)
    data = {
        "count": len(states),
        "dims": list(states.dims),
        "orthogonal": bool(ok),
        "offending_pair": None if ok else list(pair),
        "schmidt_ranks": ranks,
        "product": n_prod,
        "entangled": len(ranks) - n_prod,
    }
    lines = [f"{len(states)} states in {states.dims[0]}x{states.dims[1]}"]
    for i, r in enumerate(ranks):
        kind = "product" if r == 1 else "entangled"
        lines.append(f"  state {i}: Schmidt rank {r} ({kind})")
    lines.append(f"{n_prod} product, {len(ranks) - n_prod} entangled")
    lines.append("orthogonal" if ok else f"NOT orthogonal: states {pair[0]} and {pair[1]}")
    _emit(args, data, lines)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if hasattr(v, "__dataclass_fields__"):
        return io.params_to_dict(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def cmd_classify(args):
    states = io.load_state_set(args.path)
    try:
        verdict = classify(states, args.tol)
    except ClassificationError as e:
        raise UsageError(str(e)) from e
    if verdict.protocol is not None and args.protocol_out:
        io.save_protocol(args.protocol_out, verdict.protocol)
    data = {
        "status": verdict.status.value,
        "rule": verdict.rule,
        "condition": verdict.condition,
        "rounds": verdict.rounds,
        "details": {k: _jsonable(v) for k, v in verdict.details.items()},
        "protocol": None if verdict.protocol is None else io.protocol_to_dict(verdict.protocol),
    }
    lines = [f"status: {verdict.status.value}", f"rule: {verdict.rule}"]
    if verdict.condition:
        lines.append(f"reason: {verdict.condition}")
    if verdict.protocol is not None:
        lines.append(f"witness protocol: {verdict.rounds} round(s), verified")
        if args.protocol_out:
            lines.append(f"protocol written to {args.protocol_out}")
    _emit(args, data, lines)
    if verdict.status is Status.UNDECIDED:
        return EXIT_UNDECIDED
    return EXIT_OK if verdict.status.distinguishable else EXIT_NEGATIVE


def cmd_verify(args):
    states = io.load_state_set(args.states)
    tree = io.load_protocol(args.protocol)
    try:
        rep = verify_perfect_discrimination(tree, states, args.tol)
    except ProtocolError as e:
        raise UsageError(str(e)) from e
    data = {
        "perfect": bool(rep.perfect),
        "success": [float(p) for p in rep.success],
        "rounds": count_rounds(tree),
        "failing_leaf": None if rep.failing_leaf is None else list(rep.failing_leaf),
        "reason": rep.reason,
    }
    lines = [f"state {i}: success probability {p:.6f}" for i, p in enumerate(rep.success)]
    lines.append(f"rounds: {count_rounds(tree)}")
    if rep.perfect:
        lines.append("perfect discrimination: yes")
    else:
        lines.append(f"perfect discrimination: no (leaf {rep.failing_leaf}: {rep.reason})")
    _emit(args, data, lines)
    return EXIT_OK if rep.perfect else EXIT_NEGATIVE


def _family_params(args):
    fam = args.family
    chosen = sum([args.paper_example, args.random, args.params is not None])
    if chosen != 1:
        raise UsageError("give exactly one of --paper-example, --random, --params")
    if args.paper_example:
        return PAPER_PARAMS[fam]()
    if args.random:
        return SAMPLERS[fam](np.random.default_rng(args.seed))
    try:
        raw = json.loads(args.params)
    except json.JSONDecodeError as e:
        raise io.FormatError("--params", e.msg) from e
    return io.params_from_dict(PARAM_TYPES[fam], raw)


def cmd_generate(args):
    fam = args.family
    if fam == "multiround":
        if args.n is None:
            raise UsageError("multiround needs --n")
        if args.n < 2:
            raise UsageError("--n must be at least 2")
        states = gen_multiround(args.n)
        tree = canonical_multiround_protocol(args.n)
        params = {"n": args.n}
    else:
        p = _family_params(args)
        states, tree = GENERATORS[fam](p)
        params = io.params_to_dict(p)
    prefix = args.out or fam
    spath, ppath = Path(f"{prefix}.states.json"), Path(f"{prefix}.protocol.json")
    io.save_state_set(spath, states)
    io.save_protocol(ppath, tree)
    data = {
        "family": fam,
        "params": params,
        "count": len(states),
        "rounds": count_rounds(tree),
        "states_file": str(spath),
        "protocol_file": str(ppath),
    }
    lines = [
        f"{fam}: {len(states)} states, {count_rounds(tree)}-round protocol (verified)",
        f"states written to {spath}",
        f"protocol written to {ppath}",
    ]
    _emit(args, data, lines)
    return EXIT_OK


def cmd_search(args):
    states = io.load_state_set(args.path)
    grid = GridSpec(points_per_angle=args.grid, refinement_levels=args.refinements,
                    defect_threshold=args.threshold)
    if args.mode == "lpcc":
        if states.dims != (2, 3):
            raise UsageError("lpcc mode needs a 2x3 set")
        rep = lpcc_grid_search(states, grid, max_rounds=args.max_rounds)
        found = rep.best_protocol is not None
    else:
        try:
            rep = min_rounds_search(states, args.max_rounds, grid)
        except ValueError as e:
            raise UsageError(str(e)) from e
        found = rep.best_protocol is not None
    data = rep.to_dict()
    data["found"] = bool(found)
    if rep.best_protocol is not None:
        data["protocol"] = io.protocol_to_dict(rep.best_protocol)
    lines = [
        f"mode: {args.mode}, max rounds: {args.max_rounds}, grid: {args.grid}",
        f"best defect: {rep.best_defect:.3e}" + (f" ({rep.skeleton})" if rep.skeleton else ""),
        "protocol found below threshold" if found else
        f"no protocol below threshold {grid.defect_threshold:g}",
    ]
    _emit(args, data, lines)
    return EXIT_OK if found else EXIT_NEGATIVE


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9, help="numerical tolerance (default 1e-9)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0, help="seed for random generation")

    p = argparse.ArgumentParser(
        prog="locc23", description="Local distinguishability of small 2x3 orthogonal state sets.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check orthogonality and entanglement")
    s.add_argument("path")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("classify", parents=[common], help="decide local distinguishability")
    s.add_argument("path")
    s.add_argument("--protocol-out", help="write the witness protocol here")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("verify", parents=[common], help="check a protocol against a state set")
    s.add_argument("states")
    s.add_argument("protocol")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("generate", parents=[common], help="write a family instance and its protocol")
    s.add_argument("family", choices=sorted(GENERATORS) + ["multiround"])
    s.add_argument("--paper-example", action="store_true", help="the reference instance")
    s.add_argument("--random", action="store_true", help="a random instance (uses --seed)")
    s.add_argument("--params", help="JSON object of family parameters, complex values as [re, im]")
    s.add_argument("--n", type=int, help="local dimension for multiround")
    s.add_argument("--out", help="output prefix (default: the family name)")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("search", parents=[common], help="grid-search projective or round-limited protocols")
    s.add_argument("path")
    s.add_argument("--mode", choices=("lpcc", "rounds"), default="lpcc")
    s.add_argument("--grid", type=int, default=20, help="points per angle")
    s.add_argument("--refinements", type=int, default=2)
    s.add_argument("--threshold", type=float, default=0.01, help="defect counted as found")
    s.add_argument("--max-rounds", type=int, default=3)
    s.set_defaults(func=cmd_search)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except (io.FormatError, UsageError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FamilyConstraintError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NEGATIVE


if __name__ == "__main__":
    sys.exit(main())
