"""Deterministic command-line front end.

One JSON document in on stdin (where the subcommand takes input), one JSON
document out on stdout (or --output FILE). Exit codes: 0 success, 1
validity/verdict-negative where the subcommand defines it, 2 usage or
input error, 3 numerical indeterminate. All randomness flows from --seed
through a counter-based generator, so identical argv plus seed reproduce
identical output bytes.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import combine, corners, dilation, membership, operators, serialize, tensors
from .errors import CorrsetsError, DiagonalizationError
from .linalg import philox_rng

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_INDETERMINATE = 3


class _UsageError(Exception):
    pass


def _read_stdin_json():
    text = sys.stdin.read()
    try:
        return serialize.loads(text)
    except json.JSONDecodeError as exc:
        raise _UsageError(
            f"malformed JSON input: {exc.msg} at line {exc.lineno} column {exc.colno}"
        ) from exc


def _write(args, obj) -> None:
    text = serialize.dumps(obj) + "\n"
    if args.output:
        with open(args.output, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _parse_weights(text: str):
    return [combine.as_weight(part.strip()) for part in text.split(",")]


def _parse_floats(text: str):
    return [float(part) for part in text.split(",")]


def _parse_ints(text: str):
    return [int(part) for part in text.split(",")]


def _cmd_validate(args) -> int:
    p = serialize.correlation_from_obj(_read_stdin_json())
    kwargs = {}
    if args.tol is not None:
        kwargs = {"neg_tol": args.tol, "norm_tol": args.tol}
    report = tensors.validate_correlation(p, **kwargs)
    _write(args, serialize.validity_to_obj(report))
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def _cmd_marginals(args) -> int:
    p = serialize.correlation_from_obj(_read_stdin_json())
    pair = tensors.marginals(p, args.tol if args.tol is not None else 1e-9)
    _write(args, serialize.marginal_pair_to_obj(pair))
    return EXIT_OK


def _cmd_eval(args) -> int:
    obj = _read_stdin_json()
    if args.what == "state":
        p = operators.eval_state_rep(serialize.state_rep_from_obj(obj))
    elif args.what == "povm":
        p = dilation.eval_almost_max_ent(serialize.rep_from_obj(obj, default_kind="povm"))
    else:
        p = operators.eval_max_ent(serialize.rep_from_obj(obj))
    _write(args, serialize.correlation_to_obj(p))
    return EXIT_OK


def _cmd_combine(args) -> int:
    obj = _read_stdin_json()
    reps = [serialize.rep_from_obj(r) for r in obj["reps"]]
    weights = _parse_weights(args.weights)
    rep = combine.rational_combination(reps, weights, max_dim=args.max_dim)
    _write(args, serialize.rep_to_obj(rep))
    return EXIT_OK


def _cmd_approx_weights(args) -> int:
    targets = _parse_floats(args.targets)
    weights = combine.approximate_weights(targets, args.eps, args.max_den)
    _write(args, {"weights": serialize.weights_to_obj(weights)})
    return EXIT_OK


def _cmd_plan(args) -> int:
    dims = _parse_ints(args.dims)
    weights = _parse_weights(args.weights)
    plan = combine.plan_blocks(dims, weights, max_dim=args.max_dim)
    _write(args, serialize.plan_to_obj(plan))
    return EXIT_OK


def _cmd_embed(args) -> int:
    rep = serialize.rep_from_obj(_read_stdin_json())
    _write(
        args,
        serialize.rep_to_obj(
            combine.embed_factorial(rep, args.copies, max_dim=args.max_dim)
        ),
    )
    return EXIT_OK


def _cmd_corner(args) -> int:
    p = serialize.correlation_from_obj(_read_stdin_json())
    n_bob = args.n_bob if args.n_bob is not None else p.n_a - args.n_alice
    _write(args, serialize.correlation_to_obj(corners.corner(p, args.n_alice, n_bob)))
    return EXIT_OK


def _cmd_lift(args) -> int:
    obj = _read_stdin_json()
    if args.what == "max-ent":
        rep = corners.lift_max_ent(serialize.rep_from_obj(obj))
        _write(args, serialize.rep_to_obj(rep))
    else:
        tol = args.tol if args.tol is not None else 1e-9
        lifted = corners.lift_nonsignalling(serialize.correlation_from_obj(obj), tol)
        _write(args, serialize.correlation_to_obj(lifted))
    return EXIT_OK


def _cmd_dilate(args) -> int:
    rep = serialize.rep_from_obj(_read_stdin_json(), default_kind="povm")
    out = dilation.dilate_commuting_rational(
        rep, max_den=args.max_den, max_dim=args.max_dim, seed=args.seed
    )
    _write(args, serialize.rep_to_obj(out))
    return EXIT_OK


def _cmd_round_spectrum(args) -> int:
    rep = serialize.rep_from_obj(_read_stdin_json(), default_kind="povm")
    out = dilation.round_to_rational_spectrum(
        rep, args.eps, args.max_den, seed=args.seed
    )
    _write(args, serialize.rep_to_obj(out))
    return EXIT_OK


def _cmd_membership(args) -> int:
    p = serialize.correlation_from_obj(_read_stdin_json())
    verdict = membership.is_local(
        p,
        args.tol if args.tol is not None else 1e-8,
        max_vertices=args.max_vertices,
    )
    _write(args, serialize.verdict_to_obj(verdict))
    if verdict.status == "inside":
        return EXIT_OK
    if verdict.status == "outside":
        return EXIT_NEGATIVE
    return EXIT_INDETERMINATE


def _cmd_bell(args) -> int:
    obj = _read_stdin_json()
    if args.chsh:
        p = serialize.correlation_from_obj(obj)
        functional = membership.chsh_game_functional()
    else:
        p = serialize.correlation_from_obj(obj["correlation"])
        functional = serialize.functional_from_obj(obj["functional"])
    _write(args, {"value": membership.bell_value(p, functional)})
    return EXIT_OK


def _cmd_chsh(args) -> int:
    rep = membership.chsh_optimal_rep()
    p = operators.eval_max_ent(rep)
    value = membership.bell_value(p, membership.chsh_game_functional())
    _write(args, {"value": value, "rep": serialize.rep_to_obj(rep)})
    return EXIT_OK


def _cmd_distance(args) -> int:
    obj = _read_stdin_json()
    p = serialize.correlation_from_obj(obj["p"])
    q = serialize.correlation_from_obj(obj["q"])
    _write(args, {"sup_distance": tensors.sup_distance(p, q)})
    return EXIT_OK


def _cmd_random(args) -> int:
    if args.what == "pvm":
        ranks = _parse_ints(args.ranks) if args.ranks else None
        if ranks is None:
            ranks = operators._random_ranks(args.d, args.m, philox_rng(args.seed))
        measure = operators.random_pvm(args.d, args.m, ranks, args.seed)
        _write(args, serialize.measure_to_obj(measure))
        return EXIT_OK
    rep = operators.random_max_ent_rep(
        args.d, args.m, args.n_alice, args.n_bob, args.seed, kind=args.kind
    )
    if args.what == "rep":
        _write(args, serialize.rep_to_obj(rep))
    else:
        _write(args, serialize.correlation_to_obj(operators.eval_max_ent(rep)))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrsets",
        description="Construct, transform, and test bipartite correlation tensors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(handler=handler)
        p.add_argument("--output", help="write the JSON document here instead of stdout")
        p.add_argument(
            "--format", choices=["json"], default="json", help="output format"
        )
        p.add_argument("--tol", type=float, default=None, help="tolerance override")
        p.add_argument("--seed", type=int, default=0, help="random seed")
        p.add_argument("--eps", type=float, default=1e-3, help="approximation budget")
        p.add_argument("--max-den", type=int, default=1000, help="denominator cap")
        p.add_argument(
            "--max-dim", type=int, default=combine.DIM_CAP, help="dimension cap"
        )
        return p

    add("validate", _cmd_validate, help="check a correlation's validity")
    add("marginals", _cmd_marginals, help="marginals and signalling defect")

    p = add("eval", _cmd_eval, help="evaluate a representation")
    p.add_argument("what", choices=["max-ent", "state", "povm"])

    p = add("combine", _cmd_combine, help="rational convex combination of reps")
    p.add_argument("--weights", required=True, help="comma-separated rationals, e.g. 1/3,2/3")

    p = add("approx-weights", _cmd_approx_weights, help="rationalize convex weights")
    p.add_argument("--targets", required=True, help="comma-separated reals summing to 1")

    p = add("plan", _cmd_plan, help="integer block plan for a combination")
    p.add_argument("--dims", required=True, help="comma-separated block dimensions")
    p.add_argument("--weights", required=True, help="comma-separated rationals")

    p = add("embed", _cmd_embed, help="direct-sum copies of a representation")
    p.add_argument("--copies", type=int, required=True)

    p = add("corner", _cmd_corner, help="corner of a synchronous-scenario correlation")
    p.add_argument("--n-alice", type=int, required=True)
    p.add_argument("--n-bob", type=int, default=None)

    p = add("lift", _cmd_lift, help="synchronous lift")
    p.add_argument("what", choices=["max-ent", "nonsignalling"])

    add("dilate", _cmd_dilate, help="dilate commuting rational-spectrum POVMs to PVMs")
    add("round-spectrum", _cmd_round_spectrum, help="round POVM spectra to rationals")

    p = add("membership", _cmd_membership, help="local-polytope membership test")
    p.add_argument("--max-vertices", type=int, default=membership.VERTEX_CAP)

    p = add("bell", _cmd_bell, help="evaluate a Bell functional")
    p.add_argument("--chsh", action="store_true", help="use the built-in CHSH game")

    add("chsh", _cmd_chsh, help="the optimal CHSH representation and its value")
    add("distance", _cmd_distance, help="sup distance between two correlations")

    p = add("random", _cmd_random, help="seeded random objects")
    p.add_argument("what", choices=["pvm", "rep", "correlation"])
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--n-alice", type=int, default=2)
    p.add_argument("--n-bob", type=int, default=2)
    p.add_argument("--ranks", default=None, help="comma-separated element ranks")
    p.add_argument("--kind", choices=["pvm", "povm"], default="pvm")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.handler(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DiagonalizationError as exc:
        print(f"indeterminate: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except (CorrsetsError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
