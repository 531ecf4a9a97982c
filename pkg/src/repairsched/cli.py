"""Command-line front end.

Every subcommand prints one JSON document on stdout.  Exit codes: 0 success,
1 domain error (bad instance, precedence violation, ...), 2 a verification
suite found violations, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import jsonio
from .core import simulate
from .errors import RepairError
from .graphs import as_disjoint_trees, classify_regime, is_complete_series, levels
from .harness import SUITES, GenConfig, GraphClass, Regime, generate_random_instance, run_suite
from .policies import FixedOrder, policy_from_name, run_policy
from .reduction import brute_force_clique, decide_ord, reduce_clique
from .solver import DEFAULT_STATE_CAP, solve_exhaustive, solve_nonjumping

log = logging.getLogger("repairsched")

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_VIOLATION = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        sys.stderr.write(f"\n{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _node_list(text: str) -> list:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as e:
        raise UsageError(f"bad node list {text!r}") from e


def _load(args):
    inst = jsonio.load_instance(args.instance)
    if getattr(args, "T", None) is not None:
        inst = inst.with_horizon(jsonio.parse_horizon(args.T))
    return inst


def cmd_simulate(args):
    inst = _load(args)
    text = args.actions.strip()
    if text.startswith("order:"):
        traj = run_policy(inst, FixedOrder(tuple(_node_list(text[len("order:"):]))))
    else:
        traj = simulate(inst, _node_list(text))
    return jsonio.trajectory_to_json(traj)


def cmd_policy(args):
    inst = _load(args)
    order = _node_list(args.order) if args.order else None
    if args.name == "order" and not order:
        raise UsageError("--name order needs --order")
    traj = run_policy(inst, policy_from_name(args.name, order))
    out = {"policy": args.name}
    out.update(jsonio.trajectory_to_json(traj))
    return out


def cmd_solve(args):
    inst = _load(args)
    solver = solve_nonjumping if args.method == "nonjumping" else solve_exhaustive
    res = solver(inst, state_cap=args.state_cap)
    out = {"method": args.method}
    out.update(res.to_json())
    return out


def cmd_classify(args):
    inst = _load(args)
    out = classify_regime(inst).to_json()
    forest = as_disjoint_trees(inst.dag)
    out["levels"] = [sorted(lv) for lv in levels(inst.dag).levels]
    out["complete_series"] = is_complete_series(inst.dag)
    out["forest_k"] = None if forest is None else forest.k
    return out


def cmd_reduce(args):
    graph = jsonio.load_graph(args.graph)
    red = reduce_clique(graph, args.p)
    out = jsonio.reduction_to_json(red)
    if args.decide:
        out["clique"] = decide_ord(red)
        out["brute_force"] = brute_force_clique(graph, args.p)
    return out


def _graph_class(text: str):
    name, _, k = text.partition(":")
    try:
        cls = GraphClass(name)
    except ValueError as e:
        raise UsageError(f"unknown graph class {text!r}") from e
    return cls, int(k) if k else 2


def cmd_gen(args):
    cls, k = _graph_class(args.graph_class)
    try:
        regime = Regime(args.regime)
    except ValueError as e:
        raise UsageError(f"unknown regime {args.regime!r}") from e
    cfg = GenConfig(
        n=args.n,
        graph_class=cls,
        regime=regime,
        rate_grid_denominator=args.denominator,
        horizon=jsonio.parse_horizon(args.T),
        seed=args.seed,
        max_tree_size=k,
    )
    inst = generate_random_instance(cfg)
    if args.out:
        jsonio.save_instance(inst, args.out)
    return jsonio.instance_to_json(inst)


def cmd_verify(args):
    rep = run_suite(args.suite, args.seeds, args.seed_base)
    return rep.to_json(), (EXIT_OK if rep.ok else EXIT_VIOLATION)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="repairsched", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def with_instance(sp):
        sp.add_argument("--instance", required=True, help="instance JSON file")
        sp.add_argument("--T", help="override the horizon (integer or 'inf')")
        return sp

    sp = with_instance(sub.add_parser("simulate", help="replay an action list"))
    sp.add_argument("--actions", required=True, help='"2,2,3" per step, or "order:2,3"')
    sp.set_defaults(func=cmd_simulate)

    sp = with_instance(sub.add_parser("policy", help="run a greedy or fixed-order policy"))
    sp.add_argument("--name", required=True, choices=["healthiest", "least-modified", "order"])
    sp.add_argument("--order", help="comma-separated node order for --name order")
    sp.set_defaults(func=cmd_policy)

    sp = with_instance(sub.add_parser("solve", help="exact optimum"))
    sp.add_argument("--method", default="nonjumping", choices=["nonjumping", "exhaustive"])
    sp.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP)
    sp.set_defaults(func=cmd_solve)

    sp = with_instance(sub.add_parser("classify", help="regime and graph structure"))
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("reduce", help="build the decision instance for a Clique query")
    sp.add_argument("--graph", required=True, help='undirected graph JSON {"s": 3, "edges": [[1,2], ...]}')
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--decide", action="store_true", help="also answer the query both ways")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("gen", help="seeded random instance")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--graph-class", default="dag", help="dag | forest:K | series | edgeless")
    sp.add_argument("--regime", default="decay-a1", help="decay-a1 | decay | repair")
    sp.add_argument("--denominator", type=int, default=10)
    sp.add_argument("--T", default="inf")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", help="also write the instance here")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("--suite", required=True, choices=SUITES)
    sp.add_argument("--seeds", type=int, default=100)
    sp.add_argument("--seed-base", type=int, default=0)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        out = args.func(args)
    except UsageError as e:
        parser.print_help(sys.stderr)
        print(f"repairsched: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (RepairError, ValueError, OSError, json.JSONDecodeError) as e:
        print(f"repairsched: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    code = EXIT_OK
    if isinstance(out, tuple):
        out, code = out
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
