"""Command-line front end.

Exit codes: 0 ok, 1 bad input, 2 enumeration guard exceeded, 3 internal
invariant failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .allocation import allocate, min_delay
from .experiment import ExperimentSpec, load_spec, run_experiment, write_csv
from .model import Instance, InstanceError, Profile, generate_instance, load_instance, parse_instance, render_instance, tol
from .oracle import FAIL, run_oracle
from .ordering import (
    DEFAULT_ORDER_GUARD,
    Direction,
    GuardExceeded,
    counterexample,
    objective_v,
    order_exhaustive,
    order_greedy_prefix,
    resolve_guard,
)
from .selection import (
    DEFAULT_SUBSET_GUARD,
    RankBy,
    SelectionResult,
    order_policy,
    plan_for,
    select_exhaustive,
    select_greedy,
    select_linear,
)
from .timeline import build_canonical, render_gantt, validate

EXIT_OK, EXIT_INPUT, EXIT_GUARD, EXIT_INVARIANT = 0, 1, 2, 3


class InvariantFailure(RuntimeError):
    pass


def _read_instance(args) -> Instance:
    if args.instance is None:
        raise InstanceError("--instance PATH is required")
    inst = parse_instance(sys.stdin.read()) if args.instance == "-" else load_instance(args.instance)
    if getattr(args, "workload", None) is not None:
        inst = inst.with_workload(args.workload)
    return inst


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _order_fn(args):
    return order_policy(args.order, resolve_guard(DEFAULT_ORDER_GUARD, args.guard_override))


def _select(inst: Instance, args) -> SelectionResult | None:
    method = args.select.lower()
    if method == "all":
        return None
    if method.startswith("linear"):
        _, _, by = method.partition(":")
        return select_linear(inst, RankBy.RATE if by == "rate" else RankBy.COMM_DELAY)
    if method == "greedy":
        return select_greedy(inst, _order_fn(args))
    if method == "exhaustive":
        guard = resolve_guard(DEFAULT_SUBSET_GUARD, args.guard_override)
        policy = "exact" if args.order == "exact" else _order_fn(args)
        return select_exhaustive(inst, policy, guard)
    raise InstanceError(f"unknown selection method {args.select!r}")


def cmd_solve(args) -> int:
    inst = _read_instance(args)
    sel = _select(inst, args)
    ids = sel.selected if sel else tuple(range(inst.n))
    plan = plan_for(inst, ids, _order_fn(args))
    alloc = allocate(inst, plan)
    delay = min_delay(inst, plan)
    tl = build_canonical(inst, plan, alloc)
    problems = validate(tl, inst, alloc)
    if problems or abs(tl.horizon - delay) > tol(delay):
        raise InvariantFailure("; ".join(v.message for v in problems) or
                               f"timeline horizon {tl.horizon} differs from delay {delay}")
    doc = {"selected": list(plan.selected), "plan": plan.to_dict(), "allocation": alloc.to_dict(delay),
           "delay": delay, "timeline": tl.to_dict()}
    if sel is not None:
        doc["selection"] = {"method": sel.method.value, "trace": [list(t) for t in sel.trace]}
    _emit(args, json.dumps(doc, indent=2))
    if args.gantt:
        print(render_gantt(tl), file=sys.stderr)
    return EXIT_OK


def cmd_allocate(args) -> int:
    inst = _read_instance(args)
    plan = plan_for(inst, range(inst.n), _order_fn(args))
    alloc = allocate(inst, plan)
    _emit(args, json.dumps({**alloc.to_dict(min_delay(inst, plan)), "plan": plan.to_dict()}, indent=2))
    return EXIT_OK


def cmd_order(args) -> int:
    inst = _read_instance(args)
    ids = tuple(range(inst.n))
    guard = resolve_guard(DEFAULT_ORDER_GUARD, args.guard_override)
    directions = list(Direction) if args.direction == "both" else [Direction(args.direction.upper())]
    out = []
    for direction in directions:
        policy = args.order.lower()
        if policy.startswith("greedy"):
            k = int(policy.partition(":")[2] or 1)
            order = order_greedy_prefix(inst, ids, direction, min(k, inst.n), args.suffix).order
        else:
            order = order_policy(policy, guard)(inst, ids, direction)
        entry = {"direction": direction.value, "order": list(order), "v": objective_v(inst, ids, order, direction).v}
        if guard is None or inst.n <= guard:
            entry["v_star"] = order_exhaustive(inst, ids, direction, guard)[1]
        out.append(entry)
    _emit(args, json.dumps(out if len(out) > 1 else out[0], indent=2))
    return EXIT_OK


def cmd_select(args) -> int:
    inst = _read_instance(args)
    if args.select.lower() == "all":
        args.select = "greedy"
    _emit(args, json.dumps(_select(inst, args).to_dict(), indent=2))
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _read_instance(args)
    checks = run_oracle(inst, seed=args.seed, samples=args.samples, timelines=args.timelines,
                        guard=resolve_guard(DEFAULT_ORDER_GUARD, args.guard_override))
    _emit(args, "\n".join(c.line() for c in checks))
    return EXIT_INVARIANT if any(c.status == FAIL for c in checks) else EXIT_OK


def _parse_sweep(text: str) -> list[float]:
    if ":" in text:
        parts = [float(x) for x in text.split(":")]
        lo, hi = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1.0
        return list(np.arange(lo, hi + step / 2, step))
    return [float(x) for x in text.split(",")]


def cmd_experiment(args) -> int:
    if args.spec:
        spec = load_spec(args.spec)
    else:
        if not (args.kind and args.profile and args.sweep):
            raise InstanceError("give --spec PATH or all of --kind, --profile and --sweep")
        spec = ExperimentSpec(args.kind, args.profile, _parse_sweep(args.sweep), tuple(range(args.seeds)),
                              tuple(p for p in (args.policies or "").split(",") if p), args.n, args.workload)
    rows = run_experiment(spec, workers=args.workers)
    if args.out:
        write_csv(rows, args.out)
    else:
        write_csv(rows, sys.stdout)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.counterexample:
        inst = counterexample(args.counterexample, args.n, args.scale, args.workload)
    else:
        inst = generate_instance(args.n, args.seed, args.profile, args.workload, symmetric=not args.asymmetric)
    _emit(args, render_instance(inst))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", help="instance JSON file ('-' for stdin)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--order", default="exhaustive",
                        help="exhaustive | exact | greedy:K | ldf | rate | aco (default: exhaustive)")
    common.add_argument("--select", default="all",
                        help="all | linear:comm | linear:rate | greedy | exhaustive (default: all)")
    common.add_argument("--guard-override", action="store_true", help="disable enumeration size guards")

    parser = argparse.ArgumentParser(prog="decsched", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="select nodes, order communications, allocate")
    p.add_argument("--workload", type=float, help="override the instance's workload")
    p.add_argument("--gantt", action="store_true", help="also draw the schedule on stderr")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("allocate", parents=[common], help="optimal allocation for all nodes")
    p.add_argument("--workload", type=float)
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("order", parents=[common], help="communication orders and their values")
    p.add_argument("--direction", choices=["both", "forward", "backward"], default="both")
    p.add_argument("--suffix", choices=["ascending", "heuristic"], default="ascending",
                   help="how greedy:K fills the unenumerated positions")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("select", parents=[common], help="node selection with its delay trace")
    p.add_argument("--workload", type=float)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("oracle", parents=[common], help="brute-force verification report")
    p.add_argument("--workload", type=float)
    p.add_argument("--samples", type=int, default=1000, help="random allocations")
    p.add_argument("--timelines", type=int, default=500, help="adversarial schedules")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("experiment", parents=[common], help="policy sweep to CSV")
    p.add_argument("--spec", help="experiment spec JSON")
    p.add_argument("--kind", choices=["ALLOC_VS_W", "ORDER_VS_W", "DELAY_VS_N"])
    p.add_argument("--profile", choices=[x.value for x in Profile])
    p.add_argument("--sweep", help="'lo:hi[:step]' or comma list")
    p.add_argument("--seeds", type=int, default=20, help="use seeds 0..SEEDS-1")
    p.add_argument("--policies", help="comma list, e.g. OCA,ECA")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--workload", type=float, default=10.0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("gen", parents=[common], help="generate an instance")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--profile", choices=[x.value for x in Profile], default="DMDC")
    p.add_argument("--workload", type=float, default=10.0)
    p.add_argument("--asymmetric", action="store_true", help="draw forward and backward delays independently")
    p.add_argument("--counterexample", choices=["LDF", "FCL"])
    p.add_argument("--scale", type=float, default=100.0)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GuardExceeded as exc:
        print(f"decsched: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except InvariantFailure as exc:
        print(f"decsched: invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (InstanceError, ValueError, OSError) as exc:
        print(f"decsched: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
