"""Command-line interface.

Exit status is 0 exactly when the requested check passes (stable, locally
complete, reached, reachable, all records verified, all replication items
passed); 2 signals invalid input.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import io
from .dynamics import LinkFormed, NoChange, Severed, is_reachable, run_formation
from .exact import equilibrium_efforts_exact, payoffs_exact
from .model import GuardError, ValidationError, equilibrium_efforts, payoffs
from .replicate import replicate_paper
from .search import canonical_prop1_space, find_lemma2_counterexamples, find_prop1_counterexamples, verify_record
from .stability import DEFAULT_EPS, is_locally_complete, is_pairwise_nash_stable


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True, indent=2, default=str))
    else:
        print(text)


def _values(values, exact_values=None):
    """JSON form: floats, plus exact "p/q" strings when available."""
    out = {"float": [float(v) for v in values]}
    if exact_values is not None:
        out["exact"] = [io.number_to_json(v) for v in exact_values]
    return out


def cmd_solve(args) -> int:
    inst, g = io.load_instance(args.instance)
    y, u = equilibrium_efforts(inst, g), payoffs(inst, g)
    ye = ue = None
    if args.exact:
        ye, ue = equilibrium_efforts_exact(inst, g), payoffs_exact(inst, g)
    lines = [f"network {g}"]
    for i in range(inst.n):
        lines.append(
            f"  agent {i + 1}: theta={io.fmt(inst.theta[i])}  y*={io.fmt(y[i], ye[i] if ye else None)}"
            f"  U={io.fmt(u[i], ue[i] if ue else None)}"
        )
    _emit(args, {"efforts": _values(y, ye), "payoffs": _values(u, ue), "edges": [list(e) for e in g.sorted_edges()]},
          "\n".join(lines))
    return 0


def cmd_stability(args) -> int:
    inst, g = io.load_instance(args.instance)
    rep = is_pairwise_nash_stable(inst, g, eps=args.eps, exact=args.exact)
    payload = {
        "stable": rep.stable,
        "witness": io.deviation_to_json(rep.witness),
        "deltas": {str(a): v for a, v in rep.deltas.items()},
        "exact_deltas": {str(a): io.number_to_json(v) for a, v in rep.exact_deltas.items()},
        "min_margin": rep.min_margin if rep.min_margin != float("inf") else None,
        "escalations": len(rep.escalations),
        "float_exact_disagreements": len(rep.disagreements),
    }
    if rep.stable:
        text = f"{g} is pairwise Nash stable"
    else:
        gains = ", ".join(
            f"dU{a}={io.fmt(v, rep.exact_deltas.get(a))}" for a, v in rep.deltas.items()
        )
        text = f"{g} is NOT stable: {rep.witness} ({gains})"
    if rep.escalations:
        text += f"\n  {len(rep.escalations)} near-zero margin(s) re-decided exactly, {len(rep.disagreements)} disagreed with floats"
    _emit(args, payload, text)
    return 0 if rep.stable else 1


def cmd_local_complete(args) -> int:
    inst, g = io.load_instance(args.instance)
    rep = is_locally_complete(g, inst.theta)
    payload = {"locally_complete": rep.locally_complete,
               "violation": list(rep.violation) if rep.violation else None,
               "missing_link": list(rep.missing) if rep.missing else None}
    if rep.locally_complete:
        text = f"{g} is locally complete"
    else:
        i, j, k = rep.violation
        a, b = rep.missing
        text = f"{g} is NOT locally complete: {i}-{j} linked, agent {k} in between, {a}-{b} missing"
    _emit(args, payload, text)
    return 0 if rep.locally_complete else 1


def _action_json(action) -> dict:
    if isinstance(action, Severed):
        return {"kind": "severed", "agent": action.agent, "links": [list(e) for e in action.links]}
    if isinstance(action, LinkFormed):
        return {"kind": "link_formed", "i": action.i, "j": action.j}
    assert isinstance(action, NoChange)
    return {"kind": "no_change"}


def cmd_dynamics(args) -> int:
    inst, _ = io.load_instance(args.instance)
    traj = run_formation(inst, args.seed, args.t_max, eps=args.eps, exact=args.exact)
    payload = {
        "seed": args.seed,
        "t_max": args.t_max,
        "events": [{"t": e.t, "pair": list(e.pair), "action": _action_json(e.action)} for e in traj.events],
        "networks": [[list(e) for e in g.sorted_edges()] for g in traj.networks],
        "reached": None if traj.reached is None else {
            "edges": [list(e) for e in traj.reached[0].sorted_edges()], "t": traj.reached[1]},
    }
    lines = [f"t={e.t} pair={e.pair}: {e.action}" for e in traj.events if not isinstance(e.action, NoChange)]
    if traj.reached:
        lines.append(f"reached stable network {traj.reached[0]} at t={traj.reached[1]}")
    else:
        lines.append(f"no stable network after {args.t_max} rounds; last network {traj.final}")
    _emit(args, payload, "\n".join(lines))
    return 0 if traj.reached else 1


def cmd_reachable(args) -> int:
    inst, _ = io.load_instance(args.instance)
    target = io.parse_network(args.target, inst.n)
    path = is_reachable(inst, target, args.horizon, eps=args.eps, exact=args.exact)
    payload = {"target": [list(e) for e in target.sorted_edges()], "witness": None if path is None else [list(p) for p in path]}
    if path is None:
        text = f"{target} is not reachable within {args.horizon} rounds (or is not stable)"
    else:
        text = f"{target} reachable: " + " -> ".join(f"{i}{j}" for i, j in path) if path else f"{target} is the empty start"
    _emit(args, payload, text)
    return 0 if path is not None else 1


def cmd_search(args) -> int:
    if args.space == "canonical":
        space = canonical_prop1_space(eps=args.eps)
    else:
        space = io.parse_space(Path(args.space).read_text())
    if args.workers:
        space = dataclasses.replace(space, workers=args.workers)
    finder = find_prop1_counterexamples if args.kind == "prop1" else find_lemma2_counterexamples
    records = finder(space)
    ok = all(verify_record(r) for r in records) if args.exact else all(r.exact_verified for r in records)
    sys.stdout.write(io.records_to_jsonl(records))
    print(f"{len(records)} {args.kind} record(s)", file=sys.stderr)
    return 0 if ok else 1


def cmd_replicate(args) -> int:
    rep = replicate_paper()
    if args.json:
        print(json.dumps({
            "passed": rep.passed,
            "items": [
                {"figure": it.figure, "name": it.name, "expected": it.expected, "computed": it.computed,
                 "abs_error": it.abs_error, "passed": it.passed, "informational": it.informational, "note": it.note}
                for it in rep.items
            ],
        }, sort_keys=True, indent=2, default=str))
    else:
        for it in rep.items:
            status = "INFO" if it.informational else ("PASS" if it.passed else "FAIL")
            err = f"  err={it.abs_error:.3g}" if it.abs_error is not None else ""
            print(f"[{status}] {it.figure}: {it.name}{err}")
            print(f"         expected {it.expected}  computed {it.computed}")
            if it.note:
                print(f"         {it.note}")
        print("ALL PASS" if rep.passed else "FAILURES PRESENT")
    return 0 if rep.passed else 1


def cmd_export_dot(args) -> int:
    inst, g = io.load_instance(args.instance)
    sys.stdout.write(io.export_dot(g, inst.theta, equilibrium_efforts(inst, g), payoffs(inst, g)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps values given before the subcommand from being reset
    common.add_argument("--exact", action="store_true", default=argparse.SUPPRESS,
                        help="decide every comparison with rational arithmetic")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    common.add_argument("--eps", type=float, default=argparse.SUPPRESS,
                        help=f"float margin below which decisions are re-checked exactly (default {DEFAULT_EPS:g})")

    parser = argparse.ArgumentParser(prog="netstab", description=__doc__.splitlines()[0])
    parser.add_argument("--exact", action="store_true", help="verify every comparison in rational arithmetic")
    parser.add_argument("--json", action="store_true", help="key-sorted JSON output")
    parser.add_argument("--eps", type=float, default=DEFAULT_EPS, help="escalate float gains below this magnitude to exact (default 1e-6)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    add("solve", cmd_solve, "equilibrium efforts and payoffs").add_argument("instance")
    add("stability", cmd_stability, "pairwise Nash stability check").add_argument("instance")
    add("local-complete", cmd_local_complete, "local completeness check").add_argument("instance")
    p = add("dynamics", cmd_dynamics, "simulate the formation process from the empty network")
    p.add_argument("instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-max", type=int, default=1000)
    p = add("reachable", cmd_reachable, "search for a pair sequence reaching a stable network")
    p.add_argument("instance")
    p.add_argument("--target", required=True, help='network document or inline edges like "1-2,1-3"')
    p.add_argument("--horizon", type=int, default=10)
    p = add("search", cmd_search, "mine counterexamples; JSON lines on stdout")
    p.add_argument("kind", choices=["prop1", "lemma2"])
    p.add_argument("space", help='search-space document, or "canonical" for the built-in three-agent grid')
    p.add_argument("--workers", type=int, default=0)
    add("replicate", cmd_replicate, "reproduce the worked examples and report pass/fail")
    add("export-dot", cmd_export_dot, "Graphviz DOT rendering with efforts and payoffs").add_argument("instance")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValidationError, GuardError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
