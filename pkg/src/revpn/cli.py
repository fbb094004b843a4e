"""Command-line front end: check, run, explore, verify, export, step, serve.

Exit codes: 0 success, 1 validation failure, 2 replay or enabledness
failure, 3 property violation, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import semantics as sem
from .causality import ReplayError
from .dsl import (
    NetDocument,
    NetValidationError,
    ParseError,
    export_dot,
    parse_net,
    parse_trace,
    serialize_state,
)
from .explore import (
    Bounds,
    property_names,
    reachability_graph,
    verify_properties,
)
from .net import check_well_formed
from .semantics import Action, NotEnabledError, initial_state

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_REPLAY = 2
EXIT_PROPERTY = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse defaults to exit 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class CliFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliFailure(EXIT_USAGE, f"cannot read {path}: {exc}")


def _load_net(path: str) -> NetDocument:
    try:
        return parse_net(_read(path))
    except NetValidationError as exc:
        raise CliFailure(EXIT_INVALID, f"{path}: {exc}")
    except ParseError as exc:
        raise CliFailure(EXIT_INVALID, f"{path}: {exc}")


def _load_trace(path: str):
    try:
        return parse_trace(_read(path))
    except ParseError as exc:
        raise CliFailure(EXIT_INVALID, f"{path}: {exc}")


def cmd_check(args) -> int:
    try:
        doc = parse_net(_read(args.file))
    except NetValidationError as exc:
        print(exc.report)
        return EXIT_INVALID
    except ParseError as exc:
        print(exc)
        return EXIT_INVALID
    report = check_well_formed(doc.net, doc.initial)
    print(report)
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_run(args) -> int:
    doc = _load_net(args.file)
    trace = _load_trace(args.trace)
    state = initial_state(doc.initial)
    print(f"# initial state of {doc.name}")
    print(serialize_state(state), end="")
    for i, action in enumerate(trace):
        try:
            state = sem.step(doc.net, state, action)
        except NotEnabledError as exc:
            raise CliFailure(EXIT_REPLAY, f"step {i + 1} failed: {exc}")
        print(f"# after {action}")
        print(serialize_state(state), end="")
    if args.expect:
        expected = _read(args.expect)
        actual = serialize_state(state)
        if actual.strip() != expected.strip():
            raise CliFailure(
                EXIT_REPLAY,
                f"final state differs from {args.expect}:\n--- expected\n"
                f"{expected}\n--- actual\n{actual}")
        print(f"# final state matches {args.expect}")
    return EXIT_OK


def cmd_explore(args) -> int:
    doc = _load_net(args.file)
    try:
        graph = reachability_graph(
            doc.net, doc.initial, args.mode,
            max_steps=args.max_steps, max_states=args.max_states)
    except ValueError as exc:
        raise CliFailure(EXIT_USAGE, str(exc))
    if args.dot:
        print(_graph_dot(graph), end="")
    elif args.json:
        print(graph.to_json())
    else:
        print(graph.summary())
    return EXIT_OK


def _graph_dot(graph) -> str:
    ids = {key: f"s{i}" for i, key in enumerate(sorted(graph.nodes))}
    lines = ["digraph reachability {", "  rankdir=LR;"]
    for key in sorted(graph.nodes):
        shape = "doublecircle" if key == graph.root else "circle"
        lines.append(f'  {ids[key]} [shape={shape}, label="{ids[key]}"];')
    for src, action, dst in sorted(graph.edges, key=lambda e: (e[0], str(e[1]), e[2])):
        lines.append(f'  {ids[src]} -> {ids[dst]} [label="{action}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    doc = _load_net(args.file)
    bounds = Bounds(depth=args.depth, walks=args.walks, seed=args.seed)
    selection = set(args.property) if args.property else None
    try:
        reports = verify_properties(doc.net, doc.initial, bounds, selection)
    except ValueError as exc:
        raise CliFailure(EXIT_USAGE, str(exc))
    for report in reports:
        print(report)
    if args.json:
        Path(args.json).write_text(json.dumps(
            [r.to_json() for r in reports], indent=2) + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_PROPERTY


def cmd_export(args) -> int:
    doc = _load_net(args.file)
    state = initial_state(doc.initial)
    if args.trace:
        trace = _load_trace(args.trace)
        for i, action in enumerate(trace):
            try:
                state = sem.step(doc.net, state, action)
            except NotEnabledError as exc:
                raise CliFailure(EXIT_REPLAY, f"step {i + 1} failed: {exc}")
    print(export_dot(doc.net, state, title=doc.name), end="")
    return EXIT_OK


def _menu(net, state) -> list[Action]:
    actions = [Action.forward(t) for t in sem.enabled_forward(net, state)]
    for mode in ("bt", "co", "oco"):
        actions += [Action.reverse(t, mode)
                    for t in sem.enabled_reverse(net, state, mode)]
    return actions


def cmd_step(args) -> int:
    doc = _load_net(args.file)
    state = initial_state(doc.initial)
    undo_log: list = []
    out = sys.stdout
    while True:
        out.write(serialize_state(state))
        actions = _menu(doc.net, state)
        for i, action in enumerate(actions, start=1):
            out.write(f"  [{i}] {action}\n")
        out.write("choose an action number, 'fire T', 'reverse T MODE', "
                  "'undo', or 'quit'\n> ")
        out.flush()
        line = sys.stdin.readline()
        if not line:
            return EXIT_OK
        words = line.strip().split()
        if not words:
            continue
        if words[0] == "quit":
            return EXIT_OK
        if words[0] == "undo":
            if not undo_log:
                out.write("nothing to undo\n")
                continue
            _, state = undo_log.pop()
            continue
        action = None
        if len(words) == 1 and words[0].isdigit():
            index = int(words[0])
            if 1 <= index <= len(actions):
                action = actions[index - 1]
            else:
                out.write(f"no menu entry {index}\n")
                continue
        elif words[0] == "fire" and len(words) == 2:
            action = Action.forward(words[1])
        elif words[0] == "reverse" and len(words) == 3:
            try:
                action = Action.reverse(words[1], words[2])
            except ValueError as exc:
                out.write(f"{exc}\n")
                continue
        else:
            out.write("unrecognised input\n")
            continue
        try:
            successor = sem.step(doc.net, state, action)
        except NotEnabledError as exc:
            out.write(f"not enabled: {exc.reason}\n")
            continue
        except KeyError as exc:
            out.write(f"unknown transition {exc}\n")
            continue
        undo_log.append((action, state))
        state = successor


def cmd_serve(args) -> int:
    from .server import serve
    doc = _load_net(args.file)
    serve(doc, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rpn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a net file")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="replay a trace, printing each state")
    p.add_argument("file")
    p.add_argument("trace")
    p.add_argument("--expect", help="file holding the expected final state")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("explore", help="bounded reachability graph")
    p.add_argument("file")
    p.add_argument("--mode", default="forward",
                   choices=["forward", "forward-only", "bt", "co", "oco"])
    p.add_argument("--max-steps", type=int, default=20)
    p.add_argument("--max-states", type=int, default=10000)
    p.add_argument("--dot", action="store_true", help="emit the graph as DOT")
    p.add_argument("--json", action="store_true", help="emit the graph as JSON")
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("verify", help="run the property suite on a net")
    p.add_argument("file")
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--walks", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--property", action="append",
                   help=f"property to check (repeatable); known: "
                        f"{', '.join(property_names())}")
    p.add_argument("--json", help="also write reports to this JSON file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export", help="emit the net (and a state) as DOT")
    p.add_argument("file")
    p.add_argument("--trace", help="replay this trace first")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("step", help="interactive textual stepper")
    p.add_argument("file")
    p.set_defaults(func=cmd_step)

    p = sub.add_parser("serve", help="serve the interactive session protocol")
    p.add_argument("file")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8123)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliFailure as failure:
        print(failure, file=sys.stderr)
        return failure.code
    except ReplayError as exc:
        print(exc, file=sys.stderr)
        return EXIT_REPLAY


if __name__ == "__main__":
    sys.exit(main())
