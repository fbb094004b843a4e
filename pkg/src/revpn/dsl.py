"""Textual formats: net descriptions, trace scripts, state listings, DOT.

Net files (``.rpn``)::

    net catalysis {
      tokens a, b, c;
      places u, v, w, x, y;
      transition t1 {
        in u: {c};
        in v: {a};
        out x: {a-c};
      }
      marking { u: {c}; v: {a}; w: {b}; }
    }

Entries are a token ``a``, a bond ``a-b``, or their negations ``!a`` /
``!a-b`` (incoming arcs only).  A bond entry implicitly carries its two
endpoint tokens with the same sign.  ``#`` starts a comment.

Trace files (``.rtr``) hold one action per line: ``fire T`` or
``reverse T mode=bt|co|oco``.

State listings are canonical (sorted, empty cells omitted) so equal
states serialize byte-identically.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .net import (
    Bond,
    Entity,
    Label,
    Marking,
    Net,
    ValidationReport,
    bases_of,
    bonds_of,
    check_well_formed,
    entity_str,
    expand_endpoints,
    sort_entities,
)
from .semantics import Action, ExecState, Occurrence, Trace

KEYWORDS = {"net", "tokens", "places", "transition", "in", "out", "marking"}

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


class ParseError(ValueError):
    """Malformed input, with a 1-based source position when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(f"{message}{where}")


class NetValidationError(ParseError):
    """The net parsed but fails the structural rules."""

    def __init__(self, report: ValidationReport, line: int | None = None):
        self.report = report
        super().__init__(str(report), line)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "int" | "punct" | "eof"
    text: str
    line: int
    col: int


def _lex(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            i += 1
            col += 1
        elif ch == "#":
            while i < n and text[i] != "\n":
                i += 1
        elif ch.isdigit():
            m = re.match(r"\d+", text[i:])
            tokens.append(Token("int", m.group(), line, col))
            i += len(m.group())
            col += len(m.group())
        elif IDENT_RE.match(ch):
            m = IDENT_RE.match(text, i)
            tokens.append(Token("ident", m.group(), line, col))
            col += len(m.group())
            i = m.end()
        elif text.startswith("->", i):
            tokens.append(Token("punct", "->", line, col))
            i += 2
            col += 2
        elif ch in "{}:,;-!()[]=":
            tokens.append(Token("punct", ch, line, col))
            i += 1
            col += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Cursor:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.current
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.current
        return tok.kind == kind and (text is None or tok.text == text)

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.current
        if not self.at(kind, text):
            wanted = text if text is not None else kind
            got = tok.text or tok.kind
            raise ParseError(f"expected {wanted!r}, found {got!r}", tok.line, tok.col)
        return self.advance()

    def expect_name(self, what: str) -> Token:
        tok = self.current
        if tok.kind != "ident" or tok.text in KEYWORDS:
            raise ParseError(f"expected {what} name, found {tok.text or tok.kind!r}",
                             tok.line, tok.col)
        return self.advance()


@dataclass(frozen=True)
class NetDocument:
    """A parsed net file: the net, its initial marking, and metadata."""

    name: str
    net: Net
    initial: Marking
    comments: tuple[str, ...] = ()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NetDocument):
            return NotImplemented
        return (
            self.name == other.name
            and self.comments == other.comments
            and self.initial == other.initial
            and self.net.bases == other.net.bases
            and self.net.places == other.net.places
            and self.net.transitions == other.net.transitions
            and self.net.arcs_in == other.net.arcs_in
            and self.net.arcs_out == other.net.arcs_out
            and self.net.bonds == other.net.bonds
        )


def _leading_comments(text: str) -> tuple[str, ...]:
    comments = []
    for raw in text.splitlines():
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            comments.append(stripped[1:].strip())
        else:
            break
    return tuple(comments)


def _parse_entry(cur: _Cursor, bases: set[str], where: str) -> tuple[Entity, bool]:
    negated = False
    if cur.at("punct", "!"):
        cur.advance()
        negated = True
    first = cur.expect_name("token")
    if first.text not in bases:
        raise ParseError(f"undeclared token {first.text!r} in {where}",
                         first.line, first.col)
    if cur.at("punct", "-"):
        cur.advance()
        second = cur.expect_name("token")
        if second.text not in bases:
            raise ParseError(f"undeclared token {second.text!r} in {where}",
                             second.line, second.col)
        if second.text == first.text:
            raise ParseError(f"bond {first.text}-{second.text} joins a token "
                             f"with itself", first.line, first.col)
        return Bond(first.text, second.text), negated
    return first.text, negated


def _parse_entry_set(cur: _Cursor, bases: set[str], where: str) -> tuple[set[Entity], set[Entity]]:
    positive: set[Entity] = set()
    negative: set[Entity] = set()
    cur.expect("punct", "{")
    if not cur.at("punct", "}"):
        while True:
            entity, negated = _parse_entry(cur, bases, where)
            (negative if negated else positive).add(entity)
            if cur.at("punct", ","):
                cur.advance()
                continue
            break
    cur.expect("punct", "}")
    return positive, negative


def parse_net(text: str) -> NetDocument:
    """Parse and validate a net description.

    Syntax problems raise :class:`ParseError` with line/column; a net
    that parses but breaks the structural rules raises
    :class:`NetValidationError` carrying the full violation report.
    """
    cur = _Cursor(_lex(text))
    comments = _leading_comments(text)
    cur.expect("ident", "net")
    name = cur.expect_name("net").text
    cur.expect("punct", "{")

    bases: set[str] = set()
    places: set[str] = set()
    transitions: dict[str, Token] = {}
    arcs_in: dict[tuple[str, str], Label] = {}
    arcs_out: dict[tuple[str, str], Label] = {}
    marking_cells: dict[str, set[Entity]] = {}
    saw_marking = False

    while not cur.at("punct", "}"):
        tok = cur.current
        if cur.at("ident", "tokens") or cur.at("ident", "places"):
            kind = cur.advance().text
            target = bases if kind == "tokens" else places
            while True:
                nm = cur.expect_name(kind[:-1])
                if nm.text in target:
                    raise ParseError(f"duplicate {kind[:-1]} {nm.text!r}",
                                     nm.line, nm.col)
                target.add(nm.text)
                if cur.at("punct", ","):
                    cur.advance()
                    continue
                break
            cur.expect("punct", ";")
        elif cur.at("ident", "transition"):
            cur.advance()
            tname = cur.expect_name("transition")
            if tname.text in transitions:
                raise ParseError(f"duplicate transition {tname.text!r}",
                                 tname.line, tname.col)
            transitions[tname.text] = tname
            cur.expect("punct", "{")
            while not cur.at("punct", "}"):
                dir_tok = cur.current
                if not (cur.at("ident", "in") or cur.at("ident", "out")):
                    raise ParseError("expected 'in' or 'out' arc",
                                     dir_tok.line, dir_tok.col)
                direction = cur.advance().text
                pname = cur.expect_name("place")
                if pname.text not in places:
                    raise ParseError(f"undeclared place {pname.text!r}",
                                     pname.line, pname.col)
                cur.expect("punct", ":")
                where = f"arc {direction} {pname.text} of transition {tname.text}"
                positive, negative = _parse_entry_set(cur, bases, where)
                if direction == "out" and negative:
                    bad = ", ".join(entity_str(e) for e in sort_entities(negative))
                    raise ParseError(
                        f"negative entry {bad} on outgoing arc of transition "
                        f"{tname.text} (absence may only be required on "
                        f"incoming arcs)", pname.line, pname.col)
                key = ((pname.text, tname.text) if direction == "in"
                       else (tname.text, pname.text))
                store = arcs_in if direction == "in" else arcs_out
                if key in store:
                    raise ParseError(f"duplicate {direction} arc for place "
                                     f"{pname.text!r}", pname.line, pname.col)
                store[key] = Label.of(positive, negative)
                cur.expect("punct", ";")
            cur.expect("punct", "}")
        elif cur.at("ident", "marking"):
            if saw_marking:
                raise ParseError("duplicate marking block", tok.line, tok.col)
            saw_marking = True
            cur.advance()
            cur.expect("punct", "{")
            while not cur.at("punct", "}"):
                pname = cur.expect_name("place")
                if pname.text not in places:
                    raise ParseError(f"undeclared place {pname.text!r}",
                                     pname.line, pname.col)
                if pname.text in marking_cells:
                    raise ParseError(f"duplicate marking cell {pname.text!r}",
                                     pname.line, pname.col)
                cur.expect("punct", ":")
                positive, negative = _parse_entry_set(
                    cur, bases, f"marking of place {pname.text}")
                if negative:
                    raise ParseError("negative entries make no sense in a "
                                     "marking", pname.line, pname.col)
                marking_cells[pname.text] = set(expand_endpoints(positive))
                cur.expect("punct", ";")
            cur.expect("punct", "}")
        else:
            raise ParseError(f"expected a 'tokens', 'places', 'transition' or "
                             f"'marking' block, found {tok.text!r}",
                             tok.line, tok.col)
    cur.expect("punct", "}")
    cur.expect("eof")
    if not saw_marking:
        raise ParseError("missing marking block", 1, 1)

    initial = Marking(marking_cells)
    net = Net(
        name,
        bases,
        places,
        transitions,
        arcs_in,
        arcs_out,
        bonds=bonds_of(e for ents in marking_cells.values() for e in ents),
    )
    report = check_well_formed(net, initial)
    if not report.ok:
        first = report.violations[0]
        pos = None
        for t, tk in transitions.items():
            if f"transition {t}" == first.subject:
                pos = tk
                break
        raise NetValidationError(report, pos.line if pos else None)
    return NetDocument(name, net, initial, comments)


def _display_entries(positive: frozenset[Entity], negative: frozenset[Entity]) -> list[str]:
    """Canonical entry list: bonds shown, endpoint tokens left implicit."""
    out: list[str] = []
    for sign, ents in (("", positive), ("!", negative)):
        bonds = bonds_of(ents)
        covered = {e for b in bonds for e in b.ends}
        shown = sorted(bonds) + sorted(bases_of(ents) - covered)
        out.extend(sign + entity_str(e) for e in
                   sorted(shown, key=lambda x: entity_str(x)))
    return out


def serialize_net(doc: NetDocument) -> str:
    """Canonical net text; ``parse_net`` of the result rebuilds ``doc``."""
    lines: list[str] = [f"# {c}" for c in doc.comments]
    net = doc.net
    lines.append(f"net {doc.name} {{")
    if net.bases:
        lines.append(f"  tokens {', '.join(sorted(net.bases))};")
    if net.places:
        lines.append(f"  places {', '.join(sorted(net.places))};")
    for t in net.sorted_transitions():
        lines.append(f"  transition {t} {{")
        for x in net.info(t).pre_places:
            lab = net.label_in(x, t)
            entries = ", ".join(_display_entries(lab.positive, lab.negative))
            lines.append(f"    in {x}: {{{entries}}};")
        for y in net.info(t).post_places:
            lab = net.label_out(t, y)
            entries = ", ".join(_display_entries(lab.positive, lab.negative))
            lines.append(f"    out {y}: {{{entries}}};")
        lines.append("  }")
    lines.append("  marking {")
    for place, ents in doc.initial.items():
        entries = ", ".join(_display_entries(ents, frozenset()))
        lines.append(f"    {place}: {{{entries}}};")
    lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> Trace:
    """Parse a trace script: ``fire T`` / ``reverse T mode=...`` lines."""
    actions: list[Action] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "fire":
            if len(parts) != 2:
                raise ParseError("expected 'fire TRANSITION'", lineno, 1)
            actions.append(Action.forward(parts[1]))
        elif parts[0] == "reverse":
            if len(parts) != 3 or not parts[2].startswith("mode="):
                raise ParseError("expected 'reverse TRANSITION mode=bt|co|oco'",
                                 lineno, 1)
            mode = parts[2][len("mode="):]
            if mode not in ("bt", "co", "oco"):
                raise ParseError(f"unknown reversal mode {mode!r}", lineno, 1)
            actions.append(Action.reverse(parts[1], mode))
        else:
            raise ParseError(f"unknown directive {parts[0]!r} (expected 'fire' "
                             f"or 'reverse')", lineno, 1)
    return tuple(actions)


def serialize_trace(trace: Trace) -> str:
    return "".join(f"{a}\n" for a in trace)


def serialize_state(state: ExecState) -> str:
    """Canonical state listing: marking, history, causes, all sorted.

    Equal states produce byte-identical text; empty marking cells and
    empty histories are omitted.
    """
    lines = ["marking {"]
    for place, ents in state.marking.items():
        inner = ", ".join(entity_str(e) for e in sort_entities(ents))
        lines.append(f"  {place}: {{{inner}}};")
    lines.append("}")
    lines.append("history {")
    for t, keys in sorted(state.history.items()):
        inner = ", ".join(str(k) for k in sorted(keys))
        lines.append(f"  {t}: [{inner}];")
    lines.append("}")
    lines.append("causes {")
    for (t1, k1), (t2, k2) in sorted(state.causes):
        lines.append(f"  ({t1}, {k1}) -> ({t2}, {k2});")
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class StateListing:
    """The content of a serialized state, independent of any net."""

    marking: Marking
    history: dict[str, frozenset[int]] = field(default_factory=dict)
    causes: frozenset[tuple[Occurrence, Occurrence]] = frozenset()


def parse_state(text: str) -> StateListing:
    """Inverse of :func:`serialize_state`."""
    cur = _Cursor(_lex(text))
    cur.expect("ident", "marking")
    cur.expect("punct", "{")
    cells: dict[str, set[Entity]] = {}
    while not cur.at("punct", "}"):
        pname = cur.expect_name("place")
        cur.expect("punct", ":")
        cur.expect("punct", "{")
        ents: set[Entity] = set()
        if not cur.at("punct", "}"):
            while True:
                first = cur.expect_name("token")
                if cur.at("punct", "-"):
                    cur.advance()
                    second = cur.expect_name("token")
                    ents.add(Bond(first.text, second.text))
                else:
                    ents.add(first.text)
                if cur.at("punct", ","):
                    cur.advance()
                    continue
                break
        cur.expect("punct", "}")
        cur.expect("punct", ";")
        cells[pname.text] = ents
    cur.expect("punct", "}")

    cur.expect("ident", "history")
    cur.expect("punct", "{")
    history: dict[str, frozenset[int]] = {}
    while not cur.at("punct", "}"):
        tname = cur.expect_name("transition")
        cur.expect("punct", ":")
        cur.expect("punct", "[")
        keys: set[int] = set()
        if not cur.at("punct", "]"):
            while True:
                keys.add(int(cur.expect("int").text))
                if cur.at("punct", ","):
                    cur.advance()
                    continue
                break
        cur.expect("punct", "]")
        cur.expect("punct", ";")
        history[tname.text] = frozenset(keys)
    cur.expect("punct", "}")

    cur.expect("ident", "causes")
    cur.expect("punct", "{")
    causes: set[tuple[Occurrence, Occurrence]] = set()

    def occurrence() -> Occurrence:
        cur.expect("punct", "(")
        t = cur.expect_name("transition").text
        cur.expect("punct", ",")
        k = int(cur.expect("int").text)
        cur.expect("punct", ")")
        return Occurrence(t, k)

    while not cur.at("punct", "}"):
        first = occurrence()
        cur.expect("punct", "->")
        second = occurrence()
        cur.expect("punct", ";")
        causes.add((first, second))
    cur.expect("punct", "}")
    cur.expect("eof")
    return StateListing(Marking(cells), history, frozenset(causes))


def state_json(state: ExecState) -> dict:
    """JSON-friendly view of a state, mirroring ``serialize_state``."""
    return {
        "marking": {
            place: [entity_str(e) for e in sort_entities(ents)]
            for place, ents in state.marking.items()
        },
        "history": {
            t: sorted(keys) for t, keys in sorted(state.history.items())
        },
        "causes": [
            [[t1, k1], [t2, k2]] for (t1, k1), (t2, k2) in sorted(state.causes)
        ],
    }


def net_json(doc: NetDocument) -> dict:
    """JSON-friendly net structure for clients that render the net."""
    net = doc.net

    def label_entries(lab: Label) -> list[str]:
        return _display_entries(lab.positive, lab.negative)

    return {
        "name": doc.name,
        "tokens": sorted(net.bases),
        "places": sorted(net.places),
        "transitions": {
            t: {
                "in": {
                    x: label_entries(net.label_in(x, t))
                    for x in net.info(t).pre_places
                },
                "out": {
                    y: label_entries(net.label_out(t, y))
                    for y in net.info(t).post_places
                },
            }
            for t in net.sorted_transitions()
        },
        "initial": {
            place: [entity_str(e) for e in sort_entities(ents)]
            for place, ents in doc.initial.items()
        },
    }


def _dq(text: str) -> str:
    # names are identifier-only, so a plain quote escape suffices and the
    # deliberate \n line breaks in labels survive
    return '"%s"' % text.replace('"', '\\"')


def export_dot(net: Net, state: ExecState | None = None, title: str | None = None) -> str:
    """Render the net (and optionally a state) as a GraphViz digraph.

    Places come out as circles listing their tokens and bonds,
    transitions as boxes annotated with their history keys, arcs with
    their label entries.
    """
    lines = [f"digraph {_dq(title or net.name)} {{", "  rankdir=LR;"]
    for place in sorted(net.places):
        label = place
        if state is not None:
            inner = ", ".join(entity_str(e)
                              for e in sort_entities(state.marking[place]))
            label = f"{place}\\n{{{inner}}}"
        lines.append(f"  {_dq('place:' + place)} [shape=circle, label={_dq(label)}];")
    for t in net.sorted_transitions():
        label = t
        if state is not None and state.keys_of(t):
            label = f"{t} [{', '.join(str(k) for k in sorted(state.keys_of(t)))}]"
        lines.append(f"  {_dq('transition:' + t)} [shape=box, label={_dq(label)}];")
    for (x, t), lab in sorted(net.arcs_in.items()):
        entries = ", ".join(_display_entries(lab.positive, lab.negative))
        lines.append(f"  {_dq('place:' + x)} -> {_dq('transition:' + t)} "
                     f"[label={_dq(entries)}];")
    for (t, y), lab in sorted(net.arcs_out.items()):
        entries = ", ".join(_display_entries(lab.positive, lab.negative))
        lines.append(f"  {_dq('transition:' + t)} -> {_dq('place:' + y)} "
                     f"[label={_dq(entries)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_json(nodes: dict, edges, root: str, truncated: bool) -> str:
    """Stable JSON for exploration results."""
    return json.dumps(
        {
            "root": root,
            "nodes": sorted(nodes),
            "edges": sorted(
                [src, str(action), dst] for src, action, dst in edges
            ),
            "truncated": truncated,
        },
        indent=2,
        sort_keys=True,
    )
