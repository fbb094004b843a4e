"""Static net structure: tokens, bonds, arc labels, markings.

A net moves *named* tokens (bases) between places.  Tokens are never
created or destroyed; transitions may glue them together with bonds.
Arc labels list the tokens/bonds a transition needs (incoming arcs,
where entries may also be negated to demand absence) and the ones it
emits (outgoing arcs, positive only).

This module also provides the two pillars everything else stands on:
``connected_component`` (the token coalition reachable over bonds
inside one place) and ``check_well_formed`` (total validation, every
problem reported rather than raised).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union


@dataclass(frozen=True, order=True)
class Bond:
    """Undirected pairing of two token names, stored in sorted order."""

    first: str
    second: str

    def __post_init__(self) -> None:
        if self.second < self.first:
            a, b = self.first, self.second
            object.__setattr__(self, "first", b)
            object.__setattr__(self, "second", a)

    @property
    def ends(self) -> tuple[str, str]:
        return (self.first, self.second)

    def touches(self, base: str) -> bool:
        return base == self.first or base == self.second

    def other(self, base: str) -> str:
        return self.second if base == self.first else self.first

    def __str__(self) -> str:
        return f"{self.first}-{self.second}"


#: A marking/label element: a token name or a bond between two tokens.
Entity = Union[str, Bond]


def entity_str(e: Entity) -> str:
    return e if isinstance(e, str) else str(e)


def sort_entities(entities: Iterable[Entity]) -> list[Entity]:
    return sorted(entities, key=entity_str)


def bases_of(entities: Iterable[Entity]) -> frozenset[str]:
    return frozenset(e for e in entities if isinstance(e, str))


def bonds_of(entities: Iterable[Entity]) -> frozenset[Bond]:
    return frozenset(e for e in entities if isinstance(e, Bond))


EMPTY: frozenset[Entity] = frozenset()


def expand_endpoints(entities: Iterable[Entity]) -> frozenset[Entity]:
    """Close a set of entries under bond endpoints (a-b pulls in a and b)."""
    out: set[Entity] = set()
    for e in entities:
        out.add(e)
        if isinstance(e, Bond):
            out.update(e.ends)
    return frozenset(out)


@dataclass(frozen=True)
class Label:
    """One arc's entries, split by sign.

    ``positive`` entries must be present for the transition to fire (or
    are produced, on outgoing arcs); ``negative`` entries must be absent
    from the incoming place.
    """

    positive: frozenset[Entity] = EMPTY
    negative: frozenset[Entity] = EMPTY

    @classmethod
    def of(cls, positive: Iterable[Entity] = (), negative: Iterable[Entity] = ()) -> "Label":
        """Build a label, closing each sign under bond endpoints."""
        return cls(expand_endpoints(positive), expand_endpoints(negative))

    @property
    def pos_bases(self) -> frozenset[str]:
        return bases_of(self.positive)

    @property
    def pos_bonds(self) -> frozenset[Bond]:
        return bonds_of(self.positive)

    @property
    def neg_bases(self) -> frozenset[str]:
        return bases_of(self.negative)

    @property
    def neg_bonds(self) -> frozenset[Bond]:
        return bonds_of(self.negative)

    def is_empty(self) -> bool:
        return not self.positive and not self.negative


EMPTY_LABEL = Label()


class Marking:
    """Immutable distribution of tokens and bonds over places.

    Empty cells are dropped, so equal distributions compare (and hash)
    equal regardless of how they were built.
    """

    __slots__ = ("_cells", "_key")

    def __init__(self, cells: Mapping[str, Iterable[Entity]] | None = None):
        data = {}
        if cells:
            for place, entities in cells.items():
                ents = frozenset(entities)
                if ents:
                    data[place] = ents
        self._cells: dict[str, frozenset[Entity]] = data
        self._key = tuple(
            (p, tuple(sort_entities(es))) for p, es in sorted(data.items())
        )

    def __getitem__(self, place: str) -> frozenset[Entity]:
        return self._cells.get(place, EMPTY)

    get = __getitem__

    def places(self) -> list[str]:
        """Non-empty places, sorted."""
        return sorted(self._cells)

    def items(self) -> list[tuple[str, frozenset[Entity]]]:
        return sorted(self._cells.items())

    def place_of(self, entity: Entity) -> str | None:
        for place, ents in self._cells.items():
            if entity in ents:
                return place
        return None

    def places_of(self, entity: Entity) -> list[str]:
        return sorted(p for p, ents in self._cells.items() if entity in ents)

    def entities(self) -> Iterator[tuple[str, Entity]]:
        for place, ents in self.items():
            for e in sort_entities(ents):
                yield place, e

    def update(self, changes: Mapping[str, Iterable[Entity]]) -> "Marking":
        cells = dict(self._cells)
        for place, ents in changes.items():
            cells[place] = frozenset(ents)
        return Marking(cells)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Marking) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        inner = ", ".join(
            "%s: {%s}" % (p, ", ".join(entity_str(e) for e in sort_entities(es)))
            for p, es in self.items()
        )
        return f"Marking({inner})"


def connected_component(base: str, entities: Iterable[Entity]) -> frozenset[Entity]:
    """Tokens reachable from ``base`` over chains of bonds within
    ``entities``, together with the bonds forming those chains.

    Returns the empty set when the base itself is absent.
    """
    ents = entities if isinstance(entities, frozenset) else frozenset(entities)
    if base not in ents:
        return EMPTY
    by_end: dict[str, list[Bond]] = {}
    for e in ents:
        if isinstance(e, Bond):
            by_end.setdefault(e.first, []).append(e)
            by_end.setdefault(e.second, []).append(e)
    component: set[Entity] = {base}
    frontier = [base]
    while frontier:
        current = frontier.pop()
        for bond in by_end.get(current, ()):
            nxt = bond.other(current)
            if nxt not in ents:
                continue
            component.add(bond)
            if nxt not in component:
                component.add(nxt)
                frontier.append(nxt)
    return frozenset(component)


@dataclass(frozen=True)
class TransitionSets:
    """Derived per-transition sets: requirements, emissions, created bonds."""

    guard: Label
    effects: Label
    effect: frozenset[Bond]
    pre_places: tuple[str, ...]
    post_places: tuple[str, ...]

    @property
    def effects_bases(self) -> frozenset[str]:
        return self.effects.pos_bases

    @property
    def effects_pos(self) -> frozenset[Entity]:
        return self.effects.positive


class Net:
    """A reversing net: tokens, places, bond alphabet, transitions, arcs.

    Arcs are stored as two partial maps: ``(place, transition) -> Label``
    for inputs and ``(transition, place) -> Label`` for outputs; a missing
    entry means "no arc".  Instances are immutable; derived transition
    sets are precomputed.
    """

    __slots__ = ("name", "bases", "places", "bonds", "transitions",
                 "arcs_in", "arcs_out", "_info")

    def __init__(
        self,
        name: str,
        bases: Iterable[str],
        places: Iterable[str],
        transitions: Iterable[str],
        arcs_in: Mapping[tuple[str, str], Label],
        arcs_out: Mapping[tuple[str, str], Label],
        bonds: Iterable[Bond] = (),
    ):
        self.name = name
        self.bases = frozenset(bases)
        self.places = frozenset(places)
        self.transitions = frozenset(transitions)
        self.arcs_in = {k: v for k, v in arcs_in.items() if not v.is_empty()}
        self.arcs_out = {k: v for k, v in arcs_out.items() if not v.is_empty()}
        declared = set(bonds)
        for lab in list(self.arcs_in.values()) + list(self.arcs_out.values()):
            declared.update(lab.pos_bonds)
            declared.update(lab.neg_bonds)
        self.bonds = frozenset(declared)
        self._info: dict[str, TransitionSets] = {}
        for t in self.transitions:
            self._info[t] = self._derive(t)

    def _derive(self, t: str) -> TransitionSets:
        pre = tuple(sorted(x for (x, tt) in self.arcs_in if tt == t))
        post = tuple(sorted(y for (tt, y) in self.arcs_out if tt == t))
        g_pos: set[Entity] = set()
        g_neg: set[Entity] = set()
        for x in pre:
            lab = self.arcs_in[(x, t)]
            g_pos |= lab.positive
            g_neg |= lab.negative
        e_pos: set[Entity] = set()
        for y in post:
            e_pos |= self.arcs_out[(t, y)].positive
        effect = bonds_of(e_pos) - bonds_of(g_pos)
        return TransitionSets(
            guard=Label(frozenset(g_pos), frozenset(g_neg)),
            effects=Label(frozenset(e_pos)),
            effect=effect,
            pre_places=pre,
            post_places=post,
        )

    def info(self, t: str) -> TransitionSets:
        try:
            return self._info[t]
        except KeyError:
            raise UnknownTransitionError(t) from None

    def label_in(self, place: str, t: str) -> Label:
        return self.arcs_in.get((place, t), EMPTY_LABEL)

    def label_out(self, t: str, place: str) -> Label:
        return self.arcs_out.get((t, place), EMPTY_LABEL)

    def sorted_transitions(self) -> list[str]:
        return sorted(self.transitions)

    def __repr__(self) -> str:
        return (f"Net({self.name!r}, bases={len(self.bases)}, "
                f"places={len(self.places)}, transitions={len(self.transitions)})")


class UnknownTransitionError(KeyError):
    def __init__(self, t: str):
        super().__init__(t)
        self.transition = t

    def __str__(self) -> str:
        return f"unknown transition {self.transition!r}"


def transition_sets(net: Net, t: str) -> TransitionSets:
    """Requirements, emissions, created bonds and pre/post places of ``t``."""
    return net.info(t)


@dataclass(frozen=True)
class Violation:
    clause: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"[{self.clause}] {self.subject}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "ok: 0 violations"
        lines = [f"{len(self.violations)} violation(s):"]
        lines += [f"  {v}" for v in self.violations]
        return "\n".join(lines)


def _check_label(add, where: str, lab: Label, bases: frozenset[str]) -> None:
    for sign, ents in (("positive", lab.positive), ("negative", lab.negative)):
        ent_bases = bases_of(ents)
        for b in sorted(ent_bases - bases):
            add("unknown-base", where, f"{sign} entry names undeclared token {b!r}")
        for bond in sorted(bonds_of(ents)):
            if bond.first == bond.second:
                add("self-bond", where, f"bond {bond} joins a token with itself")
            for end in bond.ends:
                if end not in ent_bases:
                    add("label-endpoints", where,
                        f"bond {bond} lacks {sign} endpoint token {end!r}")
    for b in sorted(bases_of(lab.positive) & bases_of(lab.negative)):
        add("label-sign", where, f"token {b!r} appears both required and forbidden")
    for bond in sorted(bonds_of(lab.positive) & bonds_of(lab.negative)):
        add("label-sign", where, f"bond {bond} appears both required and forbidden")


def check_well_formed(net: Net, m0: Marking) -> ValidationReport:
    """Total validation of a net plus initial marking.

    Checks, per transition: tokens are neither erased nor invented
    between incoming and outgoing labels; no required bond is dropped;
    outgoing labels are pairwise disjoint (no cloning); outgoing labels
    carry no negated entries.  Checks the initial marking places every
    token exactly once and keeps bond endpoints together.
    """
    found: list[Violation] = []

    def add(clause: str, subject: str, message: str) -> None:
        found.append(Violation(clause, subject, message))

    for (x, t), lab in sorted(net.arcs_in.items()):
        where = f"arc {x}->{t}"
        if x not in net.places:
            add("unknown-place", where, f"undeclared place {x!r}")
        if t not in net.transitions:
            add("unknown-transition", where, f"undeclared transition {t!r}")
        _check_label(add, where, lab, net.bases)
    for (t, y), lab in sorted(net.arcs_out.items()):
        where = f"arc {t}->{y}"
        if y not in net.places:
            add("unknown-place", where, f"undeclared place {y!r}")
        if t not in net.transitions:
            add("unknown-transition", where, f"undeclared transition {t!r}")
        _check_label(add, where, lab, net.bases)
        if lab.negative:
            neg = ", ".join(entity_str(e) for e in sort_entities(lab.negative))
            add("outgoing-negative", where,
                f"negative entry on outgoing arc: {neg}")

    for t in net.sorted_transitions():
        info = net.info(t)
        g_bases = info.guard.pos_bases
        e_bases = info.effects.pos_bases
        for b in sorted(g_bases - e_bases):
            add("token-erasure", f"transition {t}",
                f"token {b!r} is taken but never emitted")
        for b in sorted(e_bases - g_bases):
            add("token-erasure", f"transition {t}",
                f"token {b!r} is emitted but never taken")
        for bond in sorted(info.guard.pos_bonds - info.effects.pos_bonds):
            add("bond-erasure", f"transition {t}",
                f"required bond {bond} is missing from every outgoing label")
        posts = info.post_places
        for i, y1 in enumerate(posts):
            for y2 in posts[i + 1:]:
                shared = net.label_out(t, y1).positive & net.label_out(t, y2).positive
                for e in sort_entities(shared):
                    add("output-overlap", f"transition {t}",
                        f"{entity_str(e)} emitted to both {y1} and {y2}")

    for place, ents in m0.items():
        where = f"marking {place}"
        if place not in net.places:
            add("unknown-place", where, f"undeclared place {place!r}")
        for b in sorted(bases_of(ents) - net.bases):
            add("unknown-base", where, f"undeclared token {b!r}")
        for bond in sorted(bonds_of(ents)):
            if bond.first == bond.second:
                add("self-bond", where, f"bond {bond} joins a token with itself")
            for end in bond.ends:
                if end not in ents:
                    add("marking-endpoints", where,
                        f"bond {bond} present without its token {end!r}")
    for b in sorted(net.bases):
        spots = m0.places_of(b)
        if len(spots) == 0:
            add("initial-placement", f"token {b}", "absent from the initial marking")
        elif len(spots) > 1:
            add("initial-placement", f"token {b}",
                f"placed in {len(spots)} places: {', '.join(spots)}")
    for bond in sorted(net.bonds):
        spots = m0.places_of(bond)
        if len(spots) > 1:
            add("initial-placement", f"bond {bond}",
                f"placed in {len(spots)} places: {', '.join(spots)}")

    return ValidationReport(tuple(found))
