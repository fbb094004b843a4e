"""Execution semantics: forward firing and the three reversal modes.

A state couples a marking with a per-transition history of numeric keys
(one key per executed-and-not-yet-reversed firing; key order is global
execution order) and with the direct causal-dependence pairs between
live transition occurrences.

Reversal modes differ only in when a transition may be undone:

* ``bt``  - backtracking: only the globally most recent firing;
* ``co``  - causal order: any firing whose dependents were undone first
  and whose emitted tokens/bonds still sit in its output places;
* ``oco`` - out of causal order: any executed firing.

One marking update implements all three (the out-of-causal-order rule);
components displaced by a reversal return to the place after the last
surviving transition that manipulated them, else to their initial
place.  The literal backtracking/causal-order updates are kept in
``reference_reverse`` as a cross-check oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, NamedTuple

from .net import (
    Bond,
    Entity,
    Marking,
    Net,
    connected_component,
    entity_str,
    sort_entities,
)

REVERSE_MODES = ("bt", "co", "oco")


class Occurrence(NamedTuple):
    transition: str
    key: int

    def __str__(self) -> str:
        return f"({self.transition}, {self.key})"


CausePair = tuple[Occurrence, Occurrence]

EMPTY_KEYS: frozenset[int] = frozenset()


@dataclass(frozen=True)
class Action:
    """One step of a run: fire a transition or reverse it under a mode."""

    transition: str
    direction: str  # "forward" | "reverse"
    mode: str | None = None

    @classmethod
    def forward(cls, t: str) -> "Action":
        return cls(t, "forward")

    @classmethod
    def reverse(cls, t: str, mode: str) -> "Action":
        if mode not in REVERSE_MODES:
            raise ValueError(f"unknown reversal mode {mode!r}")
        return cls(t, "reverse", mode)

    @property
    def is_forward(self) -> bool:
        return self.direction == "forward"

    def __str__(self) -> str:
        if self.is_forward:
            return f"fire {self.transition}"
        return f"reverse {self.transition} mode={self.mode}"


Trace = tuple[Action, ...]


class ExecState:
    """Immutable snapshot: marking, history, direct causes, initial marking."""

    __slots__ = ("marking", "history", "causes", "initial", "_key")

    def __init__(
        self,
        marking: Marking,
        history: Mapping[str, frozenset[int]],
        causes: frozenset[CausePair],
        initial: Marking,
    ):
        self.marking = marking
        self.history = {t: ks for t, ks in history.items() if ks}
        self.causes = causes
        self.initial = initial
        self._key = (
            marking,
            tuple(sorted((t, tuple(sorted(ks))) for t, ks in self.history.items())),
            tuple(sorted(causes)),
        )

    def keys_of(self, t: str) -> frozenset[int]:
        return self.history.get(t, EMPTY_KEYS)

    def live_occurrences(self) -> list[Occurrence]:
        out = [Occurrence(t, k) for t, ks in self.history.items() for k in ks]
        out.sort()
        return out

    def max_key(self) -> int:
        """Largest live key, 0 when nothing has fired."""
        return max((k for ks in self.history.values() for k in ks), default=0)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ExecState) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        hist = ", ".join(
            f"{t}:{sorted(ks)}" for t, ks in sorted(self.history.items())
        )
        return f"ExecState({self.marking!r}, history={{{hist}}})"


def initial_state(m0: Marking) -> ExecState:
    return ExecState(m0, {}, frozenset(), m0)


class NotEnabledError(Exception):
    """A firing was attempted that the current state does not permit."""

    def __init__(self, action: Action, reason: str):
        super().__init__(f"{action}: {reason}")
        self.action = action
        self.reason = reason


class CorruptStateError(Exception):
    """A state violates an invariant every reachable state satisfies."""


def forward_blocker(net: Net, state: ExecState, t: str,
                    ignore_negatives: bool = False) -> str | None:
    """Reason ``t`` cannot fire, or None when it is forward-enabled.

    ``ignore_negatives`` skips the absence conditions; property checks
    use it to tell a firing blocked only by a negated entry apart from
    one missing actual tokens.
    """
    info = net.info(t)
    m = state.marking
    for x in info.pre_places:
        lab = net.label_in(x, t)
        cell = m[x]
        for b in sort_entities(lab.pos_bases):
            if b not in cell:
                return f"token {b} missing from place {x}"
        for bond in sorted(lab.pos_bonds):
            if bond not in cell:
                return f"bond {bond} missing from place {x}"
        if ignore_negatives:
            continue
        for b in sort_entities(lab.neg_bases):
            if b in cell:
                return f"token {b} must be absent from place {x}"
        for bond in sorted(lab.neg_bonds):
            if bond in cell:
                return f"bond {bond} must be absent from place {x}"
    posts = info.post_places
    for i, y1 in enumerate(posts):
        for y2 in posts[i + 1:]:
            for a in sort_entities(net.label_out(t, y1).pos_bases):
                for b in sort_entities(net.label_out(t, y2).pos_bases):
                    for x in info.pre_places:
                        if b in connected_component(a, m[x]):
                            return (f"tokens {a} and {b} are routed to distinct "
                                    f"places {y1} and {y2} but are connected in {x}")
    for y in posts:
        for bond in sorted(net.label_out(t, y).pos_bonds):
            for x in info.pre_places:
                if bond in m[x] and bond not in net.label_in(x, t).positive:
                    return (f"emitted bond {bond} already exists in input place {x} "
                            f"but is not required there")
    return None


def forward_enabled(net: Net, state: ExecState, t: str) -> bool:
    return forward_blocker(net, state, t) is None


def _consumed(net: Net, state: ExecState, t: str) -> frozenset[Entity]:
    """Everything a firing of ``t`` would pick up, components included."""
    m = state.marking
    used: set[Entity] = set()
    for x in net.info(t).pre_places:
        for a in net.label_in(x, t).pos_bases:
            used |= connected_component(a, m[x])
    return frozenset(used)


def fire_forward(net: Net, state: ExecState, t: str) -> ExecState:
    """Fire ``t`` forward: inputs lose the components of their required
    tokens, outputs gain the emitted entries plus the transported
    components; a fresh key (largest live key + 1) is recorded and a
    causal pair is added for every earlier live occurrence that produced
    part of what this firing consumes."""
    blocker = forward_blocker(net, state, t)
    if blocker is not None:
        raise NotEnabledError(Action.forward(t), blocker)
    info = net.info(t)
    m = state.marking

    removed: dict[str, set[Entity]] = {}
    for x in info.pre_places:
        taken: set[Entity] = set()
        for a in net.label_in(x, t).pos_bases:
            taken |= connected_component(a, m[x])
        removed[x] = taken
    added: dict[str, set[Entity]] = {}
    for y in info.post_places:
        lab = net.label_out(t, y)
        gain: set[Entity] = set(lab.positive)
        for a in lab.pos_bases:
            for x in info.pre_places:
                if a in net.label_in(x, t).pos_bases:
                    gain |= connected_component(a, m[x])
        added[y] = gain
    changes: dict[str, frozenset[Entity]] = {}
    for p in set(removed) | set(added):
        changes[p] = (m[p] - removed.get(p, set())) | added.get(p, set())

    key = state.max_key() + 1
    occurrence = Occurrence(t, key)
    history = dict(state.history)
    history[t] = state.keys_of(t) | {key}

    consumed = _consumed(net, state, t)
    new_pairs = {
        (prior, occurrence)
        for prior in state.live_occurrences()
        if prior.key < key and net.info(prior.transition).effects_pos & consumed
    }

    return ExecState(
        m.update(changes), history, state.causes | new_pairs, state.initial
    )


def reverse_blocker(net: Net, state: ExecState, t: str, mode: str) -> str | None:
    """Reason ``t`` cannot be reversed under ``mode``, or None."""
    if mode not in REVERSE_MODES:
        raise ValueError(f"unknown reversal mode {mode!r}")
    info = net.info(t)
    keys = state.keys_of(t)
    if not keys:
        return "transition has never fired (empty history)"
    if mode == "oco":
        return None
    top = max(keys)
    if mode == "bt":
        if top != state.max_key():
            return (f"history key {top} is not the highest value among all "
                    f"transitions (current maximum is {state.max_key()})")
        return None
    # co: emitted entries present in the output places, no live dependent
    m = state.marking
    for y in info.post_places:
        cell = m[y]
        for e in sort_entities(net.label_out(t, y).positive):
            if e not in cell:
                return f"emitted {entity_str(e)} is no longer in place {y}"
    target = Occurrence(t, top)
    dependents = sorted(snd for fst, snd in state.causes if fst == target)
    if dependents:
        return f"occurrence {target} has a live causal dependent {dependents[0]}"
    return None


def reverse_enabled(net: Net, state: ExecState, t: str, mode: str) -> bool:
    return reverse_blocker(net, state, t, mode) is None


def last_transition(net: Net, component: Iterable[Entity], history: Mapping[str, frozenset[int]]) -> str | None:
    """The live transition that manipulated ``component`` most recently:
    among transitions with a non-empty history whose emissions meet the
    component, the one holding the largest key.  None when no candidate
    exists."""
    comp = component if isinstance(component, frozenset) else frozenset(component)
    best: str | None = None
    best_key = -1
    for t in sorted(net.transitions):
        keys = history.get(t)
        if not keys:
            continue
        if not (net.info(t).effects_pos & comp):
            continue
        top = max(keys)
        if top > best_key:
            best, best_key = t, top
    return best


def last_place(
    net: Net,
    component: Iterable[Entity],
    history: Mapping[str, frozenset[int]],
    m0: Marking,
) -> str | None:
    """Where ``component`` belongs: the output place of its last live
    manipulating transition, else the initial place holding all of it."""
    comp = component if isinstance(component, frozenset) else frozenset(component)
    t = last_transition(net, comp, history)
    if t is not None:
        spots = [y for y in net.info(t).post_places
                 if net.label_out(t, y).positive & comp]
        if len(spots) != 1:
            raise CorruptStateError(
                f"ambiguous outgoing place for component "
                f"{{{', '.join(entity_str(e) for e in sort_entities(comp))}}} "
                f"after transition {t}: {spots}"
            )
        return spots[0]
    if not comp:
        return None
    for x in sorted(net.places):
        if comp <= m0[x]:
            return x
    return None


def _drop_occurrence(causes: frozenset[CausePair], occ: Occurrence) -> frozenset[CausePair]:
    return frozenset(p for p in causes if p[0] != occ and p[1] != occ)


def fire_reverse(net: Net, state: ExecState, t: str, mode: str) -> ExecState:
    """Reverse the most recent firing of ``t`` under ``mode``.

    One update serves all modes: the largest key of ``t`` is dropped,
    every bond this transition created is deleted, and each resulting
    sub-component of the tokens it emitted relocates to the place after
    the last surviving transition that manipulated it (its initial place
    when none survives).  On backtracking/causal-order enabling domains
    this coincides with the literal rules in ``reference_reverse``.
    """
    blocker = reverse_blocker(net, state, t, mode)
    if blocker is not None:
        raise NotEnabledError(Action.reverse(t, mode), blocker)
    info = net.info(t)
    m = state.marking
    top = max(state.keys_of(t))
    history = dict(state.history)
    history[t] = state.keys_of(t) - {top}

    created = info.effect
    changes: dict[str, frozenset[Entity]] = {
        p: m[p] - created for p in m.places()
    }
    seen: set[Entity] = set()
    for a in sorted(info.effects_bases):
        if a in seen:
            continue
        source = m.place_of(a)
        if source is None:
            raise CorruptStateError(f"token {a} is in no place")
        component = connected_component(a, m[source] - created)
        seen |= component
        destination = last_place(net, component, history, state.initial)
        if destination is None:
            raise CorruptStateError(
                f"no destination for component of token {a} while reversing {t}"
            )
        if destination != source:
            changes[source] = changes[source] - component
            changes[destination] = changes.get(destination, m[destination] - created) | component

    return ExecState(
        m.update(changes),
        history,
        _drop_occurrence(state.causes, Occurrence(t, top)),
        state.initial,
    )


def reference_reverse(net: Net, state: ExecState, t: str, rule: str) -> ExecState:
    """Literal reversal updates, used purely as a cross-check oracle.

    ``bt-literal`` demands backtracking enabledness, ``co-literal``
    causal-order enabledness; both then move each emitted token's
    component (minus the bonds this transition created) from the output
    places back to the input place that required it.
    """
    if rule == "bt-literal":
        mode = "bt"
    elif rule == "co-literal":
        mode = "co"
    else:
        raise ValueError(f"unknown reference rule {rule!r}")
    blocker = reverse_blocker(net, state, t, mode)
    if blocker is not None:
        raise NotEnabledError(Action.reverse(t, mode), blocker)
    info = net.info(t)
    m = state.marking
    top = max(state.keys_of(t))
    history = dict(state.history)
    history[t] = state.keys_of(t) - {top}

    created = info.effect
    added: dict[str, set[Entity]] = {}
    for x in info.pre_places:
        gain: set[Entity] = set()
        for y in info.post_places:
            shared = net.label_in(x, t).pos_bases & net.label_out(t, y).pos_bases
            for a in shared:
                gain |= connected_component(a, m[y] - created)
        added[x] = gain
    removed: dict[str, set[Entity]] = {}
    for y in info.post_places:
        loss: set[Entity] = set()
        for a in net.label_out(t, y).pos_bases:
            loss |= connected_component(a, m[y])
        removed[y] = loss
    changes: dict[str, frozenset[Entity]] = {}
    for p in set(added) | set(removed):
        changes[p] = (m[p] - removed.get(p, set())) | added.get(p, set())

    return ExecState(
        m.update(changes),
        history,
        _drop_occurrence(state.causes, Occurrence(t, top)),
        state.initial,
    )


def step(net: Net, state: ExecState, action: Action) -> ExecState:
    """Apply one action, dispatching on its direction."""
    if action.is_forward:
        return fire_forward(net, state, action.transition)
    if action.mode not in REVERSE_MODES:
        raise NotEnabledError(action, f"unknown reversal mode {action.mode!r}")
    return fire_reverse(net, state, action.transition, action.mode)


def enabled_forward(net: Net, state: ExecState) -> list[str]:
    return [t for t in net.sorted_transitions() if forward_enabled(net, state, t)]


def enabled_reverse(net: Net, state: ExecState, mode: str) -> list[str]:
    return [t for t in net.sorted_transitions() if reverse_enabled(net, state, t, mode)]


def enabled_actions(net: Net, state: ExecState, mode: str | None = None) -> list[Action]:
    """All enabled actions, forward first, each group sorted by name.

    ``mode`` None means forward-only; otherwise that reversal mode is
    offered alongside forward firings.
    """
    actions = [Action.forward(t) for t in enabled_forward(net, state)]
    if mode is not None:
        actions += [Action.reverse(t, mode) for t in enabled_reverse(net, state, mode)]
    return actions
