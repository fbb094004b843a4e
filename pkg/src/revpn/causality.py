"""Causal comparison of runs: paths, equivalence, concurrency.

Two runs from the same start count as equivalent when they leave the
tokens in identical places and their causal paths (chains of directly
dependent transition occurrences) tell the same story by transition
name; the numeric keys may differ.  Trace equivalence is decided
semantically by replaying both traces and comparing endpoints, with a
bounded rewrite search over the two trace axioms (swap adjacent
concurrent actions, cancel a firing against its own reversal) kept as
an independent oracle for small traces.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .net import Marking, Net, entity_str, sort_entities
from .semantics import (
    Action,
    CausePair,
    ExecState,
    NotEnabledError,
    Occurrence,
    Trace,
    initial_state,
    step,
)


class ReplayError(Exception):
    """A trace failed to replay from its initial state."""

    def __init__(self, index: int, action: Action, reason: str):
        super().__init__(f"step {index + 1} ({action}): {reason}")
        self.index = index
        self.action = action
        self.reason = reason


def replay(net: Net, m0: Marking, trace: Trace) -> ExecState:
    """Run a trace from the initial state, failing with the step index."""
    state = initial_state(m0)
    for i, action in enumerate(trace):
        try:
            state = step(net, state, action)
        except NotEnabledError as exc:
            raise ReplayError(i, action, exc.reason) from None
    return state


def replay_states(net: Net, m0: Marking, trace: Trace) -> list[ExecState]:
    """All intermediate states of a replay, initial state included."""
    states = [initial_state(m0)]
    for i, action in enumerate(trace):
        try:
            states.append(step(net, states[-1], action))
        except NotEnabledError as exc:
            raise ReplayError(i, action, exc.reason) from None
    return states


def recompute_causes(net: Net, m0: Marking, trace: Trace) -> frozenset[CausePair]:
    """From-scratch causal relation of a trace's final state (replay oracle)."""
    return replay(net, m0, trace).causes


def causal_paths(state: ExecState) -> frozenset[tuple[Occurrence, ...]]:
    """All maximal causal paths over the live occurrences.

    A path chains occurrences that directly depend on one another; the
    maximal ones (extendable at neither end) are returned, every other
    path being one of their sub-chains.  Occurrences with no causal
    neighbours form singleton paths.
    """
    occurrences = state.live_occurrences()
    if not occurrences:
        return frozenset()
    successors: dict[Occurrence, list[Occurrence]] = {o: [] for o in occurrences}
    has_predecessor: set[Occurrence] = set()
    for first, second in sorted(state.causes):
        successors[first].append(second)
        has_predecessor.add(second)
    paths: set[tuple[Occurrence, ...]] = set()
    stack: list[tuple[Occurrence, ...]]
    for source in occurrences:
        if source in has_predecessor:
            continue
        stack = [(source,)]
        while stack:
            path = stack.pop()
            nexts = successors[path[-1]]
            if not nexts:
                paths.add(path)
            else:
                for nxt in nexts:
                    stack.append(path + (nxt,))
    return frozenset(paths)


def path_names(state: ExecState) -> frozenset[tuple[str, ...]]:
    return frozenset(
        tuple(o.transition for o in path) for path in causal_paths(state)
    )


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    witness: str | None = None

    def __bool__(self) -> bool:
        return self.equivalent


def histories_equivalent(s1: ExecState, s2: ExecState) -> EquivalenceVerdict:
    """Histories match when their causal-path families agree by
    transition name and each transition fired-and-not-reversed equally
    often; key values are irrelevant."""
    counts1 = {t: len(ks) for t, ks in s1.history.items()}
    counts2 = {t: len(ks) for t, ks in s2.history.items()}
    if counts1 != counts2:
        for t in sorted(set(counts1) | set(counts2)):
            if counts1.get(t, 0) != counts2.get(t, 0):
                return EquivalenceVerdict(
                    False,
                    f"transition {t} has {counts1.get(t, 0)} live keys on one "
                    f"side and {counts2.get(t, 0)} on the other",
                )
    names1 = path_names(s1)
    names2 = path_names(s2)
    if names1 != names2:
        only = sorted(names1 ^ names2)[0]
        side = "first" if only in names1 else "second"
        return EquivalenceVerdict(
            False,
            f"causal path {' -> '.join(only)} exists only in the {side} state",
        )
    return EquivalenceVerdict(True)


def states_equivalent(s1: ExecState, s2: ExecState) -> EquivalenceVerdict:
    """Identical markings plus equivalent histories."""
    if s1.marking != s2.marking:
        places = sorted(set(s1.marking.places()) | set(s2.marking.places()))
        for p in places:
            if s1.marking[p] != s2.marking[p]:
                def cell(m):
                    return "{%s}" % ", ".join(
                        entity_str(e) for e in sort_entities(m[p])
                    )
                return EquivalenceVerdict(
                    False,
                    f"place {p} holds {cell(s1.marking)} vs {cell(s2.marking)}",
                )
    return histories_equivalent(s1, s2)


def actions_concurrent(net: Net, state: ExecState, a1: Action, a2: Action) -> bool:
    """Two enabled actions are concurrent when each stays enabled after
    the other and both interleavings end in equivalent states."""
    s1 = step(net, state, a1)
    s2 = step(net, state, a2)
    try:
        s12 = step(net, s1, a2)
        s21 = step(net, s2, a1)
    except NotEnabledError:
        return False
    return states_equivalent(s12, s21).equivalent


def traces_equivalent(net: Net, m0: Marking, sigma1: Trace, sigma2: Trace) -> EquivalenceVerdict:
    """Semantic decision: replay both traces and compare the endpoints."""
    return states_equivalent(replay(net, m0, sigma1), replay(net, m0, sigma2))


def _normalize(trace: Trace) -> Trace:
    return tuple(
        a if a.is_forward else Action.reverse(a.transition, "co") for a in trace
    )


def _rewrite_neighbours(net: Net, m0: Marking, trace: Trace) -> list[Trace]:
    """Traces one axiom application away: cancel an adjacent opposite
    pair of the same transition, or swap an adjacent concurrent pair."""
    try:
        states = replay_states(net, m0, trace)
    except ReplayError:
        return []
    out: list[Trace] = []
    for i in range(len(trace) - 1):
        a, b = trace[i], trace[i + 1]
        if a.transition == b.transition and a.is_forward != b.is_forward:
            out.append(trace[:i] + trace[i + 2:])
        if a != b:
            try:
                if actions_concurrent(net, states[i], a, b):
                    out.append(trace[:i] + (b, a) + trace[i + 2:])
            except NotEnabledError:
                pass
    valid = []
    for candidate in out:
        try:
            replay(net, m0, candidate)
        except ReplayError:
            continue
        valid.append(candidate)
    return valid


def rewrite_equivalent(
    net: Net,
    m0: Marking,
    sigma1: Trace,
    sigma2: Trace,
    max_traces: int = 4000,
) -> bool | None:
    """Bounded syntactic oracle for trace equivalence.

    Explores the closure of both traces under the two axioms (reverse
    actions normalised to causal order) and reports True when the
    closures meet, False when both were exhausted without meeting, and
    None when the bound was hit first.
    """
    start1, start2 = _normalize(sigma1), _normalize(sigma2)
    if start1 == start2:
        return True
    seen = {start1: 1, start2: 2}
    queue: deque[tuple[Trace, int]] = deque([(start1, 1), (start2, 2)])
    expansions = 0
    while queue:
        trace, side = queue.popleft()
        expansions += 1
        if expansions > max_traces:
            return None
        for neighbour in _rewrite_neighbours(net, m0, trace):
            previous = seen.get(neighbour)
            if previous is None:
                seen[neighbour] = side
                queue.append((neighbour, side))
            elif previous != side:
                return True
    return False
