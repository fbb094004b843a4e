"""Bounded exploration and the executable metatheory suite.

``reachability_graph`` builds the labelled transition system of a net
per execution mode (forward only, or forward plus one reversal mode),
with canonical state serializations as node identities so runs are
reproducible.  ``random_instance`` produces seed-deterministic
well-formed nets for property campaigns.  ``verify_properties`` replays
the engine's contract as executable checks: token/bond preservation,
key freshness, the last-place invariant, the loop laws of each mode,
enabledness inclusion, agreement of the unified reversal with the
literal rules, the reverse diamond, and the causal-consistency theorem.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field

from . import semantics as sem
from .causality import (
    actions_concurrent,
    histories_equivalent,
    path_names,
    recompute_causes,
    replay,
    rewrite_equivalent,
    states_equivalent,
)
from .net import (
    Bond,
    Entity,
    Label,
    Marking,
    Net,
    bases_of,
    check_well_formed,
    connected_component,
    entity_str,
    sort_entities,
)
from .semantics import Action, ExecState, NotEnabledError, Trace, initial_state
from .dsl import serialize_state, serialize_trace

MODES = ("forward", "bt", "co", "oco")


def _mode_actions(net: Net, state: ExecState, mode: str) -> list[Action]:
    if mode == "forward":
        return sem.enabled_actions(net, state, None)
    return sem.enabled_actions(net, state, mode)


@dataclass
class ReachGraph:
    """Bounded labelled transition system over canonical state keys."""

    root: str
    nodes: dict[str, ExecState]
    edges: set[tuple[str, Action, str]]
    mode: str
    truncated: bool

    def markings(self) -> set[Marking]:
        return {s.marking for s in self.nodes.values()}

    def summary(self) -> str:
        return (f"mode={self.mode} states={len(self.nodes)} "
                f"edges={len(self.edges)} truncated={str(self.truncated).lower()}")

    def to_json(self) -> str:
        return json.dumps(
            {
                "mode": self.mode,
                "root": self.root,
                "states": len(self.nodes),
                "edges": sorted([src, str(a), dst] for src, a, dst in self.edges),
                "truncated": self.truncated,
            },
            indent=2,
        )


def reachability_graph(
    net: Net,
    m0: Marking,
    mode: str = "forward",
    max_steps: int = 20,
    max_states: int = 10000,
) -> ReachGraph:
    """Breadth-first state space, bounded by depth and node count.

    ``mode`` is ``forward`` (alias ``forward-only``) or one of the
    reversal modes, in which case reversals of that mode are explored
    alongside forward firings.
    """
    if mode == "forward-only":
        mode = "forward"
    if mode not in MODES:
        raise ValueError(f"unknown exploration mode {mode!r}")
    if max_steps <= 0 or max_states <= 0:
        raise ValueError("exploration bounds must be positive")

    root_state = initial_state(m0)
    root = serialize_state(root_state)
    nodes = {root: root_state}
    edges: set[tuple[str, Action, str]] = set()
    queue: deque[tuple[str, int]] = deque([(root, 0)])
    truncated = False
    while queue:
        key, depth = queue.popleft()
        state = nodes[key]
        actions = _mode_actions(net, state, mode)
        if depth >= max_steps:
            if actions:
                truncated = True
            continue
        for action in actions:
            successor = sem.step(net, state, action)
            skey = serialize_state(successor)
            if skey not in nodes:
                if len(nodes) >= max_states:
                    truncated = True
                    continue
                nodes[skey] = successor
                queue.append((skey, depth + 1))
            edges.add((key, action, skey))
    return ReachGraph(root, nodes, edges, mode, truncated)


def forward_reachable_markings(net: Net, m0: Marking, max_markings: int = 20000) -> tuple[set[Marking], bool]:
    """All markings forward execution can reach, to a fixpoint.

    Forward enabledness and the marking update never consult the
    history, so breadth-first search over markings alone terminates on
    these finite token games.  Returns the set and a truncation flag.
    """
    seen = {m0}
    queue = deque([m0])
    truncated = False
    while queue:
        marking = queue.popleft()
        state = ExecState(marking, {}, frozenset(), m0)
        for t in sem.enabled_forward(net, state):
            nxt = sem.fire_forward(net, state, t).marking
            if nxt not in seen:
                if len(seen) >= max_markings:
                    truncated = True
                    continue
                seen.add(nxt)
                queue.append(nxt)
    return seen, truncated


class GenerationError(Exception):
    """The requested size caps admit no usable net."""


def random_instance(
    seed: int,
    max_places: int = 6,
    max_transitions: int = 5,
    max_bases: int = 5,
    bond_chance: float = 0.5,
    guard_bond_chance: float = 0.25,
    negation_chance: float = 0.2,
    initial_bond_chance: float = 0.15,
) -> tuple[Net, Marking]:
    """Seed-deterministic well-formed net with every token placed once.

    Each transition takes a few tokens spread over input places, routes
    them (partitioned, so nothing is cloned) to output places, may bond
    co-located tokens, may require an existing bond it then preserves,
    and may demand the absence of an unrelated token.
    """
    if max_places < 1:
        raise GenerationError("at least one place is required")
    if max_transitions < 0 or max_bases < 0:
        raise GenerationError("size caps must not be negative")
    rng = random.Random(seed)
    n_places = rng.randint(min(2, max_places), max_places)
    n_bases = rng.randint(min(1, max_bases), max_bases)
    places = [f"p{i + 1}" for i in range(n_places)]
    letters = "abcdefghijklmnop"
    bases = [letters[i] for i in range(n_bases)]
    n_transitions = rng.randint(1, max_transitions) if n_bases and max_transitions else 0

    arcs_in: dict[tuple[str, str], Label] = {}
    arcs_out: dict[tuple[str, str], Label] = {}
    transitions = [f"t{i + 1}" for i in range(n_transitions)]
    for t in transitions:
        group_bases = rng.sample(bases, rng.randint(1, min(3, n_bases)))
        rng.shuffle(group_bases)

        def partition(items: list[str]) -> list[list[str]]:
            k = rng.randint(1, min(len(items), n_places))
            groups: list[list[str]] = [[] for _ in range(k)]
            for i, item in enumerate(items):
                groups[i % k].append(item)
            return groups

        in_groups = partition(group_bases)
        out_groups = partition(group_bases)
        in_places = rng.sample(places, len(in_groups))
        out_places = rng.sample(places, len(out_groups))
        out_of = {b: i for i, grp in enumerate(out_groups) for b in grp}

        out_bonds: dict[int, set[Bond]] = {i: set() for i in range(len(out_groups))}
        for i, grp in enumerate(out_groups):
            for j, a in enumerate(grp):
                for b in grp[j + 1:]:
                    if rng.random() < bond_chance:
                        out_bonds[i].add(Bond(a, b))
        in_bonds: dict[int, set[Bond]] = {i: set() for i in range(len(in_groups))}
        for i, grp in enumerate(in_groups):
            for j, a in enumerate(grp):
                for b in grp[j + 1:]:
                    # a required bond must survive into a single output label
                    if out_of[a] == out_of[b] and rng.random() < guard_bond_chance:
                        bond = Bond(a, b)
                        in_bonds[i].add(bond)
                        out_bonds[out_of[a]].add(bond)

        for i, grp in enumerate(in_groups):
            positive: set[Entity] = set(grp) | in_bonds[i]
            negative: set[Entity] = set()
            spare = [b for b in bases if b not in group_bases]
            if spare and rng.random() < negation_chance:
                negative.add(rng.choice(spare))
            arcs_in[(in_places[i], t)] = Label.of(positive, negative)
        for i, grp in enumerate(out_groups):
            arcs_out[(t, out_places[i])] = Label.of(set(grp) | out_bonds[i])

    cells: dict[str, set[Entity]] = {p: set() for p in places}
    for b in bases:
        cells[rng.choice(places)].add(b)
    for p in places:
        here = sorted(bases_of(cells[p]))
        for i, a in enumerate(here):
            for b in here[i + 1:]:
                if rng.random() < initial_bond_chance:
                    cells[p].add(Bond(a, b))
    m0 = Marking(cells)

    net = Net(f"random{seed}", bases, places, transitions, arcs_in, arcs_out)
    report = check_well_formed(net, m0)
    if not report.ok:
        raise GenerationError(f"generator produced an invalid net for seed "
                              f"{seed}: {report}")
    return net, m0


@dataclass
class Bounds:
    """Knobs for property campaigns; every report embeds the seed."""

    depth: int = 8
    walks: int = 3
    seed: int = 0
    max_states: int = 4000
    rewrite_cap: int = 4000
    max_pairs: int = 200


@dataclass(frozen=True)
class PropViolation:
    trace: str
    detail: str

    def __str__(self) -> str:
        return f"{self.detail}\n    trace: {self.trace or '(empty)'}"


@dataclass
class PropertyReport:
    property: str
    seed: int
    checked: int = 0
    violations: list[PropViolation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        status = "pass" if self.passed else "FAIL"
        head = (f"{status} {self.property}: {self.checked} checks, "
                f"{len(self.violations)} violation(s) [seed {self.seed}]")
        return "\n".join([head] + [f"  {v}" for v in self.violations])

    def to_json(self) -> dict:
        return {
            "property": self.property,
            "seed": self.seed,
            "checked": self.checked,
            "violations": [
                {"trace": v.trace, "detail": v.detail} for v in self.violations
            ],
        }


class _Campaign:
    """Shared walk material for the per-property checkers.

    Walks are tagged with the reversal mode they ran under, because the
    cause-respecting laws (the causal-order loop converse, strategy
    agreement, the causal-order diamond) are only promised on states
    reachable within the backtracking/causal-order relations; states
    that only out-of-causal-order reversal can produce genuinely break
    them.
    """

    def __init__(self, net: Net, m0: Marking, bounds: Bounds):
        self.net = net
        self.m0 = m0
        self.bounds = bounds
        rng = random.Random(bounds.seed)
        # walk: (mode, trace, states) with len(states) == len(trace) + 1
        self.walks: list[tuple[str, Trace, list[ExecState]]] = []
        for mode in ("bt", "co", "oco"):
            for _ in range(bounds.walks):
                self.walks.append((mode,) + self._walk(mode, rng))

    def _walk(self, mode: str, rng: random.Random) -> tuple[Trace, list[ExecState]]:
        state = initial_state(self.m0)
        states = [state]
        actions: list[Action] = []
        for _ in range(self.bounds.depth):
            options = _mode_actions(self.net, state, mode)
            if not options:
                break
            action = rng.choice(options)
            state = sem.step(self.net, state, action)
            actions.append(action)
            states.append(state)
        return tuple(actions), states

    def steps(self, modes: tuple[str, ...] = ("bt", "co", "oco")):
        for mode, trace, states in self.walks:
            if mode not in modes:
                continue
            for i, action in enumerate(trace):
                yield trace[: i + 1], states[i], action, states[i + 1]

    def states(self, modes: tuple[str, ...] = ("bt", "co", "oco")):
        for mode, trace, states in self.walks:
            if mode not in modes:
                continue
            for i, state in enumerate(states):
                yield trace[:i], state


def _place_components(marking: Marking, place: str) -> list[frozenset[Entity]]:
    cell = marking[place]
    components: list[frozenset[Entity]] = []
    seen: set[Entity] = set()
    for base in sorted(bases_of(cell)):
        if base in seen:
            continue
        comp = connected_component(base, cell)
        seen |= comp
        components.append(comp)
    return components


def _bond_places(marking: Marking) -> dict[Bond, list[str]]:
    spots: dict[Bond, list[str]] = {}
    for place in marking.places():
        for e in marking[place]:
            if isinstance(e, Bond):
                spots.setdefault(e, []).append(place)
    return spots


def _fmt(trace: Trace) -> str:
    return "; ".join(str(a) for a in trace)


def _check_token_preservation(c: _Campaign, report: PropertyReport) -> None:
    for trace, state in c.states():
        report.checked += 1
        for base in sorted(c.net.bases):
            spots = state.marking.places_of(base)
            if len(spots) != 1:
                report.violations.append(PropViolation(
                    _fmt(trace),
                    f"token {base} occupies {len(spots)} places: {spots}"))


def _check_bond_linearity(c: _Campaign, report: PropertyReport) -> None:
    for trace, before, action, after in c.steps():
        report.checked += 1
        for bond, spots in _bond_places(after.marking).items():
            if len(spots) > 1:
                report.violations.append(PropViolation(
                    _fmt(trace), f"bond {bond} occupies places {spots}"))
        effect = c.net.info(action.transition).effect
        bonds_before = set(_bond_places(before.marking))
        bonds_after = set(_bond_places(after.marking))
        created = bonds_after - bonds_before
        destroyed = bonds_before - bonds_after
        if action.is_forward:
            want_created, want_destroyed = effect, frozenset()
        else:
            want_created, want_destroyed = frozenset(), effect
        if created != want_created or destroyed != want_destroyed:
            report.violations.append(PropViolation(
                _fmt(trace),
                f"{action}: created {sorted(map(str, created))} destroyed "
                f"{sorted(map(str, destroyed))} but the transition's effect "
                f"is {sorted(map(str, effect))}"))


def _check_key_distinctness(c: _Campaign, report: PropertyReport) -> None:
    for trace, before, action, after in c.steps():
        report.checked += 1
        keys = [k for ks in after.history.values() for k in ks]
        if len(keys) != len(set(keys)):
            report.violations.append(PropViolation(
                _fmt(trace), f"duplicate history keys: {sorted(keys)}"))
        if action.is_forward:
            new = max(after.keys_of(action.transition))
            if any(k >= new for k in
                   (k for ks in before.history.values() for k in ks)):
                report.violations.append(PropViolation(
                    _fmt(trace),
                    f"fresh key {new} does not exceed every live key"))


def _check_last_place(c: _Campaign, report: PropertyReport) -> None:
    for trace, state in c.states():
        for place in state.marking.places():
            for comp in _place_components(state.marking, place):
                report.checked += 1
                home = sem.last_place(c.net, comp, state.history, c.m0)
                if home != place:
                    names = ", ".join(entity_str(e) for e in sort_entities(comp))
                    report.violations.append(PropViolation(
                        _fmt(trace),
                        f"component {{{names}}} sits in {place} but belongs "
                        f"after its last transition in {home}"))


def _check_loop(c: _Campaign, report: PropertyReport, mode: str) -> None:
    for trace, state in c.states():
        for t in sem.enabled_forward(c.net, state):
            report.checked += 1
            fired = sem.fire_forward(c.net, state, t)
            if not sem.reverse_enabled(c.net, fired, t, mode):
                report.violations.append(PropViolation(
                    _fmt(trace),
                    f"{t} not {mode}-reversible immediately after firing"))
                continue
            back = sem.fire_reverse(c.net, fired, t, mode)
            if back != state:
                report.violations.append(PropViolation(
                    _fmt(trace),
                    f"fire {t} then reverse ({mode}) is not the identity"))
    if mode == "co":
        # The converse direction lives on cause-respecting runs only.
        # A negated entry may legitimately block the re-firing (absence
        # conditions are invisible to co-enabledness, so an unrelated
        # token can wander into the way); everything else must restore.
        for trace, state in c.states(modes=("bt", "co")):
            for t in sem.enabled_reverse(c.net, state, "co"):
                report.checked += 1
                undone = sem.fire_reverse(c.net, state, t, "co")
                if not sem.forward_enabled(c.net, undone, t):
                    if sem.forward_blocker(c.net, undone, t,
                                           ignore_negatives=True) is None:
                        continue
                    report.violations.append(PropViolation(
                        _fmt(trace),
                        f"{t} not forward-enabled right after co-reversal"))
                    continue
                redone = sem.fire_forward(c.net, undone, t)
                if redone.marking != state.marking:
                    report.violations.append(PropViolation(
                        _fmt(trace),
                        f"co-reverse {t} then fire changed the marking"))
                    continue
                verdict = histories_equivalent(redone, state)
                if not verdict:
                    report.violations.append(PropViolation(
                        _fmt(trace),
                        f"co-reverse {t} then fire broke history "
                        f"equivalence: {verdict.witness}"))


def _check_inclusion(c: _Campaign, report: PropertyReport) -> None:
    for trace, state in c.states():
        for t in c.net.sorted_transitions():
            report.checked += 1
            bt = sem.reverse_enabled(c.net, state, t, "bt")
            co = sem.reverse_enabled(c.net, state, t, "co")
            oco = sem.reverse_enabled(c.net, state, t, "oco")
            if bt and not co:
                report.violations.append(PropViolation(
                    _fmt(trace), f"{t} backtracking-enabled but not co-enabled"))
            if co and not oco:
                report.violations.append(PropViolation(
                    _fmt(trace), f"{t} co-enabled but not oco-enabled"))


def _check_agreement(c: _Campaign, report: PropertyReport) -> None:
    for trace, state in c.states(modes=("bt", "co")):
        for t in c.net.sorted_transitions():
            if not sem.reverse_enabled(c.net, state, t, "co"):
                continue
            report.checked += 1
            via_co = sem.fire_reverse(c.net, state, t, "co")
            via_oco = sem.fire_reverse(c.net, state, t, "oco")
            literal = sem.reference_reverse(c.net, state, t, "co-literal")
            if not (via_co == via_oco == literal):
                report.violations.append(PropViolation(
                    _fmt(trace),
                    f"reversing {t}: unified rule and literal causal-order "
                    f"rule disagree"))
            if sem.reverse_enabled(c.net, state, t, "bt"):
                via_bt = sem.fire_reverse(c.net, state, t, "bt")
                bt_literal = sem.reference_reverse(c.net, state, t, "bt-literal")
                if not (via_bt == bt_literal == via_co):
                    report.violations.append(PropViolation(
                        _fmt(trace),
                        f"reversing {t}: backtracking disagrees with the "
                        f"other strategies"))


def _diamond_sites(c: _Campaign):
    """States paired with the reversal mode whose diamond applies there.

    The out-of-causal-order diamond holds anywhere; the causal-order one
    is checked on cause-respecting runs, matching its proof obligations.
    """
    for trace, state in c.states(modes=("bt", "co")):
        yield trace, state, "co"
    for trace, state in c.states():
        yield trace, state, "oco"


def _check_reverse_diamond(c: _Campaign, report: PropertyReport) -> None:
    for trace, state, mode in _diamond_sites(c):
        enabled = sem.enabled_reverse(c.net, state, mode)
        for i, t1 in enumerate(enabled):
            for t2 in enabled[i + 1:]:
                report.checked += 1
                try:
                    one = sem.fire_reverse(
                        c.net, sem.fire_reverse(c.net, state, t1, mode), t2, mode)
                    two = sem.fire_reverse(
                        c.net, sem.fire_reverse(c.net, state, t2, mode), t1, mode)
                except NotEnabledError as exc:
                    report.violations.append(PropViolation(
                        _fmt(trace),
                        f"{mode}: second reversal disabled: {exc}"))
                    continue
                if one != two:
                    report.violations.append(PropViolation(
                        _fmt(trace),
                        f"{mode}: reversing {t1},{t2} in either order "
                        f"should commute"))


def _check_diamond_permutation(c: _Campaign, report: PropertyReport) -> None:
    rng = random.Random(c.bounds.seed + 1)
    for trace, state, mode in _diamond_sites(c):
        enabled = sem.enabled_reverse(c.net, state, mode)
        if len(enabled) < 2:
            continue
        report.checked += 1
        order1 = list(enabled)
        order2 = list(enabled)
        rng.shuffle(order1)
        rng.shuffle(order2)
        try:
            s1 = state
            for t in order1:
                s1 = sem.fire_reverse(c.net, s1, t, mode)
            s2 = state
            for t in order2:
                s2 = sem.fire_reverse(c.net, s2, t, mode)
        except NotEnabledError as exc:
            report.violations.append(PropViolation(
                _fmt(trace), f"{mode}: permutation blocked: {exc}"))
            continue
        if s1 != s2:
            report.violations.append(PropViolation(
                _fmt(trace),
                f"{mode}: permutations {order1} vs {order2} of the same "
                f"reversals reached different states"))


def _check_incremental_causes(c: _Campaign, report: PropertyReport) -> None:
    for _, trace, states in c.walks:
        report.checked += 1
        expected = recompute_causes(c.net, c.m0, trace)
        if states[-1].causes != expected:
            report.violations.append(PropViolation(
                _fmt(trace),
                "incrementally maintained causes differ from replay"))


def _check_forward_reachability(c: _Campaign, report: PropertyReport) -> None:
    forward, truncated = forward_reachable_markings(c.net, c.m0)
    if truncated:
        return
    graph = reachability_graph(
        c.net, c.m0, "co",
        max_steps=min(c.bounds.depth, 6),
        max_states=c.bounds.max_states,
    )
    for marking in graph.markings():
        report.checked += 1
        if marking not in forward:
            report.violations.append(PropViolation(
                "(reachability graph)",
                f"co-reachable marking {marking!r} is not forward-reachable"))


def _check_normal_form(c: _Campaign, report: PropertyReport) -> None:
    for mode, trace, states in c.walks:
        if mode != "co" or all(a.is_forward for a in trace) or not trace:
            continue
        report.checked += 1
        closure = _rewrite_closure(c.net, c.m0, trace, c.bounds.rewrite_cap)
        if closure is None:
            report.checked -= 1  # bound hit, inconclusive
            continue
        normal = [candidate for candidate in closure if _is_normal_form(candidate)]
        if not normal:
            report.violations.append(PropViolation(
                _fmt(trace),
                "no reverse-prefix-then-forward equivalent found in the "
                "full rewrite closure"))
            continue
        # from the initial state the reverse prefix is necessarily empty,
        # so the witness also shows the endpoint is forward-reproducible
        for candidate in normal:
            endpoint = replay(c.net, c.m0, candidate)
            verdict = states_equivalent(states[-1], endpoint)
            if not verdict.equivalent:
                report.violations.append(PropViolation(
                    _fmt(trace),
                    f"normal form {_fmt(candidate)} ends inequivalently: "
                    f"{verdict.witness}"))
                break


def _is_normal_form(trace: Trace) -> bool:
    seen_forward = False
    for action in trace:
        if action.is_forward:
            seen_forward = True
        elif seen_forward:
            return False
    return True


def _rewrite_closure(net: Net, m0: Marking, trace: Trace, cap: int) -> set[Trace] | None:
    from .causality import _normalize, _rewrite_neighbours

    start = _normalize(trace)
    seen = {start}
    queue = deque([start])
    while queue:
        if len(seen) > cap:
            return None
        current = queue.popleft()
        for neighbour in _rewrite_neighbours(net, m0, current):
            if neighbour not in seen:
                seen.add(neighbour)
                queue.append(neighbour)
    return seen


def enumerate_co_executions(net: Net, m0: Marking, depth: int, cap: int = 20000) -> tuple[list[tuple[Trace, ExecState]], bool]:
    """Every co-mode execution (trace and endpoint) up to ``depth``.

    The flag reports whether the run *cap* cut the enumeration short;
    stopping at the depth bound is part of the contract.
    """
    runs: list[tuple[Trace, ExecState]] = []
    stack: list[tuple[Trace, ExecState]] = [((), initial_state(m0))]
    while stack:
        trace, state = stack.pop()
        runs.append((trace, state))
        if len(runs) >= cap:
            return runs, True
        if len(trace) >= depth:
            continue
        for action in reversed(_mode_actions(net, state, "co")):
            stack.append((trace + (action,), sem.step(net, state, action)))
    return runs, False


def check_theorem1(
    net: Net,
    m0: Marking,
    bounds: Bounds,
) -> PropertyReport:
    """Equivalent endpoints if and only if rewrite-equivalent traces.

    Enumerates every co-execution up to the depth bound, groups the
    endpoints by semantic equivalence (marking plus causal-path family),
    then cross-checks sampled pairs against the bounded rewrite oracle:
    wherever the oracle is conclusive the two verdicts must agree.
    """
    report = PropertyReport("theorem1", bounds.seed)
    runs, _capped = enumerate_co_executions(net, m0, bounds.depth)

    def semantic_key(state: ExecState):
        return (
            state.marking,
            path_names(state),
            tuple(sorted((t, len(ks)) for t, ks in state.history.items())),
        )

    groups: dict = {}
    for trace, state in runs:
        groups.setdefault(semantic_key(state), []).append((trace, state))

    # The grouping key must agree with the pairwise decision procedure.
    rng = random.Random(bounds.seed + 2)
    flat = [(trace, state, key)
            for key, members in groups.items() for trace, state in members]
    for _ in range(min(bounds.max_pairs, len(flat) * 2)):
        (t1, s1, k1), (t2, s2, k2) = rng.sample(flat, 2) if len(flat) >= 2 else (flat[0], flat[0])
        report.checked += 1
        if states_equivalent(s1, s2).equivalent != (k1 == k2):
            report.violations.append(PropViolation(
                f"{_fmt(t1)} | {_fmt(t2)}",
                "semantic grouping key disagrees with states_equivalent"))

    # Cross-check against the syntactic oracle on short traces, sampling
    # both endpoint-equivalent and endpoint-inequivalent pairs.
    short_groups = [
        [(trace, state) for trace, state in members if len(trace) <= 6]
        for members in groups.values()
    ]
    short_groups = [g for g in short_groups if g]
    candidate_pairs: list[tuple[Trace, Trace, bool]] = []
    for members in short_groups:
        if len(members) >= 2:
            for _ in range(3):
                (ta, _), (tb, _) = rng.sample(members, 2)
                if ta != tb:
                    candidate_pairs.append((ta, tb, True))
    if len(short_groups) >= 2:
        for _ in range(bounds.max_pairs):
            ga, gb = rng.sample(short_groups, 2)
            candidate_pairs.append((rng.choice(ga)[0], rng.choice(gb)[0], False))
    rng.shuffle(candidate_pairs)
    for trace1, trace2, semantic in candidate_pairs[: bounds.max_pairs]:
        oracle = rewrite_equivalent(net, m0, trace1, trace2,
                                    max_traces=bounds.rewrite_cap)
        report.checked += 1
        if oracle is None:
            continue
        if oracle != semantic:
            report.violations.append(PropViolation(
                f"{_fmt(trace1)} | {_fmt(trace2)}",
                f"endpoints {'equivalent' if semantic else 'inequivalent'} "
                f"but the rewrite oracle says {oracle}"))
    return report


PROPERTIES = {
    "token-preservation": _check_token_preservation,
    "bond-linearity": _check_bond_linearity,
    "key-distinctness": _check_key_distinctness,
    "last-place": _check_last_place,
    "loop-bt": lambda c, r: _check_loop(c, r, "bt"),
    "loop-co": lambda c, r: _check_loop(c, r, "co"),
    "loop-oco": lambda c, r: _check_loop(c, r, "oco"),
    "inclusion": _check_inclusion,
    "agreement": _check_agreement,
    "reverse-diamond": _check_reverse_diamond,
    "diamond-permutation": _check_diamond_permutation,
    "incremental-causes": _check_incremental_causes,
    "forward-reachability": _check_forward_reachability,
    "normal-form": _check_normal_form,
}


def property_names() -> list[str]:
    return sorted(PROPERTIES) + ["theorem1"]


def verify_properties(
    net: Net,
    m0: Marking,
    bounds: Bounds | None = None,
    selection: set[str] | None = None,
) -> list[PropertyReport]:
    """Run the selected property checks (all of them by default)."""
    bounds = bounds or Bounds()
    names = sorted(selection) if selection is not None else property_names()
    unknown = [n for n in names if n != "theorem1" and n not in PROPERTIES]
    if unknown:
        raise ValueError(f"unknown property name(s): {', '.join(unknown)}; "
                         f"known: {', '.join(property_names())}")
    campaign = _Campaign(net, m0, bounds)
    reports = []
    for name in names:
        if name == "theorem1":
            reports.append(check_theorem1(net, m0, bounds))
            continue
        report = PropertyReport(name, bounds.seed)
        PROPERTIES[name](campaign, report)
        reports.append(report)
    return reports
