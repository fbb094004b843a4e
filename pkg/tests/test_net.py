from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from revpn.net import (
    Bond,
    Label,
    Marking,
    Net,
    bases_of,
    bonds_of,
    check_well_formed,
    connected_component,
    transition_sets,
)
from revpn.net import UnknownTransitionError


def component_oracle(base, entities):
    """Independent reachability closure: saturate over bond endpoints,
    then keep every bond whose two ends were reached."""
    ents = set(entities)
    if base not in ents:
        return frozenset()
    bases = {e for e in ents if isinstance(e, str)}
    bonds = {e for e in ents if isinstance(e, Bond)}
    reached = {base}
    changed = True
    while changed:
        changed = False
        for bond in bonds:
            for here, there in ((bond.first, bond.second),
                                (bond.second, bond.first)):
                if here in reached and there in bases and there not in reached:
                    reached.add(there)
                    changed = True
    kept = {b for b in bonds if b.first in reached and b.second in reached}
    return frozenset(reached | kept)


class TestBond:
    def test_canonical_order(self):
        assert Bond("c", "a") == Bond("a", "c")
        assert str(Bond("c", "a")) == "a-c"

    def test_other_end(self):
        bond = Bond("a", "b")
        assert bond.other("a") == "b"
        assert bond.other("b") == "a"


class TestLabel:
    def test_bond_pulls_in_endpoints(self):
        lab = Label.of([Bond("a", "c")])
        assert lab.positive == {Bond("a", "c"), "a", "c"}

    def test_signs_expand_separately(self):
        lab = Label.of(["a"], [Bond("b", "c")])
        assert lab.pos_bases == {"a"}
        assert lab.neg_bases == {"b", "c"}
        assert lab.neg_bonds == {Bond("b", "c")}


class TestConnectedComponent:
    def test_singleton(self):
        assert connected_component("a", {"a"}) == {"a"}

    def test_whole_chain(self):
        ents = {"a", "b", "d", Bond("a", "b"), Bond("b", "d")}
        assert connected_component("a", ents) == ents

    def test_unreachable_half_stays_out(self):
        # component_oracle confirms b, d are not reachable from a here
        ents = frozenset({"a", "b", "d", Bond("b", "d")})
        assert component_oracle("a", ents) == {"a"}
        assert connected_component("a", ents) == {"a"}

    def test_absent_base_gives_empty(self):
        assert connected_component("a", {"b"}) == frozenset()

    @given(st.data())
    def test_matches_oracle(self, data):
        names = ["a", "b", "c", "d", "e"]
        base_set = data.draw(st.sets(st.sampled_from(names), max_size=5))
        pairs = [(x, y) for i, x in enumerate(names) for y in names[i + 1:]]
        bonds = data.draw(st.sets(
            st.sampled_from(pairs).map(lambda p: Bond(*p)), max_size=6))
        ents = frozenset(base_set) | frozenset(bonds)
        start = data.draw(st.sampled_from(names))
        assert connected_component(start, ents) == component_oracle(start, ents)

    @given(st.data())
    def test_symmetry_and_containment(self, data):
        names = ["a", "b", "c", "d"]
        base_set = data.draw(st.sets(st.sampled_from(names), min_size=1))
        pairs = [(x, y) for i, x in enumerate(names) for y in names[i + 1:]]
        bonds = {Bond(x, y) for (x, y) in data.draw(
            st.sets(st.sampled_from(pairs), max_size=5))
            if x in base_set and y in base_set}
        ents = frozenset(base_set) | frozenset(bonds)
        start = data.draw(st.sampled_from(sorted(base_set)))
        comp = connected_component(start, ents)
        assert comp <= ents
        for member in bases_of(comp):
            assert connected_component(member, ents) == comp


def catalysis_net():
    return Net(
        "catalysis",
        bases=["a", "b", "c"],
        places=["u", "v", "w", "x", "y"],
        transitions=["t1", "t2"],
        arcs_in={
            ("u", "t1"): Label.of(["c"]),
            ("v", "t1"): Label.of(["a"]),
            ("x", "t2"): Label.of(["a"]),
            ("w", "t2"): Label.of(["b"]),
        },
        arcs_out={
            ("t1", "x"): Label.of([Bond("a", "c")]),
            ("t2", "y"): Label.of([Bond("a", "b")]),
        },
    )


def catalysis_m0():
    return Marking({"u": {"c"}, "v": {"a"}, "w": {"b"}})


class TestWellFormed:
    def test_catalysis_clean(self):
        report = check_well_formed(catalysis_net(), catalysis_m0())
        assert report.ok, str(report)

    def test_negative_entry_on_outgoing_arc(self):
        net = Net(
            "bad", ["a"], ["u", "v"], ["t"],
            arcs_in={("u", "t"): Label.of(["a"])},
            arcs_out={("t", "v"): Label.of(["a"], negative=["a"])},
        )
        report = check_well_formed(net, Marking({"u": {"a"}}))
        assert any(v.clause == "outgoing-negative" for v in report.violations)

    def test_token_erasure(self):
        net = Net(
            "bad", ["a", "b"], ["u", "v"], ["t"],
            arcs_in={("u", "t"): Label.of(["a"])},
            arcs_out={("t", "v"): Label.of(["b"])},
        )
        report = check_well_formed(net, Marking({"u": {"a", "b"}}))
        clauses = {v.clause for v in report.violations}
        assert "token-erasure" in clauses

    def test_bond_erasure(self):
        net = Net(
            "bad", ["a", "b"], ["u", "v"], ["t"],
            arcs_in={("u", "t"): Label.of([Bond("a", "b")])},
            arcs_out={("t", "v"): Label.of(["a", "b"])},
        )
        report = check_well_formed(net, Marking({"u": {"a", "b", Bond("a", "b")}}))
        assert any(v.clause == "bond-erasure" for v in report.violations)

    def test_cloned_output(self):
        net = Net(
            "bad", ["a"], ["u", "v", "w"], ["t"],
            arcs_in={("u", "t"): Label.of(["a"])},
            arcs_out={("t", "v"): Label.of(["a"]), ("t", "w"): Label.of(["a"])},
        )
        report = check_well_formed(net, Marking({"u": {"a"}}))
        assert any(v.clause == "output-overlap" for v in report.violations)

    def test_initial_placement(self):
        report = check_well_formed(
            catalysis_net(), Marking({"u": {"c", "a"}, "v": {"a"}}))
        subjects = {v.subject for v in report.violations
                    if v.clause == "initial-placement"}
        assert "token a" in subjects  # duplicated
        assert "token b" in subjects  # absent

    def test_marking_bond_without_endpoint(self):
        report = check_well_formed(
            catalysis_net(),
            Marking({"u": {"c", Bond("a", "b"), "a"}, "v": set(), "w": {"b"}}))
        assert any(v.clause == "marking-endpoints" for v in report.violations)

    def test_all_bundled_nets_validate(self, load):
        for name in ("catalysis", "forward_chain", "cycle_backtracking",
                     "token_shared_cycles", "fork_join", "oco_chain",
                     "overlapping_cycles", "independent_cycles", "oco_cycles",
                     "erk"):
            doc = load(name)
            report = check_well_formed(doc.net, doc.initial)
            assert report.ok, f"{name}: {report}"


class TestTransitionSets:
    def test_catalysis_t1(self):
        info = transition_sets(catalysis_net(), "t1")
        assert info.guard.positive == {"c", "a"}
        assert info.effects.positive == {"c", "a", Bond("a", "c")}
        assert info.effect == {Bond("a", "c")}
        assert info.pre_places == ("u", "v")
        assert info.post_places == ("x",)

    def test_catalysis_t2_effect(self):
        info = transition_sets(catalysis_net(), "t2")
        assert info.effect == {Bond("a", "b")}

    def test_identical_labels_no_effect(self):
        net = Net(
            "move", ["a"], ["u", "v"], ["t"],
            arcs_in={("u", "t"): Label.of(["a"])},
            arcs_out={("t", "v"): Label.of(["a"])},
        )
        assert transition_sets(net, "t").effect == frozenset()

    def test_unknown_transition(self):
        with pytest.raises(UnknownTransitionError):
            transition_sets(catalysis_net(), "nope")


class TestMarking:
    def test_empty_cells_are_dropped(self):
        assert Marking({"u": {"a"}, "v": set()}) == Marking({"u": {"a"}})

    def test_place_of(self):
        m = Marking({"u": {"a", Bond("a", "b"), "b"}})
        assert m.place_of("a") == "u"
        assert m.place_of(Bond("b", "a")) == "u"
        assert m.place_of("z") is None
