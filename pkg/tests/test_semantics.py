from __future__ import annotations

import pytest

import revpn as r
from revpn import semantics as sem
from revpn.net import Bond, Marking
from revpn.semantics import Action, NotEnabledError, Occurrence, initial_state

from conftest import fire_all


class TestForwardEnabled:
    def test_catalysis_first_steps(self, catalysis):
        s0 = initial_state(catalysis.initial)
        assert sem.forward_enabled(catalysis.net, s0, "t1")
        assert not sem.forward_enabled(catalysis.net, s0, "t2")
        assert "missing" in sem.forward_blocker(catalysis.net, s0, "t2")

    def test_negated_token_blocks(self, load):
        erk = load("erk")
        s2 = fire_all(erk.net, erk.initial, ["a2", "p1"])
        # f still sits inside FMP, and c demands its absence there
        assert not sem.forward_enabled(erk.net, s2, "c")
        assert "absent" in sem.forward_blocker(erk.net, s2, "c")
        s3 = sem.fire_reverse(erk.net, s2, "a2", "oco")
        assert sem.forward_enabled(erk.net, s3, "c")

    def test_empty_place_blocks(self, catalysis):
        s0 = initial_state(Marking({"u": {"c"}, "v": {"a"}}))
        assert not sem.forward_enabled(catalysis.net, s0, "t2")

    def test_unknown_transition(self, catalysis):
        with pytest.raises(KeyError):
            sem.forward_enabled(catalysis.net, initial_state(catalysis.initial), "zz")


class TestFireForward:
    def test_catalysis_t1(self, catalysis):
        s1 = sem.fire_forward(catalysis.net, initial_state(catalysis.initial), "t1")
        assert s1.marking["x"] == {"a", "c", Bond("a", "c")}
        assert s1.marking["u"] == frozenset()
        assert s1.keys_of("t1") == {1}

    def test_catalysis_t2_records_dependence(self, catalysis):
        s2 = fire_all(catalysis.net, catalysis.initial, ["t1", "t2"])
        assert s2.marking["y"] == {"a", "b", "c", Bond("a", "c"), Bond("a", "b")}
        assert s2.keys_of("t2") == {2}
        assert (Occurrence("t1", 1), Occurrence("t2", 2)) in s2.causes

    def test_key_recycling_after_reversal(self, catalysis):
        # max over an emptied history restarts at 0, so the next key is 1
        s = sem.fire_forward(catalysis.net, initial_state(catalysis.initial), "t1")
        s = sem.fire_reverse(catalysis.net, s, "t1", "bt")
        s = sem.fire_forward(catalysis.net, s, "t1")
        assert s.keys_of("t1") == {1}

    def test_firing_disabled_raises(self, catalysis):
        with pytest.raises(NotEnabledError) as err:
            sem.fire_forward(catalysis.net, initial_state(catalysis.initial), "t2")
        assert "missing" in err.value.reason


class TestReverseEnabled:
    def test_backtracking_cycle_unique(self, load):
        doc = load("cycle_backtracking")
        s = fire_all(doc.net, doc.initial, ["t1", "t2", "t3", "t4", "t3"])
        assert sem.enabled_reverse(doc.net, s, "bt") == ["t3"]

    def test_live_dependent_blocks_co(self, catalysis, load):
        s = fire_all(catalysis.net, catalysis.initial, ["t1", "t2"])
        assert not sem.reverse_enabled(catalysis.net, s, "t1", "co")
        assert "no longer in place" in sem.reverse_blocker(
            catalysis.net, s, "t1", "co")
        # with the emissions still in place, the blocker is the dependent
        doc = load("token_shared_cycles")
        shared = fire_all(doc.net, doc.initial, ["t1", "t2", "t3", "t4"])
        assert not sem.reverse_enabled(doc.net, shared, "t2", "co")
        assert "dependent" in sem.reverse_blocker(doc.net, shared, "t2", "co")

    def test_empty_history_blocks_all_modes(self, catalysis):
        s0 = initial_state(catalysis.initial)
        for mode in ("bt", "co", "oco"):
            assert not sem.reverse_enabled(catalysis.net, s0, "t1", mode)

    def test_menu_after_catalysis_run(self, catalysis):
        s = fire_all(catalysis.net, catalysis.initial, ["t1", "t2"])
        assert sem.enabled_reverse(catalysis.net, s, "bt") == ["t2"]
        assert sem.enabled_reverse(catalysis.net, s, "co") == ["t2"]
        assert sem.enabled_reverse(catalysis.net, s, "oco") == ["t1", "t2"]


class TestLastPlacement:
    def test_no_candidate_without_history(self, catalysis):
        assert sem.last_transition(catalysis.net, {"c"}, {}) is None
        assert sem.last_place(catalysis.net, {"c"}, {}, catalysis.initial) == "u"

    def test_component_follows_latest_live_transition(self, catalysis):
        # after <t1, t2> with t1 already reversed, only t2 touched a-b
        history = {"t2": frozenset({2})}
        component = {"a", "b", Bond("a", "b")}
        assert sem.last_transition(catalysis.net, component, history) == "t2"
        assert sem.last_place(catalysis.net, component, history,
                              catalysis.initial) == "y"

    def test_freed_token_falls_back_to_initial_place(self, catalysis):
        history = {"t2": frozenset({2})}
        assert sem.last_transition(catalysis.net, {"c"}, history) is None
        assert sem.last_place(catalysis.net, {"c"}, history,
                              catalysis.initial) == "u"

    def test_oco_cycles_component_destinations(self, load):
        doc = load("oco_cycles")
        s = fire_all(doc.net, doc.initial, ["t1", "t2", "t3", "t4", "t5"])
        after = sem.fire_reverse(doc.net, s, "t4", "oco")
        history = after.history
        assert sem.last_place(doc.net, {"c"}, history, doc.initial) == "z"
        assert sem.last_place(doc.net, {"a", "b", Bond("a", "b")}, history,
                              doc.initial) == "w"


class TestFireReverse:
    def test_catalysis_oco_release(self, catalysis):
        s = fire_all(catalysis.net, catalysis.initial, ["t1", "t2"])
        out = sem.fire_reverse(catalysis.net, s, "t1", "oco")
        assert out.marking["u"] == {"c"}
        assert out.marking["y"] == {"a", "b", Bond("a", "b")}
        assert out.keys_of("t1") == frozenset()

    def test_component_split_on_oco(self, load):
        doc = load("oco_chain")
        s = fire_all(doc.net, doc.initial, ["t1", "t2", "t3"])
        out = sem.fire_reverse(doc.net, s, "t1", "oco")
        assert out.marking["y"] == {"b", "c", Bond("b", "c")}
        assert out.marking["z"] == {"a", "d", Bond("a", "d")}

    def test_loop_identity_bt(self, catalysis):
        s0 = initial_state(catalysis.initial)
        s1 = sem.fire_forward(catalysis.net, s0, "t1")
        assert sem.fire_reverse(catalysis.net, s1, "t1", "bt") == s0

    def test_disabled_reversal_raises_with_mode_reason(self, catalysis):
        s = fire_all(catalysis.net, catalysis.initial, ["t1", "t2"])
        with pytest.raises(NotEnabledError) as err:
            sem.fire_reverse(catalysis.net, s, "t1", "bt")
        assert "highest value" in err.value.reason


class TestReferenceReverse:
    def test_bt_literal_restores_initial_state(self, catalysis):
        s0 = initial_state(catalysis.initial)
        s1 = sem.fire_forward(catalysis.net, s0, "t1")
        assert sem.reference_reverse(catalysis.net, s1, "t1", "bt-literal") == s0

    def test_fig6_component_returns_to_u(self, load):
        doc = load("cycle_backtracking")
        s = fire_all(doc.net, doc.initial, ["t1", "t2", "t3", "t4", "t3"])
        out = sem.reference_reverse(doc.net, s, "t3", "bt-literal")
        assert out.marking["u"] == {
            "a", "b", "c", Bond("a", "b"), Bond("b", "c")}
        assert out.keys_of("t3") == {3}

    def test_co_literal_agrees_with_unified_rule(self, load):
        doc = load("fork_join")
        s = fire_all(doc.net, doc.initial, ["t1", "t2", "t3"])
        for t in sem.enabled_reverse(doc.net, s, "co"):
            assert (sem.reference_reverse(doc.net, s, t, "co-literal")
                    == sem.fire_reverse(doc.net, s, t, "co"))

    def test_literal_demands_its_enabledness(self, catalysis):
        s = fire_all(catalysis.net, catalysis.initial, ["t1", "t2"])
        with pytest.raises(NotEnabledError):
            sem.reference_reverse(catalysis.net, s, "t1", "co-literal")


class TestStep:
    def test_dispatch(self, catalysis):
        s0 = initial_state(catalysis.initial)
        fwd = sem.step(catalysis.net, s0, Action.forward("t1"))
        assert fwd == sem.fire_forward(catalysis.net, s0, "t1")
        back = sem.step(catalysis.net, fwd, Action.reverse("t1", "oco"))
        assert back == sem.fire_reverse(catalysis.net, fwd, "t1", "oco")

    def test_disabled_action_error_names_reason(self, catalysis):
        s0 = initial_state(catalysis.initial)
        with pytest.raises(NotEnabledError) as err:
            sem.step(catalysis.net, s0, Action.reverse("t1", "co"))
        assert "never fired" in err.value.reason


class TestStateInvariantsOnRuns:
    def test_erk_every_token_always_placed_once(self, load):
        doc = load("erk")
        state = initial_state(doc.initial)
        for action in r.bundled_trace("erk"):
            state = sem.step(doc.net, state, action)
            for base in sorted(doc.net.bases):
                assert len(state.marking.places_of(base)) == 1
