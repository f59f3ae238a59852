import pytest

from gadgetforge.core import (
    Gadget,
    PostselectSpec,
    broken_states,
    check_broken_preservation,
    equivalent,
    gadget_from_json,
    gadget_to_json,
    legal_from,
    minimize_gadget,
    post_select,
    restrict,
    step_states,
    transitive_closure,
    traversal_language_dfa,
)
from gadgetforge.errors import InputError
from gadgetforge.library import library_gadget


def test_step_states_one_toggle():
    t = library_gadget("1-toggle")
    assert step_states(t, "1", "L", "R") == {"2"}
    assert step_states(t, "1", "R", "L") == frozenset()


def test_step_states_nondeterministic():
    n = library_gadget("nL2T")
    assert step_states(n, "1", "Lt", "Lb") == {"2", "4"}


def test_step_states_unknown_identifiers():
    t = library_gadget("1-toggle")
    with pytest.raises(InputError):
        step_states(t, "nope", "L", "R")
    with pytest.raises(InputError):
        step_states(t, "1", "L", "X")


def test_legal_from_empty_sequence():
    t = library_gadget("1-toggle")
    assert legal_from(t, "1", ()) == {"1"}


def test_legal_from_locking_2_toggle_reversal():
    l2t = library_gadget("L2T")
    down_up = (("Lt", "Lb"), ("Lb", "Lt"))
    assert legal_from(l2t, "2", down_up) == {"2"}
    both_down = (("Lt", "Lb"), ("Rt", "Rb"))
    assert legal_from(l2t, "2", both_down) == frozenset()


def test_transitive_closure_adds_chain():
    g = Gadget(
        "chain",
        ("A", "B", "C"),
        frozenset(["q", "r", "s"]),
        frozenset([("q", "A", "r", "B"), ("r", "B", "s", "C")]),
    )
    clo = transitive_closure(g)
    assert ("q", "A", "s", "C") in clo.transitions
    assert transitive_closure(clo).transitions == clo.transitions


def test_transitive_closure_fixpoint_on_library():
    d = library_gadget("diode")
    assert transitive_closure(d).transitions == d.transitions


def test_restrict_identity_and_msc_to_sd():
    msc = library_gadget("MSC")
    assert restrict(msc, msc.locations).transitions == msc.transitions
    sd_like = restrict(msc, ["top", "right"])
    sd = library_gadget("SD")
    assert equivalent(sd_like, "1", sd, "1", {"top": "in", "right": "out"})


def test_restrict_rejects_unknown():
    with pytest.raises(InputError):
        restrict(library_gadget("diode"), ["L", "Z"])


def test_broken_states_empty_checks():
    g = library_gadget("L2T")
    assert broken_states(g, ()) == frozenset()


def test_broken_preservation_counterexample():
    # a retained transition escaping the broken state -> violation
    g = Gadget(
        "bad",
        ("A", "B"),
        frozenset(["ok", "broken"]),
        frozenset([("broken", "A", "ok", "B"), ("ok", "A", "ok", "A")]),
    )
    spec = PostselectSpec.of([("A", "A")], ["A", "B"])
    assert broken_states(g, spec.checks) == {"broken"}
    assert not check_broken_preservation(g, spec)


def test_post_select_trivial_is_identity():
    for name in ("1-toggle", "L2T", "SO", "MSC"):
        g = library_gadget(name)
        spec = PostselectSpec.of([], g.locations)
        ps = post_select(g, spec)
        for q in g.states:
            assert equivalent(ps, q, g, q)


def test_post_select_all_broken_warns():
    g = library_gadget("diode")
    spec = PostselectSpec.of([("R", "L")], ["L", "R"])
    with pytest.warns(UserWarning):
        ps = post_select(g, spec)
    assert not ps.states


def test_traversal_dfa_hallway():
    h = library_gadget("hallway")
    dfa = traversal_language_dfa(h, "1")
    assert dfa.accepts((("L", "R"), ("R", "L"), ("L", "R")))
    assert not dfa.accepts((("L", "L"),))


def test_traversal_dfa_dead_gadget():
    g = Gadget("dead", ("A", "B"), frozenset(["q"]), frozenset())
    dfa = traversal_language_dfa(g, "q")
    assert dfa.accepts(())
    assert not dfa.accepts((("A", "B"),))


def test_equivalent_reflexive_and_distinguishes():
    t = library_gadget("1-toggle")
    d = library_gadget("diode")
    assert equivalent(t, "1", t, "1")
    # diode admits L->R twice, the 1-toggle does not
    assert not equivalent(t, "1", d, "1")


def test_equivalent_sd_vs_so_state2():
    so = restrict(library_gadget("SO"), ["in", "out"])
    sd = library_gadget("SD")
    assert equivalent(sd, "1", so, "2", {"in": "in", "out": "out"})


def test_equivalent_requires_bijection():
    t = library_gadget("1-toggle")
    with pytest.raises(InputError):
        equivalent(t, "1", t, "1", {"L": "L", "R": "L"})


def test_so_language_single_use():
    so = library_gadget("SO")
    open_self = ("opening", "opening")
    use = ("in", "out")
    assert legal_from(so, "1", (open_self, use))
    assert not legal_from(so, "1", (open_self, use, use))
    assert not legal_from(so, "1", (use,))


def test_minimize_merges_duplicate_states():
    g = Gadget(
        "dup",
        ("L", "R"),
        frozenset(["a", "b"]),
        frozenset([("a", "L", "a", "R"), ("b", "L", "b", "R"), ("a", "L", "b", "R")]),
    )
    m = minimize_gadget(g)
    assert len(m.states) == 1


def test_minimize_identity_on_library():
    from gadgetforge.library import library_names

    for name in library_names():
        g = library_gadget(name)
        m = minimize_gadget(g)
        assert len(m.states) == len(g.states), name


def test_gadget_json_roundtrip():
    g = library_gadget("L2T")
    text = gadget_to_json(g)
    g2 = gadget_from_json(text)
    assert g2.locations == g.locations
    assert g2.states == g.states
    assert g2.transitions == g.transitions
    assert gadget_to_json(g2) == text


def test_library_orientations():
    l2t = library_gadget("L2T")
    refl = library_gadget("L2T", "r4")
    assert set(refl.locations) == set(l2t.locations)
    mirrored = {"Lt": "Rt", "Rt": "Lt", "Lb": "Rb", "Rb": "Lb"}
    assert equivalent(refl, "2", l2t, "2", mirrored)


def test_one_toggle_count():
    t = library_gadget("1-toggle")
    assert len(t.states) == 2 and len(t.locations) == 2 and len(t.transitions) == 2
