import pytest
from hypothesis import given, settings, strategies as st

from modgames import library
from modgames.generate import random_buchi, random_det_vpa, random_lasso, seeded
from modgames.words import (BOTTOM, BUCHI, COBUCHI, UNIVERSAL, AutomatonError, accepts_lasso,
                            cobuchi_to_buchi, powerset, product_det, run_prefix, universal_of)
from dataclasses import replace

AP = ("p", "q")


def simulate(b, stem, cycle):
    """Independent reference for deterministic total automata."""
    q = b.initial
    for a in stem:
        q = b.step(q, a)
    starts = []
    while q not in starts:
        starts.append(q)
        for a in cycle:
            q = b.step(q, a)
    # the periodic part starts at the first repeated cycle entry
    seen = []
    for q0 in starts[starts.index(q):]:
        x = q0
        for a in cycle:
            seen.append(x)
            x = b.step(x, a)
    hit = any(x in b.accepting for x in seen)
    return hit if b.acceptance != COBUCHI else not hit


def test_powerset_order():
    assert powerset(["b", "a"]) == [frozenset(), {"a"}, {"b"}, {"a", "b"}]


def test_gf_on_simple_lassos():
    b = library.infinitely_often("p", AP)
    p, e = frozenset({"p"}), frozenset()
    assert accepts_lasso(b, [], [p])
    assert accepts_lasso(b, [e, e], [e, p])
    assert not accepts_lasso(b, [p, p], [e])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["buchi", "cobuchi"]))
def test_lasso_matches_simulation(seed, acc):
    rng = seeded(seed)
    b = replace(random_buchi(rng, AP, max_states=3), acceptance=acc)
    stem, cycle = random_lasso(rng, AP)
    assert accepts_lasso(b, stem, cycle) == simulate(b, stem, cycle)


def test_lasso_is_invariant_under_cycle_unrolling():
    rng = seeded(4)
    for _ in range(50):
        b = random_buchi(rng, AP, max_states=3)
        stem, cycle = random_lasso(rng, AP)
        assert accepts_lasso(b, stem, cycle) == accepts_lasso(b, stem + cycle, cycle + cycle)


def test_partial_automaton_dies():
    b = library.infinitely_often("p", AP)
    partial = replace(b, delta={k: v for k, v in b.delta.items() if "q" not in k[1]})
    assert not accepts_lasso(partial, [], [frozenset({"p", "q"})])
    assert accepts_lasso(partial, [], [frozenset({"p"})])
    assert partial.totalized().is_total()


def test_letters_are_checked():
    b = library.infinitely_often("p", AP)
    with pytest.raises(AutomatonError):
        accepts_lasso(b, [], [frozenset({"zz"})])
    with pytest.raises(AutomatonError):
        accepts_lasso(b, [], [])


def test_product_and_universal_union_are_intersections():
    rng = seeded(9)
    for _ in range(60):
        parts = [random_buchi(rng, AP, max_states=2) for _ in range(2)]
        prod = product_det(parts)
        univ = universal_of(parts)
        assert univ.mode == UNIVERSAL
        for _ in range(5):
            stem, cycle = random_lasso(rng, AP)
            want = all(simulate(b, stem, cycle) for b in parts)
            assert accepts_lasso(prod, stem, cycle) == want
            assert accepts_lasso(univ, stem, cycle) == want


def test_vpa_stack_discipline():
    p = random_det_vpa(seeded(2), ap=("p",), max_states=2, max_stack=2)
    word = [(frozenset(), "call"), (frozenset({"p"}), "int"), (frozenset(), "ret"), (frozenset(), "ret")]
    configs = run_prefix(p, word)
    assert len(configs) == 1
    (c,) = configs
    # the unmatched return leaves bottom in place
    assert c.stack == (BOTTOM,)
    assert not p.problems()


def test_cobuchi_conversion_preserves_language():
    rng = seeded(12)
    converted = 0
    for _ in range(200):
        b = replace(random_buchi(rng, AP, max_states=3), acceptance=COBUCHI)
        try:
            d = cobuchi_to_buchi(b)
        except AutomatonError:
            continue
        converted += 1
        assert d.acceptance == BUCHI
        for _ in range(10):
            stem, cycle = random_lasso(rng, AP)
            assert accepts_lasso(d, stem, cycle) == simulate(b, stem, cycle)
    assert converted > 50


def test_eventually_always_is_not_convertible():
    fg = replace(library.infinitely_often("p", AP), acceptance=COBUCHI)
    with pytest.raises(AutomatonError, match="no deterministic"):
        cobuchi_to_buchi(fg)
