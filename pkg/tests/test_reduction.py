from dataclasses import replace

import pytest

from modgames import library
from modgames.generate import random_det_vpa, random_game, random_strategy, seeded
from modgames.oracle import check_strategy, check_strategy_bounded, enumerate_strategies
from modgames.reduction import (LIE, ReductionError, conjunction_vpa, dummy_module_name,
                                reduce_det_vpa, reduce_universal_vpa, reduce_vpa, size_bound)
from modgames.results import BOUND_EXCEEDED, Win
from modgames.rgg import errors
from modgames.solver import solve_vpa
from modgames.words import BUCHI, DET, NONDET, Vpa, powerset


def stackless_gf(p, ap):
    """Deterministic VPA for 'infinitely often p' that ignores its stack."""
    sets = powerset(ap)
    states = ("s0", "s1")
    to = lambda a: "s1" if p in a else "s0"
    internal = {(q, a): (to(a),) for q in states for a in sets}
    push = {(q, a): (("g", to(a)),) for q in states for a in sets}
    pop = {(q, a, t): (to(a),) for q in states for a in sets for t in ("g", "bottom")}
    return Vpa(states, ("s0",), frozenset(ap), ("g",), internal, push, pop, frozenset({"s1"}),
               BUCHI, DET, "GF" + p)


def test_structure_of_reduced_game(sample):
    p = stackless_gf("p_c", library.SAMPLE_AP)
    red = reduce_det_vpa(sample, p)
    assert not errors(red.game)
    assert red.game.num_exits() == 2 * sample.num_exits()
    assert dummy_module_name("M1") in red.game.modules
    assert red.game.callee("Min", "b") == dummy_module_name("M1")
    assert LIE in red.spec.states and LIE in red.spec.accepting
    assert len(red.spec.states) <= size_bound(len(p.states), len(p.stack))


def test_lying_is_accepting_for_cobuchi(sample):
    p = replace(stackless_gf("p_c", library.SAMPLE_AP), acceptance="cobuchi")
    red = reduce_det_vpa(sample, p)
    assert LIE not in red.spec.accepting


def test_sample_through_vpa(sample):
    p = stackless_gf("p_c", library.SAMPLE_AP)
    res = solve_vpa(sample, p)
    assert isinstance(res, Win)
    assert check_strategy_bounded(sample, p, res.strategy, depth=3) is True


def test_lift_then_project_is_identity(sample):
    p = stackless_gf("p_c", library.SAMPLE_AP)
    red = reduce_det_vpa(sample, p)
    f = library.alternate()
    back = red.bijection.project(red.bijection.lift(f))
    assert all(back.of(m) == f.of(m) for m in sample.modules)


def test_memoryless_equivalence():
    rng = seeded(31)
    exact = 0
    for _ in range(25):
        g = random_game(rng, ap=("p",))
        p = random_det_vpa(rng, ap=("p",), acceptance=rng.choice(["buchi", "cobuchi"]))
        red = reduce_det_vpa(g, p)
        for f in enumerate_strategies(g, 1):
            a = check_strategy_bounded(g, p, f, depth=4)
            if a is BOUND_EXCEEDED:
                continue
            exact += 1
            assert check_strategy(red.game, red.spec, red.bijection.lift(f)) == a
    assert exact > 20


def test_universal_conjunction():
    rng = seeded(41)
    for _ in range(8):
        g = random_game(rng, ap=("p",), max_vertices=3)
        p1 = random_det_vpa(rng, ap=("p",), max_states=2)
        p2 = random_det_vpa(rng, ap=("p",), max_states=2)
        red = reduce_universal_vpa(g, conjunction_vpa(p1, p2))
        assert not errors(red.game)
        for f in enumerate_strategies(g, 1):
            a1 = check_strategy_bounded(g, p1, f, depth=4)
            a2 = check_strategy_bounded(g, p2, f, depth=4)
            if BOUND_EXCEEDED in (a1, a2):
                continue
            assert check_strategy(red.game, red.spec, red.bijection.lift(f)) == (a1 and a2)


def test_rejections(sample):
    p = stackless_gf("p_c", library.SAMPLE_AP)
    with pytest.raises(ReductionError):
        reduce_vpa(sample, replace(p, mode=NONDET))
    with pytest.raises(ReductionError):
        reduce_det_vpa(sample, replace(p, initial=("s0", "s1")))
    with pytest.raises(ReductionError):
        conjunction_vpa(p, replace(p, acceptance="cobuchi"))
    bad = replace(sample, modules={"__x": sample.module("M1"), "Min": sample.module("Min")})
    with pytest.raises(ReductionError):
        reduce_det_vpa(bad, p)
