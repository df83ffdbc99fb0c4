from dataclasses import replace

import pytest

from modgames import library
from modgames.generate import random_buchi, random_game, random_strategy, seeded
from modgames.oracle import (brute_solve, check_strategy, check_strategy_bounded, count_strategies,
                             enumerate_strategies, local_strategies)
from modgames.results import BOUND_EXCEEDED, LoseUpTo, Win
from modgames.rgg import ret


def test_sample_strategies(sample, gf_pc):
    assert check_strategy(sample, gf_pc, library.always_c())
    ok, why = check_strategy(sample, gf_pc, library.always_d(), explain=True)
    assert not ok and "loop" in why
    assert check_strategy(sample, gf_pc, library.alternate())


def test_matching_spec_defeats_small_memory(sample):
    b = library.matching_spec()
    for f in (library.always_c(), library.always_d(), library.alternate()):
        assert not check_strategy(sample, b, f)
    res = brute_solve(sample, b, 2)
    assert isinstance(res, LoseUpTo) and res.bound == 2 and res.checked > 0


def test_exact_check_matches_explicit_exploration():
    """Without recursion the call depth is bounded, so the explicit check is exact."""
    rng = seeded(21)
    compared = 0
    for _ in range(120):
        g = random_game(rng, recursion=False)
        b = random_buchi(rng, max_states=3)
        acc = rng.choice(["buchi", "cobuchi"])
        b = replace(b, acceptance=acc)
        f = random_strategy(rng, g)
        slow = check_strategy_bounded(g, b, f, depth=len(g.modules) + 1)
        assert slow is not BOUND_EXCEEDED
        assert check_strategy(g, b, f) == slow
        compared += 1
    assert compared == 120


def test_bound_exceeded_on_deep_recursion(sample):
    # M1 never calls, but a self-calling module hits any depth bound
    text = library.SAMPLE_GAME.replace("  exit ex1 labels { }",
                                       "  box c : M1 calllabels { } retlabels ex1 { } player 1\n"
                                       "  exit ex1 labels { }")
    text = text.replace("  edge u3 -> ex1", "  edge u3 -> call c\n  edge ret c ex1 -> ex1")
    from modgames.formats import parse_rgg
    g = parse_rgg(text)
    b = library.accept_all(library.SAMPLE_AP)
    assert check_strategy_bounded(g, b, library.always_c(), depth=2) is BOUND_EXCEEDED


def test_enumeration_covers_random_strategies():
    """Every random strategy behaves like one of the enumerated ones."""
    rng = seeded(5)
    for _ in range(40):
        g = random_game(rng)
        b = random_buchi(rng)
        f = random_strategy(rng, g, max_memory=2)
        if check_strategy(g, b, f):
            assert isinstance(brute_solve(g, b, 2), Win)


def test_enumeration_is_duplicate_free(sample):
    # Min decides at its return; M1's Player-0 vertices have one successor
    assert len(local_strategies(sample, "Min", 1)) == 2
    assert len(local_strategies(sample, "M1", 2)) == 1
    assert count_strategies(sample, 1) == 2
    assert len(list(enumerate_strategies(sample, 1))) == 2
    with pytest.raises(ValueError):
        local_strategies(sample, "Min", 0)


def test_parallel_brute_agrees(sample, gf_pc):
    a = brute_solve(sample, gf_pc, 2)
    b = brute_solve(sample, gf_pc, 2, jobs=2)
    assert isinstance(a, Win) and isinstance(b, Win)
    assert check_strategy(sample, gf_pc, b.strategy)
