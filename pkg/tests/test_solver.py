import random
from dataclasses import replace

import pytest

from modgames import library
from modgames.generate import random_buchi, random_game, random_strategy, seeded
from modgames.oracle import brute_solve, check_strategy
from modgames.results import Lose, Win
from modgames.rgg import play
from modgames.solver import (DUMMY, ROOT, DecodeError, SolverError, build_strategy_tree_aut,
                             decode_strategy, encode_strategy, envelope, omega_labels, solve)
from modgames.trees import nbt_membership


def same_plays(g, f1, f2, rng, runs=10, steps=40):
    for _ in range(runs):
        opp = [rng.randrange(4) for _ in range(steps)]
        a = play(g, f1, iter(opp), steps)
        b = play(g, f2, iter(opp), steps)
        if [(s.module, s.vertex) for s in a] != [(s.module, s.vertex) for s in b]:
            return False
    return True


def test_sample_win_is_certified(sample, gf_pc):
    res = solve(sample, gf_pc)
    assert isinstance(res, Win)
    assert check_strategy(sample, gf_pc, res.strategy)
    assert res.stats.within_envelope()


def test_matching_spec_loses(sample):
    res = solve(sample, library.matching_spec())
    assert isinstance(res, Lose)


def test_pruned_and_full_search_agree():
    rng = seeded(2)
    for _ in range(25):
        g = random_game(rng, max_vertices=3)
        b = random_buchi(rng)
        full = solve(g, b, prune=False, max_assumptions=5000)
        assert type(solve(g, b)) is type(full)


def test_agrees_with_brute_force():
    rng = seeded(77)
    for _ in range(80):
        g = random_game(rng)
        b = random_buchi(rng)
        res = solve(g, b)
        assert res.winning == brute_solve(g, b, 3).winning


def test_unsupported_inputs(sample, gf_pc):
    # "finitely often p_c" has no deterministic Büchi automaton
    with pytest.raises(SolverError, match="co-Büchi"):
        solve(sample, replace(gf_pc, acceptance="cobuchi"))
    with pytest.raises(SolverError):
        solve(sample, replace(gf_pc, mode="universal"))


def test_cobuchi_safety_condition(sample):
    b = library.matching_spec()
    as_cobuchi = replace(b, acceptance="cobuchi", accepting=frozenset({"bad"}))
    assert isinstance(solve(sample, as_cobuchi), Lose)
    rng = seeded(19)
    for _ in range(60):
        g = random_game(rng)
        c = replace(random_buchi(rng, max_states=3), acceptance="cobuchi")
        try:
            res = solve(g, c)
        except SolverError:
            continue
        assert res.winning == brute_solve(g, c, 3).winning


def test_assumption_budget(sample, gf_pc):
    with pytest.raises(SolverError, match="gave up"):
        solve(sample, gf_pc, prune=False, max_assumptions=3)


def test_encode_decode_roundtrip():
    rng = seeded(13)
    for _ in range(30):
        g = random_game(rng)
        f = random_strategy(rng, g)
        t = encode_strategy(g, f)
        t.check(g.arity())
        assert nbt_membership(build_strategy_tree_aut(g), t)
        assert same_plays(g, f, decode_strategy(g, t), rng)


def test_corrupted_root_and_padding(sample):
    t = encode_strategy(sample, library.alternate())
    aut = build_strategy_tree_aut(sample)
    bad_root = replace(t, labels={**t.labels, ROOT: DUMMY})
    assert not nbt_membership(aut, bad_root)
    with pytest.raises(DecodeError):
        decode_strategy(sample, bad_root)
    bad_pad = replace(t, labels={**t.labels, DUMMY: ROOT})
    assert not nbt_membership(aut, bad_pad)
    with pytest.raises(DecodeError):
        decode_strategy(sample, bad_pad)


def test_alphabet(sample):
    labels = omega_labels(sample)
    assert labels[:2] == [ROOT, DUMMY]
    # five Player-0 vertices; only the return of b has two successors
    assert sum(1 for l in labels if l[0] == "a") == 6


def test_envelope_shape():
    assert envelope(10, 2, 1, 0) == pytest.approx(4 * 10 * 2 ** (4 * 2))
    assert envelope(10, 2, 2, 1) > envelope(10, 2, 1, 1) > envelope(10, 2, 1, 0)


def test_stats_lines(sample, gf_pc):
    lines = solve(sample, gf_pc).stats.lines()
    assert any(l.startswith("final automaton states") for l in lines)
    assert any(l == "within envelope = True" for l in lines)
