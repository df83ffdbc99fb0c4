import itertools
import random

import networkx as nx
from hypothesis import given, settings, strategies as st

from modgames.buchi_game import Arena, solve_buchi


def random_arena(rng, n):
    a = Arena()
    for v in range(n):
        a.add(v, rng.randint(0, 1), rng.random() < 0.3)
    for v in range(n):
        for w in range(n):
            if rng.random() < 0.3:
                a.edge(v, w)
    return a


def player0_wins(a, v0):
    """Try every positional Player-0 strategy; Büchi games are positional."""
    n = len(a)
    choices = [a.succ[v] if a.owner[v] == 0 and a.succ[v] else [None] for v in range(n)]
    for sigma in itertools.product(*choices):
        g = nx.DiGraph()
        g.add_nodes_from(range(n))
        for v in range(n):
            if a.owner[v] == 0:
                if sigma[v] is not None:
                    g.add_edge(v, sigma[v])
            else:
                g.add_edges_from((v, w) for w in a.succ[v])
        reach = nx.descendants(g, v0) | {v0}
        # Player 1 wins by trapping Player 0 in a dead end ...
        if any(a.owner[v] == 0 and not a.succ[v] for v in reach):
            continue
        # ... or by a reachable cycle without accepting vertices
        safe = g.subgraph([v for v in reach if not a.accepting[v]])
        if any(len(c) > 1 or safe.has_edge(*(2 * tuple(c)))
               for c in nx.strongly_connected_components(safe)):
            continue
        return True
    return False


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_against_positional_enumeration(seed, n):
    a = random_arena(random.Random(seed), n)
    sol = solve_buchi(a)
    for v in range(n):
        assert sol.wins(v) == player0_wins(a, v)


def test_strategy_stays_winning():
    rng = random.Random(3)
    for _ in range(100):
        a = random_arena(rng, 6)
        sol = solve_buchi(a)
        for v, w in sol.strategy.items():
            assert a.owner[v] == 0
            assert w in a.succ[v]
            assert sol.wins(w)


def test_player1_dead_end_is_a_win():
    a = Arena()
    x = a.add("x", 0)
    y = a.add("y", 1)
    a.edge(x, y)
    assert solve_buchi(a).wins(x)


def test_loop_without_acceptance_loses():
    a = Arena()
    x = a.add("x", 0)
    y = a.add("y", 0, accepting=True)
    a.edge(x, x)
    a.edge(y, x)
    sol = solve_buchi(a)
    assert not sol.wins(x) and not sol.wins(y)
