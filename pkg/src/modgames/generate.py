"""Random instances for property tests and the acceptance suite."""
from __future__ import annotations

import random
from typing import Dict, List, Optional, Sequence, Tuple

from .rgg import GameModule, LocalStrategy, ModularStrategy, Rgg, call, errors, node, ret
from .trees import ExplicitNbt, RegularTree, Ubt
from .words import BUCHI, DET, BuchiWordAutomaton, Vpa, powerset


def _subset(rng: random.Random, items: Sequence, p: float = 0.5) -> frozenset:
    return frozenset(x for x in items if rng.random() < p)


def _module(rng, name, ap, n_nodes, exits, boxes, callee_exits, dead_end_p):
    nodes = [f"{name.lower()}n{i}" for i in range(n_nodes)]
    ex = [f"x{i}" for i in range(exits)]
    entry = nodes[0]
    verts_from = [node(n) for n in nodes] + [ret(b, x) for b, t in boxes.items() for x in callee_exits[t]]
    targets = [node(n) for n in nodes[1:] + ex] + [call(b) for b in boxes]
    edges: Dict = {}
    for v in verts_from:
        allowed = [t for t in targets if not (v[0] == "ret" and t[0] == "call") and t != v]
        if not allowed or rng.random() < dead_end_p:
            continue
        size = 1 if rng.random() < 0.6 else 2
        edges[v] = tuple(rng.sample(allowed, min(size, len(allowed))))
    player = {v: rng.randint(0, 1) for v in verts_from}
    labels = {}
    for v in verts_from + [node(x) for x in ex] + [call(b) for b in boxes]:
        lab = _subset(rng, ap, 0.4)
        if lab:
            labels[v] = lab
    return GameModule(name, tuple(nodes + ex), entry, tuple(ex), dict(boxes), edges, labels, player)


def random_game(rng: random.Random, ap: Sequence[str] = ("p", "q"), max_modules: int = 2,
                max_vertices: int = 4, recursion: bool = True, dead_end_p: float = 0.05,
                tries: int = 200) -> Rgg:
    """A valid game with at most ``max_vertices`` vertices per module."""
    for _ in range(tries):
        n_mod = rng.randint(1, max_modules)
        names = ["Main"] + [f"M{i}" for i in range(1, n_mod)]
        exits = {"Main": 0}
        for m in names[1:]:
            exits[m] = rng.randint(1, 2)
        callee_exits = {m: [f"x{i}" for i in range(exits[m])] for m in names}
        mods = {}
        for m in names:
            boxes = {}
            others = [t for t in names[1:] if recursion or t != m]
            if m != "Main" and not recursion:
                others = [t for t in others if names.index(t) > names.index(m)]
            if others and rng.random() < (0.9 if m == "Main" else 0.4):
                boxes["b"] = rng.choice(others)
            n_nodes = rng.randint(1, 3)
            mods[m] = _module(rng, m, ap, n_nodes, exits[m], boxes, callee_exits, dead_end_p)
        g = Rgg("rand", mods, "Main", tuple(ap))
        if errors(g) or any(len(g.vertices(m)) > max_vertices for m in names):
            continue
        if not g.successors("Main", node(mods["Main"].entry)):
            continue
        return g
    raise RuntimeError("could not generate a game")


def random_buchi(rng: random.Random, ap: Sequence[str] = ("p", "q"), max_states: int = 2,
                 tagged: bool = False) -> BuchiWordAutomaton:
    """A total deterministic Büchi automaton."""
    n = rng.randint(1, max_states)
    states = tuple(range(n))
    probe = BuchiWordAutomaton(states, 0, frozenset(ap), {}, frozenset(), BUCHI, DET, tagged, None)
    delta = {(q, a): (rng.randrange(n),) for q in states for a in probe.alphabet()}
    acc = _subset(rng, states, 0.5)
    return BuchiWordAutomaton(states, 0, frozenset(ap), delta, acc, BUCHI, DET, tagged, None, "rand")


def random_strategy(rng: random.Random, g: Rgg, max_memory: int = 2) -> ModularStrategy:
    local = {}
    for m in g.modules:
        n = rng.randint(1, max_memory)
        verts = g.vertices(m)
        upd = {(i, u): rng.randrange(n) for i in range(n) for u in verts}
        mv = {}
        for i in range(n):
            for v in verts:
                if g.is_p0(m, v):
                    mv[(i, v)] = rng.randrange(max(1, len(g.successors(m, v))))
        local[m] = LocalStrategy(0, upd, mv)
    return ModularStrategy(local)


def random_det_vpa(rng: random.Random, ap: Sequence[str] = ("p",), max_states: int = 4,
                   max_stack: int = 2, acceptance: str = BUCHI) -> Vpa:
    n = rng.randint(1, max_states)
    states = tuple(f"s{i}" for i in range(n))
    stack = tuple(f"g{i}" for i in range(rng.randint(1, max_stack)))
    sets = powerset(frozenset(ap))
    internal = {(q, a): (rng.choice(states),) for q in states for a in sets}
    push = {(q, a): ((rng.choice(stack), rng.choice(states)),) for q in states for a in sets}
    pop = {(q, a, t): (rng.choice(states),) for q in states for a in sets for t in stack + ("bottom",)}
    acc = _subset(rng, states, 0.5)
    return Vpa(states, (states[0],), frozenset(ap), stack, internal, push, pop, acc, acceptance, DET, "rand")


def random_lasso(rng: random.Random, ap: Sequence[str], max_stem: int = 4,
                 max_cycle: int = 4) -> Tuple[List[frozenset], List[frozenset]]:
    def word(lo, hi):
        return [_subset(rng, ap) for _ in range(rng.randint(lo, hi))]
    return word(0, max_stem), word(1, max_cycle)


# ----------------------------------------------------------------- trees


def random_tree(rng: random.Random, alphabet: Sequence, k: int, max_nodes: int = 3) -> RegularTree:
    n = rng.randint(1, max_nodes)
    labels = {i: rng.choice(alphabet) for i in range(n)}
    children = {i: tuple(rng.randrange(n) for _ in range(k)) for i in range(n)}
    return RegularTree(0, labels, children)


def random_ubt(rng: random.Random, alphabet: Sequence = ("a", "b"), k: int = 2,
               max_states: int = 3, density: float = 0.35) -> Ubt:
    n = rng.randint(1, max_states)
    states = tuple(range(n))
    delta = {}
    for q in states:
        for a in alphabet:
            obl = frozenset((d, t) for d in range(k) for t in states if rng.random() < density)
            if obl or rng.random() < 0.7:
                delta[(q, a)] = obl
    init = frozenset({0} | {q for q in states if rng.random() < 0.2})
    return Ubt(states, init, tuple(alphabet), k, delta, _subset(rng, states, 0.5))


def random_nbt(rng: random.Random, alphabet: Sequence = ("a", "b"), k: int = 2,
               max_states: int = 3, density: float = 0.3) -> ExplicitNbt:
    n = rng.randint(1, max_states)
    states = tuple(range(n))
    trans = {q: [] for q in states}
    for q in states:
        for a in alphabet:
            for _ in range(rng.randint(0, 2)):
                if rng.random() < density * 2:
                    trans[q].append((a, tuple(rng.randrange(n) for _ in range(k))))
    return ExplicitNbt(states, 0, k, trans, _subset(rng, states, 0.5))


def seeded(seed: Optional[int]) -> random.Random:
    return random.Random(seed)
