"""Regular trees and Büchi tree automata.

Trees are k-ary and represented by finite graphs.  Nondeterministic
automata expose their transitions through :meth:`Nbt.moves`, which lets
large automata (breakpoint conversions, products) stay implicit until an
emptiness or membership check explores them.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from .buchi_game import Arena, solve_buchi

Label = Hashable


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class RegularTree:
    """A finite graph unfolding into a k-ary tree."""

    root: Hashable
    labels: Dict[Hashable, Label]
    children: Dict[Hashable, Tuple[Hashable, ...]]

    __hash__ = None  # type: ignore[assignment]

    @property
    def nodes(self) -> List[Hashable]:
        return list(self.labels)

    def label(self, n) -> Label:
        return self.labels[n]

    def child(self, n, d: int):
        return self.children[n][d]

    def arity(self) -> int:
        return len(self.children[self.root])

    def check(self, k: Optional[int] = None) -> None:
        k = self.arity() if k is None else k
        for n in self.labels:
            if len(self.children.get(n, ())) != k:
                raise TreeError(f"node {n!r} does not have {k} children")
            for c in self.children[n]:
                if c not in self.labels:
                    raise TreeError(f"dangling child {c!r} of {n!r}")

    def reachable(self) -> List[Hashable]:
        seen = {self.root}
        order = [self.root]
        todo = deque([self.root])
        while todo:
            n = todo.popleft()
            for c in self.children[n]:
                if c not in seen:
                    seen.add(c)
                    order.append(c)
                    todo.append(c)
        return order

    def trimmed(self) -> "RegularTree":
        keep = self.reachable()
        return RegularTree(self.root, {n: self.labels[n] for n in keep},
                           {n: self.children[n] for n in keep})

    def path(self, directions: Iterable[int]):
        n = self.root
        for d in directions:
            n = self.children[n][d]
        return n


# ------------------------------------------------------ nondeterministic Büchi


class Nbt:
    """Interface of nondeterministic Büchi tree automata."""

    k: int
    initial: Hashable
    all_accepting: bool = False

    def is_accepting(self, q) -> bool:
        raise NotImplementedError

    def moves(self, q) -> List[Tuple[Label, Tuple[Hashable, ...]]]:
        raise NotImplementedError

    def moves_on(self, q, label) -> List[Tuple[Hashable, ...]]:
        return [cs for l, cs in self.moves(q) if l == label]

    def reachable_states(self, limit: Optional[int] = None) -> List[Hashable]:
        seen = {self.initial}
        order = [self.initial]
        todo = deque([self.initial])
        while todo:
            q = todo.popleft()
            for _, cs in self.moves(q):
                for c in cs:
                    if c not in seen:
                        seen.add(c)
                        order.append(c)
                        todo.append(c)
                        if limit is not None and len(order) > limit:
                            raise TreeError(f"more than {limit} reachable states")
        return order

    def explicit(self) -> "ExplicitNbt":
        states = self.reachable_states()
        return ExplicitNbt(tuple(states), self.initial, self.k,
                           {q: list(self.moves(q)) for q in states},
                           frozenset(q for q in states if self.is_accepting(q)))


@dataclass(eq=False)
class ExplicitNbt(Nbt):
    states: Tuple[Hashable, ...]
    initial: Hashable
    k: int
    transitions: Dict[Hashable, List[Tuple[Label, Tuple[Hashable, ...]]]]
    accepting: FrozenSet[Hashable]

    def __post_init__(self):
        for q, ts in self.transitions.items():
            for l, cs in ts:
                if len(cs) != self.k:
                    raise TreeError(f"transition of {q!r} on {l!r} has {len(cs)} children, not {self.k}")
        self._by_label: Dict[Tuple[Hashable, Label], List[Tuple[Hashable, ...]]] = {}
        for q, ts in self.transitions.items():
            for l, cs in ts:
                self._by_label.setdefault((q, l), []).append(cs)
        self.all_accepting = set(self.states) <= set(self.accepting)

    def is_accepting(self, q) -> bool:
        return q in self.accepting

    def moves(self, q):
        return self.transitions.get(q, [])

    def moves_on(self, q, label):
        return self._by_label.get((q, label), [])

    def size(self) -> int:
        return len(self.states)


def universal_language(alphabet: Sequence[Label], k: int) -> ExplicitNbt:
    return ExplicitNbt(("all",), "all", k, {"all": [(l, ("all",) * k) for l in alphabet]},
                       frozenset({"all"}))


def empty_language(k: int) -> ExplicitNbt:
    return ExplicitNbt(("none",), "none", k, {"none": []}, frozenset())


class ProductNbt(Nbt):
    """Intersection; a flag alternates between waiting for each operand's F."""

    def __init__(self, a: Nbt, b: Nbt, start: Optional[Tuple[Hashable, Hashable]] = None):
        if a.k != b.k:
            raise TreeError(f"arity mismatch: {a.k} vs {b.k}")
        self.a, self.b, self.k = a, b, a.k
        self.flagged = not (a.all_accepting or b.all_accepting)
        self.all_accepting = a.all_accepting and b.all_accepting
        pa, pb = start if start is not None else (a.initial, b.initial)
        self.initial = (pa, pb, 0) if self.flagged else (pa, pb)

    def _next_flag(self, q) -> int:
        p, r, flag = q
        if flag == 0:
            return 1 if self.a.is_accepting(p) else 0
        return 0 if self.b.is_accepting(r) else 1

    def is_accepting(self, q) -> bool:
        if not self.flagged:
            return self.a.is_accepting(q[0]) and self.b.is_accepting(q[1])
        return q[2] == 0 and self.a.is_accepting(q[0])

    def _combine(self, q, ca, cb):
        if self.flagged:
            f = self._next_flag(q)
            return tuple((x, y, f) for x, y in zip(ca, cb))
        return tuple(zip(ca, cb))

    def moves(self, q):
        out = []
        for l, ca in self.a.moves(q[0]):
            for cb in self.b.moves_on(q[1], l):
                out.append((l, self._combine(q, ca, cb)))
        return out

    def moves_on(self, q, label):
        return [self._combine(q, ca, cb)
                for ca in self.a.moves_on(q[0], label)
                for cb in self.b.moves_on(q[1], label)]


def nbt_product(a: Nbt, b: Nbt) -> Nbt:
    return ProductNbt(a, b)


# ----------------------------------------------------------- universal Büchi


@dataclass(frozen=True)
class Ubt:
    """Universal Büchi tree automaton.

    ``delta[(q, label)]`` is the set of obligations (direction, state) sent
    by a copy in state ``q`` reading ``label``; an absent key means the copy
    is discharged.  ``sinks`` lists non-accepting states that re-oblige
    themselves on every label, so any run reaching them is rejecting.
    """

    states: Tuple[Hashable, ...]
    initial: FrozenSet[Hashable]
    alphabet: Tuple[Label, ...]
    k: int
    delta: Dict[Tuple[Hashable, Label], FrozenSet[Tuple[int, Hashable]]]
    accepting: FrozenSet[Hashable]
    sinks: FrozenSet[Hashable] = frozenset()
    rule: Optional[Callable[[Hashable, Label], FrozenSet[Tuple[int, Hashable]]]] = None
    _memo: dict = field(default_factory=dict, compare=False, repr=False)

    __hash__ = None  # type: ignore[assignment]

    def obligations(self, q, label) -> FrozenSet[Tuple[int, Hashable]]:
        """Obligations of a copy; ``rule`` (when set) computes them on demand."""
        if q in self.sinks:
            return frozenset((d, q) for d in range(self.k))
        if self.rule is not None:
            key = (q, label)
            out = self._memo.get(key)
            if out is None:
                out = self._memo[key] = frozenset(self.rule(q, label))
            return out
        return self.delta.get((q, label), frozenset())

    def is_accepting(self, q) -> bool:
        return q in self.accepting


class BreakpointNbt(Nbt):
    """Nondeterministic automaton equivalent to a universal one.

    States are pairs (S, O): S holds the live copies, O those owing an
    accepting visit since the last breakpoint.  Deterministic per label.
    """

    def __init__(self, u: Ubt, alphabet: Optional[Sequence[Label]] = None):
        self.u = u
        self.k = u.k
        self.alphabet = tuple(u.alphabet if alphabet is None else alphabet)
        self._cache: Dict[Tuple[Hashable, Label], Optional[Tuple[Hashable, ...]]] = {}
        self.initial = self.state_for(u.initial)

    def state_for(self, copies: Iterable[Hashable]):
        """Fresh breakpoint state holding ``copies``."""
        init = frozenset(copies)
        return (init, init - self.u.accepting)

    def is_accepting(self, q) -> bool:
        return not q[1]

    def step(self, q, label) -> Optional[Tuple[Hashable, ...]]:
        key = (q, label)
        if key in self._cache:
            return self._cache[key]
        S, O = q
        u = self.u
        if S & u.sinks:
            self._cache[key] = None
            return None
        succ_s = [set() for _ in range(self.k)]
        succ_o = [set() for _ in range(self.k)]
        for s in S:
            for d, t in u.obligations(s, label):
                succ_s[d].add(t)
                if O and s in O and t not in u.accepting:
                    succ_o[d].add(t)
        out = []
        for d in range(self.k):
            s_d = frozenset(succ_s[d])
            o_d = frozenset(succ_o[d]) if O else s_d - u.accepting
            out.append((s_d, o_d))
        res = tuple(out)
        self._cache[key] = res
        return res

    def moves(self, q):
        out = []
        for l in self.alphabet:
            cs = self.step(q, l)
            if cs is not None:
                out.append((l, cs))
        return out

    def moves_on(self, q, label):
        cs = self.step(q, label)
        return [] if cs is None else [cs]


def ubt_to_nbt(u: Ubt) -> BreakpointNbt:
    return BreakpointNbt(u)


def ubt_membership(u: Ubt, t: RegularTree) -> bool:
    """Every infinite obligation path must meet accepting states infinitely often."""
    t.check(u.k)
    graph = nx.DiGraph()
    todo = deque()
    for q in u.initial:
        v = (t.root, q)
        if v not in graph:
            graph.add_node(v)
            todo.append(v)
    while todo:
        n, q = v = todo.popleft()
        if q in u.sinks:
            return False
        for d, q2 in u.obligations(q, t.label(n)):
            w = (t.child(n, d), q2)
            if w not in graph:
                graph.add_node(w)
                todo.append(w)
            graph.add_edge(v, w)
    bad = graph.subgraph([v for v in graph if v[1] not in u.accepting])
    for comp in nx.strongly_connected_components(bad):
        if len(comp) > 1 or any(bad.has_edge(v, v) for v in comp):
            return False
    return True


# ------------------------------------------------ membership and emptiness


def nbt_membership(a: Nbt, t: RegularTree) -> bool:
    t.check(a.k)
    arena = Arena()
    start = arena.add(("s", t.root, a.initial), 0, a.is_accepting(a.initial))
    todo = deque([(t.root, a.initial)])
    while todo:
        n, q = todo.popleft()
        v = arena.ids[("s", n, q)]
        for i, cs in enumerate(a.moves_on(q, t.label(n))):
            p = arena.add(("t", n, q, i), 1)
            arena.edge(v, p)
            for d, c in enumerate(cs):
                key = ("s", t.child(n, d), c)
                fresh = key not in arena.ids
                w = arena.add(key, 0, a.is_accepting(c))
                arena.edge(p, w)
                if fresh:
                    todo.append((t.child(n, d), c))
    return solve_buchi(arena).wins(start)


@dataclass
class EmptinessResult:
    empty: bool
    witness: Optional[RegularTree] = None
    arena_size: int = 0
    states: int = 0


def _emptiness_arena(a: Nbt, limit: Optional[int]):
    arena = Arena()
    moves: Dict[Hashable, List[Tuple[Label, Tuple[Hashable, ...]]]] = {}
    arena.add(("s", a.initial), 0, a.is_accepting(a.initial))
    todo = deque([a.initial])
    while todo:
        q = todo.popleft()
        v = arena.ids[("s", q)]
        ms = moves[q] = a.moves(q)
        seen_children = {}
        for i, (l, cs) in enumerate(ms):
            # Pathfinder only cares about the child tuple
            p = seen_children.get(cs)
            if p is None:
                p = seen_children[cs] = arena.add(("t", q, i), 1)
                for c in cs:
                    key = ("s", c)
                    fresh = key not in arena.ids
                    w = arena.add(key, 0, a.is_accepting(c))
                    arena.edge(p, w)
                    if fresh:
                        todo.append(c)
                        if limit is not None and len(moves) + len(todo) > limit:
                            raise TreeError(f"more than {limit} automaton states")
            arena.edge(v, p)
    return arena, moves


def nbt_emptiness(a: Nbt, limit: Optional[int] = None, certify: bool = True) -> EmptinessResult:
    """Decide emptiness; a nonempty automaton yields a certified witness tree."""
    arena, moves = _emptiness_arena(a, limit)
    sol = solve_buchi(arena)
    start = arena.ids[("s", a.initial)]
    nstates = len(moves)
    if not sol.wins(start):
        return EmptinessResult(True, None, len(arena), nstates)
    labels, children = {}, {}
    todo = deque([a.initial])
    labels_seen = {a.initial}
    while todo:
        q = todo.popleft()
        v = arena.ids[("s", q)]
        p = arena.names[sol.strategy[v]]
        l, cs = moves[q][p[2]]
        # the chosen vertex may stand for several transitions; any of them works
        labels[q] = l
        children[q] = cs
        for c in cs:
            if c not in labels_seen:
                labels_seen.add(c)
                todo.append(c)
    tree = RegularTree(a.initial, labels, children)
    if certify and not nbt_membership(a, tree):
        raise AssertionError("emptiness witness failed its membership check")
    return EmptinessResult(False, tree, len(arena), nstates)


# ------------------------------------------------------------------ helpers


def all_trees(alphabet: Sequence[Label], k: int, max_nodes: int):
    """Every regular tree with at most ``max_nodes`` graph nodes (node 0 is the root)."""
    from itertools import product

    for n in range(1, max_nodes + 1):
        for labs in product(alphabet, repeat=n):
            for kids in product(range(n), repeat=n * k):
                children = {i: tuple(kids[i * k:(i + 1) * k]) for i in range(n)}
                t = RegularTree(0, dict(enumerate(labs)), children)
                if len(t.reachable()) == n:
                    yield t
