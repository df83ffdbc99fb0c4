"""Finite-state and visibly pushdown word automata over (tagged) label sets.

A letter is a frozenset of atomic propositions, or a pair ``(labels, tag)``
for tagged automata, ``tag`` being one of ``call``, ``ret``, ``int``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from itertools import chain, combinations
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .rgg import CALL, INT, RET

BOTTOM = "bottom"
TAGS = (CALL, RET, INT)

BUCHI, COBUCHI = "buchi", "cobuchi"
DET, NONDET, UNIVERSAL = "det", "nondet", "universal"


class AutomatonError(ValueError):
    pass


def powerset(items: Iterable[str]) -> List[frozenset]:
    items = sorted(items)
    return [frozenset(c) for c in chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))]


@dataclass(frozen=True)
class BuchiWordAutomaton:
    """Finite automaton on infinite words with Büchi or co-Büchi acceptance.

    Missing transitions go to ``fallback`` when it is set, otherwise the run
    dies (and is rejecting).
    """

    states: Tuple[Hashable, ...]
    initial: Hashable
    ap: FrozenSet[str]
    delta: Dict[Tuple[Hashable, Hashable], Tuple[Hashable, ...]]
    accepting: FrozenSet[Hashable]
    acceptance: str = BUCHI
    mode: str = DET
    tagged: bool = False
    fallback: Optional[Hashable] = None
    name: str = "B"

    __hash__ = None  # type: ignore[assignment]

    def letter(self, labels, tag_: str = INT):
        """Project a vertex labelling onto this automaton's alphabet."""
        lab = frozenset(labels) & self.ap
        return (lab, tag_) if self.tagged else lab

    def check_letter(self, a) -> None:
        if self.tagged:
            if not (isinstance(a, tuple) and len(a) == 2 and a[1] in TAGS and isinstance(a[0], frozenset)):
                raise AutomatonError(f"expected a tagged letter, got {a!r}")
            lab = a[0]
        else:
            if not isinstance(a, frozenset):
                raise AutomatonError(f"expected a label set, got {a!r}")
            lab = a
        if not lab <= self.ap:
            raise AutomatonError(f"symbol {sorted(lab)} outside alphabet {sorted(self.ap)}")

    def succ(self, q, a) -> Tuple[Hashable, ...]:
        out = self.delta.get((q, a))
        if out is None:
            return () if self.fallback is None else (self.fallback,)
        return out

    def step(self, q, a):
        """Deterministic successor, or None when the run dies."""
        out = self.succ(q, a)
        return out[0] if out else None

    def alphabet(self) -> List:
        sets = powerset(self.ap)
        if self.tagged:
            return [(s, t) for s in sets for t in TAGS]
        return sets

    def is_deterministic(self) -> bool:
        return all(len(set(v)) <= 1 for v in self.delta.values())

    def is_total(self) -> bool:
        if self.fallback is not None:
            return True
        letters = self.alphabet()
        return all(self.delta.get((q, a)) for q in self.states for a in letters)

    def totalized(self) -> "BuchiWordAutomaton":
        """Send missing transitions to a rejecting sink."""
        if self.is_total():
            return self
        sink = ("sink",)
        while sink in self.states:
            sink = sink + ("'",)
        acc = self.accepting | {sink} if self.acceptance == COBUCHI else self.accepting
        return replace(self, states=self.states + (sink,), accepting=frozenset(acc), fallback=sink)


@dataclass(frozen=True)
class Vpa:
    """Visibly pushdown automaton over tagged letters (label set, tag).

    ``internal`` maps (q, labels) to targets, ``push`` maps (q, labels) to
    (stack symbol, target) pairs and ``pop`` maps (q, labels, top) to
    targets, where ``top`` may be :data:`BOTTOM`.
    """

    states: Tuple[Hashable, ...]
    initial: Tuple[Hashable, ...]
    ap: FrozenSet[str]
    stack: Tuple[Hashable, ...]
    internal: Dict[Tuple[Hashable, frozenset], Tuple[Hashable, ...]]
    push: Dict[Tuple[Hashable, frozenset], Tuple[Tuple[Hashable, Hashable], ...]]
    pop: Dict[Tuple[Hashable, frozenset, Hashable], Tuple[Hashable, ...]]
    accepting: FrozenSet[Hashable]
    acceptance: str = BUCHI
    mode: str = DET
    name: str = "P"

    __hash__ = None  # type: ignore[assignment]

    def problems(self) -> List[str]:
        out = []
        if BOTTOM in self.stack:
            out.append("the bottom symbol cannot be a stack letter")
        for (q, a), targets in self.push.items():
            for g_, _ in targets:
                if g_ == BOTTOM or g_ not in self.stack:
                    out.append(f"push of {g_!r} from {q!r}")
        if self.mode == DET:
            if len(self.initial) != 1:
                out.append("deterministic VPA needs exactly one initial state")
            for table in (self.internal, self.push, self.pop):
                for key, targets in table.items():
                    if len(set(targets)) > 1:
                        out.append(f"nondeterministic transition at {key!r}")
        return out


@dataclass(frozen=True)
class VpaConfig:
    stack: Tuple[Hashable, ...]  # top first, BOTTOM last
    state: Hashable

    @property
    def top(self):
        return self.stack[0]


def initial_configs(p: Vpa) -> Set[VpaConfig]:
    return {VpaConfig((BOTTOM,), q) for q in p.initial}


def vpa_step(p: Vpa, c: VpaConfig, a: Tuple[frozenset, str]) -> Set[VpaConfig]:
    labels, t = a
    labels = frozenset(labels) & p.ap
    out = set()
    if t == INT:
        for q in p.internal.get((c.state, labels), ()):
            out.add(VpaConfig(c.stack, q))
    elif t == CALL:
        for g_, q in p.push.get((c.state, labels), ()):
            out.add(VpaConfig((g_,) + c.stack, q))
    elif t == RET:
        rest = c.stack if c.top == BOTTOM else c.stack[1:]
        for q in p.pop.get((c.state, labels, c.top), ()):
            out.add(VpaConfig(rest, q))
    else:
        raise AutomatonError(f"unknown tag {t!r}")
    return out


def run_prefix(p: Vpa, word: Sequence[Tuple[frozenset, str]]) -> Set[VpaConfig]:
    current = initial_configs(p)
    for a in word:
        current = set().union(*(vpa_step(p, c, a) for c in current)) if current else set()
    return current


# ------------------------------------------------------------ lasso checking


def _lasso_graph(b: BuchiWordAutomaton, stem: Sequence, cycle: Sequence):
    """Run graph over (position, state); position ranges over stem + cycle."""
    n, c = len(stem), len(cycle)
    word = list(stem) + list(cycle)

    def nxt(i):
        return i + 1 if i + 1 < n + c else n

    graph = nx.DiGraph()
    start = (0, b.initial)
    graph.add_node(start)
    todo = deque([start])
    while todo:
        i, q = todo.popleft()
        for q2 in b.succ(q, word[i]):
            v = (nxt(i), q2)
            if v not in graph:
                graph.add_node(v)
                todo.append(v)
            graph.add_edge((i, q), v)
    return graph, n


def _cyclic_sccs(graph: nx.DiGraph):
    for comp in nx.strongly_connected_components(graph):
        if len(comp) > 1 or any(graph.has_edge(v, v) for v in comp):
            yield comp


def accepts_lasso(b: BuchiWordAutomaton, stem: Sequence, cycle: Sequence) -> bool:
    """Decide acceptance of ``stem . cycle^omega``.

    Missing transitions lead to a rejecting sink, so every run is infinite.
    Existential modes look for one good run; universal mode looks for a bad
    one.
    """
    if not cycle:
        raise AutomatonError("cycle must be nonempty")
    for a in chain(stem, cycle):
        b.check_letter(a)
    b = b.totalized()
    graph, _ = _lasso_graph(b, stem, cycle)
    F = b.accepting
    outside = graph.subgraph([v for v in graph if v[1] not in F])
    hits_f = any(any(v[1] in F for v in c) for c in _cyclic_sccs(graph))
    avoids_f = any(True for _ in _cyclic_sccs(outside))
    if b.acceptance == BUCHI:
        good, bad = hits_f, avoids_f
    else:
        good, bad = avoids_f, hits_f
    if b.mode == UNIVERSAL:
        return not bad
    return good


def reachable_states(b: BuchiWordAutomaton) -> List[Hashable]:
    seen = {b.initial}
    order = [b.initial]
    todo = deque([b.initial])
    letters = b.alphabet()
    while todo:
        q = todo.popleft()
        for a in letters:
            for t in b.succ(q, a):
                if t not in seen:
                    seen.add(t)
                    order.append(t)
                    todo.append(t)
    return order


def cobuchi_to_buchi(b: BuchiWordAutomaton) -> BuchiWordAutomaton:
    """Deterministic Büchi automaton for the language of a deterministic co-Büchi one.

    The result keeps the transition structure; its accepting states are those
    in strongly connected parts without F.  This is possible exactly when no
    part that meets F also has a cycle avoiding F, and otherwise the language
    has no deterministic Büchi automaton at all.
    """
    if b.acceptance != COBUCHI or b.mode != DET:
        raise AutomatonError("cobuchi_to_buchi needs a deterministic co-Büchi automaton")
    t = b.totalized()
    graph = nx.DiGraph()
    states = reachable_states(t)
    graph.add_nodes_from(states)
    for q in states:
        for a in t.alphabet():
            for r in t.succ(q, a):
                graph.add_edge(q, r)
    acc = set()
    for comp in _cyclic_sccs(graph):
        if not comp & t.accepting:
            acc |= comp
            continue
        inner = graph.subgraph(comp - t.accepting)
        if any(True for _ in _cyclic_sccs(inner)):
            q = min(comp - t.accepting, key=repr)
            raise AutomatonError(f"the language has no deterministic Büchi automaton: around {q!r} "
                                 "a cycle avoiding F extends to one through F")
    return replace(t, accepting=frozenset(acc), acceptance=BUCHI, name=t.name + "/buchi")


# ------------------------------------------------------------------ products


def product_det(automata: Sequence[BuchiWordAutomaton]) -> BuchiWordAutomaton:
    """Intersection of deterministic Büchi automata (counter degeneralization)."""
    if not automata:
        raise AutomatonError("product of an empty list")
    for a in automata:
        if a.mode != DET or a.acceptance != BUCHI:
            raise AutomatonError("product_det needs deterministic Büchi automata")
        if a.ap != automata[0].ap or a.tagged != automata[0].tagged:
            raise AutomatonError("automata must share the alphabet")
    if len(automata) == 1:
        return automata[0]
    ts = [a.totalized() for a in automata]
    n = len(ts)
    letters = ts[0].alphabet()
    init = (tuple(a.initial for a in ts), 0)
    states = [init]
    seen = {init}
    delta = {}
    todo = deque([init])
    while todo:
        qs, i = todo.popleft()
        # counter i waits for component i; hitting F passes to the next
        j = (i + 1) % n if qs[i] in ts[i].accepting else i
        for a in letters:
            nq = tuple(t.step(q, a) for t, q in zip(ts, qs))
            if any(x is None for x in nq):
                continue
            target = (nq, j)
            delta[((qs, i), a)] = (target,)
            if target not in seen:
                seen.add(target)
                states.append(target)
                todo.append(target)
    accepting = frozenset(s for s in states if s[1] == 0 and s[0][0] in ts[0].accepting)
    return BuchiWordAutomaton(tuple(states), init, ts[0].ap, delta, accepting,
                              BUCHI, DET, ts[0].tagged, None,
                              "&".join(a.name for a in automata))


def universal_of(automata: Sequence[BuchiWordAutomaton]) -> BuchiWordAutomaton:
    """Disjoint union of deterministic automata read universally."""
    init = ("init",)
    states = [init]
    delta = {}
    acc = set()
    ts = [a.totalized() for a in automata]
    for i, a in enumerate(ts):
        states.extend((i, q) for q in a.states)
        acc.update((i, q) for q in a.accepting)
        for (q, l), targets in a.delta.items():
            delta[((i, q), l)] = tuple((i, t) for t in targets)
    letters = ts[0].alphabet()
    for a_ in letters:
        delta[(init, a_)] = tuple((i, t.step(t.initial, a_)) for i, t in enumerate(ts))
        for i, t in enumerate(ts):
            for q in t.states:
                if ((i, q), a_) not in delta:
                    delta[((i, q), a_)] = ((i, t.step(q, a_)),)
    return BuchiWordAutomaton(tuple(states), init, ts[0].ap, delta, frozenset(acc),
                              BUCHI, UNIVERSAL, ts[0].tagged, None, "univ")
