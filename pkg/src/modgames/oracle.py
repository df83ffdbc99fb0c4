"""Reference machinery for checking strategies and solving small games.

Everything here works directly on plays of the game and is independent
of the tree-automata solver, so the two can certify each other.
"""
from __future__ import annotations

from collections import deque
from itertools import product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from .results import BOUND_EXCEEDED, LoseUpTo, Win
from .rgg import LocalStrategy, ModularStrategy, Rgg, call, node, ret, tag
from .words import BUCHI, COBUCHI, DET, BuchiWordAutomaton, Vpa, VpaConfig, initial_configs, vpa_step


def restricted_moves(g: Rgg, loc: LocalStrategy, m: str, mem, v) -> List[Tuple[tuple, object]]:
    """Local moves from ``v`` allowed by ``loc`` as (vertex, next memory) pairs.

    Calls are not handled here: their successors depend on the callee.
    """
    succ = g.successors(m, v)
    if g.is_p0(m, v):
        i = loc.choose(mem, v)
        if i >= len(succ):
            return []
        succ = (succ[i],)
    return [(u, loc.next(mem, u)) for u in succ]


def _letter(b, g: Rgg, m: str, v):
    return b.letter(g.label(m, v), tag(v))


class _Summaries:
    """Fixpoint of entry contexts and exit summaries under a fixed strategy."""

    def __init__(self, g: Rgg, b: BuchiWordAutomaton, f: ModularStrategy):
        self.g, self.b, self.f = g, b, f
        self.F = b.accepting
        self.summaries: Dict[Tuple[str, object], set] = {}
        self.graphs: Dict[Tuple[str, object], dict] = {}
        self.dead_end = None

    def explore(self, ctx):
        g, b, F = self.g, self.b, self.F
        m, qe = ctx
        loc = self.f.of(m)
        mod = g.module(m)
        start = (loc.initial, node(mod.entry), qe, qe in F)
        edges = {}  # node -> list of (target, kind, fbit); kind in int/sum/call
        exits = set()
        calls = set()
        dead = None
        todo = deque([start])
        edges[start] = []
        while todo:
            x = todo.popleft()
            mem, v, q, seen = x
            out = edges[x]
            q1 = b.step(q, _letter(b, g, m, v))
            if v[0] == "call":
                callee = g.callee(m, v[1])
                calls.add((callee, q1))
                out.append(((callee, q1), "call", 0))
                for ex, q2, fb in sorted(self.summaries.get((callee, q1), ()), key=repr):
                    r = ret(v[1], ex)
                    y = (loc.next(mem, r), r, q2, seen or fb or q2 in F)
                    out.append((y, "sum", fb))
                    if y not in edges:
                        edges[y] = []
                        todo.append(y)
                continue
            if g.is_exit(m, v):
                if m == g.main:
                    dead = dead or x
                else:
                    exits.add((v[1], q1, seen))
                continue
            nxt = restricted_moves(g, loc, m, mem, v)
            if not nxt:
                dead = dead or x
            for u, mem2 in nxt:
                y = (mem2, u, q1, seen or q1 in F)
                out.append((y, "int", 0))
                if y not in edges:
                    edges[y] = []
                    todo.append(y)
        return edges, exits, calls, dead

    def run(self):
        g = self.g
        root = (g.main, self.b.initial)
        contexts = {root: None}
        changed = True
        while changed:
            changed = False
            for ctx in list(contexts):
                edges, exits, calls, dead = self.explore(ctx)
                self.graphs[ctx] = edges
                if dead is not None and self.dead_end is None:
                    self.dead_end = (ctx, dead)
                known = self.summaries.setdefault(ctx, set())
                if not exits <= known:
                    known |= exits
                    changed = True
                for c in calls:
                    if c not in contexts:
                        contexts[c] = None
                        changed = True
        return self

    def global_graph(self) -> nx.DiGraph:
        """Collapsed play graph.

        Parallel summaries are merged: ``f_all`` holds when every variant
        visits F, ``f_any`` when some variant does.
        """
        graph = nx.DiGraph()
        entries = {}
        for ctx, edges in self.graphs.items():
            m, qe = ctx
            loc = self.f.of(m)
            entries[ctx] = (ctx, (loc.initial, node(self.g.module(m).entry), qe, qe in self.F))
        for ctx, edges in self.graphs.items():
            for x, out in edges.items():
                graph.add_node((ctx, x))
                for y, kind, fb in out:
                    target = entries[y] if kind == "call" else (ctx, y)
                    fall = fany = bool(fb)
                    if graph.has_edge((ctx, x), target):
                        d = graph.edges[(ctx, x), target]
                        fall, fany = fall and d["f_all"], fany or d["f_any"]
                    graph.add_edge((ctx, x), target, f_all=fall, f_any=fany)
        return graph


def check_strategy(g: Rgg, b: BuchiWordAutomaton, f: ModularStrategy, explain: bool = False):
    """Exact check that every play conforming to ``f`` is won by Player 0.

    Returns a bool, or (bool, reason) with ``explain=True``.
    """
    if b.mode != DET:
        raise ValueError("check_strategy needs a deterministic automaton")
    b = b.totalized()
    s = _Summaries(g, b, f).run()

    def answer(ok, why):
        return (ok, why) if explain else ok

    if s.dead_end is not None:
        return answer(False, f"finite play ending at {s.dead_end}")
    graph = s.global_graph()
    F = b.accepting
    if b.acceptance == BUCHI:
        keep = graph.edge_subgraph([(u, v) for u, v, d in graph.edges(data=True)
                                    if not d["f_all"] and u[1][2] not in F and v[1][2] not in F])
        for comp in nx.strongly_connected_components(keep):
            if len(comp) > 1 or any(keep.has_edge(v, v) for v in comp):
                return answer(False, f"play looping without accepting visits through {min(comp, key=repr)}")
    else:
        for comp in nx.strongly_connected_components(graph):
            sub = graph.subgraph(comp)
            if sub.number_of_edges() == 0:
                continue
            if any(v[1][2] in F for v in comp) or any(d["f_any"] for _, _, d in sub.edges(data=True)):
                return answer(False, "play looping through accepting states")
    return answer(True, "all plays accepted")


# ------------------------------------------------------------ bounded check


def check_strategy_bounded(g: Rgg, spec, f: ModularStrategy, depth: int = 4, steps: int = 200_000):
    """Explicit exploration of conforming plays with call depth at most ``depth``.

    ``spec`` is a deterministic word automaton or a deterministic VPA.  The
    result is exact unless :data:`BOUND_EXCEEDED` is returned.
    """
    is_vpa = isinstance(spec, Vpa)
    if spec.mode != DET:
        raise ValueError("check_strategy_bounded needs a deterministic automaton")
    if not is_vpa:
        spec = spec.totalized()
    F = spec.accepting

    def advance(aut, v_labels, t):
        if is_vpa:
            nxt = vpa_step(spec, aut, (v_labels, t))
            return next(iter(nxt)) if nxt else None
        return spec.step(aut, spec.letter(v_labels, t))

    def in_f(aut):
        return (aut.state if is_vpa else aut) in F

    start_aut = next(iter(initial_configs(spec))) if is_vpa else spec.initial
    m0 = g.main
    loc0 = f.of(m0)
    start = ((), m0, loc0.initial, node(g.module(m0).entry), start_aut)
    graph = nx.DiGraph()
    graph.add_node(start)
    todo = deque([start])
    hit_bound = False
    violation = False
    while todo:
        x = todo.popleft()
        stack, m, mem, v, aut = x
        if aut is None:
            # the automaton is stuck: no run, the play is lost
            violation = True
            break
        loc = f.of(m)
        aut1 = advance(aut, g.label(m, v), tag(v))
        succ = []
        if v[0] == "call":
            if len(stack) >= depth:
                hit_bound = True
                continue
            callee = g.callee(m, v[1])
            cl = f.of(callee)
            succ.append((stack + ((m, mem, v[1]),), callee, cl.initial, node(g.module(callee).entry), aut1))
        elif g.is_exit(m, v):
            if stack:
                cm, cmem, box = stack[-1]
                r = ret(box, v[1])
                succ.append((stack[:-1], cm, f.of(cm).next(cmem, r), r, aut1))
        else:
            for u, mem2 in restricted_moves(g, loc, m, mem, v):
                succ.append((stack, m, mem2, u, aut1))
        if not succ:
            violation = True
            break
        for y in succ:
            if y not in graph:
                graph.add_node(y)
                todo.append(y)
                if len(graph) > steps:
                    hit_bound = True
                    todo.clear()
                    break
            graph.add_edge(x, y)
    if violation:
        return False
    if spec.acceptance == BUCHI:
        bad = graph.subgraph([x for x in graph if x[4] is not None and not in_f(x[4])])
        cyc = any(len(c) > 1 or bad.has_edge(next(iter(c)), next(iter(c)))
                  for c in nx.strongly_connected_components(bad))
    else:
        cyc = False
        for c in nx.strongly_connected_components(graph):
            sub = graph.subgraph(c)
            if sub.number_of_edges() and any(x[4] is not None and in_f(x[4]) for x in c):
                cyc = True
                break
    if cyc:
        return False
    return BOUND_EXCEEDED if hit_bound else True


# ------------------------------------------------------ strategy enumeration


def decision_vertices(g: Rgg, m: str) -> List[tuple]:
    return [v for v in g.vertices(m) if g.is_p0(m, v) and len(g.successors(m, v)) > 1]


def _reaches_decision(g: Rgg, m: str) -> set:
    """Vertices from which a decision vertex is locally reachable (inclusive)."""
    verts = g.vertices(m)
    dec = set(decision_vertices(g, m))
    rev = {v: [] for v in verts}
    for v in verts:
        for u in g.successors(m, v):
            rev[u].append(v)
    seen = set(dec)
    todo = deque(dec)
    while todo:
        u = todo.popleft()
        for v in rev[u]:
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


def _signature(g: Rgg, m: str, loc: LocalStrategy):
    """Canonical minimized behaviour of a local strategy on the module graph."""
    entry = node(g.module(m).entry)
    start = (loc.initial, entry)
    nodes = [start]
    index = {start: 0}
    succ = []
    i = 0
    while i < len(nodes):
        mem, v = nodes[i]
        i += 1
        if g.is_p0(m, v) and len(g.successors(m, v)) > 1:
            choice = loc.choose(mem, v)
            moves = [(g.successors(m, v)[choice], loc.next(mem, g.successors(m, v)[choice]))] \
                if choice < len(g.successors(m, v)) else []
            out = choice
        else:
            moves = [(u, loc.next(mem, u)) for u in g.successors(m, v)]
            out = None
        row = []
        for u, mem2 in moves:
            key = (mem2, u)
            if key not in index:
                index[key] = len(nodes)
                nodes.append(key)
            row.append(index[key])
        succ.append((v, out, row))
    # partition refinement on (vertex, output) then successors
    block = {}
    colors = [hash((v, out)) for v, out, _ in succ]
    while True:
        keyed = [(colors[j], tuple(colors[t] for t in succ[j][2])) for j in range(len(succ))]
        renum = {}
        new = [renum.setdefault(k, len(renum)) for k in keyed]
        if len(renum) == len(set(colors)):
            colors = new
            break
        colors = new
    # canonical numbering by BFS from the start block
    order = {}
    todo = deque([0])
    seen = {0}
    rows = {}
    while todo:
        j = todo.popleft()
        c = colors[j]
        if c not in order:
            order[c] = len(order)
        if c in rows:
            continue
        v, out, row = succ[j]
        rows[c] = (v, out, tuple(row))
        for t in row:
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return tuple(sorted((order[c], vo[0], vo[1], tuple(order[colors[t]] for t in vo[2]))
                        for c, vo in rows.items()))


def local_strategies(g: Rgg, m: str, bound: int) -> List[LocalStrategy]:
    """All behaviourally distinct local strategies with at most ``bound`` memory states."""
    if bound < 1:
        raise ValueError("memory bound must be at least 1")
    relevant = _reaches_decision(g, m)
    entry = node(g.module(m).entry)
    out: List[LocalStrategy] = []
    seen = set()

    def successors(v):
        return g.successors(m, v)

    results = []

    def expand(update, move, nstates):
        """Find the first undefined choice reachable from the entry, branch on it."""
        visited = {(0, entry)}
        todo = deque([(0, entry)])
        while todo:
            mem, v = todo.popleft()
            succ = successors(v)
            if g.is_p0(m, v) and len(succ) > 1:
                if (mem, v) not in move:
                    for i in range(len(succ)):
                        move[(mem, v)] = i
                        expand(update, move, nstates)
                    del move[(mem, v)]
                    return
                targets = [succ[move[(mem, v)]]]
            else:
                targets = list(succ)
            for u in targets:
                if u in relevant and (mem, u) not in update:
                    for nxt in range(min(nstates + 1, bound)):
                        update[(mem, u)] = nxt
                        expand(update, move, max(nstates, nxt + 1))
                    del update[(mem, u)]
                    return
                nxt = update.get((mem, u), mem)
                if (nxt, u) not in visited:
                    visited.add((nxt, u))
                    todo.append((nxt, u))
        loc = LocalStrategy(0, dict(update), dict(move))
        sig = _signature(g, m, loc)
        if sig not in seen:
            seen.add(sig)
            results.append(loc)

    expand({}, {}, 1)
    return results


def enumerate_strategies(g: Rgg, bound: int) -> Iterator[ModularStrategy]:
    mods = list(g.modules)
    per = [local_strategies(g, m, bound) for m in mods]
    for combo in product(*per):
        yield ModularStrategy(dict(zip(mods, combo)))


def count_strategies(g: Rgg, bound: int) -> int:
    n = 1
    for m in g.modules:
        n *= len(local_strategies(g, m, bound))
    return n


def _check_one(args):
    g, b, f = args
    return check_strategy(g, b, f)


def brute_solve(g: Rgg, b: BuchiWordAutomaton, bound: int = 2, jobs: int = 1):
    """First enumerated strategy that passes :func:`check_strategy`."""
    checked = 0
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        strategies = list(enumerate_strategies(g, bound))
        with ProcessPoolExecutor(jobs) as pool:
            for f, ok in zip(strategies, pool.map(_check_one, [(g, b, f) for f in strategies],
                                                  chunksize=16)):
                checked += 1
                if ok:
                    return Win(f)
        return LoseUpTo(bound, checked)
    for f in enumerate_strategies(g, bound):
        checked += 1
        if check_strategy(g, b, f):
            return Win(f)
    return LoseUpTo(bound, checked)
