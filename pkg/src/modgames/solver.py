"""Modular-strategy synthesis through Büchi tree automata.

A modular strategy is encoded as a strategy tree: the root has one child per
module, and below it the module's local unwinding is spelled out, with the
chosen successor annotated at every Player-0 vertex.  A guessed assumption
triple (exit selection, Büchi call graph, extended pre-post condition) splits
the winning condition into local checks.  One checker copy runs per entry
context and jumps over calls using the guessed summaries.  The solver then
looks for a tree accepted by the structural automaton and by the checker.
"""
from __future__ import annotations

import itertools
import logging
import math
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Hashable, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .oracle import check_strategy
from .results import Lose, Win
from .rgg import LocalStrategy, ModularStrategy, Rgg, errors, node, ret, tag
from .trees import (BreakpointNbt, EmptinessResult, Nbt, ProductNbt, RegularTree, Ubt,
                    nbt_emptiness)
from .words import BUCHI, COBUCHI, DET, AutomatonError, BuchiWordAutomaton, cobuchi_to_buchi

log = logging.getLogger(__name__)

ROOT, DUMMY = "root", "dummy"
Q0, QA, QR = "q0", "qa", "qr"


class SolverError(RuntimeError):
    pass


class SoundnessError(SolverError):
    """A strategy extracted from a witness failed certification."""


class DecodeError(ValueError):
    pass


# -------------------------------------------------------------- tree labels


def vertex_label(g: Rgg, m: str, v, choice: Optional[int] = None):
    if g.is_p0(m, v):
        return ("a", m, v, 0 if choice is None else choice)
    return ("v", m, v)


def omega_labels(g: Rgg) -> List:
    out = [ROOT, DUMMY]
    for m in g.modules:
        for v in g.vertices(m):
            if g.is_p0(m, v):
                out.extend(("a", m, v, i) for i in range(max(1, len(g.successors(m, v)))))
            else:
                out.append(("v", m, v))
    return out


class StrategyTreeNbt(Nbt):
    """Accepts strategy trees, optionally restricted by exits and a call graph.

    States are ``root``, ``dummy`` and ``(m, v, enabled)``.  With ``exits``
    and ``calls`` given, an enabled exit outside ``exits[m]`` or an enabled
    call along a module pair missing from ``calls`` has no transition.
    Modules outside ``active`` start disabled.
    """

    all_accepting = True

    def __init__(self, g: Rgg, exits: Optional[Dict[str, FrozenSet[str]]] = None,
                 calls: Optional[Set[Tuple[str, str]]] = None,
                 active: Optional[Set[str]] = None):
        self.g = g
        self.k = g.arity()
        self.exits, self.calls = exits, calls
        self.modules = list(g.modules)
        self.active = set(self.modules) if active is None else set(active)
        self.initial = ROOT
        self._cache: Dict[Hashable, List] = {}
        self._by_label: Dict[Hashable, Dict] = {}

    def is_accepting(self, q) -> bool:
        return True

    def pad(self, cs: Sequence) -> Tuple:
        return tuple(cs) + (DUMMY,) * (self.k - len(cs))

    def module_root(self, m: str):
        return (m, node(self.g.module(m).entry), m in self.active)

    def _compute(self, q):
        g = self.g
        if q == ROOT:
            return [(ROOT, self.pad([self.module_root(m) for m in self.modules]))]
        if q == DUMMY:
            return [(DUMMY, (DUMMY,) * self.k)]
        m, v, en = q
        succ = g.successors(m, v)
        if en and self.exits is not None and g.is_exit(m, v) and v[1] not in self.exits.get(m, ()):
            return []
        if en and self.calls is not None and v[0] == "call" and (m, g.callee(m, v[1])) not in self.calls:
            return []
        if g.is_p0(m, v):
            return [(("a", m, v, i), self.pad([(m, u, en and j == i) for j, u in enumerate(succ)]))
                    for i in range(max(1, len(succ)))]
        return [(("v", m, v), self.pad([(m, u, en) for u in succ]))]

    def moves(self, q):
        out = self._cache.get(q)
        if out is None:
            out = self._cache[q] = self._compute(q)
            self._by_label[q] = {l: [cs] for l, cs in out}
        return out

    def moves_on(self, q, label):
        if q not in self._by_label:
            self.moves(q)
        return self._by_label[q].get(label, [])

    def size(self) -> int:
        return 2 + 2 * self.g.size()


def build_strategy_tree_aut(g: Rgg) -> StrategyTreeNbt:
    return StrategyTreeNbt(g)


# ------------------------------------------------------------- assumptions


@dataclass(frozen=True)
class BuchiCallGraph:
    vertices: FrozenSet[Tuple[str, Hashable]]
    edges: FrozenSet[Tuple[Tuple[str, Hashable], Tuple[str, Hashable]]]
    f_edges: FrozenSet[Tuple[Tuple[str, Hashable], Tuple[str, Hashable]]] = frozenset()

    def module_edges(self) -> Set[Tuple[str, str]]:
        return {(a[0], b[0]) for a, b in self.edges}

    def cycles_ok(self) -> bool:
        """Every cycle carries an accepting edge, i.e. plain edges are acyclic."""
        plain = nx.DiGraph()
        plain.add_edges_from(e for e in self.edges if e not in self.f_edges)
        return nx.is_directed_acyclic_graph(plain)

    def reachable_modules(self, main: str) -> Set[str]:
        mods = nx.DiGraph()
        mods.add_node(main)
        mods.add_edges_from(self.module_edges())
        return {main} | nx.descendants(mods, main)


@dataclass(frozen=True)
class ExtendedPrePost:
    pre: FrozenSet[Tuple[str, Hashable]]
    post: Tuple[Tuple[Tuple[str, Hashable, str, Hashable], bool], ...] = ()

    @property
    def final(self) -> Dict[Tuple[str, Hashable, str, Hashable], bool]:
        return dict(self.post)

    def consistent(self) -> bool:
        return all((m, q) in self.pre for (m, q, _, _), _f in self.post)


@dataclass(frozen=True)
class AssumptionTriple:
    exits: Tuple[Tuple[str, FrozenSet[str]], ...]
    bg: BuchiCallGraph
    pp: ExtendedPrePost

    def exits_of(self) -> Dict[str, FrozenSet[str]]:
        return dict(self.exits)


def _post_index(post: Dict) -> Dict[Tuple[str, Hashable, str], List[Tuple[Hashable, bool]]]:
    idx: Dict = {}
    for (m, q, x, q2), fin in sorted(post.items(), key=repr):
        idx.setdefault((m, q, x), []).append((q2, fin))
    return idx


# ---------------------------------------------------------- checker automaton


def build_spec_checker(g: Rgg, b: BuchiWordAutomaton, pp: ExtendedPrePost, bg: BuchiCallGraph,
                       guarantee: Optional[Dict] = None) -> Ubt:
    """Universal automaton checking the word automaton against pp and bg.

    ``guarantee`` optionally replaces the Post tuples checked at exits, the
    ones of pp then only describing callees.

    Copies are ``(q, bbit, fbit, qpre)`` with ``q`` the automaton state before the
    current node.  ``bbit`` records an accepting visit since the activation
    started (the current node included), ``fbit`` that the summary used to
    reach this return visited one.  Entering ``qa`` is modelled by sending no
    obligation.
    """
    if b.mode != DET or b.acceptance != BUCHI:
        raise SolverError("the tree construction needs a deterministic Büchi automaton")
    b = b.totalized()
    F = b.accepting
    k = g.arity()
    mods = list(g.modules)
    pre = pp.pre
    post = pp.final
    pidx = _post_index(post)
    owned = post if guarantee is None else guarantee
    edges, fedges = bg.edges, bg.f_edges

    def rule(s, label):
        if s == Q0:
            if label != ROOT:
                return ()
            return [(i, (q, q in F, False, q)) for i, m in enumerate(mods)
                    for (m2, q) in sorted(pre, key=repr) if m2 == m]
        if not isinstance(label, tuple):
            return ()
        q, bb, _fb, qp = s
        m, v = label[1], label[2]
        q1 = b.step(q, b.letter(g.label(m, v), tag(v)))
        if v[0] == "call":
            callee = g.callee(m, v[1])
            if (callee, q1) not in pre:
                return [(0, QR)]
            e = ((m, qp), (callee, q1))
            if e not in edges:
                return [(0, QR)]
            bb1 = bb or q1 in F
            if e in fedges and not bb1:
                return [(0, QR)]
            out = []
            for d, x in enumerate(g.module(callee).exits):
                for q2, fin in pidx.get((callee, q1, x), ()):
                    out.append((d, (q2, bb1 or fin or q2 in F, fin, qp)))
            return out
        if g.is_exit(m, v):
            if m == g.main:
                return [(0, QR)]
            fin = owned.get((m, qp, v[1], q1))
            if fin is None or (fin and not bb):
                return [(0, QR)]
            return ()
        succ = g.successors(m, v)
        if not succ:
            return [(0, QR)]
        if label[0] == "a":
            if label[3] >= len(succ):
                return [(0, QR)]
            dirs = [label[3]]
        else:
            dirs = range(len(succ))
        nxt = (q1, bb or q1 in F, False, qp)
        return [(d, nxt) for d in dirs]

    copies = [(q, bb, fb, qp) for q in b.states for bb in (False, True)
              for fb in (False, True) for qp in b.states]
    accepting = frozenset([QA] + [c for c in copies if c[0] in F or c[2]])
    return Ubt(tuple([Q0, QA, QR] + copies), frozenset({Q0}), tuple(omega_labels(g)), k,
               {}, accepting, frozenset({QR}), rule)


def build_exits_bg_aut(g: Rgg, exits: Dict[str, FrozenSet[str]], bg: BuchiCallGraph) -> StrategyTreeNbt:
    return StrategyTreeNbt(g, exits, bg.module_edges(), bg.reachable_modules(g.main))


def build_full_automaton(g: Rgg, b: BuchiWordAutomaton, t: AssumptionTriple) -> ProductNbt:
    struct = build_exits_bg_aut(g, t.exits_of(), t.bg)
    return ProductNbt(struct, BreakpointNbt(build_spec_checker(g, b, t.pp, t.bg)))


# ------------------------------------------------------------ encode/decode


def encode_strategy(g: Rgg, f: ModularStrategy) -> RegularTree:
    """Fold the strategy tree of ``f`` through the strategy's memory."""
    k = g.arity()
    labels: Dict = {}
    children: Dict = {}

    def pad(cs):
        return tuple(cs) + (DUMMY,) * (k - len(cs))

    labels[DUMMY] = DUMMY
    children[DUMMY] = (DUMMY,) * k
    roots = []
    todo = deque()
    for m in g.modules:
        loc = f.of(m)
        r = (m, loc.initial, node(g.module(m).entry))
        roots.append(r)
        todo.append(r)
    labels[ROOT] = ROOT
    children[ROOT] = pad(roots)
    seen = set(roots)
    while todo:
        n = todo.popleft()
        m, mem, v = n
        loc = f.of(m)
        succ = g.successors(m, v)
        if g.is_p0(m, v):
            i = loc.choose(mem, v)
            if succ and i >= len(succ):
                raise ValueError(f"strategy picks successor {i} of {v} in {m}")
            labels[n] = ("a", m, v, i if succ else 0)
        else:
            labels[n] = ("v", m, v)
        kids = [(m, loc.next(mem, u), u) for u in succ]
        children[n] = pad(kids)
        for c in kids:
            if c not in seen:
                seen.add(c)
                todo.append(c)
    # the padding node is unreachable when nothing needs padding
    return RegularTree(ROOT, labels, children).trimmed()


def decode_strategy(g: Rgg, t: RegularTree) -> ModularStrategy:
    """Read a strategy off a strategy tree; tree nodes become memory states."""
    k = g.arity()
    mods = list(g.modules)
    if t.label(t.root) != ROOT:
        raise DecodeError("root is not labelled root")
    kids = t.children[t.root]
    if len(kids) != k:
        raise DecodeError(f"root has {len(kids)} children, expected {k}")
    dummies = set()

    def check_dummy(n):
        stack = [n]
        while stack:
            x = stack.pop()
            if x in dummies:
                continue
            if t.label(x) != DUMMY:
                raise DecodeError(f"padding node {x!r} is not a dummy")
            dummies.add(x)
            stack.extend(t.children[x])

    for c in kids[len(mods):]:
        check_dummy(c)
    local = {}
    for m, r in zip(mods, kids):
        upd, mv = {}, {}
        todo = deque([(r, node(g.module(m).entry))])
        seen = {r}
        while todo:
            n, v = todo.popleft()
            lab = t.label(n)
            if not isinstance(lab, tuple) or lab[1] != m or lab[2] != v:
                raise DecodeError(f"node {n!r} should carry vertex {v} of {m}, found {lab!r}")
            succ = g.successors(m, v)
            if g.is_p0(m, v):
                if lab[0] != "a" or not 0 <= lab[3] < max(1, len(succ)):
                    raise DecodeError(f"bad annotation {lab!r} at a Player-0 vertex")
                mv[(n, v)] = lab[3]
            elif lab[0] != "v":
                raise DecodeError(f"annotation at the non-Player-0 vertex {v} of {m}")
            cs = t.children[n]
            if len(cs) != k:
                raise DecodeError(f"node {n!r} has {len(cs)} children")
            for d, u in enumerate(succ):
                c = cs[d]
                upd[(n, u)] = c
                if c not in seen:
                    seen.add(c)
                    todo.append((c, u))
            for c in cs[len(succ):]:
                check_dummy(c)
        local[m] = LocalStrategy(r, upd, mv)
    return ModularStrategy(local)


# ----------------------------------------------------------- over-approximation


class _MayAnalysis:
    """Contexts, call pairs and summaries reachable under some choices."""

    def __init__(self, g: Rgg, b: BuchiWordAutomaton):
        self.g, self.b = g, b
        self.contexts: Set = set()
        self.summaries: Dict = {}
        self.calls: Dict = {}
        root = (g.main, b.initial)
        self.contexts.add(root)
        changed = True
        while changed:
            changed = False
            for ctx in sorted(self.contexts, key=repr):
                ex, cl = self._explore(ctx)
                if not ex <= self.summaries.setdefault(ctx, set()):
                    self.summaries[ctx] |= ex
                    changed = True
                self.calls[ctx] = cl
                for c in cl:
                    if c not in self.contexts:
                        self.contexts.add(c)
                        changed = True

    def _explore(self, ctx):
        g, b = self.g, self.b
        F = b.accepting
        m, qe = ctx
        start = (node(g.module(m).entry), qe, False)
        seen = {start}
        todo = deque([start])
        exits, calls = set(), set()
        while todo:
            v, q, f = todo.popleft()
            f = f or q in F
            q1 = b.step(q, b.letter(g.label(m, v), tag(v)))
            nxt = []
            if v[0] == "call":
                callee = g.callee(m, v[1])
                calls.add((callee, q1))
                for x, q2, fin in self.summaries.get((callee, q1), ()):
                    nxt.append((ret(v[1], x), q2, f or fin))
            elif g.is_exit(m, v):
                if m != g.main:
                    exits.add((v[1], q1, f))
            else:
                nxt = [(u, q1, f) for u in g.successors(m, v)]
            for y in nxt:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return exits, calls

    def tuples(self, ctx) -> List[Tuple[str, Hashable, bool]]:
        """(exit, state, may visit F) per reachable exit."""
        out: Dict = {}
        for x, q2, fin in self.summaries.get(ctx, ()):
            out[(x, q2)] = out.get((x, q2), False) or fin
        return sorted(((x, q2, fin) for (x, q2), fin in out.items()), key=repr)

    def may_accept(self) -> bool:
        """False when no accepting state of the word automaton is reachable at all."""
        b = self.b
        seen = {b.initial}
        todo = [b.initial]
        letters = b.alphabet()
        while todo:
            q = todo.pop()
            if q in b.accepting:
                return True
            for a in letters:
                for t in b.succ(q, a):
                    if t not in seen:
                        seen.add(t)
                        todo.append(t)
        return False


# -------------------------------------------------------------- statistics


ENVELOPE_C1 = 4
ENVELOPE_C2 = 1


def log2_envelope(g_size: int, q: int, k: int, beta: int, c1: int = ENVELOPE_C1,
                  c2: int = ENVELOPE_C2) -> float:
    """log2 of c1 * |G| * 2^(c2 * (|Q|^2 (k + log|Q|) + beta))."""
    return math.log2(c1 * max(g_size, 1)) + c2 * (q * q * (k + math.log2(max(q, 1))) + beta)


def envelope(g_size: int, q: int, k: int, beta: int, c1: int = ENVELOPE_C1, c2: int = ENVELOPE_C2) -> float:
    """The envelope itself; ``inf`` once it leaves the float range."""
    e = log2_envelope(g_size, q, k, beta, c1, c2)
    return 2.0 ** e if e < 1000 else math.inf


@dataclass
class SolverStats:
    k: int = 0
    exits: int = 0
    beta: int = 0
    spec_states: int = 0
    game_size: int = 0
    checker_states: int = 0
    structure_states: int = 0
    triples: int = 0
    local_checks: int = 0
    cache_hits: int = 0
    max_product_states: int = 0
    final_nbt_states: int = 0
    seconds: float = 0.0

    @property
    def bound(self) -> float:
        return envelope(self.game_size, self.spec_states, max(self.exits, 1), self.beta)

    @property
    def log2_bound(self) -> float:
        return log2_envelope(self.game_size, self.spec_states, max(self.exits, 1), self.beta)

    def within_envelope(self) -> bool:
        return math.log2(max(self.final_nbt_states, 1)) <= self.log2_bound

    def checker_ratio(self) -> float:
        return self.checker_states / max(1, self.spec_states ** 2)

    def lines(self) -> List[str]:
        return [f"k = {self.k}", f"exits = {self.exits}", f"beta = {self.beta}",
                f"spec states = {self.spec_states}", f"game size = {self.game_size}",
                f"checker states = {self.checker_states}",
                f"structure states = {self.structure_states}",
                f"assumption triples = {self.triples}", f"local checks = {self.local_checks}",
                f"cache hits = {self.cache_hits}",
                f"largest product = {self.max_product_states}",
                f"final automaton states = {self.final_nbt_states}",
                f"envelope = 2^{self.log2_bound:.1f}",
                f"within envelope = {self.within_envelope()}",
                f"seconds = {self.seconds:.3f}"]


# ------------------------------------------------------------- enumeration


def _subsets(items: Sequence) -> Iterator[Tuple]:
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def _callable_pairs(g: Rgg, q_states) -> List:
    pairs = []
    for m, m2 in g.call_edges():
        for q in q_states:
            for q2 in q_states:
                pairs.append(((m, q), (m2, q2)))
    return pairs


def enumerate_assumptions(g: Rgg, b: BuchiWordAutomaton) -> Iterator[AssumptionTriple]:
    """Every assumption triple satisfying the invariants, smallest Post sets first.

    Post tuples use exits in the module's selection and have their entry
    context in Pre; Pre contains the initial context of the main module;
    every cycle of the call graph carries an accepting edge.
    """
    Q = list(b.totalized().states)
    mods = list(g.modules)
    q0 = b.initial
    exit_choices = [list(_subsets(g.module(m).exits)) for m in mods]
    ctxs = [(m, q) for m in mods for q in Q if (m, q) != (g.main, q0)]
    pairs = _callable_pairs(g, Q)
    bgs = []
    for es in _subsets(pairs):
        for fs in _subsets(es):
            bg = BuchiCallGraph(frozenset((m, q) for m in mods for q in Q), frozenset(es), frozenset(fs))
            if bg.cycles_ok():
                bgs.append(bg)
    max_post = sum(len(g.module(m).exits) for m in mods) * len(Q) * len(Q)
    for size in range(max_post + 1):
        for ex in itertools.product(*exit_choices):
            exits = dict(zip(mods, (frozenset(x) for x in ex)))
            for extra in _subsets(ctxs):
                pre = frozenset(((g.main, q0),) + extra)
                tuples = [(m, q, x, q2) for (m, q) in sorted(pre, key=repr)
                          for x in g.module(m).exits if x in exits[m] for q2 in Q]
                for post in itertools.combinations(tuples, size):
                    for fins in itertools.product((False, True), repeat=size):
                        pp = ExtendedPrePost(pre, tuple(zip(post, fins)))
                        for bg in bgs:
                            yield AssumptionTriple(tuple(exits.items()), bg, pp)


# ------------------------------------------------------------------- solve


class _Search:
    """Pruned search over assumption triples with per-module local checks."""

    def __init__(self, g: Rgg, b: BuchiWordAutomaton, stats: SolverStats, max_assumptions=None):
        self.g = g
        self.b = b.totalized()
        self.F = self.b.accepting
        self.stats = stats
        self.max_assumptions = max_assumptions
        self.may = _MayAnalysis(g, self.b)
        self.k = g.arity()
        self.struct = StrategyTreeNbt(g)
        self.cache: Dict = {}
        self.mods = list(g.modules)
        self.callees = {m: sorted(set(g.module(m).boxes.values())) for m in self.mods}
        cg = nx.DiGraph()
        cg.add_nodes_from(self.mods)
        cg.add_edges_from(g.call_edges())
        cond = nx.condensation(cg)
        order = list(reversed(list(nx.topological_sort(cond))))
        self.sccs = [sorted(cond.nodes[c]["members"], key=self.mods.index) for c in order]
        self.recursive = {i: len(s) > 1 or any(cg.has_edge(m, m) for m in s) for i, s in enumerate(self.sccs)}

    # -- local check -------------------------------------------------------

    def local_check(self, m, pre, post, edges, fedges, guarantee=None) -> EmptinessResult:
        """Is there a local strategy for m meeting its Post under the assumptions?

        ``post`` describes the callees; ``guarantee`` (default ``post``) lists
        the tuples m may produce at its exits.
        """
        g = self.g
        own = post if guarantee is None else guarantee
        pre_m = frozenset(q for (m2, q) in pre if m2 == m)
        callees = set(self.callees[m])
        key = (m, pre_m,
               frozenset((c, q) for (c, q) in pre if c in callees),
               frozenset((t, f) for t, f in post.items() if t[0] in callees),
               frozenset((t, f) for t, f in own.items() if t[0] == m),
               frozenset(e for e in edges if e[0][0] == m),
               frozenset(e for e in fedges if e[0][0] == m))
        hit = self.cache.get(key)
        if hit is not None:
            self.stats.cache_hits += 1
            return hit
        self.stats.local_checks += 1
        pp = ExtendedPrePost(frozenset(pre), tuple(sorted(post.items(), key=repr)))
        bg = BuchiCallGraph(frozenset(), frozenset(edges), frozenset(fedges))
        ubt = build_spec_checker(g, self.b, pp, bg, guarantee)
        bp = BreakpointNbt(ubt)
        copies = [(q, q in self.F, False, q) for q in sorted(pre_m, key=repr)]
        # full exit selection and call graph: the weakest structural constraint
        start = ((m, node(g.module(m).entry), bool(pre_m)), bp.state_for(copies))
        prod = ProductNbt(self.struct, bp, start)
        res = nbt_emptiness(prod)
        self.stats.max_product_states = max(self.stats.max_product_states, res.states)
        self.cache[key] = res
        return res

    # -- post candidates -----------------------------------------------------

    def candidate_tuples(self, scc, pre) -> List:
        """Candidate Post tuples with their allowed levels.

        Level 0 is absent, 1 present with final, 2 present without final;
        final is only offered when some path may visit F.
        """
        out = []
        for m in scc:
            for (m2, q) in sorted(pre, key=repr):
                if m2 != m:
                    continue
                for x, q2, fin in self.may.tuples((m, q)):
                    out.append(((m, q, x, q2), (0, 1, 2) if fin else (0, 2)))
        return out

    @staticmethod
    def _post_of(tuples, point) -> Dict:
        return {t: lvl == 1 for (t, _), lvl in zip(tuples, point) if lvl}

    def minimal_posts(self, i, pre, chosen, edges, fedges) -> List[Dict]:
        scc = self.sccs[i]
        tuples = self.candidate_tuples(scc, pre)
        n = len(tuples)

        def ok(point, assumed=None):
            own = dict(chosen)
            own.update(self._post_of(tuples, point))
            if assumed is None:
                return all(not self.local_check(m, pre, own, edges, fedges).empty for m in scc)
            post = dict(chosen)
            post.update(self._post_of(tuples, assumed))
            return all(not self.local_check(m, pre, post, edges, fedges, own).empty for m in scc)

        def below(j, p):
            levels = tuples[j][1]
            k = levels.index(p[j])
            return None if k == 0 else p[:j] + (levels[k - 1],) + p[j + 1:]

        def minimal_guarantees(assumed):
            # with the assumption fixed, achievable guarantees are upward closed
            top = tuple(lv[-1] for _, lv in tuples)
            if not ok(top, assumed):
                return []
            found = []
            seen = {top}
            stack = [top]
            while stack:
                p = stack.pop()
                lowered = False
                for j in range(n):
                    lo = below(j, p)
                    if lo is None:
                        continue
                    if lo in seen or ok(lo, assumed):
                        lowered = True
                        if lo not in seen:
                            seen.add(lo)
                            stack.append(lo)
                if not lowered:
                    found.append(p)
            return sorted(found)

        if not self.recursive[i]:
            return [self._post_of(tuples, p) for p in minimal_guarantees(None)]
        # recursive: grow the assumption from nothing by joining in achievable
        # guarantees until it covers one of them (a self-consistent point)
        bottom = (0,) * n
        fixed = []
        seen = {bottom}
        todo = deque([bottom])
        while todo:
            a = todo.popleft()
            succ = []
            for gpt in minimal_guarantees(a):
                joined = tuple(max(x, y) for x, y in zip(a, gpt))
                if joined == a:
                    fixed.append(a)
                    succ = []
                    break
                succ.append(joined)
            for j in succ:
                if j not in seen:
                    seen.add(j)
                    todo.append(j)
        minimal = [p for p in fixed if not any(o != p and all(x <= y for x, y in zip(o, p)) for o in fixed)]
        return [self._post_of(tuples, p) for p in sorted(set(minimal))]

    # -- outer loops ----------------------------------------------------------

    def pre_candidates(self) -> Iterator[FrozenSet]:
        g, q0 = self.g, self.b.initial
        root = (g.main, q0)
        others = sorted((c for c in self.may.contexts if c != root), key=repr)
        for extra in _subsets(others):
            pre = frozenset((root,) + extra)
            targets = {t for c in pre for t in self.may.calls.get(c, ())}
            if all(c in targets for c in extra):
                yield pre

    def edges_for(self, pre) -> List:
        return sorted(((c, t) for c in pre for t in self.may.calls.get(c, ()) if t in pre), key=repr)

    @staticmethod
    def minimal_fsets(edges) -> List[FrozenSet]:
        graph = nx.DiGraph()
        graph.add_edges_from(edges)
        cyclic = []
        for comp in nx.strongly_connected_components(graph):
            sub = graph.subgraph(comp)
            cyclic.extend(e for e in edges if e[0] in comp and e[1] in comp and sub.has_edge(*e))
        cyclic = sorted(set(cyclic), key=repr)
        found: List[FrozenSet] = []
        for fs in _subsets(cyclic):
            fs = frozenset(fs)
            if any(f <= fs for f in found):
                continue
            rest = nx.DiGraph()
            rest.add_edges_from(e for e in edges if e not in fs)
            if nx.is_directed_acyclic_graph(rest):
                found.append(fs)
        return found

    def run(self):
        if not self.may.may_accept():
            return None
        for pre in self.pre_candidates():
            edges = self.edges_for(pre)
            for fedges in self.minimal_fsets(edges):
                res = self._backtrack(0, pre, {}, edges, fedges)
                if res is not None:
                    return res
        return None

    def _backtrack(self, i, pre, chosen, edges, fedges):
        if self.max_assumptions is not None and self.stats.triples >= self.max_assumptions:
            raise SolverError(f"gave up after {self.stats.triples} assumption triples")
        scc = self.sccs[i]
        if scc == [self.g.main]:
            self.stats.triples += 1
            res = self.local_check(self.g.main, pre, chosen, edges, fedges)
            if res.empty:
                return None
            return (pre, dict(chosen), edges, fedges)
        for post in self.minimal_posts(i, pre, chosen, edges, fedges):
            nxt = dict(chosen)
            nxt.update(post)
            out = self._backtrack(i + 1, pre, nxt, edges, fedges)
            if out is not None:
                return out
        return None

    def assemble(self, pre, post, edges, fedges) -> RegularTree:
        labels = {ROOT: ROOT}
        children = {}
        roots = []
        for m in self.mods:
            res = self.local_check(m, pre, post, edges, fedges)
            if res.empty:
                raise SolverError(f"no local witness for {m}")
            w = res.witness
            roots.append(w.root)
            for n in w.labels:
                labels[n] = w.labels[n]
                children[n] = w.children[n]
        pad = ("pad",)
        labels[pad] = DUMMY
        children[pad] = (pad,) * self.k
        children[ROOT] = tuple(roots) + (pad,) * (self.k - len(roots))
        return RegularTree(ROOT, labels, children).trimmed()


def _fill_stats(stats: SolverStats, g: Rgg, b: BuchiWordAutomaton):
    bt = b.totalized()
    stats.k = g.arity()
    stats.exits = g.num_exits()
    stats.beta = len(g.call_edges())
    stats.spec_states = len(bt.states)
    stats.game_size = g.size()
    stats.checker_states = 4 * len(bt.states) ** 2 + 3
    stats.structure_states = 2 + 2 * g.size()


def solve(g: Rgg, b: BuchiWordAutomaton, prune: bool = True, max_assumptions: Optional[int] = None,
          certify: bool = True):
    """Decide whether Player 0 has a winning modular strategy.

    Returns :class:`Win` with a certified strategy or :class:`Lose`; both carry
    :class:`SolverStats`.
    """
    bad = errors(g)
    if bad:
        raise SolverError("invalid game: " + "; ".join(str(v) for v in bad))
    if b.mode != DET:
        raise SolverError("solve needs a deterministic automaton (use solve_vpa for VPAs)")
    original = b
    if b.acceptance == COBUCHI:
        try:
            b = cobuchi_to_buchi(b)
        except AutomatonError as e:
            raise SolverError(f"co-Büchi condition not supported: {e}") from None
    elif b.acceptance != BUCHI:
        raise SolverError(f"unknown acceptance {b.acceptance!r}")
    t0 = time.perf_counter()
    stats = SolverStats()
    _fill_stats(stats, g, b)
    if prune:
        search = _Search(g, b, stats, max_assumptions)
        found = search.run()
        if found is None:
            stats.seconds = time.perf_counter() - t0
            stats.final_nbt_states = stats.max_product_states or stats.structure_states
            _log_envelope(stats)
            return Lose(stats)
        tree = search.assemble(*found)
        stats.final_nbt_states = stats.max_product_states
    else:
        tree = None
        for t in enumerate_assumptions(g, b):
            stats.triples += 1
            if max_assumptions is not None and stats.triples > max_assumptions:
                raise SolverError(f"gave up after {max_assumptions} assumption triples")
            aut = build_full_automaton(g, b, t)
            res = nbt_emptiness(aut)
            stats.local_checks += 1
            stats.max_product_states = max(stats.max_product_states, res.states)
            if not res.empty:
                tree = res.witness
                break
        stats.final_nbt_states = stats.max_product_states
        if tree is None:
            stats.seconds = time.perf_counter() - t0
            _log_envelope(stats)
            return Lose(stats)
    f = decode_strategy(g, tree)
    if certify and not check_strategy(g, original, f):
        raise SoundnessError("the extracted strategy does not win; refusing to report it")
    stats.seconds = time.perf_counter() - t0
    _log_envelope(stats)
    return Win(f, stats)


def _log_envelope(stats: SolverStats):
    if not stats.within_envelope():
        log.warning("automaton size %d exceeds the envelope 2^%.1f", stats.final_nbt_states, stats.log2_bound)
    else:
        log.debug("automaton size %d within the envelope 2^%.1f", stats.final_nbt_states, stats.log2_bound)


def solve_vpa(g: Rgg, p, prune: bool = True, max_assumptions: Optional[int] = None):
    """Solve against a deterministic or universal VPA through the reduction.

    A winning strategy of the reduced game is projected back onto ``g``.
    """
    from .reduction import reduce_vpa

    red = reduce_vpa(g, p)
    res = solve(red.game, red.spec, prune=prune, max_assumptions=max_assumptions)
    if isinstance(res, Win):
        return Win(red.bijection.project(res.strategy), res.stats)
    return res
