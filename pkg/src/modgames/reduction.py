"""From visibly pushdown specifications to finite-state ones.

The game's stack and the automaton's stack move in lockstep, so a
finite automaton can follow the VPA if it knows the top symbol.  After a
push the top is the pushed symbol.  After a pop it is whatever was on top
before the matching push, which Player 1 announces in a dummy module placed
around every invocation.  A false announcement sends the automaton to an
accepting sink, so lying never helps Player 1.

Universal VPAs are handled first: every edge of the game is routed through
a Player-1 module that picks which transition the next letter (and the one
after it) follows.  The resulting deterministic VPA then goes through the
dummy-module reduction.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .rgg import (CALL, INT, RET, GameModule, LocalStrategy, ModularStrategy, Rgg, call, errors, node,
                  ret, tag)
from .words import BOTTOM, BUCHI, COBUCHI, DET, UNIVERSAL, BuchiWordAutomaton, Vpa, powerset

DUMMY_AP = "__dummy"
E_AP = "__e"
E_MODULE = "__e"
LIE, REJECT = ("lie",), ("reject",)


class ReductionError(ValueError):
    pass


def decl_ap(i: int) -> str:
    return f"__decl_{i}"


def choice_ap(i: int, j: int) -> str:
    return f"__c_{i}_{j}"


def dummy_module_name(m: str) -> str:
    return f"__d_{m}"


def _check_names(g: Rgg):
    for m, mod in g.modules.items():
        names = [m, *mod.nodes, *mod.boxes]
        if any(n.startswith("__") for n in names):
            raise ReductionError(f"module {m} uses a reserved name starting with '__'")


def _letters(g: Rgg, ap) -> Dict[str, set]:
    """Label sets (projected on ``ap``) occurring in g, per tag."""
    out = {CALL: set(), RET: set(), INT: set()}
    for m in g.modules:
        for v in g.vertices(m):
            out[tag(v)].add(frozenset(g.label(m, v)) & frozenset(ap))
    return out


# ----------------------------------------------------------- bijections


class StrategyBijection:
    """Maps Player-0 modular strategies between a game and its reduction.

    Player-0 vertices and their successor order are left alone by both
    reductions, so lifting keeps each local strategy and adds trivial ones
    for the new modules.
    """

    def __init__(self, source: Rgg, target: Rgg):
        self.source, self.target = source, target

    def lift(self, f: ModularStrategy) -> ModularStrategy:
        local = {m: f.of(m) for m in self.source.modules}
        for m in self.target.modules:
            local.setdefault(m, LocalStrategy())
        return ModularStrategy(local)

    def project(self, f: ModularStrategy) -> ModularStrategy:
        return ModularStrategy({m: f.of(m) for m in self.source.modules})


class SplitBijection(StrategyBijection):
    """Bijection for the edge-splitting step of the universal pipeline."""

    def __init__(self, source: Rgg, target: Rgg, routes: Dict[str, Dict[Tuple, Tuple]],
                 start_route: Tuple):
        super().__init__(source, target)
        self.routes = routes
        self.start_route = start_route

    def lift(self, f: ModularStrategy) -> ModularStrategy:
        local = {}
        main_entry = node(self.source.module(self.source.main).entry)
        for m in self.source.modules:
            loc = f.of(m)
            upd = dict(loc.update)
            if m == self.source.main:
                # the original entry is now an ordinary vertex seen after the start
                upd = {k: s for k, s in upd.items() if k[1] != main_entry}
            local[m] = LocalStrategy(loc.initial, upd, dict(loc.move))
        local[E_MODULE] = LocalStrategy()
        return ModularStrategy(local)

    def project(self, f: ModularStrategy) -> ModularStrategy:
        """Memory pairs (memory of f, last original vertex)."""
        src = self.source
        local = {}
        for m in src.modules:
            loc = f.of(m)
            states = sorted(loc.states(), key=repr)
            entry = node(src.module(m).entry)
            init = loc.initial
            if m == src.main:
                for u in self.start_route:
                    init = loc.next(init, u)
            upd, mv = {}, {}
            for (v, u), path in self.routes[m].items():
                for s in states:
                    t = s
                    for x in path:
                        t = loc.next(t, x)
                    upd[((s, v), u)] = (t, u)
            for b, target in src.module(m).boxes.items():
                for x in src.module(target).exits:
                    r = ret(b, x)
                    for s in states:
                        upd[((s, call(b)), r)] = (loc.next(s, r), r)
            for s in states:
                for v in src.vertices(m):
                    if src.is_p0(m, v):
                        mv[((s, v), v)] = loc.choose(s, v)
            local[m] = LocalStrategy((init, entry), upd, mv)
        return ModularStrategy(local)


class ComposedBijection(StrategyBijection):
    def __init__(self, first: StrategyBijection, second: StrategyBijection):
        super().__init__(first.source, second.target)
        self.first, self.second = first, second

    def lift(self, f):
        return self.second.lift(self.first.lift(f))

    def project(self, f):
        return self.first.project(self.second.project(f))


# --------------------------------------------------- deterministic VPAs


@dataclass
class Reduction:
    game: Rgg
    spec: BuchiWordAutomaton
    bijection: StrategyBijection
    stack_symbols: Tuple[Hashable, ...]

    def exit_count(self) -> int:
        return self.game.num_exits()


def _dummy_module(g: Rgg, m: str, nsym: int) -> GameModule:
    mod = g.module(m)
    entry = "__in"
    nodes = [entry] + [f"__v_{i}" for i in range(nsym)]
    nodes += [f"__u_{i}_{x}" for i in range(nsym) for x in mod.exits]
    boxes = {f"__b_{i}": m for i in range(nsym)}
    edges: Dict = {node(entry): tuple(node(f"__v_{i}") for i in range(nsym))}
    labels: Dict = {node(entry): frozenset({DUMMY_AP})}
    player: Dict = {node(entry): 1}
    for i in range(nsym):
        v = node(f"__v_{i}")
        edges[v] = (call(f"__b_{i}"),)
        labels[v] = frozenset({decl_ap(i)})
        labels[call(f"__b_{i}")] = frozenset({DUMMY_AP})
        player[v] = 1
        for x in mod.exits:
            r, u = ret(f"__b_{i}", x), node(f"__u_{i}_{x}")
            edges[r] = (u,)
            edges[u] = (node(x),)
            labels[r] = frozenset({DUMMY_AP})
            labels[u] = frozenset({decl_ap(i)})
            player[r] = player[u] = 1
    for x in mod.exits:
        labels[node(x)] = frozenset({DUMMY_AP})
    return GameModule(dummy_module_name(m), tuple(nodes) + tuple(mod.exits), entry, tuple(mod.exits),
                      boxes, edges, labels, player)


def reduce_det_vpa(g: Rgg, p: Vpa, reserved_ok: bool = False) -> Reduction:
    """Replace every invocation of m by one of a dummy module d_m.

    The automaton's states are ``("n", q, t)`` between letters of the
    original game (``t`` indexes the tracked top), ``("pc", q, s, t)`` after
    a push of ``s`` awaiting the declaration of ``t``, ``("aw", q, s)`` after
    the dummy return from a callee whose top was ``s`` and ``("pr", q, s, t)``
    once the restored top ``t`` is declared, waiting for the real return.
    """
    if p.mode != DET:
        raise ReductionError(f"reduce_det_vpa needs a deterministic VPA, got mode {p.mode}")
    if p.acceptance not in (BUCHI, COBUCHI):
        raise ReductionError(f"unknown acceptance {p.acceptance!r}")
    bad = p.problems()
    if bad:
        raise ReductionError("; ".join(bad))
    bad = errors(g)
    if bad:
        raise ReductionError("invalid game: " + "; ".join(map(str, bad)))
    if not reserved_ok:
        _check_names(g)
    symbols = (BOTTOM,) + tuple(p.stack)
    index = {s: i for i, s in enumerate(symbols)}
    n = len(symbols)

    mods: Dict[str, GameModule] = {}
    for m, mod in g.modules.items():
        boxes = {b: dummy_module_name(t) for b, t in mod.boxes.items()}
        mods[m] = replace(mod, boxes=boxes)
    for m in g.modules:
        if m != g.main:
            mods[dummy_module_name(m)] = _dummy_module(g, m, n)
    ap = tuple(g.ap) + (DUMMY_AP,) + tuple(decl_ap(i) for i in range(n))
    g2 = Rgg(g.name, mods, g.main, ap)

    spec_ap = frozenset(p.ap) | {DUMMY_AP} | {decl_ap(i) for i in range(n)}
    orig = _letters(g, p.ap)
    dummy_call = (frozenset({DUMMY_AP}), CALL)
    dummy_ret = (frozenset({DUMMY_AP}), RET)
    dummy_int = (frozenset({DUMMY_AP}), INT)
    decls = [(frozenset({decl_ap(i)}), INT) for i in range(n)]

    def one(targets):
        return targets[0] if targets else None

    def moves(s):
        out = {}
        if s in (LIE, REJECT):
            return out
        kind = s[0]
        if kind == "n":
            _, q, t = s
            for a in orig[INT]:
                r = one(p.internal.get((q, a), ()))
                out[(a, INT)] = REJECT if r is None else ("n", r, t)
            for a in orig[CALL]:
                r = one(p.push.get((q, a), ()))
                out[(a, CALL)] = REJECT if r is None else ("pc", r[1], index[r[0]], t)
            out[dummy_call] = s
            out[dummy_ret] = ("aw", q, t)
        elif kind == "pc":
            _, q, pushed, t = s
            out[dummy_int] = s
            for i, d in enumerate(decls):
                out[d] = ("n", q, pushed) if i == t else LIE
        elif kind == "aw":
            _, q, popped = s
            for i, d in enumerate(decls):
                out[d] = ("pr", q, popped, i)
        elif kind == "pr":
            _, q, popped, t = s
            out[dummy_int] = s
            for a in orig[RET]:
                r = one(p.pop.get((q, a, symbols[popped]), ()))
                out[(a, RET)] = REJECT if r is None else ("n", r, t)
        return out

    init = ("n", p.initial[0], 0)
    states = [init]
    seen = {init}
    delta: Dict = {}
    todo = deque([init])
    while todo:
        s = todo.popleft()
        for a, t in moves(s).items():
            delta[(s, a)] = (t,)
            if t not in seen:
                seen.add(t)
                states.append(t)
                todo.append(t)
    for sink in (LIE, REJECT):
        if sink not in seen:
            states.append(sink)
    F = p.accepting
    good = {s for s in states if s not in (LIE, REJECT) and s[1] in F}
    acc = good | ({LIE} if p.acceptance == BUCHI else {REJECT})
    # letters no play of the reduced game can produce fall back to the lie sink
    a = BuchiWordAutomaton(tuple(states), init, spec_ap, delta, frozenset(acc), p.acceptance, DET,
                           True, LIE, f"{p.name}_fin")
    return Reduction(g2, a, StrategyBijection(g, g2), symbols)


# ------------------------------------------------------- universal VPAs


def _pad(targets: Sequence, width: int, sink) -> Tuple:
    ts = list(dict.fromkeys(targets))
    if not ts:
        ts = [sink]
    while len(ts) < width:
        ts.append(ts[0])
    return tuple(ts)


def branching(p: Vpa) -> int:
    tables = (p.internal, p.push, p.pop)
    return max([len(set(t)) for tab in tables for t in tab.values()] + [len(p.initial), 1])


def binarize_vpa(p: Vpa) -> Vpa:
    """Give every (state, letter[, top]) exactly ``max(2, branching)`` transitions.

    Missing transitions go to a rejecting sink, short lists are padded with
    duplicates, and several initial states are merged into a fresh one that
    reads the first letter for all of them.  Branching above two is kept and
    resolved by a cascade of Player-1 choices in the game instead.
    """
    if p.mode != UNIVERSAL:
        raise ReductionError(f"binarize_vpa needs a universal VPA, got mode {p.mode}")
    width = max(2, branching(p))
    sink = "__rej"
    states = list(p.states) + [sink]
    internal, push, pop = dict(p.internal), dict(p.push), dict(p.pop)
    sets = powerset(frozenset(p.ap))
    tops = tuple(p.stack) + (BOTTOM,)
    any_sym = p.stack[0] if p.stack else None
    initial = tuple(p.initial)
    if len(initial) > 1:
        init = "__init"
        states.append(init)
        for a in sets:
            internal[(init, a)] = tuple(t for q in initial for t in p.internal.get((q, a), ()))
            push[(init, a)] = tuple(t for q in initial for t in p.push.get((q, a), ()))
            for top in tops:
                pop[(init, a, top)] = tuple(t for q in initial for t in p.pop.get((q, a, top), ()))
        initial = (init,)
    width = max(width, max([len(set(t)) for t in list(internal.values()) + list(push.values())
                            + list(pop.values())] + [1]))
    new_int, new_push, new_pop = {}, {}, {}
    for q in states:
        for a in sets:
            new_int[(q, a)] = _pad(internal.get((q, a), ()) if q != sink else (), width, sink)
            pt = push.get((q, a), ()) if q != sink else ()
            if any_sym is None:
                new_push[(q, a)] = ()
            else:
                new_push[(q, a)] = _pad(pt, width, (any_sym, sink))
            for top in tops:
                new_pop[(q, a, top)] = _pad(pop.get((q, a, top), ()) if q != sink else (), width, sink)
    if any_sym is None:
        # a VPA without stack letters cannot read calls; all of them reject
        stack = ("__s",)
        new_push = {k: _pad((), width, ("__s", sink)) for k in new_push}
        new_pop.update({(q, a, "__s"): _pad((), width, sink) for q in states for a in sets})
    else:
        stack = tuple(p.stack)
    acc = frozenset(p.accepting) | ({sink} if p.acceptance == COBUCHI else frozenset())
    return Vpa(tuple(states), initial, frozenset(p.ap), stack, new_int, new_push, new_pop, acc,
               p.acceptance, UNIVERSAL, f"{p.name}_bin")


def vpa_width(p: Vpa) -> int:
    """Number of transitions per triple of a binarized VPA."""
    return max(len(t) for tab in (p.internal, p.push, p.pop) for t in tab.values())


def _choice_module(width: int) -> GameModule:
    """One exit; Player 1 picks (i, j) in two steps."""
    entry, out = "__e_in", "__e_out"
    nodes = [entry] + [f"__i_{i}" for i in range(width)]
    nodes += [f"__c_{i}_{j}" for i in range(width) for j in range(width)] + [out]
    edges: Dict = {node(entry): tuple(node(f"__i_{i}") for i in range(width))}
    labels: Dict = {node(entry): frozenset({E_AP}), node(out): frozenset({E_AP})}
    player: Dict = {node(entry): 1}
    for i in range(width):
        v = node(f"__i_{i}")
        edges[v] = tuple(node(f"__c_{i}_{j}") for j in range(width))
        labels[v] = frozenset({E_AP})
        player[v] = 1
        for j in range(width):
            c = node(f"__c_{i}_{j}")
            edges[c] = (node(out),)
            labels[c] = frozenset({choice_ap(i, j)})
            player[c] = 1
    return GameModule(E_MODULE, tuple(nodes), entry, (out,), {}, edges, labels, player)


def split_edges(g: Rgg, width: int):
    """Route every edge through the choice module; returns (game, bijection)."""
    _check_names(g)
    out_exit = "__e_out"
    mods: Dict[str, GameModule] = {}
    routes: Dict[str, Dict] = {}
    start_route: Tuple = ()
    for m, mod in g.modules.items():
        boxes = dict(mod.boxes)
        nodes = list(mod.nodes)
        edges: Dict = {}
        labels = dict(mod.labels)
        player = dict(mod.player)
        routes[m] = {}
        counter = 0

        def route(v_from, u, counter):
            b = f"__s_{counter}"
            boxes[b] = E_MODULE
            labels[call(b)] = frozenset({E_AP})
            r = ret(b, out_exit)
            labels[r] = frozenset({E_AP})
            player[r] = 1
            path = [call(b), r]
            if u[0] == "call":
                relay = node(f"__r_{counter}")
                nodes.append(relay[1])
                labels[relay] = frozenset({E_AP})
                player[relay] = 1
                edges[r] = (relay,)
                edges[relay] = (u,)
                path.append(relay)
            else:
                edges[r] = (u,)
            path.append(u)
            return call(b), tuple(path)

        for v, targets in mod.edges.items():
            new = []
            for u in targets:
                c, path = route(v, u, counter)
                counter += 1
                new.append(c)
                routes[m][(v, u)] = path
            edges[v] = tuple(new)
        entry = mod.entry
        if m == g.main:
            start = "__start"
            nodes.insert(0, start)
            labels[node(start)] = frozenset({E_AP})
            player[node(start)] = 1
            c, path = route(node(start), node(mod.entry), counter)
            edges[node(start)] = (c,)
            start_route = path
            entry = start
        mods[m] = GameModule(m, tuple(nodes), entry, mod.exits, boxes, edges, labels, player)
    mods[E_MODULE] = _choice_module(width)
    ap = tuple(g.ap) + (E_AP,) + tuple(choice_ap(i, j) for i in range(width) for j in range(width))
    g2 = Rgg(g.name, mods, g.main, ap)
    return g2, SplitBijection(g, g2, routes, start_route)


def resolve_choices(g_split: Rgg, p: Vpa, width: int) -> Vpa:
    """Deterministic VPA over the split game following Player 1's choices.

    States: ``("idle", q)`` waiting for a choice, ``("in", q)`` inside the
    choice module, ``("ch", q, i, j)`` with the choice made, and
    ``("carry", q, j)`` when the next letter arrives without a fresh choice
    (the callee entry after a call, the return after an exit).
    """
    ap = frozenset(p.ap) | {E_AP} | {choice_ap(i, j) for i in range(width) for j in range(width)}
    letters = _letters(g_split, ap)
    marker = "__E"
    stack = tuple(p.stack) + (marker,)
    tops = tuple(p.stack) + (BOTTOM,)
    choice_of = {frozenset({choice_ap(i, j)}): (i, j) for i in range(width) for j in range(width)}

    def is_dummy(a):
        return bool(a - p.ap)

    Q = list(p.states)
    states = []
    for q in Q:
        states.append(("idle", q))
        states.append(("in", q))
        states += [("ch", q, i, j) for i in range(width) for j in range(width)]
        states += [("carry", q, j) for j in range(width)]
    internal, push, pop = {}, {}, {}

    def orig(s, q, k):
        """Transitions of an original letter resolved by index ``k``."""
        nxt = (lambda r: ("carry", r, s[3])) if s[0] == "ch" else (lambda r: ("idle", r))
        for a in letters[INT]:
            if not is_dummy(a):
                internal[(s, a)] = (nxt(p.internal[(q, a)][k]),)
        for a in letters[CALL]:
            if not is_dummy(a):
                sym, r = p.push[(q, a)][k]
                push[(s, a)] = ((sym, nxt(r)),)
        for a in letters[RET]:
            if not is_dummy(a):
                for top in tops:
                    pop[(s, a, top)] = (nxt(p.pop[(q, a, top)][k]),)

    for s in states:
        q = s[1]
        dummy_calls = [a for a in letters[CALL] if is_dummy(a)]
        dummy_ints = [a for a in letters[INT] if is_dummy(a)]
        dummy_rets = [a for a in letters[RET] if is_dummy(a)]
        if s[0] in ("idle", "carry"):
            for a in dummy_calls:
                push[(s, a)] = ((marker, ("in", q)),)
        if s[0] == "idle":
            for a in dummy_ints:
                internal[(s, a)] = (s,)
        elif s[0] == "in":
            for a in dummy_ints:
                internal[(s, a)] = (("ch", q) + choice_of[a],) if a in choice_of else (s,)
        elif s[0] == "ch":
            for a in dummy_ints:
                internal[(s, a)] = (s,)
            for a in dummy_rets:
                pop[(s, a, marker)] = (s,)
            orig(s, q, s[2])
        elif s[0] == "carry":
            orig(s, q, s[2])
    acc = frozenset(s for s in states if s[1] in p.accepting)
    return Vpa(tuple(states), (("idle", p.initial[0]),), ap, stack, internal, push, pop, acc,
               p.acceptance, DET, f"{p.name}_det")


def reduce_universal_vpa(g: Rgg, p: Vpa) -> Reduction:
    if p.mode != UNIVERSAL:
        raise ReductionError(f"reduce_universal_vpa needs a universal VPA, got mode {p.mode}")
    bad = errors(g)
    if bad:
        raise ReductionError("invalid game: " + "; ".join(map(str, bad)))
    pb = binarize_vpa(p)
    width = vpa_width(pb)
    g_split, bij = split_edges(g, width)
    pd = resolve_choices(g_split, pb, width)
    red = reduce_det_vpa(g_split, pd, reserved_ok=True)
    return Reduction(red.game, red.spec, ComposedBijection(bij, red.bijection), red.stack_symbols)


def reduce_vpa(g: Rgg, p: Vpa) -> Reduction:
    if p.mode == DET:
        return reduce_det_vpa(g, p)
    if p.mode == UNIVERSAL:
        return reduce_universal_vpa(g, p)
    raise ReductionError("nondeterministic VPAs are not supported; supply a deterministic or "
                         "universal (complemented) automaton")


def size_bound(q: int, g: int) -> int:
    """Upper bound on the reduced automaton's states for |Q| = q and g stack letters."""
    n = g + 1
    # n, pc, aw and pr states plus the two sinks
    return q * n * (1 + g + 1 + n) + 2


def conjunction_vpa(*ps: Vpa) -> Vpa:
    """Universal VPA accepting the intersection of deterministic ones."""
    if not ps:
        raise ReductionError("need at least one VPA")
    acc0 = ps[0].acceptance
    if any(p.acceptance != acc0 for p in ps):
        raise ReductionError("all conjuncts must share the acceptance condition")
    ap = frozenset().union(*(p.ap for p in ps))
    stack = tuple(dict.fromkeys(s for p in ps for s in p.stack))
    states, initial, acc = [], [], set()
    internal, push, pop = {}, {}, {}
    sets = powerset(ap)
    for i, p in enumerate(ps):
        ren = {q: (i, q) for q in p.states}
        states += ren.values()
        initial += [ren[q] for q in p.initial]
        acc |= {ren[q] for q in p.accepting}
        for q in p.states:
            for a in sets:
                b = a & p.ap
                internal[(ren[q], a)] = tuple(ren[t] for t in p.internal.get((q, b), ()))
                push[(ren[q], a)] = tuple((s, ren[t]) for s, t in p.push.get((q, b), ()))
                for top in stack + (BOTTOM,):
                    pop[(ren[q], a, top)] = tuple(ren[t] for t in p.pop.get((q, b, top), ()))
    return Vpa(tuple(states), tuple(initial), ap, stack, internal, push, pop, frozenset(acc), acc0,
               UNIVERSAL, "and")
