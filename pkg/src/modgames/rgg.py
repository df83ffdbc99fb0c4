"""Recursive game graphs, plays, local memory and modular strategies.

Vertices are module-local and represented as tuples:

* ``("node", name)`` for nodes (entries and exits included),
* ``("call", box)`` for the call vertex of a box (the callee entry is implied),
* ``("ret", box, exit)`` for the return vertex of a box at one callee exit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

Vertex = Tuple[str, ...]

CALL, RET, INT = "call", "ret", "int"


def node(name: str) -> Vertex:
    return ("node", name)


def call(box: str) -> Vertex:
    return ("call", box)


def ret(box: str, exit_: str) -> Vertex:
    return ("ret", box, exit_)


def vertex_str(v: Vertex) -> str:
    if v[0] == "node":
        return v[1]
    if v[0] == "call":
        return f"call {v[1]}"
    return f"ret {v[1]} {v[2]}"


class DeadEnd(Exception):
    """Raised by :func:`step` when the current vertex has no move."""


@dataclass(frozen=True, eq=True)
class GameModule:
    name: str
    nodes: Tuple[str, ...]
    entry: str
    exits: Tuple[str, ...]
    boxes: Dict[str, str]
    edges: Dict[Vertex, Tuple[Vertex, ...]]
    labels: Dict[Vertex, frozenset] = field(default_factory=dict)
    player: Dict[Vertex, int] = field(default_factory=dict)

    __hash__ = None  # type: ignore[assignment]

    def label(self, v: Vertex) -> frozenset:
        return self.labels.get(v, frozenset())


@dataclass(frozen=True, eq=True)
class Rgg:
    name: str
    modules: Dict[str, GameModule]
    main: str
    ap: Tuple[str, ...] = ()

    __hash__ = None  # type: ignore[assignment]

    def module(self, m: str) -> GameModule:
        return self.modules[m]

    def callee(self, m: str, box: str) -> str:
        return self.modules[m].boxes[box]

    def calls(self, m: str) -> List[Vertex]:
        return [call(b) for b in self.modules[m].boxes]

    def returns(self, m: str) -> List[Vertex]:
        mod = self.modules[m]
        out = []
        for b, target in mod.boxes.items():
            callee = self.modules.get(target)
            if callee is None:
                continue
            out.extend(ret(b, x) for x in callee.exits)
        return out

    def vertices(self, m: str) -> List[Vertex]:
        mod = self.modules[m]
        return [node(n) for n in mod.nodes] + self.calls(m) + self.returns(m)

    def successors(self, m: str, v: Vertex) -> Tuple[Vertex, ...]:
        """Local successors in declaration order.

        For a call these are the box's returns ordered by the callee's exits.
        """
        if v[0] == "call":
            callee = self.modules[self.callee(m, v[1])]
            return tuple(ret(v[1], x) for x in callee.exits)
        return self.modules[m].edges.get(v, ())

    def is_exit(self, m: str, v: Vertex) -> bool:
        return v[0] == "node" and v[1] in self.modules[m].exits

    def is_entry(self, m: str, v: Vertex) -> bool:
        return v == node(self.modules[m].entry)

    def owner(self, m: str, v: Vertex) -> Optional[int]:
        """Player controlling ``v``; None for calls and exits."""
        if v[0] == "call" or self.is_exit(m, v):
            return None
        return self.modules[m].player.get(v, 1)

    def is_p0(self, m: str, v: Vertex) -> bool:
        return self.owner(m, v) == 0

    def label(self, m: str, v: Vertex) -> frozenset:
        return self.modules[m].label(v)

    def arity(self) -> int:
        """Tree arity: max of exit counts, out-degrees and the module count."""
        k = len(self.modules)
        for m, mod in self.modules.items():
            k = max(k, len(mod.exits))
            for v in self.vertices(m):
                k = max(k, len(self.successors(m, v)))
        return max(k, 1)

    def call_edges(self) -> List[Tuple[str, str]]:
        """Distinct (caller, callee) module pairs, in declaration order."""
        seen: Dict[Tuple[str, str], None] = {}
        for m, mod in self.modules.items():
            for target in mod.boxes.values():
                seen.setdefault((m, target), None)
        return list(seen)

    def size(self) -> int:
        return sum(len(self.vertices(m)) for m in self.modules)

    def num_exits(self) -> int:
        return sum(len(mod.exits) for mod in self.modules.values())


def tag(v: Vertex) -> str:
    if v[0] == "call":
        return CALL
    if v[0] == "ret":
        return RET
    return INT


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class Violation:
    module: Optional[str]
    vertex: Optional[Vertex]
    rule: str
    message: str
    severity: str = "error"

    def __str__(self):
        where = self.module or "<game>"
        if self.vertex is not None:
            where += f":{vertex_str(self.vertex)}"
        return f"{self.severity}: {where}: {self.rule}: {self.message}"


def validate(g: Rgg) -> List[Violation]:
    """Check the structural rules of a recursive game graph.

    Errors make the game unusable; dead ends come back as warnings and are
    tolerated by the rest of the package (plays reaching them are lost by
    Player 0).
    """
    out: List[Violation] = []

    def bad(m, v, rule, msg, severity="error"):
        out.append(Violation(m, v, rule, msg, severity))

    if g.main not in g.modules:
        bad(None, None, "main-missing", f"main module {g.main!r} is not declared")
    aps = set(g.ap)
    for m, mod in g.modules.items():
        nodes = set(mod.nodes)
        if len(nodes) != len(mod.nodes):
            bad(m, None, "duplicate-node", "node declared twice")
        if mod.entry not in nodes:
            bad(m, node(mod.entry), "entry-not-node", "entry is not a declared node")
        if mod.entry in mod.exits:
            bad(m, node(mod.entry), "entry-is-exit", "entry cannot be an exit")
        for x in mod.exits:
            if x not in nodes:
                bad(m, node(x), "exit-not-node", "exit is not a declared node")
        for b, target in mod.boxes.items():
            if target not in g.modules:
                bad(m, call(b), "unknown-module", f"box {b} targets unknown module {target!r}")
            elif target == g.main:
                bad(m, call(b), "box-to-main", "the main module cannot be invoked")
        if any(t not in g.modules for t in mod.boxes.values()):
            continue
        verts = set(g.vertices(m))
        controlled = {v for v in verts if v[0] != "call" and not g.is_exit(m, v)}
        for src, targets in mod.edges.items():
            if src not in verts:
                bad(m, src, "unknown-vertex", "transition source is not a vertex of the module")
                continue
            if src[0] == "call":
                bad(m, src, "transition-from-call", "calls have no outgoing transitions")
            if g.is_exit(m, src) and targets:
                bad(m, src, "transition-from-exit", "exits have no outgoing transitions")
            for t in targets:
                if t not in verts or t[0] == "ret":
                    bad(m, src, "bad-target", f"target {vertex_str(t)} is not a node or call of {m}")
                    continue
                if t == node(mod.entry):
                    bad(m, src, "transition-to-entry", "no transition may target the entry")
                if src[0] == "ret" and t[0] == "call":
                    bad(m, src, "call-after-return", "a module cannot be called right after a return")
            if len(set(targets)) != len(targets):
                bad(m, src, "duplicate-transition", "duplicate transition target")
        for v in mod.player:
            if v not in controlled:
                bad(m, v, "player-partition", "only non-exit nodes and returns carry a player")
            elif mod.player[v] not in (0, 1):
                bad(m, v, "player-partition", "player must be 0 or 1")
        for v in controlled:
            if v not in mod.player:
                bad(m, v, "player-partition", "vertex has no player")
            if not mod.edges.get(v):
                bad(m, v, "dead-end", "non-exit vertex without successors", "warning")
        for v, lab in mod.labels.items():
            if v not in verts:
                bad(m, v, "unknown-vertex", "label on a non-vertex")
            elif aps and not lab <= aps:
                bad(m, v, "unknown-ap", f"labels {sorted(lab - aps)} not in the game's APs")
    return out


def errors(g: Rgg) -> List[Violation]:
    return [v for v in validate(g) if v.severity == "error"]


# --------------------------------------------------------------------- plays


@dataclass(frozen=True)
class GameState:
    stack: Tuple[Tuple[str, str], ...]  # (box, module owning the box)
    module: str
    vertex: Vertex

    def __str__(self):
        boxes = ".".join(b for b, _ in self.stack) or "eps"
        return f"({boxes}, {self.module}:{vertex_str(self.vertex)})"


def initial_state(g: Rgg) -> GameState:
    return GameState((), g.main, node(g.module(g.main).entry))


def moves(g: Rgg, s: GameState) -> List[GameState]:
    """All one-step successors of a global state."""
    m, v = s.module, s.vertex
    if v[0] == "call":
        callee = g.callee(m, v[1])
        return [GameState(s.stack + ((v[1], m),), callee, node(g.module(callee).entry))]
    if g.is_exit(m, v):
        if not s.stack:
            return []
        box, caller = s.stack[-1]
        return [GameState(s.stack[:-1], caller, ret(box, v[1]))]
    return [GameState(s.stack, m, u) for u in g.module(m).edges.get(v, ())]


def step(g: Rgg, s: GameState, choice: int = 0) -> GameState:
    succ = moves(g, s)
    if not succ:
        raise DeadEnd(f"no move from {s}")
    if not 0 <= choice < len(succ):
        raise IndexError(f"choice {choice} out of range at {s}")
    return succ[choice]


def matching(prefix: Sequence[GameState]) -> Dict[int, int]:
    """Map each matched return position to its call position."""
    pending: List[int] = []
    out = {}
    for i, s in enumerate(prefix):
        if s.vertex[0] == "call":
            pending.append(i)
        elif s.vertex[0] == "ret":
            j = pending.pop()
            out[i] = j
    return out


def local_memory(g: Rgg, prefix: Sequence[GameState]) -> List[Vertex]:
    """Vertices of the current activation seen so far, entry first."""
    if not prefix:
        return []
    mu = matching(prefix)
    i = len(prefix) - 1
    chain = [prefix[i].vertex]
    while True:
        v = prefix[i].vertex
        if v[0] == "ret":
            i = mu[i]
        elif i == 0 or prefix[i - 1].vertex[0] == "call":
            break
        else:
            i -= 1
        chain.append(prefix[i].vertex)
    chain.reverse()
    return chain


def tagged_word(g: Rgg, prefix: Sequence[GameState]) -> List[Tuple[frozenset, str]]:
    return [(g.label(s.module, s.vertex), tag(s.vertex)) for s in prefix]


# ---------------------------------------------------------------- strategies


@dataclass(frozen=True)
class LocalStrategy:
    """Finite-memory strategy of one module.

    ``initial`` is the memory after observing the entry.  Reading a further
    local vertex ``u`` moves memory ``s`` to ``update[(s, u)]`` (unchanged if
    absent); at a Player-0 vertex ``v`` the strategy picks successor index
    ``move[(s, v)]`` (0 if absent), ``s`` being the memory after ``v``.
    """

    initial: Hashable = 0
    update: Dict[Tuple[Hashable, Vertex], Hashable] = field(default_factory=dict)
    move: Dict[Tuple[Hashable, Vertex], int] = field(default_factory=dict)

    __hash__ = None  # type: ignore[assignment]

    def next(self, mem, u: Vertex):
        return self.update.get((mem, u), mem)

    def choose(self, mem, v: Vertex) -> int:
        return self.move.get((mem, v), 0)

    def memory(self, history: Sequence[Vertex]):
        mem = self.initial
        for u in history[1:]:
            mem = self.next(mem, u)
        return mem

    def states(self) -> set:
        out = {self.initial}
        out.update(self.update.values())
        out.update(s for s, _ in self.update)
        out.update(s for s, _ in self.move)
        return out


@dataclass(frozen=True)
class ModularStrategy:
    local: Dict[str, LocalStrategy]

    __hash__ = None  # type: ignore[assignment]

    def of(self, m: str) -> LocalStrategy:
        return self.local.get(m) or LocalStrategy()

    def choose(self, m: str, history: Sequence[Vertex]) -> int:
        loc = self.of(m)
        return loc.choose(loc.memory(history), history[-1])

    def memory_size(self) -> int:
        return max((len(s.states()) for s in self.local.values()), default=1)


def memoryless(choices: Dict[str, Dict[Vertex, int]]) -> ModularStrategy:
    return ModularStrategy({m: LocalStrategy(0, {}, {(0, v): i for v, i in ch.items()})
                            for m, ch in choices.items()})


def conforms(g: Rgg, prefix: Sequence[GameState], f: ModularStrategy) -> bool:
    for i in range(len(prefix) - 1):
        s = prefix[i]
        if not g.is_p0(s.module, s.vertex):
            continue
        succ = g.successors(s.module, s.vertex)
        want = f.choose(s.module, local_memory(g, prefix[: i + 1]))
        if want >= len(succ) or succ[want] != prefix[i + 1].vertex:
            return False
    return True


def play(g: Rgg, f: ModularStrategy, opponent: Iterable[int], steps: int) -> List[GameState]:
    """Unroll a conforming play; ``opponent`` supplies Player-1 choices."""
    opp = iter(opponent)
    s = initial_state(g)
    out = [s]
    for _ in range(steps):
        m, v = s.module, s.vertex
        try:
            if g.is_p0(m, v):
                s = step(g, s, f.choose(m, local_memory(g, out)))
            elif g.owner(m, v) == 1 and len(g.successors(m, v)) > 1:
                s = step(g, s, next(opp) % len(g.successors(m, v)))
            else:
                s = step(g, s, 0)
        except DeadEnd:
            break
        out.append(s)
    return out
