"""Line-oriented text formats for games, automata and strategies.

Game files::

    game <name>
    [ap p q ...]
    module <id> [main]
      entry <node>
      node <node> player <0|1> labels { p q }
      exit <node> labels { ... }
      box <box> : <module> calllabels { ... } retlabels <exit> { ... } [player <0|1>] ...
      edge <src> -> <dst>      # src: node | ret <box> <exit>;  dst: node | call <box>

Automaton files::

    automaton <name> kind <vpa|nfa> acceptance <buchi|cobuchi> mode <det|nondet|universal>
    [ap p q ...;]
    states a b c; initial a; accepting c; [stack g h;] [fallback s;]
    int  <q> { labels } [<tag>] -> <q'>
    push <q> { labels } -> <q'> push <g>
    pop  <q> { labels } <g|bottom> -> <q'>

``#`` starts a comment.  Errors carry line and column.
"""
from __future__ import annotations

import re
from typing import Dict, List, Optional, Tuple

from .rgg import GameModule, LocalStrategy, ModularStrategy, Rgg, call, node, ret, vertex_str
from .words import BOTTOM, BUCHI, COBUCHI, DET, NONDET, UNIVERSAL, BuchiWordAutomaton, Vpa

_TOK = re.compile(r"->|[{}:;]|[^\s{}:;#]+")
_IDENT = re.compile(r"[A-Za-z0-9_.'\-\[\]<>@$%^*+=~!?/]+$")


class FormatError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + message)
        self.line, self.col = line, col


class _Line:
    def __init__(self, text: str, lineno: int):
        self.lineno = lineno
        body = text.split("#", 1)[0]
        self.toks = [(m.group(0), m.start() + 1) for m in _TOK.finditer(body)]
        self.i = 0
        self.end_col = len(body) + 1

    def more(self) -> bool:
        return self.i < len(self.toks)

    def peek(self) -> Optional[str]:
        return self.toks[self.i][0] if self.more() else None

    def col(self) -> int:
        return self.toks[self.i][1] if self.more() else self.end_col

    def fail(self, msg: str):
        raise FormatError(msg, self.lineno, self.col())

    def take(self, what: str = "a token") -> str:
        if not self.more():
            self.fail(f"expected {what}")
        t = self.toks[self.i][0]
        self.i += 1
        return t

    def expect(self, tok: str):
        if self.peek() != tok:
            self.fail(f"expected {tok!r}")
        self.i += 1

    def ident(self, what: str = "an identifier") -> str:
        t = self.peek()
        if t is None or t in "{}:;" or t == "->":
            self.fail(f"expected {what}")
        self.i += 1
        return t

    def labelset(self) -> frozenset:
        self.expect("{")
        out = []
        while self.peek() != "}":
            if not self.more():
                self.fail("unterminated label set")
            out.append(self.ident("a proposition"))
        self.i += 1
        return frozenset(out)

    def done(self):
        if self.peek() == ";":
            self.i += 1
        if self.more():
            self.fail(f"unexpected {self.peek()!r}")


def _lines(text: str) -> List[_Line]:
    out = []
    for n, raw in enumerate(text.splitlines(), 1):
        ln = _Line(raw, n)
        if ln.toks:
            out.append(ln)
    return out


# --------------------------------------------------------------------- games


class _ModuleDraft:
    def __init__(self, name: str, line: _Line):
        self.name, self.line = name, line
        self.entry: Optional[str] = None
        self.nodes: List[str] = []
        self.exits: List[str] = []
        self.boxes: Dict[str, str] = {}
        self.edges: Dict[tuple, List[tuple]] = {}
        self.labels: Dict[tuple, frozenset] = {}
        self.player: Dict[tuple, int] = {}
        self.retdecl: List[Tuple[str, str, _Line]] = []


def parse_rgg(text: str) -> Rgg:
    lines = _lines(text)
    if not lines or lines[0].peek() != "game":
        raise FormatError("a game file starts with 'game <name>'", lines[0].lineno if lines else 1, 1)
    head = lines[0]
    head.take()
    name = head.ident("a game name")
    head.done()
    ap: Optional[List[str]] = None
    mods: Dict[str, _ModuleDraft] = {}
    main = None
    cur: Optional[_ModuleDraft] = None
    for ln in lines[1:]:
        kw = ln.take()
        if kw == "ap":
            ap = []
            while ln.more() and ln.peek() != ";":
                ap.append(ln.ident())
            ln.done()
            continue
        if kw == "module":
            mid = ln.ident("a module id")
            if mid in mods:
                ln.fail(f"duplicate module {mid!r}")
            cur = mods[mid] = _ModuleDraft(mid, ln)
            if ln.peek() == "main":
                ln.take()
                if main is not None:
                    ln.fail("two main modules")
                main = mid
            ln.done()
            continue
        if cur is None:
            ln.fail(f"{kw!r} outside a module")
        if kw == "entry":
            if cur.entry is not None:
                ln.fail("second entry in module")
            cur.entry = ln.ident("a node id")
        elif kw == "node":
            nid = ln.ident("a node id")
            if nid in cur.nodes:
                ln.fail(f"duplicate node {nid!r}")
            cur.nodes.append(nid)
            ln.expect("player")
            p = ln.take("a player")
            if p not in ("0", "1"):
                ln.fail("player must be 0 or 1")
            cur.player[node(nid)] = int(p)
            if ln.peek() == "labels":
                ln.take()
                lab = ln.labelset()
                if lab:
                    cur.labels[node(nid)] = lab
        elif kw == "exit":
            nid = ln.ident("a node id")
            if nid in cur.nodes:
                ln.fail(f"duplicate node {nid!r}")
            cur.nodes.append(nid)
            cur.exits.append(nid)
            if ln.peek() == "labels":
                ln.take()
                lab = ln.labelset()
                if lab:
                    cur.labels[node(nid)] = lab
        elif kw == "box":
            bid = ln.ident("a box id")
            if bid in cur.boxes:
                ln.fail(f"duplicate box {bid!r}")
            ln.expect(":")
            cur.boxes[bid] = ln.ident("a module id")
            while ln.more() and ln.peek() != ";":
                opt = ln.take()
                if opt == "calllabels":
                    lab = ln.labelset()
                    if lab:
                        cur.labels[call(bid)] = lab
                elif opt == "retlabels":
                    x = ln.ident("an exit id")
                    lab = ln.labelset()
                    if lab:
                        cur.labels[ret(bid, x)] = lab
                    cur.retdecl.append((bid, x, ln))
                    if ln.peek() == "player":
                        ln.take()
                        p = ln.take("a player")
                        if p not in ("0", "1"):
                            ln.fail("player must be 0 or 1")
                        cur.player[ret(bid, x)] = int(p)
                else:
                    ln.i -= 1
                    ln.fail(f"unknown box option {opt!r}")
        elif kw == "edge":
            src = _vertex(ln, cur, source=True)
            ln.expect("->")
            dst = _vertex(ln, cur, source=False)
            cur.edges.setdefault(src, []).append(dst)
        else:
            ln.i -= 1
            ln.fail(f"unknown keyword {kw!r}")
        ln.done()
    if main is None:
        raise FormatError("no main module", head.lineno, 1)
    modules = {}
    for mid, d in mods.items():
        if d.entry is None:
            raise FormatError(f"module {mid!r} has no entry", d.line.lineno, 1)
        for b, target in d.boxes.items():
            if target not in mods:
                raise FormatError(f"box {b!r} targets undeclared module {target!r}", d.line.lineno, 1)
        for b, x, ln in d.retdecl:
            if x not in mods[d.boxes[b]].exits:
                raise FormatError(f"{x!r} is not an exit of {d.boxes[b]!r}", ln.lineno, 1)
        for src, targets in d.edges.items():
            for t in [src] + targets:
                if t[0] == "node" and t[1] not in d.nodes:
                    raise FormatError(f"undeclared node {t[1]!r} in module {mid!r}", d.line.lineno, 1)
                if t[0] in ("call", "ret") and t[1] not in d.boxes:
                    raise FormatError(f"undeclared box {t[1]!r} in module {mid!r}", d.line.lineno, 1)
        for b, target in d.boxes.items():
            for x in mods[target].exits:
                d.player.setdefault(ret(b, x), 1)
        modules[mid] = GameModule(mid, tuple(d.nodes), d.entry, tuple(d.exits), dict(d.boxes),
                                  {k: tuple(v) for k, v in d.edges.items()}, dict(d.labels), dict(d.player))
    if ap is None:
        ap = sorted(set().union(*(set().union(*m.labels.values()) for m in modules.values() if m.labels)))
    return Rgg(name, modules, main, tuple(ap))


def _vertex(ln: _Line, d: _ModuleDraft, source: bool):
    t = ln.ident("a vertex")
    if source and t == "ret":
        return ret(ln.ident("a box id"), ln.ident("an exit id"))
    if not source and t == "call":
        return call(ln.ident("a box id"))
    return node(t)


def _labels(lab) -> str:
    return "{ " + " ".join(sorted(lab)) + (" }" if lab else "}")


def print_rgg(g: Rgg) -> str:
    out = [f"game {g.name}", "ap " + " ".join(g.ap) if g.ap else "ap"]
    for mid, mod in g.modules.items():
        out.append(f"module {mid}" + (" main" if mid == g.main else ""))
        out.append(f"  entry {mod.entry}")
        for n in mod.nodes:
            v = node(n)
            if n in mod.exits:
                out.append(f"  exit {n} labels {_labels(mod.label(v))}")
            else:
                out.append(f"  node {n} player {mod.player.get(v, 1)} labels {_labels(mod.label(v))}")
        for b, target in mod.boxes.items():
            parts = [f"  box {b} : {target} calllabels {_labels(mod.label(call(b)))}"]
            callee = g.modules[target]
            for x in callee.exits:
                r = ret(b, x)
                parts.append(f"retlabels {x} {_labels(mod.label(r))} player {mod.player.get(r, 1)}")
            out.append(" ".join(parts))
        for src, targets in mod.edges.items():
            for t in targets:
                out.append(f"  edge {vertex_str(src)} -> {vertex_str(t)}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- automata


def _state_names(states) -> Dict[object, str]:
    if all(isinstance(s, str) and _IDENT.match(s) and s not in ("bottom",) for s in states):
        return {s: s for s in states}
    return {s: f"s{i}" for i, s in enumerate(states)}


def parse_automaton(text: str):
    lines = _lines(text)
    if not lines or lines[0].peek() != "automaton":
        raise FormatError("an automaton file starts with 'automaton <name>'", lines[0].lineno if lines else 1, 1)
    head = lines[0]
    head.take()
    name = head.ident("an automaton name")
    opts = {"kind": "nfa", "acceptance": BUCHI, "mode": DET}
    allowed = {"kind": ("vpa", "nfa"), "acceptance": (BUCHI, COBUCHI), "mode": (DET, NONDET, UNIVERSAL)}
    while head.more() and head.peek() != ";":
        key = head.take()
        if key not in opts:
            head.i -= 1
            head.fail(f"unknown option {key!r}")
        val = head.take(f"a value for {key}")
        if val not in allowed[key]:
            head.i -= 1
            head.fail(f"bad {key} {val!r}")
        opts[key] = val
    head.done()
    decl: Dict[str, List[str]] = {}
    internal: Dict[tuple, List] = {}
    push: Dict[tuple, List] = {}
    pop: Dict[tuple, List] = {}
    tagged = None
    where: Dict[str, _Line] = {}
    for ln in lines[1:]:
        kw = ln.take()
        if kw in ("ap", "states", "initial", "accepting", "stack", "fallback"):
            if kw in decl:
                ln.i -= 1
                ln.fail(f"duplicate {kw} declaration")
            vals = []
            while ln.more() and ln.peek() != ";":
                vals.append(ln.ident())
            decl[kw] = vals
            where[kw] = ln
            ln.done()
            continue
        if kw == "int":
            q = ln.ident("a state")
            lab = ln.labelset()
            t = None
            if ln.peek() in ("call", "ret", "int"):
                t = ln.take()
            ln.expect("->")
            q2 = ln.ident("a state")
            if opts["kind"] == "vpa":
                if t not in (None, "int"):
                    ln.fail("VPA internal transitions read internal letters")
                internal.setdefault((q, lab), []).append(q2)
            else:
                now = t is not None
                if tagged is not None and tagged != now:
                    ln.fail("mixing tagged and untagged transitions")
                tagged = now
                internal.setdefault((q, (lab, t) if now else lab), []).append(q2)
        elif kw == "push":
            if opts["kind"] != "vpa":
                ln.i -= 1
                ln.fail("push transitions need kind vpa")
            q = ln.ident("a state")
            lab = ln.labelset()
            ln.expect("->")
            q2 = ln.ident("a state")
            ln.expect("push")
            gam = ln.ident("a stack symbol")
            push.setdefault((q, lab), []).append((gam, q2))
        elif kw == "pop":
            if opts["kind"] != "vpa":
                ln.i -= 1
                ln.fail("pop transitions need kind vpa")
            q = ln.ident("a state")
            lab = ln.labelset()
            gam = ln.ident("a stack symbol")
            ln.expect("->")
            q2 = ln.ident("a state")
            pop.setdefault((q, lab, BOTTOM if gam == "bottom" else gam), []).append(q2)
        else:
            ln.i -= 1
            ln.fail(f"unknown keyword {kw!r}")
        ln.done()
    for req in ("states", "initial", "accepting"):
        if req not in decl:
            raise FormatError(f"missing '{req}' declaration", head.lineno, 1)
    states = decl["states"]
    if len(set(states)) != len(states):
        raise FormatError("duplicate state", where["states"].lineno, 1)
    known = set(states)

    def check_state(s, kw="states"):
        if s not in known:
            raise FormatError(f"undeclared state {s!r}", where.get(kw, head).lineno, 1)

    for s in decl["initial"] + decl["accepting"] + decl.get("fallback", []):
        check_state(s)
    for key, ts in list(internal.items()) + list(pop.items()):
        check_state(key[0])
        for t in ts:
            check_state(t)
    for key, ts in push.items():
        check_state(key[0])
        for g_, t in ts:
            check_state(t)
    letters = set()
    for key in internal:
        lab = key[1][0] if isinstance(key[1], tuple) else key[1]
        letters |= lab
    for key in list(push) + list(pop):
        letters |= key[1]
    ap = frozenset(decl["ap"]) if "ap" in decl else frozenset(letters)
    if not letters <= ap:
        raise FormatError(f"labels {sorted(letters - ap)} outside the declared ap", where["ap"].lineno, 1)
    if opts["kind"] == "vpa":
        stack = tuple(decl.get("stack", []))
        for key, ts in push.items():
            for g_, _ in ts:
                if g_ not in stack:
                    raise FormatError(f"undeclared stack symbol {g_!r}", head.lineno, 1)
        for key in pop:
            if key[2] != BOTTOM and key[2] not in stack:
                raise FormatError(f"undeclared stack symbol {key[2]!r}", head.lineno, 1)
        return Vpa(tuple(states), tuple(decl["initial"]), ap, stack,
                   {k: tuple(v) for k, v in internal.items()},
                   {k: tuple(v) for k, v in push.items()},
                   {k: tuple(v) for k, v in pop.items()},
                   frozenset(decl["accepting"]), opts["acceptance"], opts["mode"], name)
    if len(decl["initial"]) != 1:
        raise FormatError("a finite automaton has exactly one initial state", where["initial"].lineno, 1)
    fallback = decl.get("fallback", [None])[0]
    return BuchiWordAutomaton(tuple(states), decl["initial"][0], ap,
                              {k: tuple(v) for k, v in internal.items()},
                              frozenset(decl["accepting"]), opts["acceptance"], opts["mode"],
                              bool(tagged), fallback, name)


def print_automaton(a) -> str:
    names = _state_names(a.states)
    is_vpa = isinstance(a, Vpa)
    kind = "vpa" if is_vpa else "nfa"
    nm = a.name if _IDENT.match(a.name or "") else "A"
    out = [f"automaton {nm} kind {kind} acceptance {a.acceptance} mode {a.mode}",
           "ap " + " ".join(sorted(a.ap)) + ";",
           "states " + " ".join(names[s] for s in a.states) + ";"]
    initial = a.initial if is_vpa else (a.initial,)
    out.append("initial " + " ".join(names[s] for s in initial) + ";")
    out.append("accepting " + " ".join(names[s] for s in a.states if s in a.accepting) + ";")
    if is_vpa:
        sym = {g_: str(g_) for g_ in a.stack}
        out.append("stack " + " ".join(sym[g_] for g_ in a.stack) + ";")
        for (q, lab), ts in a.internal.items():
            for t in ts:
                out.append(f"int {names[q]} {_labels(lab)} int -> {names[t]}")
        for (q, lab), ts in a.push.items():
            for g_, t in ts:
                out.append(f"push {names[q]} {_labels(lab)} -> {names[t]} push {sym[g_]}")
        for (q, lab, top), ts in a.pop.items():
            for t in ts:
                top_s = "bottom" if top == BOTTOM else sym[top]
                out.append(f"pop {names[q]} {_labels(lab)} {top_s} -> {names[t]}")
    else:
        if a.fallback is not None:
            out.append(f"fallback {names[a.fallback]};")
        for (q, letter), ts in a.delta.items():
            for t in ts:
                if a.tagged:
                    out.append(f"int {names[q]} {_labels(letter[0])} {letter[1]} -> {names[t]}")
                else:
                    out.append(f"int {names[q]} {_labels(letter)} -> {names[t]}")
    return "\n".join(out) + "\n"


# -------------------------------------------------------------- strategies


def print_strategy(g: Rgg, f: ModularStrategy) -> str:
    """Human-readable, re-parsable rendering of a modular strategy."""
    out = []
    for m in g.modules:
        loc = f.of(m)
        # identity updates are implicit, so states seen only there are dropped
        updates = sorted(((k, t) for k, t in loc.update.items() if k[0] != t), key=repr)
        used = {s for (s, _), t in updates} | {t for _, t in updates} | {s for s, _ in loc.move}
        states = sorted(used - {loc.initial}, key=repr)
        names = {s: f"s{i}" for i, s in enumerate([loc.initial] + states)}
        out.append(f"module {m} memory {len(names)} initial {names[loc.initial]}")
        for (s, v), t in updates:
            out.append(f"  update {names[s]} {vertex_str(v)} -> {names[t]}")
        for (s, v), i in sorted(loc.move.items(), key=repr):
            out.append(f"  move {names[s]} {vertex_str(v)} -> {i}")
    return "\n".join(out) + "\n"


def parse_strategy(text: str) -> ModularStrategy:
    local: Dict[str, LocalStrategy] = {}
    cur = None
    for ln in _lines(text):
        kw = ln.take()
        if kw == "module":
            m = ln.ident("a module id")
            ln.expect("memory")
            if not ln.take("a count").isdigit():
                ln.fail("memory size must be a number")
            ln.expect("initial")
            init = ln.ident("a memory state")
            cur = local[m] = LocalStrategy(init, {}, {})
        elif kw in ("update", "move"):
            if cur is None:
                ln.fail(f"{kw!r} outside a module")
            s = ln.ident("a memory state")
            t = ln.ident("a vertex")
            if t == "ret":
                v = ret(ln.ident("a box id"), ln.ident("an exit id"))
            elif t == "call":
                v = call(ln.ident("a box id"))
            else:
                v = node(t)
            ln.expect("->")
            val = ln.ident()
            if kw == "update":
                cur.update[(s, v)] = val
            else:
                if not val.isdigit():
                    ln.fail("move index must be a number")
                cur.move[(s, v)] = int(val)
        else:
            ln.i -= 1
            ln.fail(f"unknown keyword {kw!r}")
        ln.done()
    return ModularStrategy(local)
