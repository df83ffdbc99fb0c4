"""Graphviz export.  Output is deterministic: nodes and edges are sorted."""
from __future__ import annotations

from typing import Dict, Hashable, Iterable, List, Optional

from .rgg import ModularStrategy, Rgg, vertex_str
from .trees import Nbt, RegularTree
from .words import BuchiWordAutomaton, Vpa


def _q(s) -> str:
    text = s if isinstance(s, str) else repr(s)
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _labels(lab) -> str:
    return "{" + " ".join(sorted(lab)) + "}"


class _Ids:
    """Stable short identifiers for arbitrary hashable objects."""

    def __init__(self, items: Iterable[Hashable], prefix: str = "n"):
        self.ids: Dict[Hashable, str] = {}
        for x in sorted(set(items), key=repr):
            self.ids[x] = f"{prefix}{len(self.ids)}"

    def __getitem__(self, x) -> str:
        return self.ids[x]


def _wrap(name: str, body: List[str]) -> str:
    return "\n".join([f"digraph {_q(name)} {{", "  rankdir=LR;"] + ["  " + l for l in body] + ["}"]) + "\n"


def rgg_dot(g: Rgg) -> str:
    body = []
    for m in sorted(g.modules):
        mod = g.module(m)
        body.append(f"subgraph {_q('cluster_' + m)} {{")
        body.append(f"  label={_q(m + (' (main)' if m == g.main else ''))};")
        verts = sorted(g.vertices(m), key=repr)
        for v in verts:
            owner = g.owner(m, v)
            shape = "box" if owner == 1 else ("diamond" if owner == 0 else "ellipse")
            lab = vertex_str(v)
            if g.label(m, v):
                lab += "\\n" + _labels(g.label(m, v))
            extra = ", peripheries=2" if g.is_entry(m, v) else ""
            body.append(f"  {_q(m + ':' + repr(v))} [label={_q(lab)}, shape={shape}{extra}];")
        body.append("}")
        for v in verts:
            for u in g.successors(m, v):
                style = " [style=dashed]" if v[0] == "call" else ""
                body.append(f"{_q(m + ':' + repr(v))} -> {_q(m + ':' + repr(u))}{style};")
    return _wrap(g.name, body)


def buchi_dot(b: BuchiWordAutomaton) -> str:
    ids = _Ids(b.states, "q")
    body = ['init [shape=point];', f"init -> {ids[b.initial]};"]
    for q in sorted(b.states, key=repr):
        shape = "doublecircle" if q in b.accepting else "circle"
        body.append(f"{ids[q]} [label={_q(q)}, shape={shape}];")
    grouped: Dict = {}
    for (q, a), targets in b.delta.items():
        for t in targets:
            grouped.setdefault((ids[q], ids[t]), []).append(a)
    for (s, t), letters in sorted(grouped.items()):
        text = ", ".join(sorted(_letter_str(a) for a in letters))
        body.append(f"{s} -> {t} [label={_q(text)}];")
    if b.fallback is not None:
        body.append(f"// missing letters go to {b.fallback!r}")
    return _wrap(b.name, body)


def _letter_str(a) -> str:
    if isinstance(a, tuple):
        return f"{_labels(a[0])}/{a[1]}"
    return _labels(a)


def vpa_dot(p: Vpa) -> str:
    ids = _Ids(p.states, "q")
    body = ['init [shape=point];'] + [f"init -> {ids[q]};" for q in sorted(p.initial, key=repr)]
    for q in sorted(p.states, key=repr):
        shape = "doublecircle" if q in p.accepting else "circle"
        body.append(f"{ids[q]} [label={_q(q)}, shape={shape}];")
    edges = []
    for (q, a), ts in p.internal.items():
        edges += [(ids[q], ids[t], f"{_labels(a)}") for t in ts]
    for (q, a), ts in p.push.items():
        edges += [(ids[q], ids[t], f"{_labels(a)} push {s}") for s, t in ts]
    for (q, a, top), ts in p.pop.items():
        edges += [(ids[q], ids[t], f"{_labels(a)} pop {top}") for t in ts]
    for s, t, lab in sorted(set(edges)):
        body.append(f"{s} -> {t} [label={_q(lab)}];")
    return _wrap(p.name, body)


def tree_dot(t: RegularTree) -> str:
    nodes = t.reachable()
    ids = _Ids(nodes)
    body = []
    for n in sorted(nodes, key=lambda x: ids[x]):
        body.append(f"{ids[n]} [label={_q(t.label(n))}];")
        for d, c in enumerate(t.children[n]):
            body.append(f"{ids[n]} -> {ids[c]} [label={d}];")
    return _wrap("tree", body)


def nbt_dot(a: Nbt, limit: Optional[int] = 5000) -> str:
    states = a.reachable_states(limit)
    ids = _Ids(states, "s")
    body = []
    for q in sorted(states, key=lambda x: ids[x]):
        shape = "doublecircle" if a.is_accepting(q) else "circle"
        body.append(f"{ids[q]} [label={_q(q)}, shape={shape}];")
        for k, (lab, cs) in enumerate(sorted(a.moves(q), key=repr)):
            hub = f"{ids[q]}_{k}"
            body.append(f"{hub} [shape=point, xlabel={_q(lab)}];")
            body.append(f"{ids[q]} -> {hub} [arrowhead=none];")
            for d, c in enumerate(cs):
                body.append(f"{hub} -> {ids[c]} [label={d}];")
    return _wrap("nbt", body)


def strategy_dot(g: Rgg, f: ModularStrategy) -> str:
    """Each module's memory machine; edges are memory updates."""
    body = []
    for m in sorted(g.modules):
        loc = f.of(m)
        ids = _Ids(loc.states(), f"{m}_")
        body.append(f"subgraph {_q('cluster_' + m)} {{")
        body.append(f"  label={_q(m)};")
        for s in sorted(loc.states(), key=lambda x: ids[x]):
            moves = [f"{vertex_str(v)}->{i}" for (s2, v), i in sorted(loc.move.items(), key=repr) if s2 == s]
            lab = repr(s) + ("\\n" + "\\n".join(moves) if moves else "")
            extra = ", peripheries=2" if s == loc.initial else ""
            body.append(f"  {_q(ids[s])} [label={_q(lab)}{extra}];")
        body.append("}")
        for (s, u), t in sorted(loc.update.items(), key=repr):
            if s != t:
                body.append(f"{_q(ids[s])} -> {_q(ids[t])} [label={_q(vertex_str(u))}];")
    return _wrap("strategy", body)


def emit_dot(obj, game: Optional[Rgg] = None) -> str:
    if isinstance(obj, Rgg):
        return rgg_dot(obj)
    if isinstance(obj, BuchiWordAutomaton):
        return buchi_dot(obj)
    if isinstance(obj, Vpa):
        return vpa_dot(obj)
    if isinstance(obj, RegularTree):
        return tree_dot(obj)
    if isinstance(obj, ModularStrategy):
        if game is None:
            raise ValueError("a strategy needs its game for export")
        return strategy_dot(game, obj)
    if isinstance(obj, Nbt):
        return nbt_dot(obj)
    raise TypeError(f"no DOT export for {type(obj).__name__}")
