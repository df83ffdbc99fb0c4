"""Nested-eventually formulas and their deterministic Büchi automata.

A path formula ``F(p1 & F(p2 & ... F pn))`` holds on a word when positions
``t1 <= t2 <= ... <= tn`` exist with ``pi`` true at ``ti``.  Its negation
``!F(...)`` is a safety property.  Concrete syntax::

    spec    := clause ('&' clause)*
    clause  := path ('|' path)*
    path    := '!' path | 'F' farg | '(' clause ')'
    farg    := 'F' farg | '(' fbody ')' | literal
    fbody   := pred ['&' 'F' farg] | 'F' farg
    pred    := conj ('|' conj)*         conj := literal ('&' literal)*
    literal := '!' literal | name | 'true' | 'false' | '(' pred ')'

Only top-level conjunctions can be compiled; disjunctions are evaluated.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .words import BUCHI, DET, BuchiWordAutomaton, powerset, product_det

Pred = tuple  # ("ap", name) | ("not", p) | ("and", p, q) | ("or", p, q) | ("true",) | ("false",)

TRUE: Pred = ("true",)
FALSE: Pred = ("false",)


def ap_(name: str) -> Pred:
    return ("ap", name)


def holds(p: Pred, labels: FrozenSet[str]) -> bool:
    op = p[0]
    if op == "ap":
        return p[1] in labels
    if op == "not":
        return not holds(p[1], labels)
    if op == "and":
        return holds(p[1], labels) and holds(p[2], labels)
    if op == "or":
        return holds(p[1], labels) or holds(p[2], labels)
    return op == "true"


def pred_aps(p: Pred) -> set:
    if p[0] == "ap":
        return {p[1]}
    return set().union(*(pred_aps(q) for q in p[1:])) if len(p) > 1 else set()


def pred_str(p: Pred, prec: int = 0) -> str:
    op = p[0]
    if op == "ap":
        return p[1]
    if op in ("true", "false"):
        return op
    if op == "not":
        return "!" + pred_str(p[1], 3)
    mine = 1 if op == "or" else 2
    sym = " | " if op == "or" else " & "
    text = pred_str(p[1], mine) + sym + pred_str(p[2], mine)
    return f"({text})" if prec > mine else text


@dataclass(frozen=True)
class PathFormula:
    preds: Tuple[Pred, ...]
    negated: bool = False

    def __post_init__(self):
        if not self.preds:
            raise ValueError("a path formula needs at least one predicate")

    def negate(self) -> "PathFormula":
        return PathFormula(self.preds, not self.negated)

    def aps(self) -> set:
        return set().union(*(pred_aps(p) for p in self.preds))

    def __str__(self):
        text = ""
        for p in reversed(self.preds):
            body = pred_str(p, 3) if not text else f"{pred_str(p, 2)} & {text}"
            text = f"F({body})" if text else f"F {body}"
        return ("!" if self.negated else "") + text


@dataclass(frozen=True)
class PathLtlSpec:
    """Conjunction of disjunctions of path formulas."""

    clauses: Tuple[Tuple[PathFormula, ...], ...]

    def aps(self) -> set:
        return set().union(*(f.aps() for c in self.clauses for f in c))

    def is_conjunction(self) -> bool:
        return all(len(c) == 1 for c in self.clauses)

    def __str__(self):
        parts = []
        for c in self.clauses:
            text = " | ".join(str(f) for f in c)
            parts.append(f"({text})" if len(c) > 1 and len(self.clauses) > 1 else text)
        return " & ".join(parts)


# ------------------------------------------------------------------- parsing


class PathLtlSyntaxError(ValueError):
    def __init__(self, message: str, pos: int, text: str):
        super().__init__(f"{message} at column {pos + 1}: {text!r}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|([()!&|]))")


def _tokenize(text: str) -> List[Tuple[str, int]]:
    out = []
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m:
            raise PathLtlSyntaxError(f"unexpected character {text[i]!r}", i, text)
        tok = m.group(1) or m.group(2)
        out.append((tok, m.start(1) if m.group(1) else m.start(2)))
        i = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, ahead: int = 0) -> Optional[str]:
        j = self.i + ahead
        return self.toks[j][0] if j < len(self.toks) else None

    def pos(self) -> int:
        return self.toks[self.i][1] if self.i < len(self.toks) else len(self.text)

    def fail(self, msg: str):
        raise PathLtlSyntaxError(msg, self.pos(), self.text)

    def eat(self, tok: str):
        if self.peek() != tok:
            self.fail(f"expected {tok!r}")
        self.i += 1

    def spec(self) -> PathLtlSpec:
        clauses = [self.clause()]
        while self.peek() == "&":
            self.i += 1
            clauses.append(self.clause())
        if self.peek() is not None:
            self.fail("trailing input")
        return PathLtlSpec(tuple(clauses))

    def clause(self) -> Tuple[PathFormula, ...]:
        out = list(self.path())
        while self.peek() == "|":
            self.i += 1
            out.extend(self.path())
        return tuple(out)

    def path(self) -> Tuple[PathFormula, ...]:
        t = self.peek()
        if t == "!":
            at = self.pos()
            self.i += 1
            inner = self.path()
            if len(inner) != 1:
                raise PathLtlSyntaxError("cannot negate a disjunction", at, self.text)
            return (inner[0].negate(),)
        if t == "F":
            self.i += 1
            return (PathFormula(self.farg()),)
        if t == "(":
            self.i += 1
            c = self.clause()
            self.eat(")")
            return c
        self.fail("expected a path formula")

    def farg(self) -> Tuple[Pred, ...]:
        t = self.peek()
        if t == "F":
            self.i += 1
            return self.farg()
        if t == "(" and self._paren_holds_path():
            self.i += 1
            body = self.fbody()
            self.eat(")")
            return body
        return (self.literal(),)

    def _paren_holds_path(self) -> bool:
        """Whether the parenthesis at the cursor encloses an F subformula."""
        depth = 0
        for tok, _ in self.toks[self.i:]:
            if tok == "(":
                depth += 1
            elif tok == ")":
                depth -= 1
                if depth == 0:
                    return False
            elif tok == "F" and depth == 1:
                return True
        return False

    def fbody(self) -> Tuple[Pred, ...]:
        if self.peek() == "F":
            self.i += 1
            return self.farg()
        p = self.pred()
        if self.peek() == "&" and self.peek(1) == "F":
            self.i += 2
            return (p,) + self.farg()
        return (p,)

    def pred(self) -> Pred:
        p = self.conj()
        while self.peek() == "|":
            self.i += 1
            p = ("or", p, self.conj())
        return p

    def conj(self) -> Pred:
        p = self.literal()
        while self.peek() == "&" and self.peek(1) != "F":
            self.i += 1
            p = ("and", p, self.literal())
        return p

    def literal(self) -> Pred:
        t = self.peek()
        if t == "!":
            self.i += 1
            return ("not", self.literal())
        if t == "(":
            self.i += 1
            p = self.pred()
            self.eat(")")
            return p
        if t in ("true", "false"):
            self.i += 1
            return (t,)
        if t is None or t == "F" or not re.fullmatch(r"[A-Za-z_]\w*", t):
            self.fail("expected a proposition")
        self.i += 1
        return ("ap", t)


def parse_pathltl(text: str) -> PathLtlSpec:
    return _Parser(text).spec()


# ----------------------------------------------------------------- semantics


def _first_match(preds: Sequence[Pred], word: Sequence[FrozenSet[str]], k: int, start: int) -> bool:
    if k == len(preds):
        return True
    for t in range(start, len(word)):
        if holds(preds[k], word[t]) and _first_match(preds, word, k + 1, t):
            return True
    return False


def eval_path_formula(f: PathFormula, stem: Sequence, cycle: Sequence) -> bool:
    if not cycle:
        raise ValueError("cycle must be nonempty")
    word = [frozenset(a) for a in stem] + [frozenset(a) for a in cycle] * len(f.preds)
    found = _first_match(f.preds, word, 0, 0)
    return found != f.negated


def eval_pathltl(spec, stem: Sequence, cycle: Sequence) -> bool:
    """Truth value of ``spec`` (a spec, formula or text) on ``stem . cycle^omega``."""
    if isinstance(spec, str):
        spec = parse_pathltl(spec)
    if isinstance(spec, PathFormula):
        return eval_path_formula(spec, stem, cycle)
    return all(any(eval_path_formula(f, stem, cycle) for f in c) for c in spec.clauses)


# ------------------------------------------------------------------ compiler


def _advance(preds: Sequence[Pred], i: int, labels: FrozenSet[str]) -> int:
    while i < len(preds) and holds(preds[i], labels):
        i += 1
    return i


def compile_path_formula(f: PathFormula, ap: Optional[Iterable[str]] = None) -> BuchiWordAutomaton:
    """Deterministic, total automaton with ``len(f.preds) + 1`` states.

    State ``i`` means the first ``i`` predicates have been matched; several
    may match at the same position.
    """
    ap = frozenset(ap) if ap is not None else frozenset(f.aps())
    if not f.aps() <= ap:
        raise ValueError(f"formula uses propositions outside {sorted(ap)}")
    n = len(f.preds)
    states = tuple(range(n + 1))
    delta = {}
    for i in states:
        for a in powerset(ap):
            delta[(i, a)] = (_advance(f.preds, i, a),)
    acc = frozenset(range(n)) if f.negated else frozenset({n})
    return BuchiWordAutomaton(states, 0, ap, delta, acc, BUCHI, DET, False, None, str(f))


def compile_spec(spec, ap: Optional[Iterable[str]] = None) -> BuchiWordAutomaton:
    if isinstance(spec, str):
        spec = parse_pathltl(spec)
    if isinstance(spec, PathFormula):
        spec = PathLtlSpec(((spec,),))
    if not spec.is_conjunction():
        raise ValueError("only conjunctions of path formulas can be compiled")
    ap = frozenset(ap) if ap is not None else frozenset(spec.aps())
    parts = [compile_path_formula(c[0], ap) for c in spec.clauses]
    out = product_det(parts)
    return out if len(parts) > 1 else parts[0]
