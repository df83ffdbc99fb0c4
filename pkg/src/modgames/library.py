"""Ready-made games and specifications used by the tests, the docs and the CLI."""
from __future__ import annotations

from typing import Iterable

from .formats import parse_rgg
from .rgg import LocalStrategy, ModularStrategy, memoryless, node, ret
from .words import BUCHI, DET, BuchiWordAutomaton, powerset

SAMPLE_GAME = """\
# two modules: Player 0 picks p_c or p_d after each return,
# Player 1 picks p_a or p_b inside M1
game sample
module Min main
  entry e_in
  node e_in player 0 labels { }
  node u1 player 1 labels { p_c }
  node u2 player 0 labels { p_d }
  box b : M1 calllabels { } retlabels ex1 { } player 0
  edge e_in -> call b
  edge ret b ex1 -> u1
  edge ret b ex1 -> u2
  edge u1 -> call b
  edge u2 -> call b
module M1
  entry e1
  node e1 player 1 labels { }
  node u3 player 0 labels { p_a }
  node u4 player 0 labels { p_b }
  exit ex1 labels { }
  edge e1 -> u3
  edge e1 -> u4
  edge u3 -> ex1
  edge u4 -> ex1
"""

SAMPLE_AP = ("p_a", "p_b", "p_c", "p_d")


def sample_game():
    g = parse_rgg(SAMPLE_GAME)
    return g


def always_c():
    """Memoryless: after every return go to u1 (p_c)."""
    return memoryless({"Min": {ret("b", "ex1"): 0}})


def always_d():
    return memoryless({"Min": {ret("b", "ex1"): 1}})


def alternate():
    """Two memory states remembering the last pick at the return."""
    r = ret("b", "ex1")
    loc = LocalStrategy(0, {(0, node("u1")): 1, (1, node("u2")): 0},
                        {(0, r): 0, (1, r): 1})
    return ModularStrategy({"Min": loc})


def infinitely_often(p: str, ap: Iterable[str]) -> BuchiWordAutomaton:
    """Two states; the state records whether the last letter carried ``p``."""
    ap = frozenset(ap)
    delta = {(q, a): ((1 if p in a else 0),) for q in (0, 1) for a in powerset(ap)}
    return BuchiWordAutomaton((0, 1), 0, ap, delta, frozenset({1}), BUCHI, DET, False, None, f"GF{p}")


def accept_all(ap: Iterable[str], tagged: bool = False) -> BuchiWordAutomaton:
    ap = frozenset(ap)
    b = BuchiWordAutomaton((0,), 0, ap, {}, frozenset({0}), BUCHI, DET, tagged, None, "true")
    return BuchiWordAutomaton((0,), 0, ap, {(0, a): (0,) for a in b.alphabet()},
                              frozenset({0}), BUCHI, DET, tagged, None, "true")


def matching_spec(ap: Iterable[str] = SAMPLE_AP) -> BuchiWordAutomaton:
    """Each p_a must be answered by p_c and each p_b by p_d, before the next pick."""
    ap = frozenset(ap)
    delta = {}
    for a in powerset(ap):
        for q in ("idle", "want_c", "want_d", "bad"):
            if q == "bad":
                t = "bad"
            elif q == "want_c" and "p_d" in a or q == "want_d" and "p_c" in a:
                t = "bad"
            elif q != "idle" and ({"p_c", "p_d"} & a):
                t = "idle"
            elif "p_a" in a:
                t = "want_c" if q == "idle" else "bad"
            elif "p_b" in a:
                t = "want_d" if q == "idle" else "bad"
            else:
                t = q
            delta[(q, a)] = (t,)
    return BuchiWordAutomaton(("idle", "want_c", "want_d", "bad"), "idle", ap, delta,
                              frozenset({"idle", "want_c", "want_d"}), BUCHI, DET, False, None, "match")
