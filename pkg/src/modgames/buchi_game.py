"""Two-player Büchi games on finite arenas.

Player 0 wins a play that visits the accepting set infinitely often; a
player who has no move loses.  Solved by the classical loop: compute the
Player-0 attractor of the accepting set, hand the complement's Player-1
attractor to Player 1, repeat on the rest.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Optional, Set, Tuple


class Arena:
    def __init__(self):
        self.ids: Dict[Hashable, int] = {}
        self.names: List[Hashable] = []
        self.owner: List[int] = []
        self.accepting: List[bool] = []
        self.succ: List[List[int]] = []

    def __len__(self):
        return len(self.names)

    def add(self, v: Hashable, owner: int, accepting: bool = False) -> int:
        i = self.ids.get(v)
        if i is not None:
            return i
        i = len(self.names)
        self.ids[v] = i
        self.names.append(v)
        self.owner.append(owner)
        self.accepting.append(accepting)
        self.succ.append([])
        return i

    def edge(self, u: int, v: int) -> None:
        self.succ[u].append(v)

    def predecessors(self) -> List[List[int]]:
        pred: List[List[int]] = [[] for _ in self.names]
        for u, out in enumerate(self.succ):
            for v in out:
                pred[v].append(u)
        return pred


def _attractor(arena: Arena, pred, alive: List[bool], target: Iterable[int], player: int):
    """Player's attractor of ``target`` inside ``alive``; returns (set, rank)."""
    owner, succ = arena.owner, arena.succ
    rank: Dict[int, int] = {}
    count = {}
    todo = deque()
    for t in target:
        if alive[t] and t not in rank:
            rank[t] = 0
            todo.append(t)
    while todo:
        v = todo.popleft()
        for u in pred[v]:
            if not alive[u] or u in rank:
                continue
            if owner[u] == player:
                rank[u] = rank[v] + 1
                todo.append(u)
            else:
                c = count.get(u)
                if c is None:
                    c = sum(1 for w in succ[u] if alive[w])
                c -= 1
                count[u] = c
                if c == 0:
                    rank[u] = rank[v] + 1
                    todo.append(u)
    return rank


@dataclass
class BuchiSolution:
    win0: Set[int]
    strategy: Dict[int, int] = field(default_factory=dict)  # Player-0 vertex -> successor

    def wins(self, v: int) -> bool:
        return v in self.win0


def solve_buchi(arena: Arena) -> BuchiSolution:
    n = len(arena)
    pred = arena.predecessors()
    alive = [True] * n
    owner, succ = arena.owner, arena.succ
    while True:
        live = [v for v in range(n) if alive[v]]
        # dead ends of Player 1 count as targets: reaching one wins for Player 0
        goal = []
        for v in live:
            stuck = not any(alive[w] for w in succ[v])
            if (owner[v] == 1 and stuck) or (arena.accepting[v] and not stuck):
                goal.append(v)
        rank = _attractor(arena, pred, alive, goal, 0)
        trap = [v for v in live if v not in rank]
        if not trap:
            break
        lost = _attractor(arena, pred, alive, trap, 1)
        for v in lost:
            alive[v] = False
    strategy = {}
    for v, r in rank.items():
        if owner[v] != 0:
            continue
        if r == 0:
            nxt = next((w for w in succ[v] if alive[w]), None)
        else:
            nxt = min((w for w in succ[v] if w in rank and rank[w] < r), key=rank.get)
        if nxt is not None:
            strategy[v] = nxt
    return BuchiSolution(set(rank), strategy)
