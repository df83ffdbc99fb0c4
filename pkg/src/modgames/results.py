"""Verdict types shared by the solver, the oracle and the command line."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional

from .rgg import ModularStrategy


@dataclass
class Win:
    strategy: ModularStrategy
    stats: Optional[Any] = None

    winning = True

    def __str__(self):
        return "WIN"


@dataclass
class Lose:
    stats: Optional[Any] = None

    winning = False

    def __str__(self):
        return "LOSE"


@dataclass
class LoseUpTo:
    """No winning strategy within the memory bound; not a definitive loss."""

    bound: int
    checked: int = 0

    winning = False

    def __str__(self):
        return f"NO WINNING STRATEGY WITH MEMORY <= {self.bound}"


class BoundExceeded:
    """Exploration hit its bound before reaching a verdict."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BoundExceeded"

    def __bool__(self):
        raise TypeError("BoundExceeded has no truth value")


BOUND_EXCEEDED = BoundExceeded()
