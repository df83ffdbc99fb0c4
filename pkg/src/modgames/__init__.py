"""Synthesis of modular strategies for recursive game graphs."""
from .formats import parse_automaton, parse_rgg, parse_strategy, print_automaton, print_rgg, print_strategy
from .oracle import brute_solve, check_strategy, check_strategy_bounded, enumerate_strategies
from .pathltl import compile_spec, parse_pathltl
from .reduction import reduce_det_vpa, reduce_universal_vpa, reduce_vpa
from .results import BOUND_EXCEEDED, Lose, LoseUpTo, Win
from .rgg import GameModule, LocalStrategy, ModularStrategy, Rgg, validate
from .solver import decode_strategy, encode_strategy, solve, solve_vpa
from .words import BuchiWordAutomaton, Vpa, accepts_lasso

__all__ = [
    "BOUND_EXCEEDED", "BuchiWordAutomaton", "GameModule", "LocalStrategy", "Lose", "LoseUpTo",
    "ModularStrategy", "Rgg", "Vpa", "Win", "accepts_lasso", "brute_solve", "check_strategy",
    "check_strategy_bounded", "compile_spec", "decode_strategy", "encode_strategy", "enumerate_strategies",
    "parse_automaton", "parse_pathltl", "parse_rgg", "parse_strategy", "print_automaton", "print_rgg",
    "print_strategy", "reduce_det_vpa", "reduce_universal_vpa", "reduce_vpa", "solve", "solve_vpa",
    "validate",
]
