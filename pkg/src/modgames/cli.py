"""Command-line entry point: ``modgames <subcommand> ...``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import formats
from .dot import emit_dot
from .generate import random_buchi, random_game, seeded
from .oracle import brute_solve, check_strategy, check_strategy_bounded
from .pathltl import PathLtlSyntaxError, compile_spec, parse_pathltl
from .reduction import ReductionError, reduce_vpa
from .results import BOUND_EXCEEDED, LoseUpTo, Win
from .rgg import validate
from .solver import SolverError, solve, solve_vpa
from .words import BuchiWordAutomaton, Vpa

log = logging.getLogger("modgames")


class CliError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}") from None


def _write(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _game(path):
    return formats.parse_rgg(_read(path))


def _automaton(path):
    return formats.parse_automaton(_read(path))


def _finite(path) -> BuchiWordAutomaton:
    a = _automaton(path)
    if isinstance(a, Vpa):
        raise CliError(f"{path} is a VPA; use solve-vpa or verify")
    return a


def _print_stats(res, out):
    if res.stats is not None:
        out.write("".join(f"# {line}\n" for line in res.stats.lines()))


def cmd_validate(args, out):
    g = _game(args.game)
    issues = validate(g)
    for v in issues:
        out.write(f"{v}\n")
    errs = [v for v in issues if v.severity == "error"]
    out.write(f"{g.name}: {len(g.modules)} modules, {g.size()} vertices, "
              f"{len(errs)} errors, {len(issues) - len(errs)} warnings\n")
    return 1 if errs else 0


def _report(g, res, args, out):
    if isinstance(res, Win):
        out.write("WIN\n")
        text = formats.print_strategy(g, res.strategy)
        if args.output:
            _write(args.output, text)
        else:
            out.write(text)
    else:
        out.write("LOSE\n")
    if args.stats:
        _print_stats(res, out)
    return 0


def cmd_solve(args, out):
    g = _game(args.game)
    b = _finite(args.spec)
    res = solve(g, b, prune=not args.no_prune, max_assumptions=args.max_assumptions)
    return _report(g, res, args, out)


def cmd_solve_vpa(args, out):
    g = _game(args.game)
    p = _automaton(args.spec)
    if not isinstance(p, Vpa):
        raise CliError(f"{args.spec} is not a VPA; use solve")
    res = solve_vpa(g, p, prune=not args.no_prune, max_assumptions=args.max_assumptions)
    return _report(g, res, args, out)


def cmd_reduce(args, out):
    g = _game(args.game)
    p = _automaton(args.spec)
    if not isinstance(p, Vpa):
        raise CliError(f"{args.spec} is not a VPA")
    red = reduce_vpa(g, p)
    game_text = formats.print_rgg(red.game)
    spec_text = formats.print_automaton(red.spec)
    if args.output:
        _write(args.output + ".rgg", game_text)
        _write(args.output + ".aut", spec_text)
    else:
        out.write(game_text + "\n" + spec_text)
    if args.stats:
        out.write(f"# exits: {g.num_exits()} -> {red.game.num_exits()}\n")
        out.write(f"# automaton states: {len(p.states)} -> {len(red.spec.states)}\n")
    return 0


def cmd_compile_ltl(args, out):
    spec = parse_pathltl(args.formula)
    ap = [x for x in args.ap.split(",") if x] if args.ap else None
    b = compile_spec(spec, ap)
    _write(args.output, formats.print_automaton(b))
    if args.stats:
        out.write(f"# states: {len(b.states)}\n")
    return 0


def cmd_verify(args, out):
    g = _game(args.game)
    spec = _automaton(args.spec)
    f = formats.parse_strategy(_read(args.strategy))
    if isinstance(spec, Vpa):
        res = check_strategy_bounded(g, spec, f, depth=args.depth_bound)
        if res is BOUND_EXCEEDED:
            out.write(f"UNKNOWN (stack depth {args.depth_bound} exceeded)\n")
            return 2
        ok = bool(res)
    else:
        ok = check_strategy(g, spec, f)
    out.write("WINNING\n" if ok else "NOT WINNING\n")
    return 0 if ok else 1


def cmd_brute(args, out):
    g = _game(args.game)
    b = _finite(args.spec)
    res = brute_solve(g, b, args.memory_bound, jobs=args.jobs)
    if isinstance(res, LoseUpTo):
        out.write(f"no winning strategy with memory <= {res.bound} "
                  f"({res.checked} checked); larger memory may still win\n")
        return 0
    out.write("WIN\n")
    out.write(formats.print_strategy(g, res.strategy))
    return 0


def cmd_export_dot(args, out):
    text = _read(args.file)
    first = next((l.split()[0] for l in text.splitlines() if l.strip() and not l.lstrip().startswith("#")), "")
    if first == "game":
        obj, game = formats.parse_rgg(text), None
    elif first == "automaton":
        obj, game = formats.parse_automaton(text), None
    elif first == "module" or first == "strategy":
        if not args.game:
            raise CliError("exporting a strategy needs --game")
        obj, game = formats.parse_strategy(text), _game(args.game)
    else:
        raise CliError(f"cannot tell what {args.file} contains")
    _write(args.output, emit_dot(obj, game))
    return 0


def cmd_generate(args, out):
    rng = seeded(args.seed)
    g = random_game(rng, max_modules=args.modules, max_vertices=args.vertices)
    b = random_buchi(rng, ap=g.ap, max_states=args.states)
    if args.output:
        _write(args.output + ".rgg", formats.print_rgg(g))
        _write(args.output + ".aut", formats.print_automaton(b))
    else:
        out.write(formats.print_rgg(g) + "\n" + formats.print_automaton(b))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modgames", description="Modular strategies for recursive game graphs.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, spec=True):
        p.add_argument("game")
        if spec:
            p.add_argument("spec")

    p = sub.add_parser("validate", help="check a game file")
    p.add_argument("game")
    p.set_defaults(func=cmd_validate)

    for name, func, helptext in (("solve", cmd_solve, "solve against a deterministic word automaton"),
                                 ("solve-vpa", cmd_solve_vpa, "solve against a deterministic or universal VPA")):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.add_argument("-o", "--output", help="write the strategy here")
        p.add_argument("--stats", action="store_true")
        p.add_argument("--max-assumptions", type=int)
        p.add_argument("--no-prune", action="store_true", help="enumerate every assumption triple")
        p.add_argument("--jobs", type=int, default=1, help="accepted for symmetry; the solver is sequential")
        p.set_defaults(func=func)

    p = sub.add_parser("reduce", help="turn a VPA winning condition into a finite-state one")
    common(p)
    p.add_argument("-o", "--output", help="prefix for the .rgg and .aut outputs")
    p.add_argument("--stats", action="store_true")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("compile-ltl", help="compile a PATH-LTL conjunction")
    p.add_argument("formula")
    p.add_argument("--ap", help="comma-separated propositions of the alphabet")
    p.add_argument("-o", "--output")
    p.add_argument("--stats", action="store_true")
    p.set_defaults(func=cmd_compile_ltl)

    p = sub.add_parser("verify", help="check a strategy file")
    common(p)
    p.add_argument("strategy")
    p.add_argument("--depth-bound", type=int, default=4)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("brute", help="brute-force search over bounded-memory strategies")
    common(p)
    p.add_argument("--memory-bound", type=int, default=2)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_brute)

    p = sub.add_parser("export-dot", help="Graphviz export of a game, automaton or strategy")
    p.add_argument("file")
    p.add_argument("--game", help="game file, needed for strategies")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("generate", help="random small instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--modules", type=int, default=2)
    p.add_argument("--vertices", type=int, default=4)
    p.add_argument("--states", type=int, default=2)
    p.add_argument("-o", "--output", help="prefix for the .rgg and .aut outputs")
    p.set_defaults(func=cmd_generate)
    return ap


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        return args.func(args, out)
    except formats.FormatError as e:
        sys.stderr.write(f"error: {e}\n")
    except PathLtlSyntaxError as e:
        sys.stderr.write(f"error: {e}\n")
    except (CliError, SolverError, ReductionError) as e:
        sys.stderr.write(f"error: {e}\n")
    return 2


if __name__ == "__main__":
    sys.exit(main())
