"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they are
produced; they are also repeated in the terminal summary.  Executed as a
script the module prints the lines and exits non-zero on any failure.
"""
import math
import sys
import time

import pytest

from modgames import library
from modgames.generate import (random_buchi, random_det_vpa, random_game, random_lasso, random_nbt,
                               random_strategy, random_tree, random_ubt, seeded)
from modgames.oracle import brute_solve, check_strategy, check_strategy_bounded, enumerate_strategies
from modgames.pathltl import compile_spec, eval_pathltl, parse_pathltl
from modgames.reduction import reduce_det_vpa, size_bound
from modgames.results import BOUND_EXCEEDED, Lose, LoseUpTo, Win
from modgames.rgg import play
from modgames.solver import (DecodeError, build_strategy_tree_aut, decode_strategy, encode_strategy,
                             omega_labels, solve)
from modgames.trees import all_trees, nbt_emptiness, nbt_membership, ubt_membership, ubt_to_nbt
from modgames.words import accepts_lasso

RESULTS = {}

# generated families; fixed seeds keep the suite reproducible
FAMILY_SEED = 2024
FAMILY_SIZE = 500
REDUCTION_INSTANCES = 250

# size_bound(q, g) <= 12 q g whenever 1 <= g <= 2; the construction itself
# grows with g^2, so this constant only covers the two-symbol family
LINEAR_C = 12


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    RESULTS[n] = line
    print(line)
    return ok


def family(seed=FAMILY_SEED, size=FAMILY_SIZE):
    rng = seeded(seed)
    for _ in range(size):
        g = random_game(rng, max_modules=2, max_vertices=4)
        yield g, random_buchi(rng, ap=g.ap, max_states=2)


# ------------------------------------------------------------ 1 and 2


def criterion_1():
    g = library.sample_game()
    b = library.infinitely_often("p_c", library.SAMPLE_AP)
    t0 = time.perf_counter()
    res = solve(g, b)
    certified = isinstance(res, Win) and check_strategy(g, b, res.strategy)
    brute = brute_solve(g, b, 2)
    dt = time.perf_counter() - t0
    ok = certified and isinstance(brute, Win) and dt < 5
    return report(1, ok, f"solve={res}, certified={certified}, brute(2)={brute}, {dt:.2f}s (< 5s)")


def criterion_2():
    g = library.sample_game()
    b = library.matching_spec()
    t0 = time.perf_counter()
    res = solve(g, b)
    brute = brute_solve(g, b, 3)
    dt = time.perf_counter() - t0
    ok = isinstance(res, Lose) and isinstance(brute, LoseUpTo) and brute.bound == 3 and dt < 30
    return report(2, ok, f"solve={res}, brute(3)={type(brute).__name__}({brute.bound}) "
                         f"over {brute.checked} strategies, {dt:.2f}s (< 30s)")


# ------------------------------------------------------------ 3


def criterion_3():
    t0 = time.perf_counter()
    n = wins = bad = uncertified = 0
    for g, b in family():
        n += 1
        res = solve(g, b)
        ref = brute_solve(g, b, 3)
        if res.winning != ref.winning:
            bad += 1
        if isinstance(res, Win):
            wins += 1
            if not check_strategy(g, b, res.strategy):
                uncertified += 1
    dt = time.perf_counter() - t0
    ok = n >= 200 and bad == 0 and uncertified == 0 and dt < 600
    return report(3, ok, f"{n} instances, {wins} wins, {bad} discrepancies, "
                         f"{uncertified} uncertified wins, {dt:.1f}s (< 600s)")


# ------------------------------------------------------------ 4


def criterion_4():
    rng = seeded(FAMILY_SEED + 4)
    mismatches = exact = skipped = 0
    exits_ok = True
    size_ok = linear_ok = True
    worst_ratio = 0.0
    for _ in range(REDUCTION_INSTANCES):
        g = random_game(rng, ap=("p",))
        p = random_det_vpa(rng, ap=("p",), max_states=4, max_stack=2,
                           acceptance=rng.choice(["buchi", "cobuchi"]))
        red = reduce_det_vpa(g, p)
        exits_ok &= red.game.num_exits() == 2 * g.num_exits()
        q, gamma, a = len(p.states), len(p.stack), len(red.spec.states)
        size_ok &= a <= size_bound(q, gamma)
        linear_ok &= a <= LINEAR_C * q * gamma
        worst_ratio = max(worst_ratio, a / (q * gamma))
        for f in enumerate_strategies(g, 1):
            want = check_strategy_bounded(g, p, f, depth=4)
            if want is BOUND_EXCEEDED:
                skipped += 1
                continue
            exact += 1
            if check_strategy(red.game, red.spec, red.bijection.lift(f)) != want:
                mismatches += 1
    ok = mismatches == 0 and exact > 0 and exits_ok and size_ok and linear_ok
    return report(4, ok, f"{REDUCTION_INSTANCES} games, {exact} exact strategy checks "
                         f"({skipped} beyond depth 4), {mismatches} mismatches; |Ex(G')| = 2k: {exits_ok}; "
                         f"|A| <= size_bound: {size_ok}; |A| <= {LINEAR_C}|Q|g: {linear_ok} "
                         f"(max |A|/(|Q|g) = {worst_ratio:.1f})")


# ------------------------------------------------------------ 5 and 6


def criterion_5():
    rng = seeded(FAMILY_SEED + 5)
    mismatches = 0
    over = 0
    for _ in range(200):
        u = random_ubt(rng, max_states=3)
        bp = ubt_to_nbt(u)
        if len(bp.reachable_states()) > 3 ** len(u.states):
            over += 1
        t = random_tree(rng, u.alphabet, u.k, max_nodes=3)
        if ubt_membership(u, t) != nbt_membership(bp, t):
            mismatches += 1
    return report(5, mismatches == 0 and over == 0,
                  f"200 pairs, {mismatches} mismatches, {over} automata above 3^|Q| states")


def criterion_6():
    rng = seeded(FAMILY_SEED + 6)
    trees = list(all_trees(("a", "b"), 2, 3))
    bad_witness = bad_empty = empties = 0
    for _ in range(100):
        a = random_nbt(rng, max_states=3)
        res = nbt_emptiness(a, certify=False)
        if res.empty:
            empties += 1
            if any(nbt_membership(a, t) for t in trees):
                bad_empty += 1
        elif not nbt_membership(a, res.witness):
            bad_witness += 1
    ok = bad_witness == 0 and bad_empty == 0
    return report(6, ok, f"100 automata, {100 - empties} witnesses ({bad_witness} rejected), "
                         f"{empties} empty verdicts ({bad_empty} refuted by {len(trees)} trees of <= 3 nodes)")


# ------------------------------------------------------------ 7

PATH_SUITE = [
    "F p",
    "F(p & F q)",
    "!F(q & F p)",
    "F((p | r) & F(!q & F r))",
    "!F(p & F(q & F(r & F p)))",
]


def criterion_7():
    rng = seeded(FAMILY_SEED + 7)
    ap = ["p", "q", "r"]
    worst = []
    mismatches = 0
    sizes_ok = True
    for text in PATH_SUITE:
        (clause,) = parse_pathltl(text).clauses
        n = len(clause[0].preds)
        b = compile_spec(text, ap=ap)
        sizes_ok &= len(b.states) <= n + 2
        worst.append(f"{len(b.states)}/{n + 2}")
        for _ in range(500):
            stem, cycle = random_lasso(rng, ap)
            if accepts_lasso(b, stem, cycle) != eval_pathltl(text, stem, cycle):
                mismatches += 1
    return report(7, mismatches == 0 and sizes_ok,
                  f"{len(PATH_SUITE)} formulas x 500 lassos, {mismatches} mismatches; "
                  f"states/(n+2): {' '.join(worst)}")


# ------------------------------------------------------------ 8


def _same_behaviour(g, f1, f2, rng, runs=8, steps=60):
    for _ in range(runs):
        opp = [rng.randrange(4) for _ in range(steps)]
        a = play(g, f1, iter(opp), steps)
        b = play(g, f2, iter(opp), steps)
        if [(s.module, s.vertex) for s in a] != [(s.module, s.vertex) for s in b]:
            return False
    return True


def _corrupt(rng, g, t, labels):
    """Change one node's label to something that is not an alternative choice."""
    n = rng.choice(sorted(t.labels, key=repr))
    old = t.labels[n]

    def alternative(lab):
        return (isinstance(lab, tuple) and isinstance(old, tuple) and lab[0] == old[0] == "a"
                and lab[1:3] == old[1:3])

    choices = [l for l in labels if l != old and not alternative(l)]
    new = dict(t.labels)
    new[n] = rng.choice(choices)
    return type(t)(t.root, new, t.children)


def criterion_8():
    rng = seeded(FAMILY_SEED + 8)
    roundtrip_bad = 0
    accepted = decoded = 0
    for i in range(100):
        g = random_game(rng, max_modules=2, max_vertices=4)
        f = random_strategy(rng, g, max_memory=2)
        t = encode_strategy(g, f)
        aut = build_strategy_tree_aut(g)
        back = decode_strategy(g, t)
        b = random_buchi(rng, ap=g.ap)
        if not (nbt_membership(aut, t) and _same_behaviour(g, f, back, rng)
                and check_strategy(g, b, f) == check_strategy(g, b, back)):
            roundtrip_bad += 1
        bad = _corrupt(rng, g, t, omega_labels(g))
        if nbt_membership(aut, bad):
            accepted += 1
        try:
            decode_strategy(g, bad)
            decoded += 1
        except DecodeError:
            pass
    ok = roundtrip_bad == 0 and accepted == 0
    return report(8, ok, f"100 roundtrips ({roundtrip_bad} failures), 100 corruptions "
                         f"({accepted} accepted by the tree automaton, {decoded} decodable)")


# ------------------------------------------------------------ 9


def criterion_9():
    n = over = 0
    worst = -math.inf
    for g, b in family(FAMILY_SEED + 9, 200):
        st = solve(g, b).stats
        n += 1
        margin = math.log2(max(st.final_nbt_states, 1)) - st.log2_bound
        worst = max(worst, margin)
        if not st.within_envelope():
            over += 1
    regression = over > 0
    return report(9, not regression, f"{n} instances, {over} above the envelope "
                                     f"(closest: 2^{worst:.1f} of the bound)"
                                     + ("; REGRESSION" if regression else ""))


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 10)])
def test_acceptance(criterion):
    assert criterion(), RESULTS[int(criterion.__name__.split("_")[1])]


if __name__ == "__main__":
    failed = [c.__name__ for c in CRITERIA if not c()]
    sys.exit(1 if failed else 0)
