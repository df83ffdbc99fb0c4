import pytest

from modgames.generate import random_nbt, random_tree, random_ubt, seeded
from modgames.trees import (ExplicitNbt, RegularTree, TreeError, Ubt, all_trees, empty_language,
                            nbt_emptiness, nbt_membership, nbt_product, ubt_membership, ubt_to_nbt,
                            universal_language)

AB = ("a", "b")


def const_tree(label, k=2):
    return RegularTree(0, {0: label}, {0: (0,) * k})


def test_tree_check():
    t = RegularTree(0, {0: "a", 1: "b"}, {0: (1, 1), 1: (0,)})
    with pytest.raises(TreeError):
        t.check(2)
    assert const_tree("a").path([0, 1, 1]) == 0


def test_all_trees_counts():
    # one node: 2 labels; two nodes reachable from the root
    assert sum(1 for _ in all_trees(AB, 1, 1)) == 2
    assert all(len(t.reachable()) == len(t.labels) for t in all_trees(AB, 2, 2))


def test_constant_languages():
    t = const_tree("a")
    assert nbt_membership(universal_language(AB, 2), t)
    assert not nbt_membership(empty_language(2), t)
    assert nbt_emptiness(empty_language(2)).empty


def test_parity_of_a_labels():
    # accepts trees where every path sees "a" infinitely often
    u = Ubt((0, 1), frozenset({0}), AB, 2,
            {(q, l): frozenset((d, 1 if l == "a" else 0) for d in range(2)) for q in (0, 1) for l in AB},
            frozenset({1}))
    alt = RegularTree(0, {0: "a", 1: "b"}, {0: (1, 1), 1: (0, 0)})
    stuck = RegularTree(0, {0: "a", 1: "b"}, {0: (1, 1), 1: (1, 0)})
    assert ubt_membership(u, alt)
    assert not ubt_membership(u, stuck)
    bp = ubt_to_nbt(u)
    assert nbt_membership(bp, alt) and not nbt_membership(bp, stuck)


def test_breakpoint_agrees_with_universal_semantics():
    rng = seeded(7)
    for _ in range(150):
        u = random_ubt(rng)
        bp = ubt_to_nbt(u)
        assert len(bp.reachable_states()) <= 3 ** len(u.states)
        t = random_tree(rng, AB, 2)
        assert ubt_membership(u, t) == nbt_membership(bp, t)


def test_witnesses_are_members():
    rng = seeded(8)
    for _ in range(100):
        a = random_nbt(rng)
        res = nbt_emptiness(a, certify=False)
        if not res.empty:
            assert nbt_membership(a, res.witness)


def test_product_is_intersection():
    rng = seeded(10)
    for _ in range(80):
        a, b = random_nbt(rng), random_nbt(rng)
        p = nbt_product(a, b)
        t = random_tree(rng, AB, 2)
        assert nbt_membership(p, t) == (nbt_membership(a, t) and nbt_membership(b, t))


def test_arity_mismatch():
    with pytest.raises(TreeError):
        ExplicitNbt(("x",), "x", 2, {"x": [("a", ("x",))]}, frozenset())
