import itertools
from dataclasses import replace

from modgames import library
from modgames.rgg import (call, errors, initial_state, local_memory, memoryless, node, play, ret,
                          step, tagged_word, validate)


def test_sample_validates_cleanly(sample):
    assert validate(sample) == []
    assert sample.main == "Min"
    assert sample.size() == 9
    assert sample.num_exits() == 1


def test_successor_order_follows_callee_exits(sample):
    assert sample.successors("Min", call("b")) == (ret("b", "ex1"),)
    assert sample.successors("Min", ret("b", "ex1")) == (node("u1"), node("u2"))


def test_owner_of_calls_and_exits(sample):
    assert sample.owner("Min", call("b")) is None
    assert sample.owner("M1", node("ex1")) is None
    assert sample.owner("M1", node("e1")) == 1
    assert sample.is_p0("Min", ret("b", "ex1"))


def test_dangling_box_target(sample):
    mod = sample.module("Min")
    broken = replace(sample, modules={**sample.modules, "Min": replace(mod, boxes={"b": "Nope"})})
    rules = {v.rule for v in errors(broken)}
    assert "unknown-module" in rules


def test_transition_into_entry_is_rejected(sample):
    mod = sample.module("M1")
    edges = dict(mod.edges)
    edges[node("u3")] = (node("e1"),)
    g = replace(sample, modules={**sample.modules, "M1": replace(mod, edges=edges)})
    assert any(v.rule == "transition-to-entry" for v in errors(g))


def test_dead_end_is_only_a_warning(sample):
    mod = sample.module("M1")
    edges = {k: v for k, v in mod.edges.items() if k != node("u4")}
    g = replace(sample, modules={**sample.modules, "M1": replace(mod, edges=edges)})
    issues = validate(g)
    assert [v.rule for v in issues] == ["dead-end"]
    assert errors(g) == []


def test_local_memory_collapses_calls(sample):
    f = library.always_c()
    prefix = play(sample, f, [0] * 20, 12)
    last = max(i for i, s in enumerate(prefix) if s.module == "Min")
    prefix = prefix[: last + 1]
    mem = local_memory(sample, prefix)
    assert mem[0] == node("e_in")
    assert all(v in sample.vertices("Min") for v in mem)
    assert len(mem) < len(prefix)
    assert prefix[-1].vertex == mem[-1]


def test_tagged_word_tags():
    g = library.sample_game()
    s = initial_state(g)
    prefix = [s]
    for _ in range(3):
        s = step(g, s, 0)
        prefix.append(s)
    tags = [t for _, t in tagged_word(g, prefix)]
    assert tags == ["int", "call", "int", "int"]


def test_play_respects_memoryless_choice(sample):
    f = memoryless({"Min": {ret("b", "ex1"): 1}})
    prefix = play(sample, f, itertools.cycle([1, 0]), 30)
    after_ret = [prefix[i + 1].vertex for i, s in enumerate(prefix[:-1])
                 if s.vertex == ret("b", "ex1") and s.module == "Min"]
    assert after_ret and set(after_ret) == {node("u2")}
