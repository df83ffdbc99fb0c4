from modgames import library
from modgames.dot import emit_dot
from modgames.generate import random_game, random_nbt, seeded
from modgames.solver import encode_strategy


def test_stable_under_reemission(sample):
    assert emit_dot(sample) == emit_dot(library.sample_game())


def test_random_games_are_deterministic():
    for seed in range(10):
        a = emit_dot(random_game(seeded(seed)))
        b = emit_dot(random_game(seeded(seed)))
        assert a == b


def test_every_kind(sample, gf_pc):
    f = library.alternate()
    for obj in (sample, gf_pc, encode_strategy(sample, f), random_nbt(seeded(1))):
        text = emit_dot(obj)
        assert text.startswith("digraph") and text.rstrip().endswith("}")
    assert "cluster_Min" in emit_dot(f, sample)


def test_sample_shapes(sample):
    text = emit_dot(sample)
    assert text.count("peripheries=2") == 2
    assert '-> "Min:(\'ret\', \'b\', \'ex1\')" [style=dashed]' in text
