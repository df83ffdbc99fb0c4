import pytest
from hypothesis import given, settings, strategies as st

from modgames import formats, library
from modgames.formats import FormatError
from modgames.generate import random_buchi, random_det_vpa, random_game, random_strategy, seeded


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_rgg_roundtrip_random(seed):
    g = random_game(seeded(seed), max_modules=3)
    assert formats.parse_rgg(formats.print_rgg(g)) == g


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_automaton_roundtrip(seed, tagged):
    rng = seeded(seed)
    b = random_buchi(rng, max_states=3, tagged=tagged)
    back = formats.parse_automaton(formats.print_automaton(b))
    assert formats.print_automaton(back) == formats.print_automaton(b)
    assert back.accepting == frozenset(f"s{q}" for q in b.accepting)


def test_vpa_roundtrip():
    p = random_det_vpa(seeded(11), ap=("p", "q"), max_states=3)
    text = formats.print_automaton(p)
    assert formats.print_automaton(formats.parse_automaton(text)) == text


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_strategy_roundtrip(seed):
    rng = seeded(seed)
    g = random_game(rng)
    f = random_strategy(rng, g)
    text = formats.print_strategy(g, f)
    assert formats.print_strategy(g, formats.parse_strategy(text)) == text


def test_sample_file(data_dir):
    g = formats.parse_rgg((data_dir / "sample.rgg").read_text())
    assert g == library.sample_game()


def test_undeclared_box_target():
    text = library.SAMPLE_GAME.replace("box b : M1", "box b : M9")
    with pytest.raises(FormatError, match="M9"):
        formats.parse_rgg(text)


def test_duplicate_node_reports_position():
    text = library.SAMPLE_GAME.replace("  node u2 player 0", "  node u1 player 0")
    with pytest.raises(FormatError) as e:
        formats.parse_rgg(text)
    assert e.value.line == 8


def test_syntax_error_has_column():
    with pytest.raises(FormatError) as e:
        formats.parse_rgg("game g\nmodule A main\n  entry a\n  node a player 7 labels { }\n")
    assert e.value.line == 4
    assert e.value.col > 1


def test_comments_and_blank_lines():
    text = "# header\n\n" + library.SAMPLE_GAME.replace("\n", "  # trailing\n", 3)
    assert formats.parse_rgg(text) == library.sample_game()
