import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankone import trees

MODULAR = trees.AmalgamSpec.parse("4,2,6")
FREE2 = trees.AmalgamSpec.parse("free:2")


def _free_reduced_length(word):
    """Length of the freely reduced form of a word given as (letter, exponent) pairs."""
    stack = []
    for letter, exp in word:
        step = 1 if exp > 0 else -1
        for _ in range(abs(exp)):
            if stack and stack[-1] == (letter, -step):
                stack.pop()
            else:
                stack.append((letter, step))
    return len(stack)


def test_parse_word():
    assert trees.parse_word("a b^-1 A") == [("a", 1), ("b", -1), ("a", -1)]
    assert trees.parse_word("1") == []
    with pytest.raises(ValueError):
        trees.parse_word("a$b")


def test_spec_validation():
    with pytest.raises(ValueError):
        trees.AmalgamSpec.parse("4,3,6")
    with pytest.raises(ValueError):
        trees.AmalgamSpec.parse("free:0")
    assert str(MODULAR) == "4,2,6"


def test_identity_distance():
    assert trees.tree_distance(MODULAR, "1") == 0
    assert trees.tree_distance(FREE2, "") == 0


def test_factor_generator_is_elliptic():
    assert trees.tree_distance(MODULAR, "a") == 0
    assert trees.tree_distance(MODULAR, "a^3") == 0


def test_modular_alternating_words():
    # the base point is the vertex fixed by a, so b moves it across the base edge and back out
    assert trees.tree_distance(MODULAR, "b") == 2
    assert trees.tree_distance(MODULAR, "b a") == 2
    for k in range(1, 6):
        assert trees.tree_distance(MODULAR, "a b " * k) == 2 * k


def test_central_element_acts_trivially():
    # a^2 = b^3 generates the shared subgroup, which fixes the base edge
    assert MODULAR.element("a^2") == MODULAR.element("b^3")
    assert trees.tree_distance(MODULAR, "a^2 b a") == trees.tree_distance(MODULAR, "b a")


def test_free_distance_is_word_length():
    for L in range(0, 9):
        for word in itertools.islice(itertools.product("abAB", repeat=L), 40):
            text = " ".join(word)
            parsed = trees.parse_word(text)
            assert trees.tree_distance(FREE2, text) == _free_reduced_length(parsed)


def test_norm_examples():
    assert trees.wall_cocycle_norm(MODULAR, "1").norm_sq == 0
    assert trees.wall_cocycle_norm(FREE2, "a b a B a").norm_sq == 10
    val = trees.wall_cocycle_norm(FREE2, "a b")
    assert set(val.support.values()) <= {1, -1}


def test_cocycle_law_examples():
    for g, h in (("a b", "B a"), ("a^3 b", "b^2 a"), ("b", "a b a")):
        assert trees.cocycle_defect(MODULAR, g, h) == {}


@pytest.mark.parametrize("name", list(trees.BUNDLED_TREES))
def test_walls_suite_bundled(name):
    rep = trees.walls_suite(trees.AmalgamSpec.parse(trees.BUNDLED_TREES[name]), 5, 3)
    assert rep.ok


def test_probe_free_group_unbounded():
    probe = trees.fixed_point_probe(FREE2)
    assert probe.verdict == "unbounded"
    assert probe.distances == [1, 2, 3, 4]


def test_probe_modular_s_st():
    probe = trees.fixed_point_probe(MODULAR, 12, generators=["a", "a b"])
    assert probe.verdict == "unbounded"
    assert probe.distances == [2, 4, 6, 8]


def test_probe_single_factor_bounded():
    probe = trees.fixed_point_probe(MODULAR, 12, generators=["a", "a^2"])
    assert probe.verdict == "bounded_orbit"
    probe = trees.fixed_point_probe(MODULAR, 12, generators=["b"])
    assert probe.verdict == "bounded_orbit"


def test_probe_cap_validated():
    with pytest.raises(ValueError):
        trees.fixed_point_probe(FREE2, 3)


words_strategy = st.lists(st.tuples(st.sampled_from("ab"), st.integers(-5, 5)), max_size=6)


def _text(word):
    return " ".join(f"{l}^{e}" for l, e in word if e) or "1"


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([MODULAR, FREE2]), words_strategy, words_strategy)
def test_triangle_inequality(spec, w1, w2):
    g, h = _text(w1), _text(w2)
    gh = spec.mul(spec.element(g), spec.element(h))
    assert trees.tree_distance(spec, gh) <= (trees.tree_distance(spec, g)
                                            + trees.tree_distance(spec, h))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([MODULAR, FREE2]), words_strategy)
def test_norm_is_twice_distance(spec, w):
    g = _text(w)
    assert trees.wall_cocycle_norm(spec, g).norm_sq == 2 * trees.tree_distance(spec, g)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([MODULAR, FREE2]), words_strategy, words_strategy)
def test_cocycle_law(spec, w1, w2):
    assert trees.cocycle_defect(spec, _text(w1), _text(w2)) == {}


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([MODULAR, FREE2]), words_strategy)
def test_inverse_same_distance(spec, w):
    g = spec.element(_text(w))
    assert trees.tree_distance(spec, spec.inv(g)) == trees.tree_distance(spec, g)
