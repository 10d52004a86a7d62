from itertools import permutations
from math import factorial, prod

import pytest
from hypothesis import given, strategies as st

from conftest import contents
from pushtasep.states import (
    ColorMap,
    Content,
    EnumerationCapError,
    check_beta,
    check_config,
    enumerate_configurations,
    format_config,
    parse_config,
    parse_scalar,
    recolor,
    single_species_projection,
)


def as_words(configs):
    return ["".join(map(str, c)) for c in configs]


def test_enumeration_examples():
    assert as_words(enumerate_configurations(Content((1, 1, 1)))) == ["012", "021", "102", "120", "201", "210"]
    assert as_words(enumerate_configurations(Content((2, 2)))) == ["0011", "0101", "0110", "1001", "1010", "1100"]
    assert enumerate_configurations(Content((1, 0))) == [(0,)]


def test_content_accessors():
    c = Content((2, 2, 2, 1, 1))
    assert c.L == 8 and c.s == 4
    assert [c.N(r) for r in range(1, 6)] == [6, 4, 2, 1, 0]
    assert c.row_counts() == (6, 4, 2, 1)
    assert c.word() == (0, 0, 1, 1, 2, 2, 3, 4)
    assert Content((1, 2, 0, 0)).counts == (1, 2)
    assert Content.from_config((2, 0, 1, 4, 2, 0, 3, 1)) == c


@pytest.mark.parametrize("counts", [(0, 2), (1, -1), (3,), ()])
def test_content_rejects(counts):
    with pytest.raises(ValueError):
        Content(counts)


def test_enumeration_cap():
    with pytest.raises(EnumerationCapError) as err:
        enumerate_configurations(Content((1, 1, 1, 1)), cap=10)
    assert "24" in str(err.value)


@given(contents(max_L=8, max_s=4))
def test_enumeration_count_and_order(content):
    configs = enumerate_configurations(content)
    assert len(configs) == factorial(content.L) // prod(factorial(k) for k in content.counts)
    assert configs == sorted(set(configs))
    assert all(Content.from_config(c) == content for c in configs)


def test_enumeration_matches_itertools():
    c = Content((2, 1, 2))
    assert enumerate_configurations(c) == sorted(set(permutations(c.word())))


def test_recolor_examples():
    phi = ColorMap((0, 1, 1, 1, 2))
    assert recolor(phi, (2, 0, 1, 4, 2, 0, 3, 1)) == (1, 0, 1, 2, 1, 0, 1, 1)
    assert recolor(ColorMap.identity(2), (2, 0, 1)) == (2, 0, 1)
    assert recolor(ColorMap((0, 0, 0)), (2, 0, 1)) == (0, 0, 0)
    assert phi.image(Content((2, 2, 2, 1, 1))) == Content((2, 5, 1))


def test_color_map_validation():
    with pytest.raises(ValueError):
        ColorMap((1, 1))
    with pytest.raises(ValueError):
        ColorMap((0, 2, 1))


def test_threshold_projection_examples():
    assert single_species_projection(1, (2, 0, 1)) == (1, 0, 1)
    assert single_species_projection(2, (2, 0, 1)) == (1, 0, 0)
    assert single_species_projection(4, (2, 0, 1, 4, 2, 0, 3, 1)) == (0, 0, 0, 1, 0, 0, 0, 0)


monotone_maps = st.integers(1, 4).flatmap(
    lambda s: st.lists(st.integers(0, 3), min_size=s, max_size=s).map(
        lambda steps: ColorMap((0, *[sum(steps[: i + 1]) for i in range(len(steps))]))
    )
)


@given(st.data())
def test_recolor_composition(data):
    inner = data.draw(monotone_maps)
    s_inner = len(inner.values) - 1
    top = max(inner.values)
    outer_steps = data.draw(st.lists(st.integers(0, 2), min_size=top, max_size=top))
    outer = ColorMap((0, *[sum(outer_steps[: i + 1]) for i in range(top)]))
    config = data.draw(st.lists(st.integers(0, s_inner), min_size=1, max_size=8))
    assert recolor(outer.compose(inner), config) == recolor(outer, recolor(inner, config))


@given(contents(max_L=7, max_s=4), st.data())
def test_threshold_projection_counts(content, data):
    config = data.draw(st.permutations(content.word()))
    r = data.draw(st.integers(1, content.s))
    assert sum(single_species_projection(r, config)) == content.N(r)


def test_text_forms():
    assert format_config((2, 1, 0)) == "210"
    assert format_config((10, 0, 3)) == "10,0,3"
    assert parse_config("210") == (2, 1, 0)
    assert parse_config("10,0,3") == (10, 0, 3)


def test_scalars_and_rates():
    assert parse_scalar("3/4").denominator == 4
    assert isinstance(parse_scalar(0.5), float)
    with pytest.raises(ValueError):
        check_beta([1, 0])
    with pytest.raises(ValueError):
        check_beta([1, float("inf")])
    with pytest.raises(ValueError):
        check_beta([1, 2], L=3)
    with pytest.raises(ValueError):
        check_config(Content((1, 1)), (1, 1))
