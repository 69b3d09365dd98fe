"""The small-group container and isomorphism search."""

import pytest

from finsite.groups import (
    find_group_isomorphism,
    finite_group,
    group_law_violations,
)


def cyclic(n):
    return finite_group(range(n), lambda a, b: (a + b) % n)


def klein():
    elements = [(0, 0), (1, 0), (0, 1), (1, 1)]
    return finite_group(
        elements, lambda a, b: ((a[0] + b[0]) % 2, (a[1] + b[1]) % 2)
    )


def test_builder_finds_unit_and_inverses():
    g = cyclic(6)
    assert g.unit == 0
    assert g.invert(2) == 4
    assert group_law_violations(g) == []


def test_builder_rejects_non_groups():
    with pytest.raises(ValueError):
        finite_group([0, 1], lambda a, b: min(a + b, 1))  # no inverses
    with pytest.raises(ValueError):
        finite_group([0, 1], lambda a, b: a + b)  # not closed


def test_isomorphism_found_between_equal_groups():
    assert find_group_isomorphism(cyclic(4), cyclic(4)) is not None
    assert find_group_isomorphism(klein(), klein()) is not None


def test_isomorphism_rejects_z4_vs_klein():
    assert find_group_isomorphism(cyclic(4), klein()) is None
    assert find_group_isomorphism(cyclic(3), cyclic(4)) is None


def test_abelian_flag():
    assert cyclic(5).is_abelian()
