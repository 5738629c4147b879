from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from real_pinwheel.pinwheel.regions import (
    CASE_REGIONS,
    J,
    M1,
    M7,
    Point,
    Relation,
    constraint,
    contains,
    cover_check,
    fm_feasible,
    frequency_point,
    inclusion_strips,
    point_constraints,
    region_vertices,
)


def F(p, q=1):
    return Fraction(p, q)


def test_region_shapes():
    assert len(J.constraints) == 3
    assert all(len(r.constraints) == 4 for r in CASE_REGIONS)
    assert [r.name for r in CASE_REGIONS] == ["M1", "M2", "M3", "M4", "M5", "M6", "M7"]


@pytest.mark.parametrize(
    "region,point,expected",
    [
        (J, Point(F(1, 2), F(3, 10)), True),
        (J, Point(F(1, 3), F(1, 3)), False),
        (M7, Point(F(5, 12), F(5, 12)), False),
        (M1, frequency_point(2, 4), True),
        (J, frequency_point(F(100, 63), F(100, 19)), True),
        (M1, frequency_point(F(100, 63), F(100, 19)), False),
    ],
)
def test_contains(region, point, expected):
    assert contains(region, point) is expected
    assert region.contains(point) is expected


def test_negation_flips_strictness():
    c = constraint(1, 1, "<", F(5, 6))
    assert c.negated().relation is Relation.GE
    assert constraint(0, 1, "<=", 1).negated().relation is Relation.GT
    assert str(c) == "1 1 < 5/6"


@pytest.mark.parametrize(
    "rows",
    [
        [constraint(1, 0, ">", 0), constraint(1, 0, "<", 0)],
        [constraint(1, -1, "<", 0), constraint(1, -1, ">", 0)],
        [constraint(1, 1, "<", 1), constraint(1, 0, ">=", F(1, 2)), constraint(0, 1, ">=", F(1, 2))],
    ],
)
def test_fm_infeasible(rows):
    assert not fm_feasible(rows).feasible


def test_fm_feasible_returns_witness():
    rows = [constraint(1, 0, ">=", F(1, 3)), constraint(0, 1, ">=", F(1, 3)), constraint(1, 1, "<", F(5, 6))]
    result = fm_feasible(rows)
    assert result.feasible
    assert all(r.holds(result.witness) for r in rows)


def test_fm_single_point_when_bounds_meet():
    rows = point_constraints(Point(F(1, 3), F(1, 4)))
    assert fm_feasible(rows).witness == Point(F(1, 3), F(1, 4))


def test_j_is_covered():
    result = cover_check(J, CASE_REGIONS)
    assert result.covered
    assert result.branches > 1


def test_threaded_cover_check_matches():
    assert cover_check(J, CASE_REGIONS, workers=4) == cover_check(J, CASE_REGIONS)
    dropped = CASE_REGIONS[:3] + CASE_REGIONS[4:]
    assert cover_check(J, dropped, workers=4) == cover_check(J, dropped)


@pytest.mark.parametrize("index", range(7))
def test_dropping_any_region_leaves_a_witness(index):
    rest = CASE_REGIONS[:index] + CASE_REGIONS[index + 1:]
    result = cover_check(J, rest)
    assert not result.covered
    w = result.witness
    assert contains(J, w)
    assert contains(CASE_REGIONS[index], w)
    assert not any(contains(r, w) for r in rest)


def test_without_m7_witness_is_left_of_five_twelfths():
    w = cover_check(J, CASE_REGIONS[:6]).witness
    assert w.x <= F(5, 12)


def test_without_m1_witness_is_below_unit_line():
    w = cover_check(J, CASE_REGIONS[1:]).witness
    assert w.x + 2 * w.y <= 1


@pytest.mark.parametrize("strip,covers", inclusion_strips())
def test_each_strip_is_covered_by_its_regions(strip, covers):
    assert cover_check(strip, covers).covered


def test_j_vertices_counter_clockwise():
    vertices = region_vertices(J)
    assert set(vertices) == {Point(F(5, 18), F(5, 18)), Point(F(5, 12), F(5, 12)), Point(F(5, 6), F(0))}
    area2 = sum(
        p.x * q.y - q.x * p.y for p, q in zip(vertices, vertices[1:] + vertices[:1])
    )
    assert area2 > 0


@pytest.mark.parametrize("region", CASE_REGIONS)
def test_case_region_vertices_are_counter_clockwise(region):
    vertices = region_vertices(region)
    assert len(vertices) >= 3
    area2 = sum(p.x * q.y - q.x * p.y for p, q in zip(vertices, vertices[1:] + vertices[:1]))
    assert area2 > 0


fractions = st.builds(Fraction, st.integers(min_value=0, max_value=60), st.integers(min_value=1, max_value=60))


@settings(max_examples=300, deadline=None)
@given(fractions, fractions, st.sampled_from((J,) + CASE_REGIONS))
def test_contains_agrees_with_feasibility(x, y, region):
    p = Point(x, y)
    pinned = list(region.constraints) + point_constraints(p)
    assert contains(region, p) == fm_feasible(pinned).feasible
