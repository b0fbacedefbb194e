import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transversal.distances import (check_distance_inequalities, d1_points, d1_sets, d2_points, d2_sets,
                                   d2_via_whole_space, d3_points, d3_sets, localized_distance)
from transversal.errors import PreconditionFailed
from transversal.norms import EUCLIDEAN, MAXIMUM, SUM
from transversal.oracles import chebyshev_radius_oracle, inequality_replay
from transversal.sets import Ball, HPolyhedron, box, line, singleton, whole_space


def interval(lo, hi):
    return HPolyhedron([[1.0], [-1.0]], [hi, -lo])


def test_three_points_on_the_line():
    assert d1_points([0, 5, 1]) == pytest.approx(4.0, abs=1e-9)
    assert d1_points([0, 1, 5]) == pytest.approx(5.0, abs=1e-9)
    assert d1_points([1, 5, 0]) == pytest.approx(5.0, abs=1e-9)
    r = d2_points([0, 1, 5])
    assert r.value == pytest.approx(2.5, abs=1e-9)
    assert np.allclose(r.points[-1], [2.5])
    assert d3_points([0, 1, 5]) == pytest.approx(3.0, abs=1e-9)


def test_coincident_points():
    a = [[1.0, 2.0]] * 3
    assert d1_points(a) == 0.0 and d3_points(a) == 0.0
    assert d2_points(a[:2]).value == pytest.approx(0.0)


def test_symmetric_pair():
    v = np.array([0.6, -0.8])
    assert d3_points([v, -v]) == pytest.approx(1.0)


def test_needs_two_points():
    with pytest.raises(PreconditionFailed):
        d1_points([[1.0, 2.0]])


@pytest.mark.parametrize("n", [EUCLIDEAN, MAXIMUM, SUM])
def test_d2_of_pair_is_half_distance(n):
    rng = np.random.default_rng(3)
    for _ in range(20):
        p = rng.standard_normal((2, 3))
        assert 2 * d2_points(p, n).value == pytest.approx(d1_points(p, n), abs=1e-8)


@pytest.mark.parametrize("n", [EUCLIDEAN, MAXIMUM])
@pytest.mark.parametrize("seed", range(10))
def test_d2_against_chebyshev_oracle(n, seed):
    P = np.random.default_rng(seed).standard_normal((6, 2))
    lo, hi = chebyshev_radius_oracle(P, n)
    r = d2_points(P, n)
    assert lo - 1e-7 <= r.value <= hi + 1e-7


def test_set_examples():
    assert d1_sets([interval(0, 1), interval(3, 4)]).value == pytest.approx(2.0)
    assert d1_sets([line([0, 0], [1, 0]), line([0, 0], [0, 1])]).value == pytest.approx(0.0, abs=1e-9)
    pts = [singleton([0.0]), singleton([1.0]), singleton([5.0])]
    assert d1_sets(pts).value == pytest.approx(5.0)
    assert d2_sets([interval(0, 1), interval(3, 4)]).value == pytest.approx(1.0)
    assert d2_sets(pts).value == pytest.approx(2.5)
    A = box([0, 0], [1, 1])
    assert d2_sets([A, A]).value == pytest.approx(0.0, abs=1e-9)
    assert d3_sets(pts).value == pytest.approx(3.0)


def test_localized_distance():
    sets = [interval(0, 1), interval(3, 4)]
    # the far anchor forces both points to their right ends: max(10 - 1, 10 - 4) = 9
    assert localized_distance(sets, singleton([10.0])).value == pytest.approx(9.0)
    assert localized_distance(sets, whole_space(1)).value == pytest.approx(d2_sets(sets).value)
    lines = [line([0, 0], [1, 0]), line([0, 0], [0, 1])]
    assert localized_distance(lines, Ball([0, 0], 0.1)).value == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("seed", range(8))
def test_d2_equals_d1_with_whole_space(seed):
    rng = np.random.default_rng(seed)
    lows = rng.standard_normal((3, 2)) * 2
    sets = [box(lo, lo + 0.1 + rng.random(2)) for lo in lows]
    assert d2_via_whole_space(sets).value == pytest.approx(d2_sets(sets).value, abs=1e-7)


def test_inequality_report_on_three_points():
    rep = check_distance_inequalities(np.array([0.0, 1.0, 5.0]))
    assert rep.all_hold
    assert [c.name for c in rep.checks] == ["d2<=d1", "d1<=2d2", "d2<=d3", "d3<=2d2"]


@settings(max_examples=80, deadline=None)
@given(st.lists(st.lists(st.floats(-10, 10), min_size=2, max_size=2), min_size=2, max_size=6),
       st.sampled_from([EUCLIDEAN, MAXIMUM, SUM]))
def test_chains_hold_for_point_tuples(pts, n):
    P = np.array(pts)
    rep = check_distance_inequalities(P, n)
    assert rep.all_hold, rep.violations()
    assert inequality_replay("distance-chain", {"points": P, "norm": n.to_dict()}).all_hold


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=2, max_size=2), st.lists(st.floats(-10, 10), min_size=2,
                                                                      max_size=2))
def test_pair_equalities(a, b):
    rep = check_distance_inequalities(np.array([a, b]))
    names = {c.name: c.holds for c in rep.checks}
    assert names["d1=2d2"] and names["d2=d3"]


@pytest.mark.parametrize("seed", range(6))
def test_chains_hold_for_set_tuples(seed):
    rng = np.random.default_rng(seed)
    sets = [Ball(rng.standard_normal(2) * 3, 0.2 + rng.random()), box([0, 0], [1, 1]),
            line(rng.standard_normal(2), rng.standard_normal(2))]
    assert check_distance_inequalities(sets).all_hold
