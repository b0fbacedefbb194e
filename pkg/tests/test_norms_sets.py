import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transversal.errors import DimensionMismatch, PreconditionFailed
from transversal.norms import EUCLIDEAN, MAXIMUM, SUM, NormSpec, dual_norm, norm, norming_vector
from transversal.sets import (AffineSubspace, Ball, FiniteUnion, HPolyhedron, PointCloud, box, halfspace,
                              line, set_from_dict, whole_space)


def test_norm_examples():
    assert norm(np.array([3.0, -4.0]), EUCLIDEAN) == 5.0
    assert norm(np.array([3.0, -4.0]), MAXIMUM) == 4.0
    assert norm(np.array([1.0, 1.0, 1.0]), NormSpec("p", 1.0)) == 3.0


def test_dual_norm_examples():
    # maximum primal norm has the sum norm as dual
    assert dual_norm(np.array([1.0, -2.0]), MAXIMUM) == 3.0
    assert dual_norm(np.array([3.0, -4.0]), EUCLIDEAN) == 5.0
    assert dual_norm(np.zeros(2), SUM) == 0.0


@pytest.mark.parametrize("n", [EUCLIDEAN, MAXIMUM, SUM, NormSpec("p", 3.0), NormSpec("p", 1.5)])
def test_dual_is_involution(n):
    assert n.dual().dual() == n


def test_dual_pairs():
    assert MAXIMUM.dual() == SUM
    assert NormSpec("p", 3.0).dual().p == pytest.approx(1.5)


def test_bad_norm_rejected():
    with pytest.raises(PreconditionFailed):
        NormSpec("p", 0.5)
    with pytest.raises(PreconditionFailed):
        NormSpec("taxicab")


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=3, max_size=3),
       st.sampled_from([EUCLIDEAN, MAXIMUM, SUM, NormSpec("p", 3.0)]))
def test_norming_vector_attains_dual_norm(z, n):
    z = np.array(z)
    x = norming_vector(z, n)
    if np.any(z):
        assert norm(x, n) == pytest.approx(1.0)
        assert z @ x == pytest.approx(dual_norm(z, n), rel=1e-9, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=2, max_size=2), st.lists(st.floats(-5, 5), min_size=2, max_size=2))
def test_holder_inequality(z, x):
    z, x = np.array(z), np.array(x)
    for n in (EUCLIDEAN, MAXIMUM, SUM):
        assert z @ x <= dual_norm(z, n) * norm(x, n) + 1e-9


def test_membership_of_variants():
    assert box([0, 0], [1, 1]).contains([1.0, 0.5])
    assert not box([0, 0], [1, 1]).contains([1.1, 0.5])
    assert Ball([0, 0], 1.0, MAXIMUM).contains([1.0, -1.0])
    assert line([0, 0], [1, 1]).contains([2.0, 2.0])
    assert PointCloud([[0, 0], [1, 2]]).contains([1.0, 2.0])
    u = FiniteUnion((line([0, 0], [1, 0]), line([0, 0], [0, 1])))
    assert u.contains([0.0, 3.0]) and not u.contains([1.0, 1.0])
    assert whole_space(3).contains([1e6, -1e6, 0.0])


def test_translate_and_dimension_checks():
    s = halfspace([1.0, 0.0], 0.0).translate([2.0, 0.0])
    assert s.contains([2.0, 5.0]) and not s.contains([2.1, 0.0])
    with pytest.raises(DimensionMismatch):
        box([0, 0], [1, 1]).contains([0.0, 0.0, 0.0])


def test_set_from_dict_round_trip():
    sets = [PointCloud([[0, 1], [2, 3]]), HPolyhedron([[1, 0], [0, 1]], [1, 2]), Ball([0, 0], 2.0, MAXIMUM),
            AffineSubspace([1, 1], [[1, 0]]), FiniteUnion((box([0, 0], [1, 1]), line([0, 0], [0, 1])))]
    probe = np.array([[0.0, 1.0], [1.0, 2.0], [5.0, 1.0], [0.5, 0.5], [0.0, 7.0]])
    for s in sets:
        t = set_from_dict(s.to_dict())
        assert [t.contains(p) for p in probe] == [s.contains(p) for p in probe]


def test_set_from_dict_errors_name_path():
    with pytest.raises(PreconditionFailed, match=r"set: missing field 'b'"):
        set_from_dict({"variant": "HPolyhedron", "A": [[1, 0]]})
    with pytest.raises(PreconditionFailed, match="unknown variant"):
        set_from_dict({"variant": "Torus"})
