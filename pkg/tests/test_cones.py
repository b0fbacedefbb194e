import numpy as np
import pytest

from transversal.cones import ConeRep, dist_to_cone, normal_cone
from transversal.errors import PreconditionFailed, UnsupportedClass
from transversal.norms import EUCLIDEAN, MAXIMUM, SUM
from transversal.oracles import cone_distance_oracle
from transversal.sets import Ball, FiniteUnion, PointCloud, box, halfspace, line

from _instances import random_cone


def _same_cone(K, L, probes):
    return all(K.contains(p, 1e-8) == L.contains(p, 1e-8) for p in probes)


PROBES = np.array([[1, 0], [-1, 0], [0, 1], [0, -1], [1, 1], [-1, 2], [0.3, -0.7]], dtype=float)


def test_normal_cone_of_axis_is_vertical_line():
    K = normal_cone(line([0, 0], [1, 0]), [3.0, 0.0], "frechet")
    assert K.contains([0.0, 7.0]) and K.contains([0.0, -2.0])
    assert not K.contains([1.0, 0.0])


def test_normal_cone_examples():
    K = normal_cone(halfspace([1, 0], 0.0), [0.0, 5.0], "convex")
    assert K.contains([2.0, 0.0]) and not K.contains([-1.0, 0.0]) and not K.contains([0.0, 1.0])
    K = normal_cone(Ball([0, 0], 1.0, EUCLIDEAN), [1.0, 0.0], "convex")
    assert K.contains([3.0, 0.0]) and not K.contains([-3.0, 0.0]) and not K.contains([1.0, 0.1])


def test_interior_point_has_zero_cone():
    assert normal_cone(box([0, 0], [1, 1]), [0.5, 0.5]).is_zero
    assert normal_cone(Ball([0, 0], 1.0), [0.1, 0.2]).is_zero


def test_box_corner_cone():
    K = normal_cone(box([0, 0], [1, 1]), [1.0, 1.0])
    assert K.contains([1.0, 2.0]) and not K.contains([-0.1, 1.0])


def test_max_ball_vertex_cone():
    K = normal_cone(Ball([0, 0], 1.0, MAXIMUM), [1.0, 1.0])
    assert K.contains([1.0, 3.0]) and not K.contains([1.0, -0.1])


@pytest.mark.parametrize("kind", ["frechet", "clarke", "convex"])
def test_kinds_coincide_for_convex_sets(kind):
    for A, w in [(box([0, 0], [1, 1]), [1.0, 0.3]), (Ball([0, 0], 2.0), [0.0, 2.0]),
                 (line([0, 0], [1, 1]), [2.0, 2.0])]:
        ref = normal_cone(A, w, "frechet")
        assert _same_cone(normal_cone(A, w, kind), ref, PROBES)


def test_crossing_lines_cones():
    cross = FiniteUnion((line([0, 0], [1, 0]), line([0, 0], [0, 1])))
    assert normal_cone(cross, [0.0, 0.0], "frechet").is_zero
    assert normal_cone(cross, [0.0, 0.0], "clarke").full
    K = normal_cone(cross, [2.0, 0.0], "frechet")
    assert K.contains([0.0, 1.0]) and not K.contains([1.0, 0.0])
    assert normal_cone(cross, [0.0, 0.0], "convex").is_zero
    with pytest.raises(UnsupportedClass):
        normal_cone(cross, [2.0, 0.0], "convex")


def test_point_cloud_cone_is_whole_space():
    assert normal_cone(PointCloud([[0, 0], [1, 1]]), [1.0, 1.0]).full


def test_normal_cone_guards():
    with pytest.raises(PreconditionFailed):
        normal_cone(box([0, 0], [1, 1]), [2.0, 2.0])
    with pytest.raises(PreconditionFailed):
        normal_cone(box([0, 0], [1, 1]), [1.0, 1.0], "limiting")


def test_dist_to_cone_examples():
    ray = ConeRep.from_generators([[1.0, 0.0]], 2)
    dist, y = dist_to_cone([1.0, 1.0], ray)
    assert dist == pytest.approx(1.0) and np.allclose(y, [1.0, 0.0])
    dist, y = dist_to_cone([-1.0, 0.0], ray)
    assert dist == pytest.approx(1.0) and np.allclose(y, [0.0, 0.0])
    dist, y = dist_to_cone([0.5, 0.5], ConeRep.whole(2), MAXIMUM)
    assert dist == 0.0 and np.allclose(y, [0.5, 0.5])


@pytest.mark.parametrize("n", [EUCLIDEAN, MAXIMUM, SUM])
@pytest.mark.parametrize("seed", range(25))
def test_dist_to_cone_matches_oracle(n, seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 4))
    K = random_cone(rng, d)
    z = rng.standard_normal(d)
    dist, y = dist_to_cone(z, K, n)
    assert dist == pytest.approx(cone_distance_oracle(z, K, n), abs=1e-7)
    assert K.contains(y, 1e-7)
