import numpy as np
import pytest

from transversal.errors import PreconditionFailed
from transversal.norms import EUCLIDEAN, MAXIMUM
from transversal.oracles import (chebyshev_radius_oracle, emptiness_oracle, evp_exhaustive_check,
                                 geometric_evp_check, grid_distance_oracle, inequality_replay,
                                 product_space_row)
from transversal.sets import Ball, PointCloud, box, halfspace, line


def test_identical_sets_have_a_witness():
    res = emptiness_oracle([box([0, 0], [1, 1]), box([0, 0], [1, 1])])
    assert res.status == "nonempty"
    assert box([0, 0], [1, 1]).contains(res.witness)


def test_separated_boxes_are_empty():
    res = emptiness_oracle([box([0, 0], [1, 1]), box([2, 0], [3, 1])])
    assert res.empty and res.certificate == "lp-infeasible"
    assert res.margin == pytest.approx(0.5)


def test_near_touching_disks_are_flagged():
    res = emptiness_oracle([Ball([0, 1], 1.0), Ball([0, -1 - 1e-13], 1.0)])
    assert res.status == "inconclusive"


def test_separated_disks_use_outer_rows():
    res = emptiness_oracle([Ball([0, 1], 1.0), Ball([0, -1.001], 1.0)])
    assert res.empty and res.certificate == "outer-lp-infeasible"


def test_open_ball_excludes_boundary_point():
    # the lines meet at the origin, which lies on the boundary of the open ball
    res = emptiness_oracle([line([0, 0], [1, 0]), line([0, 0], [0, 1])], ball=([1.0, 1.0], 1.0, "maximum"))
    assert not res.status == "nonempty"
    res = emptiness_oracle([line([0, 0], [1, 0]), line([0, 0], [0, 1])], ball=([1.0, 1.0], 1.1, "maximum"))
    assert res.status == "nonempty"


def test_point_cloud_membership_tier():
    res = emptiness_oracle([PointCloud([[0, 0], [1, 1]]), Ball([1, 1.5], 0.4)])
    assert res.empty and res.certificate == "membership"


def test_grid_oracle_unbounded_guard():
    with pytest.raises(PreconditionFailed, match="unbounded"):
        grid_distance_oracle([0.0, 0.0], halfspace([1, 0], 0.0))


def test_grid_oracle_max_norm():
    br = grid_distance_oracle([3.0, 0.5], box([0, 0], [1, 1]), MAXIMUM, spacing=1e-3)
    assert br.contains(2.0)


def test_chebyshev_oracle_examples():
    lo, hi = chebyshev_radius_oracle([[0.0], [1.0], [5.0]])
    assert lo <= 2.5 + 1e-9 and hi >= 2.5 - 1e-9 and hi - lo < 1e-6
    lo, hi = chebyshev_radius_oracle([[0, 0], [2, 0], [0, 2]], MAXIMUM)
    assert lo == hi == pytest.approx(1.0)


def test_evp_check_on_line():
    M = np.abs(np.subtract.outer(np.arange(5.0), np.arange(5.0)))
    f = np.array([3.0, 1.0, 4.0, 1.0, 5.0])
    # from 0 with slope 2.5/3 the first point is the unique descent target
    chk = evp_exhaustive_check(M, f, 0, 1, 2.5, 3.0)
    assert chk.holds
    chk = evp_exhaustive_check(M, f, 0, 3, 2.5, 3.0)
    assert not chk.holds


def test_product_row_is_max_metric():
    A = np.array([[0.0, 0.0], [1.0, 0.0]])
    B = np.array([[0.0, 0.0], [0.0, 3.0]])
    row = product_space_row([A, B], [1.0, 2.0])
    # index 3 = (1, 1): max(1 / 1, 3 / 2)
    assert row(0)[3] == pytest.approx(1.5)


def test_geometric_check_on_closest_pair():
    A = np.array([[0.0, 0.0], [-1.0, 0.0]])
    B = np.array([[1.0, 0.0], [3.0, 0.0]])
    chk = geometric_evp_check([A, B], (0, 0), (0, 0), 0.5, [1.0, 1.0])
    assert chk.holds and chk.no_increase == 0.0


def test_replay_kinds():
    assert inequality_replay("translation-bound", {"a": [[0.1, 0.0]], "bound": 0.2}).all_hold
    rep = inequality_replay("translation-bound", {"a": [[0.2, 0.0]], "bound": 0.2})
    assert not rep.all_hold and rep.failures()[0].name == "max-norm"
    assert inequality_replay("distance-chain", {"points": [0.0, 1.0, 5.0]}).all_hold
    with pytest.raises(PreconditionFailed, match="unknown replay"):
        inequality_replay("triangle", {})


def test_replay_pairing():
    z = np.array([[0.5, 0.0], [-0.5, 0.0]])
    x = np.array([[1.0, 0.0], [-1.0, 0.0]])
    assert inequality_replay("pairing", {"z": z, "x": x, "tau_hat": 0.99}).all_hold
    assert not inequality_replay("pairing", {"z": z, "x": x, "tau_hat": 1.0}).all_hold
