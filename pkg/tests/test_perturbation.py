import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transversal.cones import ConeRep
from transversal.errors import PreconditionFailed
from transversal.norms import EUCLIDEAN, dual_norm, norming_vector
from transversal.oracles import cone_distance_oracle, inequality_replay
from transversal.perturbation import (DualFamily, ParamSet, asymmetric_snap, normalize_then_rebalance,
                                      normalize_then_snap, pairing_bound, rebalance_to_zero_sum,
                                      snap_to_cones, two_set_exact_flip)

from _instances import NORMS, cone_defect_family, flip_pair, near_feasible_family, sum_defect_family

E1 = np.array([1.0, 0.0])
WHOLE = ConeRep.whole(2)


def ray(*v):
    return ConeRep.from_generators([v], len(v))


def family_with_slack(z, cones, n, order):
    """Parameters satisfying the scaling precondition with room to spare."""
    probe = DualFamily(z, cones, n)
    cd, sd = probe.cone_defect(), probe.sum_defect()
    if order == "rebalance":
        lam, rho = 1.0, 2.0
    else:
        lam, rho = 2.0, 1.0
    eps = 2.0 * (lam * cd + rho * sd) + 1e-6
    if order == "rebalance" and eps + lam > rho:
        return None
    if order == "snap" and eps + rho > lam:
        return None
    return DualFamily(z, cones, n, ParamSet(epsilon=eps, rho=rho, lam=lam))


def test_rebalance_keeps_zero_sum_family():
    f = DualFamily([E1 / 2, -E1 / 2], [WHOLE, WHOLE], EUCLIDEAN, ParamSet(epsilon=0.1, rho=2.0, lam=1.0))
    out = rebalance_to_zero_sum(f)
    assert np.allclose(out.z, f.z)


def test_rebalance_ordering_guard():
    f = DualFamily([E1 / 2, -E1 / 2], [WHOLE, WHOLE], EUCLIDEAN, ParamSet(epsilon=0.5, rho=1.0, lam=1.0))
    with pytest.raises(PreconditionFailed, match="eps \\+ lam <= rho"):
        rebalance_to_zero_sum(f)


def test_snap_two_rays():
    z = np.array([[0.6, 0.05], [0.05, 0.4]])
    z = z / np.linalg.norm(z, axis=1).sum()
    f = DualFamily(z, [ray(1.0, 0.0), ray(0.0, 1.0)], EUCLIDEAN, ParamSet(epsilon=2.0, rho=0.1, lam=2.5))
    out = snap_to_cones(f)
    assert cone_distance_oracle(out.z[0], ray(1.0, 0.0)) < 1e-12
    assert cone_distance_oracle(out.z[1], ray(0.0, 1.0)) < 1e-12
    assert np.linalg.norm(out.z.sum(axis=0)) < 2.0 / 0.1


def test_snap_in_cones_only_renormalizes():
    z = np.array([[0.3, 0.0], [-0.7, 0.0]])
    f = DualFamily(z, [ray(1.0, 0.0), ray(-1.0, 0.0)], EUCLIDEAN, ParamSet(epsilon=0.5, rho=1.0, lam=2.0))
    assert np.allclose(snap_to_cones(f).z, z)


def test_snap_normalization_guard():
    f = DualFamily([[1.0, 0.0], [-1.0, 0.0]], [WHOLE, WHOLE], EUCLIDEAN,
                   ParamSet(epsilon=0.5, rho=1.0, lam=2.0))
    with pytest.raises(PreconditionFailed, match="normalization"):
        snap_to_cones(f)


@pytest.mark.parametrize("n", NORMS)
@pytest.mark.parametrize("seed", range(15))
def test_rebalance_postconditions(n, seed):
    rng = np.random.default_rng(seed)
    z, cones = near_feasible_family(rng, int(rng.integers(2, 5)), int(rng.integers(2, 4)), n)
    f = family_with_slack(z, cones, n, "rebalance")
    if f is None:
        pytest.skip("defects too large for the fixed ordering")
    out = rebalance_to_zero_sum(f)
    eps, lam = f.params.epsilon, f.params.lam
    assert np.abs(out.z.sum(axis=0)).max() <= 1e-12
    assert out.margins["cone_margin"] >= 1e-7
    rep = inequality_replay("rebalance", {"z": out.z, "cones": out.cones, "norm": n.to_dict(),
                                          "eps": eps, "lam": lam})
    assert rep.all_hold, rep.failures()


@pytest.mark.parametrize("n", NORMS)
@pytest.mark.parametrize("seed", range(15))
def test_snap_postconditions(n, seed):
    rng = np.random.default_rng(100 + seed)
    z, cones = near_feasible_family(rng, int(rng.integers(2, 5)), int(rng.integers(2, 4)), n)
    f = family_with_slack(z, cones, n, "snap")
    if f is None:
        pytest.skip("defects too large for the fixed ordering")
    out = snap_to_cones(f)
    assert out.margins["sum_margin"] >= 1e-7
    rep = inequality_replay("snap", {"z": out.z, "cones": out.cones, "norm": n.to_dict(),
                                     "eps": f.params.epsilon, "rho": f.params.rho})
    assert rep.all_hold, rep.failures()


def test_pairing_formula_value():
    z = np.array([[0.5, 0.0], [-0.5, 0.0]])
    x = np.array([[1.0, 0.0], [-1.0, 0.0]])
    f = DualFamily(z, [WHOLE, WHOLE], EUCLIDEAN, ParamSet(epsilon=0.2, rho=1.0, lam=0.5, tau=1.0))
    res = pairing_bound(f, x, "part-i")
    assert res.tau_hat == pytest.approx(2.0 / 3.0)
    assert res.holds


def test_pairing_limit_tau_hat_to_one():
    z = np.array([[0.5, 0.0], [-0.5, 0.0]])
    x = np.array([[1.0, 0.0], [-1.0, 0.0]])
    f = DualFamily(z, [WHOLE, WHOLE], EUCLIDEAN, ParamSet(epsilon=1e-9, rho=1.0, lam=0.5, tau=1.0))
    assert pairing_bound(f, x).tau_hat == pytest.approx(1.0, abs=1e-8)


def test_pairing_zero_primal_guard():
    f = DualFamily([[0.5, 0.0], [-0.5, 0.0]], [WHOLE, WHOLE], EUCLIDEAN,
                   ParamSet(epsilon=0.1, rho=1.0, lam=0.5, tau=1.0))
    with pytest.raises(PreconditionFailed, match="not all be zero"):
        pairing_bound(f, np.zeros((2, 2)))


@pytest.mark.parametrize("part", ["part-i", "part-ii"])
@pytest.mark.parametrize("seed", range(20))
def test_pairing_survives_rescaling(part, seed):
    rng = np.random.default_rng(seed)
    n = NORMS[seed % 3]
    z, cones = near_feasible_family(rng, 3, 2, n, noise=5e-3)
    f = family_with_slack(z, cones, n, "rebalance" if part == "part-i" else "snap")
    if f is None:
        pytest.skip("defects too large for the fixed ordering")
    # unit primal vectors aligned with the duals: the starting pairing is the total length 1
    x = np.array([norming_vector(zi, n) for zi in f.z])
    tau = min(1.0, 0.9 * float(np.sum(f.z * x)))
    f = DualFamily(f.z, f.cones, n, ParamSet(epsilon=f.params.epsilon, rho=f.params.rho,
                                             lam=f.params.lam, tau=tau))
    res = pairing_bound(f, x, part)
    assert res.holds
    assert inequality_replay("pairing", {"z": res.family.z, "x": x, "norm": n.to_dict(),
                                         "tau_hat": res.tau_hat}).all_hold


@pytest.mark.parametrize("n", NORMS)
@pytest.mark.parametrize("seed", range(15))
def test_normalize_then_rebalance(n, seed):
    rng = np.random.default_rng(seed)
    eps = rng.uniform(0.01, 0.5)
    z, cones = sum_defect_family(rng, int(rng.integers(2, 5)), 2, n, eps)
    out = normalize_then_rebalance(z, cones, eps, n)
    assert np.abs(out.z.sum(axis=0)).max() <= 1e-12
    dists = [cone_distance_oracle(zi, K, n.dual()) for zi, K in zip(out.z, cones)]
    assert sum(dists) < eps / (1 - eps)


def test_normalize_then_rebalance_guards():
    with pytest.raises(PreconditionFailed):
        normalize_then_rebalance([[0.5, 0.0], [-0.5, 0.0]], [WHOLE, WHOLE], 1.0)
    with pytest.raises(PreconditionFailed, match="in their cones"):
        normalize_then_rebalance([[0.5, 0.0], [-0.5, 0.0]], [ray(0.0, 1.0), WHOLE], 0.1)


def test_normalize_then_rebalance_zero_sum_input_unchanged():
    z = np.array([[0.5, 0.0], [-0.5, 0.0]])
    out = normalize_then_rebalance(z, [ray(1.0, 0.0), ray(-1.0, 0.0)], 0.1)
    assert np.allclose(out.z, z)


@pytest.mark.parametrize("n", NORMS)
@pytest.mark.parametrize("seed", range(15))
def test_normalize_then_snap(n, seed):
    rng = np.random.default_rng(seed)
    eps = rng.uniform(0.01, 0.5)
    z, cones = cone_defect_family(rng, int(rng.integers(2, 5)), 2, n, eps)
    out = normalize_then_snap(z, cones, eps, n)
    assert max(cone_distance_oracle(zi, K, n.dual()) for zi, K in zip(out.z, cones)) <= 1e-9
    assert dual_norm(out.z.sum(axis=0), n) < eps / (1 - eps)


def test_normalize_then_snap_guards():
    with pytest.raises(PreconditionFailed, match="sum to zero"):
        normalize_then_snap([[0.5, 0.0], [-0.4, 0.1]], [WHOLE, WHOLE], 0.1)
    with pytest.raises(PreconditionFailed):
        normalize_then_snap([[0.5, 0.0], [-0.5, 0.0]], [ray(0.0, 1.0), ray(0.0, 1.0)], 0.1)


def test_flip_of_opposite_pair_is_identity():
    z1, z2 = np.array([0.5, 0.0]), np.array([-0.5, 0.0])
    h1, h2, m = two_set_exact_flip(z1, z2, ray(1.0, 0.0), ray(-1.0, 0.0), 0.1)
    assert np.allclose(h1, z1) and np.allclose(h2, z2) and m["residual"] == pytest.approx(0.0)


def test_flip_small_mismatch():
    z1 = np.array([1.0, 0.0])
    z2 = np.array([-1.0, 0.1])
    s = np.linalg.norm(z1) + np.linalg.norm(z2)
    K1, K2 = ray(1.0, 0.0), ray(-1.0, 0.1)
    h1, h2, m = two_set_exact_flip(z1 / s, z2 / s, K1, K2, 0.1)
    assert np.allclose(h1 + h2, 0.0)
    # z2 is the longer vector, so it keeps its direction and z1 absorbs the mismatch
    assert m["swapped"]
    assert cone_distance_oracle(h2, K2) < 1e-12
    assert cone_distance_oracle(h1, K1) < 0.1


def test_flip_normalization_guard():
    with pytest.raises(PreconditionFailed, match="normalization"):
        two_set_exact_flip([1.0, 0.0], [-1.0, 0.0], WHOLE, WHOLE, 0.1)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.01, 0.5), st.sampled_from(NORMS))
def test_flip_postconditions(seed, eps, n):
    rng = np.random.default_rng(seed)
    z1, z2, K1, K2 = flip_pair(rng, 2, n, eps)
    h1, h2, m = two_set_exact_flip(z1, z2, K1, K2, eps, n)
    assert np.abs(h1 + h2).max() == 0.0
    assert dual_norm(h1, n) + dual_norm(h2, n) == pytest.approx(1.0, abs=1e-12)
    small = (h1, K1) if m["swapped"] else (h2, K2)
    assert cone_distance_oracle(small[0], small[1], n.dual()) < eps


def test_asymmetric_snap_in_cones():
    z = np.array([[1.0, 0.0], [-1.0, 0.0]])
    out = asymmetric_snap(z, [ray(1.0, 0.0), ray(-1.0, 0.0)], 0.1)
    assert np.allclose(out.z, z) and out.margins["last_residual"] == pytest.approx(0.0)


def test_asymmetric_snap_guard():
    with pytest.raises(PreconditionFailed, match="normalization"):
        asymmetric_snap([[2.0, 0.0], [-2.0, 0.0]], [WHOLE, WHOLE], 0.1)


@pytest.mark.parametrize("n", NORMS)
@pytest.mark.parametrize("seed", range(15))
def test_asymmetric_snap_postconditions(n, seed):
    rng = np.random.default_rng(seed)
    eps = rng.uniform(0.01, 0.5)
    z, cones = cone_defect_family(rng, int(rng.integers(2, 5)), 2, n, eps, skip_last=True)
    out = asymmetric_snap(z, cones, eps, n)
    assert np.abs(out.z.sum(axis=0)).max() <= 1e-12
    for zi, K in zip(out.z[:-1], cones[:-1]):
        assert cone_distance_oracle(zi, K, n.dual()) <= 1e-9
    assert cone_distance_oracle(out.z[-1], cones[-1], n.dual()) < eps / (1 - eps)
    assert dual_norm(out.z[:-1], n).sum() == pytest.approx(1.0, abs=1e-9)


def test_param_set_guards():
    with pytest.raises(PreconditionFailed):
        ParamSet(epsilon=-1.0)
    with pytest.raises(PreconditionFailed):
        ParamSet(tau=1.5)
    with pytest.raises(PreconditionFailed, match="missing parameters: rho"):
        ParamSet(epsilon=1.0).require("epsilon", "rho")
