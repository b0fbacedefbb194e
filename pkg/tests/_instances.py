"""Random instance generators shared by the test modules."""

import numpy as np

from transversal.cones import ConeRep
from transversal.norms import EUCLIDEAN, MAXIMUM, SUM, dual_norm
from transversal.sets import Ball, HPolyhedron, PointCloud

NORMS = [EUCLIDEAN, MAXIMUM, SUM]


def unit(rng, d):
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_cone(rng, d, max_gens=6):
    kind = rng.integers(4)
    if kind == 0:
        return ConeRep.zero(d)
    if kind == 1:
        return ConeRep.whole(d)
    k = int(rng.integers(1, max_gens + 1))
    return ConeRep.from_generators(rng.standard_normal((k, d)), d)


def cone_point(rng, K: ConeRep):
    if K.full:
        return rng.standard_normal(K.dim)
    if K.generators.shape[0] == 0:
        return np.zeros(K.dim)
    return rng.random(K.generators.shape[0]) @ K.generators


def normalized(z, n, skip_last=False):
    lens = dual_norm(z, n)
    total = lens[:-1].sum() if skip_last else lens.sum()
    return z / total


def cone_family(rng, n_vec, d, n, nonzero=True):
    """Normalized cone-feasible vectors; cones that yield zero are replaced by rays."""
    cones, z = [], []
    for _ in range(n_vec):
        K = random_cone(rng, d)
        v = cone_point(rng, K)
        if nonzero and not np.any(v):
            K = ConeRep.from_generators(rng.standard_normal((1, d)), d)
            v = cone_point(rng, K)
        cones.append(K)
        z.append(v)
    return cones, normalized(np.array(z), n)


def touching_polyhedra(rng, d, extra=2, n=EUCLIDEAN):
    """Two polyhedra through the origin separated by the hyperplane ``<u, x> = 0``."""
    u = unit(rng, d)

    def side(sign):
        rows = [sign * u]
        for _ in range(extra):
            g = rng.standard_normal(d)
            rows.append(g)
        A = np.array(rows)
        b = np.concatenate([[0.0], rng.random(extra) + 0.1])
        return HPolyhedron(A, b)

    return side(1.0), side(-1.0), u


def tangent_disks(rng, d=2):
    u = unit(rng, d)
    r1, r2 = 0.5 + rng.random(), 0.5 + rng.random()
    return Ball(r1 * u, r1, EUCLIDEAN), Ball(-r2 * u, r2, EUCLIDEAN), u


def disjoint_clouds(rng, count, d, size=(3, 8), gap=0.5):
    """Point clouds on separate shells; a random pair of near-closest base points."""
    clouds = []
    for k in range(count):
        center = rng.standard_normal(d) * 2 + 4.0 * k * np.eye(d)[0]
        m = int(rng.integers(size[0], size[1] + 1))
        pts = center + rng.standard_normal((m, d))
        clouds.append(PointCloud(pts))
    return clouds


def _cone_around(rng, v, d, extra):
    """A cone containing ``v``: its ray plus ``extra`` random generators (sometimes the whole space)."""
    if rng.random() < 0.1:
        return ConeRep.whole(d)
    gens = np.vstack([v[None, :], rng.standard_normal((extra, d))])
    return ConeRep.from_generators(gens, d)


def exact_family(rng, m, d, extra=2):
    """Zero-sum vectors with each ``z_i`` in its cone ``K_i``."""
    v = rng.standard_normal((m - 1, d))
    z = np.vstack([v, -v.sum(axis=0)])
    cones = [_cone_around(rng, zi, d, int(rng.integers(0, extra + 1))) for zi in z]
    return z, cones


def inside_cone_step(rng, K: ConeRep):
    if K.full:
        return rng.standard_normal(K.dim)
    return rng.random(K.generators.shape[0]) @ K.generators


def sum_defect_family(rng, m, d, n, eps):
    """Normalized cone-feasible vectors with ``0 < ||sum z_i||_* < eps``."""
    z, cones = exact_family(rng, m, d)
    steps = np.array([inside_cone_step(rng, K) for K in cones])
    t = 1.0
    while True:
        w = normalized(z + t * steps, n)
        if dual_norm(w.sum(axis=0), n) < eps * rng.uniform(0.2, 0.95):
            return w, cones
        t *= 0.5


def cone_defect_family(rng, m, d, n, eps, skip_last=False):
    """Normalized zero-sum vectors with ``0 < sum d(z_i, K_i) < eps``."""
    from transversal.cones import dist_to_cone
    z, cones = exact_family(rng, m, d)
    noise = rng.standard_normal((m, d))
    noise -= noise.mean(axis=0)
    t = 1.0
    while True:
        w = normalized(z + t * noise, n, skip_last)
        w[-1] = -w[:-1].sum(axis=0)
        defect = sum(dist_to_cone(wi, K, n.dual())[0] for wi, K in zip(w, cones))
        if defect < eps * rng.uniform(0.2, 0.95):
            return w, cones
        t *= 0.5


def near_feasible_family(rng, m, d, n, noise=1e-2):
    """Normalized vectors near a cone-feasible zero-sum family (both defects small)."""
    z, cones = exact_family(rng, m, d)
    return normalized(z + noise * rng.standard_normal(z.shape), n), cones


def flip_pair(rng, d, n, eps):
    """Two normalized cone-feasible vectors with ``||z_1 + z_2||_* < eps``."""
    z1 = rng.standard_normal(d)
    K1 = _cone_around(rng, z1, d, int(rng.integers(0, 3)))
    t = 1.0
    while True:
        z2 = -z1 + t * rng.standard_normal(d)
        K2 = _cone_around(rng, z2, d, int(rng.integers(0, 3)))
        w = normalized(np.vstack([z1, z2]), n)
        if dual_norm(w.sum(axis=0), n) < eps * 0.95:
            return w[0], w[1], K1, K2
        t *= 0.5


def finite_instance(rng, size, d=2, n=EUCLIDEAN):
    """Random points, values with a few ``+inf`` entries, an admissible start and ``(eps, lam)``."""
    pts = rng.standard_normal((size, d)) * 2
    f = rng.random(size) * 5
    f[rng.random(size) < 0.1] = np.inf
    eps = rng.uniform(0.1, 3.0)
    lam = rng.uniform(0.1, 3.0)
    ok = np.flatnonzero(f < np.min(f) + eps)
    start = int(rng.choice(ok))
    return pts, f, start, eps, lam


def cloud_instance(rng, k, d=2, size=(4, 12)):
    """Disjoint distinct clouds, random base points and an eps making them near-closest."""
    from transversal.ekeland import ProductSpace
    clouds = [np.unique(c.points, axis=0) for c in disjoint_clouds(rng, k, d, size)]
    om = np.array([c[rng.integers(c.shape[0])] for c in clouds])
    space = ProductSpace(tuple(clouds), tuple([1.0] * k), EUCLIDEAN)
    f = space.d1_values()
    gap = f[space.index([int(np.flatnonzero((c == w).all(axis=1))[0]) for c, w in zip(clouds, om)])] - f.min()
    eps = gap + rng.uniform(0.05, 1.0)
    return clouds, om, eps
