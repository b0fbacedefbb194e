"""Distances between n points and between n sets.

Three measures of how close a tuple is to a single point:

* ``d1``: the largest distance from the first ``n-1`` entries to the last one;
  asymmetric, it depends on which entry comes last.
* ``d2``: the radius of the smallest ball containing the tuple (Chebyshev radius).
* ``d3``: the largest deviation from the arithmetic mean.

Set versions take the infimum over all choices of points.  They are
computed exactly over every tuple of convex pieces, so finite unions are
handled without multi-start heuristics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import NumericalFailure, PreconditionFailed
from .geometry import Bracket, dist_set_set, project
from .model import Model
from .norms import EUCLIDEAN, NormSpec, check_dims, norm
from .parallel import pmap
from .sets import SetRep, is_singleton_piece, whole_space
from .tolerances import TOL_OBJ

DistanceReport = Bracket


def _points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[0] < 2:
        raise PreconditionFailed("need at least two points")
    return pts


def d1_points(points, n: NormSpec = EUCLIDEAN) -> float:
    """``max_{i<n} ||w_i - w_n||``; a 1-D input is read as points on the line."""
    pts = _points(points)
    return float(np.max(norm(pts[:-1] - pts[-1], n)))


def d3_points(points, n: NormSpec = EUCLIDEAN) -> float:
    """``max_i ||w_i - mean||``."""
    pts = _points(points)
    return float(np.max(norm(pts - pts.mean(axis=0), n)))


def _circumcenter(support: np.ndarray) -> np.ndarray:
    p0 = support[0]
    if support.shape[0] == 1:
        return p0.copy()
    D = support[1:] - p0
    M = 2.0 * D @ D.T
    rhs = np.einsum("ij,ij->i", D, D)
    mu, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    return p0 + mu @ D


def _welzl(pts: np.ndarray):
    """Minimum enclosing euclidean ball by Welzl's move-to-front recursion."""
    d = pts.shape[1]

    def ball(support):
        if not support:
            return np.zeros(d), -1.0
        S = np.array(support)
        c = _circumcenter(S)
        return c, float(np.max(np.linalg.norm(S - c, axis=1)))

    def mb(idx, support):
        c, r = ball(support)
        if len(support) == d + 1:
            return c, r
        for k, i in enumerate(idx):
            p = pts[i]
            if r < 0 or np.linalg.norm(p - c) > r * (1 + 1e-12) + 1e-14:
                c, r = mb(idx[:k], support + [p])
        return c, r

    rng = np.random.default_rng(0)
    order = list(rng.permutation(pts.shape[0]))
    c, r = mb(order, [])
    return c, float(np.max(np.linalg.norm(pts - c, axis=1)))


def d2_points(points, n: NormSpec = EUCLIDEAN) -> DistanceReport:
    """Chebyshev radius ``inf_x max_i ||w_i - x||`` with a center.

    Euclidean: minimum enclosing ball (Welzl).  Maximum norm: the
    coordinatewise midrange, which is exact.  Other norms: linear or conic
    program.
    """
    pts = _points(points)
    if n.kind == "euclidean" or (n.kind == "p" and n.p == 2.0):
        c, r = _welzl(pts)
        return Bracket.exact(r, "closed-form", (*pts, c))
    if n.kind == "maximum":
        c = 0.5 * (pts.min(axis=0) + pts.max(axis=0))
        r = float(np.max(norm(pts - c, n)))
        return Bracket.exact(r, "closed-form", (*pts, c))
    d = pts.shape[1]
    model = Model()
    x = model.var(d)
    t = model.var(1, lb=0.0)[0]
    for p in pts:
        model.norm_le([(x, -np.eye(d))], p, int(t), n)
    model.minimize([(np.array([t]), np.ones((1, 1)))])
    res = model.solve()
    if not res.optimal:
        raise NumericalFailure("Chebyshev center problem failed")
    c = res.x[x]
    r = float(np.max(norm(pts - c, n)))
    return Bracket(r, min(r, res.lower()), r, res.method, (*pts, c))


# ---------------------------------------------------------------------------
# set versions
# ---------------------------------------------------------------------------

def _check_sets(sets):
    sets = list(sets)
    if len(sets) < 2:
        raise PreconditionFailed("need at least two sets")
    check_dims(*[np.zeros(s.dim) for s in sets])
    return sets


def _solve_tuple(tup, which: str, n: NormSpec):
    """Exact value of the chosen distance for one tuple of convex pieces."""
    k = len(tup)
    if all(is_singleton_piece(p) for p in tup):
        pts = np.array([p.point for p in tup])
        if which == "d1":
            v = d1_points(pts, n)
            return Bracket.exact(v, "closed-form", tuple(pts))
        if which == "d2":
            return d2_points(pts, n)
        v = d3_points(pts, n)
        return Bracket.exact(v, "closed-form", tuple(pts))
    d = tup[0].dim
    model = Model()
    w = [model.var(d) for _ in range(k)]
    t = model.var(1, lb=0.0)[0]
    for wi, p in zip(w, tup):
        model.member(wi, p)
    eye = np.eye(d)
    center = None
    if which == "d1":
        for i in range(k - 1):
            model.norm_le([(w[i], eye), (w[-1], -eye)], np.zeros(d), int(t), n)
    elif which == "d2":
        center = model.var(d)
        for i in range(k):
            model.norm_le([(w[i], eye), (center, -eye)], np.zeros(d), int(t), n)
    else:
        for i in range(k):
            terms = [(w[j], (float(i == j) - 1.0 / k) * eye) for j in range(k)]
            model.norm_le(terms, np.zeros(d), int(t), n)
    model.minimize([(np.array([t]), np.ones((1, 1)))])
    res = model.solve()
    if res.status == "infeasible":
        return Bracket(np.inf, np.inf, np.inf, res.method)
    if not res.optimal:
        raise NumericalFailure(f"{which} subproblem ended with status {res.status}")
    pts = [res.x[wi] for wi in w]
    if res.method != "exact-lp":
        pts = [project(p, piece, EUCLIDEAN) for p, piece in zip(pts, tup)]
    arr = np.array(pts)
    if which == "d1":
        up = d1_points(arr, n)
        extra = ()
    elif which == "d2":
        c = res.x[center]
        up = float(np.max(norm(arr - c, n)))
        extra = (c,)
    else:
        up = d3_points(arr, n)
        extra = ()
    lo = min(up, res.lower())
    return Bracket(up, max(0.0, lo), up, res.method, (*pts, *extra))


def _set_distance(sets, which: str, n: NormSpec) -> DistanceReport:
    tuples = list(product(*[s.pieces() for s in sets]))
    results = pmap(lambda tup: _solve_tuple(tup, which, n), tuples)
    best_k = min(range(len(results)), key=lambda k: (results[k].upper, k))
    best = results[best_k]
    lower = min(r.lower for r in results)
    return Bracket(best.upper, min(lower, best.upper), best.upper, best.method, best.points)


def d1_sets(sets, n: NormSpec = EUCLIDEAN) -> DistanceReport:
    """``inf max_{i<n} ||w_i - w_n||`` over ``w_i`` in the sets.

    For two sets this is the ordinary set distance.  In general it is the
    distance, in the product space with the maximum metric, between
    ``Omega_1 x ... x Omega_{n-1}`` and the diagonal copy of ``Omega_n``.
    """
    sets = _check_sets(sets)
    if len(sets) == 2:
        return dist_set_set(sets[0], sets[1], n)
    return _set_distance(sets, "d1", n)


def d2_sets(sets, n: NormSpec = EUCLIDEAN) -> DistanceReport:
    """``inf_x inf_w max_i ||w_i - x||``; equals ``d1`` with the whole space appended."""
    return _set_distance(_check_sets(sets), "d2", n)


def d3_sets(sets, n: NormSpec = EUCLIDEAN) -> DistanceReport:
    """``inf_w max_i ||w_i - mean(w)||``."""
    return _set_distance(_check_sets(sets), "d3", n)


def localized_distance(sets, anchor: SetRep, n: NormSpec = EUCLIDEAN) -> DistanceReport:
    """``d1`` of the sets with ``anchor`` appended as the last set."""
    return d1_sets(list(sets) + [anchor], n)


def d2_via_whole_space(sets, n: NormSpec = EUCLIDEAN) -> DistanceReport:
    sets = _check_sets(sets)
    return d1_sets(sets + [whole_space(sets[0].dim)], n)


@dataclass(frozen=True)
class InequalityCheck:
    name: str
    lhs: float
    rhs: float
    holds: bool
    margin: float


@dataclass(frozen=True)
class InequalityReport:
    d1: Bracket
    d2: Bracket
    d3: Bracket
    checks: tuple = field(default_factory=tuple)

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks)

    def violations(self):
        return [c for c in self.checks if not c.holds]


def _le(name, a: Bracket, b: Bracket, factor: float, tol: float):
    # not refuted by the brackets: smallest possible lhs against largest possible rhs
    margin = factor * b.upper - a.lower
    return InequalityCheck(name, a.value, factor * b.value, bool(margin >= -tol * (1 + abs(b.upper))), margin)


def _eq(name, a: Bracket, b: Bracket, factor: float, tol: float):
    gap = abs(a.value - factor * b.value)
    slack = (a.upper - a.lower) + factor * (b.upper - b.lower)
    return InequalityCheck(name, a.value, factor * b.value, bool(gap <= tol + slack), -gap)


def check_distance_inequalities(data, n: NormSpec = EUCLIDEAN, tol: float = TOL_OBJ) -> InequalityReport:
    """Evaluate the chains ``d2 <= d1 <= 2 d2`` and ``d2 <= d3 <= 2 d2``.

    ``data`` is either an array of points or a list of SetRep.  For two
    entries the equalities ``d1 = 2 d2`` and ``d2 = d3`` are checked as well.
    """
    if len(data) and isinstance(data[0], SetRep):
        b1, b2, b3 = d1_sets(data, n), d2_sets(data, n), d3_sets(data, n)
        count = len(data)
    else:
        pts = _points(data)
        b1 = Bracket.exact(d1_points(pts, n), "closed-form")
        b2 = d2_points(pts, n)
        b3 = Bracket.exact(d3_points(pts, n), "closed-form")
        count = pts.shape[0]
    checks = [
        _le("d2<=d1", b2, b1, 1.0, tol),
        _le("d1<=2d2", b1, b2, 2.0, tol),
        _le("d2<=d3", b2, b3, 1.0, tol),
        _le("d3<=2d2", b3, b2, 2.0, tol),
    ]
    if count == 2:
        checks.append(_eq("d1=2d2", b1, b2, 2.0, tol))
        checks.append(_eq("d2=d3", b2, b3, 1.0, tol))
    return InequalityReport(b1, b2, b3, tuple(checks))
