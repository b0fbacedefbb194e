"""Projections and distances for the supported set classes.

Distances are computed piece by piece.  Every routine returns a
:class:`Bracket` so callers checking strict inequalities can stay
conservative: ``lower`` is a certified lower bound (up to the conic solver
accuracy :data:`model.CONIC_GAP` when that solver was used) and ``upper`` is
attained by the returned feasible point(s).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import DimensionMismatch, NumericalFailure, PreconditionFailed
from .lp import LPProblem, lp_solve
from .model import Model
from .norms import EUCLIDEAN, NormSpec, check_dims, norm, norming_vector
from .sets import (AffineSubspace, Ball, HPolyhedron, PointCloud, SetRep, combine_linear,
                   is_singleton_piece, linear_description, orthonormal_basis)
from .tolerances import DYKSTRA_MAX_SWEEPS, TOL_FEAS, TOL_MEMBER, TOL_OBJ


@dataclass(frozen=True)
class Bracket:
    """A computed quantity with certified bounds ``lower <= true value <= upper``."""

    value: float
    lower: float
    upper: float
    method: str
    points: tuple = field(default=(), compare=False)

    @property
    def width(self) -> float:
        if np.isinf(self.upper) and np.isinf(self.lower):
            return 0.0
        return self.upper - self.lower

    @classmethod
    def exact(cls, value, method, points=()):
        return cls(float(value), float(value), float(value), method, tuple(points))


def _is_euclid(n: NormSpec) -> bool:
    return n.kind == "euclidean" or (n.kind == "p" and n.p == 2.0)


# ---------------------------------------------------------------------------
# euclidean projection onto {G y <= h, E y = e}
# ---------------------------------------------------------------------------

def _kkt_polish(x, G, h, E, e, active, max_rounds=60):
    """Active-set refinement of a euclidean projection; returns a point or None."""
    active = sorted(set(active))
    seen = set()
    for _ in range(max_rounds):
        key = tuple(active)
        if key in seen:
            return None
        seen.add(key)
        C = np.vstack([G[active], E]) if active else E
        dvec = np.concatenate([h[active], e]) if active else e
        if C.shape[0]:
            lam, *_ = np.linalg.lstsq(C @ C.T, C @ x - dvec, rcond=None)
            y = x - C.T @ lam
            mult = lam[: len(active)]
        else:
            y = x.copy()
            mult = np.zeros(0)
        scale = 1.0 + np.abs(y).max() + np.abs(x).max()
        if E.shape[0] and np.abs(E @ y - e).max() > 1e-9 * scale:
            return None
        viol = G @ y - h if G.shape[0] else np.zeros(0)
        bad_mult = np.flatnonzero(mult < -1e-12 * scale)
        worst_viol = int(np.argmax(viol)) if viol.size else -1
        if bad_mult.size:
            k = bad_mult[np.argmin(mult[bad_mult])]
            active.pop(int(k))
            continue
        if viol.size and viol[worst_viol] > 1e-10 * scale:
            active = sorted(set(active) | {worst_viol})
            continue
        return y
    return None


def project_polyhedron_euclidean(x, G, h, E=None, e=None, max_sweeps=DYKSTRA_MAX_SWEEPS):
    """Euclidean projection onto ``{y : G y <= h, E y = e}``.

    Dykstra's alternating scheme over the halfspaces (and the affine part)
    supplies a warm start; an active-set step on the KKT system then makes
    the answer exact.

    Returns
    -------
    numpy.ndarray or None
        The projection, or ``None`` if the polyhedron is empty.
    """
    x = np.asarray(x, dtype=float)
    d = x.size
    G = np.zeros((0, d)) if G is None else np.asarray(G, dtype=float)
    h = np.zeros(0) if h is None else np.asarray(h, dtype=float)
    E = np.zeros((0, d)) if E is None else np.asarray(E, dtype=float)
    e = np.zeros(0) if e is None else np.asarray(e, dtype=float)
    scale = 1.0 + np.abs(x).max()
    feas_ok = (G.shape[0] == 0 or np.all(G @ x - h <= 1e-12 * scale)) and \
        (E.shape[0] == 0 or np.all(np.abs(E @ x - e) <= 1e-12 * scale))
    if feas_ok:
        return x.copy()
    row_norm2 = np.einsum("ij,ij->i", G, G)
    keep = row_norm2 > 0
    if np.any(h[~keep] < -1e-12):
        return None
    G, h, row_norm2 = G[keep], h[keep], row_norm2[keep]
    # an empty polyhedron would otherwise exhaust the sweep budget
    if not _linear_feasible(G, h, E, e):
        return None

    if E.shape[0]:
        EEt_pinv = np.linalg.pinv(E @ E.T)

        def proj_affine(y):
            return y - E.T @ (EEt_pinv @ (E @ y - e))
    else:
        def proj_affine(y):
            return y

    m = G.shape[0]
    y = x.copy()
    incr = np.zeros((m + 1, d))
    budget = 0
    attempt_at = 20
    while budget < max_sweeps:
        y_prev = y.copy()
        for k in range(m):
            z = y + incr[k]
            viol = G[k] @ z - h[k]
            y = z - (viol / row_norm2[k]) * G[k] if viol > 0 else z
            incr[k] = z - y
        z = y + incr[m]
        y = proj_affine(z)
        incr[m] = z - y
        budget += 1
        if budget >= attempt_at or np.abs(y - y_prev).max() < 1e-14 * scale:
            attempt_at *= 2
            act = np.flatnonzero(G @ y - h >= -1e-7 * scale) if m else []
            polished = _kkt_polish(x, G, h, E, e, list(act))
            if polished is not None:
                return polished
    # Dykstra did not settle: fall back to a conic solve.
    model = Model()
    yv = model.var(d)
    t = model.var(1)[0]
    if m:
        model.le([(yv, G)], h)
    if E.shape[0]:
        model.eq([(yv, E)], e)
    model.norm_le([(yv, -np.eye(d))], x, int(t), EUCLIDEAN)
    model.minimize([(np.array([t]), np.ones((1, 1)))])
    res = model.solve()
    if not res.optimal:
        raise NumericalFailure("euclidean projection did not converge")
    return res.x[yv]


def _linear_feasible(G, h, E, e):
    d = G.shape[1] if G.size else E.shape[1]
    sol = lp_solve(LPProblem(np.zeros(d), G if G.shape[0] else None, h if G.shape[0] else None,
                             E if E.shape[0] else None, e if E.shape[0] else None))
    return sol.status == "optimal"


# ---------------------------------------------------------------------------
# distance from a point to a convex piece
# ---------------------------------------------------------------------------

def _line_min_polyhedral(w, v, n: NormSpec):
    """Minimize ``||w - t v||`` over real ``t`` for the maximum or sum norm (exact)."""
    nz = np.flatnonzero(v != 0)
    cands = [0.0]
    cands.extend((w[nz] / v[nz]).tolist())
    if n.kind == "maximum":
        for i in range(len(nz)):
            for j in range(i + 1, len(nz)):
                a, b = nz[i], nz[j]
                for s in (1.0, -1.0):
                    den = v[a] - s * v[b]
                    if den != 0:
                        cands.append((w[a] - s * w[b]) / den)
    ts = np.array(cands)
    vals = norm(w[None, :] - ts[:, None] * v[None, :], n)
    k = int(np.argmin(vals))
    return ts[k], float(vals[k])


def _piece_distance(x, piece, n: NormSpec):
    """Return ``(distance, nearest point, lower bound, method)`` for a convex piece."""
    d = x.size
    if is_singleton_piece(piece):
        p = piece.point
        v = float(norm(x - p, n))
        return v, p.copy(), v, "closed-form"
    if isinstance(piece, Ball):
        if piece.is_whole_space:
            return 0.0, x.copy(), 0.0, "closed-form"
        if piece.norm == n or (_is_euclid(n) and _is_euclid(piece.norm)):
            r = float(norm(x - piece.center, n))
            if r <= piece.radius:
                return 0.0, x.copy(), 0.0, "closed-form"
            p = piece.center + (x - piece.center) * (piece.radius / r)
            return r - piece.radius, p, r - piece.radius, "closed-form"
    if isinstance(piece, AffineSubspace):
        Q = piece.span_basis
        if _is_euclid(n):
            w = x - piece.base
            p = piece.base + Q.T @ (Q @ w)
            v = float(np.linalg.norm(x - p))
            return v, p, v, "closed-form"
        if n.is_polyhedral and Q.shape[0] == 1:
            t, v = _line_min_polyhedral(x - piece.base, Q[0], n)
            p = piece.base + t * Q[0]
            return v, p, v, "closed-form"
        if Q.shape[0] == 0:
            v = float(norm(x - piece.base, n))
            return v, piece.base.copy(), v, "closed-form"
    if isinstance(piece, HPolyhedron) and _is_euclid(n):
        p = project_polyhedron_euclidean(x, piece.A, piece.b)
        if p is None:
            return np.inf, None, np.inf, "closed-form"
        v = float(np.linalg.norm(x - p))
        return v, p, v, "active-set"
    model = Model()
    y = model.var(d)
    t = model.var(1, lb=0.0)[0]
    model.member(y, piece)
    model.norm_le([(y, -np.eye(d))], x, int(t), n)
    model.minimize([(np.array([t]), np.ones((1, 1)))])
    res = model.solve()
    if res.status == "infeasible":
        return np.inf, None, np.inf, res.method
    if not res.optimal:
        raise NumericalFailure(f"projection subproblem ended with status {res.status}")
    p = res.x[y]
    v = float(norm(x - p, n))
    return v, p, max(0.0, min(v, res.lower())), res.method


def nearest_point(x, A: SetRep, n: NormSpec = EUCLIDEAN) -> Bracket:
    """Distance from ``x`` to ``A`` together with a nearest point.

    Returns
    -------
    Bracket
        ``points`` holds the nearest point (empty when ``A`` is empty).
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != A.dim:
        raise DimensionMismatch("point and set dimensions differ")
    best = (np.inf, None, np.inf, "closed-form")
    lower = np.inf
    for piece in A.pieces():
        res = _piece_distance(x, piece, n)
        lower = min(lower, res[2])
        if res[0] < best[0]:
            best = res
    pts = () if best[1] is None else (best[1],)
    return Bracket(best[0], min(lower, best[0]), best[0], best[3], pts)


def dist_point_set(x, A: SetRep, n: NormSpec = EUCLIDEAN) -> float:
    """Distance ``inf_{a in A} ||x - a||`` (``inf`` for an empty set)."""
    return nearest_point(x, A, n).value


def project(x, A: SetRep, n: NormSpec = EUCLIDEAN) -> np.ndarray:
    """A nearest point of ``A`` to ``x`` (lowest-index piece on ties)."""
    res = nearest_point(x, A, n)
    if not res.points:
        raise PreconditionFailed("cannot project onto an empty set")
    return res.points[0]


# ---------------------------------------------------------------------------
# support functions and set-to-set distance
# ---------------------------------------------------------------------------

def support(piece, u) -> float:
    """Support function ``sup_{y in piece} <u, y>`` of a convex piece."""
    u = np.asarray(u, dtype=float)
    if is_singleton_piece(piece):
        return float(u @ piece.point)
    if isinstance(piece, Ball):
        if piece.is_whole_space:
            return 0.0 if not np.any(u) else np.inf
        return float(u @ piece.center + piece.radius * norm(u, piece.norm.dual()))
    if isinstance(piece, AffineSubspace):
        Q = piece.span_basis
        if Q.shape[0] and np.abs(Q @ u).max() > 1e-12 * (1.0 + np.abs(u).max()):
            return np.inf
        return float(u @ piece.base)
    if isinstance(piece, HPolyhedron):
        if piece.A.shape[0] == 0:
            return 0.0 if not np.any(u) else np.inf
        sol = lp_solve(LPProblem(-u, piece.A, piece.b))
        if sol.status == "unbounded":
            return np.inf
        if sol.status == "infeasible":
            return -np.inf
        return -sol.value
    raise PreconditionFailed("support function needs a convex piece")


def _separation_lower(P, Q, a, b, n):
    """Lower bound on ``d(P, Q)`` from the direction of ``a - b``."""
    diff = a - b
    if not np.any(diff):
        return 0.0
    u = norming_vector(diff, n.dual())
    for piece in (P, Q):
        if isinstance(piece, AffineSubspace) and piece.span_basis.shape[0]:
            Qb = piece.span_basis
            u = u - Qb.T @ (Qb @ u)
    dn = float(norm(u, n.dual()))
    if dn == 0:
        return 0.0
    u = u / dn
    val = -support(P, -u) - support(Q, u)
    return max(0.0, val) if np.isfinite(val) else 0.0


def _pair_distance(P, Q, n: NormSpec, seeds: int = 4):
    """Distance between two convex pieces: ``(value, lower, a, b, method)``."""
    if is_singleton_piece(P):
        v, b, lo, m = _piece_distance(P.point, Q, n)
        return v, lo, P.point.copy(), b, m
    if is_singleton_piece(Q):
        v, a, lo, m = _piece_distance(Q.point, P, n)
        return v, lo, a, Q.point.copy(), m
    d = P.dim
    if n.is_polyhedral and linear_description(P) is not None and linear_description(Q) is not None:
        return _pair_model(P, Q, n)
    if _is_euclid(n):
        best = None
        start_points = [_anchor_point(P), _anchor_point(Q)]
        for s in start_points[:seeds]:
            a, b = _alternate(P, Q, s, n)
            if a is None:
                continue
            up = float(norm(a - b, n))
            lo = _separation_lower(P, Q, a, b, n)
            if best is None or up < best[0]:
                best = (up, lo, a, b, "alternating")
            if up - lo <= TOL_OBJ:
                break
        if best is not None and best[0] - best[1] <= TOL_OBJ:
            return best
    return _pair_model(P, Q, n)


def _anchor_point(piece):
    if isinstance(piece, Ball):
        return piece.center.copy()
    if isinstance(piece, AffineSubspace):
        return piece.base.copy()
    if isinstance(piece, HPolyhedron):
        p = project_polyhedron_euclidean(np.zeros(piece.dim), piece.A, piece.b)
        return np.zeros(piece.dim) if p is None else p
    return piece.point.copy()


def _alternate(P, Q, start, n, iters=400):
    b = start
    a = None
    for _ in range(iters):
        _, a_new, _, _ = _piece_distance(b, P, n)
        if a_new is None:
            return None, None
        _, b_new, _, _ = _piece_distance(a_new, Q, n)
        if b_new is None:
            return None, None
        done = a is not None and np.abs(a_new - a).max() < 1e-13 and np.abs(b_new - b).max() < 1e-13
        a, b = a_new, b_new
        if done:
            break
    return a, b


def _pair_model(P, Q, n):
    d = P.dim
    model = Model()
    a = model.var(d)
    b = model.var(d)
    t = model.var(1, lb=0.0)[0]
    model.member(a, P)
    model.member(b, Q)
    model.norm_le([(a, np.eye(d)), (b, -np.eye(d))], np.zeros(d), int(t), n)
    model.minimize([(np.array([t]), np.ones((1, 1)))])
    res = model.solve()
    if res.status == "infeasible":
        return np.inf, np.inf, None, None, res.method
    if not res.optimal:
        raise NumericalFailure("set distance subproblem failed")
    pa, pb = res.x[a], res.x[b]
    up = float(norm(pa - pb, n))
    lo = res.lower() if res.method == "exact-lp" else max(res.lower(), _separation_lower(P, Q, pa, pb, n))
    return up, max(0.0, min(lo, up)), pa, pb, res.method


def dist_set_set(A: SetRep, B: SetRep, n: NormSpec = EUCLIDEAN) -> Bracket:
    """Distance ``inf {||a - b|| : a in A, b in B}`` with certified bracket.

    The minimum is taken over all pairs of convex pieces.  Polyhedral pairs
    under polyhedral norms are solved exactly by linear programming;
    euclidean pairs by alternating projections certified with a support
    function lower bound, falling back to a conic solve.
    """
    if A.dim != B.dim:
        raise DimensionMismatch("sets differ in dimension")
    best = None
    lower = np.inf
    for P in A.pieces():
        for Q in B.pieces():
            up, lo, a, b, m = _pair_distance(P, Q, n)
            lower = min(lower, lo)
            if best is None or up < best[0]:
                best = (up, a, b, m)
    pts = () if best[1] is None else (best[1], best[2])
    return Bracket(best[0], min(lower, best[0]), best[0], best[3], pts)


# ---------------------------------------------------------------------------
# intersections of translated sets
# ---------------------------------------------------------------------------

def _affine_intersection(pieces):
    """Intersect affine pieces exactly; returns an AffineSubspace or None if empty."""
    d = pieces[0].dim
    rows = [p.normal_basis for p in pieces]
    rhs = [p.normal_basis @ p.base for p in pieces]
    N = np.vstack(rows)
    r = np.concatenate(rhs)
    if N.shape[0] == 0:
        return AffineSubspace(np.zeros(d), np.eye(d))
    base, *_ = np.linalg.lstsq(N, r, rcond=None)
    scale = 1.0 + np.abs(r).max()
    if np.abs(N @ base - r).max() > 1e-9 * scale:
        return None
    _, comp = orthonormal_basis(N, d)
    return AffineSubspace(base, comp)


def _tuple_intersection_distance(x, tup, n):
    """``d(x, C_1 ∩ ... ∩ C_k)`` for convex pieces: ``(value, lower, point, method)``."""
    d = x.size
    singles = [p for p in tup if is_singleton_piece(p)]
    if singles:
        p0 = singles[0].point
        if all(q._contains_piece(p0, TOL_MEMBER) for q in tup):
            v = float(norm(x - p0, n))
            return v, v, p0.copy(), "membership"
        return np.inf, np.inf, None, "membership"
    others = [p for p in tup if not (isinstance(p, Ball) and p.is_whole_space)]
    if not others:
        return 0.0, 0.0, x.copy(), "closed-form"
    if len(others) == 1:
        v, p, lo, m = _piece_distance(x, others[0], n)
        return v, lo, p, m
    if all(isinstance(p, AffineSubspace) for p in others):
        inter = _affine_intersection(others)
        if inter is None:
            return np.inf, np.inf, None, "closed-form"
        v, p, lo, m = _piece_distance(x, inter, n)
        return v, lo, p, m
    lin = combine_linear(others)
    if lin is not None and _is_euclid(n):
        G, h, E, e = lin
        p = project_polyhedron_euclidean(x, G, h, E, e)
        if p is None:
            return np.inf, np.inf, None, "lp-infeasible"
        v = float(np.linalg.norm(x - p))
        return v, v, p, "active-set"
    model = Model()
    y = model.var(d)
    t = model.var(1, lb=0.0)[0]
    for p in others:
        model.member(y, p)
    model.norm_le([(y, -np.eye(d))], x, int(t), n)
    model.minimize([(np.array([t]), np.ones((1, 1)))])
    res = model.solve()
    if res.status == "infeasible":
        return np.inf, np.inf, None, "lp-infeasible" if res.method == "exact-lp" else "conic-infeasible"
    if not res.optimal:
        raise NumericalFailure("intersection distance subproblem failed")
    p = res.x[y]
    v = float(norm(x - p, n))
    return v, max(0.0, min(v, res.lower())), p, res.method


def intersection_distance(x, sets, n: NormSpec = EUCLIDEAN) -> Bracket:
    """Distance from ``x`` to the intersection of ``sets`` (``inf`` when empty)."""
    x = np.asarray(x, dtype=float)
    check_dims(x, *[np.zeros(s.dim) for s in sets])
    best = (np.inf, np.inf, None, "membership")
    lower = np.inf
    for tup in product(*[s.pieces() for s in sets]):
        v, lo, p, m = _tuple_intersection_distance(x, tup, n)
        lower = min(lower, lo)
        if v < best[0]:
            best = (v, lo, p, m)
        if best[0] == 0.0:
            break
    pts = () if best[2] is None else (best[2],)
    method = best[3] if best[2] is not None else _empty_method(sets)
    return Bracket(best[0], min(lower, best[0]), best[0], method, pts)


def _empty_method(sets):
    kinds = set()
    for s in sets:
        for p in s.pieces():
            kinds.add("poly" if linear_description(p) is not None else "curved")
    return "lp-infeasible" if kinds <= {"poly"} else "conic-infeasible"


def intersection_meets_ball(sets, center, radius, n: NormSpec = EUCLIDEAN):
    """Decide whether ``∩ sets`` meets the open ball ``B_radius(center)``.

    Returns
    -------
    tuple
        ``(meets, bracket)`` where ``meets`` is True, False or None (undecided
        within the solver margin) and ``bracket`` is the intersection distance.
    """
    br = intersection_distance(center, sets, n)
    if br.upper < radius - TOL_FEAS:
        return True, br
    if br.lower >= radius:
        return False, br
    return None, br


def translate_all(sets, offsets, sign: float = -1.0):
    """``[Omega_i + sign * a_i]``, i.e. ``Omega_i - a_i`` by default."""
    return [s.translate(sign * np.asarray(a, dtype=float)) for s, a in zip(sets, offsets)]
