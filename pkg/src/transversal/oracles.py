"""Brute-force verifiers that do not share code paths with the main solvers.

The oracles use their own slack functions, scipy's HiGHS linear programming
and ``scipy.spatial.distance.cdist`` instead of the package's simplex method,
projection routines and conic models.  They are slow and limited to small
instances on purpose.

Slack functions are lower bounds on the euclidean distance to a convex piece
that are 1-Lipschitz in the point, which is what makes grid certificates
sound: if every grid point of spacing ``h`` has slack above the covering
radius ``h * sqrt(d) / 2`` for some set, no point of the region lies in all
sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.optimize import linprog, lsq_linear, minimize
from scipy.spatial.distance import cdist

from .errors import DimensionMismatch, PreconditionFailed, UnsupportedClass
from .norms import NormSpec, EUCLIDEAN
from .sets import AffineSubspace, Ball, HPolyhedron, PointCloud, SetRep
from .tolerances import TOL_FEAS

GRID_DIVISIONS = 128
MAX_GRID_POINTS = 4_000_000


# ---------------------------------------------------------------------------
# norms, computed independently of norms.py
# ---------------------------------------------------------------------------

def _p_of(n: NormSpec) -> float:
    if n.kind == "euclidean":
        return 2.0
    if n.kind == "maximum":
        return np.inf
    return float(n.p)


def _norm(v, n: NormSpec):
    return np.linalg.norm(np.atleast_2d(v), ord=_p_of(n), axis=1)


def _cdist(X, Y, n: NormSpec):
    p = _p_of(n)
    X, Y = np.atleast_2d(X), np.atleast_2d(Y)
    if p == 2.0:
        return cdist(X, Y, "euclidean")
    if np.isinf(p):
        return cdist(X, Y, "chebyshev")
    if p == 1.0:
        return cdist(X, Y, "cityblock")
    return cdist(X, Y, "minkowski", p=p)


def euclid_factor(n: NormSpec, d: int) -> float:
    """Smallest ``c`` with ``||v||_n <= c ||v||_2`` on R^d."""
    p = _p_of(n)
    if np.isinf(p) or p >= 2.0:
        return 1.0
    return float(d ** (1.0 / p - 0.5))


# ---------------------------------------------------------------------------
# slack functions
# ---------------------------------------------------------------------------

def _piece_slack(piece, X):
    """Lower bound on euclidean distance from each row of ``X`` to ``piece``."""
    if isinstance(piece, PointCloud):
        return np.linalg.norm(X - piece.points[0], axis=1)
    if isinstance(piece, HPolyhedron):
        A, b = piece.A, piece.b
        if A.shape[0] == 0:
            return np.zeros(X.shape[0])
        lens = np.linalg.norm(A, axis=1)
        lens[lens == 0] = 1.0
        viol = (X @ A.T - b) / lens
        return np.maximum(viol.max(axis=1), 0.0)
    if isinstance(piece, Ball):
        if not np.isfinite(piece.radius):
            return np.zeros(X.shape[0])
        L = euclid_factor(piece.norm, X.shape[1])
        return np.maximum((_norm(X - piece.center, piece.norm) - piece.radius) / L, 0.0)
    if isinstance(piece, AffineSubspace):
        D = piece.directions
        R = X - piece.base
        if D.shape[0] == 0:
            return np.linalg.norm(R, axis=1)
        coef, *_ = np.linalg.lstsq(D.T, R.T, rcond=None)
        return np.linalg.norm(R - (D.T @ coef).T, axis=1)
    raise UnsupportedClass(f"no slack for {type(piece).__name__}")


def set_slack(A: SetRep, X) -> np.ndarray:
    """Slack of a set: the minimum over its convex pieces."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.min([_piece_slack(p, X) for p in A.pieces()], axis=0)


def _snap(piece, g, n: NormSpec):
    """A member of ``piece`` near ``g`` (not necessarily the nearest one)."""
    if isinstance(piece, PointCloud):
        return piece.points[0].copy()
    if isinstance(piece, Ball):
        if not np.isfinite(piece.radius):
            return g.copy()
        v = g - piece.center
        r = float(_norm(v, piece.norm)[0])
        if r <= piece.radius:
            return g.copy()
        return piece.center + v * (piece.radius / r)
    if isinstance(piece, AffineSubspace):
        D = piece.directions
        if D.shape[0] == 0:
            return piece.base.copy()
        coef, *_ = np.linalg.lstsq(D.T, g - piece.base, rcond=None)
        return piece.base + D.T @ coef
    if isinstance(piece, HPolyhedron):
        # nearest point in the maximum norm, by HiGHS
        d = g.size
        A, b = piece.A, piece.b
        c = np.zeros(d + 1)
        c[-1] = 1.0
        eye = np.eye(d)
        rows = [np.hstack([A, np.zeros((A.shape[0], 1))]),
                np.hstack([eye, -np.ones((d, 1))]),
                np.hstack([-eye, -np.ones((d, 1))])]
        rhs = [b, g, -g]
        res = linprog(c, A_ub=np.vstack(rows), b_ub=np.concatenate(rhs),
                      bounds=[(None, None)] * d + [(0, None)], method="highs")
        if res.status != 0:
            return None
        return res.x[:d]
    raise UnsupportedClass(f"no snap for {type(piece).__name__}")


# ---------------------------------------------------------------------------
# grid distance oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OracleBracket:
    lower: float
    upper: float
    spacing: float
    point: np.ndarray | None = field(default=None, compare=False)

    @property
    def value(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def contains(self, v: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= v <= self.upper + tol


def _region_of(sets, region):
    if region is not None:
        lo, hi = (np.asarray(r, dtype=float) for r in region)
        return lo, hi
    boxes = []
    for s in sets:
        try:
            box = s.bounding_box()
        except Exception:
            box = None
        if box is not None:
            boxes.append(box)
    if not boxes:
        raise PreconditionFailed("region is unbounded; pass an explicit region")
    lo = np.max([b[0] for b in boxes], axis=0)
    hi = np.min([b[1] for b in boxes], axis=0)
    return lo, hi


def _grid(lo, hi, h):
    d = lo.size
    if d > 3:
        raise PreconditionFailed("grid oracles are limited to dimension <= 3")
    axes = []
    for k in range(d):
        m = max(1, int(np.ceil((hi[k] - lo[k]) / h - 1e-12)))
        axes.append(lo[k] + h * np.arange(m + 1))
    total = int(np.prod([a.size for a in axes]))
    if total > MAX_GRID_POINTS:
        raise PreconditionFailed(f"grid of {total} points exceeds the oracle budget")
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def grid_distance_oracle(x, A: SetRep, n: NormSpec = EUCLIDEAN, spacing: float | None = None,
                         region=None, snaps: int = 8) -> OracleBracket:
    """Bracket ``d(x, A)`` by a dense grid over a bounded region.

    Every grid point whose slack is below the covering radius ``r_h`` is a
    candidate; the nearest candidate minus ``c_n r_h`` is a lower bound for the
    distance to ``A`` restricted to the region.  The upper bound snaps the
    best candidates onto ``A``.

    Raises
    ------
    PreconditionFailed
        For unbounded sets without a region, or dimension above 3.
    """
    x = np.asarray(x, dtype=float)
    if x.size != A.dim:
        raise DimensionMismatch("point and set dimensions differ")
    lo, hi = _region_of([A], region)
    diam = float(np.linalg.norm(hi - lo))
    h = float(spacing) if spacing else max(diam, 1e-3) / GRID_DIVISIONS
    lo, hi = lo - h, hi + h
    G = _grid(lo, hi, h)
    rh = h * np.sqrt(x.size) / 2.0
    cand = G[set_slack(A, G) <= rh]
    if cand.shape[0] == 0:
        return OracleBracket(np.inf, np.inf, h)
    dist = _cdist(x[None, :], cand, n)[0]
    lower = max(0.0, float(dist.min()) - euclid_factor(n, x.size) * rh)
    order = np.argsort(dist, kind="stable")[:snaps]
    best, best_pt = np.inf, None
    for k in order:
        for piece in A.pieces():
            y = _snap(piece, cand[k], n)
            if y is None:
                continue
            v = float(_norm(x - y, n)[0])
            if v < best:
                best, best_pt = v, y
    for piece in A.pieces():
        if isinstance(piece, PointCloud):
            v = float(_norm(x - piece.points[0], n)[0])
            if v < best:
                best, best_pt = v, piece.points[0].copy()
    return OracleBracket(min(lower, best), best, h, best_pt)


# ---------------------------------------------------------------------------
# emptiness oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EmptinessResult:
    """``status`` is ``"empty"``, ``"nonempty"`` or ``"inconclusive"``."""

    status: str
    certificate: str
    margin: float
    witness: np.ndarray | None = field(default=None, compare=False)

    @property
    def empty(self) -> bool:
        return self.status == "empty"


_TIER = {"membership": 0, "lp-infeasible": 1, "outer-lp-infeasible": 2, "oracle-grid": 3}


def sphere_directions(d: int, k: int = 64) -> np.ndarray:
    """Unit directions used for outer approximations of curved balls."""
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        t = 2 * np.pi * np.arange(k) / k
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    if d == 3:
        m = 4 * k
        i = np.arange(m) + 0.5
        phi = np.arccos(1 - 2 * i / m)
        th = np.pi * (1 + 5 ** 0.5) * i
        return np.stack([np.cos(th) * np.sin(phi), np.sin(th) * np.sin(phi), np.cos(phi)], axis=1)
    eye = np.eye(d)
    signs = np.array(list(product([-1.0, 1.0], repeat=d))) / np.sqrt(d)
    return np.vstack([eye, -eye, signs])


def _own_linear(piece, d):
    """Rows ``(G, h)`` with ``piece = {G y <= h}`` (equalities as two rows), or None."""
    if isinstance(piece, PointCloud):
        p = piece.points[0]
        eye = np.eye(d)
        return np.vstack([eye, -eye]), np.concatenate([p, -p])
    if isinstance(piece, HPolyhedron):
        return piece.A, piece.b
    if isinstance(piece, AffineSubspace):
        D = piece.directions
        if D.shape[0]:
            U, s, _ = np.linalg.svd(D.T, full_matrices=True)
            rank = int(np.sum(s > 1e-10 * max(1.0, s.max())))
            N = U[:, rank:].T
        else:
            N = np.eye(d)
        if N.shape[0] == 0:
            return np.zeros((0, d)), np.zeros(0)
        r = N @ piece.base
        return np.vstack([N, -N]), np.concatenate([r, -r])
    if isinstance(piece, Ball):
        if not np.isfinite(piece.radius):
            return np.zeros((0, d)), np.zeros(0)
        c, r = piece.center, piece.radius
        if piece.norm.kind == "maximum":
            eye = np.eye(d)
            return np.vstack([eye, -eye]), np.concatenate([c + r, r - c])
        if piece.norm.kind == "p" and piece.norm.p == 1.0 and d <= 10:
            S = np.array(list(product([-1.0, 1.0], repeat=d)))
            return S, S @ c + r
        return None
    raise UnsupportedClass(f"no linear form for {type(piece).__name__}")


def _outer_rows(piece, d, shrink=1.0):
    """Outer polyhedral approximation of a curved ball (scaled by ``shrink``)."""
    U = sphere_directions(d)
    dual_p = _dual_p(piece.norm)
    h = U @ piece.center + shrink * piece.radius * np.linalg.norm(U, ord=dual_p, axis=1)
    return U, h


def _dual_p(n: NormSpec) -> float:
    p = _p_of(n)
    if p == 1.0:
        return np.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _max_violation_lp(G, h, d):
    """min t s.t. normalized rows of ``G y - h <= t``; returns (t, y)."""
    if G.shape[0] == 0:
        return -1.0, np.zeros(d)
    lens = np.linalg.norm(G, axis=1)
    lens[lens == 0] = 1.0
    Gn, hn = G / lens[:, None], h / lens
    c = np.zeros(d + 1)
    c[-1] = 1.0
    A = np.hstack([Gn, -np.ones((G.shape[0], 1))])
    res = linprog(c, A_ub=A, b_ub=hn, bounds=[(None, None)] * d + [(-1.0, None)], method="highs")
    if res.status != 0:
        return np.nan, None
    return float(res.x[-1]), res.x[:d]


def _member_all(pieces, y, ball, tol):
    """Exact membership test; open ball needs strict interior."""
    for p in pieces:
        if _piece_slack(p, y[None, :])[0] > tol:
            return False
    if ball is not None:
        c, r, bn = ball
        if not float(_norm(y - c, bn)[0]) < r - tol:
            return False
    return True


def _tuple_emptiness(tup, ball, tol, region):
    d = tup[0].dim
    singles = [p for p in tup if isinstance(p, PointCloud)]
    if singles:
        y = singles[0].points[0]
        slack = max(float(_piece_slack(p, y[None, :])[0]) for p in tup)
        if ball is not None:
            c, r, bn = ball
            dist = float(_norm(y - c, bn)[0])
            if dist >= r:
                return "empty", "membership", max(slack, dist - r), None
            if slack <= tol and dist < r - tol:
                return "nonempty", "membership", -slack, y.copy()
            if slack <= tol:
                return "inconclusive", "membership", 0.0, None
        if slack > tol:
            return "empty", "membership", slack, None
        return "nonempty", "membership", -slack, y.copy()

    ball_piece = None
    if ball is not None:
        c, r, bn = ball
        ball_piece = Ball(c, r, bn)
    all_pieces = list(tup) + ([ball_piece] if ball_piece is not None else [])
    linear = [_own_linear(p, d) for p in all_pieces]
    curved = [p for p, lin in zip(all_pieces, linear) if lin is None]

    def rows(shrink, ball_shrink):
        Gs, hs = [], []
        for p, lin in zip(all_pieces, linear):
            is_ball = p is ball_piece
            if lin is not None:
                G, h = lin
                if is_ball and ball_shrink:
                    # radius r - ball_shrink for the interior witness
                    G, h = _own_linear(Ball(p.center, max(p.radius - ball_shrink, 1e-300), p.norm), d)
                Gs.append(G)
                hs.append(h)
            else:
                s = shrink
                if is_ball and ball_shrink:
                    s = shrink * max(p.radius - ball_shrink, 0.0) / p.radius
                G, h = _outer_rows(p, d, s)
                Gs.append(G)
                hs.append(h)
        return np.vstack(Gs), np.concatenate(hs)

    G, h = rows(1.0, 0.0)
    t, y = _max_violation_lp(G, h, d)
    cert = "lp-infeasible" if not curved else "outer-lp-infeasible"
    if np.isfinite(t) and t > tol:
        return "empty", cert, t, None
    shrinks = [1.0] if not curved else [1.0, 0.9999, 0.999, 0.99, 0.95, 0.8]
    for s in shrinks:
        G2, h2 = rows(s, 4 * tol if ball is not None else 0.0)
        t2, y2 = _max_violation_lp(G2, h2, d)
        if y2 is not None and np.isfinite(t2) and t2 <= 0 and _member_all(tup, y2, ball, tol):
            return "nonempty", "lp-witness", -t2, y2
    if d <= 3:
        try:
            lo, hi = _region_of(all_pieces, region)
        except PreconditionFailed:
            return "inconclusive", "unbounded", 0.0, None
        if np.max(lo - hi) > tol:
            return "empty", "oracle-grid", float(np.max(lo - hi)), None
        hgrid = max(float(np.linalg.norm(hi - lo)), 1e-6) / GRID_DIVISIONS
        Gp = _grid(lo - hgrid, hi + hgrid, hgrid)
        rh = hgrid * np.sqrt(d) / 2.0
        worst = np.max([_piece_slack(p, Gp) for p in all_pieces], axis=0)
        if worst.min() > rh:
            return "empty", "oracle-grid", float(worst.min() - rh), None
    return "inconclusive", "margin", 0.0, None


def emptiness_oracle(sets, ball=None, region=None, tol: float = TOL_FEAS) -> EmptinessResult:
    """Decide whether ``∩ sets`` (optionally intersected with an open ball) is empty.

    Parameters
    ----------
    sets : list of SetRep
        The sets, already translated.
    ball : tuple, optional
        ``(center, radius, norm)`` of an open ball; ``radius = inf`` is ignored.
    region : tuple, optional
        ``(lo, hi)`` box used by the grid tier.

    Returns
    -------
    EmptinessResult
        ``certificate`` names the weakest tier needed (membership,
        lp-infeasible, outer-lp-infeasible, oracle-grid) or how a witness
        was found.
    """
    sets = list(sets)
    if not sets:
        raise PreconditionFailed("need at least one set")
    d = sets[0].dim
    if any(s.dim != d for s in sets):
        raise DimensionMismatch("sets differ in dimension")
    if ball is not None:
        c, r, bn = ball
        c = np.asarray(c, dtype=float)
        ball = None if not np.isfinite(r) else (c, float(r), NormSpec.parse(bn))
    tier, margin, undecided = 0, np.inf, False
    for tup in product(*[s.pieces() for s in sets]):
        status, cert, m, w = _tuple_emptiness(tup, ball, tol, region)
        if status == "nonempty":
            return EmptinessResult("nonempty", cert, m, w)
        if status == "inconclusive":
            undecided = True
            continue
        tier = max(tier, _TIER[cert])
        margin = min(margin, m)
    if undecided:
        return EmptinessResult("inconclusive", "margin", 0.0)
    name = {v: k for k, v in _TIER.items()}[tier]
    return EmptinessResult("empty", name, margin)


# ---------------------------------------------------------------------------
# cone distance oracle
# ---------------------------------------------------------------------------

def cone_distance_oracle(z, K, n: NormSpec = EUCLIDEAN) -> float:
    """``d(z, K)`` in the norm ``n`` via scipy (bounded least squares or HiGHS)."""
    z = np.asarray(z, dtype=float)
    if K.full:
        return 0.0
    G = K.generators
    if G.shape[0] == 0:
        return float(_norm(z, n)[0])
    p = _p_of(n)
    if p == 2.0:
        res = lsq_linear(G.T, z, bounds=(0.0, np.inf), method="bvls", tol=1e-14)
        return float(np.linalg.norm(G.T @ res.x - z))
    if p not in (1.0, np.inf):
        obj = lambda lam: float(np.linalg.norm(G.T @ np.maximum(lam, 0) - z, ord=p))
        res = minimize(obj, np.zeros(G.shape[0]), method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000})
        return obj(res.x)
    d, m = z.size, G.shape[0]
    eye = np.eye(d)
    if np.isinf(p):
        # vars (lam, t): |G^T lam - z|_k <= t
        c = np.r_[np.zeros(m), 1.0]
        A = np.vstack([np.hstack([G.T, -np.ones((d, 1))]), np.hstack([-G.T, -np.ones((d, 1))])])
        b = np.r_[z, -z]
        bounds = [(0, None)] * m + [(0, None)]
    else:
        # vars (lam, s): |G^T lam - z| <= s componentwise, minimize sum s
        c = np.r_[np.zeros(m), np.ones(d)]
        A = np.vstack([np.hstack([G.T, -eye]), np.hstack([-G.T, -eye])])
        b = np.r_[z, -z]
        bounds = [(0, None)] * m + [(0, None)] * d
    res = linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
    return float(res.fun)


# ---------------------------------------------------------------------------
# Ekeland verifiers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EVPCheck:
    """Clause margins; ``holds`` uses the classical form excluding ``x_hat``."""

    near: float
    descent: float
    strict_min: float
    strict_min_literal: float

    @property
    def holds(self) -> bool:
        return self.near > 0 and self.descent >= 0 and self.strict_min > 0

    @property
    def holds_literal(self) -> bool:
        return self.near > 0 and self.descent >= 0 and self.strict_min_literal > 0


def evp_exhaustive_check(dist_row, f, x_bar: int, x_hat: int, eps: float, lam: float) -> EVPCheck:
    """Evaluate the three Ekeland clauses at ``x_hat`` over every point.

    ``dist_row(i)`` returns the distances from point ``i`` to all points (a
    full matrix is accepted too).  The third clause is checked both over
    ``x != x_hat`` and, literally, over ``x != x_bar``.
    """
    if not callable(dist_row):
        M = np.asarray(dist_row, dtype=float)
        dist_row = lambda i: M[i]
    f = np.asarray(f, dtype=float)
    row = np.asarray(dist_row(x_hat), dtype=float)
    near = lam - float(row[x_bar])
    descent = float(f[x_bar] - f[x_hat])
    with np.errstate(invalid="ignore"):
        gap = f + (eps / lam) * row - f[x_hat]
    others = np.ones(f.size, dtype=bool)
    others[x_hat] = False
    strict = float(np.min(gap[others])) if others.any() else np.inf
    others_lit = np.ones(f.size, dtype=bool)
    others_lit[x_bar] = False
    strict_lit = float(np.min(gap[others_lit])) if others_lit.any() else np.inf
    return EVPCheck(near, descent, strict, strict_lit)


def product_space_row(clouds, radii, n: NormSpec = EUCLIDEAN):
    """Distance rows on ``cloud_1 x ... x cloud_m`` with metric ``max_i d_i / radii_i``.

    Points are indexed in C order over the factor indices.
    """
    mats = [_cdist(c, c, n) / r for c, r in zip(clouds, radii)]
    shape = tuple(c.shape[0] for c in clouds)

    def row(k):
        idx = np.unravel_index(k, shape)
        out = np.zeros(shape)
        for axis, (M, i) in enumerate(zip(mats, idx)):
            view = [1] * len(shape)
            view[axis] = shape[axis]
            out = np.maximum(out, M[i].reshape(view))
        return out.ravel()

    return row


@dataclass(frozen=True)
class GeometricEVPCheck:
    """Clauses of the geometric principle for ``n`` point clouds."""

    localized: bool
    no_increase: float
    breakpoint_margin: float
    breakpoints: int

    @property
    def holds(self) -> bool:
        return self.localized and self.no_increase >= 0 and self.breakpoint_margin >= 0


def _d1_clouds(clouds, masks, n):
    last = clouds[-1][masks[-1]]
    worst = np.zeros(last.shape[0])
    for c, m in zip(clouds[:-1], masks[:-1]):
        worst = np.maximum(worst, _cdist(last, c[m], n).min(axis=1))
    return float(worst.min())


def geometric_evp_check(clouds, start, hat, eps: float, radii, n: NormSpec = EUCLIDEAN,
                        scale_tol: float = 1e-12) -> GeometricEVPCheck:
    """Exhaustively check the localized conclusion for point clouds.

    ``clouds`` are arrays of points; ``start``/``hat`` are indices of the given
    and returned points in each cloud; ``radii`` holds the localization radius
    per cloud (``lambda`` for the first ``n-1``, ``rho`` for the last).  The
    strict inequality ``d1(localizations at xi) + xi*eps > d1(hat)`` for all
    ``xi > 0`` reduces to ``D(beta) + beta*eps >= d1(hat)`` at each breakpoint
    ``beta`` where a point enters a localization (open balls).
    """
    clouds = [np.atleast_2d(np.asarray(c, dtype=float)) for c in clouds]
    pts = [c[i] for c, i in zip(clouds, hat)]
    orig = [c[i] for c, i in zip(clouds, start)]
    localized = all(float(_norm(p - q, n)[0]) < r for p, q, r in zip(pts, orig, radii))

    def d1_points(P):
        return float(max(_norm(P[i] - P[-1], n)[0] for i in range(len(P) - 1)))

    d_hat = d1_points(pts)
    no_increase = d1_points(orig) - d_hat
    ts = [(_cdist(c, p[None, :], n)[:, 0]) / r for c, p, r in zip(clouds, pts, radii)]
    betas = np.unique(np.concatenate(ts))
    margin = np.inf
    for beta in betas:
        masks = [t <= beta for t in ts]
        D = _d1_clouds(clouds, masks, n)
        margin = min(margin, D + beta * eps - d_hat + scale_tol * (1.0 + d_hat))
    return GeometricEVPCheck(localized, no_increase, margin, int(betas.size))


# ---------------------------------------------------------------------------
# inequality replay
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReplayItem:
    name: str
    lhs: float
    rhs: float
    strict: bool
    margin: float

    @property
    def holds(self) -> bool:
        return self.margin > 0 if self.strict else self.margin >= 0


@dataclass(frozen=True)
class ReplayReport:
    kind: str
    items: tuple

    @property
    def all_hold(self) -> bool:
        return all(it.holds for it in self.items)

    def failures(self):
        return [it for it in self.items if not it.holds]


def _lt(name, lhs, rhs):
    return ReplayItem(name, float(lhs), float(rhs), True, float(rhs - lhs))


def _le(name, lhs, rhs, tol=0.0):
    return ReplayItem(name, float(lhs), float(rhs), False, float(rhs - lhs + tol))


def chebyshev_radius_oracle(points, n: NormSpec = EUCLIDEAN):
    """``(lower, upper)`` for the smallest enclosing radius of a point set."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    p = _p_of(n)
    if np.isinf(p):
        c = 0.5 * (P.min(axis=0) + P.max(axis=0))
        r = float(_norm(P - c, n).max())
        return r, r
    obj = lambda x: float(_norm(P - x, n).max())
    x0 = P.mean(axis=0)
    res = minimize(obj, x0, method="Nelder-Mead",
                   options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 40000})
    upper = min(obj(res.x), obj(x0))
    lower = float(_cdist(P, P, n).max()) / 2.0
    if p == 2.0:
        # dual bound: any weights mu give sum mu_i |p_i - mean_mu|^2 <= r^2
        mu = np.full(P.shape[0], 1.0 / P.shape[0])
        for k in range(2000):
            c = mu @ P
            far = int(np.argmax(np.linalg.norm(P - c, axis=1)))
            step = 1.0 / (k + 2)
            mu = (1 - step) * mu
            mu[far] += step
        c = mu @ P
        val = float(mu @ np.sum((P - c) ** 2, axis=1))
        lower = max(lower, np.sqrt(max(val, 0.0)))
    return min(lower, upper), upper


def inequality_replay(kind: str, instance: dict) -> ReplayReport:
    """Recompute both sides of the inequalities of a stored instance.

    Kinds
    -----
    ``rebalance``: ``z`` (output rows), ``cones``, ``norm``, ``eps``, ``lam``;
    checks zero sum, ``sum d(z_i, K_i) < eps/lam`` and normalization.
    ``snap``: ``z``, ``cones``, ``norm``, ``eps``, ``rho``; checks membership,
    ``||sum z_i|| < eps/rho`` and normalization.
    ``pairing``: ``z``, ``x``, ``norm``, ``tau_hat``; checks
    ``sum <z_i, x_i> > tau_hat max ||x_i||``.
    ``distance-chain``: ``points``, ``norm``; checks ``d2 <= d1 <= 2 d2`` and
    ``d2 <= d3 <= 2 d2`` with oracle brackets for ``d2``.
    ``translation-bound``: ``a``, ``bound``, ``norm``; checks ``max ||a_i|| < bound``.
    """
    n = NormSpec.parse(instance.get("norm", "euclidean"))
    dual = n.dual()
    items = []
    if kind in ("rebalance", "snap"):
        z = np.atleast_2d(np.asarray(instance["z"], dtype=float))
        cones = instance["cones"]
        lens = _norm(z, dual)
        dists = np.array([cone_distance_oracle(zi, K, dual) for zi, K in zip(z, cones)])
        items.append(_le("normalization", abs(lens.sum() - 1.0), 0.0, 1e-9))
        if kind == "rebalance":
            items.append(_le("zero-sum", float(np.abs(z.sum(axis=0)).max()), 0.0, 1e-12))
            items.append(_lt("cone-defect", dists.sum(), instance["eps"] / instance["lam"]))
        else:
            items.append(_le("cone-membership", float(dists.max()), 0.0, 1e-9))
            items.append(_lt("sum-defect", float(_norm(z.sum(axis=0), dual)[0]),
                             instance["eps"] / instance["rho"]))
    elif kind == "pairing":
        z = np.atleast_2d(np.asarray(instance["z"], dtype=float))
        x = np.atleast_2d(np.asarray(instance["x"], dtype=float))
        M = float(_norm(x, n).max())
        items.append(_lt("pairing", instance["tau_hat"] * M, float(np.sum(z * x))))
    elif kind == "distance-chain":
        P = np.asarray(instance["points"], dtype=float)
        if P.ndim == 1:
            P = P[:, None]
        d1 = float(_norm(P[:-1] - P[-1], n).max())
        d3 = float(_norm(P - P.mean(axis=0), n).max())
        lo, hi = chebyshev_radius_oracle(P, n)
        tol = 1e-9 * (1.0 + hi)
        items += [_le("d2<=d1", lo, d1, tol), _le("d1<=2d2", d1, 2 * hi, tol),
                  _le("d2<=d3", lo, d3, tol), _le("d3<=2d2", d3, 2 * hi, tol)]
    elif kind == "translation-bound":
        a = np.atleast_2d(np.asarray(instance["a"], dtype=float))
        items.append(_lt("max-norm", float(_norm(a, n).max()), instance["bound"]))
    else:
        raise PreconditionFailed(f"unknown replay kind {kind!r}")
    return ReplayReport(kind, tuple(items))
