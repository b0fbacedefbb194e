"""Translation vectors that push sets apart, and checks of the primal conditions.

The primal conditions describe a collection of sets whose (localized)
intersection becomes empty after small translations.  They are addressed by
descriptive names:

=============================  ==============================================
name                           shape
=============================  ==============================================
extremal                       ``∩(Ω_i - a_i) = ∅``, ``max |a_i| < ε``
local-extremal                 ``∩(Ω_i - a_i) ∩ B_ρ(x̄) = ∅``, ``max |a_i| < ε``
approx-stationary              ``∩(Ω_i - ω_i - a_i) ∩ ρB = ∅``, ``max |a_i| < ερ``
extremal-asymmetric            as extremal, the last set is not translated
local-extremal-asymmetric      as local-extremal, last set not translated
approx-stationary-asymmetric   as approx-stationary, last set not translated
alpha-stationary               approx-stationary with bound ``αρ``
alpha-stationary-asymmetric    asymmetric version with bound ``αρ``
metric-at-point                ``α d(x̄, ∩(Ω_i - a_i)) > max d(x̄, Ω_i - a_i)``
metric-near-point              the same at a point ``x`` with ``|x - x̄| < ε``
=============================  ==============================================

Balls ``B`` and ``ρB`` are open.  For the stationarity shapes ``ρ`` must lie in
``]0, ε[`` and ``ω_i`` in ``Ω_i ∩ B_ε(x̄)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .cones import ConeRep, dist_to_cone, normal_cone
from .distances import d1_points, d1_sets
from .errors import DimensionMismatch, NotFoundAtBudget, PreconditionFailed
from .geometry import Bracket, intersection_distance, nearest_point
from .model import Model
from .norms import EUCLIDEAN, NormSpec, dual_norm, norm, norming_vector, unit_ball_vertices
from .sets import Ball, SetRep, is_singleton_piece, linear_description
from .tolerances import TOL_FEAS, TOL_MEMBER

MAX_HALVINGS = 40
THETA_CAP = 1e6


@dataclass(frozen=True)
class TranslationSet:
    """Translation vectors ``a_i`` (rows) with the data they refer to."""

    vectors: np.ndarray
    rho: float = np.inf
    witness: np.ndarray | None = None
    points: np.ndarray | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        object.__setattr__(self, "vectors", a)
        if not self.rho > 0:
            raise PreconditionFailed("rho must be positive")
        if self.points is not None:
            pts = np.atleast_2d(np.asarray(self.points, dtype=float))
            if pts.shape[1] != a.shape[1]:
                raise DimensionMismatch("points and vectors differ in dimension")
            object.__setattr__(self, "points", pts)
        if self.witness is not None:
            object.__setattr__(self, "witness", np.asarray(self.witness, dtype=float))

    def max_norm(self, n: NormSpec = EUCLIDEAN) -> float:
        return float(np.max(norm(self.vectors, n))) if self.vectors.size else 0.0

    def to_dict(self) -> dict:
        out = {"vectors": self.vectors.tolist(), "rho": self.rho}
        if self.points is not None:
            out["points"] = self.points.tolist()
        if self.witness is not None:
            out["witness"] = self.witness.tolist()
        out.update({k: v for k, v in self.meta.items() if isinstance(v, (int, float, str, bool))})
        return out


@dataclass(frozen=True)
class PrimalCheckResult:
    """Outcome of a primal condition check.

    ``holds`` is True only with a certificate (``membership``,
    ``lp-infeasible``, ``outer-lp-infeasible``, ``oracle-grid`` or
    ``metric-bracket``), False when refuted, None when undecided
    (certificate ``sample-budget``).
    """

    condition: str
    holds: bool | None
    certificate: str
    margins: dict = field(default_factory=dict)
    bracket: Bracket | None = None


@dataclass(frozen=True)
class _Shape:
    asymmetric: bool
    localized: str  # "none", "x_bar" or "origin"
    bound: str  # "eps", "eps_rho" or "alpha_rho"
    metric: bool = False


CONDITIONS = {
    "extremal": _Shape(False, "none", "eps"),
    "local-extremal": _Shape(False, "x_bar", "eps"),
    "approx-stationary": _Shape(False, "origin", "eps_rho"),
    "extremal-asymmetric": _Shape(True, "none", "eps"),
    "local-extremal-asymmetric": _Shape(True, "x_bar", "eps"),
    "approx-stationary-asymmetric": _Shape(True, "origin", "eps_rho"),
    "alpha-stationary": _Shape(False, "origin", "alpha_rho"),
    "alpha-stationary-asymmetric": _Shape(True, "origin", "alpha_rho"),
    "metric-at-point": _Shape(False, "none", "eps", metric=True),
    "metric-near-point": _Shape(False, "none", "eps", metric=True),
}


# ---------------------------------------------------------------------------
# emptiness
# ---------------------------------------------------------------------------

def _polyhedral_only(sets, ball_norm):
    for s in sets:
        for p in s.pieces():
            if linear_description(p) is None:
                return False
    return ball_norm is None or ball_norm.is_polyhedral or ball_norm.kind == "euclidean"


def decide_empty(sets, center=None, radius: float = np.inf, n: NormSpec = EUCLIDEAN):
    """Decide whether ``∩ sets ∩ B_radius(center)`` (open ball) is empty.

    Polyhedral data and finite point sets are decided exactly through the
    intersection distance.  Curved data is confirmed by the grid and
    outer-approximation tiers of :func:`transversal.oracles.emptiness_oracle`.

    Returns
    -------
    tuple
        ``(empty, certificate, margin, bracket)`` with ``empty`` in
        ``{True, False, None}``.
    """
    d = sets[0].dim
    c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    br = intersection_distance(c, sets, n)
    finite_ball = np.isfinite(radius)
    if finite_ball:
        if br.upper < radius - TOL_FEAS:
            return False, "witness", br.upper - radius, br
        empty = True if br.lower >= radius else None
        margin = br.lower - radius
    else:
        if np.isfinite(br.upper):
            return False, "witness", -np.inf, br
        empty, margin = True, np.inf
    if empty and _polyhedral_only(sets, n if finite_ball else None):
        singles = all(is_singleton_piece(p) for s in sets for p in s.pieces())
        return True, "membership" if singles else "lp-infeasible", margin, br
    from .oracles import emptiness_oracle

    ball = (c, radius, n) if finite_ball else None
    try:
        res = emptiness_oracle(sets, ball=ball)
    except PreconditionFailed:
        return None, "sample-budget", 0.0, br
    if res.status == "empty":
        return True, res.certificate, min(margin, res.margin), br
    if res.status == "nonempty":
        return False, "witness", -res.margin, br
    return None, "sample-budget", 0.0, br


# ---------------------------------------------------------------------------
# primal condition checks
# ---------------------------------------------------------------------------

def _rows(a, d):
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape[1] != d:
        raise DimensionMismatch("translation vectors and sets differ in dimension")
    return a


def check_primal_condition(condition: str, sets, a, *, eps: float, rho: float = np.inf,
                           alpha: float | None = None, x_bar=None, omegas=None, x=None,
                           n: NormSpec = EUCLIDEAN) -> PrimalCheckResult:
    """Evaluate a primal condition (see the module table) on concrete data.

    Parameters
    ----------
    condition : str
        A key of :data:`CONDITIONS`.
    sets : list of SetRep
    a : array_like
        Translation vectors, ``n`` rows (``n - 1`` for asymmetric shapes).
    eps, rho, alpha : float
        Parameters of the chosen shape.
    x_bar, omegas, x : array_like, optional
        Reference point, base points and (for ``metric-near-point``) the point.

    Returns
    -------
    PrimalCheckResult
        ``margins`` holds ``bound`` (bound minus largest translation) and
        ``emptiness`` or ``metric`` margins.
    """
    if condition not in CONDITIONS:
        raise PreconditionFailed(f"unknown condition {condition!r}")
    shape = CONDITIONS[condition]
    sets = list(sets)
    k = len(sets)
    if k < 2:
        raise PreconditionFailed("need at least two sets")
    d = sets[0].dim
    a = _rows(a, d)
    expected = k - 1 if shape.asymmetric else k
    if a.shape[0] != expected:
        raise PreconditionFailed(f"{condition} needs {expected} translation vectors, got {a.shape[0]}")
    if not eps > 0:
        raise PreconditionFailed("eps must be positive")
    largest = float(np.max(norm(a, n)))
    margins = {}
    if shape.bound == "eps":
        bound = eps
    elif shape.bound == "eps_rho":
        bound = eps * rho
    else:
        if alpha is None or not alpha > 0:
            raise PreconditionFailed(f"{condition} needs alpha > 0")
        bound = alpha * rho
    margins["bound"] = bound - largest
    bound_ok = largest < bound

    if shape.metric:
        return _check_metric(condition, sets, a, eps, alpha, x_bar, x, n, margins, bound_ok)

    shifted = list(sets)
    center, radius = None, np.inf
    if shape.localized == "x_bar":
        if x_bar is None:
            raise PreconditionFailed(f"{condition} needs x_bar")
        center, radius = np.asarray(x_bar, dtype=float), rho
    elif shape.localized == "origin":
        if omegas is None or x_bar is None:
            raise PreconditionFailed(f"{condition} needs x_bar and base points")
        if not 0 < rho < eps:
            raise PreconditionFailed("rho must lie in ]0, eps[")
        om = _rows(omegas, d)
        xb = np.asarray(x_bar, dtype=float)
        for s, w in zip(sets, om):
            if not s.contains(w, TOL_MEMBER):
                raise PreconditionFailed("base point outside its set")
        near = float(np.max(norm(om - xb, n)))
        margins["base_points"] = eps - near
        if not near < eps:
            return PrimalCheckResult(condition, False, "base-points", margins)
        shifted = [s.translate(-w) for s, w in zip(sets, om)]
        center, radius = np.zeros(d), rho
    moved = [s.translate(-ai) for s, ai in zip(shifted, a)]
    if shape.asymmetric:
        moved.append(shifted[-1])
    empty, cert, margin, br = decide_empty(moved, center, radius, n)
    margins["emptiness"] = margin
    if empty is None:
        return PrimalCheckResult(condition, None if bound_ok else False, cert, margins, br)
    return PrimalCheckResult(condition, bool(empty and bound_ok), cert, margins, br)


def _metric_sides(sets, a, point, n):
    moved = [s.translate(-ai) for s, ai in zip(sets, a)]
    inter = intersection_distance(point, moved, n)
    sides = [nearest_point(point, s, n) for s in moved]
    return inter, sides


def _check_metric(condition, sets, a, eps, alpha, x_bar, x, n, margins, bound_ok):
    if alpha is None or not alpha > 0:
        raise PreconditionFailed(f"{condition} needs alpha > 0")
    if x_bar is None:
        raise PreconditionFailed(f"{condition} needs x_bar")
    point = np.asarray(x_bar, dtype=float)
    if condition == "metric-near-point":
        if x is None:
            raise PreconditionFailed("metric-near-point needs the point x")
        x = np.asarray(x, dtype=float)
        margins["point"] = eps - float(norm(x - point, n))
        if not margins["point"] > 0:
            return PrimalCheckResult(condition, False, "metric-bracket", margins)
        point = x
    inter, sides = _metric_sides(sets, a, point, n)
    lhs_lo, lhs_hi = alpha * inter.lower, alpha * inter.upper
    rhs_lo = max(s.lower for s in sides)
    rhs_hi = max(s.upper for s in sides)
    margins["metric"] = lhs_lo - rhs_hi
    br = Bracket(lhs_lo - rhs_hi, lhs_lo - rhs_hi, lhs_hi - rhs_lo, "metric-bracket")
    if lhs_lo > rhs_hi:
        return PrimalCheckResult(condition, bool(bound_ok), "metric-bracket", margins, br)
    if lhs_hi <= rhs_lo:
        return PrimalCheckResult(condition, False, "metric-bracket", margins, br)
    return PrimalCheckResult(condition, None if bound_ok else False, "sample-budget", margins, br)


# ---------------------------------------------------------------------------
# near-closest points
# ---------------------------------------------------------------------------

def translations_from_near_closest(sets, omegas, eps: float, n: NormSpec = EUCLIDEAN) -> TranslationSet:
    """Translations ``a_i = (ε'/M)(ω_n - ω_i)`` built from near-closest points.

    With ``M = d1(ω)`` and ``D = d1(Ω)``: when ``D > 0``, ``ε'`` is the midpoint
    of ``]M - D, min(ε, M)[``; when ``D`` cannot be separated from zero,
    ``ε' = M``.  Either way ``∩_{i<n}(Ω_i - ω_i - a_i) ∩ (Ω_n - ω_n) = ∅`` and
    ``max |a_i| < ε``; the result is verified and stored in ``meta["check"]``.

    Raises
    ------
    PreconditionFailed
        If the sets intersect, a point is outside its set, or
        ``d1(ω) < d1(Ω) + ε`` fails.
    """
    sets = list(sets)
    if not eps > 0:
        raise PreconditionFailed("eps must be positive")
    d = sets[0].dim
    om = _rows(omegas, d)
    if om.shape[0] != len(sets):
        raise PreconditionFailed("need one point per set")
    for s, w in zip(sets, om):
        if not s.contains(w, TOL_MEMBER):
            raise PreconditionFailed("point outside its set")
    empty, cert, _, _ = decide_empty(sets, None, np.inf, n)
    if empty is not True:
        raise PreconditionFailed("the sets intersect" if empty is False else
                                 "could not certify that the sets do not intersect")
    M = d1_points(om, n)
    D = d1_sets(sets, n)
    if not M < D.lower + eps:
        raise PreconditionFailed(f"points are not eps-near-closest: d1(points) = {M!r}, "
                                 f"d1(sets) >= {D.lower!r}, eps = {eps!r}")
    if D.lower > 0:
        lo, hi = M - D.lower, min(eps, M)
        eps_prime = 0.5 * (lo + hi)
        branch = "positive"
    else:
        if not M < eps:
            raise PreconditionFailed("zero-distance branch needs d1(points) < eps")
        eps_prime = M
        branch = "zero"
        lo, hi = 0.0, M
    a = (eps_prime / M) * (om[-1] - om[:-1])
    meta = {"epsilon_prime": eps_prime, "M": M, "d1_lower": D.lower, "d1_upper": D.upper,
            "branch": branch, "interval_lower": lo, "interval_upper": hi}
    shifted = [s.translate(-w) for s, w in zip(sets, om)]
    check = check_primal_condition("extremal-asymmetric", shifted, a, eps=eps, n=n)
    meta["check"] = check
    return TranslationSet(a, np.inf, None, om, meta)


# ---------------------------------------------------------------------------
# metric conditions
# ---------------------------------------------------------------------------

def extremal_to_metric_condition(sets, x_bar, a, eps: float, rho: float,
                                 n: NormSpec = EUCLIDEAN) -> PrimalCheckResult:
    """Pass from local extremality with ``(ε, ρ)`` to the metric condition at ``x̄``.

    ``α = ε/ρ``; the same translations work because ``d(x̄, ∩(Ω_i - a_i)) >= ρ``.

    Raises
    ------
    PreconditionFailed
        If local extremality is not certified.
    """
    base = check_primal_condition("local-extremal", sets, a, eps=eps, rho=rho, x_bar=x_bar, n=n)
    if base.holds is not True:
        raise PreconditionFailed("local extremality is not certified for the given data")
    res = check_primal_condition("metric-at-point", sets, a, eps=eps, alpha=eps / rho, x_bar=x_bar, n=n)
    margins = dict(res.margins)
    margins["alpha"] = eps / rho
    return PrimalCheckResult(res.condition, res.holds, res.certificate, margins, res.bracket)


@dataclass(frozen=True)
class AlphaStationaryData:
    """Output of :func:`metric_to_alpha_stationary`: radius, base points, translations and check."""

    rho: float
    omegas: np.ndarray
    translations: np.ndarray
    check: PrimalCheckResult
    omega_in_ball: bool
    meta: dict = field(default_factory=dict)


def metric_to_alpha_stationary(sets, x_bar, a, eps: float, rho: float,
                               n: NormSpec = EUCLIDEAN) -> AlphaStationaryData:
    """Turn metric-condition data with ``α = ε/ρ`` into alpha-stationarity data.

    ``ρ'`` is the midpoint of ``]max d(x̄, Ω_i - a_i)/α, min(ρ, d(x̄, ∩(Ω_i - a_i)))[``,
    ``ω_i`` a nearest point of ``Ω_i`` to ``x̄ + a_i`` (or ``x̄`` itself when
    ``|a_i| < αρ'``) and ``a_i' = a_i + x̄ - ω_i``.  The nearest-point choice
    only guarantees ``|ω_i - x̄| < 2ε``; ``omega_in_ball`` reports whether
    ``ω_i ∈ B_ε(x̄)`` holds for the returned points.

    Raises
    ------
    PreconditionFailed
        If the metric condition is not certified.
    NotFoundAtBudget
        If the nearest points do not certify the strict bound.
    """
    alpha = eps / rho
    base = check_primal_condition("metric-at-point", sets, a, eps=eps, alpha=alpha, x_bar=x_bar, n=n)
    if base.holds is not True:
        raise PreconditionFailed("the metric condition is not certified for the given data")
    xb = np.asarray(x_bar, dtype=float)
    a = _rows(a, xb.size)
    moved = [s.translate(-ai) for s, ai in zip(sets, a)]
    inter = intersection_distance(xb, moved, n)
    sides = [nearest_point(xb, s, n) for s in moved]
    lo = max(s.upper for s in sides) / alpha
    hi = min(rho, inter.lower)
    if not lo < hi:
        raise NotFoundAtBudget("no admissible radius between the metric brackets")
    rho_p = 0.5 * (lo + hi)
    omegas, a_new = [], []
    for s, ai, side in zip(sets, a, sides):
        if float(norm(ai, n)) < alpha * rho_p:
            w = xb.copy()
        else:
            w = side.points[0] + ai
        omegas.append(w)
        a_new.append(ai + xb - w)
    omegas, a_new = np.array(omegas), np.array(a_new)
    in_ball = bool(np.max(norm(omegas - xb, n)) < eps)
    eps_check = eps if in_ball else 2.0 * eps
    eps_check = max(eps_check, rho_p * (1 + 1e-12))
    check = check_primal_condition("alpha-stationary", sets, a_new, eps=eps_check, rho=rho_p, alpha=alpha,
                                   x_bar=xb, omegas=omegas, n=n)
    if check.margins.get("bound", -1.0) <= 0:
        raise NotFoundAtBudget("nearest points do not certify the translation bound")
    meta = {"radius_interval": (lo, hi), "eps_used": eps_check, "alpha": alpha}
    return AlphaStationaryData(rho_p, omegas, a_new, check, in_ball, meta)


# ---------------------------------------------------------------------------
# how far the sets can be pushed apart
# ---------------------------------------------------------------------------

def _ray_limit(tup, v, x_bar, rho, n, minimize=False):
    """``max r`` (or ``min r``) with ``y + r v_i`` in the pieces and ``|y - x̄| <= ρ``."""
    d = x_bar.size
    model = Model()
    y = model.var(d)
    r = model.var(1, lb=0.0, ub=THETA_CAP)[0]
    eye = np.eye(d)
    for piece, vi in zip(tup, v):
        w = model.var(d)
        model.eq([(w, eye), (y, -eye), (np.array([r]), -vi[:, None])], np.zeros(d))
        model.member(w, piece)
    if np.isfinite(rho):
        model.norm_le([(y, eye)], -x_bar, rho, n)
    model.minimize([(np.array([r]), np.ones((1, 1)) * (1.0 if minimize else -1.0))])
    res = model.solve()
    if not res.optimal:
        return None
    val = float(res.x[r])
    if not minimize and val >= THETA_CAP * (1 - 1e-9):
        return np.inf
    return val


def _sphere(d: int, k: int) -> np.ndarray:
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        t = 2 * np.pi * np.arange(k) / k
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    rng = np.random.default_rng(k)
    g = rng.standard_normal((k, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _circumscribed(n: NormSpec, d: int, k: int) -> np.ndarray:
    """Vertices of a polytope containing the unit ball of ``n``."""
    if n.is_polyhedral:
        return unit_ball_vertices(n, d)
    if n.kind == "euclidean" or n.exponent == 2.0:
        if d == 2:
            t = 2 * np.pi * (np.arange(k) + 0.5) / k
            return np.stack([np.cos(t), np.sin(t)], axis=1) / np.cos(np.pi / k)
        return unit_ball_vertices(NormSpec("maximum"), d)
    # any p-norm ball lies in the max-norm unit cube
    return unit_ball_vertices(NormSpec("maximum"), d)


def theta_rho(sets, x_bar, rho: float, n: NormSpec = EUCLIDEAN, directions: int = 16,
              samples: int = 64, seed: int = 0) -> Bracket:
    """Bracket ``sup{r : ∩(Ω_i - a_i) ∩ B_ρ(x̄) ≠ ∅ for all |a_i| < r}``.

    For convex sets the translations keeping the localized intersection
    nonempty form a convex set, so the value is the minimum over extreme
    translation tuples of the largest feasible step; polyhedral norms give the
    exact value, the euclidean norm a lower bound from a circumscribed polygon
    and an upper bound from unit directions.  Nonconvex sets only get sampled
    upper bounds (lower bound 0).

    Raises
    ------
    PreconditionFailed
        If ``x̄`` is not a common point.
    """
    sets = list(sets)
    xb = np.asarray(x_bar, dtype=float)
    d = xb.size
    for s in sets:
        if s.dim != d:
            raise DimensionMismatch("point and sets differ in dimension")
        if not s.contains(xb, TOL_MEMBER):
            raise PreconditionFailed("x_bar is not in the intersection of the sets")
    if not rho > 0:
        raise PreconditionFailed("rho must be positive")
    k = len(sets)
    if all(isinstance(s, Ball) and s.is_whole_space for s in sets):
        return Bracket(np.inf, np.inf, np.inf, "closed-form")
    convex = all(s.is_convex for s in sets)
    if convex:
        pieces = [s.pieces()[0] for s in sets]
        verts = _circumscribed(n, d, directions)
        lower = np.inf
        for combo in product(range(verts.shape[0]), repeat=k):
            v = verts[list(combo)]
            r = _ray_limit(pieces, v, xb, rho, n)
            if r is None:
                r = 0.0
            lower = min(lower, r)
        if n.is_polyhedral:
            return Bracket(lower, lower, lower, "exact-lp")
        rng = np.random.default_rng(seed)
        dirs = _sphere(d, directions)
        norms_ = norm(verts, n)
        cand = [verts / norms_[:, None]]
        upper = np.inf
        tuples = list(product(range(cand[0].shape[0]), repeat=k))
        for combo in tuples:
            v = cand[0][list(combo)]
            r = _ray_limit(pieces, v, xb, rho, n)
            upper = min(upper, 0.0 if r is None else r)
        for _ in range(samples):
            v = dirs[rng.integers(0, dirs.shape[0], size=k)]
            v = v / norm(v, n)[:, None]
            r = _ray_limit(pieces, v, xb, rho, n)
            upper = min(upper, 0.0 if r is None else r)
        return Bracket(0.5 * (lower + upper), min(lower, upper), upper, "conic")
    # nonconvex: first gap along sampled rays
    rng = np.random.default_rng(seed)
    dirs = _sphere(d, directions) if not n.is_polyhedral else unit_ball_vertices(n, d)
    dirs = dirs / norm(dirs, n)[:, None]
    upper = np.inf
    tuples = list(product(*[s.pieces() for s in sets]))
    for _ in range(samples):
        v = dirs[rng.integers(0, dirs.shape[0], size=k)]
        spans = []
        for tup in tuples:
            hi = _ray_limit(tup, v, xb, rho, n)
            if hi is None:
                continue
            lo = _ray_limit(tup, v, xb, rho, n, minimize=True)
            spans.append((lo, hi))
        spans.sort()
        reach = 0.0
        for lo, hi in spans:
            if lo > reach + 1e-12:
                break
            reach = max(reach, hi)
        upper = min(upper, reach)
    return Bracket(upper, 0.0, upper, "sampled")


# ---------------------------------------------------------------------------
# reversal: dual vectors to translations
# ---------------------------------------------------------------------------

def _frechet_radius(sets, omegas, cone_vectors, scale: float) -> float:
    """Largest ``δ = 2^-k`` such that pieces not through ``ω_i`` are farther than ``scale·δ``.

    On the pieces through ``ω_i`` the cone vector satisfies ``<y*, ω - ω_i> <= 0``
    exactly (it lies in each of their normal cones).  Returns ``inf`` when
    every piece passes through its point.
    """
    gaps = []
    for s, w, y in zip(sets, omegas, cone_vectors):
        for p in s.pieces():
            if p._contains_piece(w, TOL_MEMBER):
                continue
            gaps.append(nearest_point(w, p, EUCLIDEAN).lower)
    if not gaps:
        return np.inf
    gap = min(gaps)
    delta = 1.0
    for _ in range(MAX_HALVINGS):
        if gap > scale * delta * 1.01:
            return delta
        delta *= 0.5
    raise NotFoundAtBudget("localization radius search exhausted its halvings")


def _reversal_inputs(sets, omegas, duals, n):
    sets = list(sets)
    d = sets[0].dim
    om = _rows(omegas, d)
    z = _rows(duals, d)
    if not (om.shape[0] == z.shape[0] == len(sets)):
        raise PreconditionFailed("need one point and one dual vector per set")
    for s, w in zip(sets, om):
        if not s.contains(w, TOL_MEMBER):
            raise PreconditionFailed("point outside its set")
    cones = [normal_cone(s, w, "frechet") for s, w in zip(sets, om)]
    return sets, om, z, cones


def dual_to_primal_translations(sets, omegas, duals, eps: float, rho: float, tau: float,
                                n: NormSpec = EUCLIDEAN, symmetric: bool = False) -> TranslationSet:
    """Translations from a nearly separating dual family (asymmetric form).

    Input: ``x*_i`` in the Fréchet normal cones of ``Ω_i`` at ``ω_i`` for
    ``i < n``, ``d(x*_n, N_n) < ε``, ``Σ x*_i = 0`` and ``Σ_{i<n} |x*_i| = 1``.
    With ``u_i`` a unit norming vector of ``x*_i``,
    ``a_i = ερ(1 - η) u_i`` and ``η = min((1 - τ)/2, (1 - d_n/ε)/2)`` give
    ``|a_i| < ερ``, ``Σ <x*_i, a_i> = (1 - η)ερ > τερ`` and emptiness of
    ``∩_{i<n}(Ω_i - ω_i - a_i) ∩ (Ω_n - ω_n) ∩ ρB`` whenever ``ρ`` is below the
    certified radius ``δ``.

    With ``symmetric=True`` the input is a family with ``x*_i`` in the cones,
    ``|Σ x*_i| < ε`` and ``Σ |x*_i| = 1``; the whole space is appended as an
    extra set carrying ``-Σ x*_i`` and all ``n`` sets are translated.

    Raises
    ------
    PreconditionFailed
        On violated normalization, cone or sum conditions, or ``ρ >= δ``.
    NotFoundAtBudget
        If no localization radius is certified.
    """
    if not 0 < tau < 1:
        raise PreconditionFailed("tau must lie in ]0, 1[")
    if not (eps > 0 and rho > 0):
        raise PreconditionFailed("eps and rho must be positive")
    sets, om, z, cones = _reversal_inputs(sets, omegas, duals, n)
    d = om.shape[1]
    if symmetric:
        from .sets import whole_space
        sets = sets + [whole_space(d)]
        om = np.vstack([om, np.zeros(d)])
        z = np.vstack([z, -z.sum(axis=0)])
        cones = cones + [ConeRep.zero(d)]
    dual = n.dual()
    lens = dual_norm(z[:-1], n)
    if abs(lens.sum() - 1.0) > 1e-9:
        raise PreconditionFailed(f"normalization violated: sum of dual norms is {lens.sum()!r}")
    if float(np.abs(z.sum(axis=0)).max()) > 1e-12:
        raise PreconditionFailed("dual vectors must sum to zero")
    member = [dist_to_cone(zi, K, dual)[0] for zi, K in zip(z[:-1], cones[:-1])]
    if max(member) > TOL_MEMBER:
        raise PreconditionFailed("dual vectors must lie in their normal cones")
    d_last, y_last = dist_to_cone(z[-1], cones[-1], dual)
    if not d_last < eps:
        raise PreconditionFailed(f"last dual vector is {d_last!r} from its cone, not below eps")
    eta = min((1.0 - tau) / 2.0, (1.0 - d_last / eps) / 2.0)
    cone_vecs = list(z[:-1]) + [y_last]
    scales = [eps + 1.0] * (len(sets) - 1) + [1.0]
    delta = min(_frechet_radius([s], [w], [y], sc) for s, w, y, sc in zip(sets, om, cone_vecs, scales))
    if not rho < delta:
        raise PreconditionFailed(f"rho = {rho!r} is not below the certified radius {delta!r}")
    u = np.array([norming_vector(zi, n) for zi in z[:-1]])
    a = eps * rho * (1.0 - eta) * u
    pairing = float(np.sum(z[:-1] * a))
    shifted = [s.translate(-w) for s, w in zip(sets, om)]
    condition = "approx-stationary-asymmetric"
    check = _localized_check(shifted, a, rho, n, local=False)
    meta = {"eta": eta, "delta": delta, "pairing": pairing,
            "pairing_margin": pairing - tau * eps * rho, "last_cone_distance": d_last,
            "condition": condition, "check": check, "symmetric": symmetric}
    return TranslationSet(a, rho, None, om, meta)


def _localized_check(shifted, a, rho, n, local):
    """Emptiness of the translated (optionally localized) sets inside ``ρB``."""
    d = shifted[0].dim
    moved = [s.translate(-ai) for s, ai in zip(shifted[:-1], a)]
    moved.append(shifted[-1])
    if local:
        moved += [Ball(-ai, rho, n) for ai in a]
    empty, cert, margin, br = decide_empty(moved, np.zeros(d), rho, n)
    return PrimalCheckResult("localized" if local else "approx-stationary-asymmetric",
                             empty, cert, {"emptiness": margin}, br)


def localized_reversal(sets, omegas, duals, eps: float, rho: float, tau: float,
                       n: NormSpec = EUCLIDEAN) -> TranslationSet:
    """Translations for localizations of all sets from a zero-sum family.

    Input: ``Σ x*_i = 0``, ``Σ d(x*_i, N_i) < ε`` (Fréchet cones) and
    ``Σ_{i<n} |x*_i| = 1``.  Output: ``a_i`` with ``|a_i| < ερ``,
    ``Σ <x*_i, a_i> > τερ`` and
    ``∩_{i<n}(((Ω_i - ω_i) ∩ ρB) - a_i) ∩ (Ω_n - ω_n) ∩ ρB = ∅``.
    """
    if not 0 < tau < 1:
        raise PreconditionFailed("tau must lie in ]0, 1[")
    if not (eps > 0 and rho > 0):
        raise PreconditionFailed("eps and rho must be positive")
    sets, om, z, cones = _reversal_inputs(sets, omegas, duals, n)
    dual = n.dual()
    lens = dual_norm(z[:-1], n)
    if abs(lens.sum() - 1.0) > 1e-9:
        raise PreconditionFailed(f"normalization violated: sum of dual norms is {lens.sum()!r}")
    if float(np.abs(z.sum(axis=0)).max()) > 1e-12:
        raise PreconditionFailed("dual vectors must sum to zero")
    near = [dist_to_cone(zi, K, dual) for zi, K in zip(z, cones)]
    total = float(sum(t[0] for t in near))
    if not total < eps:
        raise PreconditionFailed(f"total cone distance {total!r} is not below eps")
    eta = min((1.0 - tau) / 2.0, (1.0 - total / eps) / 2.0)
    delta = min(_frechet_radius([s], [w], [t[1]], 1.0) for s, w, t in zip(sets, om, near))
    if not rho < delta:
        raise PreconditionFailed(f"rho = {rho!r} is not below the certified radius {delta!r}")
    u = np.array([norming_vector(zi, n) for zi in z[:-1]])
    a = eps * rho * (1.0 - eta) * u
    pairing = float(np.sum(z[:-1] * a))
    shifted = [s.translate(-w) for s, w in zip(sets, om)]
    check = _localized_check(shifted, a, rho, n, local=True)
    meta = {"eta": eta, "delta": delta, "pairing": pairing,
            "pairing_margin": pairing - tau * eps * rho, "cone_distance": total, "check": check}
    return TranslationSet(a, rho, None, om, meta)
