"""Ekeland's variational principle on finite metric spaces and its geometric forms.

On a finite space every infimum is attained, so the principle becomes an
algorithm: starting from ``x_0 = x̄``, move to the best point of
``{x != x_k : f(x) + (ε/λ) d(x, x_k) <= f(x_k)}`` until that set is empty.
The value of ``f`` strictly decreases, so the loop terminates, and the total
distance travelled is below ``λ``.

The geometric versions run this loop on products of point clouds with the
weighted maximum metric ``max_i d_i / r_i`` and ``f = d1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, PreconditionFailed, UnsupportedClass
from .norms import EUCLIDEAN, NormSpec, norm
from .sets import Ball, PointCloud
from .tolerances import TOL_MEMBER
from .translations import TranslationSet, decide_empty, translations_from_near_closest

METRIC_TOL = 1e-9
MAX_PRODUCT_POINTS = 2_000_000


class FiniteMetricSpace:
    """A finite metric space with lazily computed distance rows.

    Build one with :meth:`from_points` (a norm on coordinates) or
    :meth:`from_matrix` (validated distance matrix), or pass a row function.
    """

    def __init__(self, size: int, row: Callable[[int], np.ndarray], points=None):
        if size < 1:
            raise PreconditionFailed("a metric space needs at least one point")
        self.size = int(size)
        self._row = row
        self.points = points

    @classmethod
    def from_points(cls, points, n: NormSpec = EUCLIDEAN) -> "FiniteMetricSpace":
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if np.unique(pts, axis=0).shape[0] != pts.shape[0]:
            raise PreconditionFailed("points must be distinct")
        return cls(pts.shape[0], lambda i: norm(pts - pts[i], n), pts)

    @classmethod
    def from_matrix(cls, M, validate: bool = True, tol: float = METRIC_TOL) -> "FiniteMetricSpace":
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise PreconditionFailed("distance matrix must be square")
        if validate:
            validate_metric(M, tol)
        return cls(M.shape[0], lambda i: M[i])

    def row(self, i: int) -> np.ndarray:
        return np.asarray(self._row(int(i)), dtype=float)

    def dist(self, i: int, j: int) -> float:
        return float(self.row(i)[j])


def validate_metric(M, tol: float = METRIC_TOL):
    """Raise unless ``M`` is symmetric, zero on the diagonal, positive off it and triangular."""
    if np.any(np.abs(np.diag(M)) > tol):
        raise PreconditionFailed("distance matrix must have a zero diagonal")
    if np.any(np.abs(M - M.T) > tol):
        raise PreconditionFailed("distance matrix must be symmetric")
    off = M + np.eye(M.shape[0])
    if np.any(off <= 0):
        raise PreconditionFailed("distinct points must be at positive distance")
    for k in range(M.shape[0]):
        if np.any(M > M[:, k][:, None] + M[k][None, :] + tol):
            raise PreconditionFailed("distance matrix violates the triangle inequality")


@dataclass(frozen=True)
class EVPResult:
    """The point ``x̂`` with the margins of the three conclusions.

    ``margins``: ``near = λ - d(x̂, x̄)``, ``descent = f(x̄) - f(x̂)``,
    ``strict_min = min_{x != x̂} f(x) + (ε/λ) d(x, x̂) - f(x̂)`` and
    ``strict_min_literal``, the same minimum over ``x != x̄``.
    """

    x_hat: int
    path: tuple
    margins: dict
    eps: float
    lam: float

    @property
    def holds(self) -> bool:
        m = self.margins
        return m["near"] > 0 and m["descent"] >= 0 and m["strict_min"] > 0


def _evp_core(size, row, f, x_bar, eps, lam):
    c = eps / lam
    finite = np.isfinite(f)
    cur = int(x_bar)
    path = [cur]
    while True:
        gap = f + c * row(cur) - f[cur]
        cand = finite & (gap <= 0)
        cand[cur] = False
        if not cand.any():
            break
        idx = np.flatnonzero(cand)
        # lowest value, lowest index on ties
        cur = int(idx[np.argmin(f[idx])])
        path.append(cur)
    r = row(cur)
    with np.errstate(invalid="ignore"):
        gap = f + c * r - f[cur]
    others = np.ones(size, dtype=bool)
    others[cur] = False
    lit = np.ones(size, dtype=bool)
    lit[x_bar] = False
    margins = {
        "near": lam - float(r[x_bar]),
        "descent": float(f[x_bar] - f[cur]),
        "strict_min": float(np.min(gap[others])) if others.any() else np.inf,
        "strict_min_literal": float(np.min(gap[lit])) if lit.any() else np.inf,
    }
    return EVPResult(cur, tuple(path), margins, eps, lam)


def evp(space: FiniteMetricSpace, f, x_bar: int, eps: float, lam: float) -> EVPResult:
    """Exact Ekeland point on a finite metric space.

    Parameters
    ----------
    space : FiniteMetricSpace
    f : array_like
        Values per point; ``+inf`` marks points outside the domain.
    x_bar : int
        Starting point with ``f(x̄) < min f + ε``.
    eps, lam : float
        Positive parameters.

    Raises
    ------
    PreconditionFailed
        On non-positive parameters, ``f(x̄)`` infinite or not ``ε``-minimal.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (space.size,):
        raise DimensionMismatch("need one value per point")
    if not (eps > 0 and lam > 0):
        raise PreconditionFailed("eps and lam must be positive")
    if np.any(np.isnan(f)) or np.any(f == -np.inf):
        raise PreconditionFailed("f must be proper: no NaN or -inf values")
    if not 0 <= x_bar < space.size:
        raise PreconditionFailed("starting point out of range")
    if not np.isfinite(f[x_bar]):
        raise PreconditionFailed("f(x_bar) must be finite")
    if not f[x_bar] < np.min(f) + eps:
        raise PreconditionFailed(f"f(x_bar) = {f[x_bar]!r} is not below min f + eps = {np.min(f) + eps!r}")
    return _evp_core(space.size, space.row, f, int(x_bar), eps, lam)


# ---------------------------------------------------------------------------
# products of point clouds
# ---------------------------------------------------------------------------

def _clouds(sets):
    out = []
    for s in sets:
        if isinstance(s, PointCloud):
            out.append(np.asarray(s.points, dtype=float))
        else:
            arr = np.asarray(s, dtype=float)
            if arr.ndim != 2:
                raise UnsupportedClass("geometric principles need point clouds")
            out.append(arr)
    d = {c.shape[1] for c in out}
    if len(d) != 1:
        raise DimensionMismatch("point clouds differ in dimension")
    return out


def _locate(cloud, point, tol=TOL_MEMBER):
    point = np.asarray(point, dtype=float).ravel()
    if point.size != cloud.shape[1]:
        raise DimensionMismatch("point and cloud differ in dimension")
    hits = np.flatnonzero(np.max(np.abs(cloud - point), axis=1) <= tol)
    if hits.size == 0:
        raise PreconditionFailed("point is not in its cloud")
    return int(hits[0])


@dataclass(frozen=True)
class ProductSpace:
    """``cloud_1 x ... x cloud_m`` with metric ``max_i d(u_i, v_i) / radii_i`` and ``f = d1``."""

    clouds: tuple
    radii: tuple
    norm: NormSpec = EUCLIDEAN
    _mats: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        mats = tuple(np.stack([norm(c - p, self.norm) for p in c]) / r
                     for c, r in zip(self.clouds, self.radii))
        object.__setattr__(self, "_mats", mats)
        if self.size > MAX_PRODUCT_POINTS:
            raise PreconditionFailed(f"product space of {self.size} points exceeds the budget")

    @property
    def shape(self):
        return tuple(c.shape[0] for c in self.clouds)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def index(self, idx) -> int:
        return int(np.ravel_multi_index(tuple(idx), self.shape))

    def unravel(self, k: int):
        return tuple(int(i) for i in np.unravel_index(k, self.shape))

    def row(self, k: int) -> np.ndarray:
        idx = self.unravel(k)
        out = np.zeros(self.shape)
        m = len(self.shape)
        for axis, (M, i) in enumerate(zip(self._mats, idx)):
            view = [1] * m
            view[axis] = self.shape[axis]
            out = np.maximum(out, M[i].reshape(view))
        return out.ravel()

    def d1_values(self) -> np.ndarray:
        """``d1`` of every tuple; the last cloud is the reference set."""
        last = self.clouds[-1]
        m = len(self.shape)
        out = np.zeros(self.shape)
        for axis, c in enumerate(self.clouds[:-1]):
            D = np.stack([norm(c - q, self.norm) for q in last], axis=1)  # (|c|, |last|)
            view = [1] * m
            view[axis] = self.shape[axis]
            view[-1] = self.shape[-1]
            out = np.maximum(out, D.reshape(view))
        return out.ravel()


@dataclass(frozen=True)
class GeometricResult:
    """Points ``ω̂_i`` (rows), their cloud indices and the certified margins."""

    points: np.ndarray
    indices: tuple
    margins: dict
    evp: EVPResult


def agevp_n(sets, omegas, eps: float, lam: float, rho: float, n: NormSpec = EUCLIDEAN) -> GeometricResult:
    """Localized near-closest points for ``n`` point clouds.

    Runs :func:`evp` on ``Ω_1 x ... x Ω_n`` with metric
    ``max(max_{i<n} d_i/λ, d_n/ρ)``, ``f = d1`` (distance of the first
    ``n - 1`` entries to the last one), radius 1 and ``ε'`` the midpoint of
    ``]d1(ω) - d1(Ω), ε[``.  The result satisfies
    ``|ω̂_i - ω_i| < λ`` (``< ρ`` for the last entry), ``d1(ω̂) <= d1(ω)`` and,
    for every ``ξ > 0``, ``d1`` of the localizations
    ``Ω_i ∩ B_{ξλ}(ω̂_i)``, ``Ω_n ∩ B_{ξρ}(ω̂_n)`` plus ``ξε`` exceeds ``d1(ω̂)``.

    Raises
    ------
    PreconditionFailed
        If ``d1(ω) < d1(Ω) + ε`` fails or inputs are malformed.
    """
    clouds = _clouds(sets)
    if len(clouds) < 2:
        raise PreconditionFailed("need at least two clouds")
    if not (eps > 0 and lam > 0 and rho > 0):
        raise PreconditionFailed("eps, lam and rho must be positive")
    om = np.atleast_2d(np.asarray(omegas, dtype=float))
    if om.shape[0] != len(clouds):
        raise PreconditionFailed("need one point per cloud")
    start = tuple(_locate(c, w) for c, w in zip(clouds, om))
    for c in clouds:
        if np.unique(c, axis=0).shape[0] != c.shape[0]:
            raise PreconditionFailed("cloud points must be distinct")
    radii = tuple([lam] * (len(clouds) - 1) + [rho])
    space = ProductSpace(tuple(clouds), radii, n)
    f = space.d1_values()
    x_bar = space.index(start)
    gap = f[x_bar] - f.min()
    if not gap < eps:
        raise PreconditionFailed(f"points are not eps-near-closest: d1 excess {gap!r} >= eps {eps!r}")
    eps_prime = 0.5 * (gap + eps)
    res = _evp_core(space.size, space.row, f, x_bar, eps_prime, 1.0)
    idx = space.unravel(res.x_hat)
    pts = np.array([c[i] for c, i in zip(clouds, idx)])
    moved = norm(pts - om, n)
    margins = {
        "localization": float(np.min(np.asarray(radii) - moved)),
        "no_increase": float(f[x_bar] - f[res.x_hat]),
        "strict_min": res.margins["strict_min"],
        "epsilon_prime": eps_prime,
        "d1_hat": float(f[res.x_hat]),
        "d1_sets": float(f.min()),
    }
    return GeometricResult(pts, idx, margins, res)


def agevp(A, B, a, b, eps: float, lam: float, rho: float, n: NormSpec = EUCLIDEAN) -> GeometricResult:
    """Two clouds with radius ``λ`` around ``a`` and ``ρ`` around ``b``."""
    return agevp_n([A, B], [a, b], eps, lam, rho, n)


def gevp(A, B, a, b, eps: float, lam: float, n: NormSpec = EUCLIDEAN) -> GeometricResult:
    """Two clouds with a common radius ``λ``.

    The localization ``B_ξ`` with the term ``ξε/λ`` is the case ``ρ = λ`` of
    :func:`agevp` after substituting ``ξ -> ξλ``.
    """
    return agevp_n([A, B], [a, b], eps, lam, lam, n)


# ---------------------------------------------------------------------------
# consequences: localized non-intersection
# ---------------------------------------------------------------------------

def _localize(cloud, center, radius, n):
    keep = norm(cloud - center, n) <= radius
    return cloud[keep]


def nonintersect_localize(sets, omegas, eps: float, lam: float, rho: float, xis,
                          n: NormSpec = EUCLIDEAN):
    """Per-``ξ`` translations of localizations of disjoint point clouds.

    First :func:`agevp_n` gives ``ω̂``; then for each ``ξ`` the near-closest
    construction is applied to ``Ω_i ∩ B̄_{ξλ}(ω̂_i)`` (``ξρ`` for the last
    cloud) with parameter ``ξε``.  Each returned :class:`TranslationSet` has
    ``max |a_i| < ξε`` and
    ``∩_{i<n}(((Ω_i - ω̂_i) ∩ ξλB̄) - a_i) ∩ (Ω_n - ω̂_n) ∩ ξρB̄ = ∅``,
    verified exactly (``meta["check"]``).

    Returns
    -------
    tuple
        ``(GeometricResult, {ξ: TranslationSet})``.
    """
    clouds = _clouds(sets)
    empty, _, _, _ = decide_empty([PointCloud(c) for c in clouds], None, np.inf, n)
    if empty is not True:
        raise PreconditionFailed("the clouds intersect")
    base = agevp_n(clouds, omegas, eps, lam, rho, n)
    out = {}
    for xi in xis:
        if not xi > 0:
            raise PreconditionFailed("xi must be positive")
        radii = [xi * lam] * (len(clouds) - 1) + [xi * rho]
        local = [PointCloud(_localize(c, p, r, n)) for c, p, r in zip(clouds, base.points, radii)]
        ts = translations_from_near_closest(local, base.points, xi * eps, n)
        ts.meta["xi"] = xi
        out[float(xi)] = ts
    return base, out


@dataclass(frozen=True)
class LocalizedExtremality:
    """Output of :func:`extremal_localize`."""

    omegas: np.ndarray
    delta: float
    per_xi: dict
    ball_point: np.ndarray
    meta: dict = field(default_factory=dict)


def _ball_net(center, radius, n, per_axis):
    d = center.size
    axes = [np.linspace(-radius, radius, per_axis)] * d
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    grid = grid[norm(grid, n) <= radius]
    grid = np.vstack([np.zeros(d), grid[np.any(grid != 0, axis=1)]])
    return center + grid


def _finite_intersection(clouds, tol=TOL_MEMBER):
    """Points common to all clouds (rows of the first cloud)."""
    common = clouds[0]
    for c in clouds[1:]:
        if common.shape[0] == 0:
            break
        D = np.max(np.abs(common[:, None, :] - c[None, :, :]), axis=2)
        common = common[np.any(D <= tol, axis=1)]
    return common


def extremal_localize(sets, x_bar, a, eps: float, rho: float, lam: float, xis=None,
                      n: NormSpec = EUCLIDEAN, net_per_axis: int = 9) -> LocalizedExtremality:
    """Localized extremality at points near ``x̄`` from local extremality at ``x̄``.

    The sets are point clouds and the data ``(a, ε, ρ)`` must satisfy
    ``∩(Ω_i - a_i) ∩ B_ρ(x̄) = ∅`` with ``max |a_i| < ε``.  The closed ball
    ``B̄_{ρ'}(x̄)``, ``ρ' = ρ/2``, enters the near-closest machinery as a finite
    net containing ``x̄``; each conclusion is then verified against the true
    ball ``ξρB`` because the translated localized clouds have a finite
    intersection.  ``δ = (ρ' - |x̂ - x̄|)/ρ`` where ``x̂`` is the net point
    returned for the ball.

    For each ``ξ`` in ``xis`` (default: a geometric grid in ``]0, δ[``) the
    entry of ``per_xi`` holds the translations ``a'_i`` (``max < ξε``), the
    emptiness of ``∩(((Ω_i - ω_i) ∩ ξλB) - a'_i) ∩ ξρB`` and, when
    ``λ >= ρ + ε`` or ``λ + ε <= ρ``, the sharpened conclusions without the
    localization on one side.

    Raises
    ------
    PreconditionFailed
        If local extremality is not certified or ``ρ`` is infinite.
    """
    clouds = _clouds(sets)
    xb = np.asarray(x_bar, dtype=float)
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if not np.isfinite(rho):
        raise PreconditionFailed("a finite rho is required for the ball net")
    if a.shape != (len(clouds), xb.size):
        raise DimensionMismatch("need one translation per cloud")
    for c in clouds:
        _locate(c, xb)
    if not float(np.max(norm(a, n))) < eps:
        raise PreconditionFailed("translations are not below eps")
    moved = [PointCloud(c - ai) for c, ai in zip(clouds, a)]
    empty, _, _, _ = decide_empty(moved, xb, rho, n)
    if empty is not True:
        raise PreconditionFailed("local extremality is not certified")
    rho_p = 0.5 * rho
    net = _ball_net(xb, rho_p, n, net_per_axis)
    ext = [c - ai for c, ai in zip(clouds, a)] + [net]
    start = np.vstack([xb - a, xb[None, :]])
    # the net sits inside B_ρ(x̄), so the extended family has empty intersection
    base = agevp_n(ext, start, eps, lam, rho_p, n)
    omegas = base.points[:-1] + a
    x_hat = base.points[-1]
    delta = (rho_p - float(norm(x_hat - xb, n))) / rho
    if xis is None:
        xis = delta * np.geomspace(1e-3, 0.95, 12)
    per_xi = {}
    for xi in xis:
        if not 0 < xi < delta:
            raise PreconditionFailed("each xi must lie in ]0, delta[")
        radii = [xi * lam] * len(clouds) + [xi * rho]
        local = [PointCloud(_localize(c, p, r, n)) for c, p, r in zip(ext, base.points, radii)]
        ts = translations_from_near_closest(local, base.points, xi * eps, n)
        a_new = ts.vectors
        loc_shift = [_localize(c, w, xi * lam, n) - w - ai for c, w, ai in zip(clouds, omegas, a_new)]
        common = _finite_intersection(loc_shift)
        inside = common[norm(common, n) < xi * rho] if common.size else common
        entry = {
            "translations": a_new,
            "bound_margin": xi * eps - ts.max_norm(n),
            "empty": inside.shape[0] == 0,
            "common_points": common.shape[0],
        }
        if lam >= rho + eps:
            full = _finite_intersection([c - w - ai for c, w, ai in zip(clouds, omegas, a_new)])
            entry["empty_unlocalized"] = not bool(np.any(norm(full, n) < xi * rho)) if full.size else True
        if lam + eps <= rho:
            entry["empty_without_ball"] = common.shape[0] == 0
        per_xi[float(xi)] = entry
    meta = {"rho_prime": rho_p, "net_points": net.shape[0], "base": base}
    return LocalizedExtremality(omegas, delta, per_xi, x_hat, meta)
