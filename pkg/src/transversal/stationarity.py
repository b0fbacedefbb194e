"""Dual certificates for stationarity and transversality.

A dual certificate is a tuple of points ``ω_i`` near ``x̄`` together with
functionals ``x*_i`` attached to the normal cones ``N_i = N_{Ω_i}(ω_i)``.
Four normalized forms are supported:

==================  =====================================================
form                requirement (residual below a threshold)
==================  =====================================================
``near-sum``        ``x*_i ∈ N_i``, ``Σ|x*_i| = 1``; residual ``|Σ x*_i|``
``zero-sum``        ``Σ x*_i = 0``, ``Σ|x*_i| = 1``; residual ``Σ d(x*_i, N_i)``
``near-sum-asym``   as ``near-sum`` with the normalization over ``i < n``
``zero-sum-asym``   as ``zero-sum`` with the normalization over ``i < n``
==================  =====================================================

The searches enumerate candidate points exactly where possible: for a
polyhedron every face that meets ``B_ε(x̄)`` contributes its point nearest
to ``x̄``, whose normal cone contains the cone of the whole face.  Curved
pieces are sampled and then only give upper bounds.  For a fixed cone tuple
the normalization ``Σ|x*_i| = 1`` is handled by enumerating which vertex
of the unit ball norms each functional (exact for polyhedral norms) or by
covering the sphere with caps (a two-sided bracket for the euclidean norm).

The separation certificates build dual vectors from the subgradients of the
distance function at a solution of a localized distance problem.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np
from scipy.spatial import ConvexHull

from .cones import ConeRep, dist_to_cone, normal_cone
from .distances import d1_sets
from .errors import NotFoundAtBudget, NumericalFailure, PreconditionFailed, UnsupportedClass
from .geometry import Bracket, intersection_distance, nearest_point, project, \
    project_polyhedron_euclidean
from .model import Model
from .norms import EUCLIDEAN, NormSpec, dual_norm, norm, norming_vector, unit_ball_vertices
from .perturbation import NORMALIZATION_TOL, asymmetric_snap, normalize_then_rebalance, \
    normalize_then_snap
from .sets import AffineSubspace, Ball, HPolyhedron, is_singleton_piece
from .tolerances import TOL_MEMBER, TOL_STRICT
from .translations import TranslationSet, check_primal_condition, decide_empty

MAX_TUPLES = 4096
MAX_CHOICES = 4096
ZERO_SUM_TOL = 1e-12


@dataclass(frozen=True)
class _Form:
    in_cones: bool
    zero_sum: bool
    skip_last: bool


FORMS = {
    "near-sum": _Form(True, False, False),
    "zero-sum": _Form(False, True, False),
    "near-sum-asym": _Form(True, False, True),
    "zero-sum-asym": _Form(False, True, True),
}


def _form(name: str) -> _Form:
    if name not in FORMS:
        raise PreconditionFailed(f"unknown dual form {name!r}")
    return FORMS[name]


def _is_euclid(n: NormSpec) -> bool:
    return n.kind == "euclidean" or (n.kind == "p" and n.p == 2.0)


def form_residuals(duals, cones, form: str, n: NormSpec = EUCLIDEAN) -> dict:
    """Residual, normalization and membership errors of a dual tuple."""
    shape = _form(form)
    z = np.atleast_2d(np.asarray(duals, dtype=float))
    dual = n.dual()
    lens = dual_norm(z, n)
    counted = lens[:-1] if shape.skip_last else lens
    dists = np.array([dist_to_cone(zi, K, dual)[0] for zi, K in zip(z, cones)])
    sum_defect = float(dual_norm(z.sum(axis=0), n))
    out = {
        "normalization_error": abs(float(counted.sum()) - 1.0),
        "sum_defect": sum_defect,
        "cone_defect": float(dists.sum()),
        "membership_error": float(dists.max()) if shape.in_cones else 0.0,
        "zero_sum_error": float(np.abs(z.sum(axis=0)).max()) if shape.zero_sum else 0.0,
    }
    out["residual"] = out["cone_defect"] if shape.zero_sum else sum_defect
    return out


@dataclass(frozen=True)
class CertBundle:
    """Points, dual vectors and their normal cones in one of the :data:`FORMS`.

    ``threshold`` is the strict bound the residual must stay below.
    """

    points: np.ndarray
    duals: np.ndarray
    cones: tuple
    form: str
    threshold: float
    norm: NormSpec = EUCLIDEAN
    cone_kind: str = "frechet"
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def normalization(self) -> str:
        return "sum-n-1" if _form(self.form).skip_last else "sum-n"

    def residuals(self) -> dict:
        out = form_residuals(self.duals, self.cones, self.form, self.norm)
        out["margin"] = self.threshold - out["residual"]
        return out

    def holds(self) -> bool:
        r = self.residuals()
        return bool(r["margin"] > 0 and r["membership_error"] <= TOL_MEMBER
                    and r["normalization_error"] <= NORMALIZATION_TOL
                    and r["zero_sum_error"] <= ZERO_SUM_TOL)

    def to_dict(self) -> dict:
        r = self.residuals()
        return {"form": self.form, "normalization": self.normalization, "threshold": self.threshold,
                "cone_kind": self.cone_kind, "norm": self.norm.to_dict(),
                "points": np.asarray(self.points).tolist(), "duals": np.asarray(self.duals).tolist(),
                "residuals": r, "holds": self.holds()}


# ---------------------------------------------------------------------------
# candidate points
# ---------------------------------------------------------------------------

def _directions(d: int, count: int) -> np.ndarray:
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        t = 2 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(t), np.sin(t)])
    if d == 3:
        k = np.arange(count) + 0.5
        phi = np.arccos(1 - 2 * k / count)
        theta = np.pi * (1 + 5 ** 0.5) * k
        return np.column_stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])
    raise UnsupportedClass("direction grids are available up to dimension 3")


def _caps(d: int, count: int):
    """Unit directions covering the sphere and the cosine of the covering angle."""
    F = _directions(d, count)
    if d == 1:
        return F, 1.0
    if d == 2:
        return F, float(np.cos(np.pi / count))
    hull = ConvexHull(F)
    return F, float(np.min(-hull.equations[:, -1]))


def _piece_candidates(piece, x_bar, eps, n, ball_grid):
    """Points of a convex piece inside ``B_ε(x̄)``; the flag says whether the list is exhaustive."""
    d = piece.dim
    if is_singleton_piece(piece):
        p = piece.point
        return ([p.copy()] if norm(p - x_bar, n) < eps else []), True
    if isinstance(piece, AffineSubspace):
        p = project(x_bar, piece, EUCLIDEAN)
        return ([p] if norm(p - x_bar, n) < eps else []), True
    if isinstance(piece, HPolyhedron):
        A, b = piece.A, piece.b
        out = []
        for size in range(min(d, A.shape[0]) + 1):
            for S in combinations(range(A.shape[0]), size):
                S = list(S)
                p = project_polyhedron_euclidean(x_bar, A, b, A[S], b[S]) if S else \
                    project_polyhedron_euclidean(x_bar, A, b)
                if p is not None and norm(p - x_bar, n) < eps:
                    out.append(p)
        return out, True
    if isinstance(piece, Ball):
        if piece.is_whole_space:
            return [x_bar.copy()], True
        out = []
        if norm(x_bar - piece.center, piece.norm) < piece.radius:
            out.append(x_bar.copy())
        U = _directions(d, ball_grid)
        U = U / norm(U, piece.norm)[:, None]
        for p in piece.center + piece.radius * U:
            if norm(p - x_bar, n) < eps:
                out.append(p)
        return out, False
    raise UnsupportedClass(f"no candidate points for {type(piece).__name__}")


def _dedupe(points):
    out, seen = [], set()
    for p in points:
        key = tuple(np.round(p, 10))
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


def candidate_points(A, x_bar, eps, n: NormSpec = EUCLIDEAN, kind: str = "frechet", ball_grid=None):
    """Candidate points of ``A ∩ B_ε(x̄)`` with their normal cones.

    Returns
    -------
    tuple
        ``(list of (point, ConeRep), exact)``.
    """
    x_bar = np.asarray(x_bar, dtype=float)
    if ball_grid is None:
        ball_grid = 64 if A.dim <= 2 else 256
    pts, exact = [], True
    for piece in A.pieces():
        p, ex = _piece_candidates(piece, x_bar, eps, n, ball_grid)
        pts.extend(p)
        exact = exact and ex
    return [(p, normal_cone(A, p, kind)) for p in _dedupe(pts)], exact


def _check_reference(sets, x_bar):
    for s in sets:
        if not s.contains(x_bar, TOL_MEMBER):
            raise PreconditionFailed("the reference point must lie in every set")


# ---------------------------------------------------------------------------
# one cone tuple
# ---------------------------------------------------------------------------

def _options(K: ConeRep, shape: _Form, counted: bool, n: NormSpec, d: int, caps):
    if not counted:
        return [None]
    if shape.in_cones and not K.full:
        G = K.generators
        if G.shape[0] == 0:
            return [("zero",)]
        if G.shape[0] == 1:
            return [("ray", G[0])]
        if G.shape[0] == 2 and np.allclose(G[0], -G[1]):
            return [("ray", G[0]), ("ray", G[1])]
    if n.is_polyhedral:
        return [("vertex", u) for u in unit_ball_vertices(n, d)]
    if _is_euclid(n):
        return [("cap", f) for f in caps[0]]
    raise UnsupportedClass("dual searches need a polyhedral or the euclidean norm")


def _solve_choice(cones, shape, choice, n, d, cos_cap):
    """Optimal residual for one normalization pattern, or None if infeasible."""
    model = Model()
    dual = n.dual()
    eye = np.eye(d)
    zero = np.zeros(d)
    k = len(cones)
    x = [model.var(d) for _ in range(k)]
    V = unit_ball_vertices(n, d) if n.is_polyhedral else None
    norm_terms = []
    capped = False
    for i, (K, opt) in enumerate(zip(cones, choice)):
        kind = opt[0] if opt is not None else None
        if shape.in_cones:
            if kind == "ray":
                mu = model.var(1, lb=0.0)
                model.eq([(x[i], eye), (mu, -opt[1][:, None])], zero)
                norm_terms.append((mu, np.array([[float(dual_norm(opt[1], n))]])))
            elif kind == "zero" or K.is_zero:
                model.eq([(x[i], eye)], zero)
            elif not K.full:
                mu = model.var(K.generators.shape[0], lb=0.0)
                model.eq([(x[i], eye), (mu, -K.generators.T)], zero)
        if kind == "vertex":
            model.le([(x[i], V - opt[1])], np.zeros(V.shape[0]))
            norm_terms.append((x[i], opt[1][None, :]))
        elif kind == "cap":
            t = model.var(1)
            model.norm_le([(x[i], eye)], zero, int(t[0]), dual)
            model.eq([(t, np.ones((1, 1))), (x[i], -opt[1][None, :] / cos_cap)], [0.0])
            norm_terms.append((x[i], opt[1][None, :]))
            capped = True
    if not norm_terms:
        return None
    model.eq(norm_terms, [1.0])
    if shape.zero_sum:
        model.eq([(xi, eye) for xi in x], zero)
        s = model.var(k, lb=0.0)
        for i, K in enumerate(cones):
            if K.full:
                model.eq([(s[i:i + 1], np.ones((1, 1)))], [0.0])
            elif K.is_zero:
                model.norm_le([(x[i], eye)], zero, int(s[i]), dual)
            else:
                mu = model.var(K.generators.shape[0], lb=0.0)
                model.norm_le([(x[i], eye), (mu, -K.generators.T)], zero, int(s[i]), dual)
        model.minimize([(s, np.ones((1, k)))])
    else:
        t = model.var(1, lb=0.0)
        model.norm_le([(xi, eye) for xi in x], zero, int(t[0]), dual)
        model.minimize([(t, np.ones((1, 1)))])
    res = model.solve()
    if res.status == "infeasible":
        return None
    if not res.optimal:
        raise NumericalFailure(f"dual subproblem ended with status {res.status}")
    lower = max(0.0, res.lower()) * (cos_cap if capped else 1.0)
    return lower, np.array([res.x[xi] for xi in x])


def _normalize(z, shape, n):
    lens = dual_norm(z, n)
    total = float(lens[:-1].sum() if shape.skip_last else lens.sum())
    if not total > 0:
        return None
    z = z / total
    if shape.zero_sum:
        if shape.skip_last:
            z[-1] = -z[:-1].sum(axis=0)
        else:
            # push the rounding error of the sum into the longest vector
            j = int(np.argmax(lens))
            z[j] = -(z.sum(axis=0) - z[j])
    return z


def solve_cone_tuple(cones, form: str, n: NormSpec = EUCLIDEAN, directions: int = 12, seed: int = 0):
    """Smallest residual of ``form`` over functionals attached to fixed cones.

    Returns
    -------
    tuple
        ``(lower, upper, duals)``; ``duals`` is None and both bounds are
        ``inf`` when no normalized tuple exists.
    """
    shape = _form(form)
    cones = list(cones)
    d = cones[0].dim
    k = len(cones)
    caps = _caps(d, directions) if not n.is_polyhedral else (None, 1.0)
    opts = [_options(K, shape, not (shape.skip_last and i == k - 1), n, d, caps) for i, K in enumerate(cones)]
    total = int(np.prod([len(o) for o in opts]))
    if total <= MAX_CHOICES:
        choices = product(*opts)
        complete = True
    else:
        rng = np.random.default_rng(seed)
        choices = [tuple(o[rng.integers(len(o))] for o in opts) for _ in range(MAX_CHOICES)]
        complete = False
    lower, upper, best = np.inf, np.inf, None
    for choice in choices:
        out = _solve_choice(cones, shape, choice, n, d, caps[1])
        if out is None:
            continue
        lo, z = out
        lower = min(lower, lo)
        z = _normalize(z, shape, n)
        if z is None:
            continue
        val = form_residuals(z, cones, form, n)["residual"]
        if val < upper:
            upper, best = val, z
    if not complete:
        lower = 0.0
    return min(lower, upper), upper, best


# ---------------------------------------------------------------------------
# searches over candidate points
# ---------------------------------------------------------------------------

def _cone_key(K: ConeRep):
    return (K.full, K.generators.shape, np.round(K.generators, 10).tobytes())


def _enumerate(sets, x_bar, eps, form, n, kind, directions, ball_grid):
    x_bar = np.asarray(x_bar, dtype=float)
    sets = list(sets)
    if len(sets) < 2:
        raise PreconditionFailed("need at least two sets")
    if not eps > 0:
        raise PreconditionFailed("eps must be positive")
    _check_reference(sets, x_bar)
    cands, exact = [], True
    for s in sets:
        c, ex = candidate_points(s, x_bar, eps, n, kind, ball_grid)
        cands.append(c)
        exact = exact and ex
    count = int(np.prod([len(c) for c in cands]))
    tuples = product(*cands)
    if count > MAX_TUPLES:
        rng = np.random.default_rng(0)
        tuples = [tuple(c[rng.integers(len(c))] for c in cands) for _ in range(MAX_TUPLES)]
        exact = False
    cache = {}
    results = []
    for tup in tuples:
        cones = [K for _, K in tup]
        key = tuple(_cone_key(K) for K in cones)
        if key not in cache:
            cache[key] = solve_cone_tuple(cones, form, n, directions)
        lo, up, z = cache[key]
        results.append((lo, up, z, tup))
    return results, exact


def dual_alpha_sup(sets, x_bar, eps: float, form: str = "near-sum", n: NormSpec = EUCLIDEAN,
                   kind: str = "frechet", directions: int = 12, ball_grid=None) -> Bracket:
    """Infimum of the residual of ``form`` over points in ``B_ε(x̄)``.

    This is the largest ``α`` for which every normalized tuple has residual
    at least ``α``.  Exact for polyhedral data in a polyhedral norm; for the
    euclidean norm a cap bracket; with curved sets the lower end is 0
    because their points are only sampled.
    """
    results, exact = _enumerate(sets, x_bar, eps, form, n, kind, directions, ball_grid)
    if not results:
        return Bracket(np.inf, np.inf, np.inf, "no-candidates")
    lower = min(r[0] for r in results)
    best = min(results, key=lambda r: r[1])
    upper = best[1]
    if not exact:
        lower = 0.0
    method = "exact-enumeration" if exact and lower == upper else ("cap-bracket" if exact else "grid-upper")
    pts = tuple(p for p, _ in best[3]) if np.isfinite(upper) else ()
    return Bracket(upper, min(lower, upper), upper, method, pts)


def dual_certificate_search(sets, x_bar, eps: float, alpha: float | None = None, form: str = "near-sum",
                            n: NormSpec = EUCLIDEAN, kind: str = "frechet", directions: int = 12,
                            ball_grid=None) -> CertBundle:
    """Find a certificate of ``form`` with points in ``B_ε(x̄)`` and residual below ``alpha`` (or ``eps``).

    Raises
    ------
    NotFoundAtBudget
        If no enumerated tuple has a small enough residual.  This is not a
        proof that none exists unless the enumeration was exhaustive.
    """
    threshold = eps if alpha is None else alpha
    results, exact = _enumerate(sets, x_bar, eps, form, n, kind, directions, ball_grid)
    ok = [r for r in results if r[2] is not None and r[1] < threshold]
    if not ok:
        best = min((r[1] for r in results), default=np.inf)
        raise NotFoundAtBudget(f"no {form} certificate below {threshold!r} (best residual {best!r}, "
                               f"{'exhaustive' if exact else 'partial'} enumeration)")
    lo, up, z, tup = min(ok, key=lambda r: r[1])
    bundle = CertBundle(np.array([p for p, _ in tup]), z, tuple(K for _, K in tup), form, threshold, n, kind,
                        {"eps": eps, "lower": lo, "exhaustive": exact})
    if not bundle.holds():
        raise NotFoundAtBudget("best certificate fails its recheck")
    return bundle


_CONVERSIONS = {
    ("near-sum", "zero-sum"), ("zero-sum", "near-sum"),
    ("near-sum-asym", "zero-sum-asym"), ("zero-sum-asym", "near-sum-asym"),
}


def certificate_convert(bundle: CertBundle, target: str) -> CertBundle:
    """Convert between the near-sum and zero-sum forms.

    With input residual below ``ε < 1`` the output residual is below
    ``ε/(1-ε)``; the output threshold is set to that bound.
    """
    if (bundle.form, target) not in _CONVERSIONS:
        raise PreconditionFailed(f"no conversion from {bundle.form} to {target}")
    eps = bundle.threshold
    if not 0 < eps < 1:
        raise PreconditionFailed("conversion needs a threshold in ]0, 1[")
    n = bundle.norm
    z, cones = bundle.duals, bundle.cones
    if target == "zero-sum":
        out = normalize_then_rebalance(z, cones, eps, n).z
    elif target == "near-sum":
        out = normalize_then_snap(z, cones, eps, n).z
    elif target == "zero-sum-asym":
        r = form_residuals(z, cones, bundle.form, n)
        if r["membership_error"] > TOL_MEMBER or not r["residual"] < eps:
            raise PreconditionFailed("input is not a valid near-sum-asym certificate")
        out = np.array(z, dtype=float)
        out[-1] = -out[:-1].sum(axis=0)
    else:
        snapped = asymmetric_snap(z, cones, eps, n).z
        out = snapped.copy()
        out[-1] = dist_to_cone(snapped[-1], cones[-1], n.dual())[1]
    return CertBundle(bundle.points, out, cones, target, eps / (1 - eps), n, bundle.cone_kind,
                      {"source": bundle.form, "source_threshold": eps})


# ---------------------------------------------------------------------------
# primal side: modulus and stationarity witnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModulusReport:
    """Bracket for the transversality modulus at ``x̄``.

    ``lower`` comes from the dual characterization, ``upper`` is the smallest
    sampled ratio ``max_i d(x, Ω_i - a_i) / d(x, ∩(Ω_i - a_i))``.
    """

    lower: float
    upper: float
    witnesses: tuple
    samples: int
    seed: int
    skipped: int

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= value <= self.upper + tol


def _sample_ball(rng, d, eps, n, lo_scale=1e-4):
    u = rng.standard_normal(d)
    u /= float(norm(u, n))
    r = eps * np.exp(rng.uniform(np.log(lo_scale), 0.0))
    return r * u * (1 - 1e-12)


def transversality_modulus(sets, x_bar, eps: float, samples: int = 10000, seed: int = 0,
                           n: NormSpec = EUCLIDEAN, dual_bound: bool = True) -> ModulusReport:
    """Bracket the modulus from a dual lower bound and sampled primal ratios.

    Points ``x`` and translations ``a_i`` are drawn in ``B_ε`` with
    log-uniform radii.  Ratios with denominator below ``1e-12`` are skipped
    and counted.
    """
    sets = list(sets)
    x_bar = np.asarray(x_bar, dtype=float)
    _check_reference(sets, x_bar)
    d = x_bar.size
    rng = np.random.default_rng(seed)
    best, witness, skipped = np.inf, (), 0
    for _ in range(samples):
        x = x_bar + _sample_ball(rng, d, eps, n)
        a = np.array([_sample_ball(rng, d, eps, n) if rng.random() > 0.1 else np.zeros(d) for _ in sets])
        moved = [s.translate(-ai) for s, ai in zip(sets, a)]
        den = intersection_distance(x, moved, n).value
        if den < 1e-12:
            skipped += 1
            continue
        num = max(nearest_point(x, s, n).value for s in moved)
        ratio = 0.0 if np.isinf(den) else num / den
        if ratio < best:
            best, witness = ratio, (x, a)
    lower = dual_alpha_sup(sets, x_bar, eps, "near-sum", n).lower if dual_bound else 0.0
    return ModulusReport(float(lower), float(best), witness, samples, seed, skipped)


@dataclass(frozen=True)
class StationarityTest:
    """Outcome of :func:`alpha_stationarity_test`; ``status`` is ``witness`` or ``not-found-at-budget``."""

    status: str
    witness: TranslationSet | None
    check: object
    tried: int

    @property
    def found(self) -> bool:
        return self.status == "witness"


def _candidate_translations(sets, x_bar, eps, n, budget, rng):
    d = x_bar.size
    per_set = []
    for s in sets:
        K = normal_cone(s, x_bar, "frechet")
        G = K.generators if not K.full else np.zeros((0, d))
        dirs = [np.zeros(d)] + [g / float(norm(g, n)) for g in G]
        per_set.append(dirs)
    scales = eps * np.array([0.999, 0.5, 0.1, 0.01, 1e-3])
    for s in scales:
        for combo in product(*per_set):
            yield s * np.array(combo)
    while True:
        yield np.array([_sample_ball(rng, d, eps, n) for _ in sets])


def alpha_stationarity_test(sets, x_bar, alpha: float, eps: float, n: NormSpec = EUCLIDEAN,
                            budget: int = 2000, seed: int = 0) -> StationarityTest:
    """Search translations ``|a_i| < ε`` with ``α d(x̄, ∩(Ω_i - a_i)) > max_i d(x̄, Ω_i - a_i)``.

    Normal directions at ``x̄`` are tried first, then random translations.
    A witness is returned only after :func:`check_primal_condition` confirms
    it.
    """
    sets = list(sets)
    x_bar = np.asarray(x_bar, dtype=float)
    _check_reference(sets, x_bar)
    if not alpha > 0 or not eps > 0:
        raise PreconditionFailed("alpha and eps must be positive")
    rng = np.random.default_rng(seed)
    tried = 0
    for a in _candidate_translations(sets, x_bar, eps, n, budget, rng):
        if tried >= budget:
            break
        tried += 1
        if not np.all(norm(a, n) < eps):
            continue
        moved = [s.translate(-ai) for s, ai in zip(sets, a)]
        inter = intersection_distance(x_bar, moved, n)
        side = max(nearest_point(x_bar, s, n).upper for s in moved)
        if not alpha * inter.lower > side:
            continue
        check = check_primal_condition("metric-at-point", sets, a, eps=eps, alpha=alpha, x_bar=x_bar, n=n)
        if check.holds:
            return StationarityTest("witness", TranslationSet(a, witness=x_bar), check, tried)
    return StationarityTest("not-found-at-budget", None, None, tried)


# ---------------------------------------------------------------------------
# separation certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeparationCertificate:
    """Points, translations and dual vectors certifying a separation statement.

    ``margins`` holds ``residual`` (``λ Σ_{i<n} d(x*_i, N_i) + ρ d(x*_n, N_n)``),
    ``residual_margin`` (``ε`` minus it), ``pairing``, ``pairing_bound``,
    ``pairing_margin``, ``zero_sum_error``, ``normalization_error`` and the
    ball margins of the points.
    """

    points: np.ndarray
    duals: np.ndarray
    cones: tuple
    translations: np.ndarray
    margins: dict
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def holds(self) -> bool:
        m = self.margins
        return bool(m["residual_margin"] > 0 and m["pairing_margin"] > 0
                    and m["zero_sum_error"] <= ZERO_SUM_TOL
                    and m["normalization_error"] <= NORMALIZATION_TOL
                    and m["ball_margin"] > 0)

    def to_dict(self) -> dict:
        return {"points": self.points.tolist(), "duals": self.duals.tolist(),
                "translations": self.translations.tolist(), "margins": dict(self.margins),
                "holds": self.holds}


def _localized_d1(sets, x_bar, a, radii, n):
    """Closest configuration of ``Ω_i - a_i`` (i < n) and ``Ω_n`` inside closed balls around ``x̄``.

    Returns points ``ω_i ∈ Ω_i`` (untranslated) or None if no tuple is feasible.
    """
    d = x_bar.size
    eye = np.eye(d)
    best, best_val = None, np.inf
    for tup in product(*[s.pieces() for s in sets]):
        model = Model()
        w = [model.var(d) for _ in tup]
        t = model.var(1, lb=0.0)[0]
        for wi, piece, r in zip(w, tup, radii):
            model.member(wi, piece)
            model.norm_le([(wi, eye)], -x_bar, float(r), n)
        for i in range(len(tup) - 1):
            model.norm_le([(w[-1], eye), (w[i], -eye)], a[i], int(t), n)
        model.minimize([(np.array([t]), np.ones((1, 1)))])
        res = model.solve()
        if res.status == "infeasible":
            continue
        if not res.optimal:
            raise NumericalFailure(f"localized distance subproblem ended with status {res.status}")
        pts = np.array([res.x[wi] for wi in w])
        if res.method != "exact-lp":
            pts = np.array([project(p, piece, EUCLIDEAN) for p, piece in zip(pts, tup)])
        val = float(np.max(norm(pts[-1] + a - pts[:-1], n)))
        if val < best_val:
            best, best_val = pts, val
    return best


def _subgradient_duals(v, cones, lam, rho, tau_target, n, last_zero):
    """Dual vectors in the weighted subdifferentials of ``|v_i|`` with least cone residual."""
    k1, d = v.shape
    lens = norm(v, n)
    M = float(lens.max())
    dual = n.dual()
    eye = np.eye(d)
    zero = np.zeros(d)
    model = Model()
    w = model.var(k1, lb=0.0)
    x = [model.var(d) for _ in range(k1)]
    for i in range(k1):
        if lens[i] <= 1e-12 * max(M, 1.0):
            model.eq([(w[i:i + 1], np.ones((1, 1)))], [0.0])
            model.eq([(x[i], eye)], zero)
        elif n.is_polyhedral:
            model.eq([(x[i], v[i][None, :]), (w[i:i + 1], -np.array([[lens[i]]]))], [0.0])
            model.norm_le([(x[i], eye)], zero, int(w[i]), dual)
        else:
            J = norming_vector(v[i], dual)
            model.eq([(x[i], eye), (w[i:i + 1], -J[:, None])], zero)
    model.eq([(w, np.ones((1, k1)))], [1.0])
    model.le([(w, -lens[None, :])], [-tau_target * M])
    s = model.var(k1 + 1, lb=0.0)
    last = [(xi, -eye) for xi in x]
    for i, K in enumerate(cones):
        terms = [(x[i], eye)] if i < k1 else last
        if i == k1 and last_zero:
            K = ConeRep.zero(d)
        if K.full:
            continue
        if K.is_zero:
            model.norm_le(terms, zero, int(s[i]), dual)
        else:
            mu = model.var(K.generators.shape[0], lb=0.0)
            model.norm_le(terms + [(mu, -K.generators.T)], zero, int(s[i]), dual)
    weights = np.array([[lam] * k1 + [rho]])
    model.minimize([(s, weights)])
    res = model.solve()
    if not res.optimal:
        return None
    z = np.array([res.x[xi] for xi in x])
    total = float(dual_norm(z, n).sum())
    if not total > 0:
        return None
    z = z / total
    return np.vstack([z, -z.sum(axis=0)])


def _separation_core(sets, x_bar, a, eps, lam, rho, tau, n, kind, last_zero, scales):
    if not (0 < tau < 1):
        raise PreconditionFailed("tau must lie in ]0, 1[")
    if not (eps > 0 and lam > 0 and rho > 0):
        raise PreconditionFailed("eps, lam and rho must be positive")
    k = len(sets)
    tau_target = 0.5 * (1 + tau)
    dual = n.dual()
    for s in scales:
        radii = [s * lam] * (k - 1) + [s * rho]
        pts = _localized_d1(sets, x_bar, a, radii, n)
        if pts is None:
            continue
        v = pts[-1] + a - pts[:-1]
        M = float(np.max(norm(v, n)))
        if not M > 1e-12:
            continue
        try:
            cones = [normal_cone(S, p, kind) for S, p in zip(sets, pts)]
        except PreconditionFailed:
            continue
        z = _subgradient_duals(v, cones, lam, rho, tau_target, n, last_zero)
        if z is None:
            continue
        z[-1] = -z[:-1].sum(axis=0)
        dists = [dist_to_cone(zi, K, dual)[0] for zi, K in zip(z[:-1], cones[:-1])]
        last = float(dual_norm(z[-1], n)) if last_zero else dist_to_cone(z[-1], cones[-1], dual)[0]
        residual = lam * float(np.sum(dists)) + rho * last
        pairing = float(np.sum(z[:-1] * v))
        ball = min(lam - float(np.max(norm(pts[:-1] - x_bar, n))), rho - float(norm(pts[-1] - x_bar, n)))
        margins = {
            "residual": residual, "residual_margin": eps - residual,
            "pairing": pairing, "pairing_bound": tau * M, "pairing_margin": pairing - tau * M,
            "zero_sum_error": float(np.abs(z.sum(axis=0)).max()),
            "normalization_error": abs(float(dual_norm(z[:-1], n).sum()) - 1.0),
            "ball_margin": ball, "scale": s,
        }
        cert = SeparationCertificate(pts, z, tuple(cones), np.asarray(a, dtype=float), margins)
        if cert.holds:
            return cert
    raise NotFoundAtBudget("no separation certificate at the tried ball radii")


DEFAULT_SCALES = (0.999, 0.5, 0.25, 0.1)


def asymmetric_separation_certificate(sets, x_bar, a, *, eps: float, lam: float, rho: float,
                                      tau: float = 0.5, n: NormSpec = EUCLIDEAN, kind: str = "frechet",
                                      scales=DEFAULT_SCALES) -> SeparationCertificate:
    """Certificate for sets whose first ``n-1`` members, translated by ``a``, miss the last one.

    Preconditions: ``∩_{i<n}(Ω_i - a_i) ∩ Ω_n = ∅`` (decided exactly or by the
    emptiness oracle) and ``max|a_i| < d1(Ω_1 - a_1, ..., Ω_n) + ε``.  The
    result has ``ω_i ∈ Ω_i ∩ B_λ(x̄)`` (i < n), ``ω_n ∈ Ω_n ∩ B_ρ(x̄)``,
    ``Σ x*_i = 0``, ``Σ_{i<n} |x*_i| = 1``,
    ``λ Σ_{i<n} d(x*_i, N_i) + ρ d(x*_n, N_n) < ε`` and
    ``Σ_{i<n} <x*_i, ω_n + a_i - ω_i> > τ max_{i<n} |ω_n + a_i - ω_i|``.

    Raises
    ------
    PreconditionFailed
        If a precondition fails or cannot be decided.
    NotFoundAtBudget
        If no tried ball radius gives a verified certificate.
    """
    sets = list(sets)
    x_bar = np.asarray(x_bar, dtype=float)
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape[0] != len(sets) - 1:
        raise PreconditionFailed("need one translation per set except the last")
    _check_reference(sets, x_bar)
    moved = [s.translate(-ai) for s, ai in zip(sets, a)] + [sets[-1]]
    empty, *_ = decide_empty(moved, None, np.inf, n)
    if empty is not True:
        raise PreconditionFailed("the translated sets must not meet the last set")
    gap = d1_sets(moved, n).lower
    if not float(np.max(norm(a, n))) < gap + eps:
        raise PreconditionFailed("translations exceed the set distance plus eps")
    return _separation_core(sets, x_bar, a, eps, lam, rho, tau, n, kind, False, scales)


def symmetric_separation_certificate(sets, x_bar, a, *, eps: float, lam: float, rho: float,
                                     tau: float = 0.5, n: NormSpec = EUCLIDEAN, kind: str = "frechet",
                                     scales=DEFAULT_SCALES) -> SeparationCertificate:
    """Certificate when all sets are translated and the intersection misses ``B_ρ(x̄)``.

    Preconditions: ``∩(Ω_i - a_i) ∩ B_ρ(x̄) = ∅`` and
    ``max|a_i| < d1(Ω_1 - a_1, ..., Ω_n - a_n, B_ρ(x̄)) + ε``.  The result has
    ``ω_i ∈ Ω_i ∩ B_λ(x̄)``, a point ``x ∈ B_ρ(x̄)`` (the last row of
    ``points``), ``Σ_i |x*_i| = 1``, ``λ Σ d(x*_i, N_i) + ρ |Σ x*_i| < ε`` and
    ``Σ <x*_i, x + a_i - ω_i> > τ max |x + a_i - ω_i|``.  The last row of
    ``duals`` is ``-Σ x*_i``.
    """
    sets = list(sets)
    x_bar = np.asarray(x_bar, dtype=float)
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape[0] != len(sets):
        raise PreconditionFailed("need one translation per set")
    _check_reference(sets, x_bar)
    if not rho > 0 or not np.isfinite(rho):
        raise PreconditionFailed("rho must be positive and finite")
    moved = [s.translate(-ai) for s, ai in zip(sets, a)]
    empty, *_ = decide_empty(moved, x_bar, rho, n)
    if empty is not True:
        raise PreconditionFailed("the translated sets must not meet the ball around x_bar")
    ball = Ball(x_bar, rho, n)
    gap = d1_sets(moved + [ball], n).lower
    if not float(np.max(norm(a, n))) < gap + eps:
        raise PreconditionFailed("translations exceed the localized distance plus eps")
    return _separation_core(sets + [ball], x_bar, a, eps, lam, rho, tau, n, kind, True, scales)


def nonintersection_separation_certificate(sets, omegas, *, eps: float, lam: float, tau: float = 0.5,
                                           n: NormSpec = EUCLIDEAN, kind: str = "frechet",
                                           scales=DEFAULT_SCALES) -> SeparationCertificate:
    """Certificate for sets with empty intersection from near-closest points.

    Preconditions: ``∩ Ω_i = ∅`` and ``ω_i ∈ Ω_i`` with
    ``max_{i<n}|ω_i - ω_n| < d1(Ω_1, ..., Ω_n) + ε``.  The result has points
    ``ω'_i ∈ Ω_i ∩ B_λ(ω_i)``, ``Σ x*_i = 0``, ``Σ_{i<n}|x*_i| = 1``,
    ``Σ d(x*_i, N_{Ω_i}(ω'_i)) < ε/λ`` and
    ``Σ_{i<n} <x*_i, ω'_n - ω'_i> > τ max_{i<n} |ω'_i - ω'_n|``.
    """
    sets = list(sets)
    om = np.atleast_2d(np.asarray(omegas, dtype=float))
    if om.shape[0] != len(sets):
        raise PreconditionFailed("need one base point per set")
    for s, w in zip(sets, om):
        if not s.contains(w, TOL_MEMBER):
            raise PreconditionFailed("base point outside its set")
    empty, *_ = decide_empty(sets, None, np.inf, n)
    if empty is not True:
        raise PreconditionFailed("the sets must have empty intersection")
    gap = d1_sets(sets, n).lower
    if not float(np.max(norm(om[:-1] - om[-1], n))) < gap + eps:
        raise PreconditionFailed("base points are not eps-closest")
    shifted = [s.translate(-w) for s, w in zip(sets, om)]
    a = om[-1] - om[:-1]
    d = om.shape[1]
    cert = _separation_core(shifted, np.zeros(d), a, eps, lam, lam, tau, n, kind, False, scales)
    pts = cert.points + om
    z = cert.duals
    dual = n.dual()
    cones = tuple(normal_cone(s, p, kind) for s, p in zip(sets, pts))
    defect = float(sum(dist_to_cone(zi, K, dual)[0] for zi, K in zip(z, cones)))
    diffs = pts[-1] - pts[:-1]
    M = float(np.max(norm(diffs, n)))
    pairing = float(np.sum(z[:-1] * diffs))
    margins = dict(cert.margins)
    margins.update({"cone_defect": defect, "residual": lam * defect, "residual_margin": eps - lam * defect,
                    "pairing": pairing, "pairing_bound": tau * M, "pairing_margin": pairing - tau * M,
                    "ball_margin": lam - float(np.max(norm(pts - om, n)))})
    out = SeparationCertificate(pts, z, cones, a, margins, {"base_points": om})
    if not out.holds:
        raise NotFoundAtBudget("mapped certificate fails its recheck")
    return out
