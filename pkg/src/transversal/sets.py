"""Computable closed subsets of R^d.

Every set decomposes into a finite union of convex *pieces*.  A piece is one
of: a single point (a one-point :class:`PointCloud`), an :class:`HPolyhedron`,
a :class:`Ball` or an :class:`AffineSubspace`.  Algorithms on general sets
enumerate pieces, which makes distances over finite unions exact whenever the
per-piece problems are.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import DimensionMismatch, PreconditionFailed
from .norms import EUCLIDEAN, NormSpec, norm
from .tolerances import TOL_MEMBER


def _frozen_array(a, ndim: int) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if ndim == 2 and arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != ndim:
        raise PreconditionFailed(f"expected a {ndim}-dimensional array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise PreconditionFailed("coordinates must be finite")
    arr.setflags(write=False)
    return arr


def orthonormal_basis(directions: np.ndarray, d: int, tol: float = 1e-10):
    """Return ``(Q, N)``: orthonormal rows spanning ``directions`` and its complement."""
    if directions.size == 0:
        return np.zeros((0, d)), np.eye(d)
    _, s, vt = np.linalg.svd(directions, full_matrices=True)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return vt[:rank], vt[rank:]


class SetRep:
    """Common interface of all set variants."""

    dim: int

    def pieces(self) -> tuple:
        raise NotImplementedError

    def contains(self, x, tol: float = TOL_MEMBER) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise DimensionMismatch("point and set dimensions differ")
        return any(p._contains_piece(x, tol) for p in self.pieces())

    def translate(self, offset) -> "SetRep":
        """The set ``self + offset``."""
        return Shifted(self, offset)

    @property
    def is_convex(self) -> bool:
        return len(self.pieces()) == 1

    @property
    def is_bounded(self) -> bool:
        return all(p._piece_bounded() for p in self.pieces())

    def bounding_box(self):
        """Axis-aligned box ``(lo, hi)`` containing a bounded set."""
        boxes = [p._piece_box() for p in self.pieces()]
        if any(b is None for b in boxes):
            raise PreconditionFailed("set is unbounded")
        lo = np.min([b[0] for b in boxes], axis=0)
        hi = np.max([b[1] for b in boxes], axis=0)
        return lo, hi

    def to_dict(self) -> dict:
        raise NotImplementedError

    # piece-level hooks, overridden by the convex variants
    def _contains_piece(self, x, tol):
        raise NotImplementedError

    def _piece_bounded(self):
        raise NotImplementedError

    def _piece_box(self):
        raise NotImplementedError

    def _shift_piece(self, offset):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class PointCloud(SetRep):
    """A finite set of points, stored as rows."""

    points: np.ndarray

    def __post_init__(self):
        pts = _frozen_array(self.points, 2)
        if pts.shape[0] == 0:
            raise PreconditionFailed("point cloud must be nonempty")
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def is_singleton(self) -> bool:
        return self.points.shape[0] == 1

    @property
    def point(self) -> np.ndarray:
        return self.points[0]

    def pieces(self):
        if self.is_singleton:
            return (self,)
        return tuple(PointCloud(p[None, :]) for p in self.points)

    def _contains_piece(self, x, tol):
        return bool(np.linalg.norm(x - self.point) <= tol)

    def _piece_bounded(self):
        return True

    def _piece_box(self):
        return self.points.min(axis=0), self.points.max(axis=0)

    def _shift_piece(self, offset):
        return PointCloud(self.points + offset)

    def to_dict(self):
        return {"variant": "PointCloud", "points": self.points.tolist()}


def singleton(x) -> PointCloud:
    return PointCloud(np.asarray(x, dtype=float)[None, :])


@dataclass(frozen=True, eq=False)
class HPolyhedron(SetRep):
    """The polyhedron ``{x : A x <= b}``; zero rows give the whole space."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = _frozen_array(self.A, 2)
        b = _frozen_array(np.atleast_1d(self.b), 1)
        if A.shape[0] != b.shape[0]:
            raise PreconditionFailed("HPolyhedron rows and right-hand side differ in length")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    def pieces(self):
        return (self,)

    def slack(self, x) -> np.ndarray:
        """Scaled constraint violations ``(A x - b) / ||a_k||``."""
        scale = np.linalg.norm(self.A, axis=1)
        scale[scale == 0] = 1.0
        return (np.asarray(x) @ self.A.T - self.b) / scale

    def _contains_piece(self, x, tol):
        if self.A.shape[0] == 0:
            return True
        return bool(np.all(self.slack(x) <= tol))

    def _piece_bounded(self):
        from .lp import LPProblem, lp_solve

        d = self.dim
        for j in range(d):
            for s in (1.0, -1.0):
                c = np.zeros(d)
                c[j] = -s
                sol = lp_solve(LPProblem(c, self.A, self.b))
                if sol.status == "unbounded":
                    return False
        return True

    def _piece_box(self):
        from .lp import LPProblem, lp_solve

        d = self.dim
        lo, hi = np.zeros(d), np.zeros(d)
        for j in range(d):
            c = np.zeros(d)
            c[j] = 1.0
            a = lp_solve(LPProblem(c, self.A, self.b))
            b = lp_solve(LPProblem(-c, self.A, self.b))
            if a.status != "optimal" or b.status != "optimal":
                return None
            lo[j], hi[j] = a.value, -b.value
        return lo, hi

    def _shift_piece(self, offset):
        return HPolyhedron(self.A, self.b + self.A @ offset)

    def to_dict(self):
        return {"variant": "HPolyhedron", "A": self.A.tolist(), "b": self.b.tolist()}


def box(lo, hi) -> HPolyhedron:
    """The axis-aligned box ``[lo, hi]`` as an HPolyhedron."""
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    d = lo.size
    eye = np.eye(d)
    return HPolyhedron(np.vstack([eye, -eye]), np.concatenate([hi, -lo]))


def halfspace(a, beta) -> HPolyhedron:
    """The halfspace ``{x : <a, x> <= beta}``."""
    return HPolyhedron(np.asarray(a, dtype=float)[None, :], [beta])


@dataclass(frozen=True, eq=False)
class Ball(SetRep):
    """Closed ball ``{x : ||x - center|| <= radius}``; ``radius = inf`` is the whole space."""

    center: np.ndarray
    radius: float
    norm: NormSpec = EUCLIDEAN

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen_array(self.center, 1))
        r = float(self.radius)
        if not r > 0:
            raise PreconditionFailed("ball radius must be positive (or inf)")
        object.__setattr__(self, "radius", r)
        object.__setattr__(self, "norm", NormSpec.parse(self.norm))

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def is_whole_space(self) -> bool:
        return not np.isfinite(self.radius)

    def pieces(self):
        return (self,)

    def _contains_piece(self, x, tol):
        if self.is_whole_space:
            return True
        return bool(norm(x - self.center, self.norm) <= self.radius + tol)

    def _piece_bounded(self):
        return not self.is_whole_space

    def _piece_box(self):
        if self.is_whole_space:
            return None
        # the unit ball of every supported norm lies in the unit max-ball
        return self.center - self.radius, self.center + self.radius

    def _shift_piece(self, offset):
        return Ball(self.center + offset, self.radius, self.norm)

    def to_dict(self):
        r = self.radius if np.isfinite(self.radius) else "inf"
        return {"variant": "Ball", "center": self.center.tolist(), "radius": r,
                "norm": self.norm.to_dict()}


def whole_space(d: int) -> Ball:
    return Ball(np.zeros(d), np.inf)


@dataclass(frozen=True, eq=False)
class AffineSubspace(SetRep):
    """The affine set ``base + span(directions)``."""

    base: np.ndarray
    directions: np.ndarray

    def __post_init__(self):
        base = _frozen_array(self.base, 1)
        dirs = np.array(self.directions, dtype=float)
        if dirs.size == 0:
            dirs = np.zeros((0, base.size))
        dirs = _frozen_array(dirs, 2) if dirs.size else dirs
        if dirs.shape[1] != base.size:
            raise PreconditionFailed("affine directions have the wrong dimension")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "directions", dirs)
        Q, N = orthonormal_basis(dirs, base.size)
        object.__setattr__(self, "_span", Q)
        object.__setattr__(self, "_normal", N)

    @property
    def dim(self) -> int:
        return self.base.size

    @property
    def span_basis(self) -> np.ndarray:
        """Orthonormal rows spanning the direction space."""
        return self._span

    @property
    def normal_basis(self) -> np.ndarray:
        """Orthonormal rows spanning the orthogonal complement."""
        return self._normal

    def pieces(self):
        return (self,)

    def _contains_piece(self, x, tol):
        return bool(np.linalg.norm(self._normal @ (x - self.base)) <= tol)

    def _piece_bounded(self):
        return self._span.shape[0] == 0

    def _piece_box(self):
        if self._span.shape[0]:
            return None
        return self.base.copy(), self.base.copy()

    def _shift_piece(self, offset):
        return AffineSubspace(self.base + offset, self.directions)

    def to_dict(self):
        return {"variant": "AffineSubspace", "base": self.base.tolist(),
                "directions": self.directions.tolist()}


def line(point, direction) -> AffineSubspace:
    return AffineSubspace(point, np.asarray(direction, dtype=float)[None, :])


@dataclass(frozen=True, eq=False)
class Shifted(SetRep):
    """The set ``inner + offset``."""

    inner: SetRep
    offset: np.ndarray

    def __post_init__(self):
        off = _frozen_array(self.offset, 1)
        if off.size != self.inner.dim:
            raise DimensionMismatch("shift offset has the wrong dimension")
        object.__setattr__(self, "offset", off)

    @property
    def dim(self) -> int:
        return self.inner.dim

    def pieces(self):
        return tuple(p._shift_piece(self.offset) for p in self.inner.pieces())

    def to_dict(self):
        return {"variant": "Shifted", "inner": self.inner.to_dict(), "offset": self.offset.tolist()}


@dataclass(frozen=True, eq=False)
class FiniteUnion(SetRep):
    """Union of finitely many sets."""

    members: tuple

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise PreconditionFailed("finite union must be nonempty")
        dims = {m.dim for m in members}
        if len(dims) != 1:
            raise DimensionMismatch("union members differ in dimension")
        object.__setattr__(self, "members", members)

    @property
    def dim(self) -> int:
        return self.members[0].dim

    def pieces(self):
        return tuple(p for m in self.members for p in m.pieces())

    def to_dict(self):
        return {"variant": "FiniteUnion", "members": [m.to_dict() for m in self.members]}


def is_singleton_piece(piece) -> bool:
    return isinstance(piece, PointCloud) and piece.is_singleton


def linear_description(piece):
    """``(G, h, E, e)`` with ``piece = {x : G x <= h, E x = e}``, or ``None``.

    Returns ``None`` for pieces that are not polyhedra (curved balls).
    """
    d = piece.dim
    empty_rows = np.zeros((0, d)), np.zeros(0)
    if isinstance(piece, PointCloud):
        return (*empty_rows, np.eye(d), piece.point.copy())
    if isinstance(piece, HPolyhedron):
        return (piece.A, piece.b, *empty_rows)
    if isinstance(piece, AffineSubspace):
        N = piece.normal_basis
        return (*empty_rows, N, N @ piece.base)
    if isinstance(piece, Ball):
        if piece.is_whole_space:
            return (*empty_rows, *empty_rows)
        c, r = piece.center, piece.radius
        if piece.norm.kind == "maximum":
            eye = np.eye(d)
            return (np.vstack([eye, -eye]), np.concatenate([c + r, r - c]), *empty_rows)
        if piece.norm.is_sum and d <= 10:
            signs = np.array(list(product([-1.0, 1.0], repeat=d)))
            return (signs, signs @ c + r, *empty_rows)
        return None
    raise PreconditionFailed(f"not a convex piece: {type(piece).__name__}")


def is_polyhedral_piece(piece) -> bool:
    return linear_description(piece) is not None


def combine_linear(pieces):
    """Stack the linear descriptions of several polyhedral pieces (their intersection)."""
    descs = [linear_description(p) for p in pieces]
    if any(dsc is None for dsc in descs):
        return None
    G = np.vstack([dsc[0] for dsc in descs])
    h = np.concatenate([dsc[1] for dsc in descs])
    E = np.vstack([dsc[2] for dsc in descs])
    e = np.concatenate([dsc[3] for dsc in descs])
    return G, h, E, e


def set_from_dict(data: dict, path: str = "set") -> SetRep:
    """Build a SetRep from its JSON form; errors name the offending path."""
    if not isinstance(data, dict) or "variant" not in data:
        raise PreconditionFailed(f"{path}: expected an object with a 'variant' field")
    v = data["variant"]
    try:
        if v == "PointCloud":
            return PointCloud(data["points"])
        if v == "HPolyhedron":
            return HPolyhedron(data["A"], data["b"])
        if v == "Ball":
            r = data.get("radius", "inf")
            r = np.inf if r in ("inf", None) else float(r)
            return Ball(data["center"], r, NormSpec.parse(data.get("norm", {"kind": "euclidean"})))
        if v == "AffineSubspace":
            return AffineSubspace(data["base"], data.get("directions", []))
        if v == "Shifted":
            return Shifted(set_from_dict(data["inner"], path + ".inner"), data["offset"])
        if v == "FiniteUnion":
            return FiniteUnion(tuple(set_from_dict(m, f"{path}.members[{k}]")
                                     for k, m in enumerate(data["members"])))
    except KeyError as exc:
        raise PreconditionFailed(f"{path}: missing field {exc.args[0]!r}") from None
    except PreconditionFailed as exc:
        raise PreconditionFailed(f"{path}: {exc}") from None
    raise PreconditionFailed(f"{path}: unknown variant {v!r}")
