"""Polyhedral cones and normal cones of the supported set classes.

Dual vectors are identified with R^d through the standard pairing, so normal
cones do not depend on the norm; only distances to them do.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.optimize import nnls

from .errors import DimensionMismatch, PreconditionFailed, UnsupportedClass
from .model import Model
from .norms import EUCLIDEAN, NormSpec, norm
from .sets import AffineSubspace, Ball, HPolyhedron, PointCloud, SetRep, is_singleton_piece, \
    orthonormal_basis
from .tolerances import TOL_MEMBER

KINDS = ("frechet", "clarke", "convex")


@dataclass(frozen=True, eq=False)
class ConeRep:
    """Closed convex cone ``{G^T lam : lam >= 0}`` in R^d.

    ``halfspaces`` optionally holds an equivalent description
    ``(H, E)`` meaning ``{y : H y <= 0, E y = 0}``.  ``full`` marks the whole
    space, which is then not expanded into generators for distance queries.
    """

    generators: np.ndarray
    dim: int
    halfspaces: tuple | None = None
    full: bool = False

    def __post_init__(self):
        G = np.asarray(self.generators, dtype=float).reshape(-1, self.dim)
        G.setflags(write=False)
        object.__setattr__(self, "generators", G)

    @classmethod
    def zero(cls, d: int) -> "ConeRep":
        return cls(np.zeros((0, d)), d, (np.zeros((0, d)), np.eye(d)))

    @classmethod
    def whole(cls, d: int) -> "ConeRep":
        eye = np.eye(d)
        return cls(np.vstack([eye, -eye]), d, (np.zeros((0, d)), np.zeros((0, d))), full=True)

    @classmethod
    def subspace(cls, basis, d: int) -> "ConeRep":
        """The linear span of the rows of ``basis``."""
        basis = np.asarray(basis, dtype=float).reshape(-1, d)
        Q, N = orthonormal_basis(basis, d)
        if Q.shape[0] == d:
            return cls.whole(d)
        if Q.shape[0] == 0:
            return cls.zero(d)
        return cls(np.vstack([Q, -Q]), d, (np.zeros((0, d)), N))

    @classmethod
    def from_generators(cls, gens, d: int) -> "ConeRep":
        gens = np.asarray(gens, dtype=float).reshape(-1, d)
        lens = np.linalg.norm(gens, axis=1)
        keep = lens > 0
        return cls(gens[keep] / lens[keep, None], d)

    @property
    def is_zero(self) -> bool:
        return not self.full and self.generators.shape[0] == 0

    def contains(self, y, tol: float = TOL_MEMBER) -> bool:
        return dist_to_cone(y, self, EUCLIDEAN)[0] <= tol

    def to_dict(self) -> dict:
        out = {"dimension": self.dim, "generators": self.generators.tolist(), "full": self.full}
        if self.halfspaces is not None:
            out["halfspaces"] = {"H": self.halfspaces[0].tolist(), "E": self.halfspaces[1].tolist()}
        return out


def dist_to_cone(z, K: ConeRep, n: NormSpec = EUCLIDEAN):
    """Distance from ``z`` to the cone ``K`` in the norm ``n`` and a nearest point.

    When ``z`` is a dual vector the caller passes the dual norm.

    Returns
    -------
    tuple
        ``(distance, nearest point)``.
    """
    z = np.asarray(z, dtype=float)
    if z.size != K.dim:
        raise DimensionMismatch("vector and cone dimensions differ")
    if K.full:
        return 0.0, z.copy()
    G = K.generators
    if G.shape[0] == 0:
        return float(norm(z, n)), np.zeros_like(z)
    if n.kind == "euclidean" or (n.kind == "p" and n.p == 2.0):
        lam, _ = nnls(G.T, z)
        y = G.T @ lam
        return float(np.linalg.norm(z - y)), y
    d = z.size
    model = Model()
    lam = model.var(G.shape[0], lb=0.0)
    t = model.var(1, lb=0.0)[0]
    model.norm_le([(lam, -G.T)], z, int(t), n)
    model.minimize([(np.array([t]), np.ones((1, 1)))])
    res = model.solve()
    if not res.optimal:
        raise PreconditionFailed(f"cone distance problem ended with status {res.status}")
    y = G.T @ res.x[lam]
    return float(norm(z - y, n)), y


def _ball_cone(piece: Ball, w, tol):
    d = piece.dim
    if piece.is_whole_space:
        return ConeRep.zero(d)
    v = w - piece.center
    r = float(norm(v, piece.norm))
    if r < piece.radius - tol:
        return ConeRep.zero(d)
    nk = piece.norm
    if nk.kind == "euclidean" or (nk.kind == "p" and nk.p == 2.0):
        return ConeRep.from_generators(v[None, :], d)
    if nk.kind == "maximum":
        act = np.flatnonzero(np.abs(v) >= piece.radius - tol)
        gens = np.zeros((act.size, d))
        gens[np.arange(act.size), act] = np.sign(v[act])
        return ConeRep.from_generators(gens, d)
    if nk.is_sum:
        zero = np.abs(v) <= tol
        base = np.sign(v)
        zidx = np.flatnonzero(zero)
        gens = []
        for signs in product([-1.0, 1.0], repeat=zidx.size):
            g = base.copy()
            g[zidx] = signs
            gens.append(g)
        return ConeRep.from_generators(np.array(gens), d)
    g = np.sign(v) * np.abs(v) ** (nk.p - 1.0)
    return ConeRep.from_generators(g[None, :], d)


def _piece_cone(piece, w, tol):
    """Normal cone of a convex piece at ``w`` (identical for all three kinds)."""
    d = piece.dim
    if is_singleton_piece(piece):
        return ConeRep.whole(d)
    if isinstance(piece, HPolyhedron):
        if piece.A.shape[0] == 0:
            return ConeRep.zero(d)
        act = np.flatnonzero(piece.slack(w) >= -tol)
        if act.size == 0:
            return ConeRep.zero(d)
        return ConeRep.from_generators(piece.A[act], d)
    if isinstance(piece, Ball):
        return _ball_cone(piece, w, tol)
    if isinstance(piece, AffineSubspace):
        return ConeRep.subspace(piece.normal_basis, d)
    raise UnsupportedClass(f"no normal cone for {type(piece).__name__}")


def normal_cone(A: SetRep, w, kind: str = "frechet", tol: float = 1e-7) -> ConeRep:
    """Normal cone of ``A`` at the point ``w`` of ``A``.

    For a convex set the Fréchet, Clarke and convex-analysis cones coincide
    and the same cone is returned for every ``kind``.  For a finite union the
    pieces through ``w`` determine the cone: the Fréchet cone is the
    intersection of their cones and the Clarke cone (available for affine
    pieces) is the span of their normal spaces.  Isolated points of a point
    cloud have the whole space as normal cone.

    Raises
    ------
    PreconditionFailed
        If ``w`` is not in ``A``.
    UnsupportedClass
        For nonconvex configurations outside the supported classes.
    """
    if kind not in KINDS:
        raise PreconditionFailed(f"unknown cone kind {kind!r}")
    w = np.asarray(w, dtype=float)
    if w.size != A.dim:
        raise DimensionMismatch("point and set dimensions differ")
    d = A.dim
    pieces = A.pieces()
    active = [p for p in pieces if p._contains_piece(w, tol)]
    if not active:
        raise PreconditionFailed("normal cone requested at a point outside the set")
    if len(pieces) == 1:
        return _piece_cone(pieces[0], w, tol)
    if any(is_singleton_piece(p) for p in active):
        non_single = [p for p in active if not is_singleton_piece(p)]
        if not non_single:
            if kind == "convex":
                raise UnsupportedClass("convex normal cone of a finite point set is not supported")
            return ConeRep.whole(d)
        active = non_single
    if kind == "convex":
        if all(isinstance(p, AffineSubspace) for p in pieces) and len(active) == len(pieces):
            span = np.vstack([p.span_basis for p in pieces])
            _, N = orthonormal_basis(span, d)
            return ConeRep.subspace(N, d)
        raise UnsupportedClass("convex normal cone of this nonconvex set is not supported")
    if len(active) == 1:
        return _piece_cone(active[0], w, tol)
    if not all(isinstance(p, AffineSubspace) for p in active):
        raise UnsupportedClass("normal cone at a junction of non-affine pieces is not supported")
    if kind == "frechet":
        span = np.vstack([p.span_basis for p in active])
        _, N = orthonormal_basis(span, d)
        return ConeRep.subspace(N, d)
    normals = np.vstack([p.normal_basis for p in active])
    return ConeRep.subspace(normals, d)
