"""Norm families on R^d and their duals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, PreconditionFailed


@dataclass(frozen=True)
class NormSpec:
    """A norm on R^d: ``"euclidean"``, ``"maximum"`` or ``"p"`` with exponent ``p >= 1``.

    The sum norm is ``NormSpec("p", 1.0)``.
    """

    kind: str = "euclidean"
    p: float | None = None

    def __post_init__(self):
        if self.kind not in ("euclidean", "maximum", "p"):
            raise PreconditionFailed(f"unknown norm kind {self.kind!r}")
        if self.kind == "p":
            if self.p is None or not (self.p >= 1.0):
                raise PreconditionFailed("p-norm needs an exponent p >= 1")
            object.__setattr__(self, "p", float(self.p))
        elif self.p is not None:
            object.__setattr__(self, "p", None)

    @property
    def exponent(self) -> float:
        """Exponent in ``[1, inf]`` describing this norm."""
        if self.kind == "euclidean":
            return 2.0
        if self.kind == "maximum":
            return np.inf
        return self.p

    @property
    def is_sum(self) -> bool:
        return self.kind == "p" and self.p == 1.0

    @property
    def is_polyhedral(self) -> bool:
        """True for the maximum and sum norms, whose unit balls are polytopes."""
        return self.kind == "maximum" or self.is_sum

    def dual(self) -> "NormSpec":
        if self.kind == "euclidean":
            return self
        if self.kind == "maximum":
            return NormSpec("p", 1.0)
        if self.p == 1.0:
            return NormSpec("maximum")
        q = self.p / (self.p - 1.0)
        if q == 2.0:
            return NormSpec("p", 2.0)
        return NormSpec("p", q)

    def to_dict(self) -> dict:
        if self.kind == "p":
            return {"kind": "p", "p": self.p}
        return {"kind": self.kind}

    @classmethod
    def from_dict(cls, data: dict) -> "NormSpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise PreconditionFailed("norm must be an object with a 'kind' field")
        return cls(data["kind"], data.get("p"))

    @classmethod
    def parse(cls, value) -> "NormSpec":
        """Accept a NormSpec, a dict, or one of the strings euclidean/maximum/sum."""
        if isinstance(value, NormSpec):
            return value
        if isinstance(value, dict):
            return cls.from_dict(value)
        if value == "sum":
            return cls("p", 1.0)
        return cls(value)


EUCLIDEAN = NormSpec("euclidean")
MAXIMUM = NormSpec("maximum")
SUM = NormSpec("p", 1.0)


def _vec(v) -> np.ndarray:
    return np.asarray(v, dtype=float)


def norm(v, n: NormSpec = EUCLIDEAN, axis: int = -1):
    """Norm of a vector (or of each row along ``axis``)."""
    v = _vec(v)
    return np.linalg.norm(v, ord=n.exponent, axis=axis)


def dual_norm(v, n: NormSpec = EUCLIDEAN, axis: int = -1):
    """Dual norm of a functional under the standard pairing."""
    return norm(v, n.dual(), axis=axis)


def check_dims(*vectors) -> int:
    dims = {np.asarray(v).shape[-1] for v in vectors}
    if len(dims) != 1:
        raise DimensionMismatch(f"incompatible dimensions {sorted(dims)}")
    return dims.pop()


def norming_vector(z, n: NormSpec) -> np.ndarray:
    """Primal unit vector ``x`` with ``<z, x> = ||z||_*``.

    ``z`` is a functional measured in the dual of ``n``.  For the maximum norm
    the result is the sign vector of ``z`` (zero entries stay zero), for the sum
    norm a signed coordinate vector at the first largest entry.  ``z = 0``
    returns the zero vector.
    """
    z = _vec(z)
    if not np.any(z):
        return np.zeros_like(z)
    # the result is scale invariant; rescaling keeps subnormal inputs finite
    z = z / np.abs(z).max()
    if n.kind == "euclidean" or (n.kind == "p" and n.p == 2.0):
        return z / np.linalg.norm(z)
    if n.kind == "maximum":
        return np.sign(z)
    if n.p == 1.0:
        k = int(np.argmax(np.abs(z)))
        out = np.zeros_like(z)
        out[k] = np.sign(z[k])
        return out
    q = n.dual().p
    w = np.sign(z) * np.abs(z) ** (q - 1.0)
    return w / np.linalg.norm(w, ord=n.p)


def unit_ball_vertices(n: NormSpec, d: int) -> np.ndarray:
    """Vertices of the unit ball of a polyhedral norm (rows)."""
    if n.kind == "maximum":
        grids = np.array(np.meshgrid(*([[-1.0, 1.0]] * d), indexing="ij"))
        return grids.reshape(d, -1).T
    if n.is_sum:
        eye = np.eye(d)
        return np.vstack([eye, -eye])
    raise PreconditionFailed("unit ball is not a polytope for this norm")
