"""Rescaling constructions for families of dual vectors near cones.

A family ``z_1..z_n`` of functionals is "nearly separating" for cones
``K_1..K_n`` when the vectors are almost in the cones and almost sum to zero.
The operations here trade one defect for the other with explicit, certified
constants:

* :func:`rebalance_to_zero_sum` removes the sum defect (subtract the mean).
* :func:`snap_to_cones` removes the cone defect (move to nearest cone points).
* :func:`pairing_bound` tracks how a pairing lower bound survives either step.
* :func:`normalize_then_rebalance` / :func:`normalize_then_snap` are the
  parameter choices that convert between the two defect types with the
  residual growing from ``eps`` to ``eps / (1 - eps)``.
* :func:`two_set_exact_flip` is a sharper conversion for two vectors.
* :func:`asymmetric_snap` works with a normalization that skips the last vector.

Every vector is measured in the dual norm of the primal :class:`NormSpec`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .cones import ConeRep, dist_to_cone
from .errors import DimensionMismatch, NearestPointFailure, PreconditionFailed
from .norms import EUCLIDEAN, NormSpec, dual_norm, norm
from .tolerances import TOL_MEMBER

NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class ParamSet:
    """Scalar parameters; each given value must be positive (``tau`` in ``]0, 1]``)."""

    epsilon: float | None = None
    rho: float | None = None
    lam: float | None = None
    alpha: float | None = None
    tau: float | None = None
    xi: float | None = None
    delta: float | None = None
    epsilon_prime: float | None = None

    def __post_init__(self):
        for name in ("epsilon", "rho", "lam", "alpha", "tau", "xi", "delta", "epsilon_prime"):
            v = getattr(self, name)
            if v is not None and not (v > 0):
                raise PreconditionFailed(f"parameter {name} must be positive, got {v}")
        if self.tau is not None and self.tau > 1:
            raise PreconditionFailed("tau must lie in ]0, 1]")

    def require(self, *names):
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise PreconditionFailed(f"missing parameters: {', '.join(missing)}")
        return tuple(getattr(self, n) for n in names)


@dataclass(frozen=True)
class DualFamily:
    """Dual vectors (rows of ``z``) paired with cones; ``margins`` records certified slacks."""

    z: np.ndarray
    cones: tuple
    norm: NormSpec = EUCLIDEAN
    params: ParamSet = field(default_factory=ParamSet)
    margins: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        z = np.atleast_2d(np.asarray(self.z, dtype=float))
        cones = tuple(self.cones)
        if len(cones) != z.shape[0]:
            raise PreconditionFailed("need one cone per vector")
        if any(K.dim != z.shape[1] for K in cones):
            raise DimensionMismatch("cone and vector dimensions differ")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "cones", cones)

    @property
    def n(self) -> int:
        return self.z.shape[0]

    @property
    def dual(self) -> NormSpec:
        return self.norm.dual()

    def lengths(self) -> np.ndarray:
        return dual_norm(self.z, self.norm)

    def total_length(self, skip_last: bool = False) -> float:
        lens = self.lengths()
        return float(lens[:-1].sum() if skip_last else lens.sum())

    def sum_defect(self) -> float:
        """``||sum z_i||_*``."""
        return float(dual_norm(self.z.sum(axis=0), self.norm))

    def cone_distances(self) -> np.ndarray:
        return np.array([dist_to_cone(zi, K, self.dual)[0] for zi, K in zip(self.z, self.cones)])

    def cone_defect(self) -> float:
        """``sum_i d(z_i, K_i)`` in the dual norm."""
        return float(self.cone_distances().sum())


def _check_normalized(f: DualFamily, skip_last: bool = False):
    total = f.total_length(skip_last)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        which = "sum over i<n" if skip_last else "sum"
        raise PreconditionFailed(f"normalization violated: {which} of dual norms is {total!r}, not 1")


def _scaling_precondition(f: DualFamily):
    eps, rho, lam = f.params.require("epsilon", "rho", "lam")
    _check_normalized(f)
    lhs = lam * f.cone_defect() + rho * f.sum_defect()
    if not lhs < eps:
        raise PreconditionFailed(
            f"precondition lam*sum d(z_i,K_i) + rho*||sum z_i|| < eps violated ({lhs!r} >= {eps!r})")
    return eps, rho, lam, lhs


def rebalance_to_zero_sum(f: DualFamily) -> DualFamily:
    """Subtract the mean and renormalize; requires ``eps + lam <= rho``.

    Returns a zero-sum family with ``sum d(z_i, K_i) < eps / lam`` and unit
    total length.  ``margins`` holds ``eps/lam - sum d`` and the normalization
    and zero-sum errors.
    """
    eps, rho, lam, _ = _scaling_precondition(f)
    if eps + lam > rho * (1 + 1e-12):
        raise PreconditionFailed(f"ordering eps + lam <= rho violated ({eps + lam!r} > {rho!r})")
    v = f.z - f.z.sum(axis=0) / f.n
    total = float(dual_norm(v, f.norm).sum())
    out = replace(f, z=v / total, margins={})
    return _with_margins(out, target=("cone", eps / lam))


def snap_to_cones(f: DualFamily) -> DualFamily:
    """Replace each vector by its nearest cone point and renormalize; requires ``eps + rho <= lam``.

    Returns a family in the cones with ``||sum z_i|| < eps / rho``.

    Raises
    ------
    NearestPointFailure
        If the computed nearest points do not certify the strict slack.
    """
    eps, rho, lam, _ = _scaling_precondition(f)
    if eps + rho > lam * (1 + 1e-12):
        raise PreconditionFailed(f"ordering eps + rho <= lam violated ({eps + rho!r} > {lam!r})")
    v = np.array([dist_to_cone(zi, K, f.dual)[1] for zi, K in zip(f.z, f.cones)])
    moved = float(dual_norm(f.z - v, f.norm).sum())
    if not lam * moved + rho * f.sum_defect() < eps:
        raise NearestPointFailure("nearest cone points do not certify the strict slack")
    total = float(dual_norm(v, f.norm).sum())
    out = replace(f, z=v / total, margins={})
    return _with_margins(out, target=("sum", eps / rho))


def _with_margins(f: DualFamily, target) -> DualFamily:
    kind, bound = target
    margins = {"normalization_error": abs(f.total_length() - 1.0)}
    if kind == "cone":
        margins["cone_defect"] = f.cone_defect()
        margins["cone_margin"] = bound - margins["cone_defect"]
        margins["zero_sum_error"] = float(np.abs(f.z.sum(axis=0)).max())
    else:
        margins["sum_defect"] = f.sum_defect()
        margins["sum_margin"] = bound - margins["sum_defect"]
        margins["cone_membership_error"] = float(f.cone_distances().max())
    return replace(f, margins=margins)


@dataclass(frozen=True)
class PairingResult:
    tau_hat: float
    holds: bool
    pairing: float
    bound: float
    tau_hat_proof: float
    holds_proof: bool
    family: DualFamily


def pairing_bound(f: DualFamily, x, which: str = "part-i") -> PairingResult:
    """Check how a pairing bound ``sum <z_i, x_i> >= tau max ||x_i||`` survives a rescaling.

    ``which`` selects the construction: ``"part-i"`` (rebalance) gives
    ``tau_hat = (tau rho - eps)/(rho + eps)``, ``"part-ii"`` (snap) gives
    ``tau_hat = (tau lam - eps)/(lam + eps)``.  The alternative denominator
    ``rho + lam`` for part (ii) is evaluated too and reported as
    ``tau_hat_proof``/``holds_proof``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape != f.z.shape:
        raise DimensionMismatch("primal vectors must match the dual family")
    M = float(np.max(norm(x, f.norm)))
    if M == 0:
        raise PreconditionFailed("primal vectors must not all be zero")
    (tau,) = f.params.require("tau")
    eps, rho, lam = f.params.require("epsilon", "rho", "lam")
    start = float(np.sum(f.z * x))
    if start < tau * M * (1 - 1e-12):
        raise PreconditionFailed("pairing precondition sum <z_i, x_i> >= tau max ||x_i|| violated")
    if which == "part-i":
        out = rebalance_to_zero_sum(f)
        tau_hat = (tau * rho - eps) / (rho + eps)
        tau_proof = tau_hat
    elif which == "part-ii":
        out = snap_to_cones(f)
        tau_hat = (tau * lam - eps) / (lam + eps)
        tau_proof = (tau * lam - eps) / (rho + lam)
    else:
        raise PreconditionFailed(f"unknown part {which!r}")
    pairing = float(np.sum(out.z * x))
    return PairingResult(tau_hat, pairing > tau_hat * M, pairing, tau_hat * M,
                         tau_proof, pairing > tau_proof * M, out)


def _family(z, cones, n, **params):
    return DualFamily(np.atleast_2d(np.asarray(z, dtype=float)), tuple(cones), n, ParamSet(**params))


def normalize_then_rebalance(z, cones, eps: float, n: NormSpec = EUCLIDEAN) -> DualFamily:
    """Turn cone-feasible vectors with ``||sum z_i|| < eps`` into a zero-sum family.

    The output satisfies ``sum d(z_i, K_i) < eps / (1 - eps)``.
    """
    if not 0 < eps < 1:
        raise PreconditionFailed("eps must lie in ]0, 1[")
    f = _family(z, cones, n, epsilon=eps, rho=1.0, lam=1.0 - eps)
    worst = float(f.cone_distances().max())
    if worst > TOL_MEMBER:
        raise PreconditionFailed(f"input vectors must lie in their cones (distance {worst!r})")
    if not f.sum_defect() < eps:
        raise PreconditionFailed("precondition ||sum z_i|| < eps violated")
    out = rebalance_to_zero_sum(f)
    return _with_margins(out, target=("cone", eps / (1 - eps)))


def normalize_then_snap(z, cones, eps: float, n: NormSpec = EUCLIDEAN) -> DualFamily:
    """Turn a zero-sum family with ``sum d(z_i, K_i) < eps`` into cone-feasible vectors.

    The output satisfies ``||sum z_i|| < eps / (1 - eps)``.
    """
    if not 0 < eps < 1:
        raise PreconditionFailed("eps must lie in ]0, 1[")
    f = _family(z, cones, n, epsilon=eps, rho=1.0 - eps, lam=1.0)
    if f.sum_defect() > 1e-12:
        raise PreconditionFailed("input vectors must sum to zero")
    if not f.cone_defect() < eps:
        raise PreconditionFailed("precondition sum d(z_i, K_i) < eps violated")
    out = snap_to_cones(f)
    return _with_margins(out, target=("sum", eps / (1 - eps)))


def two_set_exact_flip(z1, z2, K1: ConeRep, K2: ConeRep, eps: float, n: NormSpec = EUCLIDEAN):
    """For two cone-feasible vectors with ``||z_1 + z_2|| < eps``, return an exactly opposite pair.

    The longer vector (the first one on ties) is rescaled to length 1/2 and
    its negative is taken as the partner, which then lies within ``eps`` of
    its cone.

    Returns
    -------
    tuple
        ``(zhat_1, zhat_2, margins)`` in the input order.
    """
    f = _family([z1, z2], [K1, K2], n, epsilon=eps)
    _check_normalized(f)
    if max(f.cone_distances()) > TOL_MEMBER:
        raise PreconditionFailed("input vectors must lie in their cones")
    if not f.sum_defect() < eps:
        raise PreconditionFailed("precondition ||z_1 + z_2|| < eps violated")
    lens = f.lengths()
    swap = lens[1] > lens[0]
    big, Kbig, Ksmall = (1, K2, K1) if swap else (0, K1, K2)
    zb = f.z[big]
    hat_big = zb / (2.0 * lens[big])
    hat_small = -hat_big
    residual = dist_to_cone(hat_small, Ksmall, f.dual)[0]
    margins = {"residual": residual, "margin": eps - residual, "swapped": bool(swap),
               "big_membership": dist_to_cone(hat_big, Kbig, f.dual)[0]}
    if swap:
        return hat_small, hat_big, margins
    return hat_big, hat_small, margins


def asymmetric_snap(z, cones, eps: float, n: NormSpec = EUCLIDEAN) -> DualFamily:
    """Snap the first ``n-1`` vectors into their cones keeping an exact zero sum.

    Input: zero-sum vectors with ``sum d(z_i, K_i) < eps`` and
    ``sum_{i<n} ||z_i|| = 1``.  Output: ``z_i`` in ``K_i`` for ``i < n``,
    ``z_n = -sum_{i<n} z_i`` with ``d(z_n, K_n) < eps / (1 - eps)``.
    """
    if not 0 < eps < 1:
        raise PreconditionFailed("eps must lie in ]0, 1[")
    f = _family(z, cones, n, epsilon=eps)
    _check_normalized(f, skip_last=True)
    if f.sum_defect() > 1e-12:
        raise PreconditionFailed("input vectors must sum to zero")
    if not f.cone_defect() < eps:
        raise PreconditionFailed("precondition sum d(z_i, K_i) < eps violated")
    y = np.array([dist_to_cone(zi, K, f.dual)[1] for zi, K in zip(f.z, f.cones)])
    scale = float(dual_norm(y[:-1], n).sum())
    zhat = np.empty_like(y)
    zhat[:-1] = y[:-1] / scale
    zhat[-1] = -zhat[:-1].sum(axis=0)
    out = replace(f, z=zhat)
    last = dist_to_cone(zhat[-1], f.cones[-1], f.dual)[0]
    margins = {
        "last_residual": last,
        "last_margin": eps / (1 - eps) - last,
        "zero_sum_error": float(np.abs(zhat.sum(axis=0)).max()),
        "normalization_error": abs(out.total_length(skip_last=True) - 1.0),
        "cone_membership_error": max(dist_to_cone(zi, K, f.dual)[0]
                                     for zi, K in zip(zhat[:-1], f.cones[:-1])) if f.n > 1 else 0.0,
    }
    return replace(out, margins=margins)
