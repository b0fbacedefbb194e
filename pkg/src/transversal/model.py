"""A tiny convex modelling layer.

Problems built from linear constraints, memberships in convex pieces and
norm-epigraph constraints are solved by the package's own simplex method when
every norm involved is polyhedral (maximum or sum).  Problems containing a
euclidean or general p-norm constraint, or a curved ball, are handed to cvxpy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure
from .lp import LPProblem, lp_solve
from .norms import NormSpec
from .sets import Ball, linear_description

# Relative accuracy assumed for conic solves when reporting lower brackets.
CONIC_GAP = 1e-7


@dataclass(frozen=True)
class ModelResult:
    status: str
    x: np.ndarray | None
    value: float
    method: str

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    def lower(self) -> float:
        """Conservative lower bound on the optimal value."""
        if self.method == "exact-lp":
            return self.value
        return self.value - CONIC_GAP * (1.0 + abs(self.value))


class Model:
    """Minimize a linear objective over blocks of real variables."""

    def __init__(self):
        self.n = 0
        self.lb: list[float] = []
        self.ub: list[float] = []
        self._le: list[tuple[dict, np.ndarray]] = []
        self._eq: list[tuple[dict, np.ndarray]] = []
        self._conic: list[tuple[dict, np.ndarray, object, NormSpec]] = []
        self._obj = np.zeros(0)

    def var(self, k: int, lb: float = -np.inf, ub: float = np.inf) -> np.ndarray:
        """Allocate ``k`` variables and return their indices."""
        idx = np.arange(self.n, self.n + k)
        self.n += k
        self.lb.extend([lb] * k)
        self.ub.extend([ub] * k)
        return idx

    @staticmethod
    def _terms(terms) -> dict:
        out = {}
        for idx, M in terms:
            M = np.atleast_2d(np.asarray(M, dtype=float))
            for col, j in enumerate(np.atleast_1d(idx)):
                out.setdefault(int(j), []).append(M[:, col])
        return {j: np.sum(cols, axis=0) for j, cols in out.items()}

    def le(self, terms, rhs):
        """Add ``sum_k M_k x[idx_k] <= rhs``."""
        self._le.append((self._terms(terms), np.atleast_1d(np.asarray(rhs, dtype=float))))

    def eq(self, terms, rhs):
        """Add ``sum_k M_k x[idx_k] = rhs``."""
        self._eq.append((self._terms(terms), np.atleast_1d(np.asarray(rhs, dtype=float))))

    def norm_le(self, terms, const, bound, n: NormSpec):
        """Add ``|| sum_k M_k x[idx_k] + const ||_n <= bound``.

        ``bound`` is either a variable index or a number.
        """
        const = np.atleast_1d(np.asarray(const, dtype=float))
        k = const.size
        t_terms = [] if not isinstance(bound, (int, np.integer)) else [(np.array([bound]), -np.ones((k, 1)))]
        t_const = 0.0 if t_terms else float(bound)
        if n.kind == "maximum":
            self.le(list(terms) + t_terms, t_const - const)
            self.le([(i, -np.asarray(M, dtype=float)) for i, M in terms] + t_terms, t_const + const)
        elif n.is_sum:
            s = self.var(k, lb=0.0)
            eye = np.eye(k)
            self.le(list(terms) + [(s, -eye)], -const)
            self.le([(i, -np.asarray(M, dtype=float)) for i, M in terms] + [(s, -eye)], const)
            row = [(s, np.ones((1, k)))]
            if t_terms:
                row.append((np.array([bound]), -np.ones((1, 1))))
            self.le(row, [t_const])
        else:
            self._conic.append((self._terms(terms), const, bound, n))

    def member(self, idx, piece):
        """Constrain ``x[idx]`` to a convex piece."""
        desc = linear_description(piece)
        if desc is not None:
            G, h, E, e = desc
            if G.shape[0]:
                self.le([(idx, G)], h)
            if E.shape[0]:
                self.eq([(idx, E)], e)
            return
        assert isinstance(piece, Ball)
        d = piece.dim
        self.norm_le([(idx, np.eye(d))], -piece.center, piece.radius, piece.norm)

    def minimize(self, terms):
        c = np.zeros(self.n)
        for j, col in self._terms(terms).items():
            c[j] += float(np.sum(col))
        self._obj = c

    # assembly ---------------------------------------------------------------
    def _assemble(self, blocks):
        rows, rhs = [], []
        for terms, b in blocks:
            M = np.zeros((b.size, self.n))
            for j, col in terms.items():
                M[:, j] += col
            rows.append(M)
            rhs.append(b)
        if not rows:
            return None, None
        return np.vstack(rows), np.concatenate(rhs)

    def solve(self) -> ModelResult:
        c = np.zeros(self.n)
        c[: self._obj.size] = self._obj
        A_ub, b_ub = self._assemble(self._le)
        A_eq, b_eq = self._assemble(self._eq)
        if not self._conic:
            sol = lp_solve(LPProblem(c, A_ub, b_ub, A_eq, b_eq, np.array(self.lb), np.array(self.ub)))
            return ModelResult(sol.status, sol.x, sol.value, "exact-lp")
        return self._solve_conic(c, A_ub, b_ub, A_eq, b_eq)

    def _solve_conic(self, c, A_ub, b_ub, A_eq, b_eq) -> ModelResult:
        import cvxpy as cp

        x = cp.Variable(self.n)
        cons = []
        if A_ub is not None:
            cons.append(A_ub @ x <= b_ub)
        if A_eq is not None:
            cons.append(A_eq @ x == b_eq)
        lb, ub = np.array(self.lb), np.array(self.ub)
        if np.any(np.isfinite(lb)):
            j = np.flatnonzero(np.isfinite(lb))
            cons.append(x[j] >= lb[j])
        if np.any(np.isfinite(ub)):
            j = np.flatnonzero(np.isfinite(ub))
            cons.append(x[j] <= ub[j])
        for terms, const, bound, n in self._conic:
            M = np.zeros((const.size, self.n))
            for j, col in terms.items():
                M[:, j] += col
            expr = M @ x + const
            p = 2 if n.kind == "euclidean" else n.p
            lhs = cp.norm(expr, 2) if p == 2 else cp.pnorm(expr, p)
            rhs = x[int(bound)] if isinstance(bound, (int, np.integer)) else float(bound)
            cons.append(lhs <= rhs)
        prob = cp.Problem(cp.Minimize(c @ x), cons)
        try:
            prob.solve(solver=cp.CLARABEL)
        except cp.error.SolverError:
            try:
                prob.solve(solver=cp.SCS, eps=1e-10, max_iters=200000)
            except cp.error.SolverError as exc:
                raise NumericalFailure(f"conic solver failed: {exc}") from None
        status = prob.status
        if status in ("optimal", "optimal_inaccurate"):
            return ModelResult("optimal", np.asarray(x.value, dtype=float), float(prob.value), "conic")
        if status in ("infeasible", "infeasible_inaccurate"):
            return ModelResult("infeasible", None, np.inf, "conic")
        if status in ("unbounded", "unbounded_inaccurate"):
            return ModelResult("unbounded", None, -np.inf, "conic")
        raise NumericalFailure(f"conic solver returned status {status}")
