"""Dense two-phase simplex method with Bland's anti-cycling rule.

The problems solved in this package are tiny (a few dozen rows), so a dense
tableau is adequate.  Determinism matters more than speed: entering and
leaving variables are always chosen by lowest index, so equal inputs give
bit-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalFailure, PreconditionFailed
from .tolerances import TOL_FEAS

_PIVOT_TOL = 1e-10
_COST_TOL = 1e-10


@dataclass(frozen=True)
class LPProblem:
    """Linear program ``min c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``.

    Variables are free unless ``lb``/``ub`` are given (entries may be
    ``-inf``/``inf``).
    """

    c: np.ndarray
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    lb: np.ndarray | None = None
    ub: np.ndarray | None = None

    @property
    def n_vars(self) -> int:
        return int(np.asarray(self.c).size)


@dataclass(frozen=True)
class LPSolution:
    status: str
    x: np.ndarray | None = None
    value: float = float("nan")
    iterations: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _as_rows(A, b, n):
    if A is None:
        return np.zeros((0, n)), np.zeros(0)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if A.size == 0:
        return np.zeros((0, n)), np.zeros(0)
    if A.shape[1] != n or A.shape[0] != b.size:
        raise PreconditionFailed("constraint block has inconsistent shape")
    return A, b


def _standard_form(p: LPProblem):
    """Return ``(A, b, c, T, offset, n_slack_rows)`` with ``x = offset + T y``, ``y >= 0``."""
    c = np.asarray(p.c, dtype=float).ravel()
    n = c.size
    lb = np.full(n, -np.inf) if p.lb is None else np.asarray(p.lb, dtype=float).ravel()
    ub = np.full(n, np.inf) if p.ub is None else np.asarray(p.ub, dtype=float).ravel()
    if lb.size != n or ub.size != n:
        raise PreconditionFailed("bounds have the wrong length")
    if np.any(lb > ub):
        return None
    A_ub, b_ub = _as_rows(p.A_ub, p.b_ub, n)
    A_eq, b_eq = _as_rows(p.A_eq, p.b_eq, n)

    cols = []
    offset = np.zeros(n)
    bound_rows = []
    for j in range(n):
        if np.isfinite(lb[j]):
            offset[j] = lb[j]
            cols.append((j, 1.0))
            if np.isfinite(ub[j]):
                bound_rows.append((len(cols) - 1, ub[j] - lb[j]))
        elif np.isfinite(ub[j]):
            offset[j] = ub[j]
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    T = np.zeros((n, len(cols)))
    for k, (j, s) in enumerate(cols):
        T[j, k] = s

    K = len(cols)
    ineq = [A_ub @ T] if A_ub.shape[0] else []
    ineq_rhs = [b_ub - A_ub @ offset] if A_ub.shape[0] else []
    if bound_rows:
        Bm = np.zeros((len(bound_rows), K))
        for r, (k, v) in enumerate(bound_rows):
            Bm[r, k] = 1.0
        ineq.append(Bm)
        ineq_rhs.append(np.array([v for _, v in bound_rows]))
    G = np.vstack(ineq) if ineq else np.zeros((0, K))
    h = np.concatenate(ineq_rhs) if ineq_rhs else np.zeros(0)
    E = A_eq @ T
    e = b_eq - A_eq @ offset

    m1, m2 = G.shape[0], E.shape[0]
    A = np.zeros((m1 + m2, K + m1))
    A[:m1, :K] = G
    A[:m1, K:] = np.eye(m1)
    A[m1:, :K] = E
    b = np.concatenate([h, e])
    cost = np.concatenate([T.T @ c, np.zeros(m1)])
    return A, b, cost, T, offset, m1


class _Tableau:
    def __init__(self, A, b, basis, max_iter):
        self.tab = np.hstack([A, b[:, None]])
        self.basis = list(basis)
        self.max_iter = max_iter
        self.iterations = 0

    def pivot(self, r, j):
        tab = self.tab
        tab[r] /= tab[r, j]
        col = tab[:, j].copy()
        col[r] = 0.0
        tab -= np.outer(col, tab[r])
        tab[:, j] = 0.0
        tab[r, j] = 1.0
        self.basis[r] = j

    def run(self, cost, allowed):
        """Minimize ``cost`` over the current basis; return 'optimal' or 'unbounded'."""
        tab = self.tab
        allowed_idx = np.flatnonzero(allowed)
        while True:
            if self.iterations >= self.max_iter:
                raise NumericalFailure("simplex iteration guard exceeded")
            cb = cost[self.basis]
            reduced = cost[allowed_idx] - cb @ tab[:, allowed_idx]
            neg = np.flatnonzero(reduced < -_COST_TOL)
            if neg.size == 0:
                return "optimal"
            j = int(allowed_idx[neg[0]])
            col = tab[:, j]
            rows = np.flatnonzero(col > _PIVOT_TOL)
            if rows.size == 0:
                return "unbounded"
            ratios = tab[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            r = int(min(ties, key=lambda i: self.basis[i]))
            self.pivot(r, j)
            self.iterations += 1


def lp_solve(p: LPProblem, max_iter: int | None = None) -> LPSolution:
    """Solve a small linear program exactly enough for certification.

    Parameters
    ----------
    p : LPProblem
        The program; variables without bounds are free.
    max_iter : int, optional
        Pivot budget.  Defaults to ``50 * (rows + columns) + 500``.

    Returns
    -------
    LPSolution
        ``status`` is one of ``"optimal"``, ``"infeasible"``, ``"unbounded"``.

    Raises
    ------
    NumericalFailure
        If the pivot budget is exhausted.
    """
    std = _standard_form(p)
    if std is None:
        return LPSolution("infeasible")
    A, b, cost, T, offset, m1 = std
    m, K = A.shape
    if max_iter is None:
        max_iter = 50 * (m + K) + 500
    if m == 0:
        if np.any(cost < -_COST_TOL):
            return LPSolution("unbounded")
        x = offset.copy()
        return LPSolution("optimal", x, float(np.dot(p.c, x)))

    A = A.copy()
    b = b.copy()
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0

    basis = []
    art_rows = []
    for i in range(m):
        if i < m1 and not flip[i]:
            basis.append(K - m1 + i)
        else:
            art_rows.append(i)
            basis.append(None)
    n_art = len(art_rows)
    A_full = np.hstack([A, np.zeros((m, n_art))])
    for k, i in enumerate(art_rows):
        A_full[i, K + k] = 1.0
        basis[i] = K + k
    is_art = np.zeros(K + n_art, dtype=bool)
    is_art[K:] = True

    tb = _Tableau(A_full, b, basis, max_iter)
    scale = 1.0 + float(np.max(np.abs(b)))
    if n_art:
        phase1_cost = is_art.astype(float)
        tb.run(phase1_cost, np.ones(K + n_art, dtype=bool))
        infeas = float(phase1_cost[tb.basis] @ tb.tab[:, -1])
        if infeas > TOL_FEAS * scale:
            return LPSolution("infeasible", iterations=tb.iterations)
        keep = []
        for r in range(m):
            if is_art[tb.basis[r]]:
                row = tb.tab[r, :K]
                cand = np.flatnonzero(np.abs(row) > 1e-9)
                if cand.size:
                    tb.pivot(r, int(cand[0]))
                    keep.append(r)
            else:
                keep.append(r)
        if len(keep) < m:
            tb.tab = tb.tab[keep]
            tb.basis = [tb.basis[r] for r in keep]
            A = A[keep]
            b = b[keep]
    full_cost = np.concatenate([cost, np.zeros(n_art)])
    allowed = ~is_art
    status = tb.run(full_cost, allowed)
    if status == "unbounded":
        return LPSolution("unbounded", iterations=tb.iterations)

    y = np.zeros(K)
    y_basic = tb.tab[:, -1].copy()
    basis_idx = np.array(tb.basis)
    # Re-solve the basic system on the original data to shed pivot round-off.
    try:
        B = A[:, basis_idx]
        refined = np.linalg.solve(B, b)
        if np.all(refined > -1e-7 * scale) and np.all(np.isfinite(refined)):
            y_basic = refined
    except np.linalg.LinAlgError:
        pass
    y[basis_idx] = np.maximum(y_basic, 0.0)
    x = offset + T @ y[: T.shape[1]]
    return LPSolution("optimal", x, float(np.dot(p.c, x)), tb.iterations)
