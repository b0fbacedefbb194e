"""PNG figures of a scene with result points overlaid (matplotlib, Agg backend).

Only the first two coordinates are drawn; one-dimensional scenes are drawn
on the horizontal axis.
"""

from __future__ import annotations

import numpy as np

from .norms import norm
from .sets import AffineSubspace, Ball, HPolyhedron, PointCloud


def _view(scene, series, margin=1.0):
    pts = [np.zeros(2)]
    if scene.anchor is not None:
        pts.append(_xy(scene.anchor))
    for v in series.values():
        pts.extend(_xy(p) for p in np.atleast_2d(np.asarray(v, dtype=float)))
    P = np.array(pts)
    lo, hi = P.min(axis=0) - margin, P.max(axis=0) + margin
    return lo, hi


def _xy(p):
    p = np.atleast_1d(np.asarray(p, dtype=float))
    return np.array([p[0], p[1] if p.size > 1 else 0.0])


def _polygon(A, b, lo, hi):
    """Vertices of ``{A x <= b}`` clipped to the view box (2-D only)."""
    box_A = np.array([[1.0, 0], [-1, 0], [0, 1], [0, -1]])
    box_b = np.array([hi[0], -lo[0], hi[1], -lo[1]])
    A = np.vstack([A[:, :2], box_A])
    b = np.concatenate([b, box_b])
    verts = []
    for i in range(len(b)):
        for j in range(i + 1, len(b)):
            M = A[[i, j]]
            if abs(np.linalg.det(M)) < 1e-12:
                continue
            v = np.linalg.solve(M, b[[i, j]])
            if np.all(A @ v <= b + 1e-9):
                verts.append(v)
    if len(verts) < 3:
        return None
    V = np.array(verts)
    c = V.mean(axis=0)
    return V[np.argsort(np.arctan2(V[:, 1] - c[1], V[:, 0] - c[0]))]


def _draw_piece(ax, piece, lo, hi, color, label):
    if isinstance(piece, PointCloud):
        P = np.array([_xy(p) for p in piece.points])
        ax.plot(P[:, 0], P[:, 1], "o", color=color, ms=4, label=label)
    elif isinstance(piece, HPolyhedron) and piece.dim == 2:
        V = _polygon(piece.A, piece.b, lo, hi)
        if V is not None:
            ax.fill(V[:, 0], V[:, 1], color=color, alpha=0.25, label=label)
    elif isinstance(piece, Ball) and piece.dim == 2 and np.isfinite(piece.radius):
        t = np.linspace(0, 2 * np.pi, 241)
        U = np.column_stack([np.cos(t), np.sin(t)])
        U = U / norm(U, piece.norm)[:, None]
        P = piece.center + piece.radius * U
        ax.fill(P[:, 0], P[:, 1], color=color, alpha=0.25, label=label)
    elif isinstance(piece, AffineSubspace):
        span = piece.span_basis
        base = _xy(piece.base)
        if span.shape[0] == 0:
            ax.plot(*base, "o", color=color, label=label)
        elif span.shape[0] == 1:
            u = _xy(span[0])
            s = np.linalg.norm(hi - lo) * 2
            ax.plot([base[0] - s * u[0], base[0] + s * u[0]], [base[1] - s * u[1], base[1] + s * u[1]],
                    color=color, label=label)
        else:
            ax.axvspan(lo[0], hi[0], color=color, alpha=0.1, label=label)


def render_scene(scene, series: dict, path, title: str = ""):
    """Draw the scene's sets and each point series; write a PNG to ``path``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    lo, hi = _view(scene, series)
    fig, ax = plt.subplots(figsize=(5, 5), dpi=100)
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for k, (s, name) in enumerate(zip(scene.sets, scene.names)):
        for j, piece in enumerate(s.pieces()):
            _draw_piece(ax, piece, lo, hi, colors[k % len(colors)], name if j == 0 else None)
    if scene.anchor is not None:
        a = _xy(scene.anchor)
        ax.plot(a[0], a[1], "k+", ms=10, label="anchor")
    for k, name in enumerate(sorted(series)):
        P = np.array([_xy(p) for p in np.atleast_2d(np.asarray(series[name], dtype=float))])
        ax.plot(P[:, 0], P[:, 1], "x", ms=7, color=colors[(k + 3) % len(colors)], label=name)
    ax.set_xlim(lo[0], hi[0])
    ax.set_ylim(lo[1], hi[1])
    ax.set_aspect("equal")
    ax.legend(loc="upper right", fontsize=7)
    if title:
        ax.set_title(title)
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
