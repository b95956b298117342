"""Hasse diagrams as DOT text and as matplotlib figures."""

from __future__ import annotations

import os
from collections import Counter
from typing import Sequence

import numpy as np

from .lattice import DistLattice


def ranks(L: DistLattice) -> list[int]:
    """Length of the longest chain from the bottom to each element."""
    n = len(L)
    covers = L.covers()
    rank = [0] * n
    # elements sorted by down-set size are a linear extension
    for b in sorted(range(n), key=lambda i: int(L.leq[:, i].sum())):
        for a, c in covers:
            if c == b:
                rank[b] = max(rank[b], rank[a] + 1)
    return rank


def hasse_layout(L: DistLattice) -> dict[int, tuple[float, float]]:
    """Elements on rows by rank, spread evenly and centred on each row."""
    rank = ranks(L)
    rows: dict[int, list[int]] = {}
    for i in range(len(L)):
        rows.setdefault(rank[i], []).append(i)
    pos = {}
    for r, members in rows.items():
        k = len(members)
        for j, i in enumerate(members):
            pos[i] = (j - (k - 1) / 2, float(r))
    return pos


def _dot_id(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(L: DistLattice, name: str | None = None, approx: np.ndarray | None = None) -> str:
    """Hasse diagram (covers only), bottom to top; ``approx`` pairs are drawn dashed."""
    E = L.elements
    out = [f"digraph {_dot_id(name or L.name or 'L')} {{", "  rankdir=BT;", "  node [shape=plaintext];"]
    for e in E:
        out.append(f"  {_dot_id(e)};")
    for a, b in L.covers():
        out.append(f"  {_dot_id(E[a])} -> {_dot_id(E[b])} [dir=none];")
    if approx is not None:
        for i, j in np.argwhere(approx):
            if i != j:
                out.append(f"  {_dot_id(E[i])} -> {_dot_id(E[j])} [style=dashed, color=gray50];")
    out.append("}")
    return "\n".join(out) + "\n"


LABEL_MAX = 14
STABLE_METADATA = {
    "png": {"Software": None},
    "svg": {"Date": None, "Creator": None},
    "pdf": {"CreationDate": None, "Creator": None, "Producer": None},
}


def draw_hasse(ax, L: DistLattice, title: str | None = None, approx: np.ndarray | None = None,
               highlight: Sequence[int] = ()):
    pos = hasse_layout(L)
    E = L.elements
    if max(map(len, E), default=0) > LABEL_MAX:
        # frame elements can have very long member-set names; number them instead
        E = [f"#{i}" for i in range(len(E))]
        title = f"{title} (elements by index)" if title else None
    for a, b in L.covers():
        (x0, y0), (x1, y1) = pos[a], pos[b]
        ax.plot([x0, x1], [y0, y1], color="0.25", lw=1.2, zorder=1)
    if approx is not None:
        for i, j in np.argwhere(approx):
            if i == j or L.leq[j, i]:
                continue
            (x0, y0), (x1, y1) = pos[i], pos[j]
            ax.annotate("", xy=(x1, y1), xytext=(x0, y0),
                        arrowprops=dict(arrowstyle="->", color="tab:blue", ls="--", lw=0.8, alpha=0.7))
    hi = set(highlight)
    for i, (x, y) in pos.items():
        face = "tab:orange" if i in hi else "white"
        ax.text(x, y, E[i], ha="center", va="center", fontsize=9, zorder=3,
                bbox=dict(boxstyle="round,pad=0.25", fc=face, ec="0.3", lw=0.8))
    xs = [p[0] for p in pos.values()] or [0]
    ys = [p[1] for p in pos.values()] or [0]
    ax.set_xlim(min(xs) - 0.8, max(xs) + 0.8)
    ax.set_ylim(min(ys) - 0.6, max(ys) + 0.6)
    ax.set_axis_off()
    if title:
        ax.set_title(title, fontsize=10)


def plot_hasse(path: str, panels: Sequence[tuple], suptitle: str | None = None) -> str:
    """Render one or more Hasse diagrams side by side to ``path``.

    Each panel is ``(lattice, title)`` or ``(lattice, title, approx)`` or
    ``(lattice, title, approx, highlight)``.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    k = max(1, len(panels))
    # wide ranks need wider panels, or the labels collide
    widest = max((max(Counter(ranks(p[0])).values()) for p in panels), default=1)
    fig, axes = plt.subplots(1, k, figsize=(max(3.2, 0.8 * widest) * k, 3.6), squeeze=False)
    for ax, panel in zip(axes[0], panels):
        L, title, *rest = panel
        approx = rest[0] if rest else None
        highlight = rest[1] if len(rest) > 1 else ()
        draw_hasse(ax, L, title, approx, highlight)
    if suptitle:
        fig.suptitle(suptitle, fontsize=11)
    fig.tight_layout()
    # dropping dates and version stamps keeps repeated renders byte-identical
    fmt = os.path.splitext(str(path))[1].lstrip(".").lower() or "png"
    with matplotlib.rc_context({"svg.hashsalt": "proxlat"}):
        fig.savefig(path, dpi=120, metadata=STABLE_METADATA.get(fmt))
    plt.close(fig)
    return path
