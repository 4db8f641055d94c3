"""SVG figures: chart cones of rank-2 systems and the orbit poset."""
from __future__ import annotations

import io
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .cone import Cone, format_cone  # noqa: E402
from .sysfan import SystemOfFans  # noqa: E402

plt.rcParams["svg.hashsalt"] = "toricprevar"
plt.rcParams["svg.fonttype"] = "none"


def _save(fig) -> str:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return buf.getvalue()


def _wedge(ax, cone: Cone, color):
    gens = [tuple(v) for v in cone.generators()]
    if not gens:
        ax.plot([0], [0], "o", color=color, markersize=4)
        return
    angles = sorted(math.atan2(v[1], v[0]) for v in gens)
    if cone.dim == 2 and cone.lineality:
        # half-plane: sweep from the positive lineality direction over the ray
        l = cone.lineality[0]
        a0 = math.atan2(l[1], l[0])
        r = cone.rays[0]
        mid = math.atan2(r[1], r[0])
        start = a0 if math.sin(mid - a0) > 0 else a0 + math.pi
        angles = [start, start + math.pi]
    elif cone.dim == 2 and len(cone.lineality) == 0:
        a, b = (math.atan2(v[1], v[0]) for v in cone.rays)
        if (b - a) % (2 * math.pi) > math.pi:
            a, b = b, a
        angles = [a, a + (b - a) % (2 * math.pi)]
    if cone.dim == 2 and len(cone.lineality) < 2:
        ts = [angles[0] + (angles[-1] - angles[0]) * k / 32 for k in range(33)]
        ax.fill([0] + [math.cos(t) for t in ts], [0] + [math.sin(t) for t in ts],
                color=color, alpha=0.35, linewidth=0)
    elif len(cone.lineality) == 2:
        ax.fill([-1, 1, 1, -1], [-1, -1, 1, 1], color=color, alpha=0.2, linewidth=0)
    for v in gens:
        n = math.hypot(*v)
        ax.plot([0, v[0] / n], [0, v[1] / n], color=color, linewidth=1.5)


def fan_figure(S: SystemOfFans) -> str:
    """One panel per chart showing its maximal cones; rank 2 only."""
    if S.rank != 2:
        raise ValueError("cone pictures are drawn for rank-2 systems only")
    k = len(S.charts)
    fig, axes = plt.subplots(1, k, figsize=(2.4 * k, 2.6), squeeze=False)
    colors = plt.get_cmap("tab10")
    for ax, i in zip(axes[0], S.charts):
        for n, cone in enumerate(S.delta_max(i, i)):
            _wedge(ax, cone, colors(n % 10))
        ax.set_xlim(-1.1, 1.1)
        ax.set_ylim(-1.1, 1.1)
        ax.set_aspect("equal")
        ax.set_xticks([])
        ax.set_yticks([])
        ax.set_title(f"chart {i}", fontsize=9)
    return _save(fig)


def poset_figure(S: SystemOfFans) -> str:
    """Hasse diagram of Ω(S) layered by cone dimension."""
    om = S.omega()
    levels: dict[int, list[int]] = {}
    for cl in om.classes:
        levels.setdefault(cl.cone.dim, []).append(cl.id)
    pos = {}
    for d, ids in levels.items():
        for k, c in enumerate(ids):
            pos[c] = (k - (len(ids) - 1) / 2, d)
    width = max(len(v) for v in levels.values())
    fig, ax = plt.subplots(figsize=(max(3.0, 1.6 * width), 1.2 + 1.1 * len(levels)))
    for a, b in om.covers():
        ax.plot([pos[a][0], pos[b][0]], [pos[a][1], pos[b][1]], color="0.4", linewidth=1)
    for cl in om.classes:
        x, y = pos[cl.id]
        ax.plot([x], [y], "o", color="tab:blue", markersize=6)
        ax.annotate(f"{cl.id}: {format_cone(cl.cone)} @{','.join(map(str, sorted(cl.charts)))}",
                    (x, y), textcoords="offset points", xytext=(0, 7), ha="center", fontsize=7)
    ax.set_xlim(-width / 2 - 0.5, width / 2 + 0.5)
    ax.set_ylim(-0.5, max(levels) + 0.7)
    ax.axis("off")
    return _save(fig)
