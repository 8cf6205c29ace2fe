"""SVG rendering of a network and its medial graph.

Layout is cosmetic: boundary vertices equally spaced on a circle,
interior vertices at the barycenter of their neighbors (Tutte/spring
positions from a least-squares solve).  The medial strands are drawn as
polylines through edge midpoints and rim points; the file content is
deterministic for a given network.
"""

from __future__ import annotations

import math

import numpy as np

from .medial import MedialGraph
from .network import Network


def layout(net: Network) -> dict:
    pos = {}
    n = len(net.boundary)
    for k, v in enumerate(net.boundary):
        ang = 2 * math.pi * k / max(n, 1)
        pos[v] = (math.cos(ang), math.sin(ang))
    interior = sorted(net.interior)
    if not interior:
        return pos
    idx = {v: i for i, v in enumerate(interior)}
    a = np.zeros((len(interior), len(interior)))
    b = np.zeros((len(interior), 2))
    for v in interior:
        i = idx[v]
        ends = net.rotations.get(v, ())
        if not ends:
            a[i, i] = 1.0
            continue
        a[i, i] = len(ends)
        for eid, _end in ends:
            w = net.edge(eid).other(v)
            if w == v:
                a[i, i] -= 1.0
                continue
            if w in idx:
                a[i, idx[w]] -= 1.0
            else:
                b[i] += pos[w]
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    for v in interior:
        x, y = sol[idx[v]]
        pos[v] = (float(x), float(y))
    return pos


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def _pt(p):
    return f"{_fmt(p[0])},{_fmt(-p[1])}"  # svg y axis points down


def render_svg(net: Network, medial: MedialGraph | None = None) -> str:
    pos = layout(net)
    mids = {e.id: ((pos[e.u][0] + pos[e.v][0]) / 2, (pos[e.u][1] + pos[e.v][1]) / 2) for e in net.edges}
    n = len(net.boundary)

    def rim_point(frac):
        ang = 2 * math.pi * frac
        return (math.cos(ang), math.sin(ang))

    bv_pos = {}
    if medial is not None and n:
        arcs = n if n >= 2 else 1
        for j in range(arcs):
            base = j / max(n, 1)
            step = 1.0 / max(n, 1)
            bv_pos[f"t{j}.0"] = rim_point(base + step / 3)
            bv_pos[f"t{j}.1"] = rim_point(base + 2 * step / 3)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1.25 -1.25 2.5 2.5" width="480" height="480">',
        '<circle cx="0" cy="0" r="1" fill="none" stroke="#999" stroke-dasharray="0.04,0.03" stroke-width="0.012"/>',
    ]
    for e in net.edges:
        lines.append(
            f'<line x1="{_fmt(pos[e.u][0])}" y1="{_fmt(-pos[e.u][1])}" '
            f'x2="{_fmt(pos[e.v][0])}" y2="{_fmt(-pos[e.v][1])}" stroke="#222" stroke-width="0.015"/>'
        )
    if medial is not None:
        palette = ["#c22", "#27b", "#2a2", "#b2b", "#b82", "#2aa", "#777"]
        for g in medial.geodesics:
            pts = []
            for p in g.points:
                if p[0] == "b":
                    if p[1] in bv_pos:
                        pts.append(bv_pos[p[1]])
                else:
                    xid = p[1]
                    if xid in mids:
                        pts.append(mids[xid])
            if g.closed and pts:
                pts.append(pts[0])
            if len(pts) >= 2:
                path = " ".join(_pt(p) for p in pts)
                color = palette[g.index % len(palette)]
                lines.append(
                    f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="0.012"/>'
                )
    for v in net.vertices:
        fill = "#fff" if v in net.boundary else "#222"
        lines.append(
            f'<circle cx="{_fmt(pos[v][0])}" cy="{_fmt(-pos[v][1])}" r="0.035" '
            f'fill="{fill}" stroke="#222" stroke-width="0.012"/>'
        )
        lines.append(
            f'<text x="{_fmt(pos[v][0] + 0.05)}" y="{_fmt(-pos[v][1] - 0.05)}" font-size="0.09">{v}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
