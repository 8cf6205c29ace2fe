"""Combinatorial medial graphs of embedded circular planar networks.

A medial graph here is pure incidence data, never geometry: crossings
(one per network edge when built from a network), strand segments between
them, geodesic endpoints on the rim, and the cells the strands cut the
disk into.  Each crossing stores its four surrounding cells in
counterclockwise order, normalized so the two black cells (the ones that
correspond to network vertices) sit at positions 0 and 2; position 0 is
the black cell of the lower-id endpoint when the graph comes from a
network.  That normalization is what lets every numeric operation apply
the crossing equation

    phi(c3) - phi(c1) = gamma(phi(c0) - phi(c2))

literally, with no residual sign choice (gamma odd makes the half-turn
rotation of the quad equivalent).

Rim bookkeeping: ``bverts`` lists the geodesic endpoints in
counterclockwise circular order and ``arcs[i]`` names the cell touching
the rim between ``bverts[i]`` and ``bverts[i+1]``.  A cell may occupy
several rim positions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidNetwork, NotApex, NotCritical
from .network import Network, augmented_faces, validate_network

# An end of a medial edge: ('x', crossing_id, slot 0..3) or ('b', bvert_id).
MEnd = tuple


@dataclass(frozen=True)
class Quad:
    """Crossing record: four cells counterclockwise, blacks at 0 and 2."""

    cells: tuple[str, str, str, str]
    net_edge: str | None = None


@dataclass(frozen=True)
class Geodesic:
    index: int
    points: tuple  # ('b', bvert) endpoints and ('x', crossing) in strand order
    edges: tuple   # medial edge ids in strand order
    closed: bool

    @property
    def crossings(self):
        return tuple(p[1] for p in self.points if p[0] == "x")

    @property
    def endpoints(self):
        return tuple(p[1] for p in self.points if p[0] == "b")


@dataclass(frozen=True)
class GeodesicViolation:
    kind: str  # 'SelfIntersection' | 'DoubleCrossing' | 'ClosedLoop'
    geodesics: tuple
    crossings: tuple

    def __str__(self):
        return f"{self.kind} geodesics={self.geodesics} crossings={self.crossings}"


class MedialGraph:
    def __init__(self, crossings, edges, colors, bverts, arcs, circles=(), merge_seq=0):
        self.crossings: dict[str, Quad] = dict(crossings)
        self.edges: dict[int, tuple[MEnd, MEnd]] = dict(edges)
        self.colors: dict[str, str] = dict(colors)
        self.bverts: tuple[str, ...] = tuple(bverts)
        self.arcs: tuple[str, ...] = tuple(arcs)
        self.circles: tuple[tuple[str, str], ...] = tuple(circles)
        self._merge_seq = merge_seq
        self._cache = {}

    # -- elementary views --------------------------------------------------

    @property
    def cells(self):
        return self.colors.keys()

    def color(self, cell: str) -> str:
        return self.colors[cell]

    @property
    def boundary_cells(self) -> frozenset:
        return frozenset(self.arcs)

    def end_edge(self, end: MEnd) -> int:
        return self._end_map()[end]

    def _end_map(self):
        m = self._cache.get("end_map")
        if m is None:
            m = {}
            for eid, (e0, e1) in self.edges.items():
                for end in (e0, e1):
                    if end in m:
                        raise InvalidNetwork(f"medial end {end} used twice")
                    m[end] = eid
            self._cache["end_map"] = m
        return m

    def edge_cells(self, eid: int) -> frozenset:
        """The unordered pair of cells the medial edge separates."""
        return self._edge_cells()[eid]

    def _edge_cells(self):
        m = self._cache.get("edge_cells")
        if m is None:
            m = {}
            for eid, (e0, e1) in self.edges.items():
                pairs = [self._end_pair(end) for end in (e0, e1)]
                if pairs[0] != pairs[1]:
                    raise InvalidNetwork(
                        f"medial edge {eid} separates {pairs[0]} at one end, {pairs[1]} at the other"
                    )
                m[eid] = pairs[0]
            self._cache["edge_cells"] = m
        return m

    def _end_pair(self, end: MEnd) -> frozenset:
        if end[0] == "x":
            q = self.crossings[end[1]].cells
            s = end[2]
            return frozenset((q[s], q[(s + 1) % 4]))
        j = self.bverts.index(end[1])
        return frozenset((self.arcs[(j - 1) % len(self.arcs)], self.arcs[j]))

    def adjacency(self):
        adj = self._cache.get("adjacency")
        if adj is None:
            adj = {c: set() for c in self.cells}
            for pair in self._edge_cells().values():
                if len(pair) == 2:
                    a, b = sorted(pair)
                    adj[a].add(b)
                    adj[b].add(a)
            for inner, outer in self.circles:
                adj[inner].add(outer)
                adj[outer].add(inner)
            self._cache["adjacency"] = adj
        return adj

    # -- geodesics ----------------------------------------------------------

    @property
    def geodesics(self) -> tuple[Geodesic, ...]:
        geos = self._cache.get("geodesics")
        if geos is None:
            geos = self._trace_geodesics()
            self._cache["geodesics"] = geos
        return geos

    def _trace_geodesics(self):
        done_edges = {}
        geos = []

        def walk(start_end, idx):
            points = [start_end if start_end[0] == "b" else None]
            if points[0] is None:
                points = []
            edges = []
            cur = self.end_edge(start_end)
            come = start_end
            start = (cur, come)
            while True:
                edges.append(cur)
                done_edges[cur] = idx
                e0, e1 = self.edges[cur]
                far = e1 if come == e0 else e0
                if far[0] == "b":
                    points.append(far)
                    return Geodesic(idx, tuple(points), tuple(edges), False)
                points.append(("x", far[1]))
                exit_end = ("x", far[1], (far[2] + 2) % 4)
                cur = self.end_edge(exit_end)
                come = exit_end
                if (cur, come) == start:
                    return Geodesic(idx, tuple(points), tuple(edges), True)

        for b in self.bverts:
            end = ("b", b)
            if self.end_edge(end) in done_edges:
                continue
            g = walk(end, len(geos))
            geos.append(g)
        for eid in sorted(self.edges):
            if eid in done_edges:
                continue
            e0, _ = self.edges[eid]
            g = walk(e0, len(geos))
            # re-walk from the edge itself: mark the starting point correctly
            geos.append(g)
        return tuple(geos)

    def edge_geodesic(self, eid: int) -> int:
        m = self._cache.get("edge_geo")
        if m is None:
            m = {}
            for g in self.geodesics:
                for e in g.edges:
                    m[e] = g.index
            self._cache["edge_geo"] = m
        return m[eid]

    def strand_at(self, crossing: str, parity: int) -> int:
        """Geodesic through slots (parity, parity+2) of the crossing."""
        end = ("x", crossing, parity)
        return self.edge_geodesic(self.end_edge(end))

    def sides(self, geo_index: int) -> tuple[frozenset, frozenset]:
        """The two cell sets a boundary-to-boundary geodesic separates."""
        cached = self._cache.setdefault("sides", {})
        if geo_index in cached:
            return cached[geo_index]
        g = self.geodesics[geo_index]
        cut = set(g.edges)
        adj = {c: set() for c in self.cells}
        for eid, pair in self._edge_cells().items():
            if eid in cut or len(pair) != 2:
                continue
            a, b = pair
            adj[a].add(b)
            adj[b].add(a)
        for inner, outer in self.circles:
            adj[inner].add(outer)
            adj[outer].add(inner)
        comps = []
        seen = set()
        for c in sorted(self.cells):
            if c in seen:
                continue
            comp = {c}
            stack = [c]
            seen.add(c)
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        comp.add(y)
                        stack.append(y)
            comps.append(frozenset(comp))
        if len(comps) != 2:
            raise NotCritical(
                f"geodesic {geo_index} does not split the cells in two (got {len(comps)} parts)"
            )
        cached[geo_index] = (comps[0], comps[1])
        return cached[geo_index]

    # -- cell walks ----------------------------------------------------------

    def cell_sides(self, cell: str):
        """Sides of the cell in counterclockwise order.

        Returns a list of (side, corner) pairs: side is ('edge', id) or
        ('rim', position), corner the vertex reached after walking it
        (('x', crossing) or ('b', bvert)).  Cells bounded by a free circle
        or by nothing report an empty list.
        """
        cached = self._cache.setdefault("cell_sides", {})
        if cell in cached:
            return cached[cell]
        # the walk state keeps the exact medial-edge end reached, so that
        # loop edges (both ends on one crossing) stay unambiguous
        start = None  # (side, far_end)
        for pos, c in enumerate(self.arcs):
            if c == cell and self.bverts:
                start = (("rim", pos), ("b", self.bverts[(pos + 1) % len(self.bverts)]))
                break
        if start is None:
            for xid in sorted(self.crossings):
                q = self.crossings[xid].cells
                for k in range(4):
                    if q[k] == cell:
                        start = (("edge", self.end_edge(("x", xid, k))), ("x", xid, k))
                        break
                if start is not None:
                    break
        if start is None:
            cached[cell] = []
            return []
        walk = []
        side, far = start
        while True:
            walk.append((side, ("x", far[1]) if far[0] == "x" else far))
            side, far = self._next_side(cell, side, far)
            if (side, far) == start:
                break
            if len(walk) > 4 * (len(self.edges) + len(self.arcs) + 4):
                raise InvalidNetwork(f"cell walk for {cell!r} does not close")
        cached[cell] = walk
        return walk

    def _next_side(self, cell, side, far):
        """Next (side, far_end) of the cell after reaching corner `far`."""
        if far[0] == "x":
            xid, s = far[1], far[2]
            q = self.crossings[xid].cells
            if q[s] == cell:
                ns = (s - 1) % 4
            elif q[(s + 1) % 4] == cell:
                ns = (s + 1) % 4
            else:
                raise InvalidNetwork(f"cell {cell!r} not incident to slot {s} of {xid}")
            near = ("x", xid, ns)
            eid = self.end_edge(near)
            e0, e1 = self.edges[eid]
            return (("edge", eid), e1 if e0 == near else e0)
        bv = far[1]
        j = self.bverts.index(bv)
        eid = self.end_edge(("b", bv))
        before, after = (j - 1) % len(self.arcs), j
        if cell == self.arcs[before]:
            nxt = ("edge", eid) if side != ("edge", eid) else ("rim", before)
        elif cell == self.arcs[after]:
            nxt = ("edge", eid) if side != ("edge", eid) else ("rim", after)
        else:
            raise InvalidNetwork(f"cell {cell!r} not incident to rim vertex {bv}")
        if nxt[0] == "edge":
            near = ("b", bv)
            e0, e1 = self.edges[eid]
            return (nxt, e1 if e0 == near else e0)
        pos = nxt[1]
        a, b = self.bverts[pos], self.bverts[(pos + 1) % len(self.bverts)]
        return (nxt, ("b", b if bv == a else a))

    def side_count(self, cell: str) -> int:
        return len(self.cell_sides(cell))

    # -- construction -------------------------------------------------------

    @staticmethod
    def from_components(crossings, edges, bverts, arcs, circles=(), black_hint=None, net_edges=None):
        """Build and validate a medial graph from raw incidence data.

        ``crossings`` maps crossing id to its four surrounding cells in
        counterclockwise order (any rotation).  A two-coloring is computed;
        quads are normalized so positions 0 and 2 are black.  ``black_hint``
        names one cell that should be black (default: lowest cell id).
        """
        if not isinstance(edges, dict):
            edges = dict(enumerate(edges))
        cell_ids = set()
        for q in crossings.values():
            cell_ids.update(q)
        cell_ids.update(arcs)
        for a, b in circles:
            cell_ids.update((a, b))
        colors = _two_color(cell_ids, crossings, edges, bverts, arcs, circles, black_hint)
        quads = {}
        for xid, q in crossings.items():
            q = tuple(q)
            if colors[q[0]] != "black":
                q = (q[1], q[2], q[3], q[0])
            if not (
                colors[q[0]] == "black"
                and colors[q[2]] == "black"
                and colors[q[1]] == "white"
                and colors[q[3]] == "white"
            ):
                raise InvalidNetwork(f"crossing {xid}: colors do not alternate around it")
            quads[xid] = Quad(q, (net_edges or {}).get(xid))
        # rotating a quad by one renumbers its slots by one as well
        remapped = {}
        for eid, (e0, e1) in dict(edges).items():
            remapped[eid] = (
                _remap_end(e0, crossings, quads),
                _remap_end(e1, crossings, quads),
            )
        m = MedialGraph(quads, remapped, colors, bverts, arcs, circles)
        m.validate()
        return m

    def validate(self):
        for xid, q in self.crossings.items():
            if len(q.cells) != 4:
                raise InvalidNetwork(f"crossing {xid} does not have 4 cell slots")
            cols = [self.colors[c] for c in q.cells]
            if cols != ["black", "white", "black", "white"]:
                raise InvalidNetwork(f"crossing {xid}: colors {cols} do not alternate")
            for s in range(4):
                if ("x", xid, s) not in self._end_map():
                    raise InvalidNetwork(f"crossing {xid} slot {s} has no medial edge")
        for b in self.bverts:
            if ("b", b) not in self._end_map():
                raise InvalidNetwork(f"rim vertex {b} has no medial edge")
        if self.bverts and len(self.arcs) != len(self.bverts):
            raise InvalidNetwork("rim positions and rim vertices disagree")
        self._edge_cells()  # consistency of separated pairs
        for pair in self._edge_cells().values():
            if len(pair) == 2:
                a, b = pair
                if self.colors[a] == self.colors[b]:
                    raise InvalidNetwork(f"cells {a},{b} share an edge and a color")
        self.geodesics
        return self

    # -- surgery ------------------------------------------------------------

    def fresh_cell_id(self):
        return f"m{self._merge_seq}"

    def __repr__(self):
        return (
            f"MedialGraph({len(self.crossings)} crossings, {len(self.cells)} cells, "
            f"{len(self.geodesics)} geodesics)"
        )


def _remap_end(end, raw_crossings, quads):
    if end[0] != "x":
        return end
    xid, s = end[1], end[2]
    raw = tuple(raw_crossings[xid])
    shift = 0 if quads[xid].cells == raw else 1
    return ("x", xid, (s - shift) % 4)


def _two_color(cell_ids, crossings, edges, bverts, arcs, circles, black_hint):
    adj = {c: set() for c in cell_ids}

    def end_pair(end):
        if end[0] == "x":
            q = tuple(crossings[end[1]])
            return (q[end[2]], q[(end[2] + 1) % 4])
        j = list(bverts).index(end[1])
        return (arcs[(j - 1) % len(arcs)], arcs[j])

    for e0, e1 in dict(edges).values():
        for end in (e0, e1):
            a, b = end_pair(end)
            adj[a].add(b)
            adj[b].add(a)
    colors = {}
    order = sorted(cell_ids)
    seeds = [black_hint] if black_hint else []
    seeds += order
    for seed in seeds:
        if seed in colors or seed not in adj:
            continue
        colors[seed] = "black"
        stack = [seed]
        while stack:
            c = stack.pop()
            for d in adj[c]:
                want = "white" if colors[c] == "black" else "black"
                if d not in colors:
                    colors[d] = want
                    stack.append(d)
                elif colors[d] != want:
                    raise InvalidNetwork("cells are not two-colorable")
    for inner, outer in circles:
        # a circle flips the color of its inside relative to its outside
        if inner not in colors:
            colors[inner] = "white" if colors.get(outer, "black") == "black" else "black"
    return colors


# -- building from a network ----------------------------------------------


def build_medial(net: Network) -> MedialGraph:
    """Medial graph of a validated network, with the canonical coloring.

    One crossing per network edge; geodesics decomposed by straight-through
    continuation; vertex cells black, face cells white.
    """
    report = validate_network(net)
    if not report.ok:
        raise InvalidNetwork("; ".join(report.problems))
    if not net.vertices:
        return MedialGraph({}, {}, {"f0": "white"}, (), ("f0",))

    inner, _outer = augmented_faces(net)
    face_of = {}
    for k, orbit in enumerate(inner):
        for d in orbit:
            face_of[d] = k

    def black(v):
        return f"v:{v}"

    def white(k):
        return f"f:{k}"

    quads = {}
    slot_shift = {}
    for e in net.edges:
        left = face_of[("e", e.id, "ab")]
        right = face_of[("e", e.id, "ba")]
        raw = (black(e.u), white(right), black(e.v), white(left))
        if e.v < e.u:
            quads[e.id] = Quad((raw[2], raw[3], raw[0], raw[1]), e.id)
            slot_shift[e.id] = 2
        else:
            quads[e.id] = Quad(raw, e.id)
            slot_shift[e.id] = 0

    def xend(eid, raw_slot):
        return ("x", eid, (raw_slot - slot_shift[eid]) % 4)

    n = len(net.boundary)
    edges = {}
    eid_counter = 0
    connectors = {}
    for k, orbit in enumerate(inner):
        conn = []
        for d in orbit:
            if d[0] == "e":
                _, eid, direction = d
                if direction == "ab":
                    conn.append((xend(eid, 3), xend(eid, 2)))
                else:
                    conn.append((xend(eid, 1), xend(eid, 0)))
            else:
                _, j, _sign = d
                conn.append((("b", f"t{j}.0"), ("b", f"t{j}.1")))
        connectors[k] = conn
        for i in range(len(conn)):
            exit_end = conn[i][1]
            entry_end = conn[(i + 1) % len(conn)][0]
            edges[eid_counter] = (exit_end, entry_end)
            eid_counter += 1

    colors = {}
    for v in net.vertices:
        colors[black(v)] = "black"
    for k in range(len(inner)):
        colors[white(k)] = "white"

    bverts = []
    arcs = []
    arc_faces = {}
    for d, k in face_of.items():
        if d[0] == "arc" and d[2] == 1:
            arc_faces[d[1]] = k
    n_arcs = n if n >= 2 else 1
    for j in range(n_arcs):
        bverts.append(f"t{j}.0")
        bverts.append(f"t{j}.1")
        arcs.append(white(arc_faces[j]))
        arcs.append(black(net.boundary[(j + 1) % n]))

    m = MedialGraph(quads, edges, colors, bverts, arcs)
    m.validate()
    return m


def network_from_medial(m: MedialGraph) -> Network:
    """Reverse reading: black cells become vertices, crossings edges.

    Inverse of build_medial up to isomorphism; cell and crossing ids carry
    the original names when the graph came from a network.
    """
    from .network import Edge

    black_cells = sorted(c for c in m.cells if m.colors[c] == "black")
    name = {c: c[2:] if c.startswith("v:") else c for c in black_cells}
    rim_black = []
    for pos in range(len(m.arcs)):
        c = m.arcs[pos]
        if m.colors[c] == "black" and c not in rim_black:
            rim_black.append(c)
    boundary = tuple(name[c] for c in rim_black)
    interior = tuple(name[c] for c in black_cells if c not in rim_black)
    edges = []
    for xid in sorted(m.crossings):
        q = m.crossings[xid].cells
        edges.append(Edge(xid, name[q[0]], name[q[2]]))
    eidx = {e.id: e for e in edges}

    rotations = {}
    for c in black_cells:
        walk = m.cell_sides(c)
        corners = []
        rim_at = None
        for i, (side, corner) in enumerate(walk):
            if side[0] == "rim":
                rim_at = i
        seq = walk if rim_at is None else walk[rim_at + 1 :] + walk[: rim_at + 1]
        for side, corner in seq:
            if corner[0] == "x":
                corners.append(corner[1])
        ends = []
        for xid in corners:
            e = eidx[xid]
            if name[c] == e.u and name[c] == e.v:
                ends.append((xid, "a" if (xid, "a") not in ends else "b"))
            elif name[c] == e.u:
                ends.append((xid, "a"))
            else:
                ends.append((xid, "b"))
        rotations[name[c]] = tuple(ends)
    return Network(boundary, interior, tuple(edges), rotations)


# -- criticality ------------------------------------------------------------


def check_semicritical(m: MedialGraph):
    """ok (None) or a GeodesicViolation witness."""
    for g in m.geodesics:
        seen = {}
        for p in g.points:
            if p[0] != "x":
                continue
            if p[1] in seen:
                return GeodesicViolation("SelfIntersection", (g.index,), (p[1],))
            seen[p[1]] = True
    meet = {}
    for g in m.geodesics:
        for xid in set(g.crossings):
            meet.setdefault(xid, []).append(g.index)
    pair_hits = {}
    for xid, gs in sorted(meet.items()):
        for i in range(len(gs)):
            for j in range(i + 1, len(gs)):
                pair_hits.setdefault((gs[i], gs[j]), []).append(xid)
    for (g1, g2), hits in sorted(pair_hits.items()):
        if len(hits) > 1:
            return GeodesicViolation("DoubleCrossing", (g1, g2), tuple(hits))
    return None


def check_critical(m: MedialGraph):
    v = check_semicritical(m)
    if v is not None:
        return v
    for g in m.geodesics:
        if g.closed:
            return GeodesicViolation("ClosedLoop", (g.index,), tuple(set(g.crossings)))
    if m.circles:
        return GeodesicViolation("ClosedLoop", (), ())
    return None


def ensure_critical(m: MedialGraph):
    v = check_critical(m)
    if v is not None:
        raise NotCritical(str(v))


# -- boundary features -------------------------------------------------------


@dataclass(frozen=True)
class BoundaryFeature:
    cell: str
    kind: str  # 'digon' | 'triangle'
    apex: str | None  # crossing id for triangles
    rim_position: int


def find_boundary_features(m: MedialGraph) -> list[BoundaryFeature]:
    """Classify boundary cells with two or three sides, rim order."""
    ensure_critical(m)
    out = []
    seen = set()
    for pos in range(len(m.arcs)):
        cell = m.arcs[pos]
        if cell in seen:
            continue
        seen.add(cell)
        walk = m.cell_sides(cell)
        if len(walk) == 2:
            out.append(BoundaryFeature(cell, "digon", None, pos))
        elif len(walk) == 3:
            xs = [corner[1] for side, corner in walk if corner[0] == "x"]
            if len(xs) == 1:
                out.append(BoundaryFeature(cell, "triangle", xs[0], pos))
    return out


@dataclass(frozen=True)
class UncrossRecord:
    """What an uncrossing did: needed to translate boundary problems back."""

    apex: str
    net_edge: str | None
    quad: tuple[str, str, str, str]
    t: int  # position of the removed triangle cell in `quad`
    merged: str  # id of the merged (triangle + opposite) cell
    opposite_was_boundary: bool


def uncross(m: MedialGraph, apex: str) -> MedialGraph:
    """Smooth the apex of a boundary triangle, removing the crossing.

    The reconnection merges the triangle cell with the cell diagonally
    opposite; the two neighbor cells survive.  Criticality is preserved.
    """
    m2, _rec = uncross_with_record(m, apex)
    return m2


def uncross_with_record(m: MedialGraph, apex: str):
    ensure_critical(m)
    if apex not in m.crossings:
        raise NotApex(f"no crossing {apex!r}")
    q = m.crossings[apex].cells
    t = None
    for k in range(4):
        cell = q[k]
        if cell not in m.boundary_cells:
            continue
        walk = m.cell_sides(cell)
        if len(walk) != 3:
            continue
        xs = [c[1] for s, c in walk if c[0] == "x"]
        if xs == [apex] or set(xs) == {apex}:
            t = k
            break
    if t is None:
        raise NotApex(f"crossing {apex!r} is not the apex of a boundary triangle")

    tri, opp = q[t], q[(t + 2) % 4]
    merged = m.fresh_cell_id()
    leg_in = m.end_edge(("x", apex, (t - 1) % 4))
    leg_out = m.end_edge(("x", apex, t))
    cont_a = m.end_edge(("x", apex, (t + 1) % 4))
    cont_b = m.end_edge(("x", apex, (t + 2) % 4))

    def far_end(eid, slot):
        e0, e1 = m.edges[eid]
        return e1 if e0 == ("x", apex, slot) else e0

    rename = {tri: merged, opp: merged}

    def rn(c):
        return rename.get(c, c)

    new_quads = {}
    for xid, quad in m.crossings.items():
        if xid == apex:
            continue
        new_quads[xid] = Quad(tuple(rn(c) for c in quad.cells), quad.net_edge)
    new_edges = {}
    for eid, ends in m.edges.items():
        if eid in (leg_in, leg_out, cont_a, cont_b):
            continue
        new_edges[eid] = ends
    nid = max(m.edges) + 1 if m.edges else 0
    # strand reconnection that opens the channel between triangle and opposite
    new_edges[nid] = (far_end(leg_in, (t - 1) % 4), far_end(cont_b, (t + 2) % 4))
    new_edges[nid + 1] = (far_end(leg_out, t), far_end(cont_a, (t + 1) % 4))
    colors = {c: col for c, col in m.colors.items() if c not in (tri, opp)}
    colors[merged] = m.colors[tri]
    arcs = tuple(rn(c) for c in m.arcs)
    m2 = MedialGraph(new_quads, new_edges, colors, m.bverts, arcs, m.circles, m._merge_seq + 1)
    rec = UncrossRecord(apex, m.crossings[apex].net_edge, q, t, merged, opp in m.boundary_cells)
    return m2, rec


@dataclass(frozen=True)
class DigonRecord:
    cell: str
    neighbor: str
    rim_positions: tuple[int, int]


def remove_digon(m: MedialGraph, cell: str):
    """Remove a boundary digon: drops its crossing-free geodesic.

    Returns (graph, DigonRecord).  The digon cell is absorbed by its
    neighbor across the geodesic; rim positions and the two rim vertices
    of the geodesic disappear.
    """
    walk = m.cell_sides(cell)
    if len(walk) != 2 or cell not in m.boundary_cells:
        raise InvalidNetwork(f"cell {cell!r} is not a boundary digon")
    edge_side = next(s for s, _ in walk if s[0] == "edge")
    eid = edge_side[1]
    pair = m.edge_cells(eid)
    neighbor = next(iter(pair - {cell}))
    e0, e1 = m.edges[eid]
    if e0[0] != "b" or e1[0] != "b":
        raise InvalidNetwork("digon side is not a crossing-free geodesic")
    drop = {e0[1], e1[1]}
    keep = [i for i, b in enumerate(m.bverts) if b not in drop]
    new_bverts = tuple(m.bverts[i] for i in keep)
    new_arcs = tuple(
        m.arcs[i] if m.arcs[i] != cell else neighbor for i in keep
    )
    new_edges = {k: v for k, v in m.edges.items() if k != eid}
    colors = {c: col for c, col in m.colors.items() if c != cell}
    if not new_bverts and colors:
        new_arcs = (neighbor,)
    pos = tuple(i for i, c in enumerate(m.arcs) if c == cell)
    m2 = MedialGraph(dict(m.crossings), new_edges, colors, new_bverts, new_arcs, m.circles, m._merge_seq)
    return m2, DigonRecord(cell, neighbor, pos)


def geodesic_endpoint_pairing(m: MedialGraph) -> dict:
    """Map each rim vertex index to the index its geodesic ends at."""
    idx = {b: i for i, b in enumerate(m.bverts)}
    pairing = {}
    for g in m.geodesics:
        if g.closed:
            continue
        a, b = g.endpoints
        pairing[idx[a]] = idx[b]
        pairing[idx[b]] = idx[a]
    return pairing
