"""Exhaustive generation of critical medial graphs (chord arrangements).

Arrangements are built by inserting one boundary-to-boundary strand at a
time.  An insertion is a pair of rim gaps plus a route through the cells
between them crossing each existing geodesic at most once; side-parity
forces the crossed set to be exactly the geodesics separating the two
gaps, so enumerating routes enumerates arrangements.  Duplicates are
folded by a rim rotation/reflection canonical key built from the wiring
data (endpoint pairing plus per-strand crossing sequences), which
determines the arrangement.
"""

from __future__ import annotations

from .medial import MedialGraph, check_critical, geodesic_endpoint_pairing


def first_chord() -> MedialGraph:
    return MedialGraph.from_components(
        {},
        {0: (("b", "p0"), ("b", "p1"))},
        ("p0", "p1"),
        ("c0.L", "c0.R"),
    )


def bare_disk() -> MedialGraph:
    return MedialGraph({}, {}, {"c0": "white"}, (), ("c0",))


def _cell_edges(m: MedialGraph):
    out = {c: [] for c in m.cells}
    for eid, pair in m._edge_cells().items():
        a, b = sorted(pair)
        out[a].append((eid, b))
        out[b].append((eid, a))
    return out


def _routes(m: MedialGraph, start_cell: str, end_cell: str):
    """Edge routes from start to end crossing each geodesic at most once."""
    by_cell = _cell_edges(m)
    routes = []

    def dfs(cell, used, edges):
        if cell == end_cell:
            routes.append(tuple(edges))
            return
        for eid, other in sorted(by_cell[cell]):
            g = m.edge_geodesic(eid)
            if g in used:
                continue
            used.add(g)
            edges.append(eid)
            dfs(other, used, edges)
            edges.pop()
            used.remove(g)

    dfs(start_cell, set(), [])
    return routes


def insert_chord(m: MedialGraph, start_pos: int, end_pos: int, route) -> MedialGraph:
    """New medial graph with one more geodesic, entering the rim at gap
    ``start_pos``, crossing the given edges in order, leaving at
    ``end_pos``.  Requires a critical input; produces a critical output.
    """
    npos = len(m.arcs)
    cells_on_route = [m.arcs[start_pos % npos]]
    for eid in route:
        prev = cells_on_route[-1]
        pair = m.edge_cells(eid)
        cells_on_route.append(next(iter(pair - {prev})))
    if cells_on_route[-1] != m.arcs[end_pos % npos]:
        raise ValueError("route does not reach the end gap")
    if start_pos == end_pos and route:
        raise ValueError("a same-gap chord cannot cross anything")

    seq = m._merge_seq
    left = {c: f"{c}.L" for c in set(cells_on_route)}
    right = {c: f"{c}.R" for c in set(cells_on_route)}
    new_x = {i: f"x{len(m.crossings)}n{seq}.{i}" for i in range(len(route))}
    b_s = f"p{len(m.bverts)}n{seq}"
    b_e = f"p{len(m.bverts) + 1}n{seq}"

    # classify each path cell's sides and corners relative to the chord
    cls = {}  # cell -> {side/corner token -> 'L'|'R'}
    for i, cell in enumerate(cells_on_route):
        s_in = ("rim", start_pos) if i == 0 else ("edge", route[i - 1])
        s_out = ("rim", end_pos) if i == len(route) else ("edge", route[i])
        walk = m.cell_sides(cell)
        sides = [s for s, _ in walk]
        i_in, i_out = sides.index(s_in), sides.index(s_out)
        marks = {}
        n = len(walk)
        if i_in == i_out:
            # same side punctured twice: the right part is just the lune
            for j in range(n):
                marks[("corner", j)] = "L"
                if j != i_in:
                    marks[("side", j)] = "L"
        else:
            j = i_out
            while True:
                marks[("corner", j)] = "L"  # corner after walk[j]
                j = (j + 1) % n
                if j == i_in:
                    break
                marks[("side", j)] = "L"
            j = i_in
            while True:
                marks[("corner", j)] = "R"
                j = (j + 1) % n
                if j == i_out:
                    break
                marks[("side", j)] = "R"
        cls[cell] = (walk, marks)

    def corner_mark(cell, xid):
        walk, marks = cls[cell]
        for j, (_s, corner) in enumerate(walk):
            if corner == ("x", xid):
                return marks[("corner", j)]
        raise ValueError(f"{xid} is not a corner of {cell}")

    def side_mark(cell, side):
        walk, marks = cls[cell]
        for j, (s, _c) in enumerate(walk):
            if s == side:
                return marks.get(("side", j))
        raise ValueError(f"{side} is not a side of {cell}")

    def split_name(cell, mark):
        return left[cell] if mark == "L" else right[cell]

    # old crossings, path cells renamed by which side of the chord they kept
    raw_quads = {}
    net_edges = {}
    for xid, quad in m.crossings.items():
        cells = []
        for c in quad.cells:
            if c in left:
                cells.append(split_name(c, corner_mark(c, xid)))
            else:
                cells.append(c)
        raw_quads[xid] = tuple(cells)
        net_edges[xid] = quad.net_edge
    for i, eid in enumerate(route):
        prev, nxt = cells_on_route[i], cells_on_route[i + 1]
        raw_quads[new_x[i]] = (right[prev], right[nxt], left[nxt], left[prev])

    # edges: surviving old ones, split halves of crossed ones, chord segments
    new_edges = {}
    counter = 0

    def put(e0, e1):
        nonlocal counter
        new_edges[counter] = (e0, e1)
        counter += 1

    route_set = set(route)
    for eid, ends in m.edges.items():
        if eid not in route_set:
            put(*ends)
    for i, eid in enumerate(route):
        prev = cells_on_route[i]
        walk, _marks = cls[prev]
        j = next(k for k, (s, _c) in enumerate(walk) if s == ("edge", eid))
        corner_to = walk[j][1]
        corner_from = walk[j - 1][1]

        def end_at(corner):
            if corner[0] == "b":
                return corner
            e0, e1 = m.edges[eid]
            hits = [e for e in (e0, e1) if e[0] == "x" and e[1] == corner[1]]
            if len(hits) != 1:
                raise ValueError("ambiguous edge end (loop edge in a critical graph)")
            return hits[0]

        put(end_at(corner_from), ("x", new_x[i], 0))  # right half
        put(("x", new_x[i], 2), end_at(corner_to))  # left half
    if route:
        put(("b", b_s), ("x", new_x[0], 3))
        for i in range(len(route) - 1):
            put(("x", new_x[i], 1), ("x", new_x[i + 1], 3))
        put(("x", new_x[len(route) - 1], 1), ("b", b_e))
    else:
        put(("b", b_s), ("b", b_e))

    # rim: walk old positions, splitting the punctured gap(s)
    new_bverts = []
    new_arcs = []
    a0, ak = cells_on_route[0], cells_on_route[-1]
    for p in range(npos):
        if m.bverts:
            new_bverts.append(m.bverts[p])
        if p == start_pos and p == end_pos:
            new_arcs.append(left[a0])
            new_bverts.append(b_s)
            new_arcs.append(right[a0])
            new_bverts.append(b_e)
            new_arcs.append(left[a0])
        elif p == start_pos:
            new_arcs.append(left[a0])
            new_bverts.append(b_s)
            new_arcs.append(right[a0])
        elif p == end_pos:
            new_arcs.append(right[ak])
            new_bverts.append(b_e)
            new_arcs.append(left[ak])
        else:
            c = m.arcs[p]
            if c in left:
                c = split_name(c, side_mark(c, ("rim", p)))
            new_arcs.append(c)

    m2 = MedialGraph.from_components(raw_quads, new_edges, tuple(new_bverts), tuple(new_arcs), net_edges=net_edges)
    m2._merge_seq = seq + 1
    return m2


def canonical_key(m: MedialGraph):
    """Wiring-diagram key, minimized over rim rotation and reflection."""
    npos = len(m.bverts)
    if npos == 0:
        return ("disk",)
    pairing = geodesic_endpoint_pairing(m)
    geo_of = {}
    for g in m.geodesics:
        for b in g.endpoints:
            geo_of[m.bverts.index(b)] = g.index
    seqs = {}
    for g in m.geodesics:
        start = m.bverts.index(g.endpoints[0])
        crossings = []
        for p in g.points:
            if p[0] != "x":
                continue
            g1 = m.strand_at(p[1], 0)
            g2 = m.strand_at(p[1], 1)
            crossings.append(g2 if g1 == g.index else g1)
        seqs[start] = crossings
        seqs[m.bverts.index(g.endpoints[1])] = list(reversed(crossings))

    best = None
    for flip in (False, True):
        for r in range(npos):
            def newpos(j):
                return (j - r) % npos if not flip else (r - j) % npos

            geo_name = {}
            for j in sorted(range(npos), key=newpos):
                g = geo_of[j]
                if g not in geo_name:
                    geo_name[g] = len(geo_name)
            key = tuple(
                (
                    newpos(pairing[j]),
                    tuple(geo_name[g] for g in seqs[j]),
                )
                for j in sorted(range(npos), key=newpos)
            )
            if best is None or key < best:
                best = key
    return best


def enumerate_critical(max_geodesics: int, include_disk=False):
    """All critical medial graphs with up to the given number of geodesics,
    one representative per rim rotation/reflection class."""
    levels = [[bare_disk()]]
    for _g in range(max_geodesics):
        seen = {}
        for m in levels[-1]:
            if not m.bverts:
                nxt = first_chord()
                seen[canonical_key(nxt)] = nxt
                continue
            npos = len(m.arcs)
            for sp in range(npos):
                for ep in range(npos):
                    if sp == ep:
                        candidates = [()]
                    else:
                        candidates = _routes(m, m.arcs[sp], m.arcs[ep])
                    for route in candidates:
                        m2 = insert_chord(m, sp, ep, route)
                        if check_critical(m2) is not None:
                            continue
                        key = canonical_key(m2)
                        if key not in seen:
                            seen[key] = m2
        levels.append([seen[k] for k in sorted(seen)])
    out = []
    if include_disk:
        out.append(levels[0][0])
    for level in levels[1:]:
        out.extend(level)
    return out
