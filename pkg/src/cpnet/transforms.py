"""Electrically equivalent network rewrites.

All rewrites operate on linear-conductance networks at the Network level
and preserve the response matrix; zero denominators are hard errors,
never perturbed, since signed conductances make them reachable.  The
star-mesh and K4 rewrites can leave the planar-embedding check failing
(that is their point: a K4 across the disk is a mild failure of circular
planarity); their outputs still carry best-effort rotations and support
all conductance algebra.
"""

from __future__ import annotations

from dataclasses import dataclass

from .conductance import Linear
from .errors import BoundaryMismatch, DegenerateDenominator, InvalidNetwork
from .medial import MedialGraph, ensure_critical, geodesic_endpoint_pairing
from .network import Edge, Network, augmented_faces


@dataclass(frozen=True)
class TransformRecord:
    kind: str
    removed_vertices: tuple
    removed_edges: tuple  # (edge id, conductance)
    added_vertices: tuple
    added_edges: tuple  # (edge id, u, v, conductance)

    def to_json(self):
        return {
            "kind": self.kind,
            "removed_vertices": list(self.removed_vertices),
            "removed_edges": [[e, c] for e, c in self.removed_edges],
            "added_vertices": list(self.added_vertices),
            "added_edges": [[e, u, v, c] for e, u, v, c in self.added_edges],
        }


def _linear_c(net, eid):
    spec = net.conductances.get(eid)
    if not isinstance(spec, Linear):
        raise InvalidNetwork(f"transform needs a linear conductance on edge {eid!r}")
    return spec.c


def _fresh_edge_ids(net, k):
    used = {e.id for e in net.edges}
    out = []
    n = len(used) + 1
    while len(out) < k:
        cand = f"e{n}"
        if cand not in used:
            used.add(cand)
            out.append(cand)
        n += 1
    return out


def _fresh_vertex(net, base="w"):
    used = set(net.vertices)
    n = 1
    while f"{base}{n}" in used:
        n += 1
    return f"{base}{n}"


def _replace_slots(rotation, removed, insert_at_first, inserts):
    """Drop the removed ends; splice the inserts where the first one sat."""
    out = []
    done = False
    for end in rotation:
        if end in removed:
            if end == insert_at_first and not done:
                out.extend(inserts)
                done = True
            continue
        out.append(end)
    if not done:
        out.extend(inserts)
    return tuple(out)


def wye_delta(net: Network, hub: str):
    """Replace a degree-3 interior hub by a triangle on its neighbors."""
    if hub not in net.interior:
        raise InvalidNetwork(f"{hub!r} is not an interior vertex")
    rot = net.rotations.get(hub, ())
    if len(rot) != 3:
        raise InvalidNetwork(f"{hub!r} has degree {len(rot)}, need 3")
    spokes = [net.edge(eid) for eid, _ in rot]
    nbrs = [e.other(hub) for e in spokes]
    if len(set(nbrs)) != 3 or hub in nbrs:
        raise InvalidNetwork("hub neighbors must be three distinct vertices")
    c = [_linear_c(net, e.id) for e in spokes]
    sigma = c[0] + c[1] + c[2]
    if sigma == 0:
        raise DegenerateDenominator("c1 + c2 + c3 = 0")
    new_ids = _fresh_edge_ids(net, 3)
    # edge k joins nbrs[k] and nbrs[k+1], conductance c_k c_{k+1} / sigma
    new_edges = []
    new_cond = {}
    for k in range(3):
        u, v = nbrs[k], nbrs[(k + 1) % 3]
        new_edges.append(Edge(new_ids[k], u, v))
        new_cond[new_ids[k]] = Linear(c[k] * c[(k + 1) % 3] / sigma)

    rotations = {}
    for v, r in net.rotations.items():
        if v == hub:
            continue
        rotations[v] = r
    for k in range(3):
        v = nbrs[k]
        spoke_end = next(
            (eid, end) for eid, end in rotations[v] if eid == spokes[k].id
        )
        to_next = new_edges[k]
        to_prev = new_edges[(k - 1) % 3]
        inserts = [
            (to_next.id, "a" if to_next.u == v else "b"),
            (to_prev.id, "a" if to_prev.u == v else "b"),
        ]
        rotations[v] = _replace_slots(rotations[v], {spoke_end}, spoke_end, inserts)

    edges = tuple(e for e in net.edges if e.id not in {s.id for s in spokes}) + tuple(new_edges)
    cond = {k: v for k, v in net.conductances.items() if k not in {s.id for s in spokes}}
    cond.update(new_cond)
    out = Network(net.boundary, tuple(x for x in net.interior if x != hub), edges, rotations, cond)
    rec = TransformRecord(
        "YDelta",
        (hub,),
        tuple((s.id, net.conductances[s.id].c) for s in spokes),
        (),
        tuple((e.id, e.u, e.v, new_cond[e.id].c) for e in new_edges),
    )
    return out, rec


def delta_wye(net: Network, triangle):
    """Replace a triangular face by a hub; the three edges must bound a face."""
    tri = tuple(triangle)
    if len(tri) != 3:
        raise InvalidNetwork("need exactly three edge ids")
    inner, _ = augmented_faces(net)
    face = None
    for orbit in inner:
        ids = [d[1] for d in orbit if d[0] == "e"]
        if len(orbit) == 3 and sorted(ids) == sorted(tri):
            face = orbit
            break
    if face is None:
        raise InvalidNetwork(f"edges {tri} do not bound a triangular face")
    # corners in counterclockwise face order; edge k runs corner k -> corner k+1
    corners = []
    for d in face:
        _, eid, direction = d
        e = net.edge(eid)
        corners.append(e.u if direction == "ab" else e.v)
    edge_between = {}
    for d in face:
        _, eid, direction = d
        e = net.edge(eid)
        u = e.u if direction == "ab" else e.v
        edge_between[u] = eid
    cs = [_linear_c(net, edge_between[v]) for v in corners]
    q = cs[0] * cs[1] + cs[1] * cs[2] + cs[0] * cs[2]
    hub = _fresh_vertex(net)
    new_ids = _fresh_edge_ids(net, 3)
    new_edges = []
    new_cond = {}
    for k, v in enumerate(corners):
        # the triangle edge not incident to v
        opposite = next(
            eid for eid in tri if v not in (net.edge(eid).u, net.edge(eid).v)
        )
        c_opp = _linear_c(net, opposite)
        if c_opp == 0:
            raise DegenerateDenominator(f"edge {opposite!r} has zero conductance")
        new_edges.append(Edge(new_ids[k], v, hub))
        new_cond[new_ids[k]] = Linear(q / c_opp)

    rotations = dict(net.rotations)
    for k, v in enumerate(corners):
        eid_out = edge_between[v]  # departs v along the face walk
        eid_in = edge_between[corners[(k - 1) % 3]]  # arrives at v
        ends_here = [
            (eid, end) for eid, end in rotations[v] if eid in (eid_out, eid_in)
        ]
        spoke = new_edges[k]
        rotations[v] = _replace_slots(
            rotations[v], set(ends_here), ends_here[0], [(spoke.id, "a")]
        )
    rotations[hub] = tuple((e.id, "b") for e in new_edges)

    edges = tuple(e for e in net.edges if e.id not in tri) + tuple(new_edges)
    cond_out = {k: v for k, v in net.conductances.items() if k not in tri}
    cond_out.update(new_cond)
    out = Network(net.boundary, net.interior + (hub,), edges, rotations, cond_out)
    rec = TransformRecord(
        "DeltaY",
        (),
        tuple((eid, net.conductances[eid].c) for eid in tri),
        (hub,),
        tuple((e.id, e.u, e.v, new_cond[e.id].c) for e in new_edges),
    )
    return out, rec


def series_reduce(net: Network, vertex: str):
    """Contract an interior degree-2 vertex into a single edge."""
    if vertex not in net.interior:
        raise InvalidNetwork(f"{vertex!r} is not an interior vertex")
    rot = net.rotations.get(vertex, ())
    if len(rot) != 2:
        raise InvalidNetwork(f"{vertex!r} has degree {len(rot)}, need 2")
    e1, e2 = (net.edge(eid) for eid, _ in rot)
    a, b = e1.other(vertex), e2.other(vertex)
    if e1.id == e2.id or a == vertex or b == vertex or a == b:
        raise InvalidNetwork("series reduction needs two distinct non-loop edges to distinct ends")
    c1, c2 = _linear_c(net, e1.id), _linear_c(net, e2.id)
    if c1 + c2 == 0:
        raise DegenerateDenominator("c1 + c2 = 0")
    (new_id,) = _fresh_edge_ids(net, 1)
    new_edge = Edge(new_id, a, b)
    rotations = {v: r for v, r in net.rotations.items() if v != vertex}
    old_a = next((eid, end) for eid, end in rotations[a] if eid == e1.id)
    rotations[a] = _replace_slots(rotations[a], {old_a}, old_a, [(new_id, "a")])
    old_b = next((eid, end) for eid, end in rotations[b] if eid == e2.id)
    rotations[b] = _replace_slots(rotations[b], {old_b}, old_b, [(new_id, "b")])
    edges = tuple(e for e in net.edges if e.id not in (e1.id, e2.id)) + (new_edge,)
    cond = {k: v for k, v in net.conductances.items() if k not in (e1.id, e2.id)}
    cond[new_id] = Linear(c1 * c2 / (c1 + c2))
    out = Network(net.boundary, tuple(x for x in net.interior if x != vertex), edges, rotations, cond)
    rec = TransformRecord(
        "Series",
        (vertex,),
        ((e1.id, c1), (e2.id, c2)),
        (),
        ((new_id, a, b, cond[new_id].c),),
    )
    return out, rec


def parallel_reduce(net: Network, eid1: str, eid2: str):
    """Merge two edges on the same endpoint pair into one."""
    e1, e2 = net.edge(eid1), net.edge(eid2)
    if {e1.u, e1.v} != {e2.u, e2.v} or e1.u == e1.v:
        raise InvalidNetwork("edges are not a non-loop parallel pair")
    c1, c2 = _linear_c(net, eid1), _linear_c(net, eid2)
    if c1 + c2 == 0:
        raise DegenerateDenominator("c1 + c2 = 0 (zero total conductance)")
    rotations = {}
    for v, rot in net.rotations.items():
        rotations[v] = tuple((eid, end) for eid, end in rot if eid != eid2)
    edges = tuple(e for e in net.edges if e.id != eid2)
    cond = {k: v for k, v in net.conductances.items() if k != eid2}
    cond[eid1] = Linear(c1 + c2)
    out = Network(net.boundary, net.interior, edges, rotations, cond)
    rec = TransformRecord(
        "Parallel", (), ((eid1, c1), (eid2, c2)), (), ((eid1, e1.u, e1.v, c1 + c2),)
    )
    return out, rec


def star_mesh_4(net: Network, hub: str):
    """Replace a degree-4 interior hub by the complete graph on its neighbors."""
    if hub not in net.interior:
        raise InvalidNetwork(f"{hub!r} is not an interior vertex")
    rot = net.rotations.get(hub, ())
    if len(rot) != 4:
        raise InvalidNetwork(f"{hub!r} has degree {len(rot)}, need 4")
    spokes = [net.edge(eid) for eid, _ in rot]
    nbrs = [e.other(hub) for e in spokes]
    if len(set(nbrs)) != 4 or hub in nbrs:
        raise InvalidNetwork("hub neighbors must be four distinct vertices")
    c = [_linear_c(net, e.id) for e in spokes]
    sigma = sum(c)
    if sigma == 0:
        raise DegenerateDenominator("spoke conductances sum to 0")
    new_ids = _fresh_edge_ids(net, 6)
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    new_edges = {}
    new_cond = {}
    for eid, (i, j) in zip(new_ids, pairs):
        new_edges[(i, j)] = Edge(eid, nbrs[i], nbrs[j])
        new_cond[eid] = Linear(c[i] * c[j] / sigma)

    rotations = {v: r for v, r in net.rotations.items() if v != hub}
    for i in range(4):
        v = nbrs[i]
        spoke_end = next((eid, end) for eid, end in rotations[v] if eid == spokes[i].id)
        inserts = []
        for j in (i + 1, i + 2, i + 3):
            j %= 4
            e = new_edges[(min(i, j), max(i, j))]
            inserts.append((e.id, "a" if e.u == v else "b"))
        rotations[v] = _replace_slots(rotations[v], {spoke_end}, spoke_end, inserts)

    edges = tuple(e for e in net.edges if e.id not in {s.id for s in spokes}) + tuple(
        new_edges[p] for p in pairs
    )
    cond = {k: v for k, v in net.conductances.items() if k not in {s.id for s in spokes}}
    cond.update(new_cond)
    out = Network(net.boundary, tuple(x for x in net.interior if x != hub), edges, rotations, cond)
    rec = TransformRecord(
        "StarMesh4",
        (hub,),
        tuple((s.id, net.conductances[s.id].c) for s in spokes),
        (),
        tuple((new_edges[p].id, new_edges[p].u, new_edges[p].v, new_cond[new_edges[p].id].c) for p in pairs),
    )
    return out, rec


def _k4_lambda(net, verts):
    lam = {}
    for i in range(4):
        for j in range(i + 1, 4):
            hits = [
                e for e in net.edges if {e.u, e.v} == {verts[i], verts[j]}
            ]
            if len(hits) != 1:
                raise InvalidNetwork(
                    f"need exactly one edge between {verts[i]!r} and {verts[j]!r}"
                )
            lam[(i + 1, j + 1)] = (hits[0], _linear_c(net, hits[0].id))
    return lam


def k4_to_planar(net: Network, verts):
    """Trade a K4 on the four given vertices for a hub-plus-two-chords gadget.

    A conductance of zero on either chord deletes that edge, yielding one
    of the four reduced shapes.
    """
    verts = tuple(verts)
    if len(verts) != 4:
        raise InvalidNetwork("need four vertices")
    lam = _k4_lambda(net, verts)
    c_of = {k: v[1] for k, v in lam.items()}
    for key, val in c_of.items():
        if val == 0:
            raise DegenerateDenominator(f"lambda{key} = 0")
    q = (
        c_of[(1, 4)] * c_of[(2, 3)]
        + c_of[(2, 3)] * c_of[(2, 4)]
        + c_of[(2, 3)] * c_of[(3, 4)]
        + c_of[(2, 4)] * c_of[(3, 4)]
    )
    if q == 0 or c_of[(3, 4)] == 0 or c_of[(2, 4)] == 0 or c_of[(2, 3)] == 0:
        raise DegenerateDenominator("q-ratio undefined")
    a = c_of[(1, 2)] - c_of[(1, 4)] * c_of[(2, 3)] / c_of[(3, 4)]
    b = c_of[(1, 3)] - c_of[(1, 4)] * c_of[(2, 3)] / c_of[(2, 4)]
    cc = q * c_of[(1, 4)] / (c_of[(2, 4)] * c_of[(3, 4)])
    dd = q / c_of[(3, 4)]
    ee = q / c_of[(2, 4)]
    ff = q / c_of[(2, 3)]

    hub = _fresh_vertex(net)
    removed = {lam[k][0].id for k in lam}
    n_new = 4 + (1 if a != 0 else 0) + (1 if b != 0 else 0)
    ids = _fresh_edge_ids(net, n_new)
    new_edges = []
    new_cond = {}
    spoke_ids = []
    for c_val, v in zip((cc, dd, ee, ff), verts):
        eid = ids[len(new_edges)]
        new_edges.append(Edge(eid, v, hub))
        new_cond[eid] = Linear(c_val)
        spoke_ids.append(eid)
    chord = {}
    if a != 0:
        eid = ids[len(new_edges)]
        new_edges.append(Edge(eid, verts[0], verts[1]))
        new_cond[eid] = Linear(a)
        chord["a"] = eid
    if b != 0:
        eid = ids[len(new_edges)]
        new_edges.append(Edge(eid, verts[0], verts[2]))
        new_cond[eid] = Linear(b)
        chord["b"] = eid

    rotations = {}
    for v, rot in net.rotations.items():
        kept = [(eid, end) for eid, end in rot if eid not in removed]
        rotations[v] = tuple(kept)
    inserts_at = {
        verts[0]: [chord.get("a"), spoke_ids[0], chord.get("b")],
        verts[1]: [chord.get("a"), spoke_ids[1]],
        verts[2]: [chord.get("b"), spoke_ids[2]],
        verts[3]: [spoke_ids[3]],
    }
    for v, ids_here in inserts_at.items():
        ends = []
        for eid in ids_here:
            if eid is None:
                continue
            e = next(x for x in new_edges if x.id == eid)
            ends.append((eid, "a" if e.u == v else "b"))
        rotations[v] = rotations[v] + tuple(ends)
    rotations[hub] = tuple((eid, "b") for eid in spoke_ids)

    edges = tuple(e for e in net.edges if e.id not in removed) + tuple(new_edges)
    cond = {k: v for k, v in net.conductances.items() if k not in removed}
    cond.update(new_cond)
    out = Network(net.boundary, net.interior + (hub,), edges, rotations, cond)
    rec = TransformRecord(
        "K4ToPlanar",
        (),
        tuple((lam[k][0].id, c_of[k]) for k in sorted(lam)),
        (hub,),
        tuple((e.id, e.u, e.v, new_cond[e.id].c) for e in new_edges),
    )
    return out, rec


def planar_to_k4(net: Network, verts, hub: str):
    """Inverse of k4_to_planar: hub-plus-chords gadget back to a K4."""
    verts = tuple(verts)
    if len(verts) != 4 or hub not in net.interior:
        raise InvalidNetwork("need four vertices and an interior hub")
    spokes = {}
    for e in net.edges:
        if hub in (e.u, e.v):
            other = e.other(hub)
            if other not in verts or other in spokes:
                raise InvalidNetwork("hub must join exactly the four vertices, once each")
            spokes[other] = e
    if set(spokes) != set(verts):
        raise InvalidNetwork("hub must join exactly the four vertices")
    cs = {v: _linear_c(net, spokes[v].id) for v in verts}
    sigma = sum(cs.values())
    if sigma == 0:
        raise DegenerateDenominator("c + d + e + f = 0")

    def chord(u, v):
        hits = [e for e in net.edges if {e.u, e.v} == {u, v}]
        if len(hits) > 1:
            raise InvalidNetwork(f"multiple edges between {u!r} and {v!r}")
        return hits[0] if hits else None

    ea, eb = chord(verts[0], verts[1]), chord(verts[0], verts[2])
    a = _linear_c(net, ea.id) if ea else 0.0
    b = _linear_c(net, eb.id) if eb else 0.0
    c, d, e_, f = cs[verts[0]], cs[verts[1]], cs[verts[2]], cs[verts[3]]
    lam = {
        (1, 2): a + c * d / sigma,
        (1, 3): b + c * e_ / sigma,
        (1, 4): c * f / sigma,
        (2, 3): d * e_ / sigma,
        (2, 4): d * f / sigma,
        (3, 4): e_ * f / sigma,
    }
    removed = {spokes[v].id for v in verts}
    for ch in (ea, eb):
        if ch is not None:
            removed.add(ch.id)
    ids = _fresh_edge_ids(net, 6)
    new_edges = []
    new_cond = {}
    for eid, (i, j) in zip(ids, sorted(lam)):
        new_edges.append(Edge(eid, verts[i - 1], verts[j - 1]))
        new_cond[eid] = Linear(lam[(i, j)])

    rotations = {}
    for v, rot in net.rotations.items():
        if v == hub:
            continue
        rotations[v] = tuple((eid, end) for eid, end in rot if eid not in removed)
    for i, v in enumerate(verts):
        ends = []
        for j in (i + 1, i + 2, i + 3):
            j %= 4
            key = (min(i, j) + 1, max(i, j) + 1)
            e = new_edges[sorted(lam).index(key)]
            ends.append((e.id, "a" if e.u == v else "b"))
        rotations[v] = rotations[v] + tuple(ends)

    edges = tuple(e for e in net.edges if e.id not in removed) + tuple(new_edges)
    cond = {k: v for k, v in net.conductances.items() if k not in removed}
    cond.update(new_cond)
    out = Network(net.boundary, tuple(x for x in net.interior if x != hub), edges, rotations, cond)
    rec = TransformRecord(
        "PlanarToK4",
        (hub,),
        tuple((eid, net.conductances[eid].c) for eid in sorted(removed)),
        (),
        tuple((e.id, e.u, e.v, new_cond[e.id].c) for e in new_edges),
    )
    return out, rec


def remove_self_loop(net: Network, eid: str):
    e = net.edge(eid)
    if e.u != e.v:
        raise InvalidNetwork(f"edge {eid!r} is not a self-loop")
    rotations = {
        v: tuple((x, end) for x, end in rot if x != eid) for v, rot in net.rotations.items()
    }
    edges = tuple(x for x in net.edges if x.id != eid)
    cond = {k: v for k, v in net.conductances.items() if k != eid}
    out = Network(net.boundary, net.interior, edges, rotations, cond)
    c = net.conductances.get(eid)
    rec = TransformRecord(
        "RemoveSelfLoop", (), ((eid, c.c if isinstance(c, Linear) else None),), (), ()
    )
    return out, rec


def medial_equivalent(m1: MedialGraph, m2: MedialGraph) -> bool:
    """Endpoint-pairing test: the complete electrical-distinguishability
    invariant for critical medial graphs on a shared rim layout."""
    ensure_critical(m1)
    ensure_critical(m2)
    if len(m1.bverts) != len(m2.bverts):
        raise BoundaryMismatch(
            f"{len(m1.bverts)} vs {len(m2.bverts)} rim vertices"
        )
    return geodesic_endpoint_pairing(m1) == geodesic_endpoint_pairing(m2)
