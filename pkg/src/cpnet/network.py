"""Circular planar networks: vertices on a disk boundary, a rotation system,
and per-edge conductance specifications.

The embedding is input data, not computed: each vertex carries the
counterclockwise cyclic order of its incident edge ends, and the boundary
vertices carry their counterclockwise circular order on the disk rim.
Validation checks that this data actually describes a genus-0 embedding in
the disk by tracing faces of the network augmented with the rim arcs
between consecutive boundary vertices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .conductance import ConductanceSpec, spec_from_json, spec_to_json
from .errors import InconsistentRotation, InvalidNetwork

# An edge end is (edge_id, 'a'|'b'): 'a' is the end at the stored u, 'b' at v.
End = tuple[str, str]


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str

    def other(self, vertex: str) -> str:
        return self.v if vertex == self.u else self.u

    def vertex_at(self, end: str) -> str:
        return self.u if end == "a" else self.v


@dataclass(frozen=True)
class Network:
    boundary: tuple[str, ...]
    interior: tuple[str, ...]
    edges: tuple[Edge, ...]
    rotations: dict[str, tuple[End, ...]]
    conductances: dict[str, ConductanceSpec] = field(default_factory=dict)

    # -- basic accessors -------------------------------------------------

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.boundary + self.interior

    def edge(self, eid: str) -> Edge:
        return self._edge_index[eid]

    @property
    def _edge_index(self) -> dict[str, Edge]:
        idx = self.__dict__.get("_edge_index_cache")
        if idx is None:
            idx = {e.id: e for e in self.edges}
            self.__dict__["_edge_index_cache"] = idx
        return idx

    def is_boundary(self, v: str) -> bool:
        return v in self._boundary_set

    @property
    def _boundary_set(self) -> frozenset:
        s = self.__dict__.get("_boundary_set_cache")
        if s is None:
            s = frozenset(self.boundary)
            self.__dict__["_boundary_set_cache"] = s
        return s

    def degree(self, v: str) -> int:
        return len(self.rotations.get(v, ()))

    def with_conductances(self, conductances: dict[str, ConductanceSpec]) -> "Network":
        return Network(self.boundary, self.interior, self.edges, self.rotations, dict(conductances))

    def without_conductances(self) -> "Network":
        return Network(self.boundary, self.interior, self.edges, self.rotations, {})

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        rot = {}
        for v, ends in self.rotations.items():
            entries = []
            for eid, end in ends:
                e = self.edge(eid)
                ambiguous = e.u == e.v or sum(
                    1 for (eid2, _) in ends if eid2 == eid
                ) > 1
                entries.append(f"{eid}:{end}" if ambiguous else eid)
            rot[v] = entries
        out = {
            "boundary": list(self.boundary),
            "interior": list(self.interior),
            "edges": [
                {
                    "id": e.id,
                    "u": e.u,
                    "v": e.v,
                    **(
                        {"conductance": spec_to_json(self.conductances[e.id])}
                        if e.id in self.conductances
                        else {}
                    ),
                }
                for e in self.edges
            ],
            "rotations": rot,
        }
        return out

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")

    @staticmethod
    def from_json(obj: dict) -> "Network":
        edges = tuple(Edge(str(e["id"]), str(e["u"]), str(e["v"])) for e in obj["edges"])
        eidx = {e.id: e for e in edges}
        conductances = {}
        for e in obj["edges"]:
            if "conductance" in e and e["conductance"] is not None:
                conductances[str(e["id"])] = spec_from_json(e["conductance"])
        rotations = {}
        for v, entries in obj.get("rotations", {}).items():
            ends = []
            for entry in entries:
                if ":" in entry:
                    eid, end = entry.rsplit(":", 1)
                    if end not in ("a", "b"):
                        raise InvalidNetwork(f"bad end tag in rotation entry {entry!r}")
                else:
                    eid, end = entry, None
                if eid not in eidx:
                    raise InvalidNetwork(f"rotation of {v!r} references unknown edge {eid!r}")
                if end is None:
                    e = eidx[eid]
                    if e.u == e.v:
                        raise InvalidNetwork(f"self-loop {eid!r} needs explicit end tags")
                    if v == e.u:
                        end = "a"
                    elif v == e.v:
                        end = "b"
                    else:
                        raise InvalidNetwork(f"edge {eid!r} has no end at vertex {v!r}")
                ends.append((eid, end))
            rotations[str(v)] = tuple(ends)
        return Network(
            tuple(str(v) for v in obj["boundary"]),
            tuple(str(v) for v in obj["interior"]),
            edges,
            rotations,
            conductances,
        )

    @staticmethod
    def load(path) -> "Network":
        with open(path, encoding="utf-8") as fh:
            return Network.from_json(json.load(fh))


@dataclass
class ValidationReport:
    ok: bool
    problems: list[str]

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class BoundaryData:
    """Boundary values, tagged with their role (voltages or net currents)."""

    role: str  # 'voltage' | 'current'
    values: dict[str, float]

    @staticmethod
    def from_json(obj: dict) -> "BoundaryData":
        role = obj.get("role", "voltage")
        values = {str(k): float(v) for k, v in obj.items() if k != "role"}
        return BoundaryData(role, values)

    def to_json(self) -> dict:
        out = {k: v for k, v in self.values.items()}
        out["role"] = self.role
        return out


# -- face tracing --------------------------------------------------------
#
# A directed element is ('e', eid, 'ab'|'ba') for a network edge, or
# ('arc', j, +1|-1) for the rim arc from boundary[j] to boundary[j+1].
# Tracing follows "depart on the clockwise-next end after arrival", which
# walks the boundary of the face lying to the LEFT of every directed
# element it contains.


def _arc_count(net: Network) -> int:
    n = len(net.boundary)
    return n if n >= 2 else (1 if n == 1 else 0)


def _augmented_rotation(net: Network):
    """Rotation slots per vertex, rim arcs spliced in at boundary vertices."""
    n = len(net.boundary)
    rot = {}
    for v in net.vertices:
        ends = [("e", eid, end) for (eid, end) in net.rotations.get(v, ())]
        rot[v] = ends
    for i, v in enumerate(net.boundary):
        if n == 1:
            out_slot, in_slot = ("arc", 0, 0), ("arc", 0, 1)
        else:
            out_slot, in_slot = ("arc", i, 0), ("arc", (i - 1) % n, 1)
        rot[v] = [out_slot] + rot[v] + [in_slot]
    return rot


def _slot_vertex(net: Network, slot) -> str:
    kind = slot[0]
    if kind == "e":
        return net.edge(slot[1]).vertex_at(slot[2])
    n = len(net.boundary)
    j, side = slot[1], slot[2]
    return net.boundary[j] if side == 0 else net.boundary[(j + 1) % n]


def _directed_from_slot(slot):
    """Directed element leaving along the given end slot."""
    if slot[0] == "e":
        return ("e", slot[1], "ab" if slot[2] == "a" else "ba")
    return ("arc", slot[1], 1 if slot[2] == 0 else -1)


def _arrival_slot(d):
    if d[0] == "e":
        return ("e", d[1], "b" if d[2] == "ab" else "a")
    return ("arc", d[1], 1 if d[2] == 1 else 0)


def _trace_orbits(net: Network, rot):
    """All face orbits of the given rotation slots; raises on malformed data."""
    slot_pos = {}
    for v, slots in rot.items():
        for k, s in enumerate(slots):
            if s in slot_pos:
                raise InconsistentRotation(f"end {s} appears twice")
            slot_pos[s] = (v, k)
    orbits = []
    seen = set()
    all_directed = []
    for v in sorted(rot):
        for s in rot[v]:
            all_directed.append(_directed_from_slot(s))
    for start in all_directed:
        if start in seen:
            continue
        orbit = []
        d = start
        while True:
            if d in seen:
                raise InconsistentRotation(f"directed element {d} visited twice")
            seen.add(d)
            orbit.append(d)
            arr = _arrival_slot(d)
            if arr not in slot_pos:
                raise InconsistentRotation(f"missing rotation entry for end {arr}")
            v, k = slot_pos[arr]
            depart = rot[v][(k - 1) % len(rot[v])]
            d = _directed_from_slot(depart)
            if d == start:
                break
        orbits.append(tuple(orbit))
    return orbits


def augmented_faces(net: Network):
    """(inner_faces, outer_face) of the rim-augmented embedding.

    The outer face is the all-rim orbit walking the circle clockwise; every
    other orbit is a region of the disk cut out by the network.
    """
    rot = _augmented_rotation(net)
    orbits = _trace_orbits(net, rot)
    if _arc_count(net) == 0:
        return orbits, None
    outer = None
    inner = []
    for orbit in orbits:
        if any(d[0] == "arc" and d[2] == -1 for d in orbit):
            outer = orbit
        else:
            inner.append(orbit)
    if outer is None or not all(d[0] == "arc" for d in outer):
        raise InvalidNetwork("rim arcs are not free: outer face is obstructed")
    return inner, outer


def trace_faces(net: Network):
    """Face walks of the bare rotation system, outer face first.

    Each face is a tuple of directed edges (edge_id, 'ab'|'ba').  For a
    tree there is a single walk covering every edge twice, and that walk is
    the outer face.
    """
    rot = {v: [("e", eid, end) for (eid, end) in net.rotations.get(v, ())] for v in net.vertices}
    orbits = _trace_orbits(net, rot)
    orbits = [tuple((d[1], d[2]) for d in o) for o in orbits]
    if not orbits:
        return [()]
    outer = None
    for v in net.boundary:
        slots = net.rotations.get(v, ())
        if slots:
            eid, end = slots[-1]
            want = (eid, "ab" if end == "a" else "ba")
            outer = next(o for o in orbits if want in o)
            break
    if outer is None:
        outer = orbits[0]
    return [outer] + [o for o in orbits if o is not outer]


def validate_structure(net: Network) -> ValidationReport:
    """Referential and rotation consistency only (no embedding check).

    Sufficient for the purely graph-theoretic solvers; the star-mesh and
    K4 rewrites legitimately produce networks that fail the disk
    embedding test while passing this one.
    """
    problems = []
    seen = set()
    for v in net.vertices:
        if v in seen:
            problems.append(f"vertex {v!r} listed twice")
        seen.add(v)
    eids = set()
    for e in net.edges:
        if e.id in eids:
            problems.append(f"edge id {e.id!r} duplicated")
        eids.add(e.id)
        for endpoint in (e.u, e.v):
            if endpoint not in seen:
                problems.append(f"dangling endpoint: edge {e.id!r} references {endpoint!r}")
    for eid in net.conductances:
        if eid not in eids:
            problems.append(f"conductance given for unknown edge {eid!r}")
    for v in net.rotations:
        if v not in seen:
            problems.append(f"rotation given for unknown vertex {v!r}")
    if problems:
        return ValidationReport(False, problems)

    # Every incident end exactly once in its vertex's rotation.
    want = {}
    for e in net.edges:
        want.setdefault(e.u, []).append((e.id, "a"))
        want.setdefault(e.v, []).append((e.id, "b"))
    for v in net.vertices:
        have = list(net.rotations.get(v, ()))
        expect = want.get(v, [])
        if sorted(have) != sorted(expect):
            problems.append(
                f"rotation of {v!r} lists {sorted(have)} but incident ends are {sorted(expect)}"
            )
    return ValidationReport(not problems, problems)


def validate_network(net: Network) -> ValidationReport:
    """Full validation: structure plus the genus-0 disk embedding check."""
    report = validate_structure(net)
    if not report.ok:
        return report
    problems = []
    if not net.boundary and (net.interior or net.edges):
        problems.append("nonempty network with no boundary vertices")
    for v in net.vertices:
        # isolated vertices are unrepresentable in the medial picture
        if net.degree(v) == 0:
            problems.append(f"isolated vertex {v!r} (degree 0)")
    if problems:
        return ValidationReport(False, problems)

    if not net.vertices:
        return ValidationReport(True, [])

    # Disk embedding: augmented graph connected and Euler count 2.
    try:
        inner, outer = augmented_faces(net)
    except (InconsistentRotation, InvalidNetwork) as exc:
        return ValidationReport(False, [str(exc)])
    nfaces = len(inner) + (1 if outer is not None else 0)
    nedges = len(net.edges) + _arc_count(net)
    if not _augmented_connected(net):
        problems.append("augmented graph is disconnected (component away from the rim)")
    elif len(net.vertices) - nedges + nfaces != 2:
        problems.append(
            f"Euler check failed: V-E+F = {len(net.vertices)}-{nedges}+{nfaces} != 2"
        )
    return ValidationReport(not problems, problems)


def _augmented_connected(net: Network) -> bool:
    verts = set(net.vertices)
    if not verts:
        return True
    adj = {v: set() for v in verts}
    for e in net.edges:
        adj[e.u].add(e.v)
        adj[e.v].add(e.u)
    n = len(net.boundary)
    for i in range(n):
        adj[net.boundary[i]].add(net.boundary[(i + 1) % n])
        adj[net.boundary[(i + 1) % n]].add(net.boundary[i])
    start = next(iter(sorted(verts)))
    stack, seen = [start], {start}
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == verts


def components(net: Network) -> list[set]:
    """Connected components of the bare network (no rim arcs)."""
    adj = {v: set() for v in net.vertices}
    for e in net.edges:
        adj[e.u].add(e.v)
        adj[e.v].add(e.u)
    out = []
    seen = set()
    for v in sorted(adj):
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        seen.add(v)
        while stack:
            x = stack.pop()
            for w in adj[x]:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        out.append(comp)
    return out
