"""Information propagation over medial-graph cells.

A cellset's rank counts labelling degrees of freedom: its size minus the
number of crossings all four of whose surrounding cells lie inside.  A
simple extension adds the fourth cell around a crossing that already has
the other three; it is safe when only one crossing forces the new value.
Closure iterates simple extensions to a fixpoint.  Safe sets (closure
preserves rank) are exactly the ones whose labellings extend uniquely,
which is what makes boundary measurements propagate inward.

Convexity is the halfplane picture on critical graphs: a set is convex
iff whenever it loses a neighbor across some geodesic it lies entirely on
one side of that geodesic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import Inconsistent, NoSuchCell, NotCritical, NotSafe
from .medial import MedialGraph, ensure_critical

CONSISTENCY_TOL = 1e-9


def rank(m: MedialGraph, cells) -> int:
    s = frozenset(cells)
    surrounded = sum(1 for q in m.crossings.values() if all(c in s for c in q.cells))
    return len(s) - surrounded


@dataclass(frozen=True)
class ClosureResult:
    cells: frozenset
    trace: tuple  # (crossing id, added cell) in the order applied
    safe: bool


def _holders(m):
    """cell -> tuple of (crossing id, slot multiplicity), cached per graph."""
    h = m._cache.get("holders")
    if h is None:
        h = {}
        for xid in sorted(m.crossings):
            counts = {}
            for c in m.crossings[xid].cells:
                counts[c] = counts.get(c, 0) + 1
            for c, k in counts.items():
                h.setdefault(c, []).append((xid, k))
        h = {c: tuple(v) for c, v in h.items()}
        m._cache["holders"] = h
    return h


def closure(m: MedialGraph, cells) -> ClosureResult:
    """Least closed superset, the extension chain used, and safety.

    Worklist over crossings keyed by how many of their four cell slots
    are labelled; a crossing with exactly three forces its fourth cell.
    """
    import heapq

    current = set(cells)
    holders = _holders(m)
    count = {}
    heap = []
    for xid in m.crossings:
        q = m.crossings[xid].cells
        count[xid] = sum(1 for c in q if c in current)
        if count[xid] == 3:
            heapq.heappush(heap, xid)
    trace = []
    safe = True
    while heap:
        xid = heapq.heappop(heap)
        if count[xid] != 3:
            continue
        q = m.crossings[xid].cells
        new = next(c for c in q if c not in current)
        # unsafe when a second crossing forces the same cell right now
        for x, _k in holders.get(new, ()):
            if x != xid and count[x] == 3:
                safe = False
                break
        current.add(new)
        trace.append((xid, new))
        for x, k in holders.get(new, ()):
            count[x] += k
            if count[x] == 3:
                heapq.heappush(heap, x)
    return ClosureResult(frozenset(current), tuple(trace), safe)


def is_safe(m: MedialGraph, cells) -> bool:
    return rank(m, closure(m, cells).cells) == rank(m, cells)


def connected(m: MedialGraph, cells) -> bool:
    s = frozenset(cells)
    if not s:
        return True
    adj = m.adjacency()
    start = min(s)
    seen = {start}
    stack = [start]
    while stack:
        c = stack.pop()
        for d in adj[c]:
            if d in s and d not in seen:
                seen.add(d)
                stack.append(d)
    return seen == s


def is_convex(m: MedialGraph, cells) -> bool:
    """Halfplane test: every boundary edge of the set points one way."""
    ensure_critical(m)
    s = frozenset(cells)
    for eid, pair in m._edge_cells().items():
        inside = pair & s
        if len(inside) != 1:
            continue
        a = next(iter(inside))
        g = m.edge_geodesic(eid)
        side_a, side_b = m.sides(g)
        keep = side_a if a in side_a else side_b
        if not s <= keep:
            return False
    return True


def convex_closure(m: MedialGraph, cells) -> frozenset:
    ensure_critical(m)
    s = frozenset(cells)
    out = frozenset(m.cells)
    if not s:
        return s
    for g in m.geodesics:
        side_a, side_b = m.sides(g.index)
        if s <= side_a:
            out &= side_a
        elif s <= side_b:
            out &= side_b
    return out


def separating_geodesics(m: MedialGraph, cells) -> tuple[int, ...]:
    """Geodesics with cells of the set on both sides."""
    ensure_critical(m)
    s = frozenset(cells)
    out = []
    for g in m.geodesics:
        side_a, _ = m.sides(g.index)
        hit = s & side_a
        if hit and hit != s:
            out.append(g.index)
    return tuple(out)


def dist(m: MedialGraph, a: str, b: str) -> int:
    if a not in m.cells or b not in m.cells:
        raise NoSuchCell(f"{a!r} or {b!r}")
    if a == b:
        return 0
    adj = m.adjacency()
    frontier = {a}
    seen = {a}
    d = 0
    while frontier:
        d += 1
        nxt = set()
        for c in frontier:
            for e in adj[c]:
                if e == b:
                    return d
                if e not in seen:
                    seen.add(e)
                    nxt.add(e)
        frontier = nxt
    raise NoSuchCell(f"no path between {a!r} and {b!r}")


def dist_sep(m: MedialGraph, a: str, b: str) -> int:
    """Number of geodesics separating the two cells."""
    ensure_critical(m)
    n = 0
    for g in m.geodesics:
        side_a, _ = m.sides(g.index)
        if (a in side_a) != (b in side_a):
            n += 1
    return n


# -- labellings ---------------------------------------------------------------


class NetworkGamma:
    """Crossing equation functions taken from a network's conductances."""

    def __init__(self, net, m: MedialGraph):
        self._specs = {}
        for xid, quad in m.crossings.items():
            if quad.net_edge is None:
                raise NoSuchCell(f"crossing {xid} carries no network edge")
            self._specs[xid] = net.conductances[quad.net_edge]

    def value(self, xid: str, x: float) -> float:
        return self._specs[xid](x)

    def inverse(self, xid: str, y: float) -> float:
        return self._specs[xid].inverse(y)


def check_labelling(m: MedialGraph, labels: dict, gamma, tol=CONSISTENCY_TOL, relative=False):
    """Raise Inconsistent if a fully-labelled crossing violates its equation."""
    for xid in sorted(m.crossings):
        q = m.crossings[xid].cells
        if not all(c in labels for c in q):
            continue
        lhs = labels[q[3]] - labels[q[1]]
        rhs = gamma.value(xid, labels[q[0]] - labels[q[2]])
        lim = tol * max(1.0, abs(lhs), abs(rhs)) if relative else tol
        if abs(lhs - rhs) > lim:
            raise Inconsistent(
                f"crossing {xid}: {lhs} != gamma({labels[q[0]] - labels[q[2]]}) = {rhs}"
            )


def propagate(m: MedialGraph, labels: dict, gamma, strict=True) -> dict:
    """Unique extension of a labelling of a safe set to its closure.

    Each chain step solves the crossing equation for its one unknown cell,
    through gamma or its inverse depending on the unknown's color.  In
    strict mode a step forced by two crossings at once raises NotSafe
    (uniqueness holds there, existence is not guaranteed).  Non-strict
    mode instead verifies every over-determined equation on the final
    labelling, which lets a measurement oracle accept redundant but
    consistent values.
    """
    for c in labels:
        if c not in m.cells:
            raise NoSuchCell(repr(c))
    check_labelling(m, labels, gamma)
    res = closure(m, frozenset(labels))
    if strict and not res.safe:
        raise NotSafe("a propagation step is forced by two crossings at once")
    out = dict(labels)
    for xid, new in res.trace:
        q = m.crossings[xid].cells
        k = next(i for i in range(4) if q[i] == new)
        if k == 3:
            val = out[q[1]] + gamma.value(xid, out[q[0]] - out[q[2]])
        elif k == 1:
            val = out[q[3]] - gamma.value(xid, out[q[0]] - out[q[2]])
        elif k == 0:
            val = out[q[2]] + gamma.inverse(xid, out[q[3]] - out[q[1]])
        else:
            val = out[q[0]] - gamma.inverse(xid, out[q[3]] - out[q[1]])
        out[new] = val
    check_labelling(m, out, gamma, relative=True)
    return out


# -- recovery boundary sets ----------------------------------------------------


@dataclass(frozen=True)
class RecoverySets:
    S: frozenset
    T: frozenset
    halfplane: frozenset  # closure of T: the far side of the geodesic


def build_recovery_sets(m: MedialGraph, b: str, geo_index: int) -> RecoverySets:
    """Boundary sets driving one conductance readout.

    T seeds the far side of the geodesic (its closure is exactly that
    halfplane); S additionally contains b and enough further boundary
    cells, swept counterclockwise, to close over the whole graph while
    staying safe.
    """
    ensure_critical(m)
    if b not in m.boundary_cells:
        raise NoSuchCell(f"{b!r} is not a boundary cell")
    g = m.geodesics[geo_index]
    if not any(b in m.edge_cells(e) for e in g.edges):
        raise NoSuchCell(f"geodesic {geo_index} does not bound cell {b!r}")
    side_a, side_b = m.sides(geo_index)
    half = side_b if b in side_a else side_a

    npos = len(m.arcs)
    in_half = [m.arcs[p] in half for p in range(npos)]
    if not any(in_half):
        raise NoSuchCell(f"far side of geodesic {geo_index} has no boundary cells")
    start = next(p for p in range(npos) if in_half[p] and not in_half[(p - 1) % npos])
    candidates = []
    for k in range(npos):
        p = (start + k) % npos
        if in_half[p] and m.arcs[p] not in candidates:
            candidates.append(m.arcs[p])

    t_set = {candidates[0]}
    cur = closure(m, t_set).cells
    while True:
        nxt = next((a for a in candidates if a not in cur), None)
        if nxt is None:
            break
        t_set.add(nxt)
        cur = closure(m, t_set).cells
    if cur != half:
        raise NotSafe(f"halfplane sweep closed over {len(cur)} cells, expected {len(half)}")

    s_set = set(t_set)
    s_set.add(b)
    cur = closure(m, s_set).cells
    b_pos = next(p for p in range(npos) if m.arcs[p] == b)
    all_cells = frozenset(m.cells)
    for k in range(npos):
        if cur == all_cells:
            break
        p = (b_pos + 1 + k) % npos
        c = m.arcs[p]
        if c not in cur:
            s_set.add(c)
            cur = closure(m, s_set).cells
    if cur != all_cells:
        raise NotSafe("boundary sweep failed to close over the whole graph")
    if not is_safe(m, s_set):
        raise NotSafe("swept boundary set is not safe")
    return RecoverySets(frozenset(s_set), frozenset(t_set), half)
