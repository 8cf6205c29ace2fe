"""Forward boundary-value solvers and the boundary measurement oracle.

The voltage-driven problem is solved by minimizing the convex energy
Q(phi) = sum_e q_e(d phi) with q_e the antiderivative of the edge
function, via cyclic coordinate descent: each coordinate update is a
monotone one-dimensional root find confined to the box [-M, M] spanned
by the boundary data.  The current-driven problem minimizes the dual
energy over a fundamental cycle basis on top of a spanning-tree flow.

Signed or non-monotone (but bijective) conductances are never run
through the minimizers; they are served exactly by the propagation
oracle, which answers boundary-value queries on safe cellsets by
replaying the closure chain of the hidden network's medial graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cells import NetworkGamma, propagate
from .conductance import Linear, is_monotone_increasing
from .errors import (
    BadCurrentSum,
    InvalidNetwork,
    NoConvergence,
    NonMonotone,
    NotSafe,
    SingularInterior,
)
from .medial import MedialGraph, build_medial
from .network import BoundaryData, Network, components, validate_structure

KCL_TOL = 1e-10
NEUMANN_TOL = 1e-9
MAX_COORD_STEPS = 10**6


@dataclass
class SolverState:
    iterations: int
    residual: float
    energy: float
    energy_history: list = field(default_factory=list)


def _checked(net: Network, f: BoundaryData, role: str):
    if f.role != role:
        raise InvalidNetwork(f"expected {role!r} boundary data, got {f.role!r}")
    report = validate_structure(net)
    if not report.ok:
        raise InvalidNetwork("; ".join(report.problems))
    if set(f.values) != set(net.boundary):
        raise InvalidNetwork("boundary data must cover exactly the boundary vertices")
    for eid, spec in net.conductances.items():
        if not is_monotone_increasing(spec):
            raise NonMonotone(f"edge {eid!r} is not monotone increasing")
    if set(net.conductances) != {e.id for e in net.edges}:
        raise InvalidNetwork("every edge needs a conductance spec")


def _bisect(fn, lo, hi, flo, scale):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0.0 or (hi - lo) < 1e-16 * max(1.0, scale):
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _pseudopower(net: Network, phi) -> float:
    return sum(
        net.conductances[e.id].integral(phi[e.u] - phi[e.v]) for e in net.edges
    )


def solve_dirichlet(net: Network, f: BoundaryData, tol=KCL_TOL, max_steps=MAX_COORD_STEPS):
    """Currents and a potential matching the prescribed boundary voltages.

    Returns (currents, phi, SolverState); currents maps edge id to the
    flow along the edge's stored u->v orientation.  Current flow is
    uniquely determined even when the potential is not.
    """
    _checked(net, f, "voltage")
    big_m = max((abs(v) for v in f.values.values()), default=0.0)
    phi = {v: 0.0 for v in net.vertices}
    phi.update(f.values)

    incident = {v: [] for v in net.vertices}
    for e in net.edges:
        if e.u == e.v:
            continue  # self-loops carry no current
        incident[e.u].append((e.id, e.v))
        incident[e.v].append((e.id, e.u))
    interior = sorted(net.interior)
    specs = net.conductances

    def outflow(v, t):
        # odd edge functions make the outgoing current direction-free
        return sum(specs[eid](t - phi[other]) for eid, other in incident[v])

    def update(v):
        inc = incident[v]
        if not inc:
            return
        if all(isinstance(specs[eid], Linear) for eid, _ in inc):
            num = sum(specs[eid].c * phi[other] for eid, other in inc)
            den = sum(specs[eid].c for eid, _ in inc)
            phi[v] = num / den
            return
        # the minimizer stays inside the boundary-value box
        flo = outflow(v, -big_m)
        phi[v] = _bisect(lambda t: outflow(v, t), -big_m, big_m, flo, big_m)

    state = SolverState(0, float("inf"), 0.0)
    steps = 0
    while True:
        for v in interior:
            update(v)
            steps += 1
        res = max((abs(outflow(v, phi[v])) for v in interior), default=0.0)
        state.iterations = steps
        state.residual = res
        state.energy = _pseudopower(net, phi)
        state.energy_history.append(state.energy)
        if res < tol:
            break
        if steps >= max_steps:
            raise NoConvergence(f"KCL residual {res} after {steps} coordinate steps")

    currents = {
        e.id: (0.0 if e.u == e.v else specs[e.id](phi[e.u] - phi[e.v])) for e in net.edges
    }
    return currents, dict(phi), state


def boundary_currents(net: Network, currents: dict) -> dict:
    """Net current leaving the network at each boundary vertex."""
    out = {v: 0.0 for v in net.boundary}
    for e in net.edges:
        if e.u == e.v:
            continue
        if e.u in out:
            out[e.u] += currents[e.id]
        if e.v in out:
            out[e.v] -= currents[e.id]
    return out


def solve_neumann(net: Network, f: BoundaryData, tol=NEUMANN_TOL, max_steps=MAX_COORD_STEPS):
    """Potential (up to per-component constants) matching boundary currents.

    Edge functions are resistances here: voltage drop as a function of
    current.  The potential is normalized to 0 at the least vertex id of
    each connected component.  Returns (phi, currents).
    """
    _checked(net, f, "current")
    comps = components(net)
    for comp in comps:
        s = sum(f.values.get(v, 0.0) for v in comp)
        if abs(s) > NEUMANN_TOL:
            raise BadCurrentSum(f"component {sorted(comp)} has net current {s}")

    specs = net.conductances
    flow = {e.id: 0.0 for e in net.edges}
    adj = {v: [] for v in net.vertices}
    for e in net.edges:
        if e.u != e.v:
            adj[e.u].append((e.id, e.v))
            adj[e.v].append((e.id, e.u))

    parent = {}
    order = []
    tree_set = set()
    for comp in comps:
        root = min(comp)
        seen = {root}
        queue = [root]
        while queue:
            v = queue.pop(0)
            order.append(v)
            for eid, w in sorted(adj[v]):
                if w not in seen:
                    seen.add(w)
                    parent[w] = (eid, v)
                    tree_set.add(eid)
                    queue.append(w)

    # particular flow: each subtree's injected current leaves via its parent edge
    subtotal = {v: f.values.get(v, 0.0) for v in net.vertices}
    for v in reversed(order):
        if v not in parent:
            continue
        eid, p = parent[v]
        e = net.edge(eid)
        flow[eid] += subtotal[v] if e.u == v else -subtotal[v]
        subtotal[p] += subtotal[v]

    def path_to_root(v):
        out = []
        while v in parent:
            eid, p = parent[v]
            e = net.edge(eid)
            out.append((eid, +1 if e.u == v else -1))
            v = p
        return out

    cycles = []
    for e in net.edges:
        if e.id in tree_set or e.u == e.v:
            continue
        tally = {e.id: +1}
        for eid, sign in path_to_root(e.v):
            tally[eid] = tally.get(eid, 0) + sign
        for eid, sign in path_to_root(e.u):
            tally[eid] = tally.get(eid, 0) - sign
        cycles.append([(eid, s) for eid, s in sorted(tally.items()) if s != 0])

    def kvl(cyc, t):
        return sum(sign * specs[eid](flow[eid] + sign * t) for eid, sign in cyc)

    steps = 0
    scale = sum(abs(v) for v in f.values.values()) + 1.0
    while cycles:
        for cyc in cycles:
            span = scale + max(abs(flow[eid]) for eid, _ in cyc)
            lo, hi = -span, span
            flo, fhi = kvl(cyc, lo), kvl(cyc, hi)
            grow = 0
            while flo != 0.0 and fhi != 0.0 and (flo > 0) == (fhi > 0) and grow < 60:
                lo, hi = 2 * lo, 2 * hi
                flo, fhi = kvl(cyc, lo), kvl(cyc, hi)
                grow += 1
            t = _bisect(lambda t: kvl(cyc, t), lo, hi, flo, span)
            for eid, sign in cyc:
                flow[eid] += sign * t
            steps += 1
        # residuals must be taken after the sweep: cycles share edges
        worst = max(abs(kvl(cyc, 0.0)) for cyc in cycles)
        if worst < tol:
            break
        if steps >= max_steps:
            raise NoConvergence(f"cycle residual {worst} after {steps} updates")

    phi = {}
    for comp in comps:
        root = min(comp)
        phi[root] = 0.0
        queue = [root]
        while queue:
            v = queue.pop(0)
            for eid, w in adj[v]:
                if eid not in tree_set or w in phi:
                    continue
                e = net.edge(eid)
                drop = specs[eid](flow[eid])  # phi(u) - phi(v)
                phi[w] = phi[v] - drop if e.u == v else phi[v] + drop
                queue.append(w)
    return phi, dict(flow)


def response_matrix(net: Network) -> np.ndarray:
    """Dirichlet-to-Neumann matrix of a linear network via Schur complement.

    Pure Kirchhoff algebra: needs structural validity only, so it also
    serves the deliberately non-planar star-mesh and K4 outputs."""
    report = validate_structure(net)
    if not report.ok:
        raise InvalidNetwork("; ".join(report.problems))
    for e in net.edges:
        spec = net.conductances.get(e.id)
        if not isinstance(spec, Linear):
            raise NonMonotone(f"response matrix needs linear conductances (edge {e.id!r})")
    order = list(net.boundary) + sorted(net.interior)
    idx = {v: i for i, v in enumerate(order)}
    n = len(order)
    k = np.zeros((n, n))
    for e in net.edges:
        if e.u == e.v:
            continue
        c = net.conductances[e.id].c
        i, j = idx[e.u], idx[e.v]
        k[i, i] += c
        k[j, j] += c
        k[i, j] -= c
        k[j, i] -= c
    nb = len(net.boundary)
    kbb, kbi, kii = k[:nb, :nb], k[:nb, nb:], k[nb:, nb:]
    if kii.size == 0:
        return kbb
    cond = np.linalg.cond(kii)
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularInterior(f"interior block condition number {cond:.3g}")
    return kbb - kbi @ np.linalg.solve(kii, kbi.T)


class BoundaryOracle:
    """Boundary-value queries against a hidden bijective network.

    ``query(values)`` takes a labelling of a safe cellset whose closure is
    the whole medial graph and returns the induced labelling of every
    boundary cell.  Propagation is exact: no monotonicity or continuity
    of the hidden conductances is used.
    """

    def __init__(self, medial: MedialGraph, gamma):
        self.medial = medial
        self._gamma = gamma

    def query(self, values: dict) -> dict:
        m = self.medial
        full = propagate(m, dict(values), self._gamma, strict=False)
        if len(full) != len(m.cells):
            raise NotSafe("query set does not close over the whole graph")
        return {c: full[c] for c in m.boundary_cells}


def make_oracle(net: Network, medial: MedialGraph | None = None) -> BoundaryOracle:
    """Simulated measurement oracle for a fully specified bijective network."""
    if set(net.conductances) != {e.id for e in net.edges}:
        raise InvalidNetwork("hidden network needs a conductance on every edge")
    for spec in net.conductances.values():
        spec.validate()
    m = medial if medial is not None else build_medial(net)
    return BoundaryOracle(m, NetworkGamma(net, m))
