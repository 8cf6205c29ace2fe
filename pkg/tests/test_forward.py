import math
import random

import numpy as np
import pytest

from cpnet.build import (
    attach_random_conductances,
    polygon,
    random_critical_shape,
    random_shape,
    series_pair,
    single_edge,
    star,
)
from cpnet.cells import build_recovery_sets
from cpnet.conductance import Linear, PwlOdd
from cpnet.errors import BadCurrentSum, NonMonotone, NotSafe, SingularInterior
from cpnet.forward import (
    boundary_currents,
    make_oracle,
    response_matrix,
    solve_dirichlet,
    solve_neumann,
)
from cpnet.medial import build_medial
from cpnet.network import BoundaryData, Edge, Network


def _volt(values):
    return BoundaryData("voltage", values)


def _curr(values):
    return BoundaryData("current", values)


def test_dirichlet_star(star3):
    currents, phi, state = solve_dirichlet(star3, _volt({"v1": 1.0, "v2": 0.0, "v3": 0.0}))
    assert math.isclose(phi["h"], 1 / 3, abs_tol=1e-12)
    bc = boundary_currents(star3, currents)
    assert math.isclose(bc["v1"], 2 / 3, abs_tol=1e-10)
    assert math.isclose(bc["v2"], -1 / 3, abs_tol=1e-10)
    assert state.residual < 1e-10


def test_dirichlet_zero_data(star3_123):
    currents, _, _ = solve_dirichlet(star3_123, _volt({"v1": 0.0, "v2": 0.0, "v3": 0.0}))
    assert max(abs(v) for v in currents.values()) == 0.0


def test_dirichlet_cubic_like_edge():
    # monotone piecewise-linear stand-in for a cubic: gamma(1) = 1
    spec = PwlOdd(((0.5, 0.125), (1.0, 1.0), (2.0, 8.0)), 12.0)
    net = single_edge(spec)
    currents, phi, _ = solve_dirichlet(net, _volt({"v1": 2.0, "v2": 1.0}))
    assert abs(currents["e1"] - 1.0) < 1e-6


def test_dirichlet_rejects_signed():
    net = single_edge(Linear(-1.0))
    with pytest.raises(NonMonotone):
        solve_dirichlet(net, _volt({"v1": 1.0, "v2": 0.0}))


def test_dirichlet_pseudopower_monotone(rng):
    net = random_shape(rng, 5, 8)
    net = attach_random_conductances(net, rng, "pwl")
    f = _volt({v: rng.uniform(-2, 2) for v in net.boundary})
    _, _, state = solve_dirichlet(net, f)
    hist = state.energy_history
    assert all(a >= b - 1e-10 for a, b in zip(hist, hist[1:]))


def test_dirichlet_current_uniqueness(rng):
    # two runs sweeping the coordinates in different orders agree on currents
    for _ in range(5):
        net = attach_random_conductances(random_shape(rng, 4, 7), rng, "pwl")
        f = _volt({v: rng.uniform(-2, 2) for v in net.boundary})
        c1, _, _ = solve_dirichlet(net, f, tol=1e-12)
        flipped = Network(
            net.boundary,
            tuple(reversed(net.interior)),
            net.edges,
            net.rotations,
            net.conductances,
        )
        c2, _, _ = solve_dirichlet(flipped, f, tol=1e-12)
        for eid in c1:
            assert abs(c1[eid] - c2[eid]) < 1e-8


def test_response_examples(star3, edge_c5):
    lam = response_matrix(edge_c5)
    assert np.allclose(lam, [[5.0, -5.0], [-5.0, 5.0]])
    lam = response_matrix(star3)
    assert np.allclose(lam, np.full((3, 3), -1 / 3) + np.eye(3))
    lam = response_matrix(series_pair(2.0, 2.0))
    assert np.allclose(lam, [[1.0, -1.0], [-1.0, 1.0]])


def test_response_row_sums(rng):
    for _ in range(10):
        net = attach_random_conductances(random_shape(rng, 5, 9), rng, "linear")
        lam = response_matrix(net)
        assert np.max(np.abs(lam.sum(axis=1))) < 1e-10
        assert np.allclose(lam, lam.T)


def test_response_singular_interior():
    net = series_pair(1.0, -1.0)
    with pytest.raises(SingularInterior):
        response_matrix(net)


def test_dirichlet_matches_response(rng):
    for _ in range(10):
        net = attach_random_conductances(random_shape(rng, 5, 8), rng, "linear")
        lam = response_matrix(net)
        f = {v: rng.uniform(-2, 2) for v in net.boundary}
        currents, _, _ = solve_dirichlet(net, _volt(f))
        bc = boundary_currents(net, currents)
        pred = lam @ np.array([f[v] for v in net.boundary])
        got = np.array([bc[v] for v in net.boundary])
        assert np.max(np.abs(pred - got)) < 1e-7


def test_neumann_single_edge():
    phi, flow = solve_neumann(single_edge(Linear(2.0)), _curr({"v1": 1.0, "v2": -1.0}))
    assert math.isclose(phi["v1"] - phi["v2"], 2.0, abs_tol=1e-12)


def test_neumann_star(star3):
    phi, flow = solve_neumann(star3, _curr({"v1": 2.0, "v2": -1.0, "v3": -1.0}))
    ref = phi["h"]
    assert math.isclose(phi["v1"] - ref, 2.0, abs_tol=1e-9)
    assert math.isclose(phi["v2"] - ref, -1.0, abs_tol=1e-9)
    # least-id vertex of the component pinned to zero
    assert phi[min(phi)] == 0.0


def test_neumann_bad_sum(star3):
    with pytest.raises(BadCurrentSum):
        solve_neumann(star3, _curr({"v1": 1.0, "v2": 0.0, "v3": 0.0}))


def test_neumann_cycle_condition(rng):
    from cpnet.network import components

    for _ in range(5):
        net = attach_random_conductances(random_shape(rng, 5, 9), rng, "pwl")
        f = {v: rng.uniform(-2, 2) for v in net.boundary}
        for comp in components(net):
            bs = sorted(comp & set(net.boundary))
            f[bs[0]] -= sum(f[v] for v in bs)
        phi, flow = solve_neumann(net, _curr(f))
        # compatibility: potential drops reproduce the flows on every edge
        for e in net.edges:
            drop = phi[e.u] - phi[e.v]
            assert abs(drop - net.conductances[e.id](flow[e.id])) < 1e-8
        bc = {v: 0.0 for v in net.boundary}
        for e in net.edges:
            if e.u in bc:
                bc[e.u] += flow[e.id]
            if e.v in bc:
                bc[e.v] -= flow[e.id]
        for v in net.boundary:
            assert abs(bc[v] - f[v]) < 1e-9


def test_neumann_disconnected_components():
    # two disjoint edges share the rim; currents balance per component
    edges = (Edge("e1", "v1", "v2"), Edge("e2", "v3", "v4"))
    rot = {
        "v1": (("e1", "a"),),
        "v2": (("e1", "b"),),
        "v3": (("e2", "a"),),
        "v4": (("e2", "b"),),
    }
    net = Network(("v1", "v3", "v2", "v4"), (), edges, rot, {"e1": Linear(1.0), "e2": Linear(2.0)})
    phi, flow = solve_neumann(net, _curr({"v1": 1.0, "v2": -1.0, "v3": 2.0, "v4": -2.0}))
    assert math.isclose(phi["v1"] - phi["v2"], 1.0, abs_tol=1e-9)
    assert math.isclose(phi["v3"] - phi["v4"], 4.0, abs_tol=1e-9)
    with pytest.raises(BadCurrentSum):
        solve_neumann(net, _curr({"v1": 1.0, "v2": -2.0, "v3": 2.0, "v4": -1.0}))


def test_duality_roundtrip(rng):
    # dirichlet then neumann with reciprocal edge functions returns the
    # boundary voltages up to one additive constant
    for _ in range(8):
        net = attach_random_conductances(random_shape(rng, 5, 8), rng, "linear")
        from cpnet.network import components

        if len(components(net)) != 1:
            continue
        f = {v: rng.uniform(-2, 2) for v in net.boundary}
        currents, _, _ = solve_dirichlet(net, _volt(f))
        bc = boundary_currents(net, currents)
        resist = net.with_conductances(
            {e.id: Linear(1.0 / net.conductances[e.id].c) for e in net.edges}
        )
        phi, _ = solve_neumann(resist, _curr(bc))
        shifts = [phi[v] - f[v] for v in net.boundary]
        assert max(shifts) - min(shifts) < 1e-7


def test_oracle_zero_query(star3_123):
    m = build_medial(star3_123)
    orc = make_oracle(star3_123, m)
    rs = build_recovery_sets(m, sorted(m.boundary_cells)[0], 0)
    ans = orc.query({c: 0.0 for c in rs.S})
    assert max(abs(v) for v in ans.values()) == 0.0


def test_oracle_unsafe_rejected(star3_123):
    m = build_medial(star3_123)
    orc = make_oracle(star3_123, m)
    with pytest.raises(NotSafe):
        orc.query({sorted(m.boundary_cells)[0]: 1.0})


def test_oracle_superset_consistency(star3_123, rng):
    m = build_medial(star3_123)
    orc = make_oracle(star3_123, m)
    rs = build_recovery_sets(m, sorted(m.boundary_cells)[0], 0)
    vals = {c: rng.uniform(-1, 1) for c in rs.S}
    ans = orc.query(vals)
    sup = dict(vals)
    for c in sorted(ans):
        sup[c] = ans[c]
    again = orc.query(sup)
    assert all(abs(again[c] - ans[c]) <= 1e-9 for c in ans)


def test_oracle_signed_and_nonmonotone(rng):
    # propagation never minimizes anything, so signed specs just work
    net = star(3, [Linear(-2.0), PwlOdd(((1.0, -1.0),), -2.0), Linear(3.0)])
    m = build_medial(net)
    orc = make_oracle(net, m)
    rs = build_recovery_sets(m, sorted(m.boundary_cells)[0], 0)
    vals = {c: rng.uniform(-1, 1) for c in rs.S}
    ans = orc.query(vals)
    assert all(math.isfinite(v) for v in ans.values())


def test_oracle_matches_response_via_dictionary(rng):
    """Boundary labellings translate to (voltage, current) pairs that the
    response matrix must reproduce: currents are differences of the face
    values flanking each vertex."""
    for _ in range(8):
        net = attach_random_conductances(random_critical_shape(rng, 4, 5), rng, "linear")
        m = build_medial(net)
        orc = make_oracle(net, m)
        b = sorted(m.boundary_cells)[0]
        geos = [g.index for g in m.geodesics if any(b in m.edge_cells(e) for e in g.edges)]
        rs = build_recovery_sets(m, b, geos[0])
        vals = {c: rng.uniform(-1, 1) for c in rs.S}
        ans = orc.query(vals)

        lam = response_matrix(net)
        u = np.array([ans[f"v:{v}"] for v in net.boundary])
        pred = lam @ u
        npos = len(m.arcs)
        for i, v in enumerate(net.boundary):
            pos = next(p for p in range(npos) if m.arcs[p] == f"v:{v}")
            before = ans[m.arcs[(pos - 1) % npos]]
            after = ans[m.arcs[(pos + 1) % npos]]
            assert abs((before - after) - pred[i]) < 1e-8
