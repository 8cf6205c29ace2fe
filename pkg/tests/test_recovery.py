import random

import pytest

from cpnet.build import (
    attach_random_conductances,
    parallel_pair,
    polygon,
    random_critical_shape,
    single_edge,
    star,
)
from cpnet.cells import NetworkGamma, build_recovery_sets
from cpnet.conductance import Linear, PwlOdd
from cpnet.errors import NotApex, NotRecoverable, ProbeInsufficient
from cpnet.forward import BoundaryOracle, make_oracle
from cpnet.medial import build_medial, find_boundary_features, uncross_with_record
from cpnet.recovery import (
    PwlFit,
    recover_apex,
    recover_network,
    wrap_uncrossed_oracle,
)


def test_recover_apex_single_edge_linear():
    hid = single_edge(Linear(5.0))
    m = build_medial(hid)
    samples = recover_apex(m, make_oracle(hid, m), "e1", [1.0])
    assert samples == [(1.0, 5.0)]


def test_recover_apex_single_edge_pwl():
    hid = single_edge(PwlOdd(((2.0, 3.0),), 1.0))
    m = build_medial(hid)
    samples = recover_apex(m, make_oracle(hid, m), "e1", [2.0])
    assert samples == [(2.0, 3.0)]


def test_recover_apex_rejects_zero_probe(edge_c5):
    m = build_medial(edge_c5)
    with pytest.raises(ValueError):
        recover_apex(m, make_oracle(edge_c5, m), "e1", [0.0])


def test_recover_apex_not_apex(edge_c5):
    m = build_medial(edge_c5)
    with pytest.raises(NotApex):
        recover_apex(m, make_oracle(edge_c5, m), "missing", [1.0])


def test_recover_network_star_examples():
    hid = star(3, [Linear(1.0), Linear(2.0), Linear(3.0)])
    res = recover_network(hid.without_conductances(), make_oracle(hid), [1.0], linear=True)
    assert res.slopes == {"e1": 1.0, "e2": 2.0, "e3": 3.0}

    hid = star(3, [Linear(1.0), Linear(-2.0), Linear(3.0)])
    res = recover_network(hid.without_conductances(), make_oracle(hid), [1.0], linear=True)
    assert res.slopes == {"e1": 1.0, "e2": -2.0, "e3": 3.0}


def test_recover_network_white_triangles_only(triangle_net):
    res = recover_network(
        triangle_net.without_conductances(), make_oracle(triangle_net), [1.0], linear=True
    )
    assert res.slopes == {"e1": 1.0, "e2": 2.0, "e3": 3.0}


def test_recover_parallel_edges_rejected():
    hid = parallel_pair(1.0, 2.0)
    with pytest.raises(NotRecoverable) as err:
        recover_network(hid.without_conductances(), make_oracle(hid), [1.0], linear=True)
    assert err.value.violation.kind == "DoubleCrossing"


def test_wrapped_oracle_matches_direct(rng):
    """After uncrossing an apex, the wrapped oracle must agree with a fresh
    propagation oracle on the uncrossed graph, on random safe queries."""
    for _ in range(5):
        hid = attach_random_conductances(
            random_critical_shape(rng, rng.randint(3, 5), rng.randint(2, 7)), rng, "linear", signed=True
        )
        m = build_medial(hid)
        feats = [f for f in find_boundary_features(m) if f.kind == "triangle"]
        if not feats:
            continue
        apex = feats[0].apex
        gamma = hid.conductances[m.crossings[apex].net_edge]
        base = make_oracle(hid, m)
        wrapped, m2 = wrap_uncrossed_oracle(base, m, apex, gamma)
        direct = BoundaryOracle(m2, NetworkGamma(hid, m2))
        for _q in range(20):
            b = rng.choice(sorted(m2.boundary_cells))
            geos = [
                g.index for g in m2.geodesics if any(b in m2.edge_cells(e) for e in g.edges)
            ]
            if not geos:
                continue
            rs = build_recovery_sets(m2, b, geos[0])
            vals = {c: rng.uniform(-2, 2) for c in rs.S}
            a1 = wrapped.query(vals)
            a2 = direct.query(vals)
            assert all(abs(a1[c] - a2[c]) < 1e-9 for c in a2)


def test_wrap_identity_when_probe_matches():
    # boundary values landing zero difference across the removed apex leave
    # answers untouched
    hid = star(3, [Linear(2.0), Linear(1.0), Linear(1.0)])
    m = build_medial(hid)
    base = make_oracle(hid, m)
    wrapped, m2 = wrap_uncrossed_oracle(base, m, "e1", Linear(2.0))
    rs = build_recovery_sets(m2, sorted(m2.boundary_cells)[0], 0)
    vals = {c: 0.0 for c in rs.S}
    ans = wrapped.query(vals)
    assert all(v == 0.0 for _, v in ans.items())


def test_wrap_to_empty_graph():
    hid = single_edge(Linear(4.0))
    m = build_medial(hid)
    base = make_oracle(hid, m)
    wrapped, m2 = wrap_uncrossed_oracle(base, m, "e1", Linear(4.0))
    assert len(m2.crossings) == 0
    # no crossings left: the query echoes its values on the surviving cells
    vals = {c: 0.5 for c in m2.boundary_cells}
    ans = wrapped.query(vals)
    assert all(ans[c] == 0.5 for c in m2.boundary_cells)


def test_pwl_fit_refuses_extrapolation():
    fit = PwlFit.from_samples([(1.0, 2.0), (2.0, 3.0)])
    assert fit(1.5) == 2.5
    assert fit(-1.0) == -2.0
    assert fit.inverse(2.5) == 1.5
    with pytest.raises(ProbeInsufficient):
        fit(2.5)
    with pytest.raises(ProbeInsufficient):
        fit.inverse(4.0)


def test_linear_roundtrip_small_suite(rng):
    for _ in range(30):
        shape = random_critical_shape(rng, rng.randint(3, 6), rng.randint(1, 9))
        hidden = attach_random_conductances(shape, rng, "linear", signed=True)
        res = recover_network(shape, make_oracle(hidden), [1.0], linear=True)
        assert set(res.slopes) == {e.id for e in shape.edges}
        for eid, c in res.slopes.items():
            truth = hidden.conductances[eid].c
            assert abs(c - truth) <= 1e-8 * abs(truth)


def test_pwl_roundtrip_small_suite(rng):
    for k in range(10):
        shape = random_critical_shape(rng, rng.randint(3, 6), rng.randint(1, 8))
        hidden = attach_random_conductances(shape, rng, "pwl", breakpoints=3, decreasing=(k % 3 == 2))
        probes = sorted({x for s in hidden.conductances.values() for x, _ in s.points})
        res = recover_network(shape, make_oracle(hidden), probes)
        for eid, pts in res.samples.items():
            spec = hidden.conductances[eid]
            assert [x for x, _ in pts] == probes
            for a, v in pts:
                assert abs(spec(a) - v) <= 1e-8 * max(1.0, abs(v))


def test_order_independence(rng):
    shape = random_critical_shape(rng, 5, 8)
    hidden = attach_random_conductances(shape, rng, "linear", signed=True)
    orc = make_oracle(hidden)
    r1 = recover_network(shape, orc, [1.0], linear=True)
    r2 = recover_network(
        shape, orc, [1.0], linear=True, triangle_choice=lambda t: max(t, key=lambda f: f.rim_position)
    )
    assert r1.log != r2.log or len(r1.log) <= 2
    for eid in r1.slopes:
        assert abs(r1.slopes[eid] - r2.slopes[eid]) <= 1e-8 * max(1.0, abs(r1.slopes[eid]))


def test_recovery_result_json(tmp_path):
    hid = star(3, [Linear(1.0), Linear(2.0), Linear(3.0)])
    res = recover_network(hid.without_conductances(), make_oracle(hid), [1.0], linear=True)
    out = res.to_json()
    assert out["e2"] == {"kind": "linear", "c": 2.0}
    hid2 = single_edge(PwlOdd(((1.0, 2.0),), 1.0))
    res2 = recover_network(hid2.without_conductances(), make_oracle(hid2), [1.0, 3.0])
    out2 = res2.to_json()
    assert out2["e1"]["kind"] == "pointwise"
    assert out2["e1"]["samples"] == [[1.0, 2.0], [3.0, 4.0]]
    res2.save(tmp_path / "r.json")
    assert (tmp_path / "r.json").exists()


def test_shape_conductances_ignored(rng):
    shape = random_critical_shape(rng, 4, 5)
    hidden = attach_random_conductances(shape, rng, "linear")
    decoy = attach_random_conductances(shape, rng, "linear")
    res = recover_network(decoy, make_oracle(hidden), [1.0], linear=True)
    for eid, c in res.slopes.items():
        assert abs(c - hidden.conductances[eid].c) <= 1e-9
