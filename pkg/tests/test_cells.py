import itertools
import random

import pytest

from cpnet.arrangements import enumerate_critical
from cpnet.build import random_critical_shape, single_edge, star
from cpnet.cells import (
    NetworkGamma,
    build_recovery_sets,
    closure,
    connected,
    convex_closure,
    dist,
    dist_sep,
    is_convex,
    is_safe,
    propagate,
    rank,
    separating_geodesics,
)
from cpnet.conductance import Linear, PwlOdd
from cpnet.errors import Inconsistent, NoSuchCell, NotSafe
from cpnet.medial import build_medial


def test_rank_examples(star3):
    m = build_medial(star3)
    assert rank(m, frozenset()) == 0
    # all seven cells surround all three crossings: 7 - 3; this also
    # matches one-plus-geodesics for the (convex) full set
    assert rank(m, frozenset(m.cells)) == 4


def test_rank_seven_cells_one_crossing():
    # a cellset in the style of the worked rank example: seven cells, one
    # surrounded crossing, rank six
    for m in enumerate_critical(4):
        if len(m.colors) < 8:
            continue
        for xid in sorted(m.crossings):
            base = set(m.crossings[xid].cells)
            others = [c for c in sorted(m.cells) if c not in base]
            for extra in itertools.combinations(others, 3):
                s = base | set(extra)
                surrounded = sum(
                    1 for q in m.crossings.values() if all(c in s for c in q.cells)
                )
                if surrounded == 1:
                    assert rank(m, s) == 6
                    return
    pytest.fail("no seven-cell example found")


def test_closure_simple_extension(star3):
    m = build_medial(star3)
    q = m.crossings["e1"].cells
    res = closure(m, frozenset(q[:3]))
    assert q[3] in res.cells
    assert res.safe


def test_closure_already_closed(star3):
    m = build_medial(star3)
    allc = frozenset(m.cells)
    res = closure(m, allc)
    assert res.cells == allc and res.trace == () and res.safe


def test_closure_single_edge_hand_fixpoint():
    m = build_medial(single_edge(Linear(1.0)))
    side_a, side_b = m.sides(0)
    s = set(side_a) | {sorted(side_b)[0]}
    res = closure(m, s)
    assert res.cells == frozenset(m.cells)
    assert rank(m, s) == 3 and rank(m, res.cells) == 3
    assert is_safe(m, s)


def test_convexity_basics(star3):
    m = build_medial(star3)
    for c in sorted(m.cells):
        assert is_convex(m, {c})
        assert convex_closure(m, {c}) == frozenset({c})
    side_a, side_b = m.sides(0)
    assert is_convex(m, side_a) and is_convex(m, side_b)
    # two adjacent cells: their convex closure is just the pair
    a = sorted(m.cells)[0]
    b = sorted(m.adjacency()[a])[0]
    assert convex_closure(m, {a, b}) == frozenset({a, b})


def test_distance_examples(star3):
    m = build_medial(star3)
    cells = sorted(m.cells)
    for a in cells:
        assert dist(m, a, a) == 0
    for a in cells:
        for b in m.adjacency()[a]:
            assert dist(m, a, b) == 1 and dist_sep(m, a, b) == 1
    assert max(dist(m, a, b) for a in cells for b in cells) == 3


def test_dist_matches_sep_on_corpus():
    for m in enumerate_critical(3):
        cells = sorted(m.cells)
        for a in cells:
            for b in cells:
                assert dist(m, a, b) == dist_sep(m, a, b)


def test_rank_and_extension_lemma_exhaustive():
    # rank(S + x) = rank(S) + 1 unless simple extension; equality iff safe
    for m in enumerate_critical(3):
        cells = sorted(m.cells)
        if len(cells) > 9:
            continue
        for bits in range(2 ** len(cells)):
            s = frozenset(c for k, c in enumerate(cells) if bits >> k & 1)
            r = rank(m, s)
            for x in cells:
                if x in s:
                    continue
                s2 = s | {x}
                determining = [
                    xid
                    for xid, q in m.crossings.items()
                    if x in q.cells
                    and sum(1 for c in q.cells if c in s) == 3
                    and sum(1 for c in q.cells if c == x and c not in s) == 1
                ]
                r2 = rank(m, s2)
                if not determining:
                    assert r2 == r + 1
                elif len(determining) == 1:
                    assert r2 == r
                else:
                    assert r2 < r + 1


def test_propagate_examples():
    net = single_edge(Linear(5.0))
    m = build_medial(net)
    q = m.crossings["e1"].cells
    gam = NetworkGamma(net, m)
    labels = {q[0]: 1.0, q[2]: 0.0, q[1]: 0.0}
    out = propagate(m, labels, gam)
    assert out[q[3]] == 5.0

    netp = single_edge(PwlOdd(((1.0, 2.0),), 1.0))
    out = propagate(m, labels, NetworkGamma(netp, m))
    assert out[q[3]] == 2.0


def test_propagate_full_labelling_unchanged(star3_123):
    m = build_medial(star3_123)
    gam = NetworkGamma(star3_123, m)
    labels = {c: 0.0 for c in m.cells}
    assert propagate(m, labels, gam) == labels


def test_propagate_superset_consistency(star3_123):
    m = build_medial(star3_123)
    gam = NetworkGamma(star3_123, m)
    rs = build_recovery_sets(m, sorted(m.boundary_cells)[0], 0)
    labels = {c: (0.3 if c == sorted(rs.S)[0] else 0.0) for c in rs.S}
    full = propagate(m, labels, gam)
    # feeding some derived values back in must not change the answer
    # (checked-consistency mode: the strict mode treats the doubly forced
    # steps this creates as NotSafe)
    extra = dict(labels)
    for c in sorted(full)[:3]:
        extra[c] = full[c]
    again = propagate(m, extra, gam, strict=False)
    assert all(abs(again[c] - full[c]) <= 1e-9 for c in full)


def test_propagate_inconsistent_rejected(star3_123):
    m = build_medial(star3_123)
    gam = NetworkGamma(star3_123, m)
    q = m.crossings["e1"].cells
    labels = {q[0]: 1.0, q[1]: 0.0, q[2]: 0.0, q[3]: 99.0}
    with pytest.raises(Inconsistent):
        propagate(m, labels, gam)


def test_propagate_unsafe_rejected():
    # two crossings sharing the same four cells (a closed 2-lens): with
    # three cells labelled, both crossings force the fourth at once
    from cpnet.medial import MedialGraph

    m = MedialGraph.from_components(
        {"x1": ("a", "b", "c", "d"), "x2": ("a", "d", "c", "b")},
        {
            0: (("x", "x1", 0), ("x", "x2", 3)),
            1: (("x", "x1", 1), ("x", "x2", 2)),
            2: (("x", "x1", 2), ("x", "x2", 1)),
            3: (("x", "x1", 3), ("x", "x2", 0)),
        },
        (),
        (),
    )

    class G:
        def value(self, xid, x):
            return x

        def inverse(self, xid, y):
            return y

    with pytest.raises(NotSafe):
        propagate(m, {"a": 1.0, "b": 0.0, "d": 0.0}, G())


def test_recovery_sets_single_edge():
    m = build_medial(single_edge(Linear(1.0)))
    q = m.crossings["e1"].cells
    rs = build_recovery_sets(m, q[0], 0)
    assert rs.T == rs.halfplane
    assert q[0] in rs.S and q[0] not in rs.T
    assert closure(m, rs.S).cells == frozenset(m.cells)
    assert is_safe(m, rs.S)


def test_recovery_sets_postconditions_on_randoms(rng):
    for _ in range(12):
        net = random_critical_shape(rng, rng.randint(3, 6), rng.randint(2, 8))
        m = build_medial(net)
        b = sorted(m.boundary_cells)[0]
        geos = [g.index for g in m.geodesics if any(b in m.edge_cells(e) for e in g.edges)]
        rs = build_recovery_sets(m, b, geos[0])
        assert rs.T <= rs.S
        assert b in rs.S - rs.T
        assert closure(m, rs.T).cells == rs.halfplane
        assert closure(m, rs.S).cells == frozenset(m.cells)
        assert is_safe(m, rs.S)
        assert all(c in m.boundary_cells for c in rs.S)


def test_recovery_sets_bad_cell(star3):
    m = build_medial(star3)
    with pytest.raises(NoSuchCell):
        build_recovery_sets(m, "v:h", 0)  # interior cell


def test_characterize_closedness():
    for m in enumerate_critical(3):
        cells = sorted(m.cells)
        if len(cells) > 9:
            continue
        for bits in range(2 ** len(cells)):
            s = frozenset(c for k, c in enumerate(cells) if bits >> k & 1)
            closed = closure(m, s).cells == s
            comps = _components(m, s)
            assert closed == all(is_convex(m, comp) for comp in comps)


def _components(m, s):
    adj = m.adjacency()
    seen = set()
    out = []
    for c in sorted(s):
        if c in seen:
            continue
        comp = {c}
        stack = [c]
        seen.add(c)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in s and y not in seen:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        out.append(frozenset(comp))
    return out


def test_convex_connected_and_rank_formula():
    for m in enumerate_critical(3):
        cells = sorted(m.cells)
        if len(cells) > 9:
            continue
        for bits in range(1, 2 ** len(cells)):
            s = frozenset(c for k, c in enumerate(cells) if bits >> k & 1)
            if not is_convex(m, s):
                continue
            assert connected(m, s)
            assert rank(m, s) == 1 + len(separating_geodesics(m, s))
