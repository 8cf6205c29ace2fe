"""Constructors for networks: canonical fixtures, growth moves, random nets.

The two growth moves mirror the classical generation of critical
circular planar networks: attaching a pendant edge at a boundary vertex
(pushing the old vertex inside), and adding an edge between two
consecutive boundary vertices along their shared rim arc.
"""

from __future__ import annotations

import random

from .conductance import ConductanceSpec, Linear, PwlOdd
from .network import Edge, Network


def star(n: int, specs=None) -> Network:
    """One interior hub joined to n boundary vertices."""
    edges = tuple(Edge(f"e{i}", f"v{i}", "h") for i in range(1, n + 1))
    rot = {f"v{i}": ((f"e{i}", "a"),) for i in range(1, n + 1)}
    rot["h"] = tuple((f"e{i}", "b") for i in range(1, n + 1))
    cond = dict(zip((e.id for e in edges), specs)) if specs else {}
    return Network(tuple(f"v{i}" for i in range(1, n + 1)), ("h",), edges, rot, cond)


def single_edge(spec: ConductanceSpec | None = None) -> Network:
    edges = (Edge("e1", "v1", "v2"),)
    rot = {"v1": (("e1", "a"),), "v2": (("e1", "b"),)}
    return Network(("v1", "v2"), (), edges, rot, {"e1": spec} if spec else {})


def series_pair(c1: float, c2: float) -> Network:
    """Two edges through one interior vertex: the classic unrecoverable shape."""
    edges = (Edge("e1", "v1", "w"), Edge("e2", "w", "v2"))
    rot = {"v1": (("e1", "a"),), "v2": (("e2", "b"),), "w": (("e1", "b"), ("e2", "a"))}
    return Network(("v1", "v2"), ("w",), edges, rot, {"e1": Linear(c1), "e2": Linear(c2)})


def parallel_pair(c1: float, c2: float) -> Network:
    edges = (Edge("e1", "v1", "v2"), Edge("e2", "v1", "v2"))
    rot = {"v1": (("e1", "a"), ("e2", "a")), "v2": (("e2", "b"), ("e1", "b"))}
    return Network(("v1", "v2"), (), edges, rot, {"e1": Linear(c1), "e2": Linear(c2)})


def polygon(n: int, specs=None) -> Network:
    """Cycle on n boundary vertices."""
    edges = tuple(Edge(f"e{i}", f"v{i}", f"v{(i % n) + 1}") for i in range(1, n + 1))
    rot = {}
    for i in range(1, n + 1):
        prev = f"e{((i - 2) % n) + 1}"
        rot[f"v{i}"] = ((f"e{i}", "a"), (prev, "b"))
    cond = dict(zip((e.id for e in edges), specs)) if specs else {}
    return Network(tuple(f"v{i}" for i in range(1, n + 1)), (), edges, rot, cond)


def series_match(c1: float, combined: float) -> float:
    """The partner conductance making a series pair reduce to `combined`."""
    if c1 == combined:
        raise ZeroDivisionError("series value equals the first conductance")
    return combined * c1 / (c1 - combined)


# -- growth moves -------------------------------------------------------------


def add_boundary_edge(net: Network, i: int, spec: ConductanceSpec, eid=None) -> Network:
    """New edge between boundary vertices i and i+1, hugging their rim arc."""
    n = len(net.boundary)
    if n < 2:
        raise ValueError("need at least two boundary vertices")
    u, v = net.boundary[i % n], net.boundary[(i + 1) % n]
    eid = eid or f"e{len(net.edges) + 1}"
    edges = net.edges + (Edge(eid, u, v),)
    rot = dict(net.rotations)
    rot[u] = ((eid, "a"),) + rot.get(u, ())
    rot[v] = rot.get(v, ()) + ((eid, "b"),)
    cond = dict(net.conductances)
    cond[eid] = spec
    return Network(net.boundary, net.interior, edges, rot, cond)


def add_boundary_spike(net: Network, i: int, spec: ConductanceSpec, eid=None) -> Network:
    """Push boundary vertex i inside and attach a fresh boundary vertex to it."""
    n = len(net.boundary)
    old = net.boundary[i % n]
    new = f"{old}'"
    while new in net.vertices:
        new += "'"
    eid = eid or f"e{len(net.edges) + 1}"
    edges = net.edges + (Edge(eid, new, old),)
    rot = dict(net.rotations)
    rot[new] = ((eid, "a"),)
    rot[old] = ((eid, "b"),) + rot.get(old, ())
    boundary = tuple(new if j == i % n else b for j, b in enumerate(net.boundary))
    cond = dict(net.conductances)
    cond[eid] = spec
    return Network(boundary, net.interior + (old,), edges, rot, cond)


def drop_isolated_boundary(net: Network) -> Network:
    boundary = tuple(v for v in net.boundary if net.degree(v) > 0)
    rot = {v: r for v, r in net.rotations.items() if v not in set(net.boundary) - set(boundary)}
    return Network(boundary, net.interior, net.edges, rot, net.conductances)


# -- random generation ---------------------------------------------------------


def random_linear(rng: random.Random, lo=0.1, hi=10.0, signed=False) -> Linear:
    c = rng.uniform(lo, hi)
    if signed and rng.random() < 0.5:
        c = -c
    return Linear(c)


def random_pwl(rng: random.Random, breakpoints=3, decreasing=False) -> PwlOdd:
    xs = sorted(rng.uniform(0.3, 3.0) for _ in range(breakpoints))
    # keep consecutive abscissae apart so segment slopes stay moderate
    for k in range(1, len(xs)):
        xs[k] = max(xs[k], xs[k - 1] + 0.25)
    y = 0.0
    pts = []
    for x, px in zip(xs, [0.0] + xs[:-1]):
        y += rng.uniform(0.25, 4.0) * (x - px)
        pts.append((x, y))
    terminal = rng.uniform(0.25, 4.0)
    if decreasing:
        pts = [(x, -v) for x, v in pts]
        terminal = -terminal
    return PwlOdd(tuple(pts), terminal)


def random_shape(rng: random.Random, n_boundary: int, n_edges: int) -> Network:
    """Random circular planar network grown by spike and rim-edge moves.

    Spikes on untouched boundary vertices would leave pendant interior
    tips (never recoverable), so spikes prefer vertices that already
    carry an edge.
    """
    net = Network(tuple(f"v{i}" for i in range(1, n_boundary + 1)), (), (), {}, {})
    for _ in range(n_edges):
        n = len(net.boundary)
        busy = [i for i in range(n) if net.degree(net.boundary[i]) > 0]
        if n >= 2 and (not busy or rng.random() < 0.55):
            net = add_boundary_edge(net, rng.randrange(n), Linear(1.0))
        else:
            net = add_boundary_spike(net, rng.choice(busy), Linear(1.0))
    return drop_isolated_boundary(net).without_conductances()


def random_critical_shape(rng: random.Random, n_boundary: int, n_edges: int) -> Network:
    """Random network kept recoverable move by move.

    A move that breaks semicriticality of the medial graph is rolled back
    and another is tried; gives up early when the rim is saturated (a
    critical net on n boundary vertices has at most n(n-1)/2 edges).
    """
    from .medial import build_medial, check_semicritical

    net = Network(tuple(f"v{i}" for i in range(1, n_boundary + 1)), (), (), {}, {})
    edges = 0
    stall = 0
    while edges < n_edges and stall < 24:
        n = len(net.boundary)
        busy = [i for i in range(n) if net.degree(net.boundary[i]) > 0]
        if n >= 2 and (not busy or rng.random() < 0.55):
            cand = add_boundary_edge(net, rng.randrange(n), Linear(1.0))
        else:
            cand = add_boundary_spike(net, rng.choice(busy), Linear(1.0))
        trial = drop_isolated_boundary(cand).without_conductances()
        if check_semicritical(build_medial(trial)) is None:
            net = cand
            edges += 1
            stall = 0
        else:
            stall += 1
    return drop_isolated_boundary(net).without_conductances()


def attach_random_conductances(net: Network, rng: random.Random, kind="linear", **kw) -> Network:
    specs = {}
    for e in net.edges:
        if kind == "linear":
            specs[e.id] = random_linear(rng, **kw)
        elif kind == "pwl":
            specs[e.id] = random_pwl(rng, **kw)
        else:
            raise ValueError(kind)
    return net.with_conductances(specs)
