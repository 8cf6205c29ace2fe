import json
import random

import pytest

from cpnet.build import polygon, random_shape, single_edge, star
from cpnet.conductance import Linear
from cpnet.network import Edge, Network, augmented_faces, trace_faces, validate_network


def test_star_validates(star3):
    report = validate_network(star3)
    assert report.ok, report.problems


def test_dangling_endpoint():
    net = Network(("v1",), (), (Edge("e1", "v1", "ghost"),), {"v1": (("e1", "a"),)})
    report = validate_network(net)
    assert not report.ok
    assert any("dangling" in p for p in report.problems)


def test_rotation_mismatch():
    net = Network(
        ("v1", "v2"), (), (Edge("e1", "v1", "v2"),), {"v1": (("e1", "a"),), "v2": ()}
    )
    report = validate_network(net)
    assert not report.ok


def test_isolated_vertex_flagged():
    net = Network(
        ("v1", "v2", "v3"),
        (),
        (Edge("e1", "v1", "v2"),),
        {"v1": (("e1", "a"),), "v2": (("e1", "b"),), "v3": ()},
    )
    report = validate_network(net)
    assert not report.ok
    assert any("isolated" in p for p in report.problems)


def test_single_edge_euler():
    report = validate_network(single_edge(Linear(1.0)))
    assert report.ok, report.problems


def test_nonplanar_rotation_fails_euler():
    # single interior hub joined twice to one boundary vertex, rotations
    # interleaved so the two parallel edges must cross
    edges = (Edge("e1", "v1", "h"), Edge("e2", "v1", "h"), Edge("e3", "v2", "h"), Edge("e4", "v2", "h"))
    rot = {
        "v1": (("e1", "a"), ("e2", "a")),
        "v2": (("e3", "a"), ("e4", "a")),
        "h": (("e1", "b"), ("e3", "b"), ("e2", "b"), ("e4", "b")),
    }
    net = Network(("v1", "v2"), ("h",), edges, rot)
    report = validate_network(net)
    assert not report.ok
    assert any("Euler" in p for p in report.problems)


def test_trace_faces_star(star3):
    faces = trace_faces(star3)
    # a tree has a single walk, covering every edge twice; it is the outer face
    assert len(faces) == 1
    assert len(faces[0]) == 6


def test_trace_faces_triangle(triangle_net):
    faces = trace_faces(triangle_net)
    assert len(faces) == 2
    assert all(len(f) == 3 for f in faces)
    v, e = 3, 3
    assert v - e + len(faces) == 2


def test_trace_faces_empty():
    net = Network((), (), (), {})
    assert trace_faces(net) == [()]


def test_euler_on_random_shapes(rng):
    from cpnet.network import components

    for _ in range(40):
        net = random_shape(rng, rng.randint(2, 7), rng.randint(1, 12))
        assert validate_network(net).ok
        faces = trace_faces(net)
        v = len(net.vertices)
        e = len(net.edges)
        # each component traces its own sphere worth of faces
        assert v - e + len(faces) == 2 * len(components(net))


def test_augmented_faces_outer_is_rim_only(star3):
    inner, outer = augmented_faces(star3)
    assert outer is not None
    assert all(d[0] == "arc" for d in outer)
    assert len(inner) == 3


def test_json_roundtrip(tmp_path, star3_123):
    p = tmp_path / "net.json"
    star3_123.save(p)
    back = Network.load(p)
    assert back.boundary == star3_123.boundary
    assert back.interior == star3_123.interior
    assert [e.id for e in back.edges] == [e.id for e in star3_123.edges]
    assert back.rotations == star3_123.rotations
    assert back.conductances == star3_123.conductances


def test_json_parallel_edges_need_tags(tmp_path):
    net = polygon(3, [Linear(1.0)] * 3)
    p = tmp_path / "net.json"
    net.save(p)
    assert Network.load(p).rotations == net.rotations
    # self-loops demand explicit end tags
    raw = {
        "boundary": ["v1"],
        "interior": [],
        "edges": [{"id": "e1", "u": "v1", "v": "v1"}],
        "rotations": {"v1": ["e1", "e1"]},
    }
    with pytest.raises(Exception):
        Network.from_json(raw)
    raw["rotations"] = {"v1": ["e1:a", "e1:b"]}
    net2 = Network.from_json(raw)
    assert net2.rotations["v1"] == (("e1", "a"), ("e1", "b"))
