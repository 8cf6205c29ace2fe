"""Command-line interface.

Exit codes: 0 success, 1 domain failures (invalid network, not
recoverable, solver errors), 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import elgroup, transforms
from .errors import CpnetError
from .forward import boundary_currents, make_oracle, response_matrix, solve_dirichlet, solve_neumann
from .medial import build_medial, check_critical, check_semicritical
from .network import BoundaryData, Network, validate_network
from .recovery import recover_network
from .render import render_svg


def _load_net(path) -> Network:
    return Network.load(path)


def _print_json(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_validate(args):
    report = validate_network(_load_net(args.file))
    if report.ok:
        print("ok")
        return 0
    for p in report.problems:
        print(f"violation: {p}")
    return 1


def cmd_medial(args):
    net = _load_net(args.file)
    m = build_medial(net)
    v = check_critical(m)
    stats = {
        "crossings": len(m.crossings),
        "cells": len(m.colors),
        "geodesics": len(m.geodesics),
        "closed_geodesics": sum(1 for g in m.geodesics if g.closed),
        "boundary_cells": len(set(m.arcs)),
        "critical": v is None,
    }
    if v is not None:
        stats["violation"] = str(v)
    _print_json(stats)
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(render_svg(net, m))
    return 0


def cmd_check(args):
    net = _load_net(args.file)
    m = build_medial(net)
    v = check_semicritical(m)
    if v is None:
        print("RECOVERABLE")
        return 0
    print(f"NOT RECOVERABLE: {v}")
    return 1


def cmd_response(args):
    net = _load_net(args.file)
    lam = response_matrix(net)
    _print_json({"order": list(net.boundary), "matrix": [[float(x) for x in row] for row in lam]})
    return 0


def _load_boundary(path) -> BoundaryData:
    with open(path, encoding="utf-8") as fh:
        return BoundaryData.from_json(json.load(fh))


def cmd_dirichlet(args):
    net = _load_net(args.file)
    f = _load_boundary(args.boundary)
    currents, phi, state = solve_dirichlet(net, f, tol=args.tolerance)
    _print_json(
        {
            "potential": {k: phi[k] for k in sorted(phi)},
            "currents": {k: currents[k] for k in sorted(currents)},
            "boundary_currents": boundary_currents(net, currents),
            "iterations": state.iterations,
            "kcl_residual": state.residual,
            "energy": state.energy,
        }
    )
    return 0


def cmd_neumann(args):
    net = _load_net(args.file)
    f = _load_boundary(args.boundary)
    phi, currents = solve_neumann(net, f, tol=args.tolerance)
    _print_json(
        {
            "potential": {k: phi[k] for k in sorted(phi)},
            "currents": {k: currents[k] for k in sorted(currents)},
        }
    )
    return 0


def cmd_recover(args):
    shape = _load_net(args.shape).without_conductances()
    hidden = _load_net(args.hidden)
    if {e.id for e in shape.edges} != {e.id for e in hidden.edges}:
        raise CpnetError("shape and hidden network have different edge sets")
    probes = [float(x) for x in args.probes.split(",") if x]
    oracle = make_oracle(hidden)
    result = recover_network(shape, oracle, probes, linear=args.linear)
    out = result.to_json()
    deviation = 0.0
    for eid, pts in result.samples.items():
        spec = hidden.conductances[eid]
        for a, v in pts:
            truth = spec(a)
            deviation = max(deviation, abs(truth - v) / max(1.0, abs(truth)))
    _print_json({"recovered": out, "max_deviation": deviation})
    if args.output:
        result.save(args.output)
    return 0


def cmd_transform(args):
    net = _load_net(args.file)
    at = [x for x in args.at.split(",") if x]
    op = args.op
    if op == "ydelta":
        out, rec = transforms.wye_delta(net, at[0])
    elif op == "deltay":
        out, rec = transforms.delta_wye(net, at)
    elif op == "series":
        out, rec = transforms.series_reduce(net, at[0])
    elif op == "parallel":
        out, rec = transforms.parallel_reduce(net, at[0], at[1])
    elif op == "starmesh4":
        out, rec = transforms.star_mesh_4(net, at[0])
    elif op == "k4":
        out, rec = transforms.k4_to_planar(net, at)
    elif op == "unk4":
        out, rec = transforms.planar_to_k4(net, at[1:], at[0])
    elif op == "droploop":
        out, rec = transforms.remove_self_loop(net, at[0])
    else:
        raise CpnetError(f"unknown transform op {op!r}")
    _print_json(rec.to_json())
    if args.output:
        out.save(args.output)
    return 0


def cmd_el2n(args):
    if args.el2n_cmd == "verify":
        reports = elgroup.verify_relations(args.n, args.samples, seed=args.seed)
        sres = elgroup.symplectic_check(args.n, args.samples, seed=args.seed)
        payload = {
            "relations": [r.to_json() for r in reports],
            "symplectic_residual": sres,
            "symplectic_passed": sres < elgroup.SYMPLECTIC_TOL,
        }
        if args.json:
            _print_json(payload)
        else:
            for r in reports:
                print(
                    f"{r.family}: additive {r.max_additive:.2e}  commuting {r.max_commuting:.2e}  "
                    f"braid {r.max_braid:.2e}  -> {'pass' if r.passed else 'FAIL'}"
                )
            print(f"symplectic residual {sres:.2e} -> {'pass' if payload['symplectic_passed'] else 'FAIL'}")
        ok = all(r.passed for r in reports) and payload["symplectic_passed"]
        return 0 if ok else 1
    word = tuple(int(x) for x in args.word.split(","))
    rep = elgroup.injectivity_probe(word, args.mode, args.trials, args.n, seed=args.seed)
    if args.json:
        _print_json(rep.to_json())
    else:
        kind = "reduced" if rep.reduced else "non-reduced"
        print(f"word {rep.word} ({kind}), mode {rep.mode}, {rep.trials} trials")
        if rep.collisions:
            print(f"collision found: {rep.collisions[0]}")
        else:
            print(f"no collision; min separation {rep.min_separation:.3g}")
        print("pass" if rep.passed else "FAIL")
    return 0 if rep.passed else 1


def build_parser():
    p = argparse.ArgumentParser(prog="cpnet", description=__doc__)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("validate", help="structural validation report")
    s.add_argument("file")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("medial", help="medial graph statistics and SVG")
    s.add_argument("file")
    s.add_argument("--svg")
    s.set_defaults(fn=cmd_medial)

    s = sub.add_parser("check", help="recoverability of the network shape")
    s.add_argument("file")
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("response", help="response matrix of a linear network")
    s.add_argument("file")
    s.set_defaults(fn=cmd_response)

    s = sub.add_parser("dirichlet", help="solve from boundary voltages")
    s.add_argument("file")
    s.add_argument("--boundary", required=True)
    s.set_defaults(fn=cmd_dirichlet)

    s = sub.add_parser("neumann", help="solve from boundary currents")
    s.add_argument("file")
    s.add_argument("--boundary", required=True)
    s.set_defaults(fn=cmd_neumann)

    s = sub.add_parser("recover", help="layer-stripping recovery against a hidden network")
    s.add_argument("shape")
    s.add_argument("--hidden", required=True)
    s.add_argument("--probes", default="1")
    s.add_argument("--linear", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_recover)

    s = sub.add_parser("transform", help="electrically equivalent rewrite")
    s.add_argument("file")
    s.add_argument("--op", required=True,
                   choices=["ydelta", "deltay", "series", "parallel", "starmesh4", "k4", "unk4", "droploop"])
    s.add_argument("--at", required=True, help="comma-separated vertex/edge ids")
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_transform)

    s = sub.add_parser("el2n", help="electrical linear group toolkit")
    elsub = s.add_subparsers(dest="el2n_cmd", required=True)
    v = elsub.add_parser("verify", help="generator relation residuals")
    v.add_argument("--n", type=int, default=2)
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", action="store_true")
    v.set_defaults(fn=cmd_el2n)
    q = elsub.add_parser("probe", help="factorization injectivity probe")
    q.add_argument("--word", required=True)
    q.add_argument("--mode", default="matrix",
                   choices=["matrix", "matrix-x", "nonlinear-u", "nonlinear-x"])
    q.add_argument("--trials", type=int, default=1000)
    q.add_argument("--n", type=int, default=2)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--json", action="store_true")
    q.set_defaults(fn=cmd_el2n)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CpnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
