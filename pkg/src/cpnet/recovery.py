"""Layer-stripping recovery of conductances from boundary measurements.

One conductance at a time: a boundary triangle's apex crossing is read
off by a designed boundary-value problem, the triangle is uncrossed, and
the oracle is wrapped so that measurements on the smaller graph are
answered by translating them to the original one through the crossing
equation of the removed apex.  Boundary digons carry no information and
are stripped as they appear.

Readout placement: of the four cells at the apex, the two on the far
side of one geodesic are pinned to zero, the probe value goes on the
black cell of the near pair, and the white cell of the near pair is
read.  This yields a forward sample gamma(probe) regardless of the
triangle's color; probing the triangle cell itself would return inverse
samples whenever the triangle is white.  Swapping the probe and read
cells of the same setup yields inverse samples, so the apex conductance
is measurable exactly at any argument in either direction; the wrapped
oracles exploit that instead of extrapolating a finite fit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .cells import build_recovery_sets
from .conductance import Linear
from .errors import (
    Inconsistent,
    InvalidNetwork,
    NotApex,
    NotRecoverable,
    ProbeInsufficient,
)
from .medial import (
    MedialGraph,
    build_medial,
    check_semicritical,
    find_boundary_features,
    remove_digon,
    uncross_with_record,
)
from .network import Network


class PwlFit:
    """Piecewise-linear interpolant through recovered samples, odd by
    construction, refusing to extrapolate beyond the outermost sample."""

    def __init__(self, points):
        self.points = tuple(points)

    @staticmethod
    def from_samples(samples):
        folded = {}
        for a, v in samples:
            if a == 0:
                continue
            x, y = (a, v) if a > 0 else (-a, -v)
            if x in folded and abs(folded[x] - y) > 1e-9 * max(1.0, abs(y)):
                raise Inconsistent(f"samples disagree at {x}: {folded[x]} vs {y}")
            folded[x] = y
        pts = tuple(sorted(folded.items()))
        if not pts:
            raise ProbeInsufficient("no nonzero samples")
        fit = PwlFit(pts)
        slopes = fit._slopes()
        if any(s == 0 for s in slopes) or len({s > 0 for s in slopes}) != 1:
            raise Inconsistent("sampled values are not strictly monotone")
        return fit

    def _slopes(self):
        px, py = 0.0, 0.0
        out = []
        for x, y in self.points:
            out.append((y - py) / (x - px))
            px, py = x, y
        return out

    def __call__(self, x):
        if x < 0:
            return -self._pos(-x)
        return self._pos(x)

    def _pos(self, x):
        px, py = 0.0, 0.0
        for bx, by in self.points:
            if x <= bx:
                return py + (by - py) * (x - px) / (bx - px)
            px, py = bx, by
        raise ProbeInsufficient(f"argument {x} beyond last probe {px}")

    def inverse(self, y):
        increasing = self.points[0][1] > 0
        if (y < 0) == increasing and y != 0:
            return -self._inv_pos(-y)
        return self._inv_pos(y)

    def _inv_pos(self, y):
        px, py = 0.0, 0.0
        for bx, by in self.points:
            lo, hi = sorted((py, by))
            if lo <= y <= hi:
                return px + (bx - px) * (y - py) / (by - py)
            px, py = bx, by
        raise ProbeInsufficient(f"value {y} beyond last probed value {py}")


class ApexReader:
    """Boundary-value setup that samples the conductance at one apex.

    Forward: probe on the black near cell, read the white one.  Inverse:
    the same setup with probe and read swapped.  Both are exact oracle
    measurements, valid for signed and non-monotone conductances.
    """

    def __init__(self, m: MedialGraph, oracle, apex: str, triangle_cell=None):
        feats = find_boundary_features(m)
        tris = [f for f in feats if f.kind == "triangle" and f.apex == apex]
        if triangle_cell is not None:
            tris = [f for f in tris if f.cell == triangle_cell]
        if not tris:
            raise NotApex(f"crossing {apex!r} is not a boundary-triangle apex")
        self.m = m
        self.oracle = oracle
        self.apex = apex
        q = m.crossings[apex].cells
        t = q.index(tris[0].cell)
        near = (q[t], q[(t + 1) % 4])
        self.black_cell, self.white_cell = (near[0], near[1]) if t % 2 == 0 else (near[1], near[0])
        self.geo = m.strand_at(apex, (t + 1) % 2)
        self.sign = (1.0 if self.black_cell == q[0] else -1.0) * (
            1.0 if self.white_cell == q[3] else -1.0
        )
        self._sets = {}
        far = (q[(t + 2) % 4], q[(t + 3) % 4])
        rs = self._recovery_sets(self.black_cell)
        if not (far[0] in rs.halfplane and far[1] in rs.halfplane):
            raise NotApex(f"geodesic choice at {apex!r} does not pin the far cells")

    def _recovery_sets(self, probe_cell):
        if probe_cell not in self._sets:
            self._sets[probe_cell] = build_recovery_sets(self.m, probe_cell, self.geo)
        return self._sets[probe_cell]

    def _measure(self, probe_cell, read_cell, value):
        rs = self._recovery_sets(probe_cell)
        values = {c: 0.0 for c in rs.S}
        values[probe_cell] = float(value)
        ans = self.oracle.query(values)
        return ans[read_cell]

    def forward(self, x: float) -> float:
        """gamma(x) at the apex."""
        if x == 0:
            return 0.0
        return self.sign * self._measure(self.black_cell, self.white_cell, x)

    def inverse(self, y: float) -> float:
        """gamma^{-1}(y) at the apex."""
        if y == 0:
            return 0.0
        return self.sign * self._measure(self.white_cell, self.black_cell, y)


def recover_apex(m: MedialGraph, oracle, apex: str, probes, triangle_cell=None):
    """Pointwise samples (x, gamma(x)) of the conductance at the apex.

    One oracle query per probe: zeros on the swept boundary set, the
    probe on the black near cell, gamma(probe) read (through the quad's
    orientation signs) at the white near cell.
    """
    for x in probes:
        if x == 0:
            raise ValueError("probes must be nonzero (gamma(0) = 0 a priori)")
    reader = ApexReader(m, oracle, apex, triangle_cell)
    return [(float(x), reader.forward(float(x))) for x in probes]


class MeasuredGamma:
    """Exact on-demand access to a recovered apex conductance.

    Frozen interpolation cannot be exact off the probe grid, so wrapped
    oracles evaluate through this instead: unseen arguments trigger one
    additional measurement against the stage oracle (still answerable
    after later uncrossings, which only wrap it).
    """

    def __init__(self, reader: ApexReader, seed_samples=()):
        self.reader = reader
        self._fwd = {float(x): float(y) for x, y in seed_samples}
        self._inv = {float(y): float(x) for x, y in seed_samples}

    def __call__(self, x):
        x = float(x)
        if x == 0.0:
            return 0.0
        if x not in self._fwd:
            self._fwd[x] = self.reader.forward(x)
        return self._fwd[x]

    def inverse(self, y):
        y = float(y)
        if y == 0.0:
            return 0.0
        if y not in self._inv:
            self._inv[y] = self.reader.inverse(y)
        return self._inv[y]


class AnswerView:
    """Lazy boundary labelling: cells are computed when first read.

    Wrapped oracles stack; eagerly translating every merged-cell value
    through the crossing equation at every level would rerun conductance
    measurements exponentially often, so values materialize on demand.
    """

    def __init__(self, cells, getter):
        self._cells = frozenset(cells)
        self._get = getter
        self._memo = {}

    def __getitem__(self, c):
        if c not in self._memo:
            if c not in self._cells:
                raise KeyError(c)
            self._memo[c] = self._get(c)
        return self._memo[c]

    def get(self, c, default=None):
        return self[c] if c in self._cells else default

    def keys(self):
        return self._cells

    def __contains__(self, c):
        return c in self._cells

    def __len__(self):
        return len(self._cells)

    def __iter__(self):
        return iter(sorted(self._cells))

    def items(self):
        return [(c, self[c]) for c in sorted(self._cells)]


class _UncrossedOracle:
    """Answers queries on an uncrossed graph through the original oracle."""

    def __init__(self, base, record, gamma, medial):
        self.base = base
        self.rec = record
        self.gamma = gamma
        self.medial = medial

    def query(self, values: dict):
        rec = self.rec
        opp = rec.quad[(rec.t + 2) % 4]
        mapped = {}
        for c, v in values.items():
            mapped[opp if c == rec.merged else c] = v
        ans = self.base.query(mapped)
        return AnswerView(
            self.medial.boundary_cells,
            lambda c: self._merged_value(ans) if c == rec.merged else ans[c],
        )

    def _merged_value(self, ans):
        q, t = self.rec.quad, self.rec.t
        if self.rec.opposite_was_boundary:
            return ans[q[(t + 2) % 4]]
        tri = ans[q[t]]
        if t % 2 == 0:
            d_white = ans[q[3]] - ans[q[1]]
            return tri - self.gamma.inverse(d_white) if t == 0 else tri + self.gamma.inverse(d_white)
        d_black = ans[q[0]] - ans[q[2]]
        return tri + self.gamma(d_black) if t == 1 else tri - self.gamma(d_black)


class _DigonFreeOracle:
    """Answers queries after a boundary digon removal; the digon cell is
    unconstrained in the original graph, so any value stands in for it."""

    def __init__(self, base, record, medial):
        self.base = base
        self.rec = record
        self.medial = medial

    def query(self, values: dict):
        mapped = dict(values)
        mapped[self.rec.cell] = 0.0
        ans = self.base.query(mapped)
        return AnswerView(self.medial.boundary_cells, lambda c: ans[c])


def wrap_uncrossed_oracle(oracle, m: MedialGraph, apex: str, gamma):
    """Oracle for uncross(m, apex), given the recovered apex conductance.

    ``gamma`` must be evaluable and invertible wherever the wrapped
    queries land: exact for Linear and MeasuredGamma; a PwlFit raises
    ProbeInsufficient outside its probed range rather than extrapolate.
    Returns (wrapped oracle, uncrossed graph).
    """
    m2, rec = uncross_with_record(m, apex)
    return _UncrossedOracle(oracle, rec, gamma, m2), m2


@dataclass
class RecoveryResult:
    samples: dict  # edge id -> tuple of (x, gamma(x))
    slopes: dict   # edge id -> recovered slope (linear mode only)
    log: tuple     # uncrossing order, digon removals

    def to_json(self) -> dict:
        out = {}
        for eid, pts in self.samples.items():
            if eid in self.slopes:
                out[eid] = {"kind": "linear", "c": self.slopes[eid]}
            else:
                out[eid] = {"kind": "pointwise", "samples": [[x, y] for x, y in pts]}
        return out

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")


def recover_network(shape: Network, oracle, probes, linear=False, triangle_choice=None) -> RecoveryResult:
    """Run the full layer-stripping loop against a measurement oracle.

    ``shape`` supplies only the graph and embedding; conductances are
    read exclusively from the oracle.  Every edge receives samples at
    every probe (first probe only in linear mode).  Raises
    NotRecoverable with the geodesic violation witness when the shape's
    medial graph is not semicritical.
    """
    probes = [float(x) for x in probes]
    if not probes or any(x == 0 for x in probes):
        raise ValueError("need a nonempty list of nonzero probes")
    m = build_medial(shape.without_conductances())
    violation = check_semicritical(m)
    if violation is not None:
        raise NotRecoverable(violation)
    if any(g.closed for g in m.geodesics):
        raise InvalidNetwork("network medial graph has a closed geodesic")
    if hasattr(oracle, "medial"):
        if oracle.medial.crossings != m.crossings:
            raise InvalidNetwork("oracle answers a different graph than the shape")

    work, orc = m, oracle
    samples, slopes, log = {}, {}, []
    while True:
        while True:
            feats = find_boundary_features(work)
            digon = next((f for f in feats if f.kind == "digon"), None)
            if digon is None:
                break
            work, drec = remove_digon(work, digon.cell)
            orc = _DigonFreeOracle(orc, drec, work)
            log.append(("digon", drec.cell))
        if not work.crossings:
            break
        tris = [f for f in feats if f.kind == "triangle"]
        if not tris:
            raise InvalidNetwork("critical graph with crossings but no boundary triangle")
        pick = min(tris, key=lambda f: f.rim_position)
        if triangle_choice is not None:
            pick = triangle_choice(tris) or pick
        eid = work.crossings[pick.apex].net_edge
        reader = ApexReader(work, orc, pick.apex, triangle_cell=pick.cell)
        use = probes[:1] if linear else probes
        pts = [(x, reader.forward(x)) for x in use]
        samples[eid] = tuple(pts)
        if linear:
            x0, y0 = pts[0]
            slopes[eid] = y0 / x0
            gam = Linear(slopes[eid])
        else:
            PwlFit.from_samples(pts)  # reject inconsistent or non-monotone sample sets early
            gam = MeasuredGamma(reader, pts)
        log.append(("uncross", pick.apex))
        work, urec = uncross_with_record(work, pick.apex)
        orc = _UncrossedOracle(orc, urec, gam, work)
    return RecoveryResult(samples, slopes, tuple(log))
