"""Generators of the electrical linear group and factorization probes.

The matrix generators u_i(a) live in Sp_{2n}; their defining relations
mirror series/parallel composition and the Y-Delta exchange.  The
analogous unipotent generators x_i(a) = I + a E_{i,i+1} live in
SL_{2n+1}.  Both families also come in nonlinear form, parameterized by
zero-preserving bijections instead of slopes; composites of those are
evaluated pointwise on vectors.

Factorization injectivity is probed, not proved: reduced words (length
equal to the inversion count of the product permutation in S_{2n+1}) are
sampled for collisions, and non-reduced words get an explicit
relation-derived collision exhibited.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .errors import ArityMismatch, IndexOutOfRange

REL_TOL = 1e-11
SYMPLECTIC_TOL = 1e-12


def gen_u(n: int, i: int, a: float) -> np.ndarray:
    """Electrical generator as a 2n x 2n symplectic matrix."""
    if not 1 <= i <= 2 * n:
        raise IndexOutOfRange(f"i={i} outside 1..{2 * n}")
    m = np.eye(2 * n)
    if i % 2 == 1:
        k = (i - 1) // 2
        m[k, n + k] = -a
    elif i == 2 * n:
        m[2 * n - 1, n - 1] = -a
    else:
        k = i // 2 - 1
        m[n + k, k] -= a
        m[n + k + 1, k + 1] -= a
        m[n + k, k + 1] += a
        m[n + k + 1, k] += a
    return m


def gen_x(n: int, i: int, a: float) -> np.ndarray:
    """Unipotent generator I + a E_{i,i+1} in SL_{2n+1}."""
    if not 1 <= i <= 2 * n:
        raise IndexOutOfRange(f"i={i} outside 1..{2 * n}")
    m = np.eye(2 * n + 1)
    m[i - 1, i] = a
    return m


def symplectic_form(n: int) -> np.ndarray:
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = np.eye(n)
    j[n:, :n] = -np.eye(n)
    return j


def symplectic_residual(m: np.ndarray) -> float:
    n = m.shape[0] // 2
    j = symplectic_form(n)
    return float(np.max(np.abs(m.T @ j @ m - j)))


# -- nonlinear generators ------------------------------------------------------


@dataclass(frozen=True)
class PwlBijection:
    """Zero-preserving piecewise-linear bijection, not necessarily odd.

    Breakpoints may sit on either side of 0 ((0,0) is implicit); the
    terminal slope applies beyond both extremes.  Segment slopes must
    share one sign.
    """

    points: tuple
    terminal_slope: float

    def _knots(self):
        pts = sorted(set(self.points) | {(0.0, 0.0)})
        return pts

    def validate(self):
        pts = self._knots()
        xs = [p[0] for p in pts]
        if len(set(xs)) != len(xs):
            raise ValueError("duplicate abscissae")
        slopes = [
            (y2 - y1) / (x2 - x1) for (x1, y1), (x2, y2) in zip(pts, pts[1:])
        ] + [self.terminal_slope]
        if any(s == 0 for s in slopes) or len({s > 0 for s in slopes}) != 1:
            raise ValueError("slopes must be nonzero and share one sign")
        return self

    def __call__(self, x: float) -> float:
        pts = self._knots()
        if x <= pts[0][0]:
            return pts[0][1] + self.terminal_slope * (x - pts[0][0])
        for (x1, y1), (x2, y2) in zip(pts, pts[1:]):
            if x <= x2:
                return y1 + (y2 - y1) * (x - x1) / (x2 - x1)
        return pts[-1][1] + self.terminal_slope * (x - pts[-1][0])


def nonlinear_u(n: int, i: int, f):
    """u_i as a bijection of R^2n = (v_1..v_n, c_1..c_n)."""
    if not 1 <= i <= 2 * n:
        raise IndexOutOfRange(f"i={i} outside 1..{2 * n}")

    def apply(vec):
        out = list(vec)
        if i % 2 == 1:
            k = (i - 1) // 2
            out[k] -= f(out[n + k])
        elif i == 2 * n:
            out[2 * n - 1] -= f(out[n - 1])
        else:
            k = i // 2 - 1
            t = f(out[k] - out[k + 1])
            out[n + k] -= t
            out[n + k + 1] += t
        return out

    return apply


def nonlinear_x(n: int, i: int, f):
    """x_i as a bijection of R^(2n+1): adds f of the next coordinate."""
    if not 1 <= i <= 2 * n:
        raise IndexOutOfRange(f"i={i} outside 1..{2 * n}")

    def apply(vec):
        out = list(vec)
        out[i - 1] += f(out[i])
        return out

    return apply


def nonlinear_y(n: int, i: int, f):
    """Lower analogue of x_i: adds f of the previous coordinate."""
    if not 1 <= i <= 2 * n:
        raise IndexOutOfRange(f"i={i} outside 1..{2 * n}")

    def apply(vec):
        out = list(vec)
        out[i] += f(out[i - 1])
        return out

    return apply


def nonlinear_h(n: int, i: int, f):
    """Diagonal analogue: rescales one coordinate through f."""
    if not 1 <= i <= 2 * n + 1:
        raise IndexOutOfRange(f"i={i} outside 1..{2 * n + 1}")

    def apply(vec):
        out = list(vec)
        out[i - 1] = f(out[i - 1])
        return out

    return apply


# -- words ---------------------------------------------------------------------


def word_permutation(word, n: int):
    """Product of the transpositions s_i in S_{2n+1} (one-line, 1-based)."""
    perm = list(range(1, 2 * n + 2))
    for i in reversed(word):
        if not 1 <= i <= 2 * n:
            raise IndexOutOfRange(f"letter {i} outside 1..{2 * n}")
        perm[i - 1], perm[i] = perm[i], perm[i - 1]
    return tuple(perm)


def inversions(perm) -> int:
    return sum(
        1
        for i in range(len(perm))
        for j in range(i + 1, len(perm))
        if perm[i] > perm[j]
    )


def coxeter_length(word, n: int) -> int:
    return inversions(word_permutation(word, n))


def is_reduced(word, n: int) -> bool:
    return coxeter_length(word, n) == len(word)


def factorize_eval(word, params, mode: str, n: int):
    """Compose generators along the word (leftmost factor applied last).

    matrix mode returns the product matrix; nonlinear-u / nonlinear-x
    return an evaluator applying the composite to a vector.
    """
    word = list(word)
    params = list(params)
    if len(word) != len(params):
        raise ArityMismatch(f"{len(word)} letters, {len(params)} parameters")
    if mode == "matrix":
        m = np.eye(2 * n)
        for i, a in zip(word, params):
            m = m @ gen_u(n, i, float(a))
        return m
    if mode == "matrix-x":
        m = np.eye(2 * n + 1)
        for i, a in zip(word, params):
            m = m @ gen_x(n, i, float(a))
        return m
    if mode in ("nonlinear-u", "nonlinear-x"):
        builder = nonlinear_u if mode == "nonlinear-u" else nonlinear_x
        fns = []
        for i, f in zip(word, params):
            if isinstance(f, (int, float)):
                slope = float(f)
                fns.append(builder(n, i, lambda x, s=slope: s * x))
            else:
                fns.append(builder(n, i, f))

        def apply(vec):
            out = list(vec)
            for fn in reversed(fns):
                out = fn(out)
            return out

        return apply
    raise ValueError(f"unknown mode {mode!r}")


# -- relations -----------------------------------------------------------------


def braid_params_u(a, b, c):
    """Parameter map of the length-three relation in the electrical family."""
    d = a + c + a * b * c
    return (b * c / d, d, a * b / d)


def braid_params_x(a, b, c):
    d = a + c
    return (b * c / d, d, a * b / d)


@dataclass
class RelationReport:
    family: str
    n: int
    samples: int
    max_additive: float
    max_commuting: float
    max_braid: float
    tol: float = REL_TOL

    @property
    def passed(self) -> bool:
        return max(self.max_additive, self.max_commuting, self.max_braid) < self.tol

    def to_json(self):
        return {
            "family": self.family,
            "n": self.n,
            "samples": self.samples,
            "max_additive_residual": self.max_additive,
            "max_commuting_residual": self.max_commuting,
            "max_braid_residual": self.max_braid,
            "tolerance": self.tol,
            "passed": self.passed,
        }


def _sample(rng, lo=-2.0, hi=2.0):
    return rng.uniform(lo, hi)


def verify_relations(n: int, samples: int = 100, seed: int = 0):
    """Residuals of the defining relations for both generator families."""
    rng = random.Random(seed)
    reports = []
    for family, gen, braid in (
        ("electrical", lambda i, a: gen_u(n, i, a), braid_params_u),
        ("unipotent", lambda i, a: gen_x(n, i, a), braid_params_x),
    ):
        add_r = comm_r = braid_r = 0.0
        letters = range(1, 2 * n + 1)
        for _ in range(samples):
            i = rng.choice(list(letters))
            a, b = _sample(rng), _sample(rng)
            lhs = gen(i, a) @ gen(i, b)
            add_r = max(add_r, float(np.max(np.abs(lhs - gen(i, a + b)))))
            far = [(i, j) for i in letters for j in letters if abs(i - j) > 1]
            if far:
                i, j = rng.choice(far)
                a, b = _sample(rng), _sample(rng)
                comm = gen(i, a) @ gen(j, b) - gen(j, b) @ gen(i, a)
                comm_r = max(comm_r, float(np.max(np.abs(comm))))
            near = [(i, j) for i in letters for j in letters if abs(i - j) == 1]
            if near:
                i, j = rng.choice(near)
                while True:
                    a, b, c = _sample(rng), _sample(rng), _sample(rng)
                    d = a + c + a * b * c if family == "electrical" else a + c
                    if abs(d) > 1e-3:
                        break
                p, q, r = braid(a, b, c)
                lhs = gen(i, a) @ gen(j, b) @ gen(i, c)
                rhs = gen(j, p) @ gen(i, q) @ gen(j, r)
                braid_r = max(braid_r, float(np.max(np.abs(lhs - rhs))))
        reports.append(RelationReport(family, n, samples, add_r, comm_r, braid_r))
    return reports


def symplectic_check(n: int, samples: int = 100, seed: int = 0) -> float:
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(samples):
        i = rng.randrange(1, 2 * n + 1)
        worst = max(worst, symplectic_residual(gen_u(n, i, _sample(rng))))
    return worst


# -- injectivity probes --------------------------------------------------------


@dataclass
class ProbeReport:
    word: tuple
    n: int
    mode: str
    reduced: bool
    trials: int
    collisions: list  # pairs of parameter tuples found to collide
    min_separation: float

    @property
    def passed(self) -> bool:
        # reduced words should show no collision; non-reduced should show one
        return (not self.collisions) if self.reduced else bool(self.collisions)

    def to_json(self):
        return {
            "word": list(self.word),
            "n": self.n,
            "mode": self.mode,
            "reduced": self.reduced,
            "trials": self.trials,
            "collisions": [[list(p), list(q)] for p, q in self.collisions],
            "min_separation": self.min_separation,
            "passed": self.passed,
        }


def _composite_distance(word, p1, p2, mode, n, rng):
    if mode in ("matrix", "matrix-x"):
        m1 = factorize_eval(word, p1, mode, n)
        m2 = factorize_eval(word, p2, mode, n)
        return float(np.linalg.norm(m1 - m2))
    f1 = factorize_eval(word, p1, mode, n)
    f2 = factorize_eval(word, p2, mode, n)
    dim = 2 * n if mode == "nonlinear-u" else 2 * n + 1
    worst = 0.0
    grid = [
        [0.0] * dim,
        [1.0] * dim,
        list(range(1, dim + 1)),
        [(-1.0) ** k for k in range(dim)],
    ]
    for _ in range(8):
        grid.append([rng.uniform(-3, 3) for _ in range(dim)])
    for v in grid:
        d = max(abs(x - y) for x, y in zip(f1(v), f2(v)))
        worst = max(worst, d)
    return worst


def _commutation_collision(word, n, rng):
    """Collision parameters via far-commutations and the additive relation.

    Searches words reachable by swapping far-apart adjacent letters for an
    equal adjacent pair; transports parameters back through the swaps.
    """
    word = tuple(word)
    seen = {word: ()}
    queue = [word]
    target = None
    while queue:
        w = queue.pop(0)
        for k in range(len(w) - 1):
            if w[k] == w[k + 1]:
                target = (w, seen[w])
                queue = []
                break
            if abs(w[k] - w[k + 1]) > 1:
                w2 = w[:k] + (w[k + 1], w[k]) + w[k + 2 :]
                if w2 not in seen:
                    seen[w2] = seen[w] + (k,)
                    queue.append(w2)
        if target:
            break
    if target is None:
        return None
    w, swaps = target
    pair = next(k for k in range(len(w) - 1) if w[k] == w[k + 1])
    params = [rng.uniform(0.5, 2.0) for _ in w]
    alt = list(params)
    t = params[pair + 1] + rng.uniform(0.25, 1.0)
    alt[pair] = params[pair] + params[pair + 1] - t
    alt[pair + 1] = t

    def unswap(p):
        p = list(p)
        for k in reversed(swaps):
            p[k], p[k + 1] = p[k + 1], p[k]
        return tuple(p)

    return unswap(params), unswap(alt)


def injectivity_probe(word, mode: str, trials: int, n: int, seed: int = 0) -> ProbeReport:
    """Sampling pressure on factorization injectivity.

    Reduced words: random distinct nonzero parameter tuples must give
    distinct composites.  Non-reduced words: exhibits a relation-forced
    collision (via far-commutations to an equal adjacent pair).
    """
    word = tuple(word)
    rng = random.Random(seed)
    reduced = is_reduced(word, n)
    collisions = []
    min_sep = float("inf")
    if reduced:
        for _ in range(trials):
            p1 = tuple(rng.choice([-1, 1]) * rng.uniform(0.1, 3.0) for _ in word)
            p2 = tuple(rng.choice([-1, 1]) * rng.uniform(0.1, 3.0) for _ in word)
            if max(abs(a - b) for a, b in zip(p1, p2)) < 1e-6:
                continue
            d = _composite_distance(word, p1, p2, mode, n, rng)
            min_sep = min(min_sep, d)
            if d < 1e-9:
                collisions.append((p1, p2))
    else:
        hit = _commutation_collision(word, n, rng)
        if hit is not None:
            p1, p2 = hit
            d = _composite_distance(word, p1, p2, mode, n, rng)
            min_sep = min(min_sep, d)
            if d < 1e-9:
                collisions.append((p1, p2))
    if min_sep == float("inf"):
        min_sep = -1.0
    return ProbeReport(word, n, mode, reduced, trials, collisions, min_sep)
