"""Per-edge conductance/resistance functions.

Two concrete representations are supported: linear (one slope, possibly
negative) and odd piecewise-linear (breakpoints on the positive axis,
extended to x < 0 by oddness, value 0 at 0).  Both are zero-preserving
bijections; the piecewise-linear kind is continuous and either strictly
increasing or strictly decreasing depending on the common sign of its
segment slopes.  The same representations serve as resistance functions
(voltage in terms of current) for the current-driven solver.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CpnetError


class InvalidSpec(CpnetError):
    """Conductance specification violates its representation invariants."""


@dataclass(frozen=True)
class Linear:
    c: float

    def validate(self):
        if not (self.c == self.c) or self.c in (float("inf"), float("-inf")):
            raise InvalidSpec("linear slope must be finite")
        if self.c == 0:
            raise InvalidSpec("linear slope must be nonzero (bijectivity)")

    @property
    def monotone_increasing(self):
        return self.c > 0

    def __call__(self, x: float) -> float:
        return self.c * x

    def inverse(self, y: float) -> float:
        return y / self.c

    def integral(self, x: float) -> float:
        """Antiderivative of the edge function, zero at zero."""
        return 0.5 * self.c * x * x


@dataclass(frozen=True)
class PwlOdd:
    """Odd piecewise-linear bijection given by breakpoints on x > 0.

    Segments run (0,0) -> (x_1,y_1) -> ... -> (x_K,y_K) and continue with
    ``terminal_slope`` beyond x_K.  All segment slopes (first, middle,
    terminal) must share one sign, which makes the odd extension a
    continuous bijection of the reals.
    """

    points: tuple[tuple[float, float], ...]
    terminal_slope: float

    def validate(self):
        if not self.points:
            raise InvalidSpec("pwl spec needs at least one breakpoint")
        xs = [p[0] for p in self.points]
        if any(x <= 0 for x in xs) or any(b <= a for a, b in zip(xs, xs[1:])):
            raise InvalidSpec("breakpoint abscissae must be positive and strictly increasing")
        slopes = list(self._slopes())
        if any(s == 0 for s in slopes):
            raise InvalidSpec("zero segment slope (not a bijection)")
        if len({s > 0 for s in slopes}) != 1:
            raise InvalidSpec("segment slopes must share one sign")

    def _slopes(self):
        px, py = 0.0, 0.0
        for x, y in self.points:
            yield (y - py) / (x - px)
            px, py = x, y
        yield self.terminal_slope

    @property
    def monotone_increasing(self):
        return self.points[0][1] > 0

    def __call__(self, x: float) -> float:
        if x < 0:
            return -self._eval_pos(-x)
        return self._eval_pos(x)

    def _eval_pos(self, x: float) -> float:
        px, py = 0.0, 0.0
        for bx, by in self.points:
            if x <= bx:
                return py + (by - py) * (x - px) / (bx - px)
            px, py = bx, by
        return py + self.terminal_slope * (x - px)

    def inverse(self, y: float) -> float:
        sgn = 1.0 if self.monotone_increasing else -1.0
        if sgn * y < 0:
            return -self._inverse_pos(-y)
        return self._inverse_pos(y)

    def _inverse_pos(self, y: float) -> float:
        # y lies on the image of the positive axis here
        px, py = 0.0, 0.0
        sgn = 1.0 if self.monotone_increasing else -1.0
        for bx, by in self.points:
            if sgn * y <= sgn * by:
                return px + (bx - px) * (y - py) / (by - py)
            px, py = bx, by
        return px + (y - py) / self.terminal_slope

    def integral(self, x: float) -> float:
        """Antiderivative, zero at zero; even by oddness of the integrand."""
        x = abs(x)
        total = 0.0
        px, py = 0.0, 0.0
        for bx, by in self.points:
            if x <= bx:
                ym = py + (by - py) * (x - px) / (bx - px)
                return total + 0.5 * (py + ym) * (x - px)
            total += 0.5 * (py + by) * (bx - px)
            px, py = bx, by
        ym = py + self.terminal_slope * (x - px)
        return total + 0.5 * (py + ym) * (x - px)


ConductanceSpec = Linear | PwlOdd
ResistanceSpec = ConductanceSpec


def eval_conductance(spec: ConductanceSpec, x: float) -> float:
    return spec(x)


def eval_inverse(spec: ConductanceSpec, y: float) -> float:
    return spec.inverse(y)


def is_monotone_increasing(spec: ConductanceSpec) -> bool:
    return spec.monotone_increasing


def spec_to_json(spec: ConductanceSpec) -> dict:
    if isinstance(spec, Linear):
        return {"kind": "linear", "c": spec.c}
    return {
        "kind": "pwl_odd",
        "points": [[x, y] for x, y in spec.points],
        "terminal_slope": spec.terminal_slope,
    }


def spec_from_json(obj: dict) -> ConductanceSpec:
    kind = obj.get("kind")
    if kind == "linear":
        spec = Linear(float(obj["c"]))
    elif kind == "pwl_odd":
        spec = PwlOdd(
            tuple((float(x), float(y)) for x, y in obj["points"]),
            float(obj["terminal_slope"]),
        )
    else:
        raise InvalidSpec(f"unknown conductance kind {kind!r}")
    spec.validate()
    return spec
