"""The split circle Split(T; Q/Z) and the dynamics of Aut(Q/Z) acting on it.

Every rational q is doubled into q- and q+ (q- immediately before q+ going
clockwise); irrational points are quadratic irrationals and stay single.
The map :func:`phi` sends a split point to the linear order on Q/Z obtained
by cutting the circle there.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

from .automorphisms import (
    PLCircleAutomorphism,
    PartialIso,
    extend_partial_iso,
    identity,
)
from .core import Cycle, cut_at
from .errors import DomainError, MalformedInput
from .profinite import Cell, quotient
from .rational import (
    Q_CIRCLE,
    QuadraticIrrational,
    circle_point,
    format_point,
    parse_point,
    rational_between,
)

MINUS, PLUS = "minus", "plus"
_TAG = {MINUS: 0, None: 1, PLUS: 2}


@dataclass(frozen=True)
class SplitPoint:
    value: object
    side: str | None = None

    def __post_init__(self):
        v = circle_point(self.value)
        object.__setattr__(self, "value", v)
        if isinstance(v, QuadraticIrrational):
            if self.side is not None:
                raise DomainError("irrational split points carry no side tag")
        elif self.side not in (MINUS, PLUS):
            raise DomainError(f"rational split points need side minus or plus, got {self.side!r}")

    @classmethod
    def minus(cls, q) -> "SplitPoint":
        return cls(q, MINUS)

    @classmethod
    def plus(cls, q) -> "SplitPoint":
        return cls(q, PLUS)

    @property
    def is_rational(self) -> bool:
        return self.side is not None

    def position(self) -> tuple:
        """Sort key on [0, 1): value first, then minus < (the rational itself) < plus."""
        return (self.value, _TAG[self.side])

    def __str__(self):
        if self.side is None:
            return format_point(self.value)
        return format_point(self.value) + ("-" if self.side == MINUS else "+")

    @classmethod
    def parse(cls, text: str) -> "SplitPoint":
        text = text.strip()
        if text.endswith("-") or text.endswith("+"):
            return cls(parse_point(text[:-1]), MINUS if text[-1] == "-" else PLUS)
        return cls(parse_point(text))


def _rational_position(a) -> tuple:
    return (Fraction(a) % 1, 1)


def _cyclic(p, q, r) -> bool:
    return p < q < r or q < r < p or r < p < q


def split_triple(x: SplitPoint, y: SplitPoint, z: SplitPoint) -> bool:
    if x == y or y == z or x == z:
        raise DomainError("split_triple needs distinct points")
    return _cyclic(x.position(), y.position(), z.position())


class SplitCircle:
    """Split(T; Q/Z) as a c-ordered carrier."""

    def __contains__(self, x) -> bool:
        return isinstance(x, SplitPoint)

    def triple(self, a, b, c) -> bool:
        if a == b or b == c or a == c:
            return False
        return split_triple(a, b, c)


SPLIT_CIRCLE = SplitCircle()


# -- linear orders -----------------------------------------------------------------


class LinearOrderOracle:
    """A linear order on Q/Z given by a sort key; compared on finite probes only."""

    def __init__(self, key, label: str = ""):
        self._key = key
        self.label = label

    def key(self, a):
        return self._key(Fraction(a) % 1)

    def less(self, a, b) -> bool:
        return self.key(a) < self.key(b)

    def __call__(self, a, b) -> bool:
        return self.less(a, b)

    def sort(self, points: Iterable) -> list:
        return sorted((Fraction(p) % 1 for p in points), key=self.key)

    def transformed(self, g: PLCircleAutomorphism) -> "LinearOrderOracle":
        """g acting on orders: a <' b iff g^-1 a < g^-1 b."""
        inv = g.inverse()
        return LinearOrderOracle(lambda a: self._key(inv(a)), f"g.{self.label}")

    def is_linear_on(self, probes: Sequence) -> bool:
        """Irreflexive, total and transitive on a finite probe set."""
        pts = list(dict.fromkeys(Fraction(p) % 1 for p in probes))
        for a in pts:
            if self.less(a, a):
                return False
        for a in pts:
            for b in pts:
                if a != b and self.less(a, b) == self.less(b, a):
                    return False
                for c in pts:
                    if self.less(a, b) and self.less(b, c) and not self.less(a, c):
                        return False
        return True


def phi(x: SplitPoint) -> LinearOrderOracle:
    """Cut Q/Z at a split point.

    For an irrational xi the order starts just after xi; for q- it starts at
    q (q first), for q+ just after q (q last).
    """
    start = x.position()

    def key(a):
        pa = _rational_position(a)
        return (0, pa) if pa > start else (1, pa)

    return LinearOrderOracle(key, f"phi({x})")


def _rational_after(x: SplitPoint, y: SplitPoint) -> Fraction:
    """A rational whose position lies strictly between x and y going clockwise."""
    if x.side == MINUS:
        return x.value
    if y.side == PLUS:
        return y.value
    if x.value == y.value:  # from q+ round to q-: everything but q
        return (x.value + Fraction(1, 2)) % 1
    return rational_between(x.value, y.value)


def distinguishing_pair(x: SplitPoint, y: SplitPoint) -> tuple[Fraction, Fraction]:
    """Rationals (a, b) ordered one way by phi(x) and the other way by phi(y)."""
    if x == y:
        raise DomainError("identical split points have identical orders")
    a = _rational_after(x, y)
    b = _rational_after(y, x)
    return a, b


def compatible_linear_orders(A) -> list[tuple]:
    """The |A| cut orders of a finite circular order, one per cut point in ground order."""
    return [cut_at(A, z).order for z in A.ground]


def factor_to_circle(x: SplitPoint):
    return x.value


def fiber(t) -> frozenset:
    t = circle_point(t)
    if isinstance(t, QuadraticIrrational):
        return frozenset({SplitPoint(t)})
    return frozenset({SplitPoint(t, MINUS), SplitPoint(t, PLUS)})


def act_on_split(g: PLCircleAutomorphism, x: SplitPoint) -> SplitPoint:
    return SplitPoint(g(x.value), x.side)


# -- extreme proximality ---------------------------------------------------------------


def in_closed_arc(x, a, b) -> bool:
    """x in [a, b]_R; [a, a] is {a}."""
    if x == a or x == b:
        return True
    if a == b:
        return False
    return Q_CIRCLE.triple(a, x, b)


def arc_within(p, q, y, w, full: bool = False) -> bool:
    """[p, q] is contained in [y, w] (the whole circle when ``full``)."""
    if full:
        return True
    if p == q:
        return in_closed_arc(p, y, w)
    length = (w - y) % 1
    dp, dq = (p - y) % 1, (q - y) % 1
    return dp <= dq <= length


def occupied_cells(F, p, q) -> list[Cell]:
    """Cells of X_F met by the closed arc [p, q] (a single point when p == q)."""
    quot = quotient(F if isinstance(F, Cycle) else Cycle(F))
    start = quot.index(quot.project(p))
    stop = quot.index(quot.project(q))
    if p == q:
        return [quot.cells[start]]
    cell = quot.cells[start]
    if start == stop and cell.kind == "arc" and (q - cell.left) % 1 < (p - cell.left) % 1:
        return list(quot.cells)  # the arc runs all the way round
    out = [cell]
    i = start
    while i != stop:
        i = (i + 1) % len(quot)
        out.append(quot.cells[i])
    return out


@dataclass
class ShrinkStep:
    step: int
    radius: Fraction
    lower: Fraction
    upper: Fraction
    element: PLCircleAutomorphism
    image_c: Fraction
    image_b: Fraction

    @property
    def full_circle(self) -> bool:
        return self.radius == Fraction(1, 2)

    def contained(self) -> bool:
        return arc_within(self.image_c, self.image_b, self.lower, self.upper, self.full_circle)


def shrink_set(b, c, z, depth: int) -> list[ShrinkStep]:
    """Elements g_1..g_K fixing z and squeezing A = [c, b]_R into [z - 2^-k, z + 2^-k].

    g_k sends c to z - 2^-k and b to z + 2^-k (pairs that would collide with
    z are dropped).  At k = 1 both targets are the antipode of z, so the
    radius-1/2 arc is the whole circle and g_1 is the identity.
    """
    b, c, z = (Fraction(v) % 1 for v in (b, c, z))
    if depth < 1:
        raise DomainError("depth must be >= 1")
    if not in_closed_arc(z, c, b):
        raise DomainError(f"{format_point(z)} is not in [{format_point(c)}, {format_point(b)}]")
    steps = []
    for k in range(1, depth + 1):
        r = Fraction(1, 2**k)
        lo, hi = (z - r) % 1, (z + r) % 1
        if k == 1 or c == b:
            g = identity()
        else:
            src, dst = [], []
            for s, t in ((c, lo), (z, z), (b, hi)):
                if s == z and t != z:
                    continue
                if s not in src:
                    src.append(s)
                    dst.append(t)
            g = extend_partial_iso(PartialIso(src, dst))
        steps.append(ShrinkStep(k, r, lo, hi, g, g(c), g(b)))
    return steps


def shrink_trace_csv(steps: Sequence[ShrinkStep], F=None) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["step", "radius", "lower", "upper", "image_c", "image_b", "contained", "cells_occupied"])
    for s in steps:
        cells = ""
        if F is not None:
            cells = str(len(occupied_cells(F, s.image_c, s.image_b)))
        w.writerow([
            s.step, s.radius, format_point(s.lower), format_point(s.upper),
            format_point(s.image_c), format_point(s.image_b), s.contained(), cells,
        ])
    return out.getvalue()


# -- strong proximality on atoms ---------------------------------------------------------


@dataclass(frozen=True)
class FinSuppMeasure:
    atoms: tuple  # ((point, weight), ...) with distinct points

    def __init__(self, atoms: Iterable[tuple]):
        merged: dict = {}
        for p, w in atoms:
            p, w = Fraction(p) % 1, Fraction(w)
            if w <= 0:
                raise MalformedInput("weights must be positive")
            if p in merged:
                raise MalformedInput(f"repeated support point {p}")
            merged[p] = w
        if sum(merged.values()) != 1:
            raise MalformedInput("weights must sum to 1")
        object.__setattr__(self, "atoms", tuple(sorted(merged.items())))

    @property
    def support(self) -> list:
        return [p for p, _ in self.atoms]

    def push(self, g) -> "FinSuppMeasure":
        return FinSuppMeasure((g(p), w) for p, w in self.atoms)

    def mass_within(self, z, radius) -> Fraction:
        """Mass of the closed arc of the given radius around z."""
        z = Fraction(z) % 1
        return sum(
            (w for p, w in self.atoms if min((p - z) % 1, (z - p) % 1) <= radius),
            Fraction(0),
        )


def support_hull(points: Iterable) -> tuple[Fraction, Fraction]:
    """(c, b) with [c, b]_R the shortest closed arc containing the points."""
    pts = sorted({Fraction(p) % 1 for p in points})
    if len(pts) == 1:
        return pts[0], pts[0]
    n = len(pts)
    gaps = [((pts[(i + 1) % n] - pts[i]) % 1, i) for i in range(n)]
    _, i = max(gaps, key=lambda g: (g[0], -g[1]))
    return pts[(i + 1) % n], pts[i]


@dataclass
class PushStep:
    step: int
    radius: Fraction
    measure: FinSuppMeasure
    concentrated: Fraction


def push_measure(mu: FinSuppMeasure, z, depth: int) -> list[PushStep]:
    """Push a finitely supported measure toward the point mass at z."""
    z = Fraction(z) % 1
    c, b = support_hull(list(mu.support) + [z])
    out = []
    for s in shrink_set(b, c, z, depth):
        nu = mu.push(s.element)
        out.append(PushStep(s.step, s.radius, nu, nu.mass_within(z, s.radius)))
    return out


def push_trace_csv(steps: Sequence[PushStep]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["step", "radius", "atom_images", "concentrated_mass"])
    for s in steps:
        atoms = ";".join(f"{format_point(p)}@{wt}" for p, wt in s.measure.atoms)
        w.writerow([s.step, s.radius, atoms, s.concentrated])
    return out.getvalue()


# -- minimality ----------------------------------------------------------------------------


@dataclass
class CellWitness:
    cell: Cell
    element: PLCircleAutomorphism
    image: object
    exact: bool
    distance: Fraction

    def to_json(self) -> dict:
        return {
            "cell": str(self.cell),
            "image": format_point(self.image),
            "exact": self.exact,
            "distance_bound": str(self.distance),
            "element": self.element.to_json(),
        }


@dataclass
class CoverageReport:
    point: SplitPoint
    cycle: Cycle
    witnesses: list = field(default_factory=list)
    resolution: Fraction = Fraction(1, 1024)

    @property
    def covered(self) -> int:
        return sum(1 for w in self.witnesses if w.exact or w.distance < self.resolution)

    @property
    def complete(self) -> bool:
        return self.covered == len(quotient(self.cycle))

    def to_json(self) -> dict:
        return {
            "point": str(self.point),
            "cycle": [format_point(t) for t in self.cycle],
            "cells": len(quotient(self.cycle)),
            "covered": self.covered,
            "complete": self.complete,
            "resolution": str(self.resolution),
            "witnesses": [w.to_json() for w in self.witnesses],
        }


def _bracket(xi: QuadraticIrrational, n: int) -> tuple[Fraction, Fraction]:
    j = xi.floor_scaled(n)
    return Fraction(j, n), Fraction(j + 1, n)


def minimality_probe(x: SplitPoint, F, resolution: Fraction = Fraction(1, 1024)) -> CoverageReport:
    """Orbit witnesses reaching every cell of X_F.

    A rational point is moved exactly onto each cell's representative.  An
    irrational point is moved into each arc cell exactly, and to within
    ``resolution`` of each point cell (rational points are never hit exactly
    by an irrational orbit).
    """
    F = F if isinstance(F, Cycle) else Cycle(F)
    q = quotient(F)
    report = CoverageReport(x, F, resolution=Fraction(resolution))
    v = x.value
    for cell in q.cells:
        target = cell.representative()
        if x.is_rational:
            g = extend_partial_iso(PartialIso([v], [target]))
        else:
            if cell.kind == "point":
                delta = Fraction(resolution) / 2
                a, b = (target - delta) % 1, (target + delta) % 1
            else:
                width = ((cell.right - cell.left) % 1) or Fraction(1)
                a = (cell.left + width / 3) % 1
                b = (cell.left + 2 * width / 3) % 1
            lo, hi = _bracket(v, 2)
            g = extend_partial_iso(PartialIso([lo % 1, hi % 1], [a, b]))
        image = g(v)
        exact = image in cell
        dist = Fraction(0) if exact else _distance_bound(image, target, report.resolution)
        report.witnesses.append(CellWitness(cell, g, image, exact, dist))
    return report


def _distance_bound(x, t, resolution: Fraction) -> Fraction:
    """Rational upper bound on the circular distance from x to the rational t."""
    if isinstance(x, Rational):
        return min((x - t) % 1, (t - x) % 1)
    n = 16
    while Fraction(1, n) > resolution / 16:
        n *= 2
    lo, _ = _bracket(x, n)
    lo %= 1
    return min((lo - t) % 1, (t - lo) % 1) + Fraction(1, n)


def coverage_json(report: CoverageReport) -> str:
    return json.dumps(report.to_json(), indent=2)
