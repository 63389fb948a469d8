"""Circular orders: axioms, cuts, intervals, cycles and c-order preserving maps.

A *carrier* is anything with ``triple(a, b, c) -> bool`` and ``__contains__``.
Finite carriers additionally expose ``ground``.  Two finite representations are
provided: :class:`FiniteCircularOrder` stores the relation explicitly, while
:class:`CyclicSequence` answers triples from positions around a base point.
"""

from __future__ import annotations

import itertools
import json
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Callable, Hashable, Iterable, Sequence

from .errors import (
    CircOrderError,
    DegenerateInterval,
    ElementNotFound,
    InvalidCycle,
    MalformedInput,
)

AXIOMS = ("Distinctness", "Asymmetry", "Cyclicity", "Transitivity", "Totality")


@dataclass(frozen=True)
class AxiomReport:
    ok: bool
    axiom: str | None = None
    witness: tuple | None = None

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "pass"
        return f"fail({self.axiom}, witness {self.witness})"


class AxiomViolation(CircOrderError, ValueError):
    def __init__(self, report: AxiomReport):
        super().__init__(str(report))
        self.report = report


def check_axioms(ground: Sequence[Hashable], triples: Iterable[tuple]) -> AxiomReport:
    """Scan a candidate ternary relation for the first violated circular-order axiom.

    Axioms are tried in the order of ``AXIOMS``; within one axiom candidates
    are scanned in ground-index order, so the witness is deterministic.
    Relations on fewer than three points are empty and pass vacuously.
    """
    ground = list(ground)
    index = {x: i for i, x in enumerate(ground)}
    if len(index) != len(ground):
        raise MalformedInput("ground set has repeated ids")
    rel = set()
    for t in triples:
        t = tuple(t)
        if len(t) != 3:
            raise MalformedInput(f"not a triple: {t!r}")
        for x in t:
            if x not in index:
                raise MalformedInput(f"triple {t!r} references {x!r} outside the ground set")
        rel.add(t)
    ordered = sorted(rel, key=lambda t: tuple(index[x] for x in t))

    for a, b, c in ordered:
        if a == b or b == c or a == c:
            return AxiomReport(False, "Distinctness", (a, b, c))
    for a, b, c in ordered:
        if (b, a, c) in rel:
            return AxiomReport(False, "Asymmetry", (a, b, c))
    for a, b, c in ordered:
        if (b, c, a) not in rel:
            return AxiomReport(False, "Cyclicity", (a, b, c))
    by_first_last = defaultdict(list)
    for a, c, d in ordered:
        by_first_last[a, c].append(d)
    for a, b, c in ordered:
        for d in by_first_last[a, c]:
            if (a, b, d) not in rel:
                return AxiomReport(False, "Transitivity", (a, b, c, d))
    for a, b, c in itertools.permutations(ground, 3):
        if (a, b, c) not in rel and (a, c, b) not in rel:
            return AxiomReport(False, "Totality", (a, b, c))
    return AxiomReport(True)


def _canonical_rotation(t: tuple, index: dict) -> tuple:
    rots = [t, t[1:] + t[:1], t[2:] + t[:2]]
    return min(rots, key=lambda r: tuple(index[x] for x in r))


@dataclass(frozen=True)
class FiniteCircularOrder:
    """Explicit circular order: a ground tuple plus the full triple set R.

    Construction checks every axiom and raises :class:`AxiomViolation`.
    Sets with at most two elements carry the empty relation and pass vacuously.
    """

    ground: tuple
    triples: frozenset

    def __init__(self, ground: Iterable, triples: Iterable[tuple], check: bool = True):
        ground = tuple(ground)
        triples = frozenset(tuple(t) for t in triples)
        if check:
            report = check_axioms(ground, triples)
            if not report:
                raise AxiomViolation(report)
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "triples", triples)

    def triple(self, a, b, c) -> bool:
        return (a, b, c) in self.triples

    def __contains__(self, x) -> bool:
        return x in self.ground

    def __len__(self):
        return len(self.ground)

    def __eq__(self, other):
        if not isinstance(other, (FiniteCircularOrder, CyclicSequence)):
            return NotImplemented
        return set(self.ground) == set(other.ground) and self.triples == other.triples

    def __hash__(self):
        return hash((frozenset(self.ground), self.triples))

    def to_json(self) -> dict:
        """JSON form with each rotation class stored once in its least rotation."""
        index = {x: i for i, x in enumerate(self.ground)}
        reps = {_canonical_rotation(t, index) for t in self.triples}
        reps = sorted(reps, key=lambda t: tuple(index[x] for x in t))
        return {"ground": list(self.ground), "triples": [list(t) for t in reps]}

    @classmethod
    def from_json(cls, data, *, close_rotations: bool = True) -> "FiniteCircularOrder":
        ground, triples = parse_relation(data, close_rotations=close_rotations)
        return cls(ground, triples)

    def successor_dot(self, name: str = "corder") -> str:
        return successor_dot(self, name)


def parse_relation(data, *, close_rotations: bool = True) -> tuple[list, set]:
    """Read ``{"ground": [...], "triples": [[a,b,c], ...]}`` (dict or JSON text).

    With ``close_rotations`` every listed triple also contributes its two
    rotations, matching the canonical-rotation storage of ``to_json``.
    """
    if isinstance(data, str):
        data = json.loads(data)
    if not isinstance(data, dict) or "ground" not in data or "triples" not in data:
        raise MalformedInput('expected an object with "ground" and "triples"')
    ground = [_hashable(x) for x in data["ground"]]
    triples = set()
    for t in data["triples"]:
        if not isinstance(t, list) or len(t) != 3:
            raise MalformedInput(f"not a triple: {t!r}")
        t = tuple(_hashable(x) for x in t)
        triples.add(t)
        if close_rotations:
            triples.add(t[1:] + t[:1])
            triples.add(t[2:] + t[:2])
    return ground, triples


def _hashable(x):
    if isinstance(x, list):
        return tuple(_hashable(y) for y in x)
    return x


class CyclicSequence:
    """Implicit circular order of a finite set listed once around the circle.

    ``triple`` is answered from the rank of each element counted from the
    first listed element; no triple set is stored.
    """

    def __init__(self, sequence: Iterable):
        self.ground = tuple(sequence)
        self._rank = {x: i for i, x in enumerate(self.ground)}
        if len(self._rank) != len(self.ground):
            raise MalformedInput("cyclic sequence has repeated elements")

    def __contains__(self, x) -> bool:
        return x in self._rank

    def __len__(self):
        return len(self.ground)

    def rank(self, x) -> int:
        try:
            return self._rank[x]
        except KeyError:
            raise ElementNotFound(x) from None

    def triple(self, a, b, c) -> bool:
        if a == b or b == c or a == c:
            return False
        i, j, k = self.rank(a), self.rank(b), self.rank(c)
        return i < j < k or j < k < i or k < i < j

    @property
    def triples(self) -> frozenset:
        return frozenset(
            t for t in itertools.permutations(self.ground, 3) if self.triple(*t)
        )

    def to_explicit(self) -> FiniteCircularOrder:
        return FiniteCircularOrder(self.ground, self.triples, check=False)

    def __eq__(self, other):
        if not isinstance(other, (FiniteCircularOrder, CyclicSequence)):
            return NotImplemented
        return set(self.ground) == set(other.ground) and self.triples == other.triples

    def __hash__(self):
        return hash((frozenset(self.ground), self.triples))

    def __repr__(self):
        return f"CyclicSequence({list(self.ground)!r})"


def from_linear(order: Sequence) -> FiniteCircularOrder:
    """Standard circular order of a strict total order listed increasingly."""
    order = tuple(order)
    if len(set(order)) != len(order):
        raise MalformedInput("a strict total order cannot repeat elements")
    triples = set()
    for i, j, k in itertools.combinations(range(len(order)), 3):
        x, y, z = order[i], order[j], order[k]
        triples.update({(x, y, z), (y, z, x), (z, x, y)})
    return FiniteCircularOrder(order, triples, check=False)


@dataclass(frozen=True)
class LinearCut:
    """The linear order <_z obtained by cutting a c-ordered carrier at z."""

    base: object
    cutpoint: Hashable

    def less(self, a, b) -> bool:
        if a == b:
            return False
        if a == self.cutpoint:
            return True
        if b == self.cutpoint:
            return False
        return self.base.triple(self.cutpoint, a, b)

    def compare(self, a, b) -> int:
        if a == b:
            return 0
        return -1 if self.less(a, b) else 1

    def sort(self, elements: Iterable) -> list:
        return sorted(elements, key=cmp_to_key(self.compare))

    @property
    def order(self) -> tuple:
        """Ground set listed increasingly (finite carriers only)."""
        return tuple(self.sort(self.base.ground))


def cut_at(circ, z) -> LinearCut:
    if z not in circ:
        raise ElementNotFound(z)
    return LinearCut(circ, z)


@dataclass(frozen=True)
class Interval:
    """Oriented interval of a carrier; ``kind`` is "open", "closed" or "left_closed"."""

    base: object
    left: Hashable
    right: Hashable
    kind: str = "open"

    def __contains__(self, x) -> bool:
        if x == self.left:
            return self.kind in ("closed", "left_closed")
        if x == self.right:
            return self.kind == "closed"
        return self.base.triple(self.left, x, self.right)

    def members(self) -> frozenset:
        return frozenset(x for x in self.base.ground if x in self)


def interval(circ, a, b, kind: str = "open") -> Interval:
    """(a, b)_R = {x : [a, x, b]} (or its closed / half-closed variants).

    a == b is rejected; use :func:`punctured` for X minus a point.
    """
    if a == b:
        raise DegenerateInterval(f"interval with equal endpoints {a!r}")
    if kind not in ("open", "closed", "left_closed"):
        raise MalformedInput(f"unknown interval kind {kind!r}")
    for x in (a, b):
        if x not in circ:
            raise ElementNotFound(x)
    return Interval(circ, a, b, kind)


def punctured(circ, a) -> frozenset:
    return frozenset(x for x in circ.ground if x != a)


def _closed_members(circ, a, b) -> frozenset:
    if a == b:
        return frozenset({a})
    return interval(circ, a, b, "closed").members()


def topology_base(circ) -> dict:
    """Interval base of the c-order topology of a finite carrier.

    With at least three points this is {(a, b): (a, b)_R for a != b}; otherwise
    the complements X minus [a, b]_R together with X itself, keyed by (a, b)
    and by ``"X"``.
    """
    ground = tuple(circ.ground)
    if len(ground) >= 3:
        return {
            (a, b): interval(circ, a, b).members()
            for a, b in itertools.permutations(ground, 2)
        }
    everything = frozenset(ground)
    base = {"X": everything}
    for a, b in itertools.product(ground, repeat=2):
        base[a, b] = everything - _closed_members(circ, a, b)
    return base


def is_base(family: Iterable[frozenset], ground: Iterable) -> bool:
    """Union covers the ground set and every intersection is a union of members."""
    family = [frozenset(s) for s in family]
    ground = frozenset(ground)
    if frozenset().union(*family) != ground:
        return False
    for u, v in itertools.product(family, repeat=2):
        w = u & v
        for x in w:
            if not any(x in s and s <= w for s in family):
                return False
    return True


def hausdorff_witness(family: Iterable[frozenset], ground: Iterable):
    """Return (x, y) failing separation, or None when the family separates points."""
    family = [frozenset(s) for s in family]
    for x, y in itertools.combinations(list(ground), 2):
        if not any(
            x in u and y in v and not (u & v) for u in family for v in family
        ):
            return (x, y)
    return None


def triple_neighbourhoods(circ, a, b, c):
    """Base neighbourhoods U1, U2, U3 of a, b, c with every selection ordered.

    For finite carriers the intervals between the neighbours of a, b, c work
    whenever [a, b, c]; returns None if no such choice exists.
    """
    if not circ.triple(a, b, c):
        raise MalformedInput(f"[{a}, {b}, {c}] does not hold")
    base = topology_base(circ)
    candidates = {x: [s for s in base.values() if x in s] for x in (a, b, c)}
    for u1 in candidates[a]:
        for u2 in candidates[b]:
            for u3 in candidates[c]:
                if all(circ.triple(x, y, z) for x in u1 for y in u2 for z in u3):
                    return u1, u2, u3
    return None


# -- cycles -------------------------------------------------------------------


@dataclass(frozen=True)
class Cycle:
    """Injective tuple (t1, ..., tm) whose order agrees with the standard m-cycle."""

    points: tuple
    carrier: object = field(default=None, compare=False, repr=False)

    def __init__(self, points: Iterable, carrier=None):
        points = tuple(points)
        if carrier is None:
            from .rational import Q_CIRCLE, circle_point

            carrier = Q_CIRCLE
            points = tuple(circle_point(p) for p in points)
        if not points:
            raise InvalidCycle("a cycle needs at least one point")
        if len(set(points)) != len(points):
            raise InvalidCycle(f"cycle points are not distinct: {points}")
        for p in points:
            if p not in carrier:
                raise InvalidCycle(f"{p!r} is not in the carrier")
        for i, j, k in itertools.combinations(range(len(points)), 3):
            if not carrier.triple(points[i], points[j], points[k]):
                raise InvalidCycle(
                    f"[{points[i]}, {points[j]}, {points[k]}] fails in the carrier"
                )
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "carrier", carrier)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def rotations(self) -> list:
        m = len(self.points)
        return [self.points[i:] + self.points[:i] for i in range(m)]

    def equivalent(self, other: "Cycle") -> bool:
        return other.points in self.rotations()

    def normalized(self) -> "Cycle":
        """Rotate so the point listed first is least in the cut order at 0 (or ground order)."""
        ground = getattr(self.carrier, "ground", None)
        if ground is not None:
            index = {x: i for i, x in enumerate(ground)}
            i = min(range(len(self.points)), key=lambda i: index[self.points[i]])
        else:
            i = min(range(len(self.points)), key=lambda i: self.points[i])
        return Cycle(self.points[i:] + self.points[:i], self.carrier)

    def support(self) -> frozenset:
        return frozenset(self.points)

    def __str__(self):
        from .rational import format_point

        return "(" + ", ".join(format_point(p) if not isinstance(p, str) else p for p in self.points) + ")"


def cycle_of(points: Iterable, carrier=None) -> Cycle:
    """The cycle through a finite set, listed from its least point (cut at 0)."""
    pts = list(points)
    if carrier is None:
        from .rational import circle_point

        return Cycle(sorted({circle_point(p) for p in pts}))
    start = pts[0]
    return Cycle(cut_at(carrier, start).sort(set(pts)), carrier)


def is_cycle(carrier, xs: Sequence) -> bool:
    """Cycle test allowing repeats (conditions (1) and (2) of the cycle definition)."""
    n = len(xs)
    for i, j, k in itertools.combinations(range(n), 3):
        a, b, c = xs[i], xs[j], xs[k]
        if len({a, b, c}) == 3 and not carrier.triple(a, b, c):
            return False
    for i, k in itertools.permutations(range(n), 2):
        if xs[i] == xs[k]:
            fwd = [xs[(i + s) % n] for s in range((k - i) % n + 1)]
            bwd = [xs[(k + s) % n] for s in range((i - k) % n + 1)]
            if len(set(fwd)) != 1 and len(set(bwd)) != 1:
                return False
    return True


# -- c-order preserving maps ----------------------------------------------------


@dataclass(frozen=True)
class MapCheck:
    ok: bool
    condition: int | None = None
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def is_corder_preserving(
    f: Callable, probes: Iterable, domain=None, codomain=None
) -> MapCheck:
    """Check both c-order preservation conditions of f on a finite probe set.

    Condition 1: [a, b, c] with distinct images gives [f a, f b, f c].
    Condition 2: f a == f c forces f constant on [a, c] or on [c, a] (probes only).
    The witness for condition 2 is (a, c, u, v) with u in [a, c] and v in
    [c, a] both moved off f(a).
    """
    from .rational import Q_CIRCLE

    domain = Q_CIRCLE if domain is None else domain
    codomain = Q_CIRCLE if codomain is None else codomain
    pts = list(dict.fromkeys(probes))
    if domain is Q_CIRCLE and codomain is Q_CIRCLE:
        # Read in circle order, images with exactly one weak cyclic descent are
        # distinct and wind once around: f is then injective on the probes and
        # preserves their order.  Anything else goes to the full scan, which
        # also produces a deterministic witness.
        seq = [f(x) for x in sorted(pts)]
        n = len(seq)
        if sum(seq[i] >= seq[(i + 1) % n] for i in range(n)) == 1:
            return MapCheck(True)
    n = len(pts)
    # images are replaced by small integer ids so the scans below only hash
    # each image once; codomain triples are cached per id triple
    ids: dict = {}
    img = [ids.setdefault(f(x), len(ids)) for x in pts]
    reps = list(ids)
    if domain is Q_CIRCLE:
        pos = [0] * n
        for r, i in enumerate(sorted(range(n), key=pts.__getitem__)):
            pos[i] = r

        def dom(i, j, k):
            a, b, c = pos[i], pos[j], pos[k]
            return a < b < c or b < c < a or c < a < b

    else:

        def dom(i, j, k):
            return domain.triple(pts[i], pts[j], pts[k])

    seen: dict = {}

    def cod(u, v, w):
        key = (u, v, w)
        if key not in seen:
            seen[key] = codomain.triple(reps[u], reps[v], reps[w])
        return seen[key]

    for i, j, k in itertools.permutations(range(n), 3):
        u, v, w = img[i], img[j], img[k]
        if u != v and v != w and u != w and dom(i, j, k) and not cod(u, v, w):
            return MapCheck(False, 1, (pts[i], pts[j], pts[k]))
    for a, c in itertools.permutations(range(n), 2):
        if img[a] != img[c]:
            continue
        others = [x for x in range(n) if x != a and x != c and img[x] != img[a]]
        u = next((x for x in others if dom(a, x, c)), None)
        v = next((x for x in others if dom(c, x, a)), None)
        if u is not None and v is not None:
            return MapCheck(False, 2, (pts[a], pts[c], pts[u], pts[v]))
    return MapCheck(True)


def successor_dot(circ, name: str = "corder") -> str:
    """DOT digraph with an edge from each element to its clockwise successor."""
    ground = list(circ.ground)
    lines = [f'digraph "{name}" {{']
    for x in ground:
        lines.append(f'  "{x}";')
    if len(ground) >= 2:
        order = cut_at(circ, ground[0]).order
        for i, x in enumerate(order):
            lines.append(f'  "{x}" -> "{order[(i + 1) % len(order)]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
