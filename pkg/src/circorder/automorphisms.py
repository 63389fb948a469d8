"""Piecewise-linear automorphisms of the rational circle and Thompson's group T.

A :class:`PLCircleAutomorphism` is stored through its lift F: R -> R with
F(x + 1) = F(x) + 1.  The lift is the linear interpolation of finitely many
knots (x_i, F(x_i)), x_0 = 0 < x_1 < ... < 1, with 0 <= F(0) < 1.  Every
circle value is F(x) mod 1.
"""

from __future__ import annotations

import itertools
import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

from .errors import DomainError, InvalidPartialIso, MalformedInput
from .rational import Q_CIRCLE, QuadraticIrrational, is_dyadic

__all__ = [
    "PLCircleAutomorphism",
    "PartialIso",
    "ProbeVerdict",
    "extend_fixing",
    "extend_partial_iso",
    "identity",
    "north_south",
    "ping_pong_free_probe",
    "ping_pong_pair",
    "rotation",
    "thompson_extend",
]


class PLCircleAutomorphism:
    """Orientation-preserving PL bijection of the circle with rational data."""

    __slots__ = ("knots", "_xs", "_pieces")

    def __init__(self, knots: Sequence[tuple]):
        """Build from lifted knots (x, y); see :meth:`from_knots` for the general form."""
        knots = [(Fraction(x), Fraction(y)) for x, y in knots]
        self.knots = self._canonical(knots)
        self._xs = [x for x, _ in self.knots]
        closed = self.knots + ((Fraction(1), self.knots[0][1] + 1),)
        self._pieces = []
        for (x0, y0), (x1, y1) in zip(closed, closed[1:]):
            s = (y1 - y0) / (x1 - x0)
            self._pieces.append((x0, s, y0 - s * x0))

    @classmethod
    def from_knots(cls, knots: Iterable[tuple]) -> "PLCircleAutomorphism":
        """Linear interpolation of lifted knots (x_i, y_i) extended with period 1."""
        return cls(list(knots))

    @staticmethod
    def _canonical(knots):
        if not knots:
            raise MalformedInput("at least one knot is required")
        shifted = {}
        for x, y in knots:
            n = math.floor(x)
            x, y = x - n, y - n
            if x in shifted and shifted[x] != y:
                raise MalformedInput(f"conflicting knots at x={x}")
            shifted[x] = y
        pts = sorted(shifted.items())
        # lifted values must increase strictly and stay within one period
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if not y0 < y1:
                raise MalformedInput("knots are not strictly increasing")
        if not pts[-1][1] < pts[0][1] + 1:
            raise MalformedInput("knots wind more than once around the circle")
        if pts[0][0] != 0:
            (xl, yl), (xf, yf) = pts[-1], pts[0]
            xl, yl = xl - 1, yl - 1
            y0 = yl + (yf - yl) * (0 - xl) / (xf - xl)
            pts.insert(0, (Fraction(0), y0))
        shift = math.floor(pts[0][1])
        pts = [(x, y - shift) for x, y in pts]
        # drop knots where the slope does not change (0 is always kept)
        closed = pts + [(pts[0][0] + 1, pts[0][1] + 1)]
        keep = [pts[0]]
        for i in range(1, len(pts)):
            (xa, ya), (xb, yb), (xc, yc) = keep[-1], closed[i], closed[i + 1]
            if (yb - ya) * (xc - xb) != (yc - yb) * (xb - xa):
                keep.append(closed[i])
        return tuple(keep)

    # -- evaluation -------------------------------------------------------------

    def pieces(self) -> list[tuple[Fraction, Fraction, Fraction]]:
        """(start, slope, intercept) per piece of the lift on [0, 1)."""
        return list(self._pieces)

    def _piece_index(self, x) -> int:
        if isinstance(x, QuadraticIrrational):
            lo, hi = 0, len(self._xs)
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if self._xs[mid] < x:
                    lo = mid
                else:
                    hi = mid
            return lo
        return bisect_right(self._xs, x) - 1

    def lift(self, x) -> Fraction:
        """F(x) for any rational x."""
        x = Fraction(x)
        n = math.floor(x)
        r = x - n
        start, slope, intercept = self._pieces[self._piece_index(r)]
        return slope * r + intercept + n

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        """Exact image of a circle point (rational or quadratic irrational)."""
        if type(x) is Fraction and 0 <= x < 1:
            _, slope, intercept = self._pieces[bisect_right(self._xs, x) - 1]
            y = slope * x + intercept
            return y - (y.numerator // y.denominator)
        if isinstance(x, QuadraticIrrational):
            _, slope, intercept = self._pieces[self._piece_index(x)]
            return x.affine(slope, intercept)
        if not isinstance(x, Rational):
            raise DomainError(f"cannot evaluate at {x!r}")
        return self.lift(Fraction(x) % 1) % 1

    # -- group structure ----------------------------------------------------------

    def compose(self, other: "PLCircleAutomorphism") -> "PLCircleAutomorphism":
        """self o other (apply ``other`` first)."""
        inv = other.inverse()
        xs = {x for x, _ in other.knots}
        xs.update(inv.evaluate(x) for x, _ in self.knots)
        return PLCircleAutomorphism([(x, self.lift(other.lift(x))) for x in xs])

    __matmul__ = compose

    def __mul__(self, other):
        return self.compose(other)

    def inverse(self) -> "PLCircleAutomorphism":
        return PLCircleAutomorphism([(y, x) for x, y in self.knots])

    def __pow__(self, n: int) -> "PLCircleAutomorphism":
        base = self if n >= 0 else self.inverse()
        out = identity()
        for _ in range(abs(n)):
            out = base.compose(out)
        return out

    def conjugate(self, by: "PLCircleAutomorphism") -> "PLCircleAutomorphism":
        """by o self o by^-1."""
        return by.compose(self.compose(by.inverse()))

    def __eq__(self, other):
        if not isinstance(other, PLCircleAutomorphism):
            return NotImplemented
        return self.knots == other.knots

    def __hash__(self):
        return hash(self.knots)

    # -- structure --------------------------------------------------------------

    def breakpoints(self) -> list[Fraction]:
        """Circle points where the slope genuinely changes."""
        ps = self.pieces()
        out = [s for s, _, _ in ps[1:]]
        if ps[0][1] != ps[-1][1]:
            out.insert(0, Fraction(0))
        return out

    def slopes(self) -> list[Fraction]:
        return [s for _, s, _ in self.pieces()]

    def is_identity(self) -> bool:
        return self.knots == ((0, 0),)

    def is_thompson(self) -> bool:
        """Dyadic breakpoints, power-of-two slopes, dyadic image of 0."""
        ok_slope = all(
            s.numerator & (s.numerator - 1) == 0 and s.denominator & (s.denominator - 1) == 0
            for s in self.slopes()
        )
        return ok_slope and all(is_dyadic(x) and is_dyadic(y) for x, y in self.knots)

    def to_json(self) -> list:
        """[[breakpoint, slope, intercept], ...] as exact "p/q" strings."""
        return [[str(s), str(m), str(c)] for s, m, c in self.pieces()]

    @classmethod
    def from_json(cls, data) -> "PLCircleAutomorphism":
        rows = [(Fraction(s), Fraction(m), Fraction(c)) for s, m, c in data]
        if not rows or rows[0][0] != 0:
            raise MalformedInput("first piece must start at 0")
        knots = [(s, m * s + c) for s, m, c in rows]
        g = cls(knots)
        if g.pieces() != [p for p in _merge_rows(rows)]:
            raise MalformedInput("pieces are inconsistent (not continuous or not degree one)")
        return g

    def __repr__(self):
        inner = ", ".join(f"({x}, {y})" for x, y in self.knots)
        return f"PLCircleAutomorphism([{inner}])"


def _merge_rows(rows):
    out = []
    for s, m, c in rows:
        if out and out[-1][1] == m and out[-1][2] == c:
            continue
        out.append((s, m, c))
    return out


def identity() -> PLCircleAutomorphism:
    return PLCircleAutomorphism([(0, 0)])


def rotation(t) -> PLCircleAutomorphism:
    return PLCircleAutomorphism([(0, Fraction(t) % 1)])


# -- partial isomorphisms ----------------------------------------------------------


@dataclass(frozen=True)
class PartialIso:
    """Finite correspondence sources[i] -> targets[i] between circle points."""

    sources: tuple
    targets: tuple

    def __init__(self, sources: Iterable, targets: Iterable, carrier=Q_CIRCLE):
        from .rational import circle_point

        s = tuple(circle_point(x) for x in sources)
        t = tuple(circle_point(x) for x in targets)
        if len(s) != len(t) or not s:
            raise InvalidPartialIso("need two non-empty tuples of equal length")
        if len(set(s)) != len(s) or len(set(t)) != len(t):
            raise InvalidPartialIso("partial isomorphisms must be injective")
        for i, j, k in itertools.combinations(range(len(s)), 3):
            if carrier.triple(s[i], s[j], s[k]) != carrier.triple(t[i], t[j], t[k]):
                raise InvalidPartialIso(
                    f"orientation of ({s[i]}, {s[j]}, {s[k]}) is not preserved",
                    witness=(i, j, k),
                )
        object.__setattr__(self, "sources", s)
        object.__setattr__(self, "targets", t)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple]) -> "PartialIso":
        pairs = list(pairs)
        return cls([a for a, _ in pairs], [b for _, b in pairs])

    def __len__(self):
        return len(self.sources)

    def pairs(self):
        return list(zip(self.sources, self.targets))


def extend_partial_iso(p: PartialIso) -> PLCircleAutomorphism:
    """PL automorphism extending p, cut at the first listed pair.

    Both tuples are rotated so the first pair sits at 0, the representatives
    a'_i, b'_i in [0, 1) are joined by straight segments (closing with
    (1, 1)), and the result is rotated back.  A single pair gives a rotation.
    """
    if not isinstance(p, PartialIso):
        p = PartialIso.from_pairs(p)
    t1, u1 = p.sources[0], p.targets[0]
    knots = []
    for t, u in p.pairs():
        a = (t - t1) % 1
        b = (u - u1) % 1
        knots.append((t1 + a, u1 + b))
    return PLCircleAutomorphism(knots)


def extend_fixing(z, p: PartialIso) -> PLCircleAutomorphism:
    """Extension of p fixing z; p's points avoid z and keep their <_z order."""
    from .rational import circle_point

    z = circle_point(z)
    if not isinstance(p, PartialIso):
        p = PartialIso.from_pairs(p)
    if z in p.sources or z in p.targets:
        raise InvalidPartialIso(f"{z} must not occur among the partial iso's points")
    src_order = sorted(range(len(p)), key=lambda i: (p.sources[i] - z) % 1)
    tgt_order = sorted(range(len(p)), key=lambda i: (p.targets[i] - z) % 1)
    if src_order != tgt_order:
        i, j = next((i, j) for i, j in zip(src_order, tgt_order) if i != j)
        raise InvalidPartialIso(
            f"chains are not order-isomorphic in the cut order at {z}",
            witness=(i, j),
        )
    return extend_partial_iso(PartialIso((z,) + p.sources, (z,) + p.targets))


# -- Thompson's circular group ------------------------------------------------------


def _standard_pieces(a: Fraction, b: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Greedy decomposition of [a, b] (dyadic endpoints) into standard dyadic intervals."""
    out = []
    x = a
    while x < b:
        # largest 2**-k with x a multiple of it and x + 2**-k <= b
        size = Fraction(1)
        while not ((x / size).denominator == 1 and x + size <= b):
            size /= 2
        out.append((x, x + size))
        x += size
    return out


def _match_counts(left, right):
    """Halve the largest piece on the shorter side until both have equal counts."""
    left, right = list(left), list(right)
    while len(left) != len(right):
        side = left if len(left) < len(right) else right
        i = max(range(len(side)), key=lambda i: (side[i][1] - side[i][0], -i))
        lo, hi = side[i]
        mid = (lo + hi) / 2
        side[i : i + 1] = [(lo, mid), (mid, hi)]
    return left, right


def thompson_extend(p: PartialIso) -> PLCircleAutomorphism:
    """Element of Thompson's T extending a partial iso between dyadic points."""
    if not isinstance(p, PartialIso):
        p = PartialIso.from_pairs(p)
    for x in p.sources + p.targets:
        if not is_dyadic(x):
            raise DomainError(f"{x} is not a dyadic rational")
    t1, u1 = p.sources[0], p.targets[0]
    pairs = sorted(((t - t1) % 1, (u - u1) % 1) for t, u in p.pairs())
    chain = pairs + [(Fraction(1), Fraction(1))]
    knots = []
    for (a0, b0), (a1, b1) in zip(chain, chain[1:]):
        left, right = _match_counts(_standard_pieces(a0, a1), _standard_pieces(b0, b1))
        for (x, _), (y, _) in zip(left, right):
            knots.append((t1 + x, u1 + y))
    g = PLCircleAutomorphism(knots)
    assert g.is_thompson()
    return g


# -- free subgroup probe --------------------------------------------------------------

_INVERSE = {"g": "G", "G": "g", "h": "H", "H": "h"}


def format_word(word: Sequence[str]) -> str:
    names = {"g": "g", "G": "g⁻¹", "h": "h", "H": "h⁻¹"}
    return "·".join(names[c] for c in word)


@dataclass(frozen=True)
class ProbeVerdict:
    relation_found: bool
    word: tuple | None = None
    words_checked: int = 0

    @property
    def length(self):
        return len(self.word) if self.word else 0

    def __str__(self):
        if not self.relation_found:
            return f"no relation found ({self.words_checked} reduced words)"
        return f"relation found: {format_word(self.word)} (length {self.length})"


def ping_pong_free_probe(
    g: PLCircleAutomorphism, h: PLCircleAutomorphism, max_length: int, probes: Iterable
) -> ProbeVerdict:
    """Search reduced words in g, h of length <= max_length acting trivially on probes.

    Words are enumerated by length, then by letter order g, g^-1, h, h^-1; the
    first word fixing every probe is reported.  Finding none is evidence of
    freeness, never a proof.
    """
    if max_length < 1:
        raise DomainError("max_length must be >= 1")
    probes = tuple(probes)
    if not probes:
        raise DomainError("need at least one probe point")
    gens = {"g": g, "G": g.inverse(), "h": h, "H": h.inverse()}
    letters = "gGhH"
    level = [((), probes)]
    checked = 0
    for _ in range(max_length):
        nxt = []
        for word, images in level:
            for c in letters:
                if word and _INVERSE[c] == word[0]:
                    continue
                # words act right to left, so a new letter is applied last
                nxt.append(((c,) + word, tuple(gens[c](x) for x in images)))
        nxt.sort(key=lambda e: [letters.index(c) for c in e[0]])
        for word, images in nxt:
            checked += 1
            if images == probes:
                return ProbeVerdict(True, word, checked)
        level = nxt
    return ProbeVerdict(False, None, checked)


def north_south(attractor, repeller, strength: int = 4) -> PLCircleAutomorphism:
    """PL map fixing ``attractor`` and ``repeller`` and pushing everything else
    toward ``attractor``; the arc midpoints move to 1/strength of their distance."""
    a, r = Fraction(attractor) % 1, Fraction(repeller) % 1
    if a == r:
        raise DomainError("attractor and repeller must differ")
    right = (r - a) % 1  # length of arc from a to r
    left = 1 - right
    knots = [
        (a, a),
        (a + right / 2, a + right / (2 * strength)),
        (a + right, a + right),
        (a + right + left / 2, a + 1 - left / (2 * strength)),
    ]
    return PLCircleAutomorphism(knots)


def ping_pong_pair() -> tuple[PLCircleAutomorphism, PLCircleAutomorphism]:
    """North-south map on (0, 1/2) and its conjugate by the rotation by 1/4."""
    g = north_south(0, Fraction(1, 2))
    h = g.conjugate(rotation(Fraction(1, 4)))
    return g, h
