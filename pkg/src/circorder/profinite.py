"""Finite quotients X_F of the rational circle and their inverse limit.

A cycle F = (t1, ..., tm) cuts the circle into 2m cells
t1, (t1, t2), t2, ..., tm, (tm, t1), or into {t1} and its complement when
m = 1.  Points of the inverse limit are handled through finite truncations:
a :class:`CoherentFamily` records one cell per level of an ascending chain.
"""

from __future__ import annotations

import itertools
import json
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .automorphisms import PLCircleAutomorphism, PartialIso, extend_partial_iso
from .core import CyclicSequence, Cycle
from .errors import ChainMismatch, InvalidCycle, InvalidPartialIso, MalformedInput, NotASubcycle
from .rational import Q_CIRCLE, dense_witness, format_point, parse_point


@dataclass(frozen=True)
class Cell:
    """A point cell {t} (left == right, kind "point") or an open arc cell.

    The arc cell with left == right is the punctured circle of the m = 1 case.
    """

    kind: str
    left: object
    right: object
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.kind, self.left, self.right)))

    def __hash__(self):
        return self._hash

    def __contains__(self, x) -> bool:
        if self.kind == "point":
            return x == self.left
        if x == self.left or x == self.right:
            return False
        if self.left == self.right:
            return True
        return Q_CIRCLE.triple(self.left, x, self.right)

    def representative(self) -> Fraction:
        """A rational point inside the cell."""
        if self.kind == "point":
            return self.left
        if self.left == self.right:
            return (self.left + Fraction(1, 2)) % 1
        return dense_witness(self.left, self.right)

    def image(self, g) -> "Cell":
        return Cell(self.kind, g(self.left), g(self.right))

    def __str__(self):
        if self.kind == "point":
            return format_point(self.left)
        return f"({format_point(self.left)},{format_point(self.right)})"

    def to_json(self):
        return {"kind": self.kind, "left": format_point(self.left), "right": format_point(self.right)}

    @classmethod
    def from_json(cls, data) -> "Cell":
        if data.get("kind") not in ("point", "arc"):
            raise MalformedInput(f"unknown cell kind {data.get('kind')!r}")
        left, right = parse_point(data["left"]), parse_point(data["right"])
        if data["kind"] == "point" and left != right:
            raise MalformedInput("a point cell needs equal endpoints")
        return cls(data["kind"], left, right)


def point_cell(t) -> Cell:
    return Cell("point", t, t)


def arc_cell(a, b) -> Cell:
    return Cell("arc", a, b)


class CycleQuotient:
    """The finite circularly ordered quotient X_F of a cycle F."""

    def __init__(self, cycle: Cycle):
        self.cycle = cycle
        pts = cycle.points
        m = len(pts)
        cells = []
        for i, t in enumerate(pts):
            cells.append(point_cell(t))
            cells.append(arc_cell(t, pts[(i + 1) % m]))
        self.cells = tuple(cells)
        self.order = CyclicSequence(self.cells)
        self._index = {c: i for i, c in enumerate(self.cells)}
        # sorted view for projection by bisection
        self._sorted = sorted(range(m), key=lambda i: pts[i])
        self._keys = [pts[i] for i in self._sorted]

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def index(self, cell: Cell) -> int:
        return self._index[cell]

    def triple(self, a: Cell, b: Cell, c: Cell) -> bool:
        return self.order.triple(a, b, c)

    def __contains__(self, cell) -> bool:
        return cell in self._index

    def project(self, x) -> Cell:
        keys = self._keys
        m = len(keys)
        j = bisect_left(keys, x)
        if j < m and keys[j] == x:
            return self.cells[2 * self._sorted[j]]
        # x lies between sorted neighbours keys[j-1] < x < keys[j] (cyclically)
        prev = self._sorted[(j - 1) % m]
        return self.cells[2 * prev + 1]


def cov_of_cycle(F) -> CycleQuotient:
    return CycleQuotient(F if isinstance(F, Cycle) else Cycle(F))


_QUOTIENTS: dict = {}


def quotient(F) -> CycleQuotient:
    """Cached :func:`cov_of_cycle`."""
    if not isinstance(F, Cycle):
        F = Cycle(F)
    q = _QUOTIENTS.get(F)
    if q is None:
        if len(_QUOTIENTS) > 200_000:
            _QUOTIENTS.clear()
        q = _QUOTIENTS[F] = cov_of_cycle(F)
    return q


def project(F, x) -> Cell:
    """pi_F: the cell of cov_F containing x."""
    return quotient(F if isinstance(F, Cycle) else Cycle(F)).project(x)


def is_subcycle(F1: Cycle, F2: Cycle) -> bool:
    """Set inclusion of supports; on the circle the cyclic orders then agree."""
    return len(F1) <= len(F2) and F1.support() <= F2.support()


class BondingMap:
    """f_{F1,F2}: X_{F2} -> X_{F1} for F1 <= F2."""

    def __init__(self, F1: Cycle, F2: Cycle):
        if not is_subcycle(F1, F2):
            raise NotASubcycle(f"{F1} is not a sub-cycle of {F2}")
        self.source = quotient(F2)
        self.target = quotient(F1)
        # Walking round F2, each cell lies in the F1 cell opened by the last
        # F1 point met: its point cell if the F2 point is in F1, else its arc.
        pos = {t: i for i, t in enumerate(F1.points)}
        pts = F2.points
        start = next(i for i, t in enumerate(pts) if t in pos)
        table = {}
        last = None
        for k in range(len(pts)):
            i = (start + k) % len(pts)
            t = pts[i]
            if t in pos:
                last = pos[t]
                table[self.source.cells[2 * i]] = self.target.cells[2 * last]
            else:
                table[self.source.cells[2 * i]] = self.target.cells[2 * last + 1]
            table[self.source.cells[2 * i + 1]] = self.target.cells[2 * last + 1]
        self.table = table

    def __call__(self, cell: Cell) -> Cell:
        return self.table[cell]

    def to_dot(self, name: str = "bonding") -> str:
        lines = [f'digraph "{name}" {{', "  rankdir=TB;"]
        for level, q in (("upper", self.source), ("lower", self.target)):
            lines.append(f"  subgraph {level} {{ rank=same;")
            for c in q.cells:
                lines.append(f'    "{level}:{c}" [label="{c}"];')
            lines.append("  }")
        for c, d in self.table.items():
            lines.append(f'  "upper:{c}" -> "lower:{d}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def bonding(F1, F2) -> BondingMap:
    F1 = F1 if isinstance(F1, Cycle) else Cycle(F1)
    F2 = F2 if isinstance(F2, Cycle) else Cycle(F2)
    return BondingMap(F1, F2)


def quotient_dot(F, chain: Sequence | None = None) -> str:
    """DOT with one rank per level: X_F for each cycle in the chain, bonding edges between."""
    chain = [F] if chain is None else list(chain)
    chain = [c if isinstance(c, Cycle) else Cycle(c) for c in chain]
    lines = ['digraph "quotient" {', "  rankdir=TB;"]
    for n, C in enumerate(chain):
        q = quotient(C)
        lines.append(f"  subgraph level{n} {{ rank=same;")
        for c in q.cells:
            lines.append(f'    "L{n}:{c}" [label="{c}"];')
        lines.append("  }")
        for i, c in enumerate(q.cells):
            d = q.cells[(i + 1) % len(q.cells)]
            if len(q.cells) > 1:
                lines.append(f'  "L{n}:{c}" -> "L{n}:{d}" [style=dotted];')
    for n in range(1, len(chain)):
        f = bonding(chain[n - 1], chain[n])
        for c, d in f.table.items():
            lines.append(f'  "L{n}:{c}" -> "L{n - 1}:{d}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- truncated inverse limits ---------------------------------------------------------


@dataclass(frozen=True)
class CoherentFamily:
    """One cell per level of an ascending chain of cycles, compatible under bonding."""

    chain: tuple
    cells: tuple

    def __init__(self, chain: Iterable, cells: Iterable, check: bool = True):
        chain = tuple(c if isinstance(c, Cycle) else Cycle(c) for c in chain)
        cells = tuple(cells)
        if len(chain) != len(cells) or not chain:
            raise ChainMismatch("need exactly one cell per level")
        if check:
            for i in range(len(chain)):
                if cells[i] not in quotient(chain[i]):
                    raise ChainMismatch(f"{cells[i]} is not a cell of X_{chain[i]}")
            for i in range(1, len(chain)):
                f = bonding(chain[i - 1], chain[i])
                if f(cells[i]) != cells[i - 1]:
                    raise ChainMismatch(f"levels {i - 1} and {i} are not compatible")
        object.__setattr__(self, "chain", chain)
        object.__setattr__(self, "cells", cells)

    @classmethod
    def of_point(cls, x, chain) -> "CoherentFamily":
        """The truncated image of a carrier point."""
        chain = [c if isinstance(c, Cycle) else Cycle(c) for c in chain]
        return cls(chain, [project(F, x) for F in chain], check=False)

    @classmethod
    def from_top(cls, chain, top: Cell) -> "CoherentFamily":
        """Family determined by its finest cell (bonding pushes it down the chain)."""
        chain = [c if isinstance(c, Cycle) else Cycle(c) for c in chain]
        cells = [top]
        for i in range(len(chain) - 1, 0, -1):
            cells.append(bonding(chain[i - 1], chain[i])(cells[-1]))
        return cls(chain, reversed(cells), check=False)

    def __str__(self):
        return " <- ".join(str(c) for c in self.cells)


def is_chain(chain: Sequence[Cycle]) -> bool:
    return all(is_subcycle(a, b) for a, b in zip(chain, chain[1:]))


def limit_triple(a: CoherentFamily, b: CoherentFamily, c: CoherentFamily) -> bool:
    """[a, b, c] in the limit: some level has three distinct, positively ordered cells."""
    if not (a.chain == b.chain == c.chain):
        raise ChainMismatch("families live on different chains")
    for F, x, y, z in zip(a.chain, a.cells, b.cells, c.cells):
        if len({x, y, z}) == 3 and quotient(F).triple(x, y, z):
            return True
    return False


def levels_agree(a: CoherentFamily, b: CoherentFamily, c: CoherentFamily) -> bool:
    """Every level with three distinct cells reports the same orientation."""
    seen = set()
    for F, x, y, z in zip(a.chain, a.cells, b.cells, c.cells):
        if len({x, y, z}) == 3:
            seen.add(quotient(F).triple(x, y, z))
    return len(seen) <= 1


def act_on_chain(g, chain: Sequence[Cycle]) -> tuple:
    return tuple(Cycle(g(t) for t in F) for F in chain)


def act_on_limit(g: PLCircleAutomorphism, x: CoherentFamily) -> CoherentFamily:
    """g_inf: the family over the image chain g F_1 <= ... <= g F_r."""
    return CoherentFamily(act_on_chain(g, x.chain), [c.image(g) for c in x.cells], check=False)


# -- precompactness ---------------------------------------------------------------------


@dataclass
class UniformBasisReport:
    ok: bool
    checked: int
    escapes: list
    precondition_violations: list

    def __bool__(self):
        return self.ok


def fixes_pointwise(v, F: Cycle) -> bool:
    return all(v(t) == t for t in F)


def uniform_basis_check(F, probes: Iterable[tuple]) -> UniformBasisReport:
    """For pairs (v, x) with v fixing F pointwise, confirm v(x) stays in x's cell."""
    F = F if isinstance(F, Cycle) else Cycle(F)
    q = quotient(F)
    escapes, violations, n = [], [], 0
    for v, x in probes:
        n += 1
        if not fixes_pointwise(v, F):
            violations.append((v, x))
            continue
        if q.project(v(x)) != q.project(x):
            escapes.append((v, x))
    return UniformBasisReport(not escapes and not violations, n, escapes, violations)


def stabilizer_witness(F, x, y) -> PLCircleAutomorphism:
    """v fixing F pointwise with v(x) = y, for x, y in the same cell."""
    F = F if isinstance(F, Cycle) else Cycle(F)
    if project(F, x) != project(F, y):
        raise InvalidCycle(f"{x} and {y} lie in different cells of X_{F}")
    if x == y:
        return extend_partial_iso(PartialIso(F.points, F.points))
    return extend_partial_iso(PartialIso(F.points + (x,), F.points + (y,)))


# -- double cosets ----------------------------------------------------------------------


@dataclass(frozen=True)
class DoubleCosetPattern:
    """Cell index of each g(t_i) in cov_F plus its rank among the occupants of that cell.

    Ranks inside an arc cell follow the cut order at the cell's left endpoint.
    """

    cycle: Cycle
    assignment: tuple  # (cell index, rank) per point of F

    def to_json(self) -> dict:
        q = quotient(self.cycle)
        return {
            "cycle": [format_point(t) for t in self.cycle],
            "assignment": [
                {"point": format_point(t), "cell": str(q.cells[i]), "cell_index": i, "rank": r}
                for t, (i, r) in zip(self.cycle, self.assignment)
            ],
        }

    @classmethod
    def from_json(cls, data) -> "DoubleCosetPattern":
        F = Cycle([parse_point(t) for t in data["cycle"]])
        assignment = tuple((int(a["cell_index"]), int(a["rank"])) for a in data["assignment"])
        if len(assignment) != len(F) or not all(0 <= i < 2 * len(F) for i, _ in assignment):
            raise MalformedInput("assignment does not fit the cycle")
        return cls(F, assignment)


def pattern_of(F, g) -> DoubleCosetPattern:
    F = F if isinstance(F, Cycle) else Cycle(F)
    q = quotient(F)
    images = [g(t) for t in F]
    cells = [q.index(q.project(y)) for y in images]
    ranks = []
    for i, y in enumerate(images):
        left = q.cells[cells[i]].left
        mates = [images[j] for j in range(len(images)) if cells[j] == cells[i]]
        ranks.append(sorted(mates, key=lambda u: (u - left) % 1).index(y))
    return DoubleCosetPattern(F, tuple(zip(cells, ranks)))


def _place(q: CycleQuotient, assignment) -> list | None:
    """Concrete rational images realizing an assignment, or None if inconsistent."""
    m = len(assignment)
    occupants = {}
    for i, (c, r) in enumerate(assignment):
        occupants.setdefault(c, []).append((r, i))
    out = [None] * m
    for c, occ in occupants.items():
        cell = q.cells[c]
        ranks = sorted(r for r, _ in occ)
        if ranks != list(range(len(occ))):
            return None
        if cell.kind == "point":
            if len(occ) > 1:
                return None
            out[occ[0][1]] = cell.left
            continue
        left = cell.left
        width = (cell.right - left) % 1 or Fraction(1)
        k = len(occ)
        for r, i in occ:
            out[i] = (left + width * Fraction(r + 1, k + 1)) % 1
    return out


def double_cosets(F) -> list[tuple[DoubleCosetPattern, PLCircleAutomorphism]]:
    """All V_F-double-coset patterns of Aut(Q/Z), each with a realizing PL element.

    Candidates are every assignment of F's points to cells with every rank
    order inside shared arc cells; a candidate is kept when the placed
    images are a c-order isomorphic copy of F.  Output is sorted by assignment.
    """
    F = F if isinstance(F, Cycle) else Cycle(F)
    q = quotient(F)
    m = len(F)
    out = []
    for cells in itertools.product(range(len(q)), repeat=m):
        groups = {}
        for i, c in enumerate(cells):
            groups.setdefault(c, []).append(i)
        per_cell = [itertools.permutations(range(len(v))) for v in groups.values()]
        keys = list(groups)
        for perms in itertools.product(*per_cell):
            ranks = [0] * m
            for c, perm in zip(keys, perms):
                for i, r in zip(groups[c], perm):
                    ranks[i] = r
            assignment = tuple(zip(cells, ranks))
            images = _place(q, assignment)
            if images is None:
                continue
            try:
                p = PartialIso(F.points, images)
            except InvalidPartialIso:
                continue
            g = extend_partial_iso(p)
            pattern = DoubleCosetPattern(F, assignment)
            if pattern_of(F, g) != pattern:
                raise AssertionError("realizing element does not reproduce its pattern")
            out.append((pattern, g))
    out.sort(key=lambda e: e[0].assignment)
    return out


def patterns_json(F) -> str:
    return json.dumps(
        [dict(p.to_json(), realizer=g.to_json()) for p, g in double_cosets(F)], indent=2
    )
