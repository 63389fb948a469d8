"""Ordered field towers Q(a1, ..., an), each a_n a positive infinitesimal over the previous level.

An element of level n is a quotient of polynomials in a1, ..., an over Q.
Read as a polynomial in a_n with coefficients from level n - 1, its sign is
the sign of the lowest-degree nonzero coefficient, recursively.  On monomials
this means the dominant term is the one with the smallest exponent of a_n,
with ties broken by a_{n-1} and so on down to a1.  Finite elements modulo the
integers form a circularly ordered group, and :func:`pl_extend_k` is the
piecewise-linear map witnessing its ultrahomogeneity.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Sequence

from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from .errors import DomainError, MalformedInput, ResourceBoundExceeded

DEFAULT_DEPTH = 3
MAX_DEGREE = 256

NEGATIVE, ZERO, POSITIVE = -1, 0, 1


@lru_cache(maxsize=None)
def _ring(n: int):
    return ring(",".join(f"a{i}" for i in range(1, n + 1)), QQ)[0]


def _frac(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def _significance(e: tuple) -> tuple:
    return e[::-1]


def _dominant(p):
    """(exponents, coefficient) of the term that decides the sign of p."""
    monom = min(p.keys(), key=_significance)
    return monom, p[monom]


def _check_degree(p):
    if p and max(sum(e) for e in p.keys()) > MAX_DEGREE:
        raise ResourceBoundExceeded(f"polynomial degree exceeds {MAX_DEGREE}")


class TowerElement:
    """Element of Q(a1, ..., a_level); level 0 is a plain rational.

    At level n >= 1, ``num`` and ``den`` are coprime polynomials in
    QQ[a1..an], and the dominant coefficient of ``den`` is 1, which makes the
    representation canonical.  :meth:`coefficients` gives the recursive view
    as polynomials in a_n over level n - 1.
    """

    __slots__ = ("level", "value", "num", "den", "_hash")

    def __init__(self, level: int, value=None, num=None, den=None):
        self.level = level
        self._hash = None
        if level == 0:
            self.value = value if type(value) is Fraction else Fraction(value if value is not None else 0)
            self.num = self.den = None
            return
        R = _ring(level)
        self.value = None
        num = R(0) if num is None else num
        den = R(1) if den is None else den
        if not den:
            raise ZeroDivisionError("zero denominator")
        self.num, self.den = _normalize(num, den, R)

    @classmethod
    def _raw(cls, level, num, den) -> "TowerElement":
        x = object.__new__(cls)
        x.level, x.value, x.num, x.den, x._hash = level, None, num, den, None
        return x

    @classmethod
    def rational(cls, q) -> "TowerElement":
        return cls(0, Fraction(q))

    @classmethod
    def generator(cls, n: int) -> "TowerElement":
        if n < 1:
            raise DomainError("generators are numbered from 1")
        R = _ring(n)
        return cls._raw(n, R.gens[n - 1], R(1))

    # -- arithmetic

    def _pair(self, other):
        if type(other) is TowerElement and other.level == self.level:
            return self, other, self.level
        other = coerce(other)
        n = max(self.level, other.level)
        return lift(self, n), lift(other, n), n

    def __add__(self, other):
        try:
            a, b, n = self._pair(other)
        except TypeError:
            return NotImplemented
        if n == 0:
            return TowerElement(0, a.value + b.value)
        if a.den == b.den:
            return TowerElement(n, num=a.num + b.num, den=a.den)
        return TowerElement(n, num=a.num * b.den + b.num * a.den, den=a.den * b.den)

    __radd__ = __add__

    def __neg__(self):
        if self.level == 0:
            return TowerElement(0, -self.value)
        return TowerElement._raw(self.level, -self.num, self.den)

    def __sub__(self, other):
        try:
            return self + (-coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return coerce(other) - self

    def __mul__(self, other):
        try:
            a, b, n = self._pair(other)
        except TypeError:
            return NotImplemented
        if n == 0:
            return TowerElement(0, a.value * b.value)
        return TowerElement(n, num=a.num * b.num, den=a.den * b.den)

    __rmul__ = __mul__

    def inverse(self) -> "TowerElement":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in the tower")
        if self.level == 0:
            return TowerElement(0, 1 / self.value)
        return TowerElement(self.level, num=self.den, den=self.num)

    def __truediv__(self, other):
        try:
            return self * coerce(other).inverse()
        except TypeError:
            return NotImplemented

    def __rtruediv__(self, other):
        return coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0 and self.is_zero():
            raise ZeroDivisionError("division by zero in the tower")
        if self.level == 0:
            return TowerElement(0, self.value**k)
        base = self if k >= 0 else self.inverse()
        return TowerElement(self.level, num=base.num ** abs(k), den=base.den ** abs(k))

    # -- comparison

    def is_zero(self) -> bool:
        return self.value == 0 if self.level == 0 else not self.num

    def __bool__(self):
        return not self.is_zero()

    def sign(self) -> int:
        """Sign of the dominant coefficient of the numerator (the denominator's is 1)."""
        if self.level == 0:
            return (self.value > 0) - (self.value < 0)
        if not self.num:
            return ZERO
        return POSITIVE if _dominant(self.num)[1] > 0 else NEGATIVE

    def __eq__(self, other):
        try:
            a, b, n = self._pair(other)
        except TypeError:
            return NotImplemented
        if n == 0:
            return a.value == b.value
        return a.num * b.den == b.num * a.den

    def __hash__(self):
        if self._hash is None:
            x = _drop_level(self)
            if x.level == 0:
                self._hash = hash(x.value)
            else:
                self._hash = hash((x.level, frozenset(x.num.items()), frozenset(x.den.items())))
        return self._hash

    def _cmp_sign(self, other) -> int:
        return (self - coerce(other)).sign()

    def __lt__(self, other):
        return self._cmp_sign(other) < 0

    def __le__(self, other):
        return self._cmp_sign(other) <= 0

    def __gt__(self, other):
        return self._cmp_sign(other) > 0

    def __ge__(self, other):
        return self._cmp_sign(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- finiteness

    def _valuation(self) -> tuple[tuple, Fraction]:
        """Dominant exponent vector (a_n first) and the ratio of dominant coefficients."""
        en, cn = _dominant(self.num)
        ed, cd = _dominant(self.den)
        v = tuple(i - j for i, j in zip(_significance(en), _significance(ed)))
        return v, _frac(cn) / _frac(cd)

    def is_finite(self) -> bool:
        """True when |x| <= m for some integer m, i.e. the valuation is lexicographically >= 0."""
        if self.level == 0 or self.is_zero():
            return True
        v, _ = self._valuation()
        return v >= (0,) * len(v)

    def standard_part(self) -> Fraction:
        """The rational infinitely close to a finite element."""
        if self.level == 0:
            return self.value
        if self.is_zero():
            return Fraction(0)
        v, c = self._valuation()
        zero = (0,) * len(v)
        if v < zero:
            raise DomainError(f"{self} is not finite")
        return c if v == zero else Fraction(0)

    def floor(self) -> int:
        """Unique integer m with m <= x < m + 1 (finite elements only)."""
        if not self.is_finite():
            raise DomainError(f"{self} is not finite, so it has no floor")
        m = math.floor(self.standard_part())
        while (self - m).sign() < 0:
            m -= 1
        while (self - (m + 1)).sign() >= 0:
            m += 1
        return m

    def mod1(self) -> "CirclePointK":
        return CirclePointK(self - self.floor())

    # -- recursive view

    def coefficients(self) -> tuple[tuple, tuple]:
        """Numerator and denominator as coefficient tuples in a_level, lowest degree first.

        Each coefficient is an element of level - 1.
        """
        if self.level == 0:
            raise DomainError("level-0 elements have no generator")
        return _split(self.num, self.level), _split(self.den, self.level)

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"TowerElement({format_element(self)!r})"


def _normalize(num, den, R):
    if not num:
        return R(0), R(1)
    num, den = num.cancel(den)
    c = _dominant(den)[1]
    if c != 1:
        num, den = num.quo_ground(c), den.quo_ground(c)
    _check_degree(num)
    _check_degree(den)
    return num, den


def _drop_level(x: TowerElement) -> TowerElement:
    """The same value at the lowest level whose generators it uses."""
    while x.level > 0:
        n = x.level
        if any(e[n - 1] for e in x.num.keys()) or any(e[n - 1] for e in x.den.keys()):
            return x
        if n == 1:
            if not x.num:
                return TowerElement(0, Fraction(0))
            return TowerElement(0, _frac(x.num[(0,)]) / _frac(x.den[(0,)]))
        R = _ring(n - 1)
        x = TowerElement._raw(
            n - 1,
            R.from_dict({e[:-1]: c for e, c in x.num.items()}),
            R.from_dict({e[:-1]: c for e, c in x.den.items()}),
        )
    return x


def _split(p, n: int) -> tuple:
    if not p:
        return ()
    deg = max(e[n - 1] for e in p.keys())
    out = []
    for k in range(deg + 1):
        part = {e[:-1]: c for e, c in p.items() if e[n - 1] == k}
        if n == 1:
            out.append(TowerElement(0, _frac(part[()]) if part else Fraction(0)))
        else:
            R = _ring(n - 1)
            out.append(TowerElement._raw(n - 1, R.from_dict(part), R(1)))
    return tuple(out)


def coerce(x) -> TowerElement:
    if isinstance(x, TowerElement):
        return x
    if isinstance(x, (int, Rational)):
        return TowerElement(0, Fraction(x))
    raise TypeError(f"cannot use {x!r} as a tower element")


def lift(x, level: int) -> TowerElement:
    """Embed x into the given level, which must not be below its own."""
    x = coerce(x)
    if x.level == level:
        return x
    if x.level > level:
        raise DomainError(f"cannot lower a level-{x.level} element to level {level}")
    R = _ring(level)
    if x.level == 0:
        q = x.value
        return TowerElement._raw(level, R.ground_new(QQ(q.numerator, q.denominator)), R(1))
    return TowerElement._raw(level, x.num.set_ring(R), x.den.set_ring(R))


def alpha(n: int) -> TowerElement:
    return TowerElement.generator(n)


def sign(x) -> int:
    return coerce(x).sign()


def is_finite(x) -> bool:
    return coerce(x).is_finite()


def floor(x) -> int:
    return coerce(x).floor()


def mod1(x) -> "CirclePointK":
    return coerce(x).mod1()


# -- fin(k)/Z ----------------------------------------------------------------------------


@dataclass(frozen=True)
class CirclePointK:
    """Class of a finite element modulo Z, stored by its representative in [0, 1)."""

    rep: TowerElement

    def __post_init__(self):
        r = coerce(self.rep)
        if not r.is_finite():
            raise DomainError("only finite elements define circle points")
        if r.sign() < 0 or (r - 1).sign() >= 0:
            r = r - r.floor()
        object.__setattr__(self, "rep", r)

    def __eq__(self, other):
        if not isinstance(other, CirclePointK):
            return NotImplemented
        return self.rep == other.rep

    def __hash__(self):
        return hash(self.rep)

    def __lt__(self, other):
        return self.rep < other.rep

    def __str__(self):
        return f"[{self.rep}]"


def circ_triple_k(a: CirclePointK, b: CirclePointK, c: CirclePointK) -> bool:
    if a == b or b == c or a == c:
        raise DomainError("circ_triple_k needs distinct points")
    x, y, z = a.rep, b.rep, c.rep
    return (x < y < z) or (y < z < x) or (z < x < y)


class KCircle:
    """fin(k)/Z as a c-ordered carrier."""

    def __contains__(self, x) -> bool:
        return isinstance(x, CirclePointK)

    def triple(self, a, b, c) -> bool:
        if a == b or b == c or a == c:
            return False
        return circ_triple_k(a, b, c)


K_CIRCLE = KCircle()


class PLMapK:
    """Piecewise-linear increasing bijection of [0, 1)_k with f(a[i]) = b[i]."""

    def __init__(self, a: Sequence, b: Sequence):
        a = [coerce(x) for x in a]
        b = [coerce(x) for x in b]
        if len(a) != len(b) or not a:
            raise DomainError("chains must be non-empty and of equal length")
        for chain in (a, b):
            if not chain[0].is_zero():
                raise DomainError("chains must start at 0")
            if any(not x < y for x, y in zip(chain, chain[1:])):
                raise DomainError("chains must be strictly increasing")
            if not chain[-1] < 1:
                raise DomainError("chains must stay below 1")
        self.a = a + [coerce(1)]
        self.b = b + [coerce(1)]
        self._slopes = [
            (self.b[i + 1] - self.b[i]) / (self.a[i + 1] - self.a[i]) for i in range(len(self.a) - 1)
        ]

    def slopes(self) -> list[TowerElement]:
        return list(self._slopes)

    def __call__(self, x) -> TowerElement:
        x = x.rep if isinstance(x, CirclePointK) else coerce(x)
        if x.sign() < 0 or not x < 1:
            raise DomainError("argument must lie in [0, 1)")
        i = 0
        while not x < self.a[i + 1]:
            i += 1
        return self.b[i] + self._slopes[i] * (x - self.a[i])


def pl_extend_k(a: Sequence, b: Sequence) -> PLMapK:
    return PLMapK(a, b)


def circle_map_k(sources: Sequence[CirclePointK], targets: Sequence[CirclePointK]):
    """C-order automorphism of fin(k)/Z sending sources[i] to targets[i].

    Both tuples are rotated so their first points sit at 0; the resulting
    representatives are joined by :class:`PLMapK` and the rotation undone.
    """
    s0, t0 = sources[0].rep, targets[0].rep
    a = [CirclePointK(p.rep - s0).rep for p in sources]
    b = [CirclePointK(p.rep - t0).rep for p in targets]
    order = sorted(range(len(a)), key=lambda i: a[i])
    f = PLMapK([a[i] for i in order], [b[i] for i in order])

    def g(x: CirclePointK) -> CirclePointK:
        return CirclePointK(f(CirclePointK(x.rep - s0)) + t0)

    return g


# -- text forms ---------------------------------------------------------------------------


def _rat_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _poly_str(p) -> str:
    """Terms from the dominant one down."""
    if not p:
        return "0"
    out = ""
    for e in sorted(p.keys(), key=_significance):
        q = _frac(p[e])
        mono = "*".join(f"a{i + 1}" if k == 1 else f"a{i + 1}^{k}" for i, k in enumerate(e) if k)
        mag = abs(q)
        body = mono if (mag == 1 and mono) else "*".join(s for s in (_rat_str(mag), mono) if s)
        if not out:
            out = ("-" if q < 0 else "") + body
        else:
            out += (" - " if q < 0 else " + ") + body
    return out


def format_element(x: TowerElement) -> str:
    if x.level == 0:
        return _rat_str(x.value)
    num = _poly_str(x.num)
    if x.den == 1:
        return num
    return f"({num})/({_poly_str(x.den)})"


class Tower:
    """Q(a1, ..., a_depth) with an explicit depth bound."""

    def __init__(self, depth: int = DEFAULT_DEPTH):
        if depth < 0:
            raise DomainError("depth must be non-negative")
        self.depth = depth

    def alpha(self, n: int) -> TowerElement:
        if not 1 <= n <= self.depth:
            raise ResourceBoundExceeded(f"generator a{n} exceeds tower depth {self.depth}")
        return alpha(n)

    def parse(self, text: str) -> TowerElement:
        """Parse expressions such as ``(1 - 2*a1 + a1^2)/(3*a2)``."""
        try:
            tree = ast.parse(text.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise MalformedInput(f"cannot parse {text!r}") from exc
        return self._eval(tree.body)

    def _eval(self, node) -> TowerElement:
        if isinstance(node, ast.Constant) and type(node.value) is int:
            return coerce(node.value)
        if isinstance(node, ast.Name):
            name = node.id
            if name == "a":
                return self.alpha(1)
            if name.startswith("a") and name[1:].isdigit():
                return self.alpha(int(name[1:]))
            raise MalformedInput(f"unknown symbol {name!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = self._eval(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                exp = node.right
                neg = isinstance(exp, ast.UnaryOp) and isinstance(exp.op, ast.USub)
                if neg:
                    exp = exp.operand
                if not (isinstance(exp, ast.Constant) and type(exp.value) is int):
                    raise MalformedInput("exponents must be integer literals")
                if exp.value > MAX_DEGREE:
                    raise ResourceBoundExceeded(f"exponent {exp.value} exceeds {MAX_DEGREE}")
                base = self._eval(node.left)
                if neg and base.is_zero():
                    raise MalformedInput("division by zero")
                return base ** (-exp.value if neg else exp.value)
            a, b = self._eval(node.left), self._eval(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                if b.is_zero():
                    raise MalformedInput("division by zero")
                return a / b
        raise MalformedInput(f"unsupported syntax: {ast.dump(node)}")


def parse_element(text: str, depth: int = DEFAULT_DEPTH) -> TowerElement:
    return Tower(depth).parse(text)
