"""Exact models of the rational circle Q/Z, the dyadic circle and quadratic irrationals.

Rational circle points are plain :class:`fractions.Fraction` values reduced into
``[0, 1)``.  Irrational points are :class:`QuadraticIrrational` values, which
compare exactly against rationals and against each other using only integer
arithmetic.
"""

from __future__ import annotations

import ast
import math
import re
from fractions import Fraction
from functools import total_ordering
from numbers import Rational

from .errors import DomainError, MalformedInput

__all__ = [
    "QCircle",
    "Q_CIRCLE",
    "QuadraticIrrational",
    "circ_triple",
    "circle_point",
    "cmp_exact",
    "dense_witness",
    "dyadic",
    "format_point",
    "is_dyadic",
    "parse_point",
    "rational_between",
    "rational_point",
]


def rational_point(x) -> Fraction:
    """Reduce a rational (or its textual form) into [0, 1)."""
    return Fraction(x) % 1


def dyadic(numerator: int, exponent: int) -> Fraction:
    if exponent < 0:
        raise DomainError("dyadic exponent must be non-negative")
    return Fraction(numerator, 2**exponent) % 1


def is_dyadic(q) -> bool:
    if not isinstance(q, Rational):
        return False
    den = Fraction(q).denominator
    return den & (den - 1) == 0


def _squarefree_split(d: int) -> tuple[int, int]:
    """Write d = s**2 * r with r squarefree; return (s, r)."""
    s, r = 1, d
    f = 2
    while f * f <= r:
        while r % (f * f) == 0:
            r //= f * f
            s *= f
        f += 1
    return s, r


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _sign_quadratic(p: Fraction, q: Fraction, d: int) -> int:
    """Exact sign of p + q*sqrt(d) for d a positive non-square."""
    sp, sq = _sign(p), _sign(q)
    if sq == 0:
        return sp
    if sp == 0 or sp == sq:
        return sq
    # opposite signs: the larger magnitude wins; p**2 == q**2 * d is impossible
    return sp if p * p > q * q * d else sq


def _sign_two_roots(u: Fraction, v: Fraction, d: int, w: Fraction, e: int) -> int:
    """Exact sign of u + v*sqrt(d) + w*sqrt(e) for distinct squarefree d, e."""
    s1 = _sign_quadratic(u, v, d)
    s2 = _sign(w)
    if s2 == 0:
        return s1
    if s1 == 0 or s1 == s2:
        return s2
    # compare (u + v sqrt d)**2 against w**2 e
    t = _sign_quadratic(u * u + v * v * d - w * w * e, 2 * u * v, d)
    return s1 if t > 0 else s2


@total_ordering
class QuadraticIrrational:
    """The circle point ((a + b*sqrt(d)) / c) mod 1.

    The constructor normalizes: d is made squarefree, the triple (a, b, c) is
    reduced by its gcd with c > 0, and a is shifted so the value lies in [0, 1).
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: int, b: int, c: int, d: int):
        if c == 0:
            raise MalformedInput("denominator must be nonzero")
        if b == 0:
            raise DomainError("b must be nonzero for an irrational value")
        if d <= 1:
            raise DomainError(f"d={d} must be a non-square integer > 1")
        s, r = _squarefree_split(d)
        if r == 1:
            raise DomainError(f"d={d} is a perfect square")
        b *= s
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(math.gcd(a, b), c)
        a, b, c = a // g, b // g, c // g
        a -= c * self._floor_of(a, b, c, r)
        self.a, self.b, self.c, self.d = a, b, c, r

    @staticmethod
    def _floor_of(a: int, b: int, c: int, d: int) -> int:
        root = math.isqrt(b * b * d)  # floor(|b| sqrt d), never exact
        if b > 0:
            return (a + root) // c
        return (a - root - 1) // c

    @classmethod
    def from_parts(cls, p, q, d: int) -> "QuadraticIrrational":
        """Build (p + q*sqrt(d)) mod 1 from rational p, q."""
        p, q = Fraction(p), Fraction(q)
        c = p.denominator * q.denominator // math.gcd(p.denominator, q.denominator)
        return cls(int(p * c), int(q * c), c, d)

    @property
    def parts(self) -> tuple[Fraction, Fraction]:
        """(p, q) with value p + q*sqrt(d)."""
        return Fraction(self.a, self.c), Fraction(self.b, self.c)

    def floor_scaled(self, n: int) -> int:
        """floor(n * value) for a positive integer n."""
        return self._floor_of(n * self.a, n * self.b, self.c, self.d)

    def affine(self, slope, intercept) -> "QuadraticIrrational":
        """(slope * value + intercept) mod 1, for rational slope != 0."""
        p, q = self.parts
        slope = Fraction(slope)
        return QuadraticIrrational.from_parts(slope * p + Fraction(intercept), slope * q, self.d)

    def _cmp(self, other) -> int:
        p, q = self.parts
        if isinstance(other, QuadraticIrrational):
            p2, q2 = other.parts
            if other.d == self.d:
                return _sign_quadratic(p - p2, q - q2, self.d)
            return _sign_two_roots(p - p2, q, self.d, -q2, other.d)
        if isinstance(other, Rational):
            return _sign_quadratic(p - Fraction(other), q, self.d)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, QuadraticIrrational):
            return (self.a, self.b, self.c, self.d) == (other.a, other.b, other.c, other.d)
        if isinstance(other, Rational):
            return False
        return NotImplemented

    def __hash__(self):
        return hash(("QI", self.a, self.b, self.c, self.d))

    def __lt__(self, other):
        r = self._cmp(other)
        return r if r is NotImplemented else r < 0

    def __float__(self):
        return (self.a + self.b * math.sqrt(self.d)) / self.c

    def __repr__(self):
        return f"QuadraticIrrational({self.a}, {self.b}, {self.c}, {self.d})"

    def __str__(self):
        root = f"√{self.d}" if abs(self.b) == 1 else f"{abs(self.b)}√{self.d}"
        if self.a:
            body = f"{self.a}{'+' if self.b > 0 else '-'}{root}"
        else:
            body = root if self.b > 0 else f"-{root}"
        if self.c == 1:
            return body
        return f"({body})/{self.c}" if self.a or self.b < 0 else f"{body}/{self.c}"


def circle_point(x):
    """Normalize a rational or quadratic irrational into the circle [0, 1)."""
    if isinstance(x, QuadraticIrrational):
        return x
    if isinstance(x, Rational):
        return Fraction(x) % 1
    if isinstance(x, str):
        return parse_point(x)
    raise MalformedInput(f"not a circle point: {x!r}")


def cmp_exact(p: QuadraticIrrational, q) -> int:
    """Sign of p - q; never 0 since p is irrational and q rational."""
    return p._cmp(Fraction(q))


def circ_triple(a, b, c) -> bool:
    """Standard circular order of the circle, read on representatives in [0, 1)."""
    if a == b or b == c or a == c:
        raise DomainError(f"circ_triple needs distinct points, got {a}, {b}, {c}")
    return (a < b < c) or (b < c < a) or (c < a < b)


def dense_witness(a, b) -> Fraction:
    """Circular midpoint of the arc from a to b (exclusive)."""
    a, b = Fraction(a) % 1, Fraction(b) % 1
    if a == b:
        raise DomainError("dense_witness needs distinct points")
    if b < a:
        b += 1
    return ((a + b) / 2) % 1


def _lt_lifted(j: int, n: int, y, wrapped: bool) -> bool:
    """j/n < y (+1 if wrapped)."""
    q = Fraction(j, n) - (1 if wrapped else 0)
    return q < y


def rational_between(x, y) -> Fraction:
    """Some rational strictly inside the arc (x, y) of the circle.

    Works for any mix of rational and quadratic irrational endpoints; the
    returned point is the dyadic with the smallest denominator found by a
    left-to-right scan.
    """
    if x == y:
        raise DomainError("rational_between needs distinct points")
    if isinstance(x, Rational) and isinstance(y, Rational):
        return dense_witness(x, y)
    wrapped = y < x
    n = 1
    while True:
        if isinstance(x, QuadraticIrrational):
            j = x.floor_scaled(n) + 1
        else:
            j = math.floor(Fraction(x) * n) + 1
        if _lt_lifted(j, n, y, wrapped):
            return Fraction(j, n) % 1
        n *= 2


class QCircle:
    """The rational circle as a c-ordered carrier (membership + triple queries)."""

    def __contains__(self, x) -> bool:
        return isinstance(x, Rational) and 0 <= x < 1

    def triple(self, a, b, c) -> bool:
        if a == b or b == c or a == c:
            return False
        return circ_triple(a, b, c)

    def __repr__(self):
        return "Q_CIRCLE"


Q_CIRCLE = QCircle()


# -- text forms ---------------------------------------------------------------

_ROOT_COEF = re.compile(r"(\d)\s*√")
_ROOT = re.compile(r"√\s*(?:\(\s*(\d+)\s*\)|(\d+))")


def _eval_quad(node):
    """Evaluate an ast into (p, q, d) meaning p + q*sqrt(d); d = 0 when rational."""
    if isinstance(node, ast.Expression):
        return _eval_quad(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return Fraction(node.value), Fraction(0), 0
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        p, q, d = _eval_quad(node.operand)
        return (-p, -q, d) if isinstance(node.op, ast.USub) else (p, q, d)
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id == "sqrt"
        and len(node.args) == 1
    ):
        p, q, d = _eval_quad(node.args[0])
        if d or p.denominator != 1 or p < 0:
            raise MalformedInput("sqrt takes a non-negative integer literal")
        s, r = _squarefree_split(int(p))
        if r == 1:
            return Fraction(s), Fraction(0), 0
        return Fraction(0), Fraction(s), r
    if isinstance(node, ast.BinOp):
        lp, lq, ld = _eval_quad(node.left)
        rp, rq, rd = _eval_quad(node.right)
        if ld and rd and ld != rd:
            raise MalformedInput("mixed square roots are not supported")
        d = ld or rd
        if isinstance(node.op, ast.Add):
            return lp + rp, lq + rq, d
        if isinstance(node.op, ast.Sub):
            return lp - rp, lq - rq, d
        if isinstance(node.op, ast.Mult):
            if ld and rd:
                raise MalformedInput("products of square roots are not supported")
            return lp * rp, lp * rq + lq * rp, d
        if isinstance(node.op, ast.Div):
            if rd:
                raise MalformedInput("division by an irrational is not supported")
            if rp == 0:
                raise MalformedInput("division by zero")
            return lp / rp, lq / rp, d
        if isinstance(node.op, ast.Pow):
            if ld or rd or rp.denominator != 1 or rp < 0:
                raise MalformedInput("only non-negative integer powers of rationals")
            return lp ** int(rp), Fraction(0), 0
    raise MalformedInput(f"unsupported syntax in point expression: {ast.dump(node)}")


def parse_point(text: str):
    """Parse "p/q", "k/2^e" or "(a+b√d)/c" (``sqrt(d)`` also accepted) into a circle point."""
    src = text.strip().replace("^", "**")
    src = _ROOT_COEF.sub(r"\1*√", src)
    src = _ROOT.sub(lambda m: f"sqrt({m.group(1) or m.group(2)})", src)
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise MalformedInput(f"cannot parse point {text!r}") from exc
    p, q, d = _eval_quad(tree)
    if q == 0 or d == 0:
        return p % 1
    return QuadraticIrrational.from_parts(p, q, d)


def format_point(x) -> str:
    if isinstance(x, QuadraticIrrational):
        return str(x)
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_dyadic(x) -> str:
    x = Fraction(x)
    if not is_dyadic(x):
        raise DomainError(f"{x} is not dyadic")
    e = x.denominator.bit_length() - 1
    return f"{x.numerator}/2^{e}"
