"""Integer polynomials and the rational function field Q(t).

Polynomials are tuples of Python ints, lowest degree first, with no
trailing zeros; the zero polynomial is ``()``.  Everything stays in Z[t]
so the elimination routines can run fraction-free.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt, lcm

IntPoly = tuple

ZERO: IntPoly = ()
ONE: IntPoly = (1,)


def trim(a) -> IntPoly:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def add(a: IntPoly, b: IntPoly) -> IntPoly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return trim(out)


def neg(a: IntPoly) -> IntPoly:
    return tuple(-c for c in a)


def sub(a: IntPoly, b: IntPoly) -> IntPoly:
    return add(a, neg(b))


def mul(a: IntPoly, b: IntPoly) -> IntPoly:
    if not a or not b:
        return ZERO
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(out)


def scale(a: IntPoly, c: int) -> IntPoly:
    if c == 0:
        return ZERO
    return tuple(c * x for x in a)


def content(a: IntPoly) -> int:
    g = 0
    for c in a:
        g = gcd(g, c)
    return g


def primitive(a: IntPoly) -> IntPoly:
    """Primitive part with positive leading coefficient."""
    if not a:
        return ZERO
    g = content(a)
    if a[-1] < 0:
        g = -g
    return tuple(c // g for c in a)


def ord_t(a: IntPoly) -> int | None:
    """Index of the lowest nonzero coefficient, ``None`` for zero."""
    for i, c in enumerate(a):
        if c:
            return i
    return None


def shift_down(a: IntPoly, k: int) -> IntPoly:
    return a[k:]


def exact_div(a: IntPoly, b: IntPoly) -> IntPoly:
    """Quotient ``a / b`` in Z[t]; raises ``ArithmeticError`` if inexact."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if not a:
        return ZERO
    rem = list(a)
    db = len(b) - 1
    lb = b[-1]
    q = [0] * (len(a) - db) if len(a) > db else []
    for k in range(len(a) - 1 - db, -1, -1):
        c = rem[k + db]
        if c == 0:
            continue
        qc, r = divmod(c, lb)
        if r:
            raise ArithmeticError("inexact polynomial division")
        q[k] = qc
        for i, y in enumerate(b):
            rem[k + i] -= qc * y
    if any(rem):
        raise ArithmeticError("inexact polynomial division")
    return trim(q)


def pseudo_rem(a: IntPoly, b: IntPoly) -> IntPoly:
    rem = list(a)
    db = len(b) - 1
    lb = b[-1]
    while len(rem) - 1 >= db and rem:
        c = rem[-1]
        shift = len(rem) - 1 - db
        rem = [lb * x for x in rem]
        for i, y in enumerate(b):
            rem[shift + i] -= c * y
        rem = list(trim(rem))
    return tuple(rem)


def _horner(a: IntPoly, x: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _from_digits(h: int, xi: int) -> IntPoly:
    """Recover a polynomial from its value at ``xi`` using symmetric digits."""
    out = []
    half = xi // 2
    while h:
        d = h % xi
        if d > half:
            d -= xi
        out.append(d)
        h = (h - d) // xi
    return tuple(out)


def _divides(b: IntPoly, a: IntPoly) -> bool:
    try:
        exact_div(a, b)
    except ArithmeticError:
        return False
    return True


def _heuristic_gcd(a: IntPoly, b: IntPoly) -> IntPoly | None:
    # evaluate at a large integer, take the integer gcd and read the digits
    # back; any candidate is verified by exact division
    bound = max(max(abs(c) for c in a), max(abs(c) for c in b))
    xi = 2 * bound + 29
    for _ in range(6):
        h = gcd(_horner(a, xi), _horner(b, xi))
        if h:
            g = primitive(_from_digits(h, xi))
            if g and _divides(g, a) and _divides(g, b):
                return g
        xi = xi * 73794 * isqrt(isqrt(xi)) // 27011
    return None


def poly_gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    """Primitive gcd in Z[t] (positive leading coefficient)."""
    if not a:
        return primitive(b)
    if not b:
        return primitive(a)
    a, b = primitive(a), primitive(b)
    if len(a) == 1 or len(b) == 1:
        return ONE
    lo = min(ord_t(a), ord_t(b))
    if lo:
        return mul((0,) * lo + (1,), poly_gcd(a[lo:], b[lo:]))
    g = _heuristic_gcd(a, b)
    if g is not None:
        return g
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = pseudo_rem(a, b)
        a, b = b, primitive(r)
    return primitive(a)


def _frac_poly_to_int(coeffs) -> tuple[Fraction, IntPoly]:
    """Write a rational-coefficient polynomial as ``c * P`` with P primitive."""
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        return Fraction(0), ZERO
    den = 1
    for c in coeffs:
        den = lcm(den, c.denominator)
    ints = tuple(int(c * den) for c in coeffs)
    g = content(ints)
    if ints[-1] < 0:
        g = -g
    return Fraction(g, den), tuple(x // g for x in ints)


class RatFunc:
    """Element ``c * num / den`` of Q(t).

    ``num`` and ``den`` are coprime primitive integer polynomials with
    positive leading coefficients and ``c`` is a Fraction, which makes the
    representation canonical.
    """

    __slots__ = ("c", "num", "den", "_hash")

    def __init__(self, c=0, num: IntPoly = ONE, den: IntPoly = ONE, *, _canonical=False):
        if _canonical:
            self.c, self.num, self.den = c, num, den
        else:
            self.c, self.num, self.den = self._canon(Fraction(c), trim(num), trim(den))
        self._hash = None

    @staticmethod
    def _canon(c: Fraction, num: IntPoly, den: IntPoly):
        if not den:
            raise ZeroDivisionError("zero denominator in rational function")
        if c == 0 or not num:
            return Fraction(0), ONE, ONE
        g = poly_gcd(num, den)
        if g != ONE:
            num = exact_div(num, g)
            den = exact_div(den, g)
        cn, cd = content(num), content(den)
        if num[-1] < 0:
            cn = -cn
        if den[-1] < 0:
            cd = -cd
        c = c * Fraction(cn, cd)
        return c, tuple(x // cn for x in num), tuple(x // cd for x in den)

    @classmethod
    def const(cls, c) -> "RatFunc":
        c = Fraction(c)
        if c == 0:
            return cls(Fraction(0), ONE, ONE, _canonical=True)
        return cls(c, ONE, ONE, _canonical=True)

    @classmethod
    def t_power(cls, k: int) -> "RatFunc":
        mono = (0,) * abs(k) + (1,)
        if k >= 0:
            return cls(Fraction(1), mono, ONE, _canonical=True)
        return cls(Fraction(1), ONE, mono, _canonical=True)

    @classmethod
    def from_coeffs(cls, num, den=(1,)) -> "RatFunc":
        """Build from rational coefficient lists (lowest degree first)."""
        cn, pn = _frac_poly_to_int(num)
        cd, pd = _frac_poly_to_int(den)
        if cd == 0:
            raise ZeroDivisionError("zero denominator in rational function")
        return cls(cn / cd, pn, pd)

    @classmethod
    def from_int_polys(cls, num: IntPoly, den: IntPoly) -> "RatFunc":
        return cls(Fraction(1), num, den)

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _lift(x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, (int, Fraction)):
            return RatFunc.const(x)
        return NotImplemented

    def __bool__(self):
        return self.c != 0

    def is_zero(self) -> bool:
        return self.c == 0

    def __neg__(self):
        return RatFunc(-self.c, self.num, self.den, _canonical=True)

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if other.c == 0:
            return self
        if self.c == 0:
            return other
        a, b = self.c, other.c
        if self.den == other.den:
            den = self.den
            n1, n2 = self.num, other.num
        else:
            den = mul(self.den, other.den)
            n1, n2 = mul(self.num, other.den), mul(other.num, self.den)
        m = lcm(a.denominator, b.denominator)
        num = add(scale(n1, a.numerator * (m // a.denominator)),
                  scale(n2, b.numerator * (m // b.denominator)))
        return RatFunc(Fraction(1, m), num, den)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.c == 0 or other.c == 0:
            return RatFunc.const(0)
        return RatFunc(self.c * other.c, mul(self.num, other.num), mul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.c == 0:
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc(1 / self.c, self.den, self.num, _canonical=True)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self.c == other.c and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.c, self.num, self.den))
        return self._hash

    # -- valuation and expansions ----------------------------------------

    def ord_t(self) -> int | None:
        if self.c == 0:
            return None
        return ord_t(self.num) - ord_t(self.den)

    def num_coeffs(self) -> list[Fraction]:
        """Numerator coefficients for the monic-denominator presentation."""
        lead = self.den[-1]
        return [self.c * x / lead for x in self.num]

    def den_coeffs(self) -> list[Fraction]:
        lead = self.den[-1]
        return [Fraction(x, lead) for x in self.den]

    def laurent(self, upto: int) -> dict[int, Fraction]:
        """Laurent coefficients of degree < ``upto``."""
        if self.c == 0:
            return {}
        v = self.ord_t()
        if v >= upto:
            return {}
        p0 = ord_t(self.num)
        q0 = ord_t(self.den)
        num = [Fraction(x) for x in self.num[p0:]]
        den = [Fraction(x) for x in self.den[q0:]]
        count = upto - v
        out: list[Fraction] = []
        rem = num + [Fraction(0)] * max(0, count - len(num))
        d0 = den[0]
        for i in range(count):
            coef = rem[i] / d0
            out.append(coef)
            if coef:
                for j, dj in enumerate(den):
                    if i + j < len(rem):
                        rem[i + j] -= coef * dj
        return {v + i: self.c * coef for i, coef in enumerate(out) if coef}

    def __repr__(self):
        return f"RatFunc({self.num_coeffs()!r}/{self.den_coeffs()!r})"

    def __str__(self):
        def fmt(cs):
            terms = []
            for i, c in enumerate(cs):
                if c:
                    terms.append(f"{c}" if i == 0 else f"{c}*t^{i}")
            return " + ".join(terms) or "0"

        if self.den == ONE:
            return fmt(self.num_coeffs())
        return f"({fmt(self.num_coeffs())})/({fmt(self.den_coeffs())})"
