"""Exact valued fields: Q with a p-adic or trivial valuation, and Q(t) with
the t-adic valuation.

Field elements are stored raw (``Fraction`` or ``RatFunc``) inside matrices
for speed; ``ValuedScalar`` is the user-facing wrapper that carries its field.
Linear algebra is done fraction-free over Z or Z[t] after clearing column
denominators, so nothing is ever rounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from numbers import Rational
from typing import Iterable, Sequence

from . import _poly as P

try:  # big packed integers divide much faster under GMP
    from gmpy2 import mpz as _big
except ImportError:  # pragma: no cover
    _big = int
from ._poly import RatFunc

INF = math.inf

P_ADIC = "rationals-p-adic"
T_ADIC = "rational-functions-t-adic"
TRIVIAL = "rationals-trivial"
KINDS = (P_ADIC, T_ADIC, TRIVIAL)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def ord_p_int(n: int, p: int) -> int:
    """Exponent of ``p`` in a nonzero integer."""
    n = abs(n)
    if p == 2:
        return (n & -n).bit_length() - 1
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


@dataclass(frozen=True)
class FieldSpec:
    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.kind == P_ADIC:
            if not isinstance(self.p, int) or not is_prime(self.p):
                raise ValueError(f"p-adic field needs a prime p, got {self.p!r}")
        elif self.p is not None:
            raise ValueError(f"field kind {self.kind!r} takes no p")

    @classmethod
    def padic(cls, p: int) -> "FieldSpec":
        return cls(P_ADIC, p)

    @classmethod
    def tadic(cls) -> "FieldSpec":
        return cls(T_ADIC)

    @classmethod
    def trivial(cls) -> "FieldSpec":
        return cls(TRIVIAL)

    @property
    def is_polynomial(self) -> bool:
        return self.kind == T_ADIC

    @property
    def is_discrete(self) -> bool:
        return self.kind != TRIVIAL

    @property
    def is_trivial(self) -> bool:
        return self.kind == TRIVIAL

    def zero(self):
        return RatFunc.const(0) if self.is_polynomial else Fraction(0)

    def one(self):
        return RatFunc.const(1) if self.is_polynomial else Fraction(1)

    def uniformizer(self):
        if self.kind == P_ADIC:
            return Fraction(self.p)
        if self.kind == T_ADIC:
            return RatFunc.t_power(1)
        raise ValueError("trivially valued field has no uniformizer")

    def uniformizer_power(self, k: int):
        if self.kind == P_ADIC:
            return Fraction(self.p) ** k
        if self.kind == T_ADIC:
            return RatFunc.t_power(k)
        raise ValueError("trivially valued field has no uniformizer")

    def coerce(self, x):
        """Turn ints, Fractions, ``"a/b"`` strings or RatFuncs into raw elements."""
        if isinstance(x, ValuedScalar):
            if x.spec != self:
                raise ValueError("scalar belongs to a different field")
            return x.value
        if isinstance(x, str):
            x = Fraction(x)
        if self.is_polynomial:
            if isinstance(x, RatFunc):
                return x
            if isinstance(x, (int, Fraction)):
                return RatFunc.const(x)
        elif isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return Fraction(x)
        raise TypeError(f"cannot coerce {x!r} into {self.kind}")

    def val(self, x):
        """Valuation of a raw element; ``inf`` for zero."""
        if not x:
            return INF
        if self.kind == TRIVIAL:
            return 0
        if self.kind == P_ADIC:
            return ord_p_int(x.numerator, self.p) - ord_p_int(x.denominator, self.p)
        return x.ord_t()

    def scalar(self, x) -> "ValuedScalar":
        return ValuedScalar(self, self.coerce(x))

    def __str__(self):
        return f"{self.kind}(p={self.p})" if self.p else self.kind


@dataclass(frozen=True)
class ValuedScalar:
    spec: FieldSpec
    value: object

    def _other(self, y):
        if isinstance(y, ValuedScalar):
            if y.spec != self.spec:
                raise ValueError("mixed fields")
            return y.value
        return self.spec.coerce(y)

    def __add__(self, y):
        return ValuedScalar(self.spec, self.value + self._other(y))

    __radd__ = __add__

    def __sub__(self, y):
        return ValuedScalar(self.spec, self.value - self._other(y))

    def __rsub__(self, y):
        return ValuedScalar(self.spec, self._other(y) - self.value)

    def __mul__(self, y):
        return ValuedScalar(self.spec, self.value * self._other(y))

    __rmul__ = __mul__

    def __truediv__(self, y):
        return ValuedScalar(self.spec, self.value / self._other(y))

    def __neg__(self):
        return ValuedScalar(self.spec, -self.value)

    def __bool__(self):
        return bool(self.value)

    def valuation(self):
        return self.spec.val(self.value)


def valuation(x: ValuedScalar):
    return x.spec.val(x.value)


@dataclass(frozen=True)
class Mat:
    """Matrix stored column-major as a tuple of column tuples."""

    field: FieldSpec
    cols: tuple
    nrows: int = field(default=-1)

    def __post_init__(self):
        cols = tuple(tuple(self.field.coerce(x) for x in c) for c in self.cols)
        object.__setattr__(self, "cols", cols)
        if self.nrows < 0:
            if not cols:
                raise ValueError("matrix with no columns needs an explicit row count")
            object.__setattr__(self, "nrows", len(cols[0]))
        if any(len(c) != self.nrows for c in cols):
            raise ValueError("ragged matrix")

    @classmethod
    def from_rows(cls, spec: FieldSpec, rows: Sequence[Sequence]) -> "Mat":
        rows = [list(r) for r in rows]
        return cls(spec, tuple(zip(*rows)), len(rows))

    @classmethod
    def identity(cls, spec: FieldSpec, n: int) -> "Mat":
        one, zero = spec.one(), spec.zero()
        return cls(spec, tuple(tuple(one if i == j else zero for i in range(n)) for j in range(n)), n)

    @property
    def ncols(self) -> int:
        return len(self.cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def col(self, j: int) -> tuple:
        return self.cols[j]

    def select(self, idx: Iterable[int]) -> "Mat":
        return Mat(self.field, tuple(self.cols[j] for j in idx), self.nrows)

    def rows(self) -> list[list]:
        return [[c[i] for c in self.cols] for i in range(self.nrows)]

    def entry(self, i: int, j: int) -> ValuedScalar:
        return ValuedScalar(self.field, self.cols[j][i])

    def hstack(self, other: "Mat") -> "Mat":
        if other.field != self.field or other.nrows != self.nrows:
            raise ValueError("cannot stack matrices over different spaces")
        return Mat(self.field, self.cols + other.cols, self.nrows)

    def apply(self, coeffs: Sequence) -> tuple:
        """The combination ``sum_j coeffs[j] * col_j``."""
        out = [self.field.zero()] * self.nrows
        for c, col in zip(coeffs, self.cols):
            if c:
                for i, x in enumerate(col):
                    if x:
                        out[i] = out[i] + c * x
        return tuple(out)


# -- ring form --------------------------------------------------------------
#
# A column over Q becomes an integer column times a scale 1/d; over Q(t) it
# becomes an integer-polynomial column times a RatFunc scale.  Integer
# polynomials are then packed into single integers by evaluating at 2**bits
# (Kronecker substitution) with ``bits`` large enough that no coefficient of
# any intermediate minor can wrap, so every elimination below runs on plain
# Python ints and stays exact.


def _ring_column(spec: FieldSpec, col: Sequence):
    """Return ``(ring_col, scale)`` with ``col == ring_col * scale``."""
    if not spec.is_polynomial:
        d = 1
        for x in col:
            d = math.lcm(d, x.denominator)
        return [int(x * d) for x in col], Fraction(1, d)
    b = 1
    den = P.ONE
    for x in col:
        if x.c:
            b = math.lcm(b, x.c.denominator)
            if x.den != P.ONE and x.den != den:
                g = P.poly_gcd(den, x.den)
                den = P.mul(den, P.exact_div(x.den, g))
    out = []
    for x in col:
        if not x.c:
            out.append(P.ZERO)
            continue
        k = x.c.numerator * (b // x.c.denominator)
        cof = P.exact_div(den, x.den) if x.den != den else P.ONE
        out.append(P.scale(P.mul(x.num, cof), k))
    return out, RatFunc(Fraction(1, b), P.ONE, den)


class Packing:
    """Kronecker packing of integer polynomials at ``t = 2**bits``."""

    __slots__ = ("bits", "base", "entry_bits", "entry_len")

    def __init__(self, bits: int, entry_bits: int = 0, entry_len: int = 1):
        self.bits = bits
        self.base = 1 << bits
        # bound on the coefficients and length of any single minor
        self.entry_bits = entry_bits or bits
        self.entry_len = entry_len

    @classmethod
    def for_minors(cls, polys: Iterable, n: int) -> "Packing":
        """Packing wide enough for Bareiss-style elimination of size ``n``."""
        big, length = 1, 1
        for a in polys:
            for c in a:
                if abs(c) > big:
                    big = abs(c)
            if len(a) > length:
                length = len(a)
        minor = math.factorial(n) * big ** n * length ** max(n - 1, 0)
        return cls((2 * minor * minor * n * length).bit_length() + 2,
                   minor.bit_length(), n * length)

    def pack(self, a) -> int:
        acc = 0
        bits = self.bits
        for c in reversed(a):
            acc = (acc << bits) + c
        return _big(acc)

    def unpack(self, x: int):
        return tuple(int(c) for c in P._from_digits(int(x), self.base))

    def ord(self, x: int) -> int:
        return (int(x & -x).bit_length() - 1) // self.bits


def _divexact(a: int, b: int) -> int:
    q, r = divmod(a, b)
    if r:
        raise ArithmeticError("inexact division in fraction-free elimination")
    return q


def _prepare(spec: FieldSpec, cols: Sequence[Sequence], n: int):
    """Clear denominators column-wise and pack; returns (int cols, scales, packing)."""
    ring_cols, scales = [], []
    for c in cols:
        rc, sc = _ring_column(spec, c)
        ring_cols.append(rc)
        scales.append(sc)
    if not spec.is_polynomial:
        return ring_cols, scales, None
    pk = Packing.for_minors((a for rc in ring_cols for a in rc), n)
    return [[pk.pack(a) for a in rc] for rc in ring_cols], scales, pk


def _int_val(spec: FieldSpec, a: int, pk: Packing | None):
    if not a:
        return INF
    if spec.kind == TRIVIAL:
        return 0
    if pk is not None:
        return pk.ord(a)
    return ord_p_int(a, spec.p)


def _to_field(spec: FieldSpec, a: int, pk: Packing | None):
    if pk is None:
        return Fraction(a)
    return RatFunc(Fraction(1), pk.unpack(a), P.ONE) if a else RatFunc.const(0)


def _bareiss_det(m: list[list]) -> int:
    """Determinant of a square integer matrix given as row lists; mutates ``m``."""
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if not m[k][k]:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = m[k][k]
        rowk = m[k]
        for i in range(k + 1, n):
            rowi = m[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                t = akk * rowi[j] - aik * rowk[j]
                rowi[j] = _divexact(t, prev) if prev != 1 else t
        prev = akk
    d = m[n - 1][n - 1]
    return d if sign > 0 else -d


def _check_square(M: Mat):
    if M.nrows != M.ncols:
        raise ValueError(f"determinant of a non-square {M.nrows}x{M.ncols} matrix")


def det_raw(spec: FieldSpec, cols: Sequence[Sequence]):
    """Determinant of the square matrix with the given columns (raw elements)."""
    n = len(cols)
    ic, scales, pk = _prepare(spec, cols, n)
    d = _bareiss_det([[ic[j][i] for j in range(n)] for i in range(n)])
    out = _to_field(spec, d, pk)
    for sc in scales:
        out = out * sc
    return out


def det_val(spec: FieldSpec, cols: Sequence[Sequence]):
    """Valuation of the determinant without building the determinant itself."""
    n = len(cols)
    ic, scales, pk = _prepare(spec, cols, n)
    d = _bareiss_det([[ic[j][i] for j in range(n)] for i in range(n)])
    if not d:
        return INF
    return _int_val(spec, d, pk) + sum(spec.val(sc) for sc in scales)


def maximal_minor_valuations(spec: FieldSpec, cols: Sequence[Sequence], nrows: int) -> list:
    """Valuations of all ``nrows``-column minors, in ``itertools.combinations`` order."""
    ic, scales, pk = _prepare(spec, cols, nrows)
    svals = [spec.val(sc) for sc in scales]
    out = []
    for sel in combinations(range(len(cols)), nrows):
        d = _bareiss_det([[ic[j][i] for j in sel] for i in range(nrows)])
        if not d:
            out.append(INF)
        else:
            out.append(_int_val(spec, d, pk) + sum(svals[j] for j in sel))
    return out


def det(M: Mat) -> ValuedScalar:
    _check_square(M)
    return ValuedScalar(M.field, det_raw(M.field, M.cols))


def _gauss_jordan(aug: list[list], n: int):
    """Fraction-free Gauss-Jordan on an augmented integer matrix, in place.

    On success the left block becomes ``det * I`` and the right block holds
    ``det * B^{-1} * rhs``.  A row swap negates the incoming pivot row so the
    returned pivot is the determinant itself.  Every division is exact.
    """
    width = len(aug[0])
    prev = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if aug[i][k]), None)
        if piv is None:
            return 0, False
        if piv != k:
            aug[k], aug[piv] = [-x for x in aug[piv]], aug[k]
        akk = aug[k][k]
        rowk = aug[k]
        for i in range(n):
            if i == k:
                continue
            rowi = aug[i]
            aik = rowi[k]
            for j in range(width):
                if j != k:
                    t = akk * rowi[j] - aik * rowk[j]
                    rowi[j] = _divexact(t, prev) if prev != 1 else t
            rowi[k] = 0
        prev = akk
    return prev, True


class Solver:
    """Reusable solver for one invertible basis.

    Fraction-free Gauss-Jordan on ``[B | I]`` is done once; afterwards each
    right-hand side costs one integer matrix-vector product.
    """

    def __init__(self, spec: FieldSpec, basis_cols: Sequence[Sequence]):
        self.spec = spec
        n = len(basis_cols)
        if n == 0 or any(len(c) != n for c in basis_cols):
            raise ValueError("solver basis must be square")
        self.n = n
        ic, self.colscale, pk = _prepare(spec, basis_cols, n)
        aug = [[ic[j][i] for j in range(n)] + [1 if k == i else 0 for k in range(n)] for i in range(n)]
        d, ok = _gauss_jordan(aug, n)
        if not ok:
            raise ValueError("basis is singular")
        self.det = d
        self.adj = [row[n:] for row in aug]
        self.packing = pk
        self._wide: dict[int, tuple] = {}

    @cached_property
    def det_value(self):
        """Determinant of the original basis matrix as a field element."""
        d = _to_field(self.spec, self.det, self.packing)
        for sc in self.colscale:
            d = d * sc
        return d

    @cached_property
    def _base_vals(self):
        v_det = _int_val(self.spec, self.det, self.packing)
        return [v_det + self.spec.val(sc) for sc in self.colscale]

    def _packed_rhs(self, f: Sequence):
        """Pack ``f`` and pick adjugate data whose packing is wide enough."""
        rf, fs = _ring_column(self.spec, f)
        pk = self.packing
        if pk is None:
            return rf, fs, self.adj, self.det, None
        big = max((abs(c) for a in rf for c in a), default=1) or 1
        length = max((len(a) for a in rf), default=1) or 1
        need = pk.entry_bits + big.bit_length() + (self.n * (length + pk.entry_len)).bit_length() + 2
        if need <= pk.bits:
            return [pk.pack(a) for a in rf], fs, self.adj, self.det, pk
        wide = self._wide.get(need)
        if wide is None:
            wpk = Packing(need)
            adj = [[wpk.pack(pk.unpack(x)) for x in row] for row in self.adj]
            wide = (adj, wpk.pack(pk.unpack(self.det)), wpk)
            self._wide[need] = wide
        adj, det, wpk = wide
        return [wpk.pack(a) for a in rf], fs, adj, det, wpk

    def _combine(self, adj, rf):
        return [sum(a * x for a, x in zip(row, rf) if a and x) for row in adj]

    def solve(self, f: Sequence) -> tuple:
        spec = self.spec
        if len(f) != self.n:
            raise ValueError("dimension mismatch in solve")
        rf, fs, adj, det, pk = self._packed_rhs(f)
        out = []
        for b, acc in enumerate(self._combine(adj, rf)):
            if not acc:
                out.append(spec.zero())
            elif pk is None:
                out.append(Fraction(acc, det) * fs / self.colscale[b])
            else:
                lam = RatFunc(Fraction(1), pk.unpack(acc), pk.unpack(det))
                out.append(lam * fs / self.colscale[b])
        return tuple(out)

    def solve_valuations(self, f: Sequence) -> list:
        """Valuations of the coefficients of ``f``, skipping canonical forms."""
        spec = self.spec
        if len(f) != self.n:
            raise ValueError("dimension mismatch in solve")
        rf, fs, adj, det, pk = self._packed_rhs(f)
        v_fs = spec.val(fs)
        base = self._base_vals
        return [_int_val(spec, acc, pk) + v_fs - base[b] if acc else INF
                for b, acc in enumerate(self._combine(adj, rf))]


def solve_in_basis(B: Mat, f: Sequence) -> tuple:
    """Coefficients ``lam`` with ``B @ lam == f`` for a square invertible ``B``."""
    if B.nrows != B.ncols:
        raise ValueError("solve_in_basis needs a square basis matrix")
    f = tuple(B.field.coerce(x) for x in f)
    return Solver(B.field, B.cols).solve(f)


def rank_raw(spec: FieldSpec, cols: Sequence[Sequence], nrows: int) -> int:
    if not cols:
        return 0
    ic, _, _ = _prepare(spec, cols, min(nrows, len(cols)))
    rows = [[rc[i] for rc in ic] for i in range(nrows)]
    return _echelon_rank(rows)


def _echelon_rank(rows: list[list]) -> int:
    m = len(rows)
    if m == 0:
        return 0
    ncols = len(rows[0])
    r = 0
    prev = 1
    for c in range(ncols):
        piv = next((i for i in range(r, m) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        a = rows[r][c]
        for i in range(r + 1, m):
            b = rows[i][c]
            row = rows[i]
            for j in range(c, ncols):
                t = a * row[j] - b * rows[r][j]
                row[j] = _divexact(t, prev) if prev != 1 else t
        prev = a
        r += 1
        if r == m:
            break
    return r


def rank(M: Mat) -> int:
    return rank_raw(M.field, M.cols, M.nrows)


def rref_rows(spec: FieldSpec, vectors: Sequence[Sequence]) -> tuple:
    """Reduced row echelon basis of the span of ``vectors`` (field arithmetic).

    Used for canonical subspace descriptions; the result depends only on the
    span.
    """
    rows = [list(v) for v in vectors]
    if not rows:
        return ()
    ncols = len(rows[0])
    out = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                fac = rows[i][c]
                rows[i] = [x - fac * y for x, y in zip(rows[i], rows[r])]
        r += 1
    out = [tuple(row) for row in rows[:r]]
    return tuple(out)


def is_rational(x) -> bool:
    return isinstance(x, Rational)
