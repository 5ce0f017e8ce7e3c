"""Seeded random instances for tests, benchmarks and ``selfcheck``."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from ._poly import RatFunc
from .building import DiagSeminorm, Flag
from .tropcore import INF, normalize
from .valfield import FieldSpec, Mat, rank_raw

BOUND = 100
MAX_TDEG = 4

BACKENDS = (FieldSpec.padic(2), FieldSpec.padic(3), FieldSpec.tadic(), FieldSpec.trivial())


def rational(rng: random.Random, bound: int = BOUND) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def nonzero_rational(rng: random.Random, bound: int = BOUND) -> Fraction:
    while True:
        q = rational(rng, bound)
        if q:
            return q


def scalar(rng: random.Random, spec: FieldSpec, zero_rate: float = 0.15, bound: int = BOUND):
    """A random field element; p-adic draws are biased towards powers of ``p``."""
    if rng.random() < zero_rate:
        return spec.zero()
    if spec.is_polynomial:
        deg = rng.randint(0, MAX_TDEG)
        low = rng.randint(0, deg)
        coeffs = [Fraction(0)] * low + [nonzero_rational(rng, bound) if i == low else rational(rng, bound)
                                        for i in range(low, deg + 1)]
        coeffs[low] = coeffs[low] or Fraction(1)
        return RatFunc.from_coeffs(coeffs)
    x = nonzero_rational(rng, bound)
    if spec.kind == "rationals-p-adic" and rng.random() < 0.5:
        k = rng.randint(-2, 3)
        x = x * Fraction(spec.p) ** k
        if max(abs(x.numerator), x.denominator) > bound:
            x = nonzero_rational(rng, bound)
    return x


def vector(rng, spec, dim, zero_rate=0.15, nonzero=True):
    while True:
        v = tuple(scalar(rng, spec, zero_rate) for _ in range(dim))
        if not nonzero or any(v):
            return v


def full_rank_columns(rng, spec, rows: int, ncols: int, zero_rate=0.15) -> tuple:
    """``ncols`` nonzero columns spanning ``K^rows``."""
    if ncols < rows:
        raise ValueError("need at least as many columns as rows")
    while True:
        cols = tuple(vector(rng, spec, rows, zero_rate) for _ in range(ncols))
        if rank_raw(spec, cols, rows) == rows:
            return cols


def matrix(rng, spec, rows, ncols, zero_rate=0.15) -> Mat:
    return Mat(spec, full_rank_columns(rng, spec, rows, ncols, zero_rate), rows)


def embedding(rng, spec, rows, ncols, zero_rate=0.15):
    from .troplin import Embedding

    return Embedding(matrix(rng, spec, rows, ncols, zero_rate))


def trop_coords(rng, dim: int, inf_rate: float = 0.0, lo: int = -4, hi: int = 4, den: int = 3) -> tuple:
    while True:
        u = tuple(INF if rng.random() < inf_rate else Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))
                  for _ in range(dim))
        if any(c != INF for c in u):
            return tuple(normalize(u))


def integer_coords(rng, dim: int, lo: int = -3, hi: int = 3) -> tuple:
    return tuple(normalize([rng.randint(lo, hi) for _ in range(dim)]))


def seminorm(rng, spec, dim, inf_rate=0.2, integral=False) -> DiagSeminorm:
    basis = matrix(rng, spec, dim, dim, zero_rate=0.3)
    coords = integer_coords(rng, dim) if integral else trop_coords(rng, dim, inf_rate)
    return DiagSeminorm(basis, normalize(coords))


def flag(rng, dim: int, spec: FieldSpec | None = None) -> Flag:
    """Random flag in ``Q^dim`` with random positive decreasing jumps."""
    spec = spec or FieldSpec.trivial()
    length = rng.randint(1, dim)
    cuts = sorted(rng.sample(range(1, dim), length - 1)) + [dim]
    basis = full_rank_columns(rng, spec, dim, dim, zero_rate=0.4)
    subs = [basis[:c] for c in cuts]
    jumps = sorted({Fraction(rng.randint(1, 12), rng.randint(1, 3)) for _ in range(length - 1)}, reverse=True)
    while len(jumps) < length - 1:
        jumps.append(jumps[-1] / 2 if jumps else Fraction(1))
    return Flag(spec, dim, tuple(subs), tuple(jumps))


def zero_one_columns(rng, rows: int, ncols: int) -> tuple:
    """Nonzero 0/1 columns of full rank over Q (a loopless realizable matroid)."""
    spec = FieldSpec.trivial()
    while True:
        cols = tuple(tuple(Fraction(rng.randint(0, 1)) for _ in range(rows)) for _ in range(ncols))
        if all(any(c) for c in cols) and rank_raw(spec, cols, rows) == rows:
            return cols


def grid_points(n1: int, values=(0, 1, 2, 3, INF)) -> list:
    """All classes of points with coordinates in ``values``, one per class."""
    seen = set()
    out = []

    def rec(prefix):
        if len(prefix) == n1:
            if any(c != INF for c in prefix):
                p = normalize(prefix)
                if p not in seen:
                    seen.add(p)
                    out.append(p)
            return
        for x in values:
            rec(prefix + [x])

    rec([])
    return out


def _on_line(rng, spec, a, b):
    s = scalar(rng, spec, zero_rate=0.25)
    t = scalar(rng, spec, zero_rate=0.25)
    if not s and not t:
        s = spec.one()
    return tuple(s * x + t * y for x, y in zip(a, b))


def closed_sample(rng, spec, size: int) -> list:
    """A small covector set on which two- and three-term conditions suffice.

    Three shapes, all with every large circuit splitting through a member:
    points of one plane in ``K^2``, a plane plus a coloop in ``K^3``, and a
    star of two planes through a shared vector ``P`` (with ``P`` included) in
    ``K^3``.
    """
    shape = rng.choice(("plane", "coloop", "star"))
    dim = 2 if shape == "plane" else 3
    while True:
        if shape == "plane":
            a, b = full_rank_columns(rng, spec, 2, 2)
            vecs = [a, b] + [_on_line(rng, spec, a, b) for _ in range(size - 2)]
        else:
            P, q1, q2 = full_rank_columns(rng, spec, 3, 3)
            if shape == "coloop":
                vecs = [P, q1, q2] + [_on_line(rng, spec, P, q1) for _ in range(size - 3)]
            else:
                vecs = [P, q1, q2]
                for k in range(size - 3):
                    vecs.append(_on_line(rng, spec, P, q1 if k % 2 else q2))
        if all(any(v) for v in vecs) and rank_raw(spec, vecs, dim) == dim:
            rng.shuffle(vecs)
            return vecs


def subsets(n1: int, k: int):
    return combinations(range(n1), k)


def _unit(rng, spec):
    """A random element of valuation 0."""
    while True:
        if spec.is_polynomial:
            x = RatFunc.from_coeffs([nonzero_rational(rng, 9), rational(rng, 9)])
        else:
            x = nonzero_rational(rng, 9)
        if spec.val(x) == 0:
            return x


def _pi_power(spec, k):
    return spec.one() if spec.is_trivial else spec.uniformizer_power(k)


def rebased(rng, x: DiagSeminorm, moves: int = 4) -> DiagSeminorm:
    """The same homothety class written in a different diagonalizing basis.

    Uses moves that provably preserve the seminorm: rescaling a basis vector
    by ``pi^k`` times a unit (shifting its coordinate by ``k``) and adding
    ``c b_i`` to ``b_j`` when ``val(c) + u_i >= u_j``.  A final global
    shift changes only the representative.
    """
    spec = x.field
    cols = [list(c) for c in x.basis.cols]
    u = list(x.coords)
    n = len(cols)
    for _ in range(moves):
        i = rng.randrange(n)
        if n == 1 or rng.random() < 0.4:
            k = 0 if spec.is_trivial else rng.randint(-2, 2)
            s = _pi_power(spec, k) * _unit(rng, spec)
            cols[i] = [s * a for a in cols[i]]
            if u[i] != INF:
                u[i] += k
            continue
        j = rng.choice([a for a in range(n) if a != i])
        if u[j] == INF and u[i] != INF:
            continue
        if u[i] == INF:
            need = -2
        else:
            gap = u[j] - u[i]
            if spec.is_trivial and gap > 0:
                continue
            need = -(-gap // 1)  # ceiling
        k = 0 if spec.is_trivial else int(need) + rng.randint(0, 1)
        c = _pi_power(spec, k) * _unit(rng, spec)
        cols[j] = [a + c * b for a, b in zip(cols[j], cols[i])]
    shift = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
    u = [c if c == INF else c + shift for c in u]
    return DiagSeminorm(Mat(spec, tuple(tuple(c) for c in cols), x.dim), normalize(u))


def perturbed(rng, x: DiagSeminorm) -> DiagSeminorm:
    """A nearby seminorm that is usually, but not always, a different class."""
    spec = x.field
    u = list(x.coords)
    cols = [list(c) for c in x.basis.cols]
    n = len(cols)
    if rng.random() < 0.5 or n == 1:
        i = rng.randrange(n)
        u[i] = rng.choice([0, 1, Fraction(1, 2), INF]) if u[i] == INF else u[i] + rng.choice([1, -1, Fraction(1, 3), INF])
        if all(c == INF for c in u):
            u[(i + 1) % n] = 0
    else:
        i, j = rng.sample(range(n), 2)
        c = _pi_power(spec, 0 if spec.is_trivial else rng.randint(-3, 0)) * _unit(rng, spec)
        cols[j] = [a + c * b for a, b in zip(cols[j], cols[i])]
    return DiagSeminorm(Mat(spec, tuple(tuple(c) for c in cols), x.dim), normalize(u))


def integral_covector(spec, f) -> tuple:
    """A nonzero multiple of ``f`` with integer (or integer polynomial) entries."""
    import math

    if spec.is_polynomial:
        den = RatFunc.const(1)
        for a in f:
            if a:
                den = den * RatFunc.from_coeffs(a.den_coeffs())
        g = [a * den for a in f]
        m = 1
        for a in g:
            if a:
                for c in a.num_coeffs():
                    m = math.lcm(m, Fraction(c).denominator)
        return tuple(a * m for a in g)
    m = 1
    for a in f:
        m = math.lcm(m, Fraction(a).denominator)
    return tuple(Fraction(a) * m for a in f)


def probes(rng, spec, generators, count: int, spread: int = 3) -> list:
    """Sparse small-integer combinations of integral multiples of ``generators``."""
    gens = [integral_covector(spec, g) for g in generators]
    dim = len(gens[0])
    out = []
    while len(out) < count:
        size = rng.randint(1, min(len(gens), dim + 1))
        pick = rng.sample(range(len(gens)), size)
        coeffs = [rng.randint(-spread, spread) or 1 for _ in pick]
        f = [spec.zero()] * dim
        for c, g in zip(coeffs, pick):
            f = [a + c * b for a, b in zip(f, gens[g])]
        if any(f):
            out.append(tuple(f))
    return out
