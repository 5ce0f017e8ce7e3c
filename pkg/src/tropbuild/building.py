"""Diagonalizable seminorms up to homothety, flags for trivially valued
fields, and the max-plus tight-span chart.

A seminorm class is stored as a basis of covectors together with
``-log`` coordinates: ``evaluate(x, f) = min_b (val(lam_b) + coords[b])``
for ``f = sum_b lam_b * basis_b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import lcm
from typing import Sequence

import numpy as np

from . import _kernels
from . import _poly as P
from .tropcore import INF, TropPoint, Verdict, normalize, trop_value
from .valfield import FieldSpec, Mat, Solver, rank_raw, rref_rows
from .valmatroid import ValuatedMatroid


@dataclass(frozen=True)
class DiagSeminorm:
    basis: Mat
    coords: TropPoint

    def __post_init__(self):
        if not isinstance(self.coords, TropPoint):
            object.__setattr__(self, "coords", normalize(self.coords))
        if self.basis.nrows != self.basis.ncols:
            raise ValueError("seminorm basis must be square")
        if len(self.coords) != self.basis.ncols:
            raise ValueError("one coordinate per basis covector is required")
        self.solver  # fails on a singular basis

    @property
    def field(self) -> FieldSpec:
        return self.basis.field

    @property
    def dim(self) -> int:
        return self.basis.nrows

    @cached_property
    def solver(self) -> Solver:
        return Solver(self.field, self.basis.cols)

    def is_norm(self) -> bool:
        return self.coords.is_finite()

    def kernel_basis(self) -> list[tuple]:
        return [self.basis.cols[i] for i, c in enumerate(self.coords) if c == INF]


def standard(spec: FieldSpec, coords: Sequence) -> DiagSeminorm:
    """Seminorm diagonalized by the standard basis."""
    return DiagSeminorm(Mat.identity(spec, len(coords)), normalize(coords))


def evaluate(x: DiagSeminorm, f: Sequence):
    """``-log ||f||_x``; infinite exactly on the kernel."""
    f = tuple(x.field.coerce(c) for c in f)
    if len(f) != x.dim:
        raise ValueError(f"covector of length {len(f)} in a space of dimension {x.dim}")
    best = INF
    for lv, c in zip(x.solver.solve_valuations(f), x.coords):
        if lv != INF and c != INF:
            s = lv + c
            if s < best:
                best = s
    return best


# -- batched evaluation -----------------------------------------------------


def _integer_probe_array(spec: FieldSpec, probes: Sequence[Sequence]):
    """Probes as an int64 array ``(P, n)`` or ``(P, n, E)`` of coefficients.

    Returns ``None`` when some entry is not integral.
    """
    if not spec.is_polynomial:
        flat = []
        for f in probes:
            for x in f:
                if x.denominator != 1:
                    return None
                flat.append(int(x))
        if any(abs(x) >= 1 << 62 for x in flat):
            return None
        return np.array(flat, dtype=np.int64).reshape(len(probes), -1)
    width = 1
    for f in probes:
        for x in f:
            if x.c and (x.den != P.ONE or x.c.denominator != 1):
                return None
            width = max(width, len(x.num))
    arr = np.zeros((len(probes), len(probes[0]) if probes else 0, width), dtype=np.int64)
    for p, f in enumerate(probes):
        for i, x in enumerate(f):
            if x.c:
                for d, c in enumerate(x.num):
                    arr[p, i, d] = c * int(x.c)
    return arr


def _adjugate_array(x: DiagSeminorm):
    s = x.solver
    if s.packing is None:
        return np.array([[int(a) for a in row] for row in s.adj], dtype=object)
    polys = [[s.packing.unpack(a) for a in row] for row in s.adj]
    width = max(1, max(len(a) for row in polys for a in row))
    arr = np.zeros((s.n, s.n, width), dtype=object)
    for b, row in enumerate(polys):
        for i, a in enumerate(row):
            for d, c in enumerate(a):
                arr[b, i, d] = c
    return arr


def _coeff_valuations(x: DiagSeminorm, probes):
    """Valuations of the (unscaled) Cramer numerators, shape ``(P, n)``."""
    spec = x.field
    arr = _integer_probe_array(spec, probes)
    if arr is None:
        return None
    adj = _adjugate_array(x)
    amax = max((abs(int(a)) for a in adj.flat), default=0)
    pmax = int(np.abs(arr).max()) if arr.size else 0
    depth = arr.shape[-1] if arr.ndim == 3 else 1
    safe = amax * pmax * x.dim * depth < 1 << 62
    dtype = np.int64 if safe else object
    adj = adj.astype(dtype)
    if not spec.is_polynomial:
        acc = arr.astype(dtype) @ adj.T
        if spec.is_trivial:
            return np.where(acc != 0, 0, _kernels.NO_VAL)
        if dtype is object:
            return np.vectorize(lambda a: _kernels.NO_VAL if a == 0 else _ordp(int(a), spec.p),
                                otypes=[np.int64])(acc)
        return _kernels.ord_p_batch(acc, spec.p)
    if dtype is object:
        return None
    n_p, n, E = arr.shape
    D = adj.shape[2]
    acc = np.zeros((n_p, n, D + E - 1), dtype=np.int64)
    for e in range(E):
        acc[:, :, e:e + D] += np.einsum("pi,bid->pbd", arr[:, :, e], adj)
    return _kernels.ord_t_batch(acc)


def _ordp(a: int, p: int) -> int:
    k = 0
    while a % p == 0:
        a //= p
        k += 1
    return k


def evaluate_many(x: DiagSeminorm, probes: Sequence[Sequence]) -> list:
    """``evaluate`` on many covectors; vectorized for integral probes."""
    probes = [tuple(x.field.coerce(c) for c in f) for f in probes]
    if not probes:
        return []
    ords = _coeff_valuations(x, probes)
    if ords is None:
        return [evaluate(x, f) for f in probes]
    base = x.solver._base_vals  # valuation of det times column scale
    den = 1
    for c in x.coords:
        if c != INF and isinstance(c, Fraction):
            den = lcm(den, c.denominator)
    coords = [c for c in x.coords]
    offs = np.array([0 if c == INF else int((c - base[b]) * den) for b, c in enumerate(coords)],
                    dtype=np.int64)
    kill = np.array([c == INF for c in coords])
    valid = (ords != _kernels.NO_VAL) & ~kill[None, :]
    tot = np.where(valid, ords * den + offs[None, :], _kernels.BIG)
    best = tot.min(axis=1)
    return [INF if b >= _kernels.BIG else trop_value(Fraction(int(b), den)) for b in best]


# -- class equality ---------------------------------------------------------


def class_equal(x: DiagSeminorm, y: DiagSeminorm) -> bool:
    """Homothety equality, decided on the union of the two bases."""
    from .troplin import Embedding, project_pi

    if x.field != y.field or x.dim != y.dim:
        raise ValueError("seminorms live on different spaces")
    emb = Embedding(x.basis.hstack(y.basis))
    return project_pi(emb, x) == project_pi(emb, y)


# -- flags (trivially valued fields) ----------------------------------------


def _require_trivial(spec: FieldSpec):
    if not spec.is_trivial:
        raise ValueError("flags describe seminorms only over a trivially valued field")


@dataclass(frozen=True)
class Flag:
    """Chain ``0 < V_1 < ... < V_l = K^{r+1}`` with jumps ``c_1 > ... > c_{l-1} > 0``.

    Each subspace is stored by its reduced row echelon basis.
    """

    field: FieldSpec
    dim: int
    subspaces: tuple
    jumps: tuple

    def __post_init__(self):
        _require_trivial(self.field)
        subs = []
        for gens in self.subspaces:
            gens = [tuple(self.field.coerce(c) for c in g) for g in gens]
            if any(len(g) != self.dim for g in gens):
                raise ValueError("subspace generator of the wrong length")
            subs.append(rref_rows(self.field, gens))
        full = rref_rows(self.field, [tuple(Fraction(int(i == j)) for i in range(self.dim))
                                      for j in range(self.dim)])
        if not subs or subs[-1] != full:
            subs.append(full)
        jumps = tuple(trop_value(c) for c in self.jumps)
        for a, b in zip(subs, subs[1:]):
            if len(a) >= len(b) or rank_raw(self.field, list(a) + list(b), self.dim) != len(b):
                raise ValueError("flag subspaces must be strictly increasing")
        if not subs[0]:
            raise ValueError("the zero subspace is implicit and must not be listed")
        if len(jumps) != len(subs) - 1:
            raise ValueError(f"{len(subs)} subspaces need {len(subs) - 1} jumps, got {len(jumps)}")
        if any(c <= 0 for c in jumps) or any(a <= b for a, b in zip(jumps, jumps[1:])):
            raise ValueError("jumps must be positive and strictly decreasing")
        object.__setattr__(self, "subspaces", tuple(subs))
        object.__setattr__(self, "jumps", jumps)

    @property
    def length(self) -> int:
        return len(self.subspaces)

    def level(self, f: Sequence) -> int:
        """Smallest ``j`` (1-based) with ``f`` in ``V_j``."""
        for j, sub in enumerate(self.subspaces, start=1):
            if rank_raw(self.field, list(sub) + [tuple(f)], self.dim) == len(sub):
                return j
        raise ValueError("covector outside the ambient space")


def _adapted_blocks(F: Flag) -> list[list[tuple]]:
    """Greedy basis through the flag: block j spans V_j modulo V_{j-1}."""
    chosen: list[tuple] = []
    blocks = []
    for j, sub in enumerate(F.subspaces):
        cand = list(sub)
        if j == len(F.subspaces) - 1:
            cand += [tuple(Fraction(int(i == k)) for i in range(F.dim)) for k in range(F.dim)]
        block = []
        for g in cand:
            if rank_raw(F.field, chosen + [g], F.dim) > len(chosen):
                chosen.append(g)
                block.append(g)
        blocks.append(block)
    return blocks


def flag_to_seminorm(F: Flag) -> DiagSeminorm:
    """Seminorm equal to ``c_j`` on ``V_j - V_{j-1}`` and 0 off ``V_{l-1}``.

    The basis lists the top block first so the coordinates start with the
    generic value 0.
    """
    blocks = _adapted_blocks(F)
    values = list(F.jumps) + [0]
    cols, coords = [], []
    for block, c in reversed(list(zip(blocks, values))):
        cols.extend(block)
        coords.extend([c] * len(block))
    return DiagSeminorm(Mat(F.field, tuple(cols), F.dim), normalize(coords))


def seminorm_to_flag(x: DiagSeminorm) -> Flag:
    """Balls of a seminorm over a trivially valued field, as a flag."""
    _require_trivial(x.field)
    levels = sorted(set(x.coords), reverse=True)
    low = levels[-1]
    subs, jumps = [], []
    for a in levels:
        subs.append([x.basis.cols[i] for i, c in enumerate(x.coords) if c >= a])
        if a != low:
            jumps.append(INF if a == INF else a - low)
    return Flag(x.field, x.dim, tuple(subs), tuple(jumps))


def trivial_project(emb, F: Flag) -> TropPoint:
    """Coordinates ``sum_j (c_j - c_{j+1}) e_{F_j}`` with ``F_j = {i : f_i in V_j}``.

    The sum telescopes to ``c_{level(f_i)}`` at coordinate ``i`` (``c_l = 0``).
    """
    if emb.field != F.field:
        raise ValueError("embedding and flag live over different fields")
    values = list(F.jumps) + [0]
    out = []
    for col in emb.columns.cols:
        j = F.level(col)
        tail = 0
        for c_j, c_next in zip(values[j - 1:], values[j:]):
            step = INF if c_j == INF else c_j - c_next
            tail = INF if step == INF or tail == INF else tail + step
        out.append(tail)
    return normalize(out)


# -- tight-span chart -------------------------------------------------------
#
# Max-plus conventions: w = -v, so non-bases carry -inf.  The chart lives on
# the hyperplane sum(p_b for b in B) = w(B).

NEG_INF = -INF


def _w(v: ValuatedMatroid, A) -> object:
    A = tuple(sorted(A))
    if len(set(A)) != len(A):
        return NEG_INF
    x = v.value(A)
    return NEG_INF if x == INF else -x


@dataclass(frozen=True)
class ChartResult:
    basis: tuple
    values: tuple  # one value per ground element
    violations: tuple  # elements where the fixed-point equation fails

    @property
    def ok(self) -> bool:
        return not self.violations


def onto_hyperplane(v: ValuatedMatroid, B: Sequence[int], u: Sequence) -> tuple:
    """Shift ``u`` along the diagonal so that ``sum(u) = -v(B)``."""
    u = [trop_value(x) for x in u]
    c = Fraction(-v.value(B) - sum(u), len(u))
    return tuple(trop_value(x + c) for x in u)


def tight_span_chart(v: ValuatedMatroid, B: Sequence[int], u: Sequence) -> ChartResult:
    """``Phi_B(u)(e) = max_{i in B} (w(e + B - i) + u_i) - w(B)`` and its fixed-point check.

    ``u`` has one entry per element of ``sorted(B)`` and must satisfy
    ``sum(u) = -v(B)``.
    """
    B = tuple(sorted(B))
    if len(B) != v.rank or v.value(B) == INF:
        raise ValueError(f"{list(B)} is not a basis")
    u = tuple(trop_value(x) for x in u)
    if len(u) != len(B) or any(x == INF for x in u):
        raise ValueError("chart coordinates must be finite, one per basis element")
    wB = _w(v, B)
    if sum(u) != wB:
        raise ValueError("point is off the hyperplane sum(u) = -v(B)")
    p = []
    for e in range(v.n1):
        best = NEG_INF
        for i, ui in zip(B, u):
            t = _w(v, [e] + [b for b in B if b != i])
            if t != NEG_INF and t + ui > best:
                best = t + ui
        p.append(best - wB if best != NEG_INF else NEG_INF)
    bad = tuple(e for e in range(v.n1) if not _fixed_point_holds(v, p, e))
    return ChartResult(B, tuple(trop_value(x) if x != NEG_INF else x for x in p), bad)


def _fixed_point_holds(v: ValuatedMatroid, p: Sequence, e: int) -> bool:
    """``p(e) = max over r-sets T avoiding e of w(e + T) - sum_{t in T} p(t)``."""
    best = NEG_INF
    others = [x for x in range(v.n1) if x != e]
    for T in combinations(others, v.rank - 1):
        w = _w(v, (e,) + T)
        if w == NEG_INF or any(p[t] == NEG_INF for t in T):
            continue
        s = w - sum(p[t] for t in T)
        if s > best:
            best = s
    return best == p[e]


def chart_sign_duality(emb, B: Sequence[int], u: Sequence) -> Verdict:
    """Check ``Phi_B(-u)(e) = -evaluate(||.||_{B,u}, f_e)`` for every column ``e``.

    ``u`` is indexed like ``sorted(B)`` and must be finite with ``sum(u) = v(B)``.
    """
    B = tuple(sorted(B))
    v = emb.matroid
    chart = tight_span_chart(v, B, [-trop_value(x) for x in u])
    u = [trop_value(c) for c in u]
    # evaluate with this exact representative, not the canonical one
    solver = Solver(emb.field, emb.columns.select(B).cols)
    for e, col in enumerate(emb.columns.cols):
        ev = min((lv + c for lv, c in zip(solver.solve_valuations(col), u) if lv != INF), default=INF)
        want = NEG_INF if ev == INF else -ev
        got = chart.values[e]
        if got != want:
            return Verdict(False, {"element": e, "chart": got, "evaluate": ev})
    return Verdict(True)
