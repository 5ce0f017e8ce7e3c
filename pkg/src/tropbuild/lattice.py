"""Lattices over the valuation ring of a discretely valued field.

A lattice class is kept in a canonical column form: lower triangular,
diagonal entries pure powers of the uniformizer, entries below a pivot
reduced to a fixed set of representatives modulo that pivot, and the
smallest pivot exponent equal to 0.  Two bases span homothetic lattices
exactly when their canonical forms coincide.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ._poly import RatFunc
from .building import DiagSeminorm, evaluate
from .tropcore import INF, TropPoint, normalize
from .valfield import FieldSpec, Mat, rank_raw


def _require_discrete(spec: FieldSpec):
    if not spec.is_discrete:
        raise ValueError("lattices need a discretely valued field")


def _residue_rep(spec: FieldSpec, x, k: int):
    """Canonical representative of ``x`` modulo ``pi^k`` times the valuation ring."""
    if not x:
        return spec.zero()
    v = spec.val(x)
    if v >= k:
        return spec.zero()
    if spec.is_polynomial:
        terms = x.laurent(k)
        lo = min(terms)
        num = [terms.get(d, Fraction(0)) for d in range(lo, k)]
        rep = RatFunc.from_coeffs(num)
        return rep * RatFunc.t_power(lo)
    p = spec.p
    unit = x / Fraction(p) ** v
    m = p ** (k - v)
    c = unit.numerator * pow(unit.denominator, -1, m) % m
    return Fraction(c) * Fraction(p) ** v


def _column_form(spec: FieldSpec, cols: list[list]) -> tuple[list[list], list[int]]:
    """Lower-triangular pivot form of the lattice spanned by ``cols``."""
    n = len(cols)
    cols = [list(c) for c in cols]
    pivots = []
    for i in range(n):
        j_best, v_best = None, INF
        for j in range(i, n):
            v = spec.val(cols[j][i])
            if v < v_best:
                j_best, v_best = j, v
        if j_best is None:
            raise ValueError("lattice basis is singular")
        cols[i], cols[j_best] = cols[j_best], cols[i]
        k = v_best
        unit = cols[i][i] / spec.uniformizer_power(k)
        cols[i] = [x / unit for x in cols[i]]
        piv = cols[i][i]
        for j in range(i + 1, n):
            a = cols[j][i]
            if a:
                q = a / piv
                cols[j] = [x - q * y for x, y in zip(cols[j], cols[i])]
        pivots.append(k)
    # reduce entries below each pivot, top rows first
    for j in range(n):
        for i in range(j + 1, n):
            a = cols[j][i]
            rep = _residue_rep(spec, a, pivots[i])
            if a != rep:
                q = (a - rep) / cols[i][i]
                cols[j] = [x - q * y for x, y in zip(cols[j], cols[i])]
    return cols, pivots


def canonical_basis(spec: FieldSpec, cols: Sequence[Sequence]) -> tuple:
    _require_discrete(spec)
    cols = [[spec.coerce(x) for x in c] for c in cols]
    form, pivots = _column_form(spec, cols)
    m = min(pivots)
    if m:
        s = spec.uniformizer_power(-m)
        form, pivots = _column_form(spec, [[x * s for x in c] for c in form])
    return tuple(tuple(c) for c in form)


@dataclass(frozen=True)
class LatticeClass:
    basis: Mat

    def __post_init__(self):
        spec = self.basis.field
        _require_discrete(spec)
        if self.basis.nrows != self.basis.ncols:
            raise ValueError("lattice basis must be square")
        object.__setattr__(self, "basis", Mat(spec, canonical_basis(spec, self.basis.cols),
                                              self.basis.nrows))

    @classmethod
    def from_columns(cls, spec: FieldSpec, cols: Sequence[Sequence]) -> "LatticeClass":
        return cls(Mat(spec, tuple(tuple(c) for c in cols)))

    @classmethod
    def standard(cls, spec: FieldSpec, dim: int) -> "LatticeClass":
        return cls(Mat.identity(spec, dim))

    @property
    def field(self) -> FieldSpec:
        return self.basis.field

    @property
    def dim(self) -> int:
        return self.basis.nrows

    @property
    def canonical(self) -> bool:
        return True

    def pivot_exponents(self) -> tuple:
        return tuple(self.field.val(self.basis.cols[i][i]) for i in range(self.dim))


def gauge(L: LatticeClass) -> DiagSeminorm:
    """The norm whose unit ball is ``L``: coordinates 0 on the lattice basis."""
    return DiagSeminorm(L.basis, TropPoint((0,) * L.dim))


def unit_ball(x: DiagSeminorm) -> LatticeClass:
    """Closed unit ball of an integer-valued norm.

    With ``-log`` coordinates ``u`` on the basis ``b``, the ball is spanned by
    ``pi^(-u_b) * b``.
    """
    spec = x.field
    _require_discrete(spec)
    if not x.is_norm():
        raise ValueError("a proper seminorm has no lattice unit ball")
    for c in x.coords:
        if Fraction(c).denominator != 1:
            raise ValueError(f"coordinate {c} is not an integer")
    cols = [tuple(spec.uniformizer_power(-int(u)) * a for a in col)
            for u, col in zip(x.coords, x.basis.cols)]
    return LatticeClass(Mat(spec, tuple(cols), x.dim))


@dataclass(frozen=True)
class JumpChain:
    lattices: tuple  # Lambda_0 <= ... <= Lambda_k, up to homothety
    jumps: tuple  # log c_i in (0, 1), increasing


def _ball(x: DiagSeminorm, s) -> LatticeClass:
    """``{f : -log ||f|| >= s}`` for the canonical representative."""
    spec = x.field
    cols = [tuple(spec.uniformizer_power(math.ceil(s - u)) * a for a in col)
            for u, col in zip(x.coords, x.basis.cols)]
    return LatticeClass(Mat(spec, tuple(cols), x.dim))


def jump_chain(x: DiagSeminorm) -> JumpChain:
    """The lattices ``{||f|| <= c}`` for ``c`` in ``(1, e]`` and where they change.

    ``Lambda_0`` is the ball of radius 1; the lattice ``Lambda_i`` first
    appears at ``log c_i``.  Consecutive lattices are nested and
    ``Lambda_k`` sits inside ``pi^-1 Lambda_0``.
    """
    _require_discrete(x.field)
    if not x.is_norm():
        raise ValueError("jump chains need a norm, not a proper seminorm")
    fracs = sorted({Fraction(u) - math.floor(Fraction(u)) for u in x.coords} - {0}, reverse=True)
    lattices = [_ball(x, 0)]
    jumps = []
    for phi in fracs:
        lattices.append(_ball(x, phi - 1))
        jumps.append(1 - phi)
    return JumpChain(tuple(lattices), tuple(jumps))


# -- relative position ------------------------------------------------------


def elementary_divisors(L1: LatticeClass, L2: LatticeClass) -> tuple:
    """Valuations of the elementary divisors of ``L2`` relative to ``L1``, shifted to min 0."""
    spec = L1.field
    if L2.field != spec or L2.dim != L1.dim:
        raise ValueError("lattices live on different spaces")
    from .valfield import Solver

    solver = Solver(spec, L1.basis.cols)
    cols = [list(solver.solve(c)) for c in L2.basis.cols]
    n = len(cols)
    out = []
    active_r = list(range(n))
    active_c = list(range(n))
    while active_c:
        best = None
        for j in active_c:
            for i in active_r:
                v = spec.val(cols[j][i])
                if best is None or v < best[0]:
                    best = (v, i, j)
        v, i0, j0 = best
        out.append(v)
        piv = cols[j0][i0]
        for j in active_c:
            if j != j0 and cols[j][i0]:
                q = cols[j][i0] / piv
                cols[j] = [x - q * y for x, y in zip(cols[j], cols[j0])]
        for i in active_r:
            if i != i0 and cols[j0][i]:
                q = cols[j0][i] / piv
                for j in active_c:
                    cols[j][i] = cols[j][i] - q * cols[j][i0]
        active_r.remove(i0)
        active_c.remove(j0)
    m = min(out)
    return tuple(sorted(v - m for v in out))


@dataclass(frozen=True)
class Adjacency:
    relation: str  # "equal", "adjacent" or "distant"
    divisors: tuple

    def __bool__(self):
        return self.relation == "adjacent"


def relative_position(L1: LatticeClass, L2: LatticeClass) -> Adjacency:
    d = elementary_divisors(L1, L2)
    if max(d) == 0:
        return Adjacency("equal", d)
    if max(d) == 1:
        return Adjacency("adjacent", d)
    return Adjacency("distant", d)


def adjacent(L1: LatticeClass, L2: LatticeClass) -> bool:
    """Distinct classes with representatives ``pi L1 < L2 < L1``."""
    return bool(relative_position(L1, L2))


# -- the tree for rank 2 over Q_p --------------------------------------------


def tree_neighbors(L: LatticeClass) -> list[LatticeClass]:
    """The ``p + 1`` neighbours: sublattices between ``L`` and ``pi L`` of index ``p``."""
    spec = L.field
    if spec.kind != "rationals-p-adic":
        raise ValueError("tree neighbours are enumerated only over Q with a p-adic valuation")
    if L.dim != 2:
        raise ValueError("tree neighbours need rank 2")
    b0, b1 = L.basis.cols
    p = spec.p
    out = []
    for a in range(p):
        c0 = tuple(x + a * y for x, y in zip(b0, b1))
        c1 = tuple(p * y for y in b1)
        out.append(LatticeClass(Mat(spec, (c0, c1), 2)))
    out.append(LatticeClass(Mat(spec, (b1, tuple(p * x for x in b0)), 2)))
    return out


@dataclass(frozen=True)
class TreeBall:
    nodes: tuple
    edges: tuple  # index pairs (i, j) with i < j
    depth: tuple  # distance from the centre per node

    def is_tree(self) -> bool:
        if len(self.edges) != len(self.nodes) - 1:
            return False
        parent = list(range(len(self.nodes)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i, j in self.edges:
            a, b = find(i), find(j)
            if a == b:
                return False
            parent[a] = b
        return True

    def counts(self) -> list[int]:
        out = [0] * (max(self.depth) + 1)
        for d in self.depth:
            out[d] += 1
        return out


def tree_ball(center: LatticeClass, radius: int) -> TreeBall:
    """Breadth-first ball in the tree; edges between all adjacent classes found."""
    index = {center: 0}
    nodes, depth = [center], [0]
    edges = set()
    queue = deque([center])
    while queue:
        L = queue.popleft()
        i = index[L]
        for N in tree_neighbors(L):
            if N not in index:
                if depth[i] == radius:
                    continue
                index[N] = len(nodes)
                nodes.append(N)
                depth.append(depth[i] + 1)
                queue.append(N)
            j = index[N]
            edges.add((min(i, j), max(i, j)))
    return TreeBall(tuple(nodes), tuple(sorted(edges)), tuple(depth))


# -- membranes --------------------------------------------------------------


@dataclass(frozen=True)
class MembraneResult:
    lattice: LatticeClass
    members: tuple  # (column index, exponent a) with basis vectors pi^a f_i
    recovered: TropPoint

    @property
    def ok(self) -> bool:
        return True


def membrane_roundtrip(emb, u) -> MembraneResult:
    """Integer point -> lattice (unit ball of the section) -> point again."""
    from .troplin import project_pi, section_basis

    spec = emb.field
    _require_discrete(spec)
    u = normalize(u)
    if any(c == INF or Fraction(c).denominator != 1 for c in u):
        raise ValueError("membrane points need finite integer coordinates")
    B = section_basis(emb, u)
    x = emb.basis_seminorm(B, [u[b] for b in B])
    L = unit_ball(x)
    members = tuple((b, -int(c)) for b, c in zip(B, x.coords))
    back = project_pi(emb, gauge(L))
    if back != u:
        raise RuntimeError(f"membrane round trip failed: {u} -> {back}")
    return MembraneResult(L, members, back)


def is_membrane_basis(emb, L: LatticeClass, members) -> bool:
    """Whether ``pi^a f_i`` over ``members`` spans the same class as ``L``."""
    spec = emb.field
    cols = [tuple(spec.uniformizer_power(a) * x for x in emb.columns.cols[i]) for i, a in members]
    if rank_raw(spec, cols, emb.dim) != emb.dim:
        return False
    return LatticeClass(Mat(spec, tuple(cols), emb.dim)) == L


def gauge_value(L: LatticeClass, f) -> object:
    """``-log q_L(f)``."""
    return evaluate(gauge(L), f)
