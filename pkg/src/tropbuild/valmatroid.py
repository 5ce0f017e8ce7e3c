"""Finite valuated matroids and their underlying matroids."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from . import _kernels
from .tropcore import INF, Verdict, trop_value
from .valfield import Mat, maximal_minor_valuations, rank_raw


@dataclass(frozen=True)
class ValuatedMatroid:
    """Basis valuation on the ``rank``-subsets of ``{0, ..., n1-1}``.

    ``values`` follows ``itertools.combinations`` order and is stored with
    minimum finite entry 0.
    """

    n1: int
    rank: int
    values: tuple

    def __post_init__(self):
        if not 0 < self.rank <= self.n1:
            raise ValueError(f"rank {self.rank} impossible on {self.n1} elements")
        vals = tuple(trop_value(x) for x in self.values)
        expected = len(_kernels.subset_index(self.n1, self.rank))
        if len(vals) != expected:
            raise ValueError(f"expected {expected} table entries, got {len(vals)}")
        finite = [x for x in vals if x != INF]
        if not finite:
            raise ValueError("valuated matroid needs at least one finite entry")
        m = min(finite)
        if m != 0:
            vals = tuple(x if x == INF else trop_value(Fraction(x - m)) for x in vals)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_table(cls, n1: int, rank: int, table: Mapping) -> "ValuatedMatroid":
        """Build from ``{subset: value}``; subsets not listed are infinite."""
        idx = _kernels.subset_index(n1, rank)
        vals = [INF] * len(idx)
        for s, x in table.items():
            key = tuple(sorted(s))
            if key not in idx:
                raise ValueError(f"{list(s)} is not a {rank}-subset of range({n1})")
            vals[idx[key]] = trop_value(x)
        return cls(n1, rank, tuple(vals))

    @property
    def n(self) -> int:
        return self.n1 - 1

    @property
    def r(self) -> int:
        return self.rank - 1

    @property
    def normalized(self) -> bool:
        return True

    def subsets(self):
        return combinations(range(self.n1), self.rank)

    def value(self, A: Iterable[int]):
        return self.values[_kernels.subset_index(self.n1, self.rank)[tuple(sorted(A))]]

    def table(self) -> dict:
        return dict(zip(self.subsets(), self.values))

    def bases(self) -> list[tuple]:
        return [A for A, x in zip(self.subsets(), self.values) if x != INF]

    def __str__(self):
        return f"ValuatedMatroid(n1={self.n1}, rank={self.rank})"


class Matroid:
    """A matroid given by its bases, with rank and closure computed on bitmasks."""

    def __init__(self, n1: int, bases: Iterable[Iterable[int]]):
        bs = sorted({tuple(sorted(b)) for b in bases})
        if not bs:
            raise ValueError("a matroid needs at least one basis")
        sizes = {len(b) for b in bs}
        if len(sizes) != 1:
            raise ValueError("bases of different sizes")
        self.n1 = n1
        self.rank = sizes.pop()
        self.bases = tuple(bs)
        self._masks = [sum(1 << i for i in b) for b in bs]
        self._rank_cache: dict[int, int] = {}

    def __eq__(self, other):
        return isinstance(other, Matroid) and self.n1 == other.n1 and self.bases == other.bases

    def __hash__(self):
        return hash((self.n1, self.bases))

    def __repr__(self):
        return f"Matroid(n1={self.n1}, rank={self.rank}, bases={len(self.bases)})"

    @staticmethod
    def _mask(S: Iterable[int]) -> int:
        m = 0
        for i in S:
            m |= 1 << i
        return m

    def rank_of(self, S) -> int:
        m = S if isinstance(S, int) else self._mask(S)
        r = self._rank_cache.get(m)
        if r is None:
            r = max((m & b).bit_count() for b in self._masks)
            self._rank_cache[m] = r
        return r

    def is_basis(self, S) -> bool:
        return tuple(sorted(S)) in set(self.bases)

    def is_independent(self, S) -> bool:
        m = self._mask(S)
        return any(m & b == m for b in self._masks)

    def closure(self, S) -> frozenset:
        m = self._mask(S)
        r = self.rank_of(m)
        out = set(S)
        for e in range(self.n1):
            if not m >> e & 1 and self.rank_of(m | 1 << e) == r:
                out.add(e)
        return frozenset(out)

    def is_flat(self, S) -> bool:
        return self.closure(S) == frozenset(S)

    def loops(self) -> list[int]:
        covered = 0
        for b in self._masks:
            covered |= b
        return [e for e in range(self.n1) if not covered >> e & 1]

    def satisfies_exchange(self) -> bool:
        """Check the basis exchange axiom directly."""
        bset = set(self.bases)
        for A in self.bases:
            for B in self.bases:
                for a in set(A) - set(B):
                    rest = set(A) - {a}
                    if not any(tuple(sorted(rest | {b})) in bset for b in set(B) - set(A)):
                        return False
        return True

    def to_valuated(self) -> ValuatedMatroid:
        """The 0/inf valuation of a matroid (trivial valuation)."""
        return ValuatedMatroid.from_table(self.n1, self.rank, {b: 0 for b in self.bases})


@dataclass(frozen=True)
class FlatLattice:
    flats: tuple  # sorted by (rank, elements)
    ranks: tuple
    covers: tuple  # pairs (i, j): flats[i] covered by flats[j]

    def index(self, F) -> int:
        return self.flats.index(frozenset(F))

    def proper_nonempty(self) -> list[frozenset]:
        top = self.flats[-1]
        return [F for F in self.flats if F and F != top]

    def maximal_chains(self, limit: int | None = None) -> list[tuple]:
        """Maximal chains from the bottom flat to the whole ground set."""
        up: dict[int, list[int]] = {}
        for i, j in self.covers:
            up.setdefault(i, []).append(j)
        top = len(self.flats) - 1
        out: list[tuple] = []

        def walk(i, path):
            if limit is not None and len(out) >= limit:
                return
            if i == top:
                out.append(tuple(self.flats[k] for k in path))
                return
            for j in up.get(i, ()):
                walk(j, path + [j])

        walk(0, [0])
        return out


def from_matrix(f: Mat) -> ValuatedMatroid:
    """Valuated matroid of a realization: valuations of all maximal minors."""
    zero_cols = [j for j, c in enumerate(f.cols) if not any(c)]
    if zero_cols:
        raise ValueError(f"zero columns are not allowed: {zero_cols}")
    k = f.nrows
    if f.ncols < k or rank_raw(f.field, f.cols, k) < k:
        raise ValueError("matrix does not have full row rank")
    vals = maximal_minor_valuations(f.field, f.cols, k)
    return ValuatedMatroid(f.ncols, k, tuple(vals))


def check_plucker(v: ValuatedMatroid, backend: str | None = None) -> Verdict:
    """Exchange condition over all (tau, sigma); witness is the first failure."""
    hit = _kernels.plucker_violation(v.values, v.n1, v.rank, backend)
    if hit is None:
        return Verdict(True)
    tau, sigma = hit
    return Verdict(False, {"tau": list(tau), "sigma": list(sigma)})


def underlying_matroid(v: ValuatedMatroid) -> Matroid:
    return Matroid(v.n1, v.bases())


def _finite_point(v: ValuatedMatroid, u) -> tuple:
    u = tuple(u)
    if len(u) != v.n1:
        raise ValueError(f"point has {len(u)} coordinates, ground set has {v.n1}")
    if any(x == INF for x in u):
        raise ValueError("initial matroids need a point with finite coordinates")
    return u


def initial_matroid(v: ValuatedMatroid, u) -> Matroid:
    """Bases minimizing ``v(B) - sum(u_b for b in B)``."""
    u = _finite_point(v, u)
    scores = {}
    for B, x in zip(v.subsets(), v.values):
        if x != INF:
            scores[B] = x - sum(u[b] for b in B)
    best = min(scores.values())
    return Matroid(v.n1, [B for B, s in scores.items() if s == best])


def flats(M: Matroid) -> FlatLattice:
    """All flats of a loopless matroid with their covering relations."""
    loops = M.loops()
    if loops:
        raise ValueError(f"matroid has loops: {loops}")
    bottom = M.closure(())
    seen = {bottom}
    frontier = [bottom]
    while frontier:
        nxt = []
        for F in frontier:
            for e in range(M.n1):
                if e not in F:
                    G = M.closure(F | {e})
                    if G not in seen:
                        seen.add(G)
                        nxt.append(G)
        frontier = nxt
    ordered = sorted(seen, key=lambda F: (M.rank_of(F), sorted(F)))
    ranks = tuple(M.rank_of(F) for F in ordered)
    covers = []
    for i, F in enumerate(ordered):
        for j, G in enumerate(ordered):
            if ranks[j] == ranks[i] + 1 and F < G:
                covers.append((i, j))
    return FlatLattice(tuple(ordered), ranks, tuple(covers))


def restrict(v: ValuatedMatroid, S: Iterable[int]) -> ValuatedMatroid:
    """Restriction to ``S``, relabelled to positions ``0..|S|-1`` of sorted ``S``."""
    S = sorted(set(S))
    if any(not 0 <= s < v.n1 for s in S):
        raise ValueError("restriction set leaves the ground set")
    vals = [v.value(tuple(S[i] for i in A)) for A in combinations(range(len(S)), v.rank)]
    if all(x == INF for x in vals):
        raise ValueError("restriction set contains no basis")
    return ValuatedMatroid(len(S), v.rank, tuple(vals))
