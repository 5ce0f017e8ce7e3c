"""Tropical linear spaces of valuated matroids and the maps between an
embedding's tropicalization and seminorm classes.

For an embedding given by covectors ``f_0, ..., f_n`` the projection sends a
seminorm class ``x`` to ``(-log ||f_k||_x)_k``; the section goes back by
picking a basis ``B`` among the columns and using the seminorm diagonalized
by ``f_B`` with coordinates ``u_B``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence

from . import _kernels
from .building import DiagSeminorm, evaluate
from .tropcore import INF, TropPoint, Verdict, min_attained_twice, normalize, trop_value
from .valfield import FieldSpec, Mat, Solver, rank_raw
from .valmatroid import Matroid, ValuatedMatroid, from_matrix, initial_matroid


class NotInLinearSpace(ValueError):
    """Raised when a point fails the circuit condition; carries the circuit."""

    def __init__(self, circuit):
        super().__init__(f"point is not in the tropical linear space (circuit {list(circuit)})")
        self.circuit = tuple(circuit)


class SectionError(RuntimeError):
    """No basis closes the projection/section round trip."""


class OracleInconsistency(ValueError):
    def __init__(self, query, first, second):
        super().__init__(f"oracle values for query {query} disagree between embeddings")
        self.query = query
        self.first = first
        self.second = second


class OracleIncomplete(KeyError):
    pass


@dataclass(frozen=True)
class Embedding:
    """Nonzero covectors ``f_0..f_n`` (the columns) spanning ``(K^{r+1})*``."""

    columns: Mat

    def __post_init__(self):
        zero = [j for j, c in enumerate(self.columns.cols) if not any(c)]
        if zero:
            raise ValueError(f"embedding columns must be nonzero: {zero}")
        if rank_raw(self.field, self.columns.cols, self.columns.nrows) != self.columns.nrows:
            raise ValueError("embedding columns do not span the dual space")

    @classmethod
    def from_columns(cls, spec: FieldSpec, cols: Sequence[Sequence]) -> "Embedding":
        return cls(Mat(spec, tuple(tuple(c) for c in cols)))

    @property
    def field(self) -> FieldSpec:
        return self.columns.field

    @property
    def n1(self) -> int:
        return self.columns.ncols

    @property
    def dim(self) -> int:
        return self.columns.nrows

    @cached_property
    def matroid(self) -> ValuatedMatroid:
        return from_matrix(self.columns)

    @cached_property
    def _solvers(self) -> dict:
        return {}

    def solver(self, B: Sequence[int]) -> Solver:
        B = tuple(B)
        s = self._solvers.get(B)
        if s is None:
            s = Solver(self.field, [self.columns.cols[b] for b in B])
            self._solvers[B] = s
        return s

    def basis_seminorm(self, B: Sequence[int], coords: Sequence) -> DiagSeminorm:
        """The seminorm diagonalized by ``f_B`` with the given coordinates."""
        return DiagSeminorm(self.columns.select(B), normalize(coords))


def _point(u, n1: int) -> TropPoint:
    u = normalize(u)
    if len(u) != n1:
        raise ValueError(f"point has {len(u)} coordinates, expected {n1}")
    return u


def tls_contains(v: ValuatedMatroid, u) -> Verdict:
    """Every (r+2)-set attains ``min_e v(tau - e) + u_e`` at least twice."""
    u = _point(u, v.n1)
    hit = _kernels.circuit_violation(v.values, u.coords, v.n1, v.rank)
    if hit is None:
        return Verdict(True)
    return Verdict(False, {"circuit": list(hit)})


def project_pi(emb: Embedding, x: DiagSeminorm) -> TropPoint:
    if x.field != emb.field or x.dim != emb.dim:
        raise ValueError("seminorm and embedding live on different spaces")
    return normalize([evaluate(x, col) for col in emb.columns.cols])


def _candidate_bases(v: ValuatedMatroid, u: TropPoint) -> list[tuple]:
    """Bases to try for the section, best first.

    Finite points use the lexicographic order of the initial matroid.  For a
    boundary point, bases meeting the infinite set in as many elements as
    possible come first, then the initial-matroid score on the finite part.
    """
    if u.is_finite():
        return list(initial_matroid(v, u.coords).bases)
    S = u.infinite_set()

    def key(B):
        score = v.value(B) - sum(u[b] for b in B if b not in S)
        return (-len(S.intersection(B)), score, B)

    return sorted((B for B in v.bases() if not S.issuperset(B)), key=key)


def section_J(emb: Embedding, u) -> DiagSeminorm:
    """A seminorm class projecting to ``u``; raises if ``u`` is not a member."""
    u = _point(u, emb.n1)
    B = section_basis(emb, u)
    return emb.basis_seminorm(B, [u[b] for b in B])


def section_basis(emb: Embedding, u) -> tuple:
    """The basis used by ``section_J``."""
    v = emb.matroid
    u = _point(u, emb.n1)
    verdict = tls_contains(v, u)
    if not verdict:
        raise NotInLinearSpace(verdict.witness["circuit"])
    for B in _candidate_bases(v, u):
        x = emb.basis_seminorm(B, [u[b] for b in B])
        if project_pi(emb, x) == u:
            return B
    raise SectionError(f"no basis closes the round trip at {u}")


def local_tls_contains(emb: Embedding, B: Sequence[int], u) -> bool:
    v = emb.matroid
    B = tuple(sorted(B))
    if len(B) != v.rank or v.value(B) == INF:
        raise ValueError(f"{list(B)} is not a basis")
    u = _point(u, emb.n1)
    if u.is_finite():
        return B in initial_matroid(v, u.coords).bases and bool(tls_contains(v, u))
    coords = [u[b] for b in B]
    if all(c == INF for c in coords):
        return False
    return project_pi(emb, emb.basis_seminorm(B, coords)) == u


# -- small circuits ---------------------------------------------------------


@dataclass(frozen=True)
class CircuitReport:
    ok: bool
    pairs: tuple  # (i, j, val(lambda)) with S[j] = lambda * S[i]
    triples: tuple  # (i, j, k, val(alpha), val(beta)) with S[k] = alpha S[i] + beta S[j]
    failure: object = None

    def __bool__(self):
        return self.ok


def _relations(spec: FieldSpec, S: Sequence[Sequence]):
    pairs, triples = [], []
    dim = len(S[0])
    for i, j in combinations(range(len(S)), 2):
        if rank_raw(spec, [S[i], S[j]], dim) == 1:
            lam = _ratio(S[j], S[i])
            pairs.append((i, j, spec.val(lam)))
    for i, j in combinations(range(len(S)), 2):
        if rank_raw(spec, [S[i], S[j]], dim) < 2:
            continue
        basis = _plane_solver(spec, S[i], S[j])
        for k in range(len(S)):
            if k in (i, j):
                continue
            coef = basis(S[k])
            if coef is not None and coef[0] and coef[1]:
                triples.append((i, j, k, spec.val(coef[0]), spec.val(coef[1])))
    return pairs, triples


def _ratio(b, a):
    for x, y in zip(a, b):
        if x:
            return y / x
    raise ValueError("zero covector")


def _plane_solver(spec: FieldSpec, a, b):
    """Returns a function giving ``(alpha, beta)`` with ``c = alpha a + beta b``, or None."""
    dim = len(a)
    rows = None
    for p, q in combinations(range(dim), 2):
        d = a[p] * b[q] - a[q] * b[p]
        if d:
            rows = (p, q, d)
            break

    def solve(c):
        p, q, d = rows
        alpha = (c[p] * b[q] - c[q] * b[p]) / d
        beta = (a[p] * c[q] - a[q] * c[p]) / d
        if any(alpha * x + beta * y != z for x, y, z in zip(a, b, c)):
            return None
        return alpha, beta

    return solve


def check_small_circuits(spec: FieldSpec, S: Sequence[Sequence], assign: Sequence) -> CircuitReport:
    """Two- and three-term relations inside the finite covector set ``S``.

    For ``S[j] = lam S[i]`` the minimum of ``u_j`` and ``u_i + val(lam)``
    must be attained twice; for ``S[k] = alpha S[i] + beta S[j]`` so must the
    minimum of ``u_k``, ``u_i + val(alpha)`` and ``u_j + val(beta)``.
    """
    S = [tuple(spec.coerce(c) for c in f) for f in S]
    if len(assign) != len(S):
        raise ValueError("one value per covector is required")
    if any(not any(f) for f in S):
        raise ValueError("zero covectors carry no condition")
    u = [trop_value(x) for x in assign]

    def plus(a, b):
        return INF if a == INF or b == INF else a + b

    pairs, triples = _relations(spec, S)
    for i, j, lv in pairs:
        if not min_attained_twice([u[j], plus(u[i], lv)]):
            return CircuitReport(False, tuple(pairs), tuple(triples), {"pair": [i, j]})
    for i, j, k, va, vb in triples:
        if not min_attained_twice([u[k], plus(u[i], va), plus(u[j], vb)]):
            return CircuitReport(False, tuple(pairs), tuple(triples), {"triple": [i, j, k]})
    return CircuitReport(True, tuple(pairs), tuple(triples))


def circuits_of(spec: FieldSpec, S: Sequence[Sequence]) -> list[tuple]:
    """Minimal dependent index sets of the covector list ``S``."""
    dim = len(S[0])
    out: list[tuple] = []
    for size in range(1, min(len(S), dim + 1) + 1):
        for C in combinations(range(len(S)), size):
            if any(set(D) <= set(C) for D in out):
                continue
            if rank_raw(spec, [S[i] for i in C], dim) < size:
                out.append(C)
    return out


def is_split_closed(spec: FieldSpec, S: Sequence[Sequence]) -> bool:
    """Every circuit with four or more elements splits through a member of ``S``.

    A split of ``C`` is a partition ``C1 | C2`` (both of size two or more) and
    an ``e`` in ``S`` with ``C1 + e`` and ``C2 + e`` circuits.  On such sets the
    two- and three-term conditions imply all circuit conditions.
    """
    S = [tuple(spec.coerce(c) for c in f) for f in S]
    circ = circuits_of(spec, S)
    cset = {frozenset(C) for C in circ}
    for C in circ:
        if len(C) < 4:
            continue
        found = False
        for size in range(2, len(C) - 1):
            for C1 in combinations(C, size):
                C2 = frozenset(C) - set(C1)
                for e in range(len(S)):
                    if e not in C and frozenset(C1) | {e} in cset and C2 | {e} in cset:
                        found = True
                        break
                if found:
                    break
            if found:
                break
        if not found:
            return False
    return True


def universal_restriction(spec: FieldSpec, S: Sequence[Sequence]) -> ValuatedMatroid:
    """The universal realizable matroid restricted to the finite set ``S``."""
    return from_matrix(Mat(spec, tuple(tuple(f) for f in S)))


# -- seminorm reconstruction ------------------------------------------------


def _fingerprint(cols: Mat) -> str:
    from .serialize import mat_to_json

    return json.dumps(mat_to_json(cols), sort_keys=True, separators=(",", ":"))


@dataclass
class ProjectionOracle:
    """The compatible family ``emb -> project_pi(emb, x)`` of a hidden class."""

    hidden: DiagSeminorm
    calls: int = 0

    def __call__(self, emb: Embedding) -> TropPoint:
        self.calls += 1
        return project_pi(emb, self.hidden)


@dataclass
class TableOracle:
    """A finite lookup table from embedding to point; misses are errors."""

    entries: dict = field(default_factory=dict)

    def add(self, emb: Embedding, point) -> None:
        self.entries[_fingerprint(emb.columns)] = normalize(point)

    def __call__(self, emb: Embedding) -> TropPoint:
        key = _fingerprint(emb.columns)
        if key not in self.entries:
            raise OracleIncomplete(key)
        return self.entries[key]


@dataclass(frozen=True)
class Reconstruction:
    reference: int  # index of the standard covector used as reference
    values: tuple  # -log ||f|| - (-log ||g||) per query
    embeddings: tuple  # per query, the column matrices used for each check


def _standard(spec: FieldSpec, dim: int, i: int) -> tuple:
    one, zero = spec.one(), spec.zero()
    return tuple(one if k == i else zero for k in range(dim))


def _extend(spec: FieldSpec, dim: int, start: list, order: Iterable[int]) -> list:
    cols = list(start)
    r = rank_raw(spec, cols, dim)
    for i in order:
        if r == dim:
            break
        e = _standard(spec, dim, i)
        if rank_raw(spec, cols + [e], dim) > r:
            cols.append(e)
            r += 1
    return cols


def _variant_columns(spec: FieldSpec, dim: int, g, f, variant: int) -> list:
    if variant == 0:
        return _extend(spec, dim, [g, f], range(dim))
    start = [g, f]
    mixed = tuple(a + variant * b for a, b in zip(g, f))
    if any(mixed):
        start.append(mixed)
    rot = [(dim - 1 - k + variant) % dim for k in range(dim)]
    return _extend(spec, dim, start, rot)


def reconstruct_seminorm(oracle: Callable, spec: FieldSpec, dim: int,
                         queries: Sequence[Sequence], checks: int = 2) -> Reconstruction:
    """Recover ``-log ||f||`` (relative to a reference covector) from a compatible family.

    Each query is read off ``checks`` different embeddings that start with
    the reference ``g`` and the query ``f``; any disagreement raises
    ``OracleInconsistency``.
    """
    if checks < 1:
        raise ValueError("at least one embedding per query is needed")
    ident = Embedding(Mat.identity(spec, dim))
    y = _point(oracle(ident), dim)
    ref = next((i for i, c in enumerate(y) if c != INF), None)
    if ref is None:  # pragma: no cover - TropPoint forbids it
        raise ValueError("no finite reference coordinate")
    g = _standard(spec, dim, ref)
    values, used = [], []
    for q in queries:
        f = tuple(spec.coerce(c) for c in q)
        if len(f) != dim:
            raise ValueError("query covector of the wrong length")
        if not any(f):
            values.append(INF)
            used.append(())
            continue
        seen = []
        for variant in range(checks):
            cols = _variant_columns(spec, dim, g, f, variant)
            emb = Embedding(Mat(spec, tuple(cols), dim))
            yv = _point(oracle(emb), emb.n1)
            if yv[0] == INF:
                raise OracleInconsistency(list(q), (ident.columns, y[ref]), (emb.columns, yv[0]))
            val = INF if yv[1] == INF else yv[1] - yv[0]
            seen.append((val, emb.columns))
            if val != seen[0][0]:
                raise OracleInconsistency(list(q), (seen[0][1], seen[0][0]), (emb.columns, val))
        values.append(trop_value(seen[0][0]) if seen[0][0] != INF else INF)
        used.append(tuple(m for _, m in seen))
    return Reconstruction(ref, tuple(values), tuple(used))


# -- trivial valuation: Bergman fan -----------------------------------------


@dataclass(frozen=True)
class ChainWitness:
    ok: bool
    chain: tuple = ()  # flats, largest values first
    coefficients: tuple = ()
    offset: object = 0
    failure: object = None

    def __bool__(self):
        return self.ok


def bergman_contains(M: Matroid, u) -> ChainWitness:
    """Decompose ``u = sum a_j e_{F_j} + c 1`` over a chain of flats.

    Super-level sets of ``u`` are checked from the top value down; the
    infinite set, if any, is the smallest flat of the chain and carries
    coefficient ``inf``.
    """
    if M.loops():
        raise ValueError(f"matroid has loops: {M.loops()}")
    u = _point(u, M.n1)
    finite = sorted({x for x in u if x != INF}, reverse=True)
    levels = []
    inf_set = u.infinite_set()
    if inf_set:
        levels.append((frozenset(inf_set), INF))
    for a, b in zip(finite, finite[1:]):
        levels.append((frozenset(i for i, x in enumerate(u) if x >= a), a - b))
    for F, _ in levels:
        if not M.is_flat(F):
            return ChainWitness(False, failure={"not_a_flat": sorted(F)})
    return ChainWitness(True, tuple(F for F, _ in levels), tuple(a for _, a in levels), finite[-1])
