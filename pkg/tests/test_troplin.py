import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropbuild import samples
from tropbuild.building import DiagSeminorm, class_equal, evaluate, standard
from tropbuild.tropcore import INF, normalize
from tropbuild.troplin import (
    Embedding,
    NotInLinearSpace,
    OracleIncomplete,
    OracleInconsistency,
    ProjectionOracle,
    TableOracle,
    bergman_contains,
    check_small_circuits,
    is_split_closed,
    local_tls_contains,
    project_pi,
    reconstruct_seminorm,
    section_basis,
    section_J,
    tls_contains,
    universal_restriction,
)
from tropbuild.valfield import FieldSpec, Mat, Solver
from tropbuild.valmatroid import Matroid, ValuatedMatroid, from_matrix, initial_matroid, underlying_matroid

import oracles

Q2 = FieldSpec.padic(2)
Q = FieldSpec.trivial()
seeds = st.integers(0, 10**6)
specs = st.sampled_from(samples.BACKENDS)
U23 = ValuatedMatroid(3, 2, (0, 0, 0))


def emb_of(spec, cols):
    return Embedding.from_columns(spec, [tuple(Fraction(x) for x in c) for c in cols])


FOUR = emb_of(Q2, [(1, 0), (0, 1), (2, 1), (1, 1)])
TRIANGLE = emb_of(Q2, [(1, 0), (0, 1), (1, 1)])


def test_tls_examples():
    ident = ValuatedMatroid(2, 2, (0,))
    assert tls_contains(ident, (0, 7)) and tls_contains(ident, (INF, 0))
    assert tls_contains(U23, (0, 0, 5))
    verdict = tls_contains(U23, (0, 1, 2))
    assert not verdict and verdict.witness["circuit"] == [0, 1, 2]
    assert tls_contains(FOUR.matroid, project_pi(FOUR, standard(Q2, (0, 0))))


def test_project_examples():
    ident = emb_of(Q2, [(1, 0), (0, 1)])
    assert project_pi(ident, standard(Q2, (0, 3))) == normalize((0, 3))
    assert project_pi(FOUR, standard(Q2, (0, 0))) == normalize((0, 0, 0, 0))
    # coordinates are canonical, so (2, 0, 0, 0) is stored as (0, -2, -2, -2)
    assert project_pi(FOUR, standard(Q2, (2, 0))) == normalize((2, 0, 0, 0))


def test_section_examples():
    ident = emb_of(Q2, [(1, 0), (0, 1)])
    x = section_J(ident, (0, 3))
    assert x.coords == normalize((0, 3)) and x.basis.cols == ident.columns.cols
    u = normalize((0, 0, 5))
    assert section_basis(TRIANGLE, u) == (0, 2)
    assert project_pi(TRIANGLE, section_J(TRIANGLE, u)) == u
    with pytest.raises(NotInLinearSpace) as err:
        section_J(TRIANGLE, (0, 1, 2))
    assert err.value.circuit == (0, 1, 2)


@pytest.mark.parametrize("u,B", [((0, 0, INF), (0, 1)), ((0, INF, 0), (0, 2)), ((INF, 0, 0), (1, 2))])
def test_section_on_boundary_points(u, B):
    u = normalize(u)
    assert tls_contains(TRIANGLE.matroid, u)
    x = section_J(TRIANGLE, u)
    assert project_pi(TRIANGLE, x) == u
    assert not x.is_norm()
    chosen = section_basis(TRIANGLE, u)
    assert project_pi(TRIANGLE, TRIANGLE.basis_seminorm(chosen, [u[b] for b in chosen])) == u


def test_local_examples():
    u = (0, 0, 5)
    assert not local_tls_contains(TRIANGLE, (0, 1), u)
    assert local_tls_contains(TRIANGLE, (0, 2), u)
    assert local_tls_contains(TRIANGLE, (0, 1), (0, 0, 0))


def test_small_circuit_examples():
    e = (Fraction(1), Fraction(0))
    assert check_small_circuits(Q2, [e, (2, 0)], [0, 1])
    S = [(1, 0), (0, 1), (1, 1)]
    assert check_small_circuits(Q2, S, [0, 0, 0])
    rep = check_small_circuits(Q2, S, [0, 1, 2])
    assert not rep and rep.failure == {"triple": [0, 1, 2]}
    assert not check_small_circuits(Q2, [e, (2, 0)], [0, 0])


def test_reconstruct_examples():
    hidden = standard(Q2, (0, 0))
    rec = reconstruct_seminorm(ProjectionOracle(hidden), Q2, 2, [(1, 1)])
    assert rec.values == (0,)
    rec = reconstruct_seminorm(ProjectionOracle(standard(Q2, (0, INF))), Q2, 2, [(0, 1), (1, 0), (1, 1)])
    assert rec.values == (INF, 0, 0)


def test_reconstruct_detects_inconsistent_oracle():
    hidden = standard(Q2, (0, 1))
    honest = ProjectionOracle(hidden)
    calls = {"n": 0}

    def liar(emb):
        calls["n"] += 1
        y = honest(emb)
        if calls["n"] == 3:  # the second embedding of the first query
            return normalize([c if i != 1 else c + 1 for i, c in enumerate(y)])
        return y

    with pytest.raises(OracleInconsistency) as err:
        reconstruct_seminorm(liar, Q2, 2, [(1, 1)])
    assert err.value.first[0] != err.value.second[0]


def test_table_oracle_reports_missing_entries():
    with pytest.raises(OracleIncomplete):
        reconstruct_seminorm(TableOracle(), Q2, 2, [(1, 1)])


def test_bergman_examples():
    M = underlying_matroid(TRIANGLE.matroid)
    w = bergman_contains(M, (1, 0, 0))
    assert w and w.chain == (frozenset({0}),) and w.coefficients == (1,)
    assert not bergman_contains(M, (0, 1, 2))
    w0 = bergman_contains(M, (0, 0, 0))
    assert w0 and w0.chain == ()


@given(specs, seeds, st.integers(1, 3), st.integers(0, 3))
def test_project_matches_oracle_and_lands_in_space(spec, seed, k, extra):
    rng = random.Random(seed)
    emb = samples.embedding(rng, spec, k, k + extra)
    x = samples.seminorm(rng, spec, k)
    u = project_pi(emb, x)
    assert tuple(u) == oracles.project(spec, emb.columns.cols, x.basis.cols, x.coords)
    assert tls_contains(emb.matroid, u)
    if u.is_finite():
        assert oracles.initial_loop_free(emb.matroid.table(), u, emb.n1)


@given(specs, seeds, st.integers(1, 3), st.integers(0, 3))
def test_section_round_trips(spec, seed, k, extra):
    rng = random.Random(seed)
    emb = samples.embedding(rng, spec, k, k + extra)
    x = samples.seminorm(rng, spec, k)
    u = project_pi(emb, x)
    y = section_J(emb, u)
    assert project_pi(emb, y) == u
    B = section_basis(emb, u)
    assert local_tls_contains(emb, B, u)
    if u.is_finite():
        assert B in initial_matroid(emb.matroid, u).bases
    # a seminorm diagonalized by a basis of the embedding comes back up to homothety
    xb = emb.basis_seminorm(B, samples.trop_coords(rng, k, 0.2))
    assert class_equal(section_J(emb, project_pi(emb, xb)), xb)


@given(specs, seeds, st.integers(1, 3), st.integers(1, 3))
def test_valuative_cramer(spec, seed, k, extra):
    rng = random.Random(seed)
    emb = samples.embedding(rng, spec, k, k + extra)
    v = emb.matroid
    for B in v.bases():
        solver = Solver(spec, [emb.columns.cols[b] for b in B])
        for e in range(emb.n1):
            if e in B:
                continue
            lam = solver.solve_valuations(emb.columns.cols[e])
            for b, lv in zip(B, lam):
                other = v.value(tuple(sorted(set(B) - {b} | {e})))
                assert lv == (INF if other == INF else other - v.value(B))


@given(seeds, st.integers(2, 5), st.data())
def test_members_have_finite_coordinate_on_every_basis(seed, n1, data):
    k = data.draw(st.integers(1, n1 - 1))
    rng = random.Random(seed)
    emb = samples.embedding(rng, Q2, k, n1, zero_rate=0.3)
    v = emb.matroid
    for vals in [(0, 1, INF)] * 3:
        u = normalize([rng.choice(vals) if i else 0 for i in range(n1)])
        if tls_contains(v, u):
            for B in v.bases():
                assert any(u[b] != INF for b in B)


@given(seeds, st.integers(2, 6), st.data())
def test_bergman_matches_circuits_on_grid(seed, n1, data):
    k = data.draw(st.integers(1, min(3, n1)))
    rng = random.Random(seed)
    cols = samples.zero_one_columns(rng, k, n1)
    M = underlying_matroid(from_matrix(Mat(Q, cols, k)))
    v = M.to_valuated()
    for u in samples.grid_points(n1, (0, 1, INF)):
        assert bool(bergman_contains(M, u)) == bool(tls_contains(v, u))


@given(specs, seeds, st.integers(3, 7))
def test_small_circuits_match_universal_restriction(spec, seed, size):
    rng = random.Random(seed)
    S = samples.closed_sample(rng, spec, size)
    assert is_split_closed(spec, S)
    v = universal_restriction(spec, S)
    emb = Embedding.from_columns(spec, S)
    for i in range(4):
        u = project_pi(emb, samples.seminorm(rng, spec, emb.dim)) if i % 2 else samples.trop_coords(rng, len(S), 0.2)
        assert bool(check_small_circuits(spec, S, u)) == bool(tls_contains(v, u))


@given(seeds)
def test_small_circuits_are_necessary_everywhere(seed):
    rng = random.Random(seed)
    S = samples.full_rank_columns(rng, Q2, 3, rng.randint(3, 6))
    emb = Embedding.from_columns(Q2, S)
    u = project_pi(emb, samples.seminorm(rng, Q2, 3))
    assert tls_contains(emb.matroid, u)
    assert check_small_circuits(Q2, S, u)


def test_split_closed_detects_generic_quadruple():
    S = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)]
    assert not is_split_closed(Q, S)
    assert is_split_closed(Q, S + [(1, 1, 0)])


@given(specs, seeds, st.integers(1, 3))
def test_reconstruction_recovers_evaluations(spec, seed, k):
    rng = random.Random(seed)
    hidden = samples.seminorm(rng, spec, k)
    queries = [samples.vector(rng, spec, k) for _ in range(4)]
    rec = reconstruct_seminorm(ProjectionOracle(hidden), spec, k, queries)
    g = tuple(spec.one() if i == rec.reference else spec.zero() for i in range(k))
    base = evaluate(hidden, g)
    for q, got in zip(queries, rec.values):
        want = evaluate(hidden, q)
        assert got == (INF if want == INF else want - base)


def test_embedding_validation():
    with pytest.raises(ValueError):
        emb_of(Q, [(1, 0), (0, 0)])
    with pytest.raises(ValueError):
        emb_of(Q, [(1, 1), (2, 2)])
