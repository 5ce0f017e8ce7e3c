import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropbuild import samples
from tropbuild._poly import RatFunc
from tropbuild.building import DiagSeminorm, class_equal, evaluate, standard
from tropbuild.lattice import (
    LatticeClass,
    adjacent,
    elementary_divisors,
    gauge,
    is_membrane_basis,
    jump_chain,
    membrane_roundtrip,
    relative_position,
    tree_ball,
    tree_neighbors,
    unit_ball,
)
from tropbuild.tropcore import INF, normalize
from tropbuild.troplin import Embedding, project_pi, tls_contains
from tropbuild.valfield import FieldSpec, Mat

import oracles

Q2, Q3, Q5 = FieldSpec.padic(2), FieldSpec.padic(3), FieldSpec.padic(5)
QT = FieldSpec.tadic()
Q = FieldSpec.trivial()
DISCRETE = (Q2, Q3, QT)
seeds = st.integers(0, 10**6)
discrete = st.sampled_from(DISCRETE)
F = Fraction


def lat(spec, cols):
    return LatticeClass.from_columns(spec, cols)


def random_lattice(rng, spec, dim):
    return LatticeClass(samples.matrix(rng, spec, dim, dim))


def integral_norm(rng, spec, dim):
    return samples.seminorm(rng, spec, dim, integral=True)


# -- canonical form ----------------------------------------------------------


def test_canonical_form_example():
    L = lat(Q2, [(4, 6), (2, 1)])
    assert L.basis.cols == ((1, F(1, 2)), (0, 2))
    assert L.pivot_exponents() == (0, 1)


def test_canonical_form_t_adic():
    t = RatFunc.t_power(1)
    L = lat(QT, [(t, 1 + t), (0, t * t)])
    # unit multiples, plus a shift by the second generator
    M = lat(QT, [((1 + t) * t, (1 + t) * (1 + t)), (0, t * t * (2 + t))])
    assert L == M
    assert L == lat(QT, [(t, 1 + t + t * t), (0, t * t)])
    assert L != lat(QT, [(t, 1), (0, t * t)])


def test_rejects_trivial_field():
    with pytest.raises(ValueError):
        LatticeClass.standard(Q, 2)


@settings(max_examples=40)
@given(seeds, discrete, st.integers(1, 3))
def test_canonical_form_decides_class_equality(seed, spec, dim):
    rng = random.Random(seed)
    A = samples.full_rank_columns(rng, spec, dim, dim)
    if rng.random() < 0.5:
        B = samples.rebased(rng, DiagSeminorm(Mat(spec, A, dim), (0,) * dim)).basis.cols
        B = samples.integral_covector(spec, B[0]) and B
    else:
        B = samples.full_rank_columns(rng, spec, dim, dim)
    same = lat(spec, A) == lat(spec, B)
    assert same == oracles.lattice_class_equal(spec, A, B)


@settings(max_examples=40)
@given(seeds, discrete, st.integers(1, 3), st.integers(-3, 3))
def test_unimodular_change_and_scaling_preserve_class(seed, spec, dim, k):
    rng = random.Random(seed)
    A = samples.full_rank_columns(rng, spec, dim, dim)
    cols = [list(c) for c in A]
    for _ in range(4):
        i, j = rng.randrange(dim), rng.randrange(dim)
        if i != j:
            c = samples.scalar(rng, spec, zero_rate=0)
            if spec.val(c) >= 0:
                cols[j] = [a + c * b for a, b in zip(cols[j], cols[i])]
    pi = spec.uniformizer_power(k)
    B = [tuple(pi * a for a in c) for c in reversed(cols)]
    assert lat(spec, A) == lat(spec, B)


# -- gauge and unit ball ------------------------------------------------------


def test_gauge_examples():
    assert class_equal(gauge(LatticeClass.standard(Q2, 2)), standard(Q2, (0, 0)))
    x = gauge(lat(Q2, [(2, 0), (0, 1)]))
    assert evaluate(x, (1, 0)) - evaluate(x, (0, 1)) == -1
    L = lat(Q2, [(3, 1), (0, 2)])
    scaled = lat(Q2, [(12, 4), (0, 8)])
    assert class_equal(gauge(L), gauge(scaled))


def test_gauge_value_is_containment_valuation():
    # -log q(f) is the largest k with f in pi^k L
    L = lat(Q2, [(2, 0), (0, 1)])
    x = gauge(L)
    assert evaluate(x, (2, 0)) == evaluate(x, (0, 1))
    assert evaluate(x, (4, 0)) == evaluate(x, (0, 1)) + 1


def test_unit_ball_examples():
    assert unit_ball(standard(Q2, (0, 0))) == LatticeClass.standard(Q2, 2)
    # coordinates (1,0): e_0 has -log norm 1, so e_0/2 is on the unit sphere
    assert unit_ball(standard(Q2, (1, 0))) == lat(Q2, [(F(1, 2), 0), (0, 1)])
    assert unit_ball(standard(Q2, (-1, 0))) == lat(Q2, [(2, 0), (0, 1)])
    with pytest.raises(ValueError):
        unit_ball(standard(Q2, (F(1, 2), 0)))
    with pytest.raises(ValueError):
        unit_ball(standard(Q2, (0, INF)))


@settings(max_examples=40)
@given(seeds, discrete, st.integers(1, 3))
def test_gauge_unit_ball_duality(seed, spec, dim):
    rng = random.Random(seed)
    x = integral_norm(rng, spec, dim)
    assert class_equal(gauge(unit_ball(x)), x)
    L = random_lattice(rng, spec, dim)
    assert unit_ball(gauge(L)) == L


@settings(max_examples=30)
@given(seeds, discrete, st.integers(1, 3))
def test_unit_ball_is_the_ball(seed, spec, dim):
    rng = random.Random(seed)
    x = integral_norm(rng, spec, dim)
    L = unit_ball(x)
    # the canonical representative is a rescaled ball, {f : -log ||f|| >= s}
    s = min(evaluate(x, c) for c in L.basis.cols)
    for _ in range(5):
        f = samples.vector(rng, spec, dim)
        lam = oracles.gauss_solve(list(L.basis.cols), list(f))
        inside = all(oracles.val(spec, c) >= 0 for c in lam)
        assert inside == (evaluate(x, f) >= s)


# -- jump chains ----------------------------------------------------------------


def test_jump_chain_vertex():
    ch = jump_chain(standard(Q2, (0, 2)))
    assert len(ch.lattices) == 1 and ch.jumps == ()


def test_jump_chain_edge():
    ch = jump_chain(standard(Q2, (F(1, 2), 0)))
    assert len(ch.lattices) == 2 and len(ch.jumps) == 1
    assert adjacent(*ch.lattices)


def test_jump_chain_generic_rank_three():
    ch = jump_chain(standard(Q3, (0, F(1, 3), F(2, 3))))
    assert len(ch.lattices) == 3
    assert list(ch.jumps) == sorted(ch.jumps)


def test_jump_chain_rejects_seminorm():
    with pytest.raises(ValueError):
        jump_chain(standard(Q2, (0, INF)))


@settings(max_examples=40)
@given(seeds, discrete, st.integers(1, 3))
def test_jump_chain_is_a_simplex(seed, spec, dim):
    rng = random.Random(seed)
    x = samples.seminorm(rng, spec, dim, inf_rate=0)
    ch = jump_chain(x)
    Ls = ch.lattices
    assert len(Ls) <= dim
    assert len(set(Ls)) == len(Ls)
    for a in range(len(Ls)):
        for b in range(a + 1, len(Ls)):
            assert adjacent(Ls[a], Ls[b])
    assert all(0 < c < 1 for c in ch.jumps)
    assert list(ch.jumps) == sorted(ch.jumps)


# -- adjacency ------------------------------------------------------------------


def test_adjacency_examples():
    Z = LatticeClass.standard(Q2, 2)
    assert relative_position(Z, Z).relation == "equal"
    assert not adjacent(Z, Z)
    assert adjacent(Z, lat(Q2, [(2, 0), (0, 1)]))
    assert elementary_divisors(Z, lat(Q2, [(2, 0), (0, 1)])) == (0, 1)
    assert not adjacent(Z, lat(Q2, [(4, 0), (0, 1)]))
    assert relative_position(Z, lat(Q2, [(4, 0), (0, 1)])).divisors == (0, 2)


def test_adjacency_dimension_mismatch():
    with pytest.raises(ValueError):
        adjacent(LatticeClass.standard(Q2, 2), LatticeClass.standard(Q2, 3))


@settings(max_examples=40)
@given(seeds, discrete, st.integers(1, 3))
def test_divisors_match_determinantal_oracle(seed, spec, dim):
    rng = random.Random(seed)
    A = random_lattice(rng, spec, dim)
    B = random_lattice(rng, spec, dim)
    d = elementary_divisors(A, B)
    assert d == oracles.determinantal_divisors(spec, A.basis.cols, B.basis.cols)
    assert adjacent(A, B) == adjacent(B, A)
    assert relative_position(A, B).relation == relative_position(B, A).relation


# -- tree -------------------------------------------------------------------------


@pytest.mark.parametrize("spec", [Q2, Q3, Q5], ids=lambda s: f"p{s.p}")
def test_tree_valency(spec):
    Z = LatticeClass.standard(spec, 2)
    nb = tree_neighbors(Z)
    assert len(nb) == spec.p + 1
    assert len(set(nb)) == spec.p + 1
    assert all(adjacent(Z, N) for N in nb)
    assert all(Z in tree_neighbors(N) for N in nb)


@pytest.mark.parametrize("spec", [Q2, Q3], ids=lambda s: f"p{s.p}")
def test_tree_ball_is_a_tree(spec):
    ball = tree_ball(LatticeClass.standard(spec, 2), 3)
    p = spec.p
    assert ball.is_tree()
    assert ball.counts() == [1, p + 1, (p + 1) * p, (p + 1) * p * p]


@settings(max_examples=20)
@given(seeds)
def test_neighbors_of_random_lattice(seed):
    rng = random.Random(seed)
    L = random_lattice(rng, Q3, 2)
    nb = tree_neighbors(L)
    assert len(set(nb)) == 4 and all(adjacent(L, N) for N in nb)


def test_tree_rejects_other_backends():
    with pytest.raises(ValueError):
        tree_neighbors(LatticeClass.standard(QT, 2))
    with pytest.raises(ValueError):
        tree_neighbors(LatticeClass.standard(Q2, 3))


# -- membranes ----------------------------------------------------------------------


FIX = Embedding.from_columns(Q2, [(1, 0), (0, 1), (1, 1)])


def test_membrane_identity_embedding():
    iota = Embedding.from_columns(Q2, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    res = membrane_roundtrip(iota, (0, 0, 0))
    assert res.lattice == LatticeClass.standard(Q2, 3)


def test_membrane_fixture_examples():
    res = membrane_roundtrip(FIX, (0, 0, 0))
    assert res.lattice == LatticeClass.standard(Q2, 2)
    assert res.recovered == normalize((0, 0, 0))
    res = membrane_roundtrip(FIX, (1, 0, 0))
    assert res.recovered == normalize((1, 0, 0))
    assert is_membrane_basis(FIX, res.lattice, res.members)
    # class of <e_0, 2 e_1>, i.e. <e_0 / 2, e_1>
    assert res.lattice == lat(Q2, [(1, 0), (0, 2)])


def test_membrane_rejects_bad_points():
    with pytest.raises(ValueError):
        membrane_roundtrip(FIX, (F(1, 2), 0, 0))
    with pytest.raises(ValueError):
        membrane_roundtrip(FIX, (1, 0, 1))


@settings(max_examples=25)
@given(seeds, st.sampled_from((Q2, Q3)), st.integers(2, 3), st.integers(0, 2))
def test_membrane_round_trip_random(seed, spec, rows, extra):
    rng = random.Random(seed)
    iota = samples.embedding(rng, spec, rows, rows + extra)
    x = integral_norm(rng, spec, rows)
    u = project_pi(iota, x)
    if any(c == INF or F(c).denominator != 1 for c in u):
        return
    assert tls_contains(iota.matroid, u)
    res = membrane_roundtrip(iota, u)
    assert res.recovered == u
    assert is_membrane_basis(iota, res.lattice, res.members)
