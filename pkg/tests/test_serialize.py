import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropbuild import samples
from tropbuild import serialize as S
from tropbuild._poly import RatFunc
from tropbuild.building import class_equal
from tropbuild.lattice import LatticeClass
from tropbuild.tropcore import INF
from tropbuild.valfield import FieldSpec
from tropbuild.valmatroid import ValuatedMatroid, from_matrix

seeds = st.integers(0, 10**6)
specs = st.sampled_from(samples.BACKENDS)


def through_json(x):
    return json.loads(json.dumps(x))


@pytest.mark.parametrize("text,value", [("3", 3), ("-3/6", Fraction(-1, 2)), (" 4 / 8 ", Fraction(1, 2)), (7, 7)])
def test_parse_rational_accepts(text, value):
    assert S.parse_rational(text) == value


@pytest.mark.parametrize("bad", ["1/0", "0.5", 0.5, True, "x", None, "1/-2", ""])
def test_parse_rational_rejects(bad):
    with pytest.raises(S.SchemaError):
        S.parse_rational(bad)


def test_trop_values():
    assert S.parse_trop("inf") == INF
    assert S.parse_trop("INF") == INF
    assert tuple(S.parse_point(["2", "inf", "3/2"])) == (0, INF, Fraction(-1, 2))
    with pytest.raises(S.SchemaError):
        S.parse_point(["inf", "inf"])
    with pytest.raises(S.SchemaError):
        S.parse_point([])


@pytest.mark.parametrize("doc,spec", [
    ({"kind": "p-adic", "p": 3}, FieldSpec.padic(3)),
    ("trivial", FieldSpec.trivial()),
    ({"kind": "t-adic"}, FieldSpec.tadic()),
    ({"kind": "rationals-p-adic", "p": 2}, FieldSpec.padic(2)),
])
def test_parse_field(doc, spec):
    assert S.parse_field(doc) == spec
    assert S.parse_field(S.field_to_json(spec)) == spec


@pytest.mark.parametrize("bad", [{"kind": "p-adic"}, {"kind": "p-adic", "p": 4}, {"kind": "reals"}, 3])
def test_parse_field_rejects(bad):
    with pytest.raises(S.SchemaError):
        S.parse_field(bad)


def test_rational_function_forms():
    T = FieldSpec.tadic()
    t = RatFunc.t_power(1)
    assert S.parse_scalar(T, ["0", "1"]) == t
    assert S.parse_scalar(T, "2") == RatFunc.const(2)
    x = S.parse_scalar(T, {"num": ["1"], "den": ["0", "2"]})
    assert x == 1 / (2 * t)
    assert S.parse_scalar(T, S.scalar_to_json(T, x)) == x
    with pytest.raises(S.SchemaError):
        S.parse_scalar(T, {"num": ["1"], "den": ["0"]})


@settings(max_examples=60)
@given(seeds, specs)
def test_scalar_round_trip(seed, spec):
    x = samples.scalar(random.Random(seed), spec)
    assert S.parse_scalar(spec, through_json(S.scalar_to_json(spec, x))) == x


@settings(max_examples=30)
@given(seeds, specs, st.integers(1, 3), st.integers(0, 2))
def test_matroid_round_trip(seed, spec, rows, extra):
    f = samples.matrix(random.Random(seed), spec, rows, rows + extra)
    v = from_matrix(f)
    assert S.parse_matroid(through_json(S.matroid_to_json(v))) == v
    assert S.parse_mat(spec, through_json(S.mat_to_json(f)["columns"])) == f


def test_matroid_table_rejects_duplicates_and_shape():
    good = {"n": 2, "r": 1, "table": [{"set": [0, 1], "val": "0"}]}
    assert S.parse_matroid(good).value((0, 1)) == 0
    assert S.parse_matroid(good).value((0, 2)) == INF
    dup = {"n": 2, "r": 1, "table": [{"set": [0, 1], "val": "0"}, {"set": [1, 0], "val": "1"}]}
    with pytest.raises(S.SchemaError):
        S.parse_matroid(dup)
    with pytest.raises(S.SchemaError):
        S.parse_matroid({"n": 2, "table": []})


def test_bases_matroid_forms():
    M = S.parse_bases_matroid({"n": 2, "bases": [[0, 1], [0, 2], [1, 2]]})
    assert S.parse_bases_matroid(S.bases_matroid_to_json(M)) == M
    v = ValuatedMatroid(3, 2, (0, 0, 0))
    assert S.parse_bases_matroid(S.matroid_to_json(v)) == M
    with pytest.raises(S.SchemaError):
        S.parse_bases_matroid({"n": 2, "r": 0, "bases": [[0, 1]]})


@settings(max_examples=30)
@given(seeds, specs, st.integers(1, 3))
def test_seminorm_round_trip(seed, spec, dim):
    x = samples.seminorm(random.Random(seed), spec, dim)
    y = S.parse_seminorm(spec, through_json(S.seminorm_to_json(x)))
    assert y == x and class_equal(x, y)


@settings(max_examples=30)
@given(seeds, st.integers(1, 4))
def test_flag_round_trip(seed, dim):
    F = samples.flag(random.Random(seed), dim)
    assert S.parse_flag(F.field, through_json(S.flag_to_json(F))) == F


@settings(max_examples=30)
@given(seeds, st.sampled_from(samples.BACKENDS[:3]), st.integers(1, 3))
def test_lattice_round_trip(seed, spec, dim):
    L = LatticeClass(samples.matrix(random.Random(seed), spec, dim, dim))
    assert S.parse_lattice(spec, through_json(S.lattice_to_json(L))) == L


def test_singular_inputs_are_schema_errors():
    Q2 = FieldSpec.padic(2)
    with pytest.raises(S.SchemaError):
        S.parse_seminorm(Q2, {"basis": [["1", "0"], ["2", "0"]], "coords": ["0", "0"]})
    with pytest.raises(S.SchemaError):
        S.parse_lattice(Q2, {"basis": [["1", "1"], ["1", "1"]]})
    with pytest.raises(S.SchemaError):
        S.parse_embedding(Q2, [["1", "0"], ["0", "0"]])
    with pytest.raises(S.SchemaError):
        S.parse_columns(Q2, [["1", "0"], ["1"]])
