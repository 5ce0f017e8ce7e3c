"""JSON encoding of the library's objects.

Rationals are strings ``"a/b"`` (or ``"a"`` when integral) and tropical
values add ``"inf"``.  Elements of Q(t) are coefficient arrays, lowest
degree first, or ``{"num": [...], "den": [...]}`` for proper fractions.
Matrices are column-major lists.  Every top-level document carries
``"schema": "tropbuild/1"``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import combinations

from ._poly import RatFunc
from .building import DiagSeminorm, Flag
from .lattice import LatticeClass
from .tropcore import INF, TropPoint, fmt_trop, normalize
from .valfield import KINDS, P_ADIC, T_ADIC, TRIVIAL, FieldSpec, Mat
from .valmatroid import Matroid, ValuatedMatroid

SCHEMA = "tropbuild/1"

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")
_ALIASES = {"p-adic": P_ADIC, "padic": P_ADIC, "t-adic": T_ADIC, "tadic": T_ADIC, "trivial": TRIVIAL}


class SchemaError(ValueError):
    """The input document does not match the expected shape."""


def _where(path: str, msg: str) -> SchemaError:
    return SchemaError(f"{path}: {msg}" if path else msg)


# -- scalars ----------------------------------------------------------------


def parse_rational(x, path: str = "") -> Fraction:
    if isinstance(x, bool):
        raise _where(path, "booleans are not numbers")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        m = _RATIONAL.match(x)
        if m:
            den = int(m.group(2)) if m.group(2) is not None else 1
            if den == 0:
                raise _where(path, f"zero denominator in {x!r}")
            return Fraction(int(m.group(1)), den)
    raise _where(path, f"expected an exact rational like \"a/b\", got {x!r}")


def fmt_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_trop(x, path: str = ""):
    if isinstance(x, str) and x.strip().lower() == "inf":
        return INF
    q = parse_rational(x, path)
    return int(q) if q.denominator == 1 else q


def parse_point(x, path: str = "") -> TropPoint:
    if not isinstance(x, list) or not x:
        raise _where(path, "a tropical point is a nonempty array")
    vals = [parse_trop(c, f"{path}[{i}]") for i, c in enumerate(x)]
    try:
        return normalize(vals)
    except ValueError as e:
        raise _where(path, str(e)) from None


def point_to_json(u) -> list:
    return [fmt_trop(c) for c in u]


def parse_field(x, path: str = "field") -> FieldSpec:
    if isinstance(x, str):
        x = {"kind": x}
    if not isinstance(x, dict) or "kind" not in x:
        raise _where(path, "expected {\"kind\": ..., \"p\": ...}")
    kind = _ALIASES.get(x["kind"], x["kind"])
    if kind not in KINDS:
        raise _where(path, f"unknown kind {x['kind']!r}; use one of {list(KINDS)}")
    try:
        if kind == P_ADIC:
            p = x.get("p")
            if isinstance(p, bool) or not isinstance(p, int):
                raise _where(path, "p-adic fields need an integer prime \"p\"")
            return FieldSpec.padic(p)
        return FieldSpec(kind)
    except ValueError as e:
        if isinstance(e, SchemaError):
            raise
        raise _where(path, str(e)) from None


def field_to_json(spec: FieldSpec) -> dict:
    return {"kind": spec.kind, "p": spec.p} if spec.kind == P_ADIC else {"kind": spec.kind}


def _coeffs(x, path):
    if not isinstance(x, list) or not x:
        raise _where(path, "coefficient arrays must be nonempty")
    return [parse_rational(c, f"{path}[{i}]") for i, c in enumerate(x)]


def parse_scalar(spec: FieldSpec, x, path: str = ""):
    if not spec.is_polynomial:
        return parse_rational(x, path)
    if isinstance(x, list):
        return RatFunc.from_coeffs(_coeffs(x, path))
    if isinstance(x, dict):
        if set(x) != {"num", "den"}:
            raise _where(path, "rational functions are {\"num\": [...], \"den\": [...]}")
        num = _coeffs(x["num"], path + ".num")
        den = _coeffs(x["den"], path + ".den")
        if not any(den):
            raise _where(path, "zero denominator")
        return RatFunc.from_coeffs(num, den)
    return RatFunc.const(parse_rational(x, path))


def scalar_to_json(spec: FieldSpec, x):
    if not spec.is_polynomial:
        return fmt_rational(x)
    if not x:
        return ["0"]
    num = [fmt_rational(c) for c in x.num_coeffs()]
    den = [fmt_rational(c) for c in x.den_coeffs()]
    return num if den == ["1"] else {"num": num, "den": den}


# -- matrices and vectors ---------------------------------------------------


def parse_vector(spec: FieldSpec, x, path: str = "") -> tuple:
    if not isinstance(x, list) or not x:
        raise _where(path, "vectors are nonempty arrays")
    return tuple(parse_scalar(spec, c, f"{path}[{i}]") for i, c in enumerate(x))


def vector_to_json(spec: FieldSpec, v) -> list:
    return [scalar_to_json(spec, c) for c in v]


def parse_columns(spec: FieldSpec, x, path: str = "columns") -> tuple:
    if not isinstance(x, list) or not x:
        raise _where(path, "expected a nonempty column-major array")
    cols = tuple(parse_vector(spec, c, f"{path}[{j}]") for j, c in enumerate(x))
    if len({len(c) for c in cols}) != 1:
        raise _where(path, "columns have different lengths")
    return cols


def parse_mat(spec: FieldSpec, x, path: str = "columns") -> Mat:
    return Mat(spec, parse_columns(spec, x, path))


def mat_to_json(M: Mat) -> dict:
    return {"field": field_to_json(M.field), "rows": M.nrows,
            "columns": [vector_to_json(M.field, c) for c in M.cols]}


# -- matroids ---------------------------------------------------------------


def matroid_to_json(v: ValuatedMatroid) -> dict:
    table = [{"set": list(A), "val": fmt_trop(x)} for A, x in zip(v.subsets(), v.values)]
    return {"n": v.n, "r": v.r, "table": table}


def parse_matroid(x, path: str = "matroid") -> ValuatedMatroid:
    if not isinstance(x, dict) or not {"n", "r", "table"} <= set(x):
        raise _where(path, "valuated matroids are {\"n\", \"r\", \"table\"}")
    n, r = x["n"], x["r"]
    if not all(isinstance(a, int) and not isinstance(a, bool) for a in (n, r)) or n < 0 or r < 0:
        raise _where(path, "n and r must be nonnegative integers")
    entries = {}
    table = x["table"]
    if not isinstance(table, list):
        raise _where(path + ".table", "expected an array")
    for i, row in enumerate(table):
        if not isinstance(row, dict) or set(row) != {"set", "val"}:
            raise _where(f"{path}.table[{i}]", "rows are {\"set\": [...], \"val\": ...}")
        s = row["set"]
        if not isinstance(s, list) or not all(isinstance(e, int) and not isinstance(e, bool) for e in s):
            raise _where(f"{path}.table[{i}].set", "expected an array of integers")
        key = tuple(sorted(s))
        if key in entries:
            raise _where(f"{path}.table[{i}]", f"duplicate set {list(key)}")
        entries[key] = parse_trop(row["val"], f"{path}.table[{i}].val")
    try:
        return ValuatedMatroid.from_table(n + 1, r + 1, entries)
    except ValueError as e:
        raise _where(path, str(e)) from None


def parse_values(x, n1: int, rank: int, path: str = "values") -> ValuatedMatroid:
    """Flat array of values in lexicographic subset order."""
    if not isinstance(x, list):
        raise _where(path, "expected an array")
    vals = [parse_trop(c, f"{path}[{i}]") for i, c in enumerate(x)]
    try:
        return ValuatedMatroid(n1, rank, tuple(vals))
    except ValueError as e:
        raise _where(path, str(e)) from None


def bases_matroid_to_json(M: Matroid) -> dict:
    return {"n": M.n1 - 1, "r": M.rank - 1, "bases": [list(b) for b in M.bases]}


def parse_bases_matroid(x, path: str = "matroid") -> Matroid:
    if isinstance(x, dict) and "table" in x:
        v = parse_matroid(x, path)
        return Matroid(v.n1, v.bases())
    if not isinstance(x, dict) or not {"n", "bases"} <= set(x):
        raise _where(path, "matroids are {\"n\", \"bases\"} or {\"n\", \"r\", \"table\"}")
    n = x["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise _where(path + ".n", "expected a nonnegative integer")
    bases = x["bases"]
    if not isinstance(bases, list) or not all(
        isinstance(b, list) and all(isinstance(e, int) and not isinstance(e, bool) and 0 <= e <= n for e in b)
        for b in bases
    ):
        raise _where(path + ".bases", f"expected arrays of elements in 0..{n}")
    try:
        M = Matroid(n + 1, bases)
    except ValueError as e:
        raise _where(path, str(e)) from None
    if "r" in x and x["r"] != M.rank - 1:
        raise _where(path + ".r", f"bases have size {M.rank}, so r must be {M.rank - 1}")
    return M


def all_subsets_table(n1: int, k: int) -> list:
    return [list(A) for A in combinations(range(n1), k)]


# -- seminorms, flags, lattices ---------------------------------------------


def seminorm_to_json(x: DiagSeminorm) -> dict:
    return {"basis": [vector_to_json(x.field, c) for c in x.basis.cols], "coords": point_to_json(x.coords)}


def parse_seminorm(spec: FieldSpec, x, path: str = "seminorm") -> DiagSeminorm:
    if not isinstance(x, dict) or not {"basis", "coords"} <= set(x):
        raise _where(path, "seminorms are {\"basis\": columns, \"coords\": point}")
    basis = parse_mat(spec, x["basis"], path + ".basis")
    coords = parse_point(x["coords"], path + ".coords")
    try:
        return DiagSeminorm(basis, coords)
    except (ValueError, ArithmeticError) as e:
        raise _where(path, str(e)) from None


def flag_to_json(F: Flag) -> dict:
    return {"dim": F.dim,
            "subspaces": [[vector_to_json(F.field, g) for g in sub] for sub in F.subspaces],
            "jumps": [fmt_trop(c) for c in F.jumps]}


def parse_flag(spec: FieldSpec, x, path: str = "flag") -> Flag:
    if not isinstance(x, dict) or not {"subspaces", "jumps"} <= set(x):
        raise _where(path, "flags are {\"subspaces\": [...], \"jumps\": [...]}")
    subs = x["subspaces"]
    if not isinstance(subs, list) or not subs:
        raise _where(path + ".subspaces", "expected a nonempty array of generator lists")
    gens = [parse_columns(spec, s, f"{path}.subspaces[{i}]") for i, s in enumerate(subs)]
    dim = x.get("dim", len(gens[0][0]))
    if not isinstance(x["jumps"], list):
        raise _where(path + ".jumps", "expected an array")
    jumps = [parse_trop(c, f"{path}.jumps[{i}]") for i, c in enumerate(x["jumps"])]
    try:
        return Flag(spec, dim, tuple(gens), tuple(jumps))
    except ValueError as e:
        raise _where(path, str(e)) from None


def lattice_to_json(L: LatticeClass) -> dict:
    return {"field": field_to_json(L.field), "basis": [vector_to_json(L.field, c) for c in L.basis.cols]}


def parse_lattice(spec: FieldSpec, x, path: str = "lattice") -> LatticeClass:
    cols = x.get("basis") if isinstance(x, dict) else x
    M = parse_mat(spec, cols, path + ".basis")
    try:
        return LatticeClass(M)
    except (ValueError, ArithmeticError) as e:
        raise _where(path, str(e)) from None


def embedding_to_json(emb) -> dict:
    return {"field": field_to_json(emb.field), "columns": [vector_to_json(emb.field, c) for c in emb.columns.cols]}


def parse_embedding(spec: FieldSpec, x, path: str = "embedding"):
    from .troplin import Embedding

    cols = x.get("columns") if isinstance(x, dict) else x
    M = parse_mat(spec, cols, path + ".columns")
    try:
        return Embedding(M)
    except (ValueError, ArithmeticError) as e:
        raise _where(path, str(e)) from None
