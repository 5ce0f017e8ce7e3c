"""Command-line interface: one JSON document in, one JSON report out.

Every input document carries ``"schema": "tropbuild/1"``.  Reports echo the
canonicalized input and have ``status`` ``ok``, ``violation`` (with a
witness) or ``error``; the exit code is 0, 1 or 2 respectively.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import building, lattice, samples, troplin, valmatroid
from . import serialize as S
from .serialize import SchemaError
from .tropcore import INF, fmt_trop
from .valfield import FieldSpec, Mat

EXIT = {"ok": 0, "violation": 1, "error": 2}


@dataclass
class Context:
    seed: int = 0
    max_n: int = 16
    max_rank: int = 8

    def guard(self, n1: int, rank: int) -> None:
        if n1 > self.max_n:
            raise SchemaError(f"ground set of size {n1} exceeds --max-n {self.max_n}")
        if rank > self.max_rank:
            raise SchemaError(f"rank {rank} exceeds --max-rank {self.max_rank}")


@dataclass
class Outcome:
    echo: dict
    result: dict
    witness: object = None

    @property
    def status(self) -> str:
        return "ok" if self.witness is None else "violation"


_COMMANDS: dict[str, Callable[[dict, Context], Outcome]] = {}


def command(name: str):
    def register(fn):
        _COMMANDS[name] = fn
        return fn
    return register


# -- document helpers -------------------------------------------------------


def _need(doc: dict, *keys: str):
    missing = [k for k in keys if k not in doc]
    if missing:
        raise SchemaError(f"missing key(s): {', '.join(missing)}")
    return [doc[k] for k in keys]


def _field(doc: dict, default: FieldSpec | None = None) -> FieldSpec:
    if "field" not in doc:
        if default is None:
            raise SchemaError("missing key(s): field")
        return default
    return S.parse_field(doc["field"])


def _embedding(doc: dict, spec: FieldSpec, ctx: Context):
    (cols,) = _need(doc, "columns")
    emb = S.parse_embedding(spec, cols, "columns")
    ctx.guard(emb.n1, emb.dim)
    return emb


def _matroid(doc: dict, ctx: Context) -> valmatroid.ValuatedMatroid:
    (m,) = _need(doc, "matroid")
    if isinstance(m, dict) and isinstance(m.get("n"), int):
        ctx.guard(m["n"] + 1, m.get("r", 0) + 1 if isinstance(m.get("r"), int) else 0)
    return S.parse_matroid(m)


def _bases_matroid(doc: dict, ctx: Context) -> valmatroid.Matroid:
    (m,) = _need(doc, "matroid")
    if isinstance(m, dict) and isinstance(m.get("n"), int):
        ctx.guard(m["n"] + 1, 0)
    M = S.parse_bases_matroid(m)
    ctx.guard(M.n1, M.rank)
    return M


def _point(doc: dict, n1: int, key: str = "point"):
    (p,) = _need(doc, key)
    u = S.parse_point(p, key)
    if len(u) != n1:
        raise SchemaError(f"{key}: expected {n1} coordinates, got {len(u)}")
    return u


def _raw_point(doc: dict, n1: int, key: str = "point") -> list:
    """Coordinates without projective normalization."""
    (p,) = _need(doc, key)
    if not isinstance(p, list) or len(p) != n1:
        raise SchemaError(f"{key}: expected an array of {n1} values")
    return [S.parse_trop(c, f"{key}[{i}]") for i, c in enumerate(p)]


def _index_list(x, n1: int, path: str) -> list[int]:
    if not isinstance(x, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in x):
        raise SchemaError(f"{path}: expected an array of integers")
    if any(not 0 <= i < n1 for i in x) or len(set(x)) != len(x):
        raise SchemaError(f"{path}: indices must be distinct and in 0..{n1 - 1}")
    return sorted(x)


def _seminorm(doc, spec, ctx, key="seminorm"):
    (x,) = _need(doc, key)
    sn = S.parse_seminorm(spec, x, key)
    ctx.guard(sn.dim, sn.dim)
    return sn


def _lattice(doc, spec, ctx, key="lattice"):
    (x,) = _need(doc, key)
    L = S.parse_lattice(spec, x, key)
    ctx.guard(L.dim, L.dim)
    return L


def _flag(doc, spec, ctx):
    (x,) = _need(doc, "flag")
    F = S.parse_flag(spec, x)
    ctx.guard(F.dim, F.dim)
    return F


def _ext(x) -> str:
    return "-inf" if x == -INF else fmt_trop(x)


def _emb_echo(emb) -> dict:
    return S.embedding_to_json(emb)


# -- valuated matroids ------------------------------------------------------


@command("matroid-from-matrix")
def _cmd_from_matrix(doc, ctx):
    spec = _field(doc)
    emb = _embedding(doc, spec, ctx)
    v = emb.matroid
    return Outcome(_emb_echo(emb), {"matroid": S.matroid_to_json(v)})


@command("check-plucker")
def _cmd_check_plucker(doc, ctx):
    v = _matroid(doc, ctx)
    verdict = valmatroid.check_plucker(v)
    return Outcome({"matroid": S.matroid_to_json(v)}, {"plucker": verdict.ok},
                   None if verdict else verdict.witness)


@command("underlying-matroid")
def _cmd_underlying(doc, ctx):
    v = _matroid(doc, ctx)
    M = valmatroid.underlying_matroid(v)
    return Outcome({"matroid": S.matroid_to_json(v)},
                   {"matroid": S.bases_matroid_to_json(M), "loops": M.loops()})


@command("initial-matroid")
def _cmd_initial(doc, ctx):
    v = _matroid(doc, ctx)
    u = _raw_point(doc, v.n1)
    M = valmatroid.initial_matroid(v, u)
    return Outcome({"matroid": S.matroid_to_json(v), "point": [fmt_trop(c) for c in u]},
                   {"matroid": S.bases_matroid_to_json(M)})


@command("flats")
def _cmd_flats(doc, ctx):
    M = _bases_matroid(doc, ctx)
    lat = valmatroid.flats(M)
    return Outcome({"matroid": S.bases_matroid_to_json(M)},
                   {"flats": [sorted(F) for F in lat.flats], "ranks": list(lat.ranks),
                    "covers": [list(c) for c in lat.covers]})


# -- tropical linear spaces -------------------------------------------------


@command("tls-contains")
def _cmd_tls(doc, ctx):
    v = _matroid(doc, ctx)
    u = _point(doc, v.n1)
    verdict = troplin.tls_contains(v, u)
    return Outcome({"matroid": S.matroid_to_json(v), "point": S.point_to_json(u)},
                   {"contains": verdict.ok}, None if verdict else verdict.witness)


@command("local-contains")
def _cmd_local(doc, ctx):
    spec = _field(doc)
    emb = _embedding(doc, spec, ctx)
    (B,) = _need(doc, "basis")
    B = _index_list(B, emb.n1, "basis")
    u = _point(doc, emb.n1)
    if len(B) != emb.dim or emb.matroid.value(B) == INF:
        raise SchemaError(f"basis: {B} is not a basis of the column matroid")
    ok = troplin.local_tls_contains(emb, B, u)
    echo = {**_emb_echo(emb), "basis": B, "point": S.point_to_json(u)}
    return Outcome(echo, {"contains": ok}, None if ok else {"basis": B, "point": S.point_to_json(u)})


@command("project")
def _cmd_project(doc, ctx):
    spec = _field(doc)
    emb = _embedding(doc, spec, ctx)
    x = _seminorm(doc, spec, ctx)
    if x.dim != emb.dim:
        raise SchemaError("seminorm and embedding have different dimensions")
    u = troplin.project_pi(emb, x)
    return Outcome({**_emb_echo(emb), "seminorm": S.seminorm_to_json(x)}, {"point": S.point_to_json(u)})


@command("section")
def _cmd_section(doc, ctx):
    spec = _field(doc)
    emb = _embedding(doc, spec, ctx)
    u = _point(doc, emb.n1)
    echo = {**_emb_echo(emb), "point": S.point_to_json(u)}
    try:
        x = troplin.section_J(emb, u)
    except troplin.NotInLinearSpace as e:
        return Outcome(echo, {"member": False}, {"circuit": list(e.circuit)})
    B = troplin.section_basis(emb, u)
    return Outcome(echo, {"member": True, "basis": list(B), "seminorm": S.seminorm_to_json(x)})


@command("class-equal")
def _cmd_class_equal(doc, ctx):
    spec = _field(doc)
    (pair,) = _need(doc, "seminorms")
    if not isinstance(pair, list) or len(pair) != 2:
        raise SchemaError("seminorms: expected exactly two seminorms")
    x, y = (S.parse_seminorm(spec, p, f"seminorms[{i}]") for i, p in enumerate(pair))
    for sn in (x, y):
        ctx.guard(sn.dim, sn.dim)
    if x.dim != y.dim:
        raise SchemaError("seminorms live on spaces of different dimension")
    return Outcome({"field": S.field_to_json(spec), "seminorms": [S.seminorm_to_json(x), S.seminorm_to_json(y)]},
                   {"equal": building.class_equal(x, y)})


@command("bergman-contains")
def _cmd_bergman(doc, ctx):
    M = _bases_matroid(doc, ctx)
    u = _point(doc, M.n1)
    w = troplin.bergman_contains(M, u)
    echo = {"matroid": S.bases_matroid_to_json(M), "point": S.point_to_json(u)}
    result = {"contains": w.ok}
    if w.ok:
        result.update(chain=[sorted(F) for F in w.chain], coefficients=[fmt_trop(c) for c in w.coefficients],
                      offset=fmt_trop(w.offset))
        return Outcome(echo, result)
    return Outcome(echo, result, w.failure)


@command("small-circuits")
def _cmd_small_circuits(doc, ctx):
    spec = _field(doc)
    (vecs,) = _need(doc, "vectors")
    cols = S.parse_columns(spec, vecs, "vectors")
    ctx.guard(len(cols), len(cols[0]))
    if any(not any(c) for c in cols):
        raise SchemaError("vectors: zero covectors carry no condition")
    u = _raw_point(doc, len(cols))
    rep = troplin.check_small_circuits(spec, cols, u)
    echo = {"field": S.field_to_json(spec), "vectors": [S.vector_to_json(spec, c) for c in cols],
            "point": [fmt_trop(c) for c in u]}
    result = {
        "pairs": [[i, j, fmt_trop(lv)] for i, j, lv in rep.pairs],
        "triples": [[i, j, k, fmt_trop(a), fmt_trop(b)] for i, j, k, a, b in rep.triples],
        "split_closed": troplin.is_split_closed(spec, cols),
    }
    return Outcome(echo, result, None if rep else rep.failure)


@command("reconstruct")
def _cmd_reconstruct(doc, ctx):
    spec = _field(doc)
    dim, table, queries = _need(doc, "dim", "oracle", "queries")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise SchemaError("dim: expected a positive integer")
    ctx.guard(dim, dim)
    checks = doc.get("checks", 2)
    if not isinstance(checks, int) or isinstance(checks, bool) or checks < 1:
        raise SchemaError("checks: expected a positive integer")
    if not isinstance(table, list):
        raise SchemaError("oracle: expected an array of {columns, point} entries")
    oracle = troplin.TableOracle()
    echo_table = []
    for i, entry in enumerate(table):
        if not isinstance(entry, dict):
            raise SchemaError(f"oracle[{i}]: expected an object")
        emb = S.parse_embedding(spec, entry.get("columns"), f"oracle[{i}].columns")
        pt = S.parse_point(entry.get("point"), f"oracle[{i}].point")
        if len(pt) != emb.n1:
            raise SchemaError(f"oracle[{i}].point: expected {emb.n1} coordinates")
        oracle.add(emb, pt)
        echo_table.append({"columns": [S.vector_to_json(spec, c) for c in emb.columns.cols],
                           "point": S.point_to_json(pt)})
    if not isinstance(queries, list):
        raise SchemaError("queries: expected an array of covectors")
    qs = [S.parse_vector(spec, q, f"queries[{i}]") for i, q in enumerate(queries)]
    echo = {"field": S.field_to_json(spec), "dim": dim, "checks": checks,
            "oracle": sorted(echo_table, key=lambda e: json.dumps(e, sort_keys=True)),
            "queries": [S.vector_to_json(spec, q) for q in qs]}
    try:
        rec = troplin.reconstruct_seminorm(oracle, spec, dim, qs, checks)
    except troplin.OracleIncomplete as e:
        raise SchemaError(f"oracle-incomplete: no entry for embedding {e.args[0]}") from None
    except troplin.OracleInconsistency as e:
        seen = [e.first, e.second]
        witness = {"query": S.vector_to_json(spec, [spec.coerce(c) for c in e.query]),
                   "columns": [[S.vector_to_json(spec, c) for c in m.cols] for m, _ in seen],
                   "values": [fmt_trop(val) for _, val in seen]}
        return Outcome(echo, {"consistent": False}, witness)
    return Outcome(echo, {"consistent": True, "reference": rec.reference,
                          "values": [fmt_trop(c) for c in rec.values]})


# -- trivially valued fields ------------------------------------------------


@command("flag-to-seminorm")
def _cmd_flag_to_seminorm(doc, ctx):
    spec = _field(doc, FieldSpec.trivial())
    F = _flag(doc, spec, ctx)
    x = building.flag_to_seminorm(F)
    return Outcome({"field": S.field_to_json(spec), "flag": S.flag_to_json(F)}, {"seminorm": S.seminorm_to_json(x)})


@command("seminorm-to-flag")
def _cmd_seminorm_to_flag(doc, ctx):
    spec = _field(doc, FieldSpec.trivial())
    x = _seminorm(doc, spec, ctx)
    F = building.seminorm_to_flag(x)
    return Outcome({"field": S.field_to_json(spec), "seminorm": S.seminorm_to_json(x)}, {"flag": S.flag_to_json(F)})


@command("trivial-project")
def _cmd_trivial_project(doc, ctx):
    spec = _field(doc, FieldSpec.trivial())
    emb = _embedding(doc, spec, ctx)
    F = _flag(doc, spec, ctx)
    if F.dim != emb.dim:
        raise SchemaError("flag and embedding have different dimensions")
    u = building.trivial_project(emb, F)
    return Outcome({**_emb_echo(emb), "flag": S.flag_to_json(F)}, {"point": S.point_to_json(u)})


# -- lattices ---------------------------------------------------------------


@command("gauge")
def _cmd_gauge(doc, ctx):
    spec = _field(doc)
    L = _lattice(doc, spec, ctx)
    return Outcome({"field": S.field_to_json(spec), "lattice": S.lattice_to_json(L)},
                   {"seminorm": S.seminorm_to_json(lattice.gauge(L))})


@command("unit-ball")
def _cmd_unit_ball(doc, ctx):
    spec = _field(doc)
    x = _seminorm(doc, spec, ctx)
    L = lattice.unit_ball(x)
    return Outcome({"field": S.field_to_json(spec), "seminorm": S.seminorm_to_json(x)},
                   {"lattice": S.lattice_to_json(L)})


@command("jump-chain")
def _cmd_jump_chain(doc, ctx):
    spec = _field(doc)
    x = _seminorm(doc, spec, ctx)
    jc = lattice.jump_chain(x)
    return Outcome({"field": S.field_to_json(spec), "seminorm": S.seminorm_to_json(x)},
                   {"lattices": [S.lattice_to_json(L) for L in jc.lattices],
                    "log_jumps": [fmt_trop(c) for c in jc.jumps]})


@command("adjacent")
def _cmd_adjacent(doc, ctx):
    spec = _field(doc)
    (pair,) = _need(doc, "lattices")
    if not isinstance(pair, list) or len(pair) != 2:
        raise SchemaError("lattices: expected exactly two lattices")
    L1, L2 = (S.parse_lattice(spec, x, f"lattices[{i}]") for i, x in enumerate(pair))
    for L in (L1, L2):
        ctx.guard(L.dim, L.dim)
    if L1.dim != L2.dim:
        raise SchemaError("lattices have different ranks")
    rel = lattice.relative_position(L1, L2)
    return Outcome({"field": S.field_to_json(spec), "lattices": [S.lattice_to_json(L1), S.lattice_to_json(L2)]},
                   {"adjacent": bool(rel), "relation": rel.relation, "divisors": list(rel.divisors)})


@command("tree-neighbors")
def _cmd_tree(doc, ctx):
    spec = _field(doc)
    L = _lattice(doc, spec, ctx) if "lattice" in doc else lattice.LatticeClass.standard(spec, 2)
    radius = doc.get("radius", 1)
    if not isinstance(radius, int) or isinstance(radius, bool) or not 0 <= radius <= 6:
        raise SchemaError("radius: expected an integer in 0..6")
    nbrs = lattice.tree_neighbors(L)
    ball = lattice.tree_ball(L, radius)
    result = {
        "neighbors": [S.lattice_to_json(N) for N in nbrs],
        "tree": {"nodes": [S.lattice_to_json(N) for N in ball.nodes],
                 "edges": [list(e) for e in ball.edges], "depth": list(ball.depth)},
    }
    return Outcome({"field": S.field_to_json(spec), "lattice": S.lattice_to_json(L), "radius": radius}, result)


@command("membrane-roundtrip")
def _cmd_membrane(doc, ctx):
    spec = _field(doc)
    emb = _embedding(doc, spec, ctx)
    u = _point(doc, emb.n1)
    echo = {**_emb_echo(emb), "point": S.point_to_json(u)}
    verdict = troplin.tls_contains(emb.matroid, u)
    if not verdict:
        return Outcome(echo, {"member": False}, verdict.witness)
    res = lattice.membrane_roundtrip(emb, u)
    return Outcome(echo, {"member": True, "lattice": S.lattice_to_json(res.lattice),
                          "members": [{"column": i, "exponent": a} for i, a in res.members],
                          "recovered": S.point_to_json(res.recovered)})


@command("tight-span-chart")
def _cmd_chart(doc, ctx):
    v = _matroid(doc, ctx)
    (B,) = _need(doc, "basis")
    B = _index_list(B, v.n1, "basis")
    if len(B) != v.rank or v.value(B) == INF:
        raise SchemaError(f"basis: {B} is not a basis")
    u = _raw_point(doc, len(B))
    if doc.get("shift", False):
        u = list(building.onto_hyperplane(v, B, u))
    res = building.tight_span_chart(v, B, u)
    echo = {"matroid": S.matroid_to_json(v), "basis": B, "point": [fmt_trop(c) for c in u]}
    result = {"chart": [_ext(c) for c in res.values], "violations": list(res.violations)}
    return Outcome(echo, result, None if res.ok else {"elements": list(res.violations)})


# -- selfcheck --------------------------------------------------------------


def _selfcheck(ctx: Context, trials: int = 10) -> tuple[dict, bool]:
    rng = random.Random(ctx.seed)
    max_rows = max(1, min(3, ctx.max_rank))
    max_cols = max(max_rows, min(6, ctx.max_n))
    checks = {}

    def record(name, fn):
        ok = all(fn() for _ in range(trials))
        checks[name] = {"trials": trials, "passed": ok}

    def plucker():
        spec = rng.choice(samples.BACKENDS)
        k = rng.randint(1, max_rows)
        f = samples.matrix(rng, spec, k, rng.randint(k, max_cols))
        return valmatroid.check_plucker(valmatroid.from_matrix(f)).ok

    def projection():
        spec = rng.choice(samples.BACKENDS)
        k = rng.randint(1, max_rows)
        emb = samples.embedding(rng, spec, k, rng.randint(k, max_cols))
        x = samples.seminorm(rng, spec, k)
        u = troplin.project_pi(emb, x)
        return troplin.tls_contains(emb.matroid, u).ok and troplin.project_pi(emb, troplin.section_J(emb, u)) == u

    def duality():
        spec = FieldSpec.padic(rng.choice((2, 3)))
        k = rng.randint(1, max_rows)
        x = samples.seminorm(rng, spec, k, integral=True)
        L = lattice.unit_ball(x)
        return building.class_equal(lattice.gauge(L), x) and lattice.unit_ball(lattice.gauge(L)) == L

    def valency():
        spec = FieldSpec.padic(rng.choice((2, 3, 5)))
        nb = lattice.tree_neighbors(lattice.LatticeClass.standard(spec, 2))
        return len(set(nb)) == spec.p + 1

    record("plucker", plucker)
    record("projection", projection)
    record("lattice-duality", duality)
    record("tree-valency", valency)
    return checks, all(c["passed"] for c in checks.values())


# -- entry point ------------------------------------------------------------


def run(name: str, doc, ctx: Context | None = None) -> tuple[dict, int]:
    """Execute one command on a parsed document; returns ``(report, exit_code)``."""
    ctx = ctx or Context()
    report = {"schema": S.SCHEMA, "command": name}
    try:
        if name == "selfcheck":
            checks, ok = _selfcheck(ctx)
            report.update(input={"seed": ctx.seed, "max_n": ctx.max_n, "max_rank": ctx.max_rank},
                          status="ok" if ok else "violation", result={"checks": checks})
            if not ok:
                report["witness"] = sorted(k for k, c in checks.items() if not c["passed"])
            return report, EXIT[report["status"]]
        if name not in _COMMANDS:
            raise SchemaError(f"unknown command {name!r}")
        if not isinstance(doc, dict):
            raise SchemaError("input must be a JSON object")
        if doc.get("schema") != S.SCHEMA:
            raise SchemaError(f"input must declare \"schema\": \"{S.SCHEMA}\"")
        out = _COMMANDS[name](doc, ctx)
    except Exception as e:  # every failure becomes an error report, never a traceback
        kind = "schema" if isinstance(e, SchemaError) else type(e).__name__
        report.update(status="error", input=doc, error={"kind": kind, "message": str(e)})
        return report, EXIT["error"]
    report.update(status=out.status, input={"schema": S.SCHEMA, **out.echo}, result=out.result)
    if out.witness is not None:
        report["witness"] = out.witness
    return report, EXIT[out.status]


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False, default=_json_default) + "\n"


def _json_default(x):
    if isinstance(x, Fraction):
        return fmt_trop(x)
    if isinstance(x, float) and x == INF:
        return "inf"
    if isinstance(x, (set, frozenset, tuple)):
        return sorted(x) if isinstance(x, (set, frozenset)) else list(x)
    if isinstance(x, Mat):
        return S.mat_to_json(x)
    return str(x)


def commands() -> list[str]:
    return sorted(_COMMANDS) + ["selfcheck"]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tropbuild", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=commands())
    ap.add_argument("--input", default="-", help="JSON input file, or - for stdin")
    ap.add_argument("--format", default="json", choices=["json"])
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized commands")
    ap.add_argument("--max-n", type=int, default=16, help="largest accepted ground set")
    ap.add_argument("--max-rank", type=int, default=8, help="largest accepted rank")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    ctx = Context(seed=args.seed, max_n=args.max_n, max_rank=args.max_rank)
    doc = None
    if args.command != "selfcheck":
        try:
            if args.input == "-":
                text = sys.stdin.read()
            else:
                with open(args.input, encoding="utf-8") as fh:
                    text = fh.read()
            doc = json.loads(text)
        except (OSError, json.JSONDecodeError) as e:
            report = {"schema": S.SCHEMA, "command": args.command, "status": "error",
                      "input": None, "error": {"kind": "schema", "message": str(e)}}
            sys.stdout.write(dumps(report))
            return EXIT["error"]
    report, code = run(args.command, doc, ctx)
    sys.stdout.write(dumps(report))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
