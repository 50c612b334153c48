"""Command-line front end: ``tworep VERB [--input FILE] [--format json|table] ...``.

Exit status is 0 on success, 1 when a validation or law check fails and 2
for usage and parse errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from . import laws
from . import rep_theory as rt
from . import schema as sc
from . import two_group as tgm

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- helpers

def _read_input(path: Optional[str], allow_empty: bool = False) -> Optional[dict]:
    if path is None or path == "-":
        text = sys.stdin.read() if not sys.stdin.isatty() else ""
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    if not text.strip():
        if allow_empty:
            return None
        raise UsageError("no input: pass --input FILE or pipe a problem on stdin")
    return sc.loads(text)


def _resolve_intertwiner(problem: sc.ProblemSpec, name: str) -> rt.Intertwiner:
    if name.startswith("id:"):
        rep = name[3:]
        if rep not in problem.representations:
            raise sc.SchemaError(f"dangling reference {rep!r}", "compose")
        return rt.identity_intertwiner(problem.representations[rep])
    if name not in problem.intertwiners:
        raise sc.SchemaError(f"dangling reference {name!r}")
    return problem.intertwiners[name]


def _rep_name(problem: sc.ProblemSpec, rho: rt.Representation) -> str:
    for name, r in problem.representations.items():
        if r == rho:
            return name
    return "?"


def _group_names(G: tgm.FiniteGroup, elems) -> list[str]:
    return [G.names[g] for g in sorted(elems)]


def _problem(payload: Mapping) -> sc.ProblemSpec:
    problem = sc.parse_problem(payload)
    if problem.twogroup.violations:
        raise tgm.CrossedModuleError(problem.twogroup.violations)
    return problem


def _skeletal(problem: sc.ProblemSpec) -> tgm.SkeletalTwoGroup:
    if problem.twogroup.skeletal is None:
        raise sc.SchemaError("this command needs a skeletal 2-group with H in factor form (try skeletize)",
                             "twogroup")
    return problem.twogroup.skeletal


def _two_int_to_json(m: rt.TwoIntertwiner) -> dict:
    return {"cells": [{"y": m.source.labels(p)[0], "x": m.source.labels(p)[1], "matrix": sc.matrix_to_json(c)}
                      for p, c in sorted(m.cells.items())]}


# ---------------------------------------------------------------- verbs

def cmd_validate(args, payload) -> tuple[list, bool]:
    errors: list = []
    problem = sc.parse_problem(payload, collect_errors=errors)
    results = []
    for v in problem.twogroup.violations:
        results.append({"object": "twogroup", "ok": False, "violation": v.axiom,
                        "witness": [int(w) if isinstance(w, (int, np.integer)) else str(w) for w in v.witness],
                        "exact": True})
    if not problem.twogroup.violations:
        results.append({"object": "twogroup", "ok": True,
                        "skeletal": problem.twogroup.skeletal is not None, "exact": True})
    bad = {where for where, _ in errors}
    for where, msg in errors:
        results.append({"object": where, "ok": False, "violation": msg, "exact": True})
    for name in problem.representations:
        where = f"representations.{name}"
        if where not in bad:
            results.append({"object": where, "ok": True, "exact": True})
    for name in problem.intertwiners:
        results.append({"object": f"intertwiners.{name}", "ok": True, "exact": False})
    ok = not problem.twogroup.violations and not errors
    return results, ok


def _rep_class_rows(tg: tgm.SkeletalTwoGroup, criterion: str) -> list[dict]:
    rows = []
    if criterion == "indecomposable":
        for c in rt.classify_indecomposables(tg):
            rows.append({"orbit_rep": list(tg.dual[c.orbit_rep].exponents),
                         "subgroup": _group_names(tg.G, c.subgroup),
                         "points": len(c.representation.space),
                         "representation": sc.representation_to_json(c.representation), "exact": True})
    else:
        # irreducible and irretractable representations coincide
        for rho in rt.classify_irretractables(tg):
            rows.append({"orbit": [list(tg.dual[c].exponents) for c in rho.chi],
                         "points": len(rho.space),
                         "representation": sc.representation_to_json(rho), "exact": True})
    return rows


def _intertwiner_pairs(problem: sc.ProblemSpec, tg: tgm.SkeletalTwoGroup, spec) -> list[tuple[str, rt.Representation, str, rt.Representation]]:
    if spec:
        src, tgt = spec.get("source"), spec.get("target")
        for name in (src, tgt):
            if name not in problem.representations:
                raise sc.SchemaError(f"dangling reference {name!r}", "classify")
        return [(src, problem.representations[src], tgt, problem.representations[tgt])]
    classes = rt.classify_indecomposables(tg)
    pairs = []
    for i, a in enumerate(classes):
        for j, b in enumerate(classes):
            if set(tg.dual_action[a.orbit_rep]) == set(tg.dual_action[b.orbit_rep]):
                pairs.append((f"indecomposable[{i}]", a.representation, f"indecomposable[{j}]", b.representation))
    return pairs


def cmd_classify(args, payload) -> tuple[list, bool]:
    problem = _problem(payload)
    tg = _skeletal(problem)
    if args.level == "reps":
        return _rep_class_rows(tg, args.criterion), True
    rows = []
    for sname, rho1, tname, rho2 in _intertwiner_pairs(problem, tg, payload.get("classify")):
        try:
            items = rt.classify_transitive_intertwiners(rho1, rho2)
        except rt.ClassificationError as exc:
            raise UsageError(str(exc)) from None
        for item in items:
            it = item.intertwiner
            rows.append({
                "source": sname, "target": tname,
                "orbit": [list(it.labels(p)) for p in item.orbit],
                "basepoint": list(it.labels(item.basepoint)),
                "fiber": list(item.fiber),
                "stabilizer": _group_names(tg.G, item.stabilizer),
                "dim": item.rep.dim,
                "character": [sc.complex_to_json(z, 9) for z in item.rep.character],
                "intertwiner": sc.intertwiner_to_json(it, sname, tname),
                "exact": False,
            })
    return rows, True


def cmd_compose(args, payload) -> tuple[list, bool]:
    problem = _problem(payload)
    chain = payload.get("compose")
    if not isinstance(chain, list) or not chain or not all(isinstance(n, str) for n in chain):
        raise sc.SchemaError("compose must be a nonempty list of intertwiner names, outermost first", "compose")
    its = [_resolve_intertwiner(problem, n) for n in chain]
    result = its[-1]
    for outer, name in zip(reversed(its[:-1]), reversed(chain[:-1])):
        if outer.source != result.target:
            raise UsageError(f"non-composable chain at {name!r}")
        result = rt.compose_intertwiners(outer, result)
    src, tgt = _rep_name(problem, result.source), _rep_name(problem, result.target)
    return [{"chain": chain, "intertwiner": sc.intertwiner_to_json(result, src, tgt),
             "status": _status_json(result), "exact": False}], True


def _status_json(it: rt.Intertwiner) -> dict:
    st = rt.intertwiner_reduction_status(it)
    return {k: bool(getattr(st, k)) for k in ("null", "minimal", "transitive", "indecomposable",
                                               "irretractable", "irreducible")}


def cmd_homdim(args, payload) -> tuple[list, bool]:
    problem = _problem(payload)
    pair = payload.get("hom")
    if not isinstance(pair, list) or len(pair) != 2:
        raise sc.SchemaError("hom must name two parallel intertwiners", "hom")
    phi, psi = (_resolve_intertwiner(problem, n) for n in pair)
    if phi.source != psi.source or phi.target != psi.target:
        raise UsageError("hom needs parallel intertwiners")
    basis = rt.hom_2intertwiners(phi, psi)
    return [{"source": pair[0], "target": pair[1], "dimension": len(basis),
             "basis": [_two_int_to_json(b) for b in basis], "exact": False}], True


def cmd_check_laws(args, payload) -> tuple[list, bool]:
    results = [r.to_json() for r in laws.run_suites(args.seed, args.cases)]
    if payload is not None:
        errors: list = []
        problem = sc.parse_problem(payload, collect_errors=errors)
        check = laws.LawResult("input validity", cases=1 + len(problem.representations) + len(errors)
                               + len(problem.intertwiners))
        for v in problem.twogroup.violations:
            check.fail(str(v))
        for where, msg in errors:
            check.fail(f"{where}: {msg}")
        results.append(check.to_json())
    return results, all(r["ok"] for r in results)


def cmd_skeletize(args, payload) -> tuple[list, bool]:
    problem = _problem(payload)
    cm = problem.twogroup.crossed_module
    sk = tgm.skeletize(cm)
    tg = sk.twogroup
    return [{"twogroup": sc.skeletal_to_json(tg),
             "g_map": {cm.G.names[g]: tg.G.names[q] for g, q in enumerate(sk.g_map)},
             "h_map": {cm.H.names[h]: list(tg.H.elements[q]) for h, q in enumerate(sk.h_map)},
             "identity": cm.is_skeletal and cm.H_abelian is not None,
             "exact": True}], True


VERBS = {
    "validate": cmd_validate,
    "classify": cmd_classify,
    "compose": cmd_compose,
    "hom-dim": cmd_homdim,
    "check-laws": cmd_check_laws,
    "skeletize": cmd_skeletize,
}


# ---------------------------------------------------------------- output

def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (list, dict)):
        s = sc.json.dumps(v, separators=(",", ":"), ensure_ascii=False)
        return s if len(s) <= 40 else s[:37] + "..."
    return "" if v is None else str(v)


def render_table(report: dict) -> str:
    rows = report["results"]
    lines = [f"# {report['command']['verb']}: {'ok' if report['ok'] else 'FAILED'} ({len(rows)} rows)"]
    if not rows:
        return lines[0] + "\n"
    cols: list[str] = []
    for r in rows:
        cols.extend(k for k in r if k not in cols)
    table = [cols] + [[_cell(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(cols))]
    for row in table:
        lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tworep", description="Finite 2-group representation theory toolkit.")
    p.add_argument("verb", choices=sorted(VERBS))
    p.add_argument("--input", help="problem file (default: standard input)")
    p.add_argument("--output", help="write the report here instead of standard output")
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--level", choices=("reps", "intertwiners"), default="reps")
    p.add_argument("--criterion", choices=("irreducible", "irretractable", "indecomposable"),
                   default="indecomposable")
    p.add_argument("--timing", action="store_true", help="add wall-clock seconds to the report")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.cases < 0:
        print("tworep: --cases must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    try:
        payload = _read_input(args.input, allow_empty=args.verb == "check-laws")
        results, ok = VERBS[args.verb](args, payload)
    except (sc.SchemaError, UsageError) as exc:
        print(f"tworep: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except tgm.CrossedModuleError as exc:
        print(f"tworep: invalid 2-group: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (rt.RepresentationError, rt.IntertwinerError) as exc:
        print(f"tworep: validation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    command = {"seed": args.seed, "cases": args.cases} if args.verb == "check-laws" else {}
    if args.verb == "classify":
        command = {"level": args.level, "criterion": args.criterion}
    report = sc.make_report(args.verb, command, results, ok)
    if args.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    text = sc.dumps(report) if args.format == "json" else render_table(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
