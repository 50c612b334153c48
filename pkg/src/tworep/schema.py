"""The two-rep/1 JSON format: problem descriptions in, reports out.

Rationals travel as "p/q" strings, square roots of rationals as
{"sqrt": "p/q"} and complex numbers as [re, im] pairs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

import numpy as np

from . import two_group as tgm
from .measure_core import FiniteMeasure, FiniteSpace, MeasureFamily
from .meas2cat import HilbertField
from .rep_theory import (GAction, Intertwiner, IntertwinerError, Representation, RepresentationError,
                         make_intertwiner, make_representation)
from .surd import Surd

SCHEMA = "two-rep/1"


class SchemaError(ValueError):
    """Malformed or inconsistent input; ``where`` is a JSON path or a line/column."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None


def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- scalars

def complex_to_json(z: complex, digits: int = 12) -> list[float]:
    re, im = round(float(np.real(z)), digits), round(float(np.imag(z)), digits)
    return [re + 0.0, im + 0.0]   # + 0.0 folds -0.0


def complex_from_json(v, where: str = "") -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(a, (int, float)) for a in v):
        return complex(v[0], v[1])
    raise SchemaError(f"expected a number or [re, im], got {v!r}", where)


def matrix_to_json(m: np.ndarray) -> list:
    return [[complex_to_json(z) for z in row] for row in np.atleast_2d(m)]


def matrix_from_json(rows, where: str = "") -> np.ndarray:
    if isinstance(rows, (int, float)) and not isinstance(rows, bool):
        return np.array([[complex_from_json(rows, where)]])
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise SchemaError("a matrix is a list of rows", where)
    out = np.array([[complex_from_json(v, where) for v in r] for r in rows], dtype=np.complex128)
    if out.ndim != 2:
        raise SchemaError("matrix rows differ in length", where)
    return out


def weight_from_json(v, where: str = "") -> Surd:
    try:
        return Surd.from_json(v)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise SchemaError(str(exc), where) from None


# ---------------------------------------------------------------- groups

def _require(obj, key, where, kind=None):
    if not isinstance(obj, Mapping) or key not in obj:
        raise SchemaError(f"missing field {key!r}", where)
    v = obj[key]
    if kind is not None and not isinstance(v, kind):
        raise SchemaError(f"field {key!r} has the wrong type", f"{where}.{key}")
    return v


def group_from_json(spec, where: str = "G") -> tgm.FiniteGroup:
    if not isinstance(spec, Mapping) or len(spec) == 0:
        raise SchemaError("group must be an object", where)
    try:
        if "cyclic" in spec:
            return tgm.cyclic(int(spec["cyclic"]))
        if "symmetric" in spec:
            return tgm.symmetric(int(spec["symmetric"]))
        if "dihedral" in spec:
            return tgm.dihedral(int(spec["dihedral"]))
        if "quaternion" in spec:
            return tgm.quaternion()
        if "factors" in spec:
            return tgm.FiniteAbelian(spec["factors"]).as_group
        if "product" in spec:
            parts = [group_from_json(p, f"{where}.product[{i}]") for i, p in enumerate(spec["product"])]
            out = parts[0]
            for p in parts[1:]:
                out = tgm.direct_product(out, p)
            return out
        if "permutations" in spec:
            return tgm.from_permutations(spec["permutations"])
        if "table" in spec:
            return tgm.FiniteGroup(spec["table"], spec.get("names"))
    except tgm.GroupError as exc:
        raise SchemaError(str(exc), where) from None
    raise SchemaError("group needs one of cyclic, symmetric, dihedral, quaternion, factors, product, "
                      "permutations, table", where)


def group_to_json(G: tgm.FiniteGroup) -> dict:
    return {"table": G.table.tolist(), "names": list(G.names)}


def _element(G: tgm.FiniteGroup, v, where: str) -> int:
    if isinstance(v, bool):
        raise SchemaError("booleans are not group elements", where)
    if isinstance(v, int):
        if 0 <= v < G.order:
            return v
        raise SchemaError(f"element index {v} out of range", where)
    if isinstance(v, str) and v in G.names:
        return G.names.index(v)
    raise SchemaError(f"unknown group element {v!r}", where)


@dataclass
class TwoGroupData:
    """What the input declared, plus the skeletal 2-group when one applies."""

    crossed_module: Optional[tgm.CrossedModule] = None
    skeletal: Optional[tgm.SkeletalTwoGroup] = None
    violations: list = field(default_factory=list)
    raw: Mapping = field(default_factory=dict)


def twogroup_from_json(spec, where: str = "twogroup") -> TwoGroupData:
    """Parse G, H, ∂ and ▷; validation failures are collected, not raised."""
    if not isinstance(spec, Mapping):
        raise SchemaError("twogroup must be an object", where)
    G = group_from_json(_require(spec, "G", where), f"{where}.G")
    Hspec = _require(spec, "H", where)
    H_ab = None
    if isinstance(Hspec, Mapping) and set(Hspec) == {"factors"}:
        try:
            H_ab = tgm.FiniteAbelian(Hspec["factors"])
        except tgm.GroupError as exc:
            raise SchemaError(str(exc), f"{where}.H") from None
        H = H_ab.as_group
    else:
        H = group_from_json(Hspec, f"{where}.H")
    partial = spec.get("partial")
    if partial is None:
        partial = [0] * H.order
    else:
        if not isinstance(partial, list) or len(partial) != H.order:
            raise SchemaError("partial lists one element of G per element of H", f"{where}.partial")
        partial = [_element(G, v, f"{where}.partial[{i}]") for i, v in enumerate(partial)]
    action = spec.get("action")
    if action is None:
        table = [list(H.elements) for _ in G.elements]
    elif isinstance(action, Mapping) and "generators" in action:
        if H_ab is None:
            raise SchemaError("generator matrices need H in factor form", f"{where}.action")
        images = {_element(G, k if k in G.names or not k.isdigit() else int(k), f"{where}.action.generators"): m
                  for k, m in action["generators"].items()}
        try:
            table = tgm.semidirect_action(G, H_ab, images).tolist()
        except tgm.GroupError as exc:
            raise SchemaError(str(exc), f"{where}.action") from None
    elif isinstance(action, Mapping) and action.get("conjugation"):
        if H != G:
            raise SchemaError("conjugation action needs H = G", f"{where}.action")
        table = [[G.conj(g, h) for h in H.elements] for g in G.elements]
    elif isinstance(action, list) and len(action) == G.order:
        table = [[_element(H, v, f"{where}.action[{g}][{i}]") for i, v in enumerate(row)]
                 for g, row in enumerate(action)]
    else:
        raise SchemaError("action is a per-element table, {generators: ...} or {conjugation: true}",
                          f"{where}.action")
    data = TwoGroupData(raw=spec)
    data.violations = tgm.crossed_module_violations(G, H, partial, np.array(table, dtype=np.int64))
    if data.violations:
        return data
    data.crossed_module = tgm.CrossedModule(G, H, partial, table, H_abelian=H_ab, check=False)
    if H_ab is not None and data.crossed_module.is_skeletal:
        data.skeletal = tgm.SkeletalTwoGroup(G, H_ab, table, check=False)
    return data


def skeletal_to_json(tg: tgm.SkeletalTwoGroup) -> dict:
    return {"G": group_to_json(tg.G), "H": {"factors": list(tg.H.factors)}, "action": tg.action.tolist()}


# ---------------------------------------------------------------- representations

def representation_from_json(tg: tgm.SkeletalTwoGroup, spec, where: str) -> Representation:
    points = _require(spec, "points", where, list)
    if len(set(points)) != len(points) or not all(isinstance(p, str) for p in points):
        raise SchemaError("points must be distinct strings", f"{where}.points")
    X = FiniteSpace(tuple(points))
    act = _require(spec, "action", where, Mapping)
    rows = []
    for x in points:
        imgs = act.get(x)
        if not isinstance(imgs, list) or len(imgs) != tg.G.order:
            raise SchemaError(f"action of {x!r} must list x·g for every g", f"{where}.action")
        try:
            rows.append([X.index(v) for v in imgs])
        except KeyError:
            raise SchemaError(f"action of {x!r} leaves the point set", f"{where}.action") from None
    chi = _require(spec, "chi", where, Mapping)
    missing = [x for x in points if x not in chi]
    if missing:
        raise SchemaError(f"chi missing for {missing}", f"{where}.chi")
    k = len(tg.H.factors)
    for x in points:
        c = chi[x]
        if not isinstance(c, list) or len(c) != k or not all(isinstance(e, int) and not isinstance(e, bool) for e in c):
            raise SchemaError(f"chi[{x!r}] must be {k} integer exponents", f"{where}.chi")
    ga = GAction(tg.G, X, rows)
    return make_representation(tg, ga, [tuple(chi[x]) for x in points])


def representation_to_json(rho: Representation) -> dict:
    X = rho.space
    return {
        "points": list(X.points),
        "action": {x: [X.points[v] for v in rho.action.table[i]] for i, x in enumerate(X)},
        "chi": {x: list(rho.twogroup.dual[c].exponents) for x, c in zip(X, rho.chi)},
    }


def intertwiner_from_json(reps: Mapping[str, Representation], spec, where: str) -> Intertwiner:
    """Parse an intertwiner; validation errors propagate as IntertwinerError."""
    src = _require(spec, "source", where, str)
    tgt = _require(spec, "target", where, str)
    for name in (src, tgt):
        if name not in reps:
            raise SchemaError(f"unknown representation {name!r}", where)
    rho1, rho2 = reps[src], reps[tgt]
    X, Y = rho1.space, rho2.space
    mu_raw = _require(spec, "mu", where, Mapping)
    members = {}
    for y, row in mu_raw.items():
        if y not in Y:
            raise SchemaError(f"unknown target point {y!r}", f"{where}.mu")
        if not isinstance(row, Mapping) or not set(row) <= set(X.points):
            raise SchemaError(f"mu[{y!r}] must map source points to weights", f"{where}.mu")
        members[y] = FiniteMeasure(X, {x: weight_from_json(w, f"{where}.mu.{y}.{x}") for x, w in row.items()})
    mu = MeasureFamily(Y, X, members)
    dims_raw = _require(spec, "phi", where, Mapping)
    try:
        phi = HilbertField(Y, X, dims_raw)
    except (KeyError, ValueError, TypeError) as exc:
        raise SchemaError(f"bad dimension field: {exc}", f"{where}.phi") from None
    G = rho1.twogroup.G
    cocycle: dict[int, dict] = {g: {} for g in G.elements}
    for i, entry in enumerate(_require(spec, "cocycle", where, list)):
        w = f"{where}.cocycle[{i}]"
        g = _element(G, _require(entry, "g", w), w)
        y, x = _require(entry, "y", w, str), _require(entry, "x", w, str)
        if y not in Y or x not in X:
            raise SchemaError(f"unknown point pair ({y!r}, {x!r})", w)
        cocycle[g][(y, x)] = matrix_from_json(_require(entry, "matrix", w), f"{w}.matrix")
    return make_intertwiner(rho1, rho2, mu, phi, cocycle)


def intertwiner_to_json(it: Intertwiner, source: str, target: str) -> dict:
    G = it.G
    entries = []
    for g in G.elements:
        for p in it.support:
            y, x = it.labels(p)
            entries.append({"g": G.names[g], "y": y, "x": x, "matrix": matrix_to_json(it.cocycle[g][p])})
    return {
        "source": source,
        "target": target,
        "mu": {y: {x: w.to_json() for x, w in zip(it.mu.base, m.weights) if w} for y, m in zip(it.mu.index, it.mu.members)},
        "phi": it.phi.to_json(),
        "cocycle": entries,
    }


# ---------------------------------------------------------------- problem specs

@dataclass
class ProblemSpec:
    twogroup: TwoGroupData
    representations: dict[str, Representation]
    intertwiners: dict[str, Intertwiner]
    raw: Mapping


def parse_problem(payload, collect_errors: Optional[list] = None) -> ProblemSpec:
    """Parse a whole problem; with ``collect_errors`` validation errors are appended instead of raised.

    Schema errors (shape, dangling names) always raise.
    """
    if not isinstance(payload, Mapping):
        raise SchemaError("top level must be an object")
    tag = payload.get("schema", SCHEMA)
    if tag != SCHEMA:
        raise SchemaError(f"unsupported schema {tag!r}", "schema")
    tgd = twogroup_from_json(_require(payload, "twogroup", ""), "twogroup")
    reps: dict[str, Representation] = {}
    its: dict[str, Intertwiner] = {}
    rep_specs = payload.get("representations", {})
    it_specs = payload.get("intertwiners", {})
    if not isinstance(rep_specs, Mapping) or not isinstance(it_specs, Mapping):
        raise SchemaError("representations and intertwiners are objects keyed by name")
    if (rep_specs or it_specs) and tgd.skeletal is None:
        if tgd.violations:
            if collect_errors is None:
                raise tgm.CrossedModuleError(tgd.violations)
            return ProblemSpec(tgd, reps, its, payload)
        raise SchemaError("representations need a skeletal 2-group with H in factor form", "twogroup")
    for name, spec in rep_specs.items():
        where = f"representations.{name}"
        try:
            reps[name] = representation_from_json(tgd.skeletal, spec, where)
        except RepresentationError as exc:
            if collect_errors is None:
                raise
            collect_errors.append((where, str(exc)))
    for name, spec in it_specs.items():
        where = f"intertwiners.{name}"
        for key in ("source", "target"):
            ref = spec.get(key) if isinstance(spec, Mapping) else None
            if isinstance(ref, str) and ref not in rep_specs:
                raise SchemaError(f"dangling reference {ref!r}", f"{where}.{key}")
        if spec.get("source") not in reps or spec.get("target") not in reps:
            continue   # an endpoint failed validation and was already reported
        try:
            its[name] = intertwiner_from_json(reps, spec, where)
        except IntertwinerError as exc:
            if collect_errors is None:
                raise
            collect_errors.append((where, str(exc)))
    return ProblemSpec(tgd, reps, its, payload)


# ---------------------------------------------------------------- reports

def make_report(command: str, args: Mapping, results: list, ok: bool = True) -> dict:
    return {"schema": SCHEMA, "command": {"verb": command, **dict(args)}, "ok": ok, "results": results}


def load_report(text: str) -> dict:
    payload = loads(text)
    if not isinstance(payload, Mapping) or payload.get("schema") != SCHEMA:
        raise SchemaError("not a two-rep/1 report")
    for key in ("command", "ok", "results"):
        _require(payload, key, "")
    return payload
