"""JSON formats for algebras, crossed systems and reports.

Scalars are written as strings ("3/7", "4").  Indices are 0-based.  Product
lists hold one entry per pair i <= j; omitted pairs multiply to zero.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .algebra import Algebra
from .crossed import CrossedSystem
from .errors import ParseError
from .exactfield import Field, Matrix


def _fail(msg, loc):
    raise ParseError(msg, loc)


def load_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", str(path)) from exc
    return loads(text, str(path))


def loads(text: str, source: str = "<string>") -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{source}:{exc.lineno}:{exc.colno}") from exc


def dumps(obj) -> str:
    return json.dumps(obj, indent=2)


# -- fields and scalars -------------------------------------------------------

def field_from_json(obj, loc="$.field") -> Field:
    if not isinstance(obj, dict) or "kind" not in obj:
        _fail('expected {"kind": "Q"} or {"kind": "Fp", "p": prime}', loc)
    kind = obj["kind"]
    if kind == "Q":
        return Field.Q()
    if kind == "Fp":
        p = obj.get("p")
        if not isinstance(p, int) or isinstance(p, bool):
            _fail("Fp needs an integer p", f"{loc}.p")
        try:
            return Field.Fp(p)
        except ValueError as exc:
            _fail(str(exc), f"{loc}.p")
    _fail(f"unknown field kind {kind!r}", f"{loc}.kind")


def field_to_json(F: Field) -> dict:
    return {"kind": "Q"} if F.p == 0 else {"kind": "Fp", "p": F.p}


def _scalar(F: Field, raw, loc):
    if isinstance(raw, bool) or not isinstance(raw, (str, int)):
        _fail("scalars must be strings such as \"3/7\"", loc)
    try:
        return F.parse(raw) if isinstance(raw, str) else F(raw)
    except (ValueError, ZeroDivisionError) as exc:
        _fail(f"bad scalar {raw!r}: {exc}", loc)


def _index(raw, bound, loc):
    if isinstance(raw, bool) or not isinstance(raw, int):
        _fail("index must be an integer", loc)
    if not 0 <= raw < bound:
        _fail(f"index {raw} out of range 0..{bound - 1}", loc)
    return raw


# -- sparse 3-tensors ---------------------------------------------------------

def tensor_from_list(F: Field, entries, shape, loc, *, symmetric: bool):
    """Dense tensor from a list of {i, j, coeffs: {k: scalar}}."""
    out = F.zeros(shape)
    if not isinstance(entries, list):
        _fail("expected a list of {i, j, coeffs}", loc)
    seen = set()
    for t, e in enumerate(entries):
        el = f"{loc}[{t}]"
        if not isinstance(e, dict):
            _fail("expected an object", el)
        for key in ("i", "j", "coeffs"):
            if key not in e:
                _fail(f"missing key {key!r}", el)
        i = _index(e["i"], shape[0], f"{el}.i")
        j = _index(e["j"], shape[1], f"{el}.j")
        if symmetric and i > j:
            _fail("symmetric lists need i <= j", el)
        if (i, j) in seen:
            _fail(f"duplicate entry for ({i}, {j})", el)
        seen.add((i, j))
        coeffs = e["coeffs"]
        if not isinstance(coeffs, dict):
            _fail("coeffs must map output index to scalar", f"{el}.coeffs")
        for ks, raw in coeffs.items():
            try:
                k = int(ks)
            except ValueError:
                _fail(f"output index {ks!r} is not an integer", f"{el}.coeffs")
            k = _index(k, shape[2], f"{el}.coeffs.{ks}")
            v = _scalar(F, raw, f"{el}.coeffs.{ks}")
            out[i, j, k] = v
            if symmetric:
                out[j, i, k] = v
    return out


def tensor_to_list(F: Field, t: np.ndarray, *, symmetric: bool) -> list:
    out = []
    for i in range(t.shape[0]):
        for j in range(i if symmetric else 0, t.shape[1]):
            coeffs = {str(k): F.format(t[i, j, k]) for k in range(t.shape[2]) if t[i, j, k] != 0}
            if coeffs:
                out.append({"i": i, "j": j, "coeffs": coeffs})
    return out


# -- algebras -----------------------------------------------------------------

def algebra_from_json(obj, loc="$", field: Field | None = None) -> Algebra:
    """``field`` overrides the declared field (scalars are re-read in it)."""
    if not isinstance(obj, dict):
        _fail("expected an algebra object", loc)
    for key in ("field", "dim"):
        if key not in obj:
            _fail(f"missing key {key!r}", loc)
    F = field if field is not None else field_from_json(obj["field"], f"{loc}.field")
    n = obj["dim"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        _fail("dim must be a non-negative integer", f"{loc}.dim")
    labels = obj.get("labels") or ()
    if labels and (not isinstance(labels, list) or len(labels) != n or not all(isinstance(x, str) for x in labels)):
        _fail(f"labels must be a list of {n} strings", f"{loc}.labels")
    c = tensor_from_list(F, obj.get("products", []), (n, n, n), f"{loc}.products", symmetric=True)
    return Algebra(F, c, tuple(labels))


def algebra_to_json(A: Algebra) -> dict:
    return {"field": field_to_json(A.field), "dim": A.dim, "labels": list(A.labels),
            "products": tensor_to_list(A.field, A.c, symmetric=True)}


def load_algebra(path, field: Field | None = None) -> Algebra:
    return algebra_from_json(load_json(path), str(path), field)


# -- crossed systems ----------------------------------------------------------

def crossed_from_json(obj, loc="$", base_dir: Path | None = None, field: Field | None = None) -> CrossedSystem:
    """``A`` is inline or a path (relative to ``base_dir``); act lists have
    i indexing A and j indexing V."""
    if not isinstance(obj, dict):
        _fail("expected a crossed-system object", loc)
    for key in ("A", "v_dim"):
        if key not in obj:
            _fail(f"missing key {key!r}", loc)
    a = obj["A"]
    if isinstance(a, str):
        p = Path(a)
        if base_dir is not None and not p.is_absolute():
            p = base_dir / p
        A = load_algebra(p, field)
    else:
        A = algebra_from_json(a, f"{loc}.A", field)
    m = obj["v_dim"]
    if isinstance(m, bool) or not isinstance(m, int) or m < 0:
        _fail("v_dim must be a non-negative integer", f"{loc}.v_dim")
    F, n = A.field, A.dim
    act = tensor_from_list(F, obj.get("act", []), (n, m, m), f"{loc}.act", symmetric=False)
    f = tensor_from_list(F, obj.get("f", []), (n, n, m), f"{loc}.f", symmetric=True)
    mV = tensor_from_list(F, obj.get("multV", []), (m, m, m), f"{loc}.multV", symmetric=True)
    return CrossedSystem(A, m, act, f, mV)


def crossed_to_json(cs: CrossedSystem) -> dict:
    F = cs.field
    return {"A": algebra_to_json(cs.A), "v_dim": cs.v_dim,
            "act": tensor_to_list(F, cs.act, symmetric=False),
            "f": tensor_to_list(F, cs.f, symmetric=True),
            "multV": tensor_to_list(F, cs.multV, symmetric=True)}


def load_crossed(path, field: Field | None = None) -> CrossedSystem:
    path = Path(path)
    return crossed_from_json(load_json(path), str(path), path.parent, field)


# -- matrices and vectors -----------------------------------------------------

def matrix_from_json(F: Field, obj, loc="$") -> Matrix:
    if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
        _fail("matrix must be a list of rows", loc)
    if len({len(r) for r in obj}) > 1:
        _fail("rows have different lengths", loc)
    rows = [[_scalar(F, x, f"{loc}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(obj)]
    cols = len(obj[0]) if obj else 0
    return Matrix(F, np.array(rows, dtype=object).reshape(len(rows), cols))


def matrix_to_json(M: Matrix) -> list:
    return [[M.field.format(x) for x in row] for row in M.data]


def vector_from_json(F: Field, obj, loc="$") -> np.ndarray:
    if not isinstance(obj, list):
        _fail("vector must be a list", loc)
    return F.array([_scalar(F, x, f"{loc}[{i}]") for i, x in enumerate(obj)])


def vector_to_json(F: Field, v) -> list:
    return [F.format(x) for x in np.asarray(v).ravel()]


def dense_from_json(F: Field, obj, shape, loc="$") -> np.ndarray:
    """Nested lists of scalars with a fixed shape."""
    arr = np.array(obj, dtype=object)
    if arr.shape != tuple(shape):
        _fail(f"expected shape {tuple(shape)}, got {arr.shape}", loc)
    flat = [_scalar(F, x, loc) for x in arr.ravel()]
    return F.array(np.array(flat, dtype=object).reshape(shape))


# -- reports ------------------------------------------------------------------

def classset_to_json(cs_set) -> dict:
    F = cs_set.field
    strata = []
    for s in cs_set.strata:
        strata.append({
            "label": vector_to_json(F, s.label),
            "total": s.total,
            "classes": [{"representative": crossed_to_json(c.representative), "orbit_size": c.orbit_size}
                        for c in s.classes],
        })
    return {"A": algebra_to_json(cs_set.A), "v_dim": cs_set.v_dim,
            "decomposition_label": cs_set.decomposition_label,
            "class_count": cs_set.count, "total": cs_set.total, "strata": strata}


def quotient_to_json(q) -> dict:
    F = q.field
    out = {"field": field_to_json(F), "ambient_dim": q.ambient_dim,
           "dim_Z": q.dim_Z, "dim_B": q.dim_B, "dim_H": q.dim_H,
           "class_count": q.class_count}
    if q.representatives is not None:
        out["representatives"] = [vector_to_json(F, r) for r in q.representatives]
    return out


def classification_to_json(rep) -> dict:
    return {"dimension": rep.dimension, "p": rep.p, "method": rep.method,
            "total_tables": rep.total_tables, "class_count": len(rep.classes),
            "classes": [{"algebra": algebra_to_json(c.algebra), "derived_dim": c.derived_dim,
                         "metabelian": c.metabelian, "count": c.count} for c in rep.classes]}


def pair_to_json(pr) -> dict:
    return {"r": matrix_to_json(pr.r), "alpha": matrix_to_json(pr.alpha)}
