"""Versioned JSON for the core types.

Every document is an object ``{"format": "koszulcat", "version": 1,
"type": ..., "field": "q" | "p=P", ...}``.  Field elements are written as
strings (``"-3/2"`` over Q, ``"7"`` over F_p).  Matrices are lists of
``[row, col, value]`` in column-major order, vectors lists of
``[index, value]`` sorted by index.  Structure maps (products, actions,
units, augmentations) are stored as explicit tables of their nonzero values
on basis vectors, so a loaded object carries no code.

:func:`dumps` is canonical: sorted keys, fixed separators, one trailing
newline.  ``dumps(loads(s)) == s`` for every ``s`` produced by ``dumps``.
Loading never validates: a complex with ``d^2 != 0`` loads, and
:func:`koszulcat.complexes.validate` reports it.
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import product

from .complexes import ChainComplex
from .field import GF, QQ, Field
from .graphs import Graph, ObjectWindow
from .sparse import SparseMatrix

FORMAT = "koszulcat"
VERSION = 1


class SerializationError(ValueError):
    """Malformed input; ``where`` is a JSON path or ``line L col C``."""

    def __init__(self, where, message):
        super().__init__(f"{where}: {message}")
        self.where = where


# fields and scalars --------------------------------------------------------------------

def field_tag(f: Field) -> str:
    return f.tag


def parse_field(tag, where="$.field") -> Field:
    if tag == "q":
        return QQ
    if isinstance(tag, str) and tag.startswith("p="):
        try:
            return GF(int(tag[2:]))
        except ValueError as e:
            raise SerializationError(where, str(e)) from None
    raise SerializationError(where, f"unknown field tag {tag!r}")


def _scalar_out(x) -> str:
    return str(x)


def _scalar_in(f: Field, s, where):
    if not isinstance(s, str):
        raise SerializationError(where, f"scalar must be a string, got {s!r}")
    try:
        v = f.coerce(Fraction(s)) if not f.p else f.coerce(int(s))
    except (ValueError, ZeroDivisionError):
        raise SerializationError(where, f"bad scalar {s!r}") from None
    if not v:
        raise SerializationError(where, "stored zero")
    return v


def _vec_out(v):
    return [[int(k), _scalar_out(x)] for k, x in sorted(v.items())]


def _vec_in(f, data, where):
    _expect(data, list, where)
    out = {}
    for t, e in enumerate(data):
        w = f"{where}[{t}]"
        if not (isinstance(e, list) and len(e) == 2 and isinstance(e[0], int)):
            raise SerializationError(w, "expected [index, value]")
        out[e[0]] = _scalar_in(f, e[1], w)
    return out


def _expect(x, typ, where):
    if not isinstance(x, typ):
        raise SerializationError(where, f"expected {typ.__name__}, got {type(x).__name__}")


def _key(d, k, where):
    if k not in d:
        raise SerializationError(where, f"missing key {k!r}")
    return d[k]


# complexes and graphs -------------------------------------------------------------------

def matrix_to_data(m: SparseMatrix):
    return {"shape": [m.nrows, m.ncols],
            "entries": [[i, j, _scalar_out(x)] for j in sorted(m.cols) for i, x in sorted(m.cols[j].items())]}


def matrix_from_data(f, data, where) -> SparseMatrix:
    _expect(data, dict, where)
    shape = _key(data, "shape", where)
    if not (isinstance(shape, list) and len(shape) == 2 and all(isinstance(x, int) and x >= 0 for x in shape)):
        raise SerializationError(f"{where}.shape", "expected [rows, cols]")
    cols = {}
    for t, e in enumerate(_key(data, "entries", where)):
        w = f"{where}.entries[{t}]"
        if not (isinstance(e, list) and len(e) == 3 and isinstance(e[0], int) and isinstance(e[1], int)):
            raise SerializationError(w, "expected [row, col, value]")
        i, j = e[0], e[1]
        if not (0 <= i < shape[0] and 0 <= j < shape[1]):
            raise SerializationError(w, f"entry ({i},{j}) outside {shape[0]}x{shape[1]}")
        cols.setdefault(j, {})[i] = _scalar_in(f, e[2], w)
    return SparseMatrix(shape[0], shape[1], f, cols)


def complex_to_data(C: ChainComplex):
    return {"dims": {str(n): k for n, k in sorted(C.dims.items())},
            "d": {str(n): matrix_to_data(m) for n, m in sorted(C.stored_differentials().items())}}


def complex_from_data(f, data, where="$") -> ChainComplex:
    _expect(data, dict, where)
    dims = {}
    for n, k in _key(data, "dims", where).items():
        if not isinstance(k, int) or k < 0:
            raise SerializationError(f"{where}.dims.{n}", "dimension must be a nonnegative integer")
        dims[_int_key(n, f"{where}.dims")] = k
    d = {}
    for n, m in data.get("d", {}).items():
        deg = _int_key(n, f"{where}.d")
        w = f"{where}.d.{n}"
        mat = matrix_from_data(f, m, w)
        if mat.shape != (dims.get(deg - 1, 0), dims.get(deg, 0)):
            raise SerializationError(w, f"shape {mat.shape} does not match the dimensions")
        d[deg] = mat
    return ChainComplex(dims, d, f)


def _int_key(s, where):
    try:
        return int(s)
    except ValueError:
        raise SerializationError(where, f"bad integer key {s!r}") from None


def graph_to_data(X: Graph):
    return {"window": list(X.window),
            "levels": [{"i": i, "j": j, "complex": complex_to_data(C)}
                       for (i, j), C in sorted(X.levels.items())]}


def graph_from_data(f, data, where="$") -> Graph:
    _expect(data, dict, where)
    objs = _key(data, "window", where)
    if not (isinstance(objs, list) and all(isinstance(o, int) for o in objs)):
        raise SerializationError(f"{where}.window", "expected a list of integers")
    w = ObjectWindow(objs)
    levels = {}
    for t, lev in enumerate(_key(data, "levels", where)):
        lw = f"{where}.levels[{t}]"
        i, j = _key(lev, "i", lw), _key(lev, "j", lw)
        if i not in w or j not in w:
            raise SerializationError(lw, f"level ({i},{j}) outside the window")
        levels[(i, j)] = complex_from_data(f, _key(lev, "complex", lw), f"{lw}.complex")
    return Graph(w, levels, f)


# categories, algebras, bimodules ----------------------------------------------------------

def _basis(C):
    for n in C.degrees():
        for a in range(C.dim(n)):
            yield n, a


def category_to_data(C):
    X = C.carrier
    mul = []
    for (i, k) in sorted(X.levels):
        for j in X.window:
            if (k, j) not in X.levels or (i, j) not in X.levels:
                continue
            for p, a in _basis(X(i, k)):
                for q, b in _basis(X(k, j)):
                    r = C.mul(i, k, j, p, a, q, b)
                    if r:
                        mul.append([i, k, j, p, a, q, b, _vec_out(r)])
    out = {"name": C.name, "graph": graph_to_data(X), "mul": mul,
           "unit": [[s, _vec_out(C.unit[s])] for s in sorted(C.unit)]}
    if C.generators is not None:
        out["generators"] = [[s, list(C.generators[s])] for s in sorted(C.generators)]
    return out


def category_from_data(f, data, where="$"):
    from .algebra import DgCategory
    _expect(data, dict, where)
    X = graph_from_data(f, _key(data, "graph", where), f"{where}.graph")
    table = {}
    for t, e in enumerate(_key(data, "mul", where)):
        w = f"{where}.mul[{t}]"
        if not (isinstance(e, list) and len(e) == 8 and all(isinstance(x, int) for x in e[:7])):
            raise SerializationError(w, "expected [i, k, j, p, a, q, b, vector]")
        table[tuple(e[:7])] = _vec_in(f, e[7], f"{w}[7]")
    unit = {}
    for t, e in enumerate(_key(data, "unit", where)):
        unit[e[0]] = _vec_in(f, e[1], f"{where}.unit[{t}][1]")
    gens = None
    if "generators" in data:
        gens = {e[0]: list(e[1]) for e in data["generators"]}

    def mul(i, k, j, p, a, q, b):
        return dict(table.get((i, k, j, p, a, q, b), {}))

    return DgCategory(X, mul, unit, gens, name=data.get("name", "category"))


def algebra_to_data(A):
    out = {"name": A.name, "base": category_to_data(A.base), "cat": category_to_data(A.cat),
           "eta": [[s, g, _vec_out(A.eta(s, g))] for s in A.base.window
                   for _, g in _basis(A.base(s, s))]}
    if A.augmented:
        aug = []
        for (i, j), C in sorted(A.cat.carrier.levels.items()):
            for n, a in _basis(C):
                r = A.aug(i, j, n, a)
                if r:
                    aug.append([i, j, n, a, _vec_out(r)])
        out["aug"] = aug
    if A.weight is not None:
        out["weight"] = [[i, j, n, list(ws)] for (i, j), lv in sorted(A.weight.items())
                         for n, ws in sorted(lv.items())]
    return out


def algebra_from_data(f, data, where="$"):
    from .algebra import Algebra
    _expect(data, dict, where)
    R = category_from_data(f, _key(data, "base", where), f"{where}.base")
    C = category_from_data(f, _key(data, "cat", where), f"{where}.cat")
    eta = {(e[0], e[1]): _vec_in(f, e[2], f"{where}.eta[{t}][2]") for t, e in enumerate(_key(data, "eta", where))}
    aug_fn = None
    if "aug" in data:
        aug = {tuple(e[:4]): _vec_in(f, e[4], f"{where}.aug[{t}][4]") for t, e in enumerate(data["aug"])}

        def aug_fn(i, j, n, a):
            return dict(aug.get((i, j, n, a), {}))

    weight = None
    if "weight" in data:
        weight = {}
        for i, j, n, ws in data["weight"]:
            weight.setdefault((i, j), {})[n] = list(ws)
    try:
        return Algebra(R, C, lambda s, g: dict(eta.get((s, g), {})), aug_fn, weight,
                       name=data.get("name", "algebra"))
    except ValueError as e:
        raise SerializationError(where, str(e)) from None


def bimodule_to_data(M):
    X = M.carrier
    R = M.base
    ract, lact = [], []
    for (i, j), C in sorted(X.levels.items()):
        for n, a in _basis(C):
            for _, g in _basis(R(j, j)):
                r = M.ract(i, j, n, a, g)
                if r:
                    ract.append([i, j, n, a, g, _vec_out(r)])
            for _, g in _basis(R(i, i)):
                r = M.lact(i, j, g, n, a)
                if r:
                    lact.append([i, j, g, n, a, _vec_out(r)])
    return {"name": M.name, "base": category_to_data(R), "graph": graph_to_data(X),
            "ract": ract, "lact": lact}


def bimodule_from_data(f, data, where="$"):
    from .algebra import ExplicitBimodule
    R = category_from_data(f, _key(data, "base", where), f"{where}.base")
    X = graph_from_data(f, _key(data, "graph", where), f"{where}.graph")
    rt = {tuple(e[:5]): _vec_in(f, e[5], f"{where}.ract[{t}][5]") for t, e in enumerate(_key(data, "ract", where))}
    lt = {tuple(e[:5]): _vec_in(f, e[5], f"{where}.lact[{t}][5]") for t, e in enumerate(_key(data, "lact", where))}
    return ExplicitBimodule(R, X, lambda i, j, n, a, g: dict(rt.get((i, j, n, a, g), {})),
                            lambda i, j, g, n, a: dict(lt.get((i, j, g, n, a), {})),
                            name=data.get("name", "bimodule"))


# symmetric sequences and operads ---------------------------------------------------------

def symseq_to_data(X):
    acts = []
    for n in sorted(X.actions):
        if n not in X.arities:
            continue
        for t, m in enumerate(X.actions[n]):
            acts.append([n, t, {str(d): matrix_to_data(m[d]) for d in X(n).degrees()}])
    return {"name": X.name, "cap": X.cap,
            "arities": {str(n): complex_to_data(C) for n, C in sorted(X.arities.items())},
            "actions": acts}


def symseq_from_data(f, data, where="$"):
    from .complexes import ChainMap
    from .operads import SymSeq
    _expect(data, dict, where)
    ar = {_int_key(n, f"{where}.arities"): complex_from_data(f, c, f"{where}.arities.{n}")
          for n, c in _key(data, "arities", where).items()}
    acts = {}
    for t, (n, s, comps) in enumerate(_key(data, "actions", where)):
        C = ar.get(n)
        if C is None:
            raise SerializationError(f"{where}.actions[{t}]", f"action on missing arity {n}")
        mats = {int(d): matrix_from_data(f, m, f"{where}.actions[{t}].{d}") for d, m in comps.items()}
        acts.setdefault(n, []).append(ChainMap(C, C, mats))
    try:
        return SymSeq(ar, acts, f, data.get("name", "X"), data.get("cap"))
    except ValueError as e:
        raise SerializationError(where, str(e)) from None


def operad_to_data(Op):
    X = Op.seq
    basis = [(n, d, a) for n in sorted(X.arities) for d, a in _basis(X(n))]
    table = []
    for z in basis:
        for ys in product(basis, repeat=z[0]):
            if sum(y[0] for y in ys) > Op.cap:
                continue
            r = Op.gamma(z, ys)
            if r:
                table.append([list(z), [list(y) for y in ys], _vec_out(r)])
    return {"name": Op.name, "seq": symseq_to_data(X), "gamma": table}


def operad_from_data(f, data, where="$"):
    from .operads import Operad
    X = symseq_from_data(f, _key(data, "seq", where), f"{where}.seq")
    table = {}
    for t, (z, ys, v) in enumerate(_key(data, "gamma", where)):
        table[(tuple(z), tuple(tuple(y) for y in ys))] = _vec_in(f, v, f"{where}.gamma[{t}][2]")
    try:
        return Operad(X, lambda z, ys: dict(table.get((z, ys), {})), data.get("name", "P"))
    except ValueError as e:
        raise SerializationError(where, str(e)) from None


# documents ----------------------------------------------------------------------------

def _kind(obj):
    from .algebra import Algebra, Bimodule, DgCategory
    from .operads import Operad, SymSeq
    for typ, name in ((ChainComplex, "complex"), (Graph, "graph"), (DgCategory, "category"),
                      (Algebra, "algebra"), (Bimodule, "bimodule"), (SymSeq, "symseq"),
                      (Operad, "operad")):
        if isinstance(obj, typ):
            return name
    raise TypeError(f"cannot serialize {type(obj).__name__}")


_OUT = {"complex": complex_to_data, "graph": graph_to_data, "category": category_to_data,
        "algebra": algebra_to_data, "bimodule": bimodule_to_data, "symseq": symseq_to_data,
        "operad": operad_to_data}
_IN = {"complex": complex_from_data, "graph": graph_from_data, "category": category_from_data,
       "algebra": algebra_from_data, "bimodule": bimodule_from_data, "symseq": symseq_from_data,
       "operad": operad_from_data}


def to_data(obj) -> dict:
    kind = _kind(obj)
    f = obj.field
    return {"format": FORMAT, "version": VERSION, "type": kind, "field": field_tag(f),
            "data": _OUT[kind](obj)}


def from_data(doc):
    _expect(doc, dict, "$")
    if doc.get("format") != FORMAT:
        raise SerializationError("$.format", f"expected {FORMAT!r}")
    v = doc.get("version")
    if not isinstance(v, int) or v > VERSION or v < 1:
        raise SerializationError("$.version", f"unsupported version {v!r} (this reader handles 1..{VERSION})")
    kind = doc.get("type")
    if kind not in _IN:
        raise SerializationError("$.type", f"unknown type {kind!r}")
    f = parse_field(doc.get("field"))
    return _IN[kind](f, _key(doc, "data", "$"), "$.data")


def dumps(obj) -> str:
    return json.dumps(to_data(obj), sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SerializationError(f"line {e.lineno} col {e.colno}", e.msg) from None
    return from_data(doc)


def dump(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
