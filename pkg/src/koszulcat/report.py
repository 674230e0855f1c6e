"""Example specifications, the computations behind each CLI command, and
reports.

A report is plain data::

    {"schema": "koszulcat.report/1", "command": ..., "input": {...},
     "tables": {name: [row, ...]}, "verdicts": [{"name", "ok", "failures",
     "details"}], "metrics": {...}}

Rows are dicts with integer ``i``, ``j``, ``degree`` and ``dim`` and an
optional ``weight``.  Everything except the optional ``metrics.seconds`` is
a function of the input, so JSON output is byte-stable.
"""

from __future__ import annotations

import csv
import io
import json
import random
import time
from dataclasses import dataclass, field as dfield

from .field import GF, QQ, Field
from .graphs import ObjectWindow
from .verdict import Verdict

SCHEMA = "koszulcat.report/1"
MAX_WINDOW = 5
MAX_ARITY = 4
MAX_TRUNC = 4

EXAMPLES = ("kfi", "square_zero", "free", "operad_unit", "operad_binary", "operad_com", "custom")


class PreconditionError(ValueError):
    """Input that fails a builder's or command's preconditions (exit code 2)."""


def parse_field(tag: str) -> Field:
    if tag in ("q", "Q"):
        return QQ
    if tag.startswith("p="):
        try:
            return GF(int(tag[2:]))
        except ValueError as e:
            raise PreconditionError(f"bad field {tag!r}: {e}") from None
    raise PreconditionError(f"field must be 'q' or 'p=PRIME', got {tag!r}")


@dataclass
class ExampleSpec:
    name: str
    window: int = 2
    arity: int = 3
    field: Field = QQ
    degree: int = 0
    dims: list = None
    sign: bool = False
    path: str = None

    def echo(self):
        out = {"example": self.name}
        if self.name != "custom":
            out["field"] = self.field.tag
        if self.name in ("kfi", "square_zero", "free"):
            out["window"] = self.window
        if self.name.startswith("operad"):
            out["arity"] = self.arity
        if self.name in ("square_zero", "free", "operad_binary"):
            out["degree"] = self.degree
        if self.dims is not None:
            out["dims"] = list(self.dims)
        if self.sign:
            out["sign"] = True
        if self.path:
            out["input"] = self.path
        return out

    def check(self, allow_large=False):
        if self.name not in EXAMPLES:
            raise PreconditionError(f"unknown example {self.name!r}; choose from {', '.join(EXAMPLES)}")
        if self.window < 0:
            raise PreconditionError("window must be nonnegative")
        if self.name in ("square_zero", "free") and self.window < 1:
            raise PreconditionError("square_zero and free need window >= 1")
        if self.arity < 1:
            raise PreconditionError("arity cap must be at least 1")
        if not allow_large:
            if self.window > MAX_WINDOW:
                raise PreconditionError(f"window {self.window} above the cap {MAX_WINDOW}")
            if self.arity > MAX_ARITY:
                raise PreconditionError(f"arity {self.arity} above the cap {MAX_ARITY}")
        if self.name.startswith("operad") and self.field.p and self.field.p <= self.arity:
            raise PreconditionError(f"characteristic {self.field.p} must exceed the arity cap {self.arity}")
        if self.dims is not None and len(self.dims) != self.window:
            raise PreconditionError(f"--dims needs {self.window} entries, one per arrow")
        if self.name == "custom" and not self.path:
            raise PreconditionError("custom example needs --input PATH")

    def is_operad(self):
        return self.name.startswith("operad")


def build_kfi(window: int, field=QQ):
    from .examples import kfi
    return kfi(ObjectWindow.upto(window), field)


def build_operad(spec: ExampleSpec):
    from .operads import binary_operad, truncated_com, unit_operad
    if spec.name == "operad_unit":
        return unit_operad(spec.field, spec.arity)
    if spec.name == "operad_binary":
        return binary_operad(spec.degree, spec.sign, spec.field, spec.arity)
    if spec.name == "operad_com":
        return truncated_com(min(3, spec.arity), spec.field, spec.arity)
    raise PreconditionError(f"{spec.name} is not an operad example")


def build_algebra(spec: ExampleSpec):
    from .examples import chain_free, chain_square_zero
    if spec.name == "kfi":
        return build_kfi(spec.window, spec.field)
    if spec.name == "square_zero":
        return chain_square_zero(spec.window, spec.field, spec.degree, spec.dims)
    if spec.name == "free":
        return chain_free(spec.window, spec.field, spec.degree)
    if spec.is_operad():
        from .operads import prop_algebra, sigma_base
        return prop_algebra(build_operad(spec), sigma_base(spec.arity, spec.field))
    if spec.name == "custom":
        from .algebra import Algebra
        from .serialize import load
        obj = load(spec.path)
        if not isinstance(obj, Algebra):
            raise PreconditionError(f"{spec.path} holds a {type(obj).__name__}, not an algebra")
        return obj
    raise PreconditionError(f"unknown example {spec.name!r}")


# reports ------------------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, dict):
        return {_key(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_jsonable(v) for v in items]
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    return str(x)


def _key(k):
    if isinstance(k, tuple):
        return ",".join(str(_jsonable(t)) for t in k)
    return str(k)


@dataclass
class Report:
    command: str
    input: dict
    tables: dict = dfield(default_factory=dict)
    verdicts: list = dfield(default_factory=list)
    metrics: dict = dfield(default_factory=dict)

    @property
    def ok(self):
        return all(v.ok for v in self.verdicts)

    def add_table(self, name, rows):
        self.tables[name] = sorted(rows, key=lambda r: (r["i"], r["j"], r["degree"],
                                                        -10 ** 9 if r["weight"] is None else r["weight"]))

    def as_dict(self):
        return {"schema": SCHEMA, "command": self.command, "input": _jsonable(self.input),
                "ok": self.ok, "tables": _jsonable(self.tables),
                "verdicts": [_jsonable(v.as_dict()) for v in self.verdicts],
                "metrics": _jsonable(self.metrics)}

    def to_json(self):
        return json.dumps(self.as_dict(), sort_keys=True, indent=1) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["table", "i", "j", "degree", "weight", "dim"])
        for name in sorted(self.tables):
            for r in self.tables[name]:
                w.writerow([name, r.get("i"), r.get("j"), r.get("degree"),
                            "" if r.get("weight") is None else r["weight"], r.get("dim")])
        for v in self.verdicts:
            w.writerow(["verdict", v.name, "", "", "", "pass" if v.ok else "FAIL"])
        return buf.getvalue()

    def to_table(self):
        lines = [f"{self.command}: " + " ".join(f"{k}={v}" for k, v in sorted(self.input.items()))]
        for name in sorted(self.tables):
            rows = self.tables[name]
            lines.append("")
            lines.append(f"[{name}]")
            weighted = any(r.get("weight") is not None for r in rows)
            head = ["(i,j)", "degree"] + (["weight"] if weighted else []) + ["dim"]
            body = []
            for r in rows:
                row = [f"({r['i']},{r['j']})", str(r["degree"])]
                if weighted:
                    row.append("" if r.get("weight") is None else str(r["weight"]))
                row.append(str(r["dim"]))
                body.append(row)
            widths = [max(len(h), *(len(b[t]) for b in body)) if body else len(h) for t, h in enumerate(head)]
            lines.append("  ".join(h.rjust(wd) for h, wd in zip(head, widths)))
            for b in body:
                lines.append("  ".join(c.rjust(wd) for c, wd in zip(b, widths)))
        if self.verdicts:
            lines.append("")
        for v in self.verdicts:
            lines.append(f"PASS  {v.name}" if v.ok else f"FAIL  {v.name} ({len(v.failures)} failures)")
            for where, msg in v.failures[:5]:
                lines.append(f"      at {where}: {msg}")
        if "seconds" in self.metrics:
            lines.append(f"time: {self.metrics['seconds']:.2f}s")
        return "\n".join(lines) + "\n"

    def render(self, fmt):
        return {"json": self.to_json, "csv": self.to_csv, "table": self.to_table}[fmt]()


def _rows(name_dims):
    """``{(i, j): {degree: dim}}`` or ``{(i, j): {(degree, weight): dim}}`` to rows."""
    rows = []
    for (i, j), h in name_dims.items():
        for key, dim in h.items():
            if isinstance(key, tuple):
                d, w = key
            else:
                d, w = key, None
            rows.append({"i": i, "j": j, "degree": d, "weight": w, "dim": dim})
    return rows


def _size(X):
    return sum(C.total_dim() for C in X.levels.values())


# commands --------------------------------------------------------------------------------

def cmd_bar(spec: ExampleSpec, right="R") -> Report:
    from .bar import BarObject, homology_by_weight
    from .complexes import homology_dims, validate
    C = build_algebra(spec)
    rep = Report("bar", {**spec.echo(), "right": right})
    B = BarObject(C, "R", right)
    table = {}
    v = Verdict(f"B(R,{C.name},{right}) is a complex")
    for ij in C.window.pairs():
        T = B.total(*ij)
        if T.complex.is_zero():
            continue
        vv = validate(T.complex)
        if not vv:
            v.fail(f"level {ij}", vv.failures[0][1])
        table[ij] = homology_by_weight(T) if C.weight is not None else homology_dims(T.complex)
    rep.add_table("bar_homology", _rows(table))
    rep.verdicts.append(v)
    rep.metrics["size"] = _size(B.total_graph())
    return rep


def cmd_dual(spec: ExampleSpec) -> Report:
    from .complexes import homology_dims, validate
    from .koszul import koszul_dual
    C = build_algebra(spec)
    K = koszul_dual(C)
    rep = Report("dual", spec.echo())
    v = Verdict(f"K({C.name}) is a complex")
    table = {}
    for ij in C.window.pairs():
        L = K(*ij)
        vv = validate(L)
        if not vv:
            v.fail(f"level {ij}", vv.failures[0][1])
        h = homology_dims(L)
        if h:
            table[ij] = h
    rep.add_table("dual_homology", _rows(table))
    rep.verdicts.append(v)
    rep.metrics["size"] = _size(K.carrier)
    return rep


def cmd_double_dual(spec: ExampleSpec, trunc=4) -> Report:
    from .doubledual import double_dual_report
    C = build_algebra(spec)
    truncs = (trunc - 1, trunc) if trunc >= 2 else (trunc,)
    rep = Report("double-dual", {**spec.echo(), "trunc": trunc})
    try:
        v = double_dual_report(C, truncs)
    except ValueError as e:
        raise PreconditionError(str(e)) from None
    tables = v.details.pop("tables")
    stable = v.details.pop("stable")
    for T in truncs:
        rep.add_table(f"KK_T{T}", _rows(tables[T]))
        rep.add_table(f"KK_T{T}_stable", _rows({ij: {n: d for n, d in h.items() if n in stable[f"{T}:{ij}"]}
                                                 for ij, h in tables[T].items()}))
    rep.verdicts.append(v)
    return rep


def cmd_compare(spec: ExampleSpec) -> Report:
    from .complexes import homology_dims
    from .koszul import compare_models, dual_bar_model, koszul_dual
    C = build_algebra(spec)
    K, D = koszul_dual(C), dual_bar_model(C)
    rep = Report("compare-models", spec.echo())
    rep.verdicts.append(compare_models(C, K, D))
    rep.add_table("dual_homology", _rows({ij: homology_dims(K(*ij)) for ij in C.window.pairs()}))
    rep.add_table("model_homology", _rows({ij: homology_dims(D(*ij)) for ij in C.window.pairs()}))
    return rep


def cmd_operad_check(spec: ExampleSpec) -> Report:
    from .operads import operad_koszul_check
    if not spec.is_operad():
        raise PreconditionError("operad-check needs an operad example (operad_unit, operad_binary, operad_com)")
    Op = build_operad(spec)
    rep = Report("operad-check", spec.echo())
    v = operad_koszul_check(Op, levels=spec.arity)
    table = v.details.pop("table")
    rep.add_table("K_prop", _rows({ij: a for ij, (a, b) in table.items()}))
    rep.add_table("prop_dual_bar_op", _rows({ij: b for ij, (a, b) in table.items()}))
    rep.verdicts.append(v)
    return rep


def random_square_zero(rng: random.Random, field, span=2):
    """A square-zero extension of the unit base by a random strictly lower
    bimodule with zero differential."""
    from .algebra import ExplicitBimodule, square_zero, unit_category
    from .complexes import ChainComplex
    from .graphs import Graph
    w = ObjectWindow.upto(span)
    R = unit_category(w, field)
    levels = {}
    for i in w:
        for j in w:
            if i > j and rng.random() < 0.7:
                levels[(i, j)] = ChainComplex({rng.choice([0, 1]): rng.randint(1, 2)}, {}, field)
    M = ExplicitBimodule(R, Graph(w, levels, field), lambda i, j, n, a, g: {a: field.one},
                         lambda i, j, g, n, a: {a: field.one}, name="M")
    return square_zero(R, M, name=f"random{span}")


def cmd_verify(spec: ExampleSpec, seed=None, samples=5) -> Report:
    """The invariant suite for a builder, plus seeded random instances."""
    from .algebra import validate_algebra
    from .bar import (BarObject, augmentation_qiso_check, bar_lemma_check, simplicial_check,
                      square_zero_bar_check)
    from .koszul import SquareZeroPhi, compare_models, convolution_homology_check, koszul_dual
    rep = Report("verify", {**spec.echo(), "seed": seed})
    C = build_algebra(spec)
    K = koszul_dual(C)
    vs = [validate_algebra(C), simplicial_check(BarObject(C, "R", "C")), augmentation_qiso_check(C),
          bar_lemma_check(C), compare_models(C, K), K.validate_dg(limit=4000),
          convolution_homology_check(C, K, limit=20)]
    if getattr(C, "summand", None) is not None:
        vs.append(square_zero_bar_check(C))
        vs.append(SquareZeroPhi(C, K).check())
    if spec.is_operad():
        from .operads import prop_dual_check, trivial_seq, validate_operad, validate_prop
        Op = build_operad(spec)
        vs.append(validate_operad(Op, limit=20000))
        vs.append(validate_prop(Op))
        cap = min(spec.arity, 3)
        vs.append(prop_dual_check(trivial_seq({2: {0: 1}}, spec.field, cap=cap)))
    rng = random.Random(seed if seed is not None else 0)
    for t in range(samples if seed is not None else 0):
        if spec.is_operad():
            from .operads import prop_monoidal_iso
            M, N = random_symseq(rng, spec.field, min(spec.arity, 3)), random_symseq(rng, spec.field, min(spec.arity, 3))
            _, sub = prop_monoidal_iso(M, N)
            v = Verdict(f"random monoidality #{t}").merge(sub)
        else:
            R = random_square_zero(rng, spec.field, rng.randint(1, 3))
            v = Verdict(f"random square-zero #{t}")
            for sub in (validate_algebra(R), bar_lemma_check(R), compare_models(R)):
                v.merge(sub, prefix=f"{sub.name}: ")
        vs.append(v)
    rep.verdicts.extend(vs)
    return rep


def random_symseq(rng: random.Random, field, cap=3):
    from .complexes import unit_complex
    from .operads import SymSeq, regular_seq, sign_seq, trivial_seq
    arities, acts = {1: unit_complex(field)}, {}
    for n in range(2, cap + 1):
        kind = rng.choice(["none", "trivial", "sign", "regular"] if n <= 3 else ["none", "trivial", "sign"])
        if kind == "none":
            continue
        deg = rng.randint(0, 1)
        if kind == "regular":
            X = regular_seq([n], field, degree=deg)
        else:
            X = (trivial_seq if kind == "trivial" else sign_seq)({n: {deg: 1}}, field)
        arities[n] = X(n)
        if n in X.actions:
            acts[n] = X.actions[n]
    return SymSeq(arities, acts, field, "X", cap)


def run(command, spec: ExampleSpec, **kw) -> Report:
    t0 = time.perf_counter()
    fn = {"bar": cmd_bar, "dual": cmd_dual, "double-dual": cmd_double_dual, "verify": cmd_verify,
          "operad-check": cmd_operad_check, "compare-models": cmd_compare}[command]
    rep = fn(spec, **kw)
    rep.metrics["seconds"] = time.perf_counter() - t0
    return rep
