"""Builders for the shipped examples.

* ``ksigma(w)``: the diagonal base with ``kSigma(n, n)`` the group algebra.
* ``kfi(w)``: the linearized category of finite sets and injections, an
  augmented kSigma-algebra whose reduced part is strictly upper-directed.
* ``chain_square_zero`` / ``chain_free``: square-zero and free algebras on a
  chain of arrows ``M(s+1, s) = k`` (strictly lower-directed) over the unit
  base.
* operads live in :mod:`koszulcat.operads`.

Composition is diagrammatic: ``e_s (x) e_t -> e_{t o s}`` ("first s, then t").
"""

from __future__ import annotations

from .algebra import (
    Algebra, DgCategory, ExplicitBimodule, free_algebra, square_zero, unit_category,
)
from .complexes import ChainComplex
from .field import QQ
from .graphs import Graph, ObjectWindow
from . import perms as P


def ksigma(w: ObjectWindow, field=QQ) -> DgCategory:
    one = field.one
    levels = {(n, n): ChainComplex({0: len(P.perms(n))}, {}, field) for n in w}

    def mul(i, k, j, p, a, q, b):
        s = P.perms(i)[a]
        t = P.perms(i)[b]
        return {P.perm_index(i)[P.compose(t, s)]: one}

    unit = {n: {P.perm_index(n)[P.identity(n)]: one} for n in w}
    gens = {n: [P.perm_index(n)[P.transposition(n, t)] for t in range(n - 1)] for n in w}
    return DgCategory(Graph(w, levels, field), mul, unit, gens, name="kSigma")


def kfi(w: ObjectWindow, field=QQ, base=None) -> Algebra:
    """``kFI(m, n)`` spanned by injections ``m -> n`` (lex order), degree 0."""
    R = base or ksigma(w, field)
    one = field.one
    levels = {}
    for m in w:
        for n in w:
            if m <= n:
                levels[(m, n)] = ChainComplex({0: P.n_injections(m, n)}, {}, field)

    def mul(i, k, j, p, a, q, b):
        f = P.injections(i, k)[a]
        g = P.injections(k, j)[b]
        return {P.injection_index(i, j)[P.compose(g, f)]: one}

    unit = {n: {P.injection_index(n, n)[P.identity(n)]: one} for n in w}
    cat = DgCategory(Graph(w, levels, field), mul, unit, name="kFI")

    def eta(s, g):
        return {g: one}

    def aug(i, j, n, a):
        return {a: one} if i == j else {}

    return Algebra(R, cat, eta, aug, name="kFI")


def chain_bimodule(R: DgCategory, dims=None, degree=0, name="M") -> ExplicitBimodule:
    """``M(s+1, s) = k^dims[s]`` in ``degree`` over the unit base."""
    w = R.window
    f = R.field
    objs = list(w)
    levels = {}
    for t in range(len(objs) - 1):
        d = 1 if dims is None else dims[t]
        if d:
            levels[(objs[t + 1], objs[t])] = ChainComplex({degree: d}, {}, f)

    def ract(i, j, n, a, g):
        return {a: f.one}

    def lact(i, j, g, n, a):
        return {a: f.one}

    return ExplicitBimodule(R, Graph(w, levels, f), ract, lact, name=name)


def chain_square_zero(span: int, field=QQ, degree=0, dims=None) -> Algebra:
    """``R v M`` over the unit base on objects ``0..span``, ``M(s+1, s) = k``."""
    w = ObjectWindow.upto(span)
    R = unit_category(w, field)
    M = chain_bimodule(R, dims, degree)
    return square_zero(R, M, name=f"sqz{span}")


def chain_free(span: int, field=QQ, degree=0) -> Algebra:
    w = ObjectWindow.upto(span)
    R = unit_category(w, field)
    M = chain_bimodule(R, None, degree)
    return free_algebra(R, M, name=f"free{span}")
