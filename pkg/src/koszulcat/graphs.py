"""Graphs of chain complexes on a finite object window.

A graph ``X`` assigns a complex ``X(i, j)`` to each ordered pair of objects;
missing pairs are zero.  Composition is matrix-multiplication shaped:

    (X o Y)(i, j) = (+)_k X(i, k) (x) Y(k, j)

with the summands ordered by ``k`` in window order, and each summand using the
tensor basis order of :mod:`koszulcat.complexes`.
"""

from __future__ import annotations

from .complexes import (
    ChainComplex, ChainMap, HomBasis, TensorBasis, hom_cx, koszul, tensor,
    unit_complex, validate, direct_sum,
)
from .field import QQ
from .sparse import SparseMatrix
from .verdict import Verdict


class ObjectWindow:
    __slots__ = ("objects", "_pos")

    def __init__(self, objects):
        objects = tuple(int(o) for o in objects)
        if not objects:
            raise ValueError("object window must be nonempty")
        if any(b <= a for a, b in zip(objects, objects[1:])):
            raise ValueError("object window must be strictly increasing")
        if objects[0] < 0:
            raise ValueError("objects are natural numbers")
        self.objects = objects
        self._pos = {o: i for i, o in enumerate(objects)}

    @classmethod
    def upto(cls, n, start=0):
        return cls(range(start, n + 1))

    def __iter__(self):
        return iter(self.objects)

    def __len__(self):
        return len(self.objects)

    def __contains__(self, o):
        return o in self._pos

    def pairs(self):
        return [(i, j) for i in self.objects for j in self.objects]

    @property
    def span(self):
        return self.objects[-1] - self.objects[0]

    def __eq__(self, other):
        return isinstance(other, ObjectWindow) and other.objects == self.objects

    def __hash__(self):
        return hash(self.objects)

    def __repr__(self):
        return f"ObjectWindow({list(self.objects)})"


class Graph:
    """Window-indexed grid of chain complexes."""

    __slots__ = ("window", "levels", "field")

    def __init__(self, window: ObjectWindow, levels=None, field=QQ):
        self.window = window
        self.field = field
        self.levels = {}
        for (i, j), C in (levels or {}).items():
            if i not in window or j not in window:
                raise ValueError(f"level ({i},{j}) outside {window}")
            if C.field != field:
                raise ValueError(f"level ({i},{j}) is over {C.field!r}, graph over {field!r}")
            if not C.is_zero():
                self.levels[(i, j)] = C

    def __call__(self, i, j) -> ChainComplex:
        C = self.levels.get((i, j))
        if C is None:
            return ChainComplex({}, {}, self.field, labels={})
        return C

    def support(self):
        return sorted(self.levels)

    def dims(self):
        return {ij: dict(C.dims) for ij, C in sorted(self.levels.items())}

    def total_dim(self):
        return sum(C.total_dim() for C in self.levels.values())

    def is_zero(self):
        return not self.levels

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.window == other.window and self.field == other.field
                and self.levels == other.levels)

    def __hash__(self):  # pragma: no cover
        return hash(self.window)

    def __repr__(self):
        return f"Graph({self.window!r}, support={self.support()})"

    def strictly_directed(self):
        """``'upper'`` (only i < j), ``'lower'`` (only i > j), ``'zero'`` or ``None``."""
        if not self.levels:
            return "zero"
        if all(i < j for i, j in self.levels):
            return "upper"
        if all(i > j for i, j in self.levels):
            return "lower"
        return None


def validate_graph(X: Graph) -> Verdict:
    v = Verdict("graph")
    for ij, C in sorted(X.levels.items()):
        v.merge(validate(C), prefix=f"level {ij} ")
    return v


def _same_window(X, Y):
    if X.window != Y.window:
        raise ValueError(f"window mismatch: {X.window} vs {Y.window}")
    if X.field != Y.field:
        raise ValueError("field mismatch")


def unit_graph(w: ObjectWindow, field=QQ) -> Graph:
    return Graph(w, {(s, s): unit_complex(field) for s in w}, field)


def zero_graph(w: ObjectWindow, field=QQ) -> Graph:
    return Graph(w, {}, field)


class CircBasis:
    """Basis bookkeeping for ``(X o Y)(i, j)``: summands by ``k``."""

    def __init__(self, X: Graph, Y: Graph, i, j):
        self.ks = []
        self.tb = {}
        self.offset = {}
        self.dims = {}
        for k in X.window:
            A, B = X(i, k), Y(k, j)
            if A.is_zero() or B.is_zero():
                continue
            tb = TensorBasis(A, B)
            self.ks.append(k)
            self.tb[k] = tb
            for n, dn in tb.dims.items():
                self.offset[(k, n)] = self.dims.get(n, 0)
                self.dims[n] = self.dims.get(n, 0) + dn

    def index(self, k, p, a, q, b):
        return self.offset[(k, p + q)] + self.tb[k].index(p, a, q, b)


def circ_level(X: Graph, Y: Graph, i, j) -> ChainComplex:
    parts, ks = [], []
    for k in X.window:
        A, B = X(i, k), Y(k, j)
        if A.is_zero() or B.is_zero():
            continue
        parts.append(tensor(A, B))
        ks.append(k)
    if not parts:
        return ChainComplex({}, {}, X.field)
    S = direct_sum(parts)
    if S.labels is not None:
        S.labels = {n: [(ks[t], lab) for t, lab in labs] for n, labs in S.labels.items()}
    return S


def circ(X: Graph, Y: Graph) -> Graph:
    _same_window(X, Y)
    return Graph(X.window, {(i, j): circ_level(X, Y, i, j) for i, j in X.window.pairs()}, X.field)


def hom_level(side, X: Graph, Y: Graph, i, j) -> ChainComplex:
    parts = []
    for k in X.window:
        if side == "right":
            A, B = X(j, k), Y(i, k)
        elif side == "left":
            A, B = X(k, i), Y(k, j)
        else:
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        if A.is_zero() or B.is_zero():
            continue
        parts.append(hom_cx(A, B))
    if not parts:
        return ChainComplex({}, {}, X.field)
    return direct_sum(parts)


def hom_graph(side, X: Graph, Y: Graph) -> Graph:
    """Right: ``(i, j) -> (+)_k hom(X(j, k), Y(i, k))``; left: ``(+)_k hom(X(k, i), Y(k, j))``."""
    _same_window(X, Y)
    return Graph(X.window, {(i, j): hom_level(side, X, Y, i, j) for i, j in X.window.pairs()}, X.field)


def opposite(X: Graph) -> Graph:
    return Graph(X.window, {(j, i): C for (i, j), C in X.levels.items()}, X.field)


def swap_matrix(C: ChainComplex, D: ChainComplex, n: int) -> SparseMatrix:
    """Degree ``n`` part of ``C (x) D -> D (x) C``, ``x (x) y -> (-1)^{|x||y|} y (x) x``."""
    src, dst = TensorBasis(C, D), TensorBasis(D, C)
    f = C.field
    cols = {}
    for p, q in src.blocks(n):
        s = koszul(p, q)
        val = f.one if s > 0 else f.neg(f.one)
        for a in range(C.dim(p)):
            for b in range(D.dim(q)):
                cols[src.index(p, a, q, b)] = {dst.index(q, b, p, a): val}
    return SparseMatrix(dst.dims.get(n, 0), src.dims.get(n, 0), f, cols)


def op_circ_iso(X: Graph, Y: Graph) -> dict:
    """Levelwise iso ``opposite(X o Y) -> opposite(Y) o opposite(X)``.

    Returns ``{(i, j): ChainMap}``; the summand over ``k`` is the Koszul swap.
    """
    _same_window(X, Y)
    L = opposite(circ(X, Y))
    Xo, Yo = opposite(X), opposite(Y)
    R = circ(Yo, Xo)
    out = {}
    for i, j in X.window.pairs():
        src, dst = L(i, j), R(i, j)
        sb = CircBasis(X, Y, j, i)
        db = CircBasis(Yo, Xo, i, j)
        comps = {}
        for n in src.degrees():
            cols = {}
            for k in sb.ks:
                A, B = X(j, k), Y(k, i)
                for p, q in sb.tb[k].blocks(n):
                    s = koszul(p, q)
                    val = X.field.one if s > 0 else X.field.neg(X.field.one)
                    for a in range(A.dim(p)):
                        for b in range(B.dim(q)):
                            cols[sb.index(k, p, a, q, b)] = {db.index(k, q, b, p, a): val}
            comps[n] = SparseMatrix(dst.dim(n), src.dim(n), X.field, cols)
        out[(i, j)] = ChainMap(src, dst, comps)
    return out


def associator(X: Graph, Y: Graph, Z: Graph) -> dict:
    """Levelwise permutation ``(X o Y) o Z -> X o (Y o Z)`` (no signs)."""
    XY = circ(X, Y)
    YZ = circ(Y, Z)
    L, R = circ(XY, Z), circ(X, YZ)
    w = X.window
    out = {}
    for i, j in w.pairs():
        lb = CircBasis(XY, Z, i, j)
        rb = CircBasis(X, YZ, i, j)
        comps = {}
        cols_by_n = {}
        for l in lb.ks:
            inner_l = CircBasis(X, Y, i, l)
            for k in inner_l.ks:
                A, B, Cz = X(i, k), Y(k, l), Z(l, j)
                if Cz.is_zero():
                    continue
                inner_r = CircBasis(Y, Z, k, j)
                for p in A.degrees():
                    for q in B.degrees():
                        for r in Cz.degrees():
                            n = p + q + r
                            cols = cols_by_n.setdefault(n, {})
                            for a in range(A.dim(p)):
                                for b in range(B.dim(q)):
                                    u = inner_l.index(k, p, a, q, b)
                                    for c in range(Cz.dim(r)):
                                        v = inner_r.index(l, q, b, r, c)
                                        src = lb.index(l, p + q, u, r, c)
                                        dst = rb.index(k, p, a, q + r, v)
                                        cols[src] = {dst: X.field.one}
        for n in L(i, j).degrees():
            comps[n] = SparseMatrix(R(i, j).dim(n), L(i, j).dim(n), X.field, cols_by_n.get(n, {}))
        out[(i, j)] = ChainMap(L(i, j), R(i, j), comps)
    return out


class GraphMap:
    """Levelwise chain maps ``X -> Y`` of a fixed degree."""

    def __init__(self, source: Graph, target: Graph, levels=None, degree=0):
        self.source, self.target, self.degree = source, target, degree
        self.levels = {}
        for ij, m in (levels or {}).items():
            self.levels[ij] = m

    def __getitem__(self, ij):
        m = self.levels.get(ij)
        if m is None:
            return ChainMap(self.source(*ij), self.target(*ij), {}, self.degree)
        return m

    def is_chain_map(self):
        return all(m.is_chain_map() for m in self.levels.values())


def graph_hom_complex(A: Graph, B: Graph) -> ChainComplex:
    """``(+)_{i,j} hom(A(i, j), B(i, j))``: the complex of graph maps."""
    _same_window(A, B)
    parts = [hom_cx(A(i, j), B(i, j)) for i, j in A.window.pairs()
             if not A(i, j).is_zero() and not B(i, j).is_zero()]
    return direct_sum(parts, A.field)


def hom_basis_offsets(side, X: Graph, Y: Graph, i, j):
    """``[(k, HomBasis, offset-by-degree)]`` for a level of ``hom_graph``."""
    out = []
    off = {}
    for k in X.window:
        A, B = (X(j, k), Y(i, k)) if side == "right" else (X(k, i), Y(k, j))
        if A.is_zero() or B.is_zero():
            continue
        hb = HomBasis(A, B)
        out.append((k, hb, dict(off)))
        for n, d in hb.dims.items():
            off[n] = off.get(n, 0) + d
    return out
