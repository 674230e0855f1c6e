"""Finite chain complexes over an exact field.

Grading is homological: ``d_n`` goes from degree ``n`` to degree ``n - 1``
and is stored as a ``dim(n-1) x dim(n)`` matrix.  Sign conventions, used
everywhere else in the package:

* tensor: ``d(x (x) y) = dx (x) y + (-1)^|x| x (x) dy``, basis ordered by
  (left degree, left index, right index);
* hom: ``(df) = d f - (-1)^|f| f d``, with ``Hom_n = prod_p Hom(C_p, D_{p+n})``
  ordered by ``p`` and, inside a block, row-major (``b * dim C_p + a`` is the
  map ``e_a -> e_b``);
* shift: ``shift(C, k)_n = C_{n-k}`` with differential ``(-1)^k d``.
"""

from __future__ import annotations

from . import kernels
from .field import QQ, Field
from .parallel import pmap
from .sparse import SparseMatrix, Quotient, kernel_of_rows, rank
from .verdict import Verdict


def koszul(a: int, b: int) -> int:
    """The sign ``(-1)^(a*b)`` as +1 or -1."""
    return -1 if (a & 1) and (b & 1) else 1


class ChainComplex:
    """Finitely supported graded vector space with a differential.

    ``labels`` optionally names the basis vectors of each degree; operations
    that build complexes from others fill it in when the inputs have it.
    """

    __slots__ = ("field", "dims", "_d", "labels", "_lindex")

    def __init__(self, dims, d=None, field: Field = QQ, labels=None):
        self.field = field
        self.dims = {int(n): int(k) for n, k in dims.items() if k}
        self._d = {}
        for n, m in (d or {}).items():
            if m.nnz():
                self._d[int(n)] = m
        self.labels = labels
        self._lindex = None

    # basic access -------------------------------------------------------
    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def degrees(self):
        return sorted(self.dims)

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def is_zero(self) -> bool:
        return not self.dims

    def d(self, n: int) -> SparseMatrix:
        m = self._d.get(n)
        if m is None:
            return SparseMatrix(self.dim(n - 1), self.dim(n), self.field)
        return m

    def stored_differentials(self):
        return dict(self._d)

    def euler_characteristic(self) -> int:
        return sum((-1) ** (n & 1) * k for n, k in self.dims.items())

    def label_index(self, n):
        if self.labels is None:
            raise ValueError("complex has no basis labels")
        if self._lindex is None:
            self._lindex = {}
        idx = self._lindex.get(n)
        if idx is None:
            idx = {lab: i for i, lab in enumerate(self.labels.get(n, ()))}
            self._lindex[n] = idx
        return idx

    def __eq__(self, other):
        if not isinstance(other, ChainComplex):
            return NotImplemented
        return (self.field == other.field and self.dims == other.dims
                and self._d == other._d)

    def __hash__(self):  # pragma: no cover
        return hash(tuple(sorted(self.dims.items())))

    def __repr__(self):
        body = ", ".join(f"{n}:{k}" for n, k in sorted(self.dims.items()))
        return f"ChainComplex({{{body}}}, {self.field!r})"

    def with_labels(self, labels):
        return ChainComplex(self.dims, self._d, self.field, labels)


def zero_complex(field=QQ) -> ChainComplex:
    return ChainComplex({}, {}, field)


def unit_complex(field=QQ) -> ChainComplex:
    """The ground field in degree 0."""
    return ChainComplex({0: 1}, {}, field, labels={0: [()]})


def concentrated(n: int, dim: int, field=QQ, labels=None) -> ChainComplex:
    return ChainComplex({n: dim}, {}, field, labels={n: list(labels)} if labels is not None else None)


def validate(C: ChainComplex) -> Verdict:
    """Shape coherence and ``d^2 = 0``; reports rather than raises."""
    v = Verdict("chain complex")
    for n, m in sorted(C._d.items()):
        if m.shape != (C.dim(n - 1), C.dim(n)):
            v.fail(f"degree {n}", f"d has shape {m.shape}, expected {(C.dim(n - 1), C.dim(n))}")
            return v
        if m.field != C.field:
            v.fail(f"degree {n}", "differential over a different field")
            return v
    for n in sorted(C._d):
        if n - 1 in C._d:
            sq = C._d[n - 1] @ C._d[n]
            if not sq.is_zero():
                i, j, x = sq.entries()[0]
                v.fail(f"degree {n}", f"d_{n - 1} d_{n} != 0 (entry ({i},{j}) = {C.field.to_text(x)})")
                return v
    return v


def require_valid(C: ChainComplex):
    v = validate(C)
    if not v:
        raise ValueError(v.summary())


# homology ---------------------------------------------------------------

def _rank_d(C: ChainComplex, n: int) -> int:
    m = C._d.get(n)
    return rank(m) if m is not None else 0


def homology_dims(C: ChainComplex) -> dict:
    """``{n: dim H_n}`` for the degrees where it is nonzero."""
    degs = C.degrees()
    ranks = dict(zip(degs, pmap(lambda n: _rank_d(C, n), degs)))
    out = {}
    for n in degs:
        h = C.dim(n) - ranks.get(n, 0) - ranks.get(n + 1, 0)
        if h:
            out[n] = h
    return out


class HomologyDegree:
    """Homology in one degree with a way to name classes.

    ``reps`` are cycles whose classes form a basis; ``classify(z)`` gives the
    coordinates of the class of a cycle ``z`` in that basis.
    """

    def __init__(self, C: ChainComplex, n: int):
        f = C.field
        self.n = n
        dim = C.dim(n)
        self.dim_chains = dim
        bound = C._d.get(n + 1)
        bvecs = list(bound.cols.values()) if bound is not None else []
        self.q = Quotient.of_vectors(dim, bvecs, f)
        dn = C._d.get(n)
        if dn is not None:
            _, cycles = kernel_of_rows(dn.rows(), dim, f)
        else:
            one = f.one
            cycles = [{i: one} for i in range(dim)]
        qd = self.q.dim
        aug = []
        for s, z in enumerate(cycles):
            row = dict(self.q.project(z))
            row[qd + s] = f.one
            aug.append(row)
        piv, _ = kernels.echelonize(aug, f.p)
        self.reps = []
        self.pivots = []
        for c in sorted(piv):
            if c >= qd:
                break
            row = piv[c]
            z = {}
            for col, a in row.items():
                if col >= qd:
                    kernels.axpy(z, a, cycles[col - qd], f.p)
            self.reps.append(z)
            self.pivots.append(c)
        self.field = f

    @property
    def dim(self):
        return len(self.reps)

    def classify(self, z):
        pz = self.q.project(z)
        return {t: pz[c] for t, c in enumerate(self.pivots) if pz.get(c)}


def homology(C: ChainComplex) -> dict:
    """``{n: (dim, representatives)}`` over the support of ``C``."""
    require_valid(C)
    out = {}
    for n, h in zip(C.degrees(), pmap(lambda n: HomologyDegree(C, n), C.degrees())):
        out[n] = (h.dim, h.reps)
    return out


# constructions ------------------------------------------------------------

def _unit_dims_check(C, D):
    if C.field != D.field:
        raise ValueError("field mismatch")


class TensorBasis:
    """Offsets for the basis of ``C (x) D``: ``index(p, i, q, j)``."""

    def __init__(self, C: ChainComplex, D: ChainComplex):
        self.C, self.D = C, D
        self.offset = {}
        self.dims = {}
        for p in C.degrees():
            for q in D.degrees():
                n = p + q
                self.offset[(p, q)] = self.dims.get(n, 0)
                self.dims[n] = self.dims.get(n, 0) + C.dim(p) * D.dim(q)

    def blocks(self, n):
        """``(p, q)`` with ``p + q = n`` in basis order."""
        return [(p, n - p) for p in self.C.degrees() if (p, n - p) in self.offset]

    def index(self, p, i, q, j):
        return self.offset[(p, q)] + i * self.D.dim(q) + j


def tensor(C: ChainComplex, D: ChainComplex) -> ChainComplex:
    _unit_dims_check(C, D)
    f = C.field
    tb = TensorBasis(C, D)
    cols_by_n = {n: {} for n in tb.dims}
    for (p, q), off in tb.offset.items():
        n = p + q
        cols = cols_by_n[n]
        dc = C._d.get(p)
        dd = D._d.get(q)
        dimq = D.dim(q)
        sgn = koszul(p, 1)
        for i in range(C.dim(p)):
            ci = dc.cols.get(i) if dc is not None else None
            for j in range(dimq):
                col = {}
                if ci:
                    o2 = tb.offset[(p - 1, q)]
                    for i2, x in ci.items():
                        col[o2 + i2 * dimq + j] = x
                if dd is not None:
                    dj = dd.cols.get(j)
                    if dj:
                        o2 = tb.offset[(p, q - 1)]
                        dq1 = D.dim(q - 1)
                        for j2, x in dj.items():
                            col[o2 + i * dq1 + j2] = x if sgn > 0 else f.neg(x)
                if col:
                    cols[off + i * dimq + j] = col
    d = {n: SparseMatrix(tb.dims.get(n - 1, 0), tb.dims[n], f, cols) for n, cols in cols_by_n.items() if cols}
    labels = None
    if C.labels is not None and D.labels is not None:
        labels = {}
        for n in sorted(tb.dims):
            labs = []
            for p, q in tb.blocks(n):
                for a in C.labels[p]:
                    for b in D.labels[q]:
                        labs.append((a, b))
            labels[n] = labs
    return ChainComplex(tb.dims, d, f, labels)


class HomBasis:
    """Offsets for ``Hom(C, D)``: ``index(p, n, b, a)`` is ``e_a -> e_b``
    with ``e_a`` in ``C_p`` and ``e_b`` in ``D_{p+n}``."""

    def __init__(self, C: ChainComplex, D: ChainComplex):
        self.C, self.D = C, D
        self.offset = {}
        self.dims = {}
        for n in sorted({q - p for p in C.degrees() for q in D.degrees()}):
            for p in C.degrees():
                if D.dim(p + n):
                    self.offset[(p, n)] = self.dims.get(n, 0)
                    self.dims[n] = self.dims.get(n, 0) + C.dim(p) * D.dim(p + n)

    def index(self, p, n, b, a):
        return self.offset[(p, n)] + b * self.C.dim(p) + a

    def blocks(self, n):
        return [p for p in self.C.degrees() if (p, n) in self.offset]


def hom_cx(C: ChainComplex, D: ChainComplex) -> ChainComplex:
    _unit_dims_check(C, D)
    f = C.field
    hb = HomBasis(C, D)
    d = {}
    for n in hb.dims:
        cols = {}
        sgn_n = koszul(n, 1)
        for p in hb.blocks(n):
            dimc = C.dim(p)
            dD = D._d.get(p + n)
            dC = C._d.get(p + 1)
            dCrows = dC.rows() if dC is not None else None
            off = hb.offset[(p, n)]
            for b in range(D.dim(p + n)):
                dDb = dD.cols.get(b) if dD is not None else None
                for a in range(dimc):
                    col = {}
                    if dDb:
                        o2 = hb.offset[(p, n - 1)]
                        for b2, x in dDb.items():
                            col[o2 + b2 * dimc + a] = x
                    if dCrows is not None and dCrows[a]:
                        # f o d_C with f = E_{b,a}: sum_{a'} dC[a, a'] E_{b,a'}
                        o2 = hb.offset[(p + 1, n - 1)]
                        dimc1 = C.dim(p + 1)
                        for a2, x in dCrows[a].items():
                            y = f.neg(x) if sgn_n > 0 else x
                            k = o2 + b * dimc1 + a2
                            z = f.add(col.get(k, f.zero), y)
                            if z:
                                col[k] = z
                            else:
                                col.pop(k, None)
                    if col:
                        cols[off + b * dimc + a] = col
        if cols:
            d[n] = SparseMatrix(hb.dims.get(n - 1, 0), hb.dims[n], f, cols)
    return ChainComplex(hb.dims, d, f)


def dual(C: ChainComplex) -> ChainComplex:
    """``hom_cx(C, unit)``; basis vector ``a`` of degree ``-n`` is ``e_a^*``."""
    out = hom_cx(C, unit_complex(C.field))
    if C.labels is not None:
        out.labels = {-n: [("dual", lab) for lab in labs] for n, labs in C.labels.items()}
    return out


def shift(C: ChainComplex, k: int) -> ChainComplex:
    d = {n + k: (m if k % 2 == 0 else -m) for n, m in C._d.items()}
    labels = {n + k: labs for n, labs in C.labels.items()} if C.labels is not None else None
    return ChainComplex({n + k: v for n, v in C.dims.items()}, d, C.field, labels)


class SumBasis:
    def __init__(self, parts):
        self.parts = parts
        self.offset = []
        self.dims = {}
        for P in parts:
            self.offset.append({n: self.dims.get(n, 0) for n in P.degrees()})
            for n in P.degrees():
                self.dims[n] = self.dims.get(n, 0) + P.dim(n)

    def index(self, t, n, i):
        return self.offset[t][n] + i


def direct_sum(parts, field=None) -> ChainComplex:
    parts = list(parts)
    if not parts:
        return zero_complex(field or QQ)
    f = parts[0].field
    sb = SumBasis(parts)
    cols_by_n = {}
    for t, P in enumerate(parts):
        for n, m in P._d.items():
            o_src = sb.offset[t][n]
            o_dst = sb.offset[t].get(n - 1, 0)
            cols = cols_by_n.setdefault(n, {})
            for j, c in m.cols.items():
                cols[o_src + j] = {o_dst + i: x for i, x in c.items()}
    d = {n: SparseMatrix(sb.dims.get(n - 1, 0), sb.dims[n], f, cols) for n, cols in cols_by_n.items()}
    labels = None
    if all(P.labels is not None for P in parts):
        labels = {}
        for n in sorted(sb.dims):
            labels[n] = [(t, lab) for t, P in enumerate(parts) for lab in P.labels.get(n, ())]
    return ChainComplex(sb.dims, d, f, labels)


def subcomplex(C: ChainComplex, basis: dict) -> "tuple[ChainComplex, ChainMap]":
    """Complex on the columns ``basis[n]`` (a list of vectors closed under d).

    The basis vectors are taken in echelon form so restricted coordinates are
    read off at their pivot entries.  Returns the complex and its inclusion.
    """
    f = C.field
    ech = {}
    for n in C.degrees():
        piv, _ = kernels.echelonize(list(basis.get(n, [])), f.p)
        ech[n] = (sorted(piv), piv)
    dims = {n: len(e[0]) for n, e in ech.items()}
    d = {}
    inc = {}
    for n, (pcs, piv) in ech.items():
        vecs = [piv[c] for c in pcs]
        inc[n] = SparseMatrix.from_columns(C.dim(n), vecs, f)
        if not vecs or n not in C._d:
            continue
        tgt_pcs, tgt_piv = ech.get(n - 1, ([], {}))
        pos = {c: k for k, c in enumerate(tgt_pcs)}
        cols = {}
        for j, v in enumerate(vecs):
            w = C._d[n].apply(v)
            r = kernels.reduce_vec(w, tgt_piv, f.p)
            if r:
                raise ValueError(f"subspace not closed under d in degree {n}")
            coords = {pos[c]: w[c] for c in tgt_pcs if w.get(c)}
            if coords:
                cols[j] = coords
        d[n] = SparseMatrix(dims.get(n - 1, 0), dims[n], f, cols)
    S = ChainComplex(dims, d, f)
    return S, ChainMap(S, C, inc)


def quotient_complex(C: ChainComplex, sub: dict):
    """``C / span(sub)`` with the quotient complex, projection and section.

    ``sub[n]`` lists vectors spanning a subcomplex in degree ``n``.  Returns
    ``(Q, proj_map, quotients)`` where ``quotients[n]`` is the
    :class:`~koszulcat.sparse.Quotient` used in degree ``n``.
    """
    f = C.field
    qs = {n: Quotient.of_vectors(C.dim(n), list(sub.get(n, [])), f) for n in C.degrees()}
    dims = {n: q.dim for n, q in qs.items()}
    d = {}
    for n, m in C._d.items():
        q_src, q_dst = qs[n], qs.get(n - 1)
        if q_dst is None:
            continue
        cols = {}
        for k, c in enumerate(q_src.free):
            col = m.cols.get(c)
            if col:
                pc = q_dst.project(col)
                if pc:
                    cols[k] = pc
        if cols:
            d[n] = SparseMatrix(q_dst.dim, q_src.dim, f, cols)
    labels = None
    if C.labels is not None:
        labels = {n: [C.labels[n][c] for c in q.free] for n, q in qs.items()}
    Q = ChainComplex(dims, d, f, labels)
    proj = ChainMap(C, Q, {n: q.proj_matrix() for n, q in qs.items()})
    return Q, proj, qs


# maps --------------------------------------------------------------------

class ChainMap:
    """Homogeneous map of degree ``degree``; ``components[n]`` sends degree
    ``n`` of the source to degree ``n + degree`` of the target."""

    __slots__ = ("source", "target", "degree", "components")

    def __init__(self, source, target, components=None, degree=0):
        self.source = source
        self.target = target
        self.degree = degree
        self.components = {}
        for n, m in (components or {}).items():
            if m.shape != (target.dim(n + degree), source.dim(n)):
                raise ValueError(
                    f"component {n} has shape {m.shape}, expected {(target.dim(n + degree), source.dim(n))}")
            if m.nnz():
                self.components[n] = m

    @property
    def field(self):
        return self.source.field

    def __getitem__(self, n):
        m = self.components.get(n)
        if m is None:
            return SparseMatrix(self.target.dim(n + self.degree), self.source.dim(n), self.field)
        return m

    @classmethod
    def identity(cls, C):
        return cls(C, C, {n: SparseMatrix.identity(C.dim(n), C.field) for n in C.degrees()})

    @classmethod
    def zero(cls, C, D, degree=0):
        return cls(C, D, {}, degree)

    def compose(self, other: "ChainMap") -> "ChainMap":
        """``self o other``."""
        comps = {}
        for n, m in other.components.items():
            a = self.components.get(n + other.degree)
            if a is not None:
                comps[n] = a @ m
        return ChainMap(other.source, self.target, comps, self.degree + other.degree)

    def __add__(self, other):
        comps = dict(self.components)
        for n, m in other.components.items():
            comps[n] = comps[n] + m if n in comps else m
        return ChainMap(self.source, self.target, comps, self.degree)

    def scale(self, a):
        return ChainMap(self.source, self.target,
                        {n: m.scale(a) for n, m in self.components.items()}, self.degree)

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        return (self.degree == other.degree and self.source.dims == other.source.dims
                and self.target.dims == other.target.dims and self.components == other.components)

    def __hash__(self):  # pragma: no cover
        return hash(self.degree)

    def boundary(self) -> "ChainMap":
        """The hom-complex differential ``d f - (-1)^k f d`` as a map of degree k-1."""
        k = self.degree
        comps = {}
        S, T = self.source, self.target
        for n in S.degrees():
            acc = None
            fn = self.components.get(n)
            dT = T._d.get(n + k)
            if fn is not None and dT is not None:
                acc = dT @ fn
            dS = S._d.get(n)
            fn1 = self.components.get(n - 1)
            if dS is not None and fn1 is not None:
                t = fn1 @ dS
                t = t if k % 2 else -t
                acc = t if acc is None else acc + t
            if acc is not None and acc.nnz():
                comps[n] = acc
        return ChainMap(S, T, comps, k - 1)

    def is_chain_map(self) -> bool:
        return not self.boundary().components

    def check(self) -> Verdict:
        v = Verdict("chain map")
        b = self.boundary()
        for n in sorted(b.components):
            v.fail(f"degree {n}", "d f - (-1)^k f d != 0")
            break
        return v

    def __repr__(self):
        return f"ChainMap({self.source!r} -> {self.target!r}, degree {self.degree})"


def cone(f: ChainMap) -> ChainComplex:
    """``Cone(f)_n = D_n (+) C_{n-1}`` with ``d(y, x) = (dy + f x, -dx)``."""
    if f.degree != 0:
        raise ValueError("cone needs a degree 0 map")
    C, D = f.source, f.target
    F = C.field
    degs = sorted(set(D.degrees()) | {n + 1 for n in C.degrees()})
    dims = {n: D.dim(n) + C.dim(n - 1) for n in degs}
    d = {}
    for n in degs:
        cols = {}
        dD = D._d.get(n)
        if dD is not None:
            for j, c in dD.cols.items():
                cols[j] = dict(c)
        off_src = D.dim(n)
        off_dst = D.dim(n - 1)
        fm = f.components.get(n - 1)
        dC = C._d.get(n - 1)
        for a in range(C.dim(n - 1)):
            col = {}
            if fm is not None:
                col.update(fm.cols.get(a, {}))
            if dC is not None:
                for i, x in dC.cols.get(a, {}).items():
                    col[off_dst + i] = F.neg(x)
            if col:
                cols[off_src + a] = col
        if cols:
            d[n] = SparseMatrix(dims.get(n - 1, 0), dims[n], F, cols)
    return ChainComplex(dims, d, F)


def is_quasi_iso(f: ChainMap) -> bool:
    if f.degree != 0:
        raise ValueError("is_quasi_iso needs a degree 0 map")
    if not f.is_chain_map():
        raise ValueError("not a chain map")
    return not homology_dims(cone(f))


def quasi_iso_failures(f: ChainMap) -> dict:
    """Degrees where the cone has homology (empty iff ``f`` is a quasi-iso)."""
    return homology_dims(cone(f))


def induced_map(f: ChainMap, n: int, hs=None, ht=None):
    """Matrix of ``H_n(f)`` in the representative bases of source and target."""
    hs = hs or HomologyDegree(f.source, n)
    ht = ht or HomologyDegree(f.target, n + f.degree)
    fn = f[n]
    cols = {}
    for t, z in enumerate(hs.reps):
        c = ht.classify(fn.apply(z))
        if c:
            cols[t] = c
    return SparseMatrix(ht.dim, hs.dim, f.field, cols)


def total_dims_by_degree(C: ChainComplex) -> dict:
    return dict(sorted(C.dims.items()))
