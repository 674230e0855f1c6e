"""The Koszul dual ``K(C)``, the dual-of-bar model and the comparison map.

``K(C)(i, j)`` is the complex of right C-module maps ``X(j, -) -> X(i, -)``
with ``X = Tot B(R, C, C)``.  Since ``X = V o_R C`` with ``V = Tot B(R, C, R)``
is free, such a map is determined by its restriction to ``V``:

    K(C)(i, j) = (+)_k map_{R_k}(V(j, k), X(i, k)),

with extension ``f~(w (x) c) = f(w) . c``.  The differential on restricted
maps is ``(Df)(v) = D f(v) - (-1)^|f| f~(D iota(v))`` where
``iota(v) = v (x) 1``; multiplication is composition ``f o g``.
"""

from __future__ import annotations

from . import kernels
from .algebra import Algebra, Bimodule, CircOver, HomOver, check_base, regular_bimodule
from .bar import BarObject, right_action
from .complexes import ChainComplex, ChainMap, HomBasis, quasi_iso_failures
from .graphs import Graph
from .parallel import pmap
from .sparse import SparseMatrix, kernel_of_rows
from .verdict import Verdict


class TotalBimodule(Bimodule):
    """The total complex of a bar object as an R-bimodule."""

    def __init__(self, B: BarObject):
        self.B = B
        super().__init__(B.base, B.total_graph(), name=f"Tot B({B.left},{B.C.name},{B.right})")

    def _ract(self, i, j, n, a, g):
        T = self.B.total(i, j)
        l, q, x = T.locate[(n, a)]
        r = self.B.levels[l].module.ract(i, j, q, x, g)
        o = T.offset[(l, q)]
        return {o + b: v for b, v in r.items()}

    def _lact(self, i, j, g, n, a):
        T = self.B.total(i, j)
        l, q, x = T.locate[(n, a)]
        r = self.B.levels[l].module.lact(i, j, g, q, x)
        o = T.offset[(l, q)]
        return {o + b: v for b, v in r.items()}


def _acc(acc, c, x, f):
    y = f.add(acc.get(c, f.zero), x)
    if y:
        acc[c] = y
    else:
        acc.pop(c, None)


class KoszulDual(Bimodule):
    """``K(C)`` with composition, unit and evaluation on ``B(R, C, C)``."""

    def __init__(self, C: Algebra, check=False):
        if not C.augmented:
            raise ValueError("Koszul dual needs an augmented algebra")
        check_base(C.base)
        if C.reduced().carrier.strictly_directed() is None:
            raise ValueError("reduced part is not strictly directed; the bar construction is unbounded")
        self.C = C
        self.V = BarObject(C, "R", "R")
        self.X = BarObject(C, "R", "C")
        self.check = check
        f = C.field
        self._iota = {}
        self._dexp = {}
        w = C.window
        self._TV = {ij: self.V.total(*ij).complex for ij in w.pairs()}
        self._TX = {ij: self.X.total(*ij).complex for ij in w.pairs()}
        self._levels = {}
        levels = {}
        for ij, data in zip(w.pairs(), pmap(lambda ij: self._level(*ij), w.pairs())):
            if data is not None:
                self._levels[ij] = data
                levels[ij] = data["complex"]
        super().__init__(C.base, Graph(w, levels, f), name=f"K({C.name})")

    # structure of X = V o_R C ------------------------------------------------------
    def iota(self, j, k, m, v):
        """``v (x) 1`` for basis ``v`` of ``V(j, k)_m``, in ``X(j, k)_m``."""
        key = (j, k, m, v)
        r = self._iota.get(key)
        if r is not None:
            return r
        V, X, C = self.V, self.X, self.C
        f = C.field
        one = f.one
        l, q, a = V.total(j, k).locate[(m, v)]
        TXl = X.total(j, k)
        if l == 0:
            res = C.eta(j, a)  # V_0 = R, X_0 = C
        else:
            lev = X.levels[l]
            path, fs = V.levels[l].factors(j, k, q, a)
            vecs = [(d, {z: one}) for d, z in fs] + [(0, dict(C.cat.unit[k]))]
            res = lev.project(path + (k,), vecs)
        o = TXl.offset.get((l, q))
        r = {o + b: x for b, x in res.items()} if res else {}
        self._iota[key] = r
        return r

    def decompose(self, j, k, m, x):
        """Write basis ``x`` of ``X(j, k)_m`` as ``[(k', w, c_deg, c, coeff)]``
        meaning ``coeff * w (x) c`` with ``w`` basis of ``V(j, k')`` (total
        index, degree ``m - c_deg``) and ``c`` basis of ``C(k', k)_{c_deg}``."""
        V, X, C = self.V, self.X, self.C
        f = C.field
        l, q, a = X.total(j, k).locate[(m, x)]
        if l == 0:
            # X_0 = C = R o_R C: c = 1_j (x) c
            TV = V.total(j, j)
            out = []
            for r, coeff in C.base.unit[j].items():
                out.append((j, TV.index(0, 0, r), q, a, coeff))
            return out
        k2, p, w, qc, c = X.levels[l].module.label(j, k, q, a)
        TV = V.total(j, k2)
        return [(k2, TV.index(l, p, w), qc, c, f.one)]

    def _dx_iota(self, j, k, m, v):
        """``D iota(v)`` decomposed as pure tensors ``w (x) c``."""
        key = (j, k, m, v)
        r = self._dexp.get(key)
        if r is None:
            f = self.C.field
            d = self._TX[(j, k)].d(m).apply(self.iota(j, k, m, v))
            terms = {}
            for x, coeff in d.items():
                for k2, w, qc, c, s in self.decompose(j, k, m - 1, x):
                    key2 = (k2, w, qc, c)
                    _acc(terms, key2, f.mul(coeff, s), f)
            r = sorted(terms.items())
            self._dexp[key] = r
        return r

    def xact(self, i, k2, k, n, x, qc, c):
        """Right action on X: basis ``x`` of ``X(i, k2)_n`` times ``c``."""
        return right_action(self.X, i, k2, k, n, x, qc, c)

    # levels ---------------------------------------------------------------------------
    def _blocks(self, i, j):
        """Unknown space: for each ``k`` a hom block ``V(j, k) -> X(i, k)``."""
        blocks = []
        off = {}
        for k in self.C.window:
            A, Bc = self._TV[(j, k)], self._TX[(i, k)]
            if A.is_zero() or Bc.is_zero():
                continue
            hb = HomBasis(A, Bc)
            blocks.append((k, hb, dict(off)))
            for n, dn in hb.dims.items():
                off[n] = off.get(n, 0) + dn
        return blocks, off

    def _level(self, i, j):
        C = self.C
        R = C.base
        f = C.field
        blocks, dims = self._blocks(i, j)
        if not dims:
            return None
        bidx = {k: (hb, off) for k, hb, off in blocks}
        # equivariance: f(v.g) = f(v).g for generators g of R_k
        cons = {n: [] for n in dims}
        for k, hb, off in blocks:
            gens = R.generators.get(k, ())
            if not gens:
                continue
            A, Bc = hb.C, hb.D
            for (p, n), o in hb.offset.items():
                base = off.get(n, 0) + o
                dA = A.dim(p)
                rows = cons[n]
                for g in gens:
                    for a in range(dA):
                        vg = self._vract(j, k, p, a, g)
                        acc = {}
                        for a2, x in vg.items():
                            for b in range(Bc.dim(p + n)):
                                acc.setdefault(b, {})[base + b * dA + a2] = x
                        for b in range(Bc.dim(p + n)):
                            for b2, y in self._xract(i, k, p + n, b, g).items():
                                row = acc.setdefault(b2, {})
                                _acc(row, base + b * dA + a, f.neg(y), f)
                        for row in acc.values():
                            if row:
                                rows.append(row)
        kern = {}
        for n in sorted(dims):
            free, vecs = kernel_of_rows(cons[n], dims[n], f)
            kern[n] = (free, vecs)
        # differential on the kernel basis
        d = {}
        for n, (free, vecs) in kern.items():
            if n - 1 not in kern:
                continue
            tfree = kern[n - 1][0]
            tpos = {c: t for t, c in enumerate(tfree)}
            cols = {}
            for t, vec in enumerate(vecs):
                img = self.D_unknown(i, j, n, vec, blocks=(blocks, bidx))
                if self.check:
                    self._check_in_kernel(cons[n - 1], img, f)
                coords = {tpos[c]: x for c, x in img.items() if c in tpos}
                if coords:
                    cols[t] = coords
            if cols:
                d[n] = SparseMatrix(len(tfree), len(free), f, cols)
        K = ChainComplex({n: len(v[0]) for n, v in kern.items()}, d, f)
        return {"complex": K, "blocks": blocks, "bidx": bidx, "kern": kern,
                "free_pos": {n: {c: t for t, c in enumerate(v[0])} for n, v in kern.items()},
                "cons": cons}

    @staticmethod
    def _check_in_kernel(rows, vec, f):
        for row in rows:
            s = f.zero
            for c, x in row.items():
                y = vec.get(c)
                if y:
                    s = f.add(s, f.mul(x, y))
            if s:
                raise AssertionError("differential leaves the equivariant maps")

    def _vract(self, j, k, p, a, g):
        T = self.V.total(j, k)
        l, q, x = T.locate[(p, a)]
        r = self.V.levels[l].module.ract(j, k, q, x, g)
        o = T.offset[(l, q)]
        return {o + b: v for b, v in r.items()}

    def _xract(self, i, k, n, b, g):
        T = self.X.total(i, k)
        l, q, x = T.locate[(n, b)]
        r = self.X.levels[l].module.ract(i, k, q, x, g)
        o = T.offset[(l, q)]
        return {o + c: v for c, v in r.items()}

    def _xlact(self, i, k, g, n, b):
        T = self.X.total(i, k)
        l, q, x = T.locate[(n, b)]
        r = self.X.levels[l].module.lact(i, k, g, q, x)
        o = T.offset[(l, q)]
        return {o + c: v for c, v in r.items()}

    # maps as dictionaries -------------------------------------------------------------
    def unpack(self, i, j, n, vec, blocks=None):
        """``{(k, v_deg, v): {x: coeff}}`` for an unknown-space vector of degree n."""
        blocks = blocks or (self._levels[(i, j)]["blocks"], self._levels[(i, j)]["bidx"])
        out = {}
        for k, hb, off in blocks[0]:
            o0 = off.get(n, 0)
            for p in hb.blocks(n):
                base = o0 + hb.offset[(p, n)]
                dA = hb.C.dim(p)
                size = dA * hb.D.dim(p + n)
                for c, x in vec.items():
                    if base <= c < base + size:
                        b, a = divmod(c - base, dA)
                        out.setdefault((k, p, a), {})[b] = x
        return out

    def pack(self, i, j, n, fmap, blocks=None):
        blocks = blocks or (self._levels[(i, j)]["blocks"], self._levels[(i, j)]["bidx"])
        bidx = blocks[1]
        f = self.C.field
        vec = {}
        for (k, p, a), img in fmap.items():
            hb, off = bidx[k]
            base = off.get(n, 0) + hb.offset[(p, n)]
            dA = hb.C.dim(p)
            for b, x in img.items():
                _acc(vec, base + b * dA + a, x, f)
        return vec

    def extend(self, i, j, n, fmap, k, m, x):
        """``f~(x)`` for basis ``x`` of ``X(j, k)_m``; result in ``X(i, k)_{m+n}``."""
        f = self.C.field
        acc = {}
        for k2, w, qc, c, coeff in self.decompose(j, k, m, x):
            fw = fmap.get((k2, m - qc, w))
            if not fw:
                continue
            for y, fy in fw.items():
                r = self.xact(i, k2, k, m - qc + n, y, qc, c)
                if r:
                    kernels.axpy(acc, f.mul(coeff, fy), r, f.p)
        return acc

    def D_unknown(self, i, j, n, vec, blocks=None):
        """Differential on the unknown space (valid on equivariant maps)."""
        f = self.C.field
        fmap = self.unpack(i, j, n, vec, blocks)
        out = {}
        sgn = f.one if n % 2 else f.neg(f.one)  # -(-1)^n
        for (k, p, a), img in fmap.items():
            dX = self._TX[(i, k)].d(p + n)
            y = dX.apply(img) if img else {}
            if y:
                acc = out.setdefault((k, p, a), {})
                kernels.axpy(acc, f.one, y, f.p)
        # second term: for every v of V(j, k), -(-1)^n f~(D iota v)
        blocks_ = blocks or (self._levels[(i, j)]["blocks"], self._levels[(i, j)]["bidx"])
        for k, hb, off in blocks_[0]:
            A = hb.C
            for p in hb.blocks(n - 1):
                # v of degree p: f~(D iota v) has degree p - 1 + n
                for v in range(A.dim(p)):
                    acc = None
                    for (k2, w, qc, c), coeff in self._dx_iota(j, k, p, v):
                        fw = fmap.get((k2, p - 1 - qc, w))
                        if not fw:
                            continue
                        for y, fy in fw.items():
                            r = self.xact(i, k2, k, p - 1 - qc + n, y, qc, c)
                            if r:
                                if acc is None:
                                    acc = out.setdefault((k, p, v), {})
                                kernels.axpy(acc, f.mul(sgn, f.mul(coeff, fy)), r, f.p)
        out = {key: v for key, v in out.items() if v}
        return self.pack(i, j, n - 1, out, blocks)

    # basis access -------------------------------------------------------------------
    def basis_vector(self, i, j, n, t):
        return self._levels[(i, j)]["kern"][n][1][t]

    def basis_map(self, i, j, n, t):
        return self.unpack(i, j, n, self.basis_vector(i, j, n, t))

    def coords(self, i, j, n, vec):
        lev = self._levels.get((i, j))
        if lev is None or not vec:
            return {}
        pos = lev["free_pos"].get(n, {})
        out = {pos[c]: x for c, x in vec.items() if c in pos}
        if self.check:
            free, vecs = lev["kern"][n]
            rebuilt = {}
            for t, x in out.items():
                kernels.axpy(rebuilt, x, vecs[t], self.C.field.p)
            if rebuilt != vec:
                raise AssertionError("vector is not an equivariant map")
        return out

    def vector(self, i, j, n, coords):
        free, vecs = self._levels[(i, j)]["kern"][n]
        acc = {}
        for t, x in coords.items():
            kernels.axpy(acc, x, vecs[t], self.C.field.p)
        return acc

    # algebra structure ---------------------------------------------------------------
    def compose_maps(self, i, j, l, n1, fmap, n2, gmap):
        """``f o g`` for ``f`` in ``K(i, j)_{n1}``, ``g`` in ``K(j, l)_{n2}`` (as dicts)."""
        f = self.C.field
        out = {}
        for (k, p, a), img in gmap.items():
            acc = {}
            for x, gx in img.items():
                r = self.extend(i, j, n1, fmap, k, p + n2, x)
                if r:
                    kernels.axpy(acc, gx, r, f.p)
            if acc:
                out[(k, p, a)] = acc
        return out

    def mul(self, i, j, l, n1, a, n2, b):
        """Product of basis vectors, in coordinates of ``K(i, l)_{n1+n2}``."""
        key = ("mul", i, j, l, n1, a, n2, b)
        r = self._rc.get(key)
        if r is None:
            fm = self.basis_map(i, j, n1, a)
            gm = self.basis_map(j, l, n2, b)
            h = self.compose_maps(i, j, l, n1, fm, n2, gm)
            r = self.coords(i, l, n1 + n2, self.pack(i, l, n1 + n2, h))
            self._rc[key] = r
        return r

    def mul_vec(self, i, j, l, n1, x, n2, y):
        f = self.C.field
        acc = {}
        for a, xa in x.items():
            for b, yb in y.items():
                r = self.mul(i, j, l, n1, a, n2, b)
                if r:
                    kernels.axpy(acc, f.mul(xa, yb), r, f.p)
        return acc

    def unit_vector(self, s):
        """Identity of ``X(s, -)`` restricted to ``V``: the map ``iota``."""
        fmap = {}
        for k in self.C.window:
            A = self._TV.get((s, k))
            if A is None or A.is_zero():
                continue
            for p in A.degrees():
                for v in range(A.dim(p)):
                    r = self.iota(s, k, p, v)
                    if r:
                        fmap[(k, p, v)] = dict(r)
        return self.coords(s, s, 0, self.pack(s, s, 0, fmap))

    def evaluate(self, i, j, n, coords, k, m, x):
        """``f(x)`` for ``f`` in ``K(i, j)_n`` and ``x`` in ``X(j, k)_m`` (a vector)."""
        f = self.C.field
        fmap = self.unpack(i, j, n, self.vector(i, j, n, coords))
        acc = {}
        for b, xb in x.items():
            r = self.extend(i, j, n, fmap, k, m, b)
            if r:
                kernels.axpy(acc, xb, r, f.p)
        return acc

    # R-bimodule structure -------------------------------------------------------------
    def _lact(self, i, j, g, n, a):
        # (g.f)(v) = g . f(v)
        f = self.C.field
        fmap = self.basis_map(i, j, n, a)
        out = {}
        for key, img in fmap.items():
            k = key[0]
            acc = {}
            for b, x in img.items():
                r = self._xlact(i, k, g, key[1] + n, b)
                if r:
                    kernels.axpy(acc, x, r, f.p)
            if acc:
                out[key] = acc
        return self.coords(i, j, n, self.pack(i, j, n, out))

    def _ract(self, i, j, n, a, g):
        # (f.g)(v) = f(g.v)
        f = self.C.field
        fmap = self.basis_map(i, j, n, a)
        out = {}
        for k in self.C.window:
            A = self._TV.get((j, k))
            if A is None or A.is_zero():
                continue
            for p in A.degrees():
                for v in range(A.dim(p)):
                    gv = self._vlact(j, k, g, p, v)
                    acc = {}
                    for v2, y in gv.items():
                        img = fmap.get((k, p, v2))
                        if img:
                            kernels.axpy(acc, y, img, f.p)
                    if acc:
                        out[(k, p, v)] = acc
        return self.coords(i, j, n, self.pack(i, j, n, out))

    def _vlact(self, j, k, g, p, a):
        T = self.V.total(j, k)
        l, q, x = T.locate[(p, a)]
        r = self.V.levels[l].module.lact(j, k, g, q, x)
        o = T.offset[(l, q)]
        return {o + b: v for b, v in r.items()}

    def validate_dg(self, limit=None) -> Verdict:
        """d^2 = 0, Leibniz, associativity and units on basis elements.

        ``limit`` caps the number of basis triples tried for associativity.
        """
        from .complexes import validate
        v = Verdict(f"dg-algebra {self.name}")
        f = self.C.field
        w = self.C.window
        for ij, L in sorted(self.carrier.levels.items()):
            v.merge(validate(L), prefix=f"level {ij} ")

        def basis(i, j):
            L = self(i, j)
            return [(n, a) for n in L.degrees() for a in range(L.dim(n))]

        # units
        for i in w:
            u = self.unit_vector(i)
            for j in w:
                for n, a in basis(i, j):
                    e = {a: f.one}
                    if self.mul_vec(i, i, j, 0, u, n, e) != e:
                        v.fail(f"left unit at ({i},{j})", f"basis {n}:{a}")
                for n, a in basis(j, i):
                    if self.mul_vec(j, i, i, n, {a: f.one}, 0, u) != {a: f.one}:
                        v.fail(f"right unit at ({j},{i})", f"basis {n}:{a}")
        # Leibniz: D(xy) = Dx y + (-1)^|x| x Dy
        for i in w:
            for j in w:
                for l in w:
                    for n1, a in basis(i, j):
                        for n2, b in basis(j, l):
                            prod = self.mul(i, j, l, n1, a, n2, b)
                            lhs = self(i, l).d(n1 + n2).apply(prod) if prod else {}
                            rhs = self.mul_vec(i, j, l, n1 - 1, self(i, j).d(n1).column(a), n2, {b: f.one})
                            t = self.mul_vec(i, j, l, n1, {a: f.one}, n2 - 1, self(j, l).d(n2).column(b))
                            kernels.axpy(rhs, f.one if n1 % 2 == 0 else f.neg(f.one), t, f.p)
                            if lhs != rhs:
                                v.fail(f"Leibniz at ({i},{j},{l})", f"basis {n1}:{a}, {n2}:{b}")
        # associativity
        count = 0
        for i in w:
            for j in w:
                for k in w:
                    for l in w:
                        for n1, a in basis(i, j):
                            for n2, b in basis(j, k):
                                ab = self.mul(i, j, k, n1, a, n2, b)
                                for n3, c in basis(k, l):
                                    bc = self.mul(j, k, l, n2, b, n3, c)
                                    lhs = self.mul_vec(i, k, l, n1 + n2, ab, n3, {c: f.one})
                                    rhs = self.mul_vec(i, j, l, n1, {a: f.one}, n2 + n3, bc)
                                    if lhs != rhs:
                                        v.fail(f"associativity at ({i},{j},{k},{l})",
                                               f"basis {n1}:{a}, {n2}:{b}, {n3}:{c}")
                                    count += 1
                                    if limit and count >= limit:
                                        return v
        return v


def koszul_dual(C: Algebra, check=False) -> KoszulDual:
    return KoszulDual(C, check=check)


# dual-of-bar model -----------------------------------------------------------------

def dual_bar_model(C: Algebra) -> HomOver:
    """``hom_R(B(R, C, R), R)`` on the right."""
    V = BarObject(C, "R", "R")
    TV = TotalBimodule(V)
    return HomOver("right", C.base, TV, regular_bimodule(C.base))


def compare_map(K: KoszulDual, D: HomOver, i, j) -> ChainMap:
    """``f -> aug o f`` restricted to ``V``, from ``K(i, j)`` to the model."""
    C = K.C
    f = C.field
    src = K(i, j)
    tgt = D(i, j)
    comps = {}
    TXii = K.X.total(i, i)
    for n in src.degrees():
        cols = {}
        if tgt.dim(n):
            blocks = {k: (hb, off) for k, hb, off in D._levels[(i, j)][1]}
            hb, off = blocks.get(i, (None, None))
            for t in range(src.dim(n)):
                fmap = K.basis_map(i, j, n, t)
                amb = {}
                if hb is not None:
                    for (k, p, a), img in fmap.items():
                        if k != i or (p, n) not in hb.offset:
                            continue
                        base = off.get(n, 0) + hb.offset[(p, n)]
                        dA = hb.C.dim(p)
                        o0 = TXii.offset.get((0, p + n))
                        if o0 is None:
                            continue
                        for x, y in img.items():
                            if o0 <= x < o0 + C(i, i).dim(p + n):
                                for r, e in C.aug(i, i, p + n, x - o0).items():
                                    _acc(amb, base + r * dA + a, f.mul(y, e), f)
                if amb:
                    cols[t] = D.coords(i, j, n, amb)
        comps[n] = SparseMatrix(tgt.dim(n), src.dim(n), f, {t: c for t, c in cols.items() if c})
    return ChainMap(src, tgt, comps)


def compare_models(C: Algebra, K: KoszulDual = None, D: HomOver = None) -> Verdict:
    K = K or koszul_dual(C)
    D = D or dual_bar_model(C)
    v = Verdict(f"compare models for {C.name}")
    for ij in C.window.pairs():
        m = compare_map(K, D, *ij)
        if not m.is_chain_map():
            v.fail(f"level {ij}", "comparison is not a chain map")
            continue
        bad = quasi_iso_failures(m)
        if bad:
            v.fail(f"level {ij}", f"cone homology {bad}")
    return v


# square-zero extensions ---------------------------------------------------------------

class SquareZeroPhi:
    """The algebra map ``F(hom_R(shift(M, 1), R)) -> K(R v M)``.

    A generator ``alpha`` evaluates the first letter of a bar word and acts
    on what is left: ``phi(alpha)[m1|...|ml] = alpha(s m1) . [m2|...|ml]``.
    A word ``alpha_1 ... alpha_n`` evaluates letters one at a time, starting
    with ``alpha_n`` on ``m1``.  Multiplicativity against the composition in
    ``K`` is then a genuine check: the two sides are computed independently.
    """

    def __init__(self, C: Algebra, K: KoszulDual = None):
        from .algebra import ShiftBimodule, free_algebra
        M = getattr(C, "summand", None)
        if M is None:
            raise ValueError("phi needs a square-zero extension")
        self.C, self.M = C, M
        self.K = K or koszul_dual(C)
        R = C.base
        self.D = HomOver("right", R, ShiftBimodule(M, 1), regular_bimodule(R))
        self.F = free_algebra(R, self.D, name=f"F(D(sM))")
        self._maps = {}

    def _generator_value(self, i, j, n, a, m_deg, m):
        """``alpha(s m)`` for basis ``alpha`` of ``D(i, j)_n`` and basis ``m`` of
        ``M(j, i)_{m_deg}``; a vector in ``R(i, i)_0``."""
        blocks = self.D.as_map(i, j, n, a)
        ent = blocks.get((i, m_deg + 1), {})
        return {b: x for (b, a2), x in ent.items() if a2 == m}

    def _letter(self, s, e, d, x):
        """``C-bar`` letter -> ``M`` basis index."""
        C = self.C
        col = C.reduced().free[(s, e)][d][x]
        return col - C.base(s, e).dim(d)

    def image(self, i, j, n, a):
        """``phi`` of basis ``a`` of ``F(i, j)_n`` as a vector of ``K(i, j)_n``."""
        key = (i, j, n, a)
        r = self._maps.get(key)
        if r is not None:
            return r
        F, K, C = self.F, self.K, self.C
        f = C.field
        t, x = F.sum.locate(i, j, n, a)
        if t == 0:
            # weight zero: r in R(i, i) acts by left multiplication
            r = self._scalar(i, j, n, x)
            self._maps[key] = r
            return r
        path, alphas = F.powers[t].factors(i, j, n, x)
        fmap = {}
        V = K.V
        for k in C.window:
            TV = K._TV.get((j, k))
            if TV is None or TV.is_zero():
                continue
            for p in TV.degrees():
                for v in range(TV.dim(p)):
                    l, q, b = V.total(j, k).locate[(p, v)]
                    if l < t:
                        continue
                    wpath, letters = V.levels[l].factors(j, k, q, b)
                    coeff = self._evaluate(path, alphas, wpath, letters)
                    if coeff is None:
                        continue
                    scalar, rest_path, rest = coeff
                    img = self._rest_image(i, k, rest_path, rest, scalar)
                    if img:
                        fmap[(k, p, v)] = img
        vec = K.pack(i, j, n, fmap)
        r = K.coords(i, j, n, vec)
        if K.vector(i, j, n, r) != vec:
            raise AssertionError("phi(word) is not an equivariant map")
        self._maps[key] = r
        return r

    def _evaluate(self, path, alphas, wpath, letters):
        """Evaluate ``alpha_n`` on ``m1``, then ``alpha_{n-1}`` on ``m2`` ...

        Returns ``(r, remaining path, remaining letters)`` with ``r`` a vector
        of ``R`` at the first object of the remaining path, or ``None``."""
        R = self.C.base
        f = self.C.field
        n = len(alphas)
        cur = None  # vector in R(obj, obj) acting on the left of the rest
        for step in range(n):
            t = n - 1 - step
            ai, aj = path[t], path[t + 1]
            s, e = wpath[step], wpath[step + 1]
            if s != aj or e != ai:
                return None
            d, x = letters[step]
            m = self._letter(s, e, d, x)
            adeg, aidx = alphas[t]
            val = self._generator_value(ai, aj, adeg, aidx, d, m)
            # bar words carry their level on the left: [m1|...|ml] is
            # (-1)^(|m1|(l-1)) times s m1 followed by [m2|...|ml]
            if (d * (len(letters) - step - 1)) % 2:
                val = {b: f.neg(z) for b, z in val.items()}
            if cur is not None:
                # cur (in R(s, s)) acts on the letter first: alpha(s (cur . m))
                val = {}
                Mb = self.M
                for g, cg in cur.items():
                    gm = Mb.lact(s, e, g, d, m)
                    for m2, y in gm.items():
                        for b, z in self._generator_value(ai, aj, adeg, aidx, d, m2).items():
                            if (d * (len(letters) - step - 1)) % 2:
                                z = f.neg(z)
                            val[b] = f.add(val.get(b, f.zero), f.mul(f.mul(cg, y), z))
                val = {b: z for b, z in val.items() if z}
            if not val:
                return None
            cur = val
        return cur, wpath[n:], letters[n:]

    def _rest_image(self, i, k, rest_path, rest, scalar):
        """``scalar . iota([rest])`` in ``X(i, k)`` (total coordinates)."""
        K, C = self.K, self.C
        f = C.field
        one = f.one
        V, X = K.V, K.X
        l = len(rest)
        s = rest_path[0]
        if s != i:
            return {}
        if l == 0:
            # iota(r) = eta(r) in X_0 = C(i, i)
            res = {}
            for g, x in scalar.items():
                kernels.axpy(res, x, C.eta(i, g), f.p)
            T = X.total(i, k)
            o = T.offset.get((0, 0))
            return {o + b: y for b, y in res.items()} if res else {}
        vecs = [(d, {z: one}) for d, z in rest]
        # left action of the scalar on the first letter
        Cb = C.reduced()
        d0, z0 = rest[0]
        first = {}
        for g, x in scalar.items():
            kernels.axpy(first, x, Cb.lact(i, rest_path[1], g, d0, z0), f.p)
        if not first:
            return {}
        vecs[0] = (d0, first)
        deg = sum(d for d, _ in rest)
        wv = V.levels[l].project(rest_path, vecs) if l > 1 else first
        # iota on each basis word of the result
        out = {}
        TV = V.total(i, k)
        for b, y in wv.items():
            r = K.iota(i, k, l + deg, TV.index(l, deg, b))
            if r:
                kernels.axpy(out, y, r, f.p)
        return out

    def _scalar(self, i, j, n, x):
        K = self.K
        if i != j:
            return {}
        u = K.unit_vector(i)
        return K.lact_vec(i, i, x, 0, u) if u else {}

    def level_map(self, i, j) -> ChainMap:
        src, tgt = self.F(i, j), self.K(i, j)
        comps = {}
        for n in src.degrees():
            cols = {}
            for a in range(src.dim(n)):
                r = self.image(i, j, n, a)
                if r:
                    cols[a] = r
            comps[n] = SparseMatrix(tgt.dim(n), src.dim(n), self.C.field, cols)
        return ChainMap(src, tgt, comps)

    def check(self) -> Verdict:
        v = Verdict(f"phi: F(D(sM)) -> K({self.C.name})")
        for ij in self.C.window.pairs():
            m = self.level_map(*ij)
            if not m.is_chain_map():
                v.fail(f"level {ij}", "phi is not a chain map")
                continue
            bad = quasi_iso_failures(m)
            if bad:
                v.fail(f"level {ij}", f"not a quasi-isomorphism, cone homology {bad}")
        v.merge(self.check_multiplicative())
        return v

    def check_multiplicative(self) -> Verdict:
        """``phi(x y) = phi(x) o phi(y)`` for all composable basis pairs."""
        v = Verdict("phi multiplicative")
        F, K = self.F, self.K
        w = self.C.window
        count = 0
        for i in w:
            for k in w:
                A = F(i, k)
                for j in w:
                    B = F(k, j)
                    if A.is_zero() or B.is_zero():
                        continue
                    for p in A.degrees():
                        for a in range(A.dim(p)):
                            pa = self.image(i, k, p, a)
                            for q in B.degrees():
                                for b in range(B.dim(q)):
                                    prod = F.mul(i, k, j, p, a, q, b)
                                    lhs = {}
                                    for c, x in prod.items():
                                        kernels.axpy(lhs, x, self.image(i, j, p + q, c), F.field.p)
                                    rhs = K.mul_vec(i, k, j, p, pa, q, self.image(k, j, q, b))
                                    count += 1
                                    if lhs != rhs:
                                        v.fail(f"({i},{k},{j})", f"basis {p}:{a} * {q}:{b}")
                                        return v
        v.details["pairs"] = count
        return v


# convolution on the dual-of-bar model ------------------------------------------------------

class BarConvolution:
    """Deconcatenation product on ``hom_R(B(R, C, R), R)``.

    For ``xi`` in ``D(i, j)`` and ``zeta`` in ``D(j, l)`` and a bar word
    ``w`` from ``l`` to ``i``, ``(xi * zeta)(w)`` sums over the ways of
    cutting ``w`` at object ``j`` into ``w1 | w2``: ``zeta`` eats ``w1``
    and ``xi`` eats ``zeta(w1) . w2``.  Moving the level symbol of ``w2``
    past ``w1`` costs ``(-1)^(l2 |w1|_int)``.

    This product is an empirical construction: it is compared with the
    composition in ``K(C)`` only after passing to homology.
    """

    def __init__(self, C: Algebra, D: HomOver = None):
        self.C = C
        self.D = D or dual_bar_model(C)
        self.TV = self.D.M
        self.V = self.TV.B
        self._ev = {}

    def evaluate(self, i, j, n, x, w_deg, w):
        """``xi(w)`` for ``xi`` (coords) in ``D(i, j)_n`` and ``w`` a vector of
        ``V(j, i)_{w_deg}``; a vector of ``R(i, i)``."""
        D = self.D
        f = self.C.field
        out = {}
        for t, xt in x.items():
            key = (i, j, n, t)
            m = self._ev.get(key)
            if m is None:
                m = D.as_map(i, j, n, t)
                self._ev[key] = m
            ent = m.get((i, w_deg))
            if not ent:
                continue
            for (b, a), y in ent.items():
                wa = w.get(a)
                if wa:
                    _acc(out, b, f.mul(f.mul(xt, y), wa), f)
        return out

    def _word(self, path, letters):
        """Total-coordinate vector of ``[letters]`` along ``path``; the empty
        word is the unit of ``R`` at ``path[0]``."""
        V = self.V
        R = self.C.base
        one = self.C.field.one
        s = len(letters)
        a, b = path[0], path[-1]
        T = V.total(a, b)
        if s == 0:
            o = T.offset.get((0, 0))
            return 0, {o + r: y for r, y in R.unit[a].items()}
        q = sum(d for d, _ in letters)
        vec = V.levels[s].project(path, [(d, {z: one}) for d, z in letters])
        o = T.offset.get((s, q))
        if o is None:
            return s + q, {}
        return s + q, {o + r: y for r, y in vec.items()}

    def product(self, i, j, l, n1, x, n2, y):
        """``x * y`` for ``x`` in ``D(i, j)_{n1}`` and ``y`` in ``D(j, l)_{n2}``."""
        D, V, TV = self.D, self.V, self.TV
        f = self.C.field
        n = n1 + n2
        tgt = D(i, l)
        if not tgt.dim(n):
            return {}
        blocks = {k: (hb, off) for k, hb, off in D._levels[(i, l)][1]}
        hb, off = blocks.get(i, (None, None))
        if hb is None:
            return {}
        T = V.total(l, i)
        amb = {}
        for p in hb.blocks(n):
            base = off.get(n, 0) + hb.offset[(p, n)]
            dA = hb.C.dim(p)
            for a in range(T.complex.dim(p)):
                lev, q, a0 = T.locate[(p, a)]
                if lev == 0:
                    path, letters = (l, i), ()
                    wfull = {a: f.one}
                    splits = [(0, None)]
                else:
                    path, letters = V.levels[lev].factors(l, i, q, a0)
                    splits = range(lev + 1)
                val = {}
                for s in splits:
                    if lev == 0:
                        d1, w1 = self._word((l, l), ())
                        d2, w2 = p, wfull
                        jj = l
                        sign = 0
                    else:
                        jj = path[s]
                        d1, w1 = self._word(path[:s + 1], letters[:s])
                        d2, w2 = self._word(path[s:], letters[s:])
                        int1 = sum(d for d, _ in letters[:s])
                        sign = (lev - s) * int1
                    if jj != j or not w1 or not w2:
                        continue
                    r = self.evaluate(j, l, n2, y, d1, w1)
                    if not r:
                        continue
                    rw = TV.lact_elem(j, i, r, d2, w2)
                    if not rw:
                        continue
                    z = self.evaluate(i, j, n1, x, d2, rw)
                    if sign % 2:
                        z = {b: f.neg(c) for b, c in z.items()}
                    for b, c in z.items():
                        _acc(val, b, c, f)
                for b, c in val.items():
                    _acc(amb, base + b * dA + a, c, f)
        if not amb:
            return {}
        return D.coords(i, l, n, amb)


def convolution_homology_check(C: Algebra, K: KoszulDual = None, conv: BarConvolution = None,
                               limit=None) -> Verdict:
    """``psi(f o g)`` and ``psi(f) * psi(g)`` agree in homology, where ``psi``
    is the comparison map, over pairs of homology representatives."""
    from .complexes import HomologyDegree
    K = K or koszul_dual(C)
    conv = conv or BarConvolution(C)
    D = conv.D
    f = C.field
    v = Verdict(f"convolution vs composition for {C.name}")
    w = C.window
    psi = {ij: compare_map(K, D, *ij) for ij in w.pairs()}
    hom = {}

    def H(ij, n):
        key = (ij, n)
        if key not in hom:
            hom[key] = HomologyDegree(D(*ij), n)
        return hom[key]

    reps = {}
    for ij in w.pairs():
        for n in K(*ij).degrees():
            hd = HomologyDegree(K(*ij), n)
            if hd.dim:
                reps[(ij, n)] = hd.reps
    count = 0
    for ((i, j), n1), xs in sorted(reps.items()):
        for ((j2, l), n2), ys in sorted(reps.items()):
            if j2 != j:
                continue
            for x in xs:
                for y in ys:
                    lhs = psi[(i, l)][n1 + n2].apply(K.mul_vec(i, j, l, n1, x, n2, y))
                    px = psi[(i, j)][n1].apply(x)
                    py = psi[(j, l)][n2].apply(y)
                    rhs = conv.product(i, j, l, n1, px, n2, py)
                    diff = dict(lhs)
                    kernels.axpy(diff, f.neg(f.one), rhs, f.p)
                    count += 1
                    if diff and H((i, l), n1 + n2).classify(diff):
                        v.fail(f"({i},{j},{l}) degrees {n1},{n2}", "products differ in homology")
                    if limit and count >= limit:
                        v.details["pairs"] = count
                        return v
    v.details["pairs"] = count
    return v


def equalizer_dual(C: Algebra, i, j, K: KoszulDual = None) -> ChainComplex:
    """``K(C)(i, j)`` straight from the definition: all maps
    ``X(j, -) -> X(i, -)`` commuting with the right ``C``-action, cut out of
    the full hom complex by linear equations.  Slow; for cross-checks."""
    from .complexes import subcomplex
    from .graphs import hom_basis_offsets, hom_level
    K = K or koszul_dual(C)
    f = C.field
    X = K.X.total_graph()
    amb = hom_level("right", X, X, i, j)
    if amb.is_zero():
        return amb
    blocks = {k: (hb, off) for k, hb, off in hom_basis_offsets("right", X, X, i, j)}
    cons = {n: [] for n in amb.degrees()}
    for n in amb.degrees():
        rows = cons[n]
        for k in C.window:
            # k ranges over the whole window: when X(i, k) = 0 the constraint
            # still forces f_{k2}(x . c) = 0
            hb, off = blocks.get(k, (None, None))
            A = X(j, k)
            for p in A.degrees():
                for x in range(A.dim(p)):
                    for k2 in C.window:
                        Ck = C(k, k2)
                        if Ck.is_zero():
                            continue
                        hb2, off2 = blocks.get(k2, (None, None))
                        for q in Ck.degrees():
                            for c in range(Ck.dim(q)):
                                acc = {}
                                # f_{k2}(x . c)
                                xc = right_action(K.X, j, k, k2, p, x, q, c)
                                if xc and hb2 is not None and (p + q, n) in hb2.offset:
                                    base = off2.get(n, 0) + hb2.offset[(p + q, n)]
                                    dA = hb2.C.dim(p + q)
                                    for a2, y in xc.items():
                                        for b in range(hb2.D.dim(p + q + n)):
                                            acc.setdefault(b, {})[base + b * dA + a2] = y
                                # - f_k(x) . c
                                if hb is not None and (p, n) in hb.offset:
                                    base = off.get(n, 0) + hb.offset[(p, n)]
                                    dA = hb.C.dim(p)
                                    for b in range(hb.D.dim(p + n)):
                                        bc = right_action(K.X, i, k, k2, p + n, b, q, c)
                                        for b2, y in bc.items():
                                            row = acc.setdefault(b2, {})
                                            col = base + b * dA + x
                                            row[col] = f.add(row.get(col, f.zero), f.neg(y))
                                for row in acc.values():
                                    row = {cc: y for cc, y in row.items() if y}
                                    if row:
                                        rows.append(row)
    basis = {n: kernel_of_rows(cons[n], amb.dim(n), f)[1] for n in amb.degrees()}
    sub, _ = subcomplex(amb, basis)
    return sub


def equalizer_cross_check(C: Algebra, K: KoszulDual = None) -> Verdict:
    """Graded and homology dimensions of ``K(C)`` against :func:`equalizer_dual`."""
    from .complexes import homology_dims
    K = K or koszul_dual(C)
    v = Verdict(f"equalizer cross-check for {C.name}")
    for ij in C.window.pairs():
        E = equalizer_dual(C, *ij, K=K)
        a = {n: d for n, d in E.dims.items() if d}
        b = {n: d for n, d in K(*ij).dims.items() if d}
        if a != b:
            v.fail(f"level {ij}", f"dimensions {a} vs {b}")
        elif homology_dims(E) != homology_dims(K(*ij)):
            v.fail(f"level {ij}", "homology differs")
    return v
