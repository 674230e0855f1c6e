"""Symmetric sequences, operads and the prop construction.

A symmetric sequence stores a complex ``X(n)`` per arity and the action of
the adjacent transpositions.  ``rho(s)`` relabels inputs, input ``t``
becoming input ``s(t)``, so ``rho(t o s) = rho(t) rho(s)``.  Read as a right
``kSigma``-module in the diagrammatic convention this is ``x . s = rho(s) x``.

``prop X(m, n)`` is spanned by a function ``f: m -> n`` (lex order) and a
tensor ``x_0 (x) ... (x) x_{n-1}`` with ``x_y`` in ``X(|f^{-1}(y)|)``.  The
inputs of ``x_y`` are the points of the fibre in increasing order.  Basis
vectors of a degree are ordered by ``(f, degrees, indices)``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

from . import perms as P
from .algebra import Algebra, Bimodule, CircOver, DgCategory, validate_algebra, validate_module
from .complexes import ChainComplex, ChainMap, dual, unit_complex, zero_complex
from .examples import ksigma
from .field import QQ
from .graphs import Graph, ObjectWindow
from .sparse import SparseMatrix
from .verdict import Verdict


def _sgn(f, e):
    return f.one if e % 2 == 0 else f.neg(f.one)


def _acc(acc, k, c, f):
    v = f.add(acc.get(k, f.zero), c)
    if v:
        acc[k] = v
    else:
        acc.pop(k, None)


def check_characteristic(field, cap):
    if field.p and field.p <= cap:
        raise ValueError(f"characteristic {field.p} too small for arity cap {cap}; "
                         "coinvariants need char 0 or p > cap")


@lru_cache(maxsize=None)
def perm_word(s):
    """Adjacent transpositions ``[t1, ..., tr]`` with ``s = s_t1 o ... o s_tr``."""
    s = tuple(s)
    for t in range(len(s) - 1):
        if s[t] > s[t + 1]:
            return perm_word(P.compose(s, P.transposition(len(s), t))) + (t,)
    return ()


def koszul_perm_sign(degs, new_pos):
    """Parity of moving graded factors ``degs`` to positions ``new_pos``."""
    e = 0
    n = len(degs)
    for a in range(n):
        if degs[a] % 2 == 0:
            continue
        for b in range(a + 1, n):
            if degs[b] % 2 and new_pos[a] > new_pos[b]:
                e += 1
    return e


# symmetric sequences ---------------------------------------------------------------

class SymSeq:
    """``arities[n]`` a complex, ``actions[n][t]`` the chain map of ``s_t``
    (missing entries act trivially)."""

    def __init__(self, arities, actions=None, field=QQ, name="X", cap=None):
        self.field = field
        self.arities = {n: C for n, C in arities.items() if not C.is_zero()}
        self.actions = dict(actions or {})
        self.name = name
        self.cap = cap if cap is not None else max(self.arities, default=0)
        if any(n > self.cap for n in self.arities):
            raise ValueError("arity above cap")
        self._ac = {}

    def __call__(self, n) -> ChainComplex:
        C = self.arities.get(n)
        return C if C is not None else zero_complex(self.field)

    def gen(self, n, t) -> ChainMap:
        acts = self.actions.get(n)
        if acts is None:
            return ChainMap.identity(self(n))
        return acts[t]

    def act(self, n, s, deg, vec):
        """``rho(s) vec`` for ``vec`` in degree ``deg`` of ``X(n)``."""
        for t in reversed(perm_word(tuple(s))):
            if not vec:
                break
            if n in self.actions:
                vec = self.actions[n][t][deg].apply(vec)
        return vec

    def act_basis(self, n, s, deg, a):
        key = (n, tuple(s), deg, a)
        r = self._ac.get(key)
        if r is None:
            r = self.act(n, s, deg, {a: self.field.one})
            self._ac[key] = r
        return r

    @property
    def reduced(self):
        return self(0).is_zero() and self(1).dims == {0: 1}

    def dims(self):
        return {n: dict(C.dims) for n, C in sorted(self.arities.items())}

    def validate(self) -> Verdict:
        """Coxeter relations and chain-map property of the stored generators."""
        v = Verdict(f"symmetric sequence {self.name}")
        for n, C in sorted(self.arities.items()):
            acts = self.actions.get(n)
            if acts is None:
                continue
            if len(acts) != max(n - 1, 0):
                v.fail(f"arity {n}", f"expected {n - 1} generators, got {len(acts)}")
                continue
            idm = ChainMap.identity(C)
            for t, g in enumerate(acts):
                if not g.is_chain_map():
                    v.fail(f"arity {n} s_{t}", "not a chain map")
                if not _mat_eq(g.compose(g), idm):
                    v.fail(f"arity {n} s_{t}", "s^2 != 1")
            for t in range(n - 1):
                for u in range(t + 1, n - 1):
                    a, b = acts[t], acts[u]
                    if u == t + 1:
                        ab = a.compose(b)
                        if not _mat_eq(ab.compose(ab).compose(ab), idm):
                            v.fail(f"arity {n} s_{t} s_{u}", "braid relation fails")
                    elif not _mat_eq(a.compose(b), b.compose(a)):
                        v.fail(f"arity {n} s_{t} s_{u}", "far generators do not commute")
        return v

    def __repr__(self):
        return f"SymSeq({self.name}, {self.dims()})"


def _mat_eq(a: ChainMap, b: ChainMap):
    for n in set(a.source.dims) | set(b.source.dims):
        if a[n] != b[n]:
            return False
    return True


def unit_seq(field=QQ, cap=1) -> SymSeq:
    return SymSeq({1: unit_complex(field)}, field=field, name="1", cap=cap)


def trivial_seq(dims, field=QQ, name="X", cap=None) -> SymSeq:
    """``{arity: {degree: dim}}`` with zero differential and trivial action."""
    return SymSeq({n: ChainComplex(d, {}, field) for n, d in dims.items()}, field=field,
                  name=name, cap=cap)


def sign_seq(dims, field=QQ, name="X", cap=None) -> SymSeq:
    """Like :func:`trivial_seq` but each transposition acts by ``-1``."""
    arities = {n: ChainComplex(d, {}, field) for n, d in dims.items()}
    acts = {}
    for n, C in arities.items():
        m = ChainMap(C, C, {k: SparseMatrix.identity(C.dim(k), field).scale(field.neg(field.one))
                            for k in C.degrees()})
        acts[n] = [m] * (n - 1)
    return SymSeq(arities, acts, field, name, cap)


def regular_seq(arities, field=QQ, name="reg", cap=None, degree=0) -> SymSeq:
    """``X(n) = kSigma_n`` in the given degree, ``rho(s) e_t = e_{s o t}``."""
    ar, acts = {}, {}
    for n in arities:
        C = ChainComplex({degree: len(P.perms(n))}, {}, field)
        ar[n] = C
        idx = P.perm_index(n)
        gens = []
        for t in range(n - 1):
            s = P.transposition(n, t)
            cols = {a: {idx[P.compose(s, u)]: field.one} for a, u in enumerate(P.perms(n))}
            gens.append(ChainMap(C, C, {degree: SparseMatrix(C.dim(degree), C.dim(degree), field, cols)}))
        acts[n] = gens
    return SymSeq(ar, acts, field, name, cap)


def dual_seq(X: SymSeq) -> SymSeq:
    """Arity-wise linear dual.  ``s_t`` is an involution, so its dual action
    is the transpose."""
    f = X.field
    arities = {n: dual(C) for n, C in X.arities.items()}
    acts = {}
    for n, lst in X.actions.items():
        if n not in X.arities:
            continue
        D = arities[n]
        acts[n] = [ChainMap(D, D, {-k: m[k].T for k in X(n).degrees()}) for m in lst]
    return SymSeq(arities, acts, f, f"{X.name}^v", X.cap)


def with_cap(X: SymSeq, cap) -> SymSeq:
    """``X`` truncated (or padded) to arity cap ``cap``."""
    ar = {n: C for n, C in X.arities.items() if n <= cap}
    acts = {n: a for n, a in X.actions.items() if n <= cap}
    return SymSeq(ar, acts, X.field, X.name, cap)


# operads ---------------------------------------------------------------------------

class Operad:
    """A reduced operad.  ``gamma(outer, inners)`` takes basis triples
    ``(arity, degree, index)`` and returns the composite as a sparse vector;
    the inputs of the result are the inputs of ``inners[0]``, then of
    ``inners[1]``, and so on."""

    def __init__(self, seq: SymSeq, gamma, name="P"):
        if not seq.reduced:
            raise ValueError("operads here are reduced: P(0) = 0 and P(1) = k")
        self.seq = seq
        self._gamma = gamma
        self.name = name
        self._gc = {}

    @property
    def field(self):
        return self.seq.field

    @property
    def cap(self):
        return self.seq.cap

    def gamma(self, outer, inners):
        key = (outer, tuple(inners))
        r = self._gc.get(key)
        if r is None:
            if sum(r_ for r_, _, _ in inners) > self.cap:
                r = {}
            else:
                r = self._gamma(outer, tuple(inners))
            self._gc[key] = r
        return r

    def __repr__(self):
        return f"Operad({self.name}, cap={self.cap})"


UNIT = (1, 0, 0)


def unit_operad(field=QQ, cap=3) -> Operad:
    def gamma(outer, inners):
        return {0: field.one}

    return Operad(unit_seq(field, cap), gamma, "1")


def square_zero_operad(gens: SymSeq, name=None) -> Operad:
    """``1 (+) gens`` with every composite of two generators zero."""
    f = gens.field
    ar = dict(gens.arities)
    ar[1] = unit_complex(f)
    seq = SymSeq(ar, gens.actions, f, gens.name, gens.cap)

    def gamma(outer, inners):
        if outer == UNIT:
            (r, d, a), = inners
            return {a: f.one}
        if all(x == UNIT for x in inners):
            return {outer[2]: f.one}
        return {}

    return Operad(seq, gamma, name or f"1+{gens.name}")


def binary_operad(degree=0, sign=False, field=QQ, cap=3) -> Operad:
    """One generator in arity 2, square-zero: the truncated binary operad."""
    mk = sign_seq if sign else trivial_seq
    return square_zero_operad(mk({2: {degree: 1}}, field, "mu", cap),
                              name=f"bin{degree}{'-' if sign else ''}")


def truncated_com(top, field=QQ, cap=None) -> Operad:
    """``Com`` with arities above ``top`` set to zero."""
    cap = cap if cap is not None else top
    seq = trivial_seq({n: {0: 1} for n in range(1, top + 1)}, field, "Com", cap)

    def gamma(outer, inners):
        return {0: field.one} if sum(r for r, _, _ in inners) <= top else {}

    return Operad(seq, gamma, f"Com<={top}")


def validate_operad(Op: Operad, limit=None) -> Verdict:
    """Unit laws and associativity on basis elements; equivariance is tested
    through the prop (see :func:`validate_prop`)."""
    v = Verdict(f"operad {Op.name}")
    v.merge(Op.seq.validate())
    f = Op.field
    X = Op.seq
    basis = [(n, d, a) for n in sorted(X.arities) for d in X(n).degrees() for a in range(X(n).dim(d))]
    for x in basis:
        if Op.gamma(UNIT, (x,)) != {x[2]: f.one}:
            v.fail(f"unit {x}", "gamma(1; x) != x")
        if Op.gamma(x, (UNIT,) * x[0]) != {x[2]: f.one}:
            v.fail(f"unit {x}", "gamma(x; 1, ..., 1) != x")
    count = 0
    for z in basis:
        s = z[0]
        for ys in product(basis, repeat=s):
            rs = [y[0] for y in ys]
            if sum(rs) > Op.cap:
                continue
            for xs in product(basis, repeat=sum(rs)):
                if sum(x[0] for x in xs) > Op.cap:
                    continue
                count += 1
                if limit and count > limit:
                    return v
                if _assoc_defect(Op, z, ys, xs):
                    v.fail(f"assoc {z} {ys} {xs}", "gamma is not associative")
    return v


def _assoc_defect(Op, z, ys, xs):
    f = Op.field
    # left: gamma(gamma(z; ys); xs)
    lhs = {}
    dzy = z[1] + sum(y[1] for y in ys)
    rz = sum(y[0] for y in ys)
    for c, val in Op.gamma(z, ys).items():
        for b, w in Op.gamma((rz, dzy, c), xs).items():
            _acc(lhs, b, f.mul(val, w), f)
    # right: gamma(z; gamma(y1; group1), ...) with the Koszul sign of moving
    # each group of xs left past the later ys
    groups, o = [], 0
    for y in ys:
        groups.append(xs[o:o + y[0]])
        o += y[0]
    e = 0
    for t, g in enumerate(groups):
        dg = sum(x[1] for x in g)
        e += dg * sum(y[1] for y in ys[t + 1:])
    parts = []
    for y, g in zip(ys, groups):
        r = sum(x[0] for x in g)
        d = y[1] + sum(x[1] for x in g)
        parts.append([((r, d, c), val) for c, val in Op.gamma(y, g).items()])
    rhs = {}
    for combo in product(*parts):
        coeff = _sgn(f, e)
        for _, val in combo:
            coeff = f.mul(coeff, val)
        for b, w in Op.gamma(z, tuple(t for t, _ in combo)).items():
            _acc(rhs, b, f.mul(coeff, w), f)
    return lhs != rhs


# kSigma bases -------------------------------------------------------------------------

_BASES = {}


def sigma_base(cap, field=QQ, start=1):
    """The shared ``kSigma`` on objects ``start..cap``."""
    key = (cap, field.p, start)
    R = _BASES.get(key)
    if R is None:
        R = ksigma(ObjectWindow(range(start, cap + 1)), field)
        _BASES[key] = R
    return R


def _start(*seqs):
    return 0 if any(not X(0).is_zero() for X in seqs) else 1


# prop ----------------------------------------------------------------------------------

class PropBasis:
    """Basis of ``prop X(m, n)``: ``elems[deg]`` lists ``(f, degs, idxs)``."""

    def __init__(self, X: SymSeq, m, n):
        self.m, self.n = m, n
        elems = {}
        for f in P.functions(m, n):
            sizes = [0] * n
            for y in f:
                sizes[y] += 1
            cxs = [X(r) for r in sizes]
            if any(C.is_zero() for C in cxs):
                continue
            for degs in product(*[C.degrees() for C in cxs]):
                tot = sum(degs)
                lst = elems.setdefault(tot, [])
                for idxs in product(*[range(C.dim(d)) for C, d in zip(cxs, degs)]):
                    lst.append((f, degs, idxs))
        self.elems = elems
        self.index = {d: {e: t for t, e in enumerate(lst)} for d, lst in elems.items()}

    def complex(self, X: SymSeq) -> ChainComplex:
        fld = X.field
        d = {}
        for deg, lst in self.elems.items():
            tgt = self.index.get(deg - 1)
            if tgt is None:
                continue
            cols = {}
            for c, (f, degs, idxs) in enumerate(lst):
                col = {}
                e = 0
                for y, (dy, ay) in enumerate(zip(degs, idxs)):
                    r = sum(1 for z in f if z == y)
                    s = _sgn(fld, e)
                    for b, val in X(r).d(dy).column(ay).items():
                        key = (f, degs[:y] + (dy - 1,) + degs[y + 1:], idxs[:y] + (b,) + idxs[y + 1:])
                        _acc(col, tgt[key], fld.mul(s, val), fld)
                    e += dy
                if col:
                    cols[c] = col
            if cols:
                d[deg] = SparseMatrix(len(tgt), len(lst), fld, cols)
        return ChainComplex({k: len(v) for k, v in self.elems.items()}, d, fld)


def _tensor_expand(vecs, f):
    """Expand a list of sparse vectors into ``{index tuple: coeff}``."""
    out = {(): f.one}
    for v in vecs:
        nxt = {}
        for key, c in out.items():
            for b, x in v.items():
                nxt[key + (b,)] = f.mul(c, x)
        out = nxt
    return out


def relabel_perm(fibre, new_fibre, g):
    """``pi`` with ``pi(t)`` the rank of ``g(fibre[t])`` in ``new_fibre``."""
    rank = {x: r for r, x in enumerate(new_fibre)}
    return tuple(rank[g[x]] for x in fibre)


class PropBimodule(Bimodule):
    """``prop X`` as a ``kSigma``-bimodule (left ``Sigma_m``, right ``Sigma_n``)."""

    def __init__(self, X: SymSeq, base=None):
        self.X = X
        base = base or sigma_base(X.cap, X.field, _start(X))
        self.bases = {}
        levels = {}
        for m in base.window:
            for n in base.window:
                pb = PropBasis(X, m, n)
                if pb.elems:
                    self.bases[(m, n)] = pb
                    levels[(m, n)] = pb.complex(X)
        super().__init__(base, Graph(base.window, levels, X.field), name=f"prop {X.name}")

    def elem(self, m, n, deg, a):
        return self.bases[(m, n)].elems[deg][a]

    def lookup(self, m, n, deg, e):
        return self.bases[(m, n)].index[deg][e]

    def tensor_vector(self, m, n, f, degs, vecs):
        """The basis expansion of ``(f; v_0 (x) ... (x) v_{n-1})``."""
        fld = self.field
        pb = self.bases.get((m, n))
        if pb is None:
            return {}
        idx = pb.index[sum(degs)]
        return {idx[(f, degs, key)]: c for key, c in _tensor_expand(vecs, fld).items() if c}

    def left(self, m, n, s, deg, a):
        """``s`` first, then the basis element: ``(f o s; rho(pi_y) x_y)``."""
        X = self.X
        f, degs, idxs = self.elem(m, n, deg, a)
        f2 = P.compose(f, s)
        old = P.fibres(f, n)
        new = P.fibres(f2, n)
        sinv = P.inverse(s)
        vecs = []
        for y in range(n):
            pi = relabel_perm(old[y], new[y], sinv)
            vecs.append(X.act_basis(len(old[y]), pi, degs[y], idxs[y]))
        return self.tensor_vector(m, n, f2, degs, vecs)

    def right(self, m, n, deg, a, s):
        """The basis element, then ``s``: factors permuted with Koszul sign."""
        fld = self.field
        f, degs, idxs = self.elem(m, n, deg, a)
        f2 = P.compose(s, f)
        sinv = P.inverse(s)
        degs2 = tuple(degs[sinv[y]] for y in range(n))
        idxs2 = tuple(idxs[sinv[y]] for y in range(n))
        e = koszul_perm_sign(degs, s)
        return {self.lookup(m, n, deg, (f2, degs2, idxs2)): _sgn(fld, e)}

    def _lact(self, i, j, g, n, a):
        return self.left(i, j, P.perms(i)[g], n, a)

    def _ract(self, i, j, n, a, g):
        return self.right(i, j, n, a, P.perms(j)[g])


def prop_of(X: SymSeq, base=None) -> PropBimodule:
    return PropBimodule(X, base)


def prop_algebra(Op: Operad, base=None) -> Algebra:
    """``prop P`` as an augmented ``kSigma``-algebra; composition is
    ``(f; x) then (g; z) = (g o f; gamma(z_y; x_c for c in g^{-1}(y)))``."""
    X = Op.seq
    fld = Op.field
    B = PropBimodule(X, base)
    R = B.base

    def mul(i, k, j, p, a, q, b):
        f, fd, fi = B.elem(i, k, p, a)
        g, gd, gi = B.elem(k, j, q, b)
        h = P.compose(g, f)
        F = P.fibres(f, k)
        G = P.fibres(g, j)
        H = P.fibres(h, j)
        # Koszul sign: (x_0..x_{k-1}, z_0..z_{j-1}) -> (z_0, x_G0.., z_1, x_G1.., ...)
        degs = list(fd) + list(gd)
        pos, o = [0] * (k + j), 0
        for y in range(j):
            pos[k + y] = o
            o += 1
            for c in G[y]:
                pos[c] = o
                o += 1
        coeff = _sgn(fld, koszul_perm_sign(degs, pos))
        vecs, odegs = [], []
        for y in range(j):
            outer = (len(G[y]), gd[y], gi[y])
            inners = tuple((len(F[c]), fd[c], fi[c]) for c in G[y])
            comp = Op.gamma(outer, inners)
            if not comp:
                return {}
            block = [x for c in G[y] for x in F[c]]
            pi = relabel_perm(block, H[y], tuple(range(i)))
            dy = gd[y] + sum(fd[c] for c in G[y])
            r = len(H[y])
            vec = {}
            for c, val in comp.items():
                for b2, w in X.act_basis(r, pi, dy, c).items():
                    _acc(vec, b2, fld.mul(val, w), fld)
            if not vec:
                return {}
            vecs.append(vec)
            odegs.append(dy)
        out = B.tensor_vector(i, j, h, tuple(odegs), vecs)
        return {t: fld.mul(coeff, c) for t, c in out.items()}

    def unit_of(s):
        return B.lookup(s, s, 0, (P.identity(s), (0,) * s, (0,) * s))

    unit = {s: {unit_of(s): fld.one} for s in R.window}
    cat = DgCategory(B.carrier, mul, unit, name=f"prop {Op.name}")

    def eta(s, g):
        sg = P.perms(s)[g]
        return {B.lookup(s, s, 0, (sg, (0,) * s, (0,) * s)): fld.one}

    def aug(i, j, n, a):
        if i != j or n != 0:
            return {}
        f, degs, idxs = B.elem(i, j, n, a)
        if len(set(f)) != len(f) or any(d or x for d, x in zip(degs, idxs)):
            return {}
        # every fibre is a singleton and carries the unit
        return {P.perm_index(i)[f]: fld.one}

    A = Algebra(R, cat, eta, aug, name=f"prop {Op.name}")
    A.prop = B
    A.operad = Op
    return A


def validate_prop(Op: Operad) -> Verdict:
    """The prop of ``Op`` is an augmented algebra; this exercises the operad's
    equivariance, since ``kSigma`` sits inside ``prop P``."""
    A = prop_algebra(Op)
    v = Verdict(f"prop {Op.name}")
    v.merge(validate_module(A.prop))
    v.merge(validate_algebra(A))
    return v


# composition products --------------------------------------------------------------------

class OppositeBimodule(Bimodule):
    """``B^op(i, j) = B(j, i)``; ``kSigma`` is self-opposite through ``s -> s^{-1}``."""

    def __init__(self, B: Bimodule):
        from .graphs import opposite
        self.B = B
        super().__init__(B.base, opposite(B.carrier), name=f"{B.name}^op")

    def _lact(self, i, j, g, n, a):
        return self.B.ract(j, i, n, a, _inv_index(i, g))

    def _ract(self, i, j, n, a, g):
        return self.B.lact(j, i, _inv_index(j, g), n, a)


def _inv_index(n, g):
    return P.perm_index(n)[P.inverse(P.perms(n)[g])]


def _seq_from_column(Cb: Bimodule, name, cap, field) -> SymSeq:
    """The symmetric sequence ``i -> Cb(i, 1)`` with its left action as
    ``rho``.  Adjacent transpositions are involutions, so no inversion."""
    arities, acts = {}, {}
    for i in Cb.window:
        Q = Cb(i, 1)
        if Q.is_zero():
            continue
        arities[i] = Q
        gens = []
        for t in range(i - 1):
            g = P.perm_index(i)[P.transposition(i, t)]
            comps = {}
            for d in Q.degrees():
                cols = {a: dict(Cb.lact(i, 1, g, d, a)) for a in range(Q.dim(d))}
                comps[d] = SparseMatrix(Q.dim(d), Q.dim(d), field, {a: c for a, c in cols.items() if c})
            gens.append(ChainMap(Q, Q, comps))
        acts[i] = gens
    return SymSeq(arities, acts, field, name, cap)


def _common(*seqs):
    f = seqs[0].field
    if any(X.field != f for X in seqs):
        raise ValueError("field mismatch")
    cap = max(X.cap for X in seqs)
    check_characteristic(f, cap)
    return f, cap, sigma_base(cap, f, _start(*seqs))


def circ_sigma(M: SymSeq, N: SymSeq) -> SymSeq:
    """``(M o_Sigma N)(i) = (+)_k prop M(i, k) (x)_{Sigma_k} N(k)``, computed as
    the column ``j = 1`` of ``prop M o_kSigma prop N``.  The result keeps that
    bimodule as ``.circ`` together with the two props."""
    f, cap, R = _common(M, N)
    pm, pn = PropBimodule(M, R), PropBimodule(N, R)
    C = CircOver(R, pm, pn)
    out = _seq_from_column(C, f"({M.name} o {N.name})", cap, f)
    out.circ, out.props = C, (pm, pn)
    return out


def bar_circ(M: SymSeq, N: SymSeq) -> SymSeq:
    """``(M o-bar N)(i) = (+)_k prop M(k, i) (x)_{Sigma_k} N(k)``: maps ``k -> i``."""
    f, cap, R = _common(M, N)
    pm, pn = PropBimodule(M, R), PropBimodule(N, R)
    C = CircOver(R, OppositeBimodule(pm), pn)
    out = _seq_from_column(C, f"({M.name} o-bar {N.name})", cap, f)
    out.circ, out.props = C, (pm, pn)
    return out


def _full_rank(m: ChainMap):
    from .sparse import rank
    for n in set(m.source.dims) | set(m.target.dims):
        a, b = m.source.dim(n), m.target.dim(n)
        if a != b or (a and rank(m[n]) != a):
            return False
    return True


def prop_monoidal_iso(M: SymSeq, N: SymSeq):
    """``prop(M o N) -> prop M o_kSigma prop N`` on every level.

    A basis vector of the source is ``h: i -> j`` with, over each ``y``, a
    class ``[g_y; m's (x) n_y]`` with ``g_y`` a map from the fibre of ``h``
    to ``k_y``.  It goes to the class of ``[g; m's] (x) [f; n's]`` where ``f``
    is the order-preserving map ``k -> j`` with fibre sizes ``k_y`` and ``g``
    places block ``y`` after blocks ``0..y-1``.  Moving each ``n_y`` right
    past the later ``m``-blocks gives the Koszul sign.

    Returns ``(maps, verdict)``; the verdict checks that each level is a
    chain isomorphism commuting with both actions.
    """
    MN = circ_sigma(M, N)
    C = MN.circ
    pm, pn = MN.props
    R = C.base
    S = PropBimodule(MN, R)
    fld = MN.field
    v = Verdict(f"prop monoidality for {M.name}, {N.name}")
    maps = {}
    for (i, j) in R.window.pairs():
        src, tgt = S(i, j), C(i, j)
        if src.is_zero() and tgt.is_zero():
            continue
        comps = {}
        for deg in src.degrees():
            cols = {}
            for a in range(src.dim(deg)):
                col = _monoidal_image(S, C, pm, pn, i, j, deg, a, fld)
                if col:
                    cols[a] = col
            comps[deg] = SparseMatrix(tgt.dim(deg), src.dim(deg), fld, cols)
        m = ChainMap(src, tgt, comps)
        maps[(i, j)] = m
        if not m.is_chain_map():
            v.fail(f"level {(i, j)}", "not a chain map")
        if not _full_rank(m):
            v.fail(f"level {(i, j)}", f"not bijective: {src.dims} -> {tgt.dims}")
        for side, n in (("left", i), ("right", j)):
            for t in range(n - 1):
                g = P.perm_index(n)[P.transposition(n, t)]
                for deg in src.degrees():
                    for a in range(src.dim(deg)):
                        if side == "left":
                            lhs = comps[deg].apply(S.lact(i, j, g, deg, a))
                            rhs = C.lact_vec(i, j, g, deg, comps[deg].apply({a: fld.one}))
                        else:
                            lhs = comps[deg].apply(S.ract(i, j, deg, a, g))
                            rhs = C.ract_vec(i, j, deg, comps[deg].apply({a: fld.one}), g)
                        if lhs != rhs:
                            v.fail(f"level {(i, j)} {side} s_{t}", f"not equivariant on basis {deg}:{a}")
                            break
    v.details["levels"] = len(maps)
    return maps, v


def _monoidal_image(S, C, pm, pn, i, j, deg, a, fld):
    h, degs, idxs = S.elem(i, j, deg, a)
    H = P.fibres(h, j)
    g = [0] * i
    mdegs, midxs, ndegs, nidxs, f = [], [], [], [], []
    pys = []
    off = 0
    for y in range(j):
        k, p, x, q, b = C.label(len(H[y]), 1, degs[y], idxs[y])
        gy, gd, gi = pm.elem(len(H[y]), k, p, x)
        _, nd, ni = pn.elem(k, 1, q, b)
        for r, pt in enumerate(H[y]):
            g[pt] = off + gy[r]
        mdegs += gd
        midxs += gi
        ndegs += nd
        nidxs += ni
        f += [y] * k
        pys.append(p)
        off += k
    e = sum(ndegs[y] * sum(pys[y + 1:]) for y in range(j))
    p, q = sum(mdegs), sum(ndegs)
    x = pm.lookup(i, off, p, (tuple(g), tuple(mdegs), tuple(midxs)))
    z = pn.lookup(off, j, q, (tuple(f), tuple(ndegs), tuple(nidxs)))
    out = C.project(i, j, off, p, {x: fld.one}, q, {z: fld.one})
    if e % 2:
        out = {t: fld.neg(c) for t, c in out.items()}
    return out


def interchange_dims(X: SymSeq, Y: SymSeq, Z: SymSeq):
    """Arity-wise graded dims of ``(X o Y) o-bar Z`` and ``Y o-bar (X o-bar Z)``."""
    lhs = bar_circ(circ_sigma(X, Y), Z)
    rhs = bar_circ(Y, bar_circ(X, Z))
    return lhs.dims(), rhs.dims()


def prop_bar_circ_check(X: SymSeq, Y: SymSeq) -> Verdict:
    """Compare ``prop(X o-bar Y)`` with ``(prop X)^op o_kSigma prop Y``.

    On the column ``j = 1`` both sides are ``(X o-bar Y)(i)`` with the same
    basis, so equality is checked as complexes.  Elsewhere only dimensions
    can be compared, and they differ in general: the right side allows spans
    ``a <- k -> b`` that do not factor through a map ``a -> b``.
    """
    XY = bar_circ(X, Y)
    C = XY.circ
    S = PropBimodule(XY, C.base)
    v = Verdict(f"prop compatibility of o-bar for {X.name}, {Y.name}")
    table = {}
    for (a, b) in C.base.window.pairs():
        ls, rs = S(a, b), C(a, b)
        table[(a, b)] = (dict(ls.dims), dict(rs.dims))
        if b == 1:
            if ls != rs:
                v.fail(f"level {(a, b)}", "column j = 1 is not the same complex")
        elif ls.dims != rs.dims:
            v.fail(f"level {(a, b)}", f"dims {ls.dims} vs {rs.dims}")
    v.details["table"] = table
    return v


# the operadic bar and the Koszul-duality comparison ------------------------------------

def operad_bar(Op: Operad, base=None) -> SymSeq:
    """``BP(n) = Tot B(kSigma, prop P, kSigma)(n, 1)`` with its left ``Sigma_n``
    action.  No operadic bar machinery of its own: the levels come from the
    categorical bar of ``prop P`` (the prop bridge), kept as ``.algebra`` and
    ``.bar``."""
    from .bar import BarObject
    from .koszul import TotalBimodule
    A = prop_algebra(Op, base)
    B = BarObject(A)
    T = TotalBimodule(B)
    cap = max(A.window)
    out = _seq_from_column(T, f"B{Op.name}", cap, Op.field)
    out.algebra, out.bar, out.total = A, B, T
    out.bridge = "BP(n) = B(kSigma, prop P, kSigma)(n, 1)"
    return out


def prop_dual_map(M: SymSeq, base=None):
    """``L: prop(M^v)^op -> hom_kSigma(prop M, kSigma)`` (right hom) per level,
    ``L(xi)(x) = sum_s <xi, x . s^{-1}> e_s``.

    The pairing of ``xi_0 (x) ... (x) xi_{n-1}`` with ``x_0 (x) ... (x) x_{n-1}``
    is ``prod <xi_y, x_y>`` times ``(-1)^{|xi_z| |x_y|}`` for ``y < z``.
    Returns ``(source bimodule, target bimodule, {level: ChainMap})``.
    """
    from .algebra import HomOver, regular_bimodule
    f = M.field
    R = base or sigma_base(M.cap, f, _start(M))
    pm = PropBimodule(M, R)
    pd = PropBimodule(dual_seq(M), R)
    src = OppositeBimodule(pd)
    tgt = HomOver("right", R, pm, regular_bimodule(R))
    maps = {}
    for (i, j) in R.window.pairs():
        S, T = src(i, j), tgt(i, j)
        if S.is_zero() and T.is_zero():
            continue
        comps = {}
        blocks = {k: (hb, off) for k, hb, off in tgt._levels[(i, j)][1]} if (i, j) in tgt._levels else {}
        for n in S.degrees():
            cols = {}
            hb, off = blocks.get(i, (None, None))
            if hb is not None and (-n, n) in hb.offset:
                base0 = off.get(n, 0) + hb.offset[(-n, n)]
                dA = pm(j, i).dim(-n)
                for t in range(S.dim(n)):
                    xf, xd, xi = pd.elem(j, i, n, t)
                    amb = {}
                    for a in range(dA):
                        for s in P.perms(i):
                            for a2, c in pm.right(j, i, -n, a, P.inverse(s)).items():
                                val = _pair(pm.elem(j, i, -n, a2), (xf, xd, xi), f)
                                if val:
                                    _acc(amb, base0 + P.perm_index(i)[s] * dA + a, f.mul(c, val), f)
                    if amb:
                        cols[t] = tgt.coords(i, j, n, amb)
            comps[n] = SparseMatrix(T.dim(n), S.dim(n), f, cols)
        maps[(i, j)] = ChainMap(S, T, comps)
    return src, tgt, maps


def _pair(x, xi, f):
    (g, gd, gi), (h, hd, hi) = x, xi
    if g != h or gi != hi or any(a + b for a, b in zip(gd, hd)):
        return f.zero
    e = sum(gd[y] * gd[z] for z in range(len(gd)) for y in range(z))
    return _sgn(f, e)


def prop_dual_check(M: SymSeq, base=None) -> Verdict:
    """``L`` is a chain map, commutes with both actions and is a
    quasi-isomorphism on every level."""
    from .complexes import quasi_iso_failures
    src, tgt, maps = prop_dual_map(M, base)
    f = M.field
    v = Verdict(f"prop dual map for {M.name}")
    for (i, j), m in maps.items():
        if not m.is_chain_map():
            v.fail(f"level {(i, j)}", "not a chain map")
            continue
        bad = quasi_iso_failures(m)
        if bad:
            v.fail(f"level {(i, j)}", f"cone homology {bad}")
        for side, k in (("left", i), ("right", j)):
            for t in range(k - 1):
                g = P.perm_index(k)[P.transposition(k, t)]
                for n in m.source.degrees():
                    for a in range(m.source.dim(n)):
                        one = {a: f.one}
                        if side == "left":
                            lhs = m[n].apply(src.lact(i, j, g, n, a))
                            rhs = tgt.lact_vec(i, j, g, n, m[n].apply(one))
                        else:
                            lhs = m[n].apply(src.ract(i, j, n, a, g))
                            rhs = tgt.ract_vec(i, j, n, m[n].apply(one), g)
                        if lhs != rhs:
                            v.fail(f"level {(i, j)} {side} s_{t}", "not equivariant")
    v.details["levels"] = len(maps)
    return v


def operad_koszul_check(Op: Operad, levels=3, samples=10) -> Verdict:
    """Side (a): ``H K(prop P)(i, j)``.  Side (b): ``H prop(BP^v)(j, i)``.

    The verdict requires equal graded dimensions on every level ``i, j <=
    levels``, and at least ``samples`` composable pairs of homology
    representatives whose product in ``K(prop P)`` matches, in homology, the
    product of their images in ``hom_kSigma(B(kSigma, prop P, kSigma), kSigma)``.
    That model carries the operad structure of ``BP^v`` through the prop bridge
    (the deconcatenation product).  The bridge itself is checked on
    homology: ``H prop(BP)`` against ``H B(kSigma, prop P, kSigma)``.
    """
    from .complexes import homology_dims
    from .koszul import convolution_homology_check, koszul_dual
    if Op.cap < levels:
        raise ValueError(f"arity cap {Op.cap} is below the requested levels {levels}")
    check_characteristic(Op.field, levels)
    R = sigma_base(levels, Op.field)
    BP = operad_bar(Op, R)
    A = BP.algebra
    K = koszul_dual(A)
    PB = PropBimodule(BP, R)
    PD = PropBimodule(dual_seq(BP), R)
    v = Verdict(f"operad Koszul check for {Op.name}")
    table = {}
    for (i, j) in R.window.pairs():
        ha = homology_dims(K(i, j))
        hb = homology_dims(PD(j, i))
        table[(i, j)] = (ha, hb)
        if ha != hb:
            v.fail(f"level {(i, j)}", f"H K(prop P) {ha} vs H prop(BP^v)^op {hb}")
        hbar = homology_dims(BP.bar.total(i, j).complex)
        if homology_dims(PB(i, j)) != hbar:
            v.fail(f"bridge {(i, j)}", f"H prop(BP) {homology_dims(PB(i, j))} vs H B {hbar}")
    mult = convolution_homology_check(A, K, limit=max(samples, 1) * 4)
    v.merge(mult)
    pairs = mult.details.get("pairs", 0)
    if pairs < samples:
        v.fail("multiplicativity", f"only {pairs} composable pairs available, need {samples}")
    v.details.update(table=table, pairs=pairs, bp=BP.dims())
    return v
