"""The double dual ``K(K(C))`` through a truncated unnormalized bar resolution.

Only the unit base is supported.  With ``K = K(C)`` and ``X = B(R, C, C)``
(a left ``K``-module through evaluation) the resolution is
``B~(K, K, X)_l = K o K^{o l} o X``, free on ``Y_l = K^{o l} o X``.  A left
``K``-equivariant map out of it is determined by its values on ``Y``, so

    KK(i, j) = (+)_k  maps  Y(k, i) -> X(k, j)

over levels ``l <= trunc``.  For ``y = [a1|...|al|x]`` of degree ``m``:

    (D f)(y) = d f(y) - (-1)^n ( (-1)^((n + l - 1) |a1|) a1 . f([a2|...|x]) + f(D_Y y) )

where ``D_Y`` is the bar differential of ``y`` without its first face.  The
level symbol of ``a0 (x) y`` is written after ``a0`` so that the differential
is a derivation for the left ``K``-action; that is where the ``l - 1`` comes
from.  The map from ``C`` sends ``c`` to ``x -> (-1)^(|c||x|) x . c`` on ``Y_0 = X``.
"""

from __future__ import annotations

from . import kernels
from .complexes import ChainComplex, ChainMap, HomologyDegree, homology_dims, induced_map
from .koszul import KoszulDual, koszul_dual
from .sparse import SparseMatrix, rank
from .verdict import Verdict


def _sgn(f, e):
    return f.one if e % 2 == 0 else f.neg(f.one)


class DoubleDual:
    def __init__(self, C, trunc: int, K: KoszulDual = None):
        R = C.base
        if R.generators and any(R.generators.values()):
            raise ValueError("double dual is only implemented over the unit base")
        for s in R.window:
            if R(s, s).dims != {0: 1}:
                raise ValueError("double dual is only implemented over the unit base")
        if trunc < 0:
            raise ValueError("truncation must be nonnegative")
        self.C, self.trunc = C, trunc
        self.K = K or koszul_dual(C)
        self.field = C.field
        self.window = C.window
        self._ev = {}
        self._Y = {}
        self._DY = {}
        self._levels = {}

    # K acting on X -----------------------------------------------------------------
    def X(self, i, j) -> ChainComplex:
        return self.K._TX[(i, j)]

    def act(self, i, j, n, a, k, m, x):
        """Basis ``a`` of ``K(i, j)_n`` on basis ``x`` of ``X(j, k)_m``."""
        key = (i, j, n, a, k, m, x)
        r = self._ev.get(key)
        if r is None:
            r = self.K.evaluate(i, j, n, {a: self.field.one}, k, m, {x: self.field.one})
            self._ev[key] = r
        return r

    # the free generators Y ---------------------------------------------------------
    def Y(self, k, i):
        """``{degree: [y]}`` with ``y = (path, letters, (xdeg, x))``."""
        key = (k, i)
        r = self._Y.get(key)
        if r is not None:
            return r
        K, w = self.K, self.window
        out = {}

        def grow(path, letters, l):
            p = path[-1]
            X = self.X(p, i)
            for m in X.degrees():
                for x in range(X.dim(m)):
                    y = (path, letters, (m, x))
                    deg = l + sum(d for d, _ in letters) + m
                    out.setdefault(deg, []).append(y)
            if l == self.trunc:
                return
            for q in w:
                A = K(p, q)
                for d in A.degrees():
                    for a in range(A.dim(d)):
                        grow(path + (q,), letters + ((d, a),), l + 1)

        grow((k,), (), 0)
        index = {n: {y: t for t, y in enumerate(ys)} for n, ys in out.items()}
        self._Y[key] = (out, index)
        return out, index

    def D_Y(self, k, i, y):
        """``D_Y y`` as ``{y': coeff}``."""
        key = (k, i, y)
        r = self._DY.get(key)
        if r is not None:
            return r
        f = self.field
        K = self.K
        path, letters, (m, x) = y
        l = len(letters)
        out = {}

        def add(y2, c):
            v = f.add(out.get(y2, f.zero), c)
            if v:
                out[y2] = v
            else:
                out.pop(y2, None)

        # faces merging a_t a_{t+1}, sign (-1)^t
        for t in range(1, l):
            (d1, a1), (d2, a2) = letters[t - 1], letters[t]
            prod = K.mul(path[t - 1], path[t], path[t + 1], d1, a1, d2, a2)
            s = _sgn(f, t)
            for b, c in prod.items():
                y2 = (path[:t] + path[t + 1:], letters[:t - 1] + ((d1 + d2, b),) + letters[t + 1:], (m, x))
                add(y2, f.mul(s, c))
        # last face a_l . x
        if l:
            d1, a1 = letters[-1]
            s = _sgn(f, l)
            for b, c in self.act(path[-2], path[-1], d1, a1, i, m, x).items():
                add((path[:-1], letters[:-1], (d1 + m, b)), f.mul(s, c))
        # internal differential with Koszul signs, times (-1)^l
        e = 0
        for t, (d1, a1) in enumerate(letters):
            A = K(path[t], path[t + 1])
            s = _sgn(f, l + e)
            for b, c in A.d(d1).column(a1).items():
                add((path, letters[:t] + ((d1 - 1, b),) + letters[t + 1:], (m, x)), f.mul(s, c))
            e += d1
        s = _sgn(f, l + e)
        for b, c in self.X(path[-1], i).d(m).column(x).items():
            add((path, letters, (m - 1, b)), f.mul(s, c))
        self._DY[key] = out
        return out

    # the complex KK(i, j) -------------------------------------------------------------
    def _unknowns(self, i, j):
        """``{n: [(k, ydeg, y, xdeg, x)]}`` and the reverse index."""
        cols = {}
        for k in self.window:
            Xk = self.X(k, j)
            if Xk.is_zero():
                continue
            ys, _ = self.Y(k, i)
            for m, lst in ys.items():
                for y in lst:
                    for xd in Xk.degrees():
                        n = xd - m
                        for x in range(Xk.dim(xd)):
                            cols.setdefault(n, []).append((k, y, x))
        index = {n: {u: t for t, u in enumerate(us)} for n, us in cols.items()}
        return cols, index

    def level(self, i, j):
        """``(complex, unknowns, index)`` for ``KK(i, j)``."""
        r = self._levels.get((i, j))
        if r is not None:
            return r
        f = self.field
        K = self.K
        cols, index = self._unknowns(i, j)
        # transpose of D_Y, and the first-face predecessors [a1|y]
        up = {}
        for k in self.window:
            ys, _ = self.Y(k, i)
            for m, lst in ys.items():
                for y2 in lst:
                    for y, c in self.D_Y(k, i, y2).items():
                        up.setdefault((k, y), []).append((y2, c))
        d = {}
        for n, us in cols.items():
            tgt = index.get(n - 1, {})
            mcols = {}
            sn = _sgn(f, n)
            for t, (k, y, x) in enumerate(us):
                path, letters, (ym, yx) = y
                ydeg = len(letters) + sum(e for e, _ in letters) + ym
                col = {}

                def add(u, c):
                    r = tgt[u]
                    v = f.add(col.get(r, f.zero), c)
                    if v:
                        col[r] = v
                    else:
                        col.pop(r)

                Xk = self.X(k, j)
                for b, c in Xk.d(ydeg + n).column(x).items():
                    add((k, y, b), c)
                for y2, c in up.get((k, y), ()):
                    add((k, y2, x), f.neg(f.mul(sn, c)))
                if len(letters) < self.trunc:
                    for k2 in self.window:
                        A = K(k2, k)
                        for e in A.degrees():
                            # the level symbol sits right of a1, so moving it
                            # past a1 costs (-1)^(|a1| (l - 1)) with l = level of [a1|y]
                            s = f.neg(f.mul(sn, _sgn(f, n * e + len(letters) * e)))
                            for a in range(A.dim(e)):
                                y2 = ((k2,) + path, ((e, a),) + letters, (ym, yx))
                                for b, c in self.act(k2, k, e, a, j, ydeg + n, x).items():
                                    add((k2, y2, b), f.mul(s, c))
                if col:
                    mcols[t] = col
            d[n] = SparseMatrix(len(tgt), len(us), f, mcols)
        dims = {n: len(us) for n, us in cols.items() if us}
        r = (ChainComplex(dims, d, f), cols, index)
        self._levels[(i, j)] = r
        return r

    def nu(self, i, j) -> ChainMap:
        """``C(i, j) -> KK(i, j)``."""
        from .bar import right_action
        f = self.field
        C = self.C
        KK, cols, index = self.level(i, j)
        src = C(i, j)
        comps = {}
        for q in src.degrees():
            mc = {}
            idx = index.get(q, {})
            for c in range(src.dim(q)):
                col = {}
                for k in self.window:
                    Xki = self.X(k, i)
                    for m in Xki.degrees():
                        s = _sgn(f, q * m)
                        for x in range(Xki.dim(m)):
                            y = ((k,), (), (m, x))
                            for b, z in right_action(self.K.X, k, i, j, m, x, q, c).items():
                                col[idx[(k, y, b)]] = f.mul(s, z)
                if col:
                    mc[c] = col
            comps[q] = SparseMatrix(KK.dim(q), src.dim(q), f, mc)
        return ChainMap(src, KK, comps)

    def homology_table(self):
        return {ij: homology_dims(self.level(*ij)[0]) for ij in self.window.pairs()}


def _iso_degrees(m: ChainMap, degrees):
    """Degrees among ``degrees`` where ``H(m)`` is not bijective."""
    bad = []
    for n in degrees:
        hs = HomologyDegree(m.source, n)
        ht = HomologyDegree(m.target, n)
        if hs.dim != ht.dim:
            bad.append(n)
            continue
        if hs.dim and rank(induced_map(m, n, hs, ht)) != hs.dim:
            bad.append(n)
    return bad


def double_dual_report(C, truncs=(3, 4)) -> Verdict:
    """Stabilization evidence for ``nu: C -> K(K(C))``.

    For each ``T`` in ``truncs`` the stable degrees of a level are those
    where ``H(KK_T)`` and ``H(KK_{T-1})`` have the same dimension.  The
    report fails if ``nu`` is not a chain map, if a degree carrying homology
    of ``C`` is not stable, if ``H(nu)`` is not bijective on a stable degree,
    or if the stable tables at different truncations disagree.
    """
    v = Verdict(f"double dual of {C.name}")
    K = koszul_dual(C)
    ts = sorted(set(truncs) | {t - 1 for t in truncs if t > 0})
    dds = {t: DoubleDual(C, t, K) for t in ts}
    tables = {t: dd.homology_table() for t, dd in dds.items()}
    stable = {}
    for T in truncs:
        prev = tables.get(T - 1)
        for ij in C.window.pairs():
            hT = tables[T][ij]
            hP = prev[ij] if prev is not None else {}
            degs = set(hT) | set(hP) | set(homology_dims(C(*ij)))
            lo = min(degs, default=0) - 1
            hi = max(degs, default=0) + 1
            st = [n for n in range(lo, hi + 1) if hT.get(n, 0) == hP.get(n, 0)]
            stable[(T, ij)] = st
            m = dds[T].nu(*ij)
            if not m.is_chain_map():
                v.fail(f"T={T} level {ij}", "nu is not a chain map")
                continue
            for n in homology_dims(C(*ij)):
                if n not in st:
                    v.fail(f"T={T} level {ij}", f"homology degree {n} has not stabilized")
            bad = _iso_degrees(m, st)
            if bad:
                v.fail(f"T={T} level {ij}", f"H(nu) not bijective in degrees {bad}")
    # stable tables agree across truncations
    for ij in C.window.pairs():
        common = None
        for T in truncs:
            s = set(stable[(T, ij)])
            common = s if common is None else common & s
        for n in sorted(common or ()):
            vals = {T: tables[T][ij].get(n, 0) for T in truncs}
            if len(set(vals.values())) > 1:
                v.fail(f"level {ij} degree {n}", f"tables differ across truncations {vals}")
    v.details["tables"] = {T: tables[T] for T in ts}
    v.details["stable"] = {f"{T}:{ij}": s for (T, ij), s in stable.items()}
    return v
