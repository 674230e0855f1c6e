# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled row-reduction kernels; same contract as ``_kernels_py``."""

IMPLEMENTATION = "cython"


cdef inline long long _mod(long long x, long long p):
    x = x % p
    if x < 0:
        x += p
    return x


cdef void _axpy_p(dict target, long long a, dict src, long long p):
    cdef long long y
    for c, x in src.items():
        y = _mod(<long long>target.get(c, 0) + a * <long long>x, p)
        if y:
            target[c] = y
        else:
            target.pop(c, None)


cdef void _axpy_q(dict target, object a, dict src):
    for c, x in src.items():
        y = target.get(c, 0) + a * x
        if y:
            target[c] = y
        else:
            target.pop(c, None)


def axpy(dict target, a, dict src, long long p):
    if p:
        _axpy_p(target, a, src, p)
    else:
        _axpy_q(target, a, src)


def reduce_vec(v, dict piv, long long p):
    cdef dict w = dict(v)
    cdef list hits = [c for c in w if c in piv]
    for c in hits:
        a = w.get(c)
        if a:
            if p:
                _axpy_p(w, p - <long long>a, <dict>piv[c], p)
            else:
                _axpy_q(w, -a, <dict>piv[c])
    return w


def echelonize(rows, long long p):
    cdef dict piv = {}
    cdef dict occ = {}
    cdef dict v, row
    cdef long long inv, b, y
    for r in rows:
        if not r:
            continue
        v = reduce_vec(r, piv, p)
        if not v:
            continue
        c0 = min(v)
        a = v[c0]
        if p:
            inv = pow(<long long>a, -1, p)
            if inv != 1:
                v = {c: _mod(<long long>x * inv, p) for c, x in v.items()}
        else:
            if a != 1:
                qinv = 1 / a
                v = {c: x * qinv for c, x in v.items()}
        users = occ.pop(c0, None)
        if users:
            for pc in users:
                row = <dict>piv[pc]
                bq = row[c0]
                for c, x in v.items():
                    if p:
                        yq = _mod(<long long>row.get(c, 0) - <long long>bq * <long long>x, p)
                    else:
                        yq = row.get(c, 0) - bq * x
                    if yq:
                        if c not in row:
                            occ.setdefault(c, set()).add(pc)
                        row[c] = yq
                    elif c in row:
                        del row[c]
                        if c != c0:
                            s = occ.get(c)
                            if s is not None:
                                s.discard(pc)
        piv[c0] = v
        for c in v:
            if c != c0:
                occ.setdefault(c, set()).add(c0)
    return piv, occ


def matmul_cols(dict acols, dict bcols, long long p):
    cdef dict out = {}
    cdef dict acc
    for j, bj in bcols.items():
        acc = {}
        for k, x in (<dict>bj).items():
            ak = acols.get(k)
            if ak:
                if p:
                    _axpy_p(acc, x, <dict>ak, p)
                else:
                    _axpy_q(acc, x, <dict>ak)
        if acc:
            out[j] = acc
    return out
