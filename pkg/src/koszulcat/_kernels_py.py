"""Pure-Python row-reduction kernels.

Sparse vectors are dicts ``{index: value}`` holding only nonzero values.
``p == 0`` selects rational arithmetic, otherwise arithmetic mod ``p``.
This module must stay behaviourally identical to ``_kernels.pyx``.
"""

IMPLEMENTATION = "python"


def axpy(target, a, src, p):
    """target += a * src, in place, dropping zeros."""
    if p:
        for c, x in src.items():
            y = (target.get(c, 0) + a * x) % p
            if y:
                target[c] = y
            else:
                target.pop(c, None)
    else:
        for c, x in src.items():
            y = target.get(c, 0) + a * x
            if y:
                target[c] = y
            else:
                target.pop(c, None)


def reduce_vec(v, piv, p):
    """Reduce ``v`` against fully reduced pivot rows; returns a new dict."""
    v = dict(v)
    hits = [c for c in v if c in piv]
    if p:
        for c in hits:
            a = v.get(c)
            if a:
                for cc, x in piv[c].items():
                    y = (v.get(cc, 0) - a * x) % p
                    if y:
                        v[cc] = y
                    else:
                        v.pop(cc, None)
    else:
        for c in hits:
            a = v.get(c)
            if a:
                for cc, x in piv[c].items():
                    y = v.get(cc, 0) - a * x
                    if y:
                        v[cc] = y
                    else:
                        v.pop(cc, None)
    return v


def echelonize(rows, p):
    """Fully reduced echelon basis of the span of ``rows``.

    Returns ``(piv, occ)``: ``piv[c]`` is the row with pivot column ``c``
    (pivot entry 1, zero in every other pivot column); ``occ[c]`` is the set
    of pivot columns whose rows are nonzero in the non-pivot column ``c``.
    """
    piv = {}
    occ = {}
    for r in rows:
        if not r:
            continue
        v = reduce_vec(r, piv, p)
        if not v:
            continue
        c0 = min(v)
        a = v[c0]
        if p:
            inv = pow(a, -1, p)
            if inv != 1:
                v = {c: (x * inv) % p for c, x in v.items()}
        else:
            if a != 1:
                inv = 1 / a
                v = {c: x * inv for c, x in v.items()}
        users = occ.pop(c0, None)
        if users:
            for pc in users:
                row = piv[pc]
                b = row[c0]
                for c, x in v.items():
                    if p:
                        y = (row.get(c, 0) - b * x) % p
                    else:
                        y = row.get(c, 0) - b * x
                    if y:
                        if c not in row:
                            occ.setdefault(c, set()).add(pc)
                        row[c] = y
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


def matmul_cols(acols, bcols, p):
    """Column-major product: column j of A@B from the columns of A and B."""
    out = {}
    for j, bj in bcols.items():
        acc = {}
        for k, x in bj.items():
            ak = acols.get(k)
            if ak:
                axpy(acc, x, ak, p)
        if acc:
            out[j] = acc
    return out
