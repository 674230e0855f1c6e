"""Slow, obviously-correct reference implementations used by the tests."""

from fractions import Fraction


def dense_rref(rows, p=0):
    """Textbook Gauss-Jordan on a list of lists; returns (rank, pivots, R)."""
    R = [[(Fraction(x) if not p else int(x) % p) for x in r] for r in rows]
    m = len(R)
    n = len(R[0]) if R else 0
    pivots = []
    r = 0
    for c in range(n):
        k = next((i for i in range(r, m) if R[i][c]), None)
        if k is None:
            continue
        R[r], R[k] = R[k], R[r]
        inv = (1 / R[r][c]) if not p else pow(R[r][c], -1, p)
        R[r] = [(x * inv) if not p else (x * inv) % p for x in R[r]]
        for i in range(m):
            if i != r and R[i][c]:
                f = R[i][c]
                R[i] = [(a - f * b) if not p else (a - f * b) % p for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return r, pivots, R


def dense_rank(rows, p=0):
    return dense_rref(rows, p)[0] if rows and rows[0] else 0


def dense_homology_dims(dims, dmats, p=0):
    """dims: {n: dim}; dmats: {n: dense matrix of d_n (dims[n-1] x dims[n])}."""
    def rk(n):
        m = dmats.get(n)
        if not m or not dims.get(n) or not dims.get(n - 1):
            return 0
        return dense_rank(m, p)
    return {n: dims[n] - rk(n) - rk(n + 1) for n in dims}


# symmetric sequences ------------------------------------------------------------------

def graded_product(*factors):
    """Product of graded dimensions ``{degree: dim}``."""
    out = {0: 1}
    for fac in factors:
        nxt = {}
        for a, x in out.items():
            for b, y in fac.items():
                nxt[a + b] = nxt.get(a + b, 0) + x * y
        out = nxt
    return {d: x for d, x in out.items() if x}


def graded_add(acc, part, scale=1):
    for d, x in part.items():
        acc[d] = acc.get(d, 0) + scale * x


def prop_dims_oracle(dims, m, n):
    """``prop X(m, n)`` by summing over all functions ``m -> n``."""
    from itertools import product
    out = {}
    for f in product(range(n), repeat=m):
        sizes = [f.count(y) for y in range(n)]
        graded_add(out, graded_product(*[dims.get(r, {}) for r in sizes]))
    return {d: x for d, x in out.items() if x}


def circ_dims_oracle(M, N, i):
    """``(M o_Sigma N)(i)`` for ``M(0) = 0`` by orbit enumeration: ``Sigma_k``
    acts freely on surjections ``i -> k``, so each orbit (a set partition of
    ``i`` into ``k`` blocks) contributes a full tensor product."""
    from itertools import product
    out = {}
    for k, nd in N.items():
        seen = set()
        for g in product(range(k), repeat=i):
            if len(set(g)) != k:
                continue
            # canonical orbit representative: relabel blocks by first appearance
            relabel = {}
            canon = tuple(relabel.setdefault(y, len(relabel)) for y in g)
            if canon in seen:
                continue
            seen.add(canon)
            sizes = [canon.count(y) for y in range(k)]
            graded_add(out, graded_product(*[M.get(r, {}) for r in sizes], nd))
    return {d: x for d, x in out.items() if x}


def binary_trees(n):
    """Number of commutative binary bracketings of ``n`` labeled leaves."""
    from math import prod
    return prod(range(1, 2 * n - 2, 2)) if n >= 1 else 0
