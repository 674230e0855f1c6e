"""Permutations, injections and surjections as tuples.

A permutation ``s`` of ``range(n)`` is the tuple ``(s(0), ..., s(n-1))``;
an injection ``m -> n`` likewise.  Enumerations are lexicographic.
"""

from functools import lru_cache
from itertools import permutations, product
from math import factorial


@lru_cache(maxsize=None)
def perms(n):
    return tuple(permutations(range(n)))


@lru_cache(maxsize=None)
def perm_index(n):
    return {s: t for t, s in enumerate(perms(n))}


@lru_cache(maxsize=None)
def injections(m, n):
    return tuple(permutations(range(n), m))


@lru_cache(maxsize=None)
def injection_index(m, n):
    return {s: t for t, s in enumerate(injections(m, n))}


def compose(f, g):
    """``f o g`` (apply ``g`` first)."""
    return tuple(f[x] for x in g)


def inverse(s):
    out = [0] * len(s)
    for i, x in enumerate(s):
        out[x] = i
    return tuple(out)


def identity(n):
    return tuple(range(n))


def transposition(n, i):
    """The adjacent transposition ``(i, i+1)`` in ``S_n``."""
    s = list(range(n))
    s[i], s[i + 1] = s[i + 1], s[i]
    return tuple(s)


def sign(s):
    seen = [False] * len(s)
    parity = 0
    for i in range(len(s)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = s[j]
                length += 1
            parity += length - 1
    return -1 if parity % 2 else 1


@lru_cache(maxsize=None)
def functions(m, n):
    """All maps ``m -> n`` as tuples, lexicographic."""
    return tuple(product(range(n), repeat=m))


@lru_cache(maxsize=None)
def surjections(m, n):
    return tuple(f for f in functions(m, n) if len(set(f)) == n)


def fibres(f, n):
    """``[f^{-1}(0), ..., f^{-1}(n-1)]`` as increasing tuples."""
    out = [[] for _ in range(n)]
    for x, y in enumerate(f):
        out[y].append(x)
    return [tuple(b) for b in out]


def n_injections(m, n):
    return factorial(n) // factorial(n - m) if 0 <= m <= n else 0
