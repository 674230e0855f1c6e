"""Hypothesis strategies for random small complexes and graphs."""

from hypothesis import strategies as st

from koszulcat.complexes import ChainComplex
from koszulcat.sparse import SparseMatrix, kernel_basis, rank


@st.composite
def complexes(draw, field, max_dim=3, degrees=(-1, 0, 1, 2)):
    """Random complexes with d^2 = 0 by construction.

    Each differential is a random matrix restricted to the kernel of the
    previous one, so ``d_{n-1} d_n = 0`` holds exactly.
    """
    lo = draw(st.sampled_from(degrees))
    length = draw(st.integers(1, 3))
    dims = {lo + t: draw(st.integers(0, max_dim)) for t in range(length)}
    d = {}
    prev = None
    for n in sorted(dims):
        if n - 1 in dims and dims[n] and dims[n - 1]:
            K = kernel_basis(prev) if prev is not None else SparseMatrix.identity(dims[n - 1], field)
            if K.ncols:
                coeffs = draw(st.lists(st.lists(st.integers(-2, 2), min_size=K.ncols, max_size=K.ncols),
                                       min_size=dims[n], max_size=dims[n]))
                C = SparseMatrix.from_dense([list(r) for r in zip(*coeffs)], field, ncols=dims[n])
                d[n] = K @ C
        prev = d.get(n, SparseMatrix(dims.get(n - 1, 0), dims[n], field))
    return ChainComplex(dims, d, field)


@st.composite
def graphs(draw, field, window=None, max_total=12, max_dim=2):
    from koszulcat.graphs import Graph, ObjectWindow

    if window is None:
        n = draw(st.integers(1, 3))
        window = ObjectWindow(range(n))
    levels = {}
    total = 0
    for ij in window.pairs():
        if total >= max_total or not draw(st.booleans()):
            continue
        C = draw(complexes(field, max_dim=max_dim, degrees=(-1, 0, 1)))
        if total + C.total_dim() > max_total:
            continue
        total += C.total_dim()
        levels[ij] = C
    return Graph(window, levels, field)


@st.composite
def lower_bimodules(draw, field, window, max_total=6):
    """A random strictly lower graph as a bimodule over the unit base."""
    from koszulcat.algebra import ExplicitBimodule, unit_category
    from koszulcat.graphs import Graph

    levels = {}
    total = 0
    for i, j in window.pairs():
        if i <= j or total >= max_total or not draw(st.booleans()):
            continue
        C = draw(complexes(field, max_dim=2, degrees=(-1, 0, 1)))
        if C.is_zero() or total + C.total_dim() > max_total:
            continue
        total += C.total_dim()
        levels[(i, j)] = C
    R = unit_category(window, field)

    return ExplicitBimodule(R, Graph(window, levels, field),
                            lambda i, j, n, a, g: {a: field.one},
                            lambda i, j, g, n, a: {a: field.one}, name="M")


@st.composite
def symseqs(draw, field, cap=3, reduced=False, name="X"):
    """Small symmetric sequences: arity 1 is the unit when ``reduced``, other
    arities carry a trivial, sign or regular action."""
    from koszulcat.complexes import unit_complex
    from koszulcat.operads import SymSeq, regular_seq, sign_seq, trivial_seq

    arities, acts = {}, {}
    lo = 2 if reduced else 1
    for n in range(lo, cap + 1):
        kind = draw(st.sampled_from(["none", "trivial", "sign", "regular"] if n == 2 else
                                    ["none", "trivial", "sign"]))
        if kind == "none":
            continue
        deg = draw(st.integers(0, 1))
        if kind == "regular":
            X = regular_seq([n], field, degree=deg)
        else:
            mk = trivial_seq if kind == "trivial" else sign_seq
            X = mk({n: {deg: 1}}, field)
        arities[n] = X(n)
        if n in X.actions:
            acts[n] = X.actions[n]
    if reduced:
        arities[1] = unit_complex(field)
    return SymSeq(arities, acts, field, name, cap)
