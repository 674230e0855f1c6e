import pytest
from hypothesis import given, strategies as st

from koszulcat.complexes import ChainComplex, ChainMap, validate
from koszulcat.field import GF, QQ
from koszulcat.graphs import (
    Graph, ObjectWindow, associator, circ, graph_hom_complex, hom_graph, op_circ_iso,
    opposite, unit_graph, validate_graph,
)

from strategies import graphs

F101 = GF(101)
W2 = ObjectWindow([0, 1])


def test_window():
    assert list(ObjectWindow.upto(3)) == [0, 1, 2, 3]
    with pytest.raises(ValueError):
        ObjectWindow([])
    with pytest.raises(ValueError):
        ObjectWindow([1, 1])


def test_unit_examples():
    I = unit_graph(W2)
    assert circ(I, I) == I
    assert opposite(I) == I
    X = Graph(W2, {(1, 0): ChainComplex({0: 2}), (0, 0): ChainComplex({1: 1})})
    assert hom_graph("right", I, X) == X
    assert hom_graph("left", I, X) == X
    assert circ(I, X) == X and circ(X, I) == X


def test_window_mismatch():
    with pytest.raises(ValueError):
        circ(unit_graph(W2), unit_graph(ObjectWindow([0, 1, 2])))


def degree_dims(C):
    return dict(sorted(C.dims.items()))


@pytest.mark.parametrize("field", [QQ, F101], ids=["Q", "F101"])
@given(data=st.data())
def test_graph_properties(field, data):
    w = ObjectWindow(range(data.draw(st.integers(1, 3))))
    X = data.draw(graphs(field, w, max_total=6))
    Y = data.draw(graphs(field, w, max_total=6))
    Z = data.draw(graphs(field, w, max_total=4))
    I = unit_graph(w, field)
    XY = circ(X, Y)
    assert validate_graph(XY)
    for i, j in w.pairs():
        assert XY(i, j).total_dim() == sum(X(i, k).total_dim() * Y(k, j).total_dim() for k in w)
    assert circ(I, X) == X and circ(X, I) == X
    assert opposite(opposite(X)) == X
    # associativity as an explicit permutation intertwining the differentials
    for ij, m in associator(X, Y, Z).items():
        assert m.is_chain_map()
        for n, M in m.components.items():
            assert sorted(i for c in M.cols.values() for i in c) == list(range(M.nrows))
    # op / circ anticommutation
    for ij, m in op_circ_iso(X, Y).items():
        assert m.is_chain_map()
        assert m.source.dims == m.target.dims
    # hom^r(X^op, Y^op)^op = hom^l(X, Y) bit-exact
    assert opposite(hom_graph("right", opposite(X), opposite(Y))) == hom_graph("left", X, Y)
    # adjunctions at the level of graded dimensions
    A = data.draw(graphs(field, w, max_total=4))
    lhs = graph_hom_complex(circ(A, X), Y)
    assert degree_dims(lhs) == degree_dims(graph_hom_complex(A, hom_graph("right", X, Y)))
    assert degree_dims(graph_hom_complex(circ(X, A), Y)) == degree_dims(
        graph_hom_complex(A, hom_graph("left", X, Y)))
    assert validate_graph(hom_graph("right", X, Y))
