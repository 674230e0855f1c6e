import math
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from koszulcat.algebra import square_zero, unit_category, zero_bimodule
from koszulcat.bar import (
    BarObject, augmentation_qiso_check, bar_lemma_check, bar_level, simplicial_check,
    square_zero_bar_check,
)
from koszulcat.complexes import homology_dims
from koszulcat.doubledual import DoubleDual, double_dual_report
from koszulcat.examples import chain_free, chain_square_zero, kfi
from koszulcat.field import GF, QQ
from koszulcat.graphs import ObjectWindow
from koszulcat.koszul import (
    SquareZeroPhi, compare_models, convolution_homology_check, dual_bar_model,
    equalizer_cross_check, koszul_dual,
)

from strategies import lower_bimodules

F101 = GF(101)


def trivial(span=1, field=QQ):
    R = unit_category(ObjectWindow.upto(span), field)
    return square_zero(R, zero_bimodule(R), name="R")


def H(C):
    return homology_dims(C)


def chains_oracle(m, n, l):
    """dim of Cbar^{o l}(m, n) for kFI over kS: chains m < n1 < ... < n, with
    injection counts divided by the interior group orders."""
    if l == 0:
        return 1 if m == n else 0
    if m >= n:
        return 0
    total = 0
    for mid in combinations(range(m + 1, n), l - 1):
        pts = (m,) + mid + (n,)
        num = math.prod(math.perm(b, a) for a, b in zip(pts, pts[1:]))
        den = math.prod(math.factorial(x) for x in mid)
        total += num // den
    return total


# bar constructions --------------------------------------------------------------------

def test_trivial_bar():
    C = trivial()
    B = BarObject(C)
    assert B.top == 0
    assert B.total_graph().dims() == {(0, 0): {0: 1}, (1, 1): {0: 1}}


def test_square_zero_levels():
    C = chain_square_zero(1)
    assert bar_level(C, "R", "R", 1)(1, 0).dims == {0: 1}
    assert bar_level(C, "R", "R", 2).carrier.is_zero()
    T = BarObject(C).total_graph()
    assert T.dims() == {(0, 0): {0: 1}, (1, 0): {1: 1}, (1, 1): {0: 1}}


def test_unbounded_bar_needs_truncation():
    w = ObjectWindow([0])
    C = kfi(w)
    assert BarObject(C).top == 0
    with pytest.raises(ValueError):
        BarObject(C, "X", "R")


@pytest.mark.parametrize("l", [1, 2, 3])
def test_kfi_level_dims(l):
    C = kfi(ObjectWindow.upto(3))
    L = bar_level(C, "R", "R", l)
    for m in range(4):
        for n in range(4):
            assert L(m, n).dims.get(0, 0) == chains_oracle(m, n, l), (m, n)


def test_kfi_bar_homology_small():
    C = kfi(ObjectWindow.upto(4))
    B = BarObject(C)
    for m in range(5):
        for n in range(m, 5):
            expect = {n - m: math.perm(n, m)}
            assert H(B.total(m, n).complex) == expect
    assert H(B.total(1, 3).complex) == {2: 3}


@pytest.mark.parametrize("sides", [("R", "R"), ("R", "C"), ("C", "C"), ("C", "R")])
def test_simplicial_identities(sides):
    for C in (chain_square_zero(3, degree=1), chain_free(3), kfi(ObjectWindow.upto(3))):
        v = simplicial_check(BarObject(C, *sides))
        assert v, v.first()


@pytest.mark.parametrize("C", [trivial(), chain_square_zero(3), chain_free(3), kfi(ObjectWindow.upto(3))],
                         ids=["R", "sqz3", "free3", "kFI3"])
def test_augmentation_qiso(C):
    assert augmentation_qiso_check(C)


@pytest.mark.parametrize("span", [1, 2, 3, 4])
@pytest.mark.parametrize("degree", [0, 1])
def test_square_zero_decomposition(span, degree):
    v = square_zero_bar_check(chain_square_zero(span, degree=degree))
    assert v, v.first()


@pytest.mark.parametrize("C", [trivial(), chain_square_zero(2), chain_square_zero(3, F101, 1, [2, 1, 2]),
                               chain_free(3), kfi(ObjectWindow.upto(3))],
                         ids=["R", "sqz2", "sqz3-F101", "free3", "kFI3"])
def test_bar_lemma(C):
    v = bar_lemma_check(C)
    assert v, v.first()


# Koszul dual ----------------------------------------------------------------------------

def test_koszul_dual_examples():
    K = koszul_dual(trivial())
    assert {ij: H(K(*ij)) for ij in K.carrier.support()} == {(0, 0): {0: 1}, (1, 1): {0: 1}}
    K1 = koszul_dual(chain_square_zero(1))
    assert H(K1(0, 1)) == {-1: 1}
    assert H(K1(0, 0)) == {0: 1} == H(K1(1, 1))
    assert H(K1(1, 0)) == {}
    K2 = koszul_dual(chain_square_zero(2))
    assert H(K2(0, 2)) == {-2: 1}


def test_dual_homology_directed_opposite():
    for C in (chain_square_zero(3), chain_free(2), kfi(ObjectWindow.upto(3))):
        K = koszul_dual(C)
        upper = C.reduced().carrier.strictly_directed() == "upper"
        for (i, j), L in K.carrier.levels.items():
            if i != j and (i < j) == upper:
                assert H(L) == {}, (C.name, i, j)


def test_kfi_dual_table():
    K = koszul_dual(kfi(ObjectWindow.upto(3)))
    for m in range(4):
        for n in range(m, 4):
            assert H(K(n, m)) == {-(n - m): math.perm(n, m)}


@pytest.mark.parametrize("C", [chain_square_zero(2), chain_square_zero(3, degree=1), chain_free(3),
                               kfi(ObjectWindow.upto(3))], ids=["sqz2", "sqz3", "free3", "kFI3"])
def test_dual_is_dg_algebra(C):
    v = koszul_dual(C).validate_dg(limit=20000)
    assert v, v.first()


@pytest.mark.parametrize("C", [chain_square_zero(2, degree=1), chain_free(3), kfi(ObjectWindow.upto(3))],
                         ids=["sqz2", "free3", "kFI3"])
def test_equalizer_cross_check(C):
    v = equalizer_cross_check(C)
    assert v, v.first()


def test_dual_bar_model_examples():
    assert dual_bar_model(trivial()).carrier.dims() == {(0, 0): {0: 1}, (1, 1): {0: 1}}
    D = dual_bar_model(chain_square_zero(1))
    assert D(0, 1).dims == {-1: 1}
    for span in (1, 2, 3):
        C = chain_square_zero(span)
        K, D = koszul_dual(C), dual_bar_model(C)
        for ij in C.window.pairs():
            assert H(K(*ij)) == H(D(*ij))


@pytest.mark.parametrize("C", [trivial(), chain_square_zero(1), chain_square_zero(3, degree=1), chain_free(2),
                               kfi(ObjectWindow.upto(2)), kfi(ObjectWindow.upto(3))],
                         ids=["R", "sqz1", "sqz3", "free2", "kFI2", "kFI3"])
def test_compare_models(C):
    v = compare_models(C)
    assert v, v.first()


@pytest.mark.parametrize("C", [chain_square_zero(3), chain_square_zero(3, degree=1), kfi(ObjectWindow.upto(3))],
                         ids=["sqz3", "sqz3-odd", "kFI3"])
def test_convolution_agrees_in_homology(C):
    v = convolution_homology_check(C)
    assert v, v.first()
    assert v.details["pairs"] > 0


@pytest.mark.parametrize("span", [1, 2, 3, 4])
@pytest.mark.parametrize("degree", [0, 1])
def test_phi(span, degree):
    P = SquareZeroPhi(chain_square_zero(span, degree=degree))
    v = P.check()
    assert v, v.first()
    assert P.check_multiplicative().details["pairs"] > 0


def test_phi_wider_M_over_f101():
    v = SquareZeroPhi(chain_square_zero(3, F101, 1, [2, 1, 2])).check()
    assert v, v.first()


def test_phi_rejects_non_square_zero():
    with pytest.raises(ValueError):
        SquareZeroPhi(chain_free(2))


# double dual ---------------------------------------------------------------------------

def test_double_dual_trivial():
    assert double_dual_report(trivial(), truncs=(1, 2))


def test_double_dual_square_zero():
    v = double_dual_report(chain_square_zero(1))
    assert v, v.first()
    t3, t4 = v.details["tables"][3], v.details["tables"][4]
    assert t3[(0, 0)][0] == t4[(0, 0)][0] == 1
    assert t4[(1, 0)][0] == 1 and t4[(0, 1)] == {}


def test_double_dual_levels_are_complexes():
    from koszulcat.complexes import validate
    dd = DoubleDual(chain_square_zero(1, degree=1), 3)
    for ij in dd.window.pairs():
        assert validate(dd.level(*ij)[0])
        assert dd.nu(*ij).is_chain_map()


def test_double_dual_flags_instability():
    v = double_dual_report(chain_free(2), truncs=(2,))
    assert not v
    assert "not stabilized" in v.summary()


def test_double_dual_unit_base_only():
    with pytest.raises(ValueError):
        DoubleDual(kfi(ObjectWindow.upto(2)), 2)


# randomized -------------------------------------------------------------------------------

@pytest.mark.parametrize("field", [QQ, F101], ids=["Q", "F101"])
@settings(max_examples=30)
@given(data=st.data())
def test_random_square_zero_bar_and_dual(field, data):
    w = ObjectWindow(range(data.draw(st.integers(2, 3))))
    M = data.draw(lower_bimodules(field, w, max_total=4))
    C = square_zero(M.base, M)
    for v in (simplicial_check(BarObject(C, "R", "C")), augmentation_qiso_check(C),
              bar_lemma_check(C), compare_models(C)):
        assert v, v.first()
