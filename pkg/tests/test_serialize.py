import json

import pytest
from hypothesis import given, settings, strategies as st

from koszulcat.algebra import validate_algebra
from koszulcat.complexes import ChainComplex, homology_dims, validate
from koszulcat.examples import chain_free, chain_square_zero, kfi
from koszulcat.field import GF, QQ
from koszulcat.graphs import ObjectWindow
from koszulcat.koszul import compare_models
from koszulcat.operads import binary_operad, regular_seq, truncated_com, validate_operad
from koszulcat.serialize import SerializationError, dumps, load, loads
from koszulcat.sparse import SparseMatrix

from strategies import complexes

F101 = GF(101)

BAD = ('{"data":{"d":{"1":{"entries":[[0,0,"1"]],"shape":[1,1]},"2":{"entries":[[0,0,"1"]],"shape":[1,1]}},'
       '"dims":{"0":1,"1":1,"2":1}},"field":"q","format":"koszulcat","type":"complex","version":1}\n')


@pytest.mark.parametrize("make", [
    lambda: chain_square_zero(2, degree=1),
    lambda: chain_square_zero(3, F101, 1, [2, 1, 2]),
    lambda: chain_free(2),
    lambda: kfi(ObjectWindow.upto(3)),
    lambda: regular_seq([2, 3]),
    lambda: binary_operad(1, sign=True),
    lambda: truncated_com(3, F101),
], ids=["sqz2", "sqz3-F101", "free2", "kFI3", "regular", "bin1", "com3"])
def test_round_trip_is_byte_exact(make):
    text = dumps(make())
    assert dumps(loads(text)) == text
    assert text.endswith("\n")


def test_loaded_objects_still_work():
    C = loads(dumps(kfi(ObjectWindow.upto(3))))
    assert validate_algebra(C)
    assert compare_models(C)
    assert validate_operad(loads(dumps(truncated_com(3))))


@settings(max_examples=50)
@given(C=complexes(QQ))
def test_complex_round_trip(C):
    text = dumps(C)
    D = loads(text)
    assert dumps(D) == text
    assert homology_dims(D) == homology_dims(C)


def test_invalid_complex_loads_and_is_reported():
    C = loads(BAD)
    assert isinstance(C, ChainComplex)
    v = validate(C)
    assert not v
    assert v.first() == ("degree 2", "d_1 d_2 != 0 (entry (0,0) = 1)")
    assert dumps(C) == BAD


def test_field_survives():
    one = SparseMatrix.identity(1, F101)
    C = ChainComplex({0: 1, 1: 1}, {1: one.scale(100)}, F101)
    D = loads(dumps(C))
    assert D.field == F101
    assert dumps(D) == dumps(C)


@pytest.mark.parametrize("text, where", [
    ('{"format":"koszulcat",', "line 1"),
    ('{"format":"other","version":1,"type":"complex","field":"q","data":{}}', "$.format"),
    ('{"format":"koszulcat","version":2,"type":"complex","field":"q","data":{}}', "$.version"),
    ('{"format":"koszulcat","version":1,"type":"complex","field":"p=4","data":{}}', "$.field"),
    ('{"format":"koszulcat","version":1,"type":"complex","field":"q","data":{"dims":{"0":1},'
     '"d":{"1":{"entries":[[0,0,"x"]],"shape":[1,1]}}}}', "$.data.d"),
])
def test_parse_errors_name_a_location(text, where):
    with pytest.raises(SerializationError) as e:
        loads(text)
    assert e.value.where.startswith(where)


def test_unknown_type():
    doc = json.loads(BAD)
    doc["type"] = "widget"
    with pytest.raises(SerializationError):
        loads(json.dumps(doc))


def test_file_io(tmp_path):
    p = tmp_path / "x.json"
    p.write_text(BAD)
    assert dumps(load(p)) == BAD
