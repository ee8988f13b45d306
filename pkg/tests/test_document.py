import json

import pytest

from deforma import shapes
from deforma.complex import assemble
from deforma.deform import ParallelFamily, random_first_order
from deforma.document import (DocumentError, diagram_from_json, diagram_to_json, dumps, family_to_entries, load,
                              shipped)
from deforma.linalg import Field

SHIPPED = ["dual_numbers", "functor", "bigon", "triangular_pillow", "post", "square_pillow"]


def same_diagram(D, E):
    if list(D.categories) != list(E.categories) or list(D.functors) != list(E.functors):
        return False
    if list(D.cells2) != list(E.cells2) or list(D.cells3) != list(E.cells3) or D.trivial != E.trivial:
        return False
    X, Y = assemble(D), assemble(E)
    return X.labels == Y.labels and all(X.d(n) == Y.d(n) for n in range(X.min_degree, 1))


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_documents_load_and_round_trip(name):
    doc = load(shipped(name))
    assert doc.diagram.validate() == []
    again = diagram_from_json(json.loads(dumps(diagram_to_json(doc.diagram, doc.name))))
    assert same_diagram(doc.diagram, again.diagram)
    text = shipped(name).read_text()
    assert dumps(diagram_to_json(doc.diagram, doc.name, json.loads(text)["options"])) == text


@pytest.mark.parametrize("shape", sorted(shapes.ALL))
def test_sampled_diagrams_round_trip(shape):
    f = Field(7)
    D = shapes.sample(shape, f, 3)
    E = diagram_from_json(json.loads(dumps(diagram_to_json(D)))).diagram
    assert same_diagram(D, E)


def test_family_round_trip():
    f = Field(32003)
    D = shapes.sample("triangular_pillow", f, 1)
    P = random_first_order(D, __import__("random").Random(1), order=2)
    doc = diagram_to_json(D, "t", {"order": 2, "deformation": family_to_entries(P)})
    Q = diagram_from_json(doc).family()
    assert Q.parallels == P.parallels


def test_declared_quantization():
    doc = load(shipped("dual_numbers"))
    P = doc.family()
    assert doc.order == 4 and sorted(P.parallels) == [("D", 1)]
    S = P.space("D")
    vec = P.get("D", 1)
    assert vec[S.block(("x", "x")).start] == 1 and sum(1 for v in vec if v) == 1


def test_field_override():
    doc = load(shipped("bigon"), Field(101))
    assert doc.field == Field(101)


def _doc():
    return json.loads(shipped("dual_numbers").read_text())


def test_float_scalars_rejected():
    d = _doc()
    d["categories"]["D"]["identity"]["*"]["1"] = 1.0
    with pytest.raises(DocumentError):
        diagram_from_json(d)


def test_bad_scalar_rejected():
    d = _doc()
    d["categories"]["D"]["identity"]["*"]["1"] = "one"
    with pytest.raises(DocumentError):
        diagram_from_json(d)


def test_unknown_schema_rejected():
    d = _doc()
    d["schema"] = "other/2"
    with pytest.raises(DocumentError):
        diagram_from_json(d)


def test_missing_key_rejected():
    d = _doc()
    del d["categories"]["D"]["objects"]
    with pytest.raises(DocumentError):
        diagram_from_json(d)


def test_unreadable_file(tmp_path):
    with pytest.raises(DocumentError):
        load(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(DocumentError):
        load(bad)
