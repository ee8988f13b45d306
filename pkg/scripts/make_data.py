"""Regenerate the diagram documents shipped in src/deforma/data."""

from pathlib import Path

from deforma import shapes
from deforma.diagram import PastingDiagram
from deforma.document import diagram_to_json, dumps
from deforma.library import dual_numbers
from deforma.linalg import Field

OUT = Path(__file__).resolve().parent.parent / "src" / "deforma" / "data"

SAMPLES = {
    # document name: (shape, field, seed)
    "functor": ("functor", Field(None), 0),
    "bigon": ("bigon", Field(None), 0),
    "triangular_pillow": ("triangular_pillow", Field(None), 0),
    "post": ("post", Field(None), 0),
    "square_pillow": ("square_pillow", Field(None), 0),
}


def dual_document() -> dict:
    """The dual numbers with the quantization mu^(1)(x, x) = 1, that is k[x]/(x^2 - eps)."""
    D = PastingDiagram(Field(None))
    D.add_category(dual_numbers(D.field, "D"), "D")
    deformation = [{"cell": "D", "degree": 1, "key": ["x", "x"], "value": {"1": "1"}}]
    return diagram_to_json(D, "dual_numbers", {"max_degree": 4, "order": 4, "deformation": deformation})


def main():
    OUT.mkdir(exist_ok=True)
    (OUT / "dual_numbers.json").write_text(dumps(dual_document()), encoding="utf-8")
    for name, (shape, field, seed) in SAMPLES.items():
        D = shapes.sample(shape, field, seed)
        doc = diagram_to_json(D, name, {"max_degree": 4, "order": 2})
        (OUT / f"{name}.json").write_text(dumps(doc), encoding="utf-8")


if __name__ == "__main__":
    main()
