"""Loading tiled spheres from the line-based fixture files shipped with the package.

File format (``#`` starts a comment)::

    name <id>
    description <text>
    shape <shape name from deforma.shapes>
    summand <cell whose axiom the sphere verifies>
    var X Y : A                 object variables
    var a : X -> Y              arrow variable
    key a b                     the variables forming a cochain key, in order
    source <vertex>
    target <vertex>
    edge <name> <src> <tgt> <formula>
    face <name> axiom <cell> : <dom edges> | <cod edges>
    face <name> trivial : <dom edges> | <cod edges>
    equator <path> | <path>
    hemisphere <name> <faces...>
"""

from __future__ import annotations

from importlib import resources

from .. import shapes
from ..diagram import PastingDiagram
from ..linalg import Field
from .labeling import Face, TiledSphere
from .terms import Signature, WffSyntaxError, parse_declaration, parse_wff

FIXTURES = ("cube_assoc", "fig1_functor", "fig2_naturality", "fig3_nat_from_composition",
            "fig4_2composition", "fig5_post1comp", "fig6_pre1comp")


class FixtureError(ValueError):
    """Raised on a malformed fixture file."""


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}")
    return resources.files("deforma").joinpath("fixtures", f"{name}.txt").read_text()


def parse_sphere(text: str, D: PastingDiagram | None = None, field: Field | None = None,
                 seed: int = 0) -> TiledSphere:
    """Parse fixture text.  Without ``D`` a diagram of the declared shape is sampled."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    head = {}
    for line in lines:
        word, _, rest = line.partition(" ")
        if word in ("name", "description", "shape", "summand", "source", "target"):
            head[word] = rest.strip()
    if D is None:
        if "shape" not in head:
            raise FixtureError("fixture declares no shape")
        D = shapes.sample(head["shape"], field or Field(), seed)
    sig = Signature(D)
    variables: dict = {}
    edges, faces, texts = {}, {}, {}
    hemis, equator, key = [], None, []
    for n, line in enumerate(lines, 1):
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if word == "var":
                parse_declaration(rest, sig, variables)
            elif word == "key":
                key = rest.split()
            elif word == "edge":
                name, s, t, formula = rest.split(None, 3)
                if name in edges:
                    raise FixtureError(f"edge {name} declared twice")
                edges[name] = (s, t, parse_wff(formula, sig, variables))
                texts[name] = formula
            elif word == "face":
                left, _, right = rest.partition(":")
                parts = left.split()
                name, kind = parts[0], parts[1]
                if kind not in ("axiom", "trivial"):
                    raise FixtureError(f"face kind must be axiom or trivial, got {kind}")
                dom, _, cod = right.partition("|")
                faces[name] = Face(name, dom.split(), cod.split(), kind,
                                   parts[2] if kind == "axiom" and len(parts) > 2 else None)
            elif word == "hemisphere":
                parts = rest.split()
                hemis.append((parts[0], parts[1:]))
            elif word == "equator":
                a, _, b = rest.partition("|")
                equator = (a.split(), b.split())
        except (WffSyntaxError, TypeError, ValueError) as exc:
            raise FixtureError(f"line {n}: {exc}") from exc
    for f in faces.values():
        for e in f.dom + f.cod:
            if e not in edges:
                raise FixtureError(f"face {f.name} uses unknown edge {e}")
    if equator is None or len(hemis) != 2:
        raise FixtureError("a sphere needs an equator and two hemispheres")
    for e in key:
        if e not in variables:
            raise FixtureError(f"key variable {e} is not declared")
    return TiledSphere(name=head.get("name", "sphere"), D=D, variables=variables, edges=edges,
                       faces=faces, hemispheres=hemis, equator=equator,
                       source=head.get("source", ""), target=head.get("target", ""),
                       shape=head.get("shape", ""), description=head.get("description", ""),
                       summand=head.get("summand"), key=key, texts=texts)


def load_fixture(name: str, D: PastingDiagram | None = None, field: Field | None = None,
                 seed: int = 0) -> TiledSphere:
    return parse_sphere(fixture_text(name), D, field, seed)
