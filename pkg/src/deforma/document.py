"""Reading and writing diagram documents.

A diagram document is a UTF-8 JSON object.  Every scalar is a string such as
``"3/7"``, ``"-2"`` or ``"5 mod 32003"`` so that no value ever passes
through a float.  Layout::

    {
      "schema": "deforma-diagram/1",
      "name": "dual_numbers",
      "field": "q" | "fp:P",
      "categories": {
        "D": {"objects": ["*"],
              "hom": [{"src": "*", "tgt": "*", "basis": ["1", "x"]}],
              "compose": [{"first": "x", "then": "x", "value": {"1": "0"}}],
              "identity": {"*": {"1": "1"}}}
      },
      "functors": {
        "F": {"source": "A", "target": "B", "objects": {"0": "0"},
              "arrows": {"a": {"b": "2"}}}
      },
      "cells2": {"s": {"dom": ["F"], "cod": ["G"], "components": {"0": {"e0": "1"}}}},
      "cells3": {"r": {"dom": <tree>, "cod": <tree>}},
      "options": {"max_degree": 4, "order": 2, "trivial": ["s"],
                  "association": "left",
                  "deformation": [{"cell": "D", "degree": 1, "key": ["x", "x"],
                                   "value": {"1": "1"}}]}
    }

Composition is diagrammatic: ``{"first": a, "then": b}`` gives the
coefficients of ``a`` followed by ``b``.  Functor arrows list the images of
basis arrows over the target hom basis.  Trees use the notation of
:func:`deforma.diagram.tree_from_json`.  A deformation entry fixes the
value of the parallel of ``cell`` in degree ``degree`` on one cochain key
(a list of composable basis arrows, or an object name for 2-cells); unlisted
keys are zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from importlib import resources
from pathlib import Path

from .deform import ParallelFamily, parallel_space
from .diagram import PastingDiagram, tree_from_json, tree_to_json
from .fincat import FinLinCat
from .library import functor_from_images
from .linalg import Field, FieldMismatch

SCHEMA = "deforma-diagram/1"
ASSOCIATIONS = ("left", "right")


class DocumentError(ValueError):
    """Raised for malformed or inconsistent diagram documents."""


@dataclass
class DiagramDocument:
    name: str
    diagram: PastingDiagram
    max_degree: int = 4
    order: int = 2
    association: str = "left"
    deformation: list = dc_field(default_factory=list)

    @property
    def field(self) -> Field:
        return self.diagram.field

    def family(self, order: int | None = None) -> ParallelFamily | None:
        """The declared deformation as a parallel family, or ``None`` if none is declared."""
        if not self.deformation:
            return None
        return family_from_entries(self.diagram, self.deformation, order or self.order)


def _need(obj: dict, key: str, where: str):
    if key not in obj:
        raise DocumentError(f"{where}: missing {key!r}")
    return obj[key]


def _scalars(f: Field, data, where: str):
    if not isinstance(data, dict):
        raise DocumentError(f"{where}: coefficients must be an object of label: scalar strings")
    out = {}
    for lab, c in data.items():
        if not isinstance(c, str):
            raise DocumentError(f"{where}: scalar for {lab!r} must be a string, got {c!r}")
        try:
            out[lab] = f.parse(c)
        except FieldMismatch:
            raise
        except (ValueError, ZeroDivisionError) as exc:
            raise DocumentError(f"{where}: bad scalar {c!r}: {exc}") from exc
    return out


def _category(f: Field, name: str, obj: dict) -> FinLinCat:
    where = f"category {name}"
    objects = _need(obj, "objects", where)
    hom = {}
    for h in obj.get("hom", []):
        hom[(_need(h, "src", where), _need(h, "tgt", where))] = list(_need(h, "basis", where))
    compose = {}
    for c in obj.get("compose", []):
        pair = (_need(c, "first", where), _need(c, "then", where))
        compose[pair] = _scalars(f, _need(c, "value", where), f"{where} {pair}")
    identity = {X: _scalars(f, v, f"{where} identity of {X}")
                for X, v in _need(obj, "identity", where).items()}
    try:
        return FinLinCat(name, f, objects, hom, compose, identity)
    except (ValueError, KeyError) as exc:
        raise DocumentError(f"{where}: {exc}") from exc


def diagram_from_json(doc: dict, field: Field | None = None) -> DiagramDocument:
    """Build a diagram from a parsed document; ``field`` overrides the declared field."""
    if not isinstance(doc, dict):
        raise DocumentError("a diagram document is a JSON object")
    schema = doc.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise DocumentError(f"unsupported schema {schema!r}")
    try:
        f = field or Field.from_spec(doc.get("field", "q"))
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
    D = PastingDiagram(f)
    try:
        for name, obj in doc.get("categories", {}).items():
            D.add_category(_category(f, name, obj), name)
        for name, obj in doc.get("functors", {}).items():
            where = f"functor {name}"
            src, tgt = _need(obj, "source", where), _need(obj, "target", where)
            if src not in D.categories or tgt not in D.categories:
                raise DocumentError(f"{where}: unknown category {src if src not in D.categories else tgt}")
            images = {a: _scalars(f, v, f"{where} image of {a}") for a, v in obj.get("arrows", {}).items()}
            missing = [a for a in D.categories[src].arrows if a not in images]
            if missing:
                raise DocumentError(f"{where}: no image for basis arrow {missing[0]}")
            F = functor_from_images(name, D.categories[src], D.categories[tgt],
                                    _need(obj, "objects", where), images)
            D.add_functor(F, name)
        for name, obj in doc.get("cells2", {}).items():
            where = f"2-cell {name}"
            comps = {X: _scalars(f, v, f"{where} component at {X}")
                     for X, v in _need(obj, "components", where).items()}
            for fn in list(obj.get("dom", [])) + list(obj.get("cod", [])):
                if fn not in D.functors:
                    raise DocumentError(f"{where}: unknown functor {fn}")
            D.add_cell2(name, _need(obj, "dom", where), _need(obj, "cod", where), comps)
        for name, obj in doc.get("cells3", {}).items():
            where = f"3-cell {name}"
            D.add_cell3(name, tree_from_json(_need(obj, "dom", where)), tree_from_json(_need(obj, "cod", where)))
    except FieldMismatch as exc:
        raise DocumentError(str(exc)) from exc
    except DocumentError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise DocumentError(f"{type(exc).__name__}: {exc}") from exc
    opts = doc.get("options", {})
    trivial = list(opts.get("trivial", []))
    for t in trivial:
        if t not in D.cells():
            raise DocumentError(f"trivial flag names unknown cell {t}")
    D.trivial = set(trivial)
    assoc = opts.get("association", "left")
    if assoc not in ASSOCIATIONS:
        raise DocumentError(f"association must be one of {ASSOCIATIONS}, got {assoc!r}")
    out = DiagramDocument(doc.get("name", "diagram"), D, int(opts.get("max_degree", 4)),
                          int(opts.get("order", 2)), assoc, list(opts.get("deformation", [])))
    if out.deformation:
        family_from_entries(D, out.deformation, max(e.get("degree", 1) for e in out.deformation))
    return out


def family_from_entries(D: PastingDiagram, entries: list, order: int) -> ParallelFamily:
    """Turn document deformation entries into a :class:`ParallelFamily`."""
    f = D.field
    P = ParallelFamily(D, order)
    vecs: dict = {}
    for e in entries:
        cell, k = e.get("cell"), int(e.get("degree", 1))
        if cell not in P.cells:
            raise DocumentError(f"deformation entry for unknown or undeformable cell {cell!r}")
        S = parallel_space(D, cell)
        key = e.get("key")
        key = tuple(key) if isinstance(key, list) else key
        if key not in S.index:
            raise DocumentError(f"deformation of {cell}: {key!r} is not a cochain key")
        X0, Xn = S.ends[S.index[key]]
        labels = S.target.hom_basis[(S.F.obj(X0), S.G.obj(Xn))]
        vec = vecs.setdefault((cell, k), [f.zero] * S.dim)
        sl = S.block(key)
        for lab, c in _scalars(f, e.get("value", {}), f"deformation of {cell} at {key!r}").items():
            if lab not in labels:
                raise DocumentError(f"deformation of {cell} at {key!r}: {lab!r} is not in the target hom basis")
            vec[sl.start + labels.index(lab)] = c
    for (cell, k), vec in vecs.items():
        if cell in D.trivial and any(vec):
            raise DocumentError(f"deformation entry for flagged cell {cell}")
        P.set(cell, k, vec)
    return P


def load(path: str | Path, field: Field | None = None) -> DiagramDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: invalid JSON: {exc}") from exc
    return diagram_from_json(doc, field)


def shipped(name: str) -> Path:
    """Path of a document shipped in ``deforma/data``."""
    return Path(str(resources.files("deforma").joinpath("data", f"{name}.json")))


# ---------------------------------------------------------------------------
# writing


def _coeffs(f: Field, labels, vec) -> dict:
    return {lab: f.format(v) for lab, v in zip(labels, vec) if v}


def diagram_to_json(D: PastingDiagram, name: str = "diagram", options: dict | None = None) -> dict:
    """The document of ``D``; ``diagram_from_json`` inverts it."""
    f = D.field
    cats = {}
    for cname, C in D.categories.items():
        hom = [{"src": X, "tgt": Y, "basis": list(C.hom_basis[(X, Y)])}
               for X in C.objects for Y in C.objects if C.hom_basis[(X, Y)]]
        compose = []
        for a in C.arrows:
            X, Y, i = C.arrow_index[a]
            for Z in C.objects:
                for j, b in enumerate(C.hom_basis[(Y, Z)]):
                    val = _coeffs(f, C.hom_basis[(X, Z)], C._mult[(X, Y, Z)][i, j, :])
                    if val:
                        compose.append({"first": a, "then": b, "value": val})
        ident = {X: _coeffs(f, C.hom_basis[(X, X)], C.identity_vec[X]) for X in C.objects}
        cats[cname] = {"objects": list(C.objects), "hom": hom, "compose": compose, "identity": ident}
    funs = {}
    for fname, F in D.functors.items():
        A, B = F.source, F.target
        arrows = {}
        for a in A.arrows:
            X, Y, i = A.arrow_index[a]
            col = F.arrow_map[(X, Y)][:, i]
            arrows[a] = _coeffs(f, B.hom_basis[(F.obj(X), F.obj(Y))], col)
        funs[fname] = {"source": D.cat_name(A), "target": D.cat_name(B), "objects": dict(F.object_map),
                       "arrows": arrows}
    cells2 = {}
    for cname, c in D.cells2.items():
        nat = c.nat
        B = nat.codomain_cat
        comps = {X: _coeffs(f, B.hom_basis[(nat.source.obj(X), nat.target.obj(X))], v)
                 for X, v in nat.components.items()}
        cells2[cname] = {"dom": list(c.dom), "cod": list(c.cod), "components": comps}
    cells3 = {cname: {"dom": tree_to_json(c.dom), "cod": tree_to_json(c.cod)} for cname, c in D.cells3.items()}
    opts = dict(options or {})
    if D.trivial:
        opts["trivial"] = sorted(D.trivial)
    return {"schema": SCHEMA, "name": name, "field": f.spec, "categories": cats, "functors": funs,
            "cells2": cells2, "cells3": cells3, "options": opts}


def family_to_entries(P: ParallelFamily) -> list:
    """Deformation entries of a family (nonzero coefficients only)."""
    f = P.field
    out = []
    for (cell, k), vec in sorted(P.parallels.items()):
        S = P.space(cell)
        for key, (X0, Xn) in zip(S.keys, S.ends):
            labels = S.target.hom_basis[(S.F.obj(X0), S.G.obj(Xn))]
            val = _coeffs(f, labels, vec[S.block(key)])
            if val:
                out.append({"cell": cell, "degree": k, "key": list(key) if isinstance(key, tuple) else key,
                            "value": val})
    return out


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False) + "\n"
