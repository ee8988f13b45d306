"""Whiskered polygons, tiled spheres and the well-formedness conditions on their labels.

Every edge carries a formula.  Along a directed path the labels are
rewritten into *replacement labels*: each one is an equivalent formula
whose non-variable arrow arguments are replacement labels of earlier edges
on the same path.  At the end of a maximal path the final replacement label
contains every earlier one exactly once, so the edges of the path are in
bijection with the operation occurrences of the final formula.

The conditions checked by :func:`check_labeling`:

* WF0: no edge is labelled by a variable, and every label is arrow-valued.
* WF1: every path admits replacement labels.  Labels whose proper arrow
  subterms are variables are kept unchanged.
* WF2: along every maximal path the final replacement label has exactly the
  earlier replacement labels as its non-variable arrow subterms.
* WF3: faces ending at the final vertex have equivalent final labels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import NamedTuple

from ..diagram import PastingDiagram
from .terms import (App, Evaluator, Node, Signature, Term, Var, _equivalent, variables_of)


class LabelingError(ValueError):
    """Raised when a path admits no replacement labels."""


class Issue(NamedTuple):
    rule: str
    where: tuple
    message: str

    def __str__(self):
        return f"{self.rule} at {'/'.join(self.where)}: {self.message}"


@dataclass
class Face:
    name: str
    dom: list
    cod: list
    kind: str = "axiom"           # "axiom" or "trivial"
    axiom: str | None = None      # cell whose axiom the face expresses


@dataclass
class WhiskeredPolygon:
    """A polygon ``dom`` / ``cod`` with common whisker paths before and after it."""

    labels: dict                   # edge -> Term
    dom_whisker: list
    dom: list
    cod: list
    cod_whisker: list
    name: str = "polygon"
    sign: int = 1
    kind: str = "axiom"
    axiom: str | None = None

    @property
    def f_path(self) -> list:
        return self.dom_whisker + self.dom + self.cod_whisker

    @property
    def g_path(self) -> list:
        return self.dom_whisker + self.cod + self.cod_whisker

    @property
    def face_edges(self) -> set:
        return set(self.dom) | set(self.cod)

    def variables(self) -> set:
        out = set()
        for e in self.f_path + self.cod:
            out |= variables_of(self.labels[e])
        return out


@dataclass
class TiledSphere:
    """A tiling of a sphere by faces, split into two hemispheres along an equator.

    ``equator`` holds the two boundary paths from ``source`` to ``target``;
    each hemisphere is swept from ``equator[0]`` to ``equator[1]``.
    """

    name: str
    D: PastingDiagram
    variables: dict
    edges: dict                    # name -> (src vertex, tgt vertex, Term)
    faces: dict                    # name -> Face
    hemispheres: list              # [(name, [face names])] x 2
    equator: tuple
    source: str
    target: str
    shape: str = ""
    description: str = ""
    summand: str | None = None
    key: list = dc_field(default_factory=list)
    texts: dict = dc_field(default_factory=dict)

    @property
    def labels(self) -> dict:
        return {e: t for e, (_, _, t) in self.edges.items()}

    def out_edges(self, v) -> list:
        return [e for e, (s, _, _) in self.edges.items() if s == v]

    def maximal_paths(self) -> list[list[str]]:
        out = []

        def walk(v, acc):
            if v == self.target:
                out.append(list(acc))
                return
            for e in self.out_edges(v):
                acc.append(e)
                walk(self.edges[e][1], acc)
                acc.pop()

        walk(self.source, [])
        return out

    def variables_used(self) -> set:
        out = set()
        for t in self.labels.values():
            out |= variables_of(t)
        return out


class Labeler:
    """Computes replacement labels, caching equivalence tests and finished paths."""

    def __init__(self, D: PastingDiagram, labels: dict):
        self.D = D
        self.labels = labels
        self.ev = Evaluator(D)
        self.sig: Signature = self.ev.sig
        self._eq: dict = {}
        self._paths: dict = {}

    def equivalent(self, u: Term, v: Term) -> bool:
        key = (u, v)
        r = self._eq.get(key)
        if r is None:
            r = variables_of(u) == variables_of(v) and _equivalent(u, v, self.D, self.ev)
            self._eq[key] = self._eq[(v, u)] = r
        return r

    # -- candidate replacement labels -------------------------------------
    def _direct(self, lam: App, pool: list):
        """Reuse ``lam`` itself, matching its arrow arguments against pool entries."""
        kids, used = [], []
        for a in lam.args:
            if isinstance(a, App) and self.sig.is_arrow(a):
                hit = next((i for i, n in enumerate(pool) if i not in used and n.term == a), None)
                if hit is None:
                    return None
                used.append(hit)
                kids.append(pool[hit])
            else:
                kids.append(a)
        return kids, used

    def _object_terms(self, lam: Term, pool: list) -> list:
        seen = []

        def add(t):
            if t not in seen:
                seen.append(t)

        for t in [lam] + [n.term for n in pool]:
            ty = self.sig.type_of(t)
            for s in (getattr(ty, "src", None), getattr(ty, "tgt", None)):
                while s is not None:
                    add(s)
                    s = s.args[0] if isinstance(s, App) else None
        for v in variables_of(lam):
            if v.sort == "obj":
                add(v)
        return seen

    def candidates(self, edge: str, lam: Term, pool: list):
        """Possible replacement labels for ``lam`` given the unconsumed earlier ones."""
        sig = self.sig
        if not isinstance(lam, App):
            return
        only_vars = all(not (isinstance(a, App) and sig.is_arrow(a)) for a in lam.args)
        d = self._direct(lam, pool)
        if d is not None:
            yield Node(lam, edge, d[0]), d[1]
        if only_vars:
            return
        ty = sig.type_of(lam)
        arrow_vars = sorted((v for v in variables_of(lam) if v.sort == "arr"), key=lambda v: v.name)
        arrows = [("pool", i) for i in range(len(pool))] + [("var", v) for v in arrow_vars]
        objects = self._object_terms(lam, pool)
        for op in sig.ops():
            kind, _ = sig.kind(op)
            if kind == "m":
                choices = [list(p) for p in itertools.permutations(arrows, 2)]
            elif kind == "functor":
                choices = [[a] for a in arrows] + [[("obj", o)] for o in objects]
            else:
                choices = [[("obj", o)] for o in objects]
            for ch in choices:
                args, kids, used = [], [], []
                for tag, x in ch:
                    if tag == "pool":
                        used.append(x)
                        args.append(pool[x].term)
                        kids.append(pool[x])
                    else:
                        args.append(x)
                        kids.append(x)
                cand = App(op, tuple(args))
                if d is not None and cand == lam and len(used) == len(d[1]):
                    continue
                try:
                    cty = sig.type_of(cand)
                except TypeError:
                    continue
                if cty != ty or not self.equivalent(cand, lam):
                    continue
                yield Node(cand, edge, kids), used

    # -- paths --------------------------------------------------------------
    def replace(self, path: list[str], require_total: bool = True) -> list[Node]:
        """Replacement labels along ``path``; raises :class:`LabelingError` if none exist.

        With ``require_total`` the final label must consume all earlier ones (WF2).
        """
        key = (tuple(path), require_total)
        if key in self._paths:
            return self._paths[key]
        best = [0]

        def dfs(i, pool, acc):
            if i == len(path):
                return list(acc) if (not require_total or len(pool) <= 1) else None
            best[0] = max(best[0], i)
            lam = self.labels[path[i]]
            for node, used in self.candidates(path[i], lam, pool):
                rest = [n for j, n in enumerate(pool) if j not in used] + [node]
                acc.append(node)
                r = dfs(i + 1, rest, acc)
                if r is not None:
                    return r
                acc.pop()
            return None

        out = dfs(0, [], [])
        if out is None:
            if require_total and self._try(path):
                raise LabelingError(f"WF2: the final label along {' '.join(path)} does not use every earlier label")
            raise LabelingError(f"WF1: no replacement label for edge {path[best[0]]} along {' '.join(path)}")
        self._paths[key] = out
        return out

    def _try(self, path) -> bool:
        try:
            self.replace(path, require_total=False)
            return True
        except LabelingError:
            return False

    def final_tree(self, path: list[str]) -> Node:
        return self.replace(path)[-1]


def _polygon_paths(obj) -> tuple[list[list[str]], list[tuple[str, Term, Term]]]:
    if isinstance(obj, TiledSphere):
        pairs = []
        for f in obj.faces.values():
            if obj.edges[f.dom[-1]][1] == obj.target:
                pairs.append((f.name, obj.edges[f.dom[-1]][2], obj.edges[f.cod[-1]][2]))
        return obj.maximal_paths(), pairs
    pairs = []
    if not obj.cod_whisker:
        pairs.append((obj.name, obj.labels[obj.dom[-1]], obj.labels[obj.cod[-1]]))
    return [obj.f_path, obj.g_path], pairs


@dataclass
class LabelingReport:
    issues: list
    paths: int

    @property
    def ok(self) -> bool:
        return not self.issues

    def to_json(self) -> dict:
        return {"ok": self.ok, "paths": self.paths, "issues": [str(i) for i in self.issues]}


def check_labeling(obj, D: PastingDiagram | None = None, labeler: Labeler | None = None) -> LabelingReport:
    """Check WF0 to WF3 for a :class:`TiledSphere` or a :class:`WhiskeredPolygon`."""
    D = D or getattr(obj, "D", None)
    labels = obj.labels
    lab = labeler or Labeler(D, labels)
    issues = []
    for e, t in labels.items():
        if isinstance(t, Var):
            issues.append(Issue("WF0", (e,), f"edge labelled by the variable {t}"))
        elif not lab.sig.is_arrow(t):
            issues.append(Issue("WF0", (e,), f"label {t} is not arrow-valued"))
    if issues:
        return LabelingReport(issues, 0)
    paths, pairs = _polygon_paths(obj)
    for p in paths:
        try:
            lab.replace(p)
        except LabelingError as exc:
            rule = str(exc).split(":", 1)[0]
            issues.append(Issue(rule, tuple(p), str(exc).split(": ", 1)[1]))
    for name, u, v in pairs:
        if not lab.equivalent(u, v):
            issues.append(Issue("WF3", (name,), f"final labels {u} and {v} are not equivalent"))
    return LabelingReport(issues, len(paths))
