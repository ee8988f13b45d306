"""Pasting diagrams of linear categories, functors and natural transformations.

A pasting diagram has categories (0-cells), functors (1-cells), 2-cells
``sigma: P => Q`` between composable paths of functors, and 3-cells
asserting that two pasting composites of 2-cells agree.  Each side of a
3-cell is a :class:`CompositionTree` built from

* ``Leaf(name)``           a 2-cell of the diagram,
* ``Vert(first, second)``  vertical composite (first, then second),
* ``Post(tree, path)``     whiskering by a path of functors applied afterwards,
* ``Pre(path, tree)``      whiskering by a path of functors applied beforehand.

Paths are tuples of functor names in the order they are applied.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence, Union

from .fincat import (FinLinCat, LinFunctor, NatTrans, Violation, composite,
                     nat_equal, validate_category, validate_functor, validate_nat,
                     vertical_composite, whisker_post, whisker_pre)
from .linalg import Field


class InvalidDiagram(ValueError):
    """Raised for structurally broken diagrams (dangling names, bad boundaries)."""


class TreeBoundaryMismatch(ValueError):
    """Raised when a composition tree does not typecheck against its cells."""


@dataclass(frozen=True)
class Leaf:
    cell: str

    def __str__(self):
        return self.cell


@dataclass(frozen=True)
class Vert:
    first: "Tree"
    second: "Tree"

    def __str__(self):
        return f"({self.first} ; {self.second})"


@dataclass(frozen=True)
class Post:
    tree: "Tree"
    path: tuple

    def __str__(self):
        return f"{'.'.join(self.path)}[{self.tree}]"


@dataclass(frozen=True)
class Pre:
    path: tuple
    tree: "Tree"

    def __str__(self):
        return f"[{self.tree}]{'.'.join(self.path)}"


Tree = Union[Leaf, Vert, Post, Pre]
CompositionTree = Tree


def tree_from_json(obj) -> Tree:
    """Parse ``"s"``, ``{"vert": [t1, t2, ...]}``, ``{"post": [t, ["H"]]}``, ``{"pre": [["V"], t]}``."""
    if isinstance(obj, str):
        return Leaf(obj)
    if isinstance(obj, dict) and len(obj) == 1:
        (op, args), = obj.items()
        if op == "vert":
            parts = [tree_from_json(a) for a in args]
            if len(parts) < 2:
                raise ValueError("vert needs at least two parts")
            t = parts[0]
            for p in parts[1:]:
                t = Vert(t, p)
            return t
        if op == "post":
            return Post(tree_from_json(args[0]), tuple(args[1]))
        if op == "pre":
            return Pre(tuple(args[0]), tree_from_json(args[1]))
    raise ValueError(f"cannot parse composition tree {obj!r}")


def tree_to_json(t: Tree):
    if isinstance(t, Leaf):
        return t.cell
    if isinstance(t, Vert):
        return {"vert": [tree_to_json(t.first), tree_to_json(t.second)]}
    if isinstance(t, Post):
        return {"post": [tree_to_json(t.tree), list(t.path)]}
    return {"pre": [list(t.path), tree_to_json(t.tree)]}


def tree_leaves(t: Tree) -> list[str]:
    if isinstance(t, Leaf):
        return [t.cell]
    if isinstance(t, Vert):
        return tree_leaves(t.first) + tree_leaves(t.second)
    return tree_leaves(t.tree)


def tree_whiskers(t: Tree) -> list[str]:
    if isinstance(t, Leaf):
        return []
    if isinstance(t, Vert):
        return tree_whiskers(t.first) + tree_whiskers(t.second)
    return list(t.path) + tree_whiskers(t.tree)


@dataclass
class Cell2:
    name: str
    dom: tuple
    cod: tuple
    nat: NatTrans


@dataclass
class Cell3:
    name: str
    dom: Tree
    cod: Tree


@dataclass
class PastingDiagram:
    """A pasting diagram; build it with the ``add_*`` methods."""

    field: Field
    categories: dict = dc_field(default_factory=dict)
    functors: dict = dc_field(default_factory=dict)
    cells2: dict = dc_field(default_factory=dict)
    cells3: dict = dc_field(default_factory=dict)
    trivial: set = dc_field(default_factory=set)

    # -- construction ----------------------------------------------------
    def _fresh(self, name: str):
        if name in self.categories or name in self.functors or name in self.cells2 or name in self.cells3:
            raise InvalidDiagram(f"cell name {name!r} used twice")

    def add_category(self, c: FinLinCat, name: str | None = None) -> FinLinCat:
        name = name or c.name
        self._fresh(name)
        if c.field != self.field:
            raise InvalidDiagram(f"category {name} is over {c.field}, diagram over {self.field}")
        self.categories[name] = c
        return c

    def add_functor(self, F: LinFunctor, name: str | None = None) -> LinFunctor:
        name = name or F.name
        self._fresh(name)
        if self.cat_name(F.source) is None or self.cat_name(F.target) is None:
            raise InvalidDiagram(f"functor {name} joins categories not in the diagram")
        self.functors[name] = F
        return F

    def add_cell2(self, name: str, dom: Sequence[str], cod: Sequence[str], components: dict | None = None,
                  nat: NatTrans | None = None, trivial: bool = False) -> Cell2:
        """Add ``name: dom => cod``; give either raw ``components`` or a ready :class:`NatTrans`."""
        self._fresh(name)
        dom, cod = tuple(dom), tuple(cod)
        P, Q = self.path_functor(dom), self.path_functor(cod)
        if P.source is not Q.source or P.target is not Q.target:
            raise InvalidDiagram(f"2-cell {name}: paths {dom} and {cod} are not parallel")
        if nat is None:
            nat = NatTrans(name, P, Q, components)
        elif nat.source is not P or nat.target is not Q:
            nat = NatTrans(name, P, Q, nat.components)
        cell = Cell2(name, dom, cod, nat)
        self.cells2[name] = cell
        if trivial:
            self.trivial.add(name)
        return cell

    def add_cell3(self, name: str, dom: Tree, cod: Tree) -> Cell3:
        self._fresh(name)
        cell = Cell3(name, dom, cod)
        d1, c1 = self.tree_type(dom)
        d2, c2 = self.tree_type(cod)
        if (d1, c1) != (d2, c2):
            raise TreeBoundaryMismatch(f"3-cell {name}: sides have boundaries {d1}=>{c1} and {d2}=>{c2}")
        self.cells3[name] = cell
        return cell

    # -- queries ---------------------------------------------------------
    def cat_name(self, c: FinLinCat) -> str | None:
        for k, v in self.categories.items():
            if v is c:
                return k
        return None

    def functor_ends(self, name: str) -> tuple[str, str]:
        F = self.functors[name]
        return self.cat_name(F.source), self.cat_name(F.target)

    def path_ends(self, path: Sequence[str]) -> tuple[str, str]:
        if not path:
            raise InvalidDiagram("empty path")
        return self.functor_ends(path[0])[0], self.functor_ends(path[-1])[1]

    def path_functor(self, path: Sequence[str]) -> LinFunctor:
        """The composite of a path, built by a left fold so equal paths give the same object."""
        if not path:
            raise InvalidDiagram("empty path")
        try:
            fs = [self.functors[p] for p in path]
        except KeyError as e:
            raise InvalidDiagram(f"unknown functor {e.args[0]!r}") from None
        out = fs[0]
        for F in fs[1:]:
            if out.target is not F.source:
                raise InvalidDiagram(f"path {tuple(path)} is not composable")
            out = composite(out, F)
        return out

    def cells(self) -> list[str]:
        """All cell names in summand order: categories, functors, 2-cells, 3-cells."""
        return list(self.categories) + list(self.functors) + list(self.cells2) + list(self.cells3)

    def dim_of(self, name: str) -> int:
        if name in self.categories:
            return 0
        if name in self.functors:
            return 1
        if name in self.cells2:
            return 2
        if name in self.cells3:
            return 3
        raise KeyError(name)

    @property
    def top_dim(self) -> int:
        return 3 if self.cells3 else 2

    def kind_of(self, name: str) -> tuple[LinFunctor, LinFunctor]:
        """The pair of functors whose bimodule cochains house the cell's summand."""
        d = self.dim_of(name)
        if d == 0:
            I = self.categories[name].identity_functor
            return I, I
        if d == 1:
            F = self.functors[name]
            return F, F
        if d == 2:
            c = self.cells2[name]
            return self.path_functor(c.dom), self.path_functor(c.cod)
        dom, cod = self.tree_type(self.cells3[name].dom)
        return self.path_functor(dom), self.path_functor(cod)

    # -- trees -------------------------------------------------------------
    def tree_type(self, t: Tree) -> tuple[tuple, tuple]:
        if isinstance(t, Leaf):
            if t.cell not in self.cells2:
                raise TreeBoundaryMismatch(f"unknown 2-cell {t.cell!r}")
            c = self.cells2[t.cell]
            return c.dom, c.cod
        if isinstance(t, Vert):
            p, q = self.tree_type(t.first)
            q2, r = self.tree_type(t.second)
            if q != q2:
                raise TreeBoundaryMismatch(f"vertical composite {t}: {q} != {q2}")
            return p, r
        if isinstance(t, Post):
            p, q = self.tree_type(t.tree)
            path = tuple(t.path)
            if self.path_ends(p)[1] != self.path_ends(path)[0]:
                raise TreeBoundaryMismatch(f"cannot whisker {t.tree} by {path}")
            return p + path, q + path
        if isinstance(t, Pre):
            p, q = self.tree_type(t.tree)
            path = tuple(t.path)
            if self.path_ends(path)[1] != self.path_ends(p)[0]:
                raise TreeBoundaryMismatch(f"cannot whisker {t.tree} by {path}")
            return path + p, path + q
        raise TypeError(t)

    def tree_value(self, t: Tree) -> NatTrans:
        """The pasting composite as a natural transformation between path composites."""
        if isinstance(t, Leaf):
            return self.cells2[t.cell].nat
        p, q = self.tree_type(t)
        P, Q = self.path_functor(p), self.path_functor(q)
        if isinstance(t, Vert):
            v = vertical_composite(self.tree_value(t.first), self.tree_value(t.second))
            return NatTrans(str(t), P, Q, v.components)
        if isinstance(t, Post):
            return whisker_post(self.tree_value(t.tree), self.path_functor(t.path), P, Q, name=str(t))
        return whisker_pre(self.path_functor(t.path), self.tree_value(t.tree), P, Q, name=str(t))

    # -- validation ------------------------------------------------------
    def validate(self) -> list[Violation]:
        out: list[Violation] = []
        for c in self.categories.values():
            out += validate_category(c)
        for F in self.functors.values():
            out += validate_functor(F)
        for c in self.cells2.values():
            out += validate_nat(c.nat)
        for c in self.cells3.values():
            try:
                a, b = self.tree_value(c.dom), self.tree_value(c.cod)
            except (TreeBoundaryMismatch, InvalidDiagram) as e:
                out.append(Violation("3-cell-boundary", (c.name,), str(e)))
                continue
            if not nat_equal(a, b):
                bad = [X for X in a.domain_cat.objects
                       if list(a.components[X]) != list(b.components[X])]
                out.append(Violation("3-cell-relation", (c.name, bad[0]), "pasting composites differ"))
        for name in self.trivial:
            if name not in self.cells2 and name not in self.cells3 and name not in self.functors \
                    and name not in self.categories:
                out.append(Violation("trivial-flag", (name,), "flag names no cell"))
        return out

    def sub_diagram(self, names: Sequence[str]) -> "PastingDiagram":
        """The diagram on the given cells (which must be closed under boundaries)."""
        d = PastingDiagram(self.field)
        keep = set(names)
        for k, c in self.categories.items():
            if k in keep:
                d.categories[k] = c
        for k, F in self.functors.items():
            if k in keep:
                d.functors[k] = F
        for k, c in self.cells2.items():
            if k in keep:
                d.cells2[k] = c
        for k, c in self.cells3.items():
            if k in keep:
                d.cells3[k] = c
        d.trivial = {t for t in self.trivial if t in keep}
        d.check_closed()
        return d

    def check_closed(self):
        for k in self.functors:
            a, b = self.functor_ends(k)
            if a is None or b is None:
                raise InvalidDiagram(f"functor {k} has an endpoint outside the diagram")
        for c in self.cells2.values():
            for f in c.dom + c.cod:
                if f not in self.functors:
                    raise InvalidDiagram(f"2-cell {c.name} uses functor {f} outside the diagram")
        for c in self.cells3.values():
            for t in (c.dom, c.cod):
                for leaf in tree_leaves(t):
                    if leaf not in self.cells2:
                        raise InvalidDiagram(f"3-cell {c.name} uses 2-cell {leaf} outside the diagram")
                for w in tree_whiskers(t):
                    if w not in self.functors:
                        raise InvalidDiagram(f"3-cell {c.name} whiskers by {w} outside the diagram")

    def __repr__(self):
        return (f"PastingDiagram({len(self.categories)} categories, {len(self.functors)} functors, "
                f"{len(self.cells2)} 2-cells, {len(self.cells3)} 3-cells)")
