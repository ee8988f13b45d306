"""Fine division of pasting diagrams and the kernel complex that classifies their deformations.

A diagram is finely divided when every 2-cell is a bigon or an identity
triangle and every 3-cell has one of a few small shapes.  :func:`fine_divide`
subdivides an arbitrary diagram into such a form.  Each composite path of
functors gets a composite edge, filled by identity triangles that are flagged
as trivially deformed.  Each 2-cell becomes a bigon between composite edges.
Each 3-cell is cut into pillows, one for every composition node of its trees.

Deformations of the subdivided diagram that keep the flagged cells fixed are
cocycles of ``ker(Phi)`` (:func:`build_phi`).  :func:`kernel_iso_check` builds
explicit chain maps between the normalized deformation complex of the
original diagram and the normalized part of that kernel, and tests how far
they are inverse to each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import numpy as np

from .complex import (BlockMap, GradedComplex, Op, Summand, assemble, cat_kind, composite_row,
                      deformation_degree, ident_op, nat_post_op, nat_pre_op, path_derivative,
                      pull_op, push_op)
from .deform import SubComplex, flag_kernel
from .diagram import Leaf, PastingDiagram, Post, Pre, Tree, Vert, tree_leaves
from .fincat import Violation, identity_nat
from .linalg import ExactMatrix, NoSolution, solve

ASSOCIATIONS = ("left", "right")
ORIENTATIONS = ("composands", "composite")


class NotFinelyDivided(ValueError):
    """Raised when an operation needs a finely divided diagram."""


class IsoFailure(AssertionError):
    """Raised by :meth:`IsoReport.check` with the first failing comparison."""


# ---------------------------------------------------------------------------
# recognising finely divided diagrams


def _is_bigon(c) -> bool:
    return len(c.dom) == 1 and len(c.cod) == 1


def _is_identity_triangle(D: PastingDiagram, name: str) -> bool:
    c = D.cells2.get(name)
    if c is None or name not in D.trivial:
        return False
    if sorted((len(c.dom), len(c.cod))) != [1, 2]:
        return False
    s = c.nat
    if s.source is not s.target:
        return False
    B = s.codomain_cat
    return all(np.array_equal(s.components[X], B.identity_vec[s.source.obj(X)])
               for X in s.domain_cat.objects)


def _square_side(c) -> str | None:
    """``"post"`` for ``[F, H] => [G, H]``, ``"pre"`` for ``[F, G] => [F, H]``."""
    if len(c.dom) != 2 or len(c.cod) != 2:
        return None
    if c.dom[1] == c.cod[1]:
        return "post"
    if c.dom[0] == c.cod[0]:
        return "pre"
    return None


def _nodes(t: Tree) -> list[Tree]:
    if isinstance(t, Leaf):
        return [t]
    if isinstance(t, Vert):
        return [t] + _nodes(t.first) + _nodes(t.second)
    return [t] + _nodes(t.tree)


def three_cell_form(D: PastingDiagram, name: str) -> str | None:
    """Which allowed shape a 3-cell has, or ``None``.

    The shapes are: bigonal pillow, triangular pillow, a cell between two
    triangulated disks of identity triangles, the two equal-whiskering cells
    (a whiskered bigon against a square), and the two fat cells built from a
    whiskered bigon, one more bigon and two identity triangles.  Every shape is
    accepted in either orientation.
    """
    c = D.cells3[name]
    bigon = lambda n: _is_bigon(D.cells2[n])  # noqa: E731
    tri = lambda n: _is_identity_triangle(D, n)  # noqa: E731
    leaves = tree_leaves(c.dom) + tree_leaves(c.cod)
    if all(tri(n) for n in leaves):
        return "trivial"
    for a, b in ((c.dom, c.cod), (c.cod, c.dom)):
        if isinstance(b, Leaf):
            if isinstance(a, Leaf) and bigon(a.cell) and bigon(b.cell):
                return "bigonal"
            if isinstance(a, Vert) and isinstance(a.first, Leaf) and isinstance(a.second, Leaf) \
                    and bigon(a.first.cell) and bigon(a.second.cell) and bigon(b.cell):
                return "triangular"
            side = _square_side(D.cells2[b.cell])
            if isinstance(a, Post) and isinstance(a.tree, Leaf) and len(a.path) == 1 \
                    and bigon(a.tree.cell) and side == "post":
                return "equalspost"
            if isinstance(a, Pre) and isinstance(a.tree, Leaf) and len(a.path) == 1 \
                    and bigon(a.tree.cell) and side == "pre":
                return "equalspre"
    whisk = [n for n in _nodes(c.dom) + _nodes(c.cod) if isinstance(n, (Post, Pre))]
    others = [n for n in _nodes(c.dom) + _nodes(c.cod) if isinstance(n, Vert)]
    if len(whisk) == 1 and len(leaves) == 4 and len(others) == 2:
        w = whisk[0]
        if isinstance(w.tree, Leaf) and len(w.path) == 1 and bigon(w.tree.cell):
            rest = list(leaves)
            rest.remove(w.tree.cell)
            if sum(tri(n) for n in rest) == 2 and sum(bigon(n) for n in rest) == 1 \
                    and isinstance(c.dom, Vert) and isinstance(c.cod, Vert):
                return "fatpost" if isinstance(w, Post) else "fatpre"
    return None


def finely_divided_violations(D: PastingDiagram) -> list[Violation]:
    """Reasons why ``D`` is not finely divided (empty when it is)."""
    out = []
    forms = {n: three_cell_form(D, n) for n in D.cells3}
    square_ok = set()
    for n, form in forms.items():
        if form in ("equalspost", "equalspre"):
            c = D.cells3[n]
            for t in (c.dom, c.cod):
                if isinstance(t, Leaf) and _square_side(D.cells2[t.cell]):
                    square_ok.add(t.cell)
    for n, c in D.cells2.items():
        if _is_bigon(c) or _is_identity_triangle(D, n) or n in square_ok:
            continue
        out.append(Violation("2-cell", (n,), "neither a bigon nor a flagged identity triangle"))
    for n, form in forms.items():
        if form is None:
            out.append(Violation("3-cell", (n,), "not one of the allowed pillow shapes"))
    return out


def is_finely_divided(D: PastingDiagram) -> bool:
    return not finely_divided_violations(D)


# ---------------------------------------------------------------------------
# the construction


@dataclass
class FinelyDividedDiagram:
    """The subdivided diagram plus the bookkeeping that links it to the original.

    ``provenance`` maps every cell of ``diagram`` to the cell of ``source`` it
    comes from (itself for kept cells).  ``inserted`` lists the new cells.
    ``edges`` maps atom paths to composite edges; ``nodes`` maps the string of
    a composition node to its bigon and pillow; ``trees`` holds, for each
    subdivided 3-cell, the two trees (rebracketed to match the subdivision).
    """

    source: PastingDiagram
    diagram: PastingDiagram
    association: str = "left"
    orientation: str = "composands"
    provenance: dict = dc_field(default_factory=dict)
    inserted: list = dc_field(default_factory=list)
    edges: dict = dc_field(default_factory=dict)
    triangles: dict = dc_field(default_factory=dict)
    nodes: dict = dc_field(default_factory=dict)
    trees: dict = dc_field(default_factory=dict)
    trivial3: list = dc_field(default_factory=list)

    @property
    def pillows(self) -> list[str]:
        return [rec[1] for rec in self.nodes.values()]

    def summary(self) -> dict:
        return {"association": self.association, "orientation": self.orientation,
                "edges": len(self.edges), "triangles": len(self.triangles),
                "bigons": len(self.nodes), "pillows": len(self.nodes),
                "trivial_3_cells": len(self.trivial3), "inserted": list(self.inserted)}


class _Builder:
    def __init__(self, D: PastingDiagram, association: str, orientation: str):
        if association not in ASSOCIATIONS:
            raise ValueError(f"association must be one of {ASSOCIATIONS}")
        if orientation not in ORIENTATIONS:
            raise ValueError(f"orientation must be one of {ORIENTATIONS}")
        self.D = D
        self.assoc = association
        self.composite_dom = orientation == "composite"
        self.F = PastingDiagram(D.field)
        self.fd = FinelyDividedDiagram(D, self.F, association, orientation)
        self.origin = None

    def _new(self, name: str):
        self.fd.inserted.append(name)
        self.fd.provenance[name] = self.origin

    # -- edges and triangles -------------------------------------------------
    def split(self, path: tuple) -> int:
        return len(path) - 1 if self.assoc == "left" else 1

    def edge(self, path: tuple) -> str:
        path = tuple(path)
        if len(path) == 1:
            return path[0]
        e = self.fd.edges.get(path)
        if e is not None:
            return e
        k = self.split(path)
        left, right = self.edge(path[:k]), self.edge(path[k:])
        e = f"({left};{right})"
        self.F.add_functor(self.D.path_functor(path), e)
        self.fd.edges[path] = e
        self._new(e)
        self.triangle(path, k)
        return e

    def triangle(self, path: tuple, k: int) -> str:
        key = (path, k)
        if key in self.fd.triangles:
            return self.fd.triangles[key]
        e = self.edge(path)
        left, right = self.edge(path[:k]), self.edge(path[k:])
        name = f"id<{left}|{right}>"
        nat = identity_nat(self.D.path_functor(path), name)
        if self.composite_dom:
            self.F.add_cell2(name, (e,), (left, right), nat=nat, trivial=True)
        else:
            self.F.add_cell2(name, (left, right), (e,), nat=nat, trivial=True)
        self.fd.triangles[key] = name
        self._new(name)
        if k != self.split(path):
            self._bridge(path, k)
        return name

    def disk(self, path: tuple, k: int | None = None) -> Tree | None:
        """A triangulated disk between the atom path and its composite edge."""
        if len(path) == 1:
            return None
        k = self.split(path) if k is None else k
        T = Leaf(self.triangle(path, k))
        p1, p2 = path[:k], path[k:]
        d1, d2 = self.disk(p1), self.disk(p2)
        e1, e2 = self.edge(p1), self.edge(p2)
        if self.composite_dom:
            if d1 and d2:
                J = Vert(Post(d1, (e2,)), Pre(p1, d2))
            elif d1:
                J = Post(d1, p2)
            elif d2:
                J = Pre(p1, d2)
            else:
                return T
            return Vert(T, J)
        if d1 and d2:
            J = Vert(Post(d1, p2), Pre((e1,), d2))
        elif d1:
            J = Post(d1, p2)
        elif d2:
            J = Pre(p1, d2)
        else:
            return T
        return Vert(J, T)

    def _bridge(self, path: tuple, k: int):
        name = f"tri<{self.edge(path)}/{k}>"
        self.F.add_cell3(name, self.disk(path, k), self.disk(path))
        self.F.trivial.add(name)
        self.fd.trivial3.append(name)
        self._new(name)

    # -- 2-cells ---------------------------------------------------------------
    def cell2(self, name: str):
        c = self.D.cells2[name]
        self.origin = name
        self.F.add_cell2(name, (self.edge(c.dom),), (self.edge(c.cod),), nat=c.nat,
                         trivial=name in self.D.trivial)
        self.fd.provenance[name] = name

    # -- 3-cells ---------------------------------------------------------------
    def rebracket(self, t: Tree) -> Tree:
        """Split whiskerings into single steps on the side the association builds up."""
        if isinstance(t, Leaf):
            return t
        if isinstance(t, Vert):
            return Vert(self.rebracket(t.first), self.rebracket(t.second))
        inner = self.rebracket(t.tree)
        if isinstance(t, Post):
            if self.assoc == "right":
                return Post(inner, t.path)
            for H in t.path:
                inner = Post(inner, (H,))
            return inner
        if self.assoc == "left":
            return Pre(t.path, inner)
        for V in reversed(t.path):
            inner = Pre((V,), inner)
        return inner

    def _pillow_name(self) -> str:
        k = sum(1 for r in self.fd.nodes.values() if r[3] == self.origin)
        name = f"{self.origin}.{k + 1}"
        while name in self.F.cells3:
            k += 1
            name = f"{self.origin}.{k + 1}"
        return name

    def bigon_of(self, t: Tree) -> str:
        if isinstance(t, Leaf):
            return t.cell
        key = str(t)
        if key in self.fd.nodes:
            return self.fd.nodes[key][0]
        D = self.D
        p, q = D.tree_type(t)
        beta = f"<{key}>"
        self.F.add_cell2(beta, (self.edge(p),), (self.edge(q),), nat=D.tree_value(t))
        self._new(beta)
        if isinstance(t, Vert):
            a, b = self.bigon_of(t.first), self.bigon_of(t.second)
            pi = self._pillow_name()
            self.F.add_cell3(pi, Vert(Leaf(a), Leaf(b)), Leaf(beta))
            sign = 1
        else:
            a = self.bigon_of(t.tree)
            pi = self._pillow_name()
            pa, qa = D.tree_type(t.tree)
            w = self.edge(t.path)
            if isinstance(t, Post):
                T1 = self.triangle(pa + t.path, len(pa))
                T2 = self.triangle(qa + t.path, len(qa))
                whiskered = Post(Leaf(a), (w,))
            else:
                T1 = self.triangle(t.path + pa, len(t.path))
                T2 = self.triangle(t.path + qa, len(t.path))
                whiskered = Pre((w,), Leaf(a))
            if self.composite_dom:
                self.F.add_cell3(pi, Vert(Leaf(beta), Leaf(T2)), Vert(Leaf(T1), whiskered))
            else:
                self.F.add_cell3(pi, Vert(Leaf(T1), Leaf(beta)), Vert(whiskered, Leaf(T2)))
            sign = -1
        self._new(pi)
        self.fd.nodes[key] = (beta, pi, sign, self.origin, t)
        return beta

    def cell3(self, name: str, keep: bool):
        c = self.D.cells3[name]
        self.origin = name
        if keep:
            self.F.add_cell3(name, c.dom, c.cod)
        else:
            t1, t2 = self.rebracket(c.dom), self.rebracket(c.cod)
            b1, b2 = self.bigon_of(t1), self.bigon_of(t2)
            self.F.add_cell3(name, Leaf(b1), Leaf(b2))
            self.fd.trees[name] = (t1, t2)
        if name in self.D.trivial:
            self.F.trivial.add(name)
        self.fd.provenance[name] = name


def fine_divide(D: PastingDiagram, association: str = "left",
                orientation: str = "composands") -> FinelyDividedDiagram:
    """Subdivide ``D`` into a finely divided diagram.

    ``association`` picks how composite edges are bracketed (``"left"`` or
    ``"right"``); ``orientation`` picks whether identity triangles go from the
    composands to the composite edge (default) or the other way.  A diagram
    that is already finely divided is returned unchanged with nothing inserted.
    """
    if is_finely_divided(D):
        fd = FinelyDividedDiagram(D, D, association, orientation)
        fd.provenance = {n: n for n in D.cells()}
        return fd
    b = _Builder(D, association, orientation)
    F = b.F
    for n, c in D.categories.items():
        F.add_category(c, n)
    for n, G in D.functors.items():
        F.add_functor(G, n)
    for n in list(D.categories) + list(D.functors):
        b.fd.provenance[n] = n
        if n in D.trivial:
            F.trivial.add(n)
    for n in D.cells2:
        b.cell2(n)
    for n, c in D.cells3.items():
        leaves_ok = all(_is_bigon(D.cells2[x]) for x in tree_leaves(c.dom) + tree_leaves(c.cod))
        form = three_cell_form(D, n)
        b.cell3(n, keep=leaves_ok and form in ("bigonal", "triangular"))
    return b.fd


# ---------------------------------------------------------------------------
# the map Phi and its kernel


def _flagged(D: PastingDiagram) -> list[str]:
    return [n for n in D.cells() if n in D.trivial]


def build_phi(fd, max_degree: int = 4) -> BlockMap:
    """The degree-1 chain map from the deformation complex to one summand per flagged cell.

    For a flagged cell ``K`` the component of ``Phi`` is the row of ``K`` in
    the differential with its diagonal block removed; the target carries the
    diagonal blocks as its differential.  Then ``d Phi + Phi d = 0``, and
    ``ker(Phi)`` with the flagged coordinates set to zero is the complex of
    deformations that keep the flagged cells fixed.
    """
    D = fd.diagram if isinstance(fd, FinelyDividedDiagram) else fd
    bad = finely_divided_violations(D)
    if bad:
        raise NotFinelyDivided(f"{bad[0].kind} {bad[0].where[0]}: {bad[0].detail}")
    X = assemble(D, max_degree)
    flagged = _flagged(D)
    if not flagged:
        T = GradedComplex([Summand("zero", X.summands[0].kind, -10**6)], {}, max_degree, name="T")
        return BlockMap(X, T, {}, 1, name="Phi")
    summ = [Summand(k, X.summands[X.index[k]].kind, X.summands[X.index[k]].shift) for k in flagged]
    tblocks = {}
    blocks = {}
    for i, k in enumerate(flagged):
        r = X.index[k]
        if (r, r) in X.blocks:
            tblocks[(i, i)] = X.blocks[(r, r)]
        for (ri, j), op in X.blocks.items():
            if ri == r and j != r:
                blocks[(i, j)] = op
    T = GradedComplex(summ, tblocks, max_degree, name="T")
    return BlockMap(X, T, blocks, 1, name="Phi")


def phi_kernel(fd, normalized: bool = True, extra: Iterable[str] = ()) -> SubComplex:
    """``ker(Phi)`` with flagged coordinates zero, as a subcomplex of the complex of ``fd``.

    Cells named in ``extra`` are treated as flagged too.
    """
    D = fd.diagram if isinstance(fd, FinelyDividedDiagram) else fd
    return flag_kernel(assemble(D), list(_flagged(D)) + list(extra), normalized=normalized)


# ---------------------------------------------------------------------------
# comparison with the original complex


def _context_ops(D: PastingDiagram, t: Tree, ctx: Op | None, out: list):
    """Collect ``(node, op)`` where ``op`` carries a node's cochains up to the root of ``t``."""
    if ctx is None:
        v = D.tree_value(t)
        ctx = ident_op((v.source, v.target))
    if isinstance(t, Leaf):
        return
    out.append((t, ctx))
    if isinstance(t, Vert):
        a, b = D.tree_value(t.first), D.tree_value(t.second)
        _context_ops(D, t.first, nat_post_op(b, a.source).then(ctx), out)
        _context_ops(D, t.second, nat_pre_op(a, b.target).then(ctx), out)
    elif isinstance(t, Post):
        v = D.tree_value(t.tree)
        _context_ops(D, t.tree, push_op(D.path_functor(t.path), (v.source, v.target)).then(ctx), out)
    else:
        v = D.tree_value(t.tree)
        _context_ops(D, t.tree, pull_op(D.path_functor(t.path), (v.source, v.target)).then(ctx), out)


def _add(blocks: dict, key, op: Op):
    blocks[key] = blocks[key] + op if key in blocks else op


def comparison_maps(fd: FinelyDividedDiagram, max_degree: int = 4) -> tuple[BlockMap, BlockMap]:
    """The chain maps ``iota: C(D) -> C(f(D))`` and ``psi: C(f(D)) -> C(D)``.

    ``iota`` sends each original cell to itself, a composite edge to the path
    derivative of its path and a composition node's bigon to the composite row
    of the node.  ``psi`` forgets the new cells, except that each subdivided
    3-cell also collects the pillow coordinates of its nodes, carried to the
    root of the tree.  Both are chain maps on normalized cochains that keep the
    flagged cells fixed, and ``psi iota`` is the identity there.
    """
    D, F = fd.source, fd.diagram
    XD, XF = assemble(D, max_degree), assemble(F, max_degree)
    ib, pb = {}, {}
    for n, c in D.categories.items():
        op = ident_op(cat_kind(c))
        ib[(XF.index[n], XD.index[n])] = op
        pb[(XD.index[n], XF.index[n])] = op
    for n, G in D.functors.items():
        op = ident_op((G, G))
        ib[(XF.index[n], XD.index[n])] = op
        pb[(XD.index[n], XF.index[n])] = op
    for path, e in fd.edges.items():
        for k, op in path_derivative(D, path).items():
            _add(ib, (XF.index[e], XD.index[k]), op)
    for n in list(D.cells2) + list(D.cells3):
        op = ident_op(D.kind_of(n))
        ib[(XF.index[n], XD.index[n])] = op
        pb[(XD.index[n], XF.index[n])] = op
    for beta, pi, sign, origin, t in fd.nodes.values():
        for k, op in composite_row(D, t).items():
            _add(ib, (XF.index[beta], XD.index[k]), op)
    by_key = {str(rec[4]): rec for rec in fd.nodes.values()}
    for E, (t1, t2) in fd.trees.items():
        for side, t in ((1, t1), (-1, t2)):
            found: list = []
            _context_ops(D, t, None, found)
            for node, ctx in found:
                _, pi, sign, _, _ = by_key[str(node)]
                _add(pb, (XD.index[E], XF.index[pi]), ctx.scale(side * sign))
    iota = BlockMap(XD, XF, ib, 0, name="iota")
    psi = BlockMap(XF, XD, pb, 0, name="psi")
    return iota, psi


@dataclass
class IsoReport:
    degrees: list
    phi_chain: bool
    iota_chain: bool
    iota_lands: bool
    psi_chain: bool
    psi_iota_identity: bool
    iota_psi_identity: bool
    source_dims: list
    kernel_dims: list
    source_cohomology: list
    kernel_cohomology: list
    first_failure: str | None = None
    rigid_iota_psi_identity: bool | None = None

    @property
    def isomorphism(self) -> bool:
        return self.first_failure is None

    @property
    def quasi_isomorphism(self) -> bool:
        return (self.phi_chain and self.iota_chain and self.iota_lands and self.psi_chain
                and self.psi_iota_identity and self.source_cohomology == self.kernel_cohomology)

    def check(self):
        if self.first_failure:
            raise IsoFailure(self.first_failure)

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__} | {
            "isomorphism": self.isomorphism, "quasi_isomorphism": self.quasi_isomorphism}


def _is_identity_on(m: ExactMatrix, B: ExactMatrix) -> bool:
    return (m @ B - B).is_zero()


def _in_span(B: ExactMatrix, M: ExactMatrix) -> bool:
    for j in range(M.cols):
        col = [M[i, j] for i in range(M.rows)]
        if solve(B, col) is NoSolution:
            return False
    return True


def kernel_iso_check(D: PastingDiagram, fd: FinelyDividedDiagram | None = None,
                     degrees: Sequence[int] | None = None, rigid: bool = True) -> IsoReport:
    """Compare the normalized complex of ``D`` with the normalized part of ``ker(Phi)``.

    Both composites of :func:`comparison_maps` are tested on bases, degree by
    degree.  ``psi iota`` is always the identity.  ``iota psi`` is the
    identity exactly when no 3-cell had to be subdivided: each subdivision adds
    a bigon and a pillow whose coordinates ``psi`` forgets, and those pairs
    form an acyclic summand.  With ``rigid`` set, the report also checks that
    ``iota psi`` is the identity once the inserted pillows are held fixed as
    well.  ``first_failure`` names the first comparison that failed.
    """
    fd = fd or fine_divide(D)
    if fd.source is not D:
        raise ValueError("fd was not built from D")
    XD = assemble(D)
    top = deformation_degree(D)
    if degrees is None:
        degrees = list(range(XD.min_degree, top + 2))
    degrees = list(degrees)
    N = flag_kernel(XD, _flagged(D), normalized=True)
    Y = phi_kernel(fd, normalized=True)
    iota, psi = comparison_maps(fd)
    XF = iota.target
    phi = build_phi(fd.diagram)
    fails = []

    def note(ok, what, n):
        if not ok and not fails:
            fails.append(f"{what} fails in degree {n}")
        return ok

    phi_ok = all(note(phi.chain_defect(n).is_zero(), "Phi chain identity", n) for n in degrees)
    ic = il = pc = pi_ok = ip_ok = True
    for n in degrees:
        B, B1 = N.basis(n), Y.basis(n)
        iB = iota.matrix(n) @ B
        il &= note(_in_span(Y.basis(n), iB), "iota landing in ker(Phi)", n)
        ic &= note((XF.d(n) @ iB - iota.matrix(n + 1) @ XD.d(n) @ B).is_zero(), "iota chain identity", n)
        pc &= note((XD.d(n) @ psi.matrix(n) @ B1 - psi.matrix(n + 1) @ XF.d(n) @ B1).is_zero(),
                   "psi chain identity", n)
        pi_ok &= note(_is_identity_on(psi.matrix(n) @ iota.matrix(n), B), "psi iota = id", n)
        ip_ok &= note(_is_identity_on(iota.matrix(n) @ psi.matrix(n), B1), "iota psi = id", n)
    rigid_ok = None
    if rigid:
        R = phi_kernel(fd, normalized=True, extra=fd.pillows)
        rigid_ok = all(_is_identity_on(iota.matrix(n) @ psi.matrix(n), R.basis(n))
                       and R.dim(n) == N.dim(n) for n in degrees)
    return IsoReport(degrees, phi_ok, ic, il, pc, pi_ok, ip_ok,
                     [N.dim(n) for n in degrees], [Y.dim(n) for n in degrees],
                     N.cohomology_dims(degrees), Y.cohomology_dims(degrees),
                     fails[0] if fails else None, rigid_ok)
