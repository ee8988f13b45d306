"""Expressions attached to whiskered polygons, and the sphere argument built from them.

For a whiskered polygon with paths ``f`` (through the face's domain) and
``g`` (through its codomain), the final replacement labels of ``f`` and
``g`` are formulas whose operation occurrences are the edges of the path.
Reading each occurrence as a deformed operation with parallel degree ``k``
turns a formula into a sum over degree assignments:

* obstruction type at order ``m``: every degree in ``0..m-1``, total ``m``;
* cocycle type: degrees in ``{0, 1}``, total ``1``;
* cobounding type at order ``m``: degrees in ``0..m``, total ``m``;
* reduced at order ``m``: whisker occurrences at degree 0, face occurrences
  in ``0..m-1``, total ``m``.

The polygon's expression is the ``f`` sum minus the ``g`` sum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

import numpy as np

from ..complex import assemble, deformation_degree
from ..conventions import DIFFERENTIAL_SIGN
from ..deform import ParallelFamily, obstruction, validate_order
from ..hochschild import _space
from .labeling import Labeler, TiledSphere, WhiskeredPolygon
from .terms import (App, ArrType, Evaluator, Node, Override, Var, instantiations, variables_of)

KINDS = ("obstruction", "cocycle", "cobounding", "reduced")


class MissingParallel(KeyError):
    """Raised when a formula uses an operation the parallel family does not cover."""


class FaceClassificationFailure(ValueError):
    """Raised when a face's declared role does not match its structure."""


class CancellationFailure(AssertionError):
    """Raised when a sphere identity fails; ``witness`` records where."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class Mismatch(AssertionError):
    """Raised when the matrix coboundary and the polygon sums disagree."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


def _labeler(obj, D=None) -> Labeler:
    lab = getattr(obj, "_labeler", None)
    if lab is None:
        lab = Labeler(D or obj.D, obj.labels)
        try:
            obj._labeler = lab
        except AttributeError:
            pass
    return lab


def _check_family(trees, P: ParallelFamily, need: int):
    for t in trees:
        for n in t.nodes():
            op = n.term.op
            name = op.split(".", 1)[1] if op.startswith(("m.", "id.")) else op
            if name not in P.D.categories and name not in P.D.functors and name not in P.D.cells2:
                raise MissingParallel(f"the family has no parallels for {op}")
    if need > P.order:
        raise MissingParallel(f"degree-{need} parallels requested from a family of order {P.order}")


def _allowed(kind: str, m: int, face: set):
    if kind == "obstruction":
        return lambda edge: range(0, m)
    if kind == "cocycle":
        return lambda edge: range(0, 2)
    if kind == "cobounding":
        return lambda edge: range(0, m + 1)
    if kind == "reduced":
        return lambda edge: range(0, m) if edge in face else range(0, 1)
    raise ValueError(f"unknown expression kind {kind!r}")


def _assignments(tree: Node, allowed, total: int):
    nodes = tree.nodes()
    ranges = [list(allowed(n.edge)) for n in nodes]

    def rec(i, left):
        if i == len(nodes):
            if left == 0:
                yield {}
            return
        for k in ranges[i]:
            if k <= left:
                for rest in rec(i + 1, left - k):
                    rest[id(nodes[i])] = k
                    yield rest

    yield from rec(0, total)


@dataclass
class Expression:
    """Symbolic terms (sign, rendered formula) and an evaluator over instantiations."""

    polygon: WhiskeredPolygon
    kind: str
    m: int
    terms: list
    f_tree: Node
    g_tree: Node
    evaluator: Evaluator
    allowed: object

    def variables(self) -> set:
        return self.polygon.variables()

    def evaluate(self, inst: dict) -> np.ndarray:
        policy = lambda node: self.allowed(node.edge)
        ev = self.evaluator
        a = ev.series(self.f_tree, inst, policy)[self.m]
        b = ev.series(self.g_tree, inst, policy)[self.m]
        return ev.f.reduce(a - b)

    def is_zero(self) -> bool:
        D = self.evaluator.D
        return all(not self.evaluate(i).any() for i in instantiations(self.variables(), D))

    def __str__(self):
        if not self.terms:
            return "0"
        return " ".join(f"{'+' if s > 0 else '-'} {t}" for s, t in self.terms)


def expression(w: WhiskeredPolygon, kind: str, m: int, P: ParallelFamily, labeler: Labeler | None = None) -> Expression:
    """The ``kind`` expression of ``w`` at order ``m`` (``m`` is 1 for the cocycle kind)."""
    if kind == "cocycle":
        m = 1
    lab = labeler or _labeler(w, P.D)
    f_tree, g_tree = lab.final_tree(w.f_path), lab.final_tree(w.g_path)
    need = {"obstruction": m - 1, "cocycle": 1, "cobounding": m, "reduced": m - 1}[kind]
    _check_family([f_tree, g_tree], P, need)
    allowed = _allowed(kind, m, w.face_edges)
    terms = []
    for sign, tree in ((1, f_tree), (-1, g_tree)):
        for a in _assignments(tree, allowed, m):
            terms.append((sign, tree.render(a)))
    ev = Evaluator(P.D, P, m)
    return Expression(w, kind, m, terms, f_tree, g_tree, ev, allowed)


def polygon_from_face(labels: dict, face, name: str | None = None) -> WhiskeredPolygon:
    return WhiskeredPolygon(labels, [], list(face.dom), list(face.cod), [], name or face.name,
                            1, face.kind, face.axiom)


# ---------------------------------------------------------------------------
# hatting and the structural conditions


def _hat_var(node: Node, sig) -> Var:
    ty = sig.type_of(node.term)
    return Var(f"^{node.edge}", "arr", ty.cat, ty.src, ty.tgt)


def hatted_term(node: Node, w: WhiskeredPolygon, sig):
    """The formula of ``node`` with domain-whisker occurrences replaced by fresh variables."""
    if node.edge in w.dom_whisker:
        return _hat_var(node, sig)
    args = tuple(hatted_term(k, w, sig) if isinstance(k, Node) else k for k in node.kids)
    return App(node.term.op, args)


def _face_nodes(tree: Node, edges) -> list[Node]:
    return [n for n in tree.nodes() if n.edge in edges]


def is_trivial_polygon(w: WhiskeredPolygon, D=None, labeler: Labeler | None = None) -> bool:
    """Both sides have the same length and their hatted face formulas agree up to
    reordering and replacement by equivalents, with the same nesting."""
    if len(w.dom) != len(w.cod):
        return False
    lab = labeler or _labeler(w, D)
    sig = lab.sig
    fn = _face_nodes(lab.final_tree(w.f_path), set(w.dom))
    gn = _face_nodes(lab.final_tree(w.g_path), set(w.cod))
    fh = [hatted_term(n, w, sig) for n in fn]
    gh = [hatted_term(n, w, sig) for n in gn]

    def face_kids(n, group):
        return [group.index(k) for k in n.kids if isinstance(k, Node) and k in group]

    fk = [face_kids(n, fn) for n in fn]
    gk = [face_kids(n, gn) for n in gn]
    match: dict = {}

    def rec(i, used):
        if i == len(fn):
            return True
        for j in range(len(gn)):
            if j in used or not lab.equivalent(fh[i], gh[j]):
                continue
            if len(fk[i]) != len(gk[j]):
                continue
            if any(k in match and match[k] not in gk[j] for k in fk[i]):
                continue
            match[i] = j
            if rec(i + 1, used | {j}):
                return True
            del match[i]
        return False

    return rec(0, frozenset())


@dataclass
class Vanishing:
    vanishes: bool
    witness: dict | None
    checked: int
    exhaustive: bool

    def __bool__(self):
        return self.vanishes


def _elementary(ev: Evaluator, node: Node, inst: dict):
    """All elementary maps that can stand in for the operation at ``node``."""
    f, D = ev.f, ev.D
    kind, name = ev.sig.kind(node.term.op)
    cat, X, Y = ev.ends(node.term, inst)
    n_out = D.categories[cat].dim(X, Y)
    if kind == "m":
        u, v = node.term.args
        _, X0, X1 = ev.ends(u, inst)
        X2 = ev.ends(v, inst)[2]
        C = D.categories[cat]
        shape = (C.dim(X0, X1), C.dim(X1, X2), n_out)
    elif kind == "functor":
        (a,) = node.term.args
        c0, X0, X1 = ev.ends(a, inst)
        shape = (n_out, D.categories[c0].dim(X0, X1))
    else:
        shape = (n_out,)
    for idx in itertools.product(*[range(s) for s in shape]):
        t = f.zeros(shape)
        t[idx] = f.one
        yield idx, t


def strong_vanishing(w: WhiskeredPolygon, m: int, P: ParallelFamily, labeler: Labeler | None = None,
                     cap: int = 200_000) -> Vanishing:
    """Does the cobounding-type face expression vanish for every choice of inputs and
    every replacement of the codomain whisker operations?

    Domain-whisker inputs are replaced by fresh variables ranging over basis
    arrows; codomain-whisker operations range over elementary multilinear
    maps, which suffices because the expression is linear in each of them.
    At most ``cap`` evaluations are made; ``exhaustive`` reports whether the
    enumeration finished.
    """
    lab = labeler or _labeler(w, P.D)
    f_tree, g_tree = lab.final_tree(w.f_path), lab.final_tree(w.g_path)
    _check_family([f_tree, g_tree], P, m)
    ev = Evaluator(P.D, P, m)
    sig = ev.sig
    face, dw, cw = w.face_edges, set(w.dom_whisker), set(w.cod_whisker)
    hats = {}
    for tree in (f_tree, g_tree):
        stack = [tree]
        while stack:
            n = stack.pop()
            if n.edge in dw:
                hats.setdefault(n.edge, n)
                continue
            stack += [k for k in n.kids if isinstance(k, Node)]
    cod_nodes = {}
    for tree in (f_tree, g_tree):
        for n in tree.nodes():
            if n.edge in cw:
                cod_nodes.setdefault(n.edge, n)
    visible = variables_of(hatted_term(f_tree, w, sig)) | variables_of(hatted_term(g_tree, w, sig))
    checked = 0
    for full in instantiations(visible, P.D):
        hv = {e: P.D.categories[sig.type_of(n.term).cat].basis_arrow(full[f"^{e}"]).vec
              for e, n in hats.items()}
        maps = [list(_elementary(ev, n, full)) for _, n in sorted(cod_nodes.items())]
        for choice in itertools.product(*maps):
            phis = {e: t for e, (_, t) in zip(sorted(cod_nodes), choice)}

            def policy(node, phis=phis, hv=hv):
                if node.edge in hv:
                    return Override(value=hv[node.edge])
                if node.edge in phis:
                    return Override(data=phis[node.edge])
                return range(0, m + 1)

            val = ev.f.reduce(ev.series(f_tree, full, policy)[m] - ev.series(g_tree, full, policy)[m])
            checked += 1
            if val.any():
                return Vanishing(False, {"instantiation": full,
                                         "maps": {e: list(idx) for e, (idx, _) in zip(sorted(cod_nodes), choice)},
                                         "value": [ev.f.format(x) for x in val]}, checked, False)
            if checked >= cap:
                return Vanishing(True, None, checked, False)
    return Vanishing(True, None, checked, True)


# ---------------------------------------------------------------------------
# spheres


def sweep(s: TiledSphere, faces: list[str]) -> list[WhiskeredPolygon]:
    """Order the faces of a hemisphere so that replacing one face side at a time
    carries ``equator[0]`` to ``equator[1]``.

    Each resulting polygon's ``dom`` is the side present before the step;
    ``sign`` is +1 when that is the face's own domain and -1 otherwise.
    """
    start, goal = list(s.equator[0]), list(s.equator[1])
    labels = s.labels

    def find(path, side):
        k = len(side)
        for i in range(len(path) - k + 1):
            if path[i:i + k] == side:
                return i
        return None

    def rec(path, left, acc):
        if not left:
            return list(acc) if path == goal else None
        for name in sorted(left, key=faces.index):
            fc = s.faces[name]
            for before, after, sign in ((fc.dom, fc.cod, 1), (fc.cod, fc.dom, -1)):
                i = find(path, before)
                if i is None:
                    continue
                w = WhiskeredPolygon(labels, path[:i], list(before), list(after), path[i + len(before):],
                                     name, sign, fc.kind, fc.axiom)
                acc.append(w)
                r = rec(path[:i] + list(after) + path[i + len(before):], left - {name}, acc)
                if r is not None:
                    return r
                acc.pop()
        return None

    out = rec(start, frozenset(faces), [])
    if out is None:
        raise FaceClassificationFailure(f"the faces {' '.join(faces)} do not sweep the equator of {s.name}")
    return out


@dataclass
class SphereReport:
    name: str
    order: int
    hemispheres: dict
    instantiations: int = 0
    valid_below: bool = False
    checks: dict = dc_field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {"name": self.name, "order": self.order, "ok": self.ok,
                "instantiations": self.instantiations, "valid_below": self.valid_below,
                "checks": dict(self.checks),
                "hemispheres": {h: [(w.name, w.sign, w.kind, w.axiom) for w in ws]
                                for h, ws in self.hemispheres.items()}}


def classify_faces(s: TiledSphere, labeler: Labeler | None = None) -> dict:
    """Sweep both hemispheres and check each face's declared role."""
    from .labeling import check_labeling
    lab = labeler or _labeler(s)
    rep = check_labeling(s, labeler=lab)
    if not rep.ok:
        raise FaceClassificationFailure(f"ill-formed labels on {s.name}: {rep.issues[0]}")
    hemis = {h: sweep(s, faces) for h, faces in s.hemispheres}
    seen = {}
    for ws in hemis.values():
        for w in ws:
            if w.kind == "trivial":
                if not is_trivial_polygon(w, labeler=lab):
                    raise FaceClassificationFailure(f"face {w.name} is marked trivial but is not")
                continue
            if w.axiom is None:
                raise FaceClassificationFailure(f"axiomatic face {w.name} names no cell")
            own = w.dom if w.sign > 0 else w.cod
            path = w.dom_whisker + own
            key = (w.axiom, str(lab.replace(path, require_total=False)[-1].term))
            if key in seen:
                raise FaceClassificationFailure(f"faces {seen[key]} and {w.name} express the same axiom instance")
            seen[key] = w.name
    return hemis


def verify_sphere(s: TiledSphere, P: ParallelFamily, m: int, assume_valid: bool | None = None) -> SphereReport:
    """Check the sphere identities at order ``m`` on every instantiation.

    (a) the expressions of each hemisphere's faces telescope to the equator's;
    (b) for a family valid below ``m`` each face's obstruction expression
        equals its reduced expression;
    (c) trivial faces have zero reduced expression;
    (d) the oriented reduced expressions of all faces sum to zero.
    Checks (b) and (d) run when the family is valid below ``m``; pass
    ``assume_valid`` to skip that test and force them on or off.
    Raises :class:`FaceClassificationFailure` or :class:`CancellationFailure`.
    """
    lab = _labeler(s)
    hemis = classify_faces(s, lab)
    if assume_valid is None:
        valid = m <= 1 or validate_order(P.truncated(m), m - 1).valid
    else:
        valid = assume_valid
    rep = SphereReport(s.name, m, hemis, valid_below=valid)
    eq = WhiskeredPolygon(s.labels, [], list(s.equator[0]), list(s.equator[1]), [], "equator")
    eq_obs = expression(eq, "obstruction", m, P, lab)
    obs = {}
    red = {}
    for h, ws in hemis.items():
        for w in ws:
            obs[(h, w.name)] = expression(w, "obstruction", m, P, lab)
            red[(h, w.name)] = expression(w, "reduced", m, P, lab)
    f = P.field
    count = 0
    for inst in instantiations(s.variables_used(), P.D):
        count += 1
        target = eq_obs.evaluate(inst)
        totals = []
        for h, ws in hemis.items():
            acc = f.zeros(len(target))
            racc = f.zeros(len(target))
            for w in ws:
                o = obs[(h, w.name)].evaluate(inst)
                r = red[(h, w.name)].evaluate(inst)
                acc = f.reduce(acc + o)
                racc = f.reduce(racc + r)
                if valid and not np.array_equal(o, r):
                    raise CancellationFailure(f"face {w.name}: obstruction and reduced expressions differ",
                                              {"face": w.name, "instantiation": inst})
                if w.kind == "trivial" and r.any():
                    raise CancellationFailure(f"trivial face {w.name} has a nonzero reduced expression",
                                              {"face": w.name, "instantiation": inst})
            if not np.array_equal(acc, target):
                raise CancellationFailure(f"hemisphere {h} does not telescope to the equator",
                                          {"hemisphere": h, "instantiation": inst})
            totals.append(racc)
        if valid and not np.array_equal(totals[0], totals[1]):
            raise CancellationFailure("the reduced face expressions do not cancel",
                                      {"instantiation": inst})
    rep.instantiations = count
    rep.checks = {"telescoping": True, "faces_reduce": valid, "trivial_faces_vanish": True,
                  "cancellation": valid}
    return rep


# ---------------------------------------------------------------------------
# comparison with the assembled complex


def _instantiation_from_key(s: TiledSphere, key: tuple, D) -> dict | None:
    inst = {}
    for vname, label in zip(s.key, key):
        v = s.variables[vname]
        C = D.categories[v.cat]
        X, Y, _ = C.arrow_index[label]
        for end, obj in ((v.src, X), (v.tgt, Y)):
            if not isinstance(end, Var):
                raise ValueError(f"key variable {vname} must have variable endpoints")
            if inst.get(end.name, obj) != obj:
                return None
            inst[end.name] = obj
        inst[vname] = label
    return inst


def _polygon_sums(s, hemis, P, m, lab):
    """Per axiom cell: reduced expressions in sweep orientation, first hemisphere minus second.

    Fixtures list their hemispheres so that this difference is the standard
    coboundary (first term with a positive sign); the assembled differential
    carries the extra global factor ``DIFFERENTIAL_SIGN``.
    """
    out = {}
    for h_index, (h, ws) in enumerate(hemis.items()):
        sgn = 1 if h_index == 0 else -1
        for w in ws:
            if w.kind != "axiom":
                continue
            out.setdefault(w.axiom, []).append((sgn, expression(w, "reduced", m, P, lab)))
    return out


def cross_validate(s: TiledSphere, P: ParallelFamily, m: int, X=None) -> dict:
    """Compare, block by block, the coboundary of the order-``m`` obstruction with
    the sphere's reduced face expressions, on every cochain key.

    For each cell ``c`` the block of the differential from ``c`` to the
    sphere's summand, applied to the ``c`` part of the obstruction, must equal
    the oriented sum of the reduced expressions of the faces expressing
    ``c``'s axiom.  Returns the number of keys compared per cell; raises
    :class:`Mismatch` on the first disagreement.
    """
    D = P.D
    X = X or assemble(D)
    lab = _labeler(s, D)
    hemis = classify_faces(s, lab)
    sums = _polygon_sums(s, hemis, P, m, lab)
    omega = obstruction(P, m, X, check=False)
    deg = deformation_degree(X) + 1
    parts, o = {}, 0
    for sm in X.summands:
        dim = sm.dim(deg)
        parts[sm.label] = omega[o:o + dim]
        o += dim
    row = s.summand
    rs = X.summands[X.index[row]]
    S = _space(rs.kind[0], rs.kind[1], deg + 1 + rs.shift)
    f = P.field
    counts = {}
    for col in X.labels:
        block = X.block_matrix(row, col, deg)
        contrib = block.apply(parts[col]) if parts[col] else [f.zero] * S.dim
        terms = sums.get(col, [])
        if not terms and not any(contrib):
            continue
        n = 0
        for key in S.keys:
            inst = _instantiation_from_key(s, key if isinstance(key, tuple) else (key,), D)
            if inst is None:
                continue
            sl = S.block(key)
            want = f.array(contrib[sl])
            got = f.zeros(len(want))
            for sg, e in terms:
                got = f.reduce(got + DIFFERENTIAL_SIGN * sg * e.evaluate(inst))
            if not np.array_equal(f.reduce(want), got):
                raise Mismatch(f"block {row} <- {col} differs at {key}",
                               {"cell": col, "key": key, "matrix": [f.format(x) for x in want],
                                "polygons": [f.format(x) for x in got]})
            n += 1
        counts[col] = n
    return counts


# ---------------------------------------------------------------------------
# axiomatic polygons of single cells


def _tree_term(D, t, X):
    from ..diagram import Leaf, Post, Pre, Vert
    from .terms import apply_path
    if isinstance(t, Leaf):
        return App(t.cell, (X,))
    if isinstance(t, Vert):
        p, _ = D.tree_type(t)
        Z = D.path_ends(p)[1]
        return App(f"m.{Z}", (_tree_term(D, t.first, X), _tree_term(D, t.second, X)))
    if isinstance(t, Post):
        u = _tree_term(D, t.tree, X)
        for F in t.path:
            u = App(F, (u,))
        return u
    if isinstance(t, Pre):
        return _tree_term(D, t.tree, apply_path(t.path, X))
    raise TypeError(t)


def _edges_of(term, sig, prefix, labels) -> list[str]:
    """One edge per non-variable arrow subterm occurrence, children first."""
    from .terms import nonminimal_arrow_subterms
    names = []
    for sub in nonminimal_arrow_subterms(term, sig):
        name = f"{prefix}{len(names) + 1}"
        labels[name] = sub
        names.append(name)
    return names


def axiom_polygon(D, cell: str) -> tuple[WhiskeredPolygon, list[str]]:
    """The polygon expressing ``cell``'s axiom, and its variables in cochain-key order.

    Associativity for a category, functoriality for a functor, naturality for
    a 2-cell and the relation for a 3-cell.  The obstruction-type expression
    of this polygon is the cell's part of the obstruction cochain.
    """
    from .terms import Signature, apply_path
    sig = Signature(D)
    labels: dict = {}
    if cell in D.categories:
        Xs = [Var(f"X{i}", "obj", cell) for i in range(4)]
        a, b, c = (Var(n, "arr", cell, Xs[i], Xs[i + 1]) for i, n in enumerate("abc"))
        m = f"m.{cell}"
        left = App(m, (App(m, (a, b)), c))
        right = App(m, (a, App(m, (b, c))))
        key = ["a", "b", "c"]
    elif cell in D.functors:
        A, B = D.functor_ends(cell)
        Xs = [Var(f"X{i}", "obj", A) for i in range(3)]
        a, b = (Var(n, "arr", A, Xs[i], Xs[i + 1]) for i, n in enumerate("ab"))
        left = App(cell, (App(f"m.{A}", (a, b)),))
        right = App(f"m.{B}", (App(cell, (a,)), App(cell, (b,))))
        key = ["a", "b"]
    elif cell in D.cells2:
        c = D.cells2[cell]
        A, Z = D.path_ends(c.dom)
        X, Y = Var("X", "obj", A), Var("Y", "obj", A)
        a = Var("a", "arr", A, X, Y)
        left = App(f"m.{Z}", (apply_path(c.dom, a), App(cell, (Y,))))
        right = App(f"m.{Z}", (App(cell, (X,)), apply_path(c.cod, a)))
        key = ["a"]
    elif cell in D.cells3:
        c = D.cells3[cell]
        p, _ = D.tree_type(c.dom)
        X = Var("X", "obj", D.path_ends(p)[0])
        left, right = _tree_term(D, c.dom, X), _tree_term(D, c.cod, X)
        key = ["X"]
    else:
        raise KeyError(cell)
    dom = _edges_of(left, sig, "d", labels)
    cod = _edges_of(right, sig, "c", labels)
    kind = "axiom"
    return WhiskeredPolygon(labels, [], dom, cod, [], f"axiom:{cell}", 1, kind, cell), key
