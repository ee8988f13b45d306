"""Well-formed formulas over the signature of a pasting diagram.

A term is a :class:`Var` or an :class:`App` of an operation to argument
terms.  The operations of a diagram ``D`` are

* ``m.C`` (composition in category ``C``, diagrammatic: ``m.C(a, b)`` is a then b),
* ``id.C`` (identity at an object), ``s.C`` and ``t.C`` (source and target),
* every functor name, applied to an object or to an arrow,
* every 2-cell name, applied to an object of the source category of its paths.

Object-valued terms are kept in a normal form: a variable under a stack of
functor applications.  ``s.C`` and ``t.C`` are resolved while parsing.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..diagram import PastingDiagram


class WffSyntaxError(SyntaxError):
    """Raised on malformed formula text; the message carries the offending position."""


class WffTypeError(TypeError):
    """Raised when a formula does not type-check against the diagram."""


class VariableMismatch(ValueError):
    """Raised when two formulas compared for equivalence have different variables."""


@dataclass(frozen=True)
class Var:
    name: str
    sort: str                 # "obj" or "arr"
    cat: str
    src: object = None        # object terms, for arrow variables
    tgt: object = None

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    op: str
    args: tuple

    def __str__(self):
        return f"{self.op}({', '.join(str(a) for a in self.args)})"


Term = Var | App


@dataclass(frozen=True)
class ObjType:
    cat: str


@dataclass(frozen=True)
class ArrType:
    cat: str
    src: Term
    tgt: Term

    def __str__(self):
        return f"{self.src} -> {self.tgt} in {self.cat}"


class Signature:
    """Operation names and typing rules read off a pasting diagram."""

    def __init__(self, D: PastingDiagram):
        self.D = D

    def kind(self, op: str) -> tuple[str, str]:
        D = self.D
        if "." in op:
            head, cat = op.split(".", 1)
            if cat in D.categories and head in ("m", "id", "s", "t"):
                return head, cat
        if op in D.functors:
            return "functor", op
        if op in D.cells2:
            return "nat", op
        raise WffTypeError(f"unknown operation {op!r}")

    def arity(self, op: str) -> int:
        return 2 if self.kind(op)[0] == "m" else 1

    def ops(self) -> list[str]:
        D = self.D
        out = [f"m.{c}" for c in D.categories] + [f"id.{c}" for c in D.categories]
        return out + list(D.functors) + list(D.cells2)

    @lru_cache(maxsize=None)
    def type_of(self, t: Term):
        """The type of ``t``: :class:`ObjType` or :class:`ArrType`."""
        D = self.D
        if isinstance(t, Var):
            if t.sort == "obj":
                return ObjType(t.cat)
            return ArrType(t.cat, t.src, t.tgt)
        kind, name = self.kind(t.op)
        if len(t.args) != self.arity(t.op):
            raise WffTypeError(f"{t.op} takes {self.arity(t.op)} argument(s), got {len(t.args)}")
        types = [self.type_of(a) for a in t.args]
        if kind == "m":
            u, v = types
            for x, a in zip(types, t.args):
                if not isinstance(x, ArrType) or x.cat != name:
                    raise WffTypeError(f"{t.op} expects arrows of {name}, got {a}")
            if u.tgt != v.src:
                raise WffTypeError(f"{t.op}({t.args[0]}, {t.args[1]}): target {u.tgt} is not source {v.src}")
            return ArrType(name, u.src, v.tgt)
        (x,) = types
        if kind in ("id", "s", "t"):
            want = ObjType if kind == "id" else ArrType
            if not isinstance(x, want) or x.cat != name:
                raise WffTypeError(f"{t.op} does not apply to {t.args[0]}")
            if kind == "id":
                return ArrType(name, t.args[0], t.args[0])
            return ObjType(name)
        if kind == "functor":
            a, b = D.functor_ends(name)
            if x.cat != a:
                raise WffTypeError(f"{name} applies to {a}, not to {t.args[0]} in {x.cat}")
            if isinstance(x, ObjType):
                return ObjType(b)
            return ArrType(b, App(name, (x.src,)), App(name, (x.tgt,)))
        c = D.cells2[name]
        a, b = D.path_ends(c.dom)
        if not isinstance(x, ObjType) or x.cat != a:
            raise WffTypeError(f"{name} applies to objects of {a}, not to {t.args[0]}")
        return ArrType(b, apply_path(c.dom, t.args[0]), apply_path(c.cod, t.args[0]))

    def is_arrow(self, t: Term) -> bool:
        return isinstance(self.type_of(t), ArrType)


def apply_path(path, X: Term) -> Term:
    for F in path:
        X = App(F, (X,))
    return X


# ---------------------------------------------------------------------------
# parsing

_UNQUALIFIED = ("m", "id", "s", "t")
_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_.']*)|(.))")


def _tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            out.append(("id", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            ch = m.group(2)
            if ch not in "(),":
                raise WffSyntaxError(f"unexpected character {ch!r} at position {m.start(2)} in {text!r}")
            out.append((ch, ch, m.start(2)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def parse_wff(text: str, D: PastingDiagram | Signature, variables: dict) -> Term:
    """Parse and type-check a formula such as ``m.B(F(a), s(Y))``.

    ``m``, ``id``, ``s`` and ``t`` may omit the category, which is then
    taken from the type of the first argument; a functor or 2-cell of the
    same name takes precedence.

    ``variables`` maps names to :class:`Var`.  Raises :class:`WffSyntaxError`
    with a position, or :class:`WffTypeError`.
    """
    sig = D if isinstance(D, Signature) else Signature(D)
    toks = _tokens(text)
    i = 0

    def expect(kind):
        nonlocal i
        k, v, p = toks[i]
        if k != kind:
            shown = v or "end of input"
            raise WffSyntaxError(f"expected {kind!r} at position {p} in {text!r}, found {shown!r}")
        i += 1
        return v, p

    def term():
        nonlocal i
        name, pos = expect("id")
        if toks[i][0] != "(":
            if name not in variables:
                raise WffSyntaxError(f"unknown variable {name!r} at position {pos} in {text!r}")
            return variables[name]
        i += 1
        args = [term()]
        while toks[i][0] == ",":
            i += 1
            args.append(term())
        expect(")")
        if name in _UNQUALIFIED and name not in sig.D.functors and name not in sig.D.cells2:
            # the category of m, id, s, t is read off the first argument
            name = f"{name}.{sig.type_of(args[0]).cat}"
        try:
            kind, _ = sig.kind(name)
        except WffTypeError as e:
            raise WffSyntaxError(f"{e} at position {pos} in {text!r}") from None
        t = App(name, tuple(args))
        if kind in ("s", "t"):
            ty = sig.type_of(t.args[0]) if len(args) == 1 else None
            sig.type_of(t)
            return ty.src if kind == "s" else ty.tgt
        sig.type_of(t)
        return t

    t = term()
    if toks[i][0] != "end":
        raise WffSyntaxError(f"trailing input at position {toks[i][2]} in {text!r}")
    return t


def parse_declaration(line: str, D: PastingDiagram | Signature, variables: dict) -> list[Var]:
    """Parse ``X Y : A`` (object variables of ``A``) or ``a : X -> Y`` (an arrow variable)."""
    sig = D if isinstance(D, Signature) else Signature(D)
    if ":" not in line:
        raise WffSyntaxError(f"declaration without ':' in {line!r}")
    names, ty = (s.strip() for s in line.split(":", 1))
    names = names.split()
    if not names:
        raise WffSyntaxError(f"declaration without names in {line!r}")
    out = []
    if "->" in ty:
        s, t = (parse_wff(x.strip(), sig, variables) for x in ty.split("->", 1))
        ts, tt = sig.type_of(s), sig.type_of(t)
        if not isinstance(ts, ObjType) or ts != tt:
            raise WffTypeError(f"arrow endpoints {s}, {t} are not objects of one category")
        for n in names:
            out.append(Var(n, "arr", ts.cat, s, t))
    else:
        if ty not in sig.D.categories:
            raise WffTypeError(f"unknown category {ty!r}")
        for n in names:
            out.append(Var(n, "obj", ty))
    for v in out:
        variables[v.name] = v
    return out


# ---------------------------------------------------------------------------
# structure of terms


def subterms(t: Term) -> list[Term]:
    """All subterm occurrences, children before parents."""
    out = []
    if isinstance(t, App):
        for a in t.args:
            out += subterms(a)
    out.append(t)
    return out


def variables_of(t: Term) -> set[Var]:
    out = set()
    for s in subterms(t):
        if isinstance(s, Var):
            out.add(s)
            if s.sort == "arr":
                out |= variables_of(s.src) | variables_of(s.tgt)
    return out


def nonminimal_arrow_subterms(t: Term, sig: Signature) -> list[Term]:
    """Arrow-valued subterm occurrences that are not variables (object subterms are skipped)."""
    return [s for s in subterms(t) if isinstance(s, App) and sig.is_arrow(s)]


def substitute(t: Term, mapping: dict) -> Term:
    if t in mapping:
        return mapping[t]
    if isinstance(t, Var):
        return t
    return App(t.op, tuple(substitute(a, mapping) for a in t.args))


# ---------------------------------------------------------------------------
# instantiation in the tautologous model


def eval_object(t: Term, inst: dict, D: PastingDiagram) -> str:
    if isinstance(t, Var):
        return inst[t.name]
    (x,) = t.args
    return D.functors[t.op].obj(eval_object(x, inst, D))


def instantiations(variables, D: PastingDiagram):
    """All assignments of objects to object variables and basis arrows to arrow variables.

    Yields dicts from variable names to object names or basis labels.  By
    multilinearity these assignments determine every formula's value.
    """
    vs = sorted(set(variables), key=lambda v: (v.sort != "obj", v.name))
    objs = [v for v in vs if v.sort == "obj"]
    for v in vs:
        if v.sort == "arr":
            objs += [w for w in variables_of(v.src) | variables_of(v.tgt) if w not in objs]
    objs = sorted(set(objs), key=lambda v: v.name)
    arrs = [v for v in vs if v.sort == "arr"]
    for choice in itertools.product(*[D.categories[v.cat].objects for v in objs]):
        inst = {v.name: X for v, X in zip(objs, choice)}
        homs = []
        for v in arrs:
            C = D.categories[v.cat]
            homs.append(C.hom_basis[(eval_object(v.src, inst, D), eval_object(v.tgt, inst, D))])
        for labels in itertools.product(*homs):
            full = dict(inst)
            full.update({v.name: lab for v, lab in zip(arrs, labels)})
            yield full


# ---------------------------------------------------------------------------
# evaluation of annotated trees


@dataclass
class Node:
    """An operation occurrence; ``kids`` holds a Node for each non-variable arrow argument
    and the argument term itself otherwise.  ``edge`` names the edge that introduced it."""

    term: App
    edge: str | None
    kids: list

    def nodes(self) -> list["Node"]:
        out = []
        for k in self.kids:
            if isinstance(k, Node):
                out += k.nodes()
        out.append(self)
        return out

    def render(self, degrees: dict | None = None) -> str:
        args = [k.render(degrees) if isinstance(k, Node) else str(k) for k in self.kids]
        op = self.term.op
        if degrees is not None and id(self) in degrees:
            op = f"{op}^({degrees[id(self)]})"
        return f"{op}({', '.join(args)})"


def tree_of(t: App, sig: Signature, edge: str | None = None) -> Node:
    kids = [tree_of(a, sig) if isinstance(a, App) and sig.is_arrow(a) else a for a in t.args]
    return Node(t, edge, kids)


@dataclass(frozen=True)
class Override:
    """Replace an operation occurrence by a fixed map (degree 0 only).

    ``data`` is a structure tensor for ``m``, a matrix for functors and a
    vector for 2-cells and identities.  ``value`` instead replaces the whole
    subtree by a constant arrow.
    """

    data: object = None
    value: object = None


class Evaluator:
    """Power-series evaluation of annotated trees under a parallel family."""

    def __init__(self, D: PastingDiagram, P=None, upto: int = 0):
        from ..deform import ParallelFamily, _Expander
        self.D = D
        self.sig = Signature(D)
        self.P = P if P is not None else ParallelFamily(D, max(upto, 0))
        self.upto = upto
        self.ex = _Expander(self.P, max(upto, 0))
        self.f = D.field

    def obj(self, t: Term, inst: dict) -> str:
        return eval_object(t, inst, self.D)

    def ends(self, t: Term, inst: dict) -> tuple[str, str, str]:
        ty = self.sig.type_of(t)
        return ty.cat, self.obj(ty.src, inst), self.obj(ty.tgt, inst)

    def _zeros(self, n):
        return [self.f.zeros(n) for _ in range(self.upto + 1)]

    def _arg(self, k, inst, policy):
        if isinstance(k, Node):
            return self.series(k, inst, policy)
        cat, X, Y = self.ends(k, inst)
        C = self.D.categories[cat]
        v = C.basis_arrow(inst[k.name]).vec
        return [v] + [self.f.zeros(len(v)) for _ in range(self.upto)]

    def series(self, node: Node, inst: dict, policy=None) -> list:
        """Coefficients of eps^0..eps^upto of the deformed value of ``node``.

        ``policy(node)`` returns the allowed parallel degrees of the operation
        (default: all), or an :class:`Override`.
        """
        f, D, ex = self.f, self.D, self.ex
        rule = policy(node) if policy is not None else range(self.upto + 1)
        cat, X, Y = self.ends(node.term, inst)
        n = D.categories[cat].dim(X, Y)
        if isinstance(rule, Override) and rule.value is not None:
            out = self._zeros(n)
            out[0] = f.array(rule.value)
            return out
        kind, name = self.sig.kind(node.term.op)
        out = self._zeros(n)
        if kind == "m":
            u, v = node.term.args
            _, X0, X1 = self.ends(u, inst)
            X2 = self.ends(v, inst)[2]
            us = self._arg(node.kids[0], inst, policy)
            vs = self._arg(node.kids[1], inst, policy)
            if isinstance(rule, Override):
                tensors = [(0, rule.data)]
            else:
                tensors = [(i, ex.mu_tensor(name, i, X0, X1, X2)) for i in rule if i <= self.upto]
            if n == 0 or len(us[0]) == 0 or len(vs[0]) == 0:
                return out
            for i, t in tensors:
                for j in range(self.upto + 1 - i):
                    if not us[j].any():
                        continue
                    for l in range(self.upto + 1 - i - j):
                        if vs[l].any():
                            out[i + j + l] = out[i + j + l] + np.einsum("i,j,ijk->k", us[j], vs[l], t)
        elif kind == "functor":
            (a,) = node.term.args
            _, X0, X1 = self.ends(a, inst)
            us = self._arg(node.kids[0], inst, policy)
            if isinstance(rule, Override):
                mats = [(0, rule.data)]
            else:
                mats = [(i, ex.functor_matrix(name, i, X0, X1)) for i in rule if i <= self.upto]
            if n == 0 or len(us[0]) == 0:
                return out
            for i, m in mats:
                for j in range(self.upto + 1 - i):
                    if us[j].any():
                        out[i + j] = out[i + j] + m.dot(us[j])
        elif kind == "nat":
            X0 = self.obj(node.term.args[0], inst)
            if isinstance(rule, Override):
                out[0] = f.array(rule.data)
            else:
                comp = ex.component(name, X0)
                for i in rule:
                    if i <= self.upto and i < len(comp):
                        out[i] = comp[i]
        elif kind == "id":
            if isinstance(rule, Override):
                out[0] = f.array(rule.data)
            elif 0 in rule:
                out[0] = D.categories[cat].identity_vec[X].copy()
        else:
            raise WffTypeError(f"cannot evaluate {node.term.op}")
        return [f.reduce(v) for v in out]

    def value(self, t: Term, inst: dict) -> np.ndarray:
        """Undeformed value of an arrow term."""
        if isinstance(t, Var):
            return self.D.categories[t.cat].basis_arrow(inst[t.name]).vec
        return self.series(tree_of(t, self.sig), inst, lambda n: (0,))[0]


def wff_equivalent(u: Term, v: Term, D: PastingDiagram, evaluator: Evaluator | None = None) -> bool:
    """Equal type and equal value under every instantiation in the tautologous model."""
    if variables_of(u) != variables_of(v):
        raise VariableMismatch(f"{u} and {v} have different variables")
    return _equivalent(u, v, D, evaluator)


def _equivalent(u: Term, v: Term, D: PastingDiagram, evaluator: Evaluator | None = None) -> bool:
    if u == v:
        return True
    ev = evaluator or Evaluator(D)
    sig = ev.sig
    if sig.type_of(u) != sig.type_of(v):
        return False
    if not sig.is_arrow(u):
        return False
    for inst in instantiations(variables_of(u) | variables_of(v), D):
        if not np.array_equal(ev.value(u, inst), ev.value(v, inst)):
            return False
    return True
