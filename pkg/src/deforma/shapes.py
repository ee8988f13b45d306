"""Random pasting diagrams of the standard small shapes.

Each builder takes a field and a ``random.Random`` and returns a validated
:class:`PastingDiagram`.  Categories are drawn from the library, functors
and natural transformations from its samplers.  Where a 3-cell asserts
that a composite equals a single 2-cell, that 2-cell is set to the
composite, so every sample satisfies its relation.

Composition-free shapes: ``category``, ``functor``, ``bigon``, ``two_bigons``,
``composite_bigon`` (a 2-cell from a two-functor path to a functor).
Shapes with a single 3-cell: ``bigonal_pillow`` (s = s'), ``triangular_pillow``
(s;t = u), ``square_pillow`` (s;t = s';t'), ``triple`` ((s;t);u = x),
``post`` (H[s] = t), ``pre`` ([s]F = t), ``post_vert`` (H[s];t = u),
``pre_vert`` ([t]F;s = u), ``vert_post`` (s;K[t] = u), ``vert_pre``
(s;[t]G = u), ``post_long`` and ``pre_long`` (a whiskered cell whose
boundary path has two functors).
"""

from __future__ import annotations

import random

from . import library as L
from .diagram import Leaf, PastingDiagram, Post, Pre, Vert
from .fincat import LinFunctor, NatTrans
from .linalg import Field

SMALL = ("unit", "dual", "split", "path2")
ANY = ("unit", "dual", "split", "path2", "trunc3", "kron")


def _cats(D: PastingDiagram, names, field, rng, pool):
    out = []
    for n in names:
        c = L.make(rng.choice(pool), field, n)
        D.add_category(c, n)
        out.append(c)
    return out


def _functor(D, name, src, tgt, rng) -> LinFunctor:
    F = L.random_functor(name, src, tgt, rng)
    D.add_functor(F, name)
    return F


def _copy_functor(D, name, F: LinFunctor) -> LinFunctor:
    G = LinFunctor(name, F.source, F.target, F.object_map, F.arrow_map)
    D.add_functor(G, name)
    return G


def _cell(D, name, dom, cod, rng):
    P, Q = D.path_functor(dom), D.path_functor(cod)
    return D.add_cell2(name, dom, cod, nat=L.random_nat(name, P, Q, rng))


def _value_cell(D, name, dom, cod, tree):
    return D.add_cell2(name, dom, cod, nat=D.tree_value(tree))


def category(field, rng, pool=ANY):
    D = PastingDiagram(field)
    _cats(D, ["A"], field, rng, pool)
    return D


def functor(field, rng, pool=ANY):
    D = PastingDiagram(field)
    A, B = _cats(D, ["A", "B"], field, rng, pool)
    _functor(D, "F", A, B, rng)
    return D


def bigon(field, rng, pool=ANY):
    D = functor(field, rng, pool)
    A, B = D.categories["A"], D.categories["B"]
    _functor(D, "G", A, B, rng)
    _cell(D, "s", ["F"], ["G"], rng)
    return D


def two_bigons(field, rng, pool=SMALL):
    D = bigon(field, rng, pool)
    A, B = D.categories["A"], D.categories["B"]
    _functor(D, "H", A, B, rng)
    _cell(D, "t", ["G"], ["H"], rng)
    return D


def composite_bigon(field, rng, pool=SMALL):
    D, (A, B, C) = _three(field, rng, pool)
    _functor(D, "F", A, B, rng)
    _functor(D, "G", B, C, rng)
    _functor(D, "H", A, C, rng)
    _cell(D, "s", ["F", "G"], ["H"], rng)
    return D


def bigonal_pillow(field, rng, pool=SMALL):
    D = bigon(field, rng, pool)
    D.add_cell2("s2", ["F"], ["G"], nat=D.cells2["s"].nat)
    D.add_cell3("E", Leaf("s"), Leaf("s2"))
    return D


def triangular_pillow(field, rng, pool=SMALL):
    D = two_bigons(field, rng, pool)
    t = Vert(Leaf("s"), Leaf("t"))
    _value_cell(D, "u", ["F"], ["H"], t)
    D.add_cell3("E", t, Leaf("u"))
    return D


def square_pillow(field, rng, pool=SMALL):
    D = two_bigons(field, rng, pool)
    _copy_functor(D, "G2", D.functors["G"])
    f = field
    c = f.random(rng) or f.one
    s, t = D.cells2["s"].nat, D.cells2["t"].nat
    D.add_cell2("s2", ["F"], ["G2"], {X: f.reduce(v * c) for X, v in s.components.items()})
    ci = f.inv(c)
    D.add_cell2("t2", ["G2"], ["H"], {X: f.reduce(v * ci) for X, v in t.components.items()})
    D.add_cell3("E", Vert(Leaf("s"), Leaf("t")), Vert(Leaf("s2"), Leaf("t2")))
    return D


def triple(field, rng, pool=("unit", "dual", "split")):
    D = two_bigons(field, rng, pool)
    A, B = D.categories["A"], D.categories["B"]
    _functor(D, "K", A, B, rng)
    _cell(D, "u", ["H"], ["K"], rng)
    t = Vert(Vert(Leaf("s"), Leaf("t")), Leaf("u"))
    _value_cell(D, "x", ["F"], ["K"], t)
    D.add_cell3("E", t, Leaf("x"))
    return D


def _three(field, rng, pool):
    D = PastingDiagram(field)
    return D, _cats(D, ["A", "B", "C"], field, rng, pool)


def post(field, rng, pool=SMALL):
    D, (A, B, C) = _three(field, rng, pool)
    _functor(D, "F", A, B, rng)
    _functor(D, "G", A, B, rng)
    _functor(D, "H", B, C, rng)
    _cell(D, "s", ["F"], ["G"], rng)
    t = Post(Leaf("s"), ("H",))
    _value_cell(D, "t", ["F", "H"], ["G", "H"], t)
    D.add_cell3("E", t, Leaf("t"))
    return D


def pre(field, rng, pool=SMALL):
    D, (A, B, C) = _three(field, rng, pool)
    _functor(D, "F", A, B, rng)
    _functor(D, "G", B, C, rng)
    _functor(D, "H", B, C, rng)
    _cell(D, "s", ["G"], ["H"], rng)
    t = Pre(("F",), Leaf("s"))
    _value_cell(D, "t", ["F", "G"], ["F", "H"], t)
    D.add_cell3("E", t, Leaf("t"))
    return D


def post_vert(field, rng, pool=SMALL):
    D, (A, B, C) = _three(field, rng, pool)
    _functor(D, "F", A, B, rng)
    _functor(D, "G", A, B, rng)
    _functor(D, "H", B, C, rng)
    _functor(D, "K", A, C, rng)
    _cell(D, "s", ["F"], ["G"], rng)
    _cell(D, "t", ["G", "H"], ["K"], rng)
    t = Vert(Post(Leaf("s"), ("H",)), Leaf("t"))
    _value_cell(D, "u", ["F", "H"], ["K"], t)
    D.add_cell3("E", t, Leaf("u"))
    return D


def pre_vert(field, rng, pool=SMALL):
    D, (A, B, C) = _three(field, rng, pool)
    _functor(D, "F", A, B, rng)
    _functor(D, "G", B, C, rng)
    _functor(D, "H", B, C, rng)
    _functor(D, "K", A, C, rng)
    _cell(D, "s", ["F", "H"], ["K"], rng)
    _cell(D, "t", ["G"], ["H"], rng)
    t = Vert(Pre(("F",), Leaf("t")), Leaf("s"))
    _value_cell(D, "u", ["F", "G"], ["K"], t)
    D.add_cell3("E", t, Leaf("u"))
    return D


def vert_post(field, rng, pool=SMALL):
    D, (A, B, C) = _three(field, rng, pool)
    _functor(D, "F", A, C, rng)
    _functor(D, "G", A, B, rng)
    _functor(D, "H", A, B, rng)
    _functor(D, "K", B, C, rng)
    _cell(D, "s", ["F"], ["G", "K"], rng)
    _cell(D, "t", ["G"], ["H"], rng)
    t = Vert(Leaf("s"), Post(Leaf("t"), ("K",)))
    _value_cell(D, "u", ["F"], ["H", "K"], t)
    D.add_cell3("E", t, Leaf("u"))
    return D


def vert_pre(field, rng, pool=SMALL):
    D, (A, B, C) = _three(field, rng, pool)
    _functor(D, "F", A, C, rng)
    _functor(D, "G", A, B, rng)
    _functor(D, "H", B, C, rng)
    _functor(D, "K", B, C, rng)
    _cell(D, "s", ["F"], ["G", "H"], rng)
    _cell(D, "t", ["H"], ["K"], rng)
    t = Vert(Leaf("s"), Pre(("G",), Leaf("t")))
    _value_cell(D, "u", ["F"], ["G", "K"], t)
    D.add_cell3("E", t, Leaf("u"))
    return D


def post_long(field, rng, pool=("unit", "dual", "split")):
    D = PastingDiagram(field)
    A, B, C, Z = _cats(D, ["A", "B", "C", "Z"], field, rng, pool)
    _functor(D, "F", A, B, rng)
    _functor(D, "G", B, C, rng)
    _functor(D, "K", A, C, rng)
    _functor(D, "H", C, Z, rng)
    _cell(D, "s", ["F", "G"], ["K"], rng)
    t = Post(Leaf("s"), ("H",))
    _value_cell(D, "t", ["F", "G", "H"], ["K", "H"], t)
    D.add_cell3("E", t, Leaf("t"))
    return D


def pre_long(field, rng, pool=("unit", "dual", "split")):
    D = PastingDiagram(field)
    A, B, C, Z = _cats(D, ["A", "B", "C", "Z"], field, rng, pool)
    _functor(D, "V", A, B, rng)
    _functor(D, "G", B, C, rng)
    _functor(D, "H", C, Z, rng)
    _functor(D, "K", B, Z, rng)
    _cell(D, "s", ["G", "H"], ["K"], rng)
    t = Pre(("V",), Leaf("s"))
    _value_cell(D, "t", ["V", "G", "H"], ["V", "K"], t)
    D.add_cell3("E", t, Leaf("t"))
    return D


COMPOSITION_FREE = {
    "category": category,
    "functor": functor,
    "bigon": bigon,
    "two_bigons": two_bigons,
    "bigonal_pillow": bigonal_pillow,
    "composite_bigon": composite_bigon,
}

SINGLE_COMPOSITION = {
    "triangular_pillow": triangular_pillow,
    "post": post,
    "pre": pre,
}

WITH_THREE_CELL = {
    "bigonal_pillow": bigonal_pillow,
    "triangular_pillow": triangular_pillow,
    "square_pillow": square_pillow,
    "triple": triple,
    "post": post,
    "pre": pre,
    "post_vert": post_vert,
    "pre_vert": pre_vert,
    "vert_post": vert_post,
    "vert_pre": vert_pre,
    "post_long": post_long,
    "pre_long": pre_long,
}

ALL = {**COMPOSITION_FREE, **WITH_THREE_CELL}


def sample(shape: str, field: Field, seed: int) -> PastingDiagram:
    """A random diagram of the named shape, reproducible from ``seed``."""
    rng = random.Random(f"{shape}:{seed}")
    D = ALL[shape](field, rng)
    bad = D.validate()
    if bad:
        raise AssertionError(f"sampler produced an invalid {shape}: {bad[0]}")
    return D


def reseed_nat(s: NatTrans, rng: random.Random) -> NatTrans:
    """A fresh random natural transformation with the same source and target as ``s``."""
    return L.random_nat(s.name, s.source, s.target, rng)
