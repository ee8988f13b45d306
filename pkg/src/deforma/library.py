"""A small zoo of finite linear categories, functors between them, and samplers.

The categories are deliberately tiny (at most three objects, total hom
dimension at most six) so that cochain spaces stay desk-sized:

``unit``      one object, Hom = k
``dual``      dual numbers k[x]/x^2
``trunc3``    k[x]/x^3
``split``     k x k as a one-object category (basis 1, e with e^2 = e)
``path2``     the path category 0 -> 1
``kron``      two parallel arrows 0 -> 1
``path3``     the path category 0 -> 1 -> 2

Functor samplers cover every ordered pair of these, so random pasting
diagrams can be drawn for any shape.
"""

from __future__ import annotations

import random

import numpy as np

from .fincat import FinLinCat, LinFunctor, NatTrans
from .linalg import ExactMatrix, Field, kernel_basis


def _algebra(name, field, basis, table, tag):
    """One-object category from an algebra with unit basis[0]."""
    compose = {}
    for (a, b), res in table.items():
        compose[(a, b)] = res
    c = FinLinCat(name, field, ["*"], {("*", "*"): basis}, compose, {"*": {basis[0]: 1}})
    c.tag = tag
    return c


def unit(field: Field, name: str = "U") -> FinLinCat:
    return _algebra(name, field, ["1"], {("1", "1"): {"1": 1}}, "unit")


def dual_numbers(field: Field, name: str = "D", square=0) -> FinLinCat:
    """k[x]/(x^2 - square); ``square = 0`` gives the dual numbers."""
    table = {("1", "1"): {"1": 1}, ("1", "x"): {"x": 1}, ("x", "1"): {"x": 1}}
    if square:
        table[("x", "x")] = {"1": square}
    return _algebra(name, field, ["1", "x"], table, "dual")


def trunc3(field: Field, name: str = "T") -> FinLinCat:
    table = {}
    basis = ["1", "x", "x2"]
    for i in range(3):
        for j in range(3):
            if i + j < 3:
                table[(basis[i], basis[j])] = {basis[i + j]: 1}
    return _algebra(name, field, basis, table, "trunc3")


def split(field: Field, name: str = "S") -> FinLinCat:
    table = {("1", "1"): {"1": 1}, ("1", "e"): {"e": 1}, ("e", "1"): {"e": 1}, ("e", "e"): {"e": 1}}
    return _algebra(name, field, ["1", "e"], table, "split")


def _path(name, field, n_objects, extra, tag):
    objs = [str(i) for i in range(n_objects)]
    hom = {(o, o): [f"e{o}"] for o in objs}
    compose = {}
    for o in objs:
        compose[(f"e{o}", f"e{o}")] = {f"e{o}": 1}
    for (X, Y), labs in extra.items():
        hom[(X, Y)] = labs
        for a in labs:
            compose[(f"e{X}", a)] = {a: 1}
            compose[(a, f"e{Y}")] = {a: 1}
    return objs, hom, compose


def path2(field: Field, name: str = "P") -> FinLinCat:
    objs, hom, compose = _path(name, field, 2, {("0", "1"): ["a"]}, "path2")
    c = FinLinCat(name, field, objs, hom, compose, {o: {f"e{o}": 1} for o in objs})
    c.tag = "path2"
    return c


def kronecker(field: Field, name: str = "K") -> FinLinCat:
    objs, hom, compose = _path(name, field, 2, {("0", "1"): ["a", "b"]}, "kron")
    c = FinLinCat(name, field, objs, hom, compose, {o: {f"e{o}": 1} for o in objs})
    c.tag = "kron"
    return c


def path3(field: Field, name: str = "Q") -> FinLinCat:
    objs, hom, compose = _path(name, field, 3, {("0", "1"): ["a"], ("1", "2"): ["b"], ("0", "2"): ["ab"]},
                               "path3")
    compose[("a", "b")] = {"ab": 1}
    c = FinLinCat(name, field, objs, hom, compose, {o: {f"e{o}": 1} for o in objs})
    c.tag = "path3"
    return c


BUILDERS = {
    "unit": unit,
    "dual": dual_numbers,
    "trunc3": trunc3,
    "split": split,
    "path2": path2,
    "kron": kronecker,
    "path3": path3,
}

ONE_OBJECT = {"unit", "dual", "trunc3", "split"}


def make(tag: str, field: Field, name: str | None = None) -> FinLinCat:
    b = BUILDERS[tag]
    return b(field, name) if name else b(field)


# ---------------------------------------------------------------------------
# functors


def functor_from_images(name: str, src: FinLinCat, tgt: FinLinCat, object_map: dict,
                        images: dict) -> LinFunctor:
    """Build a functor from the images of basis arrows, given as dicts/sequences over the target hom basis."""
    f = src.field
    amap = {}
    for X in src.objects:
        for Y in src.objects:
            FX, FY = object_map[X], object_map[Y]
            labels = src.hom_basis[(X, Y)]
            m = f.zeros((tgt.dim(FX, FY), len(labels)))
            for j, a in enumerate(labels):
                m[:, j] = tgt._coeffs(images[a], FX, FY)
            amap[(X, Y)] = m
    return LinFunctor(name, src, tgt, object_map, amap)


def _character(src: FinLinCat, rng: random.Random) -> dict:
    """A multiplicative linear map src -> k (values on basis arrows), sampled at random."""
    f = src.field
    tag = getattr(src, "tag", None)
    one = f.one
    if tag == "unit":
        return {"1": one}
    if tag in ("dual", "trunc3"):
        return {a: (one if a == "1" else f.zero) for a in src.arrows}
    if tag == "split":
        return {"1": one, "e": rng.choice([f.zero, one])}
    if tag in ("path2", "kron"):
        out = {a: one for a in src.arrows if a.startswith("e")}
        for a in src.arrows:
            if not a.startswith("e"):
                out[a] = f.random(rng)
        return out
    if tag == "path3":
        c1, c2 = f.random(rng), f.random(rng)
        return {"e0": one, "e1": one, "e2": one, "a": c1, "b": c2, "ab": f.mul(c1, c2)}
    raise ValueError(f"no character sampler for {src.name}")


def collapse_functor(name: str, src: FinLinCat, tgt: FinLinCat, Y: str, rng: random.Random) -> LinFunctor:
    """Send every object to Y and every arrow to a multiple of id_Y through a character."""
    chi = _character(src, rng)
    idY = tgt.identity_vec[Y]
    images = {a: [tgt.field.mul(chi[a], c) for c in idY] for a in src.arrows}
    return functor_from_images(name, src, tgt, {X: Y for X in src.objects}, images)


def _one_object_element(tgt: FinLinCat, rng: random.Random):
    f = tgt.field
    return [f.random(rng) for _ in tgt.arrows]


def random_functor(name: str, src: FinLinCat, tgt: FinLinCat, rng: random.Random) -> LinFunctor:
    """A random linear functor between two library categories."""
    f = src.field
    s, t = getattr(src, "tag", None), getattr(tgt, "tag", None)
    options = []

    def add(builder):
        options.append(builder)

    for Y in tgt.objects:
        add(lambda Y=Y: collapse_functor(name, src, tgt, Y, rng))
    if s == "unit":
        pass  # collapse already covers every functor out of the unit
    elif s == "dual" and t in ("dual", "trunc3"):
        def b():
            c = f.random(rng)
            img = {"1": {"1": 1}, "x": {"x": c}} if t == "dual" else {"1": {"1": 1}, "x": {"x2": c}}
            if t == "trunc3" and rng.random() < 0.5:
                c2 = f.random(rng)
                img = {"1": {"1": 1}, "x": {"x2": c2}}
            return functor_from_images(name, src, tgt, {"*": "*"}, img)
        add(b)
        add(b)
    elif s == "trunc3" and t in ("dual", "trunc3"):
        def b():
            c1, c2 = f.random(rng), f.random(rng)
            if t == "dual":
                img = {"1": {"1": 1}, "x": {"x": c1}, "x2": {}}
            else:
                img = {"1": {"1": 1}, "x": {"x": c1, "x2": c2}, "x2": {"x2": f.mul(c1, c1)}}
            return functor_from_images(name, src, tgt, {"*": "*"}, img)
        add(b)
        add(b)
    elif s == "split" and t == "split":
        def b():
            e_img = rng.choice([{"e": 1}, {"1": 1, "e": -1}, {}, {"1": 1}])
            return functor_from_images(name, src, tgt, {"*": "*"}, {"1": {"1": 1}, "e": e_img})
        add(b)
        add(b)
    elif s in ("path2", "kron") and t in ONE_OBJECT:
        def b():
            images = {"e0": {"1": 1}, "e1": {"1": 1}}
            for a in src.arrows:
                if not a.startswith("e"):
                    images[a] = _one_object_element(tgt, rng)
            return functor_from_images(name, src, tgt, {"0": "*", "1": "*"}, images)
        add(b)
        add(b)
        add(b)
    elif s in ("path2", "kron") and t in ("path2", "kron", "path3"):
        pairs = [("0", "1")] if t != "path3" else [("0", "1"), ("1", "2"), ("0", "2")]

        def b():
            X, Y = rng.choice(pairs)
            labels = tgt.hom_basis[(X, Y)]
            images = {"e0": {f"e{X}": 1}, "e1": {f"e{Y}": 1}}
            for a in src.arrows:
                if not a.startswith("e"):
                    images[a] = {lab: f.random(rng) for lab in labels}
            return functor_from_images(name, src, tgt, {"0": X, "1": Y}, images)
        add(b)
        add(b)
    elif s == "path3" and t in ONE_OBJECT:
        def b():
            u = _one_object_element(tgt, rng)
            v = _one_object_element(tgt, rng)
            uv = list(tgt.compose_vecs("*", "*", "*", tgt.field.array(u), tgt.field.array(v)))
            images = {"e0": {"1": 1}, "e1": {"1": 1}, "e2": {"1": 1}, "a": u, "b": v, "ab": uv}
            return functor_from_images(name, src, tgt, {o: "*" for o in src.objects}, images)
        add(b)
        add(b)
    elif s == "path3" and t == "path3":
        def b():
            c1, c2 = f.random(rng), f.random(rng)
            images = {"e0": {"e0": 1}, "e1": {"e1": 1}, "e2": {"e2": 1}, "a": {"a": c1}, "b": {"b": c2},
                      "ab": {"ab": f.mul(c1, c2)}}
            return functor_from_images(name, src, tgt, {o: o for o in src.objects}, images)
        add(b)
        add(b)
    elif s == t and s is not None:
        add(lambda: functor_from_images(name, src, tgt, {X: X for X in src.objects},
                                        {a: {a: 1} for a in src.arrows}))
    return rng.choice(options)()


def naturality_matrix(F: LinFunctor, G: LinFunctor) -> ExactMatrix:
    """Linear constraints on C^0(F, G) cutting out the natural transformations."""
    A, B = F.source, F.target
    f = A.field
    offs = {}
    o = 0
    for X in A.objects:
        offs[X] = o
        o += B.dim(F.obj(X), G.obj(X))
    rows = []
    for X in A.objects:
        for Y in A.objects:
            for a in A.hom_basis[(X, Y)]:
                av = A.basis_arrow(a).vec
                Fa = F.apply_vec(X, Y, av)
                Ga = G.apply_vec(X, Y, av)
                L = B.right_mult_matrix(Ga, F.obj(X), G.obj(X), G.obj(Y))  # s_X -> s_X G(a)
                R = B.left_mult_matrix(Fa, F.obj(X), F.obj(Y), G.obj(Y))   # s_Y -> F(a) s_Y
                for k in range(B.dim(F.obj(X), G.obj(Y))):
                    row = [f.zero] * o
                    for j in range(L.shape[1]):
                        row[offs[X] + j] = f.sub(row[offs[X] + j], L[k, j])
                    for j in range(R.shape[1]):
                        row[offs[Y] + j] = f.add(row[offs[Y] + j], R[k, j])
                    rows.append(row)
    if not rows:
        return ExactMatrix(f, 0, o)
    return ExactMatrix.from_dense(f, rows)


def natural_basis(F: LinFunctor, G: LinFunctor) -> list[dict]:
    """Basis of the space of natural transformations F => G, as component dicts."""
    A, B = F.source, F.target
    m = naturality_matrix(F, G)
    out = []
    for v in kernel_basis(m):
        comps = {}
        o = 0
        for X in A.objects:
            d = B.dim(F.obj(X), G.obj(X))
            comps[X] = A.field.array(v[o:o + d]) if d else A.field.zeros(0)
            o += d
        out.append(comps)
    return out


def random_nat(name: str, F: LinFunctor, G: LinFunctor, rng: random.Random) -> NatTrans:
    """A random natural transformation F => G (possibly zero if none exist)."""
    A, B = F.source, F.target
    f = A.field
    basis = natural_basis(F, G)
    comps = {X: f.zeros(B.dim(F.obj(X), G.obj(X))) for X in A.objects}
    for b in basis:
        c = f.random(rng)
        if c == 0 and rng.random() < 0.7:
            c = f.one
        for X in A.objects:
            comps[X] = f.reduce(comps[X] + b[X] * c)
    return NatTrans(name, F, G, comps)
