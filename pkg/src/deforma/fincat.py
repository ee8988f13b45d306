"""Finite k-linear categories, linear functors and natural transformations.

Composition is diagrammatic throughout: for ``a: X -> Y`` and ``b: Y -> Z``
the composite ``ab`` means "a then b" and lives in ``Hom(X, Z)``.

Arrow vectors are numpy arrays in the field's dtype, indexed by the ordered
hom basis fixed at construction.
"""

from __future__ import annotations

from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .linalg import Field


class NonComposable(ValueError):
    """Raised when arrows or functors do not meet end to end."""


class CompositionMismatch(ValueError):
    """Raised when cochains, functors or natural transformations have incompatible shapes."""


class Violation(NamedTuple):
    kind: str
    where: tuple
    detail: str

    def __str__(self):
        return f"{self.kind} at {self.where}: {self.detail}"


class Arrow(NamedTuple):
    """A vector in ``Hom(src, tgt)``."""

    src: str
    tgt: str
    vec: np.ndarray

    def __eq__(self, other):
        return (isinstance(other, Arrow) and self.src == other.src and self.tgt == other.tgt
                and np.array_equal(self.vec, other.vec))

    def __hash__(self):
        return hash((self.src, self.tgt, tuple(self.vec.tolist())))


class FinLinCat:
    """A finite k-linear category given by hom bases and structure constants.

    ``hom`` maps an ordered pair of objects to a list of basis labels (missing
    pairs are zero spaces).  ``compose`` maps a pair of basis labels ``(a, b)``
    to the coefficients of ``ab`` as a dict ``{label: scalar}`` or a sequence
    in basis order; missing pairs compose to zero.  ``identity`` maps each
    object to the coefficients of its identity arrow.
    """

    def __init__(self, name: str, field: Field, objects: Sequence[str],
                 hom: dict, compose: dict, identity: dict):
        self.name = name
        self.field = field
        self.objects = list(objects)
        if len(set(self.objects)) != len(self.objects):
            raise ValueError(f"duplicate objects in {name}")
        self.hom_basis: dict[tuple[str, str], tuple[str, ...]] = {}
        self.arrow_index: dict[str, tuple[str, str, int]] = {}
        for X in self.objects:
            for Y in self.objects:
                labels = tuple(hom.get((X, Y), ()))
                self.hom_basis[(X, Y)] = labels
                for i, lab in enumerate(labels):
                    if lab in self.arrow_index:
                        raise ValueError(f"basis label {lab!r} used twice in {name}")
                    self.arrow_index[lab] = (X, Y, i)
        for key in hom:
            if key[0] not in self.objects or key[1] not in self.objects:
                raise ValueError(f"hom space {key} refers to unknown objects")
        self.arrows: list[str] = [lab for X in self.objects for Y in self.objects
                                  for lab in self.hom_basis[(X, Y)]]
        self._compose_raw = dict(compose)
        self._mult: dict[tuple[str, str, str], np.ndarray] = {}
        for X in self.objects:
            for Y in self.objects:
                for Z in self.objects:
                    self._mult[(X, Y, Z)] = self._build_mult(X, Y, Z)
        for (a, b) in compose:
            if a not in self.arrow_index or b not in self.arrow_index:
                raise ValueError(f"structure constant for unknown arrows {(a, b)}")
        self.identity_vec: dict[str, np.ndarray] = {}
        for X in self.objects:
            self.identity_vec[X] = self._coeffs(identity[X], X, X)

    def _coeffs(self, data, X, Y) -> np.ndarray:
        f = self.field
        labels = self.hom_basis[(X, Y)]
        v = f.zeros(len(labels))
        if isinstance(data, dict):
            for lab, c in data.items():
                if lab not in labels:
                    raise ValueError(f"{lab!r} is not a basis arrow of Hom{(X, Y)} in {self.name}")
                v[labels.index(lab)] = f(c)
        else:
            data = list(data)
            if len(data) != len(labels):
                raise ValueError(f"coefficient vector of length {len(data)} for Hom{(X, Y)}")
            for i, c in enumerate(data):
                v[i] = f(c)
        return v

    def _build_mult(self, X, Y, Z) -> np.ndarray:
        A = self.hom_basis[(X, Y)]
        B = self.hom_basis[(Y, Z)]
        C = self.hom_basis[(X, Z)]
        t = self.field.zeros((len(A), len(B), len(C)))
        for i, a in enumerate(A):
            for j, b in enumerate(B):
                data = self._compose_raw.get((a, b))
                if data is not None:
                    t[i, j, :] = self._coeffs(data, X, Z)
        return t

    # -- basic queries ---------------------------------------------------
    def dim(self, X: str, Y: str) -> int:
        return len(self.hom_basis[(X, Y)])

    def total_dim(self) -> int:
        return len(self.arrows)

    def mult(self, X: str, Y: str, Z: str) -> np.ndarray:
        """Structure tensor ``t[i, j, k]``: coefficient of basis k of Hom(X,Z) in a_i b_j."""
        return self._mult[(X, Y, Z)]

    def basis_arrow(self, label: str) -> Arrow:
        X, Y, i = self.arrow_index[label]
        v = self.field.zeros(self.dim(X, Y))
        v[i] = self.field.one
        return Arrow(X, Y, v)

    @cached_property
    def identity_labels(self) -> dict:
        """Object -> label of its identity, when the identity is a basis arrow (else None)."""
        out = {}
        for X in self.objects:
            v = self.identity_vec[X]
            nz = [i for i, c in enumerate(v) if c != 0]
            lab = None
            if len(nz) == 1 and v[nz[0]] == self.field.one:
                lab = self.hom_basis[(X, X)][nz[0]]
            out[X] = lab
        return out

    def identity(self, X: str) -> Arrow:
        return Arrow(X, X, self.identity_vec[X].copy())

    def arrow(self, X: str, Y: str, coeffs) -> Arrow:
        return Arrow(X, Y, self._coeffs(coeffs, X, Y))

    def zero_arrow(self, X: str, Y: str) -> Arrow:
        return Arrow(X, Y, self.field.zeros(self.dim(X, Y)))

    def compose_vecs(self, X: str, Y: str, Z: str, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Coefficients of ``uv`` for ``u`` in Hom(X,Y) and ``v`` in Hom(Y,Z)."""
        t = self._mult[(X, Y, Z)]
        if t.size == 0:
            return self.field.zeros(t.shape[2])
        return self.field.reduce(np.einsum("i,j,ijk->k", u, v, t))

    def compose_arrows(self, u: Arrow, v: Arrow) -> Arrow:
        """Diagrammatic composite ``uv`` (u then v)."""
        if u.tgt != v.src:
            raise NonComposable(f"cannot compose {u.src}->{u.tgt} with {v.src}->{v.tgt} in {self.name}")
        return Arrow(u.src, v.tgt, self.compose_vecs(u.src, u.tgt, v.tgt, u.vec, v.vec))

    def left_mult_matrix(self, u: np.ndarray, X: str, Y: str, Z: str) -> np.ndarray:
        """Matrix of ``w -> u w`` from Hom(Y,Z) to Hom(X,Z), for u in Hom(X,Y)."""
        t = self._mult[(X, Y, Z)]
        if t.size == 0:
            return self.field.zeros((t.shape[2], t.shape[1]))
        return self.field.reduce(np.einsum("i,ijk->kj", u, t))

    def right_mult_matrix(self, v: np.ndarray, X: str, Y: str, Z: str) -> np.ndarray:
        """Matrix of ``w -> w v`` from Hom(X,Y) to Hom(X,Z), for v in Hom(Y,Z)."""
        t = self._mult[(X, Y, Z)]
        if t.size == 0:
            return self.field.zeros((t.shape[2], t.shape[0]))
        return self.field.reduce(np.einsum("j,ijk->ki", v, t))

    @cached_property
    def identity_functor(self) -> "LinFunctor":
        f = self.field
        amap = {}
        for X in self.objects:
            for Y in self.objects:
                n = self.dim(X, Y)
                m = f.zeros((n, n))
                for i in range(n):
                    m[i, i] = f.one
                amap[(X, Y)] = m
        I = LinFunctor(f"Id_{self.name}", self, self, {X: X for X in self.objects}, amap)
        I.atoms = ()
        return I

    def __repr__(self):
        return f"FinLinCat({self.name!r}, objects={self.objects}, dim={self.total_dim()})"


class LinFunctor:
    """A linear functor; ``arrow_map[(X, Y)]`` is a matrix Hom(X,Y) -> Hom(FX,FY)."""

    def __init__(self, name: str, source: FinLinCat, target: FinLinCat,
                 object_map: dict, arrow_map: dict):
        if source.field != target.field:
            raise CompositionMismatch("functor between categories over different fields")
        self.name = name
        self.source = source
        self.target = target
        self.field = source.field
        # the non-identity functors this one is a composite of, in order
        self.atoms: tuple = (self,)
        self.object_map = {X: object_map[X] for X in source.objects}
        for X, Y in self.object_map.items():
            if Y not in target.objects:
                raise ValueError(f"{name} sends {X} to unknown object {Y}")
        f = self.field
        self.arrow_map: dict[tuple[str, str], np.ndarray] = {}
        for X in source.objects:
            for Y in source.objects:
                FX, FY = self.object_map[X], self.object_map[Y]
                shape = (target.dim(FX, FY), source.dim(X, Y))
                m = arrow_map.get((X, Y))
                if m is None:
                    if shape[0] * shape[1]:
                        raise ValueError(f"{name} has no arrow map on Hom{(X, Y)}")
                    m = f.zeros(shape)
                else:
                    m = f.reduce(f.array(m).reshape(shape)) if np.size(m) else f.zeros(shape)
                self.arrow_map[(X, Y)] = m

    def obj(self, X: str) -> str:
        return self.object_map[X]

    def matrix(self, X: str, Y: str) -> np.ndarray:
        return self.arrow_map[(X, Y)]

    def apply_vec(self, X: str, Y: str, v: np.ndarray) -> np.ndarray:
        m = self.arrow_map[(X, Y)]
        if m.size == 0:
            return self.field.zeros(m.shape[0])
        return self.field.reduce(m.dot(v))

    def apply(self, a: Arrow) -> Arrow:
        return Arrow(self.obj(a.src), self.obj(a.tgt), self.apply_vec(a.src, a.tgt, a.vec))

    def is_identity(self) -> bool:
        if self.source is not self.target:
            return False
        return self is self.source.identity_functor or (
            all(self.object_map[X] == X for X in self.source.objects)
            and all(np.array_equal(m, self.source.identity_functor.arrow_map[k])
                    for k, m in self.arrow_map.items()))

    def __repr__(self):
        return f"LinFunctor({self.name!r}: {self.source.name} -> {self.target.name})"


def compose_functors(F: LinFunctor, G: LinFunctor, name: str | None = None) -> LinFunctor:
    """The composite "F then G", written G(F)."""
    if F.target is not G.source:
        raise NonComposable(f"{F.name} lands in {F.target.name}, {G.name} starts at {G.source.name}")
    if F is F.source.identity_functor and name is None:
        return G
    if G is G.source.identity_functor and name is None:
        return F
    A = F.source
    f = A.field
    amap = {}
    for X in A.objects:
        for Y in A.objects:
            GF = G.matrix(F.obj(X), F.obj(Y))
            FF = F.matrix(X, Y)
            if GF.size and FF.size:
                amap[(X, Y)] = f.reduce(GF.dot(FF))
            else:
                amap[(X, Y)] = f.zeros((GF.shape[0], FF.shape[1]))
    out = LinFunctor(name or f"{G.name}({F.name})", A, G.target,
                     {X: G.obj(F.obj(X)) for X in A.objects}, amap)
    out.atoms = F.atoms + G.atoms
    return out


_COMPOSITES: dict[tuple, LinFunctor] = {}


def _canonical(atoms: tuple) -> LinFunctor:
    if len(atoms) == 1:
        return atoms[0]
    out = _COMPOSITES.get(atoms)
    if out is None:
        out = compose_functors(_canonical(atoms[:-1]), atoms[-1])
        _COMPOSITES[atoms] = out
    return out


def composite(F: LinFunctor, G: LinFunctor) -> LinFunctor:
    """"F then G", memoized on the underlying sequence of non-identity functors.

    Composites that agree up to re-bracketing are therefore the same object,
    which is what keys the cochain spaces.
    """
    if F.target is not G.source:
        raise NonComposable(f"{F.name} lands in {F.target.name}, {G.name} starts at {G.source.name}")
    if not F.atoms:
        return G
    if not G.atoms:
        return F
    return _canonical(F.atoms + G.atoms)


class NatTrans:
    """A natural transformation ``source => target`` with components sigma_X in Hom(FX, GX)."""

    def __init__(self, name: str, source: LinFunctor, target: LinFunctor, components: dict):
        if source.source is not target.source or source.target is not target.target:
            raise CompositionMismatch(f"{name}: functors {source.name}, {target.name} are not parallel")
        self.name = name
        self.source = source
        self.target = target
        self.field = source.field
        B = source.target
        self.components: dict[str, np.ndarray] = {}
        for X in source.source.objects:
            FX, GX = source.obj(X), target.obj(X)
            data = components[X]
            if isinstance(data, np.ndarray):
                v = self.field.reduce(data.astype(self.field.dtype)) if self.field.p else data.copy()
                if len(v) != B.dim(FX, GX):
                    raise ValueError(f"{name}_{X} has wrong length")
            else:
                v = B._coeffs(data, FX, GX)
            self.components[X] = v

    @property
    def domain_cat(self) -> FinLinCat:
        return self.source.source

    @property
    def codomain_cat(self) -> FinLinCat:
        return self.source.target

    def component(self, X: str) -> Arrow:
        return Arrow(self.source.obj(X), self.target.obj(X), self.components[X])

    def __repr__(self):
        return f"NatTrans({self.name!r}: {self.source.name} => {self.target.name})"


def identity_nat(F: LinFunctor, name: str | None = None) -> NatTrans:
    B = F.target
    return NatTrans(name or f"Id_{F.name}", F, F,
                    {X: B.identity_vec[F.obj(X)].copy() for X in F.source.objects})


def vertical_composite(s: NatTrans, t: NatTrans, name: str | None = None) -> NatTrans:
    """``s`` then ``t`` for s: F => G, t: G => H."""
    if s.target is not t.source:
        raise NonComposable(f"{s.name} ends at {s.target.name}, {t.name} starts at {t.source.name}")
    B = s.codomain_cat
    comps = {}
    for X in s.domain_cat.objects:
        comps[X] = B.compose_vecs(s.source.obj(X), s.target.obj(X), t.target.obj(X),
                                  s.components[X], t.components[X])
    return NatTrans(name or f"({s.name}{t.name})", s.source, t.target, comps)


def whisker_post(s: NatTrans, H: LinFunctor, Fs: LinFunctor, Gs: LinFunctor,
                 name: str | None = None) -> NatTrans:
    """H(s): H(F) => H(G); ``Fs``/``Gs`` are the already-built composites H(F), H(G)."""
    comps = {X: H.apply_vec(s.source.obj(X), s.target.obj(X), s.components[X])
             for X in s.domain_cat.objects}
    return NatTrans(name or f"{H.name}({s.name})", Fs, Gs, comps)


def whisker_pre(V: LinFunctor, s: NatTrans, Fs: LinFunctor, Gs: LinFunctor,
                name: str | None = None) -> NatTrans:
    """s_V: F(V) => G(V); ``Fs``/``Gs`` are the composites F(V), G(V)."""
    comps = {X: s.components[V.obj(X)].copy() for X in V.source.objects}
    return NatTrans(name or f"{s.name}_{V.name}", Fs, Gs, comps)


def nat_equal(s: NatTrans, t: NatTrans) -> bool:
    return all(np.array_equal(s.components[X], t.components[X]) for X in s.domain_cat.objects)


# ---------------------------------------------------------------------------
# validators


def validate_category(c: FinLinCat) -> list[Violation]:
    """All failures of associativity and of the identity laws, on basis arrows."""
    out: list[Violation] = []
    for X in c.objects:
        for Y in c.objects:
            for i, a in enumerate(c.hom_basis[(X, Y)]):
                av = c.basis_arrow(a).vec
                if not np.array_equal(c.compose_vecs(X, X, Y, c.identity_vec[X], av), av):
                    out.append(Violation("identity", (f"id_{X}", a), "id . a != a"))
                if not np.array_equal(c.compose_vecs(X, Y, Y, av, c.identity_vec[Y]), av):
                    out.append(Violation("identity", (a, f"id_{Y}"), "a . id != a"))
    objs = c.objects
    for X in objs:
        for Y in objs:
            for Z in objs:
                for W in objs:
                    A, B, C = c.hom_basis[(X, Y)], c.hom_basis[(Y, Z)], c.hom_basis[(Z, W)]
                    if not (A and B and C):
                        continue
                    tXYZ, tXZW = c.mult(X, Y, Z), c.mult(X, Z, W)
                    tYZW, tXYW = c.mult(Y, Z, W), c.mult(X, Y, W)
                    # (ab)c and a(bc) as tensors over (i, j, k) -> Hom(X, W)
                    left = c.field.reduce(np.einsum("ijm,mkl->ijkl", tXYZ, tXZW))
                    right = c.field.reduce(np.einsum("jkm,iml->ijkl", tYZW, tXYW))
                    bad = np.argwhere(np.any(left != right, axis=3))
                    for i, j, k in bad:
                        out.append(Violation("associativity", (A[i], B[j], C[k]), "(ab)c != a(bc)"))
    return out


def validate_functor(F: LinFunctor) -> list[Violation]:
    """Failures of F(id) = id and F(ab) = F(a)F(b) on basis arrows."""
    A, B = F.source, F.target
    out: list[Violation] = []
    for X in A.objects:
        got = F.apply_vec(X, X, A.identity_vec[X])
        if not np.array_equal(got, B.identity_vec[F.obj(X)]):
            out.append(Violation("functor-identity", (F.name, f"id_{X}"), "F(id) != id"))
    for X in A.objects:
        for Y in A.objects:
            for Z in A.objects:
                P, Q = A.hom_basis[(X, Y)], A.hom_basis[(Y, Z)]
                if not (P and Q):
                    continue
                FX, FY, FZ = F.obj(X), F.obj(Y), F.obj(Z)
                # F(ab) for all i, j
                lhs = A.field.reduce(np.einsum("ijm,km->ijk", A.mult(X, Y, Z), F.matrix(X, Z))) \
                    if B.dim(FX, FZ) else A.field.zeros((len(P), len(Q), 0))
                Fa, Fb = F.matrix(X, Y), F.matrix(Y, Z)
                t = B.mult(FX, FY, FZ)
                if t.size:
                    rhs = A.field.reduce(np.einsum("pi,qj,pqk->ijk", Fa, Fb, t))
                else:
                    rhs = A.field.zeros((len(P), len(Q), B.dim(FX, FZ)))
                bad = np.argwhere(np.any(lhs != rhs, axis=2)) if lhs.shape[2] else []
                for i, j in bad:
                    out.append(Violation("functoriality", (F.name, P[i], Q[j]), "F(ab) != F(a)F(b)"))
    return out


def validate_nat(s: NatTrans) -> list[Violation]:
    """Failures of naturality F(a) s_Y = s_X G(a) on basis arrows a: X -> Y."""
    F, G = s.source, s.target
    A, B = F.source, F.target
    out: list[Violation] = []
    for X in A.objects:
        for Y in A.objects:
            for i, a in enumerate(A.hom_basis[(X, Y)]):
                av = A.basis_arrow(a).vec
                lhs = B.compose_vecs(F.obj(X), F.obj(Y), G.obj(Y), F.apply_vec(X, Y, av), s.components[Y])
                rhs = B.compose_vecs(F.obj(X), G.obj(X), G.obj(Y), s.components[X], G.apply_vec(X, Y, av))
                if not np.array_equal(lhs, rhs):
                    out.append(Violation("naturality", (s.name, a), "F(a) s_Y != s_X G(a)"))
    return out
