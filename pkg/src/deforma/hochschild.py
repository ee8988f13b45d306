"""Hochschild cochains of linear categories, functors and bimodules.

A cochain in ``C^n(F, G)`` (with ``F, G: A -> B``) assigns to every
composable n-tuple of basis arrows ``f_1 .. f_n`` of ``A`` (with
``f_i: X_{i-1} -> X_i``) a vector in ``Hom_B(F X_0, G X_n)``.  Degree-0
cochains are indexed by objects.  ``C^n(A)`` is the case ``F = G = Id_A``.

Cochains are dense vectors over a fixed basis enumeration (tuples in
lexicographic order, then target-basis order).  Every operation here also
has a matrix form, used by the complex assembler.
"""

from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import conventions
from .fincat import CompositionMismatch, FinLinCat, LinFunctor, NatTrans, composite
from .linalg import ExactMatrix, Field


class ChainMismatch(ValueError):
    """Raised when natural transformations do not form a composable chain."""


# ---------------------------------------------------------------------------
# spaces


class CochainSpace:
    """Basis of ``C^n(F, G)``; use :func:`space_basis` to obtain cached instances."""

    def __init__(self, F: LinFunctor, G: LinFunctor, n: int):
        if F.source is not G.source or F.target is not G.target:
            raise CompositionMismatch(f"{F.name} and {G.name} are not parallel")
        if n < 0:
            raise ValueError("negative degree")
        self.F, self.G, self.n = F, G, n
        self.source: FinLinCat = F.source
        self.target: FinLinCat = F.target
        self.field: Field = F.field
        A, B = self.source, self.target
        keys: list = []
        ends: list = []
        if n == 0:
            for X in A.objects:
                keys.append(X)
                ends.append((X, X))
        else:
            by_src: dict[str, list[str]] = {X: [] for X in A.objects}
            for a in A.arrows:
                by_src[A.arrow_index[a][0]].append(a)

            def extend(prefix, last_obj, k):
                if k == 0:
                    keys.append(tuple(prefix))
                    ends.append((A.arrow_index[prefix[0]][0], last_obj))
                    return
                for a in by_src[last_obj]:
                    prefix.append(a)
                    extend(prefix, A.arrow_index[a][1], k - 1)
                    prefix.pop()

            for a in A.arrows:
                extend([a], A.arrow_index[a][1], n - 1)
        self.keys = keys
        self.ends = ends
        self.index = {k: i for i, k in enumerate(keys)}
        self.dims = [B.dim(F.obj(X0), G.obj(Xn)) for (X0, Xn) in ends]
        self.offsets = [0]
        for d in self.dims:
            self.offsets.append(self.offsets[-1] + d)
        self.dim = self.offsets[-1]

    @property
    def is_category(self) -> bool:
        return self.F is self.G and self.F is self.source.identity_functor

    def label(self) -> str:
        if self.is_category:
            return f"C^{self.n}({self.source.name})"
        if self.F is self.G:
            return f"C^{self.n}({self.F.name})"
        return f"C^{self.n}({self.F.name},{self.G.name})"

    def block(self, key) -> slice:
        i = self.index[key]
        return slice(self.offsets[i], self.offsets[i + 1])

    def __repr__(self):
        return f"CochainSpace({self.label()}, dim={self.dim})"


@lru_cache(maxsize=None)
def _space(F: LinFunctor, G: LinFunctor, n: int) -> CochainSpace:
    return CochainSpace(F, G, n)


def space_basis(kind, n: int) -> CochainSpace:
    """Cached basis of ``C^n`` for ``kind`` = a category, a functor, or a pair of functors."""
    F, G = kind_functors(kind)
    return _space(F, G, n)


def kind_functors(kind) -> tuple[LinFunctor, LinFunctor]:
    if isinstance(kind, FinLinCat):
        I = kind.identity_functor
        return I, I
    if isinstance(kind, LinFunctor):
        return kind, kind
    F, G = kind
    return F, G


def clear_caches():
    """Drop cached spaces and operator matrices (mainly for long test runs)."""
    _space.cache_clear()
    for fn in _CACHED:
        fn.cache_clear()


# ---------------------------------------------------------------------------
# cochains


class Cochain:
    """An element of a :class:`CochainSpace`, stored as a dense list of scalars."""

    __slots__ = ("space", "vec")

    def __init__(self, space: CochainSpace, vec: Sequence | None = None):
        self.space = space
        f = space.field
        if vec is None:
            vec = [f.zero] * space.dim
        if len(vec) != space.dim:
            raise ValueError(f"vector of length {len(vec)} for {space}")
        self.vec = [f(v) for v in vec]

    @classmethod
    def from_values(cls, space: CochainSpace, values: dict) -> "Cochain":
        """Build from ``{tuple-or-object: coefficient sequence}``; missing keys are zero."""
        c = cls(space)
        f = space.field
        for key, v in values.items():
            if key not in space.index:
                raise KeyError(f"{key!r} is not a basis tuple of {space}")
            sl = space.block(key)
            v = list(v)
            if len(v) != sl.stop - sl.start:
                raise ValueError(f"value at {key!r} has wrong length")
            c.vec[sl] = [f(x) for x in v]
        return c

    @classmethod
    def random(cls, space: CochainSpace, rng: random.Random, density: float = 1.0) -> "Cochain":
        f = space.field
        return cls(space, [f.random(rng) if rng.random() < density else f.zero for _ in range(space.dim)])

    def value(self, key) -> np.ndarray:
        sl = self.space.block(key)
        return self.space.field.array(self.vec[sl]) if sl.stop > sl.start else self.space.field.zeros(0)

    def values(self) -> dict:
        return {k: self.value(k) for k in self.space.keys}

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.vec)

    def _same(self, other):
        if other.space is not self.space:
            raise CompositionMismatch("cochains live in different spaces")

    def __add__(self, other):
        self._same(other)
        f = self.space.field
        return Cochain(self.space, [f.add(a, b) for a, b in zip(self.vec, other.vec)])

    def __sub__(self, other):
        self._same(other)
        f = self.space.field
        return Cochain(self.space, [f.sub(a, b) for a, b in zip(self.vec, other.vec)])

    def __neg__(self):
        f = self.space.field
        return Cochain(self.space, [f.neg(a) for a in self.vec])

    def scale(self, c):
        f = self.space.field
        c = f(c)
        return Cochain(self.space, [f.mul(c, a) for a in self.vec])

    def __eq__(self, other):
        return isinstance(other, Cochain) and other.space is self.space and other.vec == self.vec

    def __repr__(self):
        return f"Cochain({self.space.label()}, nnz={sum(1 for v in self.vec if v)})"


def apply_matrix(m: ExactMatrix, phi: Cochain, target: CochainSpace) -> Cochain:
    return Cochain(target, m.apply(phi.vec))


# ---------------------------------------------------------------------------
# matrix assembly helpers


class _Builder:
    def __init__(self, field: Field, rows: int, cols: int):
        self.field = field
        self.rows, self.cols = rows, cols
        self.acc: dict[tuple[int, int], object] = {}

    def add_scaled_identity(self, r0: int, c0: int, n: int, coeff):
        acc = self.acc
        for k in range(n):
            key = (r0 + k, c0 + k)
            acc[key] = acc.get(key, 0) + coeff

    def add_block(self, r0: int, c0: int, block: np.ndarray, coeff=1):
        acc = self.acc
        if block.size == 0:
            return
        idx = np.argwhere(block != 0)
        for i, j in idx:
            key = (r0 + int(i), c0 + int(j))
            acc[key] = acc.get(key, 0) + coeff * _py(block[i, j])

    def build(self) -> ExactMatrix:
        f = self.field
        if f.p is not None:
            data = {k: v % f.p for k, v in self.acc.items()}
        else:
            data = self.acc
        rows: dict = {}
        for (i, j), v in data.items():
            if v != 0:
                rows.setdefault(i, {})[j] = v if f.p is not None else type(f.one)(v)
        return ExactMatrix._from_rows(f, self.rows, self.cols, rows)


def _py(x):
    return int(x) if isinstance(x, np.integer) else x


def _nonzero_terms(cat: FinLinCat, X: str, Y: str, v: np.ndarray):
    labels = cat.hom_basis[(X, Y)]
    return [(labels[i], _py(v[i])) for i in np.nonzero(v)[0]]


def _expand(parts: list[list[tuple[str, object]]]):
    """Multilinear expansion: yields (tuple of labels, product of coefficients)."""
    for combo in itertools.product(*parts):
        coeff = 1
        for _, c in combo:
            coeff = coeff * c
        yield tuple(lab for lab, _ in combo), coeff


# ---------------------------------------------------------------------------
# matrix forms


@lru_cache(maxsize=4096)
def differential_matrix(F: LinFunctor, G: LinFunctor, n: int) -> ExactMatrix:
    """Matrix of the differential ``C^n(F,G) -> C^{n+1}(F,G)``."""
    S, T = _space(F, G, n), _space(F, G, n + 1)
    A, B = S.source, S.target
    b = _Builder(S.field, T.dim, S.dim)
    sign = conventions.DIFFERENTIAL_SIGN
    for ti, key in enumerate(T.keys):
        r0 = T.offsets[ti]
        X0, Xn1 = T.ends[ti]
        objs = [A.arrow_index[key[0]][0]] + [A.arrow_index[a][1] for a in key]
        # first face: F(f_1) phi(f_2, ...)
        first = key[1:] if n > 0 else objs[1]
        ci = S.index[first]
        Ff1 = F.apply_vec(objs[0], objs[1], A.basis_arrow(key[0]).vec)
        L = B.left_mult_matrix(Ff1, F.obj(objs[0]), F.obj(objs[1]), G.obj(objs[-1]))
        b.add_block(r0, S.offsets[ci], L, sign)
        # inner faces
        for i in range(1, n + 1):
            prod = A.compose_vecs(objs[i - 1], objs[i], objs[i + 1],
                                  A.basis_arrow(key[i - 1]).vec, A.basis_arrow(key[i]).vec)
            s = sign * (-1) ** i
            for lab, c in _nonzero_terms(A, objs[i - 1], objs[i + 1], prod):
                k2 = key[:i - 1] + (lab,) + key[i + 1:]
                cj = S.index[k2]
                b.add_scaled_identity(r0, S.offsets[cj], S.dims[cj], s * c)
        # last face: phi(f_1..f_n) G(f_{n+1})
        last = key[:-1] if n > 0 else objs[0]
        cj = S.index[last]
        Gf = G.apply_vec(objs[-2], objs[-1], A.basis_arrow(key[-1]).vec)
        R = B.right_mult_matrix(Gf, F.obj(objs[0]), G.obj(objs[-2]), G.obj(objs[-1]))
        b.add_block(r0, S.offsets[cj], R, sign * (-1) ** (n + 1))
    return b.build()


@lru_cache(maxsize=4096)
def pushforward_matrix(H: LinFunctor, F: LinFunctor, G: LinFunctor,
                       HF: LinFunctor, HG: LinFunctor, n: int) -> ExactMatrix:
    """``H_*: C^n(F,G) -> C^n(HF, HG)``; HF and HG are the composite functors."""
    if F.target is not H.source:
        raise CompositionMismatch(f"{H.name} does not start where {F.name} lands")
    S, T = _space(F, G, n), _space(HF, HG, n)
    b = _Builder(S.field, T.dim, S.dim)
    for i, key in enumerate(S.keys):
        X0, Xn = S.ends[i]
        M = H.matrix(F.obj(X0), G.obj(Xn))
        b.add_block(T.offsets[i], S.offsets[i], M)
    return b.build()


@lru_cache(maxsize=4096)
def pullback_matrix(P: LinFunctor, F: LinFunctor, G: LinFunctor,
                    FP: LinFunctor, GP: LinFunctor, n: int) -> ExactMatrix:
    """``P^*: C^n(F,G) -> C^n(F(P), G(P))`` for ``P: A' -> A``."""
    if P.target is not F.source:
        raise CompositionMismatch(f"{P.name} does not land where {F.name} starts")
    S, T = _space(F, G, n), _space(FP, GP, n)
    A2, A = P.source, P.target
    b = _Builder(S.field, T.dim, S.dim)
    for ti, key in enumerate(T.keys):
        r0 = T.offsets[ti]
        if n == 0:
            cj = S.index[P.obj(key)]
            b.add_scaled_identity(r0, S.offsets[cj], S.dims[cj], 1)
            continue
        parts = []
        for a in key:
            X, Y, _ = A2.arrow_index[a]
            v = P.apply_vec(X, Y, A2.basis_arrow(a).vec)
            parts.append(_nonzero_terms(A, P.obj(X), P.obj(Y), v))
        for k2, c in _expand(parts):
            cj = S.index[k2]
            b.add_scaled_identity(r0, S.offsets[cj], S.dims[cj], c)
    return b.build()


@lru_cache(maxsize=4096)
def nat_pre_matrix(tau: NatTrans, G: LinFunctor, n: int) -> ExactMatrix:
    """``tau^*: C^n(F2, G) -> C^n(F1, G)`` for tau: F1 => F2, value tau_{X0} phi(...)."""
    F1, F2 = tau.source, tau.target
    S, T = _space(F2, G, n), _space(F1, G, n)
    B = S.target
    b = _Builder(S.field, T.dim, S.dim)
    for i, key in enumerate(S.keys):
        X0, Xn = S.ends[i]
        L = B.left_mult_matrix(tau.components[X0], F1.obj(X0), F2.obj(X0), G.obj(Xn))
        b.add_block(T.offsets[i], S.offsets[i], L)
    return b.build()


@lru_cache(maxsize=4096)
def nat_post_matrix(tau: NatTrans, G: LinFunctor, n: int) -> ExactMatrix:
    """``tau_*: C^n(G, F1) -> C^n(G, F2)`` for tau: F1 => F2, value phi(...) tau_{Xn}."""
    F1, F2 = tau.source, tau.target
    S, T = _space(G, F1, n), _space(G, F2, n)
    B = S.target
    b = _Builder(S.field, T.dim, S.dim)
    for i, key in enumerate(S.keys):
        X0, Xn = S.ends[i]
        R = B.right_mult_matrix(tau.components[Xn], G.obj(X0), F1.obj(Xn), F2.obj(Xn))
        b.add_block(T.offsets[i], S.offsets[i], R)
    return b.build()


def _check_chain(sigmas: Sequence[NatTrans]):
    if not sigmas:
        raise ChainMismatch("empty chain")
    for s, t in zip(sigmas, sigmas[1:]):
        if s.target is not t.source:
            raise ChainMismatch(f"{s.name} ends at {s.target.name} but {t.name} starts at {t.source.name}")


@lru_cache(maxsize=4096)
def brace_matrix(H: LinFunctor, K: LinFunctor, sigmas: tuple, HF0: LinFunctor, KFr: LinFunctor,
                 n: int) -> ExactMatrix:
    """Brace ``C^{n+r}(H,K) -> C^n(H F0, K Fr)`` for the chain ``sigmas`` F0 => .. => Fr.

    Arrows before the k-th insertion are mapped through the source functor of
    the k-th transformation; arrows after the last one through its target.
    """
    _check_chain(sigmas)
    r = len(sigmas)
    functors = [sigmas[0].source] + [s.target for s in sigmas]
    A = functors[0].source
    B = functors[0].target
    if H.source is not B:
        raise CompositionMismatch("brace: outer cochain is over the wrong category")
    S, T = _space(H, K, n + r), _space(HF0, KFr, n)
    b = _Builder(S.field, T.dim, S.dim)
    for ti, key in enumerate(T.keys):
        r0 = T.offsets[ti]
        if n == 0:
            objs = [key]
            arrows: tuple = ()
        else:
            arrows = key
            objs = [A.arrow_index[key[0]][0]] + [A.arrow_index[a][1] for a in key]
        for ps in itertools.combinations_with_replacement(range(n + 1), r):
            parts = []
            seg = 0
            for pos in range(n + 1):
                while seg < r and ps[seg] == pos:
                    s = sigmas[seg]
                    X = objs[pos]
                    parts.append(_nonzero_terms(B, s.source.obj(X), s.target.obj(X), s.components[X]))
                    seg += 1
                if pos < n:
                    Fk = functors[seg]
                    X, Y = objs[pos], objs[pos + 1]
                    v = Fk.apply_vec(X, Y, A.basis_arrow(arrows[pos]).vec)
                    parts.append(_nonzero_terms(B, Fk.obj(X), Fk.obj(Y), v))
            sgn = conventions.brace_sign(n, ps)
            for k2, c in _expand(parts):
                cj = S.index[k2]
                b.add_scaled_identity(r0, S.offsets[cj], S.dims[cj], sgn * c)
    return b.build()


_CACHED = [differential_matrix, pushforward_matrix, pullback_matrix, nat_pre_matrix,
           nat_post_matrix, brace_matrix]


# ---------------------------------------------------------------------------
# cochain-level operations


def differential(phi: Cochain) -> Cochain:
    S = phi.space
    m = differential_matrix(S.F, S.G, S.n)
    return Cochain(_space(S.F, S.G, S.n + 1), m.apply(phi.vec))


def pushforward(H: LinFunctor, phi: Cochain) -> Cochain:
    S = phi.space
    if S.target is not H.source:
        raise CompositionMismatch(f"{H.name} is not composable after {S.F.name}")
    HF = composite(S.F, H)
    HG = composite(S.G, H)
    m = pushforward_matrix(H, S.F, S.G, HF, HG, S.n)
    return Cochain(_space(HF, HG, S.n), m.apply(phi.vec))


def pullback(P: LinFunctor, phi: Cochain) -> Cochain:
    S = phi.space
    if P.target is not S.source:
        raise CompositionMismatch(f"{P.name} is not composable before {S.F.name}")
    FP = composite(P, S.F)
    GP = composite(P, S.G)
    m = pullback_matrix(P, S.F, S.G, FP, GP, S.n)
    return Cochain(_space(FP, GP, S.n), m.apply(phi.vec))


def nat_pre(tau: NatTrans, phi: Cochain) -> Cochain:
    S = phi.space
    if S.F is not tau.target:
        raise CompositionMismatch(f"{tau.name} does not end at {S.F.name}")
    m = nat_pre_matrix(tau, S.G, S.n)
    return Cochain(_space(tau.source, S.G, S.n), m.apply(phi.vec))


def nat_post(tau: NatTrans, phi: Cochain) -> Cochain:
    S = phi.space
    if S.G is not tau.source:
        raise CompositionMismatch(f"{tau.name} does not start at {S.G.name}")
    m = nat_post_matrix(tau, S.F, S.n)
    return Cochain(_space(S.F, tau.target, S.n), m.apply(phi.vec))


def brace(phi: Cochain, *sigmas: NatTrans) -> Cochain:
    """Insert the chain ``sigmas`` into ``phi`` at all order-preserving positions."""
    S = phi.space
    r = len(sigmas)
    _check_chain(sigmas)
    if S.n < r:
        raise ValueError(f"brace with {r} insertions needs degree >= {r}")
    H, K = S.F, S.G
    F0, Fr = sigmas[0].source, sigmas[-1].target
    HF0 = composite(F0, H)
    KFr = composite(Fr, K)
    m = brace_matrix(H, K, tuple(sigmas), HF0, KFr, S.n - r)
    return Cochain(_space(HF0, KFr, S.n - r), m.apply(phi.vec))
