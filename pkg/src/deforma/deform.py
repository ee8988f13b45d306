"""Order-by-order deformations of pasting diagrams.

A deformation replaces every structure operation by a power series in
``eps``: the composition of each category becomes ``mu^(0) + mu^(1) eps + ..``,
each functor ``F^(0) + F^(1) eps + ..`` and each 2-cell's components
``s^(0) + s^(1) eps + ..``.  Objects and identity arrows are not deformed.
A :class:`ParallelFamily` stores the positive-degree terms as cochains:
``mu^(k)`` in ``C^2(A)``, ``F^(k)`` in ``C^1(F)``, ``s^(k)`` in ``C^0(P, Q)``.

:func:`residuals` expands the deformed axioms (associativity, functoriality,
naturality, and the relation of each 3-cell) directly, coefficient by
coefficient, without using the deformation complex; it is the oracle for
everything else here.  The ``eps^n`` residual with the degree-``n`` terms
removed is the obstruction; the degree-``n`` terms enter linearly through
the differential of the assembled complex, so extending means solving
``d x = -omega``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import numpy as np

from .complex import (GradedComplex, NotAChainMap, assemble, deformation_degree,  # noqa: F401
                      normalized_coordinates)
from .conventions import EMBED_SIGN
from .diagram import Leaf, PastingDiagram, Post, Pre, Tree, Vert
from .fincat import Violation
from .hochschild import _space
from .linalg import ExactMatrix, Field, NoSolution, kernel_basis, rank, solve, span_rank

DEFAULT_ORDER = 4


class NotValidAtLowerOrder(ValueError):
    """Raised when an obstruction is requested for a family that already fails below that order."""


class DegreeMismatch(ValueError):
    """Raised when a vector does not live in the expected degree of a complex."""


@dataclass
class Obstructed:
    """Returned by :func:`extend` when the obstruction is not a coboundary."""

    order: int
    obstruction: list
    cocycle: bool

    def __bool__(self):
        return False


# ---------------------------------------------------------------------------
# families of parallels


def parallel_degree(D: PastingDiagram, cell: str) -> int:
    """Cochain degree of a cell's parallels: 2 for categories, 1 for functors, 0 for 2-cells."""
    return 2 - D.dim_of(cell)


def parallel_space(D: PastingDiagram, cell: str):
    F, G = D.kind_of(cell)
    return _space(F, G, parallel_degree(D, cell))


class ParallelFamily:
    """Positive-degree parallels ``k = 1..order`` for the deformable cells of ``D``.

    ``parallels[(cell, k)]`` is a coefficient list over the cell's cochain
    basis; missing entries are zero.  Cells in ``trivial`` must keep all
    positive-degree parallels zero.
    """

    def __init__(self, D: PastingDiagram, order: int, parallels: dict | None = None,
                 trivial: Iterable[str] | None = None):
        self.D = D
        self.order = order
        self.field: Field = D.field
        self.trivial = set(D.trivial if trivial is None else trivial)
        self.parallels: dict[tuple[str, int], list] = {}
        for (cell, k), vec in (parallels or {}).items():
            self.set(cell, k, vec)

    @property
    def cells(self) -> list[str]:
        D = self.D
        return list(D.categories) + list(D.functors) + list(D.cells2)

    def space(self, cell: str):
        return parallel_space(self.D, cell)

    def get(self, cell: str, k: int) -> list:
        v = self.parallels.get((cell, k))
        if v is None:
            return [self.field.zero] * self.space(cell).dim
        return v

    def set(self, cell: str, k: int, vec: Sequence):
        if k < 1:
            raise ValueError("degree-0 parallels are the undeformed operations")
        if cell not in self.cells:
            raise KeyError(f"{cell} has no parallels")
        f = self.field
        vec = [f(v) for v in vec]
        if len(vec) != self.space(cell).dim:
            raise ValueError(f"parallel for {cell} has length {len(vec)}, expected {self.space(cell).dim}")
        if any(vec):
            self.parallels[(cell, k)] = vec
        else:
            self.parallels.pop((cell, k), None)

    def copy(self, order: int | None = None) -> "ParallelFamily":
        out = ParallelFamily(self.D, self.order if order is None else order, trivial=self.trivial)
        out.parallels = {key: list(v) for key, v in self.parallels.items()}
        return out

    def truncated(self, n: int) -> "ParallelFamily":
        """Keep degrees ``< n``."""
        out = self.copy()
        out.parallels = {key: v for key, v in out.parallels.items() if key[1] < n}
        return out

    def scaled(self, lam) -> "ParallelFamily":
        """Multiply the degree-k parallels by ``lam**k`` (reparametrize eps -> lam eps)."""
        f = self.field
        out = self.copy()
        for (cell, k), v in list(out.parallels.items()):
            c = f(lam) ** k if f.p is None else pow(int(f(lam)), k, f.p)
            out.parallels[(cell, k)] = [f.mul(c, x) for x in v]
        return out

    def flag_violations(self) -> list[Violation]:
        return [Violation("trivial-flag", (cell, k), "flagged cell has a nonzero parallel")
                for (cell, k) in sorted(self.parallels) if cell in self.trivial]

    # -- complex vectors ---------------------------------------------------
    def vector(self, X: GradedComplex, k: int) -> list:
        """The degree-k parallels as a vector of ``X`` in the deformation degree."""
        n = deformation_degree(X)
        out: list = []
        f = self.field
        for s in X.summands:
            dim = s.dim(n)
            if dim == 0:
                continue
            sign = EMBED_SIGN[self.D.dim_of(s.label)]
            out += [f.mul(sign, v) for v in self.get(s.label, k)]
        return out

    def set_from_vector(self, X: GradedComplex, k: int, vec: Sequence):
        n = deformation_degree(X)
        o = 0
        for s in X.summands:
            dim = s.dim(n)
            if dim == 0:
                continue
            sign = EMBED_SIGN[self.D.dim_of(s.label)]
            self.set(s.label, k, [self.field.mul(sign, v) for v in vec[o:o + dim]])
            o += dim
        if o != len(vec):
            raise DegreeMismatch("vector length does not match the deformation degree")

    def to_json(self) -> dict:
        f = self.field
        return {f"{cell}^{k}": [f.format(v) for v in vec] for (cell, k), vec in sorted(self.parallels.items())}

    @classmethod
    def random_vector_family(cls, D: PastingDiagram, order: int, rng: random.Random,
                             degrees: Iterable[int] = (1,)) -> "ParallelFamily":
        """Arbitrary (not necessarily valid) parallels in the given degrees; flagged cells stay zero."""
        P = cls(D, order)
        f = D.field
        for cell in P.cells:
            if cell in P.trivial:
                continue
            for k in degrees:
                P.set(cell, k, [f.random(rng) for _ in range(P.space(cell).dim)])
        return P


# ---------------------------------------------------------------------------
# direct expansion of the deformed axioms


class _Expander:
    """Evaluates deformed operations on power series of arrows, up to a fixed order."""

    def __init__(self, P: ParallelFamily, upto: int):
        self.P = P
        self.D = P.D
        self.f = P.field
        self.upto = upto
        self._mu: dict = {}
        self._fun: dict = {}

    def zeros(self, n):
        return self.f.zeros(n)

    # structure tensors of mu^(k) on Hom(X,Y) x Hom(Y,Z)
    def mu_tensor(self, cat: str, k: int, X, Y, Z) -> np.ndarray:
        key = (cat, k, X, Y, Z)
        t = self._mu.get(key)
        if t is not None:
            return t
        C = self.D.categories[cat]
        if k == 0:
            t = C.mult(X, Y, Z)
        else:
            S = self.P.space(cat)
            vec = self.P.get(cat, k)
            t = self.f.zeros((C.dim(X, Y), C.dim(Y, Z), C.dim(X, Z)))
            for i, a in enumerate(C.hom_basis[(X, Y)]):
                for j, b in enumerate(C.hom_basis[(Y, Z)]):
                    sl = S.block((a, b))
                    t[i, j, :] = self.f.array(vec[sl])
        self._mu[key] = t
        return t

    def compose(self, cat: str, X, Y, Z, us: list, vs: list) -> list:
        """Series of ``mu_eps(u_eps, v_eps)``."""
        C = self.D.categories[cat]
        n = C.dim(X, Z)
        out = [self.zeros(n) for _ in range(self.upto + 1)]
        if n == 0 or C.dim(X, Y) == 0 or C.dim(Y, Z) == 0:
            return out
        for i in range(self.upto + 1):
            if i > 0 and (cat, i) not in self.P.parallels:
                continue
            t = self.mu_tensor(cat, i, X, Y, Z)
            for j in range(self.upto + 1 - i):
                if not us[j].any():
                    continue
                for l in range(self.upto + 1 - i - j):
                    if not vs[l].any():
                        continue
                    out[i + j + l] = out[i + j + l] + np.einsum("i,j,ijk->k", us[j], vs[l], t)
        return [self.f.reduce(v) for v in out]

    def functor_matrix(self, name: str, k: int, X, Y) -> np.ndarray:
        key = (name, k, X, Y)
        m = self._fun.get(key)
        if m is not None:
            return m
        F = self.D.functors[name]
        if k == 0:
            m = F.matrix(X, Y)
        else:
            A, B = F.source, F.target
            S = self.P.space(name)
            vec = self.P.get(name, k)
            m = self.f.zeros((B.dim(F.obj(X), F.obj(Y)), A.dim(X, Y)))
            for j, a in enumerate(A.hom_basis[(X, Y)]):
                sl = S.block((a,))
                m[:, j] = self.f.array(vec[sl])
        self._fun[key] = m
        return m

    def apply_functor(self, name: str, X, Y, us: list) -> list:
        F = self.D.functors[name]
        n = F.target.dim(F.obj(X), F.obj(Y))
        out = [self.zeros(n) for _ in range(self.upto + 1)]
        if n == 0 or F.source.dim(X, Y) == 0:
            return out
        for i in range(self.upto + 1):
            if i > 0 and (name, i) not in self.P.parallels:
                continue
            m = self.functor_matrix(name, i, X, Y)
            for j in range(self.upto + 1 - i):
                if us[j].any():
                    out[i + j] = out[i + j] + m.dot(us[j])
        return [self.f.reduce(v) for v in out]

    def apply_path(self, path: Sequence[str], X, Y, us: list) -> list:
        for name in path:
            F = self.D.functors[name]
            us = self.apply_functor(name, X, Y, us)
            X, Y = F.obj(X), F.obj(Y)
        return us

    def constant(self, v: np.ndarray) -> list:
        return [v.copy()] + [self.zeros(len(v)) for _ in range(self.upto)]

    def component(self, cell: str, X) -> list:
        c = self.D.cells2[cell]
        S = self.P.space(cell)
        out = [c.nat.components[X].copy()]
        sl = S.block(X)
        for k in range(1, self.upto + 1):
            out.append(self.f.array(self.P.get(cell, k)[sl]) if sl.stop > sl.start else self.zeros(0))
        return out

    def tree_component(self, t: Tree, X) -> list:
        """Series of the component at ``X`` of the deformed pasting composite."""
        D = self.D
        if isinstance(t, Leaf):
            return self.component(t.cell, X)
        p, q = D.tree_type(t)
        if isinstance(t, Vert):
            _, mid = D.tree_type(t.first)
            Z = D.path_ends(p)[1]
            P, Q, R = D.path_functor(p), D.path_functor(mid), D.path_functor(q)
            return self.compose(Z, P.obj(X), Q.obj(X), R.obj(X),
                                self.tree_component(t.first, X), self.tree_component(t.second, X))
        if isinstance(t, Post):
            p0, q0 = D.tree_type(t.tree)
            P0, Q0 = D.path_functor(p0), D.path_functor(q0)
            return self.apply_path(t.path, P0.obj(X), Q0.obj(X), self.tree_component(t.tree, X))
        if isinstance(t, Pre):
            V = D.path_functor(t.path)
            return self.tree_component(t.tree, V.obj(X))
        raise TypeError(t)

    def basis(self, cat: str, label: str) -> list:
        return self.constant(self.D.categories[cat].basis_arrow(label).vec)


def residuals(P: ParallelFamily, upto: int | None = None) -> dict[str, list[list]]:
    """For every cell, the eps^m coefficients (m = 0..upto) of its deformed axiom.

    The value for a cell is a list indexed by m of coefficient lists over the
    basis of the cell's summand one degree above the deformation degree:
    ``C^3(A)`` for categories, ``C^2(F)`` for functors, ``C^1(P, Q)`` for
    2-cells and ``C^0`` of the composite functors for 3-cells.
    """
    upto = P.order if upto is None else upto
    ex = _Expander(P, upto)
    D = P.D
    out: dict[str, list[list]] = {}
    for name, C in D.categories.items():
        S = _space(C.identity_functor, C.identity_functor, 3)
        res = [[] for _ in range(upto + 1)]
        for key, (X0, X3) in zip(S.keys, S.ends):
            a, b, c = key
            X1, X2 = C.arrow_index[a][1], C.arrow_index[b][1]
            ab = ex.compose(name, X0, X1, X2, ex.basis(name, a), ex.basis(name, b))
            bc = ex.compose(name, X1, X2, X3, ex.basis(name, b), ex.basis(name, c))
            left = ex.compose(name, X0, X2, X3, ab, ex.basis(name, c))
            right = ex.compose(name, X0, X1, X3, ex.basis(name, a), bc)
            for m in range(upto + 1):
                res[m] += list(ex.f.reduce(left[m] - right[m]))
        out[name] = res
    for name, F in D.functors.items():
        A, B = F.source, F.target
        an, bn = D.functor_ends(name)
        S = _space(F, F, 2)
        res = [[] for _ in range(upto + 1)]
        for key in S.keys:
            a, b = key
            X0, X1, _ = A.arrow_index[a]
            X2 = A.arrow_index[b][1]
            ab = ex.compose(an, X0, X1, X2, ex.basis(an, a), ex.basis(an, b))
            left = ex.apply_functor(name, X0, X2, ab)
            Fa = ex.apply_functor(name, X0, X1, ex.basis(an, a))
            Fb = ex.apply_functor(name, X1, X2, ex.basis(an, b))
            right = ex.compose(bn, F.obj(X0), F.obj(X1), F.obj(X2), Fa, Fb)
            for m in range(upto + 1):
                res[m] += list(ex.f.reduce(left[m] - right[m]))
        out[name] = res
    for name, c in D.cells2.items():
        Pf, Qf = c.nat.source, c.nat.target
        A = Pf.source
        Z = D.path_ends(c.dom)[1]
        S = _space(Pf, Qf, 1)
        res = [[] for _ in range(upto + 1)]
        for key in S.keys:
            (a,) = key
            X, Y, _ = A.arrow_index[a]
            src = D.path_ends(c.dom)[0]
            Pa = ex.apply_path(c.dom, X, Y, ex.basis(src, a))
            Qa = ex.apply_path(c.cod, X, Y, ex.basis(src, a))
            left = ex.compose(Z, Pf.obj(X), Pf.obj(Y), Qf.obj(Y), Pa, ex.component(name, Y))
            right = ex.compose(Z, Pf.obj(X), Qf.obj(X), Qf.obj(Y), ex.component(name, X), Qa)
            for m in range(upto + 1):
                res[m] += list(ex.f.reduce(left[m] - right[m]))
        out[name] = res
    for name, c in D.cells3.items():
        Pf, Qf = D.kind_of(name)
        S = _space(Pf, Qf, 0)
        res = [[] for _ in range(upto + 1)]
        for X in S.keys:
            left = ex.tree_component(c.dom, X)
            right = ex.tree_component(c.cod, X)
            for m in range(upto + 1):
                res[m] += list(ex.f.reduce(left[m] - right[m]))
        out[name] = res
    return out


@dataclass
class DeformationReport:
    order: int
    violations: list = dc_field(default_factory=list)
    obstruction: list | None = None
    cocycle: bool | None = None
    extension: object = None

    @property
    def valid(self) -> bool:
        return not self.violations


def _kind_word(D: PastingDiagram, cell: str) -> str:
    return ["associativity", "functoriality", "naturality", "relation"][D.dim_of(cell)]


def validate_order(P: ParallelFamily, N: int | None = None) -> DeformationReport:
    """Check every deformed axiom up to ``eps^N`` by direct expansion."""
    N = P.order if N is None else N
    res = residuals(P, N)
    rep = DeformationReport(N)
    rep.violations += P.flag_violations()
    for cell, series in res.items():
        S = _residual_space(P.D, cell)
        for m in range(1, N + 1):
            vec = series[m]
            for i, key in enumerate(S.keys):
                sl = S.block(key)
                if any(vec[sl]):
                    rep.violations.append(Violation(_kind_word(P.D, cell), (cell, m) + _key_tuple(key),
                                                    f"eps^{m} coefficient is nonzero"))
    return rep


def _key_tuple(key) -> tuple:
    return key if isinstance(key, tuple) else (key,)


def _residual_space(D: PastingDiagram, cell: str):
    F, G = D.kind_of(cell)
    return _space(F, G, 3 - D.dim_of(cell))


def obstruction_parts(P: ParallelFamily, n: int, check: bool = True) -> dict[str, list]:
    """Per-cell obstruction cochains: the eps^n residual with degree-n terms removed."""
    if check and n > 1:
        rep = validate_order(P.truncated(n), n - 1)
        if not rep.valid:
            raise NotValidAtLowerOrder(f"family fails at order <= {n - 1}: {rep.violations[0]}")
    res = residuals(P.truncated(n), n)
    return {cell: series[n] for cell, series in res.items()}


def obstruction(P: ParallelFamily, n: int, X: GradedComplex | None = None, check: bool = True) -> list:
    """The degree-n obstruction as a vector one above the deformation degree of ``C(D)``."""
    X = X or assemble(P.D)
    parts = obstruction_parts(P, n, check)
    deg = deformation_degree(X) + 1
    out: list = []
    for s in X.summands:
        if s.dim(deg):
            out += parts[s.label]
    return out


def is_cocycle(omega: Sequence, X: GradedComplex, degree: int | None = None) -> bool:
    """``d omega == 0`` in the degree one above deformations (or the given one)."""
    deg = deformation_degree(X) + 1 if degree is None else degree
    if len(omega) != X.dim(deg):
        raise DegreeMismatch(f"vector of length {len(omega)} in degree {deg} of dimension {X.dim(deg)}")
    return not any(X.d(deg).apply(omega))


def _free_coordinates(X: GradedComplex, n: int, flagged: set) -> list[int]:
    out = []
    o = 0
    for s in X.summands:
        dim = s.dim(n)
        if s.label not in flagged:
            out += list(range(o, o + dim))
        o += dim
    return out


def extend(P: ParallelFamily, n: int, X: GradedComplex | None = None):
    """Choose degree-n parallels cobounding the obstruction, or return :class:`Obstructed`.

    Flagged cells are kept at zero by solving only in the unflagged
    coordinates; nothing is solved first and projected afterwards.
    """
    X = X or assemble(P.D)
    omega = obstruction(P, n, X)
    deg = deformation_degree(X)
    f = P.field
    free = _free_coordinates(X, deg, P.trivial)
    dm = X.d(deg)
    sub = dm.submatrix(list(range(dm.rows)), free)
    rhs = [f.neg(v) for v in omega]
    sol = solve(sub, rhs)
    if sol is NoSolution:
        return Obstructed(n, omega, is_cocycle(omega, X))
    full = [f.zero] * dm.cols
    for i, v in zip(free, sol):
        full[i] = v
    out = P.truncated(n).copy(order=max(P.order, n))
    out.set_from_vector(X, n, full)
    return out


def extend_to(P: ParallelFamily, N: int, X: GradedComplex | None = None):
    """Extend order by order up to ``N``; returns the family or the first :class:`Obstructed`."""
    X = X or assemble(P.D)
    cur = P
    for n in range(2, N + 1):
        nxt = extend(cur, n, X)
        if isinstance(nxt, Obstructed):
            return nxt
        cur = nxt
    return cur


# ---------------------------------------------------------------------------
# kernel subcomplexes


class SubComplex:
    """A subcomplex of a :class:`GradedComplex` given by per-degree column bases."""

    def __init__(self, X: GradedComplex, bases: dict, name: str = "sub"):
        self.X = X
        self.name = name
        self._bases = bases
        self._cache: dict[int, ExactMatrix] = {}

    def basis(self, n: int) -> ExactMatrix:
        m = self._cache.get(n)
        if m is None:
            m = self._bases(n)
            self._cache[n] = m
        return m

    def dim(self, n: int) -> int:
        return self.basis(n).cols

    def image_of_d(self, n: int) -> ExactMatrix:
        """``d`` applied to the basis of degree ``n`` (columns in ``X^{n+1}``)."""
        return self.X.d(n) @ self.basis(n)

    def d(self, n: int) -> ExactMatrix:
        """The restricted differential in the subcomplex bases."""
        B1 = self.basis(n + 1)
        img = self.image_of_d(n)
        cols = []
        for j in range(img.cols):
            col = [img[i, j] for i in range(img.rows)]
            c = solve(B1, col)
            if c is NoSolution:
                raise DegreeMismatch(f"{self.name} is not closed under d in degree {n}")
            cols.append(c)
        return ExactMatrix.from_columns(self.X.field, cols, B1.cols)

    def cohomology_dims(self, degrees: Iterable[int]) -> list[int]:
        out = []
        for n in degrees:
            dim = self.dim(n)
            out.append(dim - rank(self.image_of_d(n)) - rank(self.image_of_d(n - 1)) if dim else 0)
        return out

    def cocycle_representatives(self, n: int) -> list[list]:
        """Cocycles in degree ``n`` (as vectors of ``X``) whose classes form a basis of ``H^n``."""
        f = self.X.field
        B = self.basis(n)
        Z = kernel_basis(self.image_of_d(n))
        cocycles = [B.apply(z) for z in Z]
        bounds = self.image_of_d(n - 1)
        cur = [[bounds[i, j] for i in range(bounds.rows)] for j in range(bounds.cols)]
        base = span_rank(f, cur)
        out = []
        for z in cocycles:
            r = span_rank(f, cur + [z])
            if r > base:
                cur.append(z)
                base = r
                out.append(z)
        return out


def kernel_complex(X: GradedComplex, Phi) -> SubComplex:
    """``ker(Phi)`` for a chain map ``Phi`` out of ``X`` (a :class:`BlockMap`).

    Raises :class:`NotAChainMap` if ``Phi`` fails the chain-map identity
    anywhere in the stored range of degrees.
    """
    f = X.field
    Phi.check(range(X.min_degree - 1, X.max_degree))

    def bases(n):
        K = kernel_basis(Phi.matrix(n))
        return ExactMatrix.from_columns(f, K, X.dim(n)) if K else ExactMatrix.zeros(f, X.dim(n), 0)

    return SubComplex(X, bases, f"ker({Phi.name})")


def flag_kernel(X: GradedComplex, flagged: Iterable[str], normalized: bool = False) -> SubComplex:
    """Elements vanishing on flagged summands whose coboundary also vanishes there.

    For a flagged functor ``F: A -> B`` this is ``ker(-F_* p1 + F^* p2)`` on the
    remaining summands; for a flagged triangle it is the kernel of the
    triangle's row.  With ``normalized=True`` the result is intersected with
    the normalized cochains (those vanishing on identity arguments).
    """
    flagged = set(flagged)
    f = X.field
    rows_of = {s.label: i for i, s in enumerate(X.summands)}
    for c in flagged:
        if c not in rows_of:
            raise KeyError(f"flagged cell {c!r} is not a summand")

    def bases(n):
        dims = X.dims(n)
        o, o1 = _offs(dims), _offs(X.dims(n + 1))
        dim = o[-1]
        allowed = normalized_coordinates(X, n) if normalized else range(dim)
        dead = set()
        for c in flagged:
            i = rows_of[c]
            dead.update(range(o[i], o[i + 1]))
        free = [k for k in allowed if k not in dead]
        rows = []
        for c in sorted(flagged, key=rows_of.get):
            i = rows_of[c]
            rows.extend(range(o1[i], o1[i + 1]))
        if rows and free:
            K = kernel_basis(X.d(n).submatrix(rows, free))
        else:
            K = [[f.one if j == i else f.zero for j in range(len(free))] for i in range(len(free))]
        cols = []
        for v in K:
            col = [f.zero] * dim
            for k, x in zip(free, v):
                col[k] = x
            cols.append(col)
        return ExactMatrix.from_columns(f, cols, dim) if cols else ExactMatrix.zeros(f, dim, 0)

    return SubComplex(X, bases, "flag-kernel")


def normalized_complex(X: GradedComplex) -> SubComplex:
    """The normalized cochains of ``X`` as a subcomplex."""
    return flag_kernel(X, (), normalized=True)


def _offs(sizes):
    out = [0]
    for s in sizes:
        out.append(out[-1] + s)
    return out


@dataclass
class Classification:
    degree: int
    dimension: int
    representatives: list


def classify_first_order(D: PastingDiagram, trivial: Iterable[str] | None = None,
                         X: GradedComplex | None = None) -> Classification:
    """Dimension and representatives of first-order deformations modulo equivalence."""
    X = X or assemble(D)
    flags = set(D.trivial if trivial is None else trivial)
    n = deformation_degree(X)
    Y = flag_kernel(X, flags)
    reps = Y.cocycle_representatives(n)
    return Classification(n, len(reps), reps)


def first_order_family(D: PastingDiagram, vec: Sequence, X: GradedComplex | None = None,
                       order: int = DEFAULT_ORDER) -> ParallelFamily:
    """The family whose degree-1 parallels are the given deformation-degree vector."""
    X = X or assemble(D)
    P = ParallelFamily(D, order)
    P.set_from_vector(X, 1, vec)
    return P


def random_first_order(D: PastingDiagram, rng: random.Random, X: GradedComplex | None = None,
                       order: int = DEFAULT_ORDER, trivial: Iterable[str] | None = None) -> ParallelFamily:
    """A random valid order-1 deformation: a random cocycle (zero on flagged cells)."""
    X = X or assemble(D)
    flags = set(D.trivial if trivial is None else trivial)
    n = deformation_degree(X)
    Y = flag_kernel(X, flags)
    Z = kernel_basis(Y.image_of_d(n))
    B = Y.basis(n)
    f = D.field
    vec = [f.zero] * X.dim(n)
    for z in Z:
        c = f.random(rng)
        col = B.apply(z)
        vec = [f.add(a, f.mul(c, b)) for a, b in zip(vec, col)]
    P = ParallelFamily(D, order, trivial=flags)
    P.set_from_vector(X, 1, vec)
    return P
