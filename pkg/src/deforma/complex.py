"""Deformation complexes of pasting diagrams, as labeled block complexes.

A :class:`GradedComplex` is a list of summands, each a family of cochain
spaces ``C^{n + shift}(F, G)``, together with a lower-triangular pattern of
blocks.  Every block is an :class:`Op`, a degree-indexed linear operator
between cochain families built from the Hochschild operations (differential,
pushforward, pullback, pre/post-composition with a natural transformation,
braces).  Matrices are produced lazily, degree by degree, and cached.

The assembler reproduces the coboundary matrices of the standard examples:
category rows carry ``-d``, a functor ``F: A -> B`` contributes
``(-F_*, F^*, d_F)``, a 2-cell ``s: P => Q`` contributes
``((.){s}, s_* D_i, -s^* D_j, -d)`` where ``D_i`` moves a cochain of the
i-th functor of a path to the whole path, and a 3-cell contributes the
difference of the composite rows of its two sides with ``+d`` on the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .diagram import (InvalidDiagram, Leaf, PastingDiagram, Post, Pre, Tree,
                      TreeBoundaryMismatch, Vert, tree_leaves, tree_whiskers)
from .fincat import LinFunctor, NatTrans, composite, vertical_composite
from .hochschild import (_space, brace_matrix, differential_matrix, nat_post_matrix,
                         nat_pre_matrix, pullback_matrix, pushforward_matrix)
from .linalg import ExactMatrix, Field, NoSolution, kernel_basis, rank, solve

DEFAULT_MAX_DEGREE = 4


class NotAChainMap(ValueError):
    """Raised when a block map fails ``d' f = f d``."""


class OverlapMismatch(ValueError):
    """Raised when two diagrams disagree on a shared cell."""


def space_dim(kind: tuple, h: int) -> int:
    if h < 0:
        return 0
    return _space(kind[0], kind[1], h).dim


# ---------------------------------------------------------------------------
# operators


class Op:
    """A linear map ``C^h(src) -> C^{h + delta}(tgt)`` for every ``h``.

    ``build(h)`` returns the matrix for ``h >= 0`` with ``h + delta >= 0``;
    outside that range the spaces are zero and the matrix is empty.
    """

    def __init__(self, src: tuple, tgt: tuple, delta: int, build, name: str = "op"):
        self.src = src
        self.tgt = tgt
        self.delta = delta
        self._build = build
        self.name = name
        self._cache: dict[int, ExactMatrix] = {}

    @property
    def field(self) -> Field:
        return self.src[0].field

    def matrix(self, h: int) -> ExactMatrix:
        m = self._cache.get(h)
        if m is None:
            rows, cols = space_dim(self.tgt, h + self.delta), space_dim(self.src, h)
            if h < 0 or h + self.delta < 0 or rows == 0 or cols == 0:
                m = ExactMatrix.zeros(self.field, rows, cols)
            else:
                m = self._build(h)
            self._cache[h] = m
        return m

    def __repr__(self):
        return f"Op({self.name})"

    # -- algebra ---------------------------------------------------------
    def then(self, other: "Op") -> "Op":
        """``other`` after ``self``."""
        if other.src[0] is not self.tgt[0] or other.src[1] is not self.tgt[1]:
            raise TreeBoundaryMismatch(f"cannot compose {self.name} with {other.name}")
        d = self.delta
        return Op(self.src, other.tgt, d + other.delta,
                  lambda h: other.matrix(h + d) @ self.matrix(h), f"{other.name}.{self.name}")

    def __add__(self, other: "Op") -> "Op":
        _same_shape(self, other)
        return Op(self.src, self.tgt, self.delta, lambda h: self.matrix(h) + other.matrix(h),
                  f"({self.name}+{other.name})")

    def __sub__(self, other: "Op") -> "Op":
        _same_shape(self, other)
        return Op(self.src, self.tgt, self.delta, lambda h: self.matrix(h) - other.matrix(h),
                  f"({self.name}-{other.name})")

    def __neg__(self) -> "Op":
        return self.scale(-1)

    def scale(self, c) -> "Op":
        if c == 1:
            return self
        return Op(self.src, self.tgt, self.delta, lambda h: self.matrix(h).scale(c), f"{c}*{self.name}")

    def is_zero(self, degrees: Iterable[int]) -> bool:
        return all(self.matrix(h).is_zero() for h in degrees)


def _same_shape(a: Op, b: Op):
    if (a.src[0] is not b.src[0] or a.src[1] is not b.src[1] or a.tgt[0] is not b.tgt[0]
            or a.tgt[1] is not b.tgt[1] or a.delta != b.delta):
        raise TreeBoundaryMismatch(f"operators {a.name} and {b.name} have different shapes")


def op_sum(ops: Sequence[Op]) -> Op:
    out = ops[0]
    for o in ops[1:]:
        out = out + o
    return out


def kind_name(kind: tuple) -> str:
    F, G = kind
    if F is G:
        if not F.atoms:
            return F.source.name
        return F.name
    return f"{F.name},{G.name}"


def delta_op(kind: tuple) -> Op:
    F, G = kind
    return Op(kind, kind, 1, lambda h: differential_matrix(F, G, h), f"d[{kind_name(kind)}]")


def ident_op(kind: tuple) -> Op:
    f = kind[0].field
    return Op(kind, kind, 0, lambda h: ExactMatrix.identity(f, space_dim(kind, h)), "Id")


def zero_op(src: tuple, tgt: tuple, delta: int) -> Op:
    f = src[0].field
    return Op(src, tgt, delta,
              lambda h: ExactMatrix.zeros(f, space_dim(tgt, h + delta), space_dim(src, h)), "0")


def push_op(H: LinFunctor, kind: tuple) -> Op:
    """``H_*: C(F, G) -> C(H(F), H(G))``."""
    F, G = kind
    if not H.atoms:
        return ident_op(kind)
    HF, HG = composite(F, H), composite(G, H)
    return Op(kind, (HF, HG), 0, lambda h: pushforward_matrix(H, F, G, HF, HG, h), f"{H.name}_*")


def pull_op(P: LinFunctor, kind: tuple) -> Op:
    """``P^*: C(F, G) -> C(F(P), G(P))``."""
    F, G = kind
    if not P.atoms:
        return ident_op(kind)
    FP, GP = composite(P, F), composite(P, G)
    return Op(kind, (FP, GP), 0, lambda h: pullback_matrix(P, F, G, FP, GP, h), f"{P.name}^*")


def nat_pre_op(tau: NatTrans, G: LinFunctor) -> Op:
    """``tau^*: C(F2, G) -> C(F1, G)`` for ``tau: F1 => F2``."""
    return Op((tau.target, G), (tau.source, G), 0, lambda h: nat_pre_matrix(tau, G, h), f"{tau.name}^*")


def nat_post_op(tau: NatTrans, G: LinFunctor) -> Op:
    """``tau_*: C(G, F1) -> C(G, F2)`` for ``tau: F1 => F2``."""
    return Op((G, tau.source), (G, tau.target), 0, lambda h: nat_post_matrix(tau, G, h), f"{tau.name}_*")


def brace_op(H: LinFunctor, K: LinFunctor, sigmas: Sequence[NatTrans]) -> Op:
    """``(.){s_1, .., s_r}: C^{h}(H, K) -> C^{h-r}(H(F0), K(Fr))``."""
    sigmas = tuple(sigmas)
    r = len(sigmas)
    HF0, KFr = composite(sigmas[0].source, H), composite(sigmas[-1].target, K)
    names = ",".join(s.name for s in sigmas)
    return Op((H, K), (HF0, KFr), -r, lambda h: brace_matrix(H, K, sigmas, HF0, KFr, h - r),
              f"{{{names}}}")


def cat_kind(c) -> tuple:
    I = c.identity_functor
    return (I, I)


# ---------------------------------------------------------------------------
# complexes


@dataclass(frozen=True)
class Summand:
    label: str
    kind: tuple
    shift: int

    def dim(self, n: int) -> int:
        return space_dim(self.kind, n + self.shift)


class GradedComplex:
    """A finite direct sum of shifted cochain families with a block differential.

    ``blocks[(i, j)]`` is the operator from summand ``j`` to summand ``i``;
    in complex degree ``n`` it maps ``C^{n + shift_j}`` to ``C^{n + 1 + shift_i}``.
    """

    def __init__(self, summands: Sequence[Summand], blocks: dict, max_degree: int = DEFAULT_MAX_DEGREE,
                 name: str = "complex"):
        self.summands = list(summands)
        self.max_degree = max_degree
        self.name = name
        self.field: Field = self.summands[0].kind[0].field if self.summands else None
        labels = [s.label for s in self.summands]
        if len(set(labels)) != len(labels):
            raise InvalidDiagram(f"duplicate summand labels in {labels}")
        self.index = {s.label: i for i, s in enumerate(self.summands)}
        self.blocks: dict[tuple[int, int], Op] = {}
        for (i, j), op in blocks.items():
            si, sj = self.summands[i], self.summands[j]
            if op.src[0] is not sj.kind[0] or op.src[1] is not sj.kind[1] \
                    or op.tgt[0] is not si.kind[0] or op.tgt[1] is not si.kind[1]:
                raise TreeBoundaryMismatch(f"block ({si.label},{sj.label}) = {op.name} has the wrong spaces")
            if op.delta != 1 + si.shift - sj.shift:
                raise TreeBoundaryMismatch(f"block ({si.label},{sj.label}) = {op.name} has the wrong degree")
            self.blocks[(i, j)] = op
        self._d: dict[int, ExactMatrix] = {}

    @property
    def labels(self) -> list[str]:
        return [s.label for s in self.summands]

    @property
    def min_degree(self) -> int:
        """Lowest degree with a nonzero space."""
        return -max((s.shift for s in self.summands), default=0)

    def dims(self, n: int) -> list[int]:
        return [s.dim(n) for s in self.summands]

    def dim(self, n: int) -> int:
        return sum(self.dims(n))

    def block(self, row: str, col: str) -> Op | None:
        return self.blocks.get((self.index[row], self.index[col]))

    def block_matrix(self, row: str, col: str, n: int) -> ExactMatrix:
        i, j = self.index[row], self.index[col]
        op = self.blocks.get((i, j))
        if op is None:
            return ExactMatrix.zeros(self.field, self.summands[i].dim(n + 1), self.summands[j].dim(n))
        return op.matrix(n + self.summands[j].shift)

    def d(self, n: int) -> ExactMatrix:
        """The differential from degree ``n`` to ``n + 1``."""
        m = self._d.get(n)
        if m is None:
            parts = {}
            for (i, j), op in self.blocks.items():
                parts[(i, j)] = op.matrix(n + self.summands[j].shift)
            m = ExactMatrix.blocks(self.field, self.dims(n + 1), self.dims(n), parts)
            self._d[n] = m
        return m

    def pattern(self) -> list[list[str]]:
        """Block names laid out as a square table (empty string for zero blocks)."""
        k = len(self.summands)
        return [[self.blocks[(i, j)].name if (i, j) in self.blocks else "" for j in range(k)]
                for i in range(k)]

    def check_d2(self, degrees: Iterable[int]) -> list[tuple[int, str, str]]:
        """Return ``(n, row, col)`` for every nonzero block of ``d_{n+1} d_n``."""
        bad = []
        for n in degrees:
            dd = self.d(n + 1) @ self.d(n)
            if dd.is_zero():
                continue
            ro = _offsets(self.dims(n + 2))
            co = _offsets(self.dims(n))
            for (r, c), _ in dd.entries():
                i = _find(ro, r)
                j = _find(co, c)
                item = (n, self.summands[i].label, self.summands[j].label)
                if item not in bad:
                    bad.append(item)
        return bad

    def cohomology_dims(self, degrees: Iterable[int]) -> list[int]:
        out = []
        for n in degrees:
            dim = self.dim(n)
            rk_out = rank(self.d(n)) if dim else 0
            rk_in = rank(self.d(n - 1)) if dim else 0
            out.append(dim - rk_out - rk_in)
        return out

    def cocycle_basis(self, n: int) -> list[list]:
        return kernel_basis(self.d(n))

    def is_coboundary(self, n: int, vec: Sequence) -> bool:
        return solve(self.d(n - 1), vec) is not NoSolution

    def __repr__(self):
        return f"GradedComplex({self.name}, summands={self.labels})"


class NotNormalizable(ValueError):
    """Raised when an identity arrow is not a single basis arrow."""


def normalized_coordinates(X: GradedComplex, n: int) -> list[int]:
    """Coordinates of degree ``n`` that survive in the normalized subcomplex.

    A normalized cochain vanishes whenever one of its arguments is an
    identity arrow.  When every identity is a basis arrow this is the
    coordinate subspace that drops each key containing an identity label.
    Degree-0 cochains have no arguments and are always kept.
    """
    out = []
    o = 0
    for s in X.summands:
        h = n + s.shift
        if h < 0:
            continue
        S = _space(s.kind[0], s.kind[1], h)
        if h == 0:
            out.extend(range(o, o + S.dim))
        else:
            ids = S.source.identity_labels
            if any(v is None for v in ids.values()):
                raise NotNormalizable(f"{S.source.name} has an identity that is not a basis arrow")
            idset = set(ids.values())
            for i, key in enumerate(S.keys):
                if not idset.intersection(key):
                    out.extend(range(o + S.offsets[i], o + S.offsets[i + 1]))
        o += S.dim
    return out


def _offsets(sizes):
    out = [0]
    for s in sizes:
        out.append(out[-1] + s)
    return out


def _find(offsets, k):
    for i in range(len(offsets) - 1):
        if offsets[i] <= k < offsets[i + 1]:
            return i
    raise IndexError(k)


def cohomology_dims(X: GradedComplex, degrees: Iterable[int]) -> list[int]:
    """``dim ker d^n - rank d^{n-1}`` for each requested degree."""
    return X.cohomology_dims(degrees)


class BlockMap:
    """A map of graded complexes ``X^n -> Y^{n + degree}`` given by operator blocks.

    ``blocks[(i, j)]`` goes from summand ``j`` of the source to summand ``i``
    of the target.  With ``alternating`` set, the degree-``n`` matrix is
    multiplied by ``(-1)^n``.
    """

    def __init__(self, source: GradedComplex, target: GradedComplex, blocks: dict, degree: int = 0,
                 alternating: bool = False, name: str = "map"):
        self.source, self.target = source, target
        self.degree = degree
        self.alternating = alternating
        self.name = name
        self.blocks: dict[tuple[int, int], Op] = {}
        for (i, j), op in blocks.items():
            si, sj = target.summands[i], source.summands[j]
            if op.src[0] is not sj.kind[0] or op.src[1] is not sj.kind[1] \
                    or op.tgt[0] is not si.kind[0] or op.tgt[1] is not si.kind[1]:
                raise TreeBoundaryMismatch(f"map block ({si.label},{sj.label}) has the wrong spaces")
            if op.delta != degree + si.shift - sj.shift:
                raise TreeBoundaryMismatch(f"map block ({si.label},{sj.label}) has the wrong degree")
            self.blocks[(i, j)] = op
        self._m: dict[int, ExactMatrix] = {}

    def block(self, row: str, col: str) -> Op | None:
        return self.blocks.get((self.target.index[row], self.source.index[col]))

    def matrix(self, n: int) -> ExactMatrix:
        m = self._m.get(n)
        if m is None:
            parts = {(i, j): op.matrix(n + self.source.summands[j].shift) for (i, j), op in self.blocks.items()}
            m = ExactMatrix.blocks(self.source.field, self.target.dims(n + self.degree),
                                   self.source.dims(n), parts)
            if self.alternating and n % 2:
                m = -m
            self._m[n] = m
        return m

    def chain_defect(self, n: int) -> ExactMatrix:
        """``d_Y f - (-1)^degree f d_X`` in degree ``n``."""
        left = self.target.d(n + self.degree) @ self.matrix(n)
        right = self.matrix(n + 1) @ self.source.d(n)
        return left - right if self.degree % 2 == 0 else left + right

    def is_chain_map(self, degrees: Iterable[int]) -> bool:
        return all(self.chain_defect(n).is_zero() for n in degrees)

    def check(self, degrees: Iterable[int]):
        for n in degrees:
            if not self.chain_defect(n).is_zero():
                raise NotAChainMap(f"{self.name} fails the chain-map identity in degree {n}")


def quotient_cohomology_dims(inc: BlockMap, degrees: Iterable[int]) -> list[int]:
    """Cohomology of the cokernel of an injective chain map ``S -> X``.

    ``H^n(X/S) = dim{x : dx in S} - dim(im d + S)`` computed with ranks only.
    """
    X = inc.target
    f = X.field
    out = []
    for n in degrees:
        dim = X.dim(n)
        I_n, I_n1 = inc.matrix(n), inc.matrix(n + 1)
        rI1 = rank(I_n1)
        # rank of X^n -> X^{n+1}/S^{n+1}
        stacked = _hcat(f, X.d(n), I_n1)
        pre = dim - (rank(stacked) - rI1)
        img = rank(_hcat(f, X.d(n - 1), I_n))
        out.append(pre - img)
    return out


def _hcat(field: Field, a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    return ExactMatrix.blocks(field, [a.rows], [a.cols, b.cols], {(0, 0): a, (0, 1): b})


# ---------------------------------------------------------------------------
# assembly


def path_derivative(D: PastingDiagram, path: Sequence[str]) -> dict[str, Op]:
    """For each functor in ``path``, the map ``C(F_i) -> C(P, P)`` (summed over repeats).

    Pull back along the part of the path before ``F_i`` and push forward along
    the part after it.
    """
    out: dict[str, Op] = {}
    for i, name in enumerate(path):
        F = D.functors[name]
        op = ident_op((F, F))
        if i > 0:
            op = op.then(pull_op(D.path_functor(path[:i]), (F, F)))
        if i + 1 < len(path):
            op = op.then(push_op(D.path_functor(path[i + 1:]), op.tgt))
        out[name] = out[name] + op if name in out else op
    return out


def _add(row: dict, key: str, op: Op):
    row[key] = row[key] + op if key in row else op


def composite_row(D: PastingDiagram, t: Tree) -> dict[str, Op]:
    """The row of the pasting map of ``t``: cell name -> operator into ``C(dom, cod)``.

    Leaves give the identity; a vertical composite ``a ; b`` gives
    ``b_* row(a) + a^* row(b)`` plus ``(.){a, b}`` on the category where the
    functors land; whiskering afterwards by ``W`` pushes forward along ``W``
    and adds ``(.){a}`` on each functor of ``W``; whiskering beforehand by ``V``
    pulls back along ``V``.
    """
    if isinstance(t, Leaf):
        c = D.cells2[t.cell]
        return {t.cell: ident_op((c.nat.source, c.nat.target))}
    if isinstance(t, Vert):
        a, b = D.tree_value(t.first), D.tree_value(t.second)
        P, R = a.source, b.target
        row: dict[str, Op] = {}
        for k, op in composite_row(D, t.first).items():
            _add(row, k, op.then(nat_post_op(b, P)))
        for k, op in composite_row(D, t.second).items():
            _add(row, k, op.then(nat_pre_op(a, R)))
        p, _ = D.tree_type(t)
        Z = D.path_ends(p)[1]
        I = D.categories[Z].identity_functor
        _add(row, Z, brace_op(I, I, (a, b)))
        return row
    if isinstance(t, Post):
        a = D.tree_value(t.tree)
        W = D.path_functor(t.path)
        row = {}
        for k, op in composite_row(D, t.tree).items():
            _add(row, k, op.then(push_op(W, op.tgt)))
        br = brace_op(W, W, (a,))
        for k, op in path_derivative(D, t.path).items():
            _add(row, k, op.then(br))
        return row
    if isinstance(t, Pre):
        V = D.path_functor(t.path)
        return {k: op.then(pull_op(V, op.tgt)) for k, op in composite_row(D, t.tree).items()}
    raise TypeError(t)


def _summands(D: PastingDiagram) -> list[Summand]:
    top = D.top_dim
    return [Summand(name, D.kind_of(name), top - D.dim_of(name)) for name in D.cells()]


def diagram_rows(D: PastingDiagram) -> dict[str, dict[str, Op]]:
    """Row recipes of the deformation complex: cell -> {column cell: operator}."""
    rows: dict[str, dict[str, Op]] = {}
    for name, c in D.categories.items():
        rows[name] = {name: -delta_op(cat_kind(c))}
    for name, F in D.functors.items():
        a, b = D.functor_ends(name)
        row: dict[str, Op] = {}
        _add(row, a, -push_op(F, cat_kind(D.categories[a])))
        _add(row, b, pull_op(F, cat_kind(D.categories[b])))
        row[name] = delta_op((F, F))
        rows[name] = row
    for name, c in D.cells2.items():
        s = c.nat
        P, Q = s.source, s.target
        Z = D.path_ends(c.dom)[1]
        I = D.categories[Z].identity_functor
        row = {Z: brace_op(I, I, (s,))}
        for k, op in path_derivative(D, c.dom).items():
            _add(row, k, op.then(nat_post_op(s, P)))
        for k, op in path_derivative(D, c.cod).items():
            _add(row, k, -op.then(nat_pre_op(s, Q)))
        row[name] = -delta_op((P, Q))
        rows[name] = row
    for name, c in D.cells3.items():
        row = dict(composite_row(D, c.dom))
        for k, op in composite_row(D, c.cod).items():
            _add(row, k, -op)
        row[name] = delta_op(D.kind_of(name))
        rows[name] = row
    return rows


def assemble(D: PastingDiagram, max_degree: int = DEFAULT_MAX_DEGREE) -> GradedComplex:
    """The deformation complex of ``D``, with summands in cell order."""
    summands = _summands(D)
    idx = {s.label: i for i, s in enumerate(summands)}
    blocks = {}
    for rname, row in diagram_rows(D).items():
        for cname, op in row.items():
            if cname not in idx:
                raise InvalidDiagram(f"row {rname} refers to {cname}, which is not a cell")
            blocks[(idx[rname], idx[cname])] = op
    return GradedComplex(summands, blocks, max_degree, name="C(D)")


def deformation_degree(X_or_D) -> int:
    """The degree whose cocycles are first-order deformations (0, or -1 with 3-cells)."""
    top = X_or_D.top_dim if isinstance(X_or_D, PastingDiagram) else max(s.shift for s in X_or_D.summands)
    return 2 - top


# ---------------------------------------------------------------------------
# pasting maps


def composable_part(D: PastingDiagram, t: Tree) -> PastingDiagram:
    """The sub-diagram of ``D`` spanned by the cells and whiskers of ``t`` and their boundaries."""
    cells2 = tree_leaves(t)
    functors: list[str] = []
    for s in cells2:
        c = D.cells2[s]
        functors += [f for f in c.dom + c.cod if f not in functors]
    functors += [w for w in tree_whiskers(t) if w not in functors]
    cats: list[str] = []
    for f in functors:
        for x in D.functor_ends(f):
            if x not in cats:
                cats.append(x)
    keep = set(cells2) | set(functors) | set(cats)
    return D.sub_diagram([n for n in D.cells() if n in keep])


def pasting_map(D: PastingDiagram, t: Tree, name: str | None = None,
                max_degree: int = DEFAULT_MAX_DEGREE) -> tuple[PastingDiagram, BlockMap]:
    """The chain map ``C(D_t) -> C(D')`` induced by composing the cells of ``t``.

    ``D_t`` is the composable part of ``D`` used by ``t``.  ``D'`` has the two
    end categories, the composite domain and codomain functors, and one 2-cell,
    the composite.  Rows of ``D'`` are: the identity on end categories; the
    path derivative for the composite functors; :func:`composite_row` for the
    composite 2-cell.  A single leaf gives the identity.
    """
    src = composable_part(D, t)
    p, q = D.tree_type(t)
    a, b = D.path_ends(p)
    value = D.tree_value(t)
    tgt = PastingDiagram(D.field)
    tgt.add_category(D.categories[a], a)
    if b != a:
        tgt.add_category(D.categories[b], b)
    fnames = {}
    for path in (p, q):
        nm = path[0] if len(path) == 1 else _path_name(path)
        if nm not in tgt.functors:
            tgt.add_functor(D.path_functor(path), nm)
        fnames[path] = nm
    cname = name or (tree_leaves(t)[0] if isinstance(t, Leaf) else str(t))
    tgt.add_cell2(cname, (fnames[p],), (fnames[q],), nat=value)
    X, Y = assemble(src, max_degree), assemble(tgt, max_degree)
    blocks = {}
    for cat in tgt.categories:
        blocks[(Y.index[cat], X.index[cat])] = ident_op(cat_kind(tgt.categories[cat]))
    for nm in dict.fromkeys(fnames.values()):
        path = p if fnames[p] == nm else q
        for k, op in path_derivative(src, path).items():
            key = (Y.index[nm], X.index[k])
            blocks[key] = blocks[key] + op if key in blocks else op
    for k, op in composite_row(src, t).items():
        blocks[(Y.index[cname], X.index[k])] = op
    return tgt, BlockMap(X, Y, blocks, 0, name=f"paste[{cname}]")


def _path_name(path: Sequence[str]) -> str:
    out = path[0]
    for f in path[1:]:
        out = f"{f}({out})"
    return out


# ---------------------------------------------------------------------------
# cones and cylinders


def shifted(X: GradedComplex, k: int, negate: bool, prefix: str = "") -> tuple[list[Summand], dict]:
    """Summands of ``X[k]`` (and blocks, negated if asked), relabeled with ``prefix``."""
    summ = [Summand(prefix + s.label, s.kind, s.shift + k) for s in X.summands]
    blocks = {ij: (-op if negate else op) for ij, op in X.blocks.items()}
    return summ, blocks


def direct_sum(parts: Sequence[tuple[list[Summand], dict]], links: dict, max_degree: int,
               name: str) -> GradedComplex:
    """Glue summand lists; ``links[(a, b)]`` is ``{(i, j): op}`` from part ``b`` to part ``a``."""
    summands: list[Summand] = []
    offs = []
    for summ, _ in parts:
        offs.append(len(summands))
        summands += summ
    blocks = {}
    for p, (_, bl) in enumerate(parts):
        for (i, j), op in bl.items():
            blocks[(offs[p] + i, offs[p] + j)] = op
    for (a, b), bl in links.items():
        for (i, j), op in bl.items():
            blocks[(offs[a] + i, offs[b] + j)] = op
    return GradedComplex(summands, blocks, max_degree, name)


def cone(f: BlockMap, name: str = "cone") -> GradedComplex:
    """``cone(f) = X[1] + Y`` with differential ``[[-d_X, 0], [f, d_Y]]``."""
    if f.degree != 0:
        raise NotAChainMap("cone needs a degree-0 map")
    X, Y = f.source, f.target
    f.check(range(X.min_degree - 1, min(X.max_degree, Y.max_degree)))
    return direct_sum([shifted(X, 1, True, "s."), shifted(Y, 0, False)], {(1, 0): f.blocks},
                      min(X.max_degree, Y.max_degree), name)


def dual_cylinder(phi: BlockMap, name: str = "cylinder") -> GradedComplex:
    """``X[1] + Y[1] + Y`` with differential ``[[-d_X, 0, 0], [0, -d_Y, 0], [-phi, Id, d_Y]]``."""
    X, Y = phi.source, phi.target
    if phi.degree != 0:
        raise NotAChainMap("cylinder needs a degree-0 map")
    phi.check(range(X.min_degree - 1, min(X.max_degree, Y.max_degree)))
    ident = {(i, i): ident_op(s.kind) for i, s in enumerate(Y.summands)}
    neg_phi = {ij: -op for ij, op in phi.blocks.items()}
    return direct_sum([shifted(X, 1, True, "x."), shifted(Y, 1, True, "y."), shifted(Y, 0, False)],
                      {(2, 0): neg_phi, (2, 1): ident}, min(X.max_degree, Y.max_degree), name)


@dataclass
class LemmaData:
    """A map of cones ``phi = [[Id, 0], [s, t]]: cone(f) -> cone(g)`` split into parts.

    ``c_src``/``c_tgt`` list the summand indices of the shared part ``C`` in
    the two cones (matched in order); ``a_idx`` and ``b_idx`` the remaining
    summands of the source and target.
    """

    phi: BlockMap
    c_src: list
    c_tgt: list
    a_idx: list
    b_idx: list


def lemma_split(phi: BlockMap) -> LemmaData:
    """Split a pasting map into shared and unshared blocks by matching labels."""
    X, Y = phi.source, phi.target
    c_src, c_tgt = [], []
    for j, s in enumerate(X.summands):
        if s.label in Y.index:
            c_src.append(j)
            c_tgt.append(Y.index[s.label])
    a_idx = [j for j in range(len(X.summands)) if j not in c_src]
    b_idx = [i for i in range(len(Y.summands)) if i not in c_tgt]
    for j, i in zip(c_src, c_tgt):
        for (r, c), op in phi.blocks.items():
            if c == j and r != i and r not in b_idx:
                raise NotAChainMap("map is not triangular over the shared part")
    return LemmaData(phi, c_src, c_tgt, a_idx, b_idx)


def reduced_complex(data: LemmaData, name: str = "reduced") -> GradedComplex:
    """``C[2] + A[1] + B[1] + B`` with ``[[-d_C], [f, d_A], [g, 0, d_B], [-s, -t, Id, -d_B]]``.

    Here ``cone(f) = C[1] + A`` and ``cone(g) = C[1] + B`` carry the
    differentials ``[[-d_C, 0], [f, d_A]]`` and ``[[-d_C, 0], [g, d_B]]``.
    """
    phi = data.phi
    X, Y = phi.source, phi.target
    CX, A, CY, B = data.c_src, data.a_idx, data.c_tgt, data.b_idx
    summ = ([Summand(X.summands[j].label, X.summands[j].kind, X.summands[j].shift + 1) for j in CX]
            + [Summand(X.summands[j].label, X.summands[j].kind, X.summands[j].shift + 1) for j in A]
            + [Summand("b1." + Y.summands[i].label, Y.summands[i].kind, Y.summands[i].shift + 1) for i in B]
            + [Summand("b0." + Y.summands[i].label, Y.summands[i].kind, Y.summands[i].shift) for i in B])
    nc, na, nb = len(CX), len(A), len(B)
    pos_c = {j: k for k, j in enumerate(CX)}
    pos_a = {j: nc + k for k, j in enumerate(A)}
    pos_cy = {i: k for k, i in enumerate(CY)}
    pos_b1 = {i: nc + na + k for k, i in enumerate(B)}
    pos_b0 = {i: nc + na + nb + k for k, i in enumerate(B)}
    blocks = {}
    for (i, j), op in X.blocks.items():
        if i in pos_c and j in pos_c:
            blocks[(pos_c[i], pos_c[j])] = op
        elif i in pos_a and j in pos_c:
            blocks[(pos_a[i], pos_c[j])] = op
        elif i in pos_a and j in pos_a:
            blocks[(pos_a[i], pos_a[j])] = op
    for (i, j), op in Y.blocks.items():
        if i in pos_b1 and j in pos_cy:
            blocks[(pos_b1[i], pos_cy[j])] = op
        elif i in pos_b1 and j in pos_b1:
            blocks[(pos_b1[i], pos_b1[j])] = op
            blocks[(pos_b0[i], pos_b0[j])] = -op
    for (i, j), op in phi.blocks.items():
        if i in pos_b0:
            col = pos_c[j] if j in pos_c else pos_a[j]
            blocks[(pos_b0[i], col)] = -op
    for i in B:
        blocks[(pos_b0[i], pos_b1[i])] = ident_op(Y.summands[i].kind)
    return GradedComplex(summ, blocks, min(X.max_degree, Y.max_degree), name)


def lemma_inclusion(data: LemmaData, red: GradedComplex, cyl: GradedComplex) -> BlockMap:
    """The inclusion ``(c, a, b, b') -> (-1)^n (c, a, c, b, 0, -b')`` of the reduced complex.

    The degree-dependent sign is what makes the map commute with the
    displayed differentials; without it the first two components anticommute.
    """
    X, Y = data.phi.source, data.phi.target
    nx, ny = len(X.summands), len(Y.summands)
    nc, na, nb = len(data.c_src), len(data.a_idx), len(data.b_idx)
    blocks = {}
    for k, j in enumerate(data.c_src):
        kind = X.summands[j].kind
        blocks[(j, k)] = ident_op(kind)
        blocks[(nx + data.c_tgt[k], k)] = ident_op(kind)
    for k, j in enumerate(data.a_idx):
        blocks[(j, nc + k)] = ident_op(X.summands[j].kind)
    for k, i in enumerate(data.b_idx):
        kind = Y.summands[i].kind
        blocks[(nx + i, nc + na + k)] = ident_op(kind)
        blocks[(nx + ny + i, nc + na + nb + k)] = -ident_op(kind)
    return BlockMap(red, cyl, blocks, 0, alternating=True, name="lemma-inclusion")


# ---------------------------------------------------------------------------
# unions


def pushout_union(D1: PastingDiagram, D2: PastingDiagram, overlap: Sequence[str] | None = None,
                  max_degree: int = DEFAULT_MAX_DEGREE) -> GradedComplex:
    """Glue ``C(D1)`` and ``C(D2)`` along the summands of their common cells.

    Rows of shared cells must agree; the result lists the cells of ``D1``
    followed by the new cells of ``D2``.  Summand shifts use the top dimension
    of the union.
    """
    shared = set(D1.cells()) & set(D2.cells())
    if overlap is not None and set(overlap) != shared:
        raise OverlapMismatch(f"declared overlap {sorted(overlap)} differs from the shared cells {sorted(shared)}")
    for kind, a, b in (("category", D1.categories, D2.categories), ("functor", D1.functors, D2.functors)):
        for k in set(a) & set(b):
            if a[k] is not b[k]:
                raise OverlapMismatch(f"{kind} {k} differs between the two diagrams")
    for k in set(D1.cells2) & set(D2.cells2):
        c1, c2 = D1.cells2[k], D2.cells2[k]
        if c1.dom != c2.dom or c1.cod != c2.cod or c1.nat.components.keys() != c2.nat.components.keys() \
                or any(list(c1.nat.components[x]) != list(c2.nat.components[x]) for x in c1.nat.components):
            raise OverlapMismatch(f"2-cell {k} differs between the two diagrams")
    for k in set(D1.cells3) & set(D2.cells3):
        if D1.cells3[k] != D2.cells3[k]:
            raise OverlapMismatch(f"3-cell {k} differs between the two diagrams")
    top = 3 if (D1.cells3 or D2.cells3) else 2
    r1, r2 = diagram_rows(D1), diagram_rows(D2)
    order = D1.cells() + [c for c in D2.cells() if c not in shared]
    dims = {}
    kinds = {}
    for D in (D1, D2):
        for c in D.cells():
            dims[c] = D.dim_of(c)
            kinds[c] = D.kind_of(c)
    summands = [Summand(c, kinds[c], top - dims[c]) for c in order]
    idx = {c: i for i, c in enumerate(order)}
    blocks = {}
    for c in order:
        row = r1[c] if c in r1 else r2[c]
        if c in r1 and c in r2:
            other = r2[c]
            if set(row) != set(other):
                raise OverlapMismatch(f"rows of {c} differ between the two diagrams")
        for col, op in row.items():
            blocks[(idx[c], idx[col])] = op
    return GradedComplex(summands, blocks, max_degree, "pushout")


def union_diagram(D1: PastingDiagram, D2: PastingDiagram) -> PastingDiagram:
    """The union of two diagrams over the same field (shared names must denote the same cells)."""
    D = PastingDiagram(D1.field)
    for src in (D1, D2):
        for k, c in src.categories.items():
            if k not in D.categories:
                D.categories[k] = c
    for src in (D1, D2):
        for k, F in src.functors.items():
            if k not in D.functors:
                D.functors[k] = F
    for src in (D1, D2):
        for k, c in src.cells2.items():
            if k not in D.cells2:
                D.cells2[k] = c
    for src in (D1, D2):
        for k, c in src.cells3.items():
            if k not in D.cells3:
                D.cells3[k] = c
    D.trivial = set(D1.trivial) | set(D2.trivial)
    D.check_closed()
    return D


def same_blocks(X: GradedComplex, Y: GradedComplex, degrees: Iterable[int]) -> bool:
    """True when ``X`` and ``Y`` have the same labeled summands and equal blocks in every degree."""
    if sorted(X.labels) != sorted(Y.labels):
        return False
    for s in X.summands:
        t = Y.summands[Y.index[s.label]]
        if s.kind[0] is not t.kind[0] or s.kind[1] is not t.kind[1] or s.shift != t.shift:
            return False
    for n in degrees:
        for r in X.labels:
            for c in X.labels:
                if X.block_matrix(r, c, n) != Y.block_matrix(r, c, n):
                    return False
    return True


# ---------------------------------------------------------------------------
# association homotopy


def association_homotopy(sigma: NatTrans, tau: NatTrans, upsilon: NatTrans) -> tuple[Op, Op]:
    """The homotopy between the left- and right-associated composite rows.

    For ``sigma: F => G``, ``tau: G => H``, ``upsilon: H => K`` (all ``A -> B``)
    the two rows differ only in the ``B`` column, by ``psi - psi~`` with

        psi  = upsilon_* (.){sigma, tau} + (.){sigma tau, upsilon}
        psi~ = sigma^* (.){tau, upsilon} + (.){sigma, tau upsilon}

    Returns ``(h, residual)`` with ``h = (.){sigma, tau, upsilon}`` and
    ``residual = (psi - psi~) - (d h + h d)``, which vanishes identically.
    """
    B = sigma.codomain_cat
    I = B.identity_functor
    F, K = sigma.source, upsilon.target
    st = vertical_composite(sigma, tau, f"({sigma.name}{tau.name})")
    tu = vertical_composite(tau, upsilon, f"({tau.name}{upsilon.name})")
    psi = brace_op(I, I, (sigma, tau)).then(nat_post_op(upsilon, F)) + brace_op(I, I, (st, upsilon))
    psi_t = brace_op(I, I, (tau, upsilon)).then(nat_pre_op(sigma, K)) + brace_op(I, I, (sigma, tu))
    h = brace_op(I, I, (sigma, tau, upsilon))
    dh = h.then(delta_op((F, K))) + delta_op((I, I)).then(h)
    return h, (psi - psi_t) - dh
