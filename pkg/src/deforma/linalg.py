"""Exact scalar fields and matrices.

Every number in the package is either a :class:`fractions.Fraction` (when
working over the rationals) or a Python ``int`` reduced modulo a prime.
Matrices are stored sparsely as a dict of rows; small matrices are reduced
through a dense numpy path, larger ones through sparse elimination.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

DEFAULT_PRIME = 32003
DENSE_LIMIT = 64  # both dimensions below this go through the dense kernel
_INT64_SAFE_PRIME = 1 << 26


class FieldMismatch(ValueError):
    """Raised when values over two different fields are combined."""


class NotASubspace(ValueError):
    """Raised by :func:`quotient_dim` when the small span is not contained in the big one."""


class _NoSolution:
    """Marker returned by :func:`solve` when the system is inconsistent."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __bool__(self):
        return False

    def __repr__(self):
        return "NoSolution"


NoSolution = _NoSolution()


class Field:
    """The rationals (``p is None``) or the prime field of order ``p``."""

    def __init__(self, p: int | None = DEFAULT_PRIME):
        if p is not None:
            p = int(p)
            if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
                raise ValueError(f"{p} is not prime")
        self.p = p

    @classmethod
    def rationals(cls) -> "Field":
        return cls(None)

    @classmethod
    def from_spec(cls, spec: str) -> "Field":
        """Parse ``q`` or ``fp:P`` (case insensitive)."""
        s = spec.strip().lower()
        if s in ("q", "qq", "rational", "rationals"):
            return cls(None)
        if s.startswith("fp:"):
            return cls(int(s[3:]))
        if s.startswith("f") and s[1:].isdigit():
            return cls(int(s[1:]))
        raise ValueError(f"unknown field spec {spec!r}")

    @property
    def spec(self) -> str:
        return "q" if self.p is None else f"fp:{self.p}"

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "Field(Q)" if self.p is None else f"Field(F_{self.p})"

    # -- elements --------------------------------------------------------
    @property
    def zero(self):
        return Fraction(0) if self.p is None else 0

    @property
    def one(self):
        return Fraction(1) if self.p is None else 1

    def __call__(self, x):
        """Coerce an int, Fraction or string into the field."""
        if isinstance(x, str):
            return self.parse(x)
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"{x} has no image mod {self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        if isinstance(x, (int, np.integer)):
            return int(x) % self.p
        raise TypeError(f"cannot coerce {x!r} into {self}")

    def parse(self, text: str):
        """Parse ``"3/7"``, ``"-2"`` or ``"5 mod 32003"``."""
        s = text.strip()
        if " mod " in s:
            val, mod = s.split(" mod ")
            if self.p is None or int(mod) != self.p:
                raise FieldMismatch(f"scalar {text!r} does not belong to {self}")
            s = val.strip()
        return self(Fraction(s))

    def format(self, x) -> str:
        if self.p is None:
            return str(x)
        return str(int(x))

    def add(self, a, b):
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p is None else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.p is None else (a * b) % self.p

    def neg(self, a):
        return -a if self.p is None else (-a) % self.p

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.p is None:
            return 1 / Fraction(a)
        return pow(int(a), -1, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def random(self, rng: random.Random, small: bool = True):
        """A random element; ``small`` keeps rationals readable."""
        if self.p is None:
            return Fraction(rng.randint(-3, 3)) if small else Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        if small:
            return rng.randint(-3, 3) % self.p
        return rng.randrange(self.p)

    # -- numpy helpers ---------------------------------------------------
    @property
    def dtype(self):
        if self.p is not None and self.p < _INT64_SAFE_PRIME:
            return np.int64
        return object

    def array(self, data) -> np.ndarray:
        a = np.array(data, dtype=self.dtype)
        if self.p is None and a.size:
            a = np.vectorize(Fraction, otypes=[object])(a)
        return a

    def zeros(self, shape) -> np.ndarray:
        if self.p is None:
            a = np.empty(shape, dtype=object)
            a.fill(Fraction(0))
            return a
        return np.zeros(shape, dtype=self.dtype)

    def reduce(self, a: np.ndarray) -> np.ndarray:
        return a if self.p is None else a % self.p


def _clean_row(row: dict) -> dict:
    return {j: v for j, v in row.items() if v != 0}


class ExactMatrix:
    """An immutable matrix over a :class:`Field`, stored as sparse rows.

    Only nonzero entries are stored.  ``rows`` and ``cols`` give the shape.
    """

    __slots__ = ("field", "rows", "cols", "_rows", "_dense")

    def __init__(self, field: Field, rows: int, cols: int, data: dict | None = None):
        self.field = field
        self.rows = rows
        self.cols = cols
        self._rows: dict[int, dict[int, object]] = {}
        self._dense = None
        if data:
            for (i, j), v in data.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise IndexError(f"entry ({i},{j}) outside {rows}x{cols}")
                v = field(v)
                if v != 0:
                    self._rows.setdefault(i, {})[j] = v

    # -- construction ----------------------------------------------------
    @classmethod
    def _from_rows(cls, field, rows, cols, rowdict):
        m = cls(field, rows, cols)
        m._rows = {i: r for i, r in rowdict.items() if r}
        return m

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "ExactMatrix":
        return cls(field, rows, cols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "ExactMatrix":
        return cls._from_rows(field, n, n, {i: {i: field.one} for i in range(n)})

    @classmethod
    def from_dense(cls, field: Field, data) -> "ExactMatrix":
        arr = list(data)
        nrows = len(arr)
        ncols = len(arr[0]) if nrows else 0
        rows = {}
        for i, r in enumerate(arr):
            if len(r) != ncols:
                raise ValueError("ragged matrix")
            d = {j: field(v) for j, v in enumerate(r)}
            d = _clean_row(d)
            if d:
                rows[i] = d
        return cls._from_rows(field, nrows, ncols, rows)

    @classmethod
    def from_numpy(cls, field: Field, a: np.ndarray) -> "ExactMatrix":
        nrows, ncols = a.shape
        rows = {}
        nz_i, nz_j = np.nonzero(a != 0) if a.size else ((), ())
        for i, j in zip(nz_i, nz_j):
            v = a[i, j]
            rows.setdefault(int(i), {})[int(j)] = v if field.p is None else int(v)
        m = cls._from_rows(field, nrows, ncols, rows)
        return m

    @classmethod
    def from_columns(cls, field: Field, columns: Sequence[Sequence], nrows: int | None = None) -> "ExactMatrix":
        if nrows is None:
            nrows = len(columns[0]) if columns else 0
        rows: dict = {}
        for j, col in enumerate(columns):
            for i, v in enumerate(col):
                if v != 0:
                    rows.setdefault(i, {})[j] = v
        return cls._from_rows(field, nrows, len(columns), rows)

    @classmethod
    def blocks(cls, field: Field, row_sizes: Sequence[int], col_sizes: Sequence[int],
               blocks: dict) -> "ExactMatrix":
        """Assemble from ``{(block_row, block_col): ExactMatrix}``."""
        roff = [0]
        for s in row_sizes:
            roff.append(roff[-1] + s)
        coff = [0]
        for s in col_sizes:
            coff.append(coff[-1] + s)
        out: dict = {}
        for (bi, bj), blk in blocks.items():
            if blk.rows != row_sizes[bi] or blk.cols != col_sizes[bj]:
                raise ValueError(f"block ({bi},{bj}) has shape {blk.shape}, "
                                 f"expected {(row_sizes[bi], col_sizes[bj])}")
            for i, r in blk._rows.items():
                tgt = out.setdefault(roff[bi] + i, {})
                for j, v in r.items():
                    jj = coff[bj] + j
                    if jj in tgt:
                        tgt[jj] = field.add(tgt[jj], v)
                    else:
                        tgt[jj] = v
        out = {i: _clean_row(r) for i, r in out.items()}
        return cls._from_rows(field, roff[-1], coff[-1], out)

    # -- access ----------------------------------------------------------
    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self._rows.get(i, {}).get(j, self.field.zero)

    def entries(self):
        """Iterate ``((i, j), value)`` over stored (nonzero) entries in row-major order."""
        for i in sorted(self._rows):
            r = self._rows[i]
            for j in sorted(r):
                yield (i, j), r[j]

    def nnz(self) -> int:
        return sum(len(r) for r in self._rows.values())

    def row(self, i: int) -> dict:
        return dict(self._rows.get(i, {}))

    def to_dense(self) -> np.ndarray:
        if self._dense is None:
            a = self.field.zeros((self.rows, self.cols))
            for i, r in self._rows.items():
                for j, v in r.items():
                    a[i, j] = v
            self._dense = a
        return self._dense.copy()

    def to_lists(self) -> list[list]:
        return [[self[i, j] for j in range(self.cols)] for i in range(self.rows)]

    def is_zero(self) -> bool:
        return not self._rows

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "ExactMatrix":
        cmap = {j: k for k, j in enumerate(col_idx)}
        rows = {}
        for k, i in enumerate(row_idx):
            r = self._rows.get(i)
            if r:
                d = {cmap[j]: v for j, v in r.items() if j in cmap}
                if d:
                    rows[k] = d
        return ExactMatrix._from_rows(self.field, len(row_idx), len(col_idx), rows)

    def transpose(self) -> "ExactMatrix":
        rows: dict = {}
        for i, r in self._rows.items():
            for j, v in r.items():
                rows.setdefault(j, {})[i] = v
        return ExactMatrix._from_rows(self.field, self.cols, self.rows, rows)

    T = property(transpose)

    # -- arithmetic ------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        f = self.field
        rows = {i: dict(r) for i, r in self._rows.items()}
        for i, r in other._rows.items():
            tgt = rows.setdefault(i, {})
            for j, v in r.items():
                tgt[j] = f.add(tgt[j], v) if j in tgt else v
        rows = {i: _clean_row(r) for i, r in rows.items()}
        return ExactMatrix._from_rows(f, self.rows, self.cols, rows)

    def __neg__(self):
        f = self.field
        return ExactMatrix._from_rows(f, self.rows, self.cols,
                                      {i: {j: f.neg(v) for j, v in r.items()} for i, r in self._rows.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "ExactMatrix":
        f = self.field
        c = f(c)
        if c == 0:
            return ExactMatrix(f, self.rows, self.cols)
        return ExactMatrix._from_rows(f, self.rows, self.cols,
                                      {i: {j: f.mul(c, v) for j, v in r.items()} for i, r in self._rows.items()})

    def __matmul__(self, other):
        if isinstance(other, ExactMatrix):
            self._check(other)
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            if max(self.rows, self.cols, other.cols) < DENSE_LIMIT:
                prod = self.field.reduce(self.to_dense().dot(other.to_dense()))
                return ExactMatrix.from_numpy(self.field, prod)
            return self._sparse_matmul(other)
        return self.apply(other)

    def _sparse_matmul(self, other: "ExactMatrix") -> "ExactMatrix":
        f = self.field
        p = f.p
        rows = {}
        orows = other._rows
        for i, r in self._rows.items():
            acc: dict = {}
            for k, a in r.items():
                ork = orows.get(k)
                if not ork:
                    continue
                for j, b in ork.items():
                    acc[j] = acc.get(j, 0) + a * b
            if p is not None:
                acc = {j: v % p for j, v in acc.items()}
            acc = _clean_row(acc)
            if acc:
                rows[i] = acc
        return ExactMatrix._from_rows(f, self.rows, other.cols, rows)

    def apply(self, vec: Sequence) -> list:
        """Matrix times a dense vector (list)."""
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} for {self.shape} matrix")
        f = self.field
        out = [f.zero] * self.rows
        for i, r in self._rows.items():
            s = 0
            for j, v in r.items():
                x = vec[j]
                if x:
                    s += v * x
            out[i] = f(s) if f.p is not None else Fraction(s)
        return out

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.shape, tuple(self.entries())))

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols}, nnz={self.nnz()}, {self.field})"


# ---------------------------------------------------------------------------
# elimination kernels


def _dense_rref(a: np.ndarray, field: Field):
    """Reduced row echelon form of a dense array; returns (rows, pivot columns)."""
    a = a.copy()
    m, n = a.shape
    p = field.p
    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(a[r:, c] != 0)[0]
        if len(nz) == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = field.inv(a[r, c])
        a[r] = a[r] * inv
        if p is not None:
            a[r] %= p
        col = a[:, c].copy()
        col[r] = 0
        idx = np.nonzero(col != 0)[0]
        if len(idx):
            a[idx] = a[idx] - np.outer(col[idx], a[r])
            if p is not None:
                a[idx] %= p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def _sparse_echelon(rows: Iterable[dict], field: Field) -> dict:
    """Incremental echelon basis: pivot column -> normalized row (pivot entry 1)."""
    p = field.p
    piv: dict[int, dict] = {}
    for row in rows:
        r = dict(row)
        while r:
            c = min(r)
            pr = piv.get(c)
            if pr is None:
                inv = field.inv(r[c])
                if p is None:
                    r = {j: v * inv for j, v in r.items()}
                else:
                    r = {j: v * inv % p for j, v in r.items()}
                piv[c] = r
                break
            f = r[c]
            for j, v in pr.items():
                nv = r.get(j, 0) - f * v
                if p is not None:
                    nv %= p
                if nv:
                    r[j] = nv
                else:
                    r.pop(j, None)
    return piv


def _sparse_rref(rows: Iterable[dict], field: Field):
    """Fully reduced echelon form as (list of rows, pivot columns), sorted by pivot."""
    piv = _sparse_echelon(rows, field)
    p = field.p
    order = sorted(piv)
    done: dict[int, dict] = {}
    for c in reversed(order):
        r = piv[c]
        for c2 in [j for j in r if j != c and j in done]:
            f = r.get(c2)
            if not f:
                continue
            for j, v in done[c2].items():
                nv = r.get(j, 0) - f * v
                if p is not None:
                    nv %= p
                if nv:
                    r[j] = nv
                else:
                    r.pop(j, None)
        done[c] = r
    return [done[c] for c in order], order


def rref(m: ExactMatrix):
    """Return (list of sparse rows, pivot columns) of the reduced echelon form of ``m``."""
    if m.rows < DENSE_LIMIT and m.cols < DENSE_LIMIT:
        a, pivots = _dense_rref(m.to_dense(), m.field)
        out = []
        for k in range(len(pivots)):
            out.append({j: (v if m.field.p is None else int(v)) for j, v in enumerate(a[k]) if v != 0})
        return out, pivots
    return _sparse_rref((m._rows[i] for i in sorted(m._rows)), m.field)


def rank(m: ExactMatrix) -> int:
    """Rank over the matrix's field."""
    if m.is_zero():
        return 0
    if m.rows < DENSE_LIMIT and m.cols < DENSE_LIMIT:
        return len(_dense_rref(m.to_dense(), m.field)[1])
    return len(_sparse_echelon((m._rows[i] for i in sorted(m._rows)), m.field))


def kernel_basis(m: ExactMatrix) -> list[list]:
    """A basis of the right kernel, as dense vectors."""
    f = m.field
    rows, pivots = rref(m)
    pivset = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivset:
            continue
        v = [f.zero] * m.cols
        v[free] = f.one
        for r, c in zip(rows, pivots):
            x = r.get(free)
            if x:
                v[c] = f.neg(x)
        basis.append(v)
    return basis


def solve(m: ExactMatrix, b: Sequence):
    """Some x with ``m @ x == b``, or :data:`NoSolution`."""
    if len(b) != m.rows:
        raise ValueError(f"right-hand side of length {len(b)} for {m.shape} matrix")
    f = m.field
    n = m.cols
    aug = [dict(m._rows.get(i, {})) for i in range(m.rows)]
    for i, v in enumerate(b):
        v = f(v)
        if v != 0:
            aug[i][n] = v
    if m.rows < DENSE_LIMIT and m.cols + 1 < DENSE_LIMIT:
        a = f.zeros((m.rows, n + 1))
        for i, r in enumerate(aug):
            for j, v in r.items():
                a[i, j] = v
        arr, pivots = _dense_rref(a, f)
        rows = [{j: (v if f.p is None else int(v)) for j, v in enumerate(arr[k]) if v != 0}
                for k in range(len(pivots))]
    else:
        rows, pivots = _sparse_rref([r for r in aug if r], f)
    x = [f.zero] * n
    for r, c in zip(rows, pivots):
        if c == n:
            return NoSolution
        x[c] = r.get(n, f.zero)
    return x


def span_rank(field: Field, vectors: Sequence[Sequence]) -> int:
    if not vectors:
        return 0
    return rank(ExactMatrix.from_dense(field, vectors))


def quotient_dim(field: Field, big: Sequence[Sequence], small: Sequence[Sequence]) -> int:
    """dim span(big) - dim span(small), checking containment."""
    rb = span_rank(field, big)
    rs = span_rank(field, small)
    if small and span_rank(field, list(big) + list(small)) != rb:
        raise NotASubspace("span(small) is not contained in span(big)")
    return rb - rs


def vec_add(field: Field, u: Sequence, v: Sequence) -> list:
    return [field.add(a, b) for a, b in zip(u, v)]


def vec_scale(field: Field, c, u: Sequence) -> list:
    return [field.mul(c, a) for a in u]


def is_zero_vec(u: Sequence) -> bool:
    return all(x == 0 for x in u)
