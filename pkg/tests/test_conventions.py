"""Each sign constant is pinned by an identity that fails when the constant is flipped."""

import random

import pytest

from deforma import conventions, shapes
from deforma.complex import assemble, association_homotopy, deformation_degree
from deforma.deform import ParallelFamily, residuals
from deforma.hochschild import Cochain, clear_caches, differential, space_basis
from deforma.library import dual_numbers, make, random_nat
from deforma.linalg import Field


@pytest.fixture
def fresh_caches():
    clear_caches()
    yield
    clear_caches()


def test_differential_sign_degree_two():
    """d(mu)(a, b, c) = mu(a, b) c - a mu(b, c) + mu(ab, c) - mu(a, bc)."""
    f = Field(32003)
    C = make("trunc3", f)
    rng = random.Random(0)
    mu = Cochain.random(space_basis(C, 2), rng)
    d = differential(mu)
    lab = C.arrows

    def vec(a):
        return C.basis_arrow(a).vec

    def comp(u, v):
        return C.compose_vecs("*", "*", "*", u, v)

    def mu_at(u, v):
        out = f.zeros(3)
        for i, ci in enumerate(u):
            for j, cj in enumerate(v):
                if ci and cj:
                    out = f.reduce(out + mu.value((lab[i], lab[j])) * f.mul(ci, cj))
        return out

    for key in d.space.keys:
        a, b, c = (vec(x) for x in key)
        want = f.reduce(comp(mu_at(a, b), c) - comp(a, mu_at(b, c)) + mu_at(comp(a, b), c) - mu_at(a, comp(b, c)))
        assert list(d.value(key)) == list(want)
    assert conventions.DIFFERENTIAL_SIGN == -1


@pytest.mark.parametrize("shape", ["functor", "bigon", "triangular_pillow", "post", "pre"])
def test_embed_signs_make_rows_linearized_axioms(shape):
    """With EMBED_SIGN each row of d applied to the embedded parallels is the eps^1 residual."""
    f = Field(32003)
    D = shapes.sample(shape, f, 3)
    X = assemble(D)
    P = ParallelFamily.random_vector_family(D, 1, random.Random(1))
    n = deformation_degree(X)
    dv = X.d(n).apply(P.vector(X, 1))
    res = residuals(P, 1)
    o = 0
    for s in X.summands:
        dim = s.dim(n + 1)
        assert list(res[s.label][1]) == list(dv[o:o + dim]), s.label
        o += dim


def test_flipping_an_embed_sign_breaks_the_rows(monkeypatch):
    f = Field(32003)
    D = shapes.sample("functor", f, 3)
    X = assemble(D)
    P = ParallelFamily.random_vector_family(D, 1, random.Random(1))
    monkeypatch.setitem(conventions.EMBED_SIGN, 1, -1)
    import deforma.deform as deform
    monkeypatch.setattr(deform, "EMBED_SIGN", conventions.EMBED_SIGN)
    n = deformation_degree(X)
    dv = X.d(n).apply(P.vector(X, 1))
    res = residuals(P, 1)
    sF = X.summands[X.index["F"]]
    o = sum(s.dim(n + 1) for s in X.summands[:X.index["F"]])
    assert list(res["F"][1]) != list(dv[o:o + sF.dim(n + 1)])


def _d2_ok(shape, seed):
    D = shapes.sample(shape, Field(32003), seed)
    X = assemble(D, 4)
    return not X.check_d2(range(X.min_degree, 1))


# samples whose 2-cells are not degenerate (a zero cell hides the brace sign)
@pytest.mark.parametrize("r, shape, seed", [(1, "post", 3), (1, "pre", 0), (2, "triangular_pillow", 0)])
def test_brace_base_signs_forced_by_d_squared(r, shape, seed, monkeypatch, fresh_caches):
    assert _d2_ok(shape, seed)
    monkeypatch.setitem(conventions.BRACE_BASE, r, -conventions.BRACE_BASE[r])
    clear_caches()
    assert not _d2_ok(shape, seed)


def _homotopy_closes():
    f = Field(32003)
    rng = random.Random(7)
    D = dual_numbers(f)
    I = D.identity_functor
    s, t, u = (random_nat(n, I, I, rng) for n in "stu")
    _, res = association_homotopy(s, t, u)
    return res.is_zero(range(0, 3))


def test_triple_brace_sign_forced_by_association_homotopy(monkeypatch, fresh_caches):
    assert _homotopy_closes()
    monkeypatch.setitem(conventions.BRACE_BASE, 3, -conventions.BRACE_BASE[3])
    clear_caches()
    assert not _homotopy_closes()
