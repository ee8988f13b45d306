import itertools
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from deforma.conventions import BRACE_BASE, DIFFERENTIAL_SIGN
from deforma.fincat import NatTrans
from deforma.hochschild import (Cochain, brace, differential, nat_post, nat_pre, pullback, pushforward,
                                space_basis)
from deforma.library import dual_numbers, functor_from_images, make, path2, unit
from deforma.linalg import Field


def direct_differential(phi: Cochain) -> dict:
    """The category differential evaluated from its defining sum on every basis tuple.

    d phi (f_1..f_{n+1}) = sign * (f_1 phi(f_2..) + sum_i (-1)^i phi(.., f_i f_{i+1}, ..)
                                   + (-1)^{n+1} phi(.., f_n) f_{n+1})
    Composites are expanded multilinearly over basis arrows.
    """
    S = phi.space
    C = S.source
    f = S.field
    n = S.n
    out = {}
    target = space_basis(C, n + 1)
    vals = phi.values()

    def phi_at(args, X):
        """phi on a tuple of vectors (arrows as (src, tgt, vec)) starting at ``X``, expanded over basis tuples."""
        if not args:
            return vals[X]
        total = None
        for choice in itertools.product(*[[(lab, c) for lab, c in zip(C.hom_basis[(s, t)], v) if c]
                                          for (s, t, v) in args]):
            coeff = f.one
            for _, c in choice:
                coeff = f.mul(coeff, c)
            key = tuple(lab for lab, _ in choice)
            term = f.reduce(vals[key] * coeff)
            total = term if total is None else f.reduce(total + term)
        if total is None:
            return f.zeros(C.dim(X, args[-1][1]))
        return total

    for key, (X0, Xn) in zip(target.keys, target.ends):
        arrows = [C.basis_arrow(a) for a in key]
        acc = f.zeros(C.dim(X0, Xn))
        # f_1 phi(f_2..)
        rest = [(a.src, a.tgt, a.vec) for a in arrows[1:]]
        acc = f.reduce(acc + C.compose_vecs(X0, arrows[0].tgt, Xn, arrows[0].vec, phi_at(rest, arrows[0].tgt)))
        for i in range(n):
            a, b = arrows[i], arrows[i + 1]
            ab = C.compose_vecs(a.src, a.tgt, b.tgt, a.vec, b.vec)
            args = [(x.src, x.tgt, x.vec) for x in arrows[:i]] + [(a.src, b.tgt, ab)] \
                + [(x.src, x.tgt, x.vec) for x in arrows[i + 2:]]
            acc = f.reduce(acc + (-1) ** (i + 1) * phi_at(args, X0))
        head = [(a.src, a.tgt, a.vec) for a in arrows[:-1]]
        last = arrows[-1]
        acc = f.reduce(acc + (-1) ** (n + 1) * C.compose_vecs(X0, last.src, Xn, phi_at(head, X0), last.vec))
        out[key] = f.reduce(DIFFERENTIAL_SIGN * acc)
    return out


# -- spaces -----------------------------------------------------------------

def test_space_dimensions(Q):
    assert space_basis(unit(Q), 2).dim == 1
    assert space_basis(dual_numbers(Q), 1).dim == 4
    P = path2(Q)
    rng = random.Random(0)
    from deforma.library import random_functor
    F = random_functor("F", P, P, rng)
    G = random_functor("G", P, P, rng)
    S = space_basis((F, G), 0)
    assert S.dim == sum(P.dim(F.obj(X), G.obj(X)) for X in P.objects)


# -- differential -----------------------------------------------------------

def test_differential_of_zero(Q):
    S = space_basis(dual_numbers(Q), 2)
    assert differential(Cochain(S)).is_zero()


def test_differential_on_unit(Q):
    U = unit(Q)
    one = Cochain(space_basis(U, 1), [1])
    d1 = differential(one)
    assert d1.vec in ([1], [-1])
    two = Cochain(space_basis(U, 2), [1])
    assert differential(two).is_zero()


@pytest.mark.parametrize("tag", ["dual", "path2", "split"])
@pytest.mark.parametrize("n", [0, 1, 2])
def test_differential_matches_direct_sum(tag, n):
    f = Field(32003)
    C = make(tag, f)
    rng = random.Random(n)
    phi = Cochain.random(space_basis(C, n), rng)
    got = differential(phi)
    want = direct_differential(phi)
    for key in got.space.keys:
        assert list(got.value(key)) == list(want[key]), key


@given(st.integers(0, 2), st.integers(0, 10 ** 6))
def test_d_squared_on_dual(n, seed):
    Q = Field(None)
    phi = Cochain.random(space_basis(dual_numbers(Q), n), random.Random(seed))
    assert differential(differential(phi)).is_zero()


# -- pushforward and pullback ------------------------------------------------

def _kill_x(D):
    return functor_from_images("K", D, D, {"*": "*"}, {"1": {"1": 1}, "x": {}})


def test_pushforward_identity_and_kill(Q):
    D = dual_numbers(Q)
    rng = random.Random(1)
    phi = Cochain.random(space_basis(D, 2), rng)
    assert pushforward(D.identity_functor, phi).vec == phi.vec
    # phi valued in span(x): zero coefficient on 1 everywhere
    S = space_basis(D, 2)
    vals = {k: [0, phi.value(k)[1]] for k in S.keys}
    psi = Cochain.from_values(S, vals)
    out = pushforward(_kill_x(D), psi)
    assert out.is_zero()
    assert out.space.n == 2 and len(out.space.keys) == len(S.keys)


def test_pullback_identity_and_degree_zero(Q):
    D = dual_numbers(Q)
    phi = Cochain.random(space_basis(D, 1), random.Random(2))
    assert pullback(D.identity_functor, phi).vec == phi.vec
    P = path2(Q)
    swap_free = functor_from_images("C", P, P, {"0": "1", "1": "1"},
                                    {"e0": {"e1": 1}, "e1": {"e1": 1}, "a": {}})
    psi = Cochain.random(space_basis(P, 0), random.Random(3))
    out = pullback(swap_free, psi)
    for X in P.objects:
        assert list(out.value(X)) == list(psi.value(swap_free.obj(X)))


@pytest.mark.parametrize("seed", range(5))
def test_pullback_is_evaluation_at_images(seed):
    f = Field(101)
    rng = random.Random(seed)
    D = make("trunc3", f)
    # x -> c x + e x2 is a functor of k[x]/x^3 for any c, e
    c, e = f.random(rng), f.random(rng)
    F = functor_from_images("F", D, D, {"*": "*"},
                            {"1": {"1": 1}, "x": {"x": c, "x2": e}, "x2": {"x2": f.mul(c, c)}})
    phi = Cochain.random(space_basis(D, 2), rng)
    out = pullback(F, phi)
    for key in out.space.keys:
        images = [F.apply_vec("*", "*", D.basis_arrow(a).vec) for a in key]
        want = f.zeros(3)
        for i, ci in enumerate(images[0]):
            for j, cj in enumerate(images[1]):
                if ci and cj:
                    k = (D.arrows[i], D.arrows[j])
                    want = f.reduce(want + phi.value(k) * f.mul(ci, cj))
        assert list(out.value(key)) == list(want)


# -- natural transformations --------------------------------------------------

def _nat(D, name, coeffs):
    I = D.identity_functor
    return NatTrans(name, I, I, {"*": coeffs})


def test_nat_pre_and_post_identity(Q):
    D = dual_numbers(Q)
    phi = Cochain.random(space_basis(D, 1), random.Random(4))
    one = _nat(D, "1", {"1": 1})
    assert nat_pre(one, phi).vec == phi.vec
    assert nat_post(one, phi).vec == phi.vec
    assert nat_pre(_nat(D, "s", {"x": 1}), Cochain(phi.space)).is_zero()
    assert nat_post(_nat(D, "s", {"x": 1}), Cochain(phi.space)).is_zero()


@given(st.integers(0, 10 ** 6))
def test_nat_pre_bilinear(seed):
    f = Field(32003)
    rng = random.Random(seed)
    D = dual_numbers(f)
    a, b = [f.random(rng) for _ in range(2)], [f.random(rng) for _ in range(2)]
    s1, s2 = _nat(D, "s1", dict(zip("1x", a))), _nat(D, "s2", dict(zip("1x", b)))
    s12 = _nat(D, "s12", {k: f.add(u, v) for k, u, v in zip("1x", a, b)})
    phi = Cochain.random(space_basis(D, 1), rng)
    psi = Cochain.random(space_basis(D, 1), rng)
    assert nat_pre(s12, phi).vec == (nat_pre(s1, phi) + nat_pre(s2, phi)).vec
    assert nat_pre(s1, phi + psi).vec == (nat_pre(s1, phi) + nat_pre(s1, psi)).vec


def test_nat_post_degree_zero_on_unit(Q):
    U = unit(Q)
    I = U.identity_functor
    s = NatTrans("s", I, I, {"*": {"1": 3}})
    phi = Cochain(space_basis(U, 0), [5])
    assert nat_post(s, phi).vec == [15]


# -- braces --------------------------------------------------------------------

def test_brace_single_insertion(Q):
    D = dual_numbers(Q)
    s = _nat(D, "s", {"x": 1})
    phi = Cochain.random(space_basis(D, 1), random.Random(5))
    out = brace(phi, s)
    assert out.space.n == 0
    assert list(out.value("*")) == list(phi.value(("x",)))
    assert brace(Cochain(phi.space), s).is_zero()


def test_brace_double_insertion_on_unit(Q):
    U = unit(Q)
    I = U.identity_functor
    s = NatTrans("s", I, I, {"*": {"1": 2}})
    t = NatTrans("t", I, I, {"*": {"1": 7}})
    out = brace(Cochain(space_basis(U, 2), [1]), s, t)
    # one insertion pattern, positions (0, 0): the base sign of a double brace times s t
    assert out.vec == [BRACE_BASE[2] * 14]
