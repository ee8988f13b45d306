"""Independent brute-force oracles shared by the unit and acceptance suites.

Everything here works over F_2 with plain integer tuples and never touches
the complex assembly, so agreement with the matrix pipeline is meaningful.
Over F_2 every sign is +1, which makes these oracles convention-free.
"""

import itertools


def _table(C):
    """Structure constants of a one-object category as ``t[i][j] -> tuple``."""
    t = C.mult("*", "*", "*")
    n = t.shape[0]
    return n, [[tuple(int(c) % 2 for c in t[i, j]) for j in range(n)] for i in range(n)]


def _add(u, v):
    return tuple((a + b) % 2 for a, b in zip(u, v))


def _lin(vec, images, n):
    """Apply the linear map with basis images ``images`` to ``vec``."""
    out = (0,) * n
    for c, img in zip(vec, images):
        if c:
            out = _add(out, img)
    return out


def _mul(table, n, u, v):
    out = (0,) * n
    for i, a in enumerate(u):
        if a:
            for j, b in enumerate(v):
                if b:
                    out = _add(out, table[i][j])
    return out


def _unit(n, i):
    return tuple(1 if k == i else 0 for k in range(n))


def _bilinear_maps(n):
    """All bilinear maps ``A x A -> A`` as dicts ``(i, j) -> tuple``."""
    pairs = [(i, j) for i in range(n) for j in range(n)]
    for values in itertools.product(itertools.product((0, 1), repeat=n), repeat=len(pairs)):
        yield dict(zip(pairs, values))


def _apply_bilinear(mu, n, u, v):
    out = (0,) * n
    for i, a in enumerate(u):
        if a:
            for j, b in enumerate(v):
                if b:
                    out = _add(out, mu[(i, j)])
    return out


def _first_order_associative(table, n, mu):
    """The eps^1 coefficient of (ab)c - a(bc) vanishes on basis triples."""
    for i, j, k in itertools.product(range(n), repeat=3):
        a, b, c = _unit(n, i), _unit(n, j), _unit(n, k)
        ab, bc = _mul(table, n, a, b), _mul(table, n, b, c)
        left = _add(_apply_bilinear(mu, n, ab, c), _mul(table, n, mu[(i, j)], c))
        right = _add(_apply_bilinear(mu, n, a, bc), _mul(table, n, a, mu[(j, k)]))
        if left != right:
            return False
    return True


def _functor_images(F):
    M = F.matrix("*", "*")
    return [tuple(int(M[r, c]) % 2 for r in range(M.shape[0])) for c in range(M.shape[1])]


def brute_force_f_trivial_dimension(F) -> int:
    """log2 of #(order-1 deformations of (A, B, F) with F^(1) = 0) / #(trivial ones).

    ``F`` is a functor between one-object categories over F_2.  A family is
    ``(mu_A, mu_B)`` with both first-order associative and
    ``F(mu_A(a, b)) = mu_B(Fa, Fb)``.  Trivial families are the first-order
    gauge images of ``(g_A, g_B, h)`` (infinitesimal automorphisms of A and B
    and of F) that leave ``F^(1)`` at zero.
    """
    A, B = F.source, F.target
    na, ta = _table(A)
    nb, tb = _table(B)
    Fimg = _functor_images(F)
    cocycles_a = [mu for mu in _bilinear_maps(na) if _first_order_associative(ta, na, mu)]
    cocycles_b = [mu for mu in _bilinear_maps(nb) if _first_order_associative(tb, nb, mu)]
    valid = 0
    for ma in cocycles_a:
        pushed = {key: _lin(v, Fimg, nb) for key, v in ma.items()}
        for mb in cocycles_b:
            if all(pushed[(i, j)] == _apply_bilinear(mb, nb, Fimg[i], Fimg[j])
                   for i in range(na) for j in range(na)):
                valid += 1

    def delta(table, n, g):
        return tuple(_add(_add(_mul(table, n, g[i], _unit(n, j)), _mul(table, n, _unit(n, i), g[j])),
                          _lin(table[i][j], g, n))
                     for i in range(n) for j in range(n))

    trivial = set()
    maps_a = list(itertools.product(itertools.product((0, 1), repeat=na), repeat=na))
    maps_b = list(itertools.product(itertools.product((0, 1), repeat=nb), repeat=nb))
    for ga in maps_a:
        da = delta(ta, na, ga)
        Fga = [_lin(ga[i], Fimg, nb) for i in range(na)]
        for gb in maps_b:
            gbF = [_lin(Fimg[i], gb, nb) for i in range(na)]
            for h in itertools.product((0, 1), repeat=nb):
                change = [_add(_add(Fga[i], gbF[i]),
                               _add(_mul(tb, nb, h, Fimg[i]), _mul(tb, nb, Fimg[i], h))) for i in range(na)]
                if any(any(c) for c in change):
                    continue
                trivial.add((da, delta(tb, nb, gb)))
    ratio = valid // len(trivial)
    assert ratio * len(trivial) == valid and ratio & (ratio - 1) == 0
    return ratio.bit_length() - 1

