"""Sign conventions, kept in one place.

The degree-2 category differential must read

    d(mu)(a, b, c) = mu(a, b) c - a mu(b, c) + mu(ab, c) - mu(a, bc)

which is the negative of the textbook alternating sum
``F(f1) phi(...) + sum (-1)^i phi(.., f_i f_{i+1}, ..) + (-1)^{n+1} phi(...) G(f_{n+1})``.
``DIFFERENTIAL_SIGN`` records that global factor.

Brace signs were fixed by requiring every block matrix built from braces to
be a chain map, the association homotopy to close, and the linearized
deformation equations to agree with a direct epsilon expansion.  See
``tests/test_conventions.py`` for the checks that pin each constant.
"""

DIFFERENTIAL_SIGN = -1

# A family of parallels embeds into the deformation complex with these
# per-dimension signs: categories carry -mu, functors +F, 2-cells +sigma.
# With this choice every row of the assembled differential equals the
# linear part of the corresponding deformed axiom, with no extra factor.
EMBED_SIGN = {0: -1, 1: 1, 2: 1, 3: 1}

# brace(phi; s_1..s_r)(f_1..f_n) = sum over 0 <= p_1 <= .. <= p_r <= n of
#   BRACE_BASE[r] * (-1)^(sum p_k) * phi(.., s_1, .., s_r, ..)
# The base sign is (-1)^(r(r-1)/2).  r = 1 and r = 2 are forced by d^2 = 0 on
# the assembled complexes, r = 3 by the association homotopy.
BRACE_BASE = {1: 1, 2: -1, 3: -1}


def brace_sign(n: int, positions: tuple[int, ...]) -> int:
    r = len(positions)
    s = BRACE_BASE[r]
    if sum(positions) % 2:
        s = -s
    return s
