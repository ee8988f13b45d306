"""The ten acceptance criteria, at zero tolerance with exact arithmetic.

Each criterion is one or more tests marked ``criterion(n, title)``; the
terminal summary prints one PASS/FAIL line per criterion.
"""

import io
import json
import random

import pytest

from deforma import shapes
from deforma.cli import run
from deforma.complex import (assemble, deformation_degree, dual_cylinder, lemma_inclusion, lemma_split,
                             pasting_map, quotient_cohomology_dims, reduced_complex, association_homotopy)
from deforma.deform import (Obstructed, ParallelFamily, extend, extend_to, flag_kernel, is_cocycle, obstruction,
                            random_first_order, validate_order)
from deforma.diagram import Leaf, PastingDiagram, Vert
from deforma.document import load, shipped
from deforma.finediv import build_phi, fine_divide, is_finely_divided, kernel_iso_check, phi_kernel
from deforma.library import functor_from_images, make
from deforma.linalg import Field, NoSolution, solve
from deforma.polygon.fixtures import FIXTURES, load_fixture
from deforma.polygon.labeling import check_labeling
from deforma.polygon.method import cross_validate, verify_sphere

from oracles import brute_force_f_trivial_dimension

FP = Field(32003)
criterion = pytest.mark.criterion


def _norm(name):
    return name.replace(".Id", "").replace("-1*", "-")


def _first_tree(D):
    return next(iter(D.cells3.values())).dom


# -- 1 ----------------------------------------------------------------------------

@criterion(1, "d^2 = 0 on 200 randomized diagrams of every shape")
def test_differential_soundness():
    names = sorted(shapes.ALL)
    for i in range(200):
        shape = names[i % len(names)]
        field = Field(None) if i % 10 == 0 else FP
        D = shapes.sample(shape, field, i)
        X = assemble(D, 4)
        assert X.check_d2(range(X.min_degree, 2)) == [], (shape, i)


# -- 2 ----------------------------------------------------------------------------

DISPLAYS = {
    "triangular_pillow": [["Id", "0", "0", "0", "0", "0", "0"],
                          ["0", "Id", "0", "0", "0", "0", "0"],
                          ["0", "0", "Id", "0", "0", "0", "0"],
                          ["0", "0", "0", "0", "Id", "0", "0"],
                          ["0", "{s,t}", "0", "0", "0", "t_*", "s^*"]],
    "pre": [["Id", "0", "0", "0", "0", "0", "0"],
            ["0", "0", "Id", "0", "0", "0", "0"],
            ["0", "0", "0", "G_*", "F^*", "0", "0"],
            ["0", "0", "0", "H_*", "0", "F^*", "0"],
            ["0", "0", "0", "0", "0", "0", "F^*"]],
    "post": [["Id", "0", "0", "0", "0", "0", "0"],
             ["0", "0", "Id", "0", "0", "0", "0"],
             ["0", "0", "0", "H_*", "0", "F^*", "0"],
             ["0", "0", "0", "0", "H_*", "G^*", "0"],
             ["0", "0", "0", "0", "0", "{s}", "H_*"]],
}


@criterion(2, "pasting chain maps: exact chain identity and displayed patterns")
@pytest.mark.parametrize("shape", sorted(DISPLAYS))
def test_pasting_chain_maps(shape):
    for i in range(100):
        D = shapes.ALL[shape](FP, random.Random(f"c2:{shape}:{i}"), pool=shapes.SMALL)
        _, phi = pasting_map(D, _first_tree(D))
        X, Y = phi.source, phi.target
        assert phi.is_chain_map(range(X.min_degree, 2)), (shape, i)
        pattern = [[_norm(phi.blocks[(r, c)].name) if (r, c) in phi.blocks else "0"
                    for c in range(len(X.labels))] for r in range(len(Y.labels))]
        assert pattern == DISPLAYS[shape], (shape, i)


# -- 3 ----------------------------------------------------------------------------

@criterion(3, "dual mapping cylinder vs reduced complex; acyclic cokernel")
def test_lemma():
    names = sorted(shapes.SINGLE_COMPOSITION)
    for i in range(50):
        shape = names[i % len(names)]
        D = shapes.ALL[shape](FP, random.Random(f"c3:{i}"), pool=("unit", "dual", "split"))
        _, phi = pasting_map(D, _first_tree(D))
        data = lemma_split(phi)
        red, cyl = reduced_complex(data), dual_cylinder(phi)
        inc = lemma_inclusion(data, red, cyl)
        degs = list(range(cyl.min_degree, 2))
        assert inc.is_chain_map(degs), (shape, i)
        assert cyl.cohomology_dims(degs) == red.cohomology_dims(degs), (shape, i)
        assert quotient_cohomology_dims(inc, degs) == [0] * len(degs), (shape, i)


# -- 4 ----------------------------------------------------------------------------

def _same_class(Y, u, v, n):
    diff = [a - b for a, b in zip(u, v)] if Y.field.p is None else [(a - b) % Y.field.p for a, b in zip(u, v)]
    if not any(diff):
        return True
    return solve(Y.d(n - 1), diff) is not NoSolution


@criterion(4, "association homotopy: zero residual and equal maps on cohomology")
def test_association_homotopy():
    for i in range(100):
        D = shapes.sample("triple", FP, i)
        s, t, u = (D.cells2[n].nat for n in "stu")
        _, res = association_homotopy(s, t, u)
        assert res.is_zero(range(0, 3)), i
        if i % 4:
            continue
        _, left = pasting_map(D, Vert(Vert(Leaf("s"), Leaf("t")), Leaf("u")))
        _, right = pasting_map(D, Vert(Leaf("s"), Vert(Leaf("t"), Leaf("u"))))
        X, Y = left.source, left.target
        assert [Y.d(n) == right.target.d(n) for n in range(Y.min_degree, 1)] == [True] * (1 - Y.min_degree)
        S = flag_kernel(X, [])
        for n in range(X.min_degree, 1):
            for z in S.cocycle_representatives(n):
                assert _same_class(Y, left.matrix(n).apply(z), right.matrix(n).apply(z), n), (i, n)


# -- 5 ----------------------------------------------------------------------------

C5_SHAPES = sorted(set(shapes.SINGLE_COMPOSITION) | set(shapes.COMPOSITION_FREE))


@criterion(5, "obstructions are cocycles; extensions validate at order 2")
@pytest.mark.parametrize("shape", C5_SHAPES)
def test_obstructions_are_cocycles(shape):
    rng = random.Random(f"c5:{shape}")
    D = shapes.ALL[shape](FP, rng, pool=("dual",))
    X = assemble(D)
    extended = 0
    for i in range(100):
        if i % 20 == 0 and i:
            D = shapes.ALL[shape](FP, rng, pool=("dual", "unit", "split"))
            X = assemble(D)
        P = random_first_order(D, rng, X, order=2)
        assert validate_order(P, 1).valid
        w = obstruction(P, 2, X)
        assert is_cocycle(w, X), (shape, i)
        out = extend(P, 2, X)
        if not isinstance(out, Obstructed):
            extended += 1
            assert validate_order(out, 2).valid, (shape, i)
    assert extended > 0


# -- 6 ----------------------------------------------------------------------------

@criterion(6, "dual-numbers regression")
def test_dual_numbers():
    doc = load(shipped("dual_numbers"))
    P = doc.family(4)
    D = doc.diagram
    S = P.space("D")
    vec = P.get("D", 1)
    assert vec[S.block(("x", "x")).start] == 1 and sum(1 for v in vec if v) == 1
    assert validate_order(P, 1).valid
    X = assemble(D)
    assert not any(obstruction(P, 2, X))
    out = extend_to(P, 4, X)
    assert isinstance(out, ParallelFamily)
    assert sorted(out.parallels) == [("D", 1)]
    assert validate_order(out, 4).valid


# -- 7 ----------------------------------------------------------------------------

@criterion(7, "polygonal engine: labelings, sphere verification, cross-validation")
@pytest.mark.parametrize("name", FIXTURES)
def test_polygon_spheres(name):
    for seed in range(3):
        s = load_fixture(name, field=FP, seed=seed)
        assert check_labeling(s).ok
        P = random_first_order(s.D, random.Random(f"c7:{name}:{seed}"), order=2)
        rep = verify_sphere(s, P, 2)
        assert rep.ok and rep.valid_below, (name, seed)
        if name in ("cube_assoc", "fig1_functor"):
            counts = cross_validate(s, P, 2)
            assert counts and all(n > 0 for n in counts.values())


# -- 8 ----------------------------------------------------------------------------

F2_CASES = [
    ("dual", "dual", {"1": {"1": 1}, "x": {"x": 1}}),
    ("dual", "dual", {"1": {"1": 1}, "x": {}}),
    ("dual", "split", {"1": {"1": 1}, "x": {}}),
    ("split", "dual", {"1": {"1": 1}, "e": {}}),
    ("split", "dual", {"1": {"1": 1}, "e": {"1": 1}}),
    ("split", "split", {"1": {"1": 1}, "e": {"e": 1}}),
    ("unit", "dual", {"1": {"1": 1}}),
]


@criterion(8, "functor-trivial deformations over F_2 match the brute-force count")
@pytest.mark.parametrize("a,b,images", F2_CASES)
def test_partial_triviality(a, b, images):
    f = Field(2)
    A, B = make(a, f, "A"), make(b, f, "B")
    F = functor_from_images("F", A, B, {"*": "*"}, images)
    D = PastingDiagram(f)
    D.add_category(A, "A"), D.add_category(B, "B"), D.add_functor(F, "F")
    X = assemble(D)
    n = deformation_degree(X)
    assert flag_kernel(X, ["F"]).cohomology_dims([n]) == [brute_force_f_trivial_dimension(F)]


# -- 9 ----------------------------------------------------------------------------

def _c9_diagrams():
    names = sorted(shapes.WITH_THREE_CELL)
    for i in range(50):
        shape = names[i % len(names)]
        yield shape, i, shapes.ALL[shape](FP, random.Random(f"c9:{i}"), pool=("unit", "dual"))


@criterion(9, "fine division: predicate, chain map, exact round trips, association invariance")
def test_fine_division_structure():
    for shape, i, D in _c9_diagrams():
        fd = fine_divide(D)
        assert is_finely_divided(fd.diagram), (shape, i)
        phi = build_phi(fd)
        assert phi.is_chain_map(range(phi.source.min_degree, 2)), (shape, i)
        dims = []
        for assoc in ("left", "right"):
            fa = fine_divide(D, assoc)
            X = assemble(fa.diagram)
            dims.append(phi_kernel(fa).cohomology_dims(range(X.min_degree, 1)))
        assert dims[0] == dims[1], (shape, i)


@criterion(9, "fine division: predicate, chain map, exact round trips, association invariance")
def test_fine_division_round_trips():
    failures = []
    for shape, i, D in _c9_diagrams():
        rep = kernel_iso_check(D)
        assert rep.psi_iota_identity and rep.quasi_isomorphism, (shape, i)
        if not rep.iota_psi_identity:
            failures.append(shape)
    assert not failures, f"iota psi is not the identity on {sorted(set(failures))}"


# -- 10 ---------------------------------------------------------------------------

RUNS = [
    ["validate", "shipped:dual_numbers"],
    ["complex", "shipped:triangular_pillow"],
    ["cohomology", "--degrees=-2..0", "shipped:bigon"],
    ["deform", "--order", "3", "shipped:triangular_pillow"],
    ["polygon", "verify", "--fixture", "fig2_naturality"],
    ["polygon", "cross-validate", "--fixture", "cube_assoc", "--seed", "4"],
    ["finedivide", "--check-iso", "shipped:square_pillow"],
    ["lemma-cylinder", "shipped:post"],
]


@criterion(10, "byte-identical JSON reports on rerun")
@pytest.mark.parametrize("argv", RUNS, ids=lambda a: a[0] + ("-" + a[1] if a[0] == "polygon" else ""))
def test_determinism(argv, tmp_path):
    blobs = []
    for k in range(2):
        p = tmp_path / f"r{k}.json"
        run(argv + ["--json", str(p)], io.StringIO())
        blobs.append(p.read_bytes())
        json.loads(blobs[-1])
    assert blobs[0] == blobs[1]
