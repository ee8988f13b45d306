import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from deforma import shapes
from deforma.complex import assemble
from deforma.deform import ParallelFamily, extend, obstruction_parts, random_first_order, validate_order
from deforma.diagram import PastingDiagram
from deforma.library import dual_numbers, functor_from_images, make
from deforma.linalg import Field
from deforma.polygon.fixtures import FIXTURES, fixture_text, load_fixture, parse_sphere
from deforma.polygon.labeling import WhiskeredPolygon, check_labeling
from deforma.polygon.method import (CancellationFailure, FaceClassificationFailure, axiom_polygon,
                                    cross_validate, expression, is_trivial_polygon, strong_vanishing, sweep,
                                    verify_sphere)
from deforma.polygon.terms import (App, Signature, Var, VariableMismatch, WffSyntaxError, WffTypeError,
                                   instantiations, parse_declaration, parse_wff, wff_equivalent)
from deforma.hochschild import _space


def bare(field, C):
    D = PastingDiagram(field)
    D.add_category(C, "A")
    return D


def quantization(field, order=2):
    D = bare(field, dual_numbers(field, "A"))
    P = ParallelFamily(D, order)
    S = P.space("A")
    vec = [field.zero] * S.dim
    vec[S.block(("x", "x")).start] = field.one
    P.set("A", 1, vec)
    return D, P


def functor_pair(field):
    """Dual numbers to dual numbers with F = Id and G killing x."""
    A, B = dual_numbers(field, "A"), dual_numbers(field, "B")
    D = PastingDiagram(field)
    D.add_category(A, "A"), D.add_category(B, "B")
    D.add_functor(functor_from_images("F", A, B, {"*": "*"}, {"1": {"1": 1}, "x": {"x": 1}}), "F")
    D.add_functor(functor_from_images("G", A, B, {"*": "*"}, {"1": {"1": 1}, "x": {}}), "G")
    return D


def declare(D, lines):
    sig = Signature(D)
    variables = {}
    for line in lines:
        parse_declaration(line, sig, variables)
    return sig, variables


# -- terms ----------------------------------------------------------------------

def test_parse_examples(Q):
    D = functor_pair(Q)
    sig, v = declare(D, ["X Y Z : A", "a : X -> Y", "b : Y -> Z"])
    t = parse_wff("m(a, b)", sig, v)
    assert t == App("m.A", (v["a"], v["b"]))
    u = parse_wff("F(m(a,b))", sig, v)
    assert u == App("F", (t,))
    assert sig.is_arrow(u)
    with pytest.raises(WffTypeError):
        parse_wff("m(a, a)", sig, v)
    with pytest.raises(TypeError):
        parse_wff("m(a, a)", sig, v)
    with pytest.raises(WffSyntaxError):
        parse_wff("m(a, b", sig, v)
    with pytest.raises(SyntaxError):
        parse_wff("m(a,, b)", sig, v)


def test_object_terms_are_typed(Q):
    D = functor_pair(Q)
    sig, v = declare(D, ["X Y : A", "a : X -> Y"])
    assert parse_wff("s(a)", sig, v) == v["X"]
    assert parse_wff("id(X)", sig, v) == App("id.A", (v["X"],))
    assert not sig.is_arrow(parse_wff("F(X)", sig, v))


def test_equivalence_examples(Q):
    D = functor_pair(Q)
    D.add_category(make("trunc3", Q, "T"), "T")
    sig, v = declare(D, ["X Y Z W : A", "a : X -> Y", "b : Y -> Z", "c : Z -> W"])
    p = lambda s: parse_wff(s, sig, v)
    assert wff_equivalent(p("m(m(a, b), c)"), p("m(a, m(b, c))"), D)
    assert wff_equivalent(p("F(m(a, b))"), p("m(F(a), F(b))"), D)
    assert not wff_equivalent(p("F(a)"), p("G(a)"), D)
    with pytest.raises(VariableMismatch):
        wff_equivalent(p("F(a)"), p("F(b)"), D)


@given(st.integers(0, 10 ** 6))
def test_equivalence_is_an_equivalence_relation(seed):
    f = Field(3)
    D = functor_pair(f)
    sig, v = declare(D, ["X Y Z : A", "a : X -> Y", "b : Y -> Z"])
    pool = [parse_wff(s, sig, v) for s in
            ("F(m(a, b))", "m(F(a), F(b))", "G(m(a, b))", "m(G(a), G(b))")]
    rng = random.Random(seed)
    x, y, z = (rng.choice(pool) for _ in range(3))
    eq = lambda u, w: wff_equivalent(u, w, D)
    assert eq(x, x)
    assert eq(x, y) == eq(y, x)
    if eq(x, y) and eq(y, z):
        assert eq(x, z)


# -- labelings --------------------------------------------------------------------

@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_labelings_are_well_formed(name, Q):
    s = load_fixture(name, field=Q)
    rep = check_labeling(s)
    assert rep.ok, rep.issues
    assert rep.paths >= 2


def test_bare_variable_label_violates_wf0(Q):
    text = fixture_text("cube_assoc").replace("edge cd1    pab qsep  m.A(c, d)", "edge cd1    pab qsep  c")
    s = parse_sphere(text, field=Q)
    rep = check_labeling(s)
    assert not rep.ok
    assert rep.issues[0].rule == "WF0" and rep.issues[0].where == ("cd1",)


def test_unusable_label_is_reported(Q):
    text = fixture_text("cube_assoc").replace("edge cd1    pab qsep  m.A(c, d)", "edge cd1    pab qsep  m.A(b, c)")
    rep = check_labeling(parse_sphere(text, field=Q))
    assert not rep.ok
    assert {i.rule for i in rep.issues} <= {"WF1", "WF2", "WF3"}
    assert any("cd1" in i.where for i in rep.issues)


# -- expressions ---------------------------------------------------------------------

def test_cocycle_expression_of_associativity_square(Q):
    from deforma.library import trunc3
    C = trunc3(Q, "A")
    D = bare(Q, C)
    P = ParallelFamily.random_vector_family(D, 1, random.Random(5))
    w, _ = axiom_polygon(D, "A")
    e = expression(w, "cocycle", 1, P)
    assert len(e.terms) == 4
    S = P.space("A")
    mu = P.get("A", 1)
    basis = lambda lab: C.basis_arrow(lab).vec
    mul = lambda u, v: C.compose_vecs("*", "*", "*", u, v)

    def mu1(u, v):
        out = Q.zeros(3)
        for i, a in enumerate(u):
            for j, b in enumerate(v):
                if a and b:
                    out = out + a * b * Q.array(mu[S.block((C.arrows[i], C.arrows[j]))])
        return out

    for inst in instantiations(w.variables(), D):
        a, b, c = (basis(inst[n]) for n in "abc")
        want = mu1(mul(a, b), c) + mul(mu1(a, b), c) - mu1(a, mul(b, c)) - mul(a, mu1(b, c))
        assert np.array_equal(e.evaluate(inst), Q.reduce(want))


@pytest.mark.parametrize("shape", ["functor", "bigon", "triangular_pillow"])
def test_cocycle_equals_cobounding_at_order_one(shape, Q):
    D = shapes.sample(shape, Q, 1)
    P = ParallelFamily.random_vector_family(D, 1, random.Random(1))
    for cell in D.cells():
        w, _ = axiom_polygon(D, cell)
        a, b = expression(w, "cocycle", 1, P), expression(w, "cobounding", 1, P)
        assert a.terms == b.terms
        for inst in instantiations(w.variables(), D):
            assert np.array_equal(a.evaluate(inst), b.evaluate(inst))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_zero_family_gives_zero(m, Q):
    D = shapes.sample("post", Q, 3)
    P = ParallelFamily(D, m)
    for cell in D.cells():
        w, _ = axiom_polygon(D, cell)
        assert expression(w, "obstruction", m, P).is_zero()


def _inst_from_key(w, keyvars, key, D):
    variables = {v.name: v for v in w.variables()}
    inst = {}
    for name, label in zip(keyvars, key if isinstance(key, tuple) else (key,)):
        v = variables[name]
        if v.sort == "obj":
            inst[name] = label
            continue
        X, Y, _ = D.categories[v.cat].arrow_index[label]
        inst[v.src.name], inst[v.tgt.name], inst[name] = X, Y, label
    return inst


@pytest.mark.parametrize("shape", ["category", "functor", "bigon", "triangular_pillow", "post", "pre"])
def test_axiom_polygons_reproduce_the_obstruction(shape):
    f = Field(32003)
    D = shapes.ALL[shape](f, random.Random(2), pool=("dual", "split"))
    P = random_first_order(D, random.Random(2), order=2)
    parts = obstruction_parts(P, 2)
    for cell in D.cells():
        w, keyvars = axiom_polygon(D, cell)
        e = expression(w, "obstruction", 2, P)
        Fk, Gk = D.kind_of(cell)
        S = _space(Fk, Gk, 3 - D.dim_of(cell))
        for key in S.keys:
            inst = _inst_from_key(w, keyvars, key, D)
            assert [f(x) for x in e.evaluate(inst)] == parts[cell][S.block(key)]


# -- triviality and strong vanishing ---------------------------------------------------

def test_trivial_faces_of_functor_sphere(Q):
    s = load_fixture("fig1_functor", field=Q)
    ws = [w for _, faces in s.hemispheres for w in sweep(s, faces)]
    for w in ws:
        assert is_trivial_polygon(w, s.D) == (w.kind == "trivial")


def test_axiom_square_is_not_trivial(Q):
    D = bare(Q, dual_numbers(Q, "A"))
    w, _ = axiom_polygon(D, "A")
    assert not is_trivial_polygon(w, D)


def test_identical_paths_are_trivial(Q):
    D = bare(Q, dual_numbers(Q, "A"))
    sig, v = declare(D, ["X Y Z : A", "a : X -> Y", "b : Y -> Z"])
    t = parse_wff("m(a, b)", sig, v)
    w = WhiskeredPolygon({"e": t, "e'": t}, [], ["e"], ["e'"], [])
    assert is_trivial_polygon(w, D)


def test_strong_vanishing_of_trivial_faces():
    f = Field(32003)
    s = load_fixture("fig1_functor", field=f, seed=1)
    P = random_first_order(s.D, random.Random(1), order=2)
    for _, faces in s.hemispheres:
        for w in sweep(s, faces):
            if w.kind == "trivial":
                r = strong_vanishing(w, 2, P)
                assert r.vanishes and r.exhaustive


def test_strong_vanishing_of_cobounded_axiom(Q):
    D, P = quantization(Q)
    w, _ = axiom_polygon(D, "A")
    for m in (1, 2):
        r = strong_vanishing(w, m, P)
        assert r and r.exhaustive and r.witness is None


def test_strong_vanishing_fails_on_broken_parallel(Q):
    D, P = quantization(Q)
    S = P.space("A")
    vec = list(P.get("A", 1))
    vec[S.block(("x", "1")).start] = Q.one
    P.set("A", 1, vec)
    w, _ = axiom_polygon(D, "A")
    r = strong_vanishing(w, 1, P)
    assert not r and r.witness is not None
    assert set(r.witness["instantiation"]) >= {"a", "b", "c"}


@given(st.integers(0, 10 ** 6))
def test_strong_vanishing_implies_cobounding(seed):
    f = Field(3)
    s = load_fixture("cube_assoc", D=bare(f, dual_numbers(f, "A")))
    P = ParallelFamily.random_vector_family(s.D, 2, random.Random(seed), degrees=(1, 2))
    ws = [w for _, faces in s.hemispheres for w in sweep(s, faces)]
    w = ws[seed % len(ws)]
    if strong_vanishing(w, 2, P):
        assert expression(w, "cobounding", 2, P).is_zero()


# -- spheres ------------------------------------------------------------------------

def test_cube_with_dual_deformation(Q):
    D, P = quantization(Q)
    s = load_fixture("cube_assoc", D=D)
    rep = verify_sphere(s, P, 2)
    assert rep.ok and rep.valid_below and rep.instantiations == 16


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_spheres_verify(name):
    f = Field(32003)
    s = load_fixture(name, field=f, seed=3)
    P = random_first_order(s.D, random.Random(3), order=2)
    rep = verify_sphere(s, P, 2)
    assert rep.ok and rep.valid_below


def test_mislabeled_trivial_face(Q):
    text = fixture_text("cube_assoc").replace("face abc    axiom A", "face abc    trivial")
    s = parse_sphere(text, field=Q)
    with pytest.raises(FaceClassificationFailure):
        verify_sphere(s, ParallelFamily(s.D, 2), 2)


def test_invalid_family_fails_cancellation(Q):
    D = bare(Q, dual_numbers(Q, "A"))
    s = load_fixture("cube_assoc", D=D)
    rng = random.Random(0)
    P = ParallelFamily.random_vector_family(D, 2, rng)
    while validate_order(P, 1).valid:
        P = ParallelFamily.random_vector_family(D, 2, rng)
    with pytest.raises(CancellationFailure) as exc:
        verify_sphere(s, P, 2, assume_valid=True)
    assert "instantiation" in exc.value.witness


@pytest.mark.parametrize("name", ["cube_assoc", "fig1_functor"])
def test_cross_validation(name):
    f = Field(32003)
    s = load_fixture(name, field=f, seed=5)
    P = random_first_order(s.D, random.Random(5), order=2)
    counts = cross_validate(s, P, 2)
    assert s.summand in counts and all(n > 0 for n in counts.values())


def test_cross_validation_of_zero_family(Q):
    s = load_fixture("fig1_functor", field=Q)
    counts = cross_validate(s, ParallelFamily(s.D, 2), 2)
    assert counts and all(n > 0 for n in counts.values())
