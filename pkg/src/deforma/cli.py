"""Command-line front end.

Usage::

    deforma <command> [--field q|fp:P] [--max-degree N] [--seed S] [--json out.json] file

Commands: ``validate``, ``complex``, ``cohomology``, ``deform``, ``polygon``,
``finedivide`` and ``lemma-cylinder``.  Each prints one line per result and
can write a JSON report ``{command, diagram, results, violations}``.  Every
result carries the text of its human-readable line, so each number printed
also appears in the JSON report.  Exit status: 0 on success, 1 on a
mathematical failure (a violation, an obstruction or a failed identity),
2 on an input error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

import numpy as np

from . import shapes
from .complex import (NotAChainMap, assemble, deformation_degree, dual_cylinder, kind_name,
                      lemma_inclusion, lemma_split, pasting_map, quotient_cohomology_dims,
                      reduced_complex)
from .deform import (Obstructed, ParallelFamily, extend, is_cocycle, obstruction, random_first_order,
                     validate_order)
from .diagram import Leaf, PastingDiagram
from .document import DocumentError, family_to_entries, load, shipped
from .finediv import (fine_divide, finely_divided_violations, kernel_iso_check, phi_kernel)
from .hochschild import _space
from .linalg import Field, FieldMismatch

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    """Raised for command-line input that cannot be processed."""


def _plain(x):
    """Convert report data into JSON-ready values, deterministically."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_plain(v) for v in x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    return x


class Report:
    def __init__(self, command: str, diagram: str, out=None):
        self.command = command
        self.diagram = diagram
        self.results: list = []
        self.violations: list = []
        self.out = out or sys.stdout

    def result(self, item: str, text: str, **data):
        self.results.append(_plain({"item": item, "text": text, **data}))
        print(text, file=self.out)

    def violation(self, rule: str, where, message: str, witness=None):
        entry = {"rule": rule, "where": list(where) if isinstance(where, (list, tuple)) else [where],
                 "message": message}
        if witness is not None:
            entry["witness"] = witness
        self.violations.append(_plain(entry))
        loc = "/".join(str(w) for w in entry["where"])
        extra = f" witness={json.dumps(entry['witness'], sort_keys=True)}" if witness is not None else ""
        print(f"VIOLATION {rule} at {loc}: {message}{extra}", file=self.out)

    def to_json(self) -> dict:
        return {"command": self.command, "diagram": self.diagram, "results": self.results,
                "violations": self.violations}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    @property
    def status(self) -> int:
        return EXIT_FAIL if self.violations else EXIT_OK


# ---------------------------------------------------------------------------
# helpers


def _degrees(text: str) -> list[int]:
    try:
        a, _, b = text.partition("..")
        lo, hi = int(a), int(b or a)
    except ValueError:
        raise InputError(f"degrees must look like a..b, got {text!r}") from None
    if hi < lo:
        raise InputError(f"empty degree range {text!r}")
    return list(range(lo, hi + 1))


def _locate(X, n: int, idx: int) -> dict:
    """Summand, cochain key and basis arrow of coordinate ``idx`` in degree ``n`` of ``X``."""
    o = 0
    for s in X.summands:
        dim = s.dim(n)
        if idx < o + dim:
            S = _space(s.kind[0], s.kind[1], n + s.shift)
            local = idx - o
            for key, (X0, Xn) in zip(S.keys, S.ends):
                sl = S.block(key)
                if sl.start <= local < sl.stop:
                    labels = S.target.hom_basis[(S.F.obj(X0), S.G.obj(Xn))]
                    return {"summand": s.label, "key": key, "arrow": labels[local - sl.start]}
        o += dim
    raise IndexError(idx)


def _support(X, n: int, vec) -> list[dict]:
    f = X.field
    return [dict(_locate(X, n, i), value=f.format(v)) for i, v in enumerate(vec) if v]


def _fmt_list(xs) -> str:
    return "[" + ", ".join(str(x) for x in xs) + "]"


# ---------------------------------------------------------------------------
# commands


def cmd_validate(doc, args, rep: Report):
    D = doc.diagram
    rep.result("cells", f"cells: {len(D.categories)} categories, {len(D.functors)} functors, "
                        f"{len(D.cells2)} 2-cells, {len(D.cells3)} 3-cells",
               categories=len(D.categories), functors=len(D.functors), cells2=len(D.cells2),
               cells3=len(D.cells3))
    for name, C in D.categories.items():
        rep.result("category", f"category {name}: {len(C.objects)} objects, total hom dimension {C.total_dim()}",
                   name=name, objects=len(C.objects), total_dim=C.total_dim())
    viol = D.validate()
    for v in viol:
        rep.violation(v.kind, v.where, v.detail)
    rep.result("valid", f"valid: {not viol}", valid=not viol)


def cmd_complex(doc, args, rep: Report):
    D = doc.diagram
    X = assemble(D, args.max_degree)
    top = deformation_degree(X)
    degs = list(range(X.min_degree, top + 2))
    rep.result("degrees", f"deformation degree {top}; degrees {_fmt_list(degs)}",
               deformation_degree=top, degrees=degs)
    for s in X.summands:
        dims = [s.dim(n) for n in degs]
        rep.result("summand", f"summand {s.label}: {kind_name(s.kind)} shift {s.shift} dims {_fmt_list(dims)}",
                   label=s.label, kind=kind_name(s.kind), shift=s.shift, dims=dims)
    for label, row in zip(X.labels, X.pattern()):
        cells = [c or "0" for c in row]
        rep.result("pattern", f"row {label}: " + " | ".join(cells), row=label, blocks=cells)
    bad = X.check_d2(degs[:-1])
    for n, r, c in bad:
        rep.violation("d2", (n, r, c), f"block ({r}, {c}) of d^2 is nonzero in degree {n}")
    rep.result("d2", f"d^2 = 0 in degrees {_fmt_list(degs[:-1])}: {not bad}", degrees=degs[:-1], ok=not bad)


def cmd_cohomology(doc, args, rep: Report):
    X = assemble(doc.diagram, args.max_degree)
    degs = _degrees(args.degrees) if args.degrees else list(range(X.min_degree, deformation_degree(X) + 2))
    if max(degs) > args.max_degree:
        raise InputError(f"degree {max(degs)} exceeds --max-degree {args.max_degree}")
    dims = X.cohomology_dims(degs)
    for n, h in zip(degs, dims):
        rep.result("H", f"H^{n} = {h}", degree=n, dim=h)


def _trivial_flags(D: PastingDiagram, text: str | None):
    if not text:
        return
    names = [t for t in text.split(",") if t]
    for t in names:
        if t not in D.cells():
            raise InputError(f"--trivial names unknown cell {t}")
    D.trivial = set(names)


def cmd_deform(doc, args, rep: Report):
    D = doc.diagram
    _trivial_flags(D, args.trivial)
    N = args.order or doc.order
    X = assemble(D, args.max_degree)
    deg = deformation_degree(X)
    P = doc.family(N)
    if P is None:
        P = random_first_order(D, random.Random(args.seed), X, order=N)
        source = f"random first-order deformation (seed {args.seed})"
    else:
        P = P.copy(order=N)
        P.trivial = set(D.trivial)
        source = "declared deformation"
    rep.result("family", f"start: {source}", source=source)
    first = validate_order(P.truncated(2), 1)
    for v in first.violations:
        rep.violation(v.kind, v.where, v.detail)
    rep.result("order", f"order 1: valid {first.valid}", order=1, valid=first.valid)
    if not first.valid:
        return
    for n in range(2, N + 1):
        omega = obstruction(P, n, X)
        cocycle = is_cocycle(omega, X)
        nonzero = sum(1 for v in omega if v)
        if not cocycle:
            rep.violation("obstruction-cocycle", (n,), "the obstruction is not a cocycle",
                          _support(X, deg + 1, omega)[:5])
        given = any(k == n for (_, k) in P.parallels)
        if given:
            nxt = P
        else:
            nxt = extend(P, n, X)
        if isinstance(nxt, Obstructed):
            rep.result("order", f"order {n}: obstruction has {nonzero} nonzero coordinates, cocycle {cocycle}, "
                                f"obstructed", order=n, obstruction_nonzero=nonzero, cocycle=cocycle,
                       extended=False)
            rep.violation("obstructed", (n,), "the obstruction is not a coboundary",
                          _support(X, deg + 1, omega)[:5])
            return
        P = nxt
        check = validate_order(P, n)
        for v in check.violations:
            rep.violation(v.kind, v.where, v.detail)
        cells = sorted({c for (c, k) in P.parallels if k == n})
        rep.result("order", f"order {n}: obstruction has {nonzero} nonzero coordinates, cocycle {cocycle}, "
                            f"{'kept declared' if given else 'extended'} parallels, nonzero at {_fmt_list(cells)}, "
                            f"valid {check.valid}",
                   order=n, obstruction_nonzero=nonzero, cocycle=cocycle, extended=True,
                   nonzero_cells=cells, valid=check.valid)
        if not check.valid:
            return
    rep.result("parallels", f"parallels: {len(P.parallels)} nonzero (cell, degree) pairs",
               count=len(P.parallels), entries=family_to_entries(P))


def _polygon_family(D, args, m: int, doc):
    """A family valid below ``m`` (``valid``), the zero family, or arbitrary parallels (``broken``)."""
    rng = random.Random(args.seed)
    if args.deformation == "zero":
        return ParallelFamily(D, m), "zero family"
    if args.deformation == "broken":
        return (ParallelFamily.random_vector_family(D, m, rng, range(1, m)),
                f"arbitrary parallels in degrees below {m} (seed {args.seed})")
    P = doc.family(m) if doc is not None else None
    label = "declared deformation"
    if P is None:
        P = random_first_order(D, rng, order=m)
        label = f"random first-order deformation (seed {args.seed})"
    X = assemble(D)
    for n in range(2, m):
        nxt = extend(P, n, X)
        if isinstance(nxt, Obstructed):
            raise _Obstructed(n)
        P = nxt
    return P, label


class _Obstructed(Exception):
    def __init__(self, n):
        self.order = n


def cmd_polygon(doc, args, rep: Report):
    from .polygon.fixtures import FixtureError, load_fixture
    from .polygon.labeling import check_labeling
    from .polygon.method import (CancellationFailure, FaceClassificationFailure, Mismatch,
                                 classify_faces, cross_validate, verify_sphere)
    field = args.field_obj or Field()
    D = doc.diagram if doc is not None else None
    try:
        s = load_fixture(args.fixture, D, field, args.seed)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    except FixtureError as exc:
        raise InputError(str(exc)) from None
    D = s.D
    rep.diagram = rep.diagram or f"{s.shape} sample (seed {args.seed})"
    rep.result("fixture", f"fixture {s.name}: shape {s.shape}, summand {s.summand}, {len(s.edges)} edges, "
                          f"{len(s.faces)} faces", fixture=s.name, shape=s.shape, summand=s.summand,
               edges=len(s.edges), faces=len(s.faces))
    lab_rep = check_labeling(s)
    for issue in lab_rep.issues:
        rep.violation(issue.rule, issue.where, issue.message)
    rep.result("labeling", f"labeling: {lab_rep.paths} maximal paths, ok {lab_rep.ok}",
               paths=lab_rep.paths, ok=lab_rep.ok)
    if not lab_rep.ok:
        return
    try:
        hemis = classify_faces(s)
    except FaceClassificationFailure as exc:
        rep.violation("face-classification", (s.name,), str(exc))
        return
    for h, ws in hemis.items():
        for w in ws:
            rep.result("face", f"hemisphere {h}: face {w.name} {w.kind}"
                               f"{' ' + w.axiom if w.axiom else ''} sign {w.sign:+d}",
                       hemisphere=h, face=w.name, kind=w.kind, axiom=w.axiom, sign=w.sign)
    if args.action == "check":
        return
    m = args.order
    if m < 1:
        raise InputError("--order must be at least 1")
    try:
        P, label = _polygon_family(D, args, m, doc)
    except _Obstructed as exc:
        rep.violation("obstructed", (exc.order,), "the sampled deformation does not extend below the order")
        return
    rep.result("family", f"family: {label}", family=label)
    valid = m <= 1 or validate_order(P.truncated(m), m - 1).valid
    if not valid:
        v = validate_order(P.truncated(m), m - 1).violations[0]
        rep.violation("family-invalid", v.where, f"the family is not a deformation below order {m}: {v.detail}")
    try:
        if args.action == "verify":
            # a family offered as a deformation is checked as one
            r = verify_sphere(s, P, m, assume_valid=True)
            rep.result("verify", f"order {m}: {r.instantiations} instantiations, checks "
                                 + ", ".join(f"{k} {v}" for k, v in r.checks.items()),
                       order=m, instantiations=r.instantiations, checks=r.checks)
        else:
            counts = cross_validate(s, P, m)
            for col, n in counts.items():
                rep.result("block", f"block {s.summand} <- {col}: {n} keys agree", row=s.summand, col=col, keys=n)
    except (CancellationFailure, Mismatch) as exc:
        rep.violation(type(exc).__name__, (s.name,), str(exc), exc.witness)


def cmd_finedivide(doc, args, rep: Report):
    D = doc.diagram
    fd = fine_divide(D, doc.association)
    summ = fd.summary()
    rep.result("finedivide", f"association {summ['association']}: {summ['edges']} composite edges, "
                             f"{summ['triangles']} triangles, {summ['bigons']} bigons, {summ['pillows']} pillows, "
                             f"{len(summ['inserted'])} inserted cells", **summ)
    bad = finely_divided_violations(fd.diagram)
    for v in bad:
        rep.violation(v.kind, v.where, v.detail)
    rep.result("finely_divided", f"finely divided: {not bad}", ok=not bad)
    if not args.check_iso or bad:
        return
    r = kernel_iso_check(D, fd)
    rep.result("iso", f"degrees {_fmt_list(r.degrees)}: Phi chain {r.phi_chain}, iota chain {r.iota_chain}, "
                      f"iota lands {r.iota_lands}, psi chain {r.psi_chain}, psi iota = id {r.psi_iota_identity}, "
                      f"iota psi = id {r.iota_psi_identity}", **r.to_json())
    rep.result("cohomology", f"H(source) {_fmt_list(r.source_cohomology)}, H(ker Phi) {_fmt_list(r.kernel_cohomology)}",
               source=r.source_cohomology, kernel=r.kernel_cohomology)
    if not r.quasi_isomorphism:
        rep.violation("kernel-iso", (D.cells3 and next(iter(D.cells3)) or "diagram",),
                      r.first_failure or "cohomology of ker(Phi) differs from the source")
    other = "right" if doc.association == "left" else "left"
    fd2 = fine_divide(D, other)
    k2 = phi_kernel(fd2, normalized=True).cohomology_dims(r.degrees)
    rep.result("association", f"H(ker Phi) with {other} association {_fmt_list(k2)}",
               association=other, kernel=k2)
    if k2 != r.kernel_cohomology:
        rep.violation("association", (other,), "kernel cohomology depends on the parenthesization")


def _lemma_trees(D: PastingDiagram) -> list:
    trees = []
    for c in D.cells3.values():
        for t in (c.dom, c.cod):
            if t not in trees:
                trees.append(t)
    if not trees:
        trees = [Leaf(n) for n in D.cells2]
    return trees


def cmd_lemma_cylinder(doc, args, rep: Report):
    D = doc.diagram
    trees = _lemma_trees(D)
    if not trees:
        raise InputError("lemma-cylinder needs a diagram with 2-cells")
    for t in trees:
        _, phi = pasting_map(D, t, max_degree=args.max_degree)
        data = lemma_split(phi)
        red = reduced_complex(data)
        cyl = dual_cylinder(phi)
        inc = lemma_inclusion(data, red, cyl)
        degs = list(range(cyl.min_degree, deformation_degree(phi.source) + 2))
        h_cyl = cyl.cohomology_dims(degs)
        h_red = red.cohomology_dims(degs)
        chain = inc.is_chain_map(degs[:-1])
        h_quot = quotient_cohomology_dims(inc, degs)
        rep.result("lemma", f"tree {t}: degrees {_fmt_list(degs)}, H(cylinder) {_fmt_list(h_cyl)}, "
                            f"H(reduced) {_fmt_list(h_red)}, H(cokernel) {_fmt_list(h_quot)}, inclusion chain {chain}",
                   tree=str(t), degrees=degs, cylinder=h_cyl, reduced=h_red, cokernel=h_quot, chain=chain)
        if h_cyl != h_red:
            rep.violation("lemma-dims", (str(t),), "cohomology of the cylinder and the reduced complex differ")
        if any(h_quot):
            rep.violation("lemma-cokernel", (str(t),), "the cokernel of the inclusion is not acyclic")
        if not chain:
            rep.violation("lemma-inclusion", (str(t),), "the inclusion is not a chain map")


COMMANDS = {
    "validate": cmd_validate,
    "complex": cmd_complex,
    "cohomology": cmd_cohomology,
    "deform": cmd_deform,
    "polygon": cmd_polygon,
    "finedivide": cmd_finedivide,
    "lemma-cylinder": cmd_lemma_cylinder,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", help="q or fp:P (overrides the document's field)")
    common.add_argument("--max-degree", type=int, default=4, help="highest cochain degree (default 4)")
    common.add_argument("--seed", type=int, default=0, help="seed for random choices (default 0)")
    common.add_argument("--json", metavar="OUT", help="write the JSON report to OUT")
    p = argparse.ArgumentParser(prog="deforma", description="Deformation complexes of pasting diagrams.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("validate", "complex", "lemma-cylinder"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("file", help="diagram document (JSON), or shipped:<name>")
    s = sub.add_parser("cohomology", parents=[common])
    s.add_argument("--degrees", help="range a..b")
    s.add_argument("file")
    s = sub.add_parser("deform", parents=[common])
    s.add_argument("--order", type=int, help="extend up to this order (default: the document's order)")
    s.add_argument("--trivial", help="comma-separated cells kept undeformed")
    s.add_argument("file")
    s = sub.add_parser("polygon", parents=[common])
    s.add_argument("action", choices=["check", "verify", "cross-validate"])
    s.add_argument("--fixture", required=True)
    s.add_argument("--order", type=int, default=2)
    s.add_argument("--deformation", choices=["valid", "zero", "broken"], default="valid",
                   help="family to test: a valid deformation (default), zero, or arbitrary parallels")
    s.add_argument("file", nargs="?", help="diagram document (default: a sample of the fixture's shape)")
    s = sub.add_parser("finedivide", parents=[common])
    s.add_argument("--check-iso", action="store_true", help="compare the complex with ker(Phi)")
    s.add_argument("file")
    return p


def _resolve(path: str) -> str:
    if path.startswith("shipped:"):
        return str(shipped(path.split(":", 1)[1]))
    return path


def run(argv=None, out=None) -> int:
    """Run one command; returns the exit status."""
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        try:
            args.field_obj = Field.from_spec(args.field) if args.field else None
        except ValueError as exc:
            raise InputError(str(exc)) from None
        if args.max_degree < 1:
            raise InputError("--max-degree must be positive")
        doc = None
        if getattr(args, "file", None):
            doc = load(_resolve(args.file), args.field_obj)
        name = doc.name if doc is not None else ""
        rep = Report(args.command, name, out)
        COMMANDS[args.command](doc, args, rep)
    except (InputError, DocumentError, FieldMismatch) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotAChainMap as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    status = rep.status
    print(f"status: {'ok' if status == EXIT_OK else 'FAILED'} ({len(rep.violations)} violations)", file=out)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(rep.dumps())
    return status


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
