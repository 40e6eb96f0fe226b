"""Batch command-line front end.

Subcommands: dims, verify, bracket, structure, cohomology, report-all.
Reports are canonical structured text (or aligned tables with
--format table); identical inputs and seeds give byte-identical output.
Exit codes: 0 pass, 1 verification failure, 2 input error.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import cohomology as coh
from . import documents, killing
from . import superalgebra as sa
from .embedding import ads_hyperboloid, metric_residual
from .exprs import active_backend

DEFAULT_TOL = 1e-8


class InputError(ValueError):
    pass


def _domain_options(args) -> dict:
    out = {}
    if getattr(args, "samples", None):
        out["count"] = args.samples
    if getattr(args, "seed", None) is not None:
        out["seed"] = args.seed
    return out


def _load_family(args) -> killing.FormFamily:
    name = args.family
    path = Path(name)
    if path.suffix == ".doc" or path.exists():
        resolver = None
        if getattr(args, "manifold", None):
            mtext = Path(args.manifold).read_text()

            def resolver(_name):
                return documents.parse_manifold_document(mtext, **_domain_options(args))
        try:
            return documents.parse_family_document(path.read_text(),
                                                   geometry_resolver=resolver)
        except (OSError, documents.DocumentError) as exc:
            raise InputError(str(exc)) from None
    try:
        return killing.builtin_family(name, **_domain_options(args))
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None


def _header(args, command: str, extra: dict) -> list[str]:
    lines = ["# kyforms report", f"command = {command}"]
    for k, v in extra.items():
        lines.append(f"{k} = {v}")
    lines.append(f"samples = {getattr(args, 'samples', None) or 64}")
    lines.append(f"seed = {getattr(args, 'seed', None) if getattr(args, 'seed', None) is not None else 42}")
    lines.append(f"tol = {getattr(args, 'tol', DEFAULT_TOL):g}")
    lines.append(f"backend = {active_backend()}")
    return lines


# ---------------------------------------------------------------------------

def cmd_dims(args) -> tuple[int, list[str]]:
    n = args.n
    if n < 2:
        raise InputError("dims needs n >= 2")
    kind = args.kind
    count = killing.ky_count if kind == "ky" else killing.cky_count
    dims = killing.ky_dims if kind == "ky" else killing.cky_dims
    odd, even = dims(n)
    lines = _header(args, "dims", {"n": n, "kind": kind})
    if args.format == "table":
        ps = list(range(1, n))
        lines.append("p    " + "  ".join(f"{p:>4d}" for p in ps))
        row = "K_p " if kind == "ky" else "C_p "
        lines.append(row + " " + "  ".join(f"{count(n, p):>4d}" for p in ps))
        lines.append(f"dimension (odd|even) = ({odd}|{even})")
    else:
        for p in range(1, n):
            lines.append(f"count p={p} {count(n, p)}")
        lines.append(f"totals odd {odd} even {even}")
    lines.append("status = pass")
    return 0, lines


_EQUATIONS = {
    "ky": killing.ky_residual,
    "cky": killing.cky_residual,
    "coclosed": killing.coclosed_norm,
    "integrability": killing.ky_integrability_residual,
    "cky-integrability": killing.cky_integrability_residual,
    "normal": killing.normal_cky_residual,
}


def cmd_verify(args) -> tuple[int, list[str]]:
    family = _load_family(args)
    check = _EQUATIONS[args.equation]
    lines = _header(args, "verify", {"family": family.name,
                                     "equation": args.equation})
    tol = args.tol
    failures = 0
    for name, role, form in family:
        try:
            res = check(form)
        except killing.NotEinsteinError as exc:
            raise InputError(str(exc)) from None
        verdict = "pass" if res < tol else "fail"
        failures += verdict == "fail"
        lines.append(f"form {name} role={role} residual {res:.3e} {verdict}")
    lines.append(f"status = {'pass' if failures == 0 else 'fail'}")
    return (0 if failures == 0 else 1), lines


def cmd_bracket(args) -> tuple[int, list[str]]:
    family = _load_family(args)
    op = killing.sn_bracket if args.bracket == "sn" else killing.cky_bracket
    try:
        f1, f2 = family.form(args.first), family.form(args.second)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    lines = _header(args, "bracket", {"family": family.name,
                                      "bracket": args.bracket,
                                      "pair": f"{args.first} {args.second}"})
    br = op(f1, f2)
    lines.append(f"degree = {br.degree}")
    sub = [(name, f) for name, _, f in family.members if f.degree == br.degree]
    coeffs, resid = sa.expand_in_basis(br, [f for _, f in sub], family.domain)
    lines.append(f"expansion residual {resid:.3e}")
    if resid < args.tol:
        for (name, _), c in zip(sub, coeffs):
            if c != 0:
                lines.append(f"coefficient {name} {c}")
        lines.append("status = pass")
        return 0, lines
    lines.append("status = fail  # bracket leaves the family span")
    return 1, lines


def _structure_report(args, family, lines) -> tuple[int, sa.StructureConstants | None]:
    bracket = "SN" if args.bracket == "sn" else "CKY"
    sc = sa.extract(family, bracket, strict=False)
    code = 0
    for a, b, r in sc.closure_failures:
        lines.append(f"nonclosure {a} {b} residual {r:.3e}")
        code = 1
    form_report = sa.verify_axioms(sc, "form")
    lines.append(f"axioms form-convention defect {form_report.max_defect}")
    canon = sa.canonicalize(sc)
    lines.append(f"axioms super-convention defect {canon.axiom_report.max_defect}")
    if not canon.axiom_report.ok:
        code = 1
    grad = sa.gradation_report(sc.basis)
    for g, dden in grad.grade_dims:
        lines.append(f"grade {g} dim {dden}")
    for g, dden in grad.filtration_dims:
        lines.append(f"filtration F({g}) dim {dden}")
    lines.append(f"parity even {grad.even_dim} odd {grad.odd_dim}")
    return code, canon


def cmd_structure(args) -> tuple[int, list[str]]:
    family = _load_family(args)
    lines = _header(args, "structure", {"family": family.name,
                                        "bracket": args.bracket})
    code, canon = _structure_report(args, family, lines)
    doc = documents.serialize_structure_constants(canon)
    if args.out:
        Path(args.out).write_text(doc)
        lines.append(f"document = {args.out}")
    else:
        lines.append("begin structure constants document")
        lines.extend(doc.rstrip("\n").splitlines())
        lines.append("end structure constants document")
    lines.append(f"status = {'pass' if code == 0 else 'fail'}")
    return code, lines


def _complex_lines(report: coh.ComplexReport) -> list[str]:
    lines = [f"d-squared-zero = {'yes' if report.d_squared_zero else 'no'}"]
    for b in sorted(report.blocks, key=lambda b: (-b.d, b.p)):
        if b.dim == 0 and b.generator_count == 0:
            continue
        h = "-" if b.h is None else str(b.h)
        lines.append(f"block p={b.p} d={b.d} generators={b.generator_count} "
                     f"dim={b.dim} rank={b.rank} kernel={b.kernel} "
                     f"image={b.image_from_below} H={h}")
    for p in range(coh.P_MAX):
        lines.append(f"H^{p} = {report.h_total(p)}")
    if report.rigid is not None:
        lines.append(f"rigidity = {'rigid' if report.rigid else 'deformable'}")
    return lines


def cmd_cohomology(args) -> tuple[int, list[str]]:
    if args.structure:
        try:
            sc = documents.parse_structure_constants(Path(args.structure).read_text())
        except (OSError, documents.DocumentError) as exc:
            raise InputError(str(exc)) from None
        if sc.convention != "super":
            sc = sa.canonicalize(sc)
        source = args.structure
    else:
        family = _load_family(args)
        bracket = "SN" if args.bracket == "sn" else "CKY"
        sc = sa.canonicalize(sa.extract(family, bracket, strict=False))
        source = f"{family.name}:{args.bracket}"
    lines = _header(args, "cohomology", {"structure": source, "mode": args.mode})
    report = coh.cohomology_dims(sc, args.mode)
    lines.extend(_complex_lines(report))
    ok = report.d_squared_zero and (report.rigid is not False)
    lines.append(f"status = {'pass' if ok else 'fail'}")
    return (0 if ok else 1), lines


def cmd_report_all(args) -> tuple[int, list[str]]:
    lines = _header(args, "report-all", {})
    worst = 0

    def run(code_lines):
        nonlocal worst
        code, ls = code_lines
        worst = max(worst, code)
        lines.extend(ls)
        lines.append("")

    for n in (3, 4, 5):
        for kind in ("ky", "cky"):
            run(cmd_dims(_ns(args, n=n, kind=kind)))
    for eq in ("ky", "coclosed", "integrability", "cky"):
        run(cmd_verify(_ns(args, family="ads3_ky", equation=eq, manifold=None)))
    for eq in ("cky", "cky-integrability", "normal"):
        run(cmd_verify(_ns(args, family="ads3_cky", equation=eq, manifold=None)))

    emb = ads_hyperboloid(3, **_domain_options(args))
    lines.append("# embedding check")
    res = metric_residual(emb)
    lines.append(f"embedding ads3 induced-metric residual {res:.3e} "
                 f"{'pass' if res < 1e-10 else 'fail'}")
    if res >= 1e-10:
        worst = max(worst, 1)
    lines.append("")

    run(cmd_structure(_ns(args, family="ads3_ky", bracket="sn", out=None,
                          manifold=None)))
    for mode in ("restricted", "full"):
        run(cmd_cohomology(_ns(args, family="ads3_ky", bracket="sn",
                               structure=None, mode=mode, manifold=None)))

    # deformation probe over the restricted 2-cochain kernel
    fam = killing.ads3_ky(**_domain_options(args))
    sc = sa.canonicalize(sa.extract(fam, "SN"))
    verdict = coh.deformation_probe(sc, [Fraction(1)] * 3, "restricted")
    lines.append("# deformation probe")
    lines.append(f"bracket-cochain cocycle {'yes' if verdict.cocycle else 'no'} "
                 f"exact {'yes' if verdict.exact else 'no'}")
    if not (verdict.cocycle and verdict.exact):
        worst = max(worst, 1)
    lines.append(f"status = {'pass' if worst == 0 else 'fail'}")
    return worst, lines


def _ns(args, **over):
    values = dict(vars(args))
    values.update(over)
    return argparse.Namespace(**values)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kyforms",
        description="Verification workbench for Killing-Yano and conformal "
                    "Killing-Yano superalgebras on constant-curvature spacetimes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, family=False):
        p.add_argument("--tol", type=float, default=DEFAULT_TOL,
                       help="pass/fail residual tolerance")
        p.add_argument("--samples", type=int, default=None,
                       help="number of sample points (default 64)")
        p.add_argument("--seed", type=int, default=None,
                       help="sample generator seed (default 42)")
        p.add_argument("--format", choices=("text", "table"), default="text")
        p.add_argument("--out", default=None, help="write output to this path")
        if family:
            p.add_argument("--family", required=True,
                           help="built-in family name or family document path")
            p.add_argument("--manifold", default=None,
                           help="manifold document path for user families")

    p = sub.add_parser("dims", help="maximal KY/CKY counts per degree")
    p.add_argument("n", type=int)
    p.add_argument("kind", choices=("ky", "cky"))
    common(p)

    p = sub.add_parser("verify", help="residual checks for a form family")
    p.add_argument("--equation", required=True, choices=sorted(_EQUATIONS))
    common(p, family=True)

    p = sub.add_parser("bracket", help="bracket of two family members")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--bracket", choices=("sn", "cky"), default="sn")
    common(p, family=True)

    p = sub.add_parser("structure", help="extract exact structure constants")
    p.add_argument("--bracket", choices=("sn", "cky"), default="sn")
    common(p, family=True)

    p = sub.add_parser("cohomology", help="Spencer cohomology of a superalgebra")
    p.add_argument("--structure", default=None,
                   help="structure constants document path")
    p.add_argument("--bracket", choices=("sn", "cky"), default="sn")
    p.add_argument("--mode", choices=("restricted", "full"), default="restricted")
    common(p, family=False)
    p.add_argument("--family", default=None,
                   help="built-in family name or family document path")
    p.add_argument("--manifold", default=None)

    p = sub.add_parser("report-all", help="run the whole verification battery")
    common(p)
    return parser


_COMMANDS = {
    "dims": cmd_dims,
    "verify": cmd_verify,
    "bracket": cmd_bracket,
    "structure": cmd_structure,
    "cohomology": cmd_cohomology,
    "report-all": cmd_report_all,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "cohomology" and not (args.structure or args.family):
        parser.error("cohomology needs --structure or --family")
    try:
        code, lines = _COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (documents.DocumentError, killing.NotEinsteinError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = "\n".join(lines) + "\n"
    if getattr(args, "out", None) and args.command != "structure":
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
