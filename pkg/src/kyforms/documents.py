"""Structured-text document formats.

All formats are line-based and diffable: `#` starts a comment, blank lines
are ignored, and fields are `key = value` or space-separated records.  The
same serialization is used for the packaged data files and for CLI output,
so byte-identical reports follow from identical inputs.

Manifold document:
    name = ads3
    coordinates = t r phi
    parameter l = 1
    signature = -1 1 1
    domain t = -1 1
    coframe 0 0 = (r^2/l^2+1)^(1/2)

Form family document:
    name = ads3_ky
    manifold = ads3
    form alpha1 degree=1 role=KY
    comp 0 = -(r^2/l^2+1)^(1/2)

Structure constants document:
    convention = form
    element alpha1 degree=1 grade=0 parity=0
    bracket alpha1 omega1 omega2 -1
"""
from __future__ import annotations

import importlib.resources
from fractions import Fraction

from .exprs import tree
from .forms import PForm


class DocumentError(ValueError):
    pass


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _kv(line: str, lineno: int) -> tuple[str, str]:
    if "=" not in line:
        raise DocumentError(f"line {lineno}: expected 'key = value'")
    key, value = line.split("=", 1)
    return key.strip(), value.strip()


# ---------------------------------------------------------------------------
# manifold documents

def parse_manifold_document(text: str, *, parameter_overrides=None,
                            count=64, seed=42, atol=1e-9, rtol=1e-9):
    """Build a curvature-complete FrameGeometry from a manifold document."""
    from .geometry import curvature, levi_civita, make_chart

    name = None
    coords: list[str] = []
    params: dict[str, float] = {}
    signature: list[int] = []
    domains: dict[str, tuple[float, float]] = {}
    coframe_entries: dict[tuple[int, int], str] = {}

    for lineno, line in _lines(text):
        head = line.split()[0]
        if head == "name":
            name = _kv(line, lineno)[1]
        elif head == "coordinates":
            coords = _kv(line, lineno)[1].split()
        elif head == "parameter":
            key, value = _kv(line, lineno)
            params[key.split()[1]] = float(value)
        elif head == "signature":
            signature = [int(s) for s in _kv(line, lineno)[1].split()]
        elif head == "domain":
            key, value = _kv(line, lineno)
            lo, hi = value.split()
            domains[key.split()[1]] = (float(lo), float(hi))
        elif head == "coframe":
            key, value = _kv(line, lineno)
            _, a, mu = key.split()
            coframe_entries[(int(a), int(mu))] = value
        else:
            raise DocumentError(f"line {lineno}: unknown record '{head}'")

    if name is None or not coords or not signature:
        raise DocumentError("manifold document needs name, coordinates, signature")
    missing = [c for c in coords if c not in domains]
    if missing:
        raise DocumentError(f"missing domain for coordinates {missing}")
    if parameter_overrides:
        params.update(parameter_overrides)

    chart = make_chart(name, coords, sorted(params.items()),
                       [domains[c] for c in coords],
                       count=count, seed=seed, atol=atol, rtol=rtol)
    n = len(coords)
    coframe = [[tree.ZERO] * n for _ in range(n)]
    for (a, mu), text_expr in coframe_entries.items():
        coframe[a][mu] = chart.parse(text_expr)
    return curvature(levi_civita(chart, signature, coframe))


def serialize_manifold(geom) -> str:
    out = ["# kyforms manifold document", f"name = {geom.chart.name}",
           "coordinates = " + " ".join(geom.chart.coordinates)]
    for p, v in geom.chart.parameters:
        out.append(f"parameter {p} = {v:g}")
    out.append("signature = " + " ".join(str(s) for s in geom.signature))
    for cname, lo, hi in geom.domain.intervals:
        out.append(f"domain {cname} = {lo:g} {hi:g}")
    for a in range(geom.n):
        for mu in range(geom.n):
            if not tree.is_zero_literal(geom.coframe[a][mu]):
                out.append(f"coframe {a} {mu} = {tree.to_text(geom.coframe[a][mu])}")
    return "\n".join(out) + "\n"


def _packaged(subdir: str, name: str) -> str:
    res = importlib.resources.files("kyforms.data") / subdir / f"{name}.doc"
    try:
        return res.read_text()
    except FileNotFoundError:
        raise DocumentError(f"no packaged document '{subdir}/{name}'") from None


def load_packaged_manifold(name: str, **kw):
    return parse_manifold_document(_packaged("manifolds", name), **kw)


# ---------------------------------------------------------------------------
# form family documents

def parse_family_document(text: str, geometry_resolver=None):
    """Parse a family document; the geometry is resolved from the
    `manifold` field (packaged name) unless a resolver is supplied."""
    from .killing import FormFamily

    name = None
    manifold = None
    note_lines: list[str] = []
    entries: list[dict] = []

    for lineno, line in _lines(text):
        head = line.split()[0]
        if head == "name":
            name = _kv(line, lineno)[1]
        elif head == "manifold":
            manifold = _kv(line, lineno)[1]
        elif head == "note":
            note_lines.append(_kv(line, lineno)[1])
        elif head == "form":
            fields = line.split()
            rec = {"name": fields[1], "comps": {}}
            for f in fields[2:]:
                k, v = f.split("=", 1)
                rec[k] = v
            entries.append(rec)
        elif head == "comp":
            if not entries:
                raise DocumentError(f"line {lineno}: comp before any form")
            key, value = _kv(line, lineno)
            idx_text = key.split()[1]
            idx = () if idx_text == "-" else tuple(int(ch) for ch in idx_text)
            entries[-1]["comps"][idx] = value
        else:
            raise DocumentError(f"line {lineno}: unknown record '{head}'")

    if name is None or manifold is None:
        raise DocumentError("family document needs name and manifold")
    if geometry_resolver is None:
        geom = load_packaged_manifold(manifold)
    else:
        geom = geometry_resolver(manifold)

    members = []
    for rec in entries:
        degree = int(rec.get("degree", "1"))
        comps = {}
        for idx, text_expr in rec["comps"].items():
            if list(idx) != sorted(set(idx)):
                raise DocumentError(f"multi-index {idx} must be strictly increasing")
            comps[idx] = geom.chart.parse(text_expr)
        members.append((rec["name"], rec.get("role", "KY"), PForm(geom, degree, comps)))
    return FormFamily(name=name, geometry=geom, members=members,
                      note="\n".join(note_lines))


def serialize_family(family) -> str:
    out = ["# kyforms form family document", f"name = {family.name}",
           f"manifold = {family.geometry.chart.name}"]
    for line in (family.note or "").splitlines():
        out.append(f"note = {line}")
    for fname, role, form in family.members:
        out.append(f"form {fname} degree={form.degree} role={role}")
        for idx in sorted(form.comps):
            idx_text = "".join(map(str, idx)) if idx else "-"
            out.append(f"comp {idx_text} = {tree.to_text(form.comps[idx])}")
    return "\n".join(out) + "\n"


def load_packaged_family(name: str, **domain_options):
    resolver = None
    if domain_options:
        resolver = lambda m: load_packaged_manifold(m, **domain_options)  # noqa: E731
    return parse_family_document(_packaged("families", name), geometry_resolver=resolver)


# ---------------------------------------------------------------------------
# structure constants documents

def serialize_structure_constants(sc) -> str:
    out = ["# kyforms structure constants document",
           f"convention = {sc.convention}"]
    basis = sc.basis
    for el in basis.elements:
        out.append(f"element {el.label} degree={el.degree} grade={el.grade} "
                   f"parity={el.parity}")
    for (i, j), row in sorted(sc.table.items()):
        for k, coeff in sorted(row.items()):
            if coeff != 0:
                out.append(f"bracket {basis.elements[i].label} {basis.elements[j].label} "
                           f"{basis.elements[k].label} {coeff}")
    return "\n".join(out) + "\n"


def parse_structure_constants(text: str):
    from .superalgebra import BasisElement, StructureConstants, SuperBasis

    convention = None
    elements: list[BasisElement] = []
    index: dict[str, int] = {}
    brackets: list[tuple[str, str, str, Fraction]] = []

    for lineno, line in _lines(text):
        head = line.split()[0]
        if head == "convention":
            convention = _kv(line, lineno)[1]
        elif head == "element":
            fields = line.split()
            label = fields[1]
            kv = dict(f.split("=", 1) for f in fields[2:])
            index[label] = len(elements)
            elements.append(BasisElement(label=label, degree=int(kv["degree"]),
                                         grade=int(kv["grade"]), parity=int(kv["parity"])))
        elif head == "bracket":
            _, a, b, c, coeff = line.split()
            brackets.append((a, b, c, Fraction(coeff)))
        else:
            raise DocumentError(f"line {lineno}: unknown record '{head}'")

    if convention not in ("form", "super"):
        raise DocumentError("structure constants document needs convention = form|super")
    basis = SuperBasis(tuple(elements))
    table: dict[tuple[int, int], dict[int, Fraction]] = {}
    for a, b, c, coeff in brackets:
        try:
            key = (index[a], index[b])
            tgt = index[c]
        except KeyError as exc:
            raise DocumentError(f"bracket references unknown element {exc}") from None
        table.setdefault(key, {})[tgt] = coeff
    return StructureConstants(basis=basis, convention=convention, table=table)
