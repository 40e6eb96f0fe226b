"""Abstract Lie-superalgebra structure from a closed form family.

`extract` evaluates the bracket of every basis pair at the seeded sample
points, expands it in the target-degree sub-basis by least squares, and
rationalizes the coefficients by continued fractions (denominator cap 64),
re-verifying the exact expansion numerically.  Degree-p forms carry
Z-grade j = -(p-1) and parity (p-1) mod 2.

Two sign conventions are first class:

  form  convention:  [a,b] = (-1)^{pq} [b,a]          (form degrees p, q)
  super convention:  [a,b] = -(-1)^{|a||b|} [b,a]     (parities |a|, |b|)

The conventions differ on mixed odd/even-degree pairs; `canonicalize`
defines the super-convention bracket from the extracted values on pairs
ordered by form degree and checks the super-Jacobi identity exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exprs.sample import SampleDomain
from .forms import PForm, form_exprs
from .killing import FormFamily, cky_bracket, sn_bracket
from .ratmat import rationalize

EXTRACT_TOL = 1e-9


@dataclass(frozen=True)
class BasisElement:
    label: str
    degree: int
    grade: int
    parity: int


@dataclass(frozen=True)
class SuperBasis:
    elements: tuple[BasisElement, ...]

    def __post_init__(self):
        labels = [e.label for e in self.elements]
        if len(set(labels)) != len(labels):
            raise ValueError("basis labels must be unique")
        for e in self.elements:
            if e.parity != (-e.grade) % 2:
                raise ValueError(f"{e.label}: parity must equal grade mod 2")

    def __len__(self):
        return len(self.elements)

    def index(self, label: str) -> int:
        for i, e in enumerate(self.elements):
            if e.label == label:
                return i
        raise KeyError(label)

    def grades(self) -> list[int]:
        return sorted({e.grade for e in self.elements}, reverse=True)

    def by_grade(self, g: int) -> list[int]:
        return [i for i, e in enumerate(self.elements) if e.grade == g]


@dataclass
class StructureConstants:
    """Bracket table over ordered basis pairs: table[(i, j)][k] is the
    coefficient of element k in [e_i, e_j]."""

    basis: SuperBasis
    convention: str  # "form" | "super"
    table: dict[tuple[int, int], dict[int, Fraction]]
    axiom_report: "AxiomReport | None" = None

    def bracket(self, i: int, j: int) -> dict[int, Fraction]:
        row = self.table.get((i, j))
        if row is not None:
            return row
        # fill the reversed order from the convention's symmetry
        rev = self.table.get((j, i))
        if rev is None:
            return {}
        ei, ej = self.basis.elements[i], self.basis.elements[j]
        if self.convention == "form":
            sign = (-1) ** (ei.degree * ej.degree)
        else:
            sign = -((-1) ** (ei.parity * ej.parity))
        return {k: sign * c for k, c in rev.items()}

    def bracket_vector(self, i: int, j: int) -> list[Fraction]:
        row = self.bracket(i, j)
        return [row.get(k, Fraction(0)) for k in range(len(self.basis))]


class ClosureError(ValueError):
    def __init__(self, pair, residual):
        super().__init__(f"family not closed: bracket {pair} has expansion "
                         f"residual {residual:.3e}")
        self.pair = pair
        self.residual = residual


class RationalizationError(ValueError):
    pass


def _basis_from_family(family: FormFamily) -> tuple[SuperBasis, list[PForm]]:
    ordered = sorted(family.members, key=lambda m: (m[2].degree,
                                                    family.names().index(m[0])))
    elements = []
    pforms = []
    for name, _role, f in ordered:
        p = f.degree
        elements.append(BasisElement(label=name, degree=p, grade=-(p - 1),
                                     parity=(p - 1) % 2))
        pforms.append(f)
    return SuperBasis(tuple(elements)), pforms


def _stack_values(pform: PForm, indices, dom: SampleDomain, pts) -> np.ndarray:
    from .exprs.sample import values
    cols = []
    for idx in indices:
        coef = pform.comps.get(idx)
        if coef is None:
            cols.append(np.zeros(pts.shape[0]))
        else:
            cols.append(values(coef, dom, pts))
    return np.concatenate(cols)


def expand_in_basis(target: PForm, basis_forms: list[PForm], dom: SampleDomain,
                    tol: float = EXTRACT_TOL, max_den: int = 64):
    """Expand target over basis_forms by least squares at the sample points,
    then rationalize; returns (coeffs, residual).  With an empty basis the
    residual is the normalized magnitude of the target itself."""
    pts = dom.points()
    all_indices = sorted(set(target.comps) | {i for f in basis_forms for i in f.comps})
    if not all_indices:
        return [], 0.0
    b = _stack_values(target, all_indices, dom, pts)
    scale = max(1.0, float(np.abs(b).max()) if b.size else 1.0)
    if not basis_forms:
        return [], float(np.abs(b).max()) / scale if b.size else 0.0
    a = np.column_stack([_stack_values(f, all_indices, dom, pts) for f in basis_forms])
    scale = max(scale, float(np.abs(a).max()))
    coeffs, *_ = np.linalg.lstsq(a, b, rcond=None)
    rationalized = []
    for c in coeffs:
        r = rationalize(float(c), max_den=max_den, tol=tol)
        if r is None:
            raise RationalizationError(
                f"no rational with denominator <= {max_den} within {tol:g} of {c!r}")
        rationalized.append(r)
    resid = b - a @ np.array([float(r) for r in rationalized])
    return rationalized, float(np.abs(resid).max()) / scale


def extract(family: FormFamily, bracket: str = "SN", *, tol: float = EXTRACT_TOL,
            strict: bool = True) -> StructureConstants:
    """Exact-rational structure constants of the family under the chosen
    bracket ("SN" or "CKY"), extracted in the form convention.

    With strict=True a non-closing pair raises ClosureError; otherwise the
    offending pairs are recorded in `sc.closure_failures`.
    """
    if bracket not in ("SN", "CKY"):
        raise ValueError("bracket must be SN or CKY")
    op = sn_bracket if bracket == "SN" else cky_bracket
    basis, pforms = _basis_from_family(family)
    dom = family.domain
    table: dict[tuple[int, int], dict[int, Fraction]] = {}
    failures: list[tuple[str, str, float]] = []
    for i in range(len(basis)):
        for j in range(i, len(basis)):
            br = op(pforms[i], pforms[j])
            degree = br.degree
            sub = [(k, pforms[k]) for k in range(len(basis))
                   if basis.elements[k].degree == degree]
            coeffs, resid = expand_in_basis(br, [f for _, f in sub], dom, tol=tol)
            if resid > tol:
                if strict:
                    raise ClosureError((basis.elements[i].label,
                                        basis.elements[j].label), resid)
                failures.append((basis.elements[i].label,
                                 basis.elements[j].label, resid))
                continue
            row = {k: c for (k, _), c in zip(sub, coeffs) if c != 0}
            table[(i, j)] = row
    sc = StructureConstants(basis=basis, convention="form", table=table)
    sc.closure_failures = failures
    return sc


# ---------------------------------------------------------------------------
# axioms

@dataclass
class AxiomDefect:
    kind: str
    labels: tuple[str, ...]
    value: Fraction


@dataclass
class AxiomReport:
    convention: str
    symmetry_defects: list[AxiomDefect] = field(default_factory=list)
    jacobi_defects: list[AxiomDefect] = field(default_factory=list)

    @property
    def max_defect(self) -> Fraction:
        worst = Fraction(0)
        for d in self.symmetry_defects + self.jacobi_defects:
            worst = max(worst, abs(d.value))
        return worst

    @property
    def ok(self) -> bool:
        return not self.symmetry_defects and not self.jacobi_defects


def verify_axioms(sc: StructureConstants, convention: str | None = None) -> AxiomReport:
    """Exact-arithmetic check of the symmetry and Jacobi identities.

    form convention:  [a,b] = (-1)^{pq}[b,a] and the graded Jacobi identity
        (-1)^{p(r+1)}[a,[b,c]] + (-1)^{q(p+1)}[b,[c,a]] + (-1)^{r(q+1)}[c,[a,b]] = 0.
    super convention: [a,b] = -(-1)^{|a||b|}[b,a] and
        [a,[b,c]] = [[a,b],c] + (-1)^{|a||b|}[b,[a,c]].
    """
    convention = convention or sc.convention
    basis = sc.basis
    m = len(basis)
    report = AxiomReport(convention=convention)

    def vec(i, j):
        return sc.bracket_vector(i, j)

    def bracket_with_vector(i, v):
        # [e_i, sum_k v_k e_k]
        out = [Fraction(0)] * m
        for k, c in enumerate(v):
            if c == 0:
                continue
            for t, w in sc.bracket(i, k).items():
                out[t] += c * w
        return out

    for i in range(m):
        for j in range(m):
            ei, ej = basis.elements[i], basis.elements[j]
            if convention == "form":
                sign = (-1) ** (ei.degree * ej.degree)
            else:
                sign = -((-1) ** (ei.parity * ej.parity))
            lhs = vec(i, j)
            rhs = vec(j, i)
            for k in range(m):
                d = lhs[k] - sign * rhs[k]
                if d != 0:
                    report.symmetry_defects.append(AxiomDefect(
                        "symmetry", (ei.label, ej.label, basis.elements[k].label), d))

    for i in range(m):
        for j in range(m):
            for k in range(m):
                ei, ej, ek = basis.elements[i], basis.elements[j], basis.elements[k]
                if convention == "form":
                    p, q, r = ei.degree, ej.degree, ek.degree
                    t1 = bracket_with_vector(i, vec(j, k))
                    t2 = bracket_with_vector(j, vec(k, i))
                    t3 = bracket_with_vector(k, vec(i, j))
                    total = [((-1) ** (p * (r + 1))) * a
                             + ((-1) ** (q * (p + 1))) * b
                             + ((-1) ** (r * (q + 1))) * c
                             for a, b, c in zip(t1, t2, t3)]
                else:
                    lhs = bracket_with_vector(i, vec(j, k))
                    # [[a,b],c] with [a,b] expanded, bracket on the left slot
                    t_ab_c = [Fraction(0)] * m
                    for s, cof in sc.bracket(i, j).items():
                        for t, w in sc.bracket(s, k).items():
                            t_ab_c[t] += cof * w
                    sgn = (-1) ** (ei.parity * ej.parity)
                    t_b_ac = bracket_with_vector(j, vec(i, k))
                    total = [a - b - sgn * c for a, b, c in zip(lhs, t_ab_c, t_b_ac)]
                for t, d in enumerate(total):
                    if d != 0:
                        report.jacobi_defects.append(AxiomDefect(
                            "jacobi", (ei.label, ej.label, ek.label,
                                       basis.elements[t].label), d))
    return report


def canonicalize(sc: StructureConstants) -> StructureConstants:
    """Super-convention structure constants: pairs ordered by form degree
    keep their extracted value, reversed pairs are defined through the
    super skew-supersymmetry.  The axiom report of the result is attached
    (a Jacobi failure is reported, never silently accepted)."""
    if sc.convention == "super":
        out = StructureConstants(sc.basis, "super", dict(sc.table))
        out.axiom_report = verify_axioms(out, "super")
        return out
    basis = sc.basis
    m = len(basis)
    table: dict[tuple[int, int], dict[int, Fraction]] = {}
    for i in range(m):
        for j in range(m):
            ei, ej = basis.elements[i], basis.elements[j]
            canonical = (ei.degree, i) <= (ej.degree, j)
            if canonical:
                row = sc.bracket(i, j)
            else:
                base = sc.bracket(j, i)
                sign = -((-1) ** (ei.parity * ej.parity))
                row = {k: sign * c for k, c in base.items()}
            if row:
                table[(i, j)] = dict(row)
    out = StructureConstants(basis=basis, convention="super", table=table)
    out.axiom_report = verify_axioms(out, "super")
    return out


# ---------------------------------------------------------------------------
# gradation / filtration bookkeeping

@dataclass(frozen=True)
class FiltrationReport:
    grade_dims: tuple[tuple[int, int], ...]      # (grade, dim), grade descending
    filtration_dims: tuple[tuple[int, int], ...]  # (-k, dim F_{-k})
    even_dim: int
    odd_dim: int


def gradation_report(basis: SuperBasis) -> FiltrationReport:
    grades = basis.grades()
    gdims = tuple((g, len(basis.by_grade(g))) for g in grades)
    filt = []
    running = 0
    for g, d in gdims:
        running += d
        filt.append((g, running))
    even = sum(1 for e in basis.elements if e.parity == 0)
    odd = sum(1 for e in basis.elements if e.parity == 1)
    return FiltrationReport(gdims, tuple(filt), even, odd)


# ---------------------------------------------------------------------------
# structural probes used by the acceptance suite

def restricted_to(sc: StructureConstants, indices: list[int]) -> StructureConstants:
    """Substructure on a subset of basis elements (brackets must close on it)."""
    basis = SuperBasis(tuple(sc.basis.elements[i] for i in indices))
    pos = {orig: new for new, orig in enumerate(indices)}
    table = {}
    for (i, j), row in sc.table.items():
        if i in pos and j in pos:
            out = {}
            for k, c in row.items():
                if c == 0:
                    continue
                if k not in pos:
                    raise ValueError("bracket leaves the requested subset")
                out[pos[k]] = c
            table[(pos[i], pos[j])] = out
    return StructureConstants(basis=basis, convention=sc.convention, table=table)


def derived_algebra_dim(sc: StructureConstants) -> int:
    """Dimension of the span of all brackets [e_i, e_j]."""
    from .ratmat import span_dim
    vectors = []
    m = len(sc.basis)
    for i in range(m):
        for j in range(m):
            v = sc.bracket_vector(i, j)
            if any(c != 0 for c in v):
                vectors.append(v)
    return span_dim(vectors)


def center_dim(sc: StructureConstants) -> int:
    """Dimension of {x : [x, e_j] = 0 for all j}."""
    from .ratmat import nullspace
    m = len(sc.basis)
    rows = []
    for j in range(m):
        for t in range(m):
            rows.append([sc.bracket(i, j).get(t, Fraction(0)) for i in range(m)])
    return len(nullspace(rows, m))
