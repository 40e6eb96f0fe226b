"""Killing-Yano and conformal Killing-Yano machinery.

Residual checkers for the defining equations and integrability conditions,
the Schouten-Nijenhuis and CKY brackets, maximal-count formulas, and the
built-in form families (the AdS3 basis, flat-space translational and
boost/rotational bases, and the AdS3 CKY family obtained by pullback).

Residuals are sup-norms over the geometry's seeded sample points,
normalized per point by max(1, input coefficient magnitudes, own term
magnitudes); a genuine identity sits around 1e-13 in double precision.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from . import forms, geometry
from .embedding import ads_hyperboloid, pullback
from .exprs import tree
from .exprs.sample import SampleDomain, normalized_residual
from .forms import PForm, coderiv, contract, cov_d, ext_d, frame_form, interior, wedge, zero_form

KY_TOL = 1e-8

ROLES = ("KY", "CKY-proper", "translational", "boost-rotational")


@dataclass
class FormFamily:
    name: str
    geometry: geometry.FrameGeometry
    members: list[tuple[str, str, PForm]]  # (name, role, form)
    note: str = ""

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def names(self) -> list[str]:
        return [m[0] for m in self.members]

    def form(self, name: str) -> PForm:
        for fname, _, f in self.members:
            if fname == name:
                return f
        raise KeyError(f"no form named '{name}' in family '{self.name}'")

    def by_degree(self, p: int) -> list[tuple[str, str, PForm]]:
        return [m for m in self.members if m[2].degree == p]

    @property
    def domain(self) -> SampleDomain:
        return self.geometry.domain


def _sup(residual_forms: list[PForm], dom: SampleDomain,
         reference: list[PForm]) -> float:
    exprs = [e for f in residual_forms for e in f.comps.values()]
    ref = [e for f in reference for e in f.comps.values()]
    if not exprs:
        return 0.0
    return normalized_residual(exprs, dom, ref)


def ky_residual(omega: PForm, dom: SampleDomain | None = None) -> float:
    """Max residual of nabla_{X_a} w - i_{X_a} dw / (p+1) over frame
    directions and sample points."""
    geom = omega.geom
    p = omega.degree
    if not 1 <= p <= geom.n:
        raise forms.DegreeError("KY forms have degree 1..n")
    dom = dom or geom.domain
    dw = ext_d(omega)
    resid = []
    for a in range(geom.n):
        lhs = cov_d(a, omega)
        if p < geom.n:
            lhs = lhs - interior(a, dw).scaled(tree.Rat(Fraction(1, p + 1)))
        resid.append(lhs)
    return _sup(resid, dom, [omega, dw])


def coclosed_norm(omega: PForm, dom: SampleDomain | None = None) -> float:
    """Normalized sup-norm of the coderivative (0 for co-closed forms)."""
    dom = dom or omega.geom.domain
    return _sup([coderiv(omega)], dom, [omega])


def cky_residual(omega: PForm, dom: SampleDomain | None = None) -> float:
    """Max residual of the conformal equation
    nabla_{X_a} w - i_{X_a} dw/(p+1) + e_a ^ delta w/(n-p+1)."""
    geom = omega.geom
    p = omega.degree
    if not 1 <= p <= geom.n:
        raise forms.DegreeError("CKY forms have degree 1..n")
    dom = dom or geom.domain
    dw = ext_d(omega)
    delta = coderiv(omega)
    resid = []
    for a in range(geom.n):
        lhs = cov_d(a, omega)
        if p < geom.n:
            lhs = lhs - interior(a, dw).scaled(tree.Rat(Fraction(1, p + 1)))
        e_low = frame_form(geom, a).scaled(geom.signature[a])
        lhs = lhs + wedge(e_low, delta).scaled(tree.Rat(Fraction(1, geom.n - p + 1)))
        resid.append(lhs)
    return _sup(resid, dom, [omega, dw, delta])


def ky_integrability_residual(omega: PForm, dom: SampleDomain | None = None) -> float:
    """Residual of nabla_{X_b} dw = (p+1)/p R_{ab} ^ i_{X^a} w for all b."""
    geom = geometry.curvature(omega.geom)
    p = omega.degree
    if p >= geom.n:
        raise forms.DegreeError("integrability residual needs p <= n-1")
    dom = dom or geom.domain
    dw = ext_d(omega)
    resid = []
    for b in range(geom.n):
        rhs = zero_form(geom, p + 1)
        for a in range(geom.n):
            r_low = geom.curvature_forms[a][b].scaled(geom.signature[a])
            if r_low.is_structurally_zero():
                continue
            rhs = rhs + wedge(r_low, contract(a, omega))
        resid.append(cov_d(b, dw) - rhs.scaled(tree.Rat(Fraction(p + 1, p))))
    return _sup(resid, dom, [omega, dw])


def _second_order_lhs(omega: PForm) -> PForm:
    """p/(p+1) delta d w + (n-p)/(n-p+1) d delta w."""
    geom = omega.geom
    p, n = omega.degree, geom.n
    lhs = zero_form(geom, p)
    if p < n:
        lhs = lhs + coderiv(ext_d(omega)).scaled(tree.Rat(Fraction(p, p + 1)))
    if p > 0:
        lhs = lhs + ext_d(coderiv(omega)).scaled(tree.Rat(Fraction(n - p, n - p + 1)))
    return lhs


def cky_integrability_residual(omega: PForm, dom: SampleDomain | None = None) -> float:
    """Residual of the second-order CKY condition
    p/(p+1) delta dw + (n-p)/(n-p+1) d delta w
      = P_a ^ i_{X^a} w + R_{ab} ^ i_{X^a} i_{X^b} w."""
    geom = geometry.curvature(omega.geom)
    p, n = omega.degree, geom.n
    dom = dom or geom.domain
    rhs = zero_form(geom, p)
    for a in range(n):
        if not geom.ricci_forms[a].is_structurally_zero():
            rhs = rhs + wedge(geom.ricci_forms[a], contract(a, omega))
    if p >= 2:
        for a in range(n):
            for b in range(n):
                r_low = geom.curvature_forms[a][b].scaled(geom.signature[a])
                if r_low.is_structurally_zero():
                    continue
                rhs = rhs + wedge(r_low, contract(a, contract(b, omega)))
    resid = _second_order_lhs(omega) - rhs
    return _sup([resid], dom, [omega])


class NotEinsteinError(ValueError):
    def __init__(self, defect: float):
        super().__init__(f"geometry is not Einstein (Ricci proportionality defect {defect:.3e})")
        self.defect = defect


def normal_cky_residual(omega: PForm, dom: SampleDomain | None = None) -> float:
    """Residual of the normal-CKY integrability condition
    p/(p+1) delta dw + (n-p)/(n-p+1) d delta w = -2 (n-p) K_a ^ i_{X^a} w,
    valid on Einstein geometries only."""
    geom = geometry.curvature(omega.geom)
    ok, defect = geometry.is_einstein(geom)
    if not ok:
        raise NotEinsteinError(defect)
    p, n = omega.degree, geom.n
    dom = dom or geom.domain
    kforms = geometry.k_one_forms(geom)
    rhs = zero_form(geom, p)
    for a in range(n):
        if not kforms[a].is_structurally_zero():
            rhs = rhs + wedge(kforms[a], contract(a, omega))
    resid = _second_order_lhs(omega) + rhs.scaled(2 * (n - p))
    return _sup([resid], dom, [omega])


# ---------------------------------------------------------------------------
# brackets

def sn_bracket(alpha: PForm, beta: PForm) -> PForm:
    """Schouten-Nijenhuis bracket
    i_{X^a} alpha ^ nabla_{X_a} beta + (-1)^{pq} i_{X^a} beta ^ nabla_{X_a} alpha."""
    geom = alpha.geom
    p, q = alpha.degree, beta.degree
    if p < 1 or q < 1:
        raise forms.DegreeError("SN bracket needs degrees >= 1")
    if p + q - 1 > geom.n:
        raise forms.DegreeError(f"SN bracket degree {p + q - 1} exceeds n={geom.n}")
    out = zero_form(geom, p + q - 1)
    for a in range(geom.n):
        out = out + wedge(contract(a, alpha), cov_d(a, beta))
        term = wedge(contract(a, beta), cov_d(a, alpha))
        out = out + (term if (p * q) % 2 == 0 else term.scaled(-1))
    return out


def sn_bracket_ky(omega1: PForm, omega2: PForm, *, tol: float = KY_TOL,
                  check: bool = True) -> PForm:
    """SN bracket specialized to KY inputs (first-derivative-free form):
    i_{X^a} w1 ^ i_{X_a} dw2 / (q+1) + (-1)^{pq} i_{X^a} w2 ^ i_{X_a} dw1 / (p+1)."""
    geom = omega1.geom
    p, q = omega1.degree, omega2.degree
    if check:
        for w, label in ((omega1, "first"), (omega2, "second")):
            res = ky_residual(w)
            if res > tol:
                raise ValueError(f"{label} argument is not a KY form "
                                 f"(residual {res:.3e} > {tol:g})")
    if p + q - 1 > geom.n:
        raise forms.DegreeError(f"SN bracket degree {p + q - 1} exceeds n={geom.n}")
    d1, d2 = ext_d(omega1), ext_d(omega2)
    out = zero_form(geom, p + q - 1)
    for a in range(geom.n):
        out = out + wedge(contract(a, omega1), interior(a, d2)).scaled(
            tree.Rat(Fraction(1, q + 1)))
        sign = 1 if (p * q) % 2 == 0 else -1
        out = out + wedge(contract(a, omega2), interior(a, d1)).scaled(
            tree.Rat(Fraction(sign, p + 1)))
    return out


def cky_bracket(omega1: PForm, omega2: PForm) -> PForm:
    """Conformal KY bracket:
    i_{X_a} w1 ^ i_{X^a} dw2 / (q+1) + (-1)^p i_{X_a} dw1 ^ i_{X^a} w2 / (p+1)
    + (-1)^p w1 ^ delta w2 / (n-q+1) + delta w1 ^ w2 / (n-p+1)."""
    geom = omega1.geom
    p, q, n = omega1.degree, omega2.degree, geom.n
    if p < 1 or q < 1:
        raise forms.DegreeError("CKY bracket needs degrees >= 1")
    if p + q - 1 > n:
        raise forms.DegreeError(f"CKY bracket degree {p + q - 1} exceeds n={n}")
    d1, d2 = ext_d(omega1), ext_d(omega2)
    sgn = 1 if p % 2 == 0 else -1
    out = zero_form(geom, p + q - 1)
    for a in range(n):
        out = out + wedge(interior(a, omega1), contract(a, d2)).scaled(
            tree.Rat(Fraction(1, q + 1)))
        out = out + wedge(interior(a, d1), contract(a, omega2)).scaled(
            tree.Rat(Fraction(sgn, p + 1)))
    out = out + wedge(omega1, coderiv(omega2)).scaled(tree.Rat(Fraction(sgn, n - q + 1)))
    out = out + wedge(coderiv(omega1), omega2).scaled(tree.Rat(Fraction(1, n - p + 1)))
    return out


# ---------------------------------------------------------------------------
# maximal counts

def ky_count(n: int, p: int) -> int:
    """Maximal number of KY p-forms on an n-dimensional constant-curvature
    space: C(n+1, p+1)."""
    if n < 2 or not 1 <= p <= n:
        raise ValueError(f"need n >= 2 and 1 <= p <= n, got n={n}, p={p}")
    return comb(n + 1, p + 1)


def cky_count(n: int, p: int) -> int:
    """Maximal number of CKY p-forms: C(n+2, p+1)."""
    if n < 2 or not 1 <= p <= n:
        raise ValueError(f"need n >= 2 and 1 <= p <= n, got n={n}, p={p}")
    return comb(n + 2, p + 1)


def ky_dims(n: int) -> tuple[int, int]:
    """(odd-degree, even-degree) counts, top degree excluded as in the
    dimension tables."""
    odd = sum(comb(n + 1, 2 * k) for k in range(1, n // 2 + 1))
    even = sum(comb(n + 1, 2 * k + 1) for k in range(1, (n - 1) // 2 + 1))
    return odd, even


def cky_dims(n: int) -> tuple[int, int]:
    odd = sum(comb(n + 2, 2 * k) for k in range(1, n // 2 + 1))
    even = sum(comb(n + 2, 2 * k + 1) for k in range(1, (n - 1) // 2 + 1))
    return odd, even


def cky_minus_ky(n: int, p: int) -> int:
    """Number of CKY p-forms that are not KY: C(n+1, p)."""
    return cky_count(n, p) - ky_count(n, p)


# ---------------------------------------------------------------------------
# built-in families

def translational_forms(geom: geometry.FrameGeometry, p: int) -> list[tuple[str, PForm]]:
    """Constant-coefficient p-forms dx^{A1} ^ ... ^ dx^{Ap} of a flat
    cartesian geometry; count C(n, p)."""
    _require_flat_cartesian(geom)
    out = []
    for idx in itertools.combinations(range(geom.n), p):
        label = "t" + "".join(map(str, idx))
        out.append((label, PForm(geom, p, {idx: tree.ONE})))
    return out


def boost_rotational_forms(geom: geometry.FrameGeometry, p: int) -> list[tuple[str, PForm]]:
    """Linear-coefficient KY p-forms x_[A0 dx^A1 ... dx^Ap] of a flat
    cartesian geometry; count C(n, p+1)."""
    _require_flat_cartesian(geom)
    coords = geom.chart.coordinates
    out = []
    for idx in itertools.combinations(range(geom.n), p + 1):
        comps: dict[tuple, tree.Expr] = {}
        for k, a in enumerate(idx):
            rest = idx[:k] + idx[k + 1:]
            x_low = tree.rmul((tree.Rat(geom.signature[a] * (-1) ** k),
                               tree.Sym(coords[a])))
            comps[rest] = x_low
        label = "b" + "".join(map(str, idx))
        out.append((label, PForm(geom, p, comps)))
    return out


def _require_flat_cartesian(geom):
    for a in range(geom.n):
        for mu in range(geom.n):
            want_one = a == mu
            c = geom.coframe[a][mu]
            ok = (isinstance(c, tree.Rat) and c.value == (1 if want_one else 0))
            if not ok:
                raise geometry.GeometryError("family needs a flat cartesian coframe")


def minkowski_ky(n: int, kind: str, degrees=None, **domain_options) -> FormFamily:
    """Translational or boost/rotational KY family of n-dim Minkowski space."""
    geom = geometry.minkowski(n, **domain_options)
    if kind not in ("translational", "boost_rotational"):
        raise ValueError("kind must be translational|boost_rotational")
    degrees = tuple(degrees) if degrees else tuple(range(1, n))
    members = []
    for p in degrees:
        maker = translational_forms if kind == "translational" else boost_rotational_forms
        role = "translational" if kind == "translational" else "boost-rotational"
        for label, f in maker(geom, p):
            members.append((f"{label}", role, f))
    return FormFamily(name=f"minkowski{n}_{kind}", geometry=geom, members=members)


def ads3_ky(**domain_options) -> FormFamily:
    """The ten-form KY basis of AdS3 (normative packaged data)."""
    from .documents import load_packaged_family
    return load_packaged_family("ads3_ky", **domain_options)


def ads_cky(n: int = 3, **domain_options) -> FormFamily:
    """CKY family of AdS_n: the KY basis plus the pullbacks of the ambient
    translational 1- and 2-forms through the hyperboloid embedding."""
    if n != 3:
        raise ValueError("ads_cky is built in n = 3 only")
    from .documents import _packaged, parse_family_document
    emb = ads_hyperboloid(3, **domain_options)
    base = parse_family_document(_packaged("families", "ads3_ky"),
                                 geometry_resolver=lambda _name: emb.target)
    members = list(base.members)
    for p in (1, 2):
        for label, f in translational_forms(emb.ambient, p):
            members.append((f"u{label[1:]}", "CKY-proper", pullback(emb, f)))
    return FormFamily(name="ads3_cky", geometry=emb.target, members=members,
                      note=base.note)


def builtin_family(name: str, **domain_options) -> FormFamily:
    """Family registry used by the CLI."""
    if name == "ads3_ky":
        return ads3_ky(**domain_options)
    if name in ("ads3_cky", "ads_cky3"):
        return ads_cky(3, **domain_options)
    if name.startswith("minkowski"):
        rest = name[len("minkowski"):]
        parts = rest.split("_", 1)
        if len(parts) == 2 and parts[0].isdigit():
            return minkowski_ky(int(parts[0]), parts[1], **domain_options)
    raise KeyError(f"unknown family '{name}'")
