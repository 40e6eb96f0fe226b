"""Pseudo-Riemannian geometry from a chart plus orthonormal coframe.

The Levi-Civita connection is solved from the first structure equation
de^a + w^a_b ^ e^b = 0 together with metric compatibility w_{ab} = -w_{ba};
curvature, Ricci 1-forms, the curvature scalar and the constant-curvature
coefficient follow.  Built-in geometries (Minkowski, static anti-de Sitter)
are loaded from the packaged manifold documents.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import forms
from .exprs import parse as _parse
from .exprs import tree
from .exprs.sample import SampleDomain, is_zero, values
from .exprs.tree import Expr, is_zero_literal, radd, rdiv, rmul
from .forms import PForm
from .ratmat import rationalize


@dataclass(frozen=True)
class Chart:
    name: str
    coordinates: tuple[str, ...]
    parameters: tuple[tuple[str, float], ...]
    domain: SampleDomain

    def __post_init__(self):
        if len(self.coordinates) < 2:
            raise ValueError("charts need dimension >= 2")
        if len(set(self.coordinates)) != len(self.coordinates):
            raise ValueError("coordinate names must be distinct")

    @property
    def n(self) -> int:
        return len(self.coordinates)

    @property
    def symbols(self) -> frozenset[str]:
        return frozenset(self.coordinates) | {p for p, _ in self.parameters}

    def parse(self, text: str) -> Expr:
        return _parse(text, self.symbols)


def make_chart(name, coordinates, parameters, intervals, *, count=64, seed=42,
               atol=1e-9, rtol=1e-9) -> Chart:
    dom = SampleDomain(intervals=tuple((c, float(lo), float(hi)) for c, (lo, hi) in
                                       zip(coordinates, intervals)),
                       params=tuple((p, float(v)) for p, v in parameters),
                       count=count, seed=seed, atol=atol, rtol=rtol)
    return Chart(name, tuple(coordinates), tuple((p, float(v)) for p, v in parameters), dom)


class GeometryError(ValueError):
    pass


class FrameGeometry:
    """Chart + signature + coframe, with connection and curvature data.

    Immutable after construction by `levi_civita` / `curvature`.
    """

    def __init__(self, chart: Chart, signature, coframe):
        n = chart.n
        signature = tuple(int(s) for s in signature)
        if len(signature) != n or any(s not in (-1, 1) for s in signature):
            raise GeometryError("signature must be a list of +-1 of length n")
        self.chart = chart
        self.signature = signature
        self.coframe = [[tree.as_expr(c) for c in row] for row in coframe]
        if len(self.coframe) != n or any(len(r) != n for r in self.coframe):
            raise GeometryError("coframe must be an n x n expression matrix")
        self.inv_coframe = _invert_matrix(self.coframe)  # [mu][a]
        self.connection: list[list[PForm]] | None = None
        self.curvature_forms: list[list[PForm]] | None = None
        self.ricci_forms: list[PForm] | None = None
        self.scalar_curvature: Expr | None = None
        self.kappa: Expr | None = None

    @property
    def n(self) -> int:
        return self.chart.n

    @property
    def domain(self) -> SampleDomain:
        return self.chart.domain

    def connection_scalar(self, b: int, c: int, a: int) -> Expr:
        """w^b_c(X_a)."""
        return self.connection[b][c].coefficient((a,))

    def metric_coordinate(self, mu: int, nu: int) -> Expr:
        """g_{mu nu} = sum_a eta_a C[a][mu] C[a][nu]."""
        terms = []
        for a in range(self.n):
            t = rmul((tree.Rat(self.signature[a]), self.coframe[a][mu], self.coframe[a][nu]))
            if not is_zero_literal(t):
                terms.append(t)
        return radd(terms)


def _det(m: list[list[Expr]]) -> Expr:
    n = len(m)
    if n == 1:
        return m[0][0]
    terms = []
    for j in range(n):
        if is_zero_literal(m[0][j]):
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        terms.append(rmul((tree.Rat((-1) ** j), m[0][j], _det(minor))))
    return radd(terms)


def _invert_matrix(c: list[list[Expr]]) -> list[list[Expr]]:
    """Symbolic inverse; entry [mu][a] gives dx^mu = sum_a inv[mu][a] e^a."""
    n = len(c)
    if all(is_zero_literal(c[a][mu]) for a in range(n) for mu in range(n) if a != mu):
        inv = [[tree.ZERO] * n for _ in range(n)]
        for a in range(n):
            inv[a][a] = rdiv(tree.ONE, c[a][a])
        return inv
    det = _det(c)
    inv = [[tree.ZERO] * n for _ in range(n)]
    for mu in range(n):
        for a in range(n):
            minor = [[c[i][j] for j in range(n) if j != mu]
                     for i in range(n) if i != a]
            cof = rmul((tree.Rat((-1) ** (a + mu)), _det(minor))) if n > 1 else tree.ONE
            inv[mu][a] = rdiv(cof, det)
    return inv


def _coord_two_form_to_frame(geom: FrameGeometry,
                             coord: dict[tuple[int, int], Expr]) -> dict[tuple[int, int], Expr]:
    """Convert sum_{nu<mu} w dx^nu^dx^mu into frame components."""
    n = geom.n
    out: dict[tuple[int, int], list] = {}
    inv = geom.inv_coframe
    for (nu, mu), w in coord.items():
        if is_zero_literal(w):
            continue
        for b in range(n):
            for c in range(b + 1, n):
                coef = radd((rmul((inv[nu][b], inv[mu][c])),
                             rmul((tree.MINUS_ONE, inv[nu][c], inv[mu][b]))))
                if is_zero_literal(coef):
                    continue
                out.setdefault((b, c), []).append(rmul((w, coef)))
    return {idx: radd(ts) for idx, ts in out.items()}


def coordinate_exterior_derivative_of_coframe(geom: FrameGeometry, a: int) -> dict:
    """de^a as coordinate 2-form components {(nu<mu): expr}."""
    out = {}
    for mu in range(geom.n):
        for nu in range(mu):
            e = radd((tree.diff(geom.coframe[a][mu], geom.chart.coordinates[nu]),
                      rmul((tree.MINUS_ONE,
                            tree.diff(geom.coframe[a][nu], geom.chart.coordinates[mu])))))
            if not is_zero_literal(e):
                out[(nu, mu)] = e
    return out


def check_invertible(geom: FrameGeometry):
    det = _det(geom.coframe)
    pts = geom.domain.points()
    vals = values(det, geom.domain, pts)
    bad = np.abs(vals) < 1e-12
    if bad.any():
        row = pts[int(np.argmax(bad))]
        raise GeometryError(f"coframe degenerate at sample point {geom.domain.point_dict(row)}")


def levi_civita(chart: Chart, signature, coframe) -> FrameGeometry:
    """Unique metric-compatible torsion-free connection of the coframe.

    Solves K_{abc} from de^a and sets Gamma_{ab,c} = (K_abc + K_bca - K_cab)/2,
    which is the unique antisymmetric solution of de^a = -w^a_b ^ e^b.
    """
    geom = FrameGeometry(chart, signature, coframe)
    check_invertible(geom)
    n = geom.n
    eta = geom.signature

    K: list[dict[tuple[int, int], Expr]] = []
    for a in range(n):
        coord = coordinate_exterior_derivative_of_coframe(geom, a)
        K.append(_coord_two_form_to_frame(geom, coord))

    def k_low(a, b, c):
        # K_{abc} with the first index lowered; antisymmetric in (b, c)
        if b == c:
            return tree.ZERO
        sign = 1 if b < c else -1
        val = K[a].get((min(b, c), max(b, c)), tree.ZERO)
        return rmul((tree.Rat(sign * eta[a]), val))

    conn = [[forms.zero_form(geom, 1) for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            comps = {}
            for c in range(n):
                gamma = rmul((tree.Rat(Fraction(1, 2)),
                              radd((k_low(a, b, c), k_low(b, c, a),
                                    rmul((tree.MINUS_ONE, k_low(c, a, b)))))))
                # w^a_b = eta^{aa} Gamma_{ab}
                gamma = rmul((tree.Rat(eta[a]), gamma))
                if not is_zero_literal(gamma):
                    comps[(c,)] = gamma
            conn[a][b] = PForm(geom, 1, comps)
    geom.connection = conn
    return geom


def curvature(geom: FrameGeometry) -> FrameGeometry:
    """Fill curvature 2-forms R^a_b = dw^a_b + w^a_c ^ w^c_b, the Ricci
    1-forms P_a = i_{X^b} R_{ba}, the curvature scalar and, when the space
    has constant curvature, the coefficient kappa with R_ab = kappa e_a^e_b."""
    if geom.connection is None:
        raise GeometryError("connection missing; build with levi_civita")
    if geom.curvature_forms is not None:
        return geom
    n = geom.n
    eta = geom.signature
    R = [[forms.zero_form(geom, 2) for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            acc = forms.ext_d(geom.connection[a][b])
            for c in range(n):
                acc = acc + forms.wedge(geom.connection[a][c], geom.connection[c][b])
            R[a][b] = acc
    geom.curvature_forms = R

    # P_a = i_{X^b} R_{ba} = sum_b i_{X_b} R^b_a  (eta factors cancel)
    P = []
    for a in range(n):
        acc = forms.zero_form(geom, 1)
        for b in range(n):
            if not R[b][a].is_structurally_zero():
                acc = acc + forms.interior(b, R[b][a])
        P.append(acc)
    geom.ricci_forms = P

    scal = []
    for a in range(n):
        c = forms.contract(a, P[a])
        if not c.is_structurally_zero():
            scal.append(c.coefficient(()))
    geom.scalar_curvature = radd(scal)

    geom.kappa = _fit_kappa(geom)
    return geom


def _fit_kappa(geom: FrameGeometry) -> Expr | None:
    """kappa from a ratio at one sample point, then verified everywhere."""
    n, eta = geom.n, geom.signature
    dom = geom.domain
    pts = dom.points()

    def lowered(a, b):
        return geom.curvature_forms[a][b].scaled(eta[a])

    candidate = None
    for a in range(n):
        for b in range(a + 1, n):
            rab = lowered(a, b)
            coef = rab.coefficient((a, b))
            if is_zero_literal(coef):
                continue
            # e_a ^ e_b has coefficient eta_a*eta_b on the (a,b) slot
            vals = values(coef, dom, pts) * (eta[a] * eta[b])
            candidate = float(vals[0])
            break
        if candidate is not None:
            break
    if candidate is None:
        candidate = 0.0
    frac = rationalize(candidate, max_den=64, tol=1e-9)
    kappa = tree.Rat(frac if frac is not None else Fraction(candidate))
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            basis = forms.wedge(forms.frame_form(geom, a).scaled(eta[a]),
                                forms.frame_form(geom, b).scaled(eta[b]))
            resid = lowered(a, b) - basis.scaled(kappa)
            for e in forms.form_exprs(resid):
                if not is_zero(e, dom):
                    return None
    return kappa


def is_einstein(geom: FrameGeometry) -> tuple[bool, float]:
    """P_a proportional to the lowered coframe, P_a = (R/n) e_a;
    returns (ok, max defect)."""
    curvature(geom)
    from .exprs.sample import normalized_residual
    worst = 0.0
    factor = rmul((tree.Rat(Fraction(1, geom.n)), geom.scalar_curvature))
    for a in range(geom.n):
        e_low = forms.frame_form(geom, a).scaled(geom.signature[a])
        resid = geom.ricci_forms[a] - e_low.scaled(factor)
        exprs = forms.form_exprs(resid)
        if not exprs:
            continue
        worst = max(worst, normalized_residual(exprs, geom.domain,
                                               forms.form_exprs(geom.ricci_forms[a])))
    return worst < 1e-8, worst


def k_one_forms(geom: FrameGeometry) -> list[PForm]:
    """K_a = ((R/(2(n-1))) e_a - P_a) / (n-2), frame index lowered."""
    curvature(geom)
    n = geom.n
    if n == 2:
        raise GeometryError("K_a needs n >= 3")
    out = []
    for a in range(n):
        ea = forms.frame_form(geom, a).scaled(geom.signature[a])
        term = ea.scaled(rmul((tree.Rat(Fraction(1, 2 * (n - 1))), geom.scalar_curvature)))
        out.append((term - geom.ricci_forms[a]).scaled(tree.Rat(Fraction(1, n - 2))))
    return out


# ---------------------------------------------------------------------------
# built-in geometries

def flat(signature, *, name=None, coordinate_names=None, box=2.0,
         count=64, seed=42, atol=1e-9, rtol=1e-9) -> FrameGeometry:
    """Flat space with cartesian identity coframe and the given signature."""
    n = len(signature)
    coords = coordinate_names or tuple(f"x{i}" for i in range(n))
    chart = make_chart(name or f"flat{n}", coords, (),
                       [(-box, box)] * n, count=count, seed=seed,
                       atol=atol, rtol=rtol)
    eye = [[tree.ONE if a == mu else tree.ZERO for mu in range(n)] for a in range(n)]
    return curvature(levi_civita(chart, signature, eye))


def minkowski(n: int, **kw) -> FrameGeometry:
    """n-dimensional Minkowski space, signature (-,+,...,+)."""
    if n < 2:
        raise GeometryError("minkowski needs n >= 2")
    return flat((-1,) + (1,) * (n - 1), name=f"minkowski{n}", **kw)


def builtin(name: str, **kw) -> FrameGeometry:
    """Geometry by document name from the packaged data files."""
    from .documents import load_packaged_manifold
    return load_packaged_manifold(name, **kw)


def ads_static(n: int, l: float = 1.0, **domain_options) -> FrameGeometry:
    """Static anti-de Sitter chart in n = 3, 4 or 5 dimensions."""
    if n not in (3, 4, 5):
        raise GeometryError("ads_static supports n in {3, 4, 5}")
    return builtin(f"ads{n}", parameter_overrides={"l": l}, **domain_options)
