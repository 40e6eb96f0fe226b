"""Hyperboloid embeddings and pullback of forms.

An n-dimensional anti-de Sitter space sits inside flat (n+1)-dimensional
space of signature (n-1, 2) as the quadric <X, X> = -l^2; the coordinate
map below induces exactly the static chart metric, which is machine-checked
by `metric_residual`.
"""
from __future__ import annotations

import itertools

from . import forms, geometry
from .exprs import tree
from .exprs.sample import normalized_residual
from .exprs.tree import Expr, is_zero_literal, radd, rmul, substitute
from .forms import PForm


class Embedding:
    """Flat ambient geometry, target geometry and the coordinate map
    (ambient coordinates as expressions over the target chart)."""

    def __init__(self, ambient, target, coord_map):
        if len(coord_map) != ambient.n:
            raise ValueError("coordinate map must give every ambient coordinate")
        self.ambient = ambient
        self.target = target
        self.coord_map = tuple(coord_map)
        self.jacobian = [[tree.diff(f, c) for c in target.chart.coordinates]
                         for f in self.coord_map]  # [A][mu]


def _slot_det(matrix_rows, cols) -> Expr:
    """det of matrix restricted to the given rows/cols (size <= 3)."""
    size = len(cols)
    terms = []
    for perm in itertools.permutations(range(size)):
        sign = 1
        for i in range(size):
            for j in range(i + 1, size):
                if perm[i] > perm[j]:
                    sign = -sign
        fac = [matrix_rows[i][cols[perm[i]]] for i in range(size)]
        if any(is_zero_literal(f) for f in fac):
            continue
        terms.append(rmul((tree.Rat(sign), *fac)))
    return radd(terms)


def _transform(comps: dict, matrix, n_out: int, degree: int) -> dict:
    """Push components through one matrix factor per slot:
    out[j1<..<jp] = sum_{i1<..<ip} comps[i..] det(matrix[i_k][j_l])."""
    if degree == 0:
        return dict(comps)
    out: dict[tuple, list] = {}
    for idx, coef in comps.items():
        if is_zero_literal(coef):
            continue
        rows = [matrix[i] for i in idx]
        for jdx in itertools.combinations(range(n_out), degree):
            d = _slot_det(rows, jdx)
            if is_zero_literal(d):
                continue
            out.setdefault(jdx, []).append(rmul((coef, d)))
    return {idx: radd(ts) for idx, ts in out.items()}


def pullback(emb: Embedding, ambient_form: PForm) -> PForm:
    """Pull an ambient form back through the embedding, expressed in the
    target coframe.  Linear over sums and compatible with the wedge."""
    if ambient_form.geom is not emb.ambient:
        raise ValueError("form does not live on the ambient geometry")
    p = ambient_form.degree
    amb, tgt = emb.ambient, emb.target
    mapping = dict(zip(amb.chart.coordinates, emb.coord_map))

    # ambient frame -> ambient coordinate components
    coord = _transform(ambient_form.comps, amb.coframe, amb.n, p)
    # substitute the coordinate map into the coefficients
    coord = {idx: substitute(c, mapping) for idx, c in coord.items()}
    # ambient coordinate -> target coordinate components via the Jacobian
    pulled = _transform(coord, emb.jacobian, tgt.n, p)
    # target coordinate -> target frame components
    frame = _transform(pulled, tgt.inv_coframe, tgt.n, p)
    return PForm(tgt, p, frame)


def metric_residual(emb: Embedding) -> float:
    """sup-norm defect of (pullback of ambient metric) - target metric."""
    tgt, amb = emb.target, emb.ambient
    worst = 0.0
    for mu in range(tgt.n):
        for nu in range(mu, tgt.n):
            pulled = []
            for a in range(amb.n):
                da_mu = radd(rmul((amb.coframe[a][A], emb.jacobian[A][mu]))
                             for A in range(amb.n))
                da_nu = radd(rmul((amb.coframe[a][A], emb.jacobian[A][nu]))
                             for A in range(amb.n))
                term = rmul((tree.Rat(amb.signature[a]),
                             substitute(da_mu, dict(zip(amb.chart.coordinates, emb.coord_map))),
                             substitute(da_nu, dict(zip(amb.chart.coordinates, emb.coord_map)))))
                pulled.append(term)
            resid = radd(pulled) - tgt.metric_coordinate(mu, nu)
            worst = max(worst, normalized_residual(
                [resid], tgt.domain, [tgt.metric_coordinate(mu, nu)]))
    return worst


def ads_hyperboloid(n: int, l: float = 1.0, **domain_options) -> Embedding:
    """Static AdS_n as the quadric <X,X> = -l^2 in flat signature (n-1, 2).

    The two timelike ambient directions are X0 and Xn; the map
    X0 = l f cos(t/l), Xn = l f sin(t/l), middle slots = r * (unit sphere)
    induces the static chart metric with f = (r^2/l^2 + 1)^(1/2).
    """
    if n not in (3, 4, 5):
        raise geometry.GeometryError("ads_hyperboloid supports n in {3, 4, 5}")
    target = geometry.ads_static(n, l=l, **domain_options)
    signature = (-1,) + (1,) * (n - 1) + (-1,)
    ambient = geometry.flat(signature, name=f"ads{n}_ambient",
                            coordinate_names=tuple(f"X{i}" for i in range(n + 1)),
                            **domain_options)
    ch = target.chart
    f = ch.parse("(r^2/l^2+1)^(1/2)")
    lsym = tree.Sym("l")
    tsym = tree.Sym("t")
    rsym = tree.Sym("r")

    angles = list(ch.coordinates[2:])
    sphere = _unit_sphere_embedding(angles)

    coord_map = [rmul((lsym, f, tree.fun("cos", tree.rdiv(tsym, lsym))))]
    coord_map += [rmul((rsym, comp)) for comp in sphere]
    coord_map.append(rmul((lsym, f, tree.fun("sin", tree.rdiv(tsym, lsym)))))
    return Embedding(ambient, target, coord_map)


def _unit_sphere_embedding(angles: list[str]) -> list[Expr]:
    """Cartesian components of the unit sphere S^k for the angle list,
    e.g. [phi] -> (cos phi, sin phi); [theta, phi] -> (cos theta,
    sin theta cos phi, sin theta sin phi)."""
    if not angles:
        return [tree.ONE]
    head, rest = tree.Sym(angles[0]), angles[1:]
    inner = _unit_sphere_embedding(rest)
    out = [tree.fun("cos", head)]
    out += [rmul((tree.fun("sin", head), comp)) for comp in inner]
    return out
