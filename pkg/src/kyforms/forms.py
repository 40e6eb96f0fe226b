"""Exterior algebra over an orthonormal coframe.

A PForm stores expression coefficients on strictly increasing frame
multi-indices; absent indices are zero.  All operations are pure and the
frame index conventions follow the diagonal signature of the owning
geometry: `contract` is the interior product with the raised frame vector,
`interior` with the plain (lowered) one.
"""
from __future__ import annotations

from .exprs import tree
from .exprs.tree import Expr, as_expr, is_zero_literal, radd, rmul

MultiIndex = tuple[int, ...]


class DegreeError(ValueError):
    pass


class PForm:
    __slots__ = ("geom", "degree", "comps")

    def __init__(self, geom, degree: int, comps: dict[MultiIndex, Expr]):
        if not 0 <= degree <= geom.n:
            raise DegreeError(f"degree {degree} out of range for n={geom.n}")
        self.geom = geom
        self.degree = degree
        self.comps = {}
        for idx, coef in comps.items():
            if len(idx) != degree or any(i < 0 or i >= geom.n for i in idx):
                raise ValueError(f"bad multi-index {idx} for degree {degree}")
            if list(idx) != sorted(set(idx)):
                raise ValueError(f"multi-index {idx} must be strictly increasing")
            coef = as_expr(coef)
            if not is_zero_literal(coef):
                self.comps[idx] = coef

    def __repr__(self):
        if not self.comps:
            return f"PForm<deg {self.degree}, 0>"
        parts = [f"[{''.join(map(str, idx))}] {tree.to_text(c)}"
                 for idx, c in sorted(self.comps.items())]
        return f"PForm<deg {self.degree}, " + "; ".join(parts) + ">"

    def coefficient(self, idx: MultiIndex) -> Expr:
        return self.comps.get(tuple(idx), tree.ZERO)

    def is_structurally_zero(self) -> bool:
        return not self.comps

    def __add__(self, other: "PForm") -> "PForm":
        self._compat(other)
        out = dict(self.comps)
        for idx, c in other.comps.items():
            out[idx] = radd((out.get(idx, tree.ZERO), c))
        return PForm(self.geom, self.degree, out)

    def __sub__(self, other: "PForm") -> "PForm":
        return self + other.scaled(-1)

    def __neg__(self) -> "PForm":
        return self.scaled(-1)

    def scaled(self, factor) -> "PForm":
        factor = as_expr(factor)
        return PForm(self.geom, self.degree,
                     {idx: rmul((factor, c)) for idx, c in self.comps.items()})

    def _compat(self, other: "PForm"):
        if self.geom is not other.geom:
            raise ValueError("forms live on different geometries")
        if self.degree != other.degree:
            raise DegreeError(f"degree mismatch {self.degree} != {other.degree}")


def zero_form(geom, degree: int) -> PForm:
    return PForm(geom, degree, {})


def scalar_form(geom, expr) -> PForm:
    return PForm(geom, 0, {(): as_expr(expr)})


def frame_form(geom, *indices: int) -> PForm:
    """e^{a1} ^ ... ^ e^{ap} as a PForm."""
    idx = tuple(indices)
    if len(set(idx)) != len(idx):
        return zero_form(geom, len(idx))
    order, sign = _sort_index(idx)
    return PForm(geom, len(idx), {order: tree.Rat(sign)})


def _sort_index(idx: MultiIndex) -> tuple[MultiIndex, int]:
    lst = list(idx)
    sign = 1
    for i in range(1, len(lst)):
        j = i
        while j > 0 and lst[j - 1] > lst[j]:
            lst[j - 1], lst[j] = lst[j], lst[j - 1]
            sign = -sign
            j -= 1
    return tuple(lst), sign


def _merge(a: MultiIndex, b: MultiIndex) -> tuple[MultiIndex, int] | None:
    """Merge two increasing multi-indices; None when they overlap."""
    if set(a) & set(b):
        return None
    out = []
    sign = 1
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            # b[j] jumps over the remaining len(a)-i entries of a
            if (len(a) - i) % 2:
                sign = -sign
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out), sign


def wedge(alpha: PForm, beta: PForm) -> PForm:
    """Antisymmetrized product; degree overflow is an error, not zero."""
    if alpha.geom is not beta.geom:
        raise ValueError("forms live on different geometries")
    p, q = alpha.degree, beta.degree
    if p + q > alpha.geom.n:
        raise DegreeError(f"wedge degree {p}+{q} exceeds n={alpha.geom.n}")
    out: dict[MultiIndex, list] = {}
    for ia, ca in alpha.comps.items():
        for ib, cb in beta.comps.items():
            merged = _merge(ia, ib)
            if merged is None:
                continue
            idx, sign = merged
            term = rmul((tree.Rat(sign), ca, cb))
            out.setdefault(idx, []).append(term)
    return PForm(alpha.geom, p + q, {idx: radd(ts) for idx, ts in out.items()})


def interior(a: int, omega: PForm) -> PForm:
    """i_{X_a} omega with the plain frame vector (no signature factor)."""
    if omega.degree == 0:
        raise DegreeError("contraction of a 0-form")
    out: dict[MultiIndex, list] = {}
    for idx, c in omega.comps.items():
        if a not in idx:
            continue
        k = idx.index(a)
        rest = idx[:k] + idx[k + 1:]
        term = rmul((tree.Rat((-1) ** k), c))
        out.setdefault(rest, []).append(term)
    return PForm(omega.geom, omega.degree - 1, {i: radd(t) for i, t in out.items()})


def contract(a: int, omega: PForm) -> PForm:
    """i_{X^a} omega, the frame index raised with the diagonal signature."""
    res = interior(a, omega)
    if omega.geom.signature[a] == -1:
        return res.scaled(-1)
    return res


def directional(geom, a: int, f: Expr) -> Expr:
    """Frame-directional derivative X_a(f)."""
    terms = []
    for mu, name in enumerate(geom.chart.coordinates):
        df = tree.diff(f, name)
        if is_zero_literal(df):
            continue
        terms.append(rmul((geom.inv_coframe[mu][a], df)))
    return radd(terms)


def _replace_slot(idx: MultiIndex, k: int, c: int) -> tuple[MultiIndex, int] | None:
    lst = list(idx)
    lst[k] = c
    if len(set(lst)) != len(lst):
        return None
    return _sort_index(tuple(lst))


def cov_d(a: int, omega: PForm) -> PForm:
    """Covariant derivative along the frame vector X_a."""
    geom = omega.geom
    out: dict[MultiIndex, list] = {}
    for idx, c in omega.comps.items():
        dc = directional(geom, a, c)
        if not is_zero_literal(dc):
            out.setdefault(idx, []).append(dc)
        for k, b in enumerate(idx):
            for c_idx in range(geom.n):
                gamma = geom.connection_scalar(b, c_idx, a)  # omega^b_c(X_a)
                if is_zero_literal(gamma):
                    continue
                repl = _replace_slot(idx, k, c_idx)
                if repl is None:
                    continue
                new_idx, sign = repl
                out.setdefault(new_idx, []).append(
                    rmul((tree.Rat(-sign), gamma, c)))
    return PForm(geom, omega.degree, {i: radd(t) for i, t in out.items()})


def ext_d(omega: PForm) -> PForm:
    """Exterior derivative, computed as e^a ^ nabla_{X_a} omega (valid for
    the torsion-free connection carried by the geometry)."""
    geom = omega.geom
    if omega.degree == geom.n:
        return zero_form(geom, geom.n)
    out = zero_form(geom, omega.degree + 1)
    for a in range(geom.n):
        out = out + wedge(frame_form(geom, a), cov_d(a, omega))
    return out


def coderiv(omega: PForm) -> PForm:
    """delta = -i_{X^a} nabla_{X_a}, zero on 0-forms."""
    geom = omega.geom
    if omega.degree == 0:
        return zero_form(geom, 0)
    out = zero_form(geom, omega.degree - 1)
    for a in range(geom.n):
        out = out + contract(a, cov_d(a, omega)).scaled(-1)
    return out


def form_exprs(omega: PForm) -> list[Expr]:
    return list(omega.comps.values())
