"""Seeded sample domains and the randomized zero test.

Equality of expressions is decided by evaluation at seeded pseudo-random
points: e == 0 iff |e(p)| <= atol + rtol*scale(p) at every sample point,
where scale(p) is the largest magnitude among the top-level additive terms
of e at p.  Identical seed and domain give bitwise-identical point
sequences and verdicts.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .backend import eval_tape
from .tape import term_tapes
from .tree import DomainError, Expr, evaluate, symbols_of


@dataclass(frozen=True)
class SampleDomain:
    """Per-coordinate closed intervals, parameter values and test knobs."""

    intervals: tuple[tuple[str, float, float], ...]
    params: tuple[tuple[str, float], ...] = ()
    count: int = 64
    seed: int = 42
    atol: float = 1e-9
    rtol: float = 1e-9
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        for name, lo, hi in self.intervals:
            if not lo < hi:
                raise ValueError(f"empty interval for '{name}': [{lo}, {hi}]")

    @property
    def symbol_index(self) -> dict[str, int]:
        idx = {name: i for i, (name, _, _) in enumerate(self.intervals)}
        for name, _ in self.params:
            idx[name] = len(idx)
        return idx

    def points(self, count: int | None = None) -> np.ndarray:
        """(count, nsymbols) array; coordinate columns are uniform draws
        from a PCG64 generator with the domain's seed, parameter columns
        are constant."""
        count = self.count if count is None else count
        key = ("pts", count)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        rng = np.random.default_rng(self.seed)
        cols = [rng.uniform(lo, hi, count) for (_, lo, hi) in self.intervals]
        cols += [np.full(count, value) for (_, value) in self.params]
        pts = np.ascontiguousarray(np.column_stack(cols))
        self._cache[key] = pts
        return pts

    def point_dict(self, row: np.ndarray) -> dict[str, float]:
        names = [name for name, _, _ in self.intervals] + [n for n, _ in self.params]
        return {name: float(row[i]) for i, name in enumerate(names)}

    def with_options(self, **kw) -> "SampleDomain":
        return replace(self, _cache={}, **kw)


@dataclass(frozen=True)
class ZeroVerdict:
    ok: bool
    witness: dict[str, float] | None = None
    value: float | None = None
    max_ratio: float = 0.0

    def __bool__(self):
        return self.ok


def term_values(e: Expr, dom: SampleDomain, points: np.ndarray | None = None) -> np.ndarray:
    """(nterms, npoints) values of the top-level additive terms of e."""
    pts = dom.points() if points is None else points
    tapes = term_tapes(e, dom.symbol_index)
    return np.vstack([eval_tape(t, pts) for t in tapes])


def values(e: Expr, dom: SampleDomain, points: np.ndarray | None = None) -> np.ndarray:
    """(npoints,) values of e, summed over top-level terms in tree order."""
    tv = term_values(e, dom, points)
    return tv.sum(axis=0)


def _check_finite(e: Expr, vals: np.ndarray, dom: SampleDomain, points: np.ndarray):
    bad = ~np.isfinite(vals)
    if bad.any():
        row = points[int(np.argmax(bad))]
        evaluate(e, dom.point_dict(row))  # raises DomainError with context
        raise DomainError("non-finite evaluation", e)  # pragma: no cover


def is_zero(e: Expr, dom: SampleDomain) -> ZeroVerdict:
    """Randomized zero test with a witness on failure."""
    missing = symbols_of(e) - set(dom.symbol_index)
    if missing:
        raise KeyError(f"symbols {sorted(missing)} not covered by the sample domain")
    pts = dom.points()
    tv = term_values(e, dom, pts)
    _check_finite(e, tv.sum(axis=0), dom, pts)
    total = np.abs(tv.sum(axis=0))
    scale = np.abs(tv).max(axis=0)
    bound = dom.atol + dom.rtol * scale
    ratios = total / np.maximum(bound, np.finfo(float).tiny)
    if (total <= bound).all():
        return ZeroVerdict(True, max_ratio=float(ratios.max()))
    i = int(np.argmax(total > bound))
    return ZeroVerdict(False, dom.point_dict(pts[i]), float(tv.sum(axis=0)[i]),
                       float(ratios.max()))


def normalized_residual(exprs: list[Expr], dom: SampleDomain,
                        reference: list[Expr] = ()) -> float:
    """sup-norm of the exprs over the sample points, normalized per point by
    max(1, |reference values|, |own term values|).

    Residual checkers normalize this way so that verdicts are insensitive to
    coordinate regions where the inputs themselves grow large.
    """
    pts = dom.points()
    scale = np.ones(pts.shape[0])
    for ref in reference:
        tv = term_values(ref, dom, pts)
        _check_finite(ref, tv.sum(axis=0), dom, pts)
        scale = np.maximum(scale, np.abs(tv.sum(axis=0)))
    worst = 0.0
    for e in exprs:
        tv = term_values(e, dom, pts)
        vals = tv.sum(axis=0)
        _check_finite(e, vals, dom, pts)
        s = np.maximum(scale, np.abs(tv).max(axis=0))
        worst = max(worst, float((np.abs(vals) / s).max()))
    return worst
