"""Generalized Spencer cohomology of a filtered Z-graded Lie superalgebra
with adjoint coefficients.

Cochains are super-skew multilinear maps valued in the algebra; the basis
encodes each elementary cochain as (canonical argument tuple, target index)
where canonical tuples are sorted by basis index with repetitions allowed
only for odd-parity elements.  The differential implements

  df(a_0..a_p) = sum_i (-1)^{i+|a_i|(|f|+|a_0|+..+|a_{i-1}|)} [a_i, f(.. a_i ..)]
               + sum_{i<j} (-1)^{i+j+(|a_i|+|a_j|)(|a_0|+..+|a_{i-1}|)
                              +|a_j|(|a_{i+1}|+..+|a_{j-1}|)}
                            f([a_i,a_j], a_0, .., a_i .., a_j .., a_p)

with exact rational entries; d never mixes filtration degrees.

Two modes: `full` enumerates every super-skew map of the given filtration
degree; `restricted` uses the identity / bracket / double-bracket
generators (one per grade, grade pair, grade triple).  Restricted
generators may span less than their count (zero maps occur when the target
grade is absent); ranks, kernels and images are always computed exactly in
full-cochain coordinates, and H^{d,p} = dim ker d_p - dim im d_{p-1}.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .ratmat import (Matrix, bareiss_rank, is_zero_matrix, matmul, solve,
                     span_dim)
from .superalgebra import StructureConstants, SuperBasis

P_MAX = 3


@dataclass(frozen=True)
class ElementaryCochain:
    args: tuple[int, ...]
    target: int


@dataclass
class CochainBasis:
    """Basis data for C^{d,p}: the full elementary space plus, in
    restricted mode, labeled generator vectors over it."""

    p: int
    d: int
    mode: str
    elems: list[ElementaryCochain]
    generators: list[tuple[str, list[Fraction]]]

    @property
    def generator_count(self) -> int:
        return len(self.generators)

    @property
    def dimension(self) -> int:
        """Span dimension (= generator count in full mode)."""
        if self.mode == "full":
            return len(self.elems)
        return span_dim([v for _, v in self.generators])


def _parities(basis: SuperBasis) -> list[int]:
    return [e.parity for e in basis.elements]


def _grades(basis: SuperBasis) -> list[int]:
    return [e.grade for e in basis.elements]


def canonical_sort(idx: tuple[int, ...], parities) -> tuple[tuple[int, ...], int] | None:
    """Sort an argument tuple into canonical order, tracking the super-skew
    sign; None when a repeated even-parity argument forces zero."""
    lst = list(idx)
    sign = 1
    for i in range(1, len(lst)):
        j = i
        while j > 0 and lst[j - 1] > lst[j]:
            u, v = lst[j - 1], lst[j]
            if not (parities[u] and parities[v]):
                sign = -sign
            lst[j - 1], lst[j] = v, u
            j -= 1
    for a, b in zip(lst, lst[1:]):
        if a == b and parities[a] == 0:
            return None
    return tuple(lst), sign


def _canonical_tuples(basis: SuperBasis, p: int):
    """All canonical argument tuples of length p."""
    parities = _parities(basis)
    n = len(basis)

    def rec(start, length):
        if length == 0:
            yield ()
            return
        for i in range(start, n):
            nxt = i if parities[i] else i + 1
            for rest in rec(nxt, length - 1):
                yield (i,) + rest

    yield from rec(0, p)


def full_space(sc: StructureConstants, p: int, d: int) -> list[ElementaryCochain]:
    """Elementary super-skew p-cochains of filtration degree d."""
    basis = sc.basis
    grades = _grades(basis)
    out = []
    if p == 0:
        for t in range(len(basis)):
            if grades[t] == d:
                out.append(ElementaryCochain((), t))
        return out
    for args in _canonical_tuples(basis, p):
        want = d + sum(grades[i] for i in args)
        for t in range(len(basis)):
            if grades[t] == want:
                out.append(ElementaryCochain(args, t))
    return out


def realized_degrees(sc: StructureConstants, p: int) -> list[int]:
    grades = _grades(sc.basis)
    if not grades:
        return []
    ds = set()
    if p == 0:
        return sorted(set(grades), reverse=True)
    for args in _canonical_tuples(sc.basis, p):
        s = sum(grades[i] for i in args)
        for g in set(grades):
            ds.add(g - s)
    return sorted((d for d in ds if full_space(sc, p, d)), reverse=True)


def _cochain_parity(f: ElementaryCochain, parities) -> int:
    return (parities[f.target] + sum(parities[i] for i in f.args)) % 2


def _d_of_elementary(sc: StructureConstants, f: ElementaryCochain,
                     tuples: list[tuple[int, ...]]) -> dict[tuple[tuple[int, ...], int], Fraction]:
    """Coefficients of df on the given canonical (p+1)-tuples."""
    parities = _parities(sc.basis)
    fpar = _cochain_parity(f, parities)
    out: dict[tuple[tuple[int, ...], int], Fraction] = {}

    def add(tup, target, coeff):
        if coeff:
            key = (tup, target)
            out[key] = out.get(key, Fraction(0)) + coeff

    for B in tuples:
        parB = [parities[b] for b in B]
        prefix = [0]
        for pb in parB:
            prefix.append(prefix[-1] + pb)
        # single-argument terms: (-1)^{i+|a_i|(|f|+|a_0..a_{i-1}|)} [a_i, f(B\i)]
        for i, bi in enumerate(B):
            rest = B[:i] + B[i + 1:]
            if rest != f.args:
                continue
            exp = i + parB[i] * (fpar + prefix[i])
            sign = -1 if exp % 2 else 1
            for t, c in sc.bracket(bi, f.target).items():
                add(B, t, sign * c)
        # pair terms: f([a_i, a_j], ...rest)
        for i in range(len(B)):
            for j in range(i + 1, len(B)):
                rest = B[:i] + B[i + 1:j] + B[j + 1:]
                exp = (i + j + (parB[i] + parB[j]) * prefix[i]
                       + parB[j] * (prefix[j] - prefix[i + 1]))
                sign = -1 if exp % 2 else 1
                for s, c in sc.bracket(B[i], B[j]).items():
                    sorted_tup = canonical_sort((s,) + rest, parities)
                    if sorted_tup is None:
                        continue
                    tup, extra = sorted_tup
                    if tup != f.args:
                        continue
                    add(B, f.target, sign * extra * c)
    return out


def differential_matrix(sc: StructureConstants, p: int, d: int) -> tuple[
        list[ElementaryCochain], list[ElementaryCochain], Matrix]:
    """Full-mode matrix of d: C^{d,p} -> C^{d,p+1}; returns
    (domain basis, codomain basis, matrix with matrix[row][col])."""
    if sc.convention != "super":
        raise ValueError("cohomology needs super-convention structure constants")
    dom = full_space(sc, p, d)
    cod = full_space(sc, p + 1, d)
    tuples = sorted({f.args for f in cod})
    row_index = {(f.args, f.target): r for r, f in enumerate(cod)}
    matrix: Matrix = [[Fraction(0)] * len(dom) for _ in range(len(cod))]
    for col, f in enumerate(dom):
        for (tup, t), coeff in _d_of_elementary(sc, f, tuples).items():
            row = row_index.get((tup, t))
            if row is None:
                if coeff != 0:
                    raise AssertionError("differential left the filtration block")
                continue
            matrix[row][col] = coeff
    return dom, cod, matrix


# ---------------------------------------------------------------------------
# restricted generators

def _grade_label(gs) -> str:
    return "(" + ",".join(str(g) for g in gs) + ")"


def restricted_generators(sc: StructureConstants, p: int, d: int) -> list[
        tuple[str, list[Fraction]]]:
    """Identity / bracket / double-bracket generators expressed over the
    full elementary basis of C^{d,p} (zero vectors possible)."""
    basis = sc.basis
    grades = _grades(basis)
    elems = full_space(sc, p, d)
    index = {(f.args, f.target): r for r, f in enumerate(elems)}
    gens: list[tuple[str, list[Fraction]]] = []

    def vector(entries) -> list[Fraction]:
        v = [Fraction(0)] * len(elems)
        for key, c in entries.items():
            if c == 0:
                continue
            r = index.get(key)
            if r is None:
                raise AssertionError("generator outside the filtration block")
            v[r] += c
        return v

    if p == 0:
        for t in range(len(basis)):
            if grades[t] == d:
                gens.append((basis.elements[t].label, vector({((), t): Fraction(1)})))
        return gens
    if d != 0:
        return []
    if p == 1:
        for g in basis.grades():
            entries = {((i,), i): Fraction(1) for i in basis.by_grade(g)}
            gens.append((f"id{_grade_label([g])}", vector(entries)))
        return gens
    if p == 2:
        for ga, gb in itertools.combinations_with_replacement(basis.grades(), 2):
            entries: dict = {}
            for args in _canonical_tuples(basis, 2):
                if sorted((grades[args[0]], grades[args[1]])) != sorted((ga, gb)):
                    continue
                for t, c in sc.bracket(args[0], args[1]).items():
                    key = (args, t)
                    entries[key] = entries.get(key, Fraction(0)) + c
            gens.append((f"br{_grade_label([ga, gb])}", vector(entries)))
        return gens
    if p == 3:
        for gs in itertools.combinations_with_replacement(basis.grades(), 3):
            entries = {}
            for args in _canonical_tuples(basis, 3):
                if sorted(grades[i] for i in args) != sorted(gs):
                    continue
                i, j, k = args
                for s, c1 in sc.bracket(i, j).items():
                    for t, c2 in sc.bracket(s, k).items():
                        key = (args, t)
                        entries[key] = entries.get(key, Fraction(0)) + c1 * c2
            gens.append((f"brbr{_grade_label(list(gs))}", vector(entries)))
        return gens
    raise ValueError(f"restricted mode supports p <= {P_MAX}")


def cochain_basis(sc: StructureConstants, p: int, d: int, mode: str) -> CochainBasis:
    if not 0 <= p <= P_MAX:
        raise ValueError(f"p must be in 0..{P_MAX}")
    elems = full_space(sc, p, d)
    if mode == "full":
        gens = [(f"e[{','.join(sc.basis.elements[i].label for i in f.args)}->"
                 f"{sc.basis.elements[f.target].label}]",
                 [Fraction(int(r == k)) for r in range(len(elems))])
                for k, f in enumerate(elems)]
        return CochainBasis(p, d, mode, elems, gens)
    if mode == "restricted":
        return CochainBasis(p, d, mode, elems, restricted_generators(sc, p, d))
    raise ValueError("mode must be restricted|full")


def differential(sc: StructureConstants, p: int, d: int, mode: str) -> Matrix:
    """Matrix of d: C^{d,p} -> C^{d,p+1}.  Full mode: elementary-basis
    columns; restricted mode: one column per generator, rows in full
    elementary coordinates of C^{d,p+1}."""
    dom, cod, m = differential_matrix(sc, p, d)
    if mode == "full":
        return m
    gens = restricted_generators(sc, p, d)
    cols = [[v[r] for _, v in gens] for r in range(len(dom))]  # transpose
    return matmul(m, cols)


# ---------------------------------------------------------------------------
# reports

@dataclass
class BlockReport:
    p: int
    d: int
    generator_count: int
    dim: int
    rank: int          # rank of d_p on this block
    kernel: int
    image_from_below: int
    h: int | None      # None for p = P_MAX (d_{p+1} not built)


@dataclass
class ComplexReport:
    mode: str
    blocks: list[BlockReport] = field(default_factory=list)
    d_squared_zero: bool = True
    rigid: bool | None = None

    def h_total(self, p: int) -> int:
        return sum(b.h for b in self.blocks if b.p == p and b.h is not None)

    def block(self, p: int, d: int) -> BlockReport:
        for b in self.blocks:
            if b.p == p and b.d == d:
                return b
        raise KeyError((p, d))


def _rank(matrix: Matrix) -> int:
    if not matrix or not matrix[0]:
        return 0
    return bareiss_rank([row[:] for row in matrix])


def cohomology_dims(sc: StructureConstants, mode: str) -> ComplexReport:
    """Ranks and cohomology dimensions per (p, filtration degree) block,
    by exact fraction-free elimination.  H^{d,p} = ker d_p - im d_{p-1};
    the p = 3 row reports no H (its outgoing differential is not built).
    In restricted mode all generators sit in filtration degree 0."""
    report = ComplexReport(mode=mode)
    degrees = {0} if mode == "restricted" else set()
    if mode == "full":
        for p in range(P_MAX + 1):
            degrees.update(realized_degrees(sc, p))
    for d in sorted(degrees, reverse=True):
        fulls = {p: differential_matrix(sc, p, d) for p in range(P_MAX)}
        bases = {p: cochain_basis(sc, p, d, mode) for p in range(P_MAX + 1)}
        mats: dict[int, Matrix] = {}
        for p in range(P_MAX):
            if mode == "full":
                mats[p] = fulls[p][2]
            else:
                gens = bases[p].generators
                cols = [[v[r] for _, v in gens] for r in range(len(fulls[p][0]))]
                mats[p] = matmul(fulls[p][2], cols)
        # d * d = 0, composed in full coordinates in both modes
        for p in range(P_MAX - 1):
            mp = mats[p]
            if not mp or not mp[0]:
                continue
            comp = matmul(fulls[p + 1][2], mp)
            if comp and not is_zero_matrix(comp):
                report.d_squared_zero = False
        for p in range(P_MAX + 1):
            cb = bases[p]
            dim = cb.dimension
            if p < P_MAX:
                rank = _rank(mats[p])
                kernel = dim - rank
            else:
                rank = 0
                kernel = dim
            if p == 0:
                image = 0
            elif mode == "full":
                image = _rank(mats[p - 1])
            else:
                # image of the restricted complex: the part of im d_{p-1}
                # that lies inside the restricted span of C^{d,p}
                prev = mats[p - 1]
                img = ([[row[c] for row in prev] for c in range(len(prev[0]))]
                       if prev and prev[0] else [])
                img = [v for v in img if any(x != 0 for x in v)]
                gens = [v for _, v in cb.generators if any(x != 0 for x in v)]
                du, dw = span_dim(img), span_dim(gens)
                image = du + dw - span_dim(img + gens)
            h = None if p == P_MAX else kernel - image
            report.blocks.append(BlockReport(p=p, d=d,
                                             generator_count=len(cb.generators),
                                             dim=dim, rank=rank, kernel=kernel,
                                             image_from_below=image, h=h))
    if mode == "restricted":
        report.rigid = report.h_total(2) == 0
    return report


@dataclass
class ProbeVerdict:
    cocycle: bool
    exact: bool | None
    preimage: list[Fraction] | None


def deformation_probe(sc: StructureConstants, candidate: list[Fraction],
                      mode: str = "restricted", d: int = 0) -> ProbeVerdict:
    """Decide whether a 2-cochain (coefficients over the C^{d,2} basis of
    the given mode) is a cocycle and, if so, whether it is exact."""
    c2 = cochain_basis(sc, 2, d, mode)
    if len(candidate) != len(c2.generators):
        raise ValueError(f"candidate needs {len(c2.generators)} coefficients")
    vec = [Fraction(0)] * len(c2.elems)
    for c, (_, gv) in zip(candidate, c2.generators):
        for r in range(len(vec)):
            vec[r] += Fraction(c) * gv[r]
    _, _, d2 = differential_matrix(sc, 2, d)
    image = [sum(row[k] * vec[k] for k in range(len(vec))) for row in d2] if d2 else []
    if any(x != 0 for x in image):
        return ProbeVerdict(cocycle=False, exact=None, preimage=None)
    d1 = differential(sc, 1, d, mode)
    if not d1:
        exact = all(x == 0 for x in vec)
        return ProbeVerdict(cocycle=True, exact=exact, preimage=[] if exact else None)
    x = solve([row[:] for row in d1], vec)
    return ProbeVerdict(cocycle=True, exact=x is not None, preimage=x)
