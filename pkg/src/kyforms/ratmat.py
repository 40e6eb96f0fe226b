"""Exact rational linear algebra and float rationalization.

Rank/kernel/solve use fraction-free (Bareiss) elimination over integers
after clearing denominators, so cohomology dimensions are exact integers.
Floats are converted to small rationals by continued-fraction convergents.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd

Matrix = list[list[Fraction]]


def rationalize(x: float, max_den: int = 64, tol: float = 1e-9) -> Fraction | None:
    """Nearest continued-fraction convergent with denominator <= max_den,
    accepted only within tol of x (scaled by max(1, |x|)); None otherwise."""
    if x != x or x in (float("inf"), float("-inf")):
        return None
    p0, q0, p1, q1 = 0, 1, 1, 0
    a = x
    for _ in range(64):
        ai = int(a // 1)
        p0, q0, p1, q1 = p1, q1, ai * p1 + p0, ai * q1 + q0
        if q1 > max_den:
            break
        cand = Fraction(p1, q1)
        if abs(float(cand) - x) <= tol * max(1.0, abs(x)):
            return cand
        frac = a - ai
        if frac == 0:
            break
        a = 1.0 / frac
    return None


def _int_rows(m: Matrix) -> list[list[int]]:
    out = []
    for row in m:
        lcm = 1
        for x in row:
            lcm = lcm * x.denominator // gcd(lcm, x.denominator)
        out.append([int(x * lcm) for x in row])
    return out


def bareiss_rank(m: Matrix) -> int:
    """Rank by fraction-free Gaussian elimination."""
    if not m or not m[0]:
        return 0
    a = _int_rows(m)
    rows, cols = len(a), len(a[0])
    rank = 0
    prev = 1
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) // prev
            a[i][c] = 0
        prev = a[r][c]
        r += 1
        rank += 1
        if r == rows:
            break
    return rank


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form over Fractions; returns (R, pivot columns)."""
    a = [row[:] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def nullspace(m: Matrix, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of the right kernel."""
    cols = ncols if ncols is not None else (len(m[0]) if m else 0)
    if not m:
        return [[Fraction(int(i == j)) for j in range(cols)] for i in range(cols)]
    r, pivots = rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -r[i][fc]
        basis.append(v)
    return basis


def solve(m: Matrix, b: list[Fraction]) -> list[Fraction] | None:
    """One solution of m x = b, or None when inconsistent."""
    if not m:
        return [] if all(x == 0 for x in b) else None
    cols = len(m[0])
    aug = [row[:] + [bv] for row, bv in zip(m, b)]
    r, pivots = rref(aug)
    for row in r:
        if all(x == 0 for x in row[:cols]) and row[cols] != 0:
            return None
    x = [Fraction(0)] * cols
    for i, pc in enumerate(pivots):
        if pc < cols:
            x[pc] = r[i][cols]
    return x


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a or not b:
        return []
    rows, inner, cols = len(a), len(b), len(b[0])
    out = [[Fraction(0)] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        for k in range(inner):
            f = ai[k]
            if f == 0:
                continue
            bk = b[k]
            row = out[i]
            for j in range(cols):
                if bk[j] != 0:
                    row[j] += f * bk[j]
    return out


def is_zero_matrix(m: Matrix) -> bool:
    return all(x == 0 for row in m for x in row)


def span_dim(vectors: list[list[Fraction]]) -> int:
    return bareiss_rank([v[:] for v in vectors]) if vectors else 0


def in_span(vectors: list[list[Fraction]], v: list[Fraction]) -> bool:
    if all(x == 0 for x in v):
        return True
    if not vectors:
        return False
    base = span_dim(vectors)
    return span_dim(vectors + [v]) == base
