"""Lowering of expression trees to flat instruction tapes.

A tape is a postfix program over a scalar stack; both evaluator backends
(the Cython kernel and the numpy fallback) execute the same tape with the
same operation order, so results are reproducible across runs and agree
between backends to the last ulp for arithmetic and powers.
"""
from __future__ import annotations

import numpy as np

from . import tree
from .tree import Expr

OP_CONST = 0
OP_LOAD = 1
OP_ADD = 2
OP_MUL = 3
OP_DIV = 4
OP_IPOW = 5
OP_SQRT = 6
OP_SIN = 7
OP_COS = 8
OP_SINH = 9
OP_COSH = 10
OP_TANH = 11
OP_EXP = 12
OP_LOG = 13

_FUN_OPS = {
    "sin": OP_SIN,
    "cos": OP_COS,
    "sinh": OP_SINH,
    "cosh": OP_COSH,
    "tanh": OP_TANH,
    "exp": OP_EXP,
    "log": OP_LOG,
}


class Tape:
    __slots__ = ("ops", "args", "consts", "depth")

    def __init__(self, ops, args, consts, depth):
        self.ops = np.asarray(ops, dtype=np.int32)
        self.args = np.asarray(args, dtype=np.int32)
        self.consts = np.asarray(consts, dtype=np.float64)
        self.depth = depth


def lower(e: Expr, symbol_index: dict[str, int]) -> Tape:
    ops: list[int] = []
    args: list[int] = []
    consts: list[float] = []

    def emit(op, arg=0):
        ops.append(op)
        args.append(arg)

    def walk(n: Expr):
        if isinstance(n, tree.Rat):
            consts.append(float(n.value))
            emit(OP_CONST, len(consts) - 1)
        elif isinstance(n, tree.Sym):
            emit(OP_LOAD, symbol_index[n.name])
        elif isinstance(n, tree.Add):
            walk(n.terms[0])
            for t in n.terms[1:]:
                walk(t)
                emit(OP_ADD)
        elif isinstance(n, tree.Mul):
            walk(n.factors[0])
            for f in n.factors[1:]:
                walk(f)
                emit(OP_MUL)
        elif isinstance(n, tree.Div):
            walk(n.num)
            walk(n.den)
            emit(OP_DIV)
        elif isinstance(n, tree.Pow):
            walk(n.base)
            if n.exponent.denominator == 2:
                emit(OP_SQRT)
            k = n.exponent.numerator
            if k != 1:
                emit(OP_IPOW, k)
        elif isinstance(n, tree.Fun):
            walk(n.arg)
            emit(_FUN_OPS[n.name])
        else:  # pragma: no cover
            raise TypeError(type(n).__name__)

    walk(e)

    depth = peak = 0
    for op in ops:
        if op in (OP_CONST, OP_LOAD):
            depth += 1
            peak = max(peak, depth)
        elif op in (OP_ADD, OP_MUL, OP_DIV):
            depth -= 1
    return Tape(ops, args, consts, peak)


def term_tapes(e: Expr, symbol_index: dict[str, int]) -> list[Tape]:
    """One tape per top-level additive term (the is_zero scale needs
    per-term magnitudes); cached on the expression node."""
    key = tuple(sorted(symbol_index.items()))
    cache = getattr(e, "_tapes", None)
    if cache is None:
        cache = {}
        e._tapes = cache
    hit = cache.get(key)
    if hit is None:
        hit = [lower(t, symbol_index) for t in tree.top_terms(e)]
        cache[key] = hit
    return hit
