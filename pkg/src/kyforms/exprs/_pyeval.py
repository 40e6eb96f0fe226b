"""Pure-Python (numpy-vectorized) tape evaluator.

Import-time fallback when the compiled kernel is unavailable.  Executes the
identical instruction stream as the Cython kernel; domain violations yield
nan/inf silently (callers re-walk the tree for a precise error).
"""
from __future__ import annotations

import numpy as np

from .tape import (OP_ADD, OP_CONST, OP_COS, OP_COSH, OP_DIV, OP_EXP, OP_IPOW,
                   OP_LOAD, OP_LOG, OP_MUL, OP_SIN, OP_SINH, OP_SQRT, OP_TANH,
                   Tape)

BACKEND = "python"

_UNARY = {
    OP_SQRT: np.sqrt,
    OP_SIN: np.sin,
    OP_COS: np.cos,
    OP_SINH: np.sinh,
    OP_COSH: np.cosh,
    OP_TANH: np.tanh,
    OP_EXP: np.exp,
    OP_LOG: np.log,
}


def eval_tape(tape: Tape, points: np.ndarray) -> np.ndarray:
    """Evaluate at all rows of points (npoints, nsymbols) -> (npoints,)."""
    npts = points.shape[0]
    stack: list[np.ndarray] = []
    with np.errstate(all="ignore"):
        for op, arg in zip(tape.ops, tape.args):
            if op == OP_CONST:
                stack.append(np.full(npts, tape.consts[arg]))
            elif op == OP_LOAD:
                stack.append(points[:, arg].copy())
            elif op == OP_ADD:
                b = stack.pop()
                stack[-1] = stack[-1] + b
            elif op == OP_MUL:
                b = stack.pop()
                stack[-1] = stack[-1] * b
            elif op == OP_DIV:
                b = stack.pop()
                stack[-1] = stack[-1] / b
            elif op == OP_IPOW:
                stack[-1] = _ipow(stack[-1], int(arg))
            else:
                stack[-1] = _UNARY[op](stack[-1])
    return stack[-1]


def _ipow(x: np.ndarray, k: int) -> np.ndarray:
    # binary exponentiation; same multiplication order as the C kernel
    neg = k < 0
    if neg:
        k = -k
    acc = np.ones_like(x)
    base = x
    while k:
        if k & 1:
            acc = acc * base
        base = base * base
        k >>= 1
    if neg:
        with np.errstate(all="ignore"):
            return 1.0 / acc
    return acc
