# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tape evaluator: scalar stack machine over C doubles.

Executes the same instruction stream as the numpy fallback; division by
zero and out-of-domain math yield inf/nan per IEEE (no exceptions), a
careful tree walk reports precise errors afterwards if needed.
"""
from libc.math cimport sin, cos, sinh, cosh, tanh, exp, log, sqrt

import numpy as np

BACKEND = "compiled"

DEF OP_CONST = 0
DEF OP_LOAD = 1
DEF OP_ADD = 2
DEF OP_MUL = 3
DEF OP_DIV = 4
DEF OP_IPOW = 5
DEF OP_SQRT = 6
DEF OP_SIN = 7
DEF OP_COS = 8
DEF OP_SINH = 9
DEF OP_COSH = 10
DEF OP_TANH = 11
DEF OP_EXP = 12
DEF OP_LOG = 13


cdef inline double _ipow(double x, int k) nogil:
    cdef bint neg = k < 0
    cdef double acc = 1.0
    cdef double base = x
    if neg:
        k = -k
    while k:
        if k & 1:
            acc *= base
        base *= base
        k >>= 1
    if neg:
        return 1.0 / acc
    return acc


def eval_tape(tape, points):
    """Evaluate at all rows of points (npoints, nsymbols) -> (npoints,)."""
    cdef const int[::1] ops = tape.ops
    cdef const int[::1] args = tape.args
    cdef const double[::1] consts = tape.consts
    pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef const double[:, ::1] X = pts
    cdef Py_ssize_t npts = X.shape[0]
    out_arr = np.empty(npts, dtype=np.float64)
    cdef double[::1] out = out_arr
    stack_arr = np.empty(max(tape.depth, 1), dtype=np.float64)
    cdef double[::1] stack = stack_arr
    cdef Py_ssize_t i, j, nops = ops.shape[0]
    cdef int op, arg, sp

    with nogil:
        for i in range(npts):
            sp = 0
            for j in range(nops):
                op = ops[j]
                arg = args[j]
                if op == OP_CONST:
                    stack[sp] = consts[arg]
                    sp += 1
                elif op == OP_LOAD:
                    stack[sp] = X[i, arg]
                    sp += 1
                elif op == OP_ADD:
                    sp -= 1
                    stack[sp - 1] = stack[sp - 1] + stack[sp]
                elif op == OP_MUL:
                    sp -= 1
                    stack[sp - 1] = stack[sp - 1] * stack[sp]
                elif op == OP_DIV:
                    sp -= 1
                    stack[sp - 1] = stack[sp - 1] / stack[sp]
                elif op == OP_IPOW:
                    stack[sp - 1] = _ipow(stack[sp - 1], arg)
                elif op == OP_SQRT:
                    stack[sp - 1] = sqrt(stack[sp - 1])
                elif op == OP_SIN:
                    stack[sp - 1] = sin(stack[sp - 1])
                elif op == OP_COS:
                    stack[sp - 1] = cos(stack[sp - 1])
                elif op == OP_SINH:
                    stack[sp - 1] = sinh(stack[sp - 1])
                elif op == OP_COSH:
                    stack[sp - 1] = cosh(stack[sp - 1])
                elif op == OP_TANH:
                    stack[sp - 1] = tanh(stack[sp - 1])
                elif op == OP_EXP:
                    stack[sp - 1] = exp(stack[sp - 1])
                else:
                    stack[sp - 1] = log(stack[sp - 1])
            out[i] = stack[sp - 1]
    return out_arr
