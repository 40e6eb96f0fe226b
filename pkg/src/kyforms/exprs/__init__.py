"""Minimal symbolic kernel: parse, differentiate, evaluate, sample-test."""
from .backend import active_backend
from .parse import ParseError, UndeclaredSymbolError, parse
from .sample import SampleDomain, ZeroVerdict, is_zero, normalized_residual, values
from .tree import (DomainError, Expr, Rat, Sym, as_expr, diff, evaluate, fun,
                   radd, rdiv, rmul, rpow, substitute, symbols_of, to_text)

__all__ = [
    "DomainError", "Expr", "ParseError", "Rat", "SampleDomain", "Sym",
    "UndeclaredSymbolError", "ZeroVerdict", "active_backend", "as_expr",
    "diff", "evaluate", "fun", "is_zero", "normalized_residual", "parse",
    "radd", "rdiv", "rmul", "rpow", "substitute", "symbols_of", "to_text",
    "values",
]
