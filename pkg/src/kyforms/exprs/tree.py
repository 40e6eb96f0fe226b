"""Expression trees over chart coordinates and named parameters.

Nodes are immutable. Construction goes through the smart constructors
(`radd`, `rmul`, `rdiv`, `rpow`, `fun`), which fold rational constants and
drop additive/multiplicative identities but perform no other simplification.
Equality of expressions is decided numerically by `kyforms.exprs.sample.is_zero`,
not by canonical forms.
"""
from __future__ import annotations

import math
from fractions import Fraction

FUNCTIONS = ("sin", "cos", "sinh", "cosh", "tanh", "exp", "log", "sqrt")

_FUN_EVAL = {
    "sin": math.sin,
    "cos": math.cos,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "tanh": math.tanh,
    "exp": math.exp,
    "log": math.log,
}


class DomainError(ValueError):
    """Raised when a point is outside the domain of a subexpression."""

    def __init__(self, reason: str, subexpr: "Expr"):
        super().__init__(f"{reason} in subexpression '{to_text(subexpr)}'")
        self.subexpr = subexpr


class Expr:
    __slots__ = ("_tapes",)

    def __add__(self, other):
        return radd((self, as_expr(other)))

    def __radd__(self, other):
        return radd((as_expr(other), self))

    def __sub__(self, other):
        return radd((self, rmul((MINUS_ONE, as_expr(other)))))

    def __rsub__(self, other):
        return radd((as_expr(other), rmul((MINUS_ONE, self))))

    def __mul__(self, other):
        return rmul((self, as_expr(other)))

    def __rmul__(self, other):
        return rmul((as_expr(other), self))

    def __truediv__(self, other):
        return rdiv(self, as_expr(other))

    def __rtruediv__(self, other):
        return rdiv(as_expr(other), self)

    def __neg__(self):
        return rmul((MINUS_ONE, self))

    def __pow__(self, exponent):
        return rpow(self, Fraction(exponent))

    def __repr__(self):
        return f"Expr({to_text(self)})"


class Rat(Expr):
    """Rational constant, kept in lowest terms by Fraction."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = Fraction(value)


class Sym(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = tuple(terms)


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors):
        self.factors = tuple(factors)


class Div(Expr):
    __slots__ = ("num", "den")

    def __init__(self, num, den):
        self.num = num
        self.den = den


class Pow(Expr):
    """base ** exponent with exponent a rational of denominator 1 or 2."""

    __slots__ = ("base", "exponent")

    def __init__(self, base, exponent: Fraction):
        if exponent.denominator not in (1, 2):
            raise ValueError(f"unsupported power denominator {exponent.denominator}")
        self.base = base
        self.exponent = exponent


class Fun(Expr):
    __slots__ = ("name", "arg")

    def __init__(self, name, arg):
        if name not in FUNCTIONS or name == "sqrt":
            raise ValueError(f"unknown function {name!r}")
        self.name = name
        self.arg = arg


ZERO = Rat(0)
ONE = Rat(1)
MINUS_ONE = Rat(-1)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Rat(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Expr")


def is_zero_literal(e: Expr) -> bool:
    return isinstance(e, Rat) and e.value == 0


def radd(terms) -> Expr:
    flat: list[Expr] = []
    const = Fraction(0)
    for t in terms:
        t = as_expr(t)
        if isinstance(t, Add):
            for s in t.terms:
                if isinstance(s, Rat):
                    const += s.value
                else:
                    flat.append(s)
        elif isinstance(t, Rat):
            const += t.value
        else:
            flat.append(t)
    if const != 0:
        flat.insert(0, Rat(const))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(flat)


def rmul(factors) -> Expr:
    flat: list[Expr] = []
    const = Fraction(1)
    for f in factors:
        f = as_expr(f)
        if isinstance(f, Mul):
            for g in f.factors:
                if isinstance(g, Rat):
                    const *= g.value
                else:
                    flat.append(g)
        elif isinstance(f, Rat):
            const *= f.value
        else:
            flat.append(f)
    if const == 0:
        return ZERO
    if const != 1:
        flat.insert(0, Rat(const))
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    return Mul(flat)


def rdiv(num, den) -> Expr:
    num, den = as_expr(num), as_expr(den)
    if isinstance(den, Rat):
        if den.value == 0:
            raise ZeroDivisionError("division by zero constant")
        return rmul((Rat(1 / den.value), num))
    if is_zero_literal(num):
        return ZERO
    return Div(num, den)


def rpow(base, exponent) -> Expr:
    base = as_expr(base)
    exponent = Fraction(exponent)
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Rat) and exponent.denominator == 1:
        if exponent > 0:
            return Rat(base.value**exponent.numerator)
        if base.value != 0:
            return Rat(Fraction(1) / base.value**(-exponent.numerator))
    return Pow(base, exponent)


def fun(name: str, arg) -> Expr:
    if name == "sqrt":
        return rpow(arg, Fraction(1, 2))
    return Fun(name, as_expr(arg))


def symbols_of(e: Expr) -> set[str]:
    out: set[str] = set()

    def walk(n):
        if isinstance(n, Sym):
            out.add(n.name)
        elif isinstance(n, Add):
            for t in n.terms:
                walk(t)
        elif isinstance(n, Mul):
            for f in n.factors:
                walk(f)
        elif isinstance(n, Div):
            walk(n.num)
            walk(n.den)
        elif isinstance(n, Pow):
            walk(n.base)
        elif isinstance(n, Fun):
            walk(n.arg)

    walk(e)
    return out


def diff(e: Expr, v: str) -> Expr:
    """Exact partial derivative with respect to the symbol named v.

    Derivatives of parameters and unrelated symbols are zero; only
    rational-constant folding is applied to the result.
    """
    if isinstance(e, Rat):
        return ZERO
    if isinstance(e, Sym):
        return ONE if e.name == v else ZERO
    if isinstance(e, Add):
        return radd(diff(t, v) for t in e.terms)
    if isinstance(e, Mul):
        parts = []
        for i, f in enumerate(e.factors):
            df = diff(f, v)
            if is_zero_literal(df):
                continue
            parts.append(rmul(e.factors[:i] + (df,) + e.factors[i + 1:]))
        return radd(parts)
    if isinstance(e, Div):
        dn, dd = diff(e.num, v), diff(e.den, v)
        if is_zero_literal(dd):
            return rdiv(dn, e.den)
        return radd((rdiv(dn, e.den),
                     rmul((MINUS_ONE, rdiv(rmul((e.num, dd)), rmul((e.den, e.den)))))))
    if isinstance(e, Pow):
        db = diff(e.base, v)
        if is_zero_literal(db):
            return ZERO
        return rmul((Rat(e.exponent), rpow(e.base, e.exponent - 1), db))
    if isinstance(e, Fun):
        da = diff(e.arg, v)
        if is_zero_literal(da):
            return ZERO
        a = e.arg
        outer = {
            "sin": lambda: fun("cos", a),
            "cos": lambda: rmul((MINUS_ONE, fun("sin", a))),
            "sinh": lambda: fun("cosh", a),
            "cosh": lambda: fun("sinh", a),
            "tanh": lambda: radd((ONE, rmul((MINUS_ONE, rpow(fun("tanh", a), 2))))),
            "exp": lambda: e,
            "log": lambda: rdiv(ONE, a),
        }[e.name]()
        return rmul((outer, da))
    raise TypeError(f"cannot differentiate {type(e).__name__}")


def substitute(e: Expr, mapping: dict[str, Expr]) -> Expr:
    """Replace symbols by expressions (used by pullbacks)."""
    if isinstance(e, Rat):
        return e
    if isinstance(e, Sym):
        return mapping.get(e.name, e)
    if isinstance(e, Add):
        return radd(substitute(t, mapping) for t in e.terms)
    if isinstance(e, Mul):
        return rmul(substitute(f, mapping) for f in e.factors)
    if isinstance(e, Div):
        return rdiv(substitute(e.num, mapping), substitute(e.den, mapping))
    if isinstance(e, Pow):
        return rpow(substitute(e.base, mapping), e.exponent)
    if isinstance(e, Fun):
        return fun(e.name, substitute(e.arg, mapping))
    raise TypeError(type(e).__name__)


def evaluate(e: Expr, point: dict[str, float]) -> float:
    """Careful single-point evaluation; raises DomainError naming the
    offending subexpression on sqrt/log/division violations."""
    if isinstance(e, Rat):
        return float(e.value)
    if isinstance(e, Sym):
        try:
            return float(point[e.name])
        except KeyError:
            raise KeyError(f"symbol '{e.name}' not assigned") from None
    if isinstance(e, Add):
        return math.fsum(evaluate(t, point) for t in e.terms)
    if isinstance(e, Mul):
        out = 1.0
        for f in e.factors:
            out *= evaluate(f, point)
        return out
    if isinstance(e, Div):
        den = evaluate(e.den, point)
        if den == 0.0:
            raise DomainError("division by zero", e)
        return evaluate(e.num, point) / den
    if isinstance(e, Pow):
        base = evaluate(e.base, point)
        k = e.exponent
        if k.denominator == 2:
            if base < 0.0:
                raise DomainError("square root of negative value", e)
            base = math.sqrt(base)
            k = Fraction(k.numerator)
        if k < 0 and base == 0.0:
            raise DomainError("zero raised to negative power", e)
        return _ipow(base, k.numerator)
    if isinstance(e, Fun):
        a = evaluate(e.arg, point)
        if e.name == "log" and a <= 0.0:
            raise DomainError("log of non-positive value", e)
        return _FUN_EVAL[e.name](a)
    raise TypeError(type(e).__name__)


def _ipow(x: float, k: int) -> float:
    """Binary exponentiation; the batch evaluators use the identical
    multiplication order so all backends agree bit for bit."""
    neg = k < 0
    if neg:
        k = -k
    acc, base = 1.0, x
    while k:
        if k & 1:
            acc *= base
        base *= base
        k >>= 1
    return 1.0 / acc if neg else acc


def top_terms(e: Expr) -> tuple[Expr, ...]:
    """Top-level additive terms; the is_zero scale is the max |term|."""
    if isinstance(e, Add):
        return e.terms
    return (e,)


# ---------------------------------------------------------------------------
# printing (inverse of the parser; parse(to_text(e)) is is_zero-equal to e)

_PREC_ADD, _PREC_MUL, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4


def to_text(e: Expr) -> str:
    return _fmt(e, _PREC_ADD)


def _fmt(e: Expr, ctx: int) -> str:
    if isinstance(e, Rat):
        s = str(e.value)
        need = ctx > _PREC_MUL and (e.value < 0 or e.value.denominator != 1)
        return f"({s})" if need else s
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Add):
        parts = [_fmt(e.terms[0], _PREC_ADD)]
        for t in e.terms[1:]:
            neg = _negated(t)
            if neg is not None:
                parts.append("-" + _fmt(neg, _PREC_MUL))
            else:
                parts.append("+" + _fmt(t, _PREC_MUL))
        s = "".join(parts)
        return f"({s})" if ctx > _PREC_ADD else s
    if isinstance(e, Mul):
        s = "*".join(_fmt(f, _PREC_POW) for f in e.factors)
        if isinstance(e.factors[0], Rat) and e.factors[0].value == -1:
            s = "-" + "*".join(_fmt(f, _PREC_POW) for f in e.factors[1:])
            return f"({s})" if ctx > _PREC_ADD else s
        return f"({s})" if ctx > _PREC_MUL else s
    if isinstance(e, Div):
        s = _fmt(e.num, _PREC_POW) + "/" + _fmt(e.den, _PREC_ATOM)
        return f"({s})" if ctx > _PREC_MUL else s
    if isinstance(e, Pow):
        k = e.exponent
        es = str(k.numerator) if k.denominator == 1 else f"({k.numerator}/{k.denominator})"
        if k.denominator == 1 and k.numerator < 0:
            es = f"({k.numerator})"
        s = _fmt(e.base, _PREC_ATOM) + "^" + es
        return f"({s})" if ctx > _PREC_POW else s
    if isinstance(e, Fun):
        return f"{e.name}({to_text(e.arg)})"
    raise TypeError(type(e).__name__)


def _negated(t: Expr) -> Expr | None:
    """If t = (negative rational) * rest, return |rational| * rest."""
    if isinstance(t, Rat) and t.value < 0:
        return Rat(-t.value)
    if isinstance(t, Mul) and isinstance(t.factors[0], Rat) and t.factors[0].value < 0:
        return rmul((Rat(-t.factors[0].value),) + t.factors[1:])
    return None
