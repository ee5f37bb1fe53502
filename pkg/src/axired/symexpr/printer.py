"""Render canonical expressions in the DSL syntax accepted by :func:`parse`."""
from __future__ import annotations

from fractions import Fraction

from .expr import ADD, CONST, FUNC, MUL, POW, SYM, Expr

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = range(5)


def _const(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _prec(e: Expr) -> int:
    k = e.kind
    if k == ADD:
        return _PREC_ADD
    if k == MUL:
        return _PREC_UNARY if e.args[0].kind == CONST and e.args[0].value < 0 else _PREC_MUL
    if k == CONST:
        v = e.value
        if v < 0:
            return _PREC_UNARY
        return _PREC_ATOM if v.denominator == 1 else _PREC_MUL
    if k == POW:
        return _PREC_POW
    return _PREC_ATOM


def _wrap(e: Expr, need: int) -> str:
    s = to_string(e)
    return f"({s})" if _prec(e) < need else s


def _mul_body(factors) -> str:
    return "*".join(_wrap(f, _PREC_MUL + 1) if f.kind != POW else _wrap(f, _PREC_POW)
                    for f in factors)


def to_string(e: Expr) -> str:
    k = e.kind
    if k == CONST:
        return _const(e.value)
    if k == SYM:
        return e.value
    if k == FUNC:
        return f"{e.value}({to_string(e.args[0])})"
    if k == POW:
        base = _wrap(e.args[0], _PREC_ATOM)
        x = e.value
        if x.denominator == 1 and x > 0:
            return f"{base}^{x.numerator}"
        return f"{base}^({_const(x)})"
    if k == MUL:
        args = e.args
        if args[0].kind == CONST:
            c = args[0].value
            rest = args[1:]
            if c == -1:
                return "-" + _mul_body(rest)
            if c < 0:
                return "-" + _const(-c) + "*" + _mul_body(rest)
            return _const(c) + "*" + _mul_body(rest)
        return _mul_body(args)
    # ADD: keep the canonical term order, fold leading minus signs into " - "
    parts = []
    for i, t in enumerate(e.args):
        s = to_string(t)
        if i == 0:
            parts.append(s)
        elif s.startswith("-"):
            parts.append(" - " + s[1:])
        else:
            parts.append(" + " + s)
    return "".join(parts)
