"""Symbolic scalar expressions: parse, differentiate, simplify, evaluate."""
from .calculus import differentiate, expand, gradient, simplify
from .compiled import (
    Program, available_backends, compile_exprs, default_backend, evaluate, scalar_function,
)
from .expr import (
    ONE, ZERO, DomainError, Expr, UnboundSymbolError, add, as_expr, const, cos, cosh,
    dag_size, div, exp, func, log, mul, neg, pow_, sin, sinh, sqrt, sub, substitute,
    sym, symbols, tan,
)
from .parser import ParseError, UnknownFunctionError, parse
from .printer import to_string
from .zero import ZeroStatus, is_zero

__all__ = [
    "Expr", "ZERO", "ONE", "DomainError", "UnboundSymbolError", "ParseError",
    "UnknownFunctionError", "ZeroStatus", "Program", "add", "as_expr", "available_backends",
    "compile_exprs", "const", "cos", "cosh", "dag_size", "default_backend", "differentiate",
    "div", "evaluate", "exp", "expand", "func", "gradient", "is_zero", "log", "mul", "neg",
    "parse", "pow_", "scalar_function", "simplify", "sin", "sinh", "sqrt", "sub", "substitute", "sym",
    "symbols", "tan", "to_string",
]
