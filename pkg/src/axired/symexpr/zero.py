"""Zero testing: exact when simplification reaches 0, numerical otherwise."""
from __future__ import annotations

import enum

import numpy as np

from . import expr as E
from .calculus import simplify
from .compiled import Program

ZERO_RTOL = 1e-9
SIMPLIFY_MAX_NODES = 400


class ZeroStatus(enum.Enum):
    PROVABLY_ZERO = "provably-zero"
    NUMERICALLY_ZERO = "numerically-zero"
    NONZERO = "nonzero"

    def __bool__(self):
        return self is not ZeroStatus.NONZERO


def magnitude_terms(e: E.Expr):
    """Terms whose absolute values set the cancellation scale of ``e``."""
    return list(e.args) if e.kind == E.ADD else [e]


def max_abs(e, points: dict, scale_terms: bool = True):
    """Max |e| over sample points and the matching cancellation scale."""
    e = E.as_expr(e)
    terms = magnitude_terms(e) if scale_terms else []
    prog = Program([e] + terms)
    vals = prog(_bind(prog, points))
    value = np.abs(vals[0])
    scale = np.sum(np.abs(vals[1:]), axis=0) if terms else np.abs(vals[0])
    return value, scale


def _bind(prog: Program, points: dict) -> dict:
    return {v: points[v] for v in prog.variables}


def is_zero(e, chart, n: int = 20, seed: int = 42, rtol: float = ZERO_RTOL,
            scale=None) -> ZeroStatus:
    """Tri-state zero test of ``e`` on the interior of ``chart``.

    ``chart`` must provide ``sample(n, seed) -> {symbol: array}``.  The
    numerical verdict requires ``|e| < rtol * (1 + scale)`` at every sample,
    where ``scale`` defaults to the summed magnitude of the top-level terms.
    """
    e = E.as_expr(e)
    if e is E.ZERO:
        return ZeroStatus.PROVABLY_ZERO
    # simplification of very large DAGs is skipped; sampling decides instead
    if E.dag_size(e) <= SIMPLIFY_MAX_NODES and simplify(e) is E.ZERO:
        return ZeroStatus.PROVABLY_ZERO
    pts = chart.sample(n, seed)
    if e.kind == E.CONST:
        return ZeroStatus.NONZERO
    value, own_scale = max_abs(e, pts)
    ref = own_scale if scale is None else np.broadcast_to(scale, value.shape)
    if np.all(value < rtol * (1.0 + ref)):
        return ZeroStatus.NUMERICALLY_ZERO
    return ZeroStatus.NONZERO
