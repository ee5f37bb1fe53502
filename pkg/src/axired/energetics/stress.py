"""Wave-map stress-energy and its normal-normal component on a time slice."""
from __future__ import annotations

from fractions import Fraction

from .. import symexpr as S
from ..geometry import curvature as C
from ..geometry.tensor import MetricSpec, TensorField, expr_array

HALF = S.const(Fraction(1, 2))


def _gradient(g: MetricSpec, comp):
    """A field given as an Expr is differentiated; a sequence is taken to be
    its gradient already (e.g. a twist one-form standing in for dv)."""
    if isinstance(comp, (list, tuple)):
        if len(comp) != g.dim:
            raise ValueError(f"gradient needs {g.dim} components")
        return [S.as_expr(c) for c in comp]
    return C.gradient(g, comp)


def stress_energy(g: MetricSpec, fields) -> TensorField:
    """T_{mn} = sum_k w_k (d_m U^k d_n U^k - 1/2 g_{mn} |dU^k|^2).

    ``fields`` lists ``(component, weight)`` pairs: the target metric is
    diagonal with entries ``weight`` in the field components.
    """
    n = g.dim
    out = expr_array((n, n))
    grads = [(_gradient(g, c), S.as_expr(w)) for c, w in fields]
    sq = [C.inner(g, d, d) for d, _ in grads]
    for a in range(n):
        for b in range(a, n):
            terms = []
            for (d, w), s in zip(grads, sq):
                terms.append(S.mul(w, S.sub(S.mul(d[a], d[b]), S.mul(HALF, g.components[a, b], s))))
            out[a, b] = out[b, a] = S.add(*terms)
    return TensorField("dd", out, g.chart, symmetry="sym")


def wave_map_fields(rd, twist=None) -> list:
    """(u, 1) and (dv := G, e^{-4u}/4) for the target du^2 + 1/4 e^{-4u} dv^2."""
    fields = [(rd.u, S.ONE)]
    if twist is not None and any(c is not S.ZERO for c in twist.G.components):
        fields.append((list(twist.G.components), S.mul(S.const(Fraction(1, 4)), rd.exp_u(-4))))
    return fields


def t_nn(g: MetricSpec, T: TensorField, normal_factor=None) -> S.Expr:
    """T(N, N) for the future unit normal N of the constant-time slices.

    With ``normal_factor`` = c the normal is taken to be N = c d_t (valid
    when the shift vanishes, e.g. N = (r sin theta)^{-1} d_t for reduced
    Minkowski).  Otherwise N^m = -g^{m t} / sqrt(-g^{tt}) in general.
    """
    t = g.time_index
    if t is None:
        raise ValueError("metric has no time coordinate")
    if normal_factor is not None:
        c = S.as_expr(normal_factor)
        return S.mul(S.pow_(c, 2), T.components[t, t])
    ginv = C.inverse_metric(g).components
    n = g.dim
    contr = S.add(*(S.mul(ginv[t, a], ginv[t, b], T.components[a, b])
                    for a in range(n) for b in range(n)
                    if ginv[t, a] is not S.ZERO and ginv[t, b] is not S.ZERO))
    return S.mul(contr, S.pow_(S.neg(ginv[t, t]), -1))


def sqrt_q(g: MetricSpec) -> S.Expr:
    """Volume element of the induced metric on constant-time slices."""
    return g.spatial().volume_element()


def reduced_energy_density(m4: MetricSpec, with_twist: bool = True):
    """(g~, T(N,N) sqrt(q)) for the conformally reduced wave map of ``m4``."""
    from .. import reduction as RD
    rd = RD.conformal_reduce(RD.split_killing(m4))
    tw = RD.twist(rd) if with_twist else None
    g = rd.metric
    T = stress_energy(g, wave_map_fields(rd, tw))
    return g, S.mul(t_nn(g, T), sqrt_q(g))
