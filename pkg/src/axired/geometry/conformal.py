"""Conformal rescaling identities for 3-dimensional metrics, g~ = e^{2 psi} g."""
from __future__ import annotations

from .. import symexpr as S
from .curvature import box_scalar, grad_sq, gradient, hessian, inner, ricci
from .tensor import MetricSpec, TensorField, expr_array


class DimensionError(ValueError):
    pass


def _require_3d(m: MetricSpec):
    if m.dim != 3:
        raise DimensionError(f"conformal formulas are stated for 3 dimensions, got {m.dim}")


def conformal_ricci(m: MetricSpec, psi) -> TensorField:
    """Ricci tensor of e^{2 psi} g from quantities of g:

    R~_{mn} = R_{mn} - g_{mn} box psi - nabla_m nabla_n psi
              + d_m psi d_n psi - g_{mn} |d psi|^2
    """
    _require_3d(m)
    psi = S.as_expr(psi)
    ric = ricci(m).components
    if psi is S.ZERO:
        return TensorField("dd", ric.copy(), m.chart, symmetry="sym")
    hess = hessian(m, psi).components
    dpsi = gradient(m, psi)
    trace = S.add(box_scalar(m, psi), grad_sq(m, psi))
    n = m.dim
    out = expr_array((n, n))
    for a in range(n):
        for b in range(a, n):
            out[a, b] = out[b, a] = S.add(
                ric[a, b],
                S.neg(S.mul(m.components[a, b], trace)),
                S.neg(hess[a, b]),
                S.mul(dpsi[a], dpsi[b]),
            )
    return TensorField("dd", out, m.chart, symmetry="sym")


def conformal_box(m: MetricSpec, psi, s):
    """box_{e^{2 psi} g} s = e^{-2 psi} (box_g s + g^{mn} d_n psi d_m s)."""
    _require_3d(m)
    psi = S.as_expr(psi)
    s = S.as_expr(s)
    core = S.add(box_scalar(m, s), inner(m, gradient(m, psi), gradient(m, s)))
    return S.mul(S.exp(S.mul(-2, psi)), core)


def conformal_volume_factor(m: MetricSpec, psi):
    """sqrt|g~| = e^{3 psi} sqrt|g|."""
    _require_3d(m)
    return S.mul(S.exp(S.mul(3, S.as_expr(psi))), m.volume_element())
