"""Coordinate tensor calculus on symbolic metrics."""
from .chart import Chart, EmptyRegionError
from .conformal import conformal_box, conformal_ricci
from .curvature import (
    box_scalar, box_scalar_divergence_form, christoffel, einstein_divergence_fd,
    einstein_tensor, first_bianchi, grad_sq, gradient, hessian, inner, inverse_metric,
    ricci, ricci_scalar, riemann,
)
from .tensor import (
    LORENTZIAN, RIEMANNIAN, MetricSpec, SignatureError, SingularMetricError, TensorField,
    determinant, expr_array,
)

__all__ = [
    "Chart", "EmptyRegionError", "MetricSpec", "TensorField", "SingularMetricError",
    "SignatureError", "LORENTZIAN", "RIEMANNIAN", "box_scalar", "box_scalar_divergence_form",
    "christoffel", "conformal_box", "conformal_ricci", "determinant", "einstein_divergence_fd",
    "einstein_tensor", "expr_array", "first_bianchi", "grad_sq", "gradient", "hessian",
    "inner", "inverse_metric", "ricci", "ricci_scalar", "riemann",
]
