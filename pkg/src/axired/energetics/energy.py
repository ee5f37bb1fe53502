"""Cutoff energies of a time slice and a divergence classifier for E(R)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import symexpr as S
from ..geometry.tensor import MetricSpec
from ..numerics import QuadratureError, adaptive_simpson_2d

CONVERGENT = "convergent"
LOG_DIVERGENT = "log-divergent"
POWER_DIVERGENT = "power-divergent"
INCONCLUSIVE = "inconclusive"


class InsufficientSamplesError(ValueError):
    pass


class NonConvergenceError(ArithmeticError):
    pass


def energy_integrand(g: MetricSpec, tnn: S.Expr) -> S.Expr:
    from .stress import sqrt_q
    return S.mul(tnn, sqrt_q(g))


class CutoffEnergy:
    """E(R, eps) = int_{r0}^{R} int_{eps}^{pi-eps} T(N,N) sqrt(q) dtheta dr.

    The radial integral runs in s = ln r, so the 1/r tails of divergent
    integrands become flat and the adaptive rule stays cheap at large R.
    """

    def __init__(self, g: MetricSpec, density: S.Expr, radial: str = "r", angular: str = "theta",
                 time: float = 0.0):
        self.g = g
        self.density = S.as_expr(density)
        chart = g.chart
        free = self.density.free_symbols
        fixed = {k: v for k, v in chart.params.items() if k in free}
        for c in chart.coords:
            if c not in (radial, angular) and c in free:
                fixed[c] = time
        unknown = free - set(fixed) - {radial, angular}
        if unknown:
            raise ValueError(f"energy density depends on unbound symbols {sorted(unknown)}")
        self._prog = S.Program([self.density], [radial, angular] + sorted(fixed))
        self._fixed = [fixed[k] for k in sorted(fixed)]

    def __call__(self, r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.broadcast_to(np.asarray(theta, dtype=float), r.shape)
        cols = [r.ravel(), theta.ravel()] + [np.full(r.size, v) for v in self._fixed]
        return self._prog(np.vstack(cols))[0].reshape(r.shape)

    def integrate(self, r0: float, R: float, eps: float, rtol: float = 1e-10):
        if not r0 > 0 or not R > r0:
            raise ValueError("need 0 < r0 < R")
        if not 0 < eps < math.pi / 2:
            raise ValueError("need 0 < eps < pi/2")

        def f(s, th):
            r = np.exp(s)
            return self(r, th) * r

        try:
            return adaptive_simpson_2d(f, (math.log(r0), math.log(R)), (eps, math.pi - eps),
                                       rtol=rtol, atol=1e-14)
        except QuadratureError as exc:
            raise NonConvergenceError(str(exc)) from exc


def energy_cutoff(g: MetricSpec, T, r0: float, R: float, eps: float, normal_factor=None,
                  rtol: float = 1e-10) -> float:
    """Cutoff energy for a stress tensor ``T`` on the 3-metric ``g``."""
    from .stress import t_nn
    dens = energy_integrand(g, t_nn(g, T, normal_factor))
    return CutoffEnergy(g, dens).integrate(r0, R, eps, rtol).value


@dataclass
class EnergyReport:
    R: np.ndarray
    E: np.ndarray
    c1: float
    c0: float
    residual: float
    verdict: str
    eps: float | None = None
    power: float | None = None
    thresholds: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"R": [float(x) for x in self.R], "E": [float(x) for x in self.E],
                "c1": self.c1, "c0": self.c0, "fit_residual": self.residual,
                "verdict": self.verdict, "eps": self.eps, "power": self.power,
                "thresholds": dict(self.thresholds)}


def _linfit(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    (c1, c0), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (c1 * x + c0)
    scale = np.max(np.abs(y))
    return float(c1), float(c0), float(np.max(np.abs(resid)) / scale) if scale else 0.0


def divergence_fit(samples, eps: float | None = None, fit_tol: float = 1e-3,
                   cauchy_tol: float = 1e-6, min_samples: int = 5,
                   min_decades: float = 2.0) -> EnergyReport:
    """Classify E(R) from ``(R, E)`` samples.

    * convergent: every sample in the last decade of R lies within
      ``cauchy_tol`` (relative) of the largest-R value;
    * log-divergent: least squares E = c1 ln R + c0 has c1 > 0 and
      max|residual| / max|E| < ``fit_tol``;
    * power-divergent: not logarithmic, but ln E is linear in ln R with a
      positive slope within ``fit_tol``;
    * inconclusive otherwise.
    """
    pts = sorted((float(r), float(e)) for r, e in samples)
    if len(pts) < min_samples:
        raise InsufficientSamplesError(f"need at least {min_samples} samples, got {len(pts)}")
    R = np.array([p[0] for p in pts])
    E = np.array([p[1] for p in pts])
    if np.any(R <= 0):
        raise ValueError("cutoff radii must be positive")
    if math.log10(R[-1] / R[0]) < min_decades - 1e-12:
        raise InsufficientSamplesError(f"samples must span at least {min_decades} decades in R")
    lnR = np.log(R)
    c1, c0, resid = _linfit(lnR, E)
    thresholds = {"fit_tol": fit_tol, "cauchy_tol": cauchy_tol}
    last = R >= R[-1] / 10.0 * (1 - 1e-12)
    ref = max(1.0, abs(E[-1]))
    if np.sum(last) >= 2 and np.all(np.abs(E[last] - E[-1]) <= cauchy_tol * ref):
        verdict = CONVERGENT
    elif c1 > 0 and resid < fit_tol:
        verdict = LOG_DIVERGENT
    else:
        verdict = INCONCLUSIVE
    power = None
    if verdict == INCONCLUSIVE and np.all(E > 0):
        k, _, presid = _linfit(lnR, np.log(E))
        power = k
        if k > 0 and presid < fit_tol:
            verdict = POWER_DIVERGENT
    return EnergyReport(R, E, c1, c0, resid, verdict, eps, power, thresholds)


def densify(radii, per_gap: int = 1):
    """Insert geometric midpoints between consecutive radii."""
    radii = sorted(float(r) for r in radii)
    out = [radii[0]]
    for a, b in zip(radii[:-1], radii[1:]):
        for k in range(1, per_gap + 1):
            out.append(a * (b / a) ** (k / (per_gap + 1)))
        out.append(b)
    return out


def energy_curve(cutoff: CutoffEnergy, r0: float, radii, eps: float, rtol: float = 1e-10):
    """E at each radius, accumulated panel by panel between sorted radii."""
    radii = sorted(float(r) for r in radii)
    total = 0.0
    lo = r0
    out = []
    for R in radii:
        if R > lo:
            total += cutoff.integrate(lo, R, eps, rtol).value
            lo = R
        out.append(total)
    return list(zip(radii, out))


def observed_quadrature_order(f, a: float, b: float, panels: int = 8) -> float:
    """Convergence order of composite Simpson on f under panel doubling."""
    from ..numerics import composite_simpson, observed_order
    vals = [composite_simpson(f, a, b, panels * 2 ** k) for k in range(3)]
    return observed_order(vals)


__all__ = [
    "CONVERGENT", "LOG_DIVERGENT", "POWER_DIVERGENT", "INCONCLUSIVE", "CutoffEnergy",
    "EnergyReport", "InsufficientSamplesError", "NonConvergenceError", "densify",
    "divergence_fit", "energy_cutoff", "energy_curve", "energy_integrand",
    "observed_quadrature_order",
]
