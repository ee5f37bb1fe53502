"""Quadrature, Richardson extrapolation and a step-doubling RK4 integrator."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class QuadratureError(ArithmeticError):
    """Adaptive quadrature ran out of subdivisions before meeting tolerance."""


class StepUnderflow(ArithmeticError):
    """Raised when the step falls below its floor; ``partial`` holds the
    accepted steps up to ``x``."""

    def __init__(self, x, message="step size underflow", partial=None):
        super().__init__(f"{message} at x={x!r}")
        self.x = x
        self.partial = partial


@dataclass
class QuadResult:
    value: float
    error: float
    evaluations: int
    intervals: int


def adaptive_simpson(f, a: float, b: float, rtol: float = 1e-10, atol: float = 1e-12,
                     initial: int = 8, max_intervals: int = 200_000) -> QuadResult:
    """Adaptive Simpson with Richardson correction, vectorized across panels.

    ``f`` takes a 1-d array of abscissae and returns an array of values.
    A panel is accepted when its two-half Simpson estimate agrees with the
    whole-panel estimate to within its share of the tolerance; accepted
    panels contribute ``S2 + (S2 - S1)/15``.
    """
    if a == b:
        return QuadResult(0.0, 0.0, 0, 0)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    x = np.linspace(a, b, 2 * initial + 1)
    fx = np.asarray(f(x), dtype=float)
    nev = fx.size
    lo, hi = x[:-1:2], x[2::2]
    flo, fmid, fhi = fx[:-1:2], fx[1::2], fx[2::2]
    whole = (hi - lo) / 6.0 * (flo + 4 * fmid + fhi)
    total_guess = abs(whole.sum())
    tol = max(atol, rtol * total_guess)
    length = b - a
    value = 0.0
    err = 0.0
    accepted = 0
    while lo.size:
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        fv = np.asarray(f(np.concatenate([lm, rm])), dtype=float)
        nev += fv.size
        flm, frm = fv[:lo.size], fv[lo.size:]
        left = (mid - lo) / 6.0 * (flo + 4 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4 * frm + fhi)
        two = left + right
        delta = (two - whole) / 15.0
        share = tol * (hi - lo) / length
        ok = np.abs(delta) <= share
        ok |= (hi - lo) <= 1e-13 * max(1.0, abs(a), abs(b))
        value += float(np.sum(two[ok] + delta[ok]))
        err += float(np.sum(np.abs(delta[ok])))
        accepted += int(ok.sum())
        keep = ~ok
        if accepted + 2 * int(keep.sum()) > max_intervals:
            raise QuadratureError(f"adaptive Simpson exceeded {max_intervals} panels on [{a}, {b}]")
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        flo, fmid, fhi, flm, frm = flo[keep], fmid[keep], fhi[keep], flm[keep], frm[keep]
        left, right = left[keep], right[keep]
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        flo, fhi, fmid = (np.concatenate([flo, fmid]), np.concatenate([fmid, fhi]),
                          np.concatenate([flm, frm]))
        whole = np.concatenate([left, right])
    return QuadResult(sign * value, err, nev, accepted)


def adaptive_simpson_2d(f, x_range, y_range, rtol: float = 1e-10, atol: float = 1e-12,
                        **kw) -> QuadResult:
    """Iterated adaptive Simpson; ``f(x, y)`` takes broadcastable arrays."""
    y0, y1 = y_range
    evals = 0

    def inner(xs):
        nonlocal evals
        out = np.empty(xs.size)
        for i, xv in enumerate(xs):
            r = adaptive_simpson(lambda ys: f(np.full(ys.shape, xv), ys), y0, y1,
                                 rtol=rtol * 0.1, atol=atol * 0.1, **kw)
            out[i] = r.value
            evals += r.evaluations
        return out

    res = adaptive_simpson(inner, x_range[0], x_range[1], rtol=rtol, atol=atol, **kw)
    return QuadResult(res.value, res.error, evals, res.intervals)


def composite_simpson(f, a: float, b: float, panels: int) -> float:
    """Fixed composite Simpson rule with ``panels`` (even) subintervals."""
    if panels % 2:
        panels += 1
    x = np.linspace(a, b, panels + 1)
    y = np.asarray(f(x), dtype=float)
    h = (b - a) / panels
    return float(h / 3.0 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum()))


def observed_order(values) -> float:
    """Convergence order from estimates at step sizes h, h/2, h/4."""
    q1, q2, q3 = values
    d1, d2 = q1 - q2, q2 - q3
    if d2 == 0:
        return math.inf
    if d1 == 0:
        return 0.0
    return math.log2(abs(d1 / d2))


def richardson(hs, values) -> float:
    """Extrapolate values(h) to h -> 0 by the interpolating polynomial in h."""
    hs = np.asarray(hs, dtype=float)
    vals = np.asarray(values, dtype=float)
    # Neville's scheme evaluated at h = 0
    p = vals.copy()
    n = len(hs)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (hs[i] * p[i + 1] - hs[i + k] * p[i]) / (hs[i] - hs[i + k])
    return float(p[0])


def gauss_sphere(n_theta: int = 24, n_phi: int = 48):
    """Product rule on the unit sphere: nodes (theta, phi) and weights.

    Gauss-Legendre in cos(theta), uniform in phi; weights sum to 4*pi.
    """
    x, w = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    phi = (np.arange(n_phi) + 0.5) * (2 * np.pi / n_phi)
    T, P = np.meshgrid(theta, phi, indexing="ij")
    W = np.repeat(w[:, None], n_phi, axis=1) * (2 * np.pi / n_phi)
    return T.ravel(), P.ravel(), W.ravel()


# -- ODE ----------------------------------------------------------------------

@dataclass
class OdeSolution:
    x: np.ndarray
    y: np.ndarray
    dy: np.ndarray
    status: str = "ok"
    stop_x: float | None = None
    steps: int = 0
    rejected: int = 0
    extra: dict = field(default_factory=dict)

    def __call__(self, xq):
        """Cubic Hermite interpolation of the accepted steps."""
        xq = np.asarray(xq, dtype=float)
        x, y, d = self.x, self.y, self.dy
        i = np.clip(np.searchsorted(x, xq, side="right") - 1, 0, len(x) - 2)
        h = x[i + 1] - x[i]
        s = (xq - x[i]) / h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return h00 * y[i] + h10 * h * d[i] + h01 * y[i + 1] + h11 * h * d[i + 1]


def _rk4_step(f, x, y, h, k1=None):
    k1 = f(x, y) if k1 is None else k1
    k2 = f(x + h / 2, y + h / 2 * k1)
    k3 = f(x + h / 2, y + h / 2 * k2)
    k4 = f(x + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_adaptive(f, x0: float, y0: float, x1: float, h0: float = 1e-3, atol: float = 1e-13,
                 rtol: float = 1e-11, max_dy: float = 1e-3, h_min: float = 1e-12,
                 h_max: float = 0.05, stop=None) -> OdeSolution:
    """Scalar RK4 with step-doubling error control.

    A step is halved when the local error estimate exceeds the tolerance or
    when |dy| exceeds ``max_dy``.  ``stop(x, y)`` may end integration early
    (returns status ``"stopped"``).  Raises :class:`StepUnderflow` when the
    step falls below ``h_min``; ``f`` raising ``ArithmeticError`` or returning
    a non-finite value counts as a rejected step.
    """
    xs, ys, ds = [x0], [y0], [f(x0, y0)]
    x, y, h = x0, y0, h0
    steps = rejected = 0
    def underflow():
        return StepUnderflow(x, partial=OdeSolution(np.array(xs), np.array(ys), np.array(ds),
                                                    "underflow", x, steps, rejected))

    while x < x1:
        h = min(h, x1 - x, h_max)
        if h < h_min and x1 - x > h_min:
            raise underflow()
        try:
            full = _rk4_step(f, x, y, h, ds[-1])
            half = _rk4_step(f, x, y, h / 2, ds[-1])
            k_mid = f(x + h / 2, half)
            two = _rk4_step(f, x + h / 2, half, h / 2, k_mid)
            err = abs(two - full) / 15.0
            good = math.isfinite(two) and math.isfinite(err)
        except (ArithmeticError, ValueError):
            good = False
        if good:
            tol = atol + rtol * abs(two)
            good = err <= tol and abs(two - y) <= max_dy
        if not good:
            rejected += 1
            h /= 2
            if h < h_min:
                raise underflow()
            continue
        x_new = x + h
        y_new = two + (two - full) / 15.0
        try:
            d_new = f(x_new, y_new)
        except (ArithmeticError, ValueError):
            d_new = math.nan
        if not math.isfinite(d_new):
            rejected += 1
            h /= 2
            if h < h_min:
                raise underflow()
            continue
        x, y = x_new, y_new
        xs.append(x)
        ys.append(y)
        ds.append(d_new)
        steps += 1
        if stop is not None and stop(x, y):
            return OdeSolution(np.array(xs), np.array(ys), np.array(ds), "stopped", x, steps, rejected)
        if err < tol / 64:
            h *= 2
    return OdeSolution(np.array(xs), np.array(ys), np.array(ds), "ok", None, steps, rejected)
