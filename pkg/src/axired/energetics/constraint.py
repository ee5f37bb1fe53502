"""Hamiltonian constraint for equivariant data on a 2+1 slice.

The slice metric is ``e^{2 gamma} dr^2 + r^2 dtheta^2``.  With
``chi = e^{-gamma}`` the constraint E(N, N) = T(N, N) becomes

    chi' = -(r / chi) * 1/2 (p^2 + chi^2 u'^2 + f(u)^2 / r^2),    chi(0) = 1,

whose integral gives E = 2 pi (1 - chi_inf).  Mass and angle deficit are
``m_AV = 2 (1 - chi_inf)`` and ``2 pi (1 - chi_inf)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import symexpr as S
from ..catalog import EquivariantData, equivariant_profile
from ..numerics import OdeSolution, StepUnderflow, adaptive_simpson, rk4_adaptive

SUBCRITICAL = "subcritical"
SUPERCRITICAL = "supercritical"


class AxisDensityError(ValueError):
    """Energy density is not integrable at the axis r = 0."""


@dataclass
class ConstraintSolution:
    r: np.ndarray
    chi: np.ndarray
    status: str
    r_star: float | None = None
    chi_inf: float | None = None
    energy_density: np.ndarray | None = None
    ode: OdeSolution | None = None
    data: EquivariantData | None = None
    extra: dict = field(default_factory=dict)

    @property
    def gamma(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return -np.log(self.chi)

    @property
    def gamma_inf(self):
        return None if self.chi_inf is None else -math.log(self.chi_inf)

    @property
    def m_av(self):
        return None if self.chi_inf is None else 2.0 * (1.0 - self.chi_inf)

    @property
    def angle_deficit(self):
        return None if self.chi_inf is None else 2.0 * math.pi * (1.0 - self.chi_inf)

    @property
    def energy(self):
        """Total energy from the integrated constraint, 2 pi (1 - chi_inf)."""
        return self.angle_deficit

    def rows(self):
        """CSV rows (r, chi, gamma, energy_density)."""
        return zip(self.r, self.chi, self.gamma, self.energy_density)


class _Density:
    """Pointwise ingredients p, u', f(u)^2/r^2 of the constraint density."""

    def __init__(self, data: EquivariantData):
        r = S.sym("r")
        u = data.u
        fu = S.substitute(data.f, {"u": u})
        self.data = data
        self._fn = S.scalar_function([data.p, S.differentiate(u, "r"), fu], ["r"])
        self._vec = S.Program([data.p, S.differentiate(u, "r"), fu], ["r"])
        self.r_max = data.r_max
        self._r = r

    def parts(self, r: float):
        if r > self.r_max:
            return 0.0, 0.0, 0.0
        p, du, fu = self._fn(r)
        ang = 0.0 if r == 0.0 else (fu / r) ** 2
        return p, du, ang

    def parts_array(self, r: np.ndarray):
        vals = self._vec(np.atleast_2d(r))
        p, du, fu = vals
        with np.errstate(divide="ignore", invalid="ignore"):
            ang = np.where(r > 0, (fu / np.where(r > 0, r, 1.0)) ** 2, 0.0)
        outside = r > self.r_max
        return (np.where(outside, 0.0, p), np.where(outside, 0.0, du),
                np.where(outside, 0.0, ang))

    def check_axis(self):
        """f(u)^2/r must vanish as r -> 0 for the density to be integrable."""
        fu0 = self._fn(0.0)[2]
        if abs(fu0) > 1e-12:
            raise AxisDensityError(f"f(u(0)) = {fu0:g} != 0: angular energy ~ 1/r^2 at the axis")


def density(dens: _Density, r, chi):
    """T(N, N) = 1/2 (p^2 + chi^2 u'^2 + f(u)^2/r^2)."""
    p, du, ang = dens.parts_array(np.asarray(r, dtype=float))
    return 0.5 * (p * p + chi * chi * du * du + ang)


def solve_constraint(data: EquivariantData, r_end: float | None = None, h0: float = 1e-3,
                     atol: float = 1e-13, rtol: float = 1e-11, max_dchi: float = 1e-3,
                     h_min: float = 1e-12) -> ConstraintSolution:
    """Integrate chi from the axis outwards by adaptive RK4.

    Beyond ``data.r_max`` the density vanishes, so chi is constant there and
    ``chi_inf = chi(r_max)``.  If chi reaches 0 (or the step underflows as it
    does so) the data is supercritical and the radius r* is reported.
    """
    dens = _Density(data)
    dens.check_axis()
    r_end = data.r_max if r_end is None else r_end

    def rhs(r, chi):
        if chi <= 0.0:
            raise ArithmeticError("chi is not positive")
        p, du, ang = dens.parts(r)
        return -(r / chi) * 0.5 * (p * p + chi * chi * du * du + ang)

    try:
        sol = rk4_adaptive(rhs, 0.0, 1.0, r_end, h0=h0, atol=atol, rtol=rtol, max_dy=max_dchi,
                           h_min=h_min, stop=lambda r, chi: chi <= 0.0)
    except StepUnderflow as exc:
        part = exc.partial
        return ConstraintSolution(part.x, part.y, SUPERCRITICAL, r_star=float(exc.x), ode=part,
                                  data=data, energy_density=density(dens, part.x, part.y))
    if sol.status == "stopped":
        return ConstraintSolution(sol.x, sol.y, SUPERCRITICAL, r_star=float(sol.stop_x), ode=sol,
                                  data=data, energy_density=density(dens, sol.x, sol.y))
    out = ConstraintSolution(sol.x, sol.y, SUBCRITICAL, chi_inf=float(sol.y[-1]), ode=sol,
                             data=data)
    out.energy_density = density(dens, sol.x, sol.y)
    return out


def energy_quadrature(sol: ConstraintSolution, rtol: float = 1e-12) -> float:
    """E = 2 pi int T(N, N) e^{gamma} r dr, with chi from the solution's
    interpolant; independent of the integrated-constraint identity."""
    if sol.status != SUBCRITICAL:
        raise ValueError("energy quadrature needs a subcritical solution")
    dens = _Density(sol.data)
    r_max = min(sol.data.r_max, float(sol.r[-1]))

    def integrand(r):
        chi = sol.ode(r)
        return density(dens, r, chi) * r / chi

    # split at the accepted steps so each panel sees a single Hermite cubic
    knots = sol.r[sol.r <= r_max]
    if knots[-1] < r_max:
        knots = np.append(knots, r_max)
    total = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        total += adaptive_simpson(integrand, a, b, rtol=rtol, atol=1e-16, initial=2).value
    return 2.0 * math.pi * total


@dataclass
class MassIdentities:
    m_av: float
    angle_deficit: float
    energy_identity: float
    energy_quadrature: float
    deficit_vs_mass: float
    deficit_vs_energy: float
    m_av_in_range: bool

    def as_dict(self):
        return dict(self.__dict__)


def mass_identities(sol: ConstraintSolution) -> MassIdentities:
    """angle deficit = pi m_AV (algebraic) and = E (quadrature route)."""
    if sol.status != SUBCRITICAL:
        raise ValueError("mass identities are defined for subcritical solutions")
    e_quad = energy_quadrature(sol)
    deficit = sol.angle_deficit
    m = sol.m_av
    rel = abs(deficit - e_quad) / e_quad if e_quad else abs(deficit - e_quad)
    return MassIdentities(m, deficit, sol.energy, e_quad, abs(deficit - math.pi * m), rel,
                          0.0 <= m < 2.0)


@dataclass
class SweepPoint:
    amplitude: float
    status: str
    energy: float | None
    m_av: float | None
    r_star: float | None


def amplitude_sweep(amplitudes, kind: str = "gaussian_bump", width: float = 1.0,
                    target: str = "sphere", **kw) -> list[SweepPoint]:
    out = []
    for a in amplitudes:
        sol = solve_constraint(equivariant_profile(kind, a, width, target), **kw)
        out.append(SweepPoint(float(a), sol.status, sol.energy, sol.m_av, sol.r_star))
    return out


def critical_amplitude(lo: float, hi: float, kind: str = "gaussian_bump", width: float = 1.0,
                       target: str = "sphere", iterations: int = 30, **kw):
    """Bisect for the amplitude where the status flips; ``lo`` must be
    subcritical and ``hi`` supercritical.  Returns (lo, hi) after bisection."""
    def status(a):
        return solve_constraint(equivariant_profile(kind, a, width, target), **kw).status
    if status(lo) != SUBCRITICAL or status(hi) != SUPERCRITICAL:
        raise ValueError("bracket does not straddle the critical amplitude")
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if status(mid) == SUBCRITICAL:
            lo = mid
        else:
            hi = mid
    return lo, hi
