"""Stress-energy, cutoff energies, ADM mass and the equivariant constraint."""
from .adm import AdmResult, NonDecayingMetricError, adm_mass, surface_integral
from .constraint import (
    SUBCRITICAL, SUPERCRITICAL, AxisDensityError, ConstraintSolution, MassIdentities,
    SweepPoint, amplitude_sweep, critical_amplitude, energy_quadrature, mass_identities,
    solve_constraint,
)
from .energy import (
    CONVERGENT, INCONCLUSIVE, LOG_DIVERGENT, POWER_DIVERGENT, CutoffEnergy, EnergyReport,
    InsufficientSamplesError, NonConvergenceError, densify, divergence_fit, energy_cutoff,
    energy_curve, energy_integrand, observed_quadrature_order,
)
from .stress import reduced_energy_density, sqrt_q, stress_energy, t_nn, wave_map_fields

__all__ = [
    "AdmResult", "AxisDensityError", "CONVERGENT", "ConstraintSolution", "CutoffEnergy",
    "EnergyReport", "INCONCLUSIVE", "InsufficientSamplesError", "LOG_DIVERGENT",
    "MassIdentities", "NonConvergenceError", "NonDecayingMetricError", "POWER_DIVERGENT",
    "SUBCRITICAL", "SUPERCRITICAL", "SweepPoint", "adm_mass", "amplitude_sweep",
    "critical_amplitude", "densify", "divergence_fit", "energy_cutoff", "energy_curve",
    "energy_integrand", "energy_quadrature", "mass_identities", "observed_quadrature_order", "solve_constraint", "sqrt_q",
    "reduced_energy_density", "stress_energy", "surface_integral", "t_nn", "wave_map_fields",
]
