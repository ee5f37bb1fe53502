import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from axired import catalog as K
from axired import energetics as EN
from axired import reduction as RD
from axired import symexpr as S
from axired.catalog import EquivariantData, equivariant_profile
from axired.geometry import Chart, MetricSpec, RIEMANNIAN

# Frozen oracles, computed with scipy (solve_ivp DOP853 at rtol 1e-13 for the
# constraint ODE; dblquad of the closed-form Schwarzschild density
# (csc^2 theta - 2m/r) / (2 r sqrt(1 - 2m/r)) for the cutoff energy).
GAUSS_01 = {"chi_inf": 0.998126073608228, "energy": 0.0117742267715184,
            "m_av": 0.00374785278354417}
COMPACT_1_CHI_INF = 0.9813871414148075
GAUSS_3_R_STAR = 1.07928255  # where chi reaches 1e-4; chi -> 0 a few 1e-9 later
SCHW_CUTOFF = {(30.0, math.pi / 4): 2.13255397373301, (100.0, math.pi / 3): 1.860748772541}


@pytest.fixture(scope="module")
def mink_cutoff():
    g, dens = EN.reduced_energy_density(K.minkowski().metric)
    return EN.CutoffEnergy(g, dens)


@pytest.fixture(scope="module")
def schw_reduced():
    return EN.reduced_energy_density(K.schwarzschild(1.0).metric)


# -- stress tensor and normal component -------------------------------------------

def test_schwarzschild_density_closed_form(schw_reduced):
    g, dens = schw_reduced
    for r, th in ((4.0, math.pi / 2), (7.0, 0.8), (25.0, 2.0)):
        f = 1 - 2 / r
        exact = (1 / math.sin(th) ** 2 - 2 / r) / (2 * r * math.sqrt(f))
        got = S.evaluate(dens, {"t": 0.0, "r": r, "theta": th, "m": 1.0})
        assert got == pytest.approx(exact, rel=1e-13)


def test_angular_factor_example():
    e = S.parse("sin(theta)^(-2) - 2*m/r")
    assert S.evaluate(e, {"r": 4.0, "m": 1.0, "theta": math.pi / 2}) == pytest.approx(0.5)


def test_minkowski_density_closed_form(mink_cutoff):
    r = np.array([2.0, 5.0, 40.0])
    th = np.array([0.4, 1.3, 2.9])
    np.testing.assert_allclose(mink_cutoff(r, th), 1 / (2 * r * np.sin(th) ** 2), rtol=1e-13)


def test_stress_tensor_trace():
    chart = Chart(("t", "x", "y"), {}, {"x": (0.5, 2), "y": (0.5, 2)})
    g = MetricSpec.diagonal(["-(1 + x^2)", "1", "exp(y)"], chart)
    u = S.parse("sin(t*x) + y^2")
    T = EN.stress_energy(g, [(u, 1)])
    from axired.geometry import grad_sq, inverse_metric
    gi = inverse_metric(g).components
    trace = S.add(*(S.mul(gi[a, b], T[a, b]) for a in range(3) for b in range(3)))
    diff = S.add(trace, S.mul(S.const("1/2"), grad_sq(g, u)))
    assert S.is_zero(diff, chart) is not S.ZeroStatus.NONZERO


def test_unit_normal_matches_explicit_factor():
    rd = RD.conformal_reduce(RD.split_killing(K.minkowski().metric))
    g = rd.metric
    T = EN.stress_energy(g, EN.wave_map_fields(rd))
    general = EN.t_nn(g, T)
    explicit = EN.t_nn(g, T, normal_factor=S.pow_(S.parse("r*sin(theta)"), -1))
    pts = g.chart.sample(20)
    prog = S.Program([S.sub(general, explicit), general])
    d, v = prog({k: pts[k] for k in prog.variables})
    assert np.max(np.abs(d)) < 1e-13 * np.max(np.abs(v))


def test_kerr_density_includes_twist():
    m4 = K.kerr(1.0, 0.5).metric
    _, with_v = EN.reduced_energy_density(m4)
    _, without = EN.reduced_energy_density(m4, with_twist=False)
    pt = {"t": 0.0, "r": 5.0, "theta": 1.0, "M": 1.0, "a": 0.5}
    assert S.evaluate(with_v, pt) > S.evaluate(without, pt)


# -- cutoff energy ------------------------------------------------------------------

@pytest.mark.parametrize("eps", [math.pi / 6, math.pi / 4, math.pi / 3])
def test_minkowski_cutoff_exact(mink_cutoff, eps):
    assert mink_cutoff.integrate(1.0, math.e, eps).value == pytest.approx(1 / math.tan(eps), rel=1e-9)
    assert mink_cutoff.integrate(2.0, 2000.0, eps).value == pytest.approx(
        math.log(1000.0) / math.tan(eps), rel=1e-9)


@pytest.mark.parametrize("key", list(SCHW_CUTOFF))
def test_schwarzschild_cutoff_oracle(schw_reduced, key):
    g, dens = schw_reduced
    R, eps = key
    got = EN.CutoffEnergy(g, dens).integrate(3.0, R, eps).value
    assert got == pytest.approx(SCHW_CUTOFF[key], rel=1e-10)


def test_cutoff_arguments(mink_cutoff):
    with pytest.raises(ValueError):
        mink_cutoff.integrate(2.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        mink_cutoff.integrate(1.0, 2.0, 2.0)


@settings(max_examples=15, deadline=None)
@given(st.floats(1.0, 50.0), st.floats(1.5, 20.0), st.floats(1.5, 20.0), st.floats(0.2, 1.2))
def test_cutoff_additive_and_monotone(r0, k1, k2, eps):
    g, dens = EN.reduced_energy_density(K.minkowski().metric)
    cut = EN.CutoffEnergy(g, dens)
    R1, R2 = r0 * k1, r0 * k1 * k2
    a = cut.integrate(r0, R1, eps).value
    b = cut.integrate(R1, R2, eps).value
    whole = cut.integrate(r0, R2, eps).value
    assert a > 0 and b > 0
    assert whole == pytest.approx(a + b, rel=1e-9)
    narrower = cut.integrate(r0, R2, min(eps * 1.2, 1.5)).value
    assert narrower < whole


# -- divergence classification ---------------------------------------------------------

RADII = np.logspace(1, 5, 9)


def test_fit_log_divergent():
    rep = EN.divergence_fit([(R, 2.0 * math.log(R) + 1.0) for R in RADII], eps=0.5)
    assert rep.verdict == EN.LOG_DIVERGENT
    assert rep.c1 == pytest.approx(2.0) and rep.c0 == pytest.approx(1.0)


def test_fit_convergent():
    rep = EN.divergence_fit([(R, 1.0 - R ** -3) for R in RADII])
    assert rep.verdict == EN.CONVERGENT


def test_fit_power_divergent():
    rep = EN.divergence_fit([(R, R ** 0.5) for R in RADII])
    assert rep.verdict == EN.POWER_DIVERGENT
    assert rep.power == pytest.approx(0.5)


def test_fit_inconclusive():
    rep = EN.divergence_fit([(R, math.sin(math.log(R))) for R in RADII])
    assert rep.verdict == EN.INCONCLUSIVE


def test_fit_needs_samples_and_span():
    with pytest.raises(EN.InsufficientSamplesError):
        EN.divergence_fit([(R, 1.0) for R in RADII[:4]])
    with pytest.raises(EN.InsufficientSamplesError):
        EN.divergence_fit([(R, 1.0) for R in np.linspace(10, 90, 6)])


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 10.0), st.floats(-5.0, 5.0))
def test_fit_recovers_log_slope(c1, c0):
    rep = EN.divergence_fit([(R, c1 * math.log(R) + c0) for R in RADII])
    assert rep.c1 == pytest.approx(c1, rel=1e-9, abs=1e-9)
    assert rep.verdict == EN.LOG_DIVERGENT


def test_densify():
    assert EN.densify([1.0, 100.0]) == pytest.approx([1.0, 10.0, 100.0])
    assert len(EN.densify([10, 1e2, 1e3, 1e4], per_gap=2)) == 10


def test_minkowski_curve_is_log_divergent(mink_cutoff):
    curve = EN.energy_curve(mink_cutoff, 1.0, EN.densify([10, 1e2, 1e3, 1e4]), math.pi / 4)
    rep = EN.divergence_fit(curve, math.pi / 4)
    assert rep.verdict == EN.LOG_DIVERGENT
    assert abs(rep.c1 - 1.0) < 1e-6


def test_localized_density_is_convergent():
    g, _ = EN.reduced_energy_density(K.minkowski().metric)
    cut = EN.CutoffEnergy(g, S.parse("r*exp(-r^2)*sin(theta)"))
    rep = EN.divergence_fit(EN.energy_curve(cut, 0.01, np.logspace(0, 3, 7), 0.3))
    assert rep.verdict == EN.CONVERGENT


def test_simpson_order_on_smooth_integrand():
    assert EN.observed_quadrature_order(np.exp, 0.0, 1.0, panels=16) == pytest.approx(4.0, abs=0.2)


# -- ADM mass ------------------------------------------------------------------------

@pytest.mark.parametrize("R", [50.0, 300.0])
def test_adm_surface_value_exact(R):
    q = K.schwarzschild_spatial_cartesian(1.0)
    assert EN.surface_integral(q, R) == pytest.approx(1.0 / (1 - 2.0 / R), rel=1e-6)


@pytest.mark.parametrize("m", [0.5, 1.0, 2.0])
def test_adm_mass_schwarzschild(m):
    res = EN.adm_mass(K.schwarzschild_spatial_cartesian(m))
    assert res.mass == pytest.approx(m, rel=1e-6)


def test_adm_mass_flat_is_zero():
    assert abs(EN.adm_mass(K.schwarzschild_spatial_cartesian(0.0)).mass) < 1e-10


def test_adm_non_decaying():
    chart = Chart(("x", "y", "z"), {}, {c: (1, 2) for c in "xyz"})
    q = MetricSpec.diagonal(["1 + x^2/10", "1", "1"], chart, signature=RIEMANNIAN)
    with pytest.raises(EN.NonDecayingMetricError):
        EN.adm_mass(q)


def test_spatial_trace_example():
    q = K.schwarzschild_spatial_cartesian(1.0)
    tr = S.add(*(q.components[i, i] for i in range(3)))
    # 3 + 2m/(r - 2m) at r = 10, m = 1
    assert S.evaluate(tr, {"x": 6.0, "y": 8.0, "z": 0.0, "m": 1.0}) == pytest.approx(3.25)


# -- constraint ODE ---------------------------------------------------------------------

def test_constraint_gaussian_oracle():
    sol = EN.solve_constraint(equivariant_profile("gaussian_bump", 0.1))
    assert sol.status == EN.SUBCRITICAL
    assert sol.chi_inf == pytest.approx(GAUSS_01["chi_inf"], rel=1e-11)
    assert sol.energy == pytest.approx(GAUSS_01["energy"], rel=1e-8)
    assert sol.m_av == pytest.approx(GAUSS_01["m_av"], rel=1e-8)


def test_constraint_compact_oracle():
    sol = EN.solve_constraint(equivariant_profile("compact_bump", 1.0))
    assert sol.chi_inf == pytest.approx(COMPACT_1_CHI_INF, rel=1e-11)


def test_mass_identities():
    ids = EN.mass_identities(EN.solve_constraint(equivariant_profile("gaussian_bump", 1.0)))
    assert ids.deficit_vs_mass < 1e-12
    assert ids.deficit_vs_energy < 1e-6
    assert ids.m_av_in_range


def test_supercritical_radius():
    sol = EN.solve_constraint(equivariant_profile("gaussian_bump", 3.0))
    assert sol.status == EN.SUPERCRITICAL
    assert sol.chi_inf is None and sol.m_av is None
    assert sol.r_star == pytest.approx(GAUSS_3_R_STAR, abs=1e-6)
    with pytest.raises(ValueError):
        EN.mass_identities(sol)


def test_hyperbolic_target_small_data():
    sol = EN.solve_constraint(equivariant_profile("compact_bump", 0.5, target="hyperbolic"))
    assert sol.status == EN.SUBCRITICAL and 0 < sol.m_av < 2


def test_axis_density_error():
    data = EquivariantData(S.parse("1 + r^2"), S.ZERO, S.parse("sin(u)"), 3.0)
    with pytest.raises(EN.AxisDensityError):
        EN.solve_constraint(data)


def test_critical_amplitude_bracket():
    lo, hi = EN.critical_amplitude(2.0, 3.0, iterations=12)
    assert lo < hi and hi - lo < 1e-3
    assert 2.43 < lo < 2.436
    with pytest.raises(ValueError):
        EN.critical_amplitude(0.1, 0.2, iterations=1)


def test_sweep_rows_and_csv_shape():
    sol = EN.solve_constraint(equivariant_profile("gaussian_bump", 0.5))
    rows = list(sol.rows())
    assert len(rows) == len(sol.r) and rows[0][1] == 1.0
    assert np.all(np.diff(sol.chi) <= 0)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.0, 2.3), st.floats(0.0, 2.3))
def test_mass_monotone_and_bounded(a, b):
    lo, hi = sorted((a, b))
    s_lo, s_hi = (EN.solve_constraint(equivariant_profile("gaussian_bump", x)) for x in (lo, hi))
    assert 0.0 <= s_lo.m_av <= s_hi.m_av + 1e-12 < 2.0
