import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from axired import catalog as K
from axired import reduction as RD
from axired import symexpr as S
from axired.geometry import Chart, MetricSpec

# Frozen from an independent route: numpy finite differences of the Kerr
# metric, numpy inverse and Levi-Civita sums, then scipy.integrate.quad along
# the polyline (t, r, theta) = (0.5, 4, 1) -> (0.5, 8, 1) -> (0.5, 8, 2).
KERR_G_AT_5_12 = {"r": 0.0010909235453865375, "theta": 2.4317372599017038}
KERR_POTENTIAL = 2.64487525424483


@pytest.fixture(scope="module")
def kerr_rd():
    return RD.split_killing(K.kerr(1.0, 0.5).metric)


@pytest.fixture(scope="module")
def kerr_twist(kerr_rd):
    return RD.twist(kerr_rd)


# -- split ---------------------------------------------------------------------

def test_minkowski_split(mink):
    rd = RD.split_killing(mink.metric)
    assert rd.u is S.parse("log(r*sin(theta))")
    assert all(a is S.ZERO for a in rd.A)
    assert rd.metric.coords == ("t", "r", "theta")


def test_schwarzschild_split_u_value(schw):
    rd = RD.split_killing(schw.metric)
    assert S.evaluate(rd.u, {"r": 4.0, "theta": math.pi / 2}) == pytest.approx(math.log(4.0))


def test_kerr_connection_one_form(kerr_rd):
    # A_t = g_{t phi} / g_{phi phi}
    pt = {"r": 4.0, "theta": math.pi / 2, "M": 1.0, "a": 0.5}
    gtp = -2 * 1.0 * 4.0 * 0.5 / 16.0
    B = (16.25) ** 2 - 0.25 * (16 - 8 + 0.25)
    gpp = B / 16.0
    assert S.evaluate(kerr_rd.A[0], pt) == pytest.approx(gtp / gpp, rel=1e-14)
    assert kerr_rd.A[1] is S.ZERO and kerr_rd.A[2] is S.ZERO


@pytest.mark.parametrize("name", ["minkowski", "schwarzschild", "kerr"])
def test_reconstruction(name):
    m4 = K.get(name).metric
    rd = RD.split_killing(m4)
    assert RD.reconstruction_residual(rd, m4) < 1e-9


def test_not_axisymmetric():
    chart = Chart(("t", "r", "theta", "phi"), {}, {"r": (1, 2), "theta": (0.5, 2.5)})
    m = MetricSpec.diagonal(["-1", "1", "r^2", "r^2*(2 + sin(phi))"], chart)
    with pytest.raises(RD.NotAxisymmetricError):
        RD.split_killing(m)


def test_degenerate_killing_norm():
    chart = Chart(("t", "r", "theta", "phi"), {}, {"r": (1, 2), "theta": (-1, 1)})
    m = MetricSpec.diagonal(["-1", "1", "r^2", "r^2*theta^3"], chart)
    with pytest.raises(RD.DegenerateKillingError):
        RD.split_killing(m)


def test_conformal_reduce_twice(schw):
    rd = RD.conformal_reduce(RD.split_killing(schw.metric))
    with pytest.raises(RD.ConformalStateError):
        RD.conformal_reduce(rd)
    with pytest.raises(RD.ConformalStateError):
        RD.ewm_residuals(RD.split_killing(schw.metric))


# -- vacuum equations ---------------------------------------------------------------

@pytest.mark.parametrize("name", ["minkowski", "schwarzschild", "kerr"])
def test_reduced_vacuum_equations_hold(name):
    res = RD.reduced_vacuum_residuals(K.get(name).metric).max_abs()
    assert max(res.values()) < 1e-9


def test_flipped_sign_fails_for_kerr_only(schw, kerr):
    assert max(RD.reduced_vacuum_residuals(schw.metric, "flipped").max_abs().values()) < 1e-9
    assert RD.reduced_vacuum_residuals(kerr.metric, "flipped").max_abs()["ricci"] > 1e-3


# -- twist ----------------------------------------------------------------------------

def test_kerr_dF_structurally_zero(kerr_rd):
    dF = RD.exterior_derivative(RD.faraday(kerr_rd))
    assert all(c is S.ZERO for c in dF.components.ravel())


def test_kerr_twist_form_values(kerr_twist):
    pt = {"t": 0.5, "r": 5.0, "theta": 1.2, "M": 1.0, "a": 0.5}
    G = kerr_twist.G.components
    assert G[0] is S.ZERO
    assert S.evaluate(G[1], pt) == pytest.approx(KERR_G_AT_5_12["r"], rel=1e-8)
    assert S.evaluate(G[2], pt) == pytest.approx(KERR_G_AT_5_12["theta"], rel=1e-8)


def test_kerr_twist_closed_and_control(kerr_rd, kerr_twist):
    closed = RD.closure_residual(kerr_twist.G)
    control = RD.closure_residual(RD.twist_one_form(kerr_rd, weight_power=None))
    assert closed < 1e-10
    assert control > 1e3 * closed


def test_twist_potential_frozen_value(kerr_twist):
    v = RD.twist_potential(kerr_twist.G, (0.5, 4, 1), (0.5, 8, 2), path=[(0.5, 8, 1)])
    assert v == pytest.approx(KERR_POTENTIAL, rel=1e-8)


def test_twist_potential_path_independent(kerr_twist):
    G = kerr_twist.G
    a = RD.twist_potential(G, (0.5, 4, 1), (0.5, 8, 2), path=[(0.5, 4, 2)])
    b = RD.twist_potential(G, (0.5, 4, 1), (0.5, 8, 2), path=[(0.2, 6, 0.6), (0.9, 7, 2.5)])
    c = RD.twist_potential(G, (0.5, 4, 1), (0.5, 8, 2))
    assert a == pytest.approx(KERR_POTENTIAL, rel=1e-9)
    assert b == pytest.approx(KERR_POTENTIAL, rel=1e-9)
    assert c == pytest.approx(KERR_POTENTIAL, rel=1e-9)


def test_twist_potential_leaving_box(kerr_twist):
    with pytest.raises(RD.PathDomainError):
        RD.twist_potential(kerr_twist.G, (0.5, 4, 1), (0.5, 50, 1))


def test_static_metrics_have_no_twist(schw):
    tw = RD.twist(RD.split_killing(schw.metric))
    assert all(c is S.ZERO for c in tw.G.components)


# -- wave map --------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["minkowski", "schwarzschild"])
def test_static_wave_map(name):
    rd = RD.conformal_reduce(RD.split_killing(K.get(name).metric))
    assert RD.ewm_residuals(rd).max_abs(rd.chart)["u"] < 1e-10


def test_kerr_wave_map(kerr_rd, kerr_twist):
    rd = RD.conformal_reduce(kerr_rd)
    res = RD.ewm_residuals(rd, kerr_twist).max_abs(rd.chart)
    assert res["u"] < 1e-10 and res["v"] < 1e-10
    assert res["twist_weight4"] < 1e-10
    assert res["twist_weight3"] > 1e-4


# -- properties ---------------------------------------------------------------------------

@settings(max_examples=6, deadline=None)
@given(st.floats(0.0, 0.95), st.floats(0.5, 2.0))
def test_kerr_family_split_and_twist(spin, mass):
    m4 = K.kerr(mass, spin * mass).metric
    rd = RD.split_killing(m4)
    assert RD.reconstruction_residual(rd, m4) < 1e-9 * mass ** 2
    tw = RD.twist(rd)
    assert RD.closure_residual(tw.G) < 1e-9
