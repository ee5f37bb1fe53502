import math

import numpy as np
import pytest

from axired import symexpr as S
from axired.geometry import (
    Chart, EmptyRegionError, LORENTZIAN, RIEMANNIAN, MetricSpec, SignatureError,
    SingularMetricError, box_scalar, box_scalar_divergence_form, christoffel, conformal_box,
    conformal_ricci, einstein_divergence_fd, einstein_tensor, first_bianchi, inverse_metric,
    ricci, ricci_scalar, riemann,
)
from axired.geometry.conformal import DimensionError, conformal_volume_factor


def ev(e, **pts):
    return S.evaluate(e, pts)


def max_abs(exprs, chart, n=30, seed=42):
    exprs = [e for e in exprs if e is not S.ZERO]
    if not exprs:
        return 0.0
    pts = chart.sample(n, seed)
    prog = S.Program(exprs)
    return float(np.max(np.abs(prog({v: pts[v] for v in prog.variables}))))


def flat_polar():
    chart = Chart(("r", "theta"), {}, {"r": (0.5, 4.0), "theta": (0.0, 6.0)})
    return MetricSpec.diagonal(["1", "r^2"], chart, signature=RIEMANNIAN)


def metric_3(diag=("1", "1", "1"), box=None):
    chart = Chart(("x", "y", "z"), {}, box or {c: (0.5, 1.5) for c in "xyz"})
    return MetricSpec.diagonal(list(diag), chart, signature=RIEMANNIAN)


# -- inverse ----------------------------------------------------------------------------

def test_inverse_of_schwarzschild_tt(schw):
    inv = inverse_metric(schw.metric)
    assert ev(inv[0, 0], r=4.0, m=1.0) == pytest.approx(-2.0)


def test_inverse_is_inverse(kerr):
    pts = kerr.chart.sample(25)
    g = kerr.metric.as_tensor().evaluate(pts)
    gi = inverse_metric(kerr.metric).evaluate(pts)
    prod = np.einsum("ab...,bc...->ac...", g, gi)
    assert np.max(np.abs(prod - np.eye(4)[..., None])) < 1e-12


def test_singular_metric():
    chart = Chart(("x", "y"), {})
    m = MetricSpec.from_lower({(0, 0): "1", (0, 1): "1", (1, 1): "1"}, chart, signature=RIEMANNIAN)
    with pytest.raises(SingularMetricError):
        inverse_metric(m)


# -- connection and curvature -------------------------------------------------------------

def test_schwarzschild_christoffel_example(schw):
    gam = christoffel(schw.metric)
    # Gamma^t_{tr} = m / (r (r - 2m)); at r = 4, m = 1 this is 1/8
    assert ev(gam[0, 0, 1], r=4.0, m=1.0, theta=1.0) == pytest.approx(0.125, abs=1e-15)
    assert gam[0, 0, 1] is gam[0, 1, 0]


def test_christoffel_against_finite_differences(kerr):
    # independent route: numeric metric, FD derivatives, numpy inverse
    pt = {"t": 0.3, "r": 5.0, "theta": 1.1, "phi": 0.4, "M": 1.0, "a": 0.5}
    coords = kerr.metric.coords
    gprog = S.Program(list(kerr.metric.components.ravel()))

    def gnum(p):
        return gprog({v: np.array([p[v]]) for v in gprog.variables})[:, 0].reshape(4, 4)

    h = 1e-4
    dg = np.zeros((4, 4, 4))
    for c, x in enumerate(coords):
        acc = 0
        for k, w in ((-2, 1), (-1, -8), (1, 8), (2, -1)):
            q = dict(pt)
            q[x] += k * h
            acc = acc + w * gnum(q)
        dg[c] = acc / (12 * h)
    gi = np.linalg.inv(gnum(pt))
    lower = 0.5 * (np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg)
    oracle = np.einsum("ad,dbc->abc", gi, lower)
    got = christoffel(kerr.metric).evaluate({k: np.array([v]) for k, v in pt.items()})[..., 0]
    assert np.max(np.abs(got - oracle)) < 1e-8


def test_schwarzschild_is_ricci_flat(schw):
    assert max_abs(ricci(schw.metric).components.ravel(), schw.chart) < 1e-12


def test_kerr_ricci_scalar_vanishes(kerr):
    assert max_abs([ricci_scalar(kerr.metric)], kerr.chart) < 1e-12


def test_round_sphere_curvature():
    chart = Chart(("theta", "phi"), {}, {"theta": (0.3, 2.8), "phi": (0, 6)})
    m = MetricSpec.diagonal(["1", "sin(theta)^2"], chart, signature=RIEMANNIAN)
    assert ev(ricci_scalar(m), theta=0.9) == pytest.approx(2.0, abs=1e-13)


def test_first_bianchi(kerr):
    assert max_abs(first_bianchi(kerr.metric).components.ravel(), kerr.chart, n=10) < 1e-10


def test_riemann_antisymmetry(schw):
    R = riemann(schw.metric).components
    for a in range(4):
        for b in range(4):
            for c in range(4):
                for d in range(4):
                    assert R[a, b, c, d] is S.neg(R[a, b, d, c])


def test_contracted_bianchi_nonvacuum():
    chart = Chart(("t", "r", "theta", "phi"), {},
                  {"t": (0.1, 1), "r": (1, 3), "theta": (0.4, 2.7), "phi": (0, 6)})
    m = MetricSpec.diagonal(["-(1 + r^2/3)", "exp(t*r/5)", "r^2", "r^2*sin(theta)^2"], chart)
    pts = chart.sample(15)
    # sanity: the Einstein tensor is not trivially zero here
    assert max_abs(einstein_tensor(m).components.ravel(), chart) > 1e-3
    assert np.max(np.abs(einstein_divergence_fd(m, pts))) < 1e-7


def test_einstein_normal_component_identity():
    chart = Chart(("t", "r", "theta"), {}, {"t": (0, 1), "r": (1, 4), "theta": (0, 6)})
    Om = S.parse("t*r^2/3 + sin(r)")
    gam = S.parse("r^2*exp(-t)/2")
    m = MetricSpec.diagonal([S.neg(S.exp(S.mul(2, Om))), S.exp(S.mul(2, gam)), "r^2"], chart)
    E = einstein_tensor(m)
    enn = S.mul(S.exp(S.mul(-2, Om)), E[0, 0])
    target = S.mul(S.exp(S.mul(-2, gam)), S.pow_(S.sym("r"), -1), S.differentiate(gam, "r"))
    assert S.is_zero(S.sub(enn, target), chart) in (S.ZeroStatus.PROVABLY_ZERO,
                                                     S.ZeroStatus.NUMERICALLY_ZERO)


# -- scalar operators ----------------------------------------------------------------------

def test_box_of_r_squared_in_flat_polar():
    m = flat_polar()
    assert ev(box_scalar(m, S.parse("r^2")), r=1.7, theta=0.2) == pytest.approx(4.0)


def test_box_forms_agree(kerr):
    s = S.parse("r^2*cos(theta) + exp(-r)*sin(phi)")
    diff = S.sub(box_scalar(kerr.metric, s), box_scalar_divergence_form(kerr.metric, s))
    assert max_abs([diff], kerr.chart) < 1e-11


def test_box_of_constant_is_zero(kerr):
    assert box_scalar(kerr.metric, S.const(3)) is S.ZERO


# -- conformal identities ---------------------------------------------------------------------

CONFORMAL_CASES = [
    (("1", "1", "1"), "x*y/3 + z^2/5"),
    (("1", "x^2", "1"), "sin(y)*z/2"),
    (("1 + x^2", "exp(y)", "1 + z^2/4"), "log(1 + x*y*z)/2"),
]


@pytest.mark.parametrize("diag,psi", CONFORMAL_CASES)
def test_conformal_ricci_matches_direct(diag, psi):
    m = metric_3(diag)
    psi = S.parse(psi)
    direct = ricci(m.scaled(S.exp(S.mul(2, psi)))).components
    formula = conformal_ricci(m, psi).components
    scale = max_abs(direct.ravel(), m.chart) + 1
    assert max_abs([S.sub(a, b) for a, b in zip(direct.ravel(), formula.ravel())], m.chart) < 1e-10 * scale


@pytest.mark.parametrize("diag,psi", CONFORMAL_CASES)
def test_conformal_box_matches_direct(diag, psi):
    m = metric_3(diag)
    psi = S.parse(psi)
    s = S.parse("x^2 - y*z + cos(x*z)")
    direct = box_scalar(m.scaled(S.exp(S.mul(2, psi))), s)
    assert max_abs([S.sub(direct, conformal_box(m, psi, s))], m.chart) < 1e-10


def test_conformal_volume_factor():
    m = metric_3(("1 + x^2", "1", "2"))
    psi = S.parse("x*y")
    direct = m.scaled(S.exp(S.mul(2, psi))).volume_element()
    assert max_abs([S.sub(direct, conformal_volume_factor(m, psi))], m.chart) < 1e-12


def test_conformal_formulas_require_3d():
    with pytest.raises(DimensionError):
        conformal_ricci(flat_polar(), S.parse("r"))


def test_zero_conformal_factor_is_identity():
    m = metric_3(("1", "x^2", "1"))
    assert np.all(conformal_ricci(m, 0).components == ricci(m).components)


# -- charts and signatures ------------------------------------------------------------------

def test_chart_margin_and_empty_region():
    c = Chart(("theta",), {}, {"theta": (0, math.pi)}, {"theta": 0.3})
    lo, hi = c.interval("theta")
    assert lo == pytest.approx(0.3) and hi == pytest.approx(math.pi - 0.3)
    with pytest.raises(EmptyRegionError):
        Chart(("x",), {}, {"x": (1.0, 1.0)})
    with pytest.raises(EmptyRegionError):
        c.sample(0)


def test_sample_is_deterministic_and_inside():
    c = Chart(("a", "b"), {"k": 2.0}, {"a": (1, 2), "b": (-1, 0)})
    p, q = c.sample(50, 7), c.sample(50, 7)
    assert np.array_equal(p["a"], q["a"])
    assert np.all((p["a"] >= 1) & (p["a"] <= 2) & (p["b"] >= -1) & (p["b"] <= 0))
    assert np.all(p["k"] == 2.0)


def test_signature_checks():
    chart = Chart(("t", "x"), {})
    with pytest.raises(SignatureError):
        MetricSpec.diagonal(["1", "1"], chart, signature=LORENTZIAN).check()
    with pytest.raises(SignatureError):
        MetricSpec.diagonal(["-1", "1"], chart, signature=RIEMANNIAN).check()


def test_spatial_block(schw):
    q = schw.metric.spatial()
    assert q.signature == RIEMANNIAN and q.coords == ("r", "theta", "phi")
    with pytest.raises(SignatureError):
        q.spatial()


def test_unknown_symbols_rejected():
    with pytest.raises(ValueError):
        MetricSpec.diagonal(["1", "k*x"], Chart(("x", "y"), {}), signature=RIEMANNIAN)
