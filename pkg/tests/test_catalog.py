import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from axired import catalog as K
from axired import symexpr as S
from axired.geometry import ricci

EXAMPLES_KEYS = ("minkowski", "schwarzschild", "kerr")


def ev(e, **pts):
    return S.evaluate(e, pts)


def test_schwarzschild_tt_example(schw):
    assert ev(schw.metric[0, 0], r=4.0, m=1.0) == pytest.approx(-0.5)


def test_kerr_cross_term_example(kerr):
    assert ev(kerr.metric[0, 3], r=4.0, theta=math.pi / 2, M=1.0, a=0.5) == pytest.approx(-0.25)


def test_kerr_zero_spin_is_schwarzschild():
    k = K.kerr(1.0, 0.0).metric
    s = K.schwarzschild(1.0).metric
    pts = {"r": 5.3, "theta": 0.7, "M": 1.0, "m": 1.0, "a": 0.0}
    for i in range(4):
        for j in range(4):
            assert ev(k[i, j], **pts) == pytest.approx(ev(s[i, j], **pts), rel=1e-14, abs=1e-15)


def test_parameter_ranges():
    with pytest.raises(K.ParameterRangeError):
        K.schwarzschild(0.0)
    with pytest.raises(K.ParameterRangeError):
        K.kerr(1.0, 1.0)
    with pytest.raises(K.ParameterRangeError):
        K.equivariant_profile("gaussian_bump", -1.0)
    with pytest.raises(K.ParameterRangeError):
        K.equivariant_profile("gaussian_bump", 1.0, target="torus")
    with pytest.raises(KeyError):
        K.get("de-sitter")


def test_sampling_box_scales_with_mass():
    e = K.kerr(2.0, 1.0)
    assert e.chart.interval("r") == (6.0, 20.0)
    lo, hi = e.chart.interval("theta")
    assert lo == pytest.approx(0.3) and hi == pytest.approx(math.pi - 0.3)


def test_spatial_cartesian_is_ricci_flat():
    q = K.schwarzschild_spatial_cartesian(1.0)
    # time-symmetric vacuum slice: scalar curvature vanishes
    from axired.geometry import ricci_scalar
    assert abs(ev(ricci_scalar(q), x=4.0, y=3.5, z=5.0, m=1.0)) < 1e-12
    assert any(c is not S.ZERO for c in ricci(q).components.ravel())


def test_profiles_vanish_on_axis():
    for kind in ("gaussian_bump", "compact_bump"):
        d = K.equivariant_profile(kind, 0.7, 1.5)
        assert ev(d.u, r=0.0) == 0.0
        assert d.p is S.ZERO
    assert K.equivariant_profile("gaussian_bump", 1, 2).r_max == 16.0
    assert ev(K.equivariant_profile("compact_bump", 1, 2).u, r=2.0) == 0.0


@pytest.mark.parametrize("name", EXAMPLES_KEYS)
def test_save_load_save_byte_identical(tmp_path, name):
    m = K.get(name).metric
    p1, p2 = tmp_path / "a.metric", tmp_path / "b.metric"
    K.save(m, p1, name)
    K.save(K.load(p1), p2, name)
    assert p1.read_bytes() == p2.read_bytes()
    back = K.load(p1)
    assert back.chart.params == m.chart.params
    for i in range(4):
        for j in range(4):
            assert back[i, j] is m[i, j]


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.0, 0.99))
def test_round_trip_any_parameters(M, spin):
    m = K.kerr(M, spin * M).metric
    text = K.dumps(m)
    assert K.dumps(K.loads(text)) == text


@pytest.mark.parametrize("text,line", [
    ("0 0 := 1\n", None),
    ("dim 2 coords x y signature riemannian\n0 0 := 1 +\n", 2),
    ("dim 2 coords x y signature riemannian\nbox x 0\n", 2),
    ("dim 2 coords x y signature riemannian\nparam k\n", 2),
    ("dim 2 coords x\n", 1),
    ("dim 2 coords x y signature riemannian\nwhat is this\n", 2),
])
def test_metric_file_errors(text, line):
    with pytest.raises(K.MetricFileError) as info:
        K.loads(text)
    assert info.value.line == line


def test_metric_file_comments_and_symmetry():
    m = K.loads("# comment\ndim 2 coords x y signature riemannian\n"
                "box x 1 2\n0 0 := 1\n0 1 := x/10  # off-diagonal\n1 1 := 2\n")
    assert m[0, 1] is m[1, 0]
    assert m.chart.interval("x") == (1.0, 2.0)
