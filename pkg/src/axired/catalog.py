"""Built-in spacetimes, equivariant data profiles and the metric text format.

Metric matrices store symmetric components, so a line-element cross term
``2 g_{t phi} dt dphi`` is held as ``g_{t phi}`` in both off-diagonal slots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import symexpr as S
from .geometry.chart import Chart
from .geometry.tensor import LORENTZIAN, RIEMANNIAN, MetricSpec, expr_array

SPHERICAL = ("t", "r", "theta", "phi")
THETA_MARGIN = 0.3


class ParameterRangeError(ValueError):
    pass


class MetricFileError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


@dataclass
class CatalogEntry:
    name: str
    metric: MetricSpec
    params: dict
    box: dict
    facts: dict = field(default_factory=dict)

    @property
    def chart(self) -> Chart:
        return self.metric.chart


def _spherical_chart(scale: float, params: dict) -> Chart:
    return Chart(SPHERICAL, dict(params),
                 {"t": (0.0, 1.0), "r": (3.0 * scale, 10.0 * scale),
                  "theta": (0.0, math.pi), "phi": (0.0, 2 * math.pi)},
                 {"theta": THETA_MARGIN})


def _entry(name, comps, chart, facts) -> CatalogEntry:
    m = MetricSpec.from_lower(comps, chart, signature=LORENTZIAN, time_index=0)
    m.check()
    box = {c: chart.interval(c) for c in chart.coords}
    return CatalogEntry(name, m, dict(chart.params), box, facts)


def minkowski() -> CatalogEntry:
    """-dt^2 + dr^2 + r^2 dtheta^2 + r^2 sin^2(theta) dphi^2."""
    chart = _spherical_chart(1.0, {})
    comps = {(0, 0): "-1", (1, 1): "1", (2, 2): "r^2", (3, 3): "r^2*sin(theta)^2"}
    return _entry("minkowski", comps, chart, {"vacuum": True, "killing": ["t", "phi"]})


def schwarzschild(m: float = 1.0) -> CatalogEntry:
    if not m > 0:
        raise ParameterRangeError(f"Schwarzschild mass must be positive, got {m}")
    chart = _spherical_chart(m, {"m": float(m)})
    comps = {(0, 0): "-(1 - 2*m/r)", (1, 1): "(1 - 2*m/r)^(-1)", (2, 2): "r^2",
             (3, 3): "r^2*sin(theta)^2"}
    return _entry("schwarzschild", comps, chart, {"vacuum": True, "killing": ["t", "phi"]})


def kerr(M: float = 1.0, a: float = 0.5) -> CatalogEntry:
    """Boyer-Lindquist Kerr with A = r^2 + a^2 cos^2, Delta = r^2 - 2Mr + a^2,
    B = (r^2 + a^2)^2 - a^2 Delta sin^2."""
    if not M > 0:
        raise ParameterRangeError(f"Kerr mass must be positive, got {M}")
    if not 0 <= a < M:
        raise ParameterRangeError(f"Kerr spin must satisfy 0 <= a < M, got a={a}, M={M}")
    chart = _spherical_chart(M, {"M": float(M), "a": float(a)})
    A = "(r^2 + a^2*cos(theta)^2)"
    D = "(r^2 - 2*M*r + a^2)"
    B = f"((r^2 + a^2)^2 - a^2*{D}*sin(theta)^2)"
    comps = {
        (0, 0): f"-(1 - 2*M*r/{A})",
        (0, 3): f"-2*M*r*a*sin(theta)^2/{A}",
        (1, 1): f"{A}/{D}",
        (2, 2): A,
        (3, 3): f"{B}*sin(theta)^2/{A}",
    }
    return _entry("kerr", comps, chart, {"vacuum": True, "killing": ["t", "phi"]})


def schwarzschild_spatial_cartesian(m: float = 1.0) -> MetricSpec:
    """q_ij = delta_ij + (1/f - 1) x_i x_j / r^2 with f = 1 - 2m/r."""
    if m < 0:
        raise ParameterRangeError(f"mass must be non-negative, got {m}")
    chart = Chart(("x", "y", "z"), {"m": float(m)},
                  {c: (3.0 * max(m, 1.0), 10.0 * max(m, 1.0)) for c in ("x", "y", "z")})
    x = [S.sym(c) for c in chart.coords]
    r = S.sqrt(S.add(*(S.pow_(c, 2) for c in x)))
    mm = S.sym("m")
    # 1/f - 1 = 2m / (r - 2m)
    h = S.mul(2, mm, S.pow_(S.sub(r, S.mul(2, mm)), -1))
    w = S.mul(h, S.pow_(r, -2))
    comps = expr_array((3, 3))
    for i in range(3):
        for j in range(i, 3):
            v = S.mul(w, x[i], x[j])
            comps[i, j] = comps[j, i] = S.add(1, v) if i == j else v
    return MetricSpec(comps, chart, signature=RIEMANNIAN)


def get(name: str, **params) -> CatalogEntry:
    builders = {"minkowski": minkowski, "schwarzschild": schwarzschild, "kerr": kerr}
    if name not in builders:
        raise KeyError(f"unknown catalog metric {name!r}; choose from {sorted(builders)}")
    return builders[name](**params)


# -- equivariant data ------------------------------------------------------------

@dataclass(frozen=True)
class EquivariantData:
    """Radial data for the equivariant model.

    ``u`` and ``p`` are expressions in ``r``; ``f`` is the generating
    function of the target, an expression in ``u``.  Beyond ``r_max`` both
    profiles are treated as zero.
    """

    u: S.Expr
    p: S.Expr
    f: S.Expr
    r_max: float
    label: str = ""


TARGETS = {"sphere": "sin", "hyperbolic": "sinh"}


def equivariant_profile(kind: str = "gaussian_bump", amplitude: float = 0.1, width: float = 1.0,
                        target: str = "sphere") -> EquivariantData:
    """Profiles with u(0) = 0 and p = 0.

    ``gaussian_bump``: u = a r^2 exp(-r^2/w^2), cut at r = 8w.
    ``compact_bump``: u = a (r/w)^2 (1 - (r/w)^2)^3 on r < w, zero outside.
    """
    if amplitude < 0 or not width > 0:
        raise ParameterRangeError("amplitude must be >= 0 and width > 0")
    if target not in TARGETS:
        raise ParameterRangeError(f"target must be one of {sorted(TARGETS)}")
    r = S.sym("r")
    a = S.const(Fraction(amplitude).limit_denominator(10**12))
    w = S.const(Fraction(width).limit_denominator(10**12))
    x2 = S.mul(S.pow_(r, 2), S.pow_(w, -2))
    if kind == "gaussian_bump":
        u = S.mul(a, S.pow_(r, 2), S.exp(S.neg(x2)))
        r_max = 8.0 * width
    elif kind == "compact_bump":
        u = S.mul(a, x2, S.pow_(S.sub(1, x2), 3))
        r_max = float(width)
    else:
        raise ParameterRangeError(f"unknown profile kind {kind!r}")
    f = S.func(TARGETS[target], S.sym("u"))
    return EquivariantData(u, S.ZERO, f, r_max, f"{kind}({amplitude}, {width}, {target})")


# -- metric text format ------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def dumps(m: MetricSpec, name: str | None = None) -> str:
    """Serialize a metric; the box written is the effective one (after margins)."""
    chart = m.chart
    head = f"dim {m.dim} coords {' '.join(chart.coords)} signature {m.signature}"
    if m.signature == LORENTZIAN:
        head += f" time={m.time_index}"
    lines = []
    if name:
        lines.append(f"# {name}")
    lines.append(head)
    for k in sorted(chart.params):
        lines.append(f"param {k}={_fmt(chart.params[k])}")
    for c in chart.coords:
        lo, hi = chart.interval(c)
        lines.append(f"box {c} {_fmt(lo)} {_fmt(hi)}")
    for i in range(m.dim):
        for j in range(i + 1):
            e = m.components[i, j]
            if e is not S.ZERO:
                lines.append(f"{i} {j} := {S.to_string(e)}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> MetricSpec:
    header = None
    params, box, comps = {}, {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if words[0] == "dim":
            if header is not None:
                raise MetricFileError("duplicate header", lineno)
            header = _parse_header(words, lineno)
        elif words[0] == "param":
            body = line[len("param"):].strip()
            if "=" not in body:
                raise MetricFileError("expected 'param name=value'", lineno)
            k, v = (s.strip() for s in body.split("=", 1))
            params[k] = _float(v, lineno)
        elif words[0] == "box":
            if len(words) != 4:
                raise MetricFileError("expected 'box coord lo hi'", lineno)
            box[words[1]] = (_float(words[2], lineno), _float(words[3], lineno))
        elif ":=" in line:
            lhs, rhs = line.split(":=", 1)
            idx = lhs.split()
            if len(idx) != 2 or not all(s.isdigit() for s in idx):
                raise MetricFileError("expected 'i j := expression'", lineno)
            i, j = int(idx[0]), int(idx[1])
            try:
                comps[(max(i, j), min(i, j))] = S.parse(rhs.strip())
            except S.ParseError as exc:
                raise MetricFileError(f"bad expression: {exc}", lineno) from exc
        else:
            raise MetricFileError(f"unrecognized line {raw!r}", lineno)
    if header is None:
        raise MetricFileError("missing 'dim ...' header line")
    n, coords, signature, time = header
    for (i, j) in comps:
        if i >= n:
            raise MetricFileError(f"component index ({i}, {j}) out of range for dim {n}")
    unknown = set(box) - set(coords)
    if unknown:
        raise MetricFileError(f"box for unknown coordinates {sorted(unknown)}")
    chart = Chart(coords, params, box)
    return MetricSpec.from_lower(comps, chart, signature=signature, time_index=time)


def _float(s, lineno):
    try:
        return float(s)
    except ValueError:
        raise MetricFileError(f"not a number: {s!r}", lineno) from None


def _parse_header(words, lineno):
    try:
        n = int(words[1])
        k = words.index("coords")
        coords = tuple(words[k + 1:k + 1 + n])
        s = words.index("signature")
        signature = words[s + 1]
    except (ValueError, IndexError):
        raise MetricFileError("header must read 'dim n coords c1..cn signature ...'", lineno) from None
    if len(coords) != n:
        raise MetricFileError(f"expected {n} coordinate names", lineno)
    time = None
    for w in words[s + 2:]:
        if w.startswith("time="):
            time = int(w[5:])
    if signature == LORENTZIAN and time is None:
        time = 0
    return n, coords, signature, time


def load(path) -> MetricSpec:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def save(m: MetricSpec, path, name: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(m, name))
