"""Kaluza-Klein reduction of an axisymmetric 4-metric along its rotational
Killing field, and the residuals of the reduced field equations.

A 4-metric independent of ``phi`` is split as

    gbar = g + e^{2u} (dphi + A_mu dx^mu)^2

with ``e^{2u} = gbar_{phi phi}`` and ``A_mu = gbar_{mu phi} / gbar_{phi phi}``.
The twist one-form is ``G = e^{3u} *F`` with the Hodge star of the
*unrescaled* 3-metric ``g`` (equivalently ``e^{4u} *~F`` in ``g~ = e^{2u} g``);
orientation ``eps_{t r theta} = +sqrt|det|``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from . import symexpr as S
from .geometry import curvature as C
from .geometry.chart import Chart
from .geometry.tensor import MetricSpec, TensorField, expr_array
from .numerics import adaptive_simpson
from .symexpr import Expr


class ReductionError(ValueError):
    pass


class NotAxisymmetricError(ReductionError):
    pass


class DegenerateKillingError(ReductionError):
    pass


class ConformalStateError(ReductionError):
    pass


class PathDomainError(ReductionError):
    pass


def _sqrt_if_square(x: Expr):
    """Exact square root when ``x`` is a product of even powers, else None."""
    factors = x.args if x.kind == S.expr.MUL else (x,)
    roots = []
    for f in factors:
        if f.kind == S.expr.CONST:
            r = S.expr._exact_root(f.value, 2)
            if r is None:
                return None
            roots.append(S.const(r))
        elif f.kind == S.expr.POW and f.value.denominator == 1 and f.value % 2 == 0:
            roots.append(S.pow_(f.args[0], f.value / 2))
        else:
            return None
    return S.mul(*roots)


def half_log(x: Expr) -> Expr:
    """log(sqrt(x)), written as log of the exact root when one exists.

    Bases are assumed positive on the chart interior (the axis is excluded).
    """
    root = _sqrt_if_square(x)
    if root is not None:
        return S.log(root)
    return S.mul(S.const(Fraction(1, 2)), S.log(x))


@dataclass(frozen=True)
class ReducedData:
    """Result of the Killing split.

    ``metric`` is the 3-metric currently in use (rescaled by ``e^{2u}`` when
    ``conformal`` is set); ``base`` is always the unrescaled one.
    ``norm`` holds ``e^{2u}`` itself so powers of ``e^u`` stay algebraic.
    """

    metric: MetricSpec
    base: MetricSpec
    u: Expr
    norm: Expr
    A: tuple
    conformal: bool
    parent_chart: Chart
    killing_index: int

    def exp_u(self, k) -> Expr:
        """e^{k u} as a power of the Killing norm."""
        return S.pow_(self.norm, Fraction(k) / 2)

    @property
    def chart(self) -> Chart:
        return self.metric.chart

    def one_form(self) -> TensorField:
        return TensorField("d", np.array(self.A, dtype=object), self.chart)


@dataclass
class TwistData:
    F: TensorField
    G: TensorField
    weight_power: int = 3
    potential: dict = field(default_factory=dict)


# -- split ---------------------------------------------------------------------

def split_killing(m4: MetricSpec, killing: str = "phi") -> ReducedData:
    """Split a phi-independent 4-metric into (g, u, A)."""
    if m4.dim != 4:
        raise ReductionError("split_killing expects a 4-metric")
    if killing not in m4.coords:
        raise ReductionError(f"no coordinate named {killing!r}")
    k = m4.coords.index(killing)
    for c in m4.components.ravel():
        if killing in c.free_symbols:
            raise NotAxisymmetricError(f"metric depends on {killing!r}; d_{killing} is not Killing")
    gpp = m4.components[k, k]
    if gpp is S.ZERO:
        raise DegenerateKillingError("g_phiphi vanishes identically")
    pts = m4.chart.sample(20, 42)
    prog = S.Program([gpp])
    vals = prog({v: pts[v] for v in prog.variables})[0]
    if not np.all(vals > 0):
        raise DegenerateKillingError("Killing norm is not positive on the sampling box (axis or sign)")
    rest = [i for i in range(4) if i != k]
    inv_gpp = S.pow_(gpp, -1)
    A = tuple(S.mul(m4.components[i, k], inv_gpp) for i in rest)
    g3 = expr_array((3, 3))
    for a, i in enumerate(rest):
        for b in range(a, 3):
            j = rest[b]
            corr = S.mul(m4.components[i, k], m4.components[j, k], inv_gpp)
            g3[a, b] = g3[b, a] = S.sub(m4.components[i, j], corr)
    chart3 = m4.chart.restrict([m4.coords[i] for i in rest])
    time = None
    if m4.time_index is not None and m4.time_index != k:
        time = rest.index(m4.time_index)
    metric = MetricSpec(g3, chart3, m4.signature, time)
    return ReducedData(metric, metric, half_log(gpp), gpp, A, False, m4.chart, k)


def reconstruct(rd: ReducedData) -> MetricSpec:
    """gbar = g + e^{2u} (dphi + A)^2 in the parent chart."""
    g = rd.base.components
    k = rd.killing_index
    rest = [i for i in range(4) if i != k]
    out = expr_array((4, 4))
    for a, i in enumerate(rest):
        for b in range(a, 3):
            j = rest[b]
            out[i, j] = out[j, i] = S.add(g[a, b], S.mul(rd.norm, rd.A[a], rd.A[b]))
        out[i, k] = out[k, i] = S.mul(rd.norm, rd.A[a])
    out[k, k] = rd.norm
    return MetricSpec(out, rd.parent_chart, rd.base.signature,
                      None if rd.base.time_index is None else rest[rd.base.time_index])


def reconstruction_residual(rd: ReducedData, m4: MetricSpec, n: int = 20, seed: int = 42) -> float:
    """max |gbar_rebuilt - gbar| over sample points."""
    rebuilt = reconstruct(rd)
    diff = [S.sub(rebuilt.components[i, j], m4.components[i, j])
            for i in range(4) for j in range(i, 4)]
    pts = m4.chart.sample(n, seed)
    prog = S.Program(diff)
    return float(np.max(np.abs(prog({v: pts[v] for v in prog.variables}))))


def conformal_reduce(rd: ReducedData) -> ReducedData:
    """Replace g by g~ = e^{2u} g."""
    if rd.conformal:
        raise ConformalStateError("reduced data is already conformally rescaled")
    return replace(rd, metric=rd.base.scaled(rd.norm), conformal=True)


# -- forms -----------------------------------------------------------------------

def faraday(rd: ReducedData) -> TensorField:
    """F_{mn} = d_m A_n - d_n A_m (antisymmetric by construction)."""
    coords = rd.chart.coords
    n = len(coords)
    F = expr_array((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            v = S.sub(S.differentiate(rd.A[b], coords[a]), S.differentiate(rd.A[a], coords[b]))
            F[a, b] = v
            F[b, a] = S.neg(v)
    return TensorField("dd", F, rd.chart, symmetry="anti")


def _perm_sign(p) -> int:
    p = list(p)
    sign = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def exterior_derivative(form: TensorField) -> TensorField:
    """d of a totally antisymmetric covariant tensor (p-form)."""
    if set(form.valence) - {"d"}:
        raise ValueError("exterior derivative needs a covariant form")
    coords = form.chart.coords
    n = len(coords)
    p = form.rank
    out = expr_array((n,) * (p + 1))
    for idx in itertools.combinations(range(n), p + 1):
        terms = []
        for i, a in enumerate(idx):
            sub = idx[:i] + idx[i + 1:]
            d = S.differentiate(form.components[sub] if p else form.components[()], coords[a])
            terms.append(d if i % 2 == 0 else S.neg(d))
        v = S.add(*terms)
        for perm in itertools.permutations(range(p + 1)):
            out[tuple(idx[q] for q in perm)] = v if _perm_sign(perm) > 0 else S.neg(v)
    return TensorField("d" * (p + 1), out, form.chart, symmetry="anti")


def twist_one_form(rd: ReducedData, F: TensorField | None = None, weight_power: int | None = 3,
                   star_metric: str = "base") -> TensorField:
    """G_m = 1/2 e^{k u} eps_{m n s} F^{n s}.

    ``weight_power`` is k (3 gives the closed twist form; ``None`` drops the
    weight, a negative control).  ``star_metric`` chooses the metric for the
    Levi-Civita tensor and index raising: ``"base"`` (unrescaled g) or
    ``"current"`` (the metric held by ``rd``).
    """
    if F is None:
        F = faraday(rd)
    m = rd.base if star_metric == "base" else rd.metric
    ginv = C.inverse_metric(m).components
    n = 3
    Fup = expr_array((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            v = S.add(*(S.mul(ginv[a, c], ginv[b, d], F.components[c, d])
                        for c in range(n) for d in range(n)
                        if ginv[a, c] is not S.ZERO and ginv[b, d] is not S.ZERO
                        and F.components[c, d] is not S.ZERO))
            Fup[a, b] = v
            Fup[b, a] = S.neg(v)
    vol = S.mul(rd.chart.orientation, m.volume_element())
    weight = S.ONE if weight_power is None else rd.exp_u(weight_power)
    G = expr_array((n,))
    for a in range(n):
        b, c = [i for i in range(n) if i != a]
        # eps_{a b c} F^{b c} + eps_{a c b} F^{c b} = 2 eps_{a b c} F^{b c}
        G[a] = S.mul(weight, vol, _perm_sign((a, b, c)), Fup[b, c])
    return TensorField("d", G, rd.chart)


def twist(rd: ReducedData) -> TwistData:
    F = faraday(rd)
    return TwistData(F, twist_one_form(rd, F))


def closure_residual(G: TensorField, n: int = 20, seed: int = 42) -> float:
    """max |dG| over sample points of the chart."""
    dG = exterior_derivative(G)
    pts = G.chart.sample(n, seed)
    vals = dG.evaluate(pts)
    return float(np.max(np.abs(vals))) if vals.size else 0.0


def twist_potential(G: TensorField, base, target, path=None, rtol: float = 1e-12) -> float:
    """Line integral of G along a polyline from ``base`` to ``target``.

    ``base`` and ``target`` are coordinate tuples; ``path`` optionally lists
    intermediate vertices.  v(base) = 0 by convention.
    """
    chart = G.chart
    verts = [tuple(map(float, base))] + [tuple(map(float, p)) for p in (path or [])] + \
        [tuple(map(float, target))]
    for v in verts:
        if len(v) != chart.dim:
            raise ValueError(f"point {v} does not have {chart.dim} coordinates")
        if not chart.contains(v):
            raise PathDomainError(f"path vertex {v} leaves the chart box")
    prog = S.Program(list(G.components), list(chart.coords) + sorted(chart.params))
    params = [chart.params[k] for k in sorted(chart.params)]
    total = 0.0
    for p0, p1 in zip(verts[:-1], verts[1:]):
        p0a, p1a = np.array(p0), np.array(p1)
        step = p1a - p0a
        if not np.any(step):
            continue

        def integrand(s, p0a=p0a, step=step):
            xs = p0a[:, None] + step[:, None] * s[None, :]
            inputs = np.vstack([xs] + [np.full(s.size, q) for q in params])
            vals = prog(inputs)
            return np.einsum("i,i...->...", step, vals)

        total += adaptive_simpson(integrand, 0.0, 1.0, rtol=rtol, atol=1e-14).value
    return total


# -- residuals ---------------------------------------------------------------------

def _raise_first(m: MetricSpec, T: TensorField) -> np.ndarray:
    """W^s_m = g^{s a} T_{a m}."""
    ginv = C.inverse_metric(m).components
    n = m.dim
    out = expr_array((n, n))
    for s in range(n):
        for b in range(n):
            out[s, b] = S.add(*(S.mul(ginv[s, a], T.components[a, b]) for a in range(n)
                                if ginv[s, a] is not S.ZERO and T.components[a, b] is not S.ZERO))
    return out


@dataclass
class VacuumResiduals:
    """The three blocks of the reduced vacuum equations."""

    ricci_block: TensorField
    mixed_block: TensorField
    killing_block: Expr
    form: str

    def max_abs(self, n: int = 20, seed: int = 42) -> dict:
        chart = self.ricci_block.chart
        pts = chart.sample(n, seed)
        out = {}
        for name, exprs in (("ricci", list(self.ricci_block.components.ravel())),
                            ("mixed", list(self.mixed_block.components.ravel())),
                            ("killing", [self.killing_block])):
            prog = S.Program(exprs)
            vals = prog({v: pts[v] for v in prog.variables})
            out[name] = float(np.max(np.abs(vals)))
        return out


def reduced_vacuum_residuals(m4: MetricSpec, form: str = "standard") -> VacuumResiduals:
    """Right-hand sides of the reduced vacuum equations for (g, u, A).

    ``form="flipped"`` uses ``- 1/2 e^{2u} F_{m s} F^s_n`` in the Ricci
    block; ``"standard"`` uses ``- 1/2 e^{2u} F_{m s} F_n^s``, the sign that
    makes Kerr satisfy the equations.  The two differ only when F != 0.
    """
    if form not in ("standard", "flipped"):
        raise ValueError("form must be 'standard' or 'flipped'")
    rd = split_killing(m4)
    g = rd.base
    n = 3
    u = rd.u
    du = C.gradient(g, u)
    hess = C.hessian(g, u).components
    ric = C.ricci(g).components
    F = faraday(rd)
    Fmix = _raise_first(g, F)  # F^s_n
    e2u = rd.exp_u(2)
    sign = 1 if form == "standard" else -1
    ricci_block = expr_array((n, n))
    for a in range(n):
        for b in range(a, n):
            ff = S.add(*(S.mul(F.components[a, s], Fmix[s, b]) for s in range(n)
                         if F.components[a, s] is not S.ZERO and Fmix[s, b] is not S.ZERO))
            v = S.add(ric[a, b], S.neg(S.mul(du[a], du[b])), S.neg(hess[a, b]),
                      S.mul(S.const(Fraction(sign, 2)), e2u, ff))
            ricci_block[a, b] = ricci_block[b, a] = v
    # mixed: -1/2 e^{-u} nabla_s (e^{3u} F^s_m)
    gam = C.christoffel(g).components
    W = expr_array((n, n))
    e3u = rd.exp_u(3)
    for s in range(n):
        for b in range(n):
            W[s, b] = S.mul(e3u, Fmix[s, b])
    mixed = expr_array((n,))
    for mu in range(n):
        terms = [S.differentiate(W[s, mu], g.coords[s]) for s in range(n)]
        for s in range(n):
            for lam in range(n):
                terms.append(S.mul(gam[s, s, lam], W[lam, mu]))
                terms.append(S.neg(S.mul(gam[lam, s, mu], W[s, lam])))
        mixed[mu] = S.mul(S.const(Fraction(-1, 2)), rd.exp_u(-1), S.add(*terms))
    # killing: -e^{2u} (box u + |du|^2 - 1/4 e^{2u} F_{mn} F^{mn})
    ginv = C.inverse_metric(g).components
    f2 = S.add(*(S.mul(F.components[a, b], ginv[b, c], Fmix[a, c]) for a in range(n)
                 for b in range(n) for c in range(n)
                 if F.components[a, b] is not S.ZERO and ginv[b, c] is not S.ZERO))
    # F_{ab} F^{ab} = F_{ab} g^{bc} F^a_c
    killing = S.mul(S.neg(e2u), S.add(C.box_scalar(g, u), C.grad_sq(g, u),
                                      S.mul(S.const(Fraction(-1, 4)), e2u, f2)))
    return VacuumResiduals(TensorField("dd", ricci_block, g.chart, symmetry="sym"),
                           TensorField("d", mixed, g.chart), killing, form)


@dataclass
class WaveMapResiduals:
    u_equation: Expr
    v_equation: Expr
    twist_weight3: Expr
    twist_weight4: Expr

    def max_abs(self, chart: Chart, n: int = 20, seed: int = 42) -> dict:
        pts = chart.sample(n, seed)
        out = {}
        for name, e in (("u", self.u_equation), ("v", self.v_equation),
                        ("twist_weight3", self.twist_weight3),
                        ("twist_weight4", self.twist_weight4)):
            prog = S.Program([e])
            out[name] = float(np.max(np.abs(prog({v: pts[v] for v in prog.variables}))))
        return out


def ewm_residuals(rd: ReducedData, twist_data: TwistData | None = None) -> WaveMapResiduals:
    """Residuals of the wave-map pair on (M~, g~), with dv taken to be G.

        box~ u + 1/2 e^{-4u} g~(dv, dv) = 0
        box~ v - 4 g~(du, dv) = 0

    ``twist_weight3`` is nabla~_m (e^{-3u} g~^{mn} d_n v) and
    ``twist_weight4`` the same with e^{-4u}; only the latter follows from
    dF = 0 once G = e^{4u} *~F.  Both are diagnostics.
    """
    if not rd.conformal:
        raise ConformalStateError("ewm_residuals needs conformally rescaled data")
    g = rd.metric
    n = 3
    u = rd.u
    if twist_data is None:
        G = [S.ZERO] * n
    else:
        G = list(twist_data.G.components)
    du = C.gradient(g, u)
    gam = C.christoffel(g).components
    ginv = C.inverse_metric(g).components
    wave_u = S.add(C.box_scalar(g, u), S.mul(S.const(Fraction(1, 2)), rd.exp_u(-4), C.inner(g, G, G)))
    box_v_terms = []
    for a in range(n):
        for b in range(n):
            if ginv[a, b] is S.ZERO:
                continue
            inner = [S.differentiate(G[b], g.coords[a])]
            inner += [S.neg(S.mul(gam[l, a, b], G[l])) for l in range(n) if G[l] is not S.ZERO]
            box_v_terms.append(S.mul(ginv[a, b], S.add(*inner)))
    box_v = S.add(*box_v_terms)
    wave_v = S.sub(box_v, S.mul(4, C.inner(g, du, G)))
    vol = g.volume_element()

    def weighted_divergence(k):
        # (1/sqrt g~) d_m (sqrt g~ e^{k u} g~^{mn} G_n)
        flux = [S.mul(vol, rd.exp_u(k), S.add(*(S.mul(ginv[m, j], G[j]) for j in range(n))))
                for m in range(n)]
        return S.mul(S.pow_(vol, -1), S.add(*(S.differentiate(flux[m], g.coords[m])
                                              for m in range(n))))

    return WaveMapResiduals(wave_u, wave_v, weighted_divergence(-3), weighted_divergence(-4))
