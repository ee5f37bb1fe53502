"""Levi-Civita connection, curvature and wave operators of a MetricSpec.

Conventions: signature (-,+,+,+); ``R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb}
+ G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb}``; ``R_{bd} = R^a_{bad}``.
"""
from __future__ import annotations

import itertools

import numpy as np

from .. import symexpr as S
from ..symexpr import Expr
from .tensor import MetricSpec, SingularMetricError, TensorField, blocks, determinant, expr_array


def _cached(m: MetricSpec, key, build):
    if key not in m._cache:
        m._cache[key] = build()
    return m._cache[key]


def inverse_metric(m: MetricSpec) -> TensorField:
    """g^{ab}, inverted block by block (adjugate over determinant)."""
    def build():
        g = m.components
        n = m.dim
        inv = expr_array((n, n))
        for idx in blocks(g):
            sub = g[np.ix_(idx, idx)]
            det = determinant(sub)
            if det is S.ZERO or (det.kind == S.expr.CONST and det.value == 0):
                raise SingularMetricError(f"metric block {idx} has a vanishing determinant")
            k = len(idx)
            if k == 1:
                inv[idx[0], idx[0]] = S.pow_(sub[0, 0], -1)
                continue
            rdet = S.pow_(det, -1)
            for a in range(k):
                for b in range(a, k):
                    minor = np.delete(np.delete(sub, b, axis=0), a, axis=1)
                    cof = determinant(minor)
                    if (a + b) % 2:
                        cof = S.neg(cof)
                    val = S.mul(cof, rdet)
                    inv[idx[a], idx[b]] = inv[idx[b], idx[a]] = val
        return TensorField("uu", inv, m.chart, symmetry="sym")
    return _cached(m, "inverse", build)


def metric_derivatives(m: MetricSpec) -> np.ndarray:
    """dg[c, a, b] = d_c g_ab."""
    def build():
        n = m.dim
        dg = expr_array((n, n, n))
        for c, x in enumerate(m.coords):
            for a in range(n):
                for b in range(a, n):
                    dg[c, a, b] = dg[c, b, a] = S.differentiate(m.components[a, b], x)
        return dg
    return _cached(m, "dg", build)


def christoffel(m: MetricSpec) -> TensorField:
    """Gamma^a_{bc} = 1/2 g^{ad} (d_b g_dc + d_c g_db - d_d g_bc)."""
    def build():
        n = m.dim
        ginv = inverse_metric(m).components
        dg = metric_derivatives(m)
        lower = expr_array((n, n, n))
        for d in range(n):
            for b in range(n):
                for c in range(b, n):
                    v = S.mul(S.const("1/2"), S.add(dg[b, d, c], dg[c, d, b], S.neg(dg[d, b, c])))
                    lower[d, b, c] = lower[d, c, b] = v
        gam = expr_array((n, n, n))
        for a in range(n):
            for b in range(n):
                for c in range(b, n):
                    terms = [S.mul(ginv[a, d], lower[d, b, c]) for d in range(n)
                             if ginv[a, d] is not S.ZERO and lower[d, b, c] is not S.ZERO]
                    gam[a, b, c] = gam[a, c, b] = S.add(*terms)
        return TensorField("udd", gam, m.chart, symmetry="sym23")
    return _cached(m, "christoffel", build)


def _dgamma(m: MetricSpec) -> np.ndarray:
    """dG[e, a, b, c] = d_e Gamma^a_{bc}."""
    def build():
        n = m.dim
        gam = christoffel(m).components
        out = expr_array((n, n, n, n))
        for e, x in enumerate(m.coords):
            for a in range(n):
                for b in range(n):
                    for c in range(b, n):
                        out[e, a, b, c] = out[e, a, c, b] = S.differentiate(gam[a, b, c], x)
        return out
    return _cached(m, "dgamma", build)


def riemann(m: MetricSpec) -> TensorField:
    """R^a_{bcd}, antisymmetric in (c, d) by construction."""
    def build():
        n = m.dim
        gam = christoffel(m).components
        dgam = _dgamma(m)
        out = expr_array((n, n, n, n))
        for a, b in itertools.product(range(n), repeat=2):
            for c in range(n):
                for d in range(c + 1, n):
                    terms = [dgam[c, a, d, b], S.neg(dgam[d, a, c, b])]
                    for e in range(n):
                        terms.append(S.mul(gam[a, c, e], gam[e, d, b]))
                        terms.append(S.neg(S.mul(gam[a, d, e], gam[e, c, b])))
                    v = S.add(*terms)
                    out[a, b, c, d] = v
                    out[a, b, d, c] = S.neg(v)
        return TensorField("uddd", out, m.chart, symmetry="anti34")
    return _cached(m, "riemann", build)


def ricci(m: MetricSpec) -> TensorField:
    """R_{bd} = R^a_{bad}, built from the contracted formula directly."""
    def build():
        n = m.dim
        gam = christoffel(m).components
        dgam = _dgamma(m)
        out = expr_array((n, n))
        for b in range(n):
            for d in range(b, n):
                terms = []
                for a in range(n):
                    terms.append(dgam[a, a, d, b])
                    terms.append(S.neg(dgam[d, a, a, b]))
                    for e in range(n):
                        terms.append(S.mul(gam[a, a, e], gam[e, d, b]))
                        terms.append(S.neg(S.mul(gam[a, d, e], gam[e, a, b])))
                out[b, d] = out[d, b] = S.add(*terms)
        return TensorField("dd", out, m.chart, symmetry="sym")
    return _cached(m, "ricci", build)


def ricci_scalar(m: MetricSpec) -> Expr:
    def build():
        ginv = inverse_metric(m).components
        ric = ricci(m).components
        n = m.dim
        return S.add(*(S.mul(ginv[a, b], ric[a, b]) for a in range(n) for b in range(n)
                       if ginv[a, b] is not S.ZERO))
    return _cached(m, "scalar", build)


def einstein_tensor(m: MetricSpec) -> TensorField:
    """E_{ab} = R_{ab} - 1/2 R g_{ab}."""
    def build():
        n = m.dim
        ric = ricci(m).components
        half_r = S.mul(S.const("1/2"), ricci_scalar(m))
        out = expr_array((n, n))
        for a in range(n):
            for b in range(a, n):
                out[a, b] = out[b, a] = S.sub(ric[a, b], S.mul(half_r, m.components[a, b]))
        return TensorField("dd", out, m.chart, symmetry="sym")
    return _cached(m, "einstein", build)


# -- scalar operators ---------------------------------------------------------

def gradient(m: MetricSpec, s) -> list[Expr]:
    s = S.as_expr(s)
    return [S.differentiate(s, x) for x in m.coords]


def inner(m: MetricSpec, a, b) -> Expr:
    """g^{mu nu} a_mu b_nu for covectors given as component lists."""
    ginv = inverse_metric(m).components
    n = m.dim
    return S.add(*(S.mul(ginv[i, j], a[i], b[j]) for i in range(n) for j in range(n)
                   if ginv[i, j] is not S.ZERO and a[i] is not S.ZERO and b[j] is not S.ZERO))


def grad_sq(m: MetricSpec, s) -> Expr:
    g = gradient(m, s)
    return inner(m, g, g)


def hessian(m: MetricSpec, s) -> TensorField:
    """nabla_mu nabla_nu s = d_mu d_nu s - Gamma^l_{mu nu} d_l s."""
    s = S.as_expr(s)
    n = m.dim
    gam = christoffel(m).components
    ds = gradient(m, s)
    out = expr_array((n, n))
    for a in range(n):
        for b in range(a, n):
            terms = [S.differentiate(ds[a], m.coords[b])]
            terms += [S.neg(S.mul(gam[l, a, b], ds[l])) for l in range(n) if ds[l] is not S.ZERO]
            out[a, b] = out[b, a] = S.add(*terms)
    return TensorField("dd", out, m.chart, symmetry="sym")


def box_scalar(m: MetricSpec, s) -> Expr:
    """Covariant wave operator g^{mu nu} nabla_mu nabla_nu s.

    Equal to (1/sqrt|g|) d_nu (sqrt|g| g^{mu nu} d_mu s) through the
    contracted Christoffel identity, without differentiating a square root.
    """
    s = S.as_expr(s)
    if not s.free_symbols & set(m.coords):
        return S.ZERO
    ginv = inverse_metric(m).components
    hess = hessian(m, s).components
    n = m.dim
    return S.add(*(S.mul(ginv[a, b], hess[a, b]) for a in range(n) for b in range(n)
                   if ginv[a, b] is not S.ZERO))


def box_scalar_divergence_form(m: MetricSpec, s) -> Expr:
    """(1/sqrt|g|) d_nu (sqrt|g| g^{mu nu} d_mu s), built literally."""
    s = S.as_expr(s)
    ginv = inverse_metric(m).components
    vol = m.volume_element()
    ds = gradient(m, s)
    n = m.dim
    terms = []
    for nu in range(n):
        flux = S.mul(vol, S.add(*(S.mul(ginv[mu, nu], ds[mu]) for mu in range(n))))
        terms.append(S.differentiate(flux, m.coords[nu]))
    return S.mul(S.pow_(vol, -1), S.add(*terms))


def first_bianchi(m: MetricSpec) -> TensorField:
    """R^a_{bcd} + R^a_{cdb} + R^a_{dbc}."""
    n = m.dim
    R = riemann(m).components
    out = expr_array((n, n, n, n))
    for a, b, c, d in itertools.product(range(n), repeat=4):
        out[a, b, c, d] = S.add(R[a, b, c, d], R[a, c, d, b], R[a, d, b, c])
    return TensorField("uddd", out, m.chart)


def einstein_divergence_fd(m: MetricSpec, points: dict, h: float = 1e-3) -> np.ndarray:
    """nabla^mu E_{mu nu} at sample points, partial derivatives of E taken by
    fourth-order central differences.  Returns shape (n, npts)."""
    n = m.dim
    E = einstein_tensor(m)
    gam = christoffel(m)
    ginv = inverse_metric(m)
    e_prog = S.Program(list(E.components.ravel()))
    names = e_prog.variables

    def ev(prog, pts):
        return prog({v: pts[v] for v in prog.variables})

    Ev = ev(e_prog, points).reshape(n, n, -1)
    Gv = gam.evaluate(points)
    Gi = ginv.evaluate(points)
    dE = np.zeros((n, n, n, Ev.shape[-1]))
    for c, x in enumerate(m.coords):
        if x not in names:
            continue
        acc = 0.0
        for k, w in ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)):
            shifted = dict(points)
            shifted[x] = points[x] + k * h
            acc = acc + w * ev(e_prog, shifted).reshape(n, n, -1)
        dE[c] = acc / (12.0 * h)
    # nabla_a E_{mu nu} = d_a E_{mu nu} - G^l_{a mu} E_{l nu} - G^l_{a nu} E_{mu l}
    cov = dE - np.einsum("lam...,lv...->amv...", Gv, Ev) - np.einsum("lav...,ml...->amv...", Gv, Ev)
    return np.einsum("am...,amv...->v...", Gi, cov)
