"""Command-line front end.

Exit codes: 0 all checks pass, 2 a check failed, 3 bad input, 4 a numerical
method did not converge.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import catalog as K
from . import energetics as EN
from . import reduction as RD
from . import suite
from . import symexpr as S
from .geometry import curvature as C
from .geometry.conformal import conformal_box, conformal_ricci
from .numerics import QuadratureError, StepUnderflow
from .report import Report, write_csv

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3, 4

DEFAULT_TOL = {"reduce": 1e-9, "vacuum": 1e-7, "reduced": 1e-7, "ewm": 1e-6, "conformal": 1e-8,
               "constraint": 1e-6, "adm": 1e-3}


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code, not argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# -- shared helpers ------------------------------------------------------------------

def _add_metric_args(p):
    g = p.add_argument_group("metric")
    g.add_argument("--metric", default=None, help="catalog metric: minkowski, schwarzschild, kerr")
    g.add_argument("--metric-file", default=None, help="metric in the text format")
    g.add_argument("--m", type=float, default=1.0, help="Schwarzschild mass")
    g.add_argument("--M", type=float, default=1.0, help="Kerr mass")
    g.add_argument("--a", type=float, default=0.5, help="Kerr spin")


def _add_common(p):
    p.add_argument("--tol", type=float, default=None, help="override the check tolerance")
    p.add_argument("--seed", type=int, default=42, help="seed for sample points")
    p.add_argument("--out", default=None, help="write the JSON report here")


def _load_metric(args):
    if args.metric_file:
        try:
            m = K.load(args.metric_file)
        except OSError as exc:
            raise InputError(f"cannot read {args.metric_file}: {exc}") from exc
        return "file:" + args.metric_file, m, dict(m.chart.params)
    name = args.metric or "minkowski"
    params = {"minkowski": {}, "schwarzschild": {"m": args.m},
              "kerr": {"M": args.M, "a": args.a}}
    if name not in params:
        raise InputError(f"unknown metric {name!r}")
    e = K.get(name, **params[name])
    return name, e.metric, params[name]


def _inputs(args, **extra):
    d = {k: v for k, v in vars(args).items() if k not in ("func", "command") and v is not None}
    d.update(extra)
    return d


def _tol(args, key):
    return args.tol if args.tol is not None else DEFAULT_TOL[key]


def _max_abs(exprs, chart, seed):
    exprs = [e for e in exprs if e is not S.ZERO]
    if not exprs:
        return 0.0
    pts = chart.sample(20, seed)
    prog = S.Program(exprs)
    return float(np.max(np.abs(prog({v: pts[v] for v in prog.variables}))))


# -- commands ----------------------------------------------------------------------------

def cmd_reduce(args) -> Report:
    name, m, params = _load_metric(args)
    rep = Report("reduce", _inputs(args, metric=name, params=params))
    rd = RD.split_killing(m)
    rep.add("u", S.to_string(rd.u))
    rep.add("A", [S.to_string(a) for a in rd.A])
    if args.conformal:
        rd = RD.conformal_reduce(rd)
    rep.add("conformal", rd.conformal)
    g = rd.metric
    rep.table("g3", ["i", "j", "component"],
              [[i, j, S.to_string(g.components[i, j])] for i in range(3) for j in range(i, 3)
               if g.components[i, j] is not S.ZERO])
    rep.check("reconstruction residual", RD.reconstruction_residual(rd, m, seed=args.seed),
              _tol(args, "reduce"))
    return rep


def cmd_verify(args) -> Report:
    name, m, params = _load_metric(args)
    tol = _tol(args, args.check)
    rep = Report("verify", _inputs(args, metric=name, params=params))
    if args.check == "vacuum":
        rep.check("max|Ric|", _max_abs(C.ricci(m).components.ravel(), m.chart, args.seed), tol)
    elif args.check == "reduced":
        vr = RD.reduced_vacuum_residuals(m, form="standard").max_abs(20, args.seed)
        for block, v in vr.items():
            rep.check(f"{block} residual", v, tol)
        flipped = RD.reduced_vacuum_residuals(m, form="flipped").max_abs(20, args.seed)
        rep.add("ricci residual with the flipped F-term sign", flipped["ricci"])
    elif args.check == "ewm":
        rd = RD.conformal_reduce(RD.split_killing(m))
        tw = RD.twist(rd)
        vals = RD.ewm_residuals(rd, tw).max_abs(rd.chart, 20, args.seed)
        rep.check("u-equation residual", vals["u"], tol)
        rep.check("v-equation residual", vals["v"], tol)
        rep.check("twist closure max|dG|", RD.closure_residual(tw.G, 20, args.seed), tol)
        rep.add("weighted twist divergence, e^{-3u}", vals["twist_weight3"])
        rep.add("weighted twist divergence, e^{-4u}", vals["twist_weight4"])
    elif args.check == "conformal":
        rd = RD.split_killing(m)
        g, psi = rd.base, rd.u
        direct = g.scaled(rd.norm)
        diff = [S.sub(a, b) for a, b in zip(conformal_ricci(g, psi).components.ravel(),
                                            C.ricci(direct).components.ravel())]
        rep.check("Ricci formula vs direct", _max_abs(diff, g.chart, args.seed), tol)
        s = rd.u
        rep.check("box formula vs direct",
                  _max_abs([S.sub(conformal_box(g, psi, s), C.box_scalar(direct, s))], g.chart,
                           args.seed), tol)
    return rep


def _parse_list(text):
    try:
        vals = [float(x) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise InputError(f"bad number list {text!r}") from exc
    if not vals:
        raise InputError("empty radius list")
    return vals


def cmd_energy(args) -> Report:
    name, m, params = _load_metric(args)
    eps = args.eps
    if eps is None:
        eps = math.pi / 4
    if args.rmax_list:
        radii = _parse_list(args.rmax_list)
    else:
        radii = list(suite.MINKOWSKI_RADII if name == "minkowski" else suite.FAR_RADII)
    r0 = args.r0 if args.r0 is not None else (1.0 if name == "minkowski" else 3.0 * max(params.values(), default=1.0))
    rep = Report("energy", _inputs(args, metric=name, params=params, eps=eps, r0=r0))
    if args.field == "wave-map":
        g, dens = EN.reduced_energy_density(m)
    else:
        # smooth, rapidly decaying test field on the reduced slice
        rd = RD.conformal_reduce(RD.split_killing(m))
        g = rd.metric
        phi = S.exp(S.neg(S.pow_(S.sym("r"), 2)))
        T = EN.stress_energy(g, [(phi, S.ONE)])
        dens = S.mul(EN.t_nn(g, T), EN.sqrt_q(g))
    cutoff = EN.CutoffEnergy(g, dens)
    used = sorted(radii)
    if len(used) < 5:
        per_gap = -(-(5 - len(used)) // max(len(used) - 1, 1))
        used = EN.densify(used, per_gap)
        rep.add("densified radii", True, note="geometric midpoints inserted to reach 5 samples")
    curve = EN.energy_curve(cutoff, r0, used, eps)
    fit = EN.divergence_fit(curve, eps, fit_tol=args.fit_tol, cauchy_tol=args.cauchy_tol)
    rep.add("verdict", fit.verdict, passed=fit.verdict != EN.INCONCLUSIVE)
    rep.add("slope c1", fit.c1)
    rep.add("intercept c0", fit.c0)
    rep.check("relative fit residual", fit.residual, args.fit_tol,
              ok=True if fit.verdict != EN.LOG_DIVERGENT else None)
    if args.expect:
        rep.add("expected verdict", args.expect, passed=fit.verdict == args.expect)
    if name == "minkowski" and args.field == "wave-map":
        rep.check("|slope - cot(eps)|", abs(fit.c1 - 1.0 / math.tan(eps)), args.slope_tol)
    rep.table("energy", ["R", "E"], [list(p) for p in curve])
    if args.csv:
        write_csv(args.csv, ["R", "E"], curve)
    return rep


def cmd_constraint(args) -> Report:
    data = K.equivariant_profile(args.profile, args.amp, args.width, args.target)
    rep = Report("constraint", _inputs(args))
    sol = EN.solve_constraint(data)
    rep.add("status", sol.status)
    tol = _tol(args, "constraint")
    if sol.status == EN.SUBCRITICAL:
        mi = EN.mass_identities(sol)
        rep.add("chi_inf", sol.chi_inf)
        rep.add("gamma_inf", sol.gamma_inf)
        rep.check("m_AV", mi.m_av, 2.0, ok=mi.m_av_in_range, note="0 <= m_AV < 2")
        rep.add("angle deficit", mi.angle_deficit)
        rep.add("energy (integrated constraint)", mi.energy_identity)
        rep.add("energy (quadrature)", mi.energy_quadrature)
        rep.check("|deficit - pi m_AV|", mi.deficit_vs_mass, 4 * np.finfo(float).eps * max(1.0, mi.angle_deficit))
        rep.check("|deficit - E_quad| / E", mi.deficit_vs_energy, tol)
        dg = np.diff(sol.gamma)
        rep.check("min gamma increment", float(dg.min()) if dg.size else 0.0, 0.0,
                  ok=bool(np.all(dg >= 0)), note="gamma non-decreasing")
    else:
        rep.add("r_star", sol.r_star)
    rows = list(sol.rows()) if sol.energy_density is not None else []
    rep.table("profile", ["r", "chi", "gamma", "energy_density"], rows)
    if args.csv:
        write_csv(args.csv, ["r", "chi", "gamma", "energy_density"], rows)
    return rep


def cmd_adm(args) -> Report:
    if args.metric == "flat":
        q, m = K.schwarzschild_spatial_cartesian(0.0), 0.0
    elif args.metric == "schwarzschild-spatial":
        if not args.m > 0:
            raise InputError("--m must be positive")
        q, m = K.schwarzschild_spatial_cartesian(args.m), args.m
    else:
        raise InputError(f"unknown metric {args.metric!r} for adm")
    radii = _parse_list(args.radii) if args.radii else EN.adm.DEFAULT_RADII
    rep = Report("adm", _inputs(args))
    res = EN.adm_mass(q, radii)
    rep.add("surface values", list(res.surface_values))
    tol = _tol(args, "adm")
    err = abs(res.mass - m) / m if m > 0 else abs(res.mass)
    rep.add("m_ADM", res.mass)
    rep.check("|m_ADM - m| / m" if m > 0 else "|m_ADM|", err, tol)
    return rep


def cmd_paper_suite(args) -> Report:
    rep = Report("paper-suite", _inputs(args))
    selected = {int(x) for x in args.only.split(",")} if args.only else None
    for res in suite.run_all(selected):
        print(res.line())
        for name, value, tol, ok in res.checks:
            num = isinstance(value, (int, float)) and not isinstance(value, bool)
            if num and tol is None:
                rep.add(f"{res.number}. {name}", value, None, None)
                rep.add(f"{res.number}. {name} (check)", ok, None, ok)
            else:
                rep.add(f"{res.number}. {name}", value, tol, ok)
    return rep


# -- entry point -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="axired", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("reduce", help="Killing split of a 4-metric")
    _add_metric_args(r)
    _add_common(r)
    r.add_argument("--conformal", action="store_true", help="rescale g by e^{2u}")
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("verify", help="residual checks")
    _add_metric_args(v)
    _add_common(v)
    v.add_argument("--check", choices=["vacuum", "reduced", "ewm", "conformal"], default="vacuum")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("energy", help="cutoff energies and divergence verdict")
    _add_metric_args(e)
    _add_common(e)
    e.add_argument("--r0", type=float, default=None)
    e.add_argument("--rmax-list", default=None, help="comma separated cutoff radii")
    e.add_argument("--eps", type=float, default=None, help="angular cutoff (default pi/4)")
    e.add_argument("--field", choices=["wave-map", "gaussian"], default="wave-map")
    e.add_argument("--fit-tol", type=float, default=1e-3)
    e.add_argument("--cauchy-tol", type=float, default=1e-6)
    e.add_argument("--slope-tol", type=float, default=1e-3)
    e.add_argument("--expect", choices=[EN.CONVERGENT, EN.LOG_DIVERGENT, EN.POWER_DIVERGENT],
                   default=None)
    e.add_argument("--csv", default=None, help="write R,E samples here")
    e.set_defaults(func=cmd_energy)

    c = sub.add_parser("constraint", help="equivariant Hamiltonian constraint")
    _add_common(c)
    c.add_argument("--profile", choices=["gaussian_bump", "compact_bump"], default="gaussian_bump")
    c.add_argument("--amp", type=float, default=0.1)
    c.add_argument("--width", type=float, default=1.0)
    c.add_argument("--target", choices=sorted(K.TARGETS), default="sphere")
    c.add_argument("--csv", default=None, help="write r,chi,gamma,energy_density here")
    c.set_defaults(func=cmd_constraint)

    a = sub.add_parser("adm", help="ADM mass of an asymptotically flat slice")
    _add_common(a)
    a.add_argument("--metric", default="schwarzschild-spatial",
                   choices=["schwarzschild-spatial", "flat"])
    a.add_argument("--m", type=float, default=1.0)
    a.add_argument("--radii", default=None)
    a.set_defaults(func=cmd_adm)

    s = sub.add_parser("paper-suite", help="run every acceptance criterion")
    _add_common(s)
    s.add_argument("--only", default=None, help="comma separated criterion numbers")
    s.set_defaults(func=cmd_paper_suite)
    return p


INPUT_ERRORS = (InputError, K.ParameterRangeError, K.MetricFileError, S.ParseError,
                S.UnknownFunctionError, RD.ReductionError, EN.InsufficientSamplesError,
                EN.AxisDensityError, KeyError)
NUMERIC_ERRORS = (QuadratureError, StepUnderflow, EN.NonConvergenceError, EN.NonDecayingMetricError)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rep = args.func(args)
    except INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NUMERIC_ERRORS as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, S.DomainError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for line in rep.summary_lines():
        print(line)
    if args.out:
        rep.write(args.out)
    status = "PASS" if rep.passed else "FAIL"
    print(f"{status} {rep.command}")
    return EXIT_OK if rep.passed else EXIT_CHECK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
