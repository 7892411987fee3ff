"""Command-line front end: ``rankone <noun> <verb> [options]``.

One JSON document (or a CSV table for curves) goes to stdout; provenance and
warnings go to stderr.  Exit status: 0 success, 1 input error, 2 result
flagged inconclusive, incomplete or failing its check.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from fractions import Fraction

import numpy as np

from rankone import __version__

EXIT_OK, EXIT_INPUT, EXIT_FLAGGED = 0, 1, 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _jsonable(o):
    if isinstance(o, Fraction):
        return str(o) if o.denominator != 1 else int(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    if hasattr(o, "to_json"):
        return o.to_json()
    raise TypeError(f"not serialisable: {type(o).__name__}")


def _num(v):
    """Float for JSON, keeping nan/inf as strings so the output stays valid JSON."""
    v = float(v)
    return v if math.isfinite(v) else str(v)


# -- command implementations: each returns (record, tolerances, flagged, csv_rows) --

def _group(args):
    from rankone.groups import make_group
    return make_group(args.family, args.n)


def cmd_group_info(args):
    g = _group(args)
    alpha, beta = g.jacobi
    rec = {"family": g.family, "n": g.n, "name": g.name, "field": g.field, "deltaG": g.deltaG,
           "m1": g.m1, "m2": g.m2, "rho_beta": g.rho_beta, "jacobi_alpha": alpha,
           "jacobi_beta": beta}
    return rec, {}, False, None


def _spec(args):
    from rankone.bundled import resolve_spec
    return resolve_spec(args.spec, seed=args.seed)


def _ball(args, spec):
    from rankone.orbits import BallCache, enumerate_ball
    cache = None if args.no_cache else BallCache()
    return enumerate_ball(spec, args.radius, budget=args.budget, tolerance=args.tolerance,
                          cache=cache)


def cmd_orbit_enumerate(args):
    from rankone.orbits import save_ball_json
    spec = _spec(args)
    ball = _ball(args, spec)
    if args.save:
        with open(args.save, "w") as fh:
            save_ball_json(ball, fh)
    rec = {"spec": spec.label, "radius": ball.radius, "count": len(ball),
           "complete": ball.complete, "dedup_kind": ball.dedup_kind,
           "max_word_length": int(ball.word_lengths.max()) if len(ball) else 0,
           "max_displacement": float(ball.displacements.max()) if len(ball) else 0.0,
           "collisions": ball.collisions, "prune_slack": ball.prune_slack}
    rows = [["R", "N"]] + [[f"{r:.6f}", int(n)] for r, n in
                           zip(np.linspace(0, ball.radius, 41),
                               ball.counting(np.linspace(0, ball.radius, 41)))]
    return rec, {"dedup": args.tolerance, "boundary": 1e-9}, not ball.complete, rows


def cmd_delta_estimate(args):
    from rankone.poincare import delta_estimate
    spec = _spec(args)
    ball = _ball(args, spec)
    est = delta_estimate(ball, method=args.method, samples=args.samples)
    rec = dict(est.to_json(), spec=spec.label, ball_size=len(ball), complete=ball.complete)
    rows = [["R", "N", "logN"]] + [[f"{r:.6f}", n, f"{math.log(n):.10f}" if n else "-inf"]
                                    for r, n in est.counting_curve]
    return rec, {"dedup": args.tolerance}, est.flagged, rows


def cmd_delta_probe(args):
    from rankone.poincare import divergence_probe
    spec = _spec(args)
    ball = _ball(args, spec)
    res = divergence_probe(ball, args.s)
    rec = dict(res.to_json(), spec=spec.label, complete=ball.complete)
    return rec, {"dedup": args.tolerance}, res.label == "inconclusive" or not ball.complete, None


def cmd_walk_radius(args):
    from rankone.walks import walk_spectral_radius
    target = args.target
    try:
        from rankone.walks import parse_abstract
        parse_abstract(target)
    except ValueError:
        target = _spec(argparse.Namespace(spec=args.target, seed=args.seed))
    est = walk_spectral_radius(target, steps=args.steps, trials=args.trials, seed=args.seed)
    rec = est.to_json()
    rec["value"] = _num(rec["value"])
    rec["naive_root"] = _num(rec["naive_root"])
    rec["residual"] = _num(rec["residual"])
    return rec, {"fit_residual_limit": 1e-3}, est.low_confidence, None


def _param(args):
    from rankone.harmonic import complementary, principal
    g = _group(args)
    if (args.x is None) == (args.y is None):
        raise InputError("give exactly one of --x (complementary) or --y (principal)")
    return complementary(g, args.x) if args.x is not None else principal(g, args.y)


def _grid(text):
    try:
        a, b, step = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise InputError(f"grid must be start:stop:step, got {text!r}") from exc
    if step <= 0 or b < a:
        raise InputError("grid needs start <= stop and step > 0")
    return np.round(np.arange(a, b + step / 2, step), 12)


def _value_json(v):
    return v if isinstance(v, float) else [v.real, v.imag]


def cmd_spherical_eval(args):
    from rankone.harmonic import MP_DPS, phi, phi_quadrature
    par = _param(args)
    tol = {"mp_dps": MP_DPS, "target_abs": 1e-8}
    base = {"group": par.group.name, "kind": par.kind, "x": par.x}
    if args.t_grid:
        ts = _grid(args.t_grid)
        rows = [["t", "value"]]
        recs = []
        for t in ts:
            v = phi(par, t)
            recs.append(dict(base, t=float(t), value=_value_json(v)))
            rows.append([f"{t:g}", repr(v.real if isinstance(v, complex) else v)])
        return {"records": recs}, tol, False, rows
    if args.t is None:
        raise InputError("give --t or --t-grid")
    v = phi(par, args.t)
    rec = dict(base, t=float(args.t), value=_value_json(v))
    if args.check:
        q = complex(phi_quadrature(par, [args.t])[0])
        rec["quadrature"] = _value_json(q.real if par.kind == "complementary" else q)
        rec["dual_difference"] = abs(complex(v) - q)
        return rec, dict(tol, dual=1e-6), rec["dual_difference"] > 1e-6, None
    return rec, tol, False, None


def cmd_spherical_limit(args):
    from rankone.harmonic import LIMIT_REL_CHANGE, c_function, spherical_limit
    par = _param(args)
    res = spherical_limit(par, t_max=args.t_max)
    rec = dict(res.to_json(), group=par.group.name, kind=par.kind, x=par.x,
               closed_form=c_function(par.group, par.x))
    return rec, {"rel_change": LIMIT_REL_CHANGE}, not res.stabilized, None


def cmd_spherical_check_bounds(args):
    from rankone import harmonic as H
    g = _group(args)
    tol = {"tail_slope": H.TAIL_SLOPE, "inequality": H.INEQ_TOL}
    if args.p is None:
        rep = H.bounds_suite(g)
        return rep.to_json(), tol, not rep.ok, None
    if args.curve == "xi":
        samples = [(float(t), H.xi(g, t)) for t in H.T_GRID]
    elif args.curve == "phi":
        samples = H.threshold_curve(g, args.p)
    else:
        samples = [(float(t), 1.0) for t in H.T_GRID]
    rep = H.check_decay_bound(g, args.p, samples)
    rec = dict(rep.to_json(), group=g.name, curve=args.curve)
    rows = [["t", "value"]] + [[f"{t:g}", repr(float(abs(v)))] for t, v in samples]
    return rec, tol, not rep.passed, rows


def _lp_delta(args):
    from rankone import lp
    if args.delta_g is not None:
        return lp.rational(args.delta_g)
    if args.family is None or args.n is None:
        raise InputError("give --delta-g or --family and --n")
    return Fraction(_group(args).deltaG)


def cmd_lp_threshold(args):
    from rankone import lp
    return {"exponent": lp.complementary_threshold(_lp_delta(args), args.x)}, {}, False, None


def cmd_lp_restrict(args):
    from rankone import lp
    e = lp.restrict_exponent(lp.LpExponent.parse(args.p, True), args.delta_sub, args.delta_g)
    return {"exponent": e}, {}, False, None


def cmd_lp_quotient(args):
    from rankone import lp
    return lp.quotient_exponent(args.delta_g, args.delta_gamma).to_json(), {}, False, None


def cmd_lp_laplacian(args):
    from rankone import lp
    return {"bottom": lp.laplacian_bottom(args.delta_g, args.delta_gamma)}, {}, False, None


def cmd_lp_tensor_plan(args):
    from rankone import lp
    return lp.tensor_plan(_lp_delta(args), args.p).to_json(), {}, False, None


def cmd_lp_combine(args):
    from rankone import lp
    return {"exponent": lp.hoelder_combine(args.p, args.q)}, {}, False, None


def cmd_lp_ineq14(args):
    from rankone import lp
    sc = lp.ExponentScenario(args.delta_g, args.delta_gamma, args.delta_ker, args.delta_im)
    return lp.thm14_bound(sc).to_json(), {}, False, None


def cmd_lp_ineq16(args):
    from rankone import lp
    return lp.thm16_bound(args.delta_gamma, args.delta_c, args.strict).to_json(), {}, False, None


def _model(args):
    from rankone.cusp import CuspModel
    return CuspModel(args.space, args.n)


def cmd_cusp_criterion(args):
    from rankone.cusp import cusp_integrability
    m = _model(args)
    return dict(cusp_integrability(m).to_json(), model=m.to_json()), {}, False, None


def cmd_cusp_volume(args):
    from rankone.cusp import horoball_volume
    v = horoball_volume(args.n, args.base_volume, args.s)
    return {"n": args.n, "base_volume": args.base_volume, "s": args.s, "volume": v}, {}, False, None


def cmd_cusp_word_bound(args):
    from rankone.cusp import cusp_word_bound
    rep = cusp_word_bound(args.n, per_axis=args.per_axis, heights=args.heights, h_max=args.h_max)
    return rep.to_json(), {"slope": 1e-3}, bool(rep.flags) or not rep.bounded, None


def cmd_cusp_tail(args):
    from rankone.cusp import tail_sum_probe
    res = tail_sum_probe(_model(args), args.M)
    rows = [["m", "partial_sum"]] + [[i + 1, repr(v)] for i, v in enumerate(res.partial_sums)]
    return res.to_json(), {}, False, rows


def _tree(args):
    from rankone.trees import AmalgamSpec
    return AmalgamSpec.parse(args.spec)


def cmd_tree_distance(args):
    from rankone.trees import tree_distance
    spec = _tree(args)
    g = spec.element(args.word)
    return {"spec": str(spec), "word": args.word, "normal_form": spec.format(g),
            "distance": tree_distance(spec, g)}, {}, False, None


def cmd_tree_cocycle(args):
    from rankone.trees import wall_cocycle_norm
    spec = _tree(args)
    val = wall_cocycle_norm(spec, args.word)
    return dict(val.to_json(), spec=str(spec), word=args.word), {}, False, None


def cmd_tree_probe(args):
    from rankone.trees import fixed_point_probe
    spec = _tree(args)
    gens = [w.strip() for w in args.generators.split(",")] if args.generators else None
    res = fixed_point_probe(spec, cap=args.cap, generators=gens)
    return dict(res.to_json(), spec=str(spec)), {}, res.verdict == "inconclusive", None


# -- parser ------------------------------------------------------------------

def _globals(defaults: bool):
    p = argparse.ArgumentParser(add_help=False)
    kw = {} if defaults else {"default": argparse.SUPPRESS}
    p.add_argument("--seed", type=int, help="seed for randomized procedures (default 0)",
                   **({"default": 0} if defaults else kw))
    p.add_argument("--tolerance", type=float, help="float dedup tolerance (default 1e-9)",
                   **({"default": 1e-9} if defaults else kw))
    p.add_argument("--output", choices=("json", "csv"), help="output format (default json)",
                   **({"default": "json"} if defaults else kw))
    p.add_argument("--no-cache", action="store_true", help="bypass the orbit-ball cache",
                   **({"default": False} if defaults else kw))
    return p


def _add_group_args(p, required=True):
    p.add_argument("--family", choices=("so", "su", "real", "complex"), required=required)
    p.add_argument("--n", type=int, required=required)


def build_parser() -> argparse.ArgumentParser:
    common = _globals(defaults=False)
    parser = _Parser(prog="rankone", parents=[_globals(defaults=True)],
                     description="Numerics for SO(n,1) and SU(n,1): orbits, spherical "
                                 "functions, L^p exponents, cusps and trees.")
    parser.add_argument("--version", action="version", version=f"rankone {__version__}")
    nouns = parser.add_subparsers(dest="noun", required=True, parser_class=_Parser)

    def verb(noun_sub, name, fn, help_):
        p = noun_sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    g = nouns.add_parser("group", help="group descriptors").add_subparsers(dest="verb", required=True)
    _add_group_args(verb(g, "info", cmd_group_info, "root data and critical exponent"))

    def spec_args(p, radius=10.0):
        p.add_argument("--spec", default="modular",
                       help="modular | cyclic[:t] | schottky[:T[:n]] | JSON path or string")
        p.add_argument("--radius", type=float, default=radius)
        p.add_argument("--budget", type=int, default=20_000_000)

    o = nouns.add_parser("orbit", help="orbit balls").add_subparsers(dest="verb", required=True)
    p = verb(o, "enumerate", cmd_orbit_enumerate, "enumerate an orbit ball")
    spec_args(p)
    p.add_argument("--save", help="write the ball as JSON to this path")

    d = nouns.add_parser("delta", help="critical exponents").add_subparsers(dest="verb", required=True)
    p = verb(d, "estimate", cmd_delta_estimate, "estimate the critical exponent")
    spec_args(p, 14.0)
    p.add_argument("--method", choices=("counting_slope", "series_threshold"),
                   default="counting_slope")
    p.add_argument("--samples", type=int, default=50)
    p = verb(d, "probe", cmd_delta_probe, "divergence trend of the Poincare series at s")
    spec_args(p, 14.0)
    p.add_argument("--s", type=float, required=True)

    w = nouns.add_parser("walk", help="random walks").add_subparsers(dest="verb", required=True)
    p = verb(w, "radius", cmd_walk_radius, "spectral radius of the simple random walk")
    p.add_argument("--target", default="free:2",
                   help="free:k | Z | Z^d | bundled spec name | JSON spec")
    p.add_argument("--steps", type=int, default=800)
    p.add_argument("--trials", type=int, default=0, help="Monte Carlo trials (0 = exact DP)")

    s = nouns.add_parser("spherical", help="spherical functions").add_subparsers(dest="verb",
                                                                                required=True)
    for name, fn, help_ in (("eval", cmd_spherical_eval, "evaluate phi_lambda(a_t)"),
                            ("limit", cmd_spherical_limit, "limit of e^{(rho-x)t} phi_x(t)")):
        p = verb(s, name, fn, help_)
        _add_group_args(p)
        p.add_argument("--x", type=float, help="complementary parameter in [0, rho]")
        p.add_argument("--y", type=float, help="principal parameter (lambda = i y)")
        if name == "eval":
            p.add_argument("--t", type=float)
            p.add_argument("--t-grid", help="start:stop:step")
            p.add_argument("--check", action="store_true",
                           help="also evaluate by quadrature and report the difference")
        else:
            p.add_argument("--t-max", type=float, default=40.0)
    p = verb(s, "check-bounds", cmd_spherical_check_bounds,
             "bounds suite, or the decay bound for exponent p")
    _add_group_args(p)
    p.add_argument("--p", type=float, help="check |value| <= C(1+t)e^{-deltaG t/p}")
    p.add_argument("--curve", choices=("xi", "phi", "one"), default="xi")

    lpp = nouns.add_parser("lp", help="L^p exponent calculus").add_subparsers(dest="verb",
                                                                             required=True)
    p = verb(lpp, "threshold", cmd_lp_threshold, "strong L^p exponent of a complementary series")
    _add_group_args(p, required=False)
    p.add_argument("--delta-g")
    p.add_argument("--x", required=True)
    p = verb(lpp, "restrict", cmd_lp_restrict, "exponent after restriction to a subgroup")
    p.add_argument("--p", required=True)
    p.add_argument("--delta-sub", required=True)
    p.add_argument("--delta-g", required=True)
    for name, fn in (("quotient", cmd_lp_quotient), ("laplacian", cmd_lp_laplacian)):
        p = verb(lpp, name, fn, f"{name} exponent from deltaG and deltaGamma")
        p.add_argument("--delta-g", required=True)
        p.add_argument("--delta-gamma", required=True)
    p = verb(lpp, "tensor-plan", cmd_lp_tensor_plan, "Hoelder/tensor bookkeeping for p > 2")
    _add_group_args(p, required=False)
    p.add_argument("--delta-g")
    p.add_argument("--p", required=True)
    p = verb(lpp, "combine", cmd_lp_combine, "Hoelder combination 1/r = 1/p + 1/q")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p = verb(lpp, "ineq14", cmd_lp_ineq14, "kernel/image critical exponent inequality")
    for f in ("--delta-g", "--delta-gamma", "--delta-ker", "--delta-im"):
        p.add_argument(f, required=True)
    p = verb(lpp, "ineq16", cmd_lp_ineq16, "edge stabilizer inequality")
    p.add_argument("--delta-gamma", required=True)
    p.add_argument("--delta-c", required=True)
    p.add_argument("--strict", action="store_true")

    c = nouns.add_parser("cusp", help="cusp geometry").add_subparsers(dest="verb", required=True)
    for name, fn in (("criterion", cmd_cusp_criterion), ("tail", cmd_cusp_tail)):
        p = verb(c, name, fn, f"cusp {name}")
        p.add_argument("--space", required=True, help="rhn | chn | qhn")
        p.add_argument("--n", type=int, required=True)
        if name == "tail":
            p.add_argument("--M", type=int, default=40)
    p = verb(c, "volume", cmd_cusp_volume, "horoball volume")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--base-volume", type=float, default=1.0)
    p.add_argument("--s", type=float, default=0.0)
    p = verb(c, "word-bound", cmd_cusp_word_bound, "word length against cusp height")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--per-axis", type=int, default=10)
    p.add_argument("--heights", type=int, default=100)
    p.add_argument("--h-max", type=float, default=5.0)

    t = nouns.add_parser("tree", help="trees and wall cocycles").add_subparsers(dest="verb",
                                                                               required=True)
    for name, fn in (("distance", cmd_tree_distance), ("cocycle", cmd_tree_cocycle)):
        p = verb(t, name, fn, f"tree {name} of a word")
        p.add_argument("--spec", default="4,2,6", help="'a,c,b' or 'free:k'")
        p.add_argument("--word", required=True)
    p = verb(t, "probe", cmd_tree_probe, "fixed point or hyperbolic element")
    p.add_argument("--spec", default="4,2,6")
    p.add_argument("--cap", type=int, default=12)
    p.add_argument("--generators", help="comma-separated generator words")
    return parser


def _emit(rec, tolerances, rows, args, out):
    if args.output == "csv":
        if rows is None:
            raise InputError("this command has no CSV form; use --output json")
        w = csv.writer(out, lineterminator="\n")
        w.writerows(rows)
        return
    if isinstance(rec, dict):
        rec = dict(rec, tolerances=tolerances)
    out.write(json.dumps(rec, sort_keys=True, default=_jsonable) + "\n")


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except InputError as exc:
        print(f"rankone: error: {exc}", file=stderr)
        return EXIT_INPUT
    except SystemExit as exc:          # --help / --version
        return int(exc.code or 0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            rec, tol, flagged, rows = args.func(args)
            buf = io.StringIO()
            _emit(rec, tol, rows, args, buf)
        except (InputError, ValueError, TypeError, KeyError, OSError,
                ZeroDivisionError, json.JSONDecodeError) as exc:
            print(f"rankone: error: {exc}", file=stderr)
            return EXIT_INPUT
        except ArithmeticError as exc:     # evaluation failures are reported, not approximated
            print(f"rankone: computation failed: {exc}", file=stderr)
            return EXIT_FLAGGED
    stdout.write(buf.getvalue())
    prov = {"tool": "rankone", "version": __version__, "seed": args.seed,
            "command": f"{args.noun} {args.verb}", "tolerances": tol}
    print(json.dumps(prov, sort_keys=True, default=_jsonable), file=stderr)
    for w in caught:
        print(f"warning: {w.message}", file=stderr)
    return EXIT_FLAGGED if flagged else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
