"""Command-line front end.

Four commands: check (exponent and applicability analysis), solve (formal
series construction), certify (barrier verification plus the flow run),
verify-example (closed-form checks of the bundled instances).

Reports are canonical JSON: sorted keys, compact separators, floats in
their shortest round-trip form, exact rationals as "p/q" strings.  All
recorded work measures are deterministic counters, so byte-identical
inputs give byte-identical reports.  Exit codes: 0 clean, 1 checks ran
and found violations, 2 input or hypothesis error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .builtin import (
    BUILTIN_NAMES,
    closed_form_eval,
    closed_form_series,
    load_equation,
    remark2_residual_grid,
)
from .certificate import (
    BarrierSystem,
    build_shifted_rhs,
    choose_params,
    normal_form,
    profile_family,
    verify_barrier,
)
from .characteristics import (
    check_radius_bounds,
    check_reaches_origin,
    check_weighted_decay,
    decay_profile,
    integrate,
    smallness_box,
)
from .equation import FuchsianEquation
from .errors import HypothesisViolated, InputError, ToolkitError
from .rational import Frac
from .series import SeriesTX, alphas_of_degree
from .solver import residual, solve_formal


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      allow_nan=False)


def _input_digest(source) -> dict:
    if isinstance(source, str) and source in BUILTIN_NAMES:
        from importlib import resources
        data = (resources.files("fuchsian.data") / f"{source}.json").read_bytes()
        label = f"builtin:{source}"
    else:
        path = Path(source)
        if not path.exists():
            raise InputError(f"no such equation file or builtin: {source!r} "
                             f"(builtins: {', '.join(BUILTIN_NAMES)})")
        data = path.read_bytes()
        label = str(source)
    return {"path": label, "sha256": hashlib.sha256(data).hexdigest()}


def _emit(report: dict, out: str | None):
    text = canonical_json(report) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _series_terms(u: SeriesTX) -> list:
    return [{"t_pow": k, "x_pows": list(alpha),
             "coeff": [c.re.numerator, c.re.denominator,
                       c.im.numerator, c.im.denominator]}
            for (k, alpha), c in u.sorted_terms()]


def _parse_w(spec: str, n: int, k_t: int, k_x: int) -> SeriesTX:
    """Monomial-sum syntax: terms separated by ';', each term
    'coeff,tpow,a1 a2 ... an' with coeff an integer or p/q."""
    w = SeriesTX.zero(n, k_t, k_x)
    for pos, chunk in enumerate(spec.split(";")):
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) != 3:
            raise InputError(
                f"w term {pos}: expected 'coeff,tpow,a1 ... an', got {chunk!r}")
        try:
            coeff = Fraction(parts[0])
            tpow = int(parts[1])
            alpha = tuple(int(v) for v in parts[2].split())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"w term {pos}: {exc}") from None
        if len(alpha) != n:
            raise InputError(f"w term {pos}: alpha needs {n} entries")
        if tpow < 0 or any(a < 0 for a in alpha):
            raise InputError(f"w term {pos}: negative power")
        w = w + SeriesTX.monomial(n, k_t, k_x, coeff, tpow, alpha)
    return w


def random_test_function(seed: int, n: int, k_t: int, k_x: int) -> SeriesTX:
    """Deterministic random polynomial test function with positive
    t-order: three monomials, t powers 1..2, x degree at most 2."""
    rng = random.Random(seed)
    alphas = [a for d in range(3) for a in alphas_of_degree(n, d)]
    w = SeriesTX.zero(n, k_t, k_x)
    for _ in range(3):
        coeff = Fraction(rng.randint(1, 9), rng.randint(1, 9))
        if rng.random() < 0.5:
            coeff = -coeff
        w = w + SeriesTX.monomial(n, k_t, k_x, coeff,
                                  rng.randint(1, 2), rng.choice(alphas))
    if w.is_zero() or w.t_order() == 0:
        # cancellations cannot reach t-order 0 here, but stay safe
        w = w + SeriesTX.monomial(n, k_t, k_x, Fraction(1), 1, (0,) * n)
    return w


def _make_w(args, eq: FuchsianEquation) -> SeriesTX:
    k_t, k_x = eq.F.k_t, eq.F.k_x
    if args.w:
        return _parse_w(args.w, eq.n, k_t, k_x)
    if args.seed is not None:
        return random_test_function(args.seed, eq.n, k_t, k_x)
    alpha = tuple(2 if j == 0 else 0 for j in range(eq.n))
    return SeriesTX.monomial(eq.n, k_t, k_x, Fraction(1), 1, alpha)


def _parse_grid(spec: str) -> tuple:
    try:
        nt, nrho = spec.lower().split("x")
        return int(nt), int(nrho)
    except ValueError:
        raise InputError(f"grid must look like '50x50', got {spec!r}") from None


def _applicability_results(eq: FuchsianEquation, K: int) -> dict:
    cd = eq.char_exponents()
    app = eq.applicability(K)
    exact = None
    if cd.roots_exact is not None:
        exact = [str(z.re) if z.im == 0 else f"{z.re}+({z.im})i"
                 for z in cd.roots_exact]
    return {
        "m": eq.m, "n": eq.n,
        "exponents": [[z.real, z.imag] for z in app.roots],
        "exponents_exact": exact,
        "unique_formal": app.unique_formal,
        "resonances": list(app.resonances),
        "near_resonances": [[z.real, z.imag, k]
                            for z, k in app.near_resonances],
        "decay_applicable": app.decay_applicable,
        "h": float(app.h) if app.h is not None else None,
        "h_exact": str(app.h) if app.h is not None else None,
    }


def cmd_check(args) -> int:
    report = {"command": "check", "version": __version__,
              "input": _input_digest(args.equation)}
    try:
        eq = load_equation(args.equation)
        report["results"] = _applicability_results(eq, args.order)
    except ToolkitError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        _emit(report, args.out)
        return 2
    _emit(report, args.out)
    return 0


def cmd_solve(args) -> int:
    report = {"command": "solve", "version": __version__,
              "input": _input_digest(args.equation)}
    try:
        eq = load_equation(args.equation)
        sol = solve_formal(eq, args.order, x_order=args.x_order)
        report["results"] = {
            "order": sol.order, "x_order": sol.x_order,
            "verified": sol.verified,
            "terms": _series_terms(sol.u),
        }
    except ToolkitError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        _emit(report, args.out)
        return 2
    _emit(report, args.out)
    return 0


def cmd_certify(args) -> int:
    report = {"command": "certify", "version": __version__,
              "input": _input_digest(args.equation)}
    try:
        eq = load_equation(args.equation)
        cd = eq.char_exponents()
        report["results"] = {"applicability": _applicability_results(eq, 10)}
        if cd.h is None:
            raise HypothesisViolated(
                "decay hypothesis fails: no exponent margin h; "
                "the barrier construction does not apply")
        u0 = solve_formal(eq, args.order)
        H = build_shifted_rhs(eq, u0)
        dec = normal_form(H, cd)
        w = _make_w(args, eq)
        profiles = profile_family(w, cd, dec)
        params, cert = choose_params(cd, dec, profiles)
        if args.kappa is not None:
            kap = Fraction(args.kappa)
            if not 0 < kap < Fraction(1, 2):
                raise InputError("kappa must lie strictly between 0 and 1/2")
            params = dataclasses.replace(params, kappa=kap)
        if args.eps00 is not None:
            params = dataclasses.replace(params, eps00=Fraction(args.eps00))
        nt, nrho = _parse_grid(args.grid)
        barrier_report = verify_barrier(params, profiles, dec, nt, nrho)
        consts = barrier_report["constants"]

        system = BarrierSystem(dec, profiles, params)
        R = float(params.R0)
        sigma_c, r_c, small_info = smallness_box(
            consts, params.h, params.kappa, R,
            q_corner=lambda s: system.barrier(s, R),
            sigma_max=float(params.sigma0))
        xi = R / 4.0
        path = integrate(system.transport_rate, system.barrier,
                         t0=sigma_c, xi=xi, r_max=R,
                         t_floor=args.tfloor * sigma_c, tol=args.tol)
        decay = check_weighted_decay(path, params.h)
        radius = check_radius_bounds(path, consts, params.kappa, params.h, r_c)
        origin = check_reaches_origin(path, R, consts, params.kappa,
                                      params.h, r_c)
        report["results"].update({
            "w_terms": _series_terms(w),
            "params_certificate": cert,
            "barrier": barrier_report,
            "smallness": small_info,
            "characteristics": {
                "t0": path.t0, "xi": path.xi,
                "t_min_reached": path.t_min_reached,
                "status": path.status,
                "samples": len(path.ts),
                "weighted_decay": decay,
                "radius_bounds": radius,
                "reaches_origin": origin,
            },
        })
        report["timings"] = {
            "grid_points": barrier_report["work"]["grid_points"],
            "phi_evals": barrier_report["work"]["phi_evals"],
            "coefficient_evals": barrier_report["work"]["coefficient_evals"],
            "ode_steps_accepted": path.steps_accepted,
            "ode_steps_rejected": path.steps_rejected,
        }
        if args.csv:
            hf = float(params.h)
            lines = ["t,rho,q,weighted_q"]
            for t, rho, q in zip(path.ts, path.rhos, path.qs):
                lines.append(f"{t:.17g},{rho:.17g},{q:.17g},{t ** hf * q:.17g}")
            Path(args.csv).write_text("\n".join(lines) + "\n")
        ok = (cert["ok"] and barrier_report["ok"] and decay["ok"]
              and radius["ok"] and origin["ok"])
        report["ok"] = ok
        _emit(report, args.out)
        return 0 if ok else 1
    except ToolkitError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        _emit(report, args.out)
        return 2


def cmd_verify_example(args) -> int:
    name = args.name
    report = {"command": "verify-example", "version": __version__,
              "input": _input_digest(name)}
    try:
        eq = load_equation(name)
        results: dict = {"applicability": _applicability_results(eq, 10)}
        if name == "remark2":
            grid = remark2_residual_grid(eq)
            results["residual_numeric"] = {
                **grid, "tol": args.tol,
                "ok": grid["max_abs_residual"] < args.tol}
            try:
                choose_params(eq.char_exponents())
                results["hypothesis_rejection"] = {"ok": False,
                                                   "raised": None}
            except HypothesisViolated as exc:
                results["hypothesis_rejection"] = {
                    "ok": True, "raised": "HypothesisViolated",
                    "message": str(exc)}
            # the closed form lives on 0 < t <= 1/e, so start r there
            prof = decay_profile(closed_form_eval(name),
                                 exponent_p=args.exponent_p,
                                 r_list=[0.36787944117144233,
                                         0.1, 0.01, 0.001, 0.0001],
                                 n=eq.n)
            results["decay_profile"] = prof
            results["decay_profile"]["ok"] = all(
                e["monotone_decreasing"] for e in prof["inner_trend"])
        elif name in ("remark3", "remark3_forced"):
            u = closed_form_series(name, eq.F.k_t, eq.F.k_x)
            res = residual(eq, u, K=eq.F.k_t)
            results["residual_symbolic"] = {"zero": res.is_zero()}
            prof = decay_profile(closed_form_eval(name),
                                 exponent_p=args.exponent_p, n=eq.n)
            results["decay_profile"] = prof
            if name == "remark3":
                vals = [row["sup_scaled"] for row in prof["rows"]]
                target = 1.0 / 72.0
                worst = max(abs(v - target) for v in vals)
                results["decay_constant"] = {
                    "target": target, "max_abs_error": worst,
                    "ok": worst < 1e-12}
                results["ok"] = (res.is_zero()
                                 and results["decay_constant"]["ok"])
            else:
                sol = solve_formal(eq, 4)
                results["solver_match"] = {"ok": sol.u == u.truncate(
                    k_t=sol.u.k_t, k_x=sol.u.k_x)}
                results["ok"] = res.is_zero() and results["solver_match"]["ok"]
        else:
            raise InputError(f"unknown example {name!r}")
        if "ok" not in results:
            results["ok"] = all(v.get("ok", True)
                                for v in results.values()
                                if isinstance(v, dict))
        report["results"] = results
    except ToolkitError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        _emit(report, args.out)
        return 2
    _emit(report, args.out)
    return 0 if report["results"]["ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuchsian",
        description="Formal solutions and uniqueness certificates for "
                    "Euler-operator equations with singular time")
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("check", help="exponents and applicability analysis")
    pc.add_argument("equation", help="builtin name or JSON path")
    pc.add_argument("--order", type=int, default=10,
                    help="resonance search depth (default 10)")
    pc.add_argument("--out", help="write the JSON report here")
    pc.set_defaults(func=cmd_check)

    ps = sub.add_parser("solve", help="construct the formal solution")
    ps.add_argument("equation")
    ps.add_argument("--order", type=int, default=6,
                    help="time order of the computed solution (default 6)")
    ps.add_argument("--x-order", type=int, default=None, dest="x_order")
    ps.add_argument("--out")
    ps.set_defaults(func=cmd_solve)

    pf = sub.add_parser("certify",
                        help="barrier verification and the flow run")
    pf.add_argument("equation")
    pf.add_argument("--order", type=int, default=4,
                    help="time order of the base solution (default 4)")
    pf.add_argument("--w", help="test function as 'coeff,tpow,a1 ... an' "
                                "terms joined by ';' (default t * x1^2)")
    pf.add_argument("--seed", type=int, default=None,
                    help="generate the test function from this seed")
    pf.add_argument("--grid", default="50x50",
                    help="verification grid, e.g. 50x50")
    pf.add_argument("--tfloor", type=float, default=1e-6,
                    help="flow floor as a fraction of the anchor time")
    pf.add_argument("--kappa", default=None,
                    help="override the time-weight exponent (rational p/q)")
    pf.add_argument("--eps00", default=None,
                    help="override the first barrier weight (rational p/q)")
    pf.add_argument("--tol", type=float, default=1e-10,
                    help="flow integrator tolerance")
    pf.add_argument("--csv", help="dump path samples (t,rho,q,weighted_q)")
    pf.add_argument("--out")
    pf.set_defaults(func=cmd_certify)

    pv = sub.add_parser("verify-example",
                        help="closed-form checks of a bundled instance")
    pv.add_argument("name", choices=list(BUILTIN_NAMES))
    pv.add_argument("--exponent-p", type=int, default=4, dest="exponent_p")
    pv.add_argument("--tol", type=float, default=1e-10)
    pv.add_argument("--out")
    pv.set_defaults(func=cmd_verify_example)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
