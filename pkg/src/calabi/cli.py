"""``calabi`` command line tool.

Exit status: 0 on success, 2 when the command line or an input is invalid,
3 when the numerics fail (point outside the domain, non-convex Hessian,
blow-up, ...).  ``verify`` exits 1 when a check fails.  Results are JSON on
stdout unless ``--out`` or ``--format csv`` says otherwise.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from . import catalog
from .errors import InputError, NumericError
from .expr import convex_function
from .frames import theta_bruteforce, theta_max
from .geodesics import geodesic, length_to_boundary
from .legendre import duality_defect, legendre_point
from .pde import pde_report, power_identity, power_identity_coefficient
from .report import (TOOL, VERSION, analyze, dumps, geodesic_rows, to_json, trajectory_rows,
                     write_csv)
from .verify import run_check, run_suite
from .warped import (CASES, christoffel_from_metric, expected_connection, expected_cubic_form,
                     graph_residual, immersion_point, integrate_eta, param_case,
                     pullback_cubic_form, pullback_metric, warped_metric)

DEFAULT_STEP = 1e-3
DEFAULT_EPS = 1e-6
DEFAULT_RESTARTS = 16
DEFAULT_SEED = 42


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _vector(text: str, what: str = "--point") -> np.ndarray:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"{what} must be comma-separated numbers, got {text!r}") from None
    if not values or not np.all(np.isfinite(values)):
        raise InputError(f"{what} must contain finite numbers")
    return np.array(values)


def _dim_for(args, *vectors) -> int:
    lengths = {len(v) for v in vectors}
    if len(lengths) > 1:
        raise InputError("vectors have different lengths")
    (inferred,) = lengths
    if args.dim is not None and args.dim != inferred:
        raise InputError(f"--dim {args.dim} does not match a point with {inferred} coordinates")
    return inferred


def _function(args, n: int):
    if (args.catalog is None) == (args.expr is None):
        raise InputError("give exactly one of --catalog or --expr")
    if args.catalog is not None:
        return catalog.get(args.catalog, n)
    return convex_function(args.expr, n, args.domain or ())


def _cf(obj):
    return obj.function if isinstance(obj, catalog.CatalogEntry) else obj


def _emit(args, command: str, result, csv_table=None) -> None:
    if getattr(args, "format", "json") == "csv":
        if csv_table is None:
            raise InputError(f"{command} has no CSV output; use --format json")
        text = write_csv(*csv_table)
    else:
        text = dumps({"tool": TOOL, "version": VERSION, "command": command, "result": result})
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- verbs -------------------------------------------------------------------------

def cmd_analyze(args):
    p = _vector(args.point)
    f = _function(args, _dim_for(args, p))
    report = analyze(f, p, exponents=args.a or (), seed=args.seed, restarts=args.restarts)
    text = to_json(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_residual(args):
    p = _vector(args.point)
    f = _function(args, _dim_for(args, p))
    r = pde_report(_cf(f), p, args.a)
    _emit(args, "residual", {"a": r.a, "w": r.w, "residual_12": r.residual_12,
                             "normalized_residual": r.normalized_residual,
                             "residual_11": r.residual_11, "implied_Lsharp": r.implied_Lsharp})


def cmd_identity54(args):
    p = _vector(args.point)
    n = _dim_for(args, p)
    if args.a == 0:
        raise InputError("exponent must be nonzero")
    lhs, rhs = power_identity(n, args.a, p)
    _emit(args, "identity54", {"n": n, "a": args.a, "point": p, "lhs": lhs, "rhs": rhs,
                               "coefficient": power_identity_coefficient(n, args.a),
                               "relative_gap": abs(lhs / rhs - 1.0) if rhs else None})


def cmd_theta(args):
    p = _vector(args.point)
    f = _cf(_function(args, _dim_for(args, p)))
    ej = theta_max(f, p, restarts=args.restarts, seed=args.seed)
    result = {"theta": ej.theta, "maximizer": ej.maximizer, "lambda1": ej.lambda1,
              "mu": ej.mu, "spectrum": ej.spectrum,
              "maximizer_spectrum": ej.maximizer_spectrum, "iterations": ej.iterations}
    if args.bruteforce:
        result["theta_grid"] = theta_bruteforce(f, p)
    _emit(args, "theta", result)


def cmd_ode(args):
    traj = integrate_eta(args.eta0, args.t_end, args.step)
    _emit(args, "ode", {"eta0": args.eta0, "t_end": float(traj.t[-1]), "step": traj.step,
                        "method": traj.method, "eta_end": float(traj.eta[-1]),
                        "rho_end": float(traj.rho[-1]), "cbar": float(traj.cbar[0]),
                        "cbar_drift": traj.cbar_drift}, trajectory_rows(traj))


def cmd_param_check(args):
    params = _vector(args.params, "--params")
    n = _dim_for(args, params)
    pc = param_case(args.case, n)
    G = pullback_metric(pc, params)
    conn = christoffel_from_metric(lambda q: warped_metric(pc.case, q), params)
    _emit(args, "param-check", {
        "case": pc.case, "n": n, "params": params, "target": pc.target,
        "immersion": list(pc.sources), "point": immersion_point(pc, params),
        "graph_residual": graph_residual(pc, params),
        "metric_error": float(np.max(np.abs(G - warped_metric(pc.case, params)))),
        "connection_error": float(np.max(np.abs(conn - expected_connection(pc.case, params)))),
        "cubic_form_error": float(np.max(np.abs(pullback_cubic_form(pc, params)
                                                - expected_cubic_form(pc.case, params)))),
        "pullback_metric": G,
    })


def cmd_legendre(args):
    y = _vector(args.point)
    f = _cf(_function(args, _dim_for(args, y)))
    pair = legendre_point(f, y)
    result = {"y": pair.y, "x": pair.x, "u_value": pair.u_value}
    if args.conjugate:
        result["conjugate"] = args.conjugate
        result["duality_defect"] = duality_defect(f, catalog.get(args.conjugate, len(y)).function, y)
    _emit(args, "legendre", result)


def cmd_geodesic(args):
    p = _vector(args.point)
    v = _vector(args.velocity, "--velocity")
    f = _cf(_function(args, _dim_for(args, p, v)))
    path = geodesic(f, p, v, args.s_end, args.step)
    _emit(args, "geodesic", {"start": p, "velocity": v, "s_end": float(path.s[-1]),
                             "step": args.step, "end": path.end, "arc_length": path.arc_length,
                             "speed_drift": path.speed_drift, "left_domain": path.left_domain,
                             "samples": len(path.s)}, geodesic_rows(path))


def cmd_length(args):
    p = _vector(args.point)
    d = _vector(args.direction, "--direction")
    f = _cf(_function(args, _dim_for(args, p, d)))
    r = length_to_boundary(f, p, d, args.eps, args.cap)
    note = ("ray stayed inside the domain up to the cap" if r.not_truncated else
            "metric length up to the eps-level of the boundary; growth like log(1/eps) "
            "suggests, but does not prove, that the boundary is at infinite distance")
    _emit(args, "length", {"start": p, "direction": d, "eps": args.eps, "length": r.length,
                           "tau_boundary": r.tau_boundary, "tau_end": r.tau_end,
                           "not_truncated": r.not_truncated, "evaluations": r.evaluations,
                           "note": note})


def cmd_catalog(args):
    if args.action == "list":
        rows = [{"name": k, "label": catalog.get(k, 2).label} for k in catalog.names()]
        if args.format == "csv":
            _emit(args, "catalog", None, (["name", "label"], [[r["name"], r["label"]] for r in rows]))
        else:
            _emit(args, "catalog", rows)
        return
    if not args.name:
        raise InputError("catalog show needs an entry name")
    e = catalog.get(args.name, args.dim or 2)
    _emit(args, "catalog", {
        "name": e.name, "n": e.n, "label": e.label, "source": e.function.source,
        "domain": str(e.function.domain), "case": e.case, "equivalent_to": e.equivalent_to,
        "expected": [{"quantity": k, "value": x.value, "basis": x.basis, "note": x.note}
                     for k, x in e.expected.items()],
    })


def cmd_verify(args):
    results = [run_check(c, args.seed) for c in args.only] if args.only else run_suite(args.seed)
    ok = all(r.passed for r in results)
    if args.format == "json":
        _emit(args, "verify", {"suite": args.suite, "seed": args.seed, "passed": ok,
                               "checks": [r.as_dict() for r in results]})
    else:
        lines = [r.line() for r in results]
        lines.append(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return 0 if ok else 1


# -- parser ------------------------------------------------------------------------

def _add_function(p):
    p.add_argument("--catalog", help="catalog entry name (see `calabi catalog list`)")
    p.add_argument("--expr", help="function body, e.g. '-0.25*ln(x1 - x2^2/2)'")
    p.add_argument("--domain", action="append", metavar="CONSTRAINT",
                   help="with --expr: expression required to be positive (repeatable)")
    p.add_argument("--dim", type=int, help="dimension n; inferred from --point when omitted")


def _add_output(p, formats=("json",)):
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--out", help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="calabi", description="Calabi-affine invariants of convex graphs.")
    parser.add_argument("--version", action="version", version=f"calabi {VERSION}")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="full invariant report at a point",
                       description="Metric, Tchebychev norm, Pick invariant, scalar curvature "
                       "(contracted and from J, |T|^2), sampled sectional curvatures, maximal "
                       "cubic form and optional PDE residuals at one point.")
    _add_function(p)
    p.add_argument("--point", required=True)
    p.add_argument("--a", type=float, action="append", help="exponent for a PDE residual (repeatable)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    p.add_argument("--out")
    p.set_defaults(run=cmd_analyze)

    p = sub.add_parser("residual", help="affine maximal type residual",
                       description="Evaluates f^ij w_ij and F^ij w_ij for w = det(D^2 f)^a; the "
                       "first vanishes for solutions of the affine maximal type equation, the "
                       "second equals minus the scalar curvature function of the Abreu-type "
                       "equation.")
    _add_function(p)
    p.add_argument("--point", required=True)
    p.add_argument("--a", type=float, required=True, help="nonzero exponent")
    _add_output(p)
    p.set_defaults(run=cmd_residual)

    p = sub.add_parser("identity54", help="power identity on the log-paraboloid",
                       description="Compares f^ij (D^a)_ij with 4(n+1)((n+1)a^2 + na) D^a for "
                       "f = -1/4 ln(x1 - |x'|^2/2); the coefficient vanishes at a = -n/(n+1).")
    p.add_argument("--point", required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--dim", type=int)
    _add_output(p)
    p.set_defaults(run=cmd_identity54)

    p = sub.add_parser("theta", help="maximal cubic form on the unit sphere",
                       description="Maximizes A(u,u,u) over G(u,u) = 1 by shifted power "
                       "iteration with seeded restarts, and reports the eigenvalues of A(E1) "
                       "(2, 1, ..., 1 on the classification graphs).")
    _add_function(p)
    p.add_argument("--point", required=True)
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--bruteforce", action="store_true", help="also run the grid search (n = 2, 3)")
    _add_output(p)
    p.set_defaults(run=cmd_theta)

    p = sub.add_parser("ode", help="Riccati flow of the warping function",
                       description="RK4 for eta' = 1 - eta^2 and rho' = eta rho with rho(0) = 1; "
                       "cbar = rho^2 (eta^2 - 1) must stay constant.")
    p.add_argument("--eta0", type=float, required=True)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--step", type=float, default=DEFAULT_STEP)
    _add_output(p, ("json", "csv"))
    p.set_defaults(run=cmd_ode)

    p = sub.add_parser("param-check", help="check one classification immersion",
                       description="Normalizes the immersion point, measures its distance to "
                       "the target graph and compares the pulled-back metric, connection and "
                       "cubic form with the warped-product closed forms.")
    p.add_argument("--case", choices=CASES, required=True)
    p.add_argument("--params", required=True, help="t,u2,...,un")
    p.add_argument("--dim", type=int)
    _add_output(p)
    p.set_defaults(run=cmd_param_check)

    p = sub.add_parser("legendre", help="pointwise Legendre transform",
                       description="x = grad f(y) and u = <y, x> - f(y); with --conjugate also "
                       "the defect |Hf(y) Hc(x) - I| + |u - c(x)|.")
    _add_function(p)
    p.add_argument("--point", required=True)
    p.add_argument("--conjugate", help="catalog entry expected to be the transform")
    _add_output(p)
    p.set_defaults(run=cmd_legendre)

    p = sub.add_parser("geodesic", help="integrate a Calabi geodesic",
                       description="RK4 on x'' = -Gamma(x)[x', x'] using Gamma = 1/2 f^kl f_ijl; "
                       "reports the drift of the metric speed.")
    _add_function(p)
    p.add_argument("--point", required=True)
    p.add_argument("--velocity", required=True)
    p.add_argument("--s-end", type=float, default=1.0)
    p.add_argument("--step", type=float, default=DEFAULT_STEP)
    _add_output(p, ("json", "csv"))
    p.set_defaults(run=cmd_geodesic)

    p = sub.add_parser("length", help="metric length of a ray up to the boundary",
                       description="Calabi length of a straight segment until the domain margin "
                       "reaches eps. Growth like log(1/eps) is divergence evidence only.")
    _add_function(p)
    p.add_argument("--point", required=True)
    p.add_argument("--direction", required=True)
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--cap", type=float, default=100.0)
    _add_output(p)
    p.set_defaults(run=cmd_length)

    p = sub.add_parser("catalog", help="list or show built-in functions",
                       description="Named graph functions with their domains and the invariant "
                       "values they are expected to reproduce.")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    p.add_argument("--dim", type=int)
    _add_output(p, ("json", "csv"))
    p.set_defaults(run=cmd_catalog)

    p = sub.add_parser("verify", help="run the reproducibility suite",
                       description="Solution residuals, scalar curvature values, the power "
                       "identity, invariant constants, two-way scalar curvature, jets against "
                       "finite differences, theta against grid search, the Riccati flow, the "
                       "classification immersions, Legendre duality, completeness probes, the "
                       "exponent window and the no-solving-exponent example.")
    p.add_argument("--suite", choices=("paper",), default="paper")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--only", type=int, action="append", choices=range(1, 14), metavar="ID")
    _add_output(p, ("table", "json"))
    p.set_defaults(run=cmd_verify)
    return parser


def _validate(args) -> None:
    if getattr(args, "restarts", DEFAULT_RESTARTS) < 8:
        raise InputError("--restarts must be at least 8")
    step = getattr(args, "step", DEFAULT_STEP)
    if not 0 < step <= 0.01:
        raise InputError("--step must lie in (0, 0.01]")
    if getattr(args, "eps", DEFAULT_EPS) <= 0:
        raise InputError("--eps must be positive")
    if getattr(args, "dim", None) is not None and args.dim < 1:
        raise InputError("--dim must be positive")
    a = getattr(args, "a", None)
    if a is not None and any(x == 0 for x in (a if isinstance(a, list) else [a])):
        raise InputError("exponent must be nonzero")


_VALUE_OPTIONS = ("--point", "--velocity", "--direction", "--params", "--a", "--eta0")


def _join_negative_values(argv: list) -> list:
    """Turn ``--point -1,0`` into ``--point=-1,0`` so argparse does not read an option."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if tok in _VALUE_OPTIONS and nxt[:1] == "-" and nxt[1:2].isdigit() | (nxt[1:2] == "."):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    args = build_parser().parse_args(argv)
    try:
        _validate(args)
        code = args.run(args)
    except InputError as exc:
        print(f"calabi {args.verb}: error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"calabi {args.verb}: numeric error: {exc}", file=sys.stderr)
        return 3
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
