"""Command-line front end: ``ltlab <command> [options]``.

Exit codes: 0 success, 1 domain/solver error, 2 a pass/fail check failed,
64 malformed command line.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from ._validation import AccuracyError, DomainError, SolverError
from .constants import (GammaDim, best_known_bounds, classical_K, classical_L, duality_K_from_L,
                        one_particle_L_1d)

EXIT_OK, EXIT_ERROR, EXIT_FAILED, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)


# -- output -----------------------------------------------------------------

def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.10g}"
    if v is None:
        return "-"
    return str(v)


def render(doc, fmt):
    """Serialize a result document {command, config, rows, extra, passed}."""
    doc = _clean(doc)
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    header = [f"# ltlab {doc['command']}", "# config: " + json.dumps(doc["config"], sort_keys=True)]
    rows = doc.get("rows") or []
    cols = []
    for row in rows:
        cols.extend(k for k in row if k not in cols)
    if fmt == "csv":
        buf = io.StringIO()
        buf.write("\n".join(header) + "\n")
        if rows:
            wr = csv.DictWriter(buf, cols, lineterminator="\n")
            wr.writeheader()
            for row in rows:
                wr.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
        return buf.getvalue()
    lines = list(header)
    if rows:
        table = [[_fmt(row.get(c)) for c in cols] for row in rows]
        widths = [max(len(c), *(len(r[i]) for r in table)) for i, c in enumerate(cols)]
        lines.append("  ".join(c.ljust(w) for c, w in zip(cols, widths)))
        lines.extend("  ".join(x.ljust(w) for x, w in zip(r, widths)) for r in table)
    for key, val in sorted((doc.get("extra") or {}).items()):
        lines.append(f"{key}: {json.dumps(val, sort_keys=True) if isinstance(val, (dict, list)) else _fmt(val)}")
    if doc.get("passed") is not None:
        lines.append("status: " + ("PASS" if doc["passed"] else "FAIL"))
    return "\n".join(lines) + "\n"


def emit_report(results, fmt="table", config=None):
    """Summary of verify-all results: each reference number, recomputed value, tolerance, verdict.

    The JSON form omits runtimes so identical runs give identical bytes.
    """
    config = config or {}
    failures = sum(not r.passed for r in results)
    if fmt == "json":
        doc = {"command": "verify-all", "config": config, "passed": failures == 0, "failures": failures,
               "criteria": [r.to_dict(with_runtime=False) for r in results]}
        return json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        buf.write("# ltlab verify-all\n# config: " + json.dumps(_clean(config), sort_keys=True) + "\n")
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["criterion", "check", "value", "reference", "tolerance", "passed", "provenance"])
        for r in results:
            for c in r.checks:
                wr.writerow([r.number, c.name, repr(c.value), repr(c.reference), c.tolerance, c.passed, c.provenance])
        return buf.getvalue()
    from .verification import format_line

    lines = ["# ltlab verify-all", "# config: " + json.dumps(_clean(config), sort_keys=True)]
    for r in results:
        lines.append(format_line(r))
        for c in r.checks:
            mark = "ok  " if c.passed else "FAIL"
            lines.append(f"    {mark} {c.name}: {_fmt(c.value)} vs {_fmt(c.reference)} [{c.tolerance}] ({c.provenance})")
    lines.append(f"{len(results)} criteria, {failures} failed")
    return "\n".join(lines) + "\n"


# -- commands ---------------------------------------------------------------

def _doc(args, rows=None, extra=None, passed=None):
    return {"command": args.command, "config": args.config, "rows": rows or [], "extra": extra or {},
            "passed": passed}


def _constant_row(name, c, d):
    return {"name": name, "value": c.value, "kind": c.kind.value, "direction": c.direction.value,
            "K_dual": duality_K_from_L(c.value, d), "provenance": c.provenance}


def cmd_constants(args):
    gd = GammaDim(args.gamma, args.dim)
    lcl = classical_L(gd)
    rows = [_constant_row("L_cl", lcl, gd.dim)]
    if gd.dim == 1 and gd.gamma >= 0.5:
        rows.append(_constant_row("L_one_particle", one_particle_L_1d(gd.gamma), 1))
    elif args.one_particle:
        from .ground_state import one_particle_L

        rows.append(_constant_row("L_one_particle", one_particle_L(gd), gd.dim))
    for c in best_known_bounds(gd):
        rows.append(_constant_row("bound", c, gd.dim))
    for row in rows:
        row["ratio_to_classical"] = row["value"] / lcl.value
    kcl = classical_K(gd.dim)
    return _doc(args, rows, {"K_cl": kcl.value, "K_cl_provenance": kcl.provenance})


def cmd_ground_state(args):
    from .ground_state import GroundStateSolver

    est = GroundStateSolver(dim=args.dim, p=args.p).fit()
    prof = est.profile_
    if args.profile:
        prof.to_csv(args.profile)
    extra = prof.summary()
    extra["L_one_particle"] = 1.0 / prof.norm2p
    ok = prof.max_pohozaev_residual <= args.residual_tol
    return _doc(args, [], extra, ok)


def cmd_rumin(args):
    from .rumin import PUBLISHED_I1_BOUND, TrialPair, k_tilde, lifting_chain, optimize_trial, rumin_functional

    if args.trial_json:
        with open(args.trial_json) as fh:
            tp = TrialPair.from_json(fh.read())
    elif args.params:
        tp = TrialPair("power", tuple(args.params))
    else:
        tp = TrialPair.published()
    if args.optimize:
        tp, _ = optimize_trial(tp, args.dim, budget=args.budget, random_state=args.seed)
    value, err = rumin_functional(tp, args.dim, return_error=True)
    res = k_tilde(args.dim, value)
    extra = {**res.to_dict(), "quadrature_error": err, "trial": json.loads(tp.to_json()),
             "mu": tp.mu, "c": tp.c}
    passed = True
    if args.dim == 1:
        extra["lower_guard_2_3"] = value >= 2 / 3 - 1e-9
        passed = extra["lower_guard_2_3"]
        if args.published_trial:
            extra["below_published_bound"] = value <= PUBLISHED_I1_BOUND
            passed = passed and extra["below_published_bound"]
            extra["lift_factor_d3"] = lifting_chain(3, value).meta["factor"]
    return _doc(args, [], extra, passed)


def _potential(args):
    from .spectral import parse_potential

    return parse_potential(args.potential)


def cmd_spectrum(args):
    from .spectral import spectrum
    from .spectral.experiments import lt_ratio_report

    V = _potential(args)
    summ = spectrum(V, args.extent, args.step, args.levels, args.hbar, args.ell_max)
    rows = summ.rows()
    extra = {"potential": V.describe(), "count_below_0": summ.count_below(0.0), "grid": summ.grid_meta}
    passed = None
    if args.gammas:
        if args.hbar != 1.0:
            raise DomainError("LT ratios need hbar = 1")
        report = lt_ratio_report(V, args.gammas, args.extent, args.step, args.levels, conjecture=args.conjecture,
                                 slack=args.slack, summary=summ)
        extra["lt_ratios"] = report
        flags = [r[k] for r in report for k in ("below_best", "below_half") if r.get(k) is not None]
        passed = all(flags)
    return _doc(args, rows, extra, passed)


def cmd_weyl(args):
    from .spectral.experiments import weyl_convergence

    V = _potential(args)
    rows = weyl_convergence(V, args.gamma, args.couplings, args.extent, args.step, args.levels)
    return _doc(args, rows, {"potential": V.describe()})


def cmd_monotonicity(args):
    from .spectral.experiments import harmonic_limit, monotonicity_experiment

    hbars = np.linspace(args.hbar_min, args.hbar_max, args.points)
    rows = monotonicity_experiment(args.dim, args.gamma, hbars)
    extra = {"increases": sum(r["increase"] for r in rows), "hbar_to_0_limit": harmonic_limit(args.dim, args.gamma)}
    return _doc(args, rows, extra)


def cmd_two_bump(args):
    from .spectral.experiments import largest_stable, two_bump_experiment

    rows = two_bump_experiment(args.gamma, args.R, step=args.step, levels=args.levels)
    best = largest_stable(rows)
    return _doc(args, rows, {"largest_stable_R": None if best is None else best["R"]})


def cmd_sphere(args):
    from .sphere import ggm_conjectured_constant, sphere_table

    rows = sphere_table(args.dim, args.L_max)
    c = ggm_conjectured_constant(args.dim)
    return _doc(args, rows, {"sup_a": c.meta["sup_a"], "argmax_L": c.meta["argmax_L"],
                             "conjectured_L0": c.value, "kind": c.kind.value})


def cmd_stability(args):
    from .stability import MatterSystem, best_k3, proof_chain_optimizers, stability_bound

    k3 = best_k3(conjectured=args.conjectured_k3)
    system = MatterSystem(args.electrons, args.nuclei, args.z, k3)
    extra = {"energy_lower_bound": stability_bound(system), "K3": k3.value, "K3_kind": k3.kind.value,
             "K3_direction": k3.direction.value}
    extra.update(proof_chain_optimizers(args.z, args.nuclei, args.electrons, k3.value))
    return _doc(args, [], extra)


def cmd_gamma_c(args):
    from .ground_state import gamma_crossing

    return _doc(args, [], {"gamma_c": gamma_crossing(args.dim, xtol=args.xtol)})


def cmd_verify_all(args):
    from .verification import resolve_tolerances, run_all

    tol = resolve_tolerances(args.tol)
    args.config["tolerances"] = tol
    results = run_all(args.criteria, tol)
    return results


# -- parser -----------------------------------------------------------------

def _kv(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    key, val = text.split("=", 1)
    from .verification import TOLERANCES

    if key not in TOLERANCES:
        raise argparse.ArgumentTypeError(f"unknown tolerance {key!r}; known: {', '.join(sorted(TOLERANCES))}")
    try:
        return key, float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {key} must be numeric") from None


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("table", "json", "csv"), default="table")
    common.add_argument("--seed", type=int, default=None, help="seed for stochastic searches")

    p = _Parser(prog="ltlab", description="Lieb-Thirring constants and Schrodinger spectra")
    p.add_argument("--version", action="version", version=f"ltlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("constants", parents=[common], help="semiclassical constants and known bounds")
    s.add_argument("--gamma", type=float, required=True)
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--one-particle", action="store_true", help="also shoot for L^(1) when d >= 2")
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("ground-state", parents=[common], help="radial ground state by shooting")
    s.add_argument("--dim", type=int, default=1)
    s.add_argument("--p", type=float, default=3.0)
    s.add_argument("--residual-tol", type=float, default=1e-6)
    s.add_argument("--profile", metavar="CSV", help="write r,Q samples to this file")
    s.set_defaults(func=cmd_ground_state)

    s = sub.add_parser("rumin", parents=[common], help="Rumin functional I_d and the constant chain")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--published-trial", "--paper-trial", dest="published_trial", action="store_true",
                   help="the published trial pair (default)")
    g.add_argument("--params", type=float, nargs=4, metavar=("A", "B", "ALPHA", "BETA"))
    g.add_argument("--trial-json", metavar="PATH")
    s.add_argument("--dim", type=int, default=1)
    s.add_argument("--optimize", action="store_true")
    s.add_argument("--budget", type=int, default=40)
    s.set_defaults(func=cmd_rumin)

    def grid(sp, extent=20.0, step=0.01, levels=2):
        sp.add_argument("--extent", type=float, default=extent, help="box half-width X (radius for radial)")
        sp.add_argument("--step", type=float, default=step)
        sp.add_argument("--levels", type=int, default=levels, help="Richardson levels")

    s = sub.add_parser("spectrum", parents=[common], help="negative eigenvalues of -Delta + V")
    s.add_argument("--potential", required=True, help="e.g. 'poschl_teller nu=2'")
    grid(s)
    s.add_argument("--hbar", type=float, default=1.0)
    s.add_argument("--ell-max", type=int, default=200)
    s.add_argument("--gammas", type=float, nargs="+")
    s.add_argument("--slack", type=float, default=5e-3)
    s.add_argument("--conjecture", action="store_true", help="compare with conjectured constants")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("weyl", parents=[common], help="strong-coupling convergence to L^cl")
    s.add_argument("--potential", default="gaussian")
    s.add_argument("--gamma", type=float, default=1.0)
    s.add_argument("--couplings", type=float, nargs="+", default=[10, 100, 1000, 10000])
    s.add_argument("--extent", type=float, default=None)
    s.add_argument("--step", type=float, default=None)
    s.add_argument("--levels", type=int, default=2)
    s.set_defaults(func=cmd_weyl)

    s = sub.add_parser("monotonicity", parents=[common], help="semiclassical monotonicity for |x|^2 - 1")
    s.add_argument("--dim", type=int, default=1)
    s.add_argument("--gamma", type=float, default=2.0)
    s.add_argument("--hbar-min", type=float, default=1e-3)
    s.add_argument("--hbar-max", type=float, default=1.0)
    s.add_argument("--points", type=int, default=1000)
    s.set_defaults(func=cmd_monotonicity)

    s = sub.add_parser("two-bump", parents=[common], help="two separated one-bump optimizers")
    s.add_argument("--gamma", type=float, default=2.0)
    s.add_argument("--R", type=float, nargs="+", default=[4, 6, 8, 10, 12, 14, 16])
    s.add_argument("--step", type=float, default=0.04)
    s.add_argument("--levels", type=int, default=4)
    s.set_defaults(func=cmd_two_bump)

    s = sub.add_parser("sphere", parents=[common], help="eigenvalue counts on S^d and a_L")
    s.add_argument("--dim", type=int, default=3)
    s.add_argument("--L-max", type=int, default=10)
    s.set_defaults(func=cmd_sphere)

    s = sub.add_parser("stability", parents=[common], help="stability-of-matter bound")
    s.add_argument("--z", type=float, default=1.0, help="maximal nuclear charge")
    s.add_argument("--nuclei", type=int, default=1)
    s.add_argument("--electrons", type=int, default=1)
    s.add_argument("--conjectured-k3", action="store_true")
    s.set_defaults(func=cmd_stability)

    s = sub.add_parser("gamma-c", parents=[common], help="crossing exponent of L^(1) and L^cl")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--xtol", type=float, default=1e-6)
    s.set_defaults(func=cmd_gamma_c)

    s = sub.add_parser("verify-all", parents=[common], help="recompute every reference number")
    s.add_argument("--criteria", type=_int_list, default=None, help="comma-separated criterion numbers")
    s.add_argument("--tol", type=_kv, action="append", default=[], metavar="NAME=VALUE",
                   help="override a named tolerance")
    s.set_defaults(func=cmd_verify_all)
    return p


def _config(args):
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "format", "command")}
    if "tol" in cfg:
        cfg["tol"] = dict(cfg["tol"])
    return _clean(cfg)


def run(argv=None, stdout=None):
    """Execute one command; returns the exit code."""
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except UsageError:
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if not exc.code else EXIT_USAGE
    if hasattr(args, "tol"):
        args.tol = dict(args.tol)
    args.config = _config(args)
    try:
        out = args.func(args)
    except (DomainError, SolverError, AccuracyError, OSError) as exc:
        sys.stderr.write(f"ltlab {args.command}: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR
    if args.command == "verify-all":
        stdout.write(emit_report(out, args.format, args.config))
        return EXIT_OK if all(r.passed for r in out) else EXIT_FAILED
    stdout.write(render(out, args.format))
    return EXIT_FAILED if out.get("passed") is False else EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
