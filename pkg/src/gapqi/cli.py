"""Command-line front end.

Every command loads a model file, runs one library pipeline and prints a
JSON report.  Exit codes: 0 when every verdict holds (or a construction
succeeded), 1 when a verdict is false (or a construction could not be
completed), 2 for usage and model-file errors.
"""

from __future__ import annotations

import argparse
import contextlib
import sys

import numpy as np

from .errors import (BadLevels, CocycleMismatch, EmptyWinf, EmptyWn, GapAxiomError,
                     GapQIError, MissingPotentialValue, ModelError, NoConvergence,
                     NotInvariantK, UnresolvedZeta, ZeroMass)
from .gap import decompose_class, validate_gap
from .modelfile import load_model
from .operators import (FINITE, INFINITE, UNKNOWN, LevelOperator, export_matrix,
                        level_sets)
from .potential import build_cocycle, validate_potential
from .qi import (DEFAULT_TOL, check_charac_dlr, check_conformal, check_main_for_q,
                 check_main_result, construct_qi_on_winf, construct_qi_on_wn)
from .reports import dumps
from .ruelle import TransferOperator, solve_eigenmeasure, verify_eigen_dlr

COMMANDS = ("validate", "classes", "zeta", "decompose", "verify-qi", "verify-dlr",
            "verify-conformal", "construct-qi", "ruelle-eigen", "export-matrix")
_STATUS = {FINITE: "finite", INFINITE: "infinite", UNKNOWN: "unknown"}


class UsageError(Exception):
    pass


def build_parser():
    ap = argparse.ArgumentParser(
        prog="gapqi", description="Verify and build quasi-invariant measures on finite "
        "partial-map models; prints a JSON report.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--model", required=True, metavar="PATH")
    ap.add_argument("--depth", type=int, help="truncation depth (default: the model's)")
    ap.add_argument("--tol", type=float, default=DEFAULT_TOL)
    ap.add_argument("--max-iter", type=int, default=100_000)
    ap.add_argument("--budget", type=int, help="class-enumeration budget for zeta")
    ap.add_argument("--measure", metavar="NAME", help="named measure from the model")
    ap.add_argument("--level", type=int)
    ap.add_argument("--seed", metavar="NAME", help="named measure used as a seed/start")
    ap.add_argument("--output", metavar="PATH", help="write the report here instead of stdout")
    ap.add_argument("--point", help="point id (decompose)")
    ap.add_argument("--fine-level", type=int, help="finer level n <= --level (decompose)")
    ap.add_argument("--operator", default="Q",
                    choices=("F", "E_rho", "Q", "P", "L", "L_rho", "alpha"),
                    help="operator for export-matrix")
    ap.add_argument("--shift", type=float, default=0.0,
                    help="power-iteration shift (ruelle-eigen)")
    return ap


def _need(args, name):
    val = getattr(args, name)
    if val is None:
        raise UsageError(f"{args.command} needs --{name.replace('_', '-')}")
    return val


def _setup(mf, args):
    depth = mf.depth if args.depth is None else args.depth
    if depth < 0:
        raise UsageError("--depth must be nonnegative")
    g, p, ct, zp = mf.build(depth, args.budget)
    return depth, g, p, ct, zp


def _level(args, g):
    n = _need(args, "level")
    if not 0 <= n <= g.depth:
        raise UsageError(f"--level must be between 0 and {g.depth}")
    return n


def cmd_validate(mf, args):
    depth = mf.depth if args.depth is None else args.depth
    g = mf.gap(depth)
    rep_g = validate_gap(g)
    out = {"gap": rep_g.to_dict()}
    ok = rep_g.ok
    try:
        p = mf.potential(g)
        rep_p = validate_potential(g, p)
        out["potential"] = rep_p.to_dict()
        ok &= rep_p.ok
        build_cocycle(g, p)
        out["cocycle"] = {"verdict": True}
    except CocycleMismatch as exc:
        out["cocycle"] = {"verdict": False, "witness": exc.witness, "message": str(exc)}
        ok = False
    except MissingPotentialValue as exc:
        out["cocycle"] = {"verdict": False, "message": str(exc)}
        ok = False
    return ok, out


def cmd_classes(mf, args):
    depth, g, *_ = _setup(mf, args)
    levels = [args.level] if args.level is not None else range(g.depth + 1)
    out = {}
    for n in levels:
        if not 0 <= n <= g.depth:
            raise UsageError(f"--level must be between 0 and {g.depth}")
        out[str(n)] = [[g.points[i] for i in cls] for cls in g.classes(n)]
    return True, {"depth": g.depth, "classes": out}


def cmd_zeta(mf, args):
    depth, g, p, ct, zp = _setup(mf, args)
    levels = [_level(args, g)] if args.level is not None else range(g.depth + 1)
    out = {}
    for n in levels:
        table = {}
        for i in np.flatnonzero(g.mask(n)):
            z = zp.at(n, i)
            table[g.points[i]] = {"status": _STATUS[z.status], "value": z.value}
        out[str(n)] = table
    return True, {"zeta": out, "resolved": zp.resolved, "budget": args.budget}


def cmd_decompose(mf, args):
    depth, g, *_ = _setup(mf, args)
    m = _level(args, g)
    n = _need(args, "fine_level")
    x = mf.model.idx(_need(args, "point"))
    if not g.mask(m)[x]:
        raise UsageError(f"point {g.points[x]!r} is not in U_{m}")
    blocks = decompose_class(g, n, m, x)
    return True, {"level": m, "fine_level": n, "point": g.points[x],
                  "blocks": [{"representative": g.points[r],
                              "members": [g.points[i] for i in b]} for r, b in blocks]}


def _measure(mf, args, flag="measure"):
    return mf.measure(_need(args, flag))


def cmd_verify_qi(mf, args):
    depth, g, p, ct, zp = _setup(mf, args)
    ls = level_sets(zp, g, ct)
    mu = _measure(mf, args)
    if args.level is not None:
        rep = check_main_result(g, ct, ls, mu, _level(args, g), args.tol)
    else:
        rep = check_main_for_q(g, ct, ls, mu, g.depth, args.tol)
    return rep.verdict, rep.to_dict()


def cmd_verify_dlr(mf, args):
    depth, g, p, ct, zp = _setup(mf, args)
    ls = level_sets(zp, g, ct)
    rep = check_charac_dlr(g, ct, ls, _measure(mf, args), g.depth, args.tol)
    return rep.verdict, rep.to_dict()


def cmd_verify_conformal(mf, args):
    if mf.explicit_gap is not None:
        raise UsageError("verify-conformal needs a sigma-derived model")
    depth, g, p, ct, zp = _setup(mf, args)
    ls = level_sets(zp, g, ct)
    rep = check_conformal(mf.model, mf.h, _measure(mf, args), depth, ls, args.tol)
    return rep.verdict, rep.to_dict()


def cmd_construct_qi(mf, args):
    depth, g, p, ct, zp = _setup(mf, args)
    ls = level_sets(zp, g, ct)
    seed = mf.measure(args.seed) if args.seed is not None else None
    target = "W_inf" if args.level is None else f"W_{args.level}"
    out = {"target": target}
    if args.level is None:
        out["assumed"] = ["zeta_n^-1 is continuous on W_inf (automatic on a finite model)"]
    try:
        if args.level is None:
            mu = construct_qi_on_winf(g, ct, ls, seed, args.tol, depth)
        else:
            mu = construct_qi_on_wn(g, ct, ls, args.level, seed, depth)
    except (EmptyWn, EmptyWinf, NotInvariantK, ZeroMass) as exc:
        out.update(error=type(exc).__name__, message=str(exc))
        return False, out
    except NoConvergence as exc:
        partial, distances = exc.result
        out.update(error="NoConvergence", message=str(exc),
                   partial=partial.as_dict(mf.model), distances=distances)
        return False, out
    check = check_main_for_q(g, ct, ls, mu, depth, args.tol)
    out.update(measure=mu.as_dict(mf.model), main_for_q=check.to_dict())
    return check.verdict, out


def cmd_ruelle_eigen(mf, args):
    if mf.explicit_gap is not None:
        raise UsageError("ruelle-eigen needs a sigma-derived model")
    depth = mf.depth if args.depth is None else args.depth
    g, p, ct, zp = mf.build(max(depth, 1), args.budget)
    start = mf.measure(args.seed) if args.seed is not None else None
    try:
        res = solve_eigenmeasure(mf.model, ct, start, args.tol, args.max_iter, args.shift)
    except NoConvergence as exc:
        return False, {"error": "NoConvergence", "message": str(exc),
                       "partial": exc.result.to_dict(mf.model)}
    out = {"eigen": res.to_dict(mf.model)}
    ok = res.residual <= 10 * args.tol * max(res.lam, 1.0)
    if res.lam > 0:
        rep = verify_eigen_dlr(mf.model, ct, g, res.mu, res.lam, g.depth,
                               max(10 * args.tol, 1e-8))
        out["eigen_dlr"] = rep.to_dict()
        ok &= rep.verdict
    return ok, out


def cmd_export_matrix(mf, args):
    depth, g, p, ct, zp = _setup(mf, args)
    n = _level(args, g)
    kind = args.operator
    if kind in ("L", "L_rho", "alpha"):
        T = TransferOperator(kind, n, mf.model, ct)
    else:
        ls = level_sets(zp, g, ct) if kind in ("Q", "P") else None
        T = LevelOperator(kind, n, g, ct, ls)
    return True, export_matrix(T, mf.model.points)


HANDLERS = {
    "validate": cmd_validate, "classes": cmd_classes, "zeta": cmd_zeta,
    "decompose": cmd_decompose, "verify-qi": cmd_verify_qi,
    "verify-dlr": cmd_verify_dlr, "verify-conformal": cmd_verify_conformal,
    "construct-qi": cmd_construct_qi, "ruelle-eigen": cmd_ruelle_eigen,
    "export-matrix": cmd_export_matrix,
}


def run_command(argv=None, stdout=None, stderr=None) -> int:
    """Run one command; returns the exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(stderr), contextlib.redirect_stdout(stdout):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        mf = load_model(args.model)
        ok, body = HANDLERS[args.command](mf, args)
    except (UsageError, ModelError, BadLevels, GapAxiomError, UnresolvedZeta,
            MissingPotentialValue, CocycleMismatch) as exc:
        print(f"gapqi {args.command}: {exc}", file=stderr)
        return 2
    except GapQIError as exc:
        print(f"gapqi {args.command}: {type(exc).__name__}: {exc}", file=stderr)
        return 2
    report = {"command": args.command, "model": args.model, "ok": ok,
              "tolerance": args.tol, "result": body}
    text = dumps(report)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return 0 if ok else 1


def main(argv=None):
    sys.exit(run_command(argv))


if __name__ == "__main__":
    main()
