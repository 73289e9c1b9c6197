"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 a checked assertion failed,
3 a verdict was inconclusive.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import LebesgueKitError, SpecFormatError
from .experiments import (
    embedding_chain_check,
    extremal_pointwise_family,
    frs_equality_example,
    frs_inequality_check,
    pointwise_bound_check,
    reproduce_no_rearrange,
    reproduce_no_var_small,
)
from .exponents import ConditionKind, ConditionParams, check_condition, condition_margins, exponent_from_spec
from .funcrep import FunctionSpec, function_from_spec, t_of_u, u_of_t
from .norms import (
    GrandParams,
    MusielakParams,
    grand_norm_def,
    grand_norm_rearr,
    lp_norm,
    luxemburg_norm,
    musielak_modular,
    musielak_norm,
    small_norm,
    variable_modular,
)
from .quadrature import DEFAULT_TOL
from .rearrange import decreasing_rearrangement

EXIT_OK, EXIT_USAGE, EXIT_FAILED, EXIT_INCONCLUSIVE = 0, 1, 2, 3
TOL_ENV = "LEBESGUEKIT_TOL"
SPACES = ("lp", "modular", "luxemburg", "grand", "grand-rearr", "small", "musielak-modular", "musielak")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- serialization -------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(x, ".17g")


def dumps17(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits; non-finite floats become null."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps17(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.floating, np.integer, bool, type(None))) for v in obj):
            return "[" + ", ".join(dumps17(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps17(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return _fmt(x) if math.isfinite(x) else "null"
    if isinstance(obj, np.ndarray):
        return dumps17(obj.tolist(), indent, _level)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return json.dumps(obj.value)
    return json.dumps(str(obj))


def _csv_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        x = float(v)
        return _fmt(x) if math.isfinite(x) else ("inf" if x > 0 else ("-inf" if x < 0 else "nan"))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    s = str(v)
    return '"' + s.replace('"', '""') + '"' if any(c in s for c in ',"\n') else s


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(_csv_cell(x) for x in r) + "\n")
    return buf.getvalue()


# -- spec parsing --------------------------------------------------------------

def _load_spec(text: str, what: str):
    if text is None:
        raise UsageError(f"missing --{what}")
    s = text.strip()
    if not (s.startswith("{") or s.startswith("[")):
        try:
            return float(s)
        except ValueError:
            pass
        path = Path(s[1:] if s.startswith("@") else s)
        try:
            s = path.read_text()
        except OSError as exc:
            raise SpecFormatError(f"cannot read {what} spec file {str(path)!r}: {exc.strerror}", field=what) from exc
    try:
        return json.loads(s)
    except json.JSONDecodeError as exc:
        raise SpecFormatError(f"{what} spec is not valid JSON: {exc.msg}", field=what) from exc


def _function(text, what="function") -> FunctionSpec:
    spec = _load_spec(text, what)
    if isinstance(spec, float):
        return function_from_spec({"kind": "step", "breaks": [0.0, 1.0], "values": [spec]})
    if not isinstance(spec, dict):
        raise SpecFormatError(f"{what} spec must be an object", field=what)
    return function_from_spec(spec)


def _exponent(args):
    if args.exponent is not None:
        return exponent_from_spec(_load_spec(args.exponent, "exponent"))
    if args.p is not None:
        return exponent_from_spec(float(args.p))
    raise UsageError("give --p or --exponent")


def _sigma(text):
    if text is None:
        return 0.0
    spec = _load_spec(text, "sigma")
    if isinstance(spec, float):
        return spec
    sig = function_from_spec(spec)
    return sig


def _floats(text: str):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc


# -- commands ------------------------------------------------------------------

def _norm_table(res, space):
    unit = "[-]" if "modular" in space else "[f]"
    cols = ["space", f"value {unit}", "infinite [bool]", f"error_estimate {unit}"]
    return cols, [[space, None if res.infinite else res.value, res.infinite, res.error_estimate]]


def cmd_norm(args, tol):
    f = _function(args.function)
    space = args.space
    if space == "lp":
        if args.p is None:
            raise UsageError("--space lp needs --p")
        res = lp_norm(f, float(args.p), tol)
    elif space in ("grand", "grand-rearr", "small"):
        if args.p is None or args.theta is None:
            raise UsageError(f"--space {space} needs --p and --theta")
        gp = GrandParams(float(args.p), float(args.theta))
        res = {"grand": grand_norm_def, "grand-rearr": grand_norm_rearr, "small": small_norm}[space](f, gp, tol=tol)
    elif space in ("modular", "luxemburg"):
        p = _exponent(args)
        res = variable_modular(f, p, args.lam, tol) if space == "modular" else luxemburg_norm(f, p, tol)
    else:
        mp = MusielakParams(_exponent(args), _sigma(args.sigma))
        res = musielak_modular(f, mp, args.lam, tol) if space == "musielak-modular" else musielak_norm(f, mp, tol)
    out = {"space": space, "function": f.to_dict(), **res.to_dict()}
    plot = None
    if args.plot_data:
        u = np.linspace(1.0, 30.0, 200)
        plot = {"x_label": "t [-]", "y_label": "f(t) [f]", "x": t_of_u(u).tolist(), "y": f.value_u(u).tolist()}
    return out, _norm_table(res, space), plot, EXIT_OK


def cmd_rearrange(args, tol):
    f = _function(args.function)
    fs = decreasing_rearrangement(f)
    u = np.linspace(1.0, 1.0 + args.depth, args.points)
    t = t_of_u(u)
    vals = fs.value_u(u)
    out = {"function": f.to_dict(), "rearranged": fs.to_dict(), "monotonicity": fs.monotonicity,
           "samples": {"t": t.tolist(), "value": vals.tolist()}}
    cols = ["t [-]", "f_star [f]"]
    rows = [[a, b] for a, b in zip(t.tolist(), vals.tolist())]
    plot = {"x_label": "t [-]", "y_label": "f_star(t) [f]", "x": t.tolist(), "y": vals.tolist()} if args.plot_data else None
    return out, (cols, rows), plot, EXIT_OK


def _condition_params(args, theta=None, eps=None):
    return ConditionParams(
        theta=args.theta if theta is None else theta,
        eps=args.eps if eps is None else eps,
        A=args.A, B=args.B,
        sigma=None if args.sigma is None else _sigma(args.sigma),
        t0=args.t0,
    )


def cmd_check(args, tol):
    p = _exponent(args)
    params = _condition_params(args)
    kind = ConditionKind(args.kind)
    rep = check_condition(p, kind, params)
    out = {"exponent": p.to_dict(), **rep.to_dict()}
    cols = ["kind", "holds [bool]", "worst_margin [-]", "witness_t [-]", "witness_u [-]", "grid_size [points]"]
    rows = [[kind.value, rep.holds, rep.worst_margin, rep.witness_t, rep.witness_u, rep.grid_size]]
    plot = None
    if args.plot_data:
        u = np.linspace(u_of_t(params.t0), 1.0 - math.log(1e-12), 256)
        m = condition_margins(p, kind, params, u)
        plot = {"x_label": "t [-]", "y_label": "margin [-]", "x": t_of_u(u).tolist(), "y": m.tolist()}
    return out, (cols, rows), plot, EXIT_OK if rep.holds else EXIT_FAILED


def _checks_table(checks):
    return ["check", "passed [bool]"], [[k, bool(v.get("passed"))] for k, v in checks.items()]


def cmd_reproduce(args, tol):
    which = args.which
    plot = None
    if which == "no-var-small":
        levels = [int(x) for x in _floats(args.levels)] if args.levels else None
        kw = {"levels": levels} if levels else {}
        rep = reproduce_no_var_small(args.b, args.theta, tol=tol, **kw)
        out = rep.to_dict()
        code = EXIT_INCONCLUSIVE if rep.inconclusive else (EXIT_OK if rep.passed else EXIT_FAILED)
        if args.plot_data:
            plot = {"x_label": "J [cells]", "y_label": "small norm truncation [f]",
                    "x": [float(x) for x in rep.verdicts["small_norm"].levels], "y": rep.norms["small_norm_partial"]}
        return out, _checks_table(rep.checks), plot, code
    if which == "no-rearrange":
        rep = reproduce_no_rearrange(args.p0, args.theta, args.eps, tol=tol)
        out = rep.to_dict()
        code = EXIT_INCONCLUSIVE if rep.inconclusive else (EXIT_OK if rep.passed else EXIT_FAILED)
        if args.plot_data:
            r = rep.norms["ratio"]
            plot = {"x_label": "t [-]", "y_label": "grand ratio / loglog(e/t) [-]", "x": r["t"], "y": r["values"]}
        return out, _checks_table(rep.checks), plot, code
    if which == "frs":
        if args.corpus:
            spec = _load_spec(args.corpus, "corpus")
            if not isinstance(spec, list):
                raise SpecFormatError("corpus must be a list of {function, exponent} objects", field="corpus")
            corpus = []
            for i, item in enumerate(spec):
                if not isinstance(item, dict) or "function" not in item or "exponent" not in item:
                    raise SpecFormatError(f"corpus entry {i} needs 'function' and 'exponent'", field="corpus")
                corpus.append((function_from_spec(item["function"]), exponent_from_spec(item["exponent"])))
        else:
            corpus = [frs_equality_example()]
        rep = frs_inequality_check(corpus, tol)
        out = rep.to_dict()
        cols = ["index", "r1 [-]", "r2 [-]", "norm_p_star_up [f]", "norm_p [f]", "norm_p_star [f]"]
        rows = [[r["index"], r["r1"], r["r2"], r["norm_p_star_up"], r["norm_p"], r["norm_p_star"]] for r in rep.rows]
        return out, (cols, rows), None, EXIT_OK
    if which == "chain":
        f = _function(args.function)
        eps = _floats(args.eps_grid) if args.eps_grid else None
        rep = embedding_chain_check(f, args.p, args.theta, eps, tol)
        cols = ["eps [-]", "lp_norm [f]", "bound [f]", "ok [bool]"]
        rows = [[r["eps"], r["lp"], r["bound"], r["ok"]] for r in rep["rows"]]
        if args.plot_data:
            plot = {"x_label": "eps [-]", "y_label": "lp norm [f]", "x": [r["eps"] for r in rep["rows"]],
                    "y": [r["lp"] for r in rep["rows"]]}
        return rep, (cols, rows), plot, EXIT_OK if rep["passed"] else EXIT_FAILED
    if which == "pointwise-bound":
        sigma = _sigma(args.sigma)
        if args.function is not None:
            u = _function(args.function)
            p = _exponent(args)
        else:
            u, p = extremal_pointwise_family(args.p0, args.theta, args.A, sigma)
        rep = pointwise_bound_check(u, p, sigma, args.theta, args.A, args.B, tol=tol)
        ok = rep["C_stable"] and rep["chain_finite"] and rep["log_term_exponent_nonpositive"]
        cols = ["quantity", "value [-]"]
        rows = [["C", rep["C"]], ["C_doubled_grid", rep["C_doubled_grid"]], ["chain_constant", rep["chain_constant"]],
                ["grand_finite", rep["grand_finite"]]]
        return rep, (cols, rows), None, EXIT_OK if ok else EXIT_FAILED
    raise UsageError(f"unknown reproduction {which!r}")


def cmd_sweep(args, tol):
    p = _exponent(args)
    kind = ConditionKind(args.kind)
    thetas = _floats(args.theta_grid) if args.theta_grid else [args.theta]
    epss = _floats(args.eps_grid) if args.eps_grid else [args.eps]
    rows = []
    for th in thetas:
        for e in epss:
            rep = check_condition(p, kind, _condition_params(args, theta=th, eps=e))
            rows.append({"theta": th, "eps": e, "holds": rep.holds, "worst_margin": rep.worst_margin,
                         "witness_t": rep.witness_t})
    out = {"kind": kind.value, "exponent": p.to_dict(), "rows": rows}
    cols = ["theta [-]", "eps [-]", "holds [bool]", "worst_margin [-]", "witness_t [-]"]
    table = [[r["theta"], r["eps"], r["holds"], r["worst_margin"], r["witness_t"]] for r in rows]
    return out, (cols, table), None, EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    def make_common(suppress: bool):
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        c = _Parser(add_help=False)
        c.add_argument("--tol", type=float, default=d(None), help=f"absolute tolerance (default ${TOL_ENV} or 1e-9)")
        c.add_argument("--out", default=d(None), help="output file (default stdout)")
        c.add_argument("--format", choices=("json", "csv"), default=d("json"))
        c.add_argument("--plot-data", action="store_true", default=d(False), help="include (x, y) columns for plotting")
        return c

    # global flags may come before or after the command; the subcommand copies must not reset them
    top, common = make_common(False), make_common(True)
    ap = _Parser(prog="lebesguekit", description="Norms, rearrangements and embedding checks on (0, 1].",
                 parents=[top])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    def exp_args(sp):
        sp.add_argument("--p", type=float, default=None, help="constant exponent")
        sp.add_argument("--exponent", default=None, help="exponent spec (inline JSON or file)")

    n = sub.add_parser("norm", parents=[common], help="compute a norm or modular")
    n.add_argument("--space", choices=SPACES, required=True)
    n.add_argument("--function", required=True, help="function spec (inline JSON, file, or a constant)")
    exp_args(n)
    n.add_argument("--theta", type=float, default=None)
    n.add_argument("--lambda", dest="lam", type=float, default=1.0)
    n.add_argument("--sigma", default=None, help="sigma_* spec or constant (Musielak spaces)")

    r = sub.add_parser("rearrange", parents=[common], help="decreasing rearrangement")
    r.add_argument("--function", required=True)
    r.add_argument("--points", type=int, default=64)
    r.add_argument("--depth", type=float, default=20.0, help="sample t down to e^{-depth}")

    c = sub.add_parser("check", parents=[common], help="check an embedding condition")
    s = sub.add_parser("sweep", parents=[common], help="check a condition over a parameter grid")
    for sp in (c, s):
        sp.add_argument("--kind", choices=[k.value for k in ConditionKind], required=True)
        exp_args(sp)
        sp.add_argument("--theta", type=float, default=None)
        sp.add_argument("--eps", type=float, default=None)
        sp.add_argument("--A", type=float, default=None)
        sp.add_argument("--B", type=float, default=None)
        sp.add_argument("--sigma", default=None)
        sp.add_argument("--t0", type=float, default=math.exp(-2.0))
    s.add_argument("--theta-grid", default=None, help="comma-separated theta values")
    s.add_argument("--eps-grid", default=None, help="comma-separated eps values")

    rp = sub.add_parser("reproduce", parents=[common], help="run a reproduction")
    rp.add_argument("which", choices=("no-var-small", "no-rearrange", "frs", "chain", "pointwise-bound"))
    rp.add_argument("--b", type=float, default=1.5)
    rp.add_argument("--theta", type=float, default=1.0)
    rp.add_argument("--levels", default=None, help="comma-separated truncation levels")
    rp.add_argument("--p0", type=float, default=2.0)
    rp.add_argument("--eps", type=float, default=0.5)
    rp.add_argument("--corpus", default=None, help="JSON list of {function, exponent}")
    rp.add_argument("--function", default=None)
    exp_args(rp)
    rp.add_argument("--eps-grid", default=None)
    rp.add_argument("--A", type=float, default=0.5)
    rp.add_argument("--B", type=float, default=1.0)
    rp.add_argument("--sigma", default=None)
    return ap


COMMANDS = {"norm": cmd_norm, "rearrange": cmd_rearrange, "check": cmd_check, "reproduce": cmd_reproduce,
            "sweep": cmd_sweep}


def _tolerance(args) -> float:
    if args.tol is not None:
        tol = args.tol
    elif os.environ.get(TOL_ENV):
        try:
            tol = float(os.environ[TOL_ENV])
        except ValueError as exc:
            raise UsageError(f"{TOL_ENV} is not a number") from exc
    else:
        tol = DEFAULT_TOL
    if not tol > 0:
        raise UsageError("tolerance must be positive")
    return tol


def run(argv=None) -> int:
    """Parse ``argv``, run the command, write the report; returns the exit code."""
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
        tol = _tolerance(args)
        if args.command == "reproduce" and args.which == "chain" and (args.function is None or args.p is None):
            raise UsageError("reproduce chain needs --function and --p")
        result, table, plot, code = COMMANDS[args.command](args, tol)
    except UsageError as exc:
        print(f"lebesguekit: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpecFormatError as exc:
        field = f" (field {exc.field!r})" if getattr(exc, "field", None) else ""
        print(f"lebesguekit: bad spec{field}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LebesgueKitError as exc:
        print(f"lebesguekit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        doc = {"command": args.command if args.command != "reproduce" else f"reproduce {args.which}",
               "version": __version__, "tol": tol, "exit_code": code, "result": result}
        if plot is not None:
            doc["plot_data"] = plot
        text = dumps17(doc) + "\n"
    else:
        if plot is not None:
            cols = [plot["x_label"], plot["y_label"]]
            text = to_csv(cols, list(zip(plot["x"], plot["y"])))
        else:
            text = to_csv(*table)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
