"""Command-line interface: data files for convergence maps, sweeps and roots.

Every output file starts with a header recording the tool version, a hash
of the effective configuration and the command line, so results can be
traced and reproduced.  CSV headers are ``#`` comment lines; JSON output
wraps rows as ``{"meta": ..., "rows": [...]}``.

Exit codes: 0 success, 2 usage error, 3 numerical or domain failure.
Failures are reported on stderr as a single JSON object.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import shlex
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from iwkinetic import __version__
from iwkinetic.catalog import COLUMNS as CATALOG_COLUMNS
from iwkinetic.catalog import catalog_rows, load_observations
from iwkinetic.convergence import classify_grid
from iwkinetic.coriolis import CORNER_CONFIG, corner_integral, id_stationary_lines, ke6_prefactor, ke6_value
from iwkinetic.quadrature import QuadratureConfig, QuadratureError, collision_integral, find_steady_a
from iwkinetic.spectral import DomainError, Exponents, PhysicalParams, map_km_to_omega_m

CONFIG_ENV = "IWKINETIC_CONFIG"
EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --- option parsing -----------------------------------------------------------

def parse_range(text: str, n: int | None = None, log: bool = False) -> np.ndarray:
    """``lo:hi:step`` (inclusive of ``hi`` up to rounding) or ``lo:hi`` with ``n``.

    With ``log`` the ``lo:hi`` form is spaced geometrically.
    """
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"bad range {text!r}") from None
    if len(nums) == 1:
        return np.array(nums)
    if len(nums) == 3:
        lo, hi, step = nums
        if step <= 0 or hi < lo:
            raise UsageError(f"bad range {text!r}")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return np.round(lo + step * np.arange(count), 12)
    if len(nums) == 2:
        lo, hi = nums
        if hi < lo or (log and lo <= 0):
            raise UsageError(f"bad range {text!r}")
        return (np.geomspace if log else np.linspace)(lo, hi, n or 51)
    raise UsageError(f"bad range {text!r}")


def _grid_spec(items, n):
    axes = {}
    for item in items:
        key, _, rng = item.partition("=")
        if key not in ("a", "b") or not rng:
            raise UsageError(f"grid axes look like a=0:6 b=-4:4, got {item!r}")
        axes[key] = parse_range(rng, n)
    if set(axes) != {"a", "b"}:
        raise UsageError("grid needs both a= and b= axes")
    return axes["a"], axes["b"]


def load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return data


def effective_config(args) -> tuple[PhysicalParams, QuadratureConfig, dict]:
    data = load_config(args.config or os.environ.get(CONFIG_ENV))
    for key in ("rel_tol", "ir_cut", "uv_cut"):
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    if args.command == "corners" and "rel_tol" not in data:
        data["rel_tol"] = CORNER_CONFIG.rel_tol
    try:
        params = PhysicalParams.from_dict(data)
        cfg = QuadratureConfig.from_dict(data)
    except (DomainError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid configuration: {exc}") from None
    merged = {**params.to_dict(), **cfg.to_dict()}
    return params, cfg, merged


def config_hash(merged: dict) -> str:
    text = json.dumps(merged, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


# --- output -------------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render(rows, columns, fmt, meta) -> str:
    if fmt == "json":
        clean = [{c: (float(r[c]) if isinstance(r.get(c), np.floating) else
                      bool(r[c]) if isinstance(r.get(c), np.bool_) else r.get(c))
                  for c in columns} for r in rows]
        return json.dumps({"meta": meta, "rows": clean}, indent=2,
                          allow_nan=True) + "\n"
    buf = io.StringIO()
    for key in ("tool", "config_hash", "command"):
        buf.write(f"# {key}: {meta[key]}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- subcommands ----------------------------------------------------------------

def _integrate_row(job):
    a, b, cfg, params = job
    row = {"a": a, "b": b, "ir_cut": cfg.ir_cut, "uv_cut": cfg.uv_cut}
    try:
        r = collision_integral(Exponents(a, b), cfg, params=params)
    except DomainError as exc:
        row.update(value=None, error=None, converged=False, status=f"skipped: {exc}")
        return row
    row.update(value=r.value, error=r.error_estimate, converged=r.converged,
               status="ok" if r.converged else "tolerance not reached")
    return row


INTEGRATE_COLUMNS = ("a", "b", "value", "error", "ir_cut", "uv_cut", "converged", "status")


def _map(fn, jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))  # map keeps input order


def cmd_classify(args, params, cfg):
    if args.grid:
        a_vals, b_vals = _grid_spec(args.grid, args.n)
    elif args.a is not None and args.b is not None:
        a_vals, b_vals = [args.a], [args.b]
    else:
        raise UsageError("classify needs --a and --b, or --grid")
    rows = classify_grid(a_vals, b_vals)
    cols = ("a", "b", "ir_status", "ir_sign", "uv_status", "uv_sign",
            "ir_mechanism", "uv_mechanism")
    return rows, cols


def cmd_integrate(args, params, cfg):
    row = _integrate_row((args.a, args.b, cfg, params))
    if row["status"].startswith("skipped"):
        raise DomainError(row["status"][len("skipped: "):])
    return [row], INTEGRATE_COLUMNS


def cmd_sweep(args, params, cfg):
    a_vals = parse_range(args.a, args.n)
    b_vals = parse_range(args.b, args.n)
    jobs = [(float(a), float(b), cfg, params) for b in b_vals for a in a_vals]
    return _map(_integrate_row, jobs, args.workers), INTEGRATE_COLUMNS


def cmd_root(args, params, cfg):
    lo, hi = parse_range(args.bracket)[[0, -1]] if ":" in args.bracket else (None, None)
    if lo is None or not hi > lo:
        raise UsageError("--bracket must look like 3.5:4.0")
    a_star = find_steady_a(args.b, (lo, hi), cfg)
    return [{"b": args.b, "bracket_lo": lo, "bracket_hi": hi, "a_star": a_star,
             "xtol": 5e-3}], ("b", "bracket_lo", "bracket_hi", "a_star", "xtol")


def cmd_idlines(args, params, cfg):
    rows = id_stationary_lines(parse_range(args.a, args.n))
    rows.sort(key=lambda r: (r["line"] != "b=0", r["a"]))
    return rows, ("line", "a", "b", "prefactor")


def cmd_corners(args, params, cfg):
    f_vals = parse_range(args.f, args.n, log=True)
    rows = []
    for f in f_vals:
        o = map_km_to_omega_m(Exponents(args.a, args.b))
        r = corner_integral(o, args.omega, args.m, float(f), args.omega_s, cfg,
                            params.c0, params.vertex_prefactor)
        rows.append({"a": args.a, "b": args.b, "f": float(f), "omega_s": args.omega_s,
                     "corner": r.value, "error": r.error_estimate,
                     "converged": r.converged, "prefactor": ke6_prefactor(o),
                     "ke6": ke6_value(o, float(f), args.omega_s, args.omega, args.m)})
    return rows, ("a", "b", "f", "omega_s", "corner", "error", "converged",
                  "prefactor", "ke6")


def cmd_catalog(args, params, cfg):
    obs = load_observations(args.catalog_file) if args.catalog_file else None
    return catalog_rows(obs), CATALOG_COLUMNS


COMMANDS = {"classify": cmd_classify, "integrate": cmd_integrate, "sweep": cmd_sweep,
            "root": cmd_root, "idlines": cmd_idlines, "corners": cmd_corners,
            "catalog": cmd_catalog}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help=f"JSON config (default: ${CONFIG_ENV})")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common.add_argument("--rel-tol", dest="rel_tol", type=float)
    common.add_argument("--ir-cut", dest="ir_cut", type=float)
    common.add_argument("--uv-cut", dest="uv_cut", type=float)

    p = _Parser(prog="iwkinetic", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"iwkinetic {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("classify", parents=[common], help="IR/UV verdicts")
    s.add_argument("--a", type=float)
    s.add_argument("--b", type=float)
    s.add_argument("--grid", nargs=2, metavar="AXIS=LO:HI")
    s.add_argument("--n", type=int, default=51, help="points per grid axis")

    s = sub.add_parser("integrate", parents=[common], help="C(a, b) at k = m = 1")
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--b", type=float, required=True)

    s = sub.add_parser("sweep", parents=[common], help="C along a line or grid")
    s.add_argument("--a", required=True, help="value or range lo:hi[:step]")
    s.add_argument("--b", required=True, help="value or range lo:hi[:step]")
    s.add_argument("--n", type=int, default=31)

    s = sub.add_parser("root", parents=[common], help="a* with C(a*, b) = 0")
    s.add_argument("--b", type=float, default=0.0)
    s.add_argument("--bracket", default="3.5:4.0")

    s = sub.add_parser("idlines", parents=[common], help="ID stationary lines")
    s.add_argument("--a", default="2.5:5.0")
    s.add_argument("--n", type=int, default=51)

    s = sub.add_parser("corners", parents=[common], help="near-inertial corner diagnostics")
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--b", type=float, required=True)
    s.add_argument("--f", default="1e-3",
                   help="value or range lo:hi (log-spaced with --n points)")
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--omega-s", dest="omega_s", type=float, default=0.05)
    s.add_argument("--omega", type=float, default=1.0)
    s.add_argument("--m", type=float, default=1.0)

    s = sub.add_parser("catalog", parents=[common], help="observational catalog")
    s.add_argument("--catalog-file", dest="catalog_file",
                   help="JSON observations to use instead of the built-in list")
    return p


def _fail(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": str(message)}) + "\n")
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        if args.workers < 1:
            raise UsageError("--workers must be >= 1")
        params, cfg, merged = effective_config(args)
        rows, cols = COMMANDS[args.command](args, params, cfg)
    except UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    except (DomainError, QuadratureError, ValueError, OSError) as exc:
        return _fail(type(exc).__name__, exc, EXIT_FAILURE)
    meta = {"tool": f"iwkinetic {__version__}", "config_hash": config_hash(merged),
            "command": shlex.join(["iwkinetic", *argv]), "config": merged}
    try:
        emit(render(rows, cols, args.format, meta), args.out)
    except OSError as exc:
        return _fail(type(exc).__name__, exc, EXIT_FAILURE)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
