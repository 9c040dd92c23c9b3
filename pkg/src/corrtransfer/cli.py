"""Command-line front end: analytic curves, simulations and sweeps as CSV.

Every command writes its CSV output(s) plus a JSON manifest holding the
resolved parameters; ``corrtransfer replay MANIFEST`` reruns the command from
that file and reproduces the CSVs byte for byte.

Exit codes: 0 success, 2 usage or configuration error, 3 degenerate
statistics or other numerical failure.
"""

from __future__ import annotations

import argparse
import ast
import csv
import json
import math
import operator
import sys
import time
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from . import longtime, montecarlo, shorttime
from .density import DegenerateDensityError, density_grid
from .montecarlo import ConfigError, DegenerateStatisticError, SimConfig
from .prc import PrcShape, delta
from .quadrature import TWO_PI, is_power_of_two

EXIT_USAGE = 2
EXIT_NUMERICAL = 3

DEFAULT_C_GRID = (0.2, 0.4, 0.6, 0.8, 0.99)

try:
    __version__ = version("corrtransfer")
except PackageNotFoundError:  # pragma: no cover - running from a source tree
    __version__ = "0.0.0"


class UsageError(Exception):
    pass


# --- value parsing -------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_real(text: str) -> float:
    """Parse a real number; ``pi`` and ``+ - * /`` are allowed (``pi/2``, ``2*pi``)."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(text)

    try:
        return float(ev(ast.parse(text.strip(), mode="eval")))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from None


def parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def parse_uint(text: str) -> int:
    try:
        v = int(text.strip(), 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text!r}")
    return v


CONFIG_KEYS = {
    "alpha": parse_real,
    "c": parse_real,
    "sigma": parse_real,
    "dt": parse_real,
    "burn_in": parse_real,
    "window_T": parse_real,
    "trials": parse_uint,
    "seed": parse_uint,
    "include_ito_drift": parse_bool,
    "burn_in_only": parse_bool,
}


def read_config(path) -> dict:
    """Read flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(key, f"unknown key (known: {', '.join(CONFIG_KEYS)})")
        try:
            out[key] = CONFIG_KEYS[key](value)
        except argparse.ArgumentTypeError as exc:
            raise ConfigError(key, str(exc)) from None
    return out


# --- output -------------------------------------------------------------------


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: Path, header, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def manifest_path(out: Path) -> Path:
    return out / "manifest.json" if out.suffix == "" else out.with_name(out.name + ".manifest.json")


def write_manifest(command: str, params: dict, out: Path, outputs, seconds: float) -> Path:
    path = manifest_path(out)
    doc = {
        "command": command,
        "parameters": params,
        "seed": params.get("seed"),
        "version": __version__,
        "out": str(out),
        "outputs": [str(p) for p in outputs],
        "wall_clock_seconds": seconds,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return path


def _alpha_label(a: float) -> str:
    return f"{a:.10g}"


# --- analytic commands ----------------------------------------------------------


def run_prc(p: dict, out: Path, workers: int = 1):
    shapes = [PrcShape(a) for a in p["alpha"]]
    theta = np.arange(p["n"]) * (TWO_PI / p["n"])
    cols = [delta(s, theta) for s in shapes]
    header = ["theta"] + [f"delta_alpha={_alpha_label(s.alpha)}" for s in shapes]
    rows = zip(theta, *cols)
    return [write_csv(out, header, rows)]


def run_density(p: dict, out: Path, workers: int = 1):
    shape = PrcShape(p["alpha"])
    grids = [density_grid(shape, c, p["n"]) for c in p["c"]]
    header = ["phi"] + [f"density_c={c:.10g}" for c in p["c"]]
    rows = zip(grids[0].phi, *(g.values for g in grids))
    return [write_csv(out, header, rows)]


def run_long(p: dict, out: Path, workers: int = 1):
    rows = []
    for a in p["alpha"]:
        shape = PrcShape(a)
        for c in p["c"]:
            closed = longtime.closed_form_for(shape, c)
            rows.append(
                (
                    a,
                    c,
                    longtime.cout_long(shape, c).c_out,
                    None if closed is None else closed.c_out,
                    longtime.cout_long_small_c(shape, c),
                )
            )
    return [write_csv(out, ["alpha", "c", "c_out", "c_out_closed", "c_out_small_c"], rows)]


def run_short(p: dict, out: Path, workers: int = 1):
    shape = PrcShape(p["alpha"])
    rows = []
    for c in p["c"]:
        slope = shorttime.cout_short_slope(shape, c)
        for T in p["T"]:
            rows.append((p["alpha"], T, T / TWO_PI, c, shorttime.cout_short(shape, c, T), slope * T))
    return [write_csv(out, ["alpha", "T", "T_periods", "c", "cout_short", "linear_slope_times_T"], rows)]


# --- simulation commands --------------------------------------------------------

SUMMARY_HEADER = ["alpha", "c", "sigma", "T", "T_periods", "estimator", "value", "std_error", "n", "seed", "status"]

_ESTIMATORS = (
    ("pearson_counts", montecarlo.estimate_spike_corr),
    ("pearson_total_phase", montecarlo.estimate_total_phase_corr),
    ("phi_binary", montecarlo.estimate_binary_corr),
)


def summary_rows(records: montecarlo.TrialRecords, config: SimConfig):
    """One row per applicable estimator; degenerate ones are reported, not raised."""
    rows = []
    degenerate = 0
    for name, fn in _ESTIMATORS:
        if name == "phi_binary" and records.T >= TWO_PI:
            continue
        head = [config.alpha, config.c, config.sigma, records.T, records.T / TWO_PI, name]
        try:
            est = fn(records, seed=config.master_seed)
        except DegenerateStatisticError:
            degenerate += 1
            rows.append(head + [None, None, len(records), config.master_seed, "degenerate"])
            continue
        rows.append(head + [est.value, est.std_error, est.n, config.master_seed, "ok"])
    return rows, degenerate


def _sim_config(p: dict, window_T: float) -> SimConfig:
    return SimConfig(
        alpha=p["alpha"],
        c=p["c"],
        sigma=p["sigma"],
        window_T=window_T,
        trials=p["trials"],
        master_seed=p["seed"],
        dt=p["dt"],
        burn_in=p["burn_in"],
        include_ito_drift=p["include_ito_drift"],
        burn_in_only=p["burn_in_only"],
    )


def run_simulate(p: dict, out: Path, workers: int = 1):
    config = _sim_config(p, p["window_T"])
    records = montecarlo.run_trials(config, workers=workers)
    rows, degenerate = summary_rows(records, config)
    outputs = [write_csv(out, SUMMARY_HEADER, rows)]
    if p.get("records"):
        cols = records.columns()
        outputs.append(write_csv(Path(p["records"]), list(cols), zip(*cols.values())))
    if degenerate:
        raise _Degenerate(outputs, f"{degenerate} estimator(s) had zero variance")
    return outputs


def sweep_point_name(alpha: float, c: float, sigma: float) -> str:
    return f"alpha={alpha:.6g}_c={c:.6g}_sigma={sigma:.6g}.csv"


def run_sweep(p: dict, out: Path, workers: int = 1):
    points = [(a, c, s) for a in p["alpha"] for c in p["c"] for s in p["sigma"]]
    if not points or not p["T"]:
        raise UsageError("empty sweep grid")
    names = [sweep_point_name(*pt) for pt in points]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise UsageError(f"grid points map to the same output file: {', '.join(dupes)}")
    if not p.get("overwrite"):
        clash = [n for n in names + ["summary.csv"] if (out / n).exists()]
        if clash:
            raise UsageError(f"refusing to overwrite existing output in {out}: {', '.join(clash[:3])}")
    outputs = []
    all_rows = []
    for (a, c, s), name in zip(points, names):
        q = dict(p, alpha=a, c=c, sigma=s)
        config = _sim_config(q, max(p["T"]))
        rows = []
        for rec in montecarlo.run_windows(config, p["T"], workers=workers):
            r, _ = summary_rows(rec, config)
            rows.extend(r)
        outputs.append(write_csv(out / name, SUMMARY_HEADER, rows))
        all_rows.extend(rows)
    outputs.append(write_csv(out / "summary.csv", SUMMARY_HEADER, all_rows))
    return outputs


class _Degenerate(Exception):
    def __init__(self, outputs, message):
        super().__init__(message)
        self.outputs = outputs


COMMANDS = {
    "prc": run_prc,
    "density": run_density,
    "long": run_long,
    "short": run_short,
    "simulate": run_simulate,
    "sweep": run_sweep,
}

# --- argument handling ------------------------------------------------------------


def _windows(args) -> list[float] | None:
    if args.T is not None:
        return list(args.T)
    if args.T_periods is not None:
        return [TWO_PI * t for t in args.T_periods]
    return None


def _resolve(args) -> dict:
    """Turn parsed arguments into the JSON-serialisable parameter set."""
    cmd = args.command
    if cmd == "prc":
        return {"alpha": list(args.alpha), "n": args.n}
    if cmd == "density":
        if not is_power_of_two(args.n) or args.n < 64:
            raise UsageError(f"--n must be a power of two >= 64, got {args.n}")
        if any(c >= 1.0 for c in args.c):
            raise UsageError("c = 1 has no density (point mass at phi = 0)")
        return {"alpha": args.alpha, "c": list(args.c), "n": args.n}
    if cmd == "long":
        alphas = list(args.alpha) if args.alpha else list(np.linspace(0.0, math.pi / 2, args.alpha_points))
        return {"alpha": [float(a) for a in alphas], "c": list(args.c)}
    if cmd == "short":
        T = _windows(args)
        if T is None:
            T = list(np.linspace(0.01 * TWO_PI, 0.99 * TWO_PI, args.T_points))
        bad = [t for t in T if not 0.0 < t < TWO_PI]
        if bad:
            raise UsageError(f"window lengths must lie strictly inside (0, 2pi); got {bad[0]!r}")
        if any(c >= 1.0 for c in args.c):
            raise UsageError("c must be < 1 for the short-window theory")
        return {"alpha": args.alpha, "c": list(args.c), "T": [float(t) for t in T]}

    base = {
        "alpha": math.pi / 2,
        "c": 0.4,
        "sigma": 0.05,
        "dt": montecarlo.DEFAULT_DT,
        "burn_in": None,
        "window_T": 100 * TWO_PI,
        "trials": 2000,
        "seed": 0,
        "include_ito_drift": False,
        "burn_in_only": False,
    }
    if args.config:
        base.update(read_config(args.config))
    flags = {
        "sigma": args.sigma,
        "dt": args.dt,
        "burn_in": args.burn_in,
        "trials": args.trials,
        "seed": args.seed,
        "include_ito_drift": args.include_ito_drift,
        "burn_in_only": args.burn_in_only,
    }
    if cmd == "simulate":
        flags.update(alpha=args.alpha, c=args.c)
        T = _windows(args)
        if T is not None:
            if len(T) != 1:
                raise UsageError("simulate takes a single window; use sweep for several")
            flags["window_T"] = T[0]
    base.update({k: v for k, v in flags.items() if v is not None})
    if cmd == "simulate":
        base["records"] = args.records
        # validate now so errors name the offending key before any work starts
        base["burn_in"] = _sim_config(base, base["window_T"]).resolved_burn_in
        return base

    # sweep: grid axes may be lists; scalars from a config file become 1-element axes
    grid = {}
    for key, flag in (("alpha", args.alpha), ("c", args.c), ("sigma", args.sigma_list)):
        grid[key] = list(flag) if flag is not None else [base[key]]
    T = _windows(args)
    grid["T"] = T if T is not None else [base["window_T"]]
    if not all(grid.values()):
        raise UsageError("empty sweep grid")
    base.update(grid)
    base["overwrite"] = bool(args.overwrite)
    for a in grid["alpha"]:
        for c in grid["c"]:
            for s in grid["sigma"]:
                for t in grid["T"]:
                    cfg = _sim_config(dict(base, alpha=a, c=c, sigma=s), t)
    base["burn_in"] = cfg.resolved_burn_in
    base.pop("window_T", None)
    return base


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corrtransfer", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, out_default):
        sp.add_argument("--out", type=Path, default=Path(out_default), help="output path")
        sp.add_argument("--seed", type=parse_uint, default=None, help="master seed (unsigned 64-bit)")
        sp.add_argument("--config", type=Path, default=None, help="key = value configuration file")
        sp.add_argument("--workers", type=int, default=1, help="worker processes for simulations")

    sp = sub.add_parser("prc", help="PRC curves")
    common(sp, "prc.csv")
    sp.add_argument("--alpha", type=parse_real, nargs="+", required=True)
    sp.add_argument("--n", type=int, default=512)

    sp = sub.add_parser("density", help="stationary phase-difference density")
    common(sp, "density.csv")
    sp.add_argument("--alpha", type=parse_real, required=True)
    sp.add_argument("--c", type=parse_real, nargs="+", default=[0.4, 0.8])
    sp.add_argument("--n", type=int, default=4096)

    sp = sub.add_parser("long", help="long-window output correlation vs alpha")
    common(sp, "long.csv")
    sp.add_argument("--alpha", type=parse_real, nargs="+", default=None)
    sp.add_argument("--alpha-points", type=int, default=33)
    sp.add_argument("--c", type=parse_real, nargs="+", default=list(DEFAULT_C_GRID))

    sp = sub.add_parser("short", help="short-window spike correlation vs T")
    common(sp, "short.csv")
    sp.add_argument("--alpha", type=parse_real, required=True)
    sp.add_argument("--c", type=parse_real, nargs="+", default=list(DEFAULT_C_GRID))
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--T", type=parse_real, nargs="+", default=None, help="window lengths in radians")
    g.add_argument("--T-periods", dest="T_periods", type=parse_real, nargs="+", default=None)
    sp.add_argument("--T-points", dest="T_points", type=int, default=99)

    def sim_flags(sp, multi: bool):
        nargs = "+" if multi else None
        sp.add_argument("--alpha", type=parse_real, nargs=nargs, default=None)
        sp.add_argument("--c", type=parse_real, nargs=nargs, default=None)
        if multi:
            sp.add_argument("--sigma", dest="sigma_list", type=parse_real, nargs="+", default=None)
            sp.set_defaults(sigma=None)
        else:
            sp.add_argument("--sigma", type=parse_real, default=None)
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--T", type=parse_real, nargs="+", default=None, help="window length(s) in radians")
        g.add_argument("--T-periods", dest="T_periods", type=parse_real, nargs="+", default=None)
        sp.add_argument("--dt", type=parse_real, default=None)
        sp.add_argument("--burn-in", dest="burn_in", type=parse_real, default=None)
        sp.add_argument("--trials", type=parse_uint, default=None)
        sp.add_argument("--include-ito-drift", dest="include_ito_drift", action="store_const", const=True, default=None)
        sp.add_argument("--burn-in-only", dest="burn_in_only", action="store_const", const=True, default=None)

    sp = sub.add_parser("simulate", help="Monte Carlo run for one parameter set")
    common(sp, "simulate.csv")
    sim_flags(sp, multi=False)
    sp.add_argument("--records", type=Path, default=None, help="also write per-trial records here")

    sp = sub.add_parser("sweep", help="Monte Carlo over a grid of (alpha, c, sigma, T)")
    common(sp, "sweep")
    sim_flags(sp, multi=True)
    sp.add_argument("--overwrite", action="store_true")

    sp = sub.add_parser("replay", help="rerun a command from its manifest")
    sp.add_argument("manifest", type=Path)
    sp.add_argument("--out", type=Path, default=None, help="write to this path instead of the recorded one")
    sp.add_argument("--workers", type=int, default=1)
    return parser


def _execute(command: str, params: dict, out: Path, workers: int) -> int:
    if "records" in params and params["records"] is not None:
        params = dict(params, records=str(params["records"]))
    start = time.perf_counter()
    code = 0
    try:
        outputs = COMMANDS[command](params, out, workers)
    except _Degenerate as exc:
        outputs = exc.outputs
        print(f"corrtransfer {command}: {exc}", file=sys.stderr)
        code = EXIT_NUMERICAL
    write_manifest(command, params, out, outputs, time.perf_counter() - start)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "workers", 1) < 1:
        parser.error("--workers must be >= 1")
    try:
        if args.command == "replay":
            doc = json.loads(args.manifest.read_text(encoding="utf-8"))
            out = args.out if args.out is not None else Path(doc["out"])
            params = dict(doc["parameters"])
            if doc["command"] == "sweep":
                params["overwrite"] = True
            return _execute(doc["command"], params, out, args.workers)
        params = _resolve(args)
        return _execute(args.command, params, args.out, args.workers)
    except (UsageError, ConfigError, DegenerateDensityError) as exc:
        print(f"corrtransfer {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"corrtransfer {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DegenerateStatisticError, ArithmeticError, FloatingPointError) as exc:
        print(f"corrtransfer {args.command}: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
