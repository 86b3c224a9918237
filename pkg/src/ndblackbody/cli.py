"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage or validation error,
3 mode budget exceeded. Results go to stdout (or ``--output``), diagnostics
to stderr.
"""

import argparse
import csv
import io
import json
import math
import sys

from . import __version__
from .closedform import Species, SpacetimeDim, multiplicity, thermo_point, energy_density
from .errors import BudgetExceededError, ConvergenceError, DomainError, IncompatibleSpeciesError
from .kinetics import mc_cos2_average
from .modesum import (
    DEFAULT_MODE_BUDGET,
    FieldParams,
    auto_n_max,
    build_lattice,
    maxwell_observables,
    scalar_observables,
)
from .specfun import exact_cos2_average
from .verify import DEFAULT_SEED, run_checks

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

SWEEP_COLUMNS = ("D", "d", "species", "g", "tau", "rho", "p", "C")


class UsageError(Exception):
    pass


# -- serialization ----------------------------------------------------------

def format_number(x):
    """17 significant digits, always with a decimal point or exponent."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x!r}")
    text = "%.17g" % x
    if text.lstrip("-").isdigit():
        text += ".0"
    return text


def to_json(obj, indent=2, _level=0):
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, int, float)):
        return format_number(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{to_json(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "tolist"):
        return to_json(obj.tolist(), indent, _level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return format_number(value)


def to_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def flatten(obj, prefix=""):
    """Flatten nested dicts/lists into dotted keys for single-row CSV output."""
    out = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            out.update(flatten(v, f"{prefix}{k}."))
    elif isinstance(obj, (list, tuple)) and not all(isinstance(v, str) for v in obj):
        for i, v in enumerate(obj):
            out.update(flatten(v, f"{prefix}{i}."))
    elif isinstance(obj, (list, tuple)):
        out[prefix[:-1]] = " | ".join(obj)
    else:
        out[prefix[:-1]] = obj
    return out


def _emit(args, payload, table=None):
    """Write a command's result; ``table`` is (header, rows) for CSV when tabular."""
    if args.format == "json":
        text = to_json(payload) + "\n"
    else:
        if table is None:
            flat = flatten(payload)
            table = (list(flat), [list(flat.values())])
        text = to_csv(*table)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- argument parsing -------------------------------------------------------

def parse_int_list(text):
    """``"4"``, ``"2..5"`` or ``"2,3,7"`` to a list of integers."""
    text = str(text).strip()
    values = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        if ".." in part:
            lo, _, hi = part.partition("..")
            try:
                lo, hi = int(lo), int(hi)
            except ValueError:
                raise UsageError(f"invalid range {part!r}") from None
            if hi < lo:
                raise UsageError(f"empty range {part!r}")
            values.extend(range(lo, hi + 1))
        else:
            try:
                values.append(int(part))
            except ValueError:
                raise UsageError(f"invalid integer {part!r}") from None
    if not values:
        raise UsageError("empty dimension list")
    return values


def parse_float_list(text):
    values = []
    for part in filter(None, (p.strip() for p in str(text).split(","))):
        try:
            values.append(float(part))
        except ValueError:
            raise UsageError(f"invalid number {part!r}") from None
    if not values:
        raise UsageError("empty tau list")
    return values


def _single_int(text, what="dimension"):
    values = parse_int_list(text)
    if len(values) != 1:
        raise UsageError(f"{what} must be a single integer, got {text!r}")
    return values[0]


def _single_float(text, what="tau"):
    values = parse_float_list(text)
    if len(values) != 1:
        raise UsageError(f"{what} must be a single number, got {text!r}")
    return values[0]


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _tolerance(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"tolerance must look like name=value, got {text!r}")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid tolerance value in {text!r}") from None


def _common_options(fmt="json"):
    # fresh per subcommand: parent parsers share action objects
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=fmt)
    common.add_argument("--output", default=None, help="write results to this file instead of stdout")
    common.add_argument("--config", default=None,
                        help="key=value file with defaults for this command's flags")
    return common


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ndblackbody",
        description="Black-body radiation thermodynamics in D spacetime dimensions.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thermo", parents=[_common_options()], help="closed-form rho and p at one state point")
    p.add_argument("--dimension", default="4", help="spacetime dimension D")
    p.add_argument("--species", default="scalar", help="scalar, photon or custom:<g>")
    p.add_argument("--tau", default="1", help="temperature k_B T in natural units")
    p.set_defaults(handler=cmd_thermo)

    p = sub.add_parser("sweep", parents=[_common_options("csv")], help="table over dimensions and temperatures")
    p.add_argument("--dimension", default="2..11", help="D values: '4', '2..5' or '2,3,7'")
    p.add_argument("--species", default="scalar")
    p.add_argument("--tau", default="1", help="comma-separated temperatures")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("mc-angle", parents=[_common_options()], help="Monte Carlo <cos^2 theta> on the sphere")
    p.add_argument("--dimension", default="4", help="spacetime dimension D (samples the d = D-1 sphere)")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    p.set_defaults(handler=cmd_mc_angle)

    p = sub.add_parser("modesum", parents=[_common_options()], help="finite-volume field mode sums")
    p.add_argument("--dimension", default="4")
    p.add_argument("--species", default="scalar")
    p.add_argument("--tau", default="1")
    p.add_argument("--box", type=float, default=8.0, help="box edge L")
    p.add_argument("--n-max", type=int, default=None, help="lattice cutoff (default: cutoff rule)")
    p.add_argument("--mass", type=float, default=0.0)
    p.add_argument("--budget", type=int, default=DEFAULT_MODE_BUDGET, help="maximum number of modes")
    p.set_defaults(handler=cmd_modesum)

    p = sub.add_parser("verify", parents=[_common_options()], help="run the cross-validation suite")
    p.add_argument("--only", action="append", default=None,
                   help="check id(s) to run, e.g. A4 or A1,A3; repeatable")
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    p.add_argument("--tolerance", type=_tolerance, action="append", default=None,
                   help="override a named tolerance, e.g. closedform=1e-13; repeatable")
    p.set_defaults(handler=cmd_verify)
    return parser


def read_config(path, subparser):
    """Parse a key=value config file into defaults for ``subparser``."""
    known = {a.dest: a for a in subparser._actions if a.dest not in ("help", "config", "handler")}
    defaults = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            if key not in known:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            action = known[key]
            try:
                converted = action.type(value) if action.type else value
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"{path}:{lineno}: {exc}") from None
            if isinstance(action, argparse._AppendAction):
                defaults.setdefault(key, []).append(converted)
            else:
                if action.choices and converted not in action.choices:
                    raise UsageError(f"{path}:{lineno}: {key} must be one of {list(action.choices)}")
                defaults[key] = converted
    return defaults


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


# -- commands ---------------------------------------------------------------

def cmd_thermo(args):
    D = _single_int(args.dimension)
    point = thermo_point(SpacetimeDim(D), Species.parse(args.species), _single_float(args.tau))
    _emit(args, point.as_dict())
    return EXIT_OK


def cmd_sweep(args):
    dims = sorted(set(parse_int_list(args.dimension)))
    taus = sorted(set(parse_float_list(args.tau)))
    species = Species.parse(args.species)
    rows = []
    for D in dims:
        for tau in taus:
            row = thermo_point(SpacetimeDim(D), species, tau).as_dict()
            rows.append({"D": row["D"], "d": row["d"], "species": row["species"],
                         "g": row["multiplicity"], "tau": row["tau"], "rho": row["rho"],
                         "p": row["p"], "C": row["C"]})
    table = (list(SWEEP_COLUMNS), [[r[c] for c in SWEEP_COLUMNS] for r in rows])
    _emit(args, {"rows": rows}, table)
    return EXIT_OK


def cmd_mc_angle(args):
    D = _single_int(args.dimension)
    d = SpacetimeDim(D).d
    est = mc_cos2_average(d, args.samples, seed=args.seed)
    exact = exact_cos2_average(d)
    z = 0.0 if est.std_error == 0 else (est.mean - exact) / est.std_error
    _emit(args, {
        "D": D,
        "d": d,
        "n_samples": est.n_samples,
        "seed": est.seed,
        "mean": est.mean,
        "std_error": est.std_error,
        "exact": exact,
        "deviation_sigma": z,
    })
    return EXIT_OK


def cmd_modesum(args):
    D = _single_int(args.dimension)
    dim = SpacetimeDim(D)
    species = Species.parse(args.species)
    g = multiplicity(species, dim)
    tau = _single_float(args.tau)
    params = FieldParams(tau=tau, mass=args.mass)
    if species.kind == "photon" and args.mass != 0:
        raise UsageError("photon mode sums are massless; drop --mass")
    n_max = args.n_max if args.n_max is not None else auto_n_max(args.box, tau)
    lattice = build_lattice(dim.d, args.box, n_max, budget=args.budget)
    scalar = scalar_observables(lattice, params)
    payload = {
        "D": D,
        "d": dim.d,
        "species": species.label,
        "multiplicity": g,
        "tau": tau,
        "mass": args.mass,
        "L": lattice.L,
        "n_max": lattice.n_max,
        "n_modes": lattice.n_modes,
        "cutoff_adequate": lattice.cutoff_adequate(tau),
        "scalar": scalar.as_dict(),
    }
    if species.kind == "photon":
        maxwell = maxwell_observables(lattice, params)
        payload["maxwell"] = maxwell.as_dict()
        rho = maxwell.rho
    else:
        rho = g * scalar.rho
    payload["rho"] = rho
    if args.mass == 0:
        continuum = energy_density(dim, species, tau)
        payload["continuum_rho"] = continuum
        payload["relative_deviation"] = (rho - continuum) / continuum
    else:
        payload["continuum_rho"] = None
        payload["relative_deviation"] = None
    payload["warnings"] = list(scalar.warnings)
    for w in scalar.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _emit(args, payload)
    return EXIT_OK


def cmd_verify(args):
    only = None
    if args.only:
        only = [cid.strip().upper() for item in args.only for cid in item.split(",") if cid.strip()]
    try:
        report = run_checks(only=only, tolerances=dict(args.tolerance or []), seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload = report.as_dict()
    header = ["id", "name", "tolerance", "passed"]
    rows = [[c.id, c.name, c.tolerance, "true" if c.passed else "false"] for c in report.checks]
    _emit(args, payload, (header, rows))
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.id} {c.name}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAILED


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.config:
            sub = _subparser(parser, args.command)
            sub.set_defaults(**read_config(args.config, sub))
            try:
                args = parser.parse_args(argv)
            except SystemExit as exc:
                return exc.code if isinstance(exc.code, int) else EXIT_USAGE
        return args.handler(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (UsageError, DomainError, IncompatibleSpeciesError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
