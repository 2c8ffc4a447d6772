"""Command-line front end.

Subcommands: spectrum, dynamics, correlate, sweep, fit, validate.

Exit codes: 0 success, 2 invalid parameters or input, 3 internal
cross-check failure, 4 fit failure. ``validate`` exits 1 when any check
fails.
"""

import argparse
import csv
import io
import math
import os
import sys

import numpy as np

from . import validate as validation
from .algebra import diagonal_state
from .correlation import CORRELATORS
from .errors import (
    FitError,
    InvalidFlag,
    MalformedCsv,
    NoHalfCrossing,
    NonDecayedTail,
    ParameterError,
    SingularSystem,
    UnwritableOutput,
)
from .master import build_liouvillian, evolve, max_squeeze, populations, upper_population, validate_params
from .spectrum import (
    MODES,
    DetuningGrid,
    SpectrumSeries,
    lorentzian_fit,
    peak_and_hwhm,
    spectrum_series,
)

DYNAMICS_TOL = 1e-8

DEFAULTS = {
    "gamma": 1.0,
    "N": 5.0,
    "M": 0.0,
    "mode": None,
    "delta_min": -20.0,
    "delta_max": 20.0,
    "points": 2001,
    "tau_max": None,
    "tau_steps": None,
    "rho_a0": 0.0,
    "t_max": 2.0,
    "steps": 200,
    "n_list": "5,6,7",
    "m_rule": "zero",
    "out": None,
    "in": None,
}


def fmt(x):
    return f"{float(x):.15g}"


def write_csv(path, header, rows):
    """Write rows with 15 significant digits and LF line endings; '-' is stdout."""
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    text = buf.getvalue()
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise UnwritableOutput(f"cannot write {path}: {exc}") from exc


def read_config(path):
    """Parse a ``key = value`` file. Blank lines and '#' comments are skipped."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InvalidFlag(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidFlag(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in DEFAULTS:
            raise InvalidFlag(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _resolve(args, parser):
    """Fill unset options from the config file, then from DEFAULTS."""
    config = read_config(args.config) if getattr(args, "config", None) else {}
    types = {a.dest: a.type for a in parser._actions if a.dest in DEFAULTS}
    for key in DEFAULTS:
        if not hasattr(args, key) or getattr(args, key) is not None:
            continue
        if key in config:
            conv = types.get(key) or str
            try:
                setattr(args, key, conv(config[key]))
            except (TypeError, ValueError) as exc:
                raise InvalidFlag(f"bad config value for {key}: {config[key]!r}") from exc
        else:
            setattr(args, key, DEFAULTS[key])
    return args


def _grid(args):
    return DetuningGrid(args.delta_min, args.delta_max, args.points)


def _params(args):
    return validate_params(args.gamma, args.N, args.M)


def _series_rows(series):
    return zip(series.deltas, series.values)


def _peak_summary(series):
    try:
        pk = peak_and_hwhm(series)
        return pk, f"peak {fmt(pk.height)} at delta={fmt(pk.peak_delta)} hwhm={fmt(pk.hwhm)}"
    except NoHalfCrossing:
        top = float(np.max(series.values))
        return None, f"peak {fmt(top)} at delta=0 hwhm=undefined"


def _info(args, text):
    # keep stdout clean when CSV goes there
    stream = sys.stderr if args.out in (None, "-") else sys.stdout
    print(text, file=stream)


def cmd_spectrum(args):
    params = _params(args)
    mode = args.mode or "consistent"
    if mode not in MODES:
        raise InvalidFlag(f"--mode must be one of {MODES}")
    series = spectrum_series(params, mode, _grid(args), args.tau_max, args.tau_steps)
    write_csv(args.out, ("delta", "power"), _series_rows(series))
    _info(args, _peak_summary(series)[1])
    for note in series.warnings:
        print(f"warning: {note}", file=sys.stderr)
    return 0


def cmd_dynamics(args):
    params = _params(args)
    if not 0.0 <= args.rho_a0 <= 1.0:
        raise InvalidFlag("--rho-a0 must lie in [0, 1]")
    if not args.t_max > 0 or args.steps < 1:
        raise InvalidFlag("--t-max must be positive and --steps at least 1")
    t = np.linspace(0.0, args.t_max, args.steps + 1)
    closed = upper_population(params, args.rho_a0, t)
    evolved = populations(evolve(build_liouvillian(params), diagonal_state(args.rho_a0), t))[0]
    write_csv(args.out, ("t", "rho_a_closed", "rho_a_evolved"), zip(t, closed, evolved))
    worst = float(np.max(np.abs(closed - evolved)))
    if worst > DYNAMICS_TOL:
        print(f"cross-check failed: closed form and propagation differ by {worst:.3g}", file=sys.stderr)
        return 3
    _info(args, f"final rho_a {fmt(closed[-1])} (max mismatch {worst:.3g})")
    return 0


def cmd_correlate(args):
    params = _params(args)
    tau_max = 4.0 if args.tau_max is None else args.tau_max
    if not tau_max > 0 or args.steps < 1:
        raise InvalidFlag("--tau-max must be positive and --steps at least 1")
    mode = args.mode or "all"
    names = list(CORRELATORS) if mode == "all" else [mode]
    if any(n not in CORRELATORS for n in names):
        raise InvalidFlag(f"--mode must be one of {list(CORRELATORS) + ['all']}")
    tau = np.linspace(0.0, tau_max, args.steps + 1)
    cols = [np.real(CORRELATORS[n](params, tau)) for n in names]
    header = ["tau"] + ["c_numeric_re" if n == "numeric" else f"c_{n}" for n in names]
    write_csv(args.out, header, zip(tau, *cols))
    return 0


def _m_for(rule, N):
    if rule == "zero":
        return 0.0
    if rule == "maximal":
        return max_squeeze(N)
    raise InvalidFlag("--m-rule must be 'zero' or 'maximal'")


def _n_list(text):
    try:
        values = [float(s) for s in str(text).split(",") if s.strip()]
    except ValueError as exc:
        raise InvalidFlag(f"--n-list must be comma-separated numbers, got {text!r}") from exc
    if not values:
        raise InvalidFlag("--n-list is empty")
    return sorted(values)


def sweep(gamma, n_list, m_rule, mode, grid, tau_max=None, tau_steps=None):
    """Spectra for each N in ``n_list``; returns [(N, M, series, Peak or None)] in N order."""
    out = []
    for N in sorted(n_list):
        params = validate_params(gamma, N, _m_for(m_rule, N))
        series = spectrum_series(params, mode, grid, tau_max, tau_steps)
        try:
            pk = peak_and_hwhm(series)
        except NoHalfCrossing:
            pk = None
        out.append((N, params.M, series, pk))
    return out


def cmd_sweep(args):
    mode = args.mode or "consistent"
    if mode not in MODES:
        raise InvalidFlag(f"--mode must be one of {MODES}")
    results = sweep(args.gamma, _n_list(args.n_list), args.m_rule, mode, _grid(args), args.tau_max, args.tau_steps)
    outdir = args.out or "."
    try:
        os.makedirs(outdir, exist_ok=True)
    except OSError as exc:
        raise UnwritableOutput(f"cannot create {outdir}: {exc}") from exc
    summary = []
    for N, M, series, pk in results:
        write_csv(os.path.join(outdir, f"spectrum_N{fmt(N)}.csv"), ("delta", "power"), _series_rows(series))
        height = pk.height if pk else float(np.max(series.values))
        summary.append((N, M, height, pk.hwhm if pk else math.nan))
    write_csv(os.path.join(outdir, "summary.csv"), ("N", "M", "peak", "hwhm"), summary)
    print("N,M,peak,hwhm")
    for row in summary:
        print(",".join(fmt(v) for v in row))
    return 0


def read_spectrum_csv(path):
    """Load a ``delta,power`` CSV as a SpectrumSeries on a reconstructed grid."""
    try:
        if path in (None, "-"):
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise MalformedCsv(f"cannot read {path}: {exc}") from exc
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["delta", "power"]:
        raise MalformedCsv("expected header 'delta,power'")
    try:
        data = np.array([[float(a), float(b)] for a, b in rows[1:]], dtype=float)
    except ValueError as exc:
        raise MalformedCsv(f"bad row: {exc}") from exc
    if len(data) < 7:
        raise MalformedCsv(f"need at least 7 data rows, got {len(data)}")
    d = data[:, 0]
    try:
        grid = DetuningGrid(float(d[0]), float(d[-1]), len(d))
    except ParameterError as exc:
        raise MalformedCsv(f"unsupported detuning grid: {exc}") from exc
    if np.max(np.abs(grid.deltas - d)) > 1e-9 * max(1.0, np.max(np.abs(d))):
        raise MalformedCsv("detuning column is not a uniform grid")
    return SpectrumSeries(grid, data[:, 1])


def cmd_fit(args):
    series = read_spectrum_csv(getattr(args, "in"))
    fit = lorentzian_fit(series)
    for key in ("amplitude", "center", "half_width", "residual_norm"):
        print(f"{key} = {fmt(getattr(fit, key))}")
    return 0


def cmd_validate(args):
    report = validation.run_checks()
    header = ("name", "passed", "observed", "expected", "tolerance")
    lines = [",".join(header)]
    for c in report:
        lines.append(",".join([c.name, str(c.passed).lower(), fmt(c.observed), fmt(c.expected), fmt(c.tolerance)]))
    text = "\n".join(lines) + "\n"
    if args.out not in (None, "-"):
        try:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise UnwritableOutput(f"cannot write {args.out}: {exc}") from exc
    else:
        sys.stdout.write(text)
    failed = [c.name for c in report if not c.passed]
    print(f"{len(report) - len(failed)}/{len(report)} checks passed")
    for name in failed:
        print(f"FAILED: {name}")
    return 1 if failed else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="squeezed-atom",
        description="Two-level atom in a squeezed-vacuum reservoir: dynamics, correlators and spectra.",
        epilog="Frequencies and times are in units of gamma unless --gamma is given.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, physics=True):
        p.add_argument("--config", help="key = value file; explicit flags win")
        p.add_argument("--out", help="output path ('-' for stdout)")
        if physics:
            p.add_argument("--gamma", type=float, help="decay rate (default 1)")
            p.add_argument("--N", type=float, help="reservoir mean photon number")
            p.add_argument("--M", type=float, help="squeezing correlation, 0 <= M <= sqrt(N(N+1))")

    def grid_flags(p):
        p.add_argument("--delta-min", type=float, help="lowest detuning (default -20)")
        p.add_argument("--delta-max", type=float, help="highest detuning (default 20)")
        p.add_argument("--points", type=int, help="odd number of grid points (default 2001)")
        p.add_argument("--tau-max", type=float, help="numeric mode: delay window (auto if unset)")
        p.add_argument("--tau-steps", type=int, help="numeric mode: Simpson intervals (auto if unset)")

    p = sub.add_parser("spectrum", help="power spectrum on a detuning grid")
    common(p)
    grid_flags(p)
    p.add_argument("--mode", help=f"one of {', '.join(MODES)} (default consistent)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("dynamics", help="upper-level population, closed form vs propagation")
    common(p)
    p.add_argument("--rho-a0", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--steps", type=int)
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("correlate", help="dipole correlator <s+(0) s-(tau)>")
    common(p)
    p.add_argument("--tau-max", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--mode", help="paper, exact, numeric or all (default all)")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("sweep", help="spectra over a list of N; --out is a directory")
    common(p)
    grid_flags(p)
    p.add_argument("--n-list", help="comma-separated N values")
    p.add_argument("--m-rule", choices=("zero", "maximal"))
    p.add_argument("--mode", help=f"one of {', '.join(MODES)} (default consistent)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="single-Lorentzian fit of a delta,power CSV")
    p.add_argument("--config")
    p.add_argument("--in", dest="in", help="input CSV ('-' for stdin)")
    p.set_defaults(func=cmd_fit, out=None)

    p = sub.add_parser("validate", help="run the built-in consistency checks")
    p.add_argument("--config")
    p.add_argument("--out", help="also write the report CSV here")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    try:
        _resolve(args, sub)
        return args.func(args)
    except FitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    except (ParameterError, InvalidFlag, MalformedCsv, UnwritableOutput) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (NonDecayedTail, SingularSystem) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
