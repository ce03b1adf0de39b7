"""Command-line front end: scenario configs in, tables and figures out.

Configs are flat INI-style key/value files with [system], [sweep], and
[output] sections; unknown sections or keys are rejected outright so a typo
cannot silently misconfigure a campaign. Omitted fields fall back to the
bundled two-antenna reference scenario (N=2, M=K=2, d1=30 m, d2=100 m,
alpha=3, b=0.4, sigma=-70 dBm, transmit power swept 0..40 dBm).
"""

import argparse
import configparser
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass

from . import analysis, checks
from .link_model import derive_params
from .montecarlo import (ANALYTIC_SCHEMES, SIM_SCHEMES, Scheme, SweepAxis,
                         SweepSpec, params_at, run_sweep)
from .specfun import ExpansionTooLargeError

SCHEMA_VERSION = "nomasel/1"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

_DEFAULT_SYSTEM = dict(n_bs=2, n_ue1=2, n_ue2=2, d1=30.0, d2=100.0, alpha=3.0,
                       b=0.4, ps_dbm=20.0, sigma_dbm=-70.0)
_DEFAULT_SWEEP = dict(axis="ps_dbm",
                      points="0, 5, 10, 15, 20, 25, 30, 35, 40",
                      trials="100000", seed="12022",
                      schemes=", ".join(s.value for s in SIM_SCHEMES + ANALYTIC_SCHEMES))

_INT_SYSTEM_KEYS = {"n_bs", "n_ue1", "n_ue2"}
_ALLOWED = {
    "system": set(_DEFAULT_SYSTEM),
    "sweep": set(_DEFAULT_SWEEP),
    "output": {"format", "out", "verbose"},
}


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    """File-sourced mirror of the scenario, the sweep, and output options."""

    base: object
    axis: SweepAxis
    points: tuple
    trials: int
    seed: int
    schemes: tuple
    fmt: str = "csv"
    out: str = None
    verbose: bool = False
    defaulted: bool = True   # no config file given; reference scenario applied

    def sweep_spec(self):
        return SweepSpec(base=self.base, axis=self.axis, points=self.points,
                         trials=self.trials, seed=self.seed, schemes=self.schemes)

    def echo(self):
        """Single deterministic line describing the effective configuration."""
        b = self.base
        parts = [f"axis={self.axis.value}",
                 "points=" + ";".join(_fmt(p) for p in self.points),
                 f"trials={self.trials}", f"seed={self.seed}",
                 "schemes=" + ";".join(s.value for s in self.schemes),
                 f"n_bs={b.n_bs}", f"n_ue1={b.n_ue1}", f"n_ue2={b.n_ue2}",
                 f"d1={_fmt(b.d1)}", f"d2={_fmt(b.d2)}", f"alpha={_fmt(b.alpha)}",
                 f"b={_fmt(b.b)}", f"ps_dbm={_fmt(b.ps_dbm)}",
                 f"sigma_dbm={_fmt(b.sigma_dbm)}"]
        return " ".join(parts)


def _fmt(x):
    """Floats at 9 significant digits; integral values without the mantissa."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return f"{x:.9g}"


def _parse_points(text):
    toks = [t for t in text.replace(",", " ").split() if t]
    if not toks:
        raise ConfigError("sweep points list is empty")
    try:
        return tuple(float(t) for t in toks)
    except ValueError as exc:
        raise ConfigError(f"bad sweep point: {exc}") from None


def _parse_schemes(text):
    out = []
    for tok in (t.strip() for t in text.split(",")):
        if not tok:
            continue
        try:
            out.append(Scheme(tok))
        except ValueError:
            known = ", ".join(s.value for s in Scheme)
            raise ConfigError(f"unknown scheme {tok!r} (known: {known})") from None
    if not out:
        raise ConfigError("schemes list is empty")
    return tuple(out)


def load_config(path=None):
    """Parse a config file (strict keys) into a RunConfig; None means defaults."""
    system = dict(_DEFAULT_SYSTEM)
    sweep = dict(_DEFAULT_SWEEP)
    output = {"format": "csv", "out": None, "verbose": False}
    defaulted = path is None
    if path is not None:
        parser = configparser.ConfigParser(inline_comment_prefixes=("#",),
                                           interpolation=None)
        parser.optionxform = str
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh, source=str(path))
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from None
        defaulted = not parser.sections()   # empty file: reference scenario
        for section in parser.sections():
            if section not in _ALLOWED:
                raise ConfigError(f"unknown section [{section}] in {path}")
            for key, value in parser.items(section):
                if key not in _ALLOWED[section]:
                    raise ConfigError(f"unknown key {key!r} in [{section}] of {path}")
                if section == "system":
                    try:
                        system[key] = int(value) if key in _INT_SYSTEM_KEYS else float(value)
                    except ValueError:
                        raise ConfigError(f"bad numeric value for {key!r}: {value!r}") from None
                elif section == "sweep":
                    sweep[key] = value
                else:
                    if key == "verbose":
                        output[key] = value.strip().lower() in ("1", "true", "yes", "on")
                    else:
                        output[key] = value.strip()

    try:
        base = derive_params(**system)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    try:
        axis = SweepAxis(sweep["axis"].strip().lower())
    except ValueError:
        known = ", ".join(a.value for a in SweepAxis)
        raise ConfigError(f"unknown sweep axis {sweep['axis']!r} (known: {known})") from None
    try:
        trials = int(sweep["trials"])
        seed = int(sweep["seed"])
    except ValueError as exc:
        raise ConfigError(f"bad sweep integer: {exc}") from None
    fmt = output["format"].lower()
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown output format {output['format']!r}")
    return RunConfig(base=base, axis=axis, points=_parse_points(sweep["points"]),
                     trials=trials, seed=seed, schemes=_parse_schemes(sweep["schemes"]),
                     fmt=fmt, out=output["out"], verbose=output["verbose"],
                     defaulted=defaulted)


# ---------------------------------------------------------------------------
# table rendering
# ---------------------------------------------------------------------------

_SWEEP_COLUMNS = ("point", "scheme", "mean_rsum", "mean_r1", "mean_r2",
                  "mean_eta", "stderr", "trials")
_ANALYZE_COLUMNS = ("point", "aia_closed", "a3_closed", "aia_quadrature",
                    "a3_quadrature", "aia_rel_gap", "a3_rel_gap", "flags")


def _sweep_rows(result):
    for st in result.stats:
        yield {"point": _fmt(st.point), "scheme": st.scheme.value,
               "mean_rsum": _fmt(st.mean_rsum), "mean_r1": _fmt(st.mean_r1),
               "mean_r2": _fmt(st.mean_r2), "mean_eta": _fmt(st.mean_eta),
               "stderr": _fmt(st.stderr), "trials": str(st.trials)}


def _render_csv(columns, rows, header_lines):
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(row[c] for c in columns) + "\n")
    return buf.getvalue()


def _render_json(columns, rows, meta):
    doc = {"schema": SCHEMA_VERSION, **meta,
           "rows": [{c: row[c] for c in columns} for row in rows]}
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _emit(text, out_path):
    if out_path is None:
        sys.stdout.write(text)
        return
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _header(kind, cfg):
    lines = [f"schema: {SCHEMA_VERSION} {kind}", f"config: {cfg.echo()}"]
    if cfg.defaulted:
        lines.append("note: no config file supplied; reference scenario defaults applied")
    return lines


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(cfg, workers=1, plot=None):
    progress = None
    if cfg.verbose:
        progress = lambda point: print(f"sweep point {_fmt(point)} "
                                       f"({cfg.trials} trials)", file=sys.stderr)
    result = run_sweep(cfg.sweep_spec(), workers=workers, progress=progress)
    rows = list(_sweep_rows(result))
    if cfg.fmt == "csv":
        text = _render_csv(_SWEEP_COLUMNS, rows, _header("sweep", cfg))
    else:
        text = _render_json(_SWEEP_COLUMNS, rows, {"kind": "sweep", "config": cfg.echo()})
    _emit(text, cfg.out)
    if plot:
        from . import plotting
        plotting.save_sweep_figure(result, plot)
    return result


def cmd_analyze(cfg, plot=None):
    rows = []
    raw = []
    for point in cfg.points:
        p = params_at(cfg.base, cfg.axis, point)
        flags = ["low-snr"] if analysis.low_snr_guard(p) else []
        vals = {}
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", analysis.LowSnrApproximationWarning)
            try:
                vals["aia_closed"] = analysis.avg_sum_rate_aia(p)
                vals["aia_quadrature"] = analysis.quadrature_avg_rate(
                    lambda x: analysis.pdf_gamma_s_aia(x, p), p)
            except ExpansionTooLargeError:
                flags.append("aia-expansion-too-large")
                vals["aia_closed"] = vals["aia_quadrature"] = float("nan")
            vals["a3_closed"] = analysis.avg_sum_rate_a3(p)
            vals["a3_quadrature"] = analysis.quadrature_avg_rate(
                lambda x: analysis.pdf_gamma_s_a3(x, p), p)
        for alg in ("aia", "a3"):
            closed, quadv = vals[f"{alg}_closed"], vals[f"{alg}_quadrature"]
            vals[f"{alg}_rel_gap"] = abs(closed - quadv) / abs(closed) \
                if math.isfinite(closed) and closed != 0 else float("nan")
        raw.append({"point": point, **vals})
        rows.append({"point": _fmt(point),
                     **{k: _fmt(v) for k, v in vals.items()},
                     "flags": ";".join(flags)})
    if cfg.fmt == "csv":
        text = _render_csv(_ANALYZE_COLUMNS, rows, _header("analysis", cfg))
    else:
        text = _render_json(_ANALYZE_COLUMNS, rows,
                            {"kind": "analysis", "config": cfg.echo()})
    _emit(text, cfg.out)
    if plot:
        from . import plotting
        plotting.save_analyze_figure(raw, cfg.axis.value, plot)
    return raw


def cmd_validate():
    results = checks.run_all()
    for res in results:
        print(f"{'PASS' if res.passed else 'FAIL'} {res.name}: {res.detail}")
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"error: validation failed: {failed[0].name}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="nomasel",
        description="Antenna-selection simulation and analysis for a two-user "
                    "downlink NOMA system")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_workers in (("simulate", True), ("analyze", False)):
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None, help="scenario config file")
        sp.add_argument("--out", default=None, help="output file (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--trials", type=int, default=None)
        sp.add_argument("--plot", action="store_true",
                        help="render a figure next to the output file")
        if needs_workers:
            sp.add_argument("--workers", type=int, default=1)
    sub.add_parser("validate")
    return parser


def _apply_overrides(cfg, args):
    if args.format is not None:
        cfg.fmt = args.format
    if args.out is not None:
        cfg.out = args.out
    if args.seed is not None:
        cfg.seed = args.seed
    if args.trials is not None:
        if args.trials < 1:
            raise ConfigError("--trials must be >= 1")
        cfg.trials = args.trials
    plot = None
    if args.plot:
        if cfg.out is None:
            raise ConfigError("--plot requires --out (the figure lands next to it)")
        stem = cfg.out.rsplit(".", 1)[0] if "." in cfg.out.rsplit("/", 1)[-1] else cfg.out
        plot = stem + ".png"
    return plot


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate()
        cfg = load_config(args.config)
        plot = _apply_overrides(cfg, args)
        if args.command == "simulate":
            cmd_simulate(cfg, workers=args.workers, plot=plot)
        else:
            cmd_analyze(cfg, plot=plot)
        return EXIT_OK
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except analysis.QuadratureError as exc:
        print(f"error: numeric: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
