"""Command-line entry point: eval, sweep and verify.

Exit codes: 0 success, 1 numerical or verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import acceptance, asymptotics
from .covderiv import jet
from .curvature import curvature_report
from .model import DomainError, GasParameters, GeneralizedTemperature, chart_coordinates, chart_jacobian, transport
from .quadrature import AccuracyError
from .tensor import CHARTS, MAX_ORDER, TensorError

CHART_LABELS = {
    "flat": ["beta", "r_x", "r_y", "r_z"],
    "beta-omega": ["beta", "omega_x", "omega_y", "omega_z"],
    "u-omega": ["u", "omega_x", "omega_y", "omega_z"],
    "beta-M": ["beta", "M_x", "M_y", "M_z"],
}
SWEEP_COLUMNS = ("quantity", "theta", "value", "limit", "rel_error", "monotone", "status")
DEFAULT_SEED = 0

CONFIG_HELP = """\
config file: one "key = value" per line, keys are the long flag names without
dashes (mass, radius, beta, omega, chart, order, theta-grid, out, format, seed,
tolerance-scale, only); blank lines and lines starting with # are ignored.
Precedence: command-line flags > config file > defaults.

theta grid: "start:stop:count" (log-spaced, inclusive) or a comma list.

sweep CSV columns, in order: quantity, theta, value, limit, rel_error,
monotone, status.  monotone is the per-quantity flag (relative error
non-increasing over the last three grid points, 1e-12 noise floor); status is
"ok" or "failed: <reason>".

eval JSON: every tensor is a nested list indexed row-major over the chart
coordinate order given in "coordinates"; "chart" names the chart.
"""


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    mass: float = 1.0
    radius: float = 1.0
    beta: float = 1.0
    omega: tuple = (0.0, 0.0, 0.0)
    chart: str = "beta-omega"
    order: int = 4
    theta_grid: tuple = asymptotics.DEFAULT_GRID
    out: Optional[str] = None
    format: Optional[str] = None
    seed: int = DEFAULT_SEED
    tolerance_scale: float = 1.0
    only: Optional[str] = None

    def validate(self, command: str) -> None:
        for name in ("mass", "radius", "beta"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise UsageError(f"--{name} must be a positive number")
        if len(self.omega) != 3 or not all(math.isfinite(w) for w in self.omega):
            raise UsageError("--omega needs three finite components x,y,z")
        if self.chart not in CHARTS:
            raise UsageError(f"--chart must be one of {', '.join(CHARTS)}")
        if not 1 <= self.order <= MAX_ORDER:
            raise UsageError(f"--order must be between 1 and {MAX_ORDER}")
        if self.format not in (None, "json", "csv"):
            raise UsageError("--format must be json or csv")
        if not (math.isfinite(self.tolerance_scale) and self.tolerance_scale > 0):
            raise UsageError("--tolerance-scale must be positive")
        if self.only is not None and self.only not in acceptance.MODULES:
            raise UsageError(f"--only must be one of {', '.join(acceptance.MODULES)}")
        if command == "sweep":
            g = np.asarray(self.theta_grid, dtype=float)
            if g.size == 0:
                raise UsageError("--theta-grid is empty")
            if np.any(g <= 0) or np.any(np.diff(g) <= 0) or g[-1] > 1e6:
                raise UsageError("--theta-grid must be positive, strictly increasing and at most 1e6")

    @property
    def gas(self) -> GasParameters:
        return GasParameters(self.mass, self.radius)

    @property
    def point(self) -> GeneralizedTemperature:
        return GeneralizedTemperature(self.beta, np.array(self.omega, dtype=float))


# --- parsing --------------------------------------------------------------------


def _parse_vector(text: str) -> tuple:
    try:
        vals = tuple(float(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"cannot parse vector {text!r}") from None
    if len(vals) != 3:
        raise UsageError(f"--omega needs three components, got {len(vals)}")
    return vals


def _parse_grid(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            n = int(count)
            if n < 1:
                return ()
            return tuple(float(v) for v in np.logspace(math.log10(float(start)), math.log10(float(stop)), n))
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise UsageError(f"cannot parse theta grid {text!r}") from None


_CONVERTERS = {
    "mass": float,
    "radius": float,
    "beta": float,
    "omega": _parse_vector,
    "chart": str,
    "order": int,
    "theta_grid": _parse_grid,
    "out": str,
    "format": str,
    "seed": int,
    "tolerance_scale": float,
    "only": str,
}


def _convert(key: str, value: str):
    try:
        return _CONVERTERS[key](value)
    except UsageError:
        raise
    except (ValueError, TypeError):
        raise UsageError(f"invalid value {value!r} for {key}") from None


def read_config_file(path: str) -> dict:
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (t.strip() for t in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONVERTERS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _convert(key, value)
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--mass", help="particle mass m (default 1)")
    common.add_argument("--radius", help="ball radius R (default 1)")
    common.add_argument("--beta", help="inverse temperature (default 1)")
    common.add_argument("--omega", help="angular velocity x,y,z (default 0,0,0)")
    common.add_argument("--chart", help=f"one of {', '.join(CHARTS)} (default beta-omega)")
    common.add_argument("--order", help="highest derivative order D^n z to report (default 4)")
    common.add_argument("--theta-grid", dest="theta_grid", help="start:stop:count or comma list (default 1e0..1e5)")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", help="json or csv")
    common.add_argument("--seed", help=f"random seed (default {DEFAULT_SEED})")
    common.add_argument("--tolerance-scale", dest="tolerance_scale", help="multiply every acceptance tolerance")
    common.add_argument("--only", help=f"restrict verify to one module: {', '.join(acceptance.MODULES)}")

    parser = _Parser(
        prog="hessgas",
        description="Hessian geometry of a rotating ideal gas in a ball.",
        epilog=CONFIG_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (
        ("eval", "metric, derivatives and curvature at one point (JSON)"),
        ("sweep", "high-velocity convergence sweep (CSV)"),
        ("verify", "run the acceptance suite"),
    ):
        sub.add_parser(
            name,
            parents=[common],
            help=text,
            description=text,
            epilog=CONFIG_HELP,
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        values.update(read_config_file(args.config))
    for f in fields(RunConfig):
        raw = getattr(args, f.name, None)
        if raw is not None and f.name in _CONVERTERS:
            values[f.name] = _convert(f.name, raw)
    cfg = RunConfig(**values)
    cfg.validate(args.command)
    return cfg


# --- serialization -------------------------------------------------------------


def plain(obj):
    """Convert numpy scalars and arrays (recursively) into JSON-ready Python objects."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def dump_json(obj) -> str:
    return json.dumps(plain(obj), indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# --- commands --------------------------------------------------------------------


def eval_report(cfg: RunConfig) -> dict:
    p, gp = cfg.point, cfg.gas
    rep = curvature_report(p, gp, cfg.chart, seed=cfg.seed, max_order=min(cfg.order, 4))
    derivs = {n: t.components for n, t in rep.derivatives.items()}
    if cfg.order > 4:
        full = jet(p, gp, cfg.order)
        jac = chart_jacobian(p, gp, cfg.chart)
        derivs = {n: transport(full[n], jac).components for n in range(1, cfg.order + 1)}
    return {
        "chart": cfg.chart,
        "coordinates": CHART_LABELS[cfg.chart],
        "index_order": "row-major over the chart coordinates listed in 'coordinates'",
        "parameters": {"mass": cfg.mass, "radius": cfg.radius},
        "point": {
            "beta": p.beta,
            "omega": p.omega,
            "theta": p.theta,
            "chart_coordinates": chart_coordinates(p, gp, cfg.chart),
        },
        "metric": rep.metric.components,
        "derivatives": {str(n): d for n, d in sorted(derivs.items())},
        "hessian_curvature": rep.hessian_curvature.components,
        "riemann": rep.riemann.components,
        "sectional_samples": rep.sectional_samples,
        "sectional_min": rep.sectional_min,
        "sectional_max": rep.sectional_max,
        "kn_deviation": rep.kn_deviation,
        "seed": cfg.seed,
    }


def _tensor_rows(name: str, arr) -> list:
    arr = np.asarray(arr)
    return [(name, " ".join(str(i) for i in idx), repr(float(v))) for idx, v in np.ndenumerate(arr)]


def cmd_eval(cfg: RunConfig) -> int:
    report = eval_report(cfg)
    if (cfg.format or "json") == "json":
        _emit(dump_json(report), cfg.out)
        return 0
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("tensor", "index", "value"))
    w.writerows(_tensor_rows("metric", report["metric"]))
    for n, d in report["derivatives"].items():
        w.writerows(_tensor_rows(f"D{n}z", d))
    w.writerows(_tensor_rows("hessian_curvature", report["hessian_curvature"]))
    w.writerows(_tensor_rows("riemann", report["riemann"]))
    _emit(buf.getvalue(), cfg.out)
    return 0


def sweep_rows(cfg: RunConfig) -> list:
    suite = asymptotics.limit_suite(cfg.gas, cfg.theta_grid, cfg.beta, cfg.seed)
    rows = []
    for name in asymptotics.SWEEP_QUANTITIES:
        r = suite[name]
        for th, v, e in zip(r.thetas, r.values, r.rel_errors):
            reason = r.failures.get(float(th))
            if reason is None and not math.isfinite(v):
                reason = "non-finite value"
            rows.append(
                {
                    "quantity": name,
                    "theta": float(th),
                    "value": float(v),
                    "limit": float(r.limit),
                    "rel_error": float(e),
                    "monotone": bool(r.monotone),
                    "status": "ok" if reason is None else f"failed: {reason}",
                }
            )
    return rows


def cmd_sweep(cfg: RunConfig) -> int:
    rows = sweep_rows(cfg)
    if (cfg.format or "csv") == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([r["quantity"]] + [repr(r[c]) for c in ("theta", "value", "limit", "rel_error")] + [str(r["monotone"]).lower(), r["status"]])
        _emit(buf.getvalue(), cfg.out)
    else:
        _emit(dump_json({"columns": list(SWEEP_COLUMNS), "rows": rows}), cfg.out)
    ok = sum(r["status"] == "ok" for r in rows)
    if ok < 0.9 * len(rows):
        print(f"sweep: only {ok} of {len(rows)} rows succeeded", file=sys.stderr)
        return 1
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    results = acceptance.run_all(cfg.only, cfg.tolerance_scale, cfg.seed)
    for r in results:
        print(r.summary(), file=sys.stderr)
    failing = [r.id for r in results if not r.passed]
    verdict = {
        "passed": not failing,
        "failing": failing,
        "seed": cfg.seed,
        "tolerance_scale": cfg.tolerance_scale,
        "only": cfg.only,
        # Wall-clock times vary run to run; only the budget verdict is recorded.
        "criteria": [
            {
                "id": r.id,
                "name": r.name,
                "module": r.module,
                "passed": r.passed,
                "error": r.error,
                "tolerance": r.tolerance,
                "budget_seconds": r.budget,
                "within_budget": r.runtime <= r.budget,
                "details": r.details,
            }
            for r in results
        ],
    }
    _emit(dump_json(verdict), cfg.out)
    if failing:
        print(f"failing criteria: {', '.join(map(str, failing))}", file=sys.stderr)
        return 1
    return 0


COMMANDS = {"eval": cmd_eval, "sweep": cmd_sweep, "verify": cmd_verify}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve_config(args)
    except UsageError as exc:
        print(f"hessgas: usage error: {exc}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.command](cfg)
    except (AccuracyError, DomainError, TensorError, np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
        print(f"hessgas: numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
