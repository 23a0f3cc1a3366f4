"""Command-line front end: ``ecs-qfi {sweep,verify,crossings}``.

Exit codes: 0 success, 1 verification threshold violated, 2 bad
configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

from .ecs import EcsScenario, eigen_tilde, qfi_analytic
from .errors import QfiError
from .fock import FockSpace, numeric_qfi_lossy
from .limits import CROSSING_LIMITS, find_crossings, sweep_qfi
from .rank2 import eig_nonorthogonal, eig_nonorthogonal_direct

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

CSV_HEADER = ["R", "T", "F", "shot_noise", "heisenberg", "hofmann", "flags"]
QFI_REL_TOL = 1e-6
EIG_TOL = 1e-9
DEFAULT_GRIDS = {"sweep": "0:1:0.01", "verify": "0:0.9:0.1"}


class ConfigError(ValueError):
    pass


class NumericFailure(RuntimeError):
    pass


@dataclass
class RunConfig:
    command: str
    alpha: complex
    grid: list[float]
    truncation: int | None = None
    out: str | None = None
    fmt: str = "csv"
    tolerance: float = 1e-6


def fmt_float(x: float) -> str:
    return format(x, ".17g")


def parse_alpha(text: str, phase: float = 0.0) -> complex:
    try:
        value = complex(text.replace(" ", ""))
    except ValueError:
        raise ConfigError(f"cannot parse alpha {text!r}") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ConfigError(f"alpha must be finite, got {text!r}")
    return value * cmath.exp(1j * phase) if phase else value


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (stop inclusive) or a comma-separated list."""
    text = text.strip()
    if not text:
        return []
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if not step > 0:
                raise ConfigError(f"grid step must be positive, got {step}")
            if stop < start:
                raise ConfigError(f"grid stop {stop} is below start {start}")
            count = int(math.floor((stop - start) / step + 1e-9))
            values = [round(start + k * step, 12) for k in range(count + 1)]
        else:
            values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot parse grid {text!r}") from None
    bad = [v for v in values if not 0.0 <= v <= 1.0]
    if bad:
        raise ConfigError(f"grid values outside [0, 1]: {bad}")
    return values


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_sweep(cfg: RunConfig) -> int:
    rows = sweep_qfi(cfg.alpha, cfg.grid)
    failed = [r for r in rows if any(f.startswith("error") for f in r.flags)]
    if failed:
        print(f"numeric failure at R={failed[0].R!r}: {failed[0].flags[0]}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.fmt == "json":
        payload = [
            {
                "R": r.R, "T": r.T, "F": r.F, "shot_noise": r.shot_noise,
                "heisenberg": r.heisenberg, "hofmann": r.hofmann, "flags": list(r.flags),
            }
            for r in rows
        ]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in rows:
            writer.writerow(
                [fmt_float(v) for v in (r.R, r.T, r.F, r.shot_noise, r.heisenberg, r.hofmann)]
                + [";".join(r.flags)]
            )
        text = buf.getvalue()
    _emit(text, cfg.out)
    return EXIT_OK


def _verify_point(alpha: complex, R: float, truncation: int | None) -> dict:
    T = 1.0 - R
    s = EcsScenario(alpha, T)
    analytic = qfi_analytic(s).F
    space = FockSpace(truncation, 2) if truncation is not None else None
    if space is None and abs(alpha) > 0:
        space = FockSpace.adaptive(alpha, 2)
    numeric = numeric_qfi_lossy(alpha, T, space or FockSpace(15, 2))
    err = abs(analytic - numeric) / analytic if analytic > 0 else abs(numeric)
    eig_err = None
    if abs(alpha) > 0 and T > 0:
        op = s.as_rank2()
        route_a = eig_nonorthogonal(op)
        route_b = eig_nonorthogonal_direct(op)
        closed = eigen_tilde(s)
        eig_err = max(
            abs(route_a.lambda_plus - route_b.lambda_plus),
            abs(route_a.lambda_minus - route_b.lambda_minus),
            abs(route_a.lambda_plus - closed.lambda_plus),
            abs(route_a.lambda_minus - closed.lambda_minus),
        )
    return {"R": R, "T": T, "F_analytic": analytic, "F_numeric": numeric,
            "rel_error": err, "eig_error": eig_err}


def cmd_verify(cfg: RunConfig) -> int:
    if not cfg.grid:
        raise ConfigError("verify needs a non-empty grid")
    rows = []
    for R in cfg.grid:
        try:
            rows.append(_verify_point(cfg.alpha, R, cfg.truncation))
        except (QfiError, ArithmeticError) as exc:
            raise NumericFailure(f"R={R!r}: {exc}") from exc
    worst = max(rows, key=lambda r: r["rel_error"])
    eig_errors = [r["eig_error"] for r in rows if r["eig_error"] is not None]
    max_eig = max(eig_errors, default=0.0)
    passed = worst["rel_error"] < QFI_REL_TOL and max_eig < EIG_TOL
    report = {
        "alpha": [cfg.alpha.real, cfg.alpha.imag],
        "thresholds": {"qfi_rel": QFI_REL_TOL, "eigenvalue": EIG_TOL},
        "max_rel_error": worst["rel_error"],
        "max_eig_error": max_eig,
        "worst": worst,
        "passed": passed,
        "points": rows,
    }
    _emit(json.dumps(report, indent=2) + "\n", cfg.out)
    if not passed:
        print(f"verification failed; worst point R={worst['R']!r} "
              f"(rel error {worst['rel_error']:.3e}, max eigenvalue error {max_eig:.3e})",
              file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _json_residual(x):
    if x is None:
        return None
    return fmt_float(x) if abs(x) < 1e-15 else x


def cmd_crossings(cfg: RunConfig) -> int:
    try:
        report = find_crossings(cfg.alpha, cfg.tolerance)
    except (QfiError, ArithmeticError) as exc:
        raise NumericFailure(str(exc)) from exc
    payload = {
        "alpha": [cfg.alpha.real, cfg.alpha.imag],
        "tolerance": cfg.tolerance,
        "limits": {
            "shot_noise": report.limits.shot_noise,
            "heisenberg": report.limits.heisenberg,
            "hofmann": report.limits.hofmann,
        },
    }
    for name in CROSSING_LIMITS:
        payload[name] = report.crossings[name].R
    payload["residuals"] = {n: _json_residual(c.residual) for n, c in report.crossings.items()}
    payload["brackets"] = {n: c.bracket and list(c.bracket) for n, c in report.crossings.items()}
    payload["absent"] = {n: c.absent for n, c in report.crossings.items()}
    _emit(json.dumps(payload, indent=2) + "\n", cfg.out)
    return EXIT_OK


COMMANDS = {"sweep": cmd_sweep, "verify": cmd_verify, "crossings": cmd_crossings}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecs-qfi",
        description="Quantum Fisher information of entangled coherent states under photon loss.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("sweep", "QFI and precision limits over a reflectivity grid"),
        ("verify", "compare the closed form against the Fock-space oracle"),
        ("crossings", "reflectivities where the QFI meets each precision limit"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--alpha", required=True, help="input amplitude: real or complex literal, e.g. 2 or 1+1j")
        p.add_argument("--phase", type=float, default=0.0, help="extra phase of alpha in radians")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--tolerance", type=float, default=1e-6)
        if name != "crossings":
            p.add_argument("--r", dest="grid", default=DEFAULT_GRIDS[name],
                           help="reflectivities: start:stop:step or comma list")
        if name == "sweep":
            p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
        if name == "verify":
            p.add_argument("--truncation", type=int, help="per-mode photon cutoff (default: adaptive)")
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    if not args.tolerance > 0:
        raise ConfigError("tolerance must be positive")
    truncation = getattr(args, "truncation", None)
    if truncation is not None and truncation < 1:
        raise ConfigError("truncation must be >= 1")
    return RunConfig(
        command=args.command,
        alpha=parse_alpha(args.alpha, args.phase),
        grid=parse_grid(args.grid) if hasattr(args, "grid") else [],
        truncation=truncation,
        out=args.out,
        fmt=getattr(args, "fmt", "json"),
        tolerance=args.tolerance,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
