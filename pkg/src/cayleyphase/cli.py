"""Command-line front end.

Subcommands: ``diagnose`` (full single-point report), ``scan`` (parameter
plane with CSV/JSON output), ``curves`` (critical-curve table), ``partition``
(partition function and free energy at a point), ``verify`` (built-in
cross-checks).

Exit codes: 0 success, 1 usage error, 2 numeric-range error, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import Couplings, DomainError, ParameterRangeError, StateVector, derive_params
from .dynamics import KERNEL_BACKEND, classify_phase, iterate
from .ferro import solve_ferro_fixed_points
from .partition import free_energy_density, partition_recurrence, partition_recurrence_log
from .scan import AxisSpec, ScanConfig, format_csv, format_json, run_scan
from .symmetric import (
    critical_temperature,
    phase_counts,
    solve_fixed_points,
    solve_two_cycles,
    tabulate_critical_curves,
)
from .verify import run_verify

USAGE_ERROR = 1
RANGE_ERROR = 2
VERIFY_ERROR = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; this tool reserves 2 for numeric
    # range problems, so remap
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _json_safe(obj):
    # strict JSON has no Infinity/NaN literals
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _parse_axis(text: str) -> AxisSpec:
    parts = text.split(":")
    if len(parts) != 4:
        raise DomainError(f"axis {text!r} must be name:min:max:steps")
    name, lo, hi, steps = parts
    try:
        return AxisSpec(name=name, min=float(lo), max=float(hi), steps=int(steps))
    except ValueError as exc:
        raise DomainError(f"bad axis {text!r}: {exc}") from exc


def _parse_seeds(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip() != ""]
    except ValueError as exc:
        raise DomainError(f"bad seed list {text!r}") from exc


def _write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        print(f"cannot write {path}: {exc}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR) from exc


def _build_parser() -> _Parser:
    parser = _Parser(prog="cayleyphase", description=__doc__)
    parser.add_argument("--version", action="version", version=f"cayleyphase {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_point_args(sp):
        sp.add_argument("--j1", type=float, default=None)
        sp.add_argument("--j2", type=float, default=None)
        sp.add_argument("--temperature", type=float, default=None)

    sp = sub.add_parser("diagnose", help="full report for one parameter point")
    add_point_args(sp)
    sp.add_argument("--seeds", type=str, default="0")
    sp.add_argument("--max-iter", type=int, default=20000)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.add_argument("--output", type=str, default=None)

    sp = sub.add_parser("scan", help="evaluate a 1- or 2-axis parameter grid")
    add_point_args(sp)
    sp.add_argument("--axis", action="append", default=[], metavar="NAME:MIN:MAX:STEPS")
    sp.add_argument("--seeds", type=str, default="0")
    sp.add_argument("--max-iter", type=int, default=20000)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--output", type=str, default=None)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--config", type=str, default=None, help="JSON file overriding flags")

    sp = sub.add_parser("curves", help="critical-curve table over a j2 range")
    sp.add_argument("--axis", action="append", default=[], metavar="j2:MIN:MAX:STEPS")
    sp.add_argument("--temperature", type=float, required=True)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--output", type=str, default=None)

    sp = sub.add_parser("partition", help="partition function and free energy")
    add_point_args(sp)
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--log", action="store_true", help="log-scaled mode (any depth)")
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.add_argument("--output", type=str, default=None)

    sub.add_parser("verify", help="run the built-in cross-checks")
    return parser


def _require_point(args) -> Couplings:
    missing = [n for n in ("j1", "j2", "temperature") if getattr(args, n) is None]
    if missing:
        raise DomainError(f"missing required parameter(s): {', '.join(missing)}")
    return Couplings(j1=args.j1, j2=args.j2, temperature=args.temperature)


def _cmd_diagnose(args) -> int:
    c = _require_point(args)
    seeds = _parse_seeds(args.seeds)
    p = derive_params(c)
    t_c = critical_temperature(c.j2)
    para, comm2 = phase_counts(c)
    fixed = solve_fixed_points(p)
    cycles = solve_two_cycles(p)
    ferro = solve_ferro_fixed_points(p)

    runs = []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        u0 = StateVector(*(10.0 ** rng.uniform(-2.0, 2.0, size=4)))
        outcome = iterate(p, u0, max_iter=args.max_iter, tol=args.tol)
        label = classify_phase(p, outcome)
        runs.append((seed, outcome, label))
    phases = [label.phase for _, _, label in runs]
    # majority phase; ties resolved by first appearance, for determinism
    consensus = max(dict.fromkeys(phases), key=phases.count)

    report = {
        "couplings": {"j1": c.j1, "j2": c.j2, "temperature": c.temperature},
        "weights": {"a": p.a, "b": p.b, "alpha": p.alpha, "a_tilde": p.a_tilde, "b_tilde": p.b_tilde},
        "critical_temperature": t_c,
        "below_critical": (t_c is not None and c.temperature < t_c),
        "phase_counts": {"paramagnetic": para, "two_commensurate": comm2},
        "fixed_points": [
            {"x": r.x, "derivative": r.derivative, "stability": r.stability} for r in fixed.roots
        ],
        "fixed_point_regime": fixed.regime,
        "two_cycles": {
            "b_coeff": cycles.b_coeff,
            "discriminant": cycles.discriminant,
            "roots": list(cycles.roots),
            "degenerate": cycles.degenerate,
        },
        "ferro_fixed_points": [
            {"C": f.C, "u": list(f.u.components), "residual": f.full_residual} for f in ferro
        ],
        "trajectories": [
            {
                "seed": seed,
                "phase": label.phase,
                "period": label.period,
                "iterations": outcome.iterations_used,
                "residual": outcome.residual,
                "m1_residual": label.m1_residual,
                "m2_residual": label.m2_residual,
            }
            for seed, outcome, label in runs
        ],
        "consensus_phase": consensus,
        "kernel_backend": KERNEL_BACKEND,
    }
    if args.format == "json":
        _write_output(
            json.dumps(_json_safe(report), indent=2, sort_keys=True, allow_nan=False) + "\n",
            args.output,
        )
        return 0
    lines = [
        f"point: j1={_fmt(c.j1)} j2={_fmt(c.j2)} T={_fmt(c.temperature)}",
        f"weights: a={_fmt(p.a)} b={_fmt(p.b)} b^4={_fmt(p.b_tilde)}",
        f"critical temperature: {'n/a (j2=0)' if t_c is None else _fmt(t_c)}"
        + ("" if t_c is None else f"  ({'below' if c.temperature < t_c else 'at/above'} it)"),
        f"phase counts: paramagnetic={para} two-commensurate={comm2}",
        f"fixed points ({fixed.regime}):",
    ]
    for r in fixed.roots:
        lines.append(f"  x={_fmt(r.x)}  f'={_fmt(r.derivative)}  {r.stability}")
    if cycles.roots:
        tag = " (degenerate)" if cycles.degenerate else ""
        lines.append("two-cycle ratios" + tag + ": " + ", ".join(_fmt(x) for x in cycles.roots))
    else:
        lines.append("two-cycle ratios: none")
    if ferro:
        lines.append("ferro fixed points:")
        for f in ferro:
            lines.append(f"  u=({', '.join(_fmt(x) for x in f.u.components)})  residual={f.full_residual:.2e}")
    else:
        lines.append("ferro fixed points: none")
    lines.append("trajectories:")
    for seed, outcome, label in runs:
        extra = f" period={label.period}" if label.period else ""
        lines.append(
            f"  seed={seed}: {label.phase}{extra} after {outcome.iterations_used} iterations"
            f" (m1={label.m1_residual:.2e}, m2={label.m2_residual:.2e})"
        )
    lines.append(f"consensus: {consensus}")
    _write_output("\n".join(lines) + "\n", args.output)
    return 0


def _cmd_scan(args) -> int:
    cfg_kwargs = {
        "axes": [_parse_axis(a) for a in args.axis],
        "j1": args.j1,
        "j2": args.j2,
        "temperature": args.temperature,
        "seeds": _parse_seeds(args.seeds),
        "max_iter": args.max_iter,
        "tol": args.tol,
        "format": args.format,
        "workers": args.workers,
    }
    if args.config:
        try:
            overrides = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"cannot read config {args.config}: {exc}", file=sys.stderr)
            return USAGE_ERROR
        if "axes" in overrides:
            overrides["axes"] = [AxisSpec(**a) for a in overrides["axes"]]
        cfg_kwargs.update(overrides)
    cfg = ScanConfig(**cfg_kwargs)
    rows = run_scan(cfg)
    text = format_csv(rows) if cfg.format == "csv" else format_json(rows, cfg)
    _write_output(text, args.output)
    return 0


def _cmd_curves(args) -> int:
    axes = [_parse_axis(a) for a in args.axis]
    if len(axes) != 1 or axes[0].name != "j2":
        raise DomainError("curves needs exactly one axis, over j2")
    samples = tabulate_critical_curves(axes[0].values(), args.temperature)
    if args.format == "json":
        payload = [
            {"j2": s.j2, "j1_plus": s.j1_plus, "j1_minus": s.j1_minus} for s in samples
        ]
        _write_output(json.dumps(payload, indent=2) + "\n", args.output)
        return 0
    lines = ["j2,j1_plus,j1_minus"]
    for s in samples:
        plus = "" if s.j1_plus is None else _fmt(s.j1_plus)
        minus = "" if s.j1_minus is None else _fmt(s.j1_minus)
        lines.append(f"{_fmt(s.j2)},{plus},{minus}")
    _write_output("\n".join(lines) + "\n", args.output)
    return 0


def _cmd_partition(args) -> int:
    c = _require_point(args)
    p = derive_params(c)
    if args.depth < 1:
        raise DomainError("--depth must be >= 1")
    result = {"depth": args.depth, "free_energy_density": free_energy_density(c, args.depth)}
    if args.log:
        log_z, _, _ = partition_recurrence_log(p, args.depth)
        result["log_Z"] = log_z
    else:
        z, _ = partition_recurrence(p, args.depth)
        result["Z"] = z
    if args.format == "json":
        _write_output(json.dumps(result, indent=2, sort_keys=True) + "\n", args.output)
        return 0
    lines = [f"depth: {args.depth}"]
    if "Z" in result:
        lines.append(f"Z = {_fmt(result['Z'])}")
    else:
        lines.append(f"log Z = {_fmt(result['log_Z'])}")
    lines.append(f"free energy density = {_fmt(result['free_energy_density'])}")
    _write_output("\n".join(lines) + "\n", args.output)
    return 0


def _cmd_verify(_args) -> int:
    results = run_verify()
    failed = False
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name}: {r.detail}")
        failed = failed or not r.passed
    return VERIFY_ERROR if failed else 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "diagnose": _cmd_diagnose,
            "scan": _cmd_scan,
            "curves": _cmd_curves,
            "partition": _cmd_partition,
            "verify": _cmd_verify,
        }[args.command]
        return handler(args)
    except ParameterRangeError as exc:
        print(f"numeric range error: {exc}", file=sys.stderr)
        return RANGE_ERROR
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
