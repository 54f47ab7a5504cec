"""Command-line entry point: ``noiseinv {sweep,purity-audit,verify,ingest,analytic}``.

Exit codes: 0 success, 1 invariant violation, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import channel as ch
from . import experiments, noise, verify
from .noise import NoiseFamily
from .sampling import EnsembleSpec

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "noise": "depolarizing",
    "qubits": 2,
    "epsilons": list(noise.DEFAULT_EPSILONS),
    "ensemble": "haar",
    "samples": 10_000,
    "seed": 0,
    "cut": None,
    "out": None,
    "format": "csv",
}


class UsageError(Exception):
    pass


def _epsilons(text):
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --epsilons value {text!r}") from exc


def _add_common(p: argparse.ArgumentParser, *, ensemble=True):
    p.add_argument("--config", help="JSON file with the same keys as the flags")
    p.add_argument("--noise", help="pauli[:axes] | depolarizing | dephasing | amplitude_damping")
    p.add_argument("--qubits", type=int)
    p.add_argument("--epsilons", help="comma-separated error rates")
    if ensemble:
        p.add_argument("--ensemble", help="haar | signed | physical")
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--cut", type=int, help="number of leading qubits in subsystem A")
        p.add_argument("--out", help="output file")
        p.add_argument("--format", choices=("csv", "json"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noiseinv", description="Noise inverses, implementability and negativity experiments."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="|Delta E_N| distributions over an epsilon grid")
    _add_common(p)
    p.add_argument("--no-inject", action="store_true",
                   help="do not prepend the maximally entangled reference state")

    p = sub.add_parser("purity-audit", help="check the purity-ratio bounds over an ensemble")
    _add_common(p)

    p = sub.add_parser("verify", help="run the built-in invariant suites")
    p.add_argument("target", nargs="?", default="all", choices=("all",) + verify.MODULES)
    p.add_argument("--out", help="write the JSON report here instead of stdout")

    p = sub.add_parser("ingest", help="audit a channel stored as Choi JSON")
    p.add_argument("path")
    p.add_argument("--cut", type=int)

    p = sub.add_parser("analytic", help="closed-form nu, mu and max-entangled Delta E_N")
    _add_common(p, ensemble=False)
    p.add_argument("--format", choices=("csv", "json"), default=None)
    return parser


def _settings(args) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    cfg["epsilons"] = _epsilons(cfg["epsilons"])
    return cfg


def _sweep_config(s: dict, inject: bool = True) -> experiments.SweepConfig:
    try:
        fam = NoiseFamily.parse(s["noise"], int(s["qubits"]))
        spec = EnsembleSpec(s["ensemble"], int(s["qubits"]), int(s["samples"]), int(s["seed"]))
        return experiments.SweepConfig(fam, tuple(s["epsilons"]), spec, s["cut"], s["out"],
                                       s["format"], inject_max_entangled=inject)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from exc


def _print_rows(rows, fields, stream=None):
    stream = stream or sys.stdout
    stream.write("\t".join(fields) + "\n")
    for r in rows:
        stream.write("\t".join("" if r[f] is None else
                               (f"{r[f]:.10g}" if isinstance(r[f], float) else str(r[f]))
                               for f in fields) + "\n")


def cmd_sweep(args) -> int:
    cfg = _sweep_config(_settings(args), inject=not args.no_inject)
    try:
        result = experiments.run_sweep(cfg)
    except experiments.ConfigError as exc:
        raise UsageError(str(exc)) from exc
    if cfg.output:
        experiments.write_result(result, cfg.output, cfg.format, "sweep")
    rows = experiments.summary_table(result.summaries)
    _print_rows(rows, ["epsilon", "count", "abs_delta_max", "abs_delta_mean", "nu_inverse",
                       "mu_inverse", "max_entangled_delta", "bound_violation_count",
                       "increase_violation_count", "mu_fraction"])
    return EXIT_VIOLATION if result.violations else EXIT_OK


def cmd_purity_audit(args) -> int:
    cfg = _sweep_config(_settings(args), inject=False)
    try:
        result = experiments.run_purity_audit(cfg)
    except experiments.AuditRefused as exc:
        raise UsageError(str(exc)) from exc
    if cfg.output:
        experiments.write_result(result, cfg.output, cfg.format, "purity-audit")
    rows = [vars(s) for s in result.summaries]
    _print_rows(rows, ["epsilon", "count", "degenerate_count", "violation_count",
                       "shrink_violation_count", "max_exact_deviation", "ratio_min", "ratio_max"])
    return EXIT_VIOLATION if result.violations else EXIT_OK


def cmd_verify(args) -> int:
    report = verify.run(args.target)
    text = json.dumps(report, indent=1)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    for suite, results in report["suites"].items():
        for r in results:
            print(f"{'PASS' if r['passed'] else 'FAIL'} {suite}.{r['name']}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_VIOLATION


def cmd_ingest(args) -> int:
    try:
        report = experiments.ingest_channel(args.path, args.cut)
    except (OSError, ch.ChannelError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    print(json.dumps(report, indent=1))
    return EXIT_OK


def cmd_analytic(args) -> int:
    s = _settings(args)
    try:
        fam = NoiseFamily.parse(s["noise"], int(s["qubits"]))
        rows = experiments.analytic_table(fam, s["epsilons"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if s["format"] == "json" and args.format == "json":
        print(json.dumps(rows, indent=1))
    else:
        _print_rows(rows, list(rows[0]))
    return EXIT_OK


COMMANDS = {
    "sweep": cmd_sweep,
    "purity-audit": cmd_purity_audit,
    "verify": cmd_verify,
    "ingest": cmd_ingest,
    "analytic": cmd_analytic,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"noiseinv {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
