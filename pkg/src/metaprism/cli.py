"""Command-line entry point: ``metaprism <command> --scenario file.yaml --out table.csv``.

Every table is CSV with a leading ``#`` comment block recording the command,
the resolved scenario (and its sha256), the seed and the PRNG. Floats are
written with ``repr`` so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments
from .core import Angle2D
from .link import AssignmentError
from .scenario import PROFILES, SURFACES, ConfigError, Scenario


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def format_table(rows, header_lines=()) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    if rows:
        columns = list(rows[0])
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def provenance(command: str, scenario: Scenario) -> list[str]:
    return [
        f"command: {command}",
        f"scenario_sha256: {scenario.digest()}",
        f"seed: {scenario.seed}",
        f"prng: {experiments.PRNG_NAME}",
        f"scenario: {scenario.canonical_json()}",
    ]


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.replace(",", " ").split()]


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="metaprism", description="Frequency-selective metasurface coverage experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", type=Path, help="YAML scenario file (defaults to the built-in street corner)")
        p.add_argument("--out", type=Path, help="output CSV (stdout when omitted)")
        p.add_argument("--seed", type=int, help="64-bit PRNG seed")
        p.add_argument("--profile", choices=PROFILES, help="metaprism phase profile")
        p.add_argument("--surface", choices=SURFACES, help="reflecting surface(s) present")
        p.add_argument("--workers", type=int, help="worker processes")
        return p

    p = common(sub.add_parser("snr-map", help="SNR over the receiver grid"))
    p.add_argument("--subcarriers", type=_int_list, help="1-based subcarrier list, e.g. '1,128,256'")

    p = common(sub.add_parser("pl-sweep", help="path loss versus distance along a ray"))
    p.add_argument("--distances", type=_float_list, help="distances in metres")
    p.add_argument("--theta", type=float, default=None, help="ray inclination in degrees (default boresight)")

    p = common(sub.add_parser("rate-sweep", help="mean per-user rate versus number of users"))
    p.add_argument("--users", type=_int_list, help="user counts, e.g. '2,5,10'")
    p.add_argument("--trials", type=int, help="random drops per user count")
    p.add_argument(
        "--compare", action="store_true", help="evaluate wall-only and wall-plus-metaprism on the same drops"
    )

    p = common(sub.add_parser("array-factor", help="normalised array-factor cuts"))
    p.add_argument("--subcarriers", type=_int_list)
    p.add_argument("--theta-step", type=float, default=0.1, help="cut resolution in degrees")

    common(sub.add_parser("lc-export", help="per-cell series LC loads"))
    return parser


def _scenario(args) -> Scenario:
    scenario = Scenario.load(args.scenario) if args.scenario else Scenario()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.profile:
        overrides["metaprism.profile"] = args.profile
    if args.surface:
        overrides["surface"] = args.surface
    if args.workers is not None:
        overrides["workers"] = args.workers
    if getattr(args, "trials", None) is not None:
        overrides["trials"] = args.trials
    return scenario.replace(**overrides).validate() if overrides else scenario.validate()


def run(args) -> str:
    scenario = _scenario(args)
    cmd = args.command
    if cmd == "snr-map":
        rows = experiments.run_snr_map(scenario, args.subcarriers)
    elif cmd == "pl-sweep":
        distances = args.distances or experiments.default_distances(scenario)
        direction = Angle2D.from_degrees(args.theta) if args.theta is not None else None
        rows = experiments.run_pl_sweep(scenario, distances, direction)
    elif cmd == "rate-sweep":
        users = args.users if args.users is not None else [scenario.users]
        variants = None
        if args.compare:
            variants = [("wall", scenario.metaprism.profile), ("both", scenario.metaprism.profile)]
        rows = experiments.run_rate_sweep(scenario, users, variants=variants)
    elif cmd == "array-factor":
        thetas = np.round(np.arange(-90.0, 90.0 + 1e-9, args.theta_step), 10)
        rows = experiments.run_array_factor(scenario, args.subcarriers, thetas)
    else:
        rows = experiments.run_lc_export(scenario)
    return format_table(rows, provenance(cmd, scenario))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = run(args)
    except (ConfigError, AssignmentError, ValueError, KeyError, OSError) as exc:
        kind = "capacity_error" if isinstance(exc, AssignmentError) else (
            "config_error" if isinstance(exc, (ConfigError, KeyError)) else
            "io_error" if isinstance(exc, OSError) else "value_error"
        )
        print(json.dumps({"error": kind, "command": args.command, "message": str(exc)}), file=sys.stderr)
        return 2
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
