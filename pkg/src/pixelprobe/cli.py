"""Command-line interface.

Subcommands: defect-test, rare-search, sweep, overlap-tail, validate-oracle.
Every stochastic subcommand requires --seed (no wall-clock seeding), prints a
results table to stdout and, with --out PATH, writes the same rows as CSV with
12 significant digits.  Exit codes: 0 success, 1 validation failure (oracle
mismatch, non-terminating run), 2 bad input or parse error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import PixelArray
from .harness import (
    SweepRow,
    TrialStats,
    defect_experiment,
    rare_search_experiment,
    run_trials,
    scaling_sweep,
    validation_scenario,
)
from .oracle import exact_overlap_tail, exact_round_distribution
from .protocols import sample_round_codes
from .scenario import ScenarioError, load_scenario

__all__ = ["main", "write_results", "RESULT_COLUMNS"]

# CLI guard against non-terminating rare-search runs on heavily absorbing
# arrays; exceeding it is reported as a validation failure (exit 1).
RARE_SEARCH_MAX_ROUNDS = 1_000_000

RESULT_COLUMNS = {
    "stats": ("trials", "successes", "point_estimate", "ci_low", "ci_high", "mean_absorptions"),
    "sweep": ("n", "quantum_absorptions", "classical_absorptions", "ratio", "rounds", "shots"),
    "tail": ("n", "samples", "threshold", "exceeded", "fraction"),
    "oracle": ("outcome", "probability", "frequency", "z_score"),
}


def _row_values(row, kind: str) -> tuple:
    if kind == "stats":
        return (
            row.trials,
            row.successes,
            row.point_estimate,
            row.ci_low,
            row.ci_high,
            row.mean_absorptions,
        )
    if kind == "sweep":
        return (
            row.n,
            row.quantum_absorptions,
            row.classical_absorptions,
            row.ratio,
            row.rounds,
            row.shots,
        )
    return tuple(row)


def _kind_of(row) -> str:
    if isinstance(row, TrialStats):
        return "stats"
    if isinstance(row, SweepRow):
        return "sweep"
    raise ValueError(f"cannot infer result kind for {type(row).__name__}; pass kind=")


def _format_value(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def write_results(rows: Sequence, path: str | Path, *, kind: Optional[str] = None) -> None:
    """Write rows as comma-separated text with a header; 12 significant digits,
    byte-deterministic for identical inputs."""
    if kind is None:
        if not rows:
            raise ValueError("empty row list needs an explicit kind=")
        kind = _kind_of(rows[0])
    if kind not in RESULT_COLUMNS:
        raise ValueError(f"unknown result kind {kind!r}")
    columns = RESULT_COLUMNS[kind]
    lines = [",".join(columns)]
    for row in rows:
        values = _row_values(row, kind)
        if len(values) != len(columns):
            raise ValueError(f"row has {len(values)} values, expected {len(columns)}")
        lines.append(",".join(_format_value(v) for v in values))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _print_table(columns: Sequence[str], value_rows: Sequence[tuple]) -> None:
    cells = [list(columns)] + [[_format_value(v) for v in row] for row in value_rows]
    widths = [max(len(line[i]) for line in cells) for i in range(len(columns))]
    for line in cells:
        print("  ".join(cell.rjust(width) for cell, width in zip(line, widths)))


def _emit(rows: Sequence, kind: str, out: Optional[str]) -> None:
    _print_table(RESULT_COLUMNS[kind], [_row_values(r, kind) for r in rows])
    if out:
        write_results(rows, out, kind=kind)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _seed_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return value


def _ns_list(text: str) -> list[int]:
    try:
        sizes = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from exc
    if not sizes:
        raise argparse.ArgumentTypeError("needs at least one array size")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise argparse.ArgumentTypeError("sizes must be strictly increasing")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pixelprobe",
        description="Quantum interrogation of semi-transparent pixel arrays: "
        "defect tests, rare-pattern search, classical baselines and exact oracles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    defect = sub.add_parser("defect-test", help="run the defect-test protocol on a scenario file")
    defect.add_argument("--scenario", required=True, help="scenario JSON file")
    defect.add_argument("--trials", type=_positive_int, required=True)
    defect.add_argument("--seed", type=_seed_int, required=True)
    defect.add_argument("--classical", action="store_true", help="run the photon-counting baseline")
    defect.add_argument("--out", help="write the results table to this CSV path")
    defect.set_defaults(handler=_cmd_defect_test)

    rare = sub.add_parser("rare-search", help="run the rare-pattern search on a scenario file")
    rare.add_argument("--scenario", required=True)
    rare.add_argument("--trials", type=_positive_int, required=True)
    rare.add_argument("--seed", type=_seed_int, required=True)
    rare.add_argument("--classical", action="store_true")
    rare.add_argument("--out")
    rare.set_defaults(handler=_cmd_rare_search)

    sweep = sub.add_parser("sweep", help="absorption-cost sweep over array sizes")
    sweep.add_argument("--ns", type=_ns_list, required=True, help="comma-separated sizes, e.g. 16,64,256,1024")
    sweep.add_argument("--scenario", required=True)
    sweep.add_argument("--trials", type=_positive_int, required=True)
    sweep.add_argument("--seed", type=_seed_int, required=True)
    sweep.add_argument("--out")
    sweep.set_defaults(handler=_cmd_sweep)

    tail = sub.add_parser("overlap-tail", help="tail of the random-array overlap distribution")
    tail.add_argument("--n", type=_positive_int, required=True)
    tail.add_argument("--samples", type=_positive_int, required=True)
    tail.add_argument("--seed", type=_seed_int, required=True)
    tail.add_argument("--out")
    tail.set_defaults(handler=_cmd_overlap_tail)

    validate = sub.add_parser(
        "validate-oracle",
        help="sample interrogation rounds and check frequencies against the exact oracle",
    )
    validate.add_argument("--n", type=_positive_int, required=True)
    validate.add_argument("--samples", type=_positive_int, required=True)
    validate.add_argument("--seed", type=_seed_int, required=True)
    validate.add_argument("--out")
    validate.set_defaults(handler=_cmd_validate_oracle)

    return parser


def _cmd_defect_test(args) -> int:
    scenario = load_scenario(args.scenario)
    config = scenario.defect_config()
    defects = scenario.defect_scenario(config)
    stats = run_trials(
        defect_experiment(defects, config, classical=args.classical), args.trials, args.seed
    )
    _emit([stats], "stats", args.out)
    return 0


def _cmd_rare_search(args) -> int:
    scenario = load_scenario(args.scenario)
    config = scenario.rare_config()
    experiment = rare_search_experiment(
        scenario.actual_array(),
        config,
        classical=args.classical,
        max_rounds=None if args.classical else RARE_SEARCH_MAX_ROUNDS,
    )
    stats = run_trials(experiment, args.trials, args.seed)
    _emit([stats], "stats", args.out)
    return 0


def _cmd_sweep(args) -> int:
    scenario = load_scenario(args.scenario)
    config = scenario.defect_config()
    template = scenario.sweep_template()
    rows = scaling_sweep(args.ns, template, config, args.trials, args.seed)
    _emit(rows, "sweep", args.out)
    return 0


def _cmd_overlap_tail(args) -> int:
    pattern = PixelArray(np.ones(args.n, dtype=np.complex128))  # uniform pattern state
    rng = np.random.default_rng(args.seed)
    fraction = exact_overlap_tail(args.n, pattern, args.samples, rng)
    threshold = 1.0 / math.sqrt(args.n)
    row = (args.n, args.samples, threshold, round(fraction * args.samples), fraction)
    _emit([row], "tail", args.out)
    return 0


def _cmd_validate_oracle(args) -> int:
    scenario = validation_scenario(args.n)
    distribution = exact_round_distribution(scenario.theoretical, scenario.actual)
    probabilities = distribution.as_vector()
    codes = sample_round_codes(
        scenario.theoretical, scenario.actual, args.samples, np.random.default_rng(args.seed)
    )
    frequencies = np.bincount(codes, minlength=probabilities.size) / args.samples

    labels = (
        [f"absorb[{i}]" for i in range(args.n)]
        + ["proj1"]
        + [f"proj0_beam[{i}]" for i in range(args.n)]
    )
    rows = []
    failures = []
    for label, p, freq in zip(labels, probabilities, frequencies):
        sigma = math.sqrt(p * (1.0 - p) / args.samples)
        if sigma > 0.0:
            z = (freq - p) / sigma
            ok = abs(z) <= 4.0
        else:
            z = 0.0
            ok = freq == p
        if not ok:
            failures.append(label)
        rows.append((label, float(p), float(freq), float(z)))
    _emit(rows, "oracle", args.out)
    if failures:
        print(
            f"oracle mismatch beyond 4 sigma for: {', '.join(failures)}",
            file=sys.stderr,
        )
        return 1
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
