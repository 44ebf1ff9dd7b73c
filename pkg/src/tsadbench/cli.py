"""Command-line surface.

Five subcommands cover the pipeline: `inject` synthesizes labelled corpora,
`analyze` profiles data characteristics, `bench` sweeps detector grids,
`report` turns saved records into tables and figures, and `validate` checks
a corpus against its manifest. Exit codes: 0 success, 1 usage error, 2 data
error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from importlib import resources
from pathlib import Path

from .characteristics import classify
from .detectors import DetectorSpec
from .errors import MalformedFile, TsadBenchError
from .ingest import load_corpus, load_manifest, load_series, validate_corpus
from .metrics import METRIC_NAMES
from .protocol import STRATEGY_MODES, StrategyConfig, aggregate, grid_run
from .report import GROUP_KEYS, cd_diagram_data, leaderboard, load_records, save_records
from .synthesis import KINDS, gen_all_suites, gen_suite

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _UsageError(Exception):
    def __init__(self, usage: str, message: str) -> None:
        super().__init__(message)
        self.usage = usage


class _Parser(argparse.ArgumentParser):
    # argparse exits the process on bad input; surface it as a code instead
    def error(self, message: str) -> None:
        raise _UsageError(self.format_usage(), message)


def load_grid(path: str | Path | None = None, window: int | None = None) -> list[DetectorSpec]:
    """Parse a detector grid file into specs; None loads the packaged default.

    A grid file is a JSON object with a "configs" list; each config names a
    detector kind plus optional name, window, and hyperparams. A window
    argument overrides every config.
    """
    if path is None:
        text = resources.files("tsadbench").joinpath("data/default_grid.json").read_text()
        source = "<default grid>"
    else:
        text = Path(path).read_text()
        source = str(path)
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"{source}: not valid JSON ({exc})") from exc
    configs = payload.get("configs") if isinstance(payload, dict) else None
    if not isinstance(configs, list) or not configs:
        raise MalformedFile(f"{source}: expected an object with a non-empty 'configs' list")
    specs = []
    for index, config in enumerate(configs):
        if not isinstance(config, dict) or "kind" not in config:
            raise MalformedFile(f"{source}: config {index} must be an object with a 'kind'")
        specs.append(
            DetectorSpec(
                kind=config["kind"],
                name=config.get("name", ""),
                window=window if window is not None else config.get("window", 32),
                hyperparams=dict(config.get("hyperparams", {})),
            )
        )
    return specs


def _resolve_threads(value: int | None) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get("TSADBENCH_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            print(f"warning: ignoring non-integer TSADBENCH_THREADS={env!r}", file=sys.stderr)
    return 1


def build_parser() -> _Parser:
    parser = _Parser(prog="tsadbench", description=__doc__.split("\n\n")[1])
    parser.add_argument("--seed", type=int, default=0, help="global random seed")
    commands = parser.add_subparsers(dest="command", metavar="command")
    # subcommands re-accept --seed after the command word; SUPPRESS keeps the
    # global default from clobbering a value given before it
    seed_kwargs = dict(type=int, default=argparse.SUPPRESS, help=argparse.SUPPRESS)

    inject = commands.add_parser("inject", help="synthesize labelled anomaly suites")
    inject.add_argument("--out", required=True, help="output directory")
    inject.add_argument("--kind", choices=KINDS + ("all",), default="all")
    inject.add_argument("--n", type=int, default=10, help="series per suite")
    inject.add_argument("--seed", **seed_kwargs)

    analyze = commands.add_parser("analyze", help="profile data characteristics")
    target = analyze.add_mutually_exclusive_group(required=True)
    target.add_argument("--corpus", help="manifest.json of a corpus")
    target.add_argument("--series", help="a single series CSV")
    analyze.add_argument("--out", help="write the table here instead of stdout")
    analyze.add_argument("--seed", **seed_kwargs)

    bench = commands.add_parser("bench", help="run a detector grid over a corpus")
    bench.add_argument("--corpus", required=True, help="manifest.json of the corpus")
    bench.add_argument("--grid", help="detector grid JSON; defaults to the packaged grid")
    bench.add_argument("--strategy", choices=STRATEGY_MODES, default="full")
    bench.add_argument("--few-fraction", type=float, default=0.05)
    bench.add_argument("--window", type=int, help="override every config's window")
    bench.add_argument("--overlap", action="store_true", help="stride-1 windows")
    bench.add_argument("--threads", type=int, help="defaults to $TSADBENCH_THREADS or 1")
    bench.add_argument("--out", required=True, help="records directory")
    bench.add_argument("--enable-point-adjust", action="store_true")
    bench.add_argument("--selection-metric", choices=METRIC_NAMES, default="V-PR")
    bench.add_argument("--seed", **seed_kwargs)

    report = commands.add_parser("report", help="tables and figures from saved records")
    report.add_argument("--records", required=True, help="a bench output directory")
    report.add_argument("--metric", choices=METRIC_NAMES, default="V-PR")
    report.add_argument("--group-by", choices=GROUP_KEYS, default="dataset")
    report.add_argument("--out", required=True, help="output directory")
    report.add_argument("--seed", **seed_kwargs)

    validate = commands.add_parser("validate", help="check a corpus against its manifest")
    validate.add_argument("--corpus", required=True, help="manifest.json to check")
    validate.add_argument("--seed", **seed_kwargs)
    return parser


def _cmd_inject(args) -> int:
    out = Path(args.out)
    if args.kind == "all":
        _, manifest = gen_all_suites(args.n, args.seed, out_dir=out)
    else:
        _, manifest = gen_suite(args.kind, args.n, args.seed, out_dir=out)
    print(f"wrote {len(manifest)} series and manifest.json to {out}")
    return EXIT_OK


_ANALYZE_COLUMNS = (
    "name",
    "trend_score",
    "trend",
    "seasonality_score",
    "period",
    "seasonality",
    "shifting_score",
    "shifting",
    "transition",
    "stationarity_score",
    "stationarity",
)


def _profile_row(name: str, profile) -> list[str]:
    return [
        name,
        f"{profile.trend_score:.6f}",
        str(int(profile.trend)),
        f"{profile.seasonality_score:.6f}",
        "" if profile.period is None else str(profile.period),
        str(int(profile.seasonality)),
        f"{profile.shifting_score:.6f}",
        str(int(profile.shifting)),
        str(int(profile.transition)),
        f"{profile.stationarity_score:.6f}",
        str(int(profile.stationarity)),
    ]


def _cmd_analyze(args) -> int:
    rows = [list(_ANALYZE_COLUMNS)]
    if args.series:
        series = load_series(args.series)
        rows.append(_profile_row(series.name, classify(series)))
    else:
        manifest_path = Path(args.corpus)
        for entry in load_manifest(manifest_path):
            series = load_series(manifest_path.parent / entry.path, name=entry.name)
            rows.append(_profile_row(entry.name, classify(series)))
    if args.out:
        with open(args.out, "w", newline="") as handle:
            csv.writer(handle).writerows(rows)
        print(f"wrote {len(rows) - 1} profiles to {args.out}")
    else:
        csv.writer(sys.stdout).writerows(rows)
    return EXIT_OK


def _cmd_bench(args) -> int:
    corpus = load_corpus(args.corpus)
    specs = load_grid(args.grid, window=args.window)
    result = grid_run(
        corpus,
        specs,
        strategy=StrategyConfig(mode=args.strategy, few_fraction=args.few_fraction),
        overlap="overlapping" if args.overlap else "non_overlapping",
        selection_metric=args.selection_metric,
        enable_point_adjust=args.enable_point_adjust,
        global_seed=args.seed,
        threads=_resolve_threads(args.threads),
    )
    out = Path(args.out)
    csv_path = save_records(result.records, out)
    with open(out / "summary.json", "w") as handle:
        json.dump(aggregate(result.records), handle, indent=2, sort_keys=True)
        handle.write("\n")
    failed = sum(record.status != "ok" for record in result.records)
    print(f"{len(result.records)} runs ({failed} failed) -> {csv_path}")
    return EXIT_OK


def _cmd_report(args) -> int:
    from .figures import render_cd_diagram, render_leaderboard

    records = load_records(args.records)
    board = leaderboard(records, args.metric, group_by=args.group_by)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "leaderboard.csv", "w", newline="") as handle:
        csv.writer(handle).writerows(board.rows())
    written = ["leaderboard.csv"]
    render_leaderboard(board, out / "leaderboard.png")
    written.append("leaderboard.png")
    if board.ranking is not None:
        data = cd_diagram_data(board.ranking)
        with open(out / "cd_diagram.json", "w") as handle:
            json.dump(data, handle, indent=2)
            handle.write("\n")
        render_cd_diagram(data, out / "cd_diagram.png")
        written.extend(["cd_diagram.json", "cd_diagram.png"])
    print(f"wrote {', '.join(written)} to {out}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    problems = validate_corpus(args.corpus)
    if problems:
        for problem in problems:
            print(problem, file=sys.stderr)
        return EXIT_DATA
    print(f"ok: {len(load_manifest(args.corpus))} series validated")
    return EXIT_OK


_HANDLERS = {
    "inject": _cmd_inject,
    "analyze": _cmd_analyze,
    "bench": _cmd_bench,
    "report": _cmd_report,
    "validate": _cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(exc.usage)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help path
        return int(exc.code or 0)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return _HANDLERS[args.command](args)
    except (TsadBenchError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
