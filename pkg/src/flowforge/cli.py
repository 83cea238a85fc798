"""Command-line interface.

Subcommands:

* ``export``    -- run the capture -> labelled flow CSV pipeline
* ``summarize`` -- per-class counts of a labelled CSV (+ figure)
* ``compare``   -- side-by-side class counts of two datasets (+ figure)
* ``features``  -- print the feature dictionary (default column order)

An optional plain-text ``key=value`` config file can seed ``export``;
command-line flags override config-file keys. Run statistics go to
standard error, data only to files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import dataset
from .errors import ConfigError, FlowforgeError
from .pipeline import PipelineConfig, run_pipeline

_CONFIG_KEYS = {
    "input", "interval", "idle_timeout", "active_threshold", "features",
    "ground_truth", "tz_offset", "out", "summary",
}


def _parse_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: line {lineno}: expected key=value")
        key, value = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}: line {lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowforge",
        description="Convert packet captures into labelled flow datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    export = sub.add_parser("export", help="run the capture-to-CSV pipeline")
    export.add_argument("--input", action="append", default=None,
                        help="capture file (repeatable; processed in order)")
    export.add_argument("--interval", type=float, default=None,
                        help="seconds between status records per flow (min 1, default 60)")
    export.add_argument("--idle-timeout", type=float, default=None,
                        help="seconds of inactivity before a flow is closed (default 60)")
    export.add_argument("--active-threshold", type=float, default=None,
                        help="gap, in seconds, separating active periods (default 5)")
    export.add_argument("--features", default=None,
                        help='comma-separated feature names or "all" (default all)')
    export.add_argument("--ground-truth", default=None,
                        help="CSV of attack windows used to label flows")
    export.add_argument("--tz-offset", type=int, default=None,
                        help="UTC offset (seconds) of ground-truth times lacking one")
    export.add_argument("--out", default=None, help="output flow CSV path")
    export.add_argument("--summary", default=None,
                        help="also write a per-class summary CSV here")
    export.add_argument("--config", default=None, help="key=value config file")

    summ = sub.add_parser("summarize", help="per-class counts of a labelled CSV")
    summ.add_argument("csv", help="labelled flow CSV (or any CSV with the label column)")
    summ.add_argument("--label-column", default=dataset.LABEL_COLUMN)
    summ.add_argument("--out", default=None, help="write summary CSV here")
    summ.add_argument("--no-plot", action="store_true",
                      help="skip the figure rendered next to --out")

    comp = sub.add_parser("compare", help="compare class counts of two datasets")
    comp.add_argument("a", help="flow CSV or summary CSV (denominator side)")
    comp.add_argument("b", help="flow CSV or summary CSV")
    comp.add_argument("--label-column", default=dataset.LABEL_COLUMN)
    comp.add_argument("--name-a", default=None, help="display name for side a")
    comp.add_argument("--name-b", default=None, help="display name for side b")
    comp.add_argument("--out", default=None, help="write comparison CSV here")
    comp.add_argument("--no-plot", action="store_true",
                      help="skip the figure rendered next to --out")

    sub.add_parser("features", help="print the feature dictionary in column order")
    return parser


def _resolve_export_config(args: argparse.Namespace) -> PipelineConfig:
    file_values = _parse_config_file(args.config) if args.config else {}

    def pick(flag_value, key: str, default):
        if flag_value is not None:
            return flag_value
        if key in file_values:
            return file_values[key]
        return default

    inputs = args.input
    if inputs is None and "input" in file_values:
        inputs = [p.strip() for p in file_values["input"].split(",") if p.strip()]
    features_spec = pick(args.features, "features", "all")
    if isinstance(features_spec, str):
        if features_spec.strip().lower() == "all":
            features = list(dataset.DEFAULT_FEATURES)
        else:
            features = [f.strip() for f in features_spec.split(",") if f.strip()]
    else:
        features = list(features_spec)

    return PipelineConfig(
        inputs=inputs or [],
        interval=float(pick(args.interval, "interval", 60.0)),
        idle_timeout=float(pick(args.idle_timeout, "idle_timeout", 60.0)),
        active_threshold=float(pick(args.active_threshold, "active_threshold", 5.0)),
        features=features,
        ground_truth=pick(args.ground_truth, "ground_truth", None),
        tz_offset=int(pick(args.tz_offset, "tz_offset", 0)),
        output=pick(args.out, "out", "flows.csv"),
        summary_output=pick(args.summary, "summary", None),
    )


def _load_summary(path: str, label_column: str, name: str) -> dataset.DatasetSummary:
    try:
        return dataset.read_summary_csv(path, name=name)
    except FlowforgeError:
        summary = dataset.summarize(path, label_column=label_column, name=name)
        return summary


def _cmd_export(args: argparse.Namespace) -> int:
    config = _resolve_export_config(args)
    stats = run_pipeline(config)
    for line in stats.lines():
        print(line, file=sys.stderr)
    return 0


def _cmd_summarize(args: argparse.Namespace) -> int:
    summary = dataset.summarize(
        args.csv, label_column=args.label_column, name=Path(args.csv).stem
    )
    sys.stdout.write(dataset.summary_text(summary))
    if args.out:
        dataset.write_summary_csv(summary, args.out)
        if not args.no_plot:
            from .report import render_summary_figure

            render_summary_figure(summary, Path(args.out).with_suffix(".png"))
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    name_a = args.name_a or Path(args.a).stem
    name_b = args.name_b or Path(args.b).stem
    summary_a = _load_summary(args.a, args.label_column, name_a)
    summary_b = _load_summary(args.b, args.label_column, name_b)
    table = dataset.compare_summaries(summary_a, summary_b)
    sys.stdout.write(dataset.comparison_text(table))
    if args.out:
        dataset.write_comparison_csv(table, args.out)
        if not args.no_plot:
            from .report import render_comparison_figure

            render_comparison_figure(table, Path(args.out).with_suffix(".png"))
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "export":
            return _cmd_export(args)
        if args.command == "summarize":
            return _cmd_summarize(args)
        if args.command == "compare":
            return _cmd_compare(args)
        if args.command == "features":
            print("\n".join(dataset.DEFAULT_FEATURES))
            return 0
    except FlowforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
