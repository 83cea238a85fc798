"""Benchmark CLI: grid-search tree ensembles over flow CSVs.

Each --train-csv takes ``version=path`` (or a bare path, named by its
file stem). Every dataset version is aligned, split 80/20, grid-searched
per family with 5-fold CV on macro-F1, and scored on its holdout; the
combined table lands in --out as CSV with an aligned-text copy on
stdout and a figure next to the CSV.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .data import align_features, feature_matrix, load_dataset, load_mapping, split_data
from .models import FAMILIES
from .report import render_report_figure, report_text, write_report_csv
from .search import evaluate, grid_search_cv


def _parse_dataset_arg(token: str) -> tuple[str, str]:
    if "=" in token:
        version, path = token.split("=", 1)
        return version.strip(), path.strip()
    return Path(token).stem, token


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowbench",
        description="Benchmark tree-ensemble classifiers on flow datasets.",
    )
    parser.add_argument("--train-csv", action="append", required=True,
                        metavar="VERSION=PATH",
                        help="labelled dataset (repeatable, one per version)")
    parser.add_argument("--label-column", default="GTLabel")
    parser.add_argument("--mapping", default="none",
                        help='"unsw", "cic", "none", or a CSV of original,target pairs')
    parser.add_argument("--families", default=",".join(FAMILIES),
                        help="comma-separated subset of RF,XGB,LGBM,EBM")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--folds", type=int, default=5)
    parser.add_argument("--out", default="bench_report.csv",
                        help="report CSV path (figure lands beside it)")
    parser.add_argument("--no-plot", action="store_true")
    return parser


def run(args: argparse.Namespace) -> int:
    families = [f.strip().upper() for f in args.families.split(",") if f.strip()]
    unknown = [f for f in families if f not in FAMILIES]
    if unknown:
        print(f"error: unknown families {', '.join(unknown)}", file=sys.stderr)
        return 2
    mapping = load_mapping(args.mapping)

    reports = []
    for token in args.train_csv:
        version, path = _parse_dataset_arg(token)
        df = load_dataset(path, args.label_column)
        df = align_features(df, mapping, args.label_column)
        train, holdout = split_data(df, args.label_column, args.seed)
        train_X, train_y = feature_matrix(train, args.label_column)
        holdout_X, holdout_y = feature_matrix(holdout, args.label_column)
        for family in families:
            result = grid_search_cv(
                train_X, train_y, family, folds=args.folds, seed=args.seed
            )
            print(
                f"{version}/{family}: best {result.best.params} "
                f"(cv macro-F1 {result.scores[result.best]:.2f})",
                file=sys.stderr,
            )
            reports.append(
                evaluate(train_X, train_y, holdout_X, holdout_y, result.best,
                         args.seed, dataset_version=version)
            )

    sys.stdout.write(report_text(reports))
    write_report_csv(reports, args.out)
    if not args.no_plot:
        render_report_figure(reports, Path(args.out).with_suffix(".png"))
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return run(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
