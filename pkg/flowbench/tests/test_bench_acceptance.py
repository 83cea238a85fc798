"""Acceptance criteria for the benchmark harness."""

from __future__ import annotations

import random
import time
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from flowbench.cli import main
from flowbench.metrics import macro_metrics
from flowbench.report import report_text
from flowbench.search import EvalReport
from test_metrics import confusion_oracle

PRIMARY_DATA = Path(__file__).resolve().parents[2] / "tests" / "data"


def synthetic_flows(n=5000, seed=0, shuffle_labels=False) -> pd.DataFrame:
    """Two classes with disjoint SrcLoad / SIntPkt distributions."""
    rng = np.random.default_rng(seed)
    half = n // 2
    benign = pd.DataFrame({
        "SrcLoad": rng.normal(1e5, 1e4, half),
        "SIntPkt": rng.normal(5.0, 1.0, half),
        "GTLabel": "Benign",
    })
    attack = pd.DataFrame({
        "SrcLoad": rng.normal(5e5, 2e4, n - half),
        "SIntPkt": rng.normal(50.0, 5.0, n - half),
        "GTLabel": "DoS",
    })
    df = pd.concat([benign, attack], ignore_index=True)
    for name in ("SrcPkts", "DstPkts", "sMeanPktSz", "Dur"):
        df[name] = rng.normal(100, 30, n)  # uninformative noise columns
    if shuffle_labels:
        df["GTLabel"] = rng.permutation(df["GTLabel"].to_numpy())
    return df.sample(frac=1.0, random_state=seed).reset_index(drop=True)


def read_f1(report_csv: Path) -> float:
    row = report_csv.read_text().splitlines()[1]
    return float(row.split(",")[-1])


class TestAcceptance:
    def test_criterion_macro_metrics_oracle(self):
        """Exact match with a confusion-matrix oracle on 1000 random vectors."""
        rng = random.Random(424242)
        for _ in range(1000):
            labels = [f"k{i}" for i in range(rng.randint(2, 7))]
            n = rng.randint(2, 80)
            y_true = [rng.choice(labels) for _ in range(n)]
            y_pred = [rng.choice(labels) for _ in range(n)]
            assert macro_metrics(y_true, y_pred) == confusion_oracle(y_true, y_pred)
        print("\ncriterion macro-metrics-oracle: PASS")

    def test_criterion_smoke_benchmark(self, tmp_path):
        """Signal run reaches macro-F1 >= 95 in < 2 min; shuffled control <= 60."""
        started = time.perf_counter()

        signal_csv = tmp_path / "signal.csv"
        synthetic_flows(5000, seed=0).to_csv(signal_csv, index=False)
        signal_report = tmp_path / "signal_report.csv"
        code = main([
            "--train-csv", f"synthetic={signal_csv}",
            "--families", "RF", "--seed", "0",
            "--out", str(signal_report), "--no-plot",
        ])
        assert code == 0
        signal_f1 = read_f1(signal_report)

        control_csv = tmp_path / "control.csv"
        synthetic_flows(5000, seed=0, shuffle_labels=True).to_csv(control_csv, index=False)
        control_report = tmp_path / "control_report.csv"
        code = main([
            "--train-csv", f"shuffled={control_csv}",
            "--families", "RF", "--seed", "0",
            "--out", str(control_report), "--no-plot",
        ])
        assert code == 0
        control_f1 = read_f1(control_report)

        elapsed = time.perf_counter() - started
        assert signal_f1 >= 95.0, f"signal macro-F1 {signal_f1}"
        assert control_f1 <= 60.0, f"shuffled control macro-F1 {control_f1}"
        assert elapsed < 120.0, f"smoke benchmark took {elapsed:.0f}s"
        print(f"\ncriterion smoke-benchmark: PASS "
              f"(signal {signal_f1:.2f}, control {control_f1:.2f}, {elapsed:.0f}s)")

    def test_criterion_report_layout(self):
        """2 versions x 4 models x 4 metric columns from mocked reports."""
        reports = [
            EvalReport(version, family, accuracy=90.0, macro_precision=80.0,
                       macro_recall=70.0, macro_f1=75.0)
            for version in ("Original", "HERA")
            for family in ("RF", "XGB", "LGBM", "EBM")
        ]
        text = report_text(reports)
        body = [l for l in text.splitlines() if l and not l.startswith("(")]
        assert len(body) == 9
        header = body[0].split()
        assert header[-4:] == ["Accuracy", "Precision", "Recall", "F1-Score"]
        assert body[1].split()[0] == "Original"
        assert body[5].split()[0] == "HERA"
        assert [line.split()[1] for line in body[1:5]] == ["RF", "XGB", "LGBM", "EBM"]
        print("\ncriterion report-layout: PASS")

    def test_flow_csv_interface_compatibility(self):
        """The harness loads the exporter's committed flow CSV directly."""
        flows = PRIMARY_DATA / "golden_flows.csv"
        if not flows.exists():
            pytest.skip("primary fixture not present")
        from flowbench.data import load_dataset, align_features, feature_matrix

        df = load_dataset(flows, "GTLabel")
        aligned = align_features(df, None, "GTLabel")
        X, y = feature_matrix(aligned, "GTLabel")
        assert X.shape[0] == len(df) > 0
        assert "Benign" in set(y)
