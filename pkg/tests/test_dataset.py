"""CSV round trips, summaries, comparisons."""

from __future__ import annotations

import csv
import random

import pytest

from flowforge.dataset import (
    DEFAULT_FEATURES,
    FIELD_KINDS,
    DatasetSummary,
    compare_summaries,
    comparison_text,
    read_flow_csv,
    read_summary_csv,
    summarize,
    summary_text,
    write_csv,
    write_summary_csv,
)
from flowforge.errors import DatasetError
from flowforge.features import FEATURE_NAMES, FeatureVector


def random_record(rng: random.Random, flow_id: int) -> FeatureVector:
    start = rng.randint(0, 10**15)
    return FeatureVector(
        FlowID=flow_id,
        Rank=rng.randint(0, 5),
        SrcAddr=f"10.0.0.{rng.randint(1, 9)}",
        Sport=rng.randint(0, 65535),
        DstAddr=f"10.0.1.{rng.randint(1, 9)}",
        Dport=rng.randint(0, 65535),
        Proto=rng.choice(["tcp", "udp", "icmp"]),
        State=rng.choice(["INT", "REQ", "CON", "FIN", "RST"]),
        Dur=rng.uniform(0, 60),
        SrcBytes=rng.randint(0, 10**6), DstBytes=rng.randint(0, 10**6),
        sTtl=rng.randint(0, 255), dTtl=rng.randint(0, 255),
        SrcLoss=rng.randint(0, 9), DstLoss=rng.randint(0, 9),
        SrcLoad=rng.uniform(0, 10**7), DstLoad=rng.uniform(0, 10**7),
        SrcPkts=rng.randint(1, 500), DstPkts=rng.randint(0, 500),
        SrcWin=rng.randint(0, 65535), DstWin=rng.randint(0, 65535),
        SrcTCPBase=rng.randint(0, 2**32 - 1), DstTCPBase=rng.randint(0, 2**32 - 1),
        sMeanPktSz=rng.uniform(0, 1500), dMeanPktSz=rng.uniform(0, 1500),
        SrcJitter=rng.uniform(0, 1000), DstJitter=rng.uniform(0, 1000),
        SIntPkt=rng.uniform(0, 1000), SIntPktMax=rng.uniform(0, 1000),
        SIntPktMin=rng.uniform(0, 1000),
        DIntPkt=rng.uniform(0, 1000), DIntPktMax=rng.uniform(0, 1000),
        DIntPktMin=rng.uniform(0, 1000),
        StartTime=start, LastTime=start + rng.randint(0, 60_000_000),
        TcpRtt=rng.uniform(0, 500), SynAck=rng.uniform(0, 250), AckDat=rng.uniform(0, 250),
        Mean=rng.uniform(0, 1000), StdDev=rng.uniform(0, 500),
        Max=rng.uniform(0, 2000), Min=rng.uniform(0, 500),
        GTLabel=rng.choice(["Benign", "DoS", "Recon"]),
    )


class TestWriteCsv:
    def test_row_count_and_selection(self, tmp_path):
        rng = random.Random(1)
        records = [random_record(rng, i) for i in range(2)]
        path = tmp_path / "flows.csv"
        assert write_csv(records, path, ["FlowID", "Dur", "GTLabel"]) == 2
        lines = path.read_text().splitlines()
        assert len(lines) == 3
        assert lines[0] == "FlowID,Dur,GTLabel"

    def test_empty_selection_rejected(self, tmp_path):
        with pytest.raises(DatasetError):
            write_csv([], tmp_path / "x.csv", [])

    def test_unknown_feature_lists_valid_names(self, tmp_path):
        with pytest.raises(DatasetError, match="FlowID"):
            write_csv([], tmp_path / "x.csv", ["NotAFeature"])

    def test_default_header_matches_documented_dictionary(self, tmp_path):
        path = tmp_path / "flows.csv"
        write_csv([], path)
        header = path.read_text().splitlines()[0]
        assert header.split(",") == list(DEFAULT_FEATURES)

    def test_field_kind_map_is_complete(self):
        assert set(FIELD_KINDS) == set(FEATURE_NAMES)

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(OSError):
            write_csv([], tmp_path / "missing_dir" / "flows.csv")


class TestReadFlowCsv:
    def test_round_trip_within_printed_precision(self, tmp_path):
        rng = random.Random(2)
        records = [random_record(rng, i) for i in range(100)]
        path = tmp_path / "flows.csv"
        write_csv(records, path)
        loaded, header = read_flow_csv(path)
        assert header == list(DEFAULT_FEATURES)
        assert len(loaded) == len(records)
        for record, row in zip(records, loaded):
            for name in DEFAULT_FEATURES:
                original = getattr(record, name)
                if isinstance(original, float):
                    assert row[name] == pytest.approx(original, abs=1e-6)
                else:
                    assert row[name] == original

    def test_unknown_column_preserved_as_text(self, tmp_path):
        path = tmp_path / "flows.csv"
        path.write_text("FlowID,Mystery\n7,opaque\n", encoding="utf-8")
        [row], header = read_flow_csv(path)
        assert row == {"FlowID": 7, "Mystery": "opaque"}

    def test_header_only(self, tmp_path):
        path = tmp_path / "flows.csv"
        path.write_text("FlowID,Dur\n", encoding="utf-8")
        rows, _ = read_flow_csv(path)
        assert rows == []

    def test_arity_mismatch_names_line(self, tmp_path):
        path = tmp_path / "flows.csv"
        path.write_text("FlowID,Dur\n1,2.0\n3\n", encoding="utf-8")
        with pytest.raises(DatasetError, match="line 3"):
            read_flow_csv(path)


class TestSummarize:
    def test_counts(self):
        class Row:
            def __init__(self, label):
                self.GTLabel = label

        summary = summarize([Row("B"), Row("B"), Row("A")])
        assert summary.class_counts == {"B": 2, "A": 1}
        assert summary.total == 3

    def test_empty(self):
        summary = summarize([])
        assert summary.class_counts == {}
        assert summary.total == 0

    def test_missing_column(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("foo\n1\n", encoding="utf-8")
        with pytest.raises(DatasetError, match="GTLabel"):
            summarize(path)

    def test_summarize_of_written_records_matches_direct(self, tmp_path):
        rng = random.Random(5)
        records = [random_record(rng, i) for i in range(200)]
        direct = summarize(records)
        path = tmp_path / "flows.csv"
        write_csv(records, path)
        from_csv = summarize(path)
        assert direct.class_counts == from_csv.class_counts

    def test_published_unsw_proportions_fixture(self, tmp_path):
        # Synthetic CSV seeded with the published per-class flow counts;
        # checks the report arithmetic, not dataset regeneration.
        counts = {
            "Benign": 726_153, "Exploits": 16_157, "Fuzzers": 12_060,
            "Generic": 11_468, "Reconnaissance": 7_366, "DoS": 2_294,
            "Shellcode": 953, "Analysis": 309, "Backdoor": 232, "Worms": 104,
        }
        path = tmp_path / "labels.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["GTLabel"])
            for label, count in counts.items():
                writer.writerows([label] for _ in range(count))
        summary = summarize(path)
        assert summary.class_counts["Benign"] == 726_153
        assert summary.total == 777_096
        assert summary.ordered()[0] == ("Benign", 726_153)

    def test_summary_csv_round_trip(self, tmp_path):
        summary = DatasetSummary("x", {"Benign": 10, "DoS": 3})
        path = tmp_path / "summary.csv"
        write_summary_csv(summary, path)
        again = read_summary_csv(path)
        assert again.class_counts == summary.class_counts

    def test_text_rendering_has_total(self):
        text = summary_text(DatasetSummary("x", {"Benign": 10, "DoS": 3}))
        assert "total" in text and "13" in text


class TestCompare:
    def test_benign_ratio(self):
        a = DatasetSummary("mine", {"Benign": 726_153})
        b = DatasetSummary("orig", {"Benign": 893_726})
        [row] = compare_summaries(a, b).rows
        assert row.ratio == pytest.approx(1.2307, abs=1e-3)

    def test_identical_summaries(self):
        a = DatasetSummary("a", {"X": 5, "Y": 2})
        table = compare_summaries(a, DatasetSummary("b", {"X": 5, "Y": 2}))
        assert all(r.ratio == 1.0 for r in table.rows)
        assert not any(r.flagged for r in table.rows)

    def test_largest_divergence_flagged(self):
        a = DatasetSummary("mine", {"Generic": 11_468, "Benign": 726_153})
        b = DatasetSummary("orig", {"Generic": 180_076, "Benign": 893_726})
        table = compare_summaries(a, b)
        generic = next(r for r in table.rows if r.label == "Generic")
        assert generic.ratio == pytest.approx(15.70, abs=0.01)
        assert generic.flagged
        assert not next(r for r in table.rows if r.label == "Benign").flagged

    def test_label_missing_on_one_side(self):
        table = compare_summaries(
            DatasetSummary("a", {"X": 5}), DatasetSummary("b", {"Y": 4})
        )
        by_label = {r.label: r for r in table.rows}
        assert by_label["Y"].a_count == 0
        assert by_label["Y"].ratio == float("inf")
        assert by_label["X"].b_count == 0

    def test_ratio_antisymmetry(self):
        rng = random.Random(6)
        a = DatasetSummary("a", {f"c{i}": rng.randint(1, 10**6) for i in range(8)})
        b = DatasetSummary("b", {f"c{i}": rng.randint(1, 10**6) for i in range(8)})
        forward = {r.label: r.ratio for r in compare_summaries(a, b).rows}
        backward = {r.label: r.ratio for r in compare_summaries(b, a).rows}
        for label, ratio in forward.items():
            assert backward[label] == pytest.approx(1.0 / ratio, rel=1e-12)

    def test_text_rendering(self):
        a = DatasetSummary("mine", {"Benign": 10, "DoS": 1})
        b = DatasetSummary("orig", {"Benign": 20, "DoS": 1})
        text = comparison_text(compare_summaries(a, b))
        assert "largest divergence" in text
        assert "2.0000" in text
