"""Dataset loading, feature alignment and stratified splitting."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Mapping, Optional, Union

import pandas as pd
from sklearn.model_selection import train_test_split

# Column pairs aligning well-known original datasets with the flow-CSV
# names this toolkit's exporter produces.
UNSW_MAPPING: dict[str, str] = {
    "sinpkt": "SIntPkt",
    "dinpkt": "DIntPkt",
    "smean": "sMeanPktSz",
    "dmean": "dMeanPktSz",
    "spkts": "SrcPkts",
    "dpkts": "DstPkts",
    "sload": "SrcLoad",
    "dload": "DstLoad",
    "sbytes": "SrcBytes",
    "dbytes": "DstBytes",
    "sttl": "sTtl",
    "dttl": "dTtl",
}

CIC_MAPPING: dict[str, str] = {
    "fwd_iat_mean": "SIntPkt",
    "fwd_iat_max": "SIntPktMax",
    "fwd_iat_min": "SIntPktMin",
    "bwd_iat_mean": "DIntPkt",
    "bwd_iat_max": "DIntPktMax",
    "bwd_iat_min": "DIntPktMin",
    "active_mean": "Mean",
    "active_std": "StdDev",
    "active_max": "Max",
    "active_min": "Min",
}

BUILTIN_MAPPINGS = {"unsw": UNSW_MAPPING, "cic": CIC_MAPPING}


def load_mapping(spec: Optional[str]) -> Optional[dict[str, str]]:
    """Resolve a mapping name, a CSV file of original,target pairs, or None."""
    if spec is None or spec == "none":
        return None
    if spec in BUILTIN_MAPPINGS:
        return dict(BUILTIN_MAPPINGS[spec])
    mapping = {}
    with open(spec, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#"):
                continue
            if len(row) != 2:
                raise ValueError(f"{spec}: mapping rows need exactly 2 columns")
            mapping[row[0].strip()] = row[1].strip()
    if not mapping:
        raise ValueError(f"{spec}: empty mapping file")
    return mapping


def load_dataset(path: Union[str, Path], label_column: str) -> pd.DataFrame:
    df = pd.read_csv(path)
    if label_column not in df.columns:
        raise ValueError(f"{path}: no column named {label_column!r}")
    return df


def align_features(
    df: pd.DataFrame, mapping: Optional[Mapping[str, str]], label_column: str
) -> pd.DataFrame:
    """Project a dataset onto the mapping's target columns plus the label.

    Each mapping entry accepts either the original column name or the
    target name, so the same mapping aligns both dataset versions. With
    no mapping the frame passes through unchanged.
    """
    if mapping is None:
        return df
    columns = {}
    for original, target in mapping.items():
        if original in df.columns:
            columns[target] = df[original]
        elif target in df.columns:
            columns[target] = df[target]
        else:
            raise ValueError(f"dataset has neither {original!r} nor {target!r}")
    columns[label_column] = df[label_column]
    return pd.DataFrame(columns)


def split_data(
    df: pd.DataFrame, label_column: str, seed: int
) -> tuple[pd.DataFrame, pd.DataFrame]:
    """Deterministic stratified 80/20 train/holdout split."""
    counts = df[label_column].value_counts()
    singletons = counts[counts < 2]
    if not singletons.empty:
        raise ValueError(
            f"class {singletons.index[0]!r} has only {int(singletons.iloc[0])} sample(s); "
            "need at least 2 per class for a stratified split"
        )
    train, holdout = train_test_split(
        df, test_size=0.2, stratify=df[label_column], random_state=seed
    )
    return train, holdout


def feature_matrix(df: pd.DataFrame, label_column: str):
    features = df.drop(columns=[label_column]).select_dtypes("number")
    if features.empty:
        raise ValueError("no numeric feature columns to train on")
    return features.to_numpy(dtype=float), df[label_column].to_numpy()
