"""Input validation for the sweep results CSV and the distributions CSV.

Figures are pure views over these files: loading parses columns, checks
presence, and nothing else.  Errors carry the offending column names so a
schema drift in the producing package is diagnosed immediately.
"""

from __future__ import annotations

from pathlib import Path

import pandas as pd

__all__ = [
    "SchemaError",
    "EmptySelectionError",
    "RESULTS_COLUMNS",
    "DISTRIBUTIONS_COLUMNS",
    "load_results",
    "load_distributions",
]


class SchemaError(ValueError):
    """The input CSV does not match the documented results schema."""


class EmptySelectionError(ValueError):
    """No rows survive the family's selection; nothing to plot."""


RESULTS_COLUMNS = [
    "gallery_size",
    "set_type",
    "strategy",
    "accuracy_target",
    "rotation_policy",
    "permutation_index",
    "threshold",
    "tpir",
    "fnir",
    "e_fpir",
    "fpir",
    "tnir",
    "mean_normalized_comparisons",
]

DISTRIBUTIONS_COLUMNS = ["kind", "score"]


def _check_columns(frame: pd.DataFrame, required: list[str], path) -> None:
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise SchemaError(
            f"{path}: missing column(s) {', '.join(missing)}; "
            f"found {', '.join(frame.columns)}"
        )


def load_results(path) -> pd.DataFrame:
    path = Path(path)
    frame = pd.read_csv(path)
    _check_columns(frame, RESULTS_COLUMNS, path)
    if frame.empty:
        raise EmptySelectionError(f"{path}: results CSV has no rows")
    return frame


def load_distributions(path) -> pd.DataFrame:
    path = Path(path)
    frame = pd.read_csv(path)
    _check_columns(frame, DISTRIBUTIONS_COLUMNS, path)
    if frame.empty:
        raise EmptySelectionError(f"{path}: distributions CSV has no rows")
    return frame


def select(frame: pd.DataFrame, description: str, **conditions) -> pd.DataFrame:
    out = frame
    for column, value in conditions.items():
        out = out[out[column] == value]
    if out.empty:
        raise EmptySelectionError(f"empty selection for {description}: {conditions}")
    return out
