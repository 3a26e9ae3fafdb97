"""Outcome taxonomy and rate aggregation for identification transactions.

Every transaction falls in exactly one of five categories: true
identification (TI), enrolled false positive identification (EFPI) and
false non-identification (FNI) for enrolled probes; false positive
identification (FPI) and true non-identification (TNI) for unenrolled
probes.  Rates use the enrolled-probe count as denominator for TI/EFPI/FNI
and the unenrolled-probe count for FPI/TNI; all-probe-denominator variants
of the false-positive rates are also reported for open-set plots.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .search import Transaction

__all__ = [
    "Outcome",
    "MetricsReport",
    "MetricSpread",
    "InsufficientDataError",
    "classify_outcome",
    "aggregate_metrics",
    "permutation_spread",
]


class InsufficientDataError(ValueError):
    pass


class Outcome(enum.Enum):
    TI = "TI"
    EFPI = "EFPI"
    TNI = "TNI"
    FNI = "FNI"
    FPI = "FPI"


def classify_outcome(tx: Transaction, enrolled: bool) -> Outcome:
    """Map one transaction plus its ground truth to an outcome category."""
    if enrolled:
        if not tx.matched:
            return Outcome.FNI
        return Outcome.TI if tx.identified_subject == tx.probe_subject else Outcome.EFPI
    return Outcome.FPI if tx.matched else Outcome.TNI


@dataclass(frozen=True)
class MetricsReport:
    """Identification rates and normalized comparison statistics for one cell.

    ``fpir`` and ``tnir`` are None for closed sets, where they are undefined
    (no unenrolled probes).  Normalized comparisons are pairs examined
    divided by gallery size: exactly 1.0 for single-stage 1:N, up to 2.0 for
    a two-stage 1:First that exhausts both passes.
    """

    n_enrolled_probes: int
    n_unenrolled_probes: int
    tpir: float
    fnir: float
    e_fpir: float
    fpir: float | None
    tnir: float | None
    e_fpir_all_probes: float
    fpir_all_probes: float
    mean_normalized_comparisons: float
    std_normalized_comparisons: float
    mean_normalized_rotations: float

    RATE_FIELDS = (
        "tpir",
        "fnir",
        "e_fpir",
        "fpir",
        "tnir",
        "e_fpir_all_probes",
        "fpir_all_probes",
    )


def aggregate_metrics(
    transactions: Sequence[Transaction],
    enrolled: Sequence[bool],
    gallery_size: int,
    shifts_per_pair: int,
) -> MetricsReport:
    """Rates over the outcome counts plus comparison/rotation statistics.

    ``shifts_per_pair`` is the policy's effective rotation count, so a full
    single scan normalizes to 1.0 on both comparisons and rotations.
    """
    if not transactions:
        raise InsufficientDataError("no transactions to aggregate")
    if len(transactions) != len(enrolled):
        raise ValueError("transactions and enrolled flags differ in length")
    counts = {o: 0 for o in Outcome}
    for tx, flag in zip(transactions, enrolled):
        counts[classify_outcome(tx, flag)] += 1
    n_enr = counts[Outcome.TI] + counts[Outcome.EFPI] + counts[Outcome.FNI]
    n_unenr = counts[Outcome.FPI] + counts[Outcome.TNI]
    total = n_enr + n_unenr
    comps = np.array([tx.pairs_examined for tx in transactions], dtype=float)
    comps /= gallery_size
    rots = np.array([tx.rotations_evaluated for tx in transactions], dtype=float)
    rots /= gallery_size * shifts_per_pair
    return MetricsReport(
        n_enrolled_probes=n_enr,
        n_unenrolled_probes=n_unenr,
        tpir=counts[Outcome.TI] / n_enr if n_enr else 0.0,
        fnir=counts[Outcome.FNI] / n_enr if n_enr else 0.0,
        e_fpir=counts[Outcome.EFPI] / n_enr if n_enr else 0.0,
        fpir=counts[Outcome.FPI] / n_unenr if n_unenr else None,
        tnir=counts[Outcome.TNI] / n_unenr if n_unenr else None,
        e_fpir_all_probes=counts[Outcome.EFPI] / total,
        fpir_all_probes=counts[Outcome.FPI] / total,
        mean_normalized_comparisons=float(comps.mean()),
        std_normalized_comparisons=float(comps.std()),
        mean_normalized_rotations=float(rots.mean()),
    )


@dataclass(frozen=True)
class MetricSpread:
    mean: float
    std: float
    sem: float


def permutation_spread(reports: Sequence[MetricsReport]) -> dict[str, MetricSpread]:
    """Per-metric mean, sample std and standard error across permutation reports."""
    if len(reports) < 2:
        raise InsufficientDataError("need at least 2 permutation reports")
    out: dict[str, MetricSpread] = {}
    numeric = list(MetricsReport.RATE_FIELDS) + [
        "mean_normalized_comparisons",
        "std_normalized_comparisons",
        "mean_normalized_rotations",
    ]
    for name in numeric:
        values = [getattr(r, name) for r in reports]
        if any(v is None for v in values):
            continue
        arr = np.asarray(values, dtype=float)
        std = float(arr.std(ddof=1))
        out[name] = MetricSpread(
            mean=float(arr.mean()), std=std, sem=std / math.sqrt(len(arr))
        )
    return out
