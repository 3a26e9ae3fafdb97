"""Threshold selection from the impostor score distribution.

A threshold is picked per accuracy target as the most lenient value whose
realized false-match fraction on the calibration impostor scores does not
exceed the target; the quantile is taken over the sorted score list without
interpolation, so the calibration-set false-match budget is never exceeded.
Targets stricter than the data supports yield a sentinel threshold at the
perfect-match score, flagged as unattainable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .scenario import Gallery, ProbeSet
from .templates import NoOverlapError, Polarity, RotationPolicy, best_of_rotations

__all__ = [
    "DEFAULT_TARGETS",
    "Threshold",
    "EmptyInputError",
    "collect_impostor_scores",
    "threshold_for_target",
    "validate_target",
]

# allowed impostor-pass fractions: 0.0001% .. 1%
DEFAULT_TARGETS = (1e-6, 1e-5, 1e-4, 1e-3, 1e-2)


class EmptyInputError(ValueError):
    pass


@dataclass(frozen=True)
class Threshold:
    """A calibrated decision threshold and what it achieved on the calibration set."""

    value: float
    polarity: Polarity
    target: float
    achieved_fraction: float
    unattainable: bool = False


def validate_target(target: float) -> float:
    if not 0.0 < target < 1.0:
        raise ValueError(f"accuracy target must be in (0, 1), got {target!r}")
    return float(target)


def collect_impostor_scores(
    gallery: Gallery,
    probes: ProbeSet,
    policy: RotationPolicy,
    scores: np.ndarray | None = None,
) -> np.ndarray:
    """Best-of-rotations score of every non-mated (probe, reference) pair.

    Scores use the policy's effective range (the wide range for two-stage
    policies), matching what a 1:N decision is applied to; narrow-stage
    fires can only be rarer at the same threshold.  ``scores`` may supply a
    precomputed (n_probes, n_gallery) matrix in gallery order to avoid
    rescoring.
    """
    if len(gallery) == 0 or len(probes) == 0:
        raise EmptyInputError("calibration requires a nonempty gallery and probe set")
    subjects = np.asarray(gallery.subjects)
    if scores is None:
        rows = []
        for probe in probes.probes:
            row = np.empty(len(gallery))
            for j, (_, ref) in enumerate(gallery.entries):
                try:
                    row[j] = best_of_rotations(probe.template, ref, policy.effective_range)[0].value
                except NoOverlapError:
                    row[j] = np.inf
            rows.append(row)
        scores = np.stack(rows)
    probe_ids = np.asarray([p.subject_id for p in probes.probes])
    mated = probe_ids[:, None] == subjects[None, :]
    return scores[~mated]


def threshold_for_target(
    impostor_scores: Sequence[float] | np.ndarray,
    target: float,
    polarity: Polarity = Polarity.DISSIMILARITY,
) -> Threshold:
    """Most lenient threshold whose impostor pass fraction stays <= target.

    For dissimilarity this is a lower quantile of the sorted scores, for
    similarity an upper quantile; no interpolation between observed values.
    """
    validate_target(target)
    scores = np.asarray(impostor_scores, dtype=float).reshape(-1)
    if scores.size == 0:
        raise EmptyInputError("no impostor scores to calibrate on")
    n = scores.size
    # largest pass count whose fraction still compares <= target in floats
    budget = int(target * n)
    while (budget + 1) / n <= target:
        budget += 1
    while budget > 0 and budget / n > target:
        budget -= 1

    if polarity is Polarity.DISSIMILARITY:
        ordered = np.sort(scores)
        values = np.unique(ordered)
        pass_counts = np.searchsorted(ordered, values, side="right")
        k = int(np.searchsorted(pass_counts, budget, side="right")) - 1
        if k >= 0:
            value = float(values[k])
            achieved = int(pass_counts[k]) / n
            return Threshold(value, polarity, target, achieved, False)
        # sentinel: perfect-match score
        value = 0.0
        achieved = int(np.searchsorted(ordered, 0.0, side="right")) / n
        return Threshold(value, polarity, target, achieved, achieved > target)

    ordered = np.sort(scores)[::-1]
    values = np.unique(scores)[::-1]
    pass_counts = np.searchsorted(-ordered, -values, side="right")
    k = int(np.searchsorted(pass_counts, budget, side="right")) - 1
    if k >= 0:
        value = float(values[k])
        achieved = int(pass_counts[k]) / n
        return Threshold(value, polarity, target, achieved, False)
    # perfect similarity is unbounded; cap the sentinel at the max observed
    value = float(values[0])
    achieved = int((scores >= value).sum()) / n
    return Threshold(value, polarity, target, achieved, achieved > target)
