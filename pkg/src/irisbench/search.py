"""The two identification strategies over an ordered gallery.

1:N scores every enrollment entry and keeps the best; 1:First scans in
gallery order and stops at the first entry meeting the threshold, rescanning
once over the wide rotation range if a two-stage policy's narrow scan came
up empty.  Pairs that are never comparable (empty joint mask at every shift)
score worst-possible and cannot match, so scans never abort mid-gallery.

Score ties in 1:N resolve to the smallest subject id, which makes 1:N
decisions and matched identities independent of gallery order.

Scalar searches here are the reference path; ``batch_transactions`` replays
the same decisions over precomputed score matrices so sweeps can reuse pair
scores across thresholds, strategies and permutations.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .scenario import Gallery
from .templates import (
    NoOverlapError,
    Polarity,
    RotationPolicy,
    Score,
    Template,
    best_of_rotations,
)

__all__ = [
    "Stage",
    "Transaction",
    "EmptyGalleryError",
    "search_one_to_n",
    "search_one_to_first",
    "count_rotations",
    "batch_transactions",
]

ONE_TO_N = "one_to_n"
ONE_TO_FIRST = "one_to_first"


class EmptyGalleryError(ValueError):
    pass


class Stage(enum.Enum):
    NARROW = "narrow"
    WIDE = "wide"
    SINGLE_STAGE = "single"


@dataclass(frozen=True)
class Transaction:
    """Result of one identification attempt.

    ``identified_subject`` is None for a non-match; a match stores the
    qualifying score, the matched entry's position in the searched gallery
    order, and the comparison accounting used for speed metrics.
    """

    probe_subject: str
    identified_subject: str | None
    score: Score | None
    gallery_index: int | None
    pairs_examined: int
    rotations_evaluated: int
    stage_reached: Stage

    @property
    def matched(self) -> bool:
        return self.identified_subject is not None


def count_rotations(tx: Transaction) -> int:
    """Total rotation-shift evaluations performed during the search."""
    return tx.rotations_evaluated


def _pair_score(probe: Template, ref: Template, shifts: tuple[int, int]) -> float:
    """Best dissimilarity over the range, +inf when never comparable."""
    try:
        score, _ = best_of_rotations(probe, ref, shifts)
    except NoOverlapError:
        return np.inf
    return score.value


def search_one_to_n(
    probe: Template, g: Gallery, t, policy: RotationPolicy, probe_subject: str = ""
) -> Transaction:
    """Exhaustive scan: best entry over the policy's effective range wins.

    Under a two-stage policy the effective range is the wide one, in a
    single pass, so 1:N and two-stage 1:First agree on match vs non-match
    for every probe.
    """
    if len(g) == 0:
        raise EmptyGalleryError("cannot search an empty gallery")
    shifts = policy.effective_range
    best_value = np.inf
    best_sid: str | None = None
    best_index: int | None = None
    for index, (sid, ref) in enumerate(g.entries):
        value = _pair_score(probe, ref, shifts)
        if value < best_value or (
            value == best_value and best_sid is not None and sid < best_sid
        ):
            best_value, best_sid, best_index = value, sid, index
    n = len(g)
    rotations = n * policy.effective_shift_count
    if best_value <= t.value:
        return Transaction(
            probe_subject=probe_subject,
            identified_subject=best_sid,
            score=Score(best_value, Polarity.DISSIMILARITY),
            gallery_index=best_index,
            pairs_examined=n,
            rotations_evaluated=rotations,
            stage_reached=Stage.SINGLE_STAGE,
        )
    return Transaction(
        probe_subject=probe_subject,
        identified_subject=None,
        score=None,
        gallery_index=None,
        pairs_examined=n,
        rotations_evaluated=rotations,
        stage_reached=Stage.SINGLE_STAGE,
    )


def search_one_to_first(
    probe: Template, g: Gallery, t, policy: RotationPolicy, probe_subject: str = ""
) -> Transaction:
    """In-order scan stopping at the first entry that meets the threshold."""
    if len(g) == 0:
        raise EmptyGalleryError("cannot search an empty gallery")
    n = len(g)
    n_narrow = policy.n_narrow_shifts
    for index, (sid, ref) in enumerate(g.entries):
        value = _pair_score(probe, ref, policy.narrow_range)
        if value <= t.value:
            return Transaction(
                probe_subject=probe_subject,
                identified_subject=sid,
                score=Score(value, Polarity.DISSIMILARITY),
                gallery_index=index,
                pairs_examined=index + 1,
                rotations_evaluated=(index + 1) * n_narrow,
                stage_reached=Stage.NARROW if policy.two_stage else Stage.SINGLE_STAGE,
            )
    rotations = n * n_narrow
    if policy.two_stage:
        n_wide = policy.n_wide_shifts
        for index, (sid, ref) in enumerate(g.entries):
            value = _pair_score(probe, ref, policy.wide_range)
            if value <= t.value:
                return Transaction(
                    probe_subject=probe_subject,
                    identified_subject=sid,
                    score=Score(value, Polarity.DISSIMILARITY),
                    gallery_index=index,
                    pairs_examined=n + index + 1,
                    rotations_evaluated=rotations + (index + 1) * n_wide,
                    stage_reached=Stage.WIDE,
                )
        return Transaction(
            probe_subject=probe_subject,
            identified_subject=None,
            score=None,
            gallery_index=None,
            pairs_examined=2 * n,
            rotations_evaluated=rotations + n * n_wide,
            stage_reached=Stage.WIDE,
        )
    return Transaction(
        probe_subject=probe_subject,
        identified_subject=None,
        score=None,
        gallery_index=None,
        pairs_examined=n,
        rotations_evaluated=rotations,
        stage_reached=Stage.SINGLE_STAGE,
    )


def batch_transactions(
    narrow: np.ndarray,
    wide: np.ndarray,
    probe_subjects: list[str],
    gallery_subjects: list[str],
    threshold_value: float,
    policy: RotationPolicy,
    strategy: str,
    order: np.ndarray | None = None,
) -> list[Transaction]:
    """Replay searches over precomputed per-pair best-score matrices.

    ``narrow``/``wide`` are (n_probes, n_gallery) minima in base gallery
    order; ``order`` permutes the gallery columns for this run.  Produces
    transactions identical to the scalar searches.
    """
    n_probes, n_gallery = narrow.shape
    if order is None:
        order = np.arange(n_gallery)
    subs = [gallery_subjects[i] for i in order]
    narrow_p = narrow[:, order]
    wide_p = wide[:, order] if policy.two_stage else narrow_p
    n_narrow = policy.n_narrow_shifts
    n_wide = policy.n_wide_shifts
    txs: list[Transaction] = []
    if strategy == ONE_TO_N:
        eff = wide_p if policy.two_stage else narrow_p
        best = eff.min(axis=1)
        # order-invariant identity tie-break: smallest subject id
        _, rank = np.unique(np.asarray(subs), return_inverse=True)
        tie_rank = np.where(eff == best[:, None], rank[None, :], n_gallery)
        pos = tie_rank.argmin(axis=1)
        rotations = n_gallery * policy.effective_shift_count
        for p in range(n_probes):
            if best[p] <= threshold_value:
                txs.append(
                    Transaction(
                        probe_subject=probe_subjects[p],
                        identified_subject=subs[pos[p]],
                        score=Score(float(best[p]), Polarity.DISSIMILARITY),
                        gallery_index=int(pos[p]),
                        pairs_examined=n_gallery,
                        rotations_evaluated=rotations,
                        stage_reached=Stage.SINGLE_STAGE,
                    )
                )
            else:
                txs.append(
                    Transaction(
                        probe_subject=probe_subjects[p],
                        identified_subject=None,
                        score=None,
                        gallery_index=None,
                        pairs_examined=n_gallery,
                        rotations_evaluated=rotations,
                        stage_reached=Stage.SINGLE_STAGE,
                    )
                )
        return txs
    if strategy != ONE_TO_FIRST:
        raise ValueError(f"unknown strategy {strategy!r}")
    hits1 = narrow_p <= threshold_value
    any1 = hits1.any(axis=1)
    idx1 = hits1.argmax(axis=1)
    if policy.two_stage:
        hits2 = wide_p <= threshold_value
        any2 = hits2.any(axis=1)
        idx2 = hits2.argmax(axis=1)
    for p in range(n_probes):
        if any1[p]:
            i = int(idx1[p])
            txs.append(
                Transaction(
                    probe_subject=probe_subjects[p],
                    identified_subject=subs[i],
                    score=Score(float(narrow_p[p, i]), Polarity.DISSIMILARITY),
                    gallery_index=i,
                    pairs_examined=i + 1,
                    rotations_evaluated=(i + 1) * n_narrow,
                    stage_reached=Stage.NARROW if policy.two_stage else Stage.SINGLE_STAGE,
                )
            )
        elif policy.two_stage and any2[p]:
            i = int(idx2[p])
            txs.append(
                Transaction(
                    probe_subject=probe_subjects[p],
                    identified_subject=subs[i],
                    score=Score(float(wide_p[p, i]), Polarity.DISSIMILARITY),
                    gallery_index=i,
                    pairs_examined=n_gallery + i + 1,
                    rotations_evaluated=n_gallery * n_narrow + (i + 1) * n_wide,
                    stage_reached=Stage.WIDE,
                )
            )
        else:
            if policy.two_stage:
                pairs = 2 * n_gallery
                rotations = n_gallery * (n_narrow + n_wide)
                stage = Stage.WIDE
            else:
                pairs = n_gallery
                rotations = n_gallery * n_narrow
                stage = Stage.SINGLE_STAGE
            txs.append(
                Transaction(
                    probe_subject=probe_subjects[p],
                    identified_subject=None,
                    score=None,
                    gallery_index=None,
                    pairs_examined=pairs,
                    rotations_evaluated=rotations,
                    stage_reached=stage,
                )
            )
    return txs
