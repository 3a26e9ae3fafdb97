"""Gallery and probe-set construction for closed- and open-set scenarios.

A gallery enrolls one reference template per subject; its order is part of
its identity because 1:First search stops at the first qualifying entry.
Closed probe sets draw the spare samples of enrolled subjects; open probe
sets add unenrolled subjects at a 2:1 enrolled:unenrolled probe ratio, so
one third of open-set probes has no mate in the gallery.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .synth import SubjectRecord
from .templates import Template

__all__ = [
    "Gallery",
    "Probe",
    "ProbeSet",
    "PoolExhaustedError",
    "build_gallery",
    "build_closed_probeset",
    "build_open_probeset",
    "permute_gallery",
]


class PoolExhaustedError(ValueError):
    """The subject pool cannot supply the requested scenario."""


@dataclass(frozen=True)
class Gallery:
    """Ordered enrollment: (subject_id, reference template) pairs."""

    entries: tuple[tuple[str, Template], ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("gallery must not be empty")
        ids = [sid for sid, _ in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("gallery subject ids must be unique")

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def subjects(self) -> tuple[str, ...]:
        return tuple(sid for sid, _ in self.entries)

    @property
    def templates(self) -> tuple[Template, ...]:
        return tuple(t for _, t in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Probe:
    subject_id: str
    template: Template
    enrolled: bool


@dataclass(frozen=True)
class ProbeSet:
    probes: tuple[Probe, ...]

    @property
    def n_enrolled(self) -> int:
        return sum(1 for p in self.probes if p.enrolled)

    @property
    def n_unenrolled(self) -> int:
        return len(self.probes) - self.n_enrolled

    def __len__(self) -> int:
        return len(self.probes)


def _eligible(pool: Sequence[SubjectRecord], min_samples: int) -> list[SubjectRecord]:
    return [s for s in pool if len(s.samples) >= min_samples]


def build_gallery(
    pool: Sequence[SubjectRecord], size: int, rng: np.random.Generator
) -> Gallery:
    """Enroll ``size`` distinct subjects drawn uniformly; order is draw order.

    The first-generated sample of each subject is its enrollment reference;
    subjects need at least one spare sample to be eligible (they must be able
    to appear as probes).
    """
    if size < 1:
        raise ValueError("gallery size must be >= 1")
    eligible = _eligible(pool, 2)
    if len(eligible) < size:
        raise PoolExhaustedError(
            f"need {size} subjects with >= 2 samples, pool has {len(eligible)}"
        )
    picks = rng.choice(len(eligible), size=size, replace=False)
    return Gallery(tuple((eligible[i].subject_id, eligible[i].samples[0]) for i in picks))


def build_closed_probeset(
    pool: Sequence[SubjectRecord],
    gallery: Gallery,
    cap: int | None,
    rng: np.random.Generator,
) -> ProbeSet:
    """All spare samples of enrolled subjects, subsampled uniformly to ``cap``."""
    by_id = {s.subject_id: s for s in pool}
    candidates = [
        (sid, t)
        for sid in gallery.subjects
        for t in by_id[sid].samples[1:]
    ]
    if cap is not None and len(candidates) > cap:
        keep = np.sort(rng.choice(len(candidates), size=cap, replace=False))
        candidates = [candidates[i] for i in keep]
    return ProbeSet(tuple(Probe(sid, t, True) for sid, t in candidates))


def build_open_probeset(
    pool: Sequence[SubjectRecord], gallery: Gallery, rng: np.random.Generator
) -> ProbeSet:
    """round(1.5N) enrolled-subject probes plus round(0.75N) unenrolled ones.

    Unenrolled probes are drawn from all samples of subjects absent from the
    gallery, so roughly one third of the probe set has no enrolled mate.
    """
    n = gallery.size
    n_enrolled = int(round(1.5 * n))
    n_unenrolled = int(round(0.75 * n))
    by_id = {s.subject_id: s for s in pool}
    enrolled_candidates = [
        (sid, t) for sid in gallery.subjects for t in by_id[sid].samples[1:]
    ]
    gallery_ids = set(gallery.subjects)
    unenrolled_candidates = [
        (s.subject_id, t)
        for s in pool
        if s.subject_id not in gallery_ids
        for t in s.samples
    ]
    if len(enrolled_candidates) < n_enrolled:
        raise PoolExhaustedError(
            f"need {n_enrolled} enrolled-subject probes, pool offers "
            f"{len(enrolled_candidates)}"
        )
    if len(unenrolled_candidates) < n_unenrolled:
        raise PoolExhaustedError(
            f"need {n_unenrolled} unenrolled probes, pool offers "
            f"{len(unenrolled_candidates)}"
        )
    keep_e = np.sort(rng.choice(len(enrolled_candidates), size=n_enrolled, replace=False))
    keep_u = np.sort(
        rng.choice(len(unenrolled_candidates), size=n_unenrolled, replace=False)
    )
    probes = [Probe(*enrolled_candidates[i], enrolled=True) for i in keep_e]
    probes += [Probe(*unenrolled_candidates[i], enrolled=False) for i in keep_u]
    order = rng.permutation(len(probes))
    return ProbeSet(tuple(probes[i] for i in order))


def permute_gallery(g: Gallery, rng: np.random.Generator) -> Gallery:
    """Same enrollment multiset in a uniformly random new order."""
    order = rng.permutation(g.size)
    return Gallery(tuple(g.entries[i] for i in order))
