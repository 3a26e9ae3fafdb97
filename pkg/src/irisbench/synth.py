"""Synthetic identity and sample generation with controlled statistics.

Identities are noiseless master codes built by tiling a configurable number
of independent fair bits (the degrees of freedom) across the template grid,
which pins the impostor score variance at 0.25/dof.  Samples of an identity
add per-bit flips, a random column rotation and an eyelid-like occlusion
band.  Sample quality varies: most samples flip bits at a low base rate,
while a small tail of noisy samples flips substantially more, producing the
genuine/impostor score overlap that lenient thresholds need to misfire on.
The per-bit flip mean stays exactly at the configured rate, so the expected
genuine distance remains 2p(1-p).

Identity-level spatial transforms (180-degree rotation, horizontal flip)
derive additional subjects whose scores against their source are
statistically impostor-like.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .templates import Template

__all__ = [
    "PopulationParams",
    "IdentityMaster",
    "AugmentKind",
    "SubjectRecord",
    "Population",
    "gen_identity",
    "gen_sample",
    "augment_identity",
    "generate_population",
]


@dataclass(frozen=True)
class PopulationParams:
    """Statistical knobs of the synthetic population.

    ``genuine_flip_prob`` is the mean per-bit flip probability per sample.
    When ``flip_tail_fraction`` > 0, that fraction of samples draws its flip
    probability uniformly from a low-quality tail reaching up to
    ``flip_tail_max``; the remaining samples use a clean rate chosen so the
    mean is preserved exactly.
    """

    degrees_of_freedom: int
    genuine_flip_prob: float
    max_rotation_offset: int
    occlusion_fraction_range: tuple[float, float]
    geometry: tuple[int, int, int] = (20, 240, 2)
    seed: int = 0
    flip_tail_fraction: float = 0.0
    flip_tail_max: float = 0.48

    def __post_init__(self) -> None:
        rows, cols, bpc = self.geometry
        total = rows * cols * bpc
        if min(rows, cols, bpc) < 1:
            raise ValueError("geometry components must be >= 1")
        if not 0 < self.degrees_of_freedom <= total:
            raise ValueError(
                f"degrees_of_freedom must be in (0, {total}], got {self.degrees_of_freedom}"
            )
        if not 0.0 <= self.genuine_flip_prob < 0.5:
            raise ValueError("genuine_flip_prob must be in [0, 0.5)")
        lo, hi = self.occlusion_fraction_range
        if not 0.0 <= lo <= hi < 0.5:
            raise ValueError("occlusion_fraction_range must lie within [0, 0.5)")
        if not 0 <= self.max_rotation_offset < cols:
            raise ValueError("max_rotation_offset must be in [0, cols)")
        if not 0.0 <= self.flip_tail_fraction < 1.0:
            raise ValueError("flip_tail_fraction must be in [0, 1)")
        if self.flip_tail_fraction > 0.0:
            if not self.genuine_flip_prob < self.flip_tail_max < 0.5:
                raise ValueError("flip_tail_max must be in (genuine_flip_prob, 0.5)")
            if self.clean_flip_prob < 0.0:
                raise ValueError("flip tail too heavy for the configured mean flip prob")

    @property
    def total_bits(self) -> int:
        rows, cols, bpc = self.geometry
        return rows * cols * bpc

    @property
    def clean_flip_prob(self) -> float:
        """Flip probability of non-tail samples, preserving the configured mean."""
        f = self.flip_tail_fraction
        if f == 0.0:
            return self.genuine_flip_prob
        return (self.genuine_flip_prob - f * self.flip_tail_max / 2.0) / (1.0 - f / 2.0)


@dataclass(frozen=True)
class IdentityMaster:
    """A noiseless identity code; all samples of a subject derive from it."""

    subject_id: str
    master_code: np.ndarray
    geometry: tuple[int, int, int]

    def __post_init__(self) -> None:
        rows, cols, bpc = self.geometry
        code = np.ascontiguousarray(np.asarray(self.master_code, dtype=bool).reshape(-1))
        if code.size != rows * cols * bpc:
            raise ValueError("master_code length does not match geometry")
        code.setflags(write=False)
        object.__setattr__(self, "master_code", code)


class AugmentKind(enum.Enum):
    ROTATE180 = "rot180"
    FLIP_HORIZONTAL = "fliph"


def gen_identity(
    params: PopulationParams, rng: np.random.Generator, subject_id: str = ""
) -> IdentityMaster:
    """Draw a fresh identity: dof fair bits, each tiled over a contiguous block."""
    dof = params.degrees_of_freedom
    total = params.total_bits
    base, rem = divmod(total, dof)
    block_sizes = np.full(dof, base, dtype=np.int64)
    block_sizes[:rem] += 1
    bits = rng.integers(0, 2, size=dof, dtype=np.uint8).astype(bool)
    return IdentityMaster(subject_id, np.repeat(bits, block_sizes), params.geometry)


def _sample_flip_prob(params: PopulationParams, rng: np.random.Generator) -> float:
    if params.flip_tail_fraction == 0.0:
        return params.genuine_flip_prob
    p0 = params.clean_flip_prob
    if rng.random() >= params.flip_tail_fraction:
        return p0
    return p0 + (params.flip_tail_max - p0) * rng.random()


def gen_sample(
    master: IdentityMaster, params: PopulationParams, rng: np.random.Generator
) -> Template:
    """One observed sample of an identity: flips, rotation offset, occlusion band."""
    rows, cols, bpc = master.geometry
    total = rows * cols * bpc
    flip_prob = _sample_flip_prob(params, rng)
    code = master.master_code ^ (rng.random(total) < flip_prob)
    if params.max_rotation_offset > 0:
        k = params.max_rotation_offset
        shift = int(rng.integers(-k, k + 1))
        if shift:
            code = np.roll(code.reshape(rows, cols, bpc), shift, axis=1).reshape(-1)
    mask = np.ones((rows, cols, bpc), dtype=bool)
    lo, hi = params.occlusion_fraction_range
    if hi > 0.0:
        occluded = int(round(rng.uniform(lo, hi) * rows))
        occluded = min(occluded, rows - 1)  # never fully occlude
        if occluded:
            start = int(rng.integers(0, rows - occluded + 1))
            mask[start : start + occluded] = False
    return Template(rows, cols, bpc, code, mask)


def augment_identity(master: IdentityMaster, kind: AugmentKind) -> IdentityMaster:
    """Derive a new identity by a deterministic spatial transform of the code."""
    rows, cols, bpc = master.geometry
    grid = master.master_code.reshape(rows, cols, bpc)
    if kind is AugmentKind.ROTATE180:
        code = grid[::-1, ::-1, :]
    elif kind is AugmentKind.FLIP_HORIZONTAL:
        code = grid[:, ::-1, :]
    else:  # pragma: no cover
        raise ValueError(f"unknown augmentation {kind!r}")
    return IdentityMaster(f"{master.subject_id}-{kind.value}", code.copy(), master.geometry)


@dataclass(frozen=True)
class SubjectRecord:
    """One subject of the pool: identity, provenance and its generated samples."""

    subject_id: str
    origin: str  # original | rot180 | fliph
    master: IdentityMaster
    samples: tuple[Template, ...]


@dataclass(frozen=True)
class Population:
    params: PopulationParams
    subjects: tuple[SubjectRecord, ...] = field(default_factory=tuple)

    @property
    def n_subjects(self) -> int:
        return len(self.subjects)

    def by_id(self) -> dict[str, SubjectRecord]:
        return {s.subject_id: s for s in self.subjects}


def generate_population(
    params: PopulationParams,
    n_subjects: int,
    samples_per_subject: int,
    rng: np.random.Generator | None = None,
) -> Population:
    """Generate the full pool, one third each original/rot180/fliph identities.

    Mirrors the dataset-inflation protocol: base identities are drawn fresh,
    then each contributes two transformed identities treated as distinct
    subjects.  Samples are generated per subject; the first sample of each
    subject is its designated enrollment reference.
    """
    if n_subjects < 1:
        raise ValueError("n_subjects must be >= 1")
    if samples_per_subject < 1:
        raise ValueError("samples_per_subject must be >= 1")
    if rng is None:
        rng = np.random.default_rng(params.seed)
    n_base = -(-n_subjects // 3)
    masters: list[tuple[IdentityMaster, str]] = []
    for b in range(n_base):
        base = gen_identity(params, rng, f"s{b:05d}")
        masters.append((base, "original"))
        masters.append((augment_identity(base, AugmentKind.ROTATE180), "rot180"))
        masters.append((augment_identity(base, AugmentKind.FLIP_HORIZONTAL), "fliph"))
    subjects = []
    for master, origin in masters[:n_subjects]:
        samples = tuple(gen_sample(master, params, rng) for _ in range(samples_per_subject))
        subjects.append(SubjectRecord(master.subject_id, origin, master, samples))
    return Population(params, tuple(subjects))
