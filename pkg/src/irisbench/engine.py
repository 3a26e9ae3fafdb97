"""Batched rotation-tolerant scoring over packed 64-bit words.

The sweep's hot loop: every (probe, gallery entry) pair is scored at every
column rotation of the probe, and the per-pair minima over the narrow and
wide ranges are returned as dense matrices.  Those matrices are reused
across thresholds, strategies and gallery permutations, which never change
pair scores.  Pairs whose joint mask is empty at every shift score +inf
("worst possible"), so downstream scans stay total.

A numba kernel does the real work; a pure-numpy fallback with identical
output exists for environments without numba and as a cross-check.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .templates import RotationPolicy, Template, pack_words

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

__all__ = [
    "HAVE_NUMBA",
    "packed_planes",
    "rotated_probe_planes",
    "score_matrices",
    "set_jobs",
]


def packed_planes(templates: Sequence[Template]) -> tuple[np.ndarray, np.ndarray]:
    """Stack code and mask words of equal-geometry templates into (N, W) arrays."""
    codes = np.stack([t.words()[0] for t in templates])
    masks = np.stack([t.words()[1] for t in templates])
    return codes, masks


def rotated_probe_planes(
    t: Template, shifts: Sequence[int]
) -> tuple[np.ndarray, np.ndarray]:
    """Pack every requested column rotation of one template into (R, W) words."""
    shifts = np.asarray(shifts, dtype=np.int64)
    cols = np.arange(t.cols)
    # rotated[c] = original[(c - s) mod cols], all bits of a cell together
    idx = (cols[None, :] - shifts[:, None]) % t.cols
    out = []
    for plane in (t.grid_code(), t.grid_mask()):
        rot = plane[:, idx, :]  # (rows, R, cols, bits)
        rot = np.moveaxis(rot, 1, 0).reshape(len(shifts), t.n_bits)
        packed = np.packbits(rot, axis=1, bitorder="little")
        pad = (-packed.shape[1]) % 8
        if pad:
            packed = np.pad(packed, ((0, 0), (0, pad)))
        out.append(np.ascontiguousarray(packed).view("<u8"))
    return out[0], out[1]


if HAVE_NUMBA:

    @njit(inline="always")
    def _pop64(x):
        x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
        x = (x & np.uint64(0x3333333333333333)) + (
            (x >> np.uint64(2)) & np.uint64(0x3333333333333333)
        )
        x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
        return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)

    @njit(cache=True, parallel=True)
    def _scan_kernel(pc, pm, gc, gm, n_narrow, out_narrow, out_wide):
        n_probes, n_rot, n_words = pc.shape
        n_gallery = gc.shape[0]
        for p in prange(n_probes):
            for j in range(n_gallery):
                best_narrow = np.inf
                best_wide = np.inf
                for r in range(n_rot):
                    num = np.uint64(0)
                    den = np.uint64(0)
                    for w in range(n_words):
                        joint = pm[p, r, w] & gm[j, w]
                        den += _pop64(joint)
                        num += _pop64((pc[p, r, w] ^ gc[j, w]) & joint)
                    if den > np.uint64(0):
                        value = num / den
                        if r < n_narrow and value < best_narrow:
                            best_narrow = value
                        if value < best_wide:
                            best_wide = value
                out_narrow[p, j] = best_narrow
                out_wide[p, j] = best_wide


def _scan_numpy(pc, pm, gc, gm, n_narrow, out_narrow, out_wide):
    n_probes, n_rot, _ = pc.shape
    for p in range(n_probes):
        for r in range(n_rot):
            joint = pm[p, r][None, :] & gm
            den = np.bitwise_count(joint).sum(axis=1)
            num = np.bitwise_count((pc[p, r][None, :] ^ gc) & joint).sum(axis=1)
            value = np.where(den > 0, num / np.maximum(den, 1), np.inf)
            if r < n_narrow:
                np.minimum(out_narrow[p], value, out=out_narrow[p])
            np.minimum(out_wide[p], value, out=out_wide[p])


def set_jobs(jobs: int | None) -> int:
    """Bound numba's worker-thread count; results are identical for any count."""
    if not HAVE_NUMBA:
        return 1
    limit = numba.config.NUMBA_NUM_THREADS
    effective = limit if jobs is None else max(1, min(int(jobs), limit))
    numba.set_num_threads(effective)
    return effective


def score_matrices(
    probes: Sequence[Template],
    gallery_templates: Sequence[Template],
    policy: RotationPolicy,
    *,
    chunk: int = 256,
    use_numba: bool | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-pair best dissimilarity under the narrow and wide ranges.

    Returns float64 matrices of shape (n_probes, n_gallery); entries are
    exactly num/den of the winning rotation, or +inf for non-comparable
    pairs.  Scoring shifts of the gallery entry by s equals shifting the
    probe by -s, so rotations are materialized once per probe.
    """
    if use_numba is None:
        use_numba = HAVE_NUMBA
    gc, gm = packed_planes(gallery_templates)
    probe_shifts = [-s for s in policy.all_shifts]
    n_narrow = len(policy.narrow_shifts)
    n_probes, n_gallery = len(probes), len(gallery_templates)
    narrow = np.full((n_probes, n_gallery), np.inf)
    wide = np.full((n_probes, n_gallery), np.inf)
    for start in range(0, n_probes, chunk):
        batch = probes[start : start + chunk]
        planes = [rotated_probe_planes(t, probe_shifts) for t in batch]
        pc = np.ascontiguousarray(np.stack([c for c, _ in planes]))
        pm = np.ascontiguousarray(np.stack([m for _, m in planes]))
        view_n = narrow[start : start + len(batch)]
        view_w = wide[start : start + len(batch)]
        if use_numba:
            _scan_kernel(pc, pm, gc, gm, n_narrow, view_n, view_w)
        else:
            _scan_numpy(pc, pm, gc, gm, n_narrow, view_n, view_w)
    return narrow, wide
