"""Binary templates and masked fractional Hamming comparison.

A template is a fixed grid of code bits (radial rows x angular columns x
bits per cell) together with a per-bit validity mask.  Comparison is the
fraction of disagreeing bits among the jointly valid bits, optionally
minimized over a range of circular column rotations ("best-of-M").
Scores carry an explicit polarity so dissimilarity matchers (Hamming
distance) and similarity matchers can share threshold logic.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Polarity",
    "Score",
    "Template",
    "RotationPolicy",
    "TemplateError",
    "GeometryMismatchError",
    "NoOverlapError",
    "InvalidShiftError",
    "PolarityError",
    "rotate_template",
    "fractional_hamming",
    "hamming_counts",
    "best_of_rotations",
    "meets_threshold",
    "shift_sequence",
    "read_irtb",
    "write_irtb",
]


class TemplateError(ValueError):
    """Invalid template construction or use."""


class GeometryMismatchError(TemplateError):
    """Compared templates do not share the same grid geometry."""


class NoOverlapError(TemplateError):
    """The joint validity mask of a comparison is empty."""


class InvalidShiftError(TemplateError):
    """Requested rotation shift is not smaller than the column count."""


class PolarityError(ValueError):
    """Scores or thresholds of different polarity were mixed."""


class Polarity(enum.Enum):
    DISSIMILARITY = "dissimilarity"
    SIMILARITY = "similarity"


@dataclass(frozen=True)
class Score:
    """A comparison score with explicit polarity.

    Dissimilarity values are fractional Hamming distances in [0, 1];
    similarity values are nonnegative on the matcher's own scale.
    """

    value: float
    polarity: Polarity

    def __post_init__(self) -> None:
        if self.polarity is Polarity.DISSIMILARITY:
            if not 0.0 <= self.value <= 1.0:
                raise ValueError(f"dissimilarity score {self.value!r} outside [0, 1]")
        else:
            if self.value < 0.0:
                raise ValueError(f"similarity score {self.value!r} is negative")

    def better_than(self, other: "Score") -> bool:
        """True if this score indicates a closer match than ``other``."""
        if self.polarity is not other.polarity:
            raise PolarityError("cannot compare scores of different polarity")
        if self.polarity is Polarity.DISSIMILARITY:
            return self.value < other.value
        return self.value > other.value


def _as_bitplane(bits, n_bits: int, what: str) -> np.ndarray:
    arr = np.asarray(bits)
    if arr.dtype != np.bool_:
        if not np.isin(arr, (0, 1)).all():
            raise TemplateError(f"{what} must contain only 0/1 values")
        arr = arr.astype(bool)
    arr = np.ascontiguousarray(arr.reshape(-1))
    if arr.size != n_bits:
        raise TemplateError(f"{what} has {arr.size} bits, geometry requires {n_bits}")
    arr.setflags(write=False)
    return arr


def pack_words(bits: np.ndarray) -> np.ndarray:
    """Pack a flat boolean bit vector LSB-first into little-endian uint64 words."""
    packed = np.packbits(bits, bitorder="little")
    pad = (-packed.size) % 8
    if pad:
        packed = np.concatenate([packed, np.zeros(pad, dtype=np.uint8)])
    words = packed.view("<u8")
    words.setflags(write=False)
    return words


class Template:
    """A packed binary code with validity mask on a rows x cols x bits grid.

    Instances are immutable; the bit planes are exposed as read-only flat
    boolean arrays in row-major (row, column, bit) order.
    """

    __slots__ = ("rows", "cols", "bits_per_cell", "code", "mask", "_words")

    def __init__(self, rows: int, cols: int, bits_per_cell: int, code, mask) -> None:
        if min(rows, cols, bits_per_cell) < 1:
            raise TemplateError("rows, cols and bits_per_cell must all be >= 1")
        object.__setattr__(self, "rows", int(rows))
        object.__setattr__(self, "cols", int(cols))
        object.__setattr__(self, "bits_per_cell", int(bits_per_cell))
        n = self.rows * self.cols * self.bits_per_cell
        object.__setattr__(self, "code", _as_bitplane(code, n, "code"))
        object.__setattr__(self, "mask", _as_bitplane(mask, n, "mask"))
        if not self.mask.any():
            raise TemplateError("mask has no valid bits (fully occluded template)")
        object.__setattr__(self, "_words", None)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("Template is immutable")

    @property
    def n_bits(self) -> int:
        return self.rows * self.cols * self.bits_per_cell

    @property
    def geometry(self) -> tuple[int, int, int]:
        return (self.rows, self.cols, self.bits_per_cell)

    def grid_code(self) -> np.ndarray:
        return self.code.reshape(self.rows, self.cols, self.bits_per_cell)

    def grid_mask(self) -> np.ndarray:
        return self.mask.reshape(self.rows, self.cols, self.bits_per_cell)

    def words(self) -> tuple[np.ndarray, np.ndarray]:
        """(code_words, mask_words) as packed uint64, cached after first use."""
        cached = self._words
        if cached is None:
            cached = (pack_words(self.code), pack_words(self.mask))
            object.__setattr__(self, "_words", cached)
        return cached

    def __eq__(self, other) -> bool:
        if not isinstance(other, Template):
            return NotImplemented
        return (
            self.geometry == other.geometry
            and np.array_equal(self.code, other.code)
            and np.array_equal(self.mask, other.mask)
        )

    def __hash__(self) -> int:
        return hash((self.geometry, self.code.tobytes(), self.mask.tobytes()))

    def __repr__(self) -> str:
        return (
            f"Template({self.rows}x{self.cols}x{self.bits_per_cell}, "
            f"{int(self.mask.sum())}/{self.n_bits} valid bits)"
        )


def rotate_template(t: Template, shift: int) -> Template:
    """Circularly shift code and mask along the angular (column) axis.

    All bits of a cell move together; a positive shift moves content
    toward higher column indices.
    """
    if abs(shift) >= t.cols:
        raise InvalidShiftError(f"|shift| = {abs(shift)} must be < cols = {t.cols}")
    if shift == 0:
        return t
    code = np.roll(t.grid_code(), shift, axis=1)
    mask = np.roll(t.grid_mask(), shift, axis=1)
    return Template(t.rows, t.cols, t.bits_per_cell, code, mask)


def _check_compatible(a: Template, b: Template) -> None:
    if a.geometry != b.geometry:
        raise GeometryMismatchError(
            f"incompatible geometries {a.geometry} vs {b.geometry}"
        )


def hamming_counts(a: Template, b: Template) -> tuple[int, int]:
    """(disagreeing bits, jointly valid bits) for a pair of templates."""
    _check_compatible(a, b)
    ac, am = a.words()
    bc, bm = b.words()
    joint = am & bm
    den = int(np.bitwise_count(joint).sum())
    num = int(np.bitwise_count((ac ^ bc) & joint).sum())
    return num, den


def fractional_hamming(a: Template, b: Template) -> Score:
    """Masked fractional Hamming distance between two compatible templates."""
    num, den = hamming_counts(a, b)
    if den == 0:
        raise NoOverlapError("joint mask is empty; pair is not comparable")
    return Score(num / den, Polarity.DISSIMILARITY)


def shift_sequence(lo: int, hi: int) -> tuple[int, ...]:
    """Shifts of [lo, hi] in tie-break precedence: smallest |s| first, negative before positive."""
    if lo > hi:
        raise ValueError(f"empty shift range [{lo}, {hi}]")
    return tuple(sorted(range(lo, hi + 1), key=lambda s: (abs(s), s >= 0)))


def best_of_rotations(
    a: Template, b: Template, shifts: tuple[int, int]
) -> tuple[Score, int]:
    """Best comparison of ``a`` against rotations of ``b`` over a shift interval.

    Returns the minimum dissimilarity and the shift achieving it.  Ties are
    broken by smallest |shift|, then negative shift first.  Shifts whose
    joint mask is empty are skipped; if every shift is empty a
    NoOverlapError is raised.
    """
    _check_compatible(a, b)
    best_value = None
    best_shift = 0
    for s in shift_sequence(*shifts):
        num, den = hamming_counts(a, rotate_template(b, s))
        if den == 0:
            continue
        value = num / den
        if best_value is None or value < best_value:
            best_value = value
            best_shift = s
    if best_value is None:
        raise NoOverlapError("joint mask empty at every shift in range")
    return Score(best_value, Polarity.DISSIMILARITY), best_shift


def meets_threshold(score: Score, threshold) -> bool:
    """Decision rule: dissimilarity matches at value <= t, similarity at value >= t.

    ``threshold`` is any object with ``value`` and ``polarity`` attributes
    (see calibration.Threshold).
    """
    if score.polarity is not threshold.polarity:
        raise PolarityError(
            f"score polarity {score.polarity} does not match threshold "
            f"polarity {threshold.polarity}"
        )
    if score.polarity is Polarity.DISSIMILARITY:
        return score.value <= threshold.value
    return score.value >= threshold.value


@dataclass(frozen=True)
class RotationPolicy:
    """Rotation search ranges for a scan.

    ``narrow`` and ``wide`` are half-extents: a value k means column shifts
    in [-k, +k].  Two-stage policies scan the narrow range first and rescan
    over the wide range only when the narrow scan found no match (NEXUS
    style).  Single-stage policies use only the narrow range.
    """

    narrow: int
    wide: int | None = None
    two_stage: bool = False

    def __post_init__(self) -> None:
        if self.narrow < 0:
            raise ValueError("narrow half-extent must be >= 0")
        if self.two_stage:
            if self.wide is None or self.wide < self.narrow:
                raise ValueError("two-stage policy requires wide >= narrow")
        else:
            object.__setattr__(self, "wide", self.narrow)

    @property
    def narrow_range(self) -> tuple[int, int]:
        return (-self.narrow, self.narrow)

    @property
    def wide_range(self) -> tuple[int, int]:
        return (-self.wide, self.wide)

    @property
    def effective_range(self) -> tuple[int, int]:
        """Range that defines a pair's final score: wide if two-stage."""
        return self.wide_range if self.two_stage else self.narrow_range

    @property
    def narrow_shifts(self) -> tuple[int, ...]:
        return shift_sequence(*self.narrow_range)

    @property
    def extra_shifts(self) -> tuple[int, ...]:
        """Wide-range shifts outside the narrow range, in precedence order."""
        if not self.two_stage or self.wide == self.narrow:
            return ()
        return tuple(
            s for s in shift_sequence(*self.wide_range) if abs(s) > self.narrow
        )

    @property
    def all_shifts(self) -> tuple[int, ...]:
        """Narrow shifts then wide extras; strict-min scanning over this
        sequence realizes the documented tie-break for both ranges."""
        return self.narrow_shifts + self.extra_shifts

    @property
    def n_narrow_shifts(self) -> int:
        return 2 * self.narrow + 1

    @property
    def n_wide_shifts(self) -> int:
        return 2 * self.wide + 1

    @property
    def effective_shift_count(self) -> int:
        return self.n_wide_shifts if self.two_stage else self.n_narrow_shifts

    @property
    def label(self) -> str:
        return f"n{self.narrow}w{self.wide}" if self.two_stage else f"n{self.narrow}"

    @classmethod
    def from_label(cls, label: str) -> "RotationPolicy":
        text = label.strip()
        if not text.startswith("n"):
            raise ValueError(f"bad rotation policy label {label!r}")
        body = text[1:]
        if "w" in body:
            narrow, wide = body.split("w", 1)
            return cls(narrow=int(narrow), wide=int(wide), two_stage=True)
        return cls(narrow=int(body))


# --- IRTB v1 binary template file format ------------------------------------
#
# magic 'IRTB', version byte 0x01, little-endian u16 rows, u16 cols, u8
# bits_per_cell, then the code bits packed LSB-first in row-major order and
# the mask bits likewise, each plane padded to a whole byte.

_IRTB_MAGIC = b"IRTB"
_IRTB_VERSION = 1
_IRTB_HEADER = struct.Struct("<4sBHHB")


def write_irtb(t: Template, path) -> None:
    plane_code = np.packbits(t.code, bitorder="little").tobytes()
    plane_mask = np.packbits(t.mask, bitorder="little").tobytes()
    header = _IRTB_HEADER.pack(
        _IRTB_MAGIC, _IRTB_VERSION, t.rows, t.cols, t.bits_per_cell
    )
    Path(path).write_bytes(header + plane_code + plane_mask)


def read_irtb(path) -> Template:
    raw = Path(path).read_bytes()
    if len(raw) < _IRTB_HEADER.size:
        raise TemplateError(f"{path}: truncated IRTB header")
    magic, version, rows, cols, bpc = _IRTB_HEADER.unpack_from(raw)
    if magic != _IRTB_MAGIC:
        raise TemplateError(f"{path}: bad magic {magic!r}")
    if version != _IRTB_VERSION:
        raise TemplateError(f"{path}: unsupported IRTB version {version}")
    n_bits = rows * cols * bpc
    plane_bytes = (n_bits + 7) // 8
    expected = _IRTB_HEADER.size + 2 * plane_bytes
    if len(raw) != expected:
        raise TemplateError(
            f"{path}: expected {expected} bytes for {rows}x{cols}x{bpc}, got {len(raw)}"
        )
    body = np.frombuffer(raw, dtype=np.uint8, offset=_IRTB_HEADER.size)
    code = np.unpackbits(body[:plane_bytes], count=n_bits, bitorder="little")
    mask = np.unpackbits(body[plane_bytes:], count=n_bits, bitorder="little")
    return Template(rows, cols, bpc, code, mask)
