"""The six figure families over sweep results.

Every plotted point is a raw CSV value: line and scatter families select
the base gallery order (permutation 0) rather than averaging, and the
permutation family shows each permutation's value.  Output is deterministic
SVG (fixed style, salted element ids, no timestamps).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .schema import (
    EmptySelectionError,
    load_distributions,
    load_results,
    select,
)

__all__ = ["FigureFamily", "FigureSpec", "render"]

STRATEGY_STYLE = {
    "one_to_n": dict(color="#1f77b4", marker="o", label="1:N"),
    "one_to_first": dict(color="#d62728", marker="x", label="1:First"),
}
RATE_COLORS = {"tpir": "#2ca02c", "fnir": "#1f77b4", "e_fpir": "#d62728"}


class FigureFamily(enum.Enum):
    RATES_BY_GALLERY_SIZE = "rates_by_gallery_size"
    EFPIR_OPEN = "efpir_open"
    PERMUTATION_SPREAD = "permutation_spread"
    EFPIR_BY_THRESHOLD = "efpir_by_threshold"
    SPEED_VS_ACCURACY = "speed_vs_accuracy"
    DISTRIBUTION_CHECK = "distribution_check"


@dataclass(frozen=True)
class FigureSpec:
    figure_family: FigureFamily
    input_csv: Path
    output: Path


def _deterministic_style() -> None:
    plt.rcParams["svg.hashsalt"] = "isb-figures"
    plt.rcParams["figure.dpi"] = 100
    plt.rcParams["font.size"] = 9


def _targets(frame) -> list[float]:
    return sorted(frame["accuracy_target"].unique())


def _rates_by_gallery_size(frame):
    base = select(frame, "closed-set base order", set_type="closed", permutation_index=0)
    targets = _targets(base)
    fig, axes = plt.subplots(
        len(targets), 2, figsize=(8, 2.2 * len(targets)),
        sharex=True, sharey=True, squeeze=False,
    )
    for row, target in enumerate(targets):
        for col, strategy in enumerate(("one_to_n", "one_to_first")):
            ax = axes[row][col]
            cell = select(
                base, "rates panel", strategy=strategy, accuracy_target=target
            ).sort_values("gallery_size")
            for metric, color in RATE_COLORS.items():
                ax.plot(cell["gallery_size"], cell[metric], color=color,
                        marker=".", lw=1, label=metric.replace("_", "-").upper())
            ax.set_title(f"{STRATEGY_STYLE[strategy]['label']}, target {target:g}")
            ax.set_ylim(-0.05, 1.05)
            if row == len(targets) - 1:
                ax.set_xlabel("enrollment size")
            if col == 0:
                ax.set_ylabel("rate")
    axes[0][0].legend(loc="center right", fontsize=7)
    fig.suptitle("Identification rates by enrollment size (closed set)")
    return fig


def _efpir_open(frame):
    base = select(frame, "open-set base order", set_type="open", permutation_index=0)
    targets = _targets(base)
    fig, axes = plt.subplots(
        1, len(targets), figsize=(2.6 * len(targets), 3.0),
        sharey=True, squeeze=False,
    )
    for col, target in enumerate(targets):
        ax = axes[0][col]
        for strategy, style in STRATEGY_STYLE.items():
            cell = select(
                base, "open-set panel", strategy=strategy, accuracy_target=target
            ).sort_values("gallery_size")
            ax.plot(cell["gallery_size"], cell["e_fpir"], lw=1,
                    markersize=4, **style)
        ax.set_title(f"target {target:g}")
        ax.set_xlabel("enrollment size")
        if col == 0:
            ax.set_ylabel("E-FPIR")
            ax.legend(fontsize=7)
    fig.suptitle("Open-set E-FPIR by enrollment size")
    return fig


def _permutation_spread(frame):
    closed = select(frame, "closed-set rows", set_type="closed")
    if closed["permutation_index"].nunique() < 2:
        raise EmptySelectionError(
            "permutation_spread needs at least two permutations per cell"
        )
    targets = _targets(closed)
    fig, axes = plt.subplots(
        1, len(targets), figsize=(2.6 * len(targets), 3.0),
        sharey=True, squeeze=False,
    )
    for col, target in enumerate(targets):
        ax = axes[0][col]
        for strategy, style in STRATEGY_STYLE.items():
            cell = select(closed, "spread panel", strategy=strategy,
                          accuracy_target=target)
            ax.scatter(cell["gallery_size"], cell["e_fpir"], s=12, alpha=0.7,
                       color=style["color"], marker=style["marker"],
                       label=style["label"])
        ax.set_title(f"target {target:g}")
        ax.set_xlabel("enrollment size")
        if col == 0:
            ax.set_ylabel("E-FPIR per permutation")
            ax.legend(fontsize=7)
    fig.suptitle("E-FPIR across gallery permutations (closed set)")
    return fig


def _efpir_by_threshold(frame):
    largest = int(frame["gallery_size"].max())
    base = select(frame, "largest-gallery base order",
                  gallery_size=largest, permutation_index=0)
    fig, ax = plt.subplots(figsize=(6, 4))
    for set_type in sorted(base["set_type"].unique()):
        for strategy, style in STRATEGY_STYLE.items():
            cell = select(base, "threshold series", set_type=set_type,
                          strategy=strategy).sort_values("threshold")
            ax.plot(cell["threshold"], cell["e_fpir"], lw=1, markersize=5,
                    color=style["color"], marker=style["marker"],
                    linestyle="-" if set_type == "closed" else "--",
                    label=f"{style['label']} ({set_type})")
    ax.set_xlabel("decision threshold (more lenient to the right)")
    ax.set_ylabel("E-FPIR")
    ax.set_title(f"E-FPIR vs threshold, enrollment {largest}")
    ax.legend(fontsize=7)
    return fig


def _speed_vs_accuracy(frame):
    base = select(frame, "closed-set base order", set_type="closed",
                  permutation_index=0)
    fig, ax = plt.subplots(figsize=(6, 4))
    for strategy, style in STRATEGY_STYLE.items():
        cell = select(base, "speed series", strategy=strategy)
        ax.scatter(cell["mean_normalized_comparisons"], cell["tpir"], s=14,
                   alpha=0.75, color=style["color"], marker=style["marker"],
                   label=style["label"])
    worst_exhaustive = select(base, "speed baseline", strategy="one_to_n")["tpir"].min()
    ax.axhline(worst_exhaustive, color="red", linestyle=":", lw=1.2,
               label="worst 1:N accuracy")
    ax.set_xlabel("normalized comparisons")
    ax.set_ylabel("TPIR")
    ax.set_title("Search speed vs accuracy (closed set)")
    ax.legend(fontsize=7, loc="lower right")
    return fig


def _ecdf(ax, values, **style):
    xs = np.sort(np.asarray(values, dtype=float))
    ys = np.arange(1, len(xs) + 1) / len(xs)
    ax.plot(xs, ys, lw=1, **style)


def _distribution_check(frame):
    fig, axes = plt.subplots(1, 2, figsize=(8, 3.2))
    pairs = (
        ("master_impostor", "unrelated identities", "#1f77b4"),
        ("master_augmented", "transformed vs source", "#d62728"),
    )
    for kind, label, color in pairs:
        sub = select(frame, "identity-level scores", kind=kind)
        _ecdf(axes[0], sub["score"], color=color, label=label)
    axes[0].set_title("Identity-level distances")
    axes[0].legend(fontsize=7)
    for kind, label, color in (
        ("genuine", "genuine", "#2ca02c"),
        ("impostor", "impostor", "#1f77b4"),
    ):
        sub = select(frame, "sample-level scores", kind=kind)
        _ecdf(axes[1], sub["score"], color=color, label=label)
    axes[1].set_title("Matcher score CDFs")
    axes[1].legend(fontsize=7)
    for ax in axes:
        ax.set_xlabel("fractional Hamming distance")
        ax.set_ylabel("cumulative fraction")
    return fig


_RENDERERS = {
    FigureFamily.RATES_BY_GALLERY_SIZE: (_rates_by_gallery_size, load_results),
    FigureFamily.EFPIR_OPEN: (_efpir_open, load_results),
    FigureFamily.PERMUTATION_SPREAD: (_permutation_spread, load_results),
    FigureFamily.EFPIR_BY_THRESHOLD: (_efpir_by_threshold, load_results),
    FigureFamily.SPEED_VS_ACCURACY: (_speed_vs_accuracy, load_results),
    FigureFamily.DISTRIBUTION_CHECK: (_distribution_check, load_distributions),
}


def render(spec: FigureSpec):
    """Render one family to its output path; returns the matplotlib figure.

    The output file is written only after the figure builds, so failures
    never leave a partial image behind.
    """
    _deterministic_style()
    renderer, loader = _RENDERERS[spec.figure_family]
    frame = loader(spec.input_csv)
    fig = renderer(frame)
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format=out.suffix.lstrip(".") or "svg",
                metadata={"Date": None})
    plt.close(fig)
    return fig
