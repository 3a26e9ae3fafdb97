"""Shared template builders for the test suite."""

import numpy as np

from irisbench.templates import Template


def make_template(rows, cols, bpc, code, mask=None) -> Template:
    if mask is None:
        mask = np.ones(rows * cols * bpc, dtype=bool)
    return Template(rows, cols, bpc, code, mask)


def random_template(rng, rows, cols, bpc, mask_density=1.0) -> Template:
    n = rows * cols * bpc
    code = rng.integers(0, 2, n, dtype=np.uint8)
    while True:
        mask = (
            np.ones(n, dtype=bool)
            if mask_density >= 1.0
            else rng.random(n) < mask_density
        )
        if mask.any():
            return Template(rows, cols, bpc, code, mask)


def random_geometry(rng, max_bits=64):
    while True:
        rows = int(rng.integers(1, 5))
        cols = int(rng.integers(2, 9))
        bpc = int(rng.integers(1, 3))
        if rows * cols * bpc <= max_bits:
            return rows, cols, bpc
