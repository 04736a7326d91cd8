"""Row-major square-matrix encoding and its rotation/mask primitives.

An N x N matrix lives row by row in the first N^2 slots of a ciphertext
(cell (i, j) in slot i*N + j).  On top of cyclic rotations this gives the
eight building blocks used by the ranking pipelines: row/column masking,
row/column summation, row/column replication, and the log-cost vector
transposes.  All of them need exactly log2(N) rotations (transposes
ceil(log2 N)); masks are cached plaintext vectors.

Slots beyond N^2 must be zero on entry; every primitive that rotates data
across that boundary ends with a mask, so pipelines built from these
blocks preserve the invariant.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .engine import Ciphertext, HESimulator

__all__ = ["MatrixLayout", "mask", "sum_axis", "replicate", "transpose_vector"]


@dataclass(frozen=True)
class MatrixLayout:
    """Square side length (a power of two) and the hosting slot count."""

    n_dim: int
    slot_count: int

    def __post_init__(self):
        n = self.n_dim
        if n < 1 or (n & (n - 1)) != 0:
            raise ValueError(f"matrix side must be a power of two, got {n}")
        if n * n > self.slot_count:
            raise ValueError(
                f"matrix of side {n} needs {n * n} slots, only {self.slot_count} available"
            )

    @property
    def steps(self) -> int:
        return self.n_dim.bit_length() - 1


@lru_cache(maxsize=None)
def _line_mask(n_dim: int, slot_count: int, axis: str, k: int) -> np.ndarray:
    m = np.zeros(slot_count)
    if axis == "row":
        m[k * n_dim : (k + 1) * n_dim] = 1.0
    else:
        m[k : n_dim * n_dim : n_dim] = 1.0
    m.setflags(write=False)
    return m


def _check_axis(axis: str):
    if axis not in ("row", "col"):
        raise ValueError(f"axis must be 'row' or 'col', got {axis!r}")


def mask(engine: HESimulator, x: Ciphertext, layout: MatrixLayout, axis: str, k: int) -> Ciphertext:
    """Keep row/column ``k`` and zero every other cell (one plaintext mult)."""
    _check_axis(axis)
    if not 0 <= k < layout.n_dim:
        raise IndexError(f"{axis} index {k} out of range for side {layout.n_dim}")
    plain = _line_mask(layout.n_dim, layout.slot_count, axis, k)
    return engine.mul_plain(x, plain, site=f"mask-{axis}-{k}")


def sum_axis(engine: HESimulator, x: Ciphertext, layout: MatrixLayout, axis: str) -> Ciphertext:
    """Fold the matrix along ``axis``.

    axis="row": add all rows together, result in row 0 (column sums).
    axis="col": add all columns together, result in column 0 (row sums).
    """
    _check_axis(axis)
    step = layout.n_dim if axis == "row" else 1
    acc = x
    for i in range(layout.steps):
        acc = engine.add(acc, engine.rotate(acc, step << i))
    return mask(engine, acc, layout, axis, 0)


def replicate(engine: HESimulator, x: Ciphertext, layout: MatrixLayout, axis: str) -> Ciphertext:
    """Copy row 0 to all rows (axis="row") or column 0 to all columns.

    Assumes everything outside that row/column is zero; violations are not
    detected.
    """
    _check_axis(axis)
    step = layout.n_dim if axis == "row" else 1
    acc = x
    for i in range(layout.steps):
        acc = engine.add(acc, engine.rotate(acc, -(step << i)))
    return acc


def transpose_vector(
    engine: HESimulator, x: Ciphertext, layout: MatrixLayout, direction: str
) -> Ciphertext:
    """Move a vector between row 0 and column 0 of the matrix.

    direction="row_to_col" assumes only row 0 is populated and produces the
    same values down column 0; "col_to_row" is the inverse.  Uses
    ceil(log2 N) rotations by N(N-1)/2^i plus one final mask.
    """
    if direction not in ("row_to_col", "col_to_row"):
        raise ValueError(f"unknown transpose direction {direction!r}")
    n = layout.n_dim
    acc = x
    for i in range(1, layout.steps + 1):
        offset = n * (n - 1) >> i
        acc = engine.add(acc, engine.rotate(acc, -offset if direction == "row_to_col" else offset))
    axis = "col" if direction == "row_to_col" else "row"
    return mask(engine, acc, layout, axis, 0)
