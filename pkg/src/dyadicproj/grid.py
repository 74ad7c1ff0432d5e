"""Exact dyadic-grid primitives: cubes, integer point sets, covering numbers.

Everything lives on the unit cube [0,1]^n discretized at a resolution level
k, so a cell is an n-vector of integers in [0, 2^k) and represents the point
at its center.  All coordinates are 64-bit integers and levels are capped at
20, which keeps squared pairwise distances (in cell units) well inside int64.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np

MAX_LEVEL = 20
MAX_DIM = 8

__all__ = [
    "MAX_LEVEL",
    "MAX_DIM",
    "DyadicCube",
    "GridPointSet",
    "covering_number",
    "dilate",
    "coarsen",
    "read_pointset",
    "write_pointset",
]


@dataclass(frozen=True)
class DyadicCube:
    """Dyadic cube of side 2^-level with corner coords * 2^-level."""

    level: int
    coords: tuple[int, ...]

    def __post_init__(self):
        if not 0 <= self.level <= MAX_LEVEL:
            raise ValueError(f"cube level {self.level} outside [0, {MAX_LEVEL}]")
        if not 1 <= len(self.coords) <= MAX_DIM:
            raise ValueError(f"dimension {len(self.coords)} outside [1, {MAX_DIM}]")
        hi = 1 << self.level
        for c in self.coords:
            if not 0 <= c < hi:
                raise ValueError(f"coordinate {c} outside [0, {hi}) at level {self.level}")

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def side(self) -> float:
        return 2.0 ** -self.level

    def parent(self) -> "DyadicCube":
        if self.level == 0:
            raise ValueError("the root cube has no parent")
        return DyadicCube(self.level - 1, tuple(c >> 1 for c in self.coords))

    def ancestor(self, level: int) -> "DyadicCube":
        if not 0 <= level <= self.level:
            raise ValueError(f"ancestor level {level} outside [0, {self.level}]")
        shift = self.level - level
        return DyadicCube(level, tuple(c >> shift for c in self.coords))

    def contains(self, other: "DyadicCube") -> bool:
        """True if other is nested in (or equal to) this cube."""
        if other.dim != self.dim or other.level < self.level:
            return False
        return other.ancestor(self.level) == self

    def contains_cell(self, level: int, cell: tuple[int, ...]) -> bool:
        if level < self.level:
            return False
        shift = level - self.level
        return all((c >> shift) == q for c, q in zip(cell, self.coords))

    def center(self) -> np.ndarray:
        return (2.0 * np.asarray(self.coords, dtype=np.float64) + 1.0) / float(1 << (self.level + 1))


def _as_cell_array(dim: int, cells) -> np.ndarray:
    arr = np.asarray(cells, dtype=np.int64)
    if arr.size == 0:
        return np.empty((0, dim), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise ValueError(f"cells must have shape (N, {dim}), got {arr.shape}")
    return arr


@dataclass(frozen=True)
class GridPointSet:
    """Deduplicated set of level-`level` grid cells in dimension `dim`.

    `cells` is a lexicographically sorted (N, dim) int64 array; the set it
    represents is the collection of cell centers, all inside [0,1)^dim.
    """

    dim: int
    level: int
    cells: np.ndarray

    def __post_init__(self):
        if not 1 <= self.dim <= MAX_DIM:
            raise ValueError(f"dimension {self.dim} outside [1, {MAX_DIM}]")
        if not 0 <= self.level <= MAX_LEVEL:
            raise ValueError(f"level {self.level} outside [0, {MAX_LEVEL}]")
        arr = _as_cell_array(self.dim, self.cells)
        if arr.size:
            if arr.min() < 0 or arr.max() >= (1 << self.level):
                raise ValueError("cell coordinates out of range for level")
            arr = np.unique(arr, axis=0)  # sorts lexicographically
        arr.setflags(write=False)
        object.__setattr__(self, "cells", arr)

    @classmethod
    def from_cells(cls, dim: int, level: int, cells: Iterable) -> "GridPointSet":
        return cls(dim, level, list(cells))

    @classmethod
    def empty(cls, dim: int, level: int) -> "GridPointSet":
        return cls(dim, level, np.empty((0, dim), dtype=np.int64))

    def __len__(self) -> int:
        return self.cells.shape[0]

    @property
    def delta(self) -> float:
        """Cell side 2^-level."""
        return 2.0 ** -self.level

    @cached_property
    def cell_set(self) -> frozenset:
        return frozenset(map(tuple, self.cells.tolist()))

    def __contains__(self, cell) -> bool:
        return tuple(cell) in self.cell_set

    def centers(self) -> np.ndarray:
        """(N, dim) float64 array of cell centers in [0,1)^dim."""
        return (2.0 * self.cells.astype(np.float64) + 1.0) / float(1 << (self.level + 1))

    def union(self, other: "GridPointSet") -> "GridPointSet":
        if (other.dim, other.level) != (self.dim, self.level):
            raise ValueError("union requires matching dim and level")
        return GridPointSet(self.dim, self.level, np.concatenate([self.cells, other.cells]))

    def difference(self, other: "GridPointSet") -> "GridPointSet":
        if (other.dim, other.level) != (self.dim, self.level):
            raise ValueError("difference requires matching dim and level")
        keep = [c for c in map(tuple, self.cells.tolist()) if c not in other.cell_set]
        return GridPointSet.from_cells(self.dim, self.level, keep)

    def issubset(self, other: "GridPointSet") -> bool:
        return self.cell_set <= other.cell_set


def covering_number(P: GridPointSet, j: int) -> int:
    """Number of level-j dyadic cubes containing at least one cell of P.

    Monotone non-increasing as j decreases (coarser cubes).
    """
    if not 0 <= j <= P.level:
        raise ValueError(f"level {j} outside [0, {P.level}]")
    if len(P) == 0:
        return 0
    shift = P.level - j
    if shift == 0:
        return len(P)
    return np.unique(P.cells >> shift, axis=0).shape[0]


_CHUNK_ROWS = 1 << 18


def dilate(P: GridPointSet, r: int) -> GridPointSet:
    """Cells within Chebyshev distance r (in cells) of some cell of P.

    Cells falling outside [0, 2^level)^dim are dropped: the ambient domain
    is the unit cube.
    """
    if r < 0:
        raise ValueError("dilation radius must be >= 0")
    if r == 0 or len(P) == 0:
        return P
    w = 2 * r + 1
    offsets = np.stack(
        np.meshgrid(*([np.arange(-r, r + 1, dtype=np.int64)] * P.dim), indexing="ij"),
        axis=-1,
    ).reshape(-1, P.dim)
    hi = 1 << P.level
    chunk = max(1, _CHUNK_ROWS // (w ** P.dim))
    pieces = []
    for start in range(0, len(P), chunk):
        block = P.cells[start : start + chunk]
        out = (block[:, None, :] + offsets[None, :, :]).reshape(-1, P.dim)
        ok = ((out >= 0) & (out < hi)).all(axis=1)
        pieces.append(np.unique(out[ok], axis=0))
    return GridPointSet(P.dim, P.level, np.concatenate(pieces))


def coarsen(P: GridPointSet, level: int) -> GridPointSet:
    """Project P to a coarser grid: the occupied level-`level` cells."""
    if not 0 <= level <= P.level:
        raise ValueError(f"level {level} outside [0, {P.level}]")
    if level == P.level or len(P) == 0:
        return GridPointSet(P.dim, level, P.cells[: len(P)])
    return GridPointSet(P.dim, level, P.cells >> (P.level - level))


# --- point-set text format ------------------------------------------------
#
# Header `n k count`, then `count` lines of n space-separated integers in
# lexicographic order.  Duplicate rows are rejected on read.


def write_pointset(P: GridPointSet, path) -> None:
    lines = [f"{P.dim} {P.level} {len(P)}"]
    lines.extend(" ".join(str(c) for c in row) for row in P.cells.tolist())
    Path(path).write_text("\n".join(lines) + "\n")


def read_pointset(path) -> GridPointSet:
    text = Path(path).read_text()
    rows = [ln for ln in text.splitlines() if ln.strip()]
    if not rows:
        raise ValueError(f"{path}: empty point-set file")
    head = rows[0].split()
    if len(head) != 3:
        raise ValueError(f"{path}: malformed header {rows[0]!r}")
    dim, level, count = (int(x) for x in head)
    if len(rows) - 1 != count:
        raise ValueError(f"{path}: header promises {count} rows, found {len(rows) - 1}")
    cells = []
    seen = set()
    for ln in rows[1:]:
        cell = tuple(int(x) for x in ln.split())
        if len(cell) != dim:
            raise ValueError(f"{path}: row {ln!r} does not have {dim} coordinates")
        if cell in seen:
            raise ValueError(f"{path}: duplicate row {ln!r}")
        seen.add(cell)
        cells.append(cell)
    return GridPointSet.from_cells(dim, level, cells)
