"""Dyadic Hausdorff content at scale via dynamic programming on the cube tree.

The central object is the minimizing disjoint dyadic cover of a point set
for the weight sum(side^s): its value is the dyadic s-content of the set at
scale 2^-level.  Minimizing covers satisfy a subadditivity property (the sum
of member weights under any dyadic cube never exceeds that cube's weight),
which is what makes their per-level center sets regular; the finite
multi-scale construction in `finite_strong_cover` builds on that.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._exact import ExponentContext, add_terms
from .grid import DyadicCube, GridPointSet, dilate

__all__ = [
    "CoverTree",
    "DyadicCover",
    "CoverMinimalityError",
    "build_cover_tree",
    "optimal_cover",
    "delta_s_sets_from_cover",
    "finite_strong_cover",
    "strong_cover_misses",
    "write_cover",
    "read_cover",
]


class CoverMinimalityError(ValueError):
    """A cover failed the subadditivity check required of a minimizer."""

    def __init__(self, cube: DyadicCube, total: float, budget: float):
        self.cube = cube
        self.total = total
        self.budget = budget
        super().__init__(
            f"cover weight {total:.17g} under cube level={cube.level} "
            f"coords={cube.coords} exceeds {budget:.17g}"
        )


@dataclass(frozen=True)
class CoverTree:
    """Sparse occupied dyadic tree over a point set with per-node cell counts.

    `levels[j]` holds the lex-sorted (N_j, dim) array of occupied level-j
    cubes and `counts[j]` the number of point-set cells under each.
    """

    dim: int
    leaf_level: int
    levels: tuple[np.ndarray, ...]
    counts: tuple[np.ndarray, ...]

    def count_of(self, cube: DyadicCube) -> int:
        cells = self.levels[cube.level]
        idx = _row_index(cells, np.asarray(cube.coords, dtype=np.int64))
        return 0 if idx is None else int(self.counts[cube.level][idx])

    def nodes_at(self, j: int) -> np.ndarray:
        return self.levels[j]

    def max_count(self, j: int) -> int:
        c = self.counts[j]
        return int(c.max()) if c.size else 0

    @property
    def total(self) -> int:
        return int(self.counts[0].sum()) if self.counts[0].size else 0


def _row_index(sorted_rows: np.ndarray, row: np.ndarray):
    """Index of `row` in a lex-sorted 2-D int array, or None."""
    if sorted_rows.size == 0:
        return None
    lo, hi = 0, sorted_rows.shape[0]
    key = tuple(row.tolist())
    while lo < hi:
        mid = (lo + hi) // 2
        probe = tuple(sorted_rows[mid].tolist())
        if probe < key:
            lo = mid + 1
        else:
            hi = mid
    if lo < sorted_rows.shape[0] and tuple(sorted_rows[lo].tolist()) == key:
        return lo
    return None


def build_cover_tree(P: GridPointSet) -> CoverTree:
    """Aggregate cell counts up the dyadic tree, levels P.level down to 0."""
    if len(P) == 0:
        raise ValueError("cannot build a cover tree over an empty point set")
    levels: list[np.ndarray] = [None] * (P.level + 1)  # type: ignore[list-item]
    counts: list[np.ndarray] = [None] * (P.level + 1)  # type: ignore[list-item]
    levels[P.level] = P.cells
    counts[P.level] = np.ones(len(P), dtype=np.int64)
    for j in range(P.level - 1, -1, -1):
        parents = levels[j + 1] >> 1
        uniq, inverse = np.unique(parents, axis=0, return_inverse=True)
        agg = np.zeros(uniq.shape[0], dtype=np.int64)
        np.add.at(agg, inverse.ravel(), counts[j + 1])
        levels[j] = uniq
        counts[j] = agg
    return CoverTree(P.dim, P.level, tuple(levels), tuple(counts))


def _parent_indices(child_cells: np.ndarray, parent_cells: np.ndarray) -> np.ndarray:
    """For each child cell, the row index of its parent in parent_cells.

    Lex order of rows is preserved under halving coordinates, so a fused
    integer key and searchsorted suffice.
    """
    parents = child_cells >> 1
    if parent_cells.shape[1] == 1:
        return np.searchsorted(parent_cells[:, 0], parents[:, 0])
    bits = max(
        1,
        int(parent_cells.max() if parent_cells.size else 0).bit_length(),
        int(parents.max() if parents.size else 0).bit_length(),
    )
    return np.searchsorted(_fuse(parent_cells, bits), _fuse(parents, bits))


def _fuse(cells: np.ndarray, bits: int) -> np.ndarray:
    """Fuse columns into one lex-order-preserving integer key; `bits` must
    cover the largest coordinate in any array compared against the key."""
    dim = cells.shape[1]
    if cells.shape[0] == 0:
        return np.empty(0, dtype=np.int64)
    if bits * dim <= 62:
        key = cells[:, 0].astype(np.int64)
        for c in range(1, dim):
            key = (key << bits) | cells[:, c]
        return key
    key = cells[:, 0].astype(object)
    for c in range(1, dim):
        key = (key << bits) | cells[:, c].astype(object)
    return key


@dataclass(frozen=True)
class DyadicCover:
    """Disjoint antichain of dyadic cubes covering a point set.

    `value` is sum over cubes of side^s; `level_multiplicity` counts cubes
    per level (the representation the value is recomputed from).
    """

    cubes: tuple[DyadicCube, ...]
    s: float
    value: float
    level_multiplicity: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        keys = {(c.level, c.coords) for c in self.cubes}
        if len(keys) != len(self.cubes):
            raise ValueError("duplicate cube in cover")
        for c in self.cubes:
            for a in range(c.level):
                if (a, tuple(q >> (c.level - a) for q in c.coords)) in keys:
                    raise ValueError("cover cubes are not an antichain")
        mult: dict[int, int] = {}
        for c in self.cubes:
            mult[c.level] = mult.get(c.level, 0) + 1
        object.__setattr__(self, "level_multiplicity", mult)


def _validate_exponent(P: GridPointSet, s: float) -> None:
    if not 0.0 < s <= P.dim:
        raise ValueError(f"exponent s={s} outside (0, {P.dim}]")


def optimal_cover(P: GridPointSet, s: float, j_min: int = 0) -> DyadicCover:
    """Minimize sum(side^s) over disjoint dyadic covers with levels in [j_min, P.level].

    Bottom-up recursion: cost(Q) = min(side(Q)^s, sum over occupied children),
    ties resolved toward the coarser cube, so minimizers cannot be coarsened
    further without changing their value.  Comparisons are exact for rational
    s with small denominator (see _exact), which pins down self-similar ties.
    """
    if len(P) == 0:
        raise ValueError("cannot cover an empty point set")
    _validate_exponent(P, s)
    if not 0 <= j_min <= P.level:
        raise ValueError(f"j_min={j_min} outside [0, {P.level}]")
    ctx = ExponentContext.create(s)
    tree = build_cover_tree(P)
    L = P.level

    parent_idx: list[np.ndarray] = [None] * (L + 1)  # type: ignore[list-item]
    for j in range(1, L + 1):
        parent_idx[j] = _parent_indices(tree.levels[j], tree.levels[j - 1])

    cost: list[list[dict]] = [None] * (L + 1)  # type: ignore[list-item]
    take: list[np.ndarray] = [None] * (L + 1)  # type: ignore[list-item]
    cost[L] = [{L: 1} for _ in range(tree.levels[L].shape[0])]
    take[L] = np.ones(tree.levels[L].shape[0], dtype=bool)
    for j in range(L - 1, -1, -1):
        n_nodes = tree.levels[j].shape[0]
        sums: list[dict] = [dict() for _ in range(n_nodes)]
        for child, pi in enumerate(parent_idx[j + 1]):
            add_terms(sums[pi], cost[j + 1][child])
        take_j = np.zeros(n_nodes, dtype=bool)
        own = {j: 1}
        for i in range(n_nodes):
            if j >= j_min and ctx.compare(own, sums[i]) <= 0:
                take_j[i] = True
                sums[i] = dict(own)
        cost[j] = sums
        take[j] = take_j

    cubes: list[DyadicCube] = []
    active = np.ones(tree.levels[0].shape[0], dtype=bool)
    for j in range(0, L + 1):
        emit = active & take[j]
        for i in np.flatnonzero(emit):
            cubes.append(DyadicCube(j, tuple(int(c) for c in tree.levels[j][i])))
        if j < L:
            pass_down = active & ~take[j]
            active = pass_down[parent_idx[j + 1]]
    cubes.sort(key=lambda c: (c.level, c.coords))
    mult: dict[int, int] = {}
    for c in cubes:
        mult[c.level] = mult.get(c.level, 0) + 1
    if ctx.compare(mult, cost[0][0]) != 0:
        raise AssertionError("reconstructed cover does not match DP value")
    return DyadicCover(tuple(cubes), float(s), ctx.to_float(mult))


def delta_s_sets_from_cover(cover: DyadicCover) -> dict[int, GridPointSet]:
    """Split a minimizing cover by level into center-cell sets.

    Validates the minimizer subadditivity first: for every dyadic cube Q0
    the sum of side^s over cover cubes nested in Q0 must not exceed
    side(Q0)^s.  Raises CoverMinimalityError naming the offending cube.
    """
    if not cover.cubes:
        raise ValueError("empty cover")
    ctx = ExponentContext.create(cover.s)
    agg: dict[tuple[int, tuple[int, ...]], dict] = {}
    for c in cover.cubes:
        for a in range(c.level + 1):
            key = (a, tuple(q >> (c.level - a) for q in c.coords))
            add_terms(agg.setdefault(key, {}), {c.level: 1})
    for (a, coords), terms in sorted(agg.items()):
        if ctx.compare(terms, {a: 1}) > 0:
            raise CoverMinimalityError(
                DyadicCube(a, coords), ctx.to_float(terms), ctx.to_float({a: 1})
            )
    out: dict[int, list] = {}
    for c in cover.cubes:
        out.setdefault(c.level, []).append(c.coords)
    dim = len(cover.cubes[0].coords)
    return {k: GridPointSet.from_cells(dim, k, cells) for k, cells in sorted(out.items())}


def finite_strong_cover(
    P: GridPointSet,
    s: float,
    eps: float,
    k_range: tuple[int, int],
    enforce_window: bool = True,
) -> dict[int, GridPointSet]:
    """Finite multi-scale family of center sets whose dilations cover P.

    For each base scale i in k_range: build the minimizing (s - eps)-cover of
    P restricted to levels >= i, split it into per-level unions of cubes,
    re-cover each union minimally for the exponent s (coarsest level clamped
    to floor(eps*j/s) when enforce_window is set), and pool the resulting
    center cells by level.  Every cell of P lies under a center cell of at
    least one returned set, and each returned set is regular with a constant
    growing at most like (level * s / eps)^2.
    """
    if len(P) == 0:
        raise ValueError("cannot cover an empty point set")
    if not 0.0 < eps < s:
        raise ValueError(f"need 0 < eps < s, got eps={eps} s={s}")
    _validate_exponent(P, s)
    k_lo, k_hi = k_range
    if not (1 <= k_lo <= k_hi <= P.level):
        raise ValueError(f"scale range [{k_lo}, {k_hi}] invalid for level {P.level}")

    pooled: dict[int, set] = {}
    for i in range(k_lo, k_hi + 1):
        base = optimal_cover(P, s - eps, j_min=i)
        by_level: dict[int, list] = {}
        for c in base.cubes:
            by_level.setdefault(c.level, []).append(c.coords)
        for j, coords in sorted(by_level.items()):
            X = GridPointSet.from_cells(P.dim, j, coords)
            clamp = int(np.floor(eps * j / s)) if enforce_window else 0
            refined = optimal_cover(X, s, j_min=clamp)
            if enforce_window and clamp > 0:
                unclamped = optimal_cover(X, s, j_min=0)
                if unclamped.value < refined.value * (1 - 1e-12):
                    warnings.warn(
                        f"scale window clamp at level {clamp} raised the cover "
                        f"value for block scale i={i}, j={j}",
                        stacklevel=2,
                    )
            for q in refined.cubes:
                pooled.setdefault(q.level, set()).add(q.coords)
    return {
        k: GridPointSet.from_cells(P.dim, k, sorted(cells))
        for k, cells in sorted(pooled.items())
    }


def strong_cover_misses(
    P: GridPointSet, family: dict[int, GridPointSet], radius: int = 0
) -> int:
    """Number of cells of P not hit by the radius-dilated family at any level."""
    covered = np.zeros(len(P), dtype=bool)
    for k, Pk in family.items():
        target = dilate(Pk, radius)
        anc = P.cells >> (P.level - k)
        member = np.fromiter(
            (tuple(row) in target.cell_set for row in anc.tolist()),
            dtype=bool,
            count=len(P),
        )
        covered |= member
    return int((~covered).sum())


# --- cover text format ------------------------------------------------------
#
# One line `level c_1 ... c_n` per cube (level-major, lexicographic), then a
# footer `value <decimal>`.


def write_cover(cover: DyadicCover, path) -> None:
    lines = [
        f"{c.level} " + " ".join(str(q) for q in c.coords)
        for c in sorted(cover.cubes, key=lambda c: (c.level, c.coords))
    ]
    lines.append(f"value {cover.value:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_cover(path, s: float) -> DyadicCover:
    rows = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not rows or not rows[-1].startswith("value "):
        raise ValueError(f"{path}: missing value footer")
    value = float(rows[-1].split()[1])
    cubes = []
    for ln in rows[:-1]:
        parts = [int(x) for x in ln.split()]
        cubes.append(DyadicCube(parts[0], tuple(parts[1:])))
    return DyadicCover(tuple(cubes), s, value)
