"""Shared brute-force oracles for the test suite.

These deliberately avoid the library's own algorithms: covers are found by
exhaustive enumeration of antichains, energies by direct pair loops, and
window constants by scanning every dyadic cube.  Expected values asserted in
the tests were computed with these oracles.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from dyadicproj._exact import ExponentContext
from dyadicproj.grid import GridPointSet


def all_dyadic_covers(P: GridPointSet, j_min: int = 0):
    """Yield every disjoint dyadic antichain cover of P as a list of
    (level, coords) pairs, levels restricted to [j_min, P.level]."""
    by_parent: dict[tuple[int, tuple[int, ...]], list] = {}
    nodes = set()
    for cell in map(tuple, P.cells.tolist()):
        key = (P.level, cell)
        nodes.add(key)
        for j in range(P.level - 1, -1, -1):
            cell = tuple(c >> 1 for c in cell)
            parent = (j, cell)
            if parent in nodes:
                break
            nodes.add(parent)
    for level, cell in nodes:
        if level > 0:
            by_parent.setdefault((level - 1, tuple(c >> 1 for c in cell)), []).append(
                (level, cell)
            )

    def covers(node):
        level, _ = node
        options = []
        if level >= j_min:
            options.append([node])
        if level < P.level:
            kids = by_parent.get(node, [])
            for combo in itertools.product(*(covers(k) for k in kids)):
                options.append([c for part in combo for c in part])
        return options

    root = (0, (0,) * P.dim)
    yield from covers(root)


def min_cover_value_oracle(P: GridPointSet, s: float, j_min: int = 0):
    """Exhaustive minimum of sum(side^s): returns (float value, level dict)."""
    ctx = ExponentContext.create(s)
    best = None
    for cover in all_dyadic_covers(P, j_min):
        terms: dict[int, int] = {}
        for level, _ in cover:
            terms[level] = terms.get(level, 0) + 1
        if best is None or ctx.compare(terms, best) < 0:
            best = terms
    assert best is not None
    return ctx.to_float(best), best


def pair_energy_oracle(coords: np.ndarray, delta: float) -> int:
    """Direct double loop over ordered pairs, diagonal included."""
    count = 0
    n = coords.shape[0]
    for i in range(n):
        for j in range(n):
            if np.linalg.norm(coords[i] - coords[j]) <= delta:
                count += 1
    return count


def spread_constant_oracle(P: GridPointSet, s: float) -> float:
    """Scan every dyadic cube of every level by explicit membership."""
    if len(P) == 0:
        return 0.0
    best = 0.0
    cells = P.cells
    for j in range(P.level + 1):
        anc = cells >> (P.level - j)
        uniq, counts = np.unique(anc, axis=0, return_counts=True)
        for c in counts:
            best = max(best, c / 2.0 ** ((P.level - j) * s))
    return best


def min_bins_oracle(counts: list[int], kappa: int) -> int:
    """Exhaustive subset search: fewest bins whose counts reach kappa."""
    n = len(counts)
    best = n + 1
    for mask in range(1, 1 << n):
        chosen = [counts[i] for i in range(n) if mask >> i & 1]
        if sum(chosen) >= kappa:
            best = min(best, len(chosen))
    return best


def random_subset(rng: np.random.Generator, dim: int, level: int) -> GridPointSet:
    """Non-empty uniform random subset of the full level grid."""
    total = (1 << level) ** dim
    k = int(rng.integers(1, total + 1))
    picks = rng.choice(total, size=k, replace=False)
    cells = np.stack(
        [(picks >> (level * (dim - 1 - d))) & ((1 << level) - 1) for d in range(dim)],
        axis=1,
    )
    return GridPointSet(dim, level, cells)


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
