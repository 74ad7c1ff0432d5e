"""Regularity checks and the heavy-cube decomposition.

A finite set at resolution delta = 2^-level is called (C, delta, s)-regular
here when every dyadic window Q of side 2^-j holds at most
C * (side(Q)/delta)^s of its cells.  `minimal_spread_constant` computes the
least such C; `heavy_decompose` splits a set into a regular good part and a
bad part of small content by pruning cubes that hold too many cells; and
`frostman_subset` extracts a regular subset whose cardinality is controlled
from below by the set's dyadic content.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._exact import snap_exponent
from .content import build_cover_tree, optimal_cover, _parent_indices
from .grid import DyadicCube, GridPointSet, write_pointset

__all__ = [
    "Decomposition",
    "ExtractionFailedError",
    "minimal_spread_constant",
    "heavy_decompose",
    "frostman_subset",
    "write_decomposition",
]


class ExtractionFailedError(RuntimeError):
    """Regular-subset extraction missed its cardinality guarantee."""


def minimal_spread_constant(P: GridPointSet, s: float) -> float:
    """Least C such that every dyadic window obeys the (C, delta, s) bound.

    Maximizes count(Q) / (side(Q)/delta)^s over all dyadic cubes Q with
    levels in [0, P.level]; 0.0 for the empty set, and >= 1.0 otherwise
    (witnessed by any single occupied cell).
    """
    if not 0.0 < s <= P.dim:
        raise ValueError(f"exponent s={s} outside (0, {P.dim}]")
    if len(P) == 0:
        return 0.0
    tree = build_cover_tree(P)
    best = 0.0
    for j in range(P.level + 1):
        ratio = tree.max_count(j) / 2.0 ** ((P.level - j) * s)
        best = max(best, ratio)
    return best


@dataclass(frozen=True)
class Decomposition:
    """Good/bad split of a point set by maximal heavy cubes.

    Every bad cell lies under a cube of `maximal_heavy` (an antichain of
    heavy cubes with no heavy strict ancestor); no good cell does.  `net` is
    the greedy separated subset of the good part used for regularity claims.
    """

    good: GridPointSet
    bad: GridPointSet
    maximal_heavy: tuple[DyadicCube, ...]
    params: tuple[float, float, float, float]  # (s, C, L, tau)
    net: GridPointSet

    @property
    def heavy_weight(self) -> float:
        """Sum of side^s over the maximal heavy cubes."""
        s = self.params[0]
        return float(sum(2.0 ** (-q.level * s) for q in self.maximal_heavy))

    @property
    def weight_budget(self) -> float:
        """Guaranteed ceiling 1/(tau*L) for heavy_weight (when the
        cell-count precondition holds)."""
        _, _, L, tau = self.params
        return 1.0 / (tau * L)


def _heavy_threshold(s: float, tau_c_l: float, height: int) -> float:
    return tau_c_l * 2.0 ** (height * s)


def heavy_decompose(
    P: GridPointSet,
    s: float,
    C: float,
    L: float,
    tau: float | None = None,
    net_separation: int = 2,
) -> Decomposition:
    """Split P into a bad part under heavy cubes and a regular good part.

    A cube Q at level j is heavy when it holds at least
    tau*C*L * 2^((P.level-j)*s) cells of P.  The bad part is everything
    under a maximal heavy cube; the remaining good part has spread constant
    strictly below tau*C*L in every dyadic window, and the sum of side^s
    over maximal heavy cubes is at most |P| * delta^s / (tau*C*L), hence at
    most 1/(tau*L) whenever |P| <= C * delta^-s.

    The net keeps a greedy maximal subset of the good cells separated by at
    least net_separation cells (the default, one full cell of gap, makes
    every good cell lie within one cell of the net).
    """
    if not 0.0 < s <= P.dim:
        raise ValueError(f"exponent s={s} outside (0, {P.dim}]")
    if L < 1.0:
        raise ValueError(f"L={L} must be >= 1")
    if tau is None:
        tau = 4.0 ** -P.dim
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau={tau} outside (0, 1]")
    if net_separation < 1:
        raise ValueError("net separation must be >= 1 cell")
    if len(P) == 0:
        empty = GridPointSet.empty(P.dim, P.level)
        return Decomposition(empty, empty, (), (s, C, L, tau), empty)
    if len(P) > C * 2.0 ** (P.level * s) * (1 + 1e-9):
        warnings.warn(
            f"cell count {len(P)} exceeds C*delta^-s = {C * 2.0 ** (P.level * s):.6g}; "
            "the heavy-weight budget 1/(tau*L) is not guaranteed",
            stacklevel=2,
        )

    tree = build_cover_tree(P)
    tcl = tau * C * L
    maximal: list[DyadicCube] = []
    blocked = np.zeros(tree.levels[0].shape[0], dtype=bool)  # under chosen heavy cube
    for j in range(P.level + 1):
        nodes = tree.levels[j]
        counts = tree.counts[j]
        is_heavy = (counts.astype(np.float64) >= _heavy_threshold(s, tcl, P.level - j)) & ~blocked
        for i in np.flatnonzero(is_heavy):
            maximal.append(DyadicCube(j, tuple(int(c) for c in nodes[i])))
        if j < P.level:
            settled = blocked | is_heavy
            blocked = settled[_parent_indices(tree.levels[j + 1], nodes)]
    # mark bad cells: those under any maximal heavy cube
    bad_mask = np.zeros(len(P), dtype=bool)
    by_level: dict[int, list] = {}
    for q in maximal:
        by_level.setdefault(q.level, []).append(q.coords)
    for a, coords in by_level.items():
        heavy_cells = {tuple(c) for c in coords}
        anc = P.cells >> (P.level - a)
        bad_mask |= np.fromiter(
            (tuple(r) in heavy_cells for r in anc.tolist()), dtype=bool, count=len(P)
        )
    bad = GridPointSet(P.dim, P.level, P.cells[bad_mask])
    good = GridPointSet(P.dim, P.level, P.cells[~bad_mask])
    net = _greedy_net(good, net_separation)
    maximal.sort(key=lambda c: (c.level, c.coords))
    return Decomposition(good, bad, tuple(maximal), (s, float(C), float(L), float(tau)), net)


def _greedy_net(P: GridPointSet, separation: int) -> GridPointSet:
    """Greedy maximal subset with pairwise Chebyshev distance >= separation
    cells, taken in lexicographic order.  Distinct cells are always at least
    one cell apart, so separation 1 keeps everything."""
    if separation <= 1 or len(P) <= 1:
        return P
    taken: list[tuple[int, ...]] = []
    buckets: dict[tuple[int, ...], list[np.ndarray]] = {}
    for row in P.cells:
        key = tuple((row // separation).tolist())
        ok = True
        for dk in _bucket_neighborhood(key):
            for other in buckets.get(dk, ()):
                if np.abs(row - other).max() < separation:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            taken.append(tuple(row.tolist()))
            buckets.setdefault(key, []).append(row)
    return GridPointSet.from_cells(P.dim, P.level, taken)


def _bucket_neighborhood(key: tuple[int, ...]):
    if len(key) == 1:
        for d in (-1, 0, 1):
            yield (key[0] + d,)
        return
    for d in (-1, 0, 1):
        for rest in _bucket_neighborhood(key[1:]):
            yield (key[0] + d, *rest)


def _ceil_pow2(p: int, q: int, e: int) -> int:
    """Exact ceil(2^(e*p/q)) for nonnegative integers via integer roots."""
    num = e * p
    t, r = divmod(num, q)
    if r == 0:
        return 1 << t
    # smallest c with c^q >= 2^num
    x = 1 << num
    root = _int_root(x, q)
    return root if root**q >= x else root + 1


def _int_root(x: int, q: int) -> int:
    if x < 2 or q == 1:
        return x
    r = 1 << ((x.bit_length() - 1) // q + 1)
    while True:
        nr = ((q - 1) * r + x // r ** (q - 1)) // q
        if nr >= r:
            return r
        r = nr


def frostman_subset(P: GridPointSet, s: float, min_fraction: float = 0.5) -> GridPointSet:
    """Extract a regular subset witnessing the dyadic content of P.

    Walks the cube tree bottom-up computing per-node budgets
    B(Q) = min(ceil((side(Q)/delta)^s), sum of child budgets), then selects
    that many cells top-down in lexicographic order.  The selection S
    satisfies count_S(Q) <= 2 * (side(Q)/delta)^s in every dyadic window and
    |S| >= content * delta^-s, where content is the minimal cover value.
    """
    if len(P) == 0:
        raise ValueError("cannot extract from an empty point set")
    if not 0.0 < s <= P.dim:
        raise ValueError(f"exponent s={s} outside (0, {P.dim}]")
    tree = build_cover_tree(P)
    L = P.level
    frac = snap_exponent(s)

    def cap(j: int) -> int:
        if frac is not None:
            return _ceil_pow2(frac.numerator, frac.denominator, L - j)
        return int(np.ceil(2.0 ** ((L - j) * s) - 1e-12))

    parent_idx = [None] * (L + 1)
    for j in range(1, L + 1):
        parent_idx[j] = _parent_indices(tree.levels[j], tree.levels[j - 1])

    budget: list[np.ndarray] = [None] * (L + 1)  # type: ignore[list-item]
    budget[L] = np.ones(tree.levels[L].shape[0], dtype=np.int64)
    for j in range(L - 1, -1, -1):
        sums = np.zeros(tree.levels[j].shape[0], dtype=np.int64)
        np.add.at(sums, parent_idx[j + 1], budget[j + 1])
        budget[j] = np.minimum(sums, cap(j))

    # children grouped per parent, in lexicographic order
    children: list[list[list[int]]] = [None] * (L + 1)  # type: ignore[list-item]
    for j in range(1, L + 1):
        groups = [[] for _ in range(tree.levels[j - 1].shape[0])]
        for child, pi in enumerate(parent_idx[j]):
            groups[pi].append(child)
        children[j - 1] = groups

    chosen: list[tuple[int, ...]] = []
    stack: list[tuple[int, int, int]] = [(0, 0, int(budget[0][0]))]
    while stack:
        j, i, quota = stack.pop()
        if quota <= 0:
            continue
        if j == L:
            chosen.append(tuple(int(c) for c in tree.levels[L][i]))
            continue
        remaining = quota
        pending = []
        for child in children[j][i]:
            if remaining <= 0:
                break
            t = min(int(budget[j + 1][child]), remaining)
            if t > 0:
                pending.append((j + 1, child, t))
                remaining -= t
        stack.extend(reversed(pending))

    S = GridPointSet.from_cells(P.dim, P.level, chosen)
    content = optimal_cover(P, s).value
    need = min_fraction * content * 2.0 ** (L * s)
    if len(S) < need - 1e-9:
        raise ExtractionFailedError(
            f"extracted {len(S)} cells, below the guaranteed "
            f"{need:.6g} = {min_fraction} * content * delta^-s"
        )
    return S


def write_decomposition(dec: Decomposition, out_dir, prefix: str = "") -> None:
    """Write good/bad point-set files plus the heavy-cube list."""
    out = Path(out_dir)
    write_pointset(dec.good, out / f"{prefix}good.txt")
    write_pointset(dec.bad, out / f"{prefix}bad.txt")
    lines = [
        f"{q.level} " + " ".join(str(c) for c in q.coords) for q in dec.maximal_heavy
    ]
    lines.append(f"value {dec.heavy_weight:.17g}")
    (out / f"{prefix}heavy.txt").write_text("\n".join(lines) + "\n")
