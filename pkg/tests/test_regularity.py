import numpy as np
import pytest

from dyadicproj.fractals import (
    QUARTER_CANTOR,
    CantorPattern,
    gen_cantor_product,
    gen_degenerate,
    gen_random_tree_set,
)
from dyadicproj.grid import GridPointSet
from dyadicproj.content import optimal_cover
from dyadicproj.regularity import (
    frostman_subset,
    heavy_decompose,
    minimal_spread_constant,
    write_decomposition,
)

from conftest import random_subset, spread_constant_oracle


class TestMinimalSpreadConstant:
    def test_singleton(self):
        P = GridPointSet.from_cells(2, 5, [(3, 9)])
        assert minimal_spread_constant(P, 1.0) == 1.0

    def test_empty(self):
        assert minimal_spread_constant(GridPointSet.empty(1, 3), 0.5) == 0.0

    def test_full_grid_saturates_at_s_equals_n(self):
        P = gen_cantor_product(CantorPattern(2, ((0, 1),)), 5)
        assert minimal_spread_constant(P, 1.0) == 1.0

    def test_four_cells_level4(self):
        P = GridPointSet.from_cells(1, 4, [(0,), (1,), (2,), (3,)])
        assert minimal_spread_constant(P, 0.5) == 2.0  # level-2 window: 4 / sqrt(4)

    def test_matches_window_scan_oracle(self, rng):
        for _ in range(10):
            P = random_subset(rng, 2, 3)
            for s in (0.5, 1.0, 1.7):
                assert minimal_spread_constant(P, s) == pytest.approx(
                    spread_constant_oracle(P, s), rel=1e-12
                )


class TestHeavyDecompose:
    def test_regular_set_stays_good(self):
        P = gen_cantor_product(QUARTER_CANTOR, 3)
        spread = minimal_spread_constant(P, 0.5)
        dec = heavy_decompose(P, 0.5, C=spread, L=4.0, tau=0.5)  # tau*C*L > spread
        assert len(dec.bad) == 0
        assert dec.good.cell_set == P.cell_set

    def test_cluster_goes_bad(self):
        P = gen_degenerate("cluster", n=1, level=10, cube_level=5)
        dec = heavy_decompose(P, 1.0, C=1.0, L=4.0, tau=0.25)
        assert len(dec.good) == 0
        assert len(dec.bad) == len(P)
        assert dec.heavy_weight <= dec.weight_budget + 1e-12

    def test_cluster_plus_spread_split(self):
        # dense cluster in one level-5 cube plus a sparse arithmetic spread:
        # at s = 1/2 the cluster is heavy, the spread is not
        cluster = gen_degenerate("cluster", n=1, level=10, cube_level=5)
        spread = GridPointSet.from_cells(1, 10, [(32 * k,) for k in range(32)])
        P = cluster.union(spread)
        C = len(P) * 2.0 ** (-10 * 0.5)
        dec = heavy_decompose(P, 0.5, C=C, L=8.0, tau=0.25)
        assert cluster.issubset(dec.bad)
        assert len(dec.good) > 0
        assert all(c[0] >= 64 for c in dec.good.cells.tolist())
        assert dec.heavy_weight <= 1.0 / (0.25 * 8.0) + 1e-12

    def test_weight_bound_and_net_regularity(self, rng):
        for seed in range(8):
            n = 1 + seed % 2
            level = 8 + seed % 3
            cluster = gen_degenerate("cluster", n=n, level=level, cube_level=3)
            spread = gen_random_tree_set(n, 0.6 * n, level, seed=seed)
            P = cluster.union(spread)
            s = 0.7 * n
            C = len(P) * 2.0 ** (-level * s)
            tau = 4.0**-n
            L = 2.0 / tau
            dec = heavy_decompose(P, s, C, L, tau)
            assert dec.heavy_weight <= 1.0 / (tau * L) + 1e-9
            if len(dec.net):
                assert minimal_spread_constant(dec.net, s) <= 4**n * tau * C * L + 1e-9

    def test_idempotent_on_good_part(self, rng):
        for seed in range(5):
            P = gen_random_tree_set(2, 1.2, 8, seed=seed)
            C = len(P) * 2.0 ** (-8 * 1.2)
            dec = heavy_decompose(P, 1.2, C, L=32.0, tau=1 / 16)
            if len(dec.good) == 0:
                continue
            again = heavy_decompose(dec.good, 1.2, C, L=32.0, tau=1 / 16)
            assert len(again.bad) == 0

    def test_net_separation_and_coverage(self):
        P = gen_degenerate("line", n=2, level=5)
        dec = heavy_decompose(P, 1.0, C=1.0, L=64.0, tau=1 / 16)
        net = dec.net
        # pairwise Chebyshev separation >= 2 cells, greedy from the lex start
        cells = net.cells
        for i in range(len(net)):
            d = np.abs(cells - cells[i]).max(axis=1)
            d[i] = 99
            assert d.min() >= 2
        # every good cell within one cell of the net
        for row in dec.good.cells:
            assert (np.abs(net.cells - row).max(axis=1) <= 1).any()

    def test_parameter_validation(self):
        P = GridPointSet.from_cells(1, 2, [(0,)])
        with pytest.raises(ValueError):
            heavy_decompose(P, 1.0, 1.0, L=0.5)
        with pytest.raises(ValueError):
            heavy_decompose(P, 1.0, 1.0, L=2.0, tau=0.0)

    def test_precondition_warning(self):
        P = gen_degenerate("line", n=1, level=6)
        with pytest.warns(UserWarning, match="exceeds"):
            heavy_decompose(P, 0.5, C=0.5, L=2.0, tau=0.5)

    def test_export(self, tmp_path):
        P = gen_degenerate("cluster", n=1, level=8, cube_level=4)
        dec = heavy_decompose(P, 1.0, C=1.0, L=4.0, tau=0.25)
        write_decomposition(dec, tmp_path)
        assert (tmp_path / "good.txt").exists()
        assert (tmp_path / "bad.txt").exists()
        heavy = (tmp_path / "heavy.txt").read_text().splitlines()
        assert heavy[-1].startswith("value ")


class TestFrostmanSubset:
    def test_already_regular_is_identity(self):
        P = gen_cantor_product(QUARTER_CANTOR, 3)
        S = frostman_subset(P, 0.5)
        assert S.cell_set == P.cell_set

    def test_full_grid_n2(self):
        P = gen_cantor_product(CantorPattern(2, ((0, 1), (0, 1))), 5)
        S = frostman_subset(P, 1.0)
        content = optimal_cover(P, 1.0).value
        assert len(S) >= 0.5 * content * 2.0**5
        assert minimal_spread_constant(S, 1.0) <= 4**2

    def test_quarter_cantor_counts(self):
        P = gen_cantor_product(QUARTER_CANTOR, 3)
        S = frostman_subset(P, 0.5)
        assert len(S) >= 0.5 * 1.0 * 2.0**3  # content is exactly 1
        assert minimal_spread_constant(S, 0.5) <= 4.0

    def test_random_inputs_meet_guarantee(self, rng):
        for seed in range(6):
            P = gen_random_tree_set(2, 1.3, 7, seed=seed)
            for s in (0.8, 1.3):
                S = frostman_subset(P, s)
                content = optimal_cover(P, s).value
                assert len(S) >= 0.5 * content * 2.0 ** (7 * s) - 1e-9
                assert minimal_spread_constant(S, s) <= 4**2
                assert S.issubset(P)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            frostman_subset(GridPointSet.empty(1, 3), 0.5)
