"""Radial line reduction for M = 2 and the two-site critical-dimension case."""

import numpy as np
import pytest

from sandcube.engine_sym import SymEngine, run_stride1
from sandcube.lattice import CubeSpec
from sandcube.radial import (
    RadialState,
    block_edge,
    block_threshold,
    closed_form_check,
    m1_critical_check,
    m1_intermediate_sandpiles,
    radial_laplacian,
    radial_laplacian_all,
    radial_run,
    radial_step,
    radial_to_simplex,
)


class TestRadialLaplacian:
    def test_constant_at_origin_is_flat(self):
        d = 5
        v = np.ones(d + 1, dtype=np.int64)
        assert radial_laplacian(v, 0) == 0

    def test_constant_at_far_end_leaks(self):
        # padding v(d+1) = 0 removes (d - x) upward mass at x = d
        d, c = 5, 3
        v = np.full(d + 1, c, dtype=np.int64)
        assert radial_laplacian(v, d) == -d * c

    def test_all_matches_pointwise(self):
        rng = np.random.default_rng(11)
        for d in (1, 3, 6):
            v = rng.integers(0, 9, size=d + 1)
            lap = radial_laplacian_all(v)
            for x in range(d + 1):
                assert lap[x] == radial_laplacian(v, x)

    @pytest.mark.parametrize("d", range(1, 9))
    def test_matches_symmetrized_laplacian_on_m2(self, d):
        eng = SymEngine(CubeSpec(d, 4), background=d - 1)
        idxmap = radial_to_simplex(d)
        rng = np.random.default_rng(d)
        for _ in range(5):
            v_simplex = rng.integers(0, 7, size=eng.size)
            v_line = v_simplex[idxmap]
            assert np.array_equal(
                radial_laplacian_all(v_line), eng.laplacian(v_simplex)[idxmap]
            )


class TestRadialStep:
    def test_everything_fires_first(self):
        d = 7
        s1 = radial_step(RadialState.zeros(d))
        assert (s1.v == 1).all() and s1.t == 1

    def test_d1_trajectory(self):
        # v over (x=0, x=1) per step: the M=2 interval with background 2
        traj = radial_run(1)
        assert [list(v) for v in traj] == [[0, 0], [1, 1], [2, 1], [2, 2], [3, 2]]

    @pytest.mark.parametrize("d", range(1, 9))
    def test_matches_engine_sym_every_step(self, d):
        r = radial_run(d)
        s = run_stride1(CubeSpec(d, 4), d - 1)
        idxmap = radial_to_simplex(d)
        assert len(r) - 1 == s.t_end
        for t in range(len(r)):
            assert np.array_equal(r[t], s.at(t)[idxmap]), (d, t)


class TestBlockEdge:
    def test_d10_sequence(self):
        assert block_threshold(10) == 4
        assert [block_edge(10, t) for t in range(1, 8)] == [10, 9, 4, 3, 2, 1, 0]

    def test_reaches_zero_and_decreases(self):
        for d in (2, 17, 100):
            seq = []
            t = 1
            while True:
                a = block_edge(d, t)
                seq.append(a)
                if a <= 0:
                    break
                t += 1
            assert seq[0] == d
            assert all(b <= a for a, b in zip(seq[1:], seq[2:]))

    def test_block_edge_tracks_observed_firing_front(self):
        d = 10
        traj = radial_run(d)
        for t in range(1, len(traj)):
            a = block_edge(d, t)
            inc = traj[t] - traj[t - 1]
            if a >= 0:
                assert inc[: a + 1].all(), (t, a)
            if 0 <= a + 1 <= d and t > 1:
                assert not inc[a + 1] or a + 1 > block_edge(d, t - 1)


class TestClosedForm:
    @pytest.mark.parametrize("d", [1, 2, 5, 10, 100])
    def test_passes(self, d):
        rep = closed_form_check(d)
        assert rep.verdict == "pass", rep.line()

    def test_g_function_block_edge_consistency(self):
        # while the block is intact (v = t on x <= a_t), the chip count is
        # 2d + (d-1) - t*x, with an extra -(d - x) exactly at the edge
        d = 10
        traj = radial_run(d)
        for t in range(1, 4):
            a = block_edge(d, t)
            v = traj[t]
            s = 2 * d + (d - 1) + radial_laplacian_all(v)
            for x in range(0, a + 1):
                expect = 2 * d + (d - 1) - t * x
                if x == a:
                    expect -= d - x
                assert s[x] == expect, (t, x)


class TestM1Critical:
    @pytest.mark.parametrize("d0", range(2, 9))
    def test_signature(self, d0):
        assert m1_critical_check(d0) == (1, 2)

    @pytest.mark.parametrize("d0", [2, 5, 8])
    def test_intermediate_chip_counts(self, d0):
        # one topple leaves 2d0 - 1 chips (stable) upstairs and
        # 2(d0 - 1) chips (unstable) downstairs
        assert m1_intermediate_sandpiles(d0) == (2 * d0 - 1, 2 * (d0 - 1))

    def test_rejects_dimension_one(self):
        with pytest.raises(ValueError):
            m1_critical_check(1)
