"""Unfolding, orbit counting, slicing, and P6 raster output."""

import itertools

import numpy as np
import pytest

from sandcube.engine_ref import constant_sandpile, step_full
from sandcube.engine_sym import (
    SimplexField,
    SymEngine,
    run_stride1,
    stabilize_sym,
    step_sym,
)
from sandcube.errors import OutOfDomainError, PaletteOverflowError
from sandcube.lattice import CubeSpec, fold, indexer_for
from sandcube.render import (
    PALETTE,
    SliceImage,
    cross_dim_normalization,
    orbit_sizes,
    slice_image,
    unfold,
    write_raster,
)

GOLDEN = __file__.rsplit("/", 1)[0] + "/golden"


def terminal_cube(d, N):
    spec = CubeSpec(d, N)
    traj = stabilize_sym(spec, 0, snapshot_stride=0)
    eng = SymEngine(spec, 0)
    return unfold(eng.sandpile(traj.final), spec), spec


class TestUnfold:
    def test_constant_field(self):
        spec = CubeSpec(3, 5)
        data = np.full(indexer_for(spec).size, 7, dtype=np.int64)
        cube = unfold(data, spec)
        assert cube.shape == (5, 5, 5) and (cube == 7).all()

    def test_rank_values_land_on_their_orbits(self):
        spec = CubeSpec(2, 6)
        idx = indexer_for(spec)
        cube = unfold(np.arange(idx.size), spec)
        for i, j in itertools.product(range(6), repeat=2):
            y = (i + spec.lo, j + spec.lo)
            assert cube[i, j] == idx.rank(fold(y, spec))

    @pytest.mark.parametrize("d,N", [(1, 6), (2, 5), (2, 8), (3, 4)])
    def test_commutes_with_every_step(self, d, N):
        # unfolding then stepping on the cube equals stepping in the
        # fundamental domain then unfolding, along the whole trajectory
        spec = CubeSpec(d, N)
        traj = run_stride1(spec)
        s0 = constant_sandpile(spec, 2 * d)
        for t in range(traj.t_end):
            f = SimplexField(spec, 0, traj.at(t))
            lhs = step_full(unfold(f.data, spec), s0)
            rhs = unfold(step_sym(f).data, spec)
            assert np.array_equal(lhs, rhs), t

    def test_signed_permutation_invariance(self):
        # any coordinate permutation + reflection fixes an unfolded field
        spec = CubeSpec(3, 8)
        cube, _ = terminal_cube(3, 8)
        for perm in itertools.permutations(range(3)):
            assert np.array_equal(cube, cube.transpose(perm))
        for axis in range(3):
            assert np.array_equal(cube, np.flip(cube, axis=axis))


class TestOrbitSizes:
    @pytest.mark.parametrize("d", [1, 2, 3])
    @pytest.mark.parametrize("M", [1, 2, 3, 4])
    @pytest.mark.parametrize("parity", [0, 1])
    def test_sum_to_cube_volume(self, d, M, parity):
        N = 2 * M - parity
        if N < 1:
            pytest.skip("no cube")
        spec = CubeSpec(d, N)
        assert orbit_sizes(spec).sum() == N**d

    def test_matches_brute_force_count(self):
        spec = CubeSpec(2, 7)
        idx = indexer_for(spec)
        counts = np.zeros(idx.size, dtype=np.int64)
        for y in itertools.product(range(spec.lo, spec.hi + 1), repeat=2):
            counts[idx.rank(fold(y, spec))] += 1
        assert np.array_equal(counts, orbit_sizes(spec))


class TestSliceImage:
    def test_center_slice_shape(self):
        cube, spec = terminal_cube(3, 6)
        img = slice_image(cube, spec, (0,))
        assert (img.height, img.width) == (6, 6)
        # coordinate 1 sits at array index 1 - lo
        assert np.array_equal(img.values, cube[:, :, 1 - spec.lo])

    def test_offset_count_enforced(self):
        cube, spec = terminal_cube(3, 6)
        with pytest.raises(OutOfDomainError):
            slice_image(cube, spec)
        with pytest.raises(OutOfDomainError):
            slice_image(cube, spec, (0, 0))

    def test_offset_leaving_cube(self):
        cube, spec = terminal_cube(3, 6)
        with pytest.raises(OutOfDomainError):
            slice_image(cube, spec, (spec.hi,))


class TestRaster:
    def test_header_and_length(self, tmp_path):
        img = SliceImage(np.zeros((3, 5), dtype=np.int64))
        p = tmp_path / "z.ppm"
        write_raster(img, p)
        raw = p.read_bytes()
        assert raw.startswith(b"P6\n5 3\n255\n")
        assert len(raw) == len(b"P6\n5 3\n255\n") + 3 * 5 * 3

    def test_palette_lookup(self, tmp_path):
        img = SliceImage(np.array([[0, 15]], dtype=np.int64))
        p = tmp_path / "two.ppm"
        write_raster(img, p)
        body = p.read_bytes().split(b"255\n", 1)[1]
        assert body == bytes(PALETTE[0]) + bytes(PALETTE[15])

    def test_overflow_raises(self, tmp_path):
        with pytest.raises(PaletteOverflowError):
            write_raster(SliceImage(np.array([[16]])), tmp_path / "x.ppm")
        with pytest.raises(PaletteOverflowError):
            write_raster(SliceImage(np.array([[0]])), tmp_path / "x.ppm", normalization=1)

    def test_deterministic_bytes(self, tmp_path):
        cube, spec = terminal_cube(2, 12)
        a, b = tmp_path / "a.ppm", tmp_path / "b.ppm"
        write_raster(slice_image(cube, spec), a)
        write_raster(slice_image(cube, spec), b)
        assert a.read_bytes() == b.read_bytes()


class TestGolden:
    def test_terminal_d2_n64(self, tmp_path):
        cube, spec = terminal_cube(2, 64)
        p = tmp_path / "got.ppm"
        write_raster(slice_image(cube, spec), p)
        assert p.read_bytes() == open(f"{GOLDEN}/terminal-d2-N64.ppm", "rb").read()

    def test_terminal_d3_n16_center(self, tmp_path):
        cube, spec = terminal_cube(3, 16)
        p = tmp_path / "got.ppm"
        write_raster(slice_image(cube, spec, (0,)), p)
        assert p.read_bytes() == open(f"{GOLDEN}/terminal-d3-N16-center.ppm", "rb").read()


class TestCrossDimension:
    def test_offset_table(self):
        assert cross_dim_normalization(3, 2) == 2
        assert cross_dim_normalization(2, 2) == 0
        assert cross_dim_normalization(2, 3) == -2

    def test_center_slice_matches_lower_dimension(self):
        # away from the central cross (both folded coordinates >= 2), the
        # d=3 center slice minus 2 chips equals the d=2 terminal sandpile
        c2, s2 = terminal_cube(2, 16)
        c3, s3 = terminal_cube(3, 16)
        sl3 = slice_image(c3, s3, (0,)).values
        diff = sl3 - cross_dim_normalization(3, 2) - c2
        mask = np.zeros_like(diff, dtype=bool)
        for a in range(16):
            for b in range(16):
                x, y = fold((a + s2.lo, b + s2.lo), s2)
                mask[a, b] = min(x, y) >= 2
        assert not diff[mask].any()
        # the central band only ever undershoots, and by at most one chip
        assert set(np.unique(diff)) <= {-1, 0}
