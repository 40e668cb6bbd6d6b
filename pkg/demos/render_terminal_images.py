"""Render terminal sandpile rasters at a few sizes and dimensions.

Writes P6 pixmaps into ./out (or --outdir). The 3d images use the
cross-dimension offset so their center slices share the 2d color scale.
"""

import argparse
import os

from sandcube.engine_sym import SymEngine, stabilize_sym
from sandcube.lattice import CubeSpec
from sandcube.render import cross_dim_normalization, slice_image, unfold, write_raster


def terminal_cube(d, N):
    spec = CubeSpec(d, N)
    traj = stabilize_sym(spec, 0, snapshot_stride=0)
    print(f"d={d} N={N}: stabilized at t={traj.stabilized_at}, "
          f"total topples {int(traj.final.sum())}")
    return unfold(SymEngine(spec, 0).sandpile(traj.final), spec), spec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="out")
    ap.add_argument("--side", type=int, default=64)
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    cube, spec = terminal_cube(2, args.side)
    path = os.path.join(args.outdir, f"square-N{args.side}.ppm")
    write_raster(slice_image(cube, spec), path)
    print("wrote", path)

    N3 = min(args.side, 32)  # the 3d cube grows fast; keep it modest
    cube, spec = terminal_cube(3, N3)
    for off in (0, 1, N3 // 4):
        img = slice_image(cube, spec, (off,))
        # only the center layer stays >= 2 chips everywhere, so only there
        # can we shift onto the 2d color scale
        norm = cross_dim_normalization(3, 2) if off == 0 else 0
        path = os.path.join(args.outdir, f"cube-N{N3}-layer{off}.ppm")
        write_raster(img, path, normalization=norm)
        print("wrote", path)


if __name__ == "__main__":
    main()
