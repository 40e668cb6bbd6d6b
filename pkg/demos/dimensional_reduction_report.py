"""Print the central-slice identity between consecutive dimensions.

For the all-2d background, the odometer of the d-cube restricted to the
central layer x_d = 1 equals the full (d-1)-cube odometer at every step,
and one layer up it is the terminal (d-1) odometer shifted down by one
parallel step. Run this to watch the identity hold line by line.
"""

import argparse

import numpy as np

from sandcube.engine_sym import run_stride1
from sandcube.lattice import CubeSpec, indexer_for


def layer(traj, d, N, level):
    idx = indexer_for(CubeSpec(d, N))
    pts = idx.points()
    sel = pts[:, -1] == level
    sub = indexer_for(CubeSpec(d - 1, N))
    order = sub.rank_rows(pts[sel][:, :-1])
    out = np.empty(sub.size, dtype=np.int64)
    out[order] = np.arange(len(order))
    return np.flatnonzero(sel)[out]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--side", type=int, default=8)
    args = ap.parse_args()
    d, N = args.dim, args.side

    hi = run_stride1(CubeSpec(d, N))
    lo = run_stride1(CubeSpec(d - 1, N))
    sel = layer(hi, d, N, 1)

    print(f"d={d} vs d={d-1}, N={N}: slice x_{d}=1 against the full lower cube")
    T = max(hi.t_end, lo.t_end)
    for t in range(1, T + 1):
        a = hi.at(t)[sel]
        b = lo.at(t)
        mark = "ok" if np.array_equal(a, b) else "MISMATCH"
        print(f"  t={t:3d}  slice={a.tolist()}  lower={b.tolist()}  {mark}")

    print(f"\nterminal layer x_{d}=2 equals the lower terminal odometer on x >= 2:")
    idx = indexer_for(CubeSpec(d, N))
    sub = indexer_for(CubeSpec(d - 1, N))
    pts = sub.points()
    keep = pts[:, -1] >= 2
    ranks2 = idx.rank_rows(
        np.hstack([pts[keep], np.full((keep.sum(), 1), 2, dtype=pts.dtype)])
    )
    a = hi.final[ranks2]
    b = lo.final[keep]
    print("  slice :", a.tolist())
    print("  lower :", b.tolist())
    print("  match :", np.array_equal(a, b))


if __name__ == "__main__":
    main()
