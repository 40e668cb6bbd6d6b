"""Unfolding simplex fields to full cubes, slicing, and P6 pixmap output.

The color convention follows the cross-dimension comparison rule: a site
with z chips in dimension d is drawn like a site with z - 2(d - d_ref)
chips in the reference dimension, so center slices of consecutive
dimensions become pixel-comparable. The palette is a fixed 16-entry table
(see docs/palette.md); normalized values must land in 0..15.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import OutOfDomainError, PaletteOverflowError
from .lattice import CubeSpec, fold_rows, indexer_for

#: 16 fixed RGB colors; index = normalized chip (or topple) count.
PALETTE = np.array(
    [
        (0x00, 0x00, 0x00),  # 0
        (0x1F, 0x3A, 0x5F),  # 1
        (0x2E, 0x6F, 0x9E),  # 2
        (0x3F, 0xB5, 0xC9),  # 3
        (0x7F, 0xD4, 0xA0),  # 4
        (0xC2, 0xE6, 0x76),  # 5
        (0xF5, 0xD5, 0x4E),  # 6
        (0xF2, 0x9E, 0x38),  # 7
        (0xE0, 0x5C, 0x2B),  # 8
        (0xB8, 0x2E, 0x2E),  # 9
        (0x8A, 0x1C, 0x45),  # 10
        (0x5C, 0x16, 0x5C),  # 11
        (0x8E, 0x5A, 0xC8),  # 12
        (0xB9, 0x9A, 0xE8),  # 13
        (0xDC, 0xCC, 0xF4),  # 14
        (0xFF, 0xFF, 0xFF),  # 15
    ],
    dtype=np.uint8,
)


@dataclass
class SliceImage:
    """A 2D cross-section of chip or topple counts, plus its palette offset."""

    values: np.ndarray
    palette_base: int = 0

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def height(self):
        return self.values.shape[0]


@lru_cache(maxsize=32)
def _fold_map(spec: CubeSpec) -> np.ndarray:
    """Rank of fold(y) for every cube point y, as a flat (N^d,) array."""
    d, N = spec.d, spec.N
    grid = np.indices((N,) * d).reshape(d, -1).T + spec.lo
    inside, folded = fold_rows(grid, spec)
    assert inside.all()
    return indexer_for(spec).rank_rows(folded)


def unfold(data: np.ndarray, spec: CubeSpec) -> np.ndarray:
    """Expand a simplex-ranked field to the full (N,)*d cube array.

    Array index i along each axis corresponds to cube coordinate lo + i.
    """
    return np.asarray(data)[_fold_map(spec)].reshape((spec.N,) * spec.d)


def orbit_sizes(spec: CubeSpec) -> np.ndarray:
    """Number of cube points in each simplex point's symmetry orbit."""
    pts = indexer_for(spec).points()
    out = np.empty(len(pts), dtype=np.int64)
    even = spec.N % 2 == 0
    for i, x in enumerate(pts):
        perms = math.factorial(spec.d)
        for val in set(x.tolist()):
            perms //= math.factorial(int((x == val).sum()))
        if even:
            refl = 2 ** spec.d
        else:
            refl = 2 ** int((x > 1).sum())  # coordinate 1 is its own mirror
        out[i] = perms * refl
    return out


def slice_image(cube: np.ndarray, spec: CubeSpec, offsets=(), palette_base=0) -> SliceImage:
    """Cross-section with coordinates 3..d fixed at 1 + offset (offset 0 is
    the center layer). The first two axes are kept whole."""
    if spec.d < 2:
        raise OutOfDomainError("slices need d >= 2")
    offsets = tuple(offsets)
    if len(offsets) != spec.d - 2:
        raise OutOfDomainError(
            f"expected {spec.d - 2} slice offsets for d={spec.d}, got {len(offsets)}"
        )
    index = []
    for off in offsets:
        c = 1 + off
        if not spec.lo <= c <= spec.hi:
            raise OutOfDomainError(f"slice offset {off} leaves the cube")
        index.append(c - spec.lo)
    return SliceImage(cube[(slice(None), slice(None), *index)], palette_base)


def write_raster(img: SliceImage, path, normalization: int = 0) -> None:
    """Emit a binary P6 pixmap; values are palette indices after subtracting
    the normalization offset."""
    vals = np.asarray(img.values, dtype=np.int64) - normalization - img.palette_base
    if vals.min() < 0 or vals.max() > 15:
        raise PaletteOverflowError(
            f"normalized values span [{vals.min()}, {vals.max()}], palette is 0..15"
        )
    h, w = vals.shape
    with open(path, "wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        f.write(PALETTE[vals].tobytes())


def cross_dim_normalization(d: int, d_ref: int) -> int:
    """Table-style offset: z chips in dimension d match z - 2(d - d_ref)."""
    return 2 * (d - d_ref)
