"""Cube coordinates, the sorted fundamental domain, and symmetrized neighbors.

The cube of side N is embedded in Z^d so that the fundamental domain is
always the simplex of sorted points {M >= x_1 >= ... >= x_d >= 1} with
M = ceil(N/2), for both parities of N:

  * even N = 2M: cube coordinates run over [1 - M, M],
  * odd  N = 2M - 1: cube coordinates run over [2 - M, M], center slice at 1.

Folding a cube point into the simplex reflects each coordinate about the
center (y -> 1 - y for even N, y -> 2 - y for odd N) and sorts descending.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import OutOfDomainError, UnsupportedDomainError


class _Marker:
    __slots__ = ("_name",)

    def __init__(self, name):
        self._name = name

    def __repr__(self):
        return self._name


#: Neighbor that folds back onto the point itself (center reflection, even N).
SELF = _Marker("Self")
#: Neighbor outside the cube; chips sent there are lost.
DISSIPATED = _Marker("Dissipated")


@dataclass(frozen=True)
class CubeSpec:
    """Dimension and side length; fixes every coordinate convention."""

    d: int
    N: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if self.N < 1:
            raise ValueError(f"side length must be >= 1, got {self.N}")

    @property
    def M(self) -> int:
        """Half-side, ceil(N/2); the simplex coordinates run over 1..M."""
        return (self.N + 1) // 2

    @property
    def parity(self) -> str:
        return "even" if self.N % 2 == 0 else "odd"

    @property
    def lo(self) -> int:
        """Smallest cube coordinate (largest is always M)."""
        return 1 - self.M if self.N % 2 == 0 else 2 - self.M

    @property
    def hi(self) -> int:
        return self.M


def simplex_size(spec: CubeSpec) -> int:
    """Number of points in the sorted fundamental domain: C(M + d - 1, d)."""
    size = math.comb(spec.M + spec.d - 1, spec.d)
    if size >= 2**63:
        raise OverflowError(
            f"simplex size {size} for (d={spec.d}, M={spec.M}) exceeds 64-bit range"
        )
    return size


def fold(y, spec: CubeSpec) -> tuple:
    """Map an arbitrary cube point to its orbit representative in the simplex."""
    if len(y) != spec.d:
        raise OutOfDomainError(f"expected {spec.d} coordinates, got {len(y)}")
    lo, hi = spec.lo, spec.hi
    even = spec.N % 2 == 0
    out = []
    for c in y:
        if c < lo or c > hi:
            raise OutOfDomainError(f"coordinate {c} outside cube range [{lo}, {hi}]")
        if c < 1:
            c = (1 - c) if even else (2 - c)
        out.append(c)
    out.sort(reverse=True)
    return tuple(out)


def fold_rows(Y: np.ndarray, spec: CubeSpec):
    """Vectorized fold. Returns (inside_mask, folded_rows).

    Rows outside the cube get inside_mask False; their folded row is unspecified.
    """
    Y = np.asarray(Y, dtype=np.int64)
    inside = (Y >= spec.lo).all(axis=1) & (Y <= spec.hi).all(axis=1)
    center = 1 if spec.N % 2 == 0 else 2
    refl = np.where(Y >= 1, Y, center - Y)
    folded = np.sort(refl, axis=1)[:, ::-1]
    return inside, folded


class SimplexIndexer:
    """Bijection between sorted simplex points and dense ranks.

    Rank order is ascending lexicographic on the (descending-sorted)
    coordinate tuples, largest coordinate first: for d=2, M=2 the order is
    (1,1), (2,1), (2,2).
    """

    def __init__(self, spec: CubeSpec):
        self.spec = spec
        self.size = simplex_size(spec)
        d, M = spec.d, spec.M
        # binom[n, k] for n <= M + d - 2, k <= d; every entry actually used
        # by rank() is bounded by simplex_size and thus fits in int64.
        n_max = M + d - 1
        table = [[math.comb(n, k) for k in range(d + 2)] for n in range(n_max + 1)]
        capped = [[v if v < 2**63 else -1 for v in row] for row in table]
        self._binom = np.array(capped, dtype=np.int64)
        self._points = None

    def rank(self, x) -> int:
        """Dense index of a simplex point."""
        self._validate_point(x)
        d = self.spec.d
        r = 0
        for i, c in enumerate(x):  # i is 0-based; formula uses i+1
            r += math.comb(c - 1 + d - i - 1, d - i)
        return r

    def unrank(self, i: int) -> tuple:
        """Simplex point with dense index i."""
        if not 0 <= i < self.size:
            raise OutOfDomainError(f"rank {i} outside [0, {self.size})")
        d, M = self.spec.d, self.spec.M
        remaining = i
        prev = M
        out = []
        for pos in range(d):
            length = d - pos  # coordinates still to place, including this one
            v = prev
            while v > 1 and math.comb(v - 1 + length - 1, length) > remaining:
                v -= 1
            remaining -= math.comb(v - 1 + length - 1, length)
            out.append(v)
            prev = v
        return tuple(out)

    def points(self) -> np.ndarray:
        """All simplex points as an int64 array of shape (size, d), in rank order."""
        if self._points is None:
            pts = np.empty((self.size, self.spec.d), dtype=np.int64)
            for i in range(self.size):
                pts[i] = self.unrank(i)
            pts.setflags(write=False)
            self._points = pts
        return self._points

    def rank_rows(self, X: np.ndarray) -> np.ndarray:
        """Vectorized rank of valid simplex points (rows of X)."""
        X = np.asarray(X, dtype=np.int64)
        d = self.spec.d
        cols = np.arange(d)
        n = X + (d - cols - 2)  # x_i - 1 + d - i with 1-based i
        k = d - cols
        return self._binom[n, k].sum(axis=1)

    def try_rank_rows(self, X: np.ndarray):
        """(valid_mask, ranks) for possibly-invalid rows; invalid rows get rank -1."""
        X = np.asarray(X, dtype=np.int64)
        valid = (X >= 1).all(axis=1) & (X <= self.spec.M).all(axis=1)
        if self.spec.d > 1:
            valid &= (np.diff(X, axis=1) <= 0).all(axis=1)
        ranks = np.full(len(X), -1, dtype=np.int64)
        if valid.any():
            ranks[valid] = self.rank_rows(X[valid])
        return valid, ranks

    def _validate_point(self, x):
        if len(x) != self.spec.d:
            raise OutOfDomainError(f"expected {self.spec.d} coordinates, got {len(x)}")
        prev = self.spec.M
        for c in x:
            if not 1 <= c <= prev:
                raise OutOfDomainError(f"{tuple(x)} is not a sorted simplex point")
            prev = c


def neighbor_runs(x, spec: CubeSpec):
    """Maximal runs of equal padded coordinates (x_0 = M, x_1..x_d, x_{d+1} = 1).

    Returns the list of index pairs (l_k, r_k) tiling 0..d+1. The run values
    are strictly decreasing. Requires M >= 2.
    """
    if spec.M < 2:
        raise UnsupportedDomainError("run-index scan needs M >= 2")
    padded = (spec.M,) + tuple(x) + (1,)
    runs = []
    l = 0
    while l <= spec.d + 1:
        r = l
        while r + 1 <= spec.d + 1 and padded[r + 1] == padded[l]:
            r += 1
        runs.append((l, r))
        l = r + 1
    return runs


def sym_neighbors(x, spec: CubeSpec):
    """Symmetrized neighbors of a simplex point with multiplicities.

    Returns a list of (target, multiplicity) entries where target is a simplex
    point tuple, SELF, or DISSIPATED. Total multiplicity is exactly 2d.

    Each run of equal coordinates of width c contributes c down-moves folding
    onto a single point (decrement the last index of the run) and c up-moves
    (increment the first index). The run containing the pad value M sends its
    up-moves over the dissipating edge; the run containing the pad value 1
    sends its down-moves through the center reflection, which is the point
    itself for even N and the up-neighbor for odd N.
    """
    x = tuple(x)
    d, M = spec.d, spec.M
    if M == 1:
        # single-point domain; enumerate cube neighbors of (1, ..., 1) directly
        entries = []
        self_mult = 0
        diss_mult = 0
        for i in range(d):
            for delta in (1, -1):
                y = list(x)
                y[i] += delta
                if not (spec.lo <= y[i] <= spec.hi):
                    diss_mult += 1
                elif fold(y, spec) == x:
                    self_mult += 1
        if diss_mult:
            entries.append((DISSIPATED, diss_mult))
        if self_mult:
            entries.append((SELF, self_mult))
        return entries

    runs = neighbor_runs(x, spec)
    n = len(runs) - 1
    entries = []
    for k, (l, r) in enumerate(runs):
        if k == 0:
            c = r - l  # coordinates at value M, excluding the pad index 0
            if c:
                down = list(x)
                down[r - 1] -= 1  # padded index r is coordinate r
                entries.append((tuple(down), c))
                entries.append((DISSIPATED, c))
        elif k == n:
            c = r - l  # coordinates at value 1, excluding the pad index d+1
            if c:
                up = list(x)
                up[l - 1] += 1
                if spec.N % 2 == 0:
                    entries.append((tuple(up), c))
                    entries.append((SELF, c))
                else:
                    entries.append((tuple(up), 2 * c))
        else:
            c = 1 + r - l
            down = list(x)
            down[r - 1] -= 1
            up = list(x)
            up[l - 1] += 1
            entries.append((tuple(down), c))
            entries.append((tuple(up), c))
    return entries


@lru_cache(maxsize=None)
def _cached_indexer(spec: CubeSpec) -> SimplexIndexer:
    return SimplexIndexer(spec)


def indexer_for(spec: CubeSpec) -> SimplexIndexer:
    """Shared per-spec indexer (tables are read-only after construction)."""
    return _cached_indexer(spec)
