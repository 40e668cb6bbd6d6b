"""Parallel toppling on the sorted fundamental domain.

The symmetrized neighbor structure is precomputed once per (spec, background)
into a sparse adjacency matrix A with A[i, j] = total multiplicity of simplex
point j among the symmetrized neighbors of point i (center reflections land
on the diagonal, dissipated moves are dropped). One step of the odometer is

    v' = floor((2d + k + A @ v) / 2d)

evaluated over disjoint rank chunks so the working set stays within a small
multiple of one field buffer, and so chunks may run on worker threads.
Integer arithmetic makes the result bit-identical for any thread count.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import BackgroundTooLargeError, BudgetExhaustedError
from .lattice import DISSIPATED, SELF, CubeSpec, indexer_for, sym_neighbors


def default_budget(spec: CubeSpec) -> int:
    return 64 * spec.N * spec.N * spec.d


def thread_count() -> int:
    """Worker cap from SANDCUBE_THREADS; absent means hardware default."""
    env = os.environ.get("SANDCUBE_THREADS", "")
    if env:
        return max(1, int(env))
    return min(os.cpu_count() or 1, 4)


@dataclass
class SimplexField:
    """Odometer (or chip-count) values over simplex ranks."""

    spec: CubeSpec
    background: int
    data: np.ndarray

    @classmethod
    def zeros(cls, spec, background=0):
        return cls(spec, background, np.zeros(indexer_for(spec).size, dtype=np.int64))


@dataclass
class Trajectory:
    """Time-indexed odometer snapshots from one run."""

    spec: CubeSpec
    background: int
    snapshots: dict  # t -> int64 array over simplex ranks
    stabilized_at: int | None
    t_end: int
    stats: dict = field(default_factory=dict)
    stopping_times: dict = field(default_factory=dict)

    @property
    def final(self) -> np.ndarray:
        return self.snapshots[self.t_end]

    def at(self, t: int) -> np.ndarray:
        """Snapshot at time t; times past stabilization return the final state."""
        if t > self.t_end and self.stabilized_at is not None:
            return self.final
        return self.snapshots[t]

    def times(self):
        return sorted(self.snapshots)

    def is_stride1(self) -> bool:
        return self.times() == list(range(self.t_end + 1))


def build_adjacency(spec: CubeSpec) -> sp.csr_matrix:
    """Symmetrized neighbor multiplicities as a CSR matrix over simplex ranks."""
    idx = indexer_for(spec)
    pts = idx.points()
    rows, cols, vals = [], [], []
    for i in range(idx.size):
        x = tuple(int(c) for c in pts[i])
        for target, mult in sym_neighbors(x, spec):
            if target is DISSIPATED:
                continue
            j = i if target is SELF else idx.rank(target)
            rows.append(i)
            cols.append(j)
            vals.append(mult)
    A = sp.csr_matrix(
        (np.array(vals, dtype=np.int64), (rows, cols)),
        shape=(idx.size, idx.size),
        dtype=np.int64,
    )
    A.sum_duplicates()
    return A


class SymEngine:
    """Stepping machinery for one (spec, background) pair."""

    def __init__(self, spec: CubeSpec, background: int = 0):
        d = spec.d
        if background < 0:
            raise ValueError("background must be >= 0")
        if 2 * d + background > 2 * (2 * d) - 1:
            raise BackgroundTooLargeError(
                f"background {background} violates 2d + k <= 4d - 1 for d={d}"
            )
        self.spec = spec
        self.background = background
        self.indexer = indexer_for(spec)
        self.size = self.indexer.size
        self.A = build_adjacency(spec)
        self.threads = thread_count()
        n_chunks = max(1, min(self.size, 4 * self.threads))
        bounds = np.linspace(0, self.size, n_chunks + 1, dtype=np.int64)
        self._chunks = [
            (int(bounds[c]), int(bounds[c + 1]), self.A[int(bounds[c]):int(bounds[c + 1])])
            for c in range(n_chunks)
            if bounds[c + 1] > bounds[c]
        ]
        chunk_rows = max(i1 - i0 for i0, i1, _ in self._chunks)
        # working set: one field, one int8 increment buffer, per-thread scratch
        self.working_bytes = 8 * self.size + self.size + 8 * chunk_rows * self.threads
        self.payload_bytes = 8 * self.size

    def increments(self, v: np.ndarray, executor=None) -> np.ndarray:
        """Per-site topple indicator for one step, as an int8 array."""
        inc = np.empty(self.size, dtype=np.int8)
        base = 2 * self.spec.d + self.background
        twod = 2 * self.spec.d

        def work(chunk):
            i0, i1, sub = chunk
            nb = sub.dot(v)
            np.floor_divide(base + nb, twod, out=nb)
            nb -= v[i0:i1]
            if nb.min() < 0 or nb.max() > 1:
                raise RuntimeError("odometer increment outside {0, 1}")
            inc[i0:i1] = nb

        if executor is None:
            for chunk in self._chunks:
                work(chunk)
        else:
            list(executor.map(work, self._chunks))
        return inc

    def step(self, v: np.ndarray) -> np.ndarray:
        """v_{t+1} = floor((2d + k + A v_t) / 2d), as a fresh array."""
        return v + self.increments(v)

    def neighbor_sum(self, v: np.ndarray) -> np.ndarray:
        return self.A.dot(v)

    def laplacian(self, v: np.ndarray) -> np.ndarray:
        """Symmetrized graph Laplacian with dissipating boundary."""
        return self.A.dot(v) - 2 * self.spec.d * v

    def sandpile(self, v: np.ndarray) -> np.ndarray:
        """Chip counts s = s0 + Delta v for s0 = 2d + k."""
        return (2 * self.spec.d + self.background) + self.laplacian(v)


def step_sym(f: SimplexField) -> SimplexField:
    """Single-step convenience wrapper around SymEngine."""
    eng = SymEngine(f.spec, f.background)
    return SimplexField(f.spec, f.background, eng.step(f.data))


def sandpile_from_odometer(f: SimplexField) -> SimplexField:
    """Chip counts implied by an odometer snapshot."""
    eng = SymEngine(f.spec, f.background)
    return SimplexField(f.spec, f.background, eng.sandpile(f.data))


def stabilize_sym(
    spec: CubeSpec,
    background: int = 0,
    t_max=None,
    snapshot_stride: int = 1,
    checkpoint_sink=None,
    v0=None,
    t0: int = 0,
    engine: SymEngine | None = None,
) -> Trajectory:
    """Run parallel toppling to a fixed point or until the budget runs out.

    Snapshots are kept every `snapshot_stride` steps (0 disables periodic
    snapshots) plus t0, t=1, and the final step. `checkpoint_sink(t, v)`,
    when given, is invoked after every step. A budget miss returns a partial
    trajectory with stabilized_at None.
    """
    eng = engine if engine is not None else SymEngine(spec, background)
    if t_max is None:
        t_max = default_budget(spec)
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    v = (
        np.zeros(eng.size, dtype=np.int64)
        if v0 is None
        else np.array(v0, dtype=np.int64, copy=True)
    )
    t = t0
    snapshots = {t: v.copy()}
    stabilized_at = None

    executor = None
    try:
        if eng.threads > 1 and eng.size >= 2048:
            executor = ThreadPoolExecutor(max_workers=eng.threads)
        while t < t0 + t_max:
            inc = eng.increments(v, executor)
            if not inc.any():
                stabilized_at = t
                break
            v += inc
            t += 1
            if t == 1 or (snapshot_stride and (t - t0) % snapshot_stride == 0):
                snapshots[t] = v.copy()
            if checkpoint_sink is not None:
                checkpoint_sink(t, v)
    finally:
        if executor is not None:
            executor.shutdown()

    snapshots[t] = v.copy()
    stats = {
        "working_bytes": eng.working_bytes,
        "payload_bytes": eng.payload_bytes,
        "threads": eng.threads,
    }
    return Trajectory(spec, background, snapshots, stabilized_at, t, stats)


def run_stride1(spec: CubeSpec, background: int = 0, t_max=None) -> Trajectory:
    """Stabilize with every snapshot retained; raises if the budget runs out."""
    traj = stabilize_sym(spec, background, t_max=t_max, snapshot_stride=1)
    if traj.stabilized_at is None:
        raise BudgetExhaustedError(
            f"(d={spec.d}, N={spec.N}, k={background}) did not stabilize in budget"
        )
    return traj


def boundary_ranks(spec: CubeSpec) -> np.ndarray:
    """Ranks of simplex points on the inner cube boundary (max coordinate M)."""
    pts = indexer_for(spec).points()
    return np.flatnonzero(pts[:, 0] == spec.M)


def stopping_time_of(traj: Trajectory, j: int) -> int:
    """First t >= 1 at which the inner boundary of C_{2j} attains j topples.

    The trajectory must be a stride-1 run of the size-2j cube. Attainment is
    at some boundary site (the facet center, by axis monotonicity); corner
    sites freeze short of j in dimensions d >= 2, so requiring the whole
    boundary would never terminate there.
    """
    spec = traj.spec
    if spec.N != 2 * j:
        raise ValueError(f"stopping time tau_{j} is defined on the size-{2 * j} cube")
    bnd = boundary_ranks(spec)
    for t in range(1, traj.t_end + 1):
        if (traj.at(t)[bnd] >= j).any():
            return t
    raise BudgetExhaustedError(
        f"boundary of C_{2 * j} never reached {j} topples (d={spec.d}, k={traj.background})"
    )


def stopping_time(d: int, j: int, background: int = 0, t_max=None) -> int:
    """tau_j computed from a fresh run of the size-2j cube."""
    if j < 1:
        raise ValueError("j must be >= 1")
    traj = run_stride1(CubeSpec(d, 2 * j), background, t_max=t_max)
    return stopping_time_of(traj, j)
