"""Explicit small-cube solutions under the enriched background 2d + (d-1).

For M = 2 every sorted point is (2,...,2,1,...,1), so the simplex collapses
to the line x in {0,...,d} where x counts coordinates equal to 2. Parallel
toppling becomes a one-dimensional recursion with an x-dependent Laplacian,
and the odometer has a closed form: a shrinking block of simultaneous
firings followed by outward ripples. For M = 1 the same background isolates
the critical dimension where dimensional reduction first fails.
"""

import math
from dataclasses import dataclass

import numpy as np

from .engine_sym import SymEngine, stabilize_sym
from .lattice import CubeSpec, indexer_for
from .report import FAIL, PASS, CheckReport


@dataclass
class RadialState:
    """Odometer over x in {0..d}; x = number of coordinates equal to 2."""

    d: int
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, d):
        return cls(d, np.zeros(d + 1, dtype=np.int64), 0)


def radial_laplacian(v: np.ndarray, x: int) -> int:
    """(-d - x) v(x) + (d - x) v(x+1) + x v(x-1), with v(-1) = v(d+1) = 0."""
    d = len(v) - 1
    if not 0 <= x <= d:
        raise ValueError(f"x={x} outside 0..{d}")
    up = v[x + 1] if x + 1 <= d else 0
    down = v[x - 1] if x - 1 >= 0 else 0
    return int((-d - x) * v[x] + (d - x) * up + x * down)


def radial_laplacian_all(v: np.ndarray) -> np.ndarray:
    d = len(v) - 1
    x = np.arange(d + 1, dtype=np.int64)
    up = np.append(v[1:], 0)
    down = np.concatenate(([0], v[:-1]))
    return (-d - x) * v + (d - x) * up + x * down


def radial_step(state: RadialState, k=None) -> RadialState:
    """Fire every x whose chip count 2d + k + lap(v, x) is at least 2d."""
    d = state.d
    if k is None:
        k = d - 1
    s = 2 * d + k + radial_laplacian_all(state.v)
    return RadialState(d, state.v + (s >= 2 * d), state.t + 1)


def radial_run(d: int, k=None, t_max=None) -> list:
    """Trajectory v_0..v_T, stopping at the fixed point or at t_max steps."""
    if t_max is None:
        t_max = 64 * 16 * d  # the generic budget at N = 4
    state = RadialState.zeros(d)
    traj = [state.v.copy()]
    for _ in range(t_max):
        nxt = radial_step(state, k)
        if np.array_equal(nxt.v, state.v):
            break
        traj.append(nxt.v.copy())
        state = nxt
    return traj


def block_threshold(d: int) -> int:
    """t_d = ceil(sqrt(d-1)) + 1, the step after which the block edge
    moves left by exactly one per step."""
    return math.isqrt(d - 2) + 1 + 1 if d >= 2 else 1


def block_edge(d: int, t: int) -> int:
    """Right edge a_t of the firing block; a_1 = d, then the two-regime rule."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if t == 1:
        return d
    t_d = block_threshold(d)
    if t <= t_d:
        return (d - 1) // (t - 1)
    return block_edge(d, t_d) - (t - t_d)


def radial_to_simplex(d: int) -> np.ndarray:
    """Rank of (2_x, 1_{d-x}) in the M=2 simplex, for each x in 0..d."""
    idx = indexer_for(CubeSpec(d, 4))
    return np.array(
        [idx.rank((2,) * x + (1,) * (d - x)) for x in range(d + 1)], dtype=np.int64
    )


def closed_form_check(d: int, horizon=None) -> CheckReport:
    """Verify the block and ripple recurrences on the computed trajectory.

    Block: v_t(x) = v_{t-1}(x) + 1 for x <= a_t, unchanged on (a_t, a_{t-1}].
    Ripple: v_t(x) = v_{t-1}(x-1) on each spent band (a_{t'}, a_{t'-1}],
    t' < t, restricted to x whose left neighbor lies in the same band
    (x > a_{t'} + 1, and x >= 1): at the band-edge site the identity goes
    stale once the returning wave increments the neighboring band, which a
    direct run exhibits already at d = 2, t = 5, x = 2.
    Defaults to checking up to stabilization or 4d steps, whichever first.
    """
    traj = radial_run(d)
    t_stab = len(traj) - 1
    if horizon is None:
        horizon = min(t_stab, 4 * d)
    horizon = min(horizon, t_stab)
    edges = {t: block_edge(d, t) for t in range(1, horizon + 1)}

    def counterexample(t, x, lhs, rhs):
        return CheckReport(
            "radial-closed-form", d, 4, d - 1, FAIL, (t, (x,), int(lhs), int(rhs))
        )

    for t in range(1, horizon + 1):
        v, prev = traj[t], traj[t - 1]
        a_t = edges[t]
        a_prev = d if t == 1 else edges[t - 1]
        for x in range(0, min(a_t, d) + 1):
            if v[x] != prev[x] + 1:
                return counterexample(t, x, v[x], prev[x] + 1)
        for x in range(max(a_t + 1, 0), min(a_prev, d) + 1):
            if v[x] != prev[x]:
                return counterexample(t, x, v[x], prev[x])
        for tp in range(2, t):
            lo = max(edges[tp] + 2, 1)
            hi = min(edges[tp - 1], d)
            for x in range(lo, hi + 1):
                if v[x] != prev[x - 1]:
                    return counterexample(t, x, v[x], prev[x - 1])
    return CheckReport(
        "radial-closed-form", d, 4, d - 1, PASS, details={"horizon": horizon}
    )


def m1_critical_check(d0: int):
    """Terminal constant odometers on the two-site cube with k = d0 - 1.

    Returns (v_inf in dimension d0, v_inf in dimension d0 - 1); the
    reduction-breaking signature is (1, 2).
    """
    if d0 < 2:
        raise ValueError("d0 must be >= 2")
    out = []
    for d in (d0, d0 - 1):
        traj = stabilize_sym(CubeSpec(d, 2), background=d0 - 1)
        assert traj.stabilized_at is not None
        v = traj.final
        assert v.shape == (1,)
        out.append(int(v[0]))
    return tuple(out)


def m1_intermediate_sandpiles(d0: int):
    """Chip counts after the first (all-fire) step in dimensions d0 and d0-1."""
    out = []
    for d in (d0, d0 - 1):
        eng = SymEngine(CubeSpec(d, 2), background=d0 - 1)
        v1 = eng.step(np.zeros(1, dtype=np.int64))
        out.append(int(eng.sandpile(v1)[0]))
    return tuple(out)
