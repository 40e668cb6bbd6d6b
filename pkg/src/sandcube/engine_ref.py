"""Brute-force parallel toppling on the full N^d cube.

Ground-truth oracle for the symmetric engine. Odometer fields are plain
numpy int64 arrays of shape (N,) * d; array index i along each axis maps to
cube coordinate spec.lo + i.
"""

import numpy as np

from .errors import BackgroundTooLargeError, BudgetExhaustedError
from .lattice import CubeSpec


def default_budget(spec: CubeSpec) -> int:
    """Step budget comfortably above observed stabilization times at desk scale."""
    return 64 * spec.N * spec.N * spec.d


def neighbor_sum_full(v: np.ndarray) -> np.ndarray:
    """Sum of the 2d lattice-neighbor values, zero-padded outside the cube."""
    p = np.pad(v, 1)
    out = np.zeros_like(v)
    for axis in range(v.ndim):
        idx_lo = [slice(1, -1)] * v.ndim
        idx_hi = [slice(1, -1)] * v.ndim
        idx_lo[axis] = slice(0, -2)
        idx_hi[axis] = slice(2, None)
        out += p[tuple(idx_lo)]
        out += p[tuple(idx_hi)]
    return out


def laplacian_full(f: np.ndarray, x=None) -> np.ndarray | int:
    """Graph Laplacian -2d*f + neighbor sum, dissipating boundary.

    With x given (an array index tuple), returns the scalar value at x.
    """
    lap = neighbor_sum_full(f) - 2 * f.ndim * f
    return lap if x is None else int(lap[tuple(x)])


def step_full(v: np.ndarray, s0: np.ndarray) -> np.ndarray:
    """One parallel-toppling step of the odometer: floor((s0 + nbr sum)/2d)."""
    d = v.ndim
    if s0.max() > 2 * (2 * d) - 1:
        raise BackgroundTooLargeError(
            f"initial sandpile exceeds 2*(2d)-1 = {4 * d - 1}"
        )
    return (s0 + neighbor_sum_full(v)) // (2 * d)


def stabilize_full(s0: np.ndarray, spec: CubeSpec, t_max=None, v0=None):
    """Iterate step_full to a fixed point.

    Returns (odometer trajectory v_0..v_T as a list, final sandpile, stabilized).
    On budget exhaustion the trajectory is partial and stabilized is False.
    """
    if t_max is None:
        t_max = default_budget(spec)
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    v = np.zeros(s0.shape, dtype=np.int64) if v0 is None else v0.astype(np.int64)
    traj = [v]
    stabilized = False
    for _ in range(t_max):
        v_next = step_full(v, s0)
        if np.array_equal(v_next, v):
            stabilized = True
            break
        inc = v_next - v
        if inc.min() < 0 or inc.max() > 1:
            raise RuntimeError("odometer increment outside {0, 1}")
        traj.append(v_next)
        v = v_next
    else:
        stabilized = t_max == 0 and not (s0 >= 2 * spec.d).any()
    s_final = s0 + laplacian_full(traj[-1])
    return traj, s_final, stabilized


def constant_sandpile(spec: CubeSpec, value: int) -> np.ndarray:
    """s0 identically equal to `value` on the full cube."""
    return np.full((spec.N,) * spec.d, value, dtype=np.int64)


def stabilize_constant(spec: CubeSpec, background: int, t_max=None):
    """stabilize_full for s0 = 2d + background; raises on budget exhaustion."""
    s0 = constant_sandpile(spec, 2 * spec.d + background)
    traj, s_final, stabilized = stabilize_full(s0, spec, t_max=t_max)
    if not stabilized:
        raise BudgetExhaustedError(
            f"full-cube run (d={spec.d}, N={spec.N}, k={background}) did not stabilize"
        )
    return traj, s_final
