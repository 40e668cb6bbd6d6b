"""Executable checks of the odometer's proved properties and conjecture probes.

Every check consumes stride-1 trajectories from the symmetric engine and
returns a CheckReport. Checks of proved statements use pass/fail verdicts;
probes of open statements use observed/violated-observation and are never
allowed to hard-fail a suite.
"""

import itertools
from functools import lru_cache

import numpy as np

from .engine_sym import (
    SymEngine,
    Trajectory,
    run_stride1,
    stopping_time,
    stopping_time_of,
)
from .errors import BackgroundTooLargeError
from .lattice import CubeSpec, fold, indexer_for
from .report import FAIL, OBSERVED, PASS, SKIPPED, VIOLATED, CheckReport

DEFAULT_SEED = 20250823


class HypothesisNotMet(Exception):
    """A check's standing hypothesis fails on the supplied data."""


@lru_cache(maxsize=None)
def _engine(d: int, N: int, k: int) -> SymEngine:
    return SymEngine(CubeSpec(d, N), k)


@lru_cache(maxsize=None)
def _run(d: int, N: int, k: int) -> Trajectory:
    return run_stride1(CubeSpec(d, N), k)


def _layer_ranks(d: int, N: int, layer: int):
    """Map (d-1)-simplex points x (with min coordinate >= layer) to the rank
    of (x, layer) in the d-simplex. Returns (mask over (d-1)-points, ranks)."""
    low = indexer_for(CubeSpec(d - 1, N))
    high = indexer_for(CubeSpec(d, N))
    pts = low.points()
    mask = pts[:, -1] >= layer
    lifted = np.hstack(
        [pts[mask], np.full((int(mask.sum()), 1), layer, dtype=np.int64)]
    )
    return mask, high.rank_rows(lifted)


def check_dimensional_reduction(d: int, N: int, k: int = 0, horizon=None) -> CheckReport:
    """Center-slice identity v_t^{(d)}(x, 1) = v_t^{(d-1)}(x) for all t >= 1,
    plus the terminal second-layer identity v_inf^{(d)}(x, 2) = v_inf^{(d-1)}(x)
    on x >= 2. Proven for k = 0; report-mode for k >= 1."""
    proven = k == 0
    name = "dimensional-reduction"

    def verdict(ok):
        return (PASS if ok else FAIL) if proven else (OBSERVED if ok else VIOLATED)

    hi, lo = _run(d, N, k), _run(d - 1, N, k)
    mask1, ranks1 = _layer_ranks(d, N, 1)
    lo_pts = indexer_for(CubeSpec(d - 1, N)).points()
    t_top = max(hi.t_end, lo.t_end)
    if horizon is not None:
        t_top = min(t_top, horizon)
    for t in range(1, t_top + 1):
        a = hi.at(t)[ranks1]
        b = lo.at(t)[mask1]
        if not np.array_equal(a, b):
            i = int(np.flatnonzero(a != b)[0])
            x = tuple(lo_pts[mask1][i]) + (1,)
            return CheckReport(name, d, N, k, verdict(False), (t, x, int(a[i]), int(b[i])))
    mask2, ranks2 = _layer_ranks(d, N, 2)
    a = hi.final[ranks2]
    b = lo.final[mask2]
    if not np.array_equal(a, b):
        i = int(np.flatnonzero(a != b)[0])
        x = tuple(lo_pts[mask2][i]) + (2,)
        t = max(hi.t_end, lo.t_end)
        return CheckReport(name, d, N, k, verdict(False), (t, x, int(a[i]), int(b[i])))
    return CheckReport(name, d, N, k, verdict(True))


def check_sandpile_reduction(d: int, N: int) -> CheckReport:
    """Terminal chip identity s_inf^{(d)}(x, 1) = s_inf^{(d-1)}(x) + 2 for x >= 2."""
    k = 0
    hi, lo = _run(d, N, k), _run(d - 1, N, k)
    s_hi = _engine(d, N, k).sandpile(hi.final)
    s_lo = _engine(d - 1, N, k).sandpile(lo.final)
    lo_pts = indexer_for(CubeSpec(d - 1, N)).points()
    # restrict to x >= 2 so (x, 1) stays away from the doubled center layer
    mask = lo_pts.min(axis=1) >= 2
    lifted = np.hstack([lo_pts[mask], np.ones((int(mask.sum()), 1), dtype=np.int64)])
    ranks = indexer_for(CubeSpec(d, N)).rank_rows(lifted)
    a = s_hi[ranks]
    b = s_lo[mask] + 2
    if not np.array_equal(a, b):
        i = int(np.flatnonzero(a != b)[0])
        x = tuple(lo_pts[mask][i]) + (1,)
        t = max(hi.t_end, lo.t_end)
        return CheckReport("sandpile-reduction", d, N, k, FAIL, (t, x, int(a[i]), int(b[i])))
    return CheckReport("sandpile-reduction", d, N, k, PASS)


def _window_map(spec_big: CubeSpec, j: int):
    """Ranks of the corner window x > M - j in S_M and of x - (M - j) in S_j."""
    M = spec_big.M
    big = indexer_for(spec_big)
    small = indexer_for(CubeSpec(spec_big.d, 2 * j))
    pts = big.points()
    mask = pts.min(axis=1) > M - j
    ranks_small = small.rank_rows(pts[mask] - (M - j))
    return np.flatnonzero(mask), ranks_small


def check_self_similarity(d: int, N: int, with_sandpile: bool = True) -> CheckReport:
    """Corner-window translation identity v_t^{(M)}(x) = v_t^{(j)}(x - (M-j))
    for x > M - j and t <= tau_j, plus the chip analogue one layer further in."""
    if N % 2:
        raise ValueError("self-similarity windows need an even side length")
    k = 0
    M = N // 2
    big = _run(d, N, k)
    pts = indexer_for(CubeSpec(d, N)).points()
    for j in range(1, M):
        small = _run(d, 2 * j, k)
        tau = stopping_time_of(small, j)
        big_idx, small_idx = _window_map(big.spec, j)
        for t in range(1, tau + 1):
            a = big.at(t)[big_idx]
            b = small.at(t)[small_idx]
            if not np.array_equal(a, b):
                i = int(np.flatnonzero(a != b)[0])
                x = tuple(pts[big_idx[i]])
                return CheckReport(
                    "self-similarity", d, N, k, FAIL, (t, x, int(a[i]), int(b[i])),
                    details={"j": j},
                )
        if with_sandpile and j >= 1:
            inner = pts[big_idx].min(axis=1) > M - j + 1
            eng_b, eng_s = _engine(d, N, k), _engine(d, 2 * j, k)
            for t in range(1, tau + 1):
                a = eng_b.sandpile(big.at(t))[big_idx[inner]]
                b = eng_s.sandpile(small.at(t))[small_idx[inner]]
                if not np.array_equal(a, b):
                    i = int(np.flatnonzero(a != b)[0])
                    x = tuple(pts[big_idx[inner][i]])
                    return CheckReport(
                        "self-similarity", d, N, k, FAIL, (t, x, int(a[i]), int(b[i])),
                        details={"j": j, "layer": "sandpile"},
                    )
    return CheckReport("self-similarity", d, N, k, PASS)


def _axis_pairs(d: int, sample: int, rng) -> list:
    """(I, J) index-set pairs: I nonempty, every element of J above max(I),
    and |J| <= |I|.

    The size restriction matters: the move e_I - e_J decomposes into single
    steps e_i and sorted swaps e_i - e_j (i < j) only when J is no larger
    than I, and those are exactly the elementary moves under which the
    odometer is monotone. With |J| > |I| the inequality genuinely fails,
    e.g. v_t(3,3,3) < v_t(4,2,2) at t = 35 for d = 3, N = 12.
    """
    if d <= 4:
        pairs = []
        for n in range(1, d + 1):
            for I in itertools.combinations(range(1, d + 1), n):
                rest = range(I[-1] + 1, d + 1)
                for m in range(0, min(n, len(rest)) + 1):
                    for J in itertools.combinations(rest, m):
                        pairs.append((I, J))
        return pairs
    pairs = []
    while len(pairs) < sample:
        picks = rng.integers(0, 3, size=d)  # 0 skip, 1 in I, 2 in J
        I = tuple(i + 1 for i in range(d) if picks[i] == 1)
        J = tuple(i + 1 for i in range(d) if picks[i] == 2)
        if I and len(J) <= len(I) and (not J or min(J) > max(I)):
            pairs.append((I, J))
    return pairs


def check_axis_monotonicity(traj: Trajectory, seed: int = DEFAULT_SEED) -> CheckReport:
    """v_t(x) >= v_t(x + e_I - e_J) whenever the target stays in the simplex,
    for index sets I < J as ordered blocks with |J| <= |I|. Exhaustive for
    d <= 4, sampled above."""
    spec = traj.spec
    idx = indexer_for(spec)
    pts = idx.points()
    rng = np.random.default_rng(seed)
    details = {"seed": seed} if spec.d > 4 else {}
    for t in range(1, traj.t_end + 1):
        v = traj.at(t)
        for I, J in _axis_pairs(spec.d, 1000, rng):
            delta = np.zeros(spec.d, dtype=np.int64)
            delta[[i - 1 for i in I]] = 1
            if J:
                delta[[j - 1 for j in J]] = -1
            valid, ranks = idx.try_rank_rows(pts + delta)
            bad = valid & (v < v[np.where(ranks >= 0, ranks, 0)])
            if bad.any():
                i = int(np.flatnonzero(bad)[0])
                return CheckReport(
                    "axis-monotonicity", spec.d, spec.N, traj.background, FAIL,
                    (t, tuple(pts[i]), int(v[i]), int(v[ranks[i]])), details,
                )
    return CheckReport(
        "axis-monotonicity", spec.d, spec.N, traj.background, PASS, details=details
    )


def check_derivative_bound(traj: Trajectory, k_bound=None) -> CheckReport:
    """v_t(x) - v_t(x + e_j) <= k x_j, given v_inf at the far corner <= k M."""
    spec = traj.spec
    idx = indexer_for(spec)
    pts = idx.points()
    corner = idx.rank((spec.M,) + (1,) * (spec.d - 1))
    v_corner = int(traj.final[corner])
    if k_bound is None:
        k_bound = max(1, -(-v_corner // spec.M))
    details = {"k_bound": k_bound, "corner": v_corner}
    if v_corner > k_bound * spec.M:
        return CheckReport(
            "derivative-bound", spec.d, spec.N, traj.background, SKIPPED,
            details=details,
        )
    for j in range(1, spec.d + 1):
        delta = np.zeros(spec.d, dtype=np.int64)
        delta[j - 1] = 1
        valid, ranks = idx.try_rank_rows(pts + delta)
        bound = k_bound * pts[:, j - 1]
        for t in range(0, traj.t_end + 1):
            v = traj.at(t)
            diff = v - v[np.where(ranks >= 0, ranks, 0)]
            bad = valid & (diff > bound)
            if bad.any():
                i = int(np.flatnonzero(bad)[0])
                return CheckReport(
                    "derivative-bound", spec.d, spec.N, traj.background, FAIL,
                    (t, tuple(pts[i]), int(diff[i]), int(bound[i])), details,
                )
    return CheckReport(
        "derivative-bound", spec.d, spec.N, traj.background, PASS, details=details
    )


def check_topple_limit(traj: Trajectory, js=(1, 2, 3)) -> CheckReport:
    """max_x (v_{t+j}(x) - v_t(x)) is nonincreasing in t, for each window j."""
    spec = traj.spec
    for j in js:
        prev = None
        for t in range(0, traj.t_end + 1):
            w = int((traj.at(t + j) - traj.at(t)).max())
            if prev is not None and w > prev:
                return CheckReport(
                    "topple-limit", spec.d, spec.N, traj.background, FAIL,
                    (t, (j,), w, prev),
                )
            prev = w
    return CheckReport("topple-limit", spec.d, spec.N, traj.background, PASS)


def check_least_action(
    traj: Trajectory, probes: int = 100, seed: int = DEFAULT_SEED
) -> CheckReport:
    """Space-time stabilizing constraint 2d + k + A v_{t-1} - 2d v_t <= 2d - 1
    at every (t >= 1, x), plus seeded single-cell decrement probes that must
    each break the constraint (finite minimality evidence)."""
    spec = traj.spec
    eng = _engine(spec.d, spec.N, traj.background)
    base = 2 * spec.d + traj.background
    cap = 2 * spec.d - 1

    def lhs(v_prev, v_now):
        return base + eng.A.dot(v_prev) - 2 * spec.d * v_now

    pts = indexer_for(spec).points()
    for t in range(1, traj.t_end + 1):
        vals = lhs(traj.at(t - 1), traj.at(t))
        if vals.max() > cap:
            i = int(vals.argmax())
            return CheckReport(
                "least-action", spec.d, spec.N, traj.background, FAIL,
                (t, tuple(pts[i]), int(vals[i]), cap),
            )

    rng = np.random.default_rng(seed)
    violated = 0
    for _ in range(probes):
        t = int(rng.integers(1, traj.t_end + 1))
        x = int(rng.integers(0, eng.size))
        u_t = traj.at(t).copy()
        if u_t[x] == 0:
            violated += 1  # u must stay in Z^+; decrementing 0 leaves it
            continue
        u_t[x] -= 1
        # the decremented slice must break the constraint at t or t + 1
        bad = lhs(traj.at(t - 1), u_t).max() > cap
        bad |= lhs(u_t, traj.at(t + 1)).max() > cap
        violated += bool(bad)
    return CheckReport(
        "least-action", spec.d, spec.N, traj.background, PASS,
        details={"probes": probes, "probe_violations": violated, "seed": seed},
    )


def _facet_points(spec: CubeSpec):
    """Simplex points of the form (x_i, 1, 1_j) with every x_i >= 2.

    Returns (ranks, i) where i counts the leading coordinates >= 2.
    """
    pts = indexer_for(spec).points()
    mask = pts[:, -1] == 1
    i = (pts >= 2).sum(axis=1)
    return np.flatnonzero(mask), i[mask]


def check_regularity(d: int, N: int) -> list:
    """The four regularity clauses as separate pass/fail reports."""
    if N % 2:
        raise ValueError("regularity clauses are stated for even side lengths")
    k = 0
    M = N // 2
    spec = CubeSpec(d, N)
    idx = indexer_for(spec)
    pts = idx.points()
    traj = _run(d, N, k)
    tau_M = stopping_time_of(traj, M)
    reports = []

    # Self-similarity: identical content to check_self_similarity, odometer layer.
    ss = check_self_similarity(d, N, with_sandpile=False)
    reports.append(
        CheckReport("regularity-self-similarity", d, N, k, ss.verdict,
                    ss.counterexample, ss.details)
    )

    facet, i_of = _facet_points(spec)
    # the same points with the first 1 bumped to 2
    bumped = pts[facet].copy()
    bumped[np.arange(len(facet)), i_of] = 2
    bump_rank = idx.rank_rows(bumped)

    # Weak facet compatibility: v_t(p) = v_t(q) + 1 implies p does not topple.
    name = "regularity-weak-facet"
    ce = None
    for t in range(1, traj.t_end + 1):
        v, vn = traj.at(t), traj.at(t + 1)
        hyp = v[facet] == v[bump_rank] + 1
        bad = hyp & (vn[facet] != v[facet])
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            p = facet[i]
            ce = (t, tuple(pts[p]), int(vn[p]), int(v[p]))
            break
    reports.append(CheckReport(name, d, N, k, FAIL if ce else PASS, ce))

    # Strong facet compatibility: the jump-by-two bound and the forced-topple
    # implication, in the regimes (t < tau_M, i >= 0) and (t >= tau_M, i >= 1).
    name = "regularity-strong-facet"
    ce = None
    # v at fold(p + 2 e_{i+1}), zero if the shifted point leaves the cube
    shifted = pts[facet].copy()
    shifted[np.arange(len(facet)), i_of] = 3
    inside = shifted[np.arange(len(facet)), i_of] <= M
    shift_rank = np.zeros(len(facet), dtype=np.int64)
    for a in np.flatnonzero(inside):
        shift_rank[a] = idx.rank(fold(tuple(shifted[a]), spec))
    for t in range(1, traj.t_end + 1):
        v, vn = traj.at(t), traj.at(t + 1)
        allowed = i_of >= 1 if t >= tau_M else i_of >= 0
        target = np.where(inside, v[shift_rank], 0)
        bad = allowed & (v[facet] - target > 2)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            p = facet[i]
            ce = (t, tuple(pts[p]), int(v[p] - target[i]), 2)
            break
        hyp = allowed & (v[facet] == v[bump_rank] + 1)
        bad = hyp & ((vn[facet] != v[facet]) | (vn[bump_rank] != v[bump_rank] + 1))
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            p = facet[i]
            ce = (t, tuple(pts[p]), int(vn[p]), int(v[p]))
            break
    reports.append(
        CheckReport(name, d, N, k, FAIL if ce else PASS, ce, {"tau_M": tau_M})
    )

    # Strong topple control: v_{t+2} - v_t <= 1 once t >= tau_{M-1}.
    name = "regularity-topple-control"
    ce = None
    if M >= 2:
        tau_prev = stopping_time_of(_run(d, 2 * (M - 1), k), M - 1)
    else:
        tau_prev = 0
    for t in range(tau_prev, traj.t_end + 1):
        gain = traj.at(t + 2) - traj.at(t)
        if gain.max() > 1:
            i = int(gain.argmax())
            ce = (t, tuple(pts[i]), int(gain[i]), 1)
            break
    reports.append(
        CheckReport(name, d, N, k, FAIL if ce else PASS, ce, {"tau_prev": tau_prev})
    )
    return reports


def check_second_differences(N: int, horizon=None, d: int = 2) -> CheckReport:
    """Report-mode probe: -3 <= -2 v_t(x) + v_t(x+e_i) + v_t(x-e_i) <= 2,
    folding at domain edges and zero-padding outside the cube."""
    k = 0
    spec = CubeSpec(d, N)
    idx = indexer_for(spec)
    pts = idx.points()
    traj = _run(d, N, k)
    t_top = traj.t_end if horizon is None else min(horizon, traj.t_end)

    # precompute fold targets of x +/- e_i for every simplex point
    targets = []
    for i in range(d):
        for sgn in (1, -1):
            moved = pts.copy()
            moved[:, i] += sgn
            ranks = np.zeros(len(pts), dtype=np.int64)
            inside = np.ones(len(pts), dtype=bool)
            for a in range(len(pts)):
                y = tuple(moved[a])
                if y[i] > spec.hi or y[i] < spec.lo:
                    inside[a] = False
                else:
                    ranks[a] = idx.rank(fold(y, spec))
            targets.append((i, inside, ranks))

    lo_seen, hi_seen = 0, 0
    ce = None
    for t in range(1, t_top + 1):
        v = traj.at(t)
        for i in range(d):
            up_i, up_in, up_r = targets[2 * i]
            dn_i, dn_in, dn_r = targets[2 * i + 1]
            second = (
                -2 * v
                + np.where(up_in, v[up_r], 0)
                + np.where(dn_in, v[dn_r], 0)
            )
            lo_seen = min(lo_seen, int(second.min()))
            hi_seen = max(hi_seen, int(second.max()))
            bad = (second < -3) | (second > 2)
            if ce is None and bad.any():
                a = int(np.flatnonzero(bad)[0])
                ce = (t, tuple(pts[a]), int(second[a]), i + 1)
    verdict = OBSERVED if ce is None else VIOLATED
    return CheckReport(
        "second-differences", d, N, k, verdict, ce,
        {"min": lo_seen, "max": hi_seen},
    )


def probe_table1(dims, ks, N: int) -> list:
    """Report-mode probe of the +2 center-slice identity for enriched
    backgrounds: one report per (d, k) cell. Expected observed for
    d > k + 1 and violated-observation at the critical dimension d = k + 1."""
    reports = []
    for k in ks:
        for d in dims:
            try:
                rep = check_dimensional_reduction(d, N, k)
            except BackgroundTooLargeError:
                continue
            name = "table1-probe"
            if rep.verdict in (OBSERVED, PASS):
                hi, lo = _run(d, N, k), _run(d - 1, N, k)
                s_hi = _engine(d, N, k).sandpile(hi.final)
                s_lo = _engine(d - 1, N, k).sandpile(lo.final)
                lo_pts = indexer_for(CubeSpec(d - 1, N)).points()
                mask = lo_pts.min(axis=1) >= 2
                verdict = OBSERVED
                ce = None
                if mask.any():
                    lifted = np.hstack(
                        [lo_pts[mask], np.ones((int(mask.sum()), 1), dtype=np.int64)]
                    )
                    ranks = indexer_for(CubeSpec(d, N)).rank_rows(lifted)
                    a, b = s_hi[ranks], s_lo[mask] + 2
                    if not np.array_equal(a, b):
                        i = int(np.flatnonzero(a != b)[0])
                        verdict = VIOLATED
                        ce = (hi.t_end, tuple(lo_pts[mask][i]) + (1,), int(a[i]), int(b[i]))
                reports.append(CheckReport(name, d, N, k, verdict, ce))
            else:
                reports.append(
                    CheckReport(name, d, N, k, VIOLATED, rep.counterexample)
                )
    return reports


CHECKS = {
    "dimensional-reduction": check_dimensional_reduction,
    "sandpile-reduction": check_sandpile_reduction,
    "self-similarity": check_self_similarity,
    "axis-monotonicity": check_axis_monotonicity,
    "derivative-bound": check_derivative_bound,
    "topple-limit": check_topple_limit,
    "least-action": check_least_action,
    "regularity": check_regularity,
    "second-differences": check_second_differences,
    "table1-probe": probe_table1,
}
