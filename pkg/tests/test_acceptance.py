"""End-to-end acceptance battery: one test per deliverable guarantee.

Each test prints as a single pass/fail line under `pytest -v`.
"""

import os
import subprocess
import sys
import time

import numpy as np
import pytest

from sandcube.checkpoint import load_checkpoint, save_checkpoint
from sandcube.engine_ref import constant_sandpile, stabilize_full
from sandcube.engine_sym import run_stride1, stabilize_sym
from sandcube.lattice import CubeSpec, indexer_for
from sandcube.radial import closed_form_check, m1_critical_check, radial_run, radial_to_simplex
from sandcube.render import unfold
from sandcube.report import OBSERVED, PASS, VIOLATED
from sandcube.verify import (
    check_axis_monotonicity,
    check_derivative_bound,
    check_dimensional_reduction,
    check_least_action,
    check_regularity,
    check_sandpile_reduction,
    check_second_differences,
    check_self_similarity,
    check_topple_limit,
    probe_table1,
)


def test_01_symmetric_engine_matches_full_cube_reference():
    # exact odometer equality at every step, all small cubes of both parities
    for d in (1, 2, 3):
        for N in range(2, 11):
            spec = CubeSpec(d, N)
            sym = run_stride1(spec)
            full_traj, _, stabilized = stabilize_full(
                constant_sandpile(spec, 2 * d), spec
            )
            assert stabilized and sym.stabilized_at is not None
            T = max(sym.t_end, len(full_traj) - 1)
            for t in range(T + 1):
                v_s = sym.at(t)
                v_f = full_traj[min(t, len(full_traj) - 1)]
                assert np.array_equal(unfold(v_s, spec), v_f), (d, N, t)


def test_02_dimensional_reduction_identity():
    cases = [(d, N) for d in (2, 3, 4) for N in (4, 6, 8)] + [(3, 12)]
    for d, N in cases:
        rep = check_dimensional_reduction(d, N)
        assert rep.verdict == PASS, rep.line()


def test_03_sandpile_reduction_identity():
    cases = [(d, N) for d in (2, 3, 4) for N in (4, 6, 8)] + [(3, 12)]
    for d, N in cases:
        rep = check_sandpile_reduction(d, N)
        assert rep.verdict == PASS, rep.line()


def test_04_corner_window_self_similarity():
    for d in (1, 2, 3):
        for N in (6, 8, 12):
            rep = check_self_similarity(d, N)
            assert rep.verdict == PASS, rep.line()


def test_05_one_dimensional_closed_form():
    # v_inf(x) = (M(M+1) - x(x-1)) / 2 on the folded half-interval
    for M in range(1, 51):
        spec = CubeSpec(1, 2 * M)
        traj = stabilize_sym(spec, snapshot_stride=0)
        assert traj.stabilized_at is not None
        x = np.arange(1, M + 1)
        expect = (M * (M + 1) - x * (x - 1)) // 2
        pts = indexer_for(spec).points()[:, 0]
        assert np.array_equal(traj.final[np.argsort(pts)], expect), M


def test_06_radial_solutions_and_critical_background():
    for d in (1, 2, 5, 10, 100, 1000):
        rep = closed_form_check(d)
        assert rep.verdict == PASS, rep.line()
    for d in range(1, 9):
        r = radial_run(d)
        s = run_stride1(CubeSpec(d, 4), d - 1)
        idxmap = radial_to_simplex(d)
        assert len(r) - 1 == s.t_end
        for t in range(len(r)):
            assert np.array_equal(r[t], s.at(t)[idxmap]), (d, t)
    for d0 in range(2, 9):
        assert m1_critical_check(d0) == (1, 2), d0


def test_07_trajectory_invariants_monotonicity_bounds_least_action():
    for d in (1, 2, 3):
        for N in range(2, 13):
            traj = run_stride1(CubeSpec(d, N))
            for check in (
                check_axis_monotonicity,
                check_derivative_bound,
                check_topple_limit,
                check_least_action,
            ):
                rep = check(traj)
                assert rep.verdict == PASS, rep.line()


def test_08_regularity_clauses():
    for d in (1, 2, 3):
        for N in (4, 6, 8):
            for rep in check_regularity(d, N):
                assert rep.verdict == PASS, rep.line()


def test_09_conjecture_probes_report_expected_observations():
    for N in (16, 64):
        rep = check_second_differences(N)
        assert rep.verdict == OBSERVED, rep.line()
        assert -3 <= rep.details["min"] and rep.details["max"] <= 2, rep.details
    for k in (1, 2):
        above = probe_table1([d for d in range(k + 2, k + 5)], [k], 8)
        assert above and all(r.verdict == OBSERVED for r in above), k
        (critical,) = probe_table1([k + 1], [k], 2)
        assert critical.verdict == VIOLATED, critical.line()


def test_10_performance_memory_and_determinism(tmp_path):
    spec = CubeSpec(6, 16)
    t0 = time.monotonic()
    traj = stabilize_sym(spec, snapshot_stride=0)
    elapsed = time.monotonic() - t0
    assert traj.stabilized_at is not None
    assert elapsed < 10.0, f"took {elapsed:.1f}s"
    assert traj.stats["working_bytes"] <= 1.5 * traj.stats["payload_bytes"]

    # bit-identical final odometer for any thread count
    code = (
        "import numpy as np\n"
        "from sandcube.lattice import CubeSpec\n"
        "from sandcube.engine_sym import stabilize_sym\n"
        "t = stabilize_sym(CubeSpec(6, 16), snapshot_stride=0)\n"
        "np.save(r'%s', t.final)\n"
    )
    finals = []
    for threads in ("1", "2", "8"):
        path = tmp_path / f"v{threads}.npy"
        env = dict(os.environ, SANDCUBE_THREADS=threads)
        subprocess.run([sys.executable, "-c", code % path], env=env, check=True)
        finals.append(np.load(path))
    assert np.array_equal(finals[0], finals[1])
    assert np.array_equal(finals[0], finals[2])
    assert np.array_equal(finals[0], traj.final)

    # save mid-run, resume, and land on the same fixed point
    head = stabilize_sym(spec, t_max=4, snapshot_stride=0)
    ck_path = tmp_path / "mid.bin"
    save_checkpoint(ck_path, spec, 0, 4, head.final)
    ck = load_checkpoint(ck_path)
    tail = stabilize_sym(spec, v0=ck.v, t0=ck.t, snapshot_stride=0)
    assert tail.stabilized_at == traj.stabilized_at
    assert np.array_equal(tail.final, traj.final)
