import math

import numpy as np
import pytest

from dglattice import (
    Forcing,
    LatticeState,
    ModelParams,
    StepUnderflowError,
    integrate_adaptive,
    integrate_riccati,
    random_state,
    rk4_reference,
    unit_site,
    zeros,
)
from dglattice.lattice import l2_distance
from dglattice.regimes import riccati_constants


def test_zero_solution_stays_zero():
    traj = integrate_adaptive(zeros(-8, 8), ModelParams(1, 1, 0.5, 1, 0), Forcing.zero(-8, 8), 10.0)
    assert np.all(traj.chi == 0.0)
    assert traj.blowup_time is None


def test_trajectory_sampling_layout():
    traj = integrate_adaptive(
        0.1 * unit_site(0, -8, 8),
        ModelParams(0, 0, 2),
        Forcing.zero(-8, 8),
        3.0,
        sample_stride=0.5,
        snapshot_every=2,
    )
    assert np.all(np.diff(traj.times) > 0)
    assert np.all(traj.chi >= 0)
    assert traj.times[0] == 0.0 and traj.times[-1] == pytest.approx(3.0)
    assert np.array_equal(traj.snapshot_times, traj.times[::2])
    assert len(traj.snapshots) == len(traj.snapshot_times)


def test_unforced_decay_obeys_exponential_bound():
    # loss-dominated local model: chi(t) <= chi(0) exp(-(delta-1) t)
    traj = integrate_adaptive(
        0.1 * unit_site(0, -32, 32), ModelParams.local(0, 0, 2), Forcing.zero(-32, 32), 20.0
    )
    bound = 0.01 * np.exp(-traj.times)
    assert np.all(traj.chi <= bound * (1 + 1e-9))


def test_adaptive_matches_rk4_reference():
    initial = 0.1 * unit_site(0, -16, 16)
    params = ModelParams.local(0.4, 0.8, 2)
    forcing = Forcing.single_site(0.04, 1, -16, 16)
    fine = integrate_adaptive(
        initial, params, forcing, 2.0, tolerances=(1e-10, 1e-8), sample_stride=1.0, snapshot_every=1
    )
    ref = rk4_reference(initial, params, forcing, 2.0, dt=1e-4, sample_stride=1.0, snapshot_every=1)
    assert l2_distance(fine.snapshots[-1], ref.snapshots[-1]) <= 1e-8


def test_self_convergence_under_tolerance_tightening():
    initial = 0.3 * unit_site(0, -24, 24)
    params = ModelParams(0.5, 1.0, 1.5, 0.7, 0.3)
    forcing = Forcing.single_site(0.01, 0, -24, 24)
    coarse = integrate_adaptive(
        initial, params, forcing, 5.0, tolerances=(1e-8, 1e-6), sample_stride=1.0, snapshot_every=1
    )
    fine = integrate_adaptive(
        initial, params, forcing, 5.0, tolerances=(1e-10, 1e-8), sample_stride=1.0, snapshot_every=1
    )
    assert l2_distance(coarse.snapshots[-1], fine.snapshots[-1]) <= 1e-6
    assert np.max(np.abs(coarse.chi - fine.chi)) <= 1e-6


def test_bitwise_determinism():
    initial = random_state(np.random.default_rng(2), -20, 20, scale=0.2)
    params = ModelParams(0.3, 0.9, 1.7, 0.5, 0.5)
    forcing = Forcing.single_site(0.02, 2, -20, 20)
    a = integrate_adaptive(initial, params, forcing, 8.0, snapshot_every=1)
    b = integrate_adaptive(initial, params, forcing, 8.0, snapshot_every=1)
    assert np.array_equal(a.chi, b.chi)
    assert all(
        np.array_equal(x.values, y.values) for x, y in zip(a.snapshots, b.snapshots)
    )


def test_pure_diffusion_is_nonincreasing():
    traj = integrate_adaptive(
        random_state(np.random.default_rng(8), -16, 16),
        ModelParams(0, 0, 1, 0, 0),
        Forcing.zero(-16, 16),
        5.0,
        sample_stride=0.1,
    )
    assert np.all(np.diff(traj.chi) <= 1e-12)


def test_lattice_blowup_detection():
    # gain plus a focusing quartic pumps the norm past the threshold
    traj = integrate_adaptive(
        2.0 * unit_site(0, -3, 3),
        ModelParams(0, 0, 0, -1, 0),
        Forcing.zero(-3, 3),
        10.0,
        sample_stride=0.05,
    )
    assert traj.blowup_time is not None
    assert traj.chi[-1] <= 1e8 * 1.01 or traj.times[-1] < 10.0


def test_step_underflow_raises():
    with pytest.raises(StepUnderflowError):
        integrate_adaptive(
            unit_site(0, -4, 4),
            ModelParams(0, 0, 2),
            Forcing.zero(-4, 4),
            1.0,
            tolerances=(1e-300, 1e-300),
        )


def test_riccati_exponential_closed_form():
    traj = integrate_riccati((1.0, 0.0, 0.0), 1.0, 1.0, sample_stride=0.25)
    assert traj.w[0] == 1.0
    assert traj.w[-1] == pytest.approx(math.exp(-1.0), abs=1e-6)
    assert traj.blowup_time is None


def test_riccati_blowup_closed_form():
    # w' = w^2 from 1 blows up at t = 1
    traj = integrate_riccati((0.0, 1.0, 0.0), 1.0, 2.0, sample_stride=0.01)
    assert traj.blowup_time == pytest.approx(1.0, abs=0.01)
    assert traj.times[-1] < 1.0


def test_riccati_decay_to_lower_root():
    traj = integrate_riccati((2.0, 2.0, 0.05), 0.5, 20.0, sample_stride=0.5)
    # decreasing up to the solver tolerance once the fixed point is reached
    assert np.all(np.diff(traj.w) <= 1e-9)
    assert traj.w[4] < traj.w[0]
    assert traj.w[-1] == pytest.approx(0.025658, abs=1e-4)


def test_riccati_comparison_dominates_lattice_norm():
    params = ModelParams.nonlocal_(0.2, 0.5, 2.2)
    forcing = Forcing.single_site(0.3, 0, -32, 32)
    initial = 0.4 * unit_site(0, -32, 32)
    traj = integrate_adaptive(initial, params, forcing, 10.0, sample_stride=0.1)
    rc = riccati_constants(params, forcing.norm2)
    env = integrate_riccati(
        (rc.a, rc.b, rc.c), float(traj.chi[0]), 10.0, sample_times=traj.times
    )
    m = min(len(env.w), len(traj.chi))
    assert np.all(traj.chi[:m] <= env.w[:m] * (1 + 1e-6))


def test_rk4_blowup_detection():
    traj = rk4_reference(
        2.0 * unit_site(0, -3, 3), ModelParams(0, 0, 0, -1, 0), Forcing.zero(-3, 3), 10.0, dt=1e-3
    )
    assert traj.blowup_time is not None
