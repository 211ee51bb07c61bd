import math

import numpy as np
import pytest

from dglattice import (
    Forcing,
    HypothesisError,
    InitialFamily,
    LatticeState,
    ModelParams,
    hausdorff_semidistance,
    identity_check,
    make_initial_family,
    run_closeness,
    run_congruence,
    run_regime_verification,
    run_tail_study,
    sample_attractor,
    tail_mass,
    unit_site,
    zeros,
)
from dglattice.lattice import l2_distance, random_state


def _neg(state):
    return LatticeState(state.offset, -state.values)


def test_family_construction_example():
    u0, v0 = make_initial_family(0.1, 1.0, 1.0, 2.0, unit_site(0, -4, 4), unit_site(1, -4, 4))
    assert u0.norm() == pytest.approx(0.1, abs=1e-13)
    assert l2_distance(u0, v0) == pytest.approx(0.001, abs=1e-15)


def test_family_zero_perturbation_is_exact():
    u0, v0 = make_initial_family(0.1, 0.0, 1.0, 1.0, unit_site(0, -4, 4), unit_site(1, -4, 4))
    assert np.array_equal(u0.values, v0.values)


def test_family_hypothesis_violation_errors():
    with pytest.raises(HypothesisError):
        make_initial_family(1.0, 10.0, 1.0, 1.0, unit_site(0), unit_site(0))


def test_family_rejects_nonunit_profile():
    with pytest.raises(ValueError):
        make_initial_family(0.1, 1.0, 1.0, 2.0, 2.0 * unit_site(0), unit_site(1, -1, 1))


@pytest.mark.parametrize(
    "builder, k, expected",
    [
        (lambda: unit_site(0), 1, 0.0),
        (lambda: 2.0 * unit_site(5), 1, 4.0),
    ],
)
def test_tail_mass_simple(builder, k, expected):
    assert tail_mass(builder(), k) == expected


def test_tail_mass_geometric_profile():
    profile = LatticeState(-40, np.array([2.0 ** (-abs(n)) for n in range(-40, 41)], complex))
    expected = (8.0 / 3.0) * (4.0**-11 - 4.0**-41)
    assert tail_mass(profile, 5) == pytest.approx(expected, rel=1e-12)


def test_tail_study_trivial_zero_data():
    report = run_tail_study(
        ModelParams.local(0, 0, 2), Forcing.zero(-8, 8), zeros(-8, 8), 4.0, 1e-6, [3, 1, 2]
    )
    assert np.all(report.tail_masses == 0.0)
    assert report.min_k_passing == 1
    assert report.time_of_entry == 0.0
    assert report.hypothesis_ok


def test_tail_study_flags_restricted_ball_violation():
    report = run_tail_study(
        ModelParams.nonlocal_(0, 0, 2),
        Forcing.single_site(0.25, 0, -16, 16),
        unit_site(0, -16, 16),  # chi0 = 1 > restricted radius 0.5
        4.0,
        1e-6,
        [1, 2, 4],
    )
    assert not report.hypothesis_ok
    assert report.note is not None


def test_tail_study_requires_dissipation():
    with pytest.raises(HypothesisError):
        run_tail_study(
            ModelParams.local(0, 0, 1.0), Forcing.zero(-4, 4), unit_site(0, -4, 4), 2.0, 1e-6, [1]
        )


def test_hausdorff_identical_and_singletons():
    cloud = [unit_site(0, -3, 3), 0.5 * unit_site(1, -3, 3)]
    assert hausdorff_semidistance(cloud, cloud) == 0.0
    p = 3.0 * unit_site(2, -3, 3)
    assert hausdorff_semidistance([zeros(-3, 3)], [p]) == pytest.approx(3.0)
    assert hausdorff_semidistance([p], [zeros(-3, 3)]) == pytest.approx(3.0)


def test_hausdorff_not_symmetric_but_contained_is_zero():
    a = [unit_site(0, -2, 2)]
    b = [unit_site(0, -2, 2), 5.0 * unit_site(1, -2, 2)]
    assert hausdorff_semidistance(a, b) == 0.0
    assert hausdorff_semidistance(b, a) == pytest.approx(math.sqrt(26.0))


def _oracle_hausdorff(cloud_a, cloud_b, n_min, n_max):
    sup = None
    for a in cloud_a:
        av = a.embedded(n_min, n_max).values
        best = None
        for b in cloud_b:
            d = b.embedded(n_min, n_max).values - av
            dist = np.sqrt(np.sum(d.real * d.real + d.imag * d.imag))
            if best is None or dist < best:
                best = dist
        if sup is None or best > sup:
            sup = best
    return float(sup)


def test_hausdorff_matches_double_loop_oracle_bitwise():
    rng = np.random.default_rng(31)
    for _ in range(25):
        na, nb = rng.integers(1, 30, size=2)
        cloud_a = [random_state(rng, -10, 10) for _ in range(na)]
        cloud_b = [random_state(rng, -10, 10) for _ in range(nb)]
        got = hausdorff_semidistance(cloud_a, cloud_b)
        assert got == _oracle_hausdorff(cloud_a, cloud_b, -10, 10)


def test_hausdorff_triangle_chain():
    rng = np.random.default_rng(37)
    for _ in range(20):
        clouds = [
            [random_state(rng, -6, 6) for _ in range(int(rng.integers(1, 8)))] for _ in range(3)
        ]
        a, b, c = clouds
        assert hausdorff_semidistance(a, c) <= (
            hausdorff_semidistance(a, b) + hausdorff_semidistance(b, c) + 1e-12
        )


def test_hausdorff_rejects_empty():
    with pytest.raises(ValueError):
        hausdorff_semidistance([], [unit_site(0)])


def test_sample_attractor_unforced_collapses_to_zero():
    seeds = [0.1 * unit_site(0, -16, 16), 0.05 * unit_site(3, -16, 16)]
    cloud = sample_attractor(
        "LDGL", ModelParams(0, 0, 2), Forcing.zero(-16, 16), seeds, 10.0, 0.5, 16.0
    )
    assert all(p.norm() <= 1e-6 for p in cloud.points)
    assert np.all(cloud.point_times > 10.0)
    assert cloud.sampling_tolerance >= 0.0


def test_sample_attractor_absorbed_into_rho_tilde_ball():
    # post-transient local-model orbits live inside the 1.1-margin absorbing ball
    n = 32
    g = Forcing.single_site(0.01, 0, -n, n)
    seeds = [0.5 * unit_site(0, -n, n), 0.3 * unit_site(2, -n, n)]
    cloud = sample_attractor("LDGL", ModelParams(0, 0, 2), g, seeds, 8.0, 0.5, 14.0)
    assert all(p.norm2() <= 0.011 for p in cloud.points)

    from dglattice import classify_regime

    seeds_v = [0.3 * unit_site(0, -n, n)]
    report = classify_regime(ModelParams(0, 0, 3), 0.01, v0_norm2=max(s.norm2() for s in seeds_v))
    cloud_v = sample_attractor("NLDGL", ModelParams(0, 0, 3), g, seeds_v, 8.0, 0.5, 14.0)
    assert all(p.norm2() <= 1.1 * report.rho_sq_nldgl for p in cloud_v.points)


def test_closeness_blowup_reported_not_raised():
    n = 8
    fam = InitialFamily(0.2, 1.0, 1.0, 2.0, unit_site(0, -n, n), unit_site(1, -n, n))
    report = run_closeness(
        fam, ModelParams(0, 0, 2), Forcing.zero(-n, n), 5.0, blowup_threshold=1e-4
    )
    assert report.diagnostic is not None
    assert not report.passed


def test_sample_attractor_restricted_ball_enforced():
    with pytest.raises(HypothesisError):
        sample_attractor(
            "NLDGL",
            ModelParams(0, 0, 2),
            Forcing.single_site(0.2, 0, -8, 8),
            [unit_site(0, -8, 8)],  # chi0 = 1 >= restricted radius 0.5
            4.0,
            0.5,
            8.0,
        )


def test_sample_attractor_warns_on_short_transient():
    with pytest.warns(UserWarning):
        sample_attractor(
            "LDGL",
            ModelParams(0, 0, 2),
            Forcing.single_site(0.04, 0, -12, 12),
            [0.8 * unit_site(0, -12, 12)],
            0.5,
            0.5,
            8.0,
        )


def test_congruence_unforced_distance_vanishes():
    n = 32
    phi = unit_site(0, -n, n)
    template = InitialFamily(1.0, 1.0, 1.0, 1.0, phi, _neg(phi))
    result = run_congruence(
        ModelParams(0, 0, 2),
        Forcing.zero(-n, n),
        [0.2, 0.1],
        template,
        (8.0, 0.5, 12.0),
    )
    assert all(d <= 1e-6 for d in result.distances)


def test_congruence_checks_restricted_ball():
    n = 16
    phi = unit_site(0, -n, n)
    template = InitialFamily(1.0, 1.0, 1.0, 1.0, phi, _neg(phi))
    with pytest.raises(HypothesisError):
        run_congruence(
            ModelParams(0, 0, 2),  # restricted radius 0.5
            Forcing.zero(-n, n),
            [0.9],
            template,
            (4.0, 0.5, 8.0),
        )


def test_closeness_zero_family_is_exact():
    n = 16
    fam = InitialFamily(0.0, 0.0, 1.0, 1.0, unit_site(0, -n, n), unit_site(1, -n, n))
    report = run_closeness(fam, ModelParams(0, 0, 2), Forcing.zero(-n, n), 5.0)
    assert report.sup_distance_l2 == 0.0
    assert report.passed


def test_closeness_linf_below_l2():
    n = 32
    fam = InitialFamily(0.2, 1.0, 1.0, 2.0, unit_site(0, -n, n), unit_site(1, -n, n))
    report = run_closeness(fam, ModelParams(0.3, 0.5, 2), Forcing.single_site(0.01, 0, -n, n), 20.0)
    assert report.sup_distance_linf <= report.sup_distance_l2 * (1 + 1e-15)
    assert report.tail_window_limsup <= report.sup_distance_l2
    assert report.passed


def test_closeness_threads_reproduce_serial():
    n = 24
    fam = InitialFamily(0.1, 1.0, 1.0, 2.0, unit_site(0, -n, n), unit_site(1, -n, n))
    p = ModelParams(0, 0.4, 1.8)
    g = Forcing.single_site(0.005, 1, -n, n)
    serial = run_closeness(fam, p, g, 10.0, threads=1)
    threaded = run_closeness(fam, p, g, 10.0, threads=2)
    assert np.array_equal(serial.dist_l2, threaded.dist_l2)


def test_regime_verification_unforced_decay():
    n = 16
    report = run_regime_verification(
        ModelParams(0, 0, 2), Forcing.zero(-n, n), [0.09, 0.3], horizon=15.0
    )
    # zero forcing: supercritical with r2 = 0, chi decays to 0
    assert report.case_label == "SupercriticalAnnulus"
    assert report.r2 == 0.0
    for pt in report.points:
        assert pt.riccati_envelope_ok
        assert pt.bernoulli_envelope_ok
        assert pt.monotone_nonincreasing
        assert pt.terminal_chi <= 1e-8


def test_regime_verification_fixed_point_start():
    # seeding the comparison equation at its lower root keeps it there
    n = 16
    p = ModelParams(0, 0, 3)
    g = Forcing.single_site(0.1, 0, -n, n)
    from dglattice import classify_regime, integrate_riccati, riccati_constants

    rc = riccati_constants(p, g.norm2)
    r2 = classify_regime(p, g.norm2).r2
    env = integrate_riccati((rc.a, rc.b, rc.c), r2, 10.0)
    assert np.all(np.abs(env.w - r2) <= 1e-8)
    report = run_regime_verification(p, g, [r2], horizon=10.0)
    assert report.points[0].riccati_envelope_ok


def test_identity_check_battery():
    data = identity_check(half_width=32, num_states=40, seed=1)
    assert data["self_adjoint_residual"] <= 1e-12
    assert data["negativity_residual"] <= 1e-12
    assert data["operator_norm_ratio"] <= 4.0 + 1e-12
    assert data["embedding_linf_excess"] <= 1e-15
    assert data["embedding_l4_excess"] <= 1e-15
    assert data["balance_residual_local"] <= 1e-10
    assert data["balance_residual_nonlocal"] <= 1e-10
    assert data["lipschitz_ratio"] <= 1.0 + 1e-12
    assert data["alternating_ratio"] > 3.9


def test_window_doubling_leaves_compact_run_unchanged():
    def closeness_sup(n):
        fam = InitialFamily(0.1, 1.0, 1.0, 2.0, unit_site(0, -n, n), unit_site(1, -n, n))
        rep = run_closeness(
            fam, ModelParams(0, 0, 2), Forcing.single_site(0.01, 0, -n, n), 10.0
        )
        return rep.sup_distance_l2

    assert abs(closeness_sup(64) - closeness_sup(128)) < 1e-6
