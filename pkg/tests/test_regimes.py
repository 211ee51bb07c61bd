import math

import numpy as np
import pytest

from dglattice import (
    CRITICAL,
    SUBCRITICAL_FORCING,
    SUPERCRITICAL_ANNULUS,
    HypothesisError,
    ModelParams,
    bernoulli_envelope,
    classify_regime,
    closeness_constants,
    ldgl_gronwall_bound,
    nldgl_restricted_bound,
    riccati_constants,
)


def test_constants_annulus_point():
    rc = riccati_constants(ModelParams(0, 0, 3), 0.1)
    assert (rc.a, rc.b, rc.c) == (2.0, 2.0, 0.05)
    assert rc.d == pytest.approx(3.6, abs=1e-15)
    assert rc.k == pytest.approx(math.sqrt(3.6), rel=1e-15)


def test_constants_subcritical_point():
    rc = riccati_constants(ModelParams(0, 0, 2), 1.0)
    assert (rc.a, rc.b, rc.c, rc.d) == (1.0, 2.0, 1.0, -7.0)
    assert rc.k is None


def test_constants_zero_forcing():
    rc = riccati_constants(ModelParams(0, math.sqrt(3.0), 2), 0.0)
    assert rc.b == pytest.approx(4.0, rel=1e-15)
    assert rc.c == 0.0
    assert rc.d == pytest.approx(1.0, rel=1e-15)
    assert rc.k == pytest.approx(1.0, rel=1e-15)


def test_constants_require_dissipation():
    with pytest.raises(HypothesisError):
        riccati_constants(ModelParams(0, 0, 1.0), 0.1)


def test_classify_annulus_roots():
    report = classify_regime(ModelParams(0, 0, 3), 0.1)
    assert report.case_label == SUPERCRITICAL_ANNULUS
    assert report.r1 == pytest.approx(0.974342, abs=1e-6)
    assert report.r2 == pytest.approx(0.025658, abs=1e-6)
    assert report.restricted_radius_sq == pytest.approx(1.0, rel=1e-15)


def test_classify_case_boundary_is_exact():
    # threshold forcing norm for delta=3, beta=0 is exactly 1
    assert classify_regime(ModelParams(0, 0, 3), 1.0).case_label == CRITICAL
    assert classify_regime(ModelParams(0, 0, 3), 1.0 - 1e-9).case_label == SUPERCRITICAL_ANNULUS
    assert classify_regime(ModelParams(0, 0, 3), 1.0 + 1e-9).case_label == SUBCRITICAL_FORCING


def test_classify_vieta_and_root_ordering():
    rng = np.random.default_rng(23)
    for _ in range(200):
        delta = 1.2 + 3 * rng.random()
        beta = 2 * rng.random()
        threshold = (delta - 1) ** 3 / (8 * math.sqrt(1 + beta**2))
        g2 = threshold * rng.random() * 0.98
        report = classify_regime(ModelParams(0, beta, delta), g2)
        assert report.case_label == SUPERCRITICAL_ANNULUS
        rc = report.constants
        assert abs(report.r1 + report.r2 - rc.a / rc.b) <= 1e-12
        assert abs(report.r1 * report.r2 - rc.c / rc.b) <= 1e-12
        assert report.r2 < rc.a / (2 * rc.b) < report.r1


def test_classify_subcritical_has_no_roots():
    report = classify_regime(ModelParams(0, 0, 2), 1.0)
    assert report.case_label == SUBCRITICAL_FORCING
    assert report.r1 is None and report.r2 is None


def test_restricted_ball_fields_presence():
    p = ModelParams(0, 0, 3)
    inside = classify_regime(p, 0.1, v0_norm2=0.5)
    assert inside.delta0 == pytest.approx(2.0 - 2.0 * 0.5)
    assert inside.rho_sq_nldgl == pytest.approx(0.1 / (inside.delta0 * 2.0))
    outside = classify_regime(p, 0.1, v0_norm2=1.5)
    assert outside.delta0 is None and outside.rho_sq_nldgl is None


def test_entry_time_local_example():
    report = classify_regime(
        ModelParams.local(0, 0, 2), 1.0, capture_radius=2.0, absorb_margin=2.0
    )
    assert report.rho_sq_ldgl == pytest.approx(1.0)
    assert report.entry_time == pytest.approx(math.log(3.0), rel=1e-12)


def test_entry_time_inside_ball_is_zero():
    report = classify_regime(
        ModelParams.local(0, 0, 2), 1.0, capture_radius=1.0, absorb_margin=2.0
    )
    assert report.entry_time == 0.0


def test_nonescape_radii_both_variants():
    report = classify_regime(ModelParams.local(0, 0, 2), 0.5, capture_radius=2.0)
    assert report.nonescape_rho1 == pytest.approx(2.0 * 16 + 0.5)
    assert report.nonescape_r0_sq_printed == pytest.approx(32.5 * 0.5)
    assert report.nonescape_r0_sq_alt == pytest.approx(32.5)


def test_classify_rejects_bad_margin():
    with pytest.raises(HypothesisError):
        classify_regime(ModelParams(0, 0, 2), 0.1, absorb_margin=1.0)


def test_closeness_constants_dissipative():
    cc = closeness_constants(ModelParams(0, 0, 2), 1, 1, 1)
    assert cc.c_uniform == pytest.approx(3.0)
    assert cc.c_limsup == pytest.approx(2.0)
    assert cc.c_finite_horizon is None


def test_closeness_constants_marginal():
    cc = closeness_constants(ModelParams(0, 0, 1), 1, 1, 1, t_final=1.0)
    assert cc.c_finite_horizon == pytest.approx(5.0)


def test_closeness_constants_gain():
    cc = closeness_constants(ModelParams(0, 0, 0.5), 1, 1, 1, t_final=1.0)
    assert cc.c_finite_horizon == pytest.approx(9.5914, abs=1e-3)


def test_closeness_constants_need_t_final_without_dissipation():
    with pytest.raises(HypothesisError):
        closeness_constants(ModelParams(0, 0, 0.9), 1, 1, 1)


def test_closeness_constant_monotone_in_delta():
    deltas = np.linspace(1.1, 6.0, 40)
    values = [closeness_constants(ModelParams(0, 0.5, d), 1, 1, 1).c_uniform for d in deltas]
    assert np.all(np.diff(values) <= 0)


def test_gronwall_bound_endpoints():
    assert ldgl_gronwall_bound(4.0, 2.0, 1.0, 0.0) == 4.0
    assert ldgl_gronwall_bound(4.0, 2.0, 1.0, 1e3) == pytest.approx(1.0)
    assert nldgl_restricted_bound(0.1, ModelParams(0, 0, 3), 0.1, 0.0) == pytest.approx(0.1)


def test_bernoulli_envelope_shape():
    rc = riccati_constants(ModelParams(0, 0, 3), 0.1)
    t = np.linspace(0, 40, 200)
    env = bernoulli_envelope(0.5, rc, t)
    assert env[0] == pytest.approx(0.5, rel=1e-12)
    assert np.all(np.diff(env) <= 0)
    assert env[10] < env[0]
    r2 = (rc.a - math.sqrt(rc.d)) / (2 * rc.b)
    assert env[-1] == pytest.approx(r2, rel=1e-9)
    with pytest.raises(HypothesisError):
        bernoulli_envelope(0.01, rc, t)  # below r2
    with pytest.raises(HypothesisError):
        bernoulli_envelope(2.0, rc, t)  # above r1
