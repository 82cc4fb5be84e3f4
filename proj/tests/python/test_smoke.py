"""Smoke tests for the pybind11 module (small n; the statistical acceptance
lives in the C++ suite)."""

import math

import pytest

cvshot = pytest.importorskip("cvshot")


def small_params(n=5000, seed=1):
    p = cvshot.scenarios.honest_default()
    p.n_per_group = n
    p.seed = seed
    return p


def test_schedule_shape():
    sched = cvshot.build_geometric_schedule(16, 0.7, 1.0)
    assert len(sched.ratios) == 16
    assert sched.ratios[-1] == pytest.approx(1.0)
    assert sched.ratios[0] == pytest.approx(0.7 ** 15)
    assert sched.parameter_estimation_fraction() == 15.0 / 16.0
    with pytest.raises(cvshot.CvshotError):
        cvshot.build_geometric_schedule(2, 0.7, 1.0)


def test_simulation_is_deterministic():
    sched = cvshot.build_geometric_schedule(8, 0.7, 1.0)
    a = cvshot.simulate_group_stats(small_params(), sched)
    b = cvshot.simulate_group_stats(small_params(), sched)
    assert a == b
    c = cvshot.simulate_group_stats(small_params(seed=2), sched)
    assert a != c
    assert len(a) == 16  # 8 levels x 2 quadratures


def test_group_stats_follow_the_affine_law():
    p = small_params(n=50000)
    sched = cvshot.build_geometric_schedule(8, 0.7, 1.0)
    stats = cvshot.simulate_group_stats(p, sched)
    for g in stats:
        r = sched.ratios[g["atten_index"]]
        n_exp = (1 + p.v_el + r * p.eta * p.t_channel * p.eps_mod) * p.gain_v2
        tol = 6 * math.sqrt(2.0 / g["n"]) * n_exp
        assert abs(g["noise_var"] - n_exp) < tol


def test_gate_accepts_honest_and_rejects_saturation():
    p = small_params(n=60000)
    sched = cvshot.scenarios.honest_schedule()
    verdict = cvshot.gate_block(p, sched, r2_min=0.9, residual_max_snu=0.02)
    assert verdict["accepted"]
    assert verdict["x"]["reject_reasons"] == []

    sat_p = cvshot.scenarios.saturation_system(20.0)
    sat_p.n_per_group = 60000
    sat_sched = cvshot.scenarios.saturation_schedule()
    attacked = cvshot.gate_block(
        sat_p, sat_sched, intercept_resend_mu=1.0, saturation=(4.0, 4.0)
    )
    assert not attacked["accepted"]
    assert attacked["x"]["r2_noise_signal"] < 0.9


def test_projection_and_fit():
    alice = [0.1 * i - 2.0 for i in range(200)]
    bob = [2.0 * a for a in alice]
    s, n, corr = cvshot.project_signal_noise(alice, bob)
    assert n == pytest.approx(0.0, abs=1e-15)
    assert corr == pytest.approx(1.0)

    fit = cvshot.fit_affine([0.0, 1.0, 2.0, 3.0], [1.0, 3.0, 5.0, 7.0])
    assert fit["slope"] == pytest.approx(2.0)
    assert fit["intercept"] == pytest.approx(1.0)
    assert fit["r_squared"] == pytest.approx(1.0)


def test_saturation_clip():
    assert cvshot.apply_saturation(4.0, 4.0, 0.0) == 4.0
    assert cvshot.apply_saturation(4.0, 0.0, -9.0) == -4.0


def test_keyrate_reference_point():
    t = cvshot.transmission_from_length(80.5)
    va = cvshot.modulation_for_snr(0.075, t, 0.322, 0.01)
    assert va == pytest.approx(9.5, abs=0.3)
    rate = cvshot.collective_key_rate(va, t, 0.322, 0.01, 0.03, 0.948)
    assert 5e-4 < rate < 2e-3
    assert cvshot.conservative_xi_bob(2e-3, 1e-3, 0.08) == pytest.approx(2.4e-4)
    assert cvshot.estimator_sigma(500_000_000) == pytest.approx(6.32e-5, rel=1e-3)


def test_wavelength_calibration_and_hidden_slope():
    sched = cvshot.scenarios.honest_schedule()
    c0, c1, c2 = cvshot.calibrate_wavelength_masking(
        cvshot.scenarios.wavelength_masking_system(), sched
    )
    assert c0 == pytest.approx(25.0)
    assert c1 == pytest.approx(-2 * c2)
    hidden = cvshot.max_hidden_slope(2e-4, cvshot.scenarios.hidden_slope_system(), sched)
    assert 5e-4 < hidden < 2e-3
