from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from estimator import EkfConfig, EstimatorState, predict, update_gps, update_heading
from navsim.navsim_error import SingularInnovationError
from utils import wrap_angle
from vehicle import ControlInput, VehicleState, step, steady_state_throttle


def _diag_state(q: VehicleState, diag) -> EstimatorState:
    return EstimatorState(q_hat=q, P=np.diag(np.asarray(diag, dtype=float)))


def test_covariance_stays_symmetric_psd(params, ekf_config):
    rng = np.random.default_rng(17)
    truth = VehicleState(0.0, 0.0, 0.0, 1.0)
    est = ekf_config.initial_state(truth)
    for _ in range(10_000):
        u = ControlInput(alpha=float(rng.uniform(0.05, 0.2)), delta=float(rng.uniform(-params.delta_max, params.delta_max)))
        truth = step(truth, u, 0.1, params)
        est = predict(est, u, 0.1, params, ekf_config)
        prior_trace = np.trace(est.P)
        est = update_gps(est, (truth.x + rng.normal(0.0, 0.8), truth.y + rng.normal(0.0, 0.8)), ekf_config)
        assert np.trace(est.P) <= prior_trace + 1e-12 * prior_trace
        prior_trace = np.trace(est.P)
        est = update_heading(est, wrap_angle(truth.theta + rng.normal(0.0, 0.02)), ekf_config)
        assert np.trace(est.P) <= prior_trace + 1e-12 * prior_trace
        assert np.array_equal(est.P, est.P.T)
        assert np.linalg.eigvalsh(est.P).min() >= -1e-9
        assert est.q_hat.v >= 0.0


def test_gps_update_matches_scalar_kalman(ekf_config):
    prior = _diag_state(VehicleState(1.0, 2.0, 0.3, 1.0), [0.5, 0.2, 0.1, 0.1])
    post = update_gps(prior, (1.4, 1.0), ekf_config)
    r_x, r_y = ekf_config.R_gps[0, 0], ekf_config.R_gps[1, 1]
    assert post.q_hat.x == pytest.approx(1.0 + 0.5 / (0.5 + r_x) * 0.4, abs=1e-9)
    assert post.q_hat.y == pytest.approx(2.0 + 0.2 / (0.2 + r_y) * -1.0, abs=1e-9)
    assert post.P[0, 0] == pytest.approx(0.5 * r_x / (0.5 + r_x), abs=1e-9)
    assert post.P[1, 1] == pytest.approx(0.2 * r_y / (0.2 + r_y), abs=1e-9)
    assert post.q_hat.theta == pytest.approx(0.3, abs=1e-12)
    assert post.P[3, 3] == pytest.approx(0.1, abs=1e-12)


def test_gps_update_with_untrusted_fix_barely_moves(ekf_config):
    prior = _diag_state(VehicleState(1.0, 2.0, 0.3, 1.0), [0.5, 0.5, 0.1, 0.1])
    deaf = replace(ekf_config, R_gps=1e12 * np.eye(2))
    post = update_gps(prior, (6.0, -3.0), deaf)
    assert post.q_hat.as_array() == pytest.approx(prior.q_hat.as_array(), abs=1e-6)


def test_gps_update_with_certain_prior_keeps_estimate(ekf_config):
    prior = _diag_state(VehicleState(1.0, 2.0, 0.3, 1.0), [0.0, 0.0, 0.0, 0.0])
    post = update_gps(prior, (6.0, -3.0), ekf_config)
    assert post.q_hat == prior.q_hat
    assert np.array_equal(post.P, np.zeros((4, 4)))


def test_predict_mean_is_the_plant_step(params, ekf_config):
    rng = np.random.default_rng(5)
    for _ in range(200):
        q = VehicleState(
            float(rng.uniform(-10.0, 10.0)),
            float(rng.uniform(-10.0, 10.0)),
            float(rng.uniform(-math.pi, math.pi)),
            float(rng.uniform(0.0, 3.0)),
        )
        u = ControlInput(alpha=float(rng.uniform(0.0, 1.0)), delta=float(rng.uniform(-params.delta_max, params.delta_max)))
        est = ekf_config.initial_state(q)
        assert predict(est, u, 0.1, params, ekf_config).q_hat == step(q, u, 0.1, params)


def test_heading_update_matches_scalar_kalman(ekf_config):
    prior = _diag_state(VehicleState(0.0, 0.0, 0.3, 1.0), [0.1, 0.1, 0.01, 0.1])
    post = update_heading(prior, 0.5, ekf_config)
    gain = 0.01 / (0.01 + ekf_config.R_mag)
    assert post.q_hat.theta == pytest.approx(0.3 + gain * 0.2, abs=1e-9)
    assert post.P[2, 2] == pytest.approx(0.01 * ekf_config.R_mag / (0.01 + ekf_config.R_mag), abs=1e-9)
    assert post.q_hat.x == pytest.approx(0.0, abs=1e-12)


def test_heading_innovation_is_wrapped(ekf_config):
    prior = _diag_state(VehicleState(0.0, 0.0, 3.1, 1.0), [0.1, 0.1, 0.01, 0.1])
    post = update_heading(prior, -3.1, ekf_config)
    moved = wrap_angle(post.q_hat.theta - 3.1)
    assert 0.0 < moved < wrap_angle(-3.1 - 3.1)
    assert -math.pi < post.q_hat.theta <= math.pi


def test_noiseless_system_is_tracked_exactly(params, ekf_config):
    truth = VehicleState(0.0, 0.0, 0.0, 1.0)
    est = ekf_config.initial_state(truth)
    u = ControlInput(alpha=steady_state_throttle(1.0, params), delta=0.2)
    for _ in range(1000):
        truth = step(truth, u, 0.1, params)
        est = predict(est, u, 0.1, params, ekf_config)
        est = update_gps(est, (truth.x, truth.y), ekf_config)
        est = update_heading(est, truth.theta, ekf_config)
        assert est.q_hat.as_array() == pytest.approx(truth.as_array(), abs=1e-9)


def test_predict_adds_process_noise(params, ekf_config):
    est = _diag_state(VehicleState(0.0, 0.0, 0.0, 0.0), [0.0, 0.0, 0.0, 0.0])
    predicted = predict(est, ControlInput(0.0, 0.0), 0.1, params, ekf_config)
    assert np.allclose(predicted.P, ekf_config.Q_process)
    assert predicted.q_hat == est.q_hat


def test_speed_is_clamped_after_correction(ekf_config):
    P = np.diag([1.0, 1.0, 0.1, 1.0])
    P[0, 3] = P[3, 0] = 0.9
    prior = EstimatorState(q_hat=VehicleState(0.0, 0.0, 0.0, 0.05), P=P)
    post = update_gps(prior, (-10.0, 0.0), ekf_config)
    assert post.q_hat.v == 0.0


def test_singular_innovation_is_reported(ekf_config):
    zero = EkfConfig(Q_process=np.zeros((4, 4)), R_gps=np.zeros((2, 2)), R_mag=0.0, P0=np.zeros((4, 4)))
    prior = zero.initial_state(VehicleState(0.0, 0.0, 0.0, 1.0))
    with pytest.raises(SingularInnovationError):
        update_gps(prior, (0.1, 0.0), zero)
    with pytest.raises(SingularInnovationError):
        update_heading(prior, 0.1, zero)


def test_config_validation_and_mapping(payload, ekf_config):
    assert np.array_equal(
        EkfConfig.from_mapping(payload["scenario"]["estimator"]).Q_process, ekf_config.Q_process
    )
    with pytest.raises(ValueError):
        EkfConfig(Q_process=-np.eye(4), R_gps=np.eye(2), R_mag=0.1, P0=np.eye(4))
    with pytest.raises(ValueError):
        EkfConfig(Q_process=np.eye(3), R_gps=np.eye(2), R_mag=0.1, P0=np.eye(4))
    with pytest.raises(ValueError):
        EstimatorState(q_hat=VehicleState(0.0, 0.0, 0.0, 0.0), P=np.full((4, 4), np.nan))
