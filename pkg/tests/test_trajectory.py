import numpy as np
import pytest

from modrotor.trajectory import (
    HELIX_PERIOD,
    TrajectorySample,
    helix,
    hover,
    rectangle,
    rectangle_fixed_attitude,
    rectangle_period,
)


def finite_difference_check(traj, times, tol=1e-5, h=1e-4):
    """Central differences of r_d must reproduce v_d and a_d."""
    for t in times:
        if t < h:
            continue
        s = traj(t)
        before, after = traj(t - h), traj(t + h)
        v_fd = (after.r_d - before.r_d) / (2 * h)
        a_fd = (after.r_d - 2 * s.r_d + before.r_d) / h**2
        np.testing.assert_allclose(s.v_d, v_fd, atol=tol)
        np.testing.assert_allclose(s.a_d, a_fd, atol=tol)


def test_helix_start_point():
    s = helix(0.0)
    np.testing.assert_allclose(s.r_d, [-0.05, 0.0, 0.45], atol=1e-15)
    assert s.yaw_d == 0.0


def test_helix_radius_constant():
    for t in np.linspace(0, 40, 200):
        s = helix(t)
        radius = np.hypot(s.r_d[0] + 0.5, s.r_d[1])
        assert abs(radius - 0.45) < 1e-12


def test_helix_altitude_band_and_period():
    times = np.linspace(0, 28, 400)
    zs = np.array([helix(t).r_d[2] for t in times])
    assert zs.min() >= 0.45 - 1e-12 and zs.max() <= 0.95 + 1e-12
    for t in np.linspace(0, 14, 50):
        assert abs(helix(t + HELIX_PERIOD).r_d[2] - helix(t).r_d[2]) < 1e-12


def test_helix_yaw_rate_matches_omega_d():
    s = helix(3.0)
    np.testing.assert_allclose(s.omega_d, [0, 0, 2 * np.pi / 14], atol=1e-15)
    h = 1e-5
    yaw_rate = (helix(3.0 + h).yaw_d - helix(3.0 - h).yaw_d) / (2 * h)
    assert abs(yaw_rate - 2 * np.pi / 14) < 1e-8


def test_helix_derivative_consistency():
    finite_difference_check(helix, np.linspace(0.1, 30, 77))


def test_rectangle_extents_exact():
    period = rectangle_period()
    times = np.linspace(0, period, 4001)
    pts = np.array([rectangle(t).r_d for t in times])
    assert abs((pts[:, 0].max() - pts[:, 0].min()) - 0.8) < 1e-12
    assert abs((pts[:, 1].max() - pts[:, 1].min()) - 0.6) < 1e-12
    np.testing.assert_allclose(pts[:, 2], 0.7, atol=0)


def test_rectangle_pitch_hold_constant():
    hold = np.deg2rad(-5.0)
    for t in np.linspace(0, 20, 50):
        s = rectangle(t, pitch_hold=hold)
        assert s.pitch_d == hold
        assert s.yaw_d == 0.0
    for t in np.linspace(0, 20, 50):
        assert rectangle(t, pitch_hold=0.0).pitch_d == 0.0


def test_rectangle_period_is_perimeter_over_speed():
    assert abs(rectangle_period(0.25) - 2.8 / 0.25) < 1e-12


def test_rectangle_cruise_acceleration_zero():
    # Mid-edge samples sit on straight legs at constant velocity.
    s = rectangle(0.05)
    np.testing.assert_array_equal(s.a_d, np.zeros(3))
    np.testing.assert_allclose(np.linalg.norm(s.v_d), 0.25, atol=1e-15)


def test_rectangle_derivative_consistency():
    finite_difference_check(lambda t: rectangle(t, pitch_hold=0.1), np.linspace(0.05, 23, 97))


def test_rectangle_velocity_integrates_to_position():
    period = rectangle_period()
    times = np.linspace(0.0, period, 20001)
    vs = np.array([rectangle(t).v_d for t in times])
    travelled = np.trapezoid(vs, times, axis=0)
    np.testing.assert_allclose(travelled, np.zeros(3), atol=1e-6)


def test_rectangle_fixed_attitude_is_identity():
    for t in np.linspace(0, 25, 60):
        s = rectangle_fixed_attitude(t)
        np.testing.assert_array_equal(s.r_wf_d, np.eye(3))
        np.testing.assert_array_equal(s.omega_d, np.zeros(3))


def test_hover_is_constant():
    traj = hover((1.0, -2.0, 0.7), yaw0=0.3)
    for t in (0.0, 1.5, 600.0):
        s = traj(t)
        np.testing.assert_array_equal(s.r_d, [1.0, -2.0, 0.7])
        np.testing.assert_array_equal(s.v_d, np.zeros(3))
        np.testing.assert_array_equal(s.a_d, np.zeros(3))
        assert s.yaw_d == 0.3
    finite_difference_check(traj, [0.5, 10.0])


def test_all_trajectories_finite_over_ten_minutes():
    trajs = [helix, rectangle, rectangle_fixed_attitude, hover((0, 0, 1))]
    for traj in trajs:
        for t in np.linspace(0.0, 600.0, 601):
            s = traj(t)
            assert np.all(np.isfinite(s.r_d))
            assert np.all(np.isfinite(s.v_d))
            assert np.all(np.isfinite(s.a_d))
            assert np.all(np.isfinite(s.r_wf_d))


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        helix(-0.1)
    with pytest.raises(ValueError):
        rectangle(-1.0)


def test_sample_default_attitude_from_yaw_pitch():
    from modrotor.so3 import rot_y, rot_z
    s = TrajectorySample(t=0.0, r_d=np.zeros(3), v_d=np.zeros(3), a_d=np.zeros(3),
                         yaw_d=0.4, pitch_d=-0.1)
    np.testing.assert_allclose(s.r_wf_d, rot_z(0.4) @ rot_y(-0.1), atol=0)
