import numpy as np
from numpy.testing import assert_allclose
from scipy.integrate import quad

from tqnav.earth import GeodeticPosition, c_en, normal_gravity
from tqnav.kinematics import propagate_traditional
from tqnav.report import principal_angle_error
from tqnav.tqfilter import RATES
from tqnav.trajectory import (
    ScenarioParams,
    angular_rate_body,
    specific_force_body,
    synthesize_imu,
    truth_attitude,
    truth_to_eframe,
    truth_vel_pos,
)


class TestTruthAttitude:
    def test_initial_value(self):
        p = ScenarioParams()
        q = truth_attitude(0.0, p)
        expect = [np.cos(np.deg2rad(5)), 0.0, np.sin(np.deg2rad(5)), 0.0]
        assert_allclose(q.wxyz, expect, atol=0.0)

    def test_zero_cone_angle_is_identity(self):
        p = ScenarioParams(cone_angle=0.0)
        for t in (0.0, 1.7, 42.0):
            assert_allclose(truth_attitude(t, p).wxyz, [1, 0, 0, 0], atol=0.0)

    def test_unit_norm(self, rng):
        p = ScenarioParams()
        for t in rng.uniform(0, 200, size=20):
            assert abs(truth_attitude(t, p).norm - 1.0) < 1e-15


class TestTruthVelPos:
    def test_initial_velocity(self, wgs84):
        v_n, pos = truth_vel_pos(0.0, ScenarioParams(), wgs84)
        assert_allclose(v_n, [0.0, 0.0, 500.0], atol=0.0)
        assert pos.lat == 0.0 and pos.lon == 0.0 and pos.height == 0.0

    def test_small_frequency_limit(self, wgs84):
        # Taylor oracle: v_dot = a sin(w t) ~ a w t for small w, so
        # v_east ~ v0 + a w t^2 / 2 (the quadratic-in-t leading term)
        w = 1e-4
        p = ScenarioParams(accel_frequency=w)
        for t in (1.0, 5.0, 20.0):
            v_n, _ = truth_vel_pos(t, p, wgs84)
            taylor = p.v0 + 0.5 * p.accel_amplitude * w * t**2
            # (1 - cos) cancellation leaves ~ (a/w) * eps of float noise
            noise = 2.0 * (p.accel_amplitude / w) * np.finfo(float).eps
            next_term = p.accel_amplitude * w**3 * t**4 / 24.0
            assert abs(v_n[2] - taylor) < 2.0 * next_term + noise

    def test_position_rate_matches_curvature_relation(self, wgs84):
        from tqnav.earth import curvature_matrix

        p = ScenarioParams()
        dt = 1e-6
        for t in (3.0, 77.7):
            v_n, pos = truth_vel_pos(t, p, wgs84)
            _, pos2 = truth_vel_pos(t + dt, p, wgs84)
            lon_rate_fd = (pos2.lon - pos.lon) / dt
            expect = (curvature_matrix(pos, wgs84) @ v_n)[0]
            assert abs(lon_rate_fd - expect) < 1e-8 * max(1.0, abs(expect))


class TestTruthEframe:
    def test_initial_position(self, wgs84):
        s = truth_to_eframe(0.0, ScenarioParams(), wgs84)
        assert_allclose(s.r_e, [wgs84.semi_major_axis, 0.0, 0.0], atol=0.0)

    def test_unit_attitude(self, wgs84, rng):
        p = ScenarioParams()
        for t in rng.uniform(0, 200, size=10):
            assert abs(truth_to_eframe(t, p, wgs84).q_eb.norm - 1.0) < 1e-15

    def test_velocity_round_trip_to_local_level(self, wgs84, rng):
        p = ScenarioParams()
        for t in rng.uniform(0, 200, size=10):
            s = truth_to_eframe(t, p, wgs84)
            v_n_expect, pos = truth_vel_pos(t, p, wgs84)
            v_n = c_en(pos).rotate_frame(s.v_e)
            assert_allclose(v_n, v_n_expect, atol=1e-12 * max(1.0, np.linalg.norm(v_n_expect)))


class TestImuSynthesis:
    def test_stationary_gyro_reads_earth_rate(self, wgs84):
        p = ScenarioParams(v0=0.0, accel_amplitude=0.0, cone_angle=0.0, duration=1.0)
        t = np.array([0.0, 0.4])
        w = angular_rate_body(t, p, wgs84)
        q = truth_attitude(0.0, p)  # identity here
        expect = c_en(GeodeticPosition(0, 0, 0)).rotate_frame(wgs84.rotation_vector)
        assert_allclose(w[0], q.rotate_frame(expect), atol=1e-18)
        assert_allclose(w[1], w[0], atol=1e-18)  # time-invariant at rest

    def test_stationary_accel_reads_minus_gravity(self, wgs84):
        p = ScenarioParams(v0=0.0, accel_amplitude=0.0, cone_angle=0.0, duration=1.0)
        f = specific_force_body(np.array([0.0]), p, wgs84)[0]
        gamma = normal_gravity(GeodeticPosition(0, 0, 0), wgs84)
        assert_allclose(f, [0.0, gamma, 0.0], atol=1e-12)

    def test_increments_match_quadrature_oracle(self, wgs84):
        p = ScenarioParams(duration=0.16)
        windows = synthesize_imu(p, wgs84, 8)
        w = windows[1]
        for k in (0, 5):
            t0 = w.t_start + ([0.0] + list(w.sample_times))[k]
            t1 = w.t_start + w.sample_times[k]
            for axis in range(3):
                expect = quad(
                    lambda t, a=axis: angular_rate_body(t, p, wgs84)[a],
                    t0,
                    t1,
                    epsabs=1e-15,
                    limit=100,
                )[0]
                assert abs(w.gyro[k, axis] - expect) < 1e-14

    def test_rates_mode_samples_the_analytic_signal(self, wgs84):
        p = ScenarioParams(duration=0.16)
        windows = synthesize_imu(p, wgs84, 8, mode=RATES)
        w = windows[0]
        times = w.t_start + w.sample_times
        assert_allclose(w.gyro, angular_rate_body(times, p, wgs84), atol=0.0)
        assert_allclose(w.accel, specific_force_body(times, p, wgs84), atol=0.0)

    def test_window_bookkeeping(self, wgs84):
        p = ScenarioParams(duration=1.0)
        windows = synthesize_imu(p, wgs84, 8)
        assert len(windows) == 12  # 100 samples -> 12 full windows, tail dropped
        for i, w in enumerate(windows):
            assert w.n_samples == 8
            assert abs(w.t_start - i * 0.08) < 1e-12
            assert abs(w.t_N - 0.08) < 1e-15

    def test_zero_duration(self, wgs84):
        assert synthesize_imu(ScenarioParams(duration=0.0), wgs84, 8) == []


class TestClosedLoopConsistency:
    def test_mechanization_tracks_truth(self, wgs84):
        # bounds the representation-neutral oracle error budget used in the
        # acceptance suite: RK4 on the analytic rates must track the analytic
        # truth tightly over several seconds
        p = ScenarioParams()
        s0 = truth_to_eframe(0.0, p, wgs84)
        om = lambda t: angular_rate_body(t, p, wgs84)
        fb = lambda t: specific_force_body(t, p, wgs84)
        T = 4.0
        s = propagate_traditional(s0, om, fb, wgs84, 0.0, T, 2.5e-4)
        st = truth_to_eframe(T, p, wgs84)
        assert principal_angle_error(st.q_eb, s.q_eb) < 1e-12
        assert np.linalg.norm(s.v_e - st.v_e) < 1e-10
        assert np.linalg.norm(s.r_e - st.r_e) < 1e-8
