"""Analytic truth generator: equatorial coning flight with exact IMU synthesis.

The vehicle flies due east along a parallel at constant latitude and height
with ground velocity v^n = (0, 0, v0 + a (1 - cos(w t)) / w) in the
(north, up, east) frame, while the body performs a classical coning motion

    q_nb = [cos(alpha/2), sin(alpha/2) * (0, cos(zeta t), sin(zeta t))].

Everything downstream (attitude rate, transport rate, specific force) is
derived in closed form, so the synthesized gyro/accelerometer signals are
exactly consistent with the reference trajectory. Incremental outputs are
produced by Gauss-Legendre quadrature of the analytic rates over each sample
interval, keeping the sensor model definitionally exact rather than a
difference of attitudes.

All rate/force functions accept scalar or array times and broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import Quaternion, quat_conj_arr, quat_mul_arr
from .earth import (
    EarthModel,
    GeodeticPosition,
    c_en,
    geodetic_to_ecef,
    normal_gravity,
    transverse_radius,
)
from .kinematics import NavState
from .tqfilter import INCREMENTS, RATES, ImuWindow

_GL_ORDER = 12  # quadrature nodes per sample interval; far below 1e-15 error


@dataclass(frozen=True)
class ScenarioParams:
    """Coning-flight scenario definition."""

    v0: float = 500.0  # initial east velocity, m/s
    accel_amplitude: float = 10.0  # a, m/s^2
    accel_frequency: float = 0.02 * math.pi  # w, rad/s
    cone_angle: float = math.radians(10.0)  # alpha, rad
    cone_frequency: float = 0.74 * math.pi  # zeta, rad/s
    lat0: float = 0.0
    lon0: float = 0.0
    height0: float = 0.0
    duration: float = 200.0  # s
    imu_rate: float = 100.0  # Hz

    def __post_init__(self):
        if self.imu_rate <= 0.0 or self.duration < 0.0:
            raise ValueError("imu_rate must be positive and duration non-negative")


# ---------------------------------------------------------------------------
# attitude truth
# ---------------------------------------------------------------------------

def truth_attitude_packed(t, p: ScenarioParams) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    c = np.cos(p.cone_angle / 2.0)
    s = np.sin(p.cone_angle / 2.0)
    zt = p.cone_frequency * t
    return np.stack(
        [np.broadcast_to(c, t.shape), np.zeros_like(t), s * np.cos(zt), s * np.sin(zt)],
        axis=-1,
    )


def truth_attitude(t: float, p: ScenarioParams) -> Quaternion:
    """Coning attitude q_nb of the body w.r.t. the local-level frame."""
    return Quaternion(truth_attitude_packed(float(t), p))


def truth_attitude_rate_packed(t, p: ScenarioParams) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    s = np.sin(p.cone_angle / 2.0)
    zt = p.cone_frequency * t
    z = p.cone_frequency
    return np.stack(
        [np.zeros_like(t), np.zeros_like(t), -s * z * np.sin(zt), s * z * np.cos(zt)],
        axis=-1,
    )


# ---------------------------------------------------------------------------
# velocity / position truth
# ---------------------------------------------------------------------------

def _east_velocity(t, p: ScenarioParams):
    t = np.asarray(t, dtype=float)
    if p.accel_frequency == 0.0:
        return np.broadcast_to(p.v0, t.shape)
    w = p.accel_frequency
    return p.v0 + p.accel_amplitude * (1.0 - np.cos(w * t)) / w


def _east_distance(t, p: ScenarioParams):
    t = np.asarray(t, dtype=float)
    if p.accel_frequency == 0.0:
        return p.v0 * t
    w = p.accel_frequency
    return p.v0 * t - (p.accel_amplitude * np.sin(w * t) - p.accel_amplitude * w * t) / w**2


def truth_vel_pos(t: float, p: ScenarioParams, model: EarthModel):
    """Ground velocity in (north, up, east) and the geodetic position."""
    v_n = np.array([0.0, 0.0, float(_east_velocity(t, p))])
    base = GeodeticPosition(p.lat0, p.lon0, p.height0)
    radius = (transverse_radius(base, model) + p.height0) * np.cos(p.lat0)
    lon = p.lon0 + float(_east_distance(t, p)) / radius
    lon = (lon + np.pi) % (2.0 * np.pi) - np.pi
    return v_n, GeodeticPosition(p.lat0, lon, p.height0)


def truth_to_eframe(t: float, p: ScenarioParams, model: EarthModel) -> NavState:
    """Full truth state in the e-frame."""
    v_n, pos = truth_vel_pos(t, p, model)
    q_en = c_en(pos)
    q_eb = q_en.mul(truth_attitude(t, p))
    v_e = q_en.mul(Quaternion.vector(v_n)).mul(q_en.conjugate()).v
    return NavState(q_eb.normalized(), v_e, geodetic_to_ecef(pos, model))


# ---------------------------------------------------------------------------
# IMU synthesis
# ---------------------------------------------------------------------------

def _omega_in_n_packed(t, p: ScenarioParams, model: EarthModel) -> np.ndarray:
    """omega_ie^n + omega_en^n in (north, up, east), broadcast over t."""
    t = np.asarray(t, dtype=float)
    base = GeodeticPosition(p.lat0, p.lon0, p.height0)
    r_e = transverse_radius(base, model) + p.height0
    sl, cl = np.sin(p.lat0), np.cos(p.lat0)
    lon_rate = _east_velocity(t, p) / (r_e * cl)
    # earth rate (w cosL, w sinL, 0) plus transport (lon_rate cosL, lon_rate sinL, -lat_rate)
    north = model.rotation_rate * cl + lon_rate * cl
    up = model.rotation_rate * sl + lon_rate * sl
    return np.stack([north, up, np.zeros_like(t)], axis=-1)


def angular_rate_body(t, p: ScenarioParams, model: EarthModel) -> np.ndarray:
    """Gyroscope truth omega_ib^b = vec[q_nb* o (2 dq_nb/dt + omega_in^n o q_nb)]."""
    t = np.asarray(t, dtype=float)
    q = truth_attitude_packed(t, p)
    dq = truth_attitude_rate_packed(t, p)
    w_in = np.zeros(t.shape + (4,))
    w_in[..., 1:] = _omega_in_n_packed(t, p, model)
    return quat_mul_arr(quat_conj_arr(q), 2.0 * dq + quat_mul_arr(w_in, q))[..., 1:]


def specific_force_body(t, p: ScenarioParams, model: EarthModel) -> np.ndarray:
    """Accelerometer truth f^b = C_n^b (dv^n/dt + (2 w_ie + w_en) x v^n - g_l^n)."""
    t = np.asarray(t, dtype=float)
    base = GeodeticPosition(p.lat0, p.lon0, p.height0)
    r_e = transverse_radius(base, model) + p.height0
    sl, cl = np.sin(p.lat0), np.cos(p.lat0)
    v_east = _east_velocity(t, p)
    lon_rate = v_east / (r_e * cl)
    # (2 w_ie + w_en) x v with v = (0, 0, v_east):
    # cross((cn, cu, 0), (0, 0, ve)) = (cu*ve, -cn*ve, 0)
    cn = (2.0 * model.rotation_rate + lon_rate) * cl
    cu = (2.0 * model.rotation_rate + lon_rate) * sl
    vdot_east = p.accel_amplitude * np.sin(p.accel_frequency * t)
    gamma = normal_gravity(base, model)
    f_n = np.stack(
        [cu * v_east, -cn * v_east + gamma, vdot_east], axis=-1
    )
    fq = np.zeros(t.shape + (4,))
    fq[..., 1:] = f_n
    q = truth_attitude_packed(t, p)
    return quat_mul_arr(quat_conj_arr(q), quat_mul_arr(fq, q))[..., 1:]


def synthesize_imu(
    p: ScenarioParams,
    model: EarthModel,
    samples_per_window: int,
    mode: str = INCREMENTS,
) -> list[ImuWindow]:
    """Generate the windowed IMU stream for the scenario.

    The trailing part of the duration that does not fill a whole window is
    dropped. Increments integrate the analytic rates with fixed-order
    Gauss-Legendre quadrature per sample interval.
    """
    h = 1.0 / p.imu_rate
    n_total = int(round(p.duration * p.imu_rate))
    n_windows = n_total // samples_per_window
    rel_times = (np.arange(samples_per_window) + 1) * h
    windows = []
    if mode == RATES:
        for i in range(n_windows):
            t0 = i * samples_per_window * h
            times = t0 + rel_times
            windows.append(
                ImuWindow(
                    t_start=t0,
                    sample_times=rel_times,
                    gyro=angular_rate_body(times, p, model),
                    accel=specific_force_body(times, p, model),
                    mode=RATES,
                )
            )
        return windows

    gl_x, gl_w = np.polynomial.legendre.leggauss(_GL_ORDER)
    starts = np.arange(n_windows * samples_per_window) * h
    nodes = starts[:, None] + 0.5 * h * (1.0 + gl_x[None, :])  # (M, GL)
    gyro_all = angular_rate_body(nodes, p, model)  # (M, GL, 3)
    accel_all = specific_force_body(nodes, p, model)
    dth = 0.5 * h * np.einsum("g,mgi->mi", gl_w, gyro_all)
    dv = 0.5 * h * np.einsum("g,mgi->mi", gl_w, accel_all)
    for i in range(n_windows):
        lo = i * samples_per_window
        hi = lo + samples_per_window
        windows.append(
            ImuWindow(
                t_start=lo * h,
                sample_times=rel_times,
                gyro=dth[lo:hi],
                accel=dv[lo:hi],
                mode=INCREMENTS,
            )
        )
    return windows
