"""Classical two-sample strapdown algorithm (coning + sculling compensation).

This is the routine comparison baseline: attitude advances by the two-sample
rotation vector phi = dth1 + dth2 + (2/3) dth1 x dth2 (Ignagni/Savage
coefficient), the earth rotation is applied as a separate left-side factor,
and the velocity update transforms the compensated specific-force integral
with a first-order earth-rate correction before adding Coriolis and local
gravity evaluated at the interval start. Position integrates velocity
trapezoidally. Production e-frame mechanizations are routinely written this
way; its error budget on coning motion is the classical coning/sculling
residual plus first-order gravity discretization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Quaternion
from .earth import EarthModel, local_gravity_e
from .errors import NonUnitQuaternion
from .kinematics import NavState
from .tqfilter import INCREMENTS, ImuWindow


@dataclass(frozen=True)
class TwoSampleStep:
    """Two consecutive angular/velocity increments spanning ``dt`` seconds."""

    dtheta1: np.ndarray  # rad
    dtheta2: np.ndarray
    dv1: np.ndarray  # m/s
    dv2: np.ndarray
    dt: float  # full step duration (two sample intervals)

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError("step duration must be positive")
        for name in ("dtheta1", "dtheta2", "dv1", "dv2"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (3,) or not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be a finite 3-vector")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def two_sample_attitude(q: Quaternion, step: TwoSampleStep, model: EarthModel) -> Quaternion:
    """Attitude update q_eb(t + dt) = dq_earth* o q_eb(t) o dq_body."""
    if not q.is_unit():
        raise NonUnitQuaternion("attitude must be unit")
    phi = step.dtheta1 + step.dtheta2 + (2.0 / 3.0) * np.cross(step.dtheta1, step.dtheta2)
    dq_body = Quaternion.from_rotvec(phi)
    dq_earth = Quaternion.from_rotvec(model.rotation_vector * step.dt)
    return dq_earth.conjugate().mul(q).mul(dq_body).normalized()


def two_sample_velocity_position(s: NavState, step: TwoSampleStep, model: EarthModel) -> NavState:
    """Velocity/position update using the attitude at the interval start."""
    dth = step.dtheta1 + step.dtheta2
    dv = step.dv1 + step.dv2
    # rotation compensation + two-sample sculling correction
    u_b = (
        dv
        + 0.5 * np.cross(dth, dv)
        + (2.0 / 3.0) * (np.cross(step.dtheta1, step.dv2) + np.cross(step.dv1, step.dtheta2))
    )
    u_e = s.q_eb.mul(Quaternion.vector(u_b)).mul(s.q_eb.conjugate()).v
    zeta = model.rotation_vector * step.dt
    u_e = u_e - 0.5 * np.cross(zeta, u_e)
    g_l = local_gravity_e(s.r_e, model)
    v_new = s.v_e + u_e + step.dt * (g_l - 2.0 * np.cross(model.rotation_vector, s.v_e))
    r_new = s.r_e + 0.5 * step.dt * (s.v_e + v_new)
    return NavState(s.q_eb, v_new, r_new)


def two_sample_window(s: NavState, window: ImuWindow, model: EarthModel) -> NavState:
    """Run the two-sample algorithm across one IMU window (even sample count)."""
    if window.mode != INCREMENTS:
        raise ValueError("the two-sample algorithm consumes increments")
    n = window.n_samples
    if n % 2 != 0:
        raise ValueError("two-sample updates need an even sample count")
    edges = np.concatenate([[0.0], window.sample_times])
    state = s
    for k in range(0, n, 2):
        step = TwoSampleStep(
            dtheta1=window.gyro[k],
            dtheta2=window.gyro[k + 1],
            dv1=window.accel[k],
            dv2=window.accel[k + 1],
            dt=float(edges[k + 2] - edges[k]),
        )
        moved = two_sample_velocity_position(state, step, model)
        q_new = two_sample_attitude(state.q_eb, step, model)
        state = NavState(q_new, moved.v_e, moved.r_e)
    return state


def two_sample_trajectory(windows, s0: NavState, model: EarthModel):
    """Chain the two-sample algorithm over windows, yielding (t_end, state)."""
    state = s0
    for window in windows:
        state = two_sample_window(state, window, model)
        yield window.t_start + window.t_N, state
