"""Navigation-state embeddings and continuous-time strapdown models.

Attitude is stored as the unit quaternion q_eb (b-frame w.r.t. e-frame);
``q_eb* o r^e o q_eb`` re-expresses e-frame coordinates in the body frame.
Three equivalent right-hand sides are provided (the classical e-frame
mechanization, the dual-quaternion/vector hybrid, and the unified trident
form) plus a generic RK4 driver used by tests as the representation-neutral
oracle. The conjugate, body-referenced embeddings with mirrored imaginary
parts are intentionally not provided.

The trident embedding of a state (q, v^e, r^e) is

    q_tilde = q + e1 * (1/2)(v^e + omega_ie x r^e) o q + e2 * (1/2) r^e o q,

whose e1 translation is the total inertial velocity expressed in e-frame.
Recovery inverts it through r^e = 2 q2 o q^-1 and
v^e = 2 q1 o q^-1 - omega_ie x r^e; the true inverse (conjugate over squared
norm) is used so that recovering and re-embedding renormalizes the whole
structure instead of silently scaling velocity and position.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .algebra import (
    DualQuaternion,
    Quaternion,
    TridentQuaternion,
    cross3,
    quat_conj_arr,
    quat_mul_arr,
    tq_mul_arr,
)
from .earth import EarthModel, gravitation_e, local_gravity_e
from .errors import (
    InvalidStep,
    NonUnitQuaternion,
    NonUnitTrident,
    ScalarResidueTooLarge,
)

SCALAR_RESIDUE_TOL = 1e-9  # relative to the translation magnitude


@dataclass(frozen=True)
class NavState:
    """Attitude q_eb, velocity v^e (m/s) and position r^e (m)."""

    q_eb: Quaternion
    v_e: np.ndarray
    r_e: np.ndarray

    def __post_init__(self):
        v = np.array(self.v_e, dtype=float)
        r = np.array(self.r_e, dtype=float)
        if v.shape != (3,) or r.shape != (3,):
            raise ValueError("velocity and position must be 3-vectors")
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(r))):
            raise ValueError("state components must be finite")
        v.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "v_e", v)
        object.__setattr__(self, "r_e", r)


class TwistVariant(Enum):
    """Placement of the position-channel forcing in the trident twists.

    The unified kinematic equation constrains the two e2 twist entries only
    through q o x1 - x2 o q = (total velocity)^e o q, leaving a family of
    equivalent choices. BODY_SIDE puts the total velocity (negated, e-frame
    coordinates) in the earth-side twist; EARTH_SIDE carries it (body-frame
    coordinates) in the body-side twist.
    """

    BODY_SIDE = "body-side"
    EARTH_SIDE = "earth-side"


@dataclass(frozen=True)
class TridentTwist:
    """Vector-quaternion triple forcing the trident kinematic equation."""

    real: Quaternion
    e1: Quaternion
    e2: Quaternion

    def __post_init__(self):
        for part in (self.real, self.e1, self.e2):
            if part.s != 0.0:
                raise ValueError("twist parts must be vector quaternions")

    @classmethod
    def from_vectors(cls, w, a, b) -> "TridentTwist":
        return cls(Quaternion.vector(w), Quaternion.vector(a), Quaternion.vector(b))

    @property
    def packed(self) -> np.ndarray:
        return np.stack([self.real.wxyz, self.e1.wxyz, self.e2.wxyz])


# ---------------------------------------------------------------------------
# embedding / recovery
# ---------------------------------------------------------------------------

def embed_state(s: NavState, model: EarthModel) -> TridentQuaternion:
    """Embed a navigation state as a unit trident quaternion."""
    if not s.q_eb.is_unit():
        raise NonUnitQuaternion("attitude must be unit to embed")
    q = s.q_eb.normalized()
    total_vel = s.v_e + np.cross(model.rotation_vector, s.r_e)
    q1 = 0.5 * Quaternion.vector(total_vel).mul(q)
    q2 = 0.5 * Quaternion.vector(s.r_e).mul(q)
    return TridentQuaternion(q, q1, q2)


def recover_state(t: TridentQuaternion, model: EarthModel) -> NavState:
    """Invert :func:`embed_state`, renormalizing the trident structure.

    The scalar parts of the recovered translation quaternions must vanish;
    a residue beyond tolerance signals a corrupted state.
    """
    if not t.q.is_unit():
        raise NonUnitTrident(f"real-part norm deviates by {abs(t.q.norm - 1.0):.3e}")
    inv = t.q.conjugate() * (1.0 / (t.q.norm**2))
    pos_q = 2.0 * t.q2.mul(inv)
    vel_q = 2.0 * t.q1.mul(inv)
    for residue, mag in ((pos_q.s, pos_q.norm), (vel_q.s, vel_q.norm)):
        if abs(residue) > SCALAR_RESIDUE_TOL * max(1.0, mag):
            raise ScalarResidueTooLarge(f"scalar residue {residue:.3e} at magnitude {mag:.3e}")
    r_e = pos_q.v
    v_e = vel_q.v - np.cross(model.rotation_vector, r_e)
    return NavState(t.q.normalized(), v_e, r_e)


# ---------------------------------------------------------------------------
# twists
# ---------------------------------------------------------------------------

def make_twists(
    omega_ib_b,
    f_b,
    g_e,
    total_vel,
    variant: TwistVariant,
    model: EarthModel,
) -> tuple[TridentTwist, TridentTwist]:
    """Build the (body-side, earth-side) trident twists.

    ``total_vel`` is the total inertial velocity omega_ie x r^e + v^e, given
    in e-frame coordinates for BODY_SIDE and rotated into the body frame by
    the caller for EARTH_SIDE.
    """
    zero = np.zeros(3)
    if variant is TwistVariant.BODY_SIDE:
        body = TridentTwist.from_vectors(omega_ib_b, f_b, zero)
        earth = TridentTwist.from_vectors(
            model.rotation_vector, -np.asarray(g_e, dtype=float), -np.asarray(total_vel, dtype=float)
        )
    else:
        body = TridentTwist.from_vectors(omega_ib_b, f_b, total_vel)
        earth = TridentTwist.from_vectors(
            model.rotation_vector, -np.asarray(g_e, dtype=float), zero
        )
    return body, earth


def twists_from_state(
    t: TridentQuaternion,
    omega_ib_b,
    f_b,
    model: EarthModel,
    variant: TwistVariant = TwistVariant.BODY_SIDE,
) -> tuple[TridentTwist, TridentTwist]:
    """Evaluate the state-dependent twists (gravity, total velocity) at ``t``."""
    norm2 = t.q.norm**2
    inv = t.q.conjugate() * (1.0 / norm2)
    r_e = 2.0 * t.q2.mul(inv).v
    total_vel_e = 2.0 * t.q1.mul(inv).v
    g_e = gravitation_e(r_e, model)
    if variant is TwistVariant.EARTH_SIDE:
        total_vel = t.q.normalized().rotate_frame(total_vel_e)
    else:
        total_vel = total_vel_e
    return make_twists(omega_ib_b, f_b, g_e, total_vel, variant, model)


# ---------------------------------------------------------------------------
# right-hand sides
# ---------------------------------------------------------------------------

def triq_rhs(
    t: TridentQuaternion, twists: tuple[TridentTwist, TridentTwist]
) -> TridentQuaternion:
    """Unified trident kinematics: 2 dq_tilde/dt = q_tilde o w_b - w_e o q_tilde."""
    body, earth = twists
    d = tq_mul_arr(t.packed, body.packed) - tq_mul_arr(earth.packed, t.packed)
    return TridentQuaternion.from_packed(0.5 * d)


def dqv_rhs(dq, r_e, omega_ib_b, f_b, model: EarthModel):
    """Dual-quaternion/vector hybrid model.

    Returns the dual-quaternion derivative (attitude + total velocity) and
    the position rate dr^e/dt = 2 q' o q* - omega_ie x r^e.
    """
    r_e = np.asarray(r_e, dtype=float)
    g_e = gravitation_e(r_e, model)
    w_b = Quaternion.vector(omega_ib_b)
    f_q = Quaternion.vector(f_b)
    w_e = Quaternion.vector(model.rotation_vector)
    g_q = Quaternion.vector(g_e)
    real_dot = 0.5 * (dq.real.mul(w_b) - w_e.mul(dq.real))
    dual_dot = 0.5 * (
        dq.real.mul(f_q) + dq.dual.mul(w_b) - w_e.mul(dq.dual) + g_q.mul(dq.real)
    )
    r_dot = 2.0 * dq.dual.mul(dq.real.conjugate()).v - np.cross(model.rotation_vector, r_e)
    return DualQuaternion(real_dot, dual_dot), r_dot


def traditional_rhs(s: NavState, omega_ib_b, f_b, model: EarthModel):
    """Classical e-frame mechanization.

    Returns (q_eb rate, dv^e/dt, dr^e/dt) with
    dv^e/dt = C_b^e f^b - 2 omega_ie x v^e + g_l^e.
    """
    w_b = Quaternion.vector(omega_ib_b)
    w_e = Quaternion.vector(model.rotation_vector)
    q_dot = 0.5 * (s.q_eb.mul(w_b) - w_e.mul(s.q_eb))
    f_e = s.q_eb.mul(Quaternion.vector(f_b)).mul(s.q_eb.conjugate()).v
    g_l = local_gravity_e(s.r_e, model)
    v_dot = f_e - 2.0 * np.cross(model.rotation_vector, s.v_e) + g_l
    return q_dot, v_dot, np.array(s.v_e)


# ---------------------------------------------------------------------------
# RK4 oracle
# ---------------------------------------------------------------------------

def rk4_propagate(rhs, y0, t0: float, t1: float, step: float, post_step=None):
    """Classical fixed-step RK4 on a flat state vector.

    ``rhs(t, y) -> dy/dt``; ``post_step`` (e.g. quaternion renormalization)
    is applied after every step. The step must divide the interval within
    rounding.
    """
    if not step > 0.0:
        raise InvalidStep("step must be positive")
    span = t1 - t0
    n = int(round(span / step))
    if n < 1 or abs(n * step - span) > 1e-9 * max(1.0, abs(span)):
        raise InvalidStep("step does not divide the interval")
    y = np.array(y0, dtype=float)
    for k in range(n):
        t = t0 + k * step
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * step, y + 0.5 * step * k1)
        k3 = rhs(t + 0.5 * step, y + 0.5 * step * k2)
        k4 = rhs(t + step, y + step * k3)
        y = y + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if post_step is not None:
            y = post_step(y)
    return y


# -- packed drivers for the three representations ---------------------------
#
# The drivers below evaluate the (time-only) gyro/accelerometer inputs for
# all RK4 stage times of a step in one vectorized call, so input functions
# must broadcast over an array of times (the trajectory module's do).

def _grav_e(r, model):
    w = model.rotation_vector
    return local_gravity_e(r, model) + np.cross(w, np.cross(w, r))


def _rk4_staged(stage_rhs, y0, t0, t1, step, omega_fn, force_fn, post_step):
    if not step > 0.0:
        raise InvalidStep("step must be positive")
    span = t1 - t0
    n = int(round(span / step))
    if n < 1 or abs(n * step - span) > 1e-9 * max(1.0, abs(span)):
        raise InvalidStep("step does not divide the interval")
    y = np.array(y0, dtype=float)
    for k in range(n):
        t = t0 + k * step
        ts = np.array([t, t + 0.5 * step, t + step])
        W = np.asarray(omega_fn(ts), dtype=float)
        F = np.asarray(force_fn(ts), dtype=float)
        k1 = stage_rhs(y, W[0], F[0])
        k2 = stage_rhs(y + (0.5 * step) * k1, W[1], F[1])
        k3 = stage_rhs(y + (0.5 * step) * k2, W[1], F[1])
        k4 = stage_rhs(y + step * k3, W[2], F[2])
        y = y + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        y = post_step(y)
    return y


def propagate_traditional(
    s0: NavState, omega_fn, force_fn, model: EarthModel, t0, t1, step
) -> NavState:
    """RK4 on the classical mechanization; inputs are functions of time."""
    w_e = model.rotation_vector
    w_eq = np.concatenate([[0.0], w_e])

    def stage_rhs(y, w, f):
        q, v, r = y[0:4], y[4:7], y[7:10]
        wq = np.concatenate([[0.0], w])
        q_dot = 0.5 * (quat_mul_arr(q, wq) - quat_mul_arr(w_eq, q))
        fq = np.concatenate([[0.0], f])
        f_e = quat_mul_arr(q, quat_mul_arr(fq, quat_conj_arr(q)))[1:] / (q @ q)
        v_dot = f_e - 2.0 * cross3(w_e, v) + local_gravity_e(r, model)
        return np.concatenate([q_dot, v_dot, v])

    def renorm(y):
        y[0:4] /= np.linalg.norm(y[0:4])
        return y

    y0 = np.concatenate([s0.q_eb.wxyz, s0.v_e, s0.r_e])
    y = _rk4_staged(stage_rhs, y0, t0, t1, step, omega_fn, force_fn, renorm)
    return NavState(Quaternion(y[0:4]).normalized(), y[4:7], y[7:10])


def propagate_dqv(
    s0: NavState, omega_fn, force_fn, model: EarthModel, t0, t1, step
) -> NavState:
    """RK4 on the dual-quaternion/vector hybrid model."""
    w_e = model.rotation_vector
    w_eq = np.concatenate([[0.0], w_e])

    def stage_rhs(y, w, f):
        qr, qd, r = y[0:4], y[4:8], y[8:11]
        wq = np.concatenate([[0.0], w])
        fq = np.concatenate([[0.0], f])
        gq = np.concatenate([[0.0], _grav_e(r, model)])
        qr_dot = 0.5 * (quat_mul_arr(qr, wq) - quat_mul_arr(w_eq, qr))
        qd_dot = 0.5 * (
            quat_mul_arr(qr, fq)
            + quat_mul_arr(qd, wq)
            - quat_mul_arr(w_eq, qd)
            + quat_mul_arr(gq, qr)
        )
        r_dot = 2.0 * quat_mul_arr(qd, quat_conj_arr(qr))[1:] / (qr @ qr) - cross3(w_e, r)
        return np.concatenate([qr_dot, qd_dot, r_dot])

    def renorm(y):
        y[0:8] /= np.linalg.norm(y[0:4])
        return y

    q0 = s0.q_eb.normalized()
    total0 = s0.v_e + np.cross(w_e, s0.r_e)
    qd0 = 0.5 * quat_mul_arr(np.concatenate([[0.0], total0]), q0.wxyz)
    y0 = np.concatenate([q0.wxyz, qd0, s0.r_e])
    y = _rk4_staged(stage_rhs, y0, t0, t1, step, omega_fn, force_fn, renorm)
    qr = Quaternion(y[0:4]).normalized()
    total = 2.0 * quat_mul_arr(y[4:8], quat_conj_arr(y[0:4]))[1:] / (y[0:4] @ y[0:4])
    r = y[8:11]
    return NavState(qr, total - np.cross(w_e, r), r)


def propagate_triq(
    s0: NavState,
    omega_fn,
    force_fn,
    model: EarthModel,
    t0,
    t1,
    step,
    variant: TwistVariant = TwistVariant.BODY_SIDE,
) -> NavState:
    """RK4 on the unified trident model."""
    w_e = model.rotation_vector
    body_side = variant is TwistVariant.BODY_SIDE

    def stage_rhs(y, w, f):
        tq = y.reshape(3, 4)
        q = tq[0]
        n2 = q @ q
        inv = quat_conj_arr(q) / n2
        r = 2.0 * quat_mul_arr(tq[2], inv)[1:]
        total_e = 2.0 * quat_mul_arr(tq[1], inv)[1:]
        g = _grav_e(r, model)
        body = np.zeros((3, 4))
        earth = np.zeros((3, 4))
        body[0, 1:] = w
        body[1, 1:] = f
        earth[0, 1:] = w_e
        earth[1, 1:] = -g
        if body_side:
            earth[2, 1:] = -total_e
        else:
            qn = q / np.sqrt(n2)
            body[2, 1:] = quat_mul_arr(
                quat_conj_arr(qn), quat_mul_arr(np.concatenate([[0.0], total_e]), qn)
            )[1:]
        d = 0.5 * (tq_mul_arr(tq, body) - tq_mul_arr(earth, tq))
        return d.reshape(12)

    def renorm(y):
        # dividing the whole triple by the real-part norm preserves recovery
        y /= np.linalg.norm(y[0:4])
        return y

    y0 = embed_state(s0, model).packed.reshape(12)
    y = _rk4_staged(stage_rhs, y0, t0, t1, step, omega_fn, force_fn, renorm)
    return recover_state(TridentQuaternion.from_packed(y.reshape(3, 4)), model)
