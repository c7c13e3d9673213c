"""Quaternion, dual-quaternion and trident-quaternion algebra.

All value types are immutable; operations return new values, which keeps the
iterative solvers free of aliasing surprises. Components are stored
scalar-first, [w, x, y, z]. The ``*_arr`` helpers operate on packed ndarrays
with the quaternion on the last axis and broadcast over leading axes; they
carry the vectorized series arithmetic while the dataclasses provide the
readable single-value API.

A trident quaternion is a triple (q, q1, q2) over the nilpotent units
e1, e2 with e1^2 = e2^2 = e1*e2 = 0, so products never mix the two imaginary
channels: (a o b).q1 = a.q o b.q1 + a.q1 o b.q, and likewise for q2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonUnitQuaternion

# Unit-norm tolerance for user-input validation. Numerical property checks
# use tighter, test-local tolerances.
UNIT_TOL = 1e-9


# ---------------------------------------------------------------------------
# packed-array kernels
# ---------------------------------------------------------------------------

def quat_mul_arr(a, b):
    """Hamilton product on packed quaternions, broadcasting over leading axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim == 1 and b.ndim == 1:
        aw, ax, ay, az = a.tolist()
        bw, bx, by, bz = b.tolist()
        return np.array(
            [
                aw * bw - ax * bx - ay * by - az * bz,
                aw * bx + ax * bw + ay * bz - az * by,
                aw * by + ay * bw + az * bx - ax * bz,
                aw * bz + az * bw + ax * by - ay * bx,
            ]
        )
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by + ay * bw + az * bx - ax * bz,
            aw * bz + az * bw + ax * by - ay * bx,
        ],
        axis=-1,
    )


def quat_conj_arr(a):
    """Conjugate on packed quaternions."""
    out = np.array(a, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def cross3(a, b):
    """Cross product of two 3-vectors; avoids np.cross overhead in hot loops."""
    ax, ay, az = a.tolist() if isinstance(a, np.ndarray) else a
    bx, by, bz = b.tolist() if isinstance(b, np.ndarray) else b
    return np.array([ay * bz - az * by, az * bx - ax * bz, ax * by - ay * bx])


def quat_rotate_frame_arr(q, r):
    """Coordinates of vectors ``r`` re-expressed through ``q* o r o q``.

    ``q`` packs unit quaternions (...,4) and ``r`` packs 3-vectors (...,3);
    no unit check is performed here.
    """
    r = np.asarray(r, dtype=float)
    rq = np.concatenate([np.zeros(r.shape[:-1] + (1,)), r], axis=-1)
    return quat_mul_arr(quat_conj_arr(q), quat_mul_arr(rq, q))[..., 1:]


def tq_mul_arr(a, b):
    """Trident product on packed (...,3,4) arrays; parts are [q, q1, q2]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    real = quat_mul_arr(a[..., 0, :], b[..., 0, :])
    e1 = quat_mul_arr(a[..., 0, :], b[..., 1, :]) + quat_mul_arr(a[..., 1, :], b[..., 0, :])
    e2 = quat_mul_arr(a[..., 0, :], b[..., 2, :]) + quat_mul_arr(a[..., 2, :], b[..., 0, :])
    return np.stack([real, e1, e2], axis=-2)


def tq_conj_arr(a):
    """Componentwise quaternion conjugate of packed trident quaternions."""
    out = np.array(a, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def dcm_from_quat(q):
    """Rotation matrix ``C`` with ``C @ r`` equal to ``q* o r o q``."""
    w, x, y, z = np.asarray(q, dtype=float)
    return np.array(
        [
            [w * w + x * x - y * y - z * z, 2 * (x * y + w * z), 2 * (x * z - w * y)],
            [2 * (x * y - w * z), w * w - x * x + y * y - z * z, 2 * (y * z + w * x)],
            [2 * (x * z + w * y), 2 * (y * z - w * x), w * w - x * x - y * y + z * z],
        ]
    )


def quat_from_dcm(C):
    """Inverse of :func:`dcm_from_quat` (Shepperd's method, w >= 0 branch-safe)."""
    C = np.asarray(C, dtype=float)
    tr = C[0, 0] + C[1, 1] + C[2, 2]
    choices = [tr, C[0, 0], C[1, 1], C[2, 2]]
    i = int(np.argmax(choices))
    if i == 0:
        w = 0.5 * np.sqrt(1.0 + tr)
        f = 0.25 / w
        q = np.array(
            [w, f * (C[1, 2] - C[2, 1]), f * (C[2, 0] - C[0, 2]), f * (C[0, 1] - C[1, 0])]
        )
    else:
        a = i - 1
        b = (a + 1) % 3
        c = (a + 2) % 3
        s = np.sqrt(1.0 + C[a, a] - C[b, b] - C[c, c])
        v = np.empty(3)
        v[a] = 0.5 * s
        f = 0.25 / v[a]
        v[b] = f * (C[a, b] + C[b, a])
        v[c] = f * (C[a, c] + C[c, a])
        w = f * (C[b, c] - C[c, b])
        q = np.concatenate([[w], v])
    if q[0] < 0.0:
        q = -q
    return q / np.linalg.norm(q)


def _readonly(a):
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Quaternion:
    """Immutable quaternion, scalar-first components [w, x, y, z]."""

    wxyz: np.ndarray

    def __post_init__(self):
        arr = _readonly(self.wxyz)
        if arr.shape != (4,):
            raise ValueError("Quaternion needs exactly 4 components")
        object.__setattr__(self, "wxyz", arr)

    # -- constructors ------------------------------------------------------
    @classmethod
    def identity(cls) -> "Quaternion":
        return cls(np.array([1.0, 0.0, 0.0, 0.0]))

    @classmethod
    def from_scalar_vector(cls, s: float, v) -> "Quaternion":
        return cls(np.concatenate([[float(s)], np.asarray(v, dtype=float)]))

    @classmethod
    def vector(cls, v) -> "Quaternion":
        """Explicit promotion of a 3-vector to a vector quaternion (zero scalar)."""
        return cls.from_scalar_vector(0.0, v)

    @classmethod
    def from_axis_angle(cls, axis, angle: float) -> "Quaternion":
        axis = np.asarray(axis, dtype=float)
        axis = axis / np.linalg.norm(axis)
        return cls.from_scalar_vector(np.cos(angle / 2.0), np.sin(angle / 2.0) * axis)

    @classmethod
    def from_rotvec(cls, phi) -> "Quaternion":
        """Quaternion of the rotation vector ``phi`` (exact exponential)."""
        phi = np.asarray(phi, dtype=float)
        n = np.linalg.norm(phi)
        if n < 1e-300:
            return cls.identity()
        return cls.from_scalar_vector(np.cos(n / 2.0), (np.sin(n / 2.0) / n) * phi)

    @classmethod
    def from_dcm(cls, C) -> "Quaternion":
        return cls(quat_from_dcm(C))

    # -- accessors ----------------------------------------------------------
    @property
    def s(self) -> float:
        return float(self.wxyz[0])

    @property
    def v(self) -> np.ndarray:
        return np.array(self.wxyz[1:])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.wxyz))

    # -- operations ----------------------------------------------------------
    def mul(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(quat_mul_arr(self.wxyz, other.wxyz))

    def conjugate(self) -> "Quaternion":
        return Quaternion(quat_conj_arr(self.wxyz))

    def normalized(self) -> "Quaternion":
        return Quaternion(self.wxyz / self.norm)

    def is_unit(self, tol: float = UNIT_TOL) -> bool:
        return abs(self.norm - 1.0) <= tol

    def dcm(self) -> np.ndarray:
        return dcm_from_quat(self.wxyz)

    def rotate_frame(self, r) -> np.ndarray:
        """Re-express a vector through ``q* o r o q``; requires unit norm."""
        if not self.is_unit():
            raise NonUnitQuaternion(f"norm deviates by {abs(self.norm - 1.0):.3e}")
        return quat_rotate_frame_arr(self.wxyz, np.asarray(r, dtype=float))

    # -- dunders -------------------------------------------------------------
    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return self.mul(other)
        return Quaternion(self.wxyz * float(other))

    def __rmul__(self, other):
        return Quaternion(self.wxyz * float(other))

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.wxyz + other.wxyz)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.wxyz - other.wxyz)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.wxyz)


@dataclass(frozen=True)
class DualQuaternion:
    """Dual quaternion ``real + eps * dual`` with eps^2 = 0."""

    real: Quaternion
    dual: Quaternion

    @classmethod
    def identity(cls) -> "DualQuaternion":
        return cls(Quaternion.identity(), Quaternion.vector([0.0, 0.0, 0.0]))

    def mul(self, other: "DualQuaternion") -> "DualQuaternion":
        return DualQuaternion(
            self.real.mul(other.real),
            self.real.mul(other.dual) + self.dual.mul(other.real),
        )

    def conjugate(self) -> "DualQuaternion":
        return DualQuaternion(self.real.conjugate(), self.dual.conjugate())

    def is_unit(self, tol: float = UNIT_TOL) -> bool:
        # unit: real part unit-norm and dual orthogonal to real
        # (zero scalar of dual o real*).
        residue = self.dual.mul(self.real.conjugate()).s
        return self.real.is_unit(tol) and abs(residue) <= tol * max(1.0, self.dual.norm)

    def __mul__(self, other):
        if isinstance(other, DualQuaternion):
            return self.mul(other)
        return DualQuaternion(self.real * float(other), self.dual * float(other))

    def __add__(self, other: "DualQuaternion") -> "DualQuaternion":
        return DualQuaternion(self.real + other.real, self.dual + other.dual)

    def __sub__(self, other: "DualQuaternion") -> "DualQuaternion":
        return DualQuaternion(self.real - other.real, self.dual - other.dual)


@dataclass(frozen=True)
class TridentNumber:
    """Scalar ``a0 + e1*a1 + e2*a2`` over the nilpotent pair (e1, e2)."""

    a0: float
    a1: float
    a2: float

    def __add__(self, other: "TridentNumber") -> "TridentNumber":
        return TridentNumber(self.a0 + other.a0, self.a1 + other.a1, self.a2 + other.a2)

    def __sub__(self, other: "TridentNumber") -> "TridentNumber":
        return TridentNumber(self.a0 - other.a0, self.a1 - other.a1, self.a2 - other.a2)

    def __mul__(self, other):
        if isinstance(other, TridentNumber):
            return TridentNumber(
                self.a0 * other.a0,
                self.a0 * other.a1 + self.a1 * other.a0,
                self.a0 * other.a2 + self.a2 * other.a0,
            )
        k = float(other)
        return TridentNumber(k * self.a0, k * self.a1, k * self.a2)

    def __rmul__(self, other):
        return self.__mul__(other)


@dataclass(frozen=True)
class TridentQuaternion:
    """Trident quaternion ``q + e1*q1 + e2*q2``.

    In the navigation embedding the real part carries attitude, q1 the total
    velocity translation and q2 the position translation.
    """

    q: Quaternion
    q1: Quaternion
    q2: Quaternion

    @classmethod
    def identity(cls) -> "TridentQuaternion":
        zero = Quaternion.vector([0.0, 0.0, 0.0])
        return cls(Quaternion.identity(), zero, zero)

    @classmethod
    def from_packed(cls, arr) -> "TridentQuaternion":
        arr = np.asarray(arr, dtype=float)
        if arr.shape != (3, 4):
            raise ValueError("packed trident quaternion must have shape (3, 4)")
        return cls(Quaternion(arr[0]), Quaternion(arr[1]), Quaternion(arr[2]))

    @property
    def packed(self) -> np.ndarray:
        return np.stack([self.q.wxyz, self.q1.wxyz, self.q2.wxyz])

    def mul(self, other: "TridentQuaternion") -> "TridentQuaternion":
        return TridentQuaternion.from_packed(tq_mul_arr(self.packed, other.packed))

    def conjugate(self) -> "TridentQuaternion":
        return TridentQuaternion(self.q.conjugate(), self.q1.conjugate(), self.q2.conjugate())

    def is_unit(self, tol: float = UNIT_TOL) -> bool:
        """Unit structure: unit real part, imaginary parts orthogonal to it.

        Orthogonality means the scalar parts of q1 o q* and q2 o q* vanish,
        which is what the translation embedding guarantees.
        """
        if not self.q.is_unit(tol):
            return False
        r1 = self.q1.mul(self.q.conjugate()).s
        r2 = self.q2.mul(self.q.conjugate()).s
        return abs(r1) <= tol * max(1.0, self.q1.norm) and abs(r2) <= tol * max(
            1.0, self.q2.norm
        )

    def __mul__(self, other):
        if isinstance(other, TridentQuaternion):
            return self.mul(other)
        k = float(other)
        return TridentQuaternion(self.q * k, self.q1 * k, self.q2 * k)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __add__(self, other: "TridentQuaternion") -> "TridentQuaternion":
        return TridentQuaternion(self.q + other.q, self.q1 + other.q1, self.q2 + other.q2)

    def __sub__(self, other: "TridentQuaternion") -> "TridentQuaternion":
        return TridentQuaternion(self.q - other.q, self.q1 - other.q1, self.q2 - other.q2)
