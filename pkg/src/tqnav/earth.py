"""Ellipsoidal earth model: rotation, gravity, curvature and frame plumbing.

The gravity model is Somigliana normal gravity on the reference ellipsoid
with a free-air height correction. Normal gravity is by construction the
*local* gravity (mass attraction plus centrifugal) directed along the inward
ellipsoid normal; the pure mass-attraction vector is obtained by adding the
centrifugal acceleration back. Using one underlying model on both the
simulation and navigation sides keeps algorithm comparisons free of
gravity-model mismatch.

The local-level frame used throughout is (north, up, east), which is
right-handed with north x up = east.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import Quaternion
from .errors import ConvergenceFailure, NearSingularPosition, PolarSingularity


@dataclass(frozen=True)
class EarthModel:
    """Ellipsoid constants and normal-gravity parameters."""

    semi_major_axis: float  # m
    flattening: float
    rotation_rate: float  # rad/s
    gamma_equator: float  # normal gravity at the equator, m/s^2
    gamma_pole: float  # normal gravity at the poles, m/s^2
    gm: float  # gravitational constant times earth mass, m^3/s^2

    @classmethod
    def wgs84(cls) -> "EarthModel":
        return cls(
            semi_major_axis=6378137.0,
            flattening=1.0 / 298.257223563,
            rotation_rate=7.292115e-5,
            gamma_equator=9.7803253359,
            gamma_pole=9.8321849378,
            gm=3.986004418e14,
        )

    @classmethod
    def vacuum(cls) -> "EarthModel":
        """Non-rotating, gravity-free variant for isolated kinematics tests."""
        base = cls.wgs84()
        return cls(
            semi_major_axis=base.semi_major_axis,
            flattening=base.flattening,
            rotation_rate=0.0,
            gamma_equator=0.0,
            gamma_pole=0.0,
            gm=base.gm,
        )

    @property
    def semi_minor_axis(self) -> float:
        return self.semi_major_axis * (1.0 - self.flattening)

    @property
    def eccentricity_sq(self) -> float:
        return self.flattening * (2.0 - self.flattening)

    @property
    def rotation_vector(self) -> np.ndarray:
        return np.array([0.0, 0.0, self.rotation_rate])


@dataclass(frozen=True)
class GeodeticPosition:
    """Latitude, longitude (rad) and ellipsoidal height (m)."""

    lat: float
    lon: float
    height: float

    def __post_init__(self):
        if abs(self.lat) > np.pi / 2 + 1e-12:
            raise ValueError("latitude outside [-pi/2, pi/2]")
        if abs(self.lon) > np.pi + 1e-12:
            raise ValueError("longitude outside [-pi, pi]")


# ---------------------------------------------------------------------------
# radii and curvature
# ---------------------------------------------------------------------------

def transverse_radius(p: GeodeticPosition, model: EarthModel) -> float:
    """Prime-vertical (transverse) radius of curvature R_E."""
    s = np.sin(p.lat)
    return model.semi_major_axis / np.sqrt(1.0 - model.eccentricity_sq * s * s)


def meridian_radius(p: GeodeticPosition, model: EarthModel) -> float:
    """Meridian radius of curvature R_N."""
    s = np.sin(p.lat)
    d = 1.0 - model.eccentricity_sq * s * s
    return model.semi_major_axis * (1.0 - model.eccentricity_sq) / d**1.5


def curvature_matrix(p: GeodeticPosition, model: EarthModel) -> np.ndarray:
    """Position-rate matrix mapping (north, up, east) velocity to
    (lon, lat, height) rates.

    Only three entries are populated: d(lon)/dt couples to east velocity
    through 1/((R_E + h) cos L), d(lat)/dt to north velocity through
    1/(R_N + h), and d(height)/dt is the up velocity.
    """
    c = np.cos(p.lat)
    if abs(c) <= 1e-9:
        raise PolarSingularity("curvature matrix undefined at the poles")
    out = np.zeros((3, 3))
    out[0, 2] = 1.0 / ((transverse_radius(p, model) + p.height) * c)
    out[1, 0] = 1.0 / (meridian_radius(p, model) + p.height)
    out[2, 1] = 1.0
    return out


# ---------------------------------------------------------------------------
# geodetic <-> ECEF
# ---------------------------------------------------------------------------

def geodetic_to_ecef(p: GeodeticPosition, model: EarthModel) -> np.ndarray:
    sl, cl = np.sin(p.lat), np.cos(p.lat)
    so, co = np.sin(p.lon), np.cos(p.lon)
    re = transverse_radius(p, model)
    return np.array(
        [
            (re + p.height) * cl * co,
            (re + p.height) * cl * so,
            (re * (1.0 - model.eccentricity_sq) + p.height) * sl,
        ]
    )


def _geodetic_scalars(x: float, y: float, z: float, model: EarthModel, max_iter: int = 20):
    """(lat, lon, height) floats via latitude fixed-point iteration."""
    rho = math.hypot(x, y)
    if rho + abs(z) == 0.0:
        raise NearSingularPosition("cannot invert the earth's center")
    e2 = model.eccentricity_sq
    lon = math.atan2(y, x)
    lat = math.atan2(z, rho * (1.0 - e2))
    height = 0.0
    for _ in range(max_iter):
        s = math.sin(lat)
        re = model.semi_major_axis / math.sqrt(1.0 - e2 * s * s)
        c = math.cos(lat)
        if abs(c) > 1e-12:
            height_new = rho / c - re
        else:
            height_new = abs(z) - re * (1.0 - e2)
        lat_new = math.atan2(z, rho * (1.0 - e2 * re / (re + height_new)))
        if abs(lat_new - lat) < 1e-14 and abs(height_new - height) < 1e-9:
            return lat_new, lon, height_new
        lat, height = lat_new, height_new
    raise ConvergenceFailure("geodetic inverse did not converge")


def ecef_to_geodetic(r_e, model: EarthModel, max_iter: int = 20) -> GeodeticPosition:
    """Iterative inverse of :func:`geodetic_to_ecef` (fixed-point on latitude)."""
    r_e = np.asarray(r_e, dtype=float)
    lat, lon, height = _geodetic_scalars(r_e[0], r_e[1], r_e[2], model, max_iter)
    return GeodeticPosition(lat, lon, height)


# ---------------------------------------------------------------------------
# local-level frame
# ---------------------------------------------------------------------------

def local_frame_axes(p: GeodeticPosition):
    """Unit (north, up, east) axes expressed in e-frame coordinates."""
    sl, cl = np.sin(p.lat), np.cos(p.lat)
    so, co = np.sin(p.lon), np.cos(p.lon)
    north = np.array([-sl * co, -sl * so, cl])
    up = np.array([cl * co, cl * so, sl])
    east = np.array([-so, co, 0.0])
    return north, up, east


def c_en(p: GeodeticPosition) -> Quaternion:
    """Attitude quaternion of the (north, up, east) frame w.r.t. e-frame.

    Conjugation ``q* o r^e o q`` re-expresses e-frame coordinates in the
    local-level frame.
    """
    north, up, east = local_frame_axes(p)
    return Quaternion.from_dcm(np.stack([north, up, east]))


# ---------------------------------------------------------------------------
# gravity
# ---------------------------------------------------------------------------

def normal_gravity(p: GeodeticPosition, model: EarthModel) -> float:
    """Somigliana normal gravity with a free-air height correction (m/s^2)."""
    if model.gamma_equator == 0.0:
        return 0.0
    a = model.semi_major_axis
    b = model.semi_minor_axis
    s2 = math.sin(p.lat) ** 2
    k = (b * model.gamma_pole - a * model.gamma_equator) / (a * model.gamma_equator)
    gamma0 = model.gamma_equator * (1.0 + k * s2) / math.sqrt(1.0 - model.eccentricity_sq * s2)
    m = model.rotation_rate**2 * a * a * b / model.gm
    f = model.flattening
    corr = 1.0 - 2.0 * (1.0 + f + m - 2.0 * f * s2) * p.height / a + 3.0 * (p.height / a) ** 2
    return gamma0 * corr


def local_gravity_e(r_e, model: EarthModel) -> np.ndarray:
    """Local gravity vector (attraction + centrifugal) in e-frame coordinates.

    Directed along the inward ellipsoid normal at the query point, with
    magnitude from :func:`normal_gravity`. Identically zero for gravity-free
    model variants.
    """
    r_e = np.asarray(r_e, dtype=float)
    if model.gamma_equator == 0.0:
        return np.zeros(3)
    x, y, z = r_e.tolist()
    if x * x + y * y + z * z <= (0.5 * model.semi_major_axis) ** 2:
        raise NearSingularPosition("gravity query too close to the earth's center")
    lat, lon, height = _geodetic_scalars(x, y, z, model)
    gamma = normal_gravity(GeodeticPosition(lat, lon, height), model)
    cl = math.cos(lat)
    return -gamma * np.array([cl * math.cos(lon), cl * math.sin(lon), math.sin(lat)])


def gravitation_e(r_e, model: EarthModel) -> np.ndarray:
    """Mass-attraction acceleration in e-frame (no centrifugal content).

    Related to the local gravity by g_l = g - omega x (omega x r); the two
    code paths agree exactly because this function is defined through that
    identity.
    """
    r_e = np.asarray(r_e, dtype=float)
    omega = model.rotation_vector
    return local_gravity_e(r_e, model) + np.cross(omega, np.cross(omega, r_e))


def gravitation_e_many(points, model: EarthModel, max_iter: int = 20) -> np.ndarray:
    """Vectorized :func:`gravitation_e` over an (n, 3) array of positions.

    The solver samples gravity at a handful of Chebyshev nodes every
    iteration; batching the geodetic inversion keeps that loop cheap.
    """
    r = np.asarray(points, dtype=float)
    if model.gamma_equator == 0.0 and model.rotation_rate == 0.0:
        return np.zeros_like(r)
    norms = np.linalg.norm(r, axis=1)
    if np.any(norms <= 0.5 * model.semi_major_axis):
        raise NearSingularPosition("gravity query too close to the earth's center")
    rho = np.hypot(r[:, 0], r[:, 1])
    z = r[:, 2]
    e2 = model.eccentricity_sq
    lat = np.arctan2(z, rho * (1.0 - e2))
    height = np.zeros_like(lat)
    for _ in range(max_iter):
        s = np.sin(lat)
        re = model.semi_major_axis / np.sqrt(1.0 - e2 * s * s)
        c = np.cos(lat)
        height_new = np.where(
            np.abs(c) > 1e-12, rho / np.maximum(np.abs(c), 1e-300) - re,
            np.abs(z) - re * (1.0 - e2),
        )
        lat_new = np.arctan2(z, rho * (1.0 - e2 * re / (re + height_new)))
        done = np.all(np.abs(lat_new - lat) < 1e-14) and np.all(
            np.abs(height_new - height) < 1e-9
        )
        lat, height = lat_new, height_new
        if done:
            break
    else:
        raise ConvergenceFailure("geodetic inverse did not converge")
    lon = np.arctan2(r[:, 1], r[:, 0])
    sl, cl = np.sin(lat), np.cos(lat)
    so, co = np.sin(lon), np.cos(lon)
    up = np.stack([cl * co, cl * so, sl], axis=1)
    if model.gamma_equator == 0.0:
        gamma = np.zeros_like(lat)
    else:
        a = model.semi_major_axis
        b = model.semi_minor_axis
        s2 = sl * sl
        k = (b * model.gamma_pole - a * model.gamma_equator) / (a * model.gamma_equator)
        gamma0 = model.gamma_equator * (1.0 + k * s2) / np.sqrt(1.0 - e2 * s2)
        m = model.rotation_rate**2 * a * a * b / model.gm
        f = model.flattening
        gamma = gamma0 * (
            1.0 - 2.0 * (1.0 + f + m - 2.0 * f * s2) * height / a + 3.0 * (height / a) ** 2
        )
    g_l = -gamma[:, None] * up
    omega = model.rotation_vector
    return g_l + np.cross(omega, np.cross(omega, r))
