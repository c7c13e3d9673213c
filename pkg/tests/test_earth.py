import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tqnav.earth import (
    EarthModel,
    GeodeticPosition,
    c_en,
    curvature_matrix,
    ecef_to_geodetic,
    geodetic_to_ecef,
    gravitation_e,
    gravitation_e_many,
    local_frame_axes,
    local_gravity_e,
    meridian_radius,
    normal_gravity,
    transverse_radius,
)
from tqnav.errors import NearSingularPosition, PolarSingularity


def somigliana_oracle(lat):
    """Independent normal-gravity evaluation from first-constant WGS-84 form."""
    ge, gp = 9.7803253359, 9.8321849378
    a, f = 6378137.0, 1.0 / 298.257223563
    b = a * (1 - f)
    e2 = f * (2 - f)
    k = (b * gp - a * ge) / (a * ge)
    s2 = math.sin(lat) ** 2
    return ge * (1 + k * s2) / math.sqrt(1 - e2 * s2)


class TestGravity:
    def test_equator_surface_magnitude(self, wgs84):
        r = np.array([wgs84.semi_major_axis, 0.0, 0.0])
        g = gravitation_e(r, wgs84)
        # oracle: normal gravity plus centrifugal restoration at the equator
        expect = somigliana_oracle(0.0) + wgs84.rotation_rate**2 * wgs84.semi_major_axis
        assert abs(np.linalg.norm(g) - 9.81) < 0.04
        assert abs(np.linalg.norm(g) - expect) < 1e-9

    def test_equator_direction(self, wgs84):
        r = np.array([wgs84.semi_major_axis, 0.0, 0.0])
        g = gravitation_e(r, wgs84)
        cosang = -g[0] / np.linalg.norm(g)
        assert math.acos(min(1.0, cosang)) < np.deg2rad(0.2)

    def test_pole_local_equals_gravitation(self, wgs84):
        r = np.array([0.0, 0.0, wgs84.semi_minor_axis])
        g = gravitation_e(r, wgs84)
        g_l = local_gravity_e(r, wgs84)
        assert_allclose(g, g_l, atol=0.0)  # centrifugal vanishes on the spin axis

    def test_local_gravity_identity(self, wgs84, rng):
        # g_l = g - omega x (omega x r) must hold between the two paths
        for _ in range(20):
            p = GeodeticPosition(rng.uniform(-1.4, 1.4), rng.uniform(-np.pi, np.pi), rng.uniform(0, 2e4))
            r = geodetic_to_ecef(p, wgs84)
            w = wgs84.rotation_vector
            lhs = local_gravity_e(r, wgs84)
            rhs = gravitation_e(r, wgs84) - np.cross(w, np.cross(w, r))
            assert_allclose(lhs, rhs, atol=1e-12)

    def test_near_center_rejected(self, wgs84):
        with pytest.raises(NearSingularPosition):
            gravitation_e(np.array([1000.0, 0.0, 0.0]), wgs84)

    def test_vectorized_matches_scalar(self, wgs84, rng):
        pts = []
        for _ in range(8):
            p = GeodeticPosition(rng.uniform(-1.2, 1.2), rng.uniform(-3, 3), rng.uniform(0, 1e4))
            pts.append(geodetic_to_ecef(p, wgs84))
        pts = np.array(pts)
        batch = gravitation_e_many(pts, wgs84)
        for k in range(len(pts)):
            assert_allclose(batch[k], gravitation_e(pts[k], wgs84), atol=1e-12)

    def test_vacuum_is_gravity_free(self, vacuum):
        assert_allclose(local_gravity_e(np.array([1.0, 2.0, 3.0]), vacuum), np.zeros(3))
        assert normal_gravity(GeodeticPosition(0.3, 0.1, 100.0), vacuum) == 0.0

    def test_free_air_height_dependence(self, wgs84):
        p0 = GeodeticPosition(0.7, 0.0, 0.0)
        p1 = GeodeticPosition(0.7, 0.0, 1000.0)
        drop = normal_gravity(p0, wgs84) - normal_gravity(p1, wgs84)
        # free-air gradient is about 3.086e-6 (m/s^2)/m
        assert abs(drop - 3.086e-3) < 2e-5


class TestCurvature:
    def test_structure_at_equator(self, wgs84):
        p = GeodeticPosition(0.0, 0.0, 0.0)
        M = curvature_matrix(p, wgs84)
        assert_allclose(M[0, 2], 1.0 / wgs84.semi_major_axis, atol=0.0)
        assert M[2, 1] == 1.0
        for idx in ((0, 0), (0, 1), (1, 1), (1, 2), (2, 0), (2, 2)):
            assert M[idx] == 0.0

    def test_radii_formulas(self, wgs84, rng):
        for _ in range(10):
            lat = rng.uniform(-1.4, 1.4)
            p = GeodeticPosition(lat, 0.0, 0.0)
            e2 = wgs84.eccentricity_sq
            s2 = math.sin(lat) ** 2
            assert_allclose(transverse_radius(p, wgs84), wgs84.semi_major_axis / math.sqrt(1 - e2 * s2))
            assert_allclose(
                meridian_radius(p, wgs84),
                wgs84.semi_major_axis * (1 - e2) / (1 - e2 * s2) ** 1.5,
            )

    def test_polar_singularity(self, wgs84):
        with pytest.raises(PolarSingularity):
            curvature_matrix(GeodeticPosition(np.pi / 2, 0.0, 0.0), wgs84)

    def test_position_rate_consistency(self, wgs84, rng):
        # finite-difference geodetic motion along a straight e-frame track
        # matches R_c @ v^n to first order
        p = GeodeticPosition(0.6, 0.8, 500.0)
        v_n = np.array([30.0, 5.0, -20.0])
        north, up, east = local_frame_axes(p)
        v_e = v_n[0] * north + v_n[1] * up + v_n[2] * east
        dt = 1e-3
        r2 = geodetic_to_ecef(p, wgs84) + dt * v_e
        p2 = ecef_to_geodetic(r2, wgs84)
        fd = np.array([(p2.lon - p.lon) / dt, (p2.lat - p.lat) / dt, (p2.height - p.height) / dt])
        assert_allclose(fd, curvature_matrix(p, wgs84) @ v_n, rtol=1e-5, atol=1e-9)


class TestGeodeticConversion:
    def test_equator_prime_meridian(self, wgs84):
        r = geodetic_to_ecef(GeodeticPosition(0.0, 0.0, 0.0), wgs84)
        assert_allclose(r, [wgs84.semi_major_axis, 0.0, 0.0], atol=0.0)

    def test_pole(self, wgs84):
        r = geodetic_to_ecef(GeodeticPosition(np.pi / 2, 0.3, 0.0), wgs84)
        assert_allclose(r, [0.0, 0.0, wgs84.semi_minor_axis], atol=1e-9)

    def test_round_trip(self, wgs84, rng):
        for _ in range(50):
            p = GeodeticPosition(
                rng.uniform(-np.pi / 2 + 0.01, np.pi / 2 - 0.01),
                rng.uniform(-np.pi + 0.01, np.pi - 0.01),
                rng.uniform(-5e3, 5e4),
            )
            back = ecef_to_geodetic(geodetic_to_ecef(p, wgs84), wgs84)
            assert abs(back.lat - p.lat) < 1e-12
            assert abs(back.lon - p.lon) < 1e-12
            assert abs(back.height - p.height) < 1e-6


class TestLocalFrame:
    def test_earth_rate_has_no_east_component(self, wgs84, rng):
        for _ in range(20):
            p = GeodeticPosition(rng.uniform(-1.4, 1.4), rng.uniform(-3, 3), 0.0)
            w_n = c_en(p).rotate_frame(wgs84.rotation_vector)
            assert abs(w_n[2]) < 1e-18  # (north, up, east) order

    def test_up_axis_at_origin(self, wgs84):
        q = c_en(GeodeticPosition(0.0, 0.0, 0.0))
        assert abs(q.norm - 1.0) < 1e-15
        assert_allclose(q.rotate_frame([1.0, 0.0, 0.0]), [0.0, 1.0, 0.0], atol=1e-15)

    def test_unit_norm_everywhere(self, rng):
        for _ in range(50):
            p = GeodeticPosition(rng.uniform(-1.5, 1.5), rng.uniform(-np.pi, np.pi), 0.0)
            assert abs(c_en(p).norm - 1.0) < 1e-15

    def test_right_handed_axes(self, rng):
        p = GeodeticPosition(0.4, -1.1, 0.0)
        north, up, east = local_frame_axes(p)
        assert_allclose(np.cross(north, up), east, atol=1e-15)
