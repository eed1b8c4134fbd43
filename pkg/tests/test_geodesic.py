import numpy as np
import pytest

from fagc import (
    DegenerateGeodesic,
    NotUnitNorm,
    ParamOutOfRange,
    curve_between,
    curve_point,
    geodesic_distance,
    point_to_curve_distance,
)
from conftest import arc_points, orthonormal_frame, random_unit


def random_curve(dim, rng, max_theta=2.8):
    a, b = orthonormal_frame(dim, rng)
    t = rng.uniform(0.2, max_theta)
    return curve_between(a, np.cos(t) * a + np.sin(t) * b)


def grid_search_distance(z, curve, grid=10_001):
    # independent oracle: best inner product over a dense parameter grid
    s = np.linspace(0.0, curve.theta, grid)
    pts = np.cos(s)[:, None] * curve.v_star + np.sin(s)[:, None] * curve.tangent
    return float(np.arccos(np.clip(np.max(pts @ z), -1.0, 1.0)))


class TestCurveBetween:
    def test_invariants(self, rng):
        for _ in range(100):
            c = random_curve(int(rng.integers(3, 24)), rng)
            assert np.linalg.norm(c.tangent) == pytest.approx(1.0, abs=1e-9)
            assert np.dot(c.v_star, c.tangent) == pytest.approx(0.0, abs=1e-9)
            assert 1e-9 < c.theta < np.pi - 1e-9
            np.testing.assert_allclose(curve_point(c, 0.0), c.v_star, atol=1e-9)
            np.testing.assert_allclose(curve_point(c, c.theta), c.w_star, atol=1e-9)

    def test_coincident_endpoints(self, rng):
        v = random_unit(6, rng)
        with pytest.raises(DegenerateGeodesic):
            curve_between(v, v.copy())

    def test_antipodal_endpoints(self, rng):
        v = random_unit(6, rng)
        with pytest.raises(DegenerateGeodesic):
            curve_between(v, -v)

    def test_rejects_non_unit(self):
        with pytest.raises(NotUnitNorm):
            curve_between([1.0, 1.0], [1.0, 0.0])


class TestCurvePoint:
    def test_quarter_arc_midpoint(self):
        c = curve_between([1.0, 0.0], [0.0, 1.0])
        s = np.sqrt(2) / 2
        np.testing.assert_allclose(curve_point(c, np.pi / 4), [s, s], atol=1e-15)

    @pytest.mark.parametrize("s", [-1e-6, 3.2])
    def test_param_out_of_range(self, s):
        c = curve_between([1.0, 0.0], [0.0, 1.0])
        with pytest.raises(ParamOutOfRange):
            curve_point(c, s)

    def test_point_identities(self, rng):
        for _ in range(200):
            c = random_curve(int(rng.integers(2, 16)), rng)
            s = rng.uniform(0.0, c.theta)
            p = curve_point(c, s)
            assert np.linalg.norm(p) == pytest.approx(1.0, abs=1e-9)
            assert geodesic_distance(c.v_star, p) == pytest.approx(s, abs=1e-9)


class TestPointToCurve:
    def test_point_on_arc(self, rng):
        c = random_curve(8, rng)
        z = curve_point(c, c.theta / 2)
        assert point_to_curve_distance(z, c) < 1e-12

    def test_orthogonal_point(self):
        c = curve_between([1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0])
        assert point_to_curve_distance(np.array([0.0, 0.0, 1.0, 0.0]), c) == pytest.approx(
            np.pi / 2
        )

    def test_endpoint_clamping(self, rng):
        # a point just "behind" v* must clamp to the nearer endpoint
        a, b = orthonormal_frame(6, rng)
        c = curve_between(*arc_points(a, b, [0.3, 1.4]))
        z = arc_points(a, b, [0.1])[0]
        assert point_to_curve_distance(z, c) == pytest.approx(0.2, abs=1e-12)

    def test_matches_grid_oracle(self, rng):
        for _ in range(100):
            dim = int(rng.integers(3, 16))
            c = random_curve(dim, rng)
            z = random_unit(dim, rng)
            got = point_to_curve_distance(z, c)
            assert got == pytest.approx(grid_search_distance(z, c), abs=1e-3)

    def test_rejects_non_unit(self, rng):
        c = random_curve(4, rng)
        with pytest.raises(NotUnitNorm):
            point_to_curve_distance(np.array([2.0, 0.0, 0.0, 0.0]), c)
