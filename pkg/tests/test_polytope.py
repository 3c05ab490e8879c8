"""Outline validation and momentum-map synthesis tests."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polylab import polytope

SQ2 = math.sqrt(2.0)

speed_strategy = st.floats(min_value=0.2, max_value=5.0, allow_nan=False)
coord_strategy = st.floats(min_value=-4.0, max_value=4.0, allow_nan=False)
x_strategy = st.floats(min_value=0.05, max_value=8.0, allow_nan=False)


def two_corner_outline(v1=1.0, v2=1.0, v3=1.0, alpha=0.0, beta=0.0):
    """Compact two-corner outline from (0,1) to (1,0) with axis rays."""
    return polytope.OutlineSpec(
        vertices=((0.0, 1.0), (1.0, 0.0)),
        ray_in=(0.0, -1.0),
        ray_out=(1.0, 0.0),
        speeds=(v1, v2, v3),
        alpha=alpha,
        beta=beta,
    )


def one_corner_outline(v1=1.0, v2=1.0):
    return polytope.OutlineSpec(
        vertices=((0.0, 0.0),),
        ray_in=(0.0, -1.0),
        ray_out=(1.0, 0.0),
        speeds=(v1, v2),
    )


class TestValidateOutline:
    def test_one_corner_kink_at_origin(self):
        vo = polytope.validate_outline(one_corner_outline())
        np.testing.assert_allclose(vo.kink_y, [0.0], atol=0)

    def test_two_corner_kink_heights(self):
        vo = polytope.validate_outline(two_corner_outline(v2=0.7))
        # second kink sits one edge length over the edge speed further on
        np.testing.assert_allclose(vo.kink_y, [0.0, SQ2 / 0.7], rtol=1e-15)

    def test_collinear_corner_rejected_with_index(self):
        spec = polytope.OutlineSpec(
            vertices=((0.0, 1.0), (1.0, 0.0), (2.0, -1.0)),
            ray_in=(0.0, -1.0),
            ray_out=(1.0, 0.0),
            speeds=(1.0, 1.0, 1.0, 1.0),
        )
        with pytest.raises(polytope.NonConvexError) as err:
            polytope.validate_outline(spec)
        assert err.value.index == 1

    def test_turn_direction_flip_rejected(self):
        # the third corner bends back the other way
        spec = polytope.OutlineSpec(
            vertices=((0.0, 1.0), (1.0, 0.0), (2.0, 0.5)),
            ray_in=(0.0, -1.0),
            ray_out=(1.0, 0.0),
            speeds=(1.0, 1.0, 1.0, 1.0),
        )
        with pytest.raises(polytope.NonConvexError):
            polytope.validate_outline(spec)

    def test_zero_speed_rejected(self):
        with pytest.raises(polytope.ZeroSpeedError):
            polytope.validate_outline(two_corner_outline(v2=0.0))

    def test_wrong_speed_count_rejected(self):
        spec = polytope.OutlineSpec(
            vertices=((0.0, 1.0), (1.0, 0.0)),
            ray_in=(0.0, -1.0),
            ray_out=(1.0, 0.0),
            speeds=(1.0, 1.0),
        )
        with pytest.raises(polytope.OutlineError):
            polytope.validate_outline(spec)

    def test_non_unit_ray_rejected(self):
        spec = polytope.OutlineSpec(
            vertices=((0.0, 1.0), (1.0, 0.0)),
            ray_in=(0.0, -2.0),
            ray_out=(1.0, 0.0),
            speeds=(1.0, 1.0, 1.0),
        )
        with pytest.raises(polytope.BadNormalizationError):
            polytope.validate_outline(spec)

    def test_first_corner_must_be_pinned(self):
        spec = polytope.OutlineSpec(
            vertices=((0.0, 2.0), (1.0, 0.0)),
            ray_in=(0.0, -1.0),
            ray_out=(1.0, 0.0),
            speeds=(1.0, 1.0, 1.0),
        )
        with pytest.raises(polytope.BadNormalizationError):
            polytope.validate_outline(spec)

    def test_parameter_count_is_speeds_plus_two(self):
        assert polytope.parameter_count(two_corner_outline()) == 5
        assert polytope.parameter_count(one_corner_outline()) == 4
        vo = polytope.validate_outline(two_corner_outline())
        assert polytope.parameter_count(vo) == 5


class TestBuiltinMaps:
    def test_halfplane_point_value(self):
        m = polytope.halfplane()
        assert polytope.eval_map(m, 2.0, 3.0) == (2.0, 3.0)

    def test_halfplane_jacobian(self):
        m = polytope.halfplane()
        for x, y in [(0.5, -2.0), (1.0, 0.0), (3.0, 4.0)]:
            jac = polytope.eval_jacobian(m, x, y)
            np.testing.assert_allclose(
                jac.as_matrix(), [[x, 0.0], [0.0, 1.0]], atol=1e-15)

    def test_quarter_boundary_values(self):
        m = polytope.quarter(0.0, 0.0)
        np.testing.assert_allclose(
            polytope.eval_map(m, 0.0, 1.0), (0.0, SQ2), atol=1e-15)
        np.testing.assert_allclose(
            polytope.eval_map(m, 0.0, -1.0), (SQ2, 0.0), atol=1e-15)

    def test_quarter_closed_form(self):
        m = polytope.quarter(0.0, 0.0)
        rng = np.random.default_rng(3)
        for _ in range(50):
            x = rng.uniform(0.05, 5.0)
            y = rng.uniform(-5.0, 5.0)
            rho = math.hypot(x, y)
            p1, p2 = polytope.eval_map(m, x, y)
            assert abs(p1 - (-y + rho) / SQ2) < 1e-13
            assert abs(p2 - (y + rho) / SQ2) < 1e-13

    def test_quarter_jacobian_at_unit_point(self):
        jac = polytope.eval_jacobian(polytope.quarter(0.0, 0.0), 1.0, 0.0)
        np.testing.assert_allclose(
            jac.as_matrix(),
            [[1.0 / SQ2, -1.0 / SQ2], [1.0 / SQ2, 1.0 / SQ2]],
            atol=1e-14,
        )
        assert abs(jac.det - 1.0) < 1e-14


class TestSynthesize:
    def test_two_corner_closed_form_coefficients(self):
        v1, v2, v3, alpha, beta = 1.3, 0.8, 2.1, 0.4, 0.9
        m = polytope.synthesize(two_corner_outline(v1, v2, v3, alpha, beta))
        s8 = v2 / (2.0 * SQ2)
        np.testing.assert_allclose(m.base, (0.0, 1.0), atol=0)
        assert abs(m.linear1 - 0.5 * v3) < 1e-14
        assert abs(m.linear2 + 0.5 * v1) < 1e-14
        assert abs(m.quad1 - 0.5 * alpha) < 1e-14
        assert abs(m.quad2 - 0.5 * beta) < 1e-14
        (k0, k1) = m.kinks
        assert k0.y0 == 0.0
        assert abs(k1.y0 - SQ2 / v2) < 1e-14
        assert abs(k0.jump1 - s8) < 1e-14
        assert abs(k0.jump2 - (0.5 * v1 - s8)) < 1e-14
        assert abs(k1.jump1 - (0.5 * v3 - s8)) < 1e-14
        assert abs(k1.jump2 - s8) < 1e-14

    def test_trace_follows_outline_edges(self):
        m = polytope.synthesize(two_corner_outline(0.5, 1.0, 2.0))
        # middle edge: linear interpolation from (0,1) toward (1,0)
        y_mid = 0.5 * SQ2
        p1, p2 = polytope.trace(m, y_mid)
        assert abs(p1 - 0.5) < 1e-13 and abs(p2 - 0.5) < 1e-13
        # before the first corner the trace rides ray_in at speed v1
        p1, p2 = polytope.trace(m, -2.0)
        assert abs(p1 - 0.0) < 1e-13 and abs(p2 - 2.0) < 1e-13

    def test_trace_matches_map_limit(self):
        m = polytope.synthesize(two_corner_outline(1.7, 0.6, 1.1, 0.3, 0.2))
        ys = np.linspace(-3.0, 4.0, 201)
        t1, t2 = polytope.trace(m, ys)
        e1, e2 = polytope.eval_map(m, np.full_like(ys, 1e-8), ys)
        np.testing.assert_allclose(t1, e1, atol=1e-12)
        np.testing.assert_allclose(t2, e2, atol=1e-12)

    def test_fd_jacobian_agreement(self):
        m = polytope.synthesize(two_corner_outline(1.2, 0.9, 0.7, 0.1, 0.5))
        rng = np.random.default_rng(11)
        h = 1e-6
        for _ in range(100):
            x = rng.uniform(0.2, 4.0)
            y = rng.uniform(-4.0, 4.0)
            jac = polytope.eval_jacobian(m, x, y).as_matrix()
            c1 = np.subtract(polytope.eval_map(m, x + h, y),
                             polytope.eval_map(m, x - h, y)) / (2 * h)
            c2 = np.subtract(polytope.eval_map(m, x, y + h),
                             polytope.eval_map(m, x, y - h)) / (2 * h)
            np.testing.assert_allclose(jac, np.column_stack([c1, c2]),
                                       atol=1e-6)

    def test_degenerate_jacobian_at_kink_corner(self):
        m = polytope.synthesize(two_corner_outline())
        with pytest.raises(ValueError):
            polytope.eval_jacobian(m, 0.0, 0.0)


class TestMapPdeResidual:
    @pytest.mark.parametrize("mp", [
        polytope.halfplane(),
        polytope.quarter(0.0, 0.0),
        polytope.quarter(1.0, 0.5),
        polytope.synthesize(two_corner_outline(1.4, 0.9, 2.2, 0.6, 0.1)),
    ])
    def test_components_satisfy_equation(self, mp):
        rng = np.random.default_rng(5)
        for _ in range(40):
            x = rng.uniform(0.1, 6.0)
            y = rng.uniform(-5.0, 5.0)
            r1, r2 = polytope.map_pde_residual(mp, x, y)
            assert abs(r1) < 1e-11 and abs(r2) < 1e-11


class TestOneVertexFamily:
    def brute_force_valid(self, a, b, c, d, alpha, beta):
        """det A factors as -(x/rho) times a form affine in (rho, y); the
        map is nondegenerate iff that form keeps one strict sign over the
        open half-plane."""
        det_m, det_n, det_k = polytope.one_vertex_dets(a, b, c, d, alpha, beta)
        rhos = np.geomspace(1e-6, 1e6, 121)
        us = np.linspace(-0.999, 0.999, 201)
        vals = det_m + det_n * rhos[:, None] + det_k * rhos[:, None] * us[None, :]
        return bool(np.min(vals) > 0.0 or np.max(vals) < 0.0)

    @pytest.mark.parametrize("args,expected", [
        ((-1.0 / SQ2, 1.0 / SQ2, 1.0 / SQ2, 1.0 / SQ2, 0.0, 0.0), True),
        ((-1.0 / SQ2, 1.0 / SQ2, 1.0 / SQ2, 1.0 / SQ2, 1.0, 1.0), True),
        ((-1.0 / SQ2, 1.0 / SQ2, 1.0 / SQ2, 1.0 / SQ2, -3.0, 0.0), False),
    ])
    def test_validity_against_brute_force(self, args, expected):
        assert polytope.validate_one_vertex(*args) is expected
        assert self.brute_force_valid(*args) is expected

    def test_valid_params_give_positive_jacobian(self):
        m = polytope.one_vertex_map(-1.0 / SQ2, 1.0 / SQ2, 1.0 / SQ2,
                                    1.0 / SQ2, 1.0, 1.0)
        rng = np.random.default_rng(9)
        for _ in range(50):
            x = rng.uniform(0.05, 5.0)
            y = rng.uniform(-5.0, 5.0)
            assert polytope.eval_jacobian(m, x, y).det > 0.0


class TestSerialization:
    def test_outline_dict_round_trip(self):
        spec = two_corner_outline(1.3, 0.8, 2.1, 0.4, 0.9)
        back = polytope.outline_from_dict(polytope.outline_to_dict(spec))
        assert back == spec

    def test_outline_file_round_trip(self, tmp_path):
        spec = two_corner_outline(0.7, 1.9, 0.3, 0.0, 1.2)
        path = tmp_path / "outline.json"
        polytope.save_outline(spec, path)
        assert polytope.load_outline(path) == spec

    def test_map_file_round_trip(self, tmp_path):
        m = polytope.synthesize(two_corner_outline(1.1, 0.5, 0.9, 0.2, 0.8))
        path = tmp_path / "map.json"
        polytope.save_map(m, path)
        back = polytope.load_map(path)
        assert back == m


class TestTraceProperties:
    @given(v1=speed_strategy, v2=speed_strategy, v3=speed_strategy,
           y1=coord_strategy, y2=coord_strategy)
    @settings(max_examples=60, deadline=None)
    def test_trace_is_lipschitz_with_max_speed(self, v1, v2, v3, y1, y2):
        m = polytope.synthesize(two_corner_outline(v1, v2, v3))
        p = np.array(polytope.trace(m, y1))
        q = np.array(polytope.trace(m, y2))
        bound = max(v1, v2, v3) * abs(y1 - y2)
        assert np.hypot(*(p - q)) <= bound + 1e-9 * (1.0 + bound)

    @given(v1=speed_strategy, v2=speed_strategy, v3=speed_strategy,
           x=x_strategy, y=coord_strategy)
    @settings(max_examples=60, deadline=None)
    def test_jacobian_determinant_never_vanishes(self, v1, v2, v3, x, y):
        m = polytope.synthesize(two_corner_outline(v1, v2, v3))
        assert abs(polytope.eval_jacobian(m, x, y).det) > 0.0
