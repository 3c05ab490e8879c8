"""Equation residuals, duality, coordinate change, barriers, and probes."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polylab import pde, specfun

point_x = st.floats(min_value=0.1, max_value=10.0, allow_nan=False)
point_y = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)
lam_strategy = st.floats(min_value=0.2, max_value=3.0, allow_nan=False)


def quadratic_field():
    return pde.ScalarField(
        f=lambda x, y: x * x,
        grad=lambda x, y: (2.0 * x, 0.0),
        hess=lambda x, y: (2.0, 0.0, 0.0),
    )


def monomial_field():
    # x^2 y solves the unmodified equation with zero separation constant
    return pde.ScalarField(
        f=lambda x, y: x * x * y,
        grad=lambda x, y: (2.0 * x * y, x * x),
        hess=lambda x, y: (2.0 * y, 2.0 * x, 0.0),
    )


class TestResidual:
    def test_quadratic_solves_unmodified(self):
        fld = quadratic_field()
        for x, y in [(0.3, -2.0), (1.0, 0.5), (7.0, 4.0)]:
            assert abs(pde.residual(fld, x, y, eq="unmodified")) < 1e-14

    def test_constant_solves_modified(self):
        fld = pde.ScalarField(f=lambda x, y: 1.0,
                              grad=lambda x, y: (0.0, 0.0),
                              hess=lambda x, y: (0.0, 0.0, 0.0))
        assert abs(pde.residual(fld, 2.0, -1.0, eq="modified")) < 1e-15

    def test_monomial_solves_unmodified(self):
        assert abs(pde.residual(monomial_field(), 1.3, 0.7,
                                eq="unmodified")) < 1e-12

    def test_step_solution_residual(self):
        def hess(x, y):
            rho5 = math.hypot(x, y) ** 5
            return (-y * (x * x + y * y - 3.0 * x * x) / (2.0 * rho5),
                    -x * (x * x + y * y - 3.0 * y * y) / (2.0 * rho5),
                    -3.0 * x * x * y / (2.0 * rho5))

        fld = pde.ScalarField(
            f=lambda x, y: 0.5 * (1.0 + y / math.hypot(x, y)),
            grad=lambda x, y: (-0.5 * x * y / math.hypot(x, y) ** 3,
                               0.5 * x * x / math.hypot(x, y) ** 3),
            hess=hess,
        )
        assert abs(pde.residual(fld, 1.0, 2.0, eq="unmodified")) < 1e-12
        assert abs(pde.residual(fld, 1.0, 2.0, eq="unmodified",
                                mode="fd")) < 1e-6

    def test_analytic_mode_needs_derivatives(self):
        fld = pde.ScalarField(f=lambda x, y: x * x)
        with pytest.raises(pde.MissingDerivatives):
            pde.residual(fld, 1.0, 0.0, eq="unmodified", mode="analytic")

    def test_unknown_equation_rejected(self):
        with pytest.raises(ValueError):
            pde.residual(quadratic_field(), 1.0, 0.0, eq="biharmonic")


class TestDualize:
    def test_quadratic_maps_to_constant(self):
        dual = pde.dualize(quadratic_field(), to="modified")
        for x, y in [(0.4, 1.0), (2.5, -3.0)]:
            assert abs(dual.f(x, y) - 1.0) < 1e-14

    def test_eigen_pair(self):
        fld = pde.ScalarField(f=lambda x, y: x * specfun.i1(x) * math.sin(y))
        dual = pde.dualize(fld, to="modified")
        x, y = 1.7, 0.9
        assert abs(dual.f(x, y) - specfun.i1(x) / x * math.sin(y)) < 1e-14

    def test_kernel_dual_closed_form(self):
        g = pde.ScalarField(
            f=lambda x, y: 0.5 * x * x * (x * x + y * y) ** -1.5)
        dual = pde.dualize(g, to="modified")
        x, y = 1.2, -0.7
        assert abs(dual.f(x, y) - 0.5 * (x * x + y * y) ** -1.5) < 1e-15

    def test_round_trip(self):
        fld = monomial_field()
        back = pde.dualize(pde.dualize(fld, to="modified"), to="unmodified")
        for x, y in [(0.5, 2.0), (3.0, -1.0)]:
            assert abs(back.f(x, y) - fld.f(x, y)) < 1e-13

    def test_duality_preserves_solutions(self):
        """If phi solves the unmodified equation then phi/x^2 solves the
        modified one."""
        fld = pde.ScalarField(f=lambda x, y: x * specfun.i1(x) * math.sin(y))
        dual = pde.dualize(fld, to="modified")
        for x, y in [(0.7, 1.0), (2.0, -2.0), (5.0, 0.3)]:
            assert abs(pde.residual(dual, x, y, eq="modified",
                                    mode="fd")) < 1e-5


class TestHalfCoordinates:
    def test_point_change(self):
        p = pde.to_st(1.0, 0.0)
        assert p.s == 0.5 and p.t == 0.0

    def test_round_trip_many_points(self):
        rng = np.random.default_rng(2)
        for _ in range(1000):
            x = rng.uniform(0.05, 20.0)
            y = rng.uniform(-20.0, 20.0)
            xb, yb = pde.from_st(pde.to_st(x, y))
            assert abs(xb - x) < 1e-14 * x
            assert abs(yb - y) < 1e-14 * max(1.0, abs(y))

    def test_inverse_square_becomes_linear(self):
        fld = pde.ScalarField(f=lambda x, y: x**-2)
        half = pde.field_to_st(fld)
        for s, t in [(0.1, 0.0), (2.0, 3.0), (0.7, -1.0)]:
            assert abs(half.f(s, t) - 2.0 * s) < 1e-13 * max(1.0, s)

    def test_st_residual_of_exact_solutions(self):
        linear = pde.ScalarField(
            f=lambda s, t: 2.0 * s,
            grad=lambda s, t: (2.0, 0.0),
            hess=lambda s, t: (0.0, 0.0, 0.0),
        )
        assert abs(pde.st_residual(linear, 0.4, 1.0)) < 1e-15
        mixed = pde.ScalarField(
            f=lambda s, t: 1.0 / s - t * t,
            grad=lambda s, t: (-s**-2, -2.0 * t),
            hess=lambda s, t: (2.0 * s**-3, 0.0, -2.0),
        )
        assert abs(pde.st_residual(mixed, 0.7, -2.0)) < 1e-14

    def test_field_round_trip(self):
        fld = pde.ScalarField(f=lambda x, y: x * x + y)
        back = pde.st_field_to_xy(pde.field_to_st(fld))
        for x, y in [(0.5, 1.0), (2.0, -0.3)]:
            assert abs(back.f(x, y) - fld.f(x, y)) < 1e-13


class TestEigenCatalog:
    def test_each_table_has_six_rows(self):
        assert len(pde.catalog("unmodified")) == 6
        assert len(pde.catalog("modified")) == 6

    def test_unknown_table_rejected(self):
        with pytest.raises(ValueError):
            pde.catalog("hyperbolic")

    def test_decaying_row_closed_form(self):
        entry = pde.EigenEntry(table="unmodified", sign=-1,
                               variant="primary", lam=1.0)
        fld = pde.eigenfunction(entry)
        x, y = 1.0, 1.0
        assert abs(fld.f(x, y) - x * specfun.i1(x) * math.sin(y)) < 1e-14
        assert abs(pde.residual(fld, x, y, eq="unmodified")) < 1e-9

    def test_growing_modified_row_at_lam_two(self):
        entry = pde.EigenEntry(table="modified", sign=1,
                               variant="tilde", lam=2.0)
        fld = pde.eigenfunction(entry)
        x, y = 0.7, 0.3
        expected = specfun.y1(2.0 * x) / x * math.cosh(2.0 * y)
        assert abs(fld.f(x, y) - expected) < 1e-12 * abs(expected)
        assert abs(pde.residual(fld, x, y, eq="modified")) < 1e-9

    @pytest.mark.parametrize("table,eq", [("unmodified", "unmodified"),
                                          ("modified", "modified")])
    def test_all_rows_satisfy_their_equation(self, table, eq):
        rng = np.random.default_rng(4)
        for entry in pde.catalog(table):
            fld = pde.eigenfunction(entry)
            for _ in range(10):
                x = rng.uniform(0.2, 6.0)
                y = rng.uniform(-3.0, 3.0)
                scale = max(1.0, abs(fld.f(x, y)))
                assert abs(pde.residual(fld, x, y, eq=eq)) < 1e-9 * scale


class TestBarriers:
    def test_growth_barrier_canonical_numbers(self):
        cert = pde.make_barrier("growth_t",
                                {"c": 2.0, "s0": 1.0, "t0": 0.0, "M": -2.0})
        assert cert.space == "st"
        assert cert.residual_sup < 1e-10
        assert abs(cert.params["tau0_sq"] - 3.0) < 1e-14
        sig = 2.0 * (3.0 - math.sqrt(8.25))
        assert abs(cert.params["sigma_touch"] - sig) < 1e-13
        assert abs(cert.params["coefficient"]
                   - 1.5 * sig * sig / (3.0 - sig)) < 1e-13
        # the easy-to-quote lower bound is f0/144
        assert cert.params["coefficient"] >= 1.0 / 144.0
        assert cert.margins["coefficient_vs_simple"] > 0.0

    def test_monotone_barrier_canonical_numbers(self):
        cert = pde.make_barrier("monotone_s",
                                {"c": 2.0, "s0": 1.0, "t0": 0.0, "M": -2.0})
        assert cert.residual_sup < 1e-10
        sig = 2.0 * (3.0 - math.sqrt(8.25))
        assert abs(cert.params["sigma_touch"] - sig) < 1e-13
        assert abs(cert.params["alpha"]
                   - 3.0 * sig * sig / (3.0 - sig)) < 1e-13
        assert cert.margins["envelope"] > 0.0
        assert cert.margins["lower_bound"] > 0.0

    def test_monotone_barrier_calibration_enforced(self):
        with pytest.raises(pde.ParamOutOfRange):
            pde.make_barrier("monotone_s", {"s0": 2.0, "t0": 0.0, "M": -2.0})

    def test_quadrant_barrier_sign_structure(self):
        cert = pde.make_barrier("quadrant_lower")
        assert cert.space == "xy"
        assert cert.residual_sup < 1e-10
        # margins record the distance to violation, so both are positive
        assert cert.margins["neg_near_axis"] > 0.0
        assert cert.margins["pos_core"] > 0.0
        # exact solution of the modified equation
        assert abs(pde.residual(cert.field, 0.9, 0.4, eq="modified")) < 1e-12

    def test_eigen_barrier_wavelength(self):
        cert = pde.make_barrier("eigen_eta", {"eps_prime": 1.0, "amp": 1.0})
        lam2 = specfun.j1_basis(2).zeros[1]
        assert abs(cert.params["lam"] - 1.0 / (2.0 * lam2)) < 1e-14
        assert cert.margins["positivity"] > 0.0
        assert cert.residual_sup < 1e-10

    @pytest.mark.parametrize("kind,bad", [
        ("growth_t", {"c": 1.0}),
        ("growth_t", {"t0": -2.0, "M": -2.0}),
        ("quadrant_lower", {"delta": -1.0}),
        ("eigen_eta", {"amp": 0.0}),
        ("no_such_kind", None),
    ])
    def test_bad_parameters_rejected(self, kind, bad):
        with pytest.raises(pde.ParamOutOfRange):
            pde.make_barrier(kind, bad)


class TestGradientProbe:
    def test_constant_field(self):
        out = pde.gradient_bound_probe(lambda x, y: 1.0,
                                       (0.1, 10.0, -10.0, 10.0))
        assert out["sup"] < 1e-12

    def test_inverse_square(self):
        out = pde.gradient_bound_probe(lambda x, y: x**-2,
                                       (0.1, 10.0, -10.0, 10.0))
        assert abs(out["sup"] - 2.0) < 1e-9

    def test_kernel_dual(self):
        out = pde.gradient_bound_probe(
            lambda x, y: 0.5 * (x * x + y * y) ** -1.5,
            (0.1, 10.0, -10.0, 10.0))
        assert abs(out["sup"] - 3.0) < 1e-6

    def test_nonpositive_field_rejected(self):
        with pytest.raises(pde.NonPositiveField):
            pde.gradient_bound_probe(lambda x, y: -1.0,
                                     (0.1, 2.0, -1.0, 1.0))


class TestHaltonPoints:
    def test_deterministic_and_in_unit_square(self):
        pts = pde.halton_points(500)
        again = pde.halton_points(500)
        np.testing.assert_array_equal(pts, again)
        assert pts.shape == (500, 2)
        assert np.all(pts >= 0.0) and np.all(pts < 1.0)

    def test_reasonably_equidistributed(self):
        pts = pde.halton_points(2000)
        np.testing.assert_allclose(pts.mean(axis=0), [0.5, 0.5], atol=0.02)


class TestFieldProperties:
    @given(x=point_x, y=point_y, lam=lam_strategy)
    @settings(max_examples=40, deadline=None)
    def test_analytic_and_fd_residuals_agree(self, x, y, lam):
        entry = pde.EigenEntry(table="unmodified", sign=-1,
                               variant="primary", lam=lam)
        fld = pde.eigenfunction(entry)
        r_an = pde.residual(fld, x, y, eq="unmodified", mode="analytic")
        r_fd = pde.residual(fld, x, y, eq="unmodified", mode="fd")
        scale = max(1.0, abs(fld.f(x, y)))
        assert abs(r_an - r_fd) < 1e-5 * scale

    @given(x=point_x, y=point_y, lam=lam_strategy)
    @settings(max_examples=40, deadline=None)
    def test_duality_is_pointwise_division(self, x, y, lam):
        entry = pde.EigenEntry(table="unmodified", sign=1,
                               variant="primary", lam=lam)
        fld = pde.eigenfunction(entry)
        dual = pde.dualize(fld, to="modified")
        assert abs(dual.f(x, y) - fld.f(x, y) / (x * x)) \
            < 1e-12 * max(1.0, abs(fld.f(x, y)) / (x * x))
