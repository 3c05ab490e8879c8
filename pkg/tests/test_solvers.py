"""Kernel convolution and series solver tests.

The eigen-solution oracles used throughout are separated solutions
R(x) cos(y) with R(x) = I1(x)/x, which solve the modified equation
exactly; solver output is compared against them pointwise.
"""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polylab import solvers, specfun

amp_strategy = st.floats(min_value=0.2, max_value=3.0, allow_nan=False)
shift_strategy = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


def radial_profile(x):
    """I1(x)/x extended by its limit 1/2 at x = 0."""
    if x == 0.0:
        return 0.5
    return specfun.i1(x) / x


def eigen_trace(x0):
    r = radial_profile(x0)
    return solvers.BoundaryTrace(func=lambda t: r * np.cos(t))


def bump_trace(width=1.0):
    def f(t):
        t = np.asarray(t, dtype=float)
        inside = np.abs(t) < width
        out = np.zeros_like(t)
        out[inside] = np.exp(-1.0 / (1.0 - (t[inside] / width) ** 2))
        return out

    return solvers.BoundaryTrace(func=f, support=(-width, width))


class TestElementaryKernel:
    def test_closed_form_values(self):
        assert abs(solvers.elementary_kernel(1.0, 0.0) - 0.5) < 1e-15
        x, y = 2.0, 3.0
        expected = 0.5 * x * x * (x * x + y * y) ** -1.5
        assert abs(solvers.elementary_kernel(x, y) - expected) < 1e-15

    def test_even_in_y(self):
        ys = np.linspace(0.1, 5.0, 17)
        np.testing.assert_allclose(solvers.elementary_kernel(1.3, ys),
                                   solvers.elementary_kernel(1.3, -ys),
                                   rtol=0, atol=0)

    @pytest.mark.parametrize("x", [0.1, 1.0, 10.0])
    def test_unit_mass(self, x):
        val = specfun.integrate_adaptive(
            lambda t: solvers.elementary_kernel(x, t),
            -3e4 * x, 3e4 * x, tol=1e-11, vectorized=True,
            breakpoints=[-x, 0.0, x])
        assert abs(val - 1.0) < 1e-8


class TestHalfplaneSolve:
    def test_constant_trace(self):
        tr = solvers.BoundaryTrace(func=lambda t: np.ones_like(t))
        assert abs(solvers.halfplane_solve(tr, (1.0, 3.0)) - 1.0) < 1e-8

    def test_linear_trace_reproduces_coordinate(self):
        tr = solvers.BoundaryTrace(func=lambda t: t, growth_exponent=1.0)
        assert abs(solvers.halfplane_solve(tr, (2.0, 3.0)) - 3.0) < 1e-7

    def test_step_trace_closed_form(self):
        tr = solvers.BoundaryTrace(
            func=lambda t: np.where(np.asarray(t) > 0.0, 1.0, 0.0),
            breakpoints=(0.0,))
        for x, y in [(1.0, 2.0), (0.5, -1.0), (2.0, 0.0)]:
            expected = 0.5 * (1.0 + y / math.hypot(x, y))
            got = solvers.halfplane_solve(tr, (x, y), tol=1e-10)
            assert abs(got - expected) < 1e-9

    def test_pulse_trace_two_term_formula(self):
        tr = solvers.BoundaryTrace(func=lambda t: np.ones_like(t),
                                   support=(-0.5, 0.5))

        def closed(x, y):
            up = (y + 0.5) / math.hypot(x, y + 0.5)
            dn = (y - 0.5) / math.hypot(x, y - 0.5)
            return 0.5 * (up - dn)

        for x, y in [(0.3, 0.0), (1.0, 1.0), (2.0, -2.5)]:
            got = solvers.halfplane_solve(tr, (x, y), tol=1e-10)
            assert abs(got - closed(x, y)) < 1e-9

    def test_sampled_trace_matches_functional_trace(self):
        ts = np.linspace(-25.0, 25.0, 4001)
        tr_fun = solvers.BoundaryTrace(func=lambda t: np.cos(t) / (1.0 + t * t))
        tr_smp = solvers.BoundaryTrace(
            samples=np.column_stack([ts, np.cos(ts) / (1.0 + ts * ts)]))
        a = solvers.halfplane_solve(tr_fun, (0.8, 0.4))
        b = solvers.halfplane_solve(tr_smp, (0.8, 0.4))
        assert abs(a - b) < 1e-6

    def test_vector_of_points(self):
        tr = solvers.BoundaryTrace(func=lambda t: np.ones_like(t))
        pts = [(0.5, -1.0), (1.0, 0.0), (2.0, 2.0)]
        out = solvers.halfplane_solve(tr, pts)
        np.testing.assert_allclose(out, 1.0, rtol=0, atol=1e-8)

    def test_growth_above_declaration_rejected(self):
        tr = solvers.BoundaryTrace(func=lambda t: t * t, growth_exponent=0.5)
        with pytest.raises(solvers.GrowthMismatchError):
            solvers.halfplane_solve(tr, (1.0, 0.0))

    def test_growth_exponent_range_enforced(self):
        with pytest.raises(ValueError):
            solvers.BoundaryTrace(func=lambda t: t, growth_exponent=2.0)


class TestKernelEval:
    def test_inward_kernel_finite_on_axis(self):
        # the elementary kernel blows up as x -> 0; the ring kernel stays
        # finite all the way onto the degenerate axis
        spec = solvers.KernelSpec(kind="strip_eps", eps=1.0)
        val = solvers.kernel_eval(spec, 0.0, 0.5)
        assert abs(val - 0.44564791607775944) < 1e-10

    def test_kernels_even_in_y(self):
        spec = solvers.KernelSpec(kind="strip_eps", eps=1.0)
        a = solvers.kernel_eval(spec, 0.4, 0.8)
        b = solvers.kernel_eval(spec, 0.4, -0.8)
        assert abs(a - b) < 1e-12

    def test_outside_validity_rejected(self):
        spec = solvers.KernelSpec(kind="strip_eps", eps=1.0)
        with pytest.raises(solvers.OutsideValidityError):
            solvers.kernel_eval(spec, 1.5, 0.0)

    def test_too_close_to_source_rejected(self):
        spec = solvers.KernelSpec(kind="halfplane_eps", eps=1.0)
        with pytest.raises(solvers.TooCloseToSourceError):
            solvers.kernel_eval(spec, 1.0 + 0.5 * solvers.SOURCE_BAND, 0.0)


class TestKernelSolve:
    def test_interior_eigen_solution(self):
        # data on x = 0.5 propagated inward across the strip 0 <= x < 0.5
        spec = solvers.KernelSpec(kind="strip_eps", eps=0.5)
        got = solvers.kernel_solve(spec, eigen_trace(0.5), (0.3, 0.2),
                                   tol=1e-10)
        expected = radial_profile(0.3) * math.cos(0.2)
        assert abs(got - expected) < 1e-9

    def test_interior_axis_limit(self):
        spec = solvers.KernelSpec(kind="strip_eps", eps=0.5)
        got = solvers.kernel_solve(spec, eigen_trace(0.5), (0.0, 0.7),
                                   tol=1e-10)
        assert abs(got - 0.5 * math.cos(0.7)) < 1e-6

    def test_outward_eigen_solution_with_windowed_trace(self):
        """Outward propagation reproduces the decaying profile K1(x)/x,
        the one bounded at infinity."""
        spec = solvers.KernelSpec(kind="halfplane_eps", eps=1.0)
        decay = lambda x: specfun.k1(x) / x
        tr = solvers.BoundaryTrace(func=lambda t: decay(1.0) * np.cos(t),
                                   support=(-100.0, 100.0))
        got = solvers.kernel_solve(spec, tr, (2.0, 0.3), tol=1e-9)
        expected = decay(2.0) * math.cos(0.3)
        # window truncation leaves a slowly decaying tail contribution
        assert abs(got - expected) < 1e-5

    def test_unbounded_trace_needs_declared_support(self):
        spec = solvers.KernelSpec(kind="halfplane_eps", eps=1.0)
        tr = solvers.BoundaryTrace(func=lambda t: np.cos(t))
        with pytest.raises(specfun.NonConvergenceError):
            solvers.kernel_solve(spec, tr, (2.0, 0.3), tol=1e-9)

    def test_point_outside_validity_rejected(self):
        spec = solvers.KernelSpec(kind="halfplane_eps", eps=1.0)
        with pytest.raises(solvers.OutsideValidityError):
            solvers.kernel_solve(spec, bump_trace(), (0.5, 0.0))


class TestStripSolve:
    def test_constant_traces_give_one(self):
        one = solvers.BoundaryTrace(func=lambda t: np.ones_like(t))
        pts = [(1.2, 0.0), (1.5, 1.0), (1.9, -2.0)]
        out = solvers.strip_solve(1.0, 2.0, one, one, pts, tol=1e-8)
        np.testing.assert_allclose(out, 1.0, rtol=0, atol=1e-6)

    def test_side_masses_closed_form(self):
        """With indicator data the solution value is the kernel mass; the
        pair masses have rational closed forms and sum to one."""
        eps, epsp, x = 1.0, 2.0, 1.5
        one = solvers.BoundaryTrace(func=lambda t: np.ones_like(t))
        zero = solvers.BoundaryTrace(func=lambda t: np.zeros_like(t))
        m_in = solvers.strip_solve(eps, epsp, one, zero, (x, 0.7), tol=1e-9)
        m_out = solvers.strip_solve(eps, epsp, zero, one, (x, 0.7), tol=1e-9)
        denom = x * x * (epsp**2 - eps**2)
        expected_in = eps**2 * (epsp**2 - x * x) / denom
        expected_out = epsp**2 * (x * x - eps**2) / denom
        assert abs(m_in - expected_in) < 1e-7
        assert abs(m_out - expected_out) < 1e-7
        assert abs((m_in + m_out) - 1.0) < 1e-7

    def test_eigen_solution_between_rings(self):
        eps, epsp = 0.5, 2.0
        got = solvers.strip_solve(eps, epsp, eigen_trace(eps),
                                  eigen_trace(epsp), (1.0, 0.3), tol=1e-9)
        expected = radial_profile(1.0) * math.cos(0.3)
        assert abs(got - expected) < 1e-5

    def test_agrees_with_matched_outward_solution(self):
        """Feeding the outward-kernel solution back in as outer data makes
        the two solvers agree in the overlap region."""
        eps, epsp = 1.0, 8.0
        inner = bump_trace()
        spec = solvers.KernelSpec(kind="halfplane_eps", eps=eps)
        ts = np.linspace(-40.0, 40.0, 241)
        vals = solvers.kernel_solve(spec, inner,
                                    np.column_stack([np.full_like(ts, epsp), ts]),
                                    tol=1e-9)
        outer = solvers.BoundaryTrace(samples=np.column_stack([ts, vals]))
        for x, y in [(1.5, 0.0), (2.5, 1.0), (5.0, -2.0)]:
            direct = solvers.kernel_solve(spec, inner, (x, y), tol=1e-9)
            paired = solvers.strip_solve(eps, epsp, inner, outer, (x, y),
                                         tol=1e-9)
            assert abs(direct - paired) < 1e-8

    def test_point_outside_rings_rejected(self):
        one = solvers.BoundaryTrace(func=lambda t: np.ones_like(t))
        with pytest.raises(solvers.OutsideValidityError):
            solvers.strip_solve(1.0, 2.0, one, one, (2.5, 0.0))


class TestSeriesSolve:
    def zero(self):
        return solvers.BoundaryTrace(func=lambda t: np.zeros_like(t))

    def test_zero_traces_give_zero(self):
        sol = solvers.series_solve_quad(self.zero(), self.zero(), self.zero(),
                                        n_terms=20)
        for x, y in [(0.2, 0.0), (0.6, 0.5), (0.9, -0.8)]:
            assert abs(sol(x, y)) < 1e-10

    def test_constant_compatible_traces(self):
        one = solvers.BoundaryTrace(func=lambda t: np.ones_like(t))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", solvers.TruncationWarning)
            sol = solvers.series_solve_quad(one, one, one, n_terms=60)
            for x, y in [(0.3, 0.0), (0.7, 0.4)]:
                assert abs(sol(x, y) - 1.0) < 1e-6

    def eigen_solution(self, n_terms=60):
        right = solvers.BoundaryTrace(
            func=lambda t: specfun.i1(1.0) * np.cos(t))

        def horizontal(t):
            t = np.asarray(t, dtype=float)
            out = np.full_like(t, 0.5 * math.cos(1.0))
            nz = t != 0.0
            out[nz] = specfun.i1(t[nz]) / t[nz] * math.cos(1.0)
            return out

        top = solvers.BoundaryTrace(func=horizontal)
        bottom = solvers.BoundaryTrace(func=horizontal)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", solvers.TruncationWarning)
            return solvers.series_solve_quad(right, top, bottom,
                                             n_terms=n_terms)

    def test_eigen_solution_interior(self):
        sol = self.eigen_solution()
        for x, y in [(0.1, 0.0), (0.5, 0.5), (0.8, -0.7), (0.05, 0.3)]:
            expected = radial_profile(x) * math.cos(y)
            assert abs(sol(x, y) - expected) < 1e-6

    def test_axis_trace_limit(self):
        sol = self.eigen_solution()
        ys = np.linspace(-0.9, 0.9, 19)
        got = solvers.boundary_trace_at_zero(sol, ys)
        np.testing.assert_allclose(got, 0.5 * np.cos(ys), rtol=0, atol=1e-4)

    def test_axis_trace_of_zero_solution(self):
        sol = solvers.series_solve_quad(self.zero(), self.zero(), self.zero(),
                                        n_terms=10)
        assert abs(solvers.boundary_trace_at_zero(sol, 0.3)) < 1e-12

    def test_axis_trace_of_constant_solution(self):
        one = solvers.BoundaryTrace(func=lambda t: np.ones_like(t))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", solvers.TruncationWarning)
            sol = solvers.series_solve_quad(one, one, one, n_terms=60)
        assert abs(solvers.boundary_trace_at_zero(sol, 0.0) - 1.0) < 1e-4

    def test_corner_proximity_rejected(self):
        sol = self.eigen_solution(n_terms=10)
        with pytest.raises(solvers.CornerProximityError):
            solvers.boundary_trace_at_zero(sol, 0.97)

    def test_slow_coefficient_decay_warns(self):
        # an incompatible top trace keeps the tail coefficients large
        step = solvers.BoundaryTrace(func=lambda t: np.ones_like(t))
        with pytest.warns(solvers.TruncationWarning):
            solvers.series_solve_quad(self.zero(), step, step, n_terms=10)

    def test_fd_residual_in_interior(self):
        sol = self.eigen_solution()
        h = 1e-4
        for x, y in [(0.4, 0.1), (0.6, -0.3)]:
            fxx = (sol(x + h, y) - 2.0 * sol(x, y) + sol(x - h, y)) / h**2
            fyy = (sol(x, y + h) - 2.0 * sol(x, y) + sol(x, y - h)) / h**2
            fx = (sol(x + h, y) - sol(x - h, y)) / (2.0 * h)
            res = fxx + fyy + 3.0 * fx / x
            assert abs(res) < 1e-5


class TestSolverProperties:
    @given(a=amp_strategy, b=shift_strategy)
    @settings(max_examples=15, deadline=None)
    def test_halfplane_solve_is_linear(self, a, b):
        tr1 = solvers.BoundaryTrace(func=lambda t: np.ones_like(t),
                                    support=(-2.0, 2.0))
        tr2 = bump_trace()
        combo = solvers.BoundaryTrace(
            func=lambda t: a * tr1(t) + b * tr2(t), support=(-2.0, 2.0))
        pt = (0.9, 0.4)
        lhs = solvers.halfplane_solve(combo, pt, tol=1e-10)
        rhs = (a * solvers.halfplane_solve(tr1, pt, tol=1e-10)
               + b * solvers.halfplane_solve(tr2, pt, tol=1e-10))
        assert abs(lhs - rhs) < 1e-8 * max(1.0, abs(a) + abs(b))

    @given(a=amp_strategy)
    @settings(max_examples=10, deadline=None)
    def test_positive_data_gives_positive_solution(self, a):
        tr = solvers.BoundaryTrace(
            func=lambda t: a * np.exp(-np.asarray(t) ** 2))
        for pt in [(0.5, 0.0), (1.5, 2.0)]:
            assert solvers.halfplane_solve(tr, pt, tol=1e-9) > 0.0
