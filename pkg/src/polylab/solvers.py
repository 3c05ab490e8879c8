"""Boundary-data solvers for the potential equation on the right
half-plane and its truncated variants.

Three solution paths are provided.

* ``halfplane_solve``: convolution of trace data against the elementary
  kernel G(x, y) = x^2 / (2 (x^2 + y^2)^{3/2}), whose mass is exactly 1
  for every x > 0.
* ``kernel_solve`` / ``strip_solve``: convolution against the truncated
  kernels supported on x >= eps, 0 <= x <= eps, or the strip
  eps <= x <= eps_prime. Each kernel value is an oscillatory frequency
  integral of Bessel ratios; the scaled forms i1e/k1e keep every
  exponent nonpositive so the integrands stay finite at any frequency.
* ``series_solve_quad``: Fourier-Bessel series solution of the modified
  equation on the square (0, 1) x (-1, 1) from traces on the three
  non-axis edges.

Trace data enters as a :class:`BoundaryTrace`: either a callback with a
declared polynomial growth exponent, or samples interpolated by a cubic
spline and treated as compactly supported outside their range.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from . import specfun
from .specfun import integrate_adaptive, integrate_decaying

__all__ = [
    "OutsideValidityError",
    "TooCloseToSourceError",
    "GrowthMismatchError",
    "CornerProximityError",
    "TruncationWarning",
    "SOURCE_BAND",
    "CORNER_MARGIN",
    "elementary_kernel",
    "BoundaryTrace",
    "KernelSpec",
    "kernel_eval",
    "halfplane_solve",
    "kernel_solve",
    "strip_solve",
    "SeriesSolutionQ",
    "series_solve_quad",
    "boundary_trace_at_zero",
]

# Relative half-width of the excluded band around a kernel's source line,
# and the excluded margin near the square's corners at x = 0.
SOURCE_BAND = 0.02
CORNER_MARGIN = 0.05


class OutsideValidityError(ValueError):
    """Evaluation point outside the kernel's or solution's domain."""


class TooCloseToSourceError(ValueError):
    """Evaluation point inside the excluded band around the source line."""


class GrowthMismatchError(ValueError):
    """Trace data inconsistent with its declared growth exponent."""


class CornerProximityError(ValueError):
    """Axis-trace evaluation too close to a corner of the square."""


class TruncationWarning(UserWarning):
    """Series truncation left a non-negligible last coefficient."""


def elementary_kernel(x, y):
    """G(x, y) = x^2 / (2 (x^2 + y^2)^{3/2}); positive, unit mass in y."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise OutsideValidityError("elementary kernel needs x > 0")
    y = np.asarray(y, dtype=float)
    out = 0.5 * x * x / (x * x + y * y) ** 1.5
    return float(out) if out.ndim == 0 else out


@dataclass
class BoundaryTrace:
    """Boundary data on the x = 0 axis.

    Exactly one of ``func``/``samples`` must be given. ``samples`` is an
    (n, 2) array of (t, value) rows with strictly increasing t; a natural
    cubic spline interpolates inside the range and the trace is taken to
    vanish outside it. ``growth_exponent`` declares |psi(t)| <=
    C (1 + |t|)^p; sampled traces are compactly supported so p is 0.
    ``breakpoints`` mark known discontinuities for the quadrature.
    """

    func: Optional[Callable] = None
    samples: Optional[np.ndarray] = None
    growth_exponent: float = 0.0
    breakpoints: tuple = ()
    support: Optional[tuple] = None
    _spline: object = field(default=None, repr=False, compare=False)
    _range: tuple = field(default=(0.0, 0.0), repr=False, compare=False)

    def __post_init__(self):
        if (self.func is None) == (self.samples is None):
            raise ValueError("provide exactly one of func or samples")
        if not 0.0 <= self.growth_exponent < 2.0:
            raise ValueError(
                "growth_exponent must lie in [0, 2) for a convergent "
                "kernel convolution"
            )
        if self.support is not None:
            lo, hi = self.support
            if not lo < hi:
                raise ValueError("support must be an increasing pair")
            if self.growth_exponent != 0.0:
                raise ValueError("a compactly supported trace has growth 0")
        if self.samples is not None:
            pts = np.asarray(self.samples, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 4:
                raise ValueError("samples must be an (n >= 4, 2) array")
            if np.any(np.diff(pts[:, 0]) <= 0.0):
                raise ValueError("sample abscissas must strictly increase")
            self.samples = pts
            self._spline = CubicSpline(pts[:, 0], pts[:, 1], bc_type="natural")
            self._range = (float(pts[0, 0]), float(pts[-1, 0]))
            if self.growth_exponent != 0.0:
                raise ValueError("sampled traces are compactly supported; "
                                 "growth_exponent must be 0")
            if self.support is None:
                self.support = self._range

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.func is not None:
            try:
                out = np.asarray(self.func(t), dtype=float)
                if out.shape != t.shape:
                    raise TypeError
            except (TypeError, ValueError):
                out = np.array(
                    [float(self.func(float(v))) for v in np.atleast_1d(t)]
                ).reshape(t.shape)
        else:
            lo, hi = self._range
            inside = (t >= lo) & (t <= hi)
            out = np.where(inside, self._spline(np.clip(t, lo, hi)), 0.0)
        return float(out) if out.ndim == 0 else out


def _as_trace(tr) -> BoundaryTrace:
    if isinstance(tr, BoundaryTrace):
        return tr
    if callable(tr):
        return BoundaryTrace(func=tr)
    return BoundaryTrace(samples=np.asarray(tr, dtype=float))


def _growth_scale(trace: BoundaryTrace, y_max: float) -> float:
    """Estimate C with |psi| <= C (1+|t|)^p near the window and verify the
    declared growth a few decades out."""
    p = trace.growth_exponent
    w = max(20.0, 5.0 * (1.0 + abs(y_max)))
    ts = np.linspace(-w, w, 201)
    vals = np.abs(trace(ts))
    c_amp = float(np.max(vals / (1.0 + np.abs(ts)) ** p)) + 1e-300
    for t_far in (3.0 * w, -3.0 * w, 10.0 * w, -10.0 * w):
        v = abs(float(trace(t_far)))
        if v > 30.0 * c_amp * (1.0 + abs(t_far)) ** p:
            raise GrowthMismatchError(
                f"trace value {v:.3e} at t = {t_far:.3e} exceeds declared "
                f"growth exponent {p}"
            )
    return c_amp


def _points_array(points) -> tuple[np.ndarray, bool]:
    pts = np.asarray(points, dtype=float)
    scalar = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != 2:
        raise ValueError("points must be (n, 2) pairs of (x, y)")
    return pts, scalar


def halfplane_solve(trace, points, tol: float = 1e-8):
    """Convolve trace data with the elementary kernel at the given points.

    points : (n, 2) array of (x, y) with x > 0, or a single pair.
    Returns an array of solution values (or a float for a single pair).
    The quadrature window is truncated where the kernel tail falls below
    tol against the declared trace growth.
    """
    tr = _as_trace(trace)
    pts, scalar = _points_array(points)
    if np.any(pts[:, 0] <= 0.0):
        raise OutsideValidityError("halfplane_solve needs x > 0")
    c_amp = _growth_scale(tr, float(np.max(np.abs(pts[:, 1]))))
    p = tr.growth_exponent
    out = np.empty(pts.shape[0])
    for i, (x, y) in enumerate(pts):
        t_half = max(10.0, 2.0 * x)
        while (
            c_amp * x * x * (2.0 + abs(y) + t_half) ** p / t_half**2 > 0.25 * tol
            and t_half < 1e9
        ):
            t_half *= 2.0
        def integrand(ts):
            return tr(ts) * elementary_kernel(x, y - ts)

        lo, hi = y - t_half, y + t_half
        if tr.support is not None:
            lo, hi = max(lo, tr.support[0]), min(hi, tr.support[1])
        if hi <= lo:
            out[i] = 0.0
            continue
        cuts = _window_cuts(lo, hi, y, max(x, 1.0), tr.breakpoints)
        out[i] = integrate_adaptive(
            integrand,
            lo,
            hi,
            tol=0.5 * tol,
            vectorized=True,
            breakpoints=cuts,
        )
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Truncated kernels.


@dataclass(frozen=True)
class KernelSpec:
    """Which kernel, and where its source lines sit.

    kind in {"halfplane_elementary", "halfplane_eps", "strip_eps",
    "strip_pair"}; eps is required except for the elementary kernel and
    eps_prime only for the strip pair (with 0 < eps < eps_prime).
    """

    kind: str
    eps: Optional[float] = None
    eps_prime: Optional[float] = None

    def __post_init__(self):
        kinds = ("halfplane_elementary", "halfplane_eps", "strip_eps",
                 "strip_pair")
        if self.kind not in kinds:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind != "halfplane_elementary":
            if self.eps is None or not self.eps > 0.0:
                raise ValueError("eps must be positive")
        if self.kind == "strip_pair":
            if self.eps_prime is None or not self.eps_prime > self.eps:
                raise ValueError("strip_pair needs eps < eps_prime")


def _masked_eval(omega: np.ndarray, limit: float, formula) -> np.ndarray:
    """Evaluate formula(omega) except at tiny omega where the analytic
    omega -> 0 limit is substituted (the scaled Bessel ratios are 0/0
    there)."""
    omega = np.asarray(omega, dtype=float)
    out = np.empty_like(omega)
    small = omega < 1e-12
    if np.any(small):
        out[small] = limit
    if np.any(~small):
        out[~small] = formula(omega[~small])
    return out


def _strip_pair_modes(omega: np.ndarray, x: float, eps: float, epsp: float):
    """Scaled mode profiles (inner-sourced, outer-sourced) of the strip
    pair; all exponentials carry nonpositive arguments."""
    a = omega * eps
    bp = omega * epsp
    xx = omega * x
    k1e, i1e = specfun.k1e, specfun.i1e
    den = k1e(a) * i1e(bp) - k1e(bp) * i1e(a) * np.exp(2.0 * (a - bp))
    inner = (
        np.exp(a - xx)
        * (i1e(bp) * k1e(xx) - k1e(bp) * i1e(xx) * np.exp(2.0 * (xx - bp)))
        / den
    )
    outer = (
        np.exp(xx - bp)
        * (k1e(a) * i1e(xx) - i1e(a) * k1e(xx) * np.exp(2.0 * (a - xx)))
        / den
    )
    return inner, outer


def _mode_functions(spec: KernelSpec, x: float):
    """Validated cosine-transform modes of a kernel at height x.

    Returns a list of (rfun, decay_rate) with rfun vectorized over omega
    and all prefactors folded in, so that

        kernel(x, y) = sum over modes of  ∫_0^∞ rfun(ω) cos(ωy) dω.

    One mode for the single-source kernels, two (inner, outer) for the
    strip pair. Raises the same validity/band errors as kernel_eval.
    """
    eps = float(spec.eps)
    if spec.kind == "halfplane_eps":
        if x < eps:
            raise OutsideValidityError(f"kernel supported on x >= {eps}")
        if x - eps < SOURCE_BAND * eps:
            raise TooCloseToSourceError(
                f"x = {x} within the excluded band around eps = {eps}"
            )
        limit = eps * eps / (math.pi * x * x)

        def f(om):
            return (eps / (math.pi * x)) * specfun.k1_ratio(om * x, om * eps)

        return [(lambda om: _masked_eval(om, limit, f), x - eps)]

    if spec.kind == "strip_eps":
        if x > eps:
            raise OutsideValidityError(f"kernel supported on 0 <= x <= {eps}")
        if x < 0.0:
            raise OutsideValidityError("x must be nonnegative")
        if eps - x < SOURCE_BAND * eps:
            raise TooCloseToSourceError(
                f"x = {x} within the excluded band around eps = {eps}"
            )
        if x == 0.0:
            # x -> 0 limit of I1(om x)/x is om/2.
            def f0(om):
                return (
                    (eps / math.pi)
                    * (0.5 * om)
                    * np.exp(-om * eps)
                    / specfun.i1e(om * eps)
                )

            return [(lambda om: _masked_eval(om, 1.0 / math.pi, f0), eps)]

        def f(om):
            return (eps / (math.pi * x)) * specfun.i1_ratio(om * x, om * eps)

        return [(lambda om: _masked_eval(om, 1.0 / math.pi, f), eps - x)]

    # strip_pair
    epsp = float(spec.eps_prime)
    if not eps <= x <= epsp:
        raise OutsideValidityError(
            f"strip pair supported on {eps} <= x <= {epsp}"
        )
    if x - eps < SOURCE_BAND * eps:
        raise TooCloseToSourceError(
            f"x = {x} within the excluded band around eps = {eps}"
        )
    if epsp - x < SOURCE_BAND * epsp:
        raise TooCloseToSourceError(
            f"x = {x} within the excluded band around eps_prime = {epsp}"
        )
    lim_inner = (eps / (math.pi * x)) * eps * (epsp**2 - x**2) / (
        x * (epsp**2 - eps**2)
    )
    lim_outer = (epsp / (math.pi * x)) * epsp * (x**2 - eps**2) / (
        x * (epsp**2 - eps**2)
    )

    def f_inner(om):
        return (eps / (math.pi * x)) * _strip_pair_modes(om, x, eps, epsp)[0]

    def f_outer(om):
        return (epsp / (math.pi * x)) * _strip_pair_modes(om, x, eps, epsp)[1]

    return [
        (lambda om: _masked_eval(om, lim_inner, f_inner), x - eps),
        (lambda om: _masked_eval(om, lim_outer, f_outer), epsp - x),
    ]


def kernel_eval(spec: KernelSpec, x: float, y: float, tol: float = 1e-10):
    """Evaluate a kernel at (x, y). For "strip_pair" the return value is
    the pair (inner-sourced, outer-sourced); otherwise a float.

    Raises OutsideValidityError off the kernel's support and
    TooCloseToSourceError within the band |x - source| < SOURCE_BAND *
    source (the frequency integral slows down and loses accuracy there).
    """
    x = float(x)
    y = float(y)
    if spec.kind == "halfplane_elementary":
        return elementary_kernel(x, y)
    vals = [
        integrate_decaying(
            lambda om, _r=rfun: _r(om) * np.cos(om * y),
            0.0,
            decay_rate=rate,
            tol=tol,
            vectorized=True,
        )
        for rfun, rate in _mode_functions(spec, x)
    ]
    return tuple(vals) if len(vals) == 2 else vals[0]


class _ProfiledKernel:
    """Fixed quadrature plan for one kernel mode at fixed height x.

    The cosine transform ∫ rfun(ω) cos(ωy) dω is discretized on composite
    Gauss-Kronrod panels sized to resolve both the decay scale and the
    fastest oscillation |y| <= y_max, so a kernel value is a single dot
    product against precomputed weights. Convolutions call this thousands
    of times per query point, where per-call adaptive quadrature would be
    prohibitive. Rebuilds itself when asked beyond its oscillation range.
    """

    def __init__(self, rfun, rate: float, tol: float, y_max: float):
        self._rfun = rfun
        self._rate = float(rate)
        self._tol = float(tol)
        self._build(max(float(y_max), 1.0))

    # Plans larger than this are refused: they arise only when a kernel
    # with a slow polynomial tail in y (halfplane_eps) meets a trace with
    # no declared support, and the window then grows without useful bound.
    MAX_PANELS = 65536

    def _build(self, y_max: float) -> None:
        rfun, rate, tol = self._rfun, self._rate, self._tol
        near = [
            abs(float(rfun(np.array([1e-9 + k / rate]))[0])) * math.exp(k)
            for k in (0.0, 0.5, 1.0, 1.5, 2.0, 3.0)
        ]
        c_amp = max(max(near), tol)
        upper = (math.log(c_amp / tol) + 5.0) / rate
        width = min(math.pi / (1.0 + y_max), upper / 8.0)
        test_ys = np.array([0.0, 0.37 * y_max, y_max])
        for _ in range(6):
            n_pan = int(math.ceil(upper / width))
            if n_pan > self.MAX_PANELS:
                raise specfun.NonConvergenceError(
                    f"kernel plan for |y| <= {y_max:.3g} needs {n_pan} "
                    "panels; declare a compact trace support or relax tol"
                )
            uni = np.linspace(0.0, upper, n_pan + 1)
            # geometric stack under the first panel: the Bessel-ratio
            # profiles have an omega^2 log omega corner at 0 that uniform
            # halving resolves far too slowly
            stack = uni[1] * 2.0 ** np.arange(-12.0, 0.0)
            edges = np.concatenate(([0.0], stack, uni[1:]))
            c = 0.5 * (edges[:-1] + edges[1:])[:, None]
            h = 0.5 * np.diff(edges)[:, None]
            om = c + h * specfun._XGK[None, :]
            rv = rfun(om.ravel()).reshape(om.shape)
            w15 = h * specfun._WGK[None, :] * rv
            w7 = h * specfun._WG[None, :] * rv[:, specfun._G_IDX]
            err = 0.0
            for yt in test_ys:
                cos_om = np.cos(om * yt)
                p15 = np.sum(w15 * cos_om, axis=1)
                p7 = np.sum(w7 * cos_om[:, specfun._G_IDX], axis=1)
                err = max(err, float(np.sum(np.abs(p15 - p7))))
            if err <= tol:
                break
            width *= 0.5
        else:
            raise specfun.NonConvergenceError(
                f"kernel profile error {err:.3e} above tol {tol:.3e}"
            )
        self.y_max = y_max
        self._omegas = om.ravel()
        self._weights = w15.ravel()
        self.plan_error = err

    def __call__(self, ys):
        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        if ys.size and float(np.max(np.abs(ys))) > self.y_max:
            self._build(2.0 * float(np.max(np.abs(ys))))
        return np.cos(np.outer(ys, self._omegas)) @ self._weights


def _y_reach(trace: BoundaryTrace, y: float) -> float:
    """Largest kernel argument |y - t| the convolution will request, used
    to size a quadrature plan up front. Open-ended traces get a generous
    initial window; the plan rebuilds itself if truncation probes past it."""
    if trace.support is not None:
        lo, hi = trace.support
        return max(abs(y - lo), abs(y - hi))
    return abs(y) + 20.0


def _window_cuts(lo: float, hi: float, y: float, scale: float,
                 breakpoints) -> list[float]:
    """Initial panel edges for a wide truncation window: the target height
    y, declared breakpoints, and geometric ladders around y and the origin
    so no starting panel is orders of magnitude wider than its distance
    from the data region (a lone narrow feature would otherwise fall
    between the nodes of the first panel rule and report zero error)."""
    cuts = {float(t) for t in breakpoints if lo < t < hi}
    if lo < y < hi:
        cuts.add(y)
    for center in (y, 0.0):
        step = max(scale, 1.0)
        while center - step > lo or center + step < hi:
            for t in (center - step, center + step):
                if lo < t < hi:
                    cuts.add(t)
            step *= 4.0
    return sorted(cuts)


def _convolve_kernel(kfun, trace: BoundaryTrace, x: float, y: float,
                     tol: float, c_amp: float) -> float:
    """Convolve one kernel profile u -> kfun(u) (already fixed at height
    x) against the trace, truncating where kernel * growth falls under
    tol. A declared compact support fixes the window exactly; otherwise
    the window grows until the kernel edge is negligible."""

    def integrand(ts):
        return trace(ts) * kfun(y - ts)

    if trace.support is not None:
        lo, hi = trace.support
        cuts = [t for t in (y, *trace.breakpoints) if lo < t < hi]
        return integrate_adaptive(
            integrand, lo, hi, tol=0.5 * tol, vectorized=True,
            breakpoints=cuts,
        )

    p = trace.growth_exponent
    t_half = 10.0
    for _ in range(60):
        k_edge = max(abs(kfun(np.array([t_half]))[0]),
                     abs(kfun(np.array([-t_half]))[0]))
        if k_edge * c_amp * (2.0 + abs(y) + t_half) ** p * t_half < 0.25 * tol:
            break
        t_half *= 1.5
    else:
        raise specfun.NonConvergenceError("kernel tail failed to decay")

    cuts = _window_cuts(y - t_half, y + t_half, y, 1.0, trace.breakpoints)
    return integrate_adaptive(
        integrand, y - t_half, y + t_half, tol=0.5 * tol,
        vectorized=True, breakpoints=cuts,
    )


def kernel_solve(spec: KernelSpec, trace, points, tol: float = 1e-8):
    """Convolve trace data with a single truncated kernel
    ("halfplane_eps" or "strip_eps"; use :func:`strip_solve` for the
    pair, :func:`halfplane_solve` for the elementary kernel)."""
    if spec.kind not in ("halfplane_eps", "strip_eps"):
        raise ValueError("kernel_solve handles halfplane_eps / strip_eps")
    tr = _as_trace(trace)
    pts, scalar = _points_array(points)
    c_amp = _growth_scale(tr, float(np.max(np.abs(pts[:, 1]))))
    ktol = min(1e-10, 0.01 * tol)
    reach: dict = {}
    for x, y in pts:
        r = _y_reach(tr, float(y))
        reach[float(x)] = max(r, reach.get(float(x), 0.0))
    kfuns = {}
    for x, r in reach.items():
        (rfun, rate), = _mode_functions(spec, x)
        kfuns[x] = _ProfiledKernel(rfun, rate, ktol, r)
    out = np.empty(pts.shape[0])
    for i, (x, y) in enumerate(pts):
        out[i] = _convolve_kernel(kfuns[float(x)], tr, float(x), float(y), tol, c_amp)
    return float(out[0]) if scalar else out


def strip_solve(
    eps: float,
    eps_prime: float,
    trace_inner,
    trace_outer,
    points,
    tol: float = 1e-8,
):
    """Solve on the strip eps <= x <= eps_prime from traces on both source
    lines, by convolving each against its kernel of the pair."""
    spec = KernelSpec(kind="strip_pair", eps=eps, eps_prime=eps_prime)
    tr_in = _as_trace(trace_inner)
    tr_out = _as_trace(trace_outer)
    pts, scalar = _points_array(points)
    y_max = float(np.max(np.abs(pts[:, 1])))
    c_in = _growth_scale(tr_in, y_max)
    c_out = _growth_scale(tr_out, y_max)
    ktol = min(1e-10, 0.01 * tol)
    reach_in: dict = {}
    reach_out: dict = {}
    for x, y in pts:
        xf, yf = float(x), float(y)
        reach_in[xf] = max(_y_reach(tr_in, yf), reach_in.get(xf, 0.0))
        reach_out[xf] = max(_y_reach(tr_out, yf), reach_out.get(xf, 0.0))
    kfuns = {}
    for x in reach_in:
        modes = _mode_functions(spec, x)
        kfuns[x] = (
            _ProfiledKernel(modes[0][0], modes[0][1], ktol, reach_in[x]),
            _ProfiledKernel(modes[1][0], modes[1][1], ktol, reach_out[x]),
        )
    out = np.empty(pts.shape[0])
    for i, (x, y) in enumerate(pts):
        k_inner, k_outer = kfuns[float(x)]
        v1 = _convolve_kernel(k_inner, tr_in, float(x), float(y), 0.5 * tol, c_in)
        v2 = _convolve_kernel(k_outer, tr_out, float(x), float(y), 0.5 * tol, c_out)
        out[i] = v1 + v2
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Series solution on the square Q = (0, 1) x (-1, 1).


@dataclass
class SeriesSolutionQ:
    """Truncated Fourier-Bessel solution of the modified equation on the
    square, split as A (right-edge data, I-Bessel profiles) plus B/C
    (top/bottom residual data, J-Bessel profiles).

    Coefficient arrays: a has length n_terms + 1 (a[0] is the constant
    mode), b, c, d have length n_terms.
    """

    n_terms: int
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    basis: specfun.BesselBasis

    def _profiles_A(self, x: np.ndarray) -> np.ndarray:
        n = np.arange(1, self.n_terms + 1, dtype=float)
        npi = n * math.pi
        prof = np.empty((self.n_terms, x.size))
        pos = x > 0.0
        if np.any(pos):
            xa = np.outer(npi, x[pos])
            prof[:, pos] = (
                specfun.i1e(xa)
                * np.exp(npi[:, None] * (x[pos][None, :] - 1.0))
                / (x[pos][None, :] * specfun.i1e(npi)[:, None])
            )
        if np.any(~pos):
            lim = 0.5 * npi * np.exp(-npi) / specfun.i1e(npi)
            prof[:, ~pos] = lim[:, None]
        return prof

    def _profiles_J(self, x: np.ndarray) -> np.ndarray:
        lam = self.basis.zeros
        prof = np.empty((lam.size, x.size))
        pos = x > 0.0
        if np.any(pos):
            prof[:, pos] = specfun.j1(np.outer(lam, x[pos])) / x[pos][None, :]
        if np.any(~pos):
            prof[:, ~pos] = (0.5 * lam)[:, None]
        return prof

    @staticmethod
    def _sinh_ratio(lam: np.ndarray, y: np.ndarray, mirror: bool) -> np.ndarray:
        # sinh(lam (1 +- y)) / sinh(2 lam) without large exponentials.
        sgn_y = -y if mirror else y
        num = np.exp(lam[:, None] * (sgn_y[None, :] - 1.0)) * (
            1.0 - np.exp(-2.0 * lam[:, None] * (1.0 + sgn_y[None, :]))
        )
        return num / (1.0 - np.exp(-4.0 * lam[:, None]))

    def _eval_A(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        n = np.arange(1, self.n_terms + 1, dtype=float)
        npi = n * math.pi
        prof = self._profiles_A(x)
        ang = np.outer(npi, y)
        return self.a[0] + np.einsum(
            "np,np->p",
            prof,
            self.a[1:, None] * np.cos(ang) + self.b[:, None] * np.sin(ang),
        )

    def _eval_BC(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        lam = self.basis.zeros
        alph = self.basis.normalizers
        prof = self._profiles_J(x)
        s_top = self._sinh_ratio(lam, y, mirror=False)
        s_bot = self._sinh_ratio(lam, y, mirror=True)
        coef_b = (self.c / alph)[:, None]
        coef_c = (self.d / alph)[:, None]
        return np.einsum("np,np->p", prof, coef_b * s_top + coef_c * s_bot)

    def __call__(self, x, y):
        xs = np.asarray(x, dtype=float)
        ys = np.asarray(y, dtype=float)
        shape = np.broadcast_shapes(xs.shape, ys.shape)
        xf = np.broadcast_to(xs, shape).ravel()
        yf = np.broadcast_to(ys, shape).ravel()
        if np.any((xf < 0.0) | (xf > 1.0) | (np.abs(yf) > 1.0)):
            raise OutsideValidityError(
                "series solution valid on [0, 1] x [-1, 1]"
            )
        vals = self._eval_A(xf, yf) + self._eval_BC(xf, yf)
        if shape == ():
            return float(vals[0])
        return vals.reshape(shape)

    def trace_at_zero(self, y):
        """Axis values f(0, y); excluded within CORNER_MARGIN of y = +-1."""
        ys = np.asarray(y, dtype=float)
        if np.any(np.abs(ys) > 1.0 - CORNER_MARGIN):
            raise CornerProximityError(
                f"axis trace excluded within {CORNER_MARGIN} of the corners"
            )
        flat = np.atleast_1d(ys).ravel()
        vals = self._eval_A(np.zeros_like(flat), flat) + self._eval_BC(
            np.zeros_like(flat), flat
        )
        if ys.ndim == 0:
            return float(vals[0])
        return vals.reshape(ys.shape)


def boundary_trace_at_zero(solution: SeriesSolutionQ, y):
    return solution.trace_at_zero(y)


def _vectorized_edge(fn) -> Callable:
    tr = fn if callable(fn) else None
    if tr is None:
        raise ValueError("edge traces must be callables")

    def call(ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        out = np.asarray(tr(ts), dtype=float)
        if out.shape != ts.shape:
            out = np.array([float(tr(float(v))) for v in ts])
        return out

    return call


def series_solve_quad(
    trace_right,
    trace_top,
    trace_bottom,
    n_terms: int = 60,
    tol: float = 1e-10,
) -> SeriesSolutionQ:
    """Expand the solution of the modified equation on (0,1) x (-1,1).

    trace_right is the data on x = 1 (a function of y in [-1, 1]);
    trace_top / trace_bottom give data on y = +1 / -1 (functions of x in
    [0, 1]). The right-edge data feeds the I-Bessel family directly; the
    top and bottom residuals (after subtracting that family's edge
    values) feed the J-Bessel families. Emits TruncationWarning per
    family when the last retained coefficient is not negligible against
    the leading ones.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    f_r = _vectorized_edge(trace_right)
    f_t = _vectorized_edge(trace_top)
    f_b = _vectorized_edge(trace_bottom)

    n = np.arange(1, n_terms + 1, dtype=float)
    npi = n * math.pi
    a = np.empty(n_terms + 1)
    b = np.empty(n_terms)
    a[0] = 0.5 * integrate_adaptive(f_r, -1.0, 1.0, tol=tol, vectorized=True)
    for k in range(1, n_terms + 1):
        w = npi[k - 1]
        a[k] = integrate_adaptive(
            lambda t: f_r(t) * np.cos(w * t), -1.0, 1.0, tol=tol, vectorized=True
        )
        b[k - 1] = integrate_adaptive(
            lambda t: f_r(t) * np.sin(w * t), -1.0, 1.0, tol=tol, vectorized=True
        )

    basis = specfun.j1_basis(n_terms)
    sol = SeriesSolutionQ(
        n_terms=n_terms, a=a, b=b,
        c=np.zeros(n_terms), d=np.zeros(n_terms), basis=basis,
    )

    def resid_top(x):
        return f_t(x) - sol._eval_A(x, np.ones_like(x))

    def resid_bot(x):
        return f_b(x) - sol._eval_A(x, -np.ones_like(x))

    c = np.empty(n_terms)
    d = np.empty(n_terms)
    for k, lam in enumerate(basis.zeros):
        c[k] = integrate_adaptive(
            lambda x: x * x * resid_top(x) * specfun.j1(lam * x),
            0.0, 1.0, tol=tol, vectorized=True,
        )
        d[k] = integrate_adaptive(
            lambda x: x * x * resid_bot(x) * specfun.j1(lam * x),
            0.0, 1.0, tol=tol, vectorized=True,
        )
    sol.c = c
    sol.d = d

    def _warn_family(name: str, head: np.ndarray, last: float):
        ref = float(np.max(np.abs(head)))
        if ref > 0.0 and abs(last) > 1e-8 * ref:
            warnings.warn(
                f"{name} family: last coefficient {last:.3e} above 1e-8 of "
                f"leading magnitude {ref:.3e}; increase n_terms",
                TruncationWarning,
                stacklevel=2,
            )

    head_n = min(6, n_terms)
    _warn_family("right-edge", np.concatenate([a[: head_n + 1], b[:head_n]]),
                 max(abs(a[-1]), abs(b[-1])))
    _warn_family("top/bottom", np.concatenate([c[:head_n], d[:head_n]]),
                 max(abs(c[-1]), abs(d[-1])))
    return sol
