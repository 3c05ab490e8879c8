"""Metric and curvature reconstruction from momentum maps.

With A = d(phi1, phi2)/d(x, y) and a = |det A|, the reduced metric is
conformally flat in the (x, y) chart, g = (a/x) (dx^2 + dy^2), and in the
momentum chart its inverse is (x/a) A A^T (so det g^{-1} = x^2 always).
The absolute value normalizes traversal orientation: both orientations of
a convex outline describe the same geometry and det A keeps one sign per
map, but that sign depends on the traversal direction.

Gauss curvature comes in two independent routes used to cross-check each
other: the conformal-factor route K = -(x/a) Lap log(a/x) and the
Christoffel route K = (|Gamma^k_ij|^2 - |Gamma^k|^2)/2 built from
momentum-chart Christoffel symbols. The scalar curvature convention is
s = 2K; the conformal companion metric x*(dx^2 + dy^2)-side scalar is
returned by :func:`conformal_scalar` and equals |Gamma^k_ij|^2 / x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fdtools
from .polytope import (
    MomentumMap,
    eval_jacobian,
    second_derivatives,
    third_derivatives,
)

__all__ = [
    "SingularJacobianError",
    "CornerExclusionError",
    "MetricSigma",
    "FourMetricBlocks",
    "ChristoffelData",
    "DET_FLOOR",
    "CORNER_RADIUS",
    "metric_sigma",
    "metric_four",
    "christoffel",
    "gauss_curvature",
    "abreu_residual",
    "conformal_scalar",
    "conformal_laplacian",
    "pseudo_kahler_defect",
    "christoffel_from_metric",
    "invariants_from_metric",
]

DET_FLOOR = 1e-14
CORNER_RADIUS = 1e-3


class SingularJacobianError(RuntimeError):
    """|det A| below DET_FLOOR at the evaluation point."""


class CornerExclusionError(ValueError):
    """Evaluation requested inside the excluded ball around a kink corner."""


@dataclass(frozen=True)
class MetricSigma:
    """Reduced-surface metric components in one chart.

    chart "xy": g11 = g22 = |det A|/x, g12 = 0 (conformal factor times
    identity). chart "phi": lower-index components of the momentum-chart
    metric.
    """

    chart: str
    g11: float
    g12: float
    g22: float

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.g11, self.g12], [self.g12, self.g22]])


@dataclass(frozen=True)
class FourMetricBlocks:
    """Momentum-chart block data of the full four-dimensional metric:
    base block G (lower indices) and fiber block Ginv = (x/|det A|) A A^T
    (upper indices); det(Ginv) = x^2."""

    G: np.ndarray
    Ginv: np.ndarray

    @property
    def det_ginv(self) -> float:
        return float(np.linalg.det(self.Ginv))


@dataclass(frozen=True)
class ChristoffelData:
    """Momentum-chart Christoffel symbols Gamma^k_ij (gamma[k, i, j]),
    their metric trace Gamma^k = g^{ij} Gamma^k_ij, and the two scalar
    norms entering the curvature formula."""

    gamma: np.ndarray
    traced: np.ndarray
    norm2_gamma: float
    norm2_traced: float


def _corner_guard(m: MomentumMap, x: float, y: float) -> None:
    for k in m.kinks:
        if math.hypot(x, y - k.y0) < CORNER_RADIUS:
            raise CornerExclusionError(
                f"point ({x}, {y}) within {CORNER_RADIUS} of corner (0, {k.y0})"
            )


def _jac_checked(m: MomentumMap, x: float, y: float):
    if x <= 0.0:
        raise SingularJacobianError(f"metric data needs x > 0, got x = {x}")
    jac = eval_jacobian(m, x, y)
    det = jac.det
    if abs(det) < DET_FLOOR:
        raise SingularJacobianError(
            f"|det A| = {abs(det):.3e} below floor at ({x}, {y})"
        )
    return jac, det


def metric_sigma(m: MomentumMap, x: float, y: float, chart: str = "xy") -> MetricSigma:
    """Reduced metric at a point, in the "xy" or "phi" chart."""
    jac, det = _jac_checked(m, x, y)
    a = abs(det)
    if chart == "xy":
        fac = a / x
        return MetricSigma(chart="xy", g11=fac, g12=0.0, g22=fac)
    if chart == "phi":
        A = jac.as_matrix()
        B = np.linalg.inv(A)
        G = (a / x) * (B.T @ B)
        return MetricSigma(chart="phi", g11=G[0, 0], g12=G[0, 1], g22=G[1, 1])
    raise ValueError(f"unknown chart {chart!r}")


def metric_four(m: MomentumMap, x: float, y: float) -> FourMetricBlocks:
    jac, det = _jac_checked(m, x, y)
    a = abs(det)
    A = jac.as_matrix()
    B = np.linalg.inv(A)
    G = (a / x) * (B.T @ B)
    Ginv = (x / a) * (A @ A.T)
    return FourMetricBlocks(G=G, Ginv=Ginv)


def _det_derivatives(m: MomentumMap, x: float, y: float):
    """det A with its gradient and flat Laplacian, all closed-form.

    Needs second and third map derivatives; valid away from kink corners.
    """
    jac = eval_jacobian(m, x, y)
    (p1xx, p1xy, p1yy), (p2xx, p2xy, p2yy) = second_derivatives(m, x, y)
    (p1xxx, p1xxy, p1xyy, p1yyy), (p2xxx, p2xxy, p2xyy, p2yyy) = third_derivatives(
        m, x, y
    )
    a11, a12, a21, a22 = jac.a11, jac.a12, jac.a21, jac.a22
    det = jac.det
    # det = A11 A22 - A12 A21 with A11 = phi1_x, A12 = phi1_y, etc.
    det_x = p1xx * a22 + a11 * p2xy - p1xy * a21 - a12 * p2xx
    det_y = p1xy * a22 + a11 * p2yy - p1yy * a21 - a12 * p2xy
    det_xx = (
        p1xxx * a22
        + 2.0 * p1xx * p2xy
        + a11 * p2xxy
        - (p1xxy * a21 + 2.0 * p1xy * p2xx + a12 * p2xxx)
    )
    det_yy = (
        p1xyy * a22
        + 2.0 * p1xy * p2yy
        + a11 * p2yyy
        - (p1yyy * a21 + 2.0 * p1yy * p2xy + a12 * p2xyy)
    )
    return det, det_x, det_y, det_xx + det_yy


def gauss_curvature(
    m: MomentumMap,
    x: float,
    y: float,
    method: str = "logdet",
    fd: bool = False,
) -> float:
    """Gauss curvature of the reduced surface at (x, y).

    method "logdet" uses K = -(x/a) Lap log(a/x); method "christoffel"
    assembles it from momentum-chart Christoffel norms. ``fd=True``
    replaces the closed-form Laplacian of the logdet route with central
    finite differences (Richardson-extrapolated, power-of-two steps).
    """
    _corner_guard(m, x, y)
    jac, det = _jac_checked(m, x, y)
    a = abs(det)
    if method == "christoffel":
        data = christoffel(m, x, y)
        # no 1/2 here: checked against the Taub-NUT closed form, where the
        # halved version lands at exactly K/2 for every parameter choice
        return data.norm2_gamma - data.norm2_traced
    if method != "logdet":
        raise ValueError(f"unknown curvature method {method!r}")
    if fd:
        def logfac(u: float, v: float) -> float:
            d = eval_jacobian(m, u, v).det
            return math.log(abs(d) / u)

        # log(a/x) stays O(1) even at small x, so the step is floored near
        # 2^-12: scaling it with x would leave eps/h^2 roundoff dominant
        h = max(fdtools.snapped_step(math.hypot(x, y)), 2.0 ** -12)
        hx = min(h, 2.0 ** math.floor(math.log2(0.5 * x)))
        lap = fdtools.fd_laplace(logfac, x, y, steps=(hx, h))
    else:
        d, d_x, d_y, d_lap = _det_derivatives(m, x, y)
        # Lap log(a/x) = Lap log|det| + 1/x^2, and
        # Lap log|det| = Lap(det)/det - |grad det|^2/det^2.
        lap = d_lap / d - (d_x * d_x + d_y * d_y) / (d * d) + 1.0 / (x * x)
    return -(x / a) * lap


def christoffel(m: MomentumMap, x: float, y: float) -> ChristoffelData:
    """Momentum-chart Christoffel data, fully closed-form.

    dB = -B dA B and d det = det * tr(B dA) convert (x, y)-derivatives of
    A into momentum-chart derivatives of the metric; Kahler symmetry of
    dg/dphi then gives Gamma^k_ij = (1/2) dg_ij/dphi^s g^{sk}.
    """
    _corner_guard(m, x, y)
    jac, det = _jac_checked(m, x, y)
    a = abs(det)
    A = jac.as_matrix()
    B = np.linalg.inv(A)
    (p1xx, p1xy, p1yy), (p2xx, p2xy, p2yy) = second_derivatives(m, x, y)
    dA = np.empty((2, 2, 2))
    dA[0] = np.array([[p1xx, p1xy], [p2xx, p2xy]])  # d A / dx
    dA[1] = np.array([[p1xy, p1yy], [p2xy, p2yy]])  # d A / dy
    G = (a / x) * (B.T @ B)
    Ginv = (x / a) * (A @ A.T)

    ddet = np.array([det * np.trace(B @ dA[0]), det * np.trace(B @ dA[1])])
    da = np.sign(det) * ddet
    dG = np.empty((2, 2, 2))
    for l in range(2):
        dB = -B @ dA[l] @ B
        dfac = da[l] / x - (a / (x * x) if l == 0 else 0.0)
        dG[l] = dfac * (B.T @ B) + (a / x) * (dB.T @ B + B.T @ dB)
    # dg/dphi^s = B[l, s] dG_l  (B columns are dx^l/dphi^s).
    dg_dphi = np.einsum("ls,lij->sij", B, dG)

    gamma = 0.5 * np.einsum("sij,sk->kij", dg_dphi, Ginv)
    traced = np.einsum("ij,kij->k", Ginv, gamma)
    norm2_gamma = float(
        np.einsum(
            "ia,jb,kc,kij,cab->", Ginv, Ginv, G, gamma, gamma
        )
    )
    norm2_traced = float(np.einsum("st,s,t->", G, traced, traced))
    return ChristoffelData(
        gamma=gamma,
        traced=traced,
        norm2_gamma=norm2_gamma,
        norm2_traced=norm2_traced,
    )


def conformal_laplacian(m: MomentumMap, f, x: float, y: float) -> float:
    """(x/a) * flat Laplacian of f, the Laplace-Beltrami operator of the
    reduced metric applied to a scalar in the (x, y) chart (FD)."""
    _, det = _jac_checked(m, x, y)
    return (x / abs(det)) * fdtools.fd_laplace(f, x, y)


def abreu_residual(m: MomentumMap, x: float, y: float) -> float:
    """Laplace-Beltrami of the coordinate function x in the reduced
    metric; vanishes for every synthesized map (x is harmonic and the
    operator is conformally flat)."""
    return conformal_laplacian(m, lambda u, v: u, x, y)


def conformal_scalar(m: MomentumMap, x: float, y: float) -> float:
    """Scalar curvature of the conformally rescaled (companion) metric.

    For scalar-flat reduced metrics this equals |Gamma^k_ij|^2 / x, which
    is nonnegative by construction.
    """
    data = christoffel(m, x, y)
    return data.norm2_gamma / x


def pseudo_kahler_defect(m: MomentumMap, x: float, y: float) -> float:
    """Max over index triples of |dg_ij/dphi^k - dg_ik/dphi^j| by central
    differences along the momentum directions; a symmetry check."""
    jac, det = _jac_checked(m, x, y)
    B = np.linalg.inv(jac.as_matrix())

    def g_at(u: float, v: float) -> np.ndarray:
        ms = metric_sigma(m, u, v, chart="phi")
        return ms.as_matrix()

    h = fdtools.snapped_step(x, scale=1e-5)
    dg = np.empty((2, 2, 2))
    for s in range(2):
        dx_dir, dy_dir = B[0, s], B[1, s]
        scale = math.hypot(dx_dir, dy_dir)
        step = h / max(scale, 1e-30)
        gp = g_at(x + step * dx_dir, y + step * dy_dir)
        gm = g_at(x - step * dx_dir, y - step * dy_dir)
        dg[s] = (gp - gm) / (2.0 * step)
    worst = 0.0
    for i in range(2):
        for j in range(2):
            for k in range(2):
                worst = max(worst, abs(dg[k][i, j] - dg[j][i, k]))
    return worst


def christoffel_from_metric(g: np.ndarray, dg: tuple) -> np.ndarray:
    """Gamma^k_ij for a 2x2 metric given dg[s] = dg/dcoord^s, assuming the
    Kahler symmetry dg_ij/dx^k = dg_ik/dx^j (so the three-term formula
    collapses to one term)."""
    ginv = np.linalg.inv(g)
    dgs = np.stack([np.asarray(d, dtype=float) for d in dg])
    return 0.5 * np.einsum("sij,sk->kij", dgs, ginv)


def invariants_from_metric(g: np.ndarray, gamma: np.ndarray) -> tuple[float, float]:
    """(|Gamma^k_ij|^2, |Gamma^k|^2) for explicit metric data."""
    ginv = np.linalg.inv(g)
    n2g = float(np.einsum("ia,jb,kc,kij,cab->", ginv, ginv, g, gamma, gamma))
    traced = np.einsum("ij,kij->k", ginv, gamma)
    n2t = float(np.einsum("st,s,t->", g, traced, traced))
    return n2g, n2t
