"""Convex polytope outlines and the momentum maps they synthesize.

An outline is a convex planar polygonal path: an incoming ray, a chain of
corners, an outgoing ray, and one positive traversal speed per edge.  The
synthesized momentum map
``Phi(x, y) = base + linear*(y - y_1)
           + sum_k jump_k * (sqrt(x^2 + (y - y_k)^2) - |y_k - y_1|)
           + quad * x^2``
restricts on the x = 0 axis to a piecewise-linear curve that traces the
outline with the prescribed speeds: the kink locations y_k are fixed by
arclength/speed, the jump vectors by the change of edge velocity across
each corner.  Both components of the map solve the potential equation
``x*(phi_xx + phi_yy) - phi_x = 0`` away from the kink points.

Derivatives of the map through third order are closed-form; geometry
consumes them for curvature work.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "OutlineError",
    "NonConvexError",
    "ZeroSpeedError",
    "BadNormalizationError",
    "DegenerateMapError",
    "OutlineSpec",
    "ValidatedOutline",
    "KinkTerm",
    "MomentumMap",
    "JacobianAt",
    "validate_outline",
    "parameter_count",
    "synthesize",
    "eval_map",
    "eval_jacobian",
    "second_derivatives",
    "third_derivatives",
    "trace",
    "map_pde_residual",
    "halfplane",
    "quarter",
    "one_vertex_map",
    "one_vertex_dets",
    "validate_one_vertex",
    "outline_to_dict",
    "outline_from_dict",
    "load_outline",
    "save_outline",
    "map_to_dict",
    "map_from_dict",
    "load_map",
    "save_map",
]


class OutlineError(ValueError):
    """Invalid outline data. ``index`` points at the offending vertex/edge."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message if index is None else f"{message} (index {index})")
        self.index = index


class NonConvexError(OutlineError):
    pass


class ZeroSpeedError(OutlineError):
    pass


class BadNormalizationError(OutlineError):
    pass


class DegenerateMapError(ValueError):
    """Synthesized map has a vanishing or sign-changing Jacobian."""


@dataclass(frozen=True)
class OutlineSpec:
    """Raw outline: corner list, unit ray directions, one speed per edge.

    ``ray_in`` is the traversal direction along the incoming ray (pointing
    toward the first corner), ``ray_out`` the direction leaving the last
    corner. ``speeds`` has length ``len(vertices) + 1``: incoming ray,
    interior segments in order, outgoing ray. ``alpha``/``beta`` are the
    nonnegative quadratic weights entering the map as (alpha/2, beta/2).
    """

    vertices: tuple[tuple[float, float], ...]
    ray_in: tuple[float, float]
    ray_out: tuple[float, float]
    speeds: tuple[float, ...]
    alpha: float = 0.0
    beta: float = 0.0


@dataclass(frozen=True)
class ValidatedOutline:
    spec: OutlineSpec
    kink_y: tuple[float, ...]
    edge_dirs: tuple[tuple[float, float], ...]
    orientation: int


@dataclass(frozen=True)
class KinkTerm:
    y0: float
    jump1: float
    jump2: float


@dataclass(frozen=True)
class MomentumMap:
    """Closed-form momentum map; see the module docstring for the formula."""

    base: tuple[float, float]
    linear1: float
    linear2: float
    kinks: tuple[KinkTerm, ...] = ()
    quad1: float = 0.0
    quad2: float = 0.0

    @property
    def y_ref(self) -> float:
        return self.kinks[0].y0 if self.kinks else 0.0


@dataclass(frozen=True)
class JacobianAt:
    a11: float
    a12: float
    a21: float
    a22: float

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])


_UNIT_TOL = 1e-9
_EXACT_FIRST = (0.0, 1.0)


def _norm(v: Sequence[float]) -> float:
    return math.hypot(float(v[0]), float(v[1]))


def _cross(u: Sequence[float], v: Sequence[float]) -> float:
    return u[0] * v[1] - u[1] * v[0]


def validate_outline(spec: OutlineSpec) -> ValidatedOutline:
    """Check convexity, speeds, normalization; derive kink heights.

    Raises NonConvexError / ZeroSpeedError / BadNormalizationError with
    the offending index. Both traversal orientations are accepted as long
    as all turns agree; mixed turn signs, zero-length segments, or total
    turning beyond pi (which would make the rays cross) are rejected.
    """
    verts = [(float(px), float(py)) for px, py in spec.vertices]
    n_edges = len(verts) + 1
    if len(spec.speeds) != n_edges:
        raise OutlineError(
            f"expected {n_edges} speeds for {len(verts)} vertices, "
            f"got {len(spec.speeds)}"
        )
    for j, v in enumerate(spec.speeds):
        if not (float(v) > 0.0) or not math.isfinite(float(v)):
            raise ZeroSpeedError("edge speed must be positive", index=j)
    if spec.alpha < 0.0 or spec.beta < 0.0:
        raise OutlineError("alpha and beta must be nonnegative")

    for name, ray in (("ray_in", spec.ray_in), ("ray_out", spec.ray_out)):
        if abs(_norm(ray) - 1.0) > _UNIT_TOL:
            raise BadNormalizationError(f"{name} must be a unit vector")

    if len(verts) >= 2:
        if verts[0] != _EXACT_FIRST:
            raise BadNormalizationError(
                "first corner must be exactly (0, 1)", index=0
            )
    elif len(verts) == 1:
        if verts[0] != (0.0, 0.0):
            raise BadNormalizationError(
                "single corner must sit at the origin", index=0
            )
    else:
        if _norm(np.subtract(spec.ray_in, spec.ray_out)) > _UNIT_TOL:
            raise BadNormalizationError(
                "outline without corners must have ray_in == ray_out"
            )

    dirs: list[tuple[float, float]] = [tuple(map(float, spec.ray_in))]
    if verts:
        for k in range(len(verts) - 1):
            d = (verts[k + 1][0] - verts[k][0], verts[k + 1][1] - verts[k][1])
            length = _norm(d)
            if length < 1e-14:
                raise NonConvexError("zero-length segment", index=k)
            dirs.append((d[0] / length, d[1] / length))
        dirs.append(tuple(map(float, spec.ray_out)))

    # One turn per corner; dirs has len(verts) + 1 edges when corners exist
    # and a single straight edge otherwise.
    orientation = 0
    turning = 0.0
    for j in range(len(dirs) - 1):
        cz = _cross(dirs[j], dirs[j + 1])
        dz = dirs[j][0] * dirs[j + 1][0] + dirs[j][1] * dirs[j + 1][1]
        if abs(cz) < 1e-14:
            raise NonConvexError("straight or reversed corner", index=j)
        sgn = 1 if cz > 0 else -1
        if orientation == 0:
            orientation = sgn
        elif sgn != orientation:
            raise NonConvexError("turn direction flips", index=j)
        turning += abs(math.atan2(cz, dz))
    if turning > math.pi + 1e-9:
        raise NonConvexError("total turning exceeds pi; rays would cross")

    kink_y: list[float] = []
    if verts:
        kink_y.append(0.0)
        for k in range(len(verts) - 1):
            seg = math.hypot(
                verts[k + 1][0] - verts[k][0], verts[k + 1][1] - verts[k][1]
            )
            kink_y.append(kink_y[-1] + seg / float(spec.speeds[k + 1]))

    return ValidatedOutline(
        spec=spec,
        kink_y=tuple(kink_y),
        edge_dirs=tuple(dirs),
        orientation=orientation if orientation else 1,
    )


def parameter_count(outline: OutlineSpec | ValidatedOutline) -> int:
    """Number of free parameters of the family through this outline shape:
    one speed per edge plus the two quadratic weights."""
    spec = outline.spec if isinstance(outline, ValidatedOutline) else outline
    return len(spec.speeds) + 2


def synthesize(outline: OutlineSpec | ValidatedOutline) -> MomentumMap:
    """Build the momentum map whose x = 0 trace reproduces the outline.

    Edge velocities are w_j = speed_j * dir_j; the linear part is the mean
    of the two ray velocities and each kink jump is half the velocity
    change across its corner. The result is checked for a nonvanishing
    Jacobian determinant of constant sign on a sample grid.
    """
    vo = outline if isinstance(outline, ValidatedOutline) else validate_outline(outline)
    spec = vo.spec
    w = [
        (v * d[0], v * d[1])
        for v, d in zip((float(s) for s in spec.speeds), vo.edge_dirs)
    ]
    linear = (0.5 * (w[0][0] + w[-1][0]), 0.5 * (w[0][1] + w[-1][1]))
    kinks = []
    for k, y0 in enumerate(vo.kink_y):
        j1 = 0.5 * (w[k + 1][0] - w[k][0])
        j2 = 0.5 * (w[k + 1][1] - w[k][1])
        kinks.append(KinkTerm(y0=y0, jump1=j1, jump2=j2))
    base = spec.vertices[0] if spec.vertices else (0.0, 0.0)
    m = MomentumMap(
        base=(float(base[0]), float(base[1])),
        linear1=linear[0],
        linear2=linear[1],
        kinks=tuple(kinks),
        quad1=0.5 * float(spec.alpha),
        quad2=0.5 * float(spec.beta),
    )
    _check_nondegenerate(m)
    return m


def _check_nondegenerate(m: MomentumMap, rtol: float = 1e-12) -> None:
    ys = [k.y0 for k in m.kinks] or [0.0]
    span = max(1.0, max(ys) - min(ys))
    y_samples = np.concatenate(
        [
            np.linspace(min(ys) - 3.0 * span, max(ys) + 3.0 * span, 41),
            np.asarray(ys) + 0.37 * span,
            np.asarray(ys) - 0.53 * span,
        ]
    )
    x_samples = span * np.logspace(-3, 2, 21)
    xx, yy = np.meshgrid(x_samples, y_samples, indexing="ij")
    det = _det_grid(m, xx.ravel(), yy.ravel())
    scale = span * span
    if np.any(np.abs(det) <= rtol * scale) or (np.min(det) < 0.0 < np.max(det)):
        raise DegenerateMapError(
            "Jacobian determinant vanishes or changes sign on sample grid"
        )


def _kink_arrays(m: MomentumMap):
    y0 = np.array([k.y0 for k in m.kinks])
    jp1 = np.array([k.jump1 for k in m.kinks])
    jp2 = np.array([k.jump2 for k in m.kinks])
    return y0, jp1, jp2


def eval_map(m: MomentumMap, x, y):
    """Evaluate (phi1, phi2). Accepts scalars or broadcastable arrays.

    Requires x >= 0 (the map lives on the closed right half-plane).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("eval_map requires x >= 0")
    yr = m.y_ref
    p1 = m.base[0] + m.linear1 * (y - yr) + m.quad1 * x * x
    p2 = m.base[1] + m.linear2 * (y - yr) + m.quad2 * x * x
    for k in m.kinks:
        rho = np.hypot(x, y - k.y0)
        off = abs(k.y0 - yr)
        p1 = p1 + k.jump1 * (rho - off)
        p2 = p2 + k.jump2 * (rho - off)
    if p1.ndim == 0:
        return float(p1), float(p2)
    return p1, p2


def trace(m: MomentumMap, y):
    """Boundary trace Phi(0, y)."""
    return eval_map(m, np.zeros_like(np.asarray(y, dtype=float)), y)


def _rho_guard(x, dy):
    rho = np.hypot(x, dy)
    if np.any(rho == 0.0):
        raise ValueError("Jacobian undefined at a kink corner (x=0, y=y0)")
    return rho


def eval_jacobian(m: MomentumMap, x: float, y: float) -> JacobianAt:
    """Jacobian A = d(phi1, phi2)/d(x, y) at one point."""
    x = float(x)
    y = float(y)
    a11 = 2.0 * m.quad1 * x
    a21 = 2.0 * m.quad2 * x
    a12 = m.linear1
    a22 = m.linear2
    for k in m.kinks:
        rho = _rho_guard(x, y - k.y0)
        a11 += k.jump1 * x / rho
        a21 += k.jump2 * x / rho
        a12 += k.jump1 * (y - k.y0) / rho
        a22 += k.jump2 * (y - k.y0) / rho
    return JacobianAt(a11, a12, a21, a22)


def _det_grid(m: MomentumMap, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    a11 = 2.0 * m.quad1 * x
    a21 = 2.0 * m.quad2 * x
    a12 = np.full_like(x, m.linear1)
    a22 = np.full_like(x, m.linear2)
    for k in m.kinks:
        rho = np.hypot(x, y - k.y0)
        rho = np.where(rho == 0.0, np.nan, rho)
        a11 = a11 + k.jump1 * x / rho
        a21 = a21 + k.jump2 * x / rho
        a12 = a12 + k.jump1 * (y - k.y0) / rho
        a22 = a22 + k.jump2 * (y - k.y0) / rho
    det = a11 * a22 - a12 * a21
    return det[np.isfinite(det)]


def second_derivatives(m: MomentumMap, x: float, y: float):
    """((phi1_xx, phi1_xy, phi1_yy), (phi2_xx, phi2_xy, phi2_yy)).

    Uses rho_xx = dy^2/rho^3, rho_xy = -x*dy/rho^3, rho_yy = x^2/rho^3.
    """
    x = float(x)
    y = float(y)
    d1 = [2.0 * m.quad1, 0.0, 0.0]
    d2 = [2.0 * m.quad2, 0.0, 0.0]
    for k in m.kinks:
        dy = y - k.y0
        rho = _rho_guard(x, dy)
        r3 = rho**3
        rxx = dy * dy / r3
        rxy = -x * dy / r3
        ryy = x * x / r3
        d1[0] += k.jump1 * rxx
        d1[1] += k.jump1 * rxy
        d1[2] += k.jump1 * ryy
        d2[0] += k.jump2 * rxx
        d2[1] += k.jump2 * rxy
        d2[2] += k.jump2 * ryy
    return tuple(d1), tuple(d2)


def third_derivatives(m: MomentumMap, x: float, y: float):
    """((phi1_xxx, phi1_xxy, phi1_xyy, phi1_yyy), (phi2 ...))."""
    x = float(x)
    y = float(y)
    d1 = [0.0, 0.0, 0.0, 0.0]
    d2 = [0.0, 0.0, 0.0, 0.0]
    for k in m.kinks:
        dy = y - k.y0
        rho = _rho_guard(x, dy)
        r3 = rho**3
        r5 = rho**5
        rxxx = -3.0 * dy * dy * x / r5
        rxxy = 2.0 * dy / r3 - 3.0 * dy**3 / r5
        rxyy = -x / r3 + 3.0 * x * dy * dy / r5
        ryyy = -3.0 * x * x * dy / r5
        for d, jp in ((d1, k.jump1), (d2, k.jump2)):
            d[0] += jp * rxxx
            d[1] += jp * rxxy
            d[2] += jp * rxyy
            d[3] += jp * ryyy
    return tuple(d1), tuple(d2)


def map_pde_residual(m: MomentumMap, x: float, y: float) -> tuple[float, float]:
    """x*(phi_xx + phi_yy) - phi_x for each component; identically zero
    away from the kink corners."""
    jac = eval_jacobian(m, x, y)
    (p1xx, _, p1yy), (p2xx, _, p2yy) = second_derivatives(m, x, y)
    r1 = x * (p1xx + p1yy) - jac.a11
    r2 = x * (p2xx + p2yy) - jac.a21
    return r1, r2


def halfplane() -> MomentumMap:
    """Canonical half-plane map Phi = (x^2/2, y)."""
    return MomentumMap(base=(0.0, 0.0), linear1=0.0, linear2=1.0, quad1=0.5)


_SQ2 = math.sqrt(2.0)


def quarter(alpha: float, beta: float) -> MomentumMap:
    """Canonical quarter-plane map with quadratic weights alpha, beta.

    Phi = ((y + rho)/2 + alpha x^2/2, (rho - y)/2 + beta x^2/2) up to the
    stored kink normalization; edge speeds along the trace are sqrt(2).
    """
    s = 1.0 / _SQ2
    return one_vertex_map(-s, s, s, s, alpha, beta)


def one_vertex_map(
    a: float, b: float, c: float, d: float, alpha: float = 0.0, beta: float = 0.0
) -> MomentumMap:
    """General one-corner map
    Phi = (a y + b rho + alpha x^2/2, c y + d rho + beta x^2/2),
    rho = sqrt(x^2 + y^2)."""
    return MomentumMap(
        base=(0.0, 0.0),
        linear1=float(a),
        linear2=float(c),
        kinks=(KinkTerm(0.0, float(b), float(d)),),
        quad1=0.5 * float(alpha),
        quad2=0.5 * float(beta),
    )


def one_vertex_dets(
    a: float, b: float, c: float, d: float, alpha: float, beta: float
) -> tuple[float, float, float]:
    """The three 2x2 determinants controlling nondegeneracy of the
    one-corner map: the corner pairing (a d - c b), the ray/quadratic
    pairing (a beta - c alpha) and the jump/quadratic pairing
    (b beta - d alpha)."""
    return (a * d - c * b, a * beta - c * alpha, b * beta - d * alpha)


def validate_one_vertex(
    a: float, b: float, c: float, d: float, alpha: float, beta: float
) -> bool:
    """Exact nondegeneracy test for the one-corner map.

    Writing det A = -(x/rho) * (m + n*rho + k*y) with m, n, k the three
    determinants of :func:`one_vertex_dets`, the factor keeps one sign on
    the open half-plane iff m != 0 and sign(m)*n >= |k|.
    """
    m, n, k = one_vertex_dets(a, b, c, d, alpha, beta)
    if m == 0.0:
        return False
    return math.copysign(1.0, m) * n >= abs(k)


def outline_to_dict(spec: OutlineSpec) -> dict:
    return {
        "vertices": [list(v) for v in spec.vertices],
        "ray_in": list(spec.ray_in),
        "ray_out": list(spec.ray_out),
        "speeds": list(spec.speeds),
        "alpha": spec.alpha,
        "beta": spec.beta,
    }


def outline_from_dict(data: dict) -> OutlineSpec:
    try:
        return OutlineSpec(
            vertices=tuple((float(p[0]), float(p[1])) for p in data["vertices"]),
            ray_in=(float(data["ray_in"][0]), float(data["ray_in"][1])),
            ray_out=(float(data["ray_out"][0]), float(data["ray_out"][1])),
            speeds=tuple(float(s) for s in data["speeds"]),
            alpha=float(data.get("alpha", 0.0)),
            beta=float(data.get("beta", 0.0)),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise OutlineError(f"malformed outline data: {exc}") from exc


def load_outline(path) -> OutlineSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return outline_from_dict(json.load(fh))


def save_outline(spec: OutlineSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(outline_to_dict(spec), fh, indent=2)
        fh.write("\n")


def map_to_dict(m: MomentumMap) -> dict:
    return {
        "base": list(m.base),
        "linear": [m.linear1, m.linear2],
        "kinks": [{"y0": k.y0, "jump": [k.jump1, k.jump2]} for k in m.kinks],
        "quad": [m.quad1, m.quad2],
    }


def map_from_dict(data: dict) -> MomentumMap:
    try:
        kinks = tuple(
            KinkTerm(float(k["y0"]), float(k["jump"][0]), float(k["jump"][1]))
            for k in data.get("kinks", [])
        )
        return MomentumMap(
            base=(float(data["base"][0]), float(data["base"][1])),
            linear1=float(data["linear"][0]),
            linear2=float(data["linear"][1]),
            kinks=kinks,
            quad1=float(data["quad"][0]),
            quad2=float(data["quad"][1]),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed map data: {exc}") from exc


def load_map(path) -> MomentumMap:
    with open(path, "r", encoding="utf-8") as fh:
        return map_from_dict(json.load(fh))


def save_map(m: MomentumMap, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(map_to_dict(m), fh, indent=2)
        fh.write("\n")
