"""Worked closed-form examples used as cross-check fixtures.

Each entry packages explicit fields (solutions, maps, metric data) with
closed-form derivatives where they exist, plus a ``crosscheck`` routine
returning named maximum deviations over seeded sample sets. The entries:

1. nested-radical superharmonic potential (continuous, kinked across the
   ray y = 0, x >= 1)
2. unit step boundary data and its explicit bounded solution
3. unit pulse solution and the dual of the elementary kernel
4. ramp-log solution, C^1 but not C^2 at the axis
5. one-corner map family with rotational closed-form curvature
6. two-corner compact-outline map family, synthesized and explicit
7. product chart with inverse momentum coordinates and diagonal metric
8. product chart mixing a bounded and an unbounded factor

Entries 7 and 8 carry their metric data in momentum coordinates directly
(diagonal closed forms); the others work in the (x, y) chart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import geometry, polytope
from .pde import ScalarField, dualize, residual
from .polytope import KinkTerm, MomentumMap, OutlineSpec
from . import fdtools

__all__ = [
    "BadParamsError",
    "GalleryEntry",
    "PhiChartMetric",
    "gallery",
    "gallery_ids",
    "crosscheck",
]


class BadParamsError(ValueError):
    """Unknown entry id or parameter outside its allowed range."""


@dataclass(frozen=True)
class PhiChartMetric:
    """Closed-form metric data in momentum coordinates (u, w): the metric
    and its coordinate derivatives, the profile function x(u, w) with two
    derivative levels, and the expected inverse-metric closed form."""

    g: Callable
    dg: Callable
    ginv_expected: Callable
    x_of: Callable
    grad_x: Callable
    hess_x: Callable
    sample: Callable


@dataclass(frozen=True)
class GalleryEntry:
    id: int
    title: str
    params: dict
    fields: dict
    notes: str


def gallery_ids() -> tuple[int, ...]:
    return tuple(range(1, 9))


def _require(cond: bool, msg: str):
    if not cond:
        raise BadParamsError(msg)


# -- entry 1 ---------------------------------------------------------------


def _entry1() -> GalleryEntry:
    def val(x, y):
        p = x * x + y * y
        s = math.sqrt((1.0 - p) ** 2 + 4.0 * y * y)
        return math.sqrt(2.0) - math.sqrt(1.0 - p + s)

    def grad(x, y):
        p = x * x + y * y
        s = math.sqrt((1.0 - p) ** 2 + 4.0 * y * y)
        v = math.sqrt(1.0 - p + s)
        return (x * v / s, y * (s - 1.0 - p) / (s * v))

    fld = ScalarField(
        f=val,
        grad=grad,
        hess=None,
        growth_note="bounded; superharmonic for the potential operator; "
        "gradient jumps across the ray y = 0, x >= 1",
    )
    return GalleryEntry(
        id=1,
        title="nested-radical superharmonic potential",
        params={},
        fields={"potential": fld},
        notes="continuous on the closed half-plane, smooth off the branch "
        "ray y = 0, x >= 1 where the y-derivative jumps",
    )


# -- entries 2 and 3 -------------------------------------------------------


def _shifted_step(y0: float) -> ScalarField:
    """phi = (1 + (y - y0)/r)/2 with r = sqrt(x^2 + (y - y0)^2); the
    bounded solution with a unit step trace at y = y0."""

    def val(x, y):
        dy = y - y0
        return 0.5 * (1.0 + dy / math.hypot(x, dy))

    def grad(x, y):
        dy = y - y0
        r3 = math.hypot(x, dy) ** 3
        return (-0.5 * x * dy / r3, 0.5 * x * x / r3)

    def hess(x, y):
        dy = y - y0
        r = math.hypot(x, dy)
        r3, r5 = r**3, r**5
        return (
            0.5 * (-dy / r3 + 3.0 * x * x * dy / r5),
            0.5 * (-x / r3 + 3.0 * x * dy * dy / r5),
            -1.5 * x * x * dy / r5,
        )

    return ScalarField(f=val, grad=grad, hess=hess,
                       growth_note="bounded in [0, 1]")


def _entry2() -> GalleryEntry:
    return GalleryEntry(
        id=2,
        title="unit step boundary data",
        params={},
        fields={"step": _shifted_step(0.0)},
        notes="trace is the Heaviside step; the solution is smooth for "
        "x > 0 and spans (0, 1)",
    )


def _entry3() -> GalleryEntry:
    up = _shifted_step(-0.5)
    dn = _shifted_step(0.5)

    def val(x, y):
        return up.f(x, y) - dn.f(x, y)

    def grad(x, y):
        g1 = up.grad(x, y)
        g2 = dn.grad(x, y)
        return (g1[0] - g2[0], g1[1] - g2[1])

    def hess(x, y):
        h1 = up.hess(x, y)
        h2 = dn.hess(x, y)
        return tuple(a - b for a, b in zip(h1, h2))

    pulse = ScalarField(f=val, grad=grad, hess=hess,
                        growth_note="bounded, decays like |y|^-2")

    def dval(x, y):
        return 0.5 * (x * x + y * y) ** -1.5

    def dgrad(x, y):
        q = (x * x + y * y) ** -2.5
        return (-1.5 * x * q, -1.5 * y * q)

    def dhess(x, y):
        r2 = x * x + y * y
        q5 = r2**-2.5
        q7 = r2**-3.5
        return (
            -1.5 * q5 + 7.5 * x * x * q7,
            7.5 * x * y * q7,
            -1.5 * q5 + 7.5 * y * y * q7,
        )

    delta_dual = ScalarField(
        f=dval, grad=dgrad, hess=dhess,
        growth_note="modified-equation solution; the elementary kernel "
        "divided by x^2",
    )
    return GalleryEntry(
        id=3,
        title="unit pulse and the dual of the elementary kernel",
        params={},
        fields={"pulse": pulse, "delta_dual": delta_dual},
        notes="the pulse is the difference of two shifted steps; the "
        "delta_dual field solves the modified equation away from the "
        "origin",
    )


# -- entry 4 ---------------------------------------------------------------


def _entry4() -> GalleryEntry:
    def logterm(x, y, r):
        # (y + r) / x == x / (r - y); pick whichever difference is additive
        if y >= 0.0:
            return math.log((y + r) / x)
        return math.log(x / (r - y))

    def val(x, y):
        r = math.hypot(x, y)
        return y * r + x * x * logterm(x, y, r)

    def grad(x, y):
        r = math.hypot(x, y)
        return (2.0 * x * logterm(x, y, r), 2.0 * r)

    def hess(x, y):
        r = math.hypot(x, y)
        return (
            2.0 * logterm(x, y, r) - 2.0 * y / r,
            2.0 * x / r,
            2.0 * y / r,
        )

    fld = ScalarField(
        f=val, grad=grad, hess=hess,
        growth_note="C^1 up to the axis with Hoelder first derivatives; "
        "second derivatives blow up logarithmically",
    )
    return GalleryEntry(
        id=4,
        title="ramp-log potential",
        params={},
        fields={"potential": fld},
        notes="exact potential-equation solution for x > 0; phi_x = "
        "2 x log((y+r)/x) tends to 0 at the axis",
    )


# -- entry 5 ---------------------------------------------------------------


def _entry5(params: dict) -> GalleryEntry:
    m_mass = float(params.get("M", 1.0))
    k_skew = float(params.get("k", 0.0))
    _require(m_mass > 0.0, "entry 5 needs M > 0")
    _require(-1.0 <= k_skew <= 1.0, "entry 5 needs k in [-1, 1]")
    alpha = m_mass * (1.0 + k_skew) / math.sqrt(2.0)
    beta = m_mass * (1.0 - k_skew) / math.sqrt(2.0)
    mp = polytope.quarter(alpha, beta)

    def factor(x, y):
        r = math.hypot(x, y)
        return (1.0 + m_mass * (r + k_skew * y)) / r

    def gauss_k(x, y):
        r = math.hypot(x, y)
        den = (1.0 + m_mass * (r + k_skew * y)) ** 3
        return -m_mass * (1.0 - m_mass * k_skew * (k_skew * r + y)) / den

    return GalleryEntry(
        id=5,
        title="one-corner map with rotational curvature profile",
        params={"M": m_mass, "k": k_skew, "alpha": alpha, "beta": beta},
        fields={"map": mp, "factor": factor, "gauss_curvature": gauss_k},
        notes="conformal factor (1 + M(r + k y))/r; curvature decays "
        "cubically in the factor",
    )


# -- entry 6 ---------------------------------------------------------------


def _entry6(params: dict) -> GalleryEntry:
    v1 = float(params.get("v1", 1.0))
    v2 = float(params.get("v2", 1.0))
    v3 = float(params.get("v3", 1.0))
    alpha = float(params.get("alpha", 0.0))
    beta = float(params.get("beta", 0.0))
    _require(min(v1, v2, v3) > 0.0, "entry 6 needs positive speeds")
    _require(alpha >= 0.0 and beta >= 0.0, "entry 6 needs alpha, beta >= 0")
    outline = OutlineSpec(
        vertices=((0.0, 1.0), (1.0, 0.0)),
        ray_in=(0.0, -1.0),
        ray_out=(1.0, 0.0),
        speeds=(v1, v2, v3),
        alpha=alpha,
        beta=beta,
    )
    y2 = math.sqrt(2.0) / v2
    s8 = v2 / (2.0 * math.sqrt(2.0))
    closed = MomentumMap(
        base=(0.0, 1.0),
        linear1=0.5 * v3,
        linear2=-0.5 * v1,
        kinks=(
            KinkTerm(0.0, s8, 0.5 * v1 - s8),
            KinkTerm(y2, 0.5 * v3 - s8, s8),
        ),
        quad1=0.5 * alpha,
        quad2=0.5 * beta,
    )
    return GalleryEntry(
        id=6,
        title="two-corner compact outline map",
        params={"v1": v1, "v2": v2, "v3": v3, "alpha": alpha, "beta": beta},
        fields={"outline": outline, "map": closed},
        notes="synthesis from the outline must reproduce the closed-form "
        "coefficients exactly",
    )


# -- entries 7 and 8 -------------------------------------------------------


def _entry7() -> GalleryEntry:
    def forward(u, w):
        return (math.sqrt(1.0 - u * u) * w, u * w)

    def inverse(x, y):
        r = math.hypot(x, y)
        return (y / r, r)

    def g(u, w):
        return np.diag([1.0 / (1.0 - u * u), 1.0 / (w * w)])

    def dg(u, w):
        du = np.diag([2.0 * u / (1.0 - u * u) ** 2, 0.0])
        dw = np.diag([0.0, -2.0 / w**3])
        return du, dw

    def ginv_expected(u, w):
        return np.diag([1.0 - u * u, w * w])

    def x_of(u, w):
        return math.sqrt(1.0 - u * u) * w

    def grad_x(u, w):
        q = math.sqrt(1.0 - u * u)
        return (-u * w / q, q)

    def hess_x(u, w):
        q = math.sqrt(1.0 - u * u)
        return (-w / q**3, -u / q, 0.0)

    def sample(rng: np.random.Generator, n: int):
        u = rng.uniform(-0.9, 0.9, n)
        w = rng.uniform(0.2, 3.0, n)
        return u, w

    pcm = PhiChartMetric(
        g=g, dg=dg, ginv_expected=ginv_expected,
        x_of=x_of, grad_x=grad_x, hess_x=hess_x, sample=sample,
    )
    return GalleryEntry(
        id=7,
        title="product chart with radial momentum coordinates",
        params={},
        fields={"forward": forward, "inverse": inverse, "metric": pcm},
        notes="momentum coordinates are (y/r, r); the metric is diagonal "
        "and the profile x(u, w) is harmonic for the reduced operator",
    )


def _entry8() -> GalleryEntry:
    def forward(u, w):
        return (math.sqrt((1.0 - u * u) * (1.0 + w * w)), u * w)

    def inverse(x, y):
        p = x * x + y * y
        s = math.sqrt((1.0 - p) ** 2 + 4.0 * y * y)
        u = math.sqrt(max(0.0, 1.0 - p + s) / 2.0)
        w = math.copysign(math.sqrt(max(0.0, p - 1.0 + s) / 2.0), y)
        return (u, w)

    def g(u, w):
        return np.diag([1.0 / (1.0 - u * u), 1.0 / (1.0 + w * w)])

    def dg(u, w):
        du = np.diag([2.0 * u / (1.0 - u * u) ** 2, 0.0])
        dw = np.diag([0.0, -2.0 * w / (1.0 + w * w) ** 2])
        return du, dw

    def ginv_expected(u, w):
        return np.diag([1.0 - u * u, 1.0 + w * w])

    def x_of(u, w):
        return math.sqrt((1.0 - u * u) * (1.0 + w * w))

    def grad_x(u, w):
        return (
            -u * math.sqrt((1.0 + w * w) / (1.0 - u * u)),
            w * math.sqrt((1.0 - u * u) / (1.0 + w * w)),
        )

    def hess_x(u, w):
        qu = 1.0 - u * u
        qw = 1.0 + w * w
        return (
            -math.sqrt(qw) / qu**1.5,
            -u * w / math.sqrt(qu * qw),
            math.sqrt(qu) / qw**1.5,
        )

    def sample(rng: np.random.Generator, n: int):
        u = rng.uniform(0.05, 0.9, n)
        w = rng.uniform(-2.5, 2.5, n)
        return u, w

    pcm = PhiChartMetric(
        g=g, dg=dg, ginv_expected=ginv_expected,
        x_of=x_of, grad_x=grad_x, hess_x=hess_x, sample=sample,
    )
    return GalleryEntry(
        id=8,
        title="product chart mixing bounded and unbounded factors",
        params={},
        fields={"forward": forward, "inverse": inverse, "metric": pcm},
        notes="the inverse uses the u >= 0 branch; the chart is two-to-one "
        "under (u, w) -> (-u, -w) and has a branch ray at y = 0, r > 1. "
        "|grad x|^2 = u^2 + w^2 vanishes at the single interior critical "
        "point u = w = 0",
    )


_BUILDERS = {
    1: lambda p: _entry1(),
    2: lambda p: _entry2(),
    3: lambda p: _entry3(),
    4: lambda p: _entry4(),
    5: _entry5,
    6: _entry6,
    7: lambda p: _entry7(),
    8: lambda p: _entry8(),
}


def gallery(entry_id: int, params: Optional[dict] = None) -> GalleryEntry:
    """Build a gallery entry by id (1 through 8), with optional parameter
    overrides for the parametric families (5 and 6)."""
    try:
        builder = _BUILDERS[int(entry_id)]
    except (KeyError, ValueError):
        raise BadParamsError(f"unknown gallery entry {entry_id!r}") from None
    p = dict(params or {})
    if p and int(entry_id) not in (5, 6):
        raise BadParamsError(f"entry {entry_id} takes no parameters")
    return builder(p)


# ---------------------------------------------------------------------------
# Cross-checks.


def _phi_chart_checks(entry: GalleryEntry, rng, n: int) -> dict:
    pcm: PhiChartMetric = entry.fields["metric"]
    fwd = entry.fields["forward"]
    inv = entry.fields["inverse"]
    us, ws = pcm.sample(rng, n)
    out = {
        "round_trip": 0.0,
        "ginv_match": 0.0,
        "det_ginv": 0.0,
        "congruence": 0.0,
        "abreu": 0.0,
        "conformal_min": np.inf,
    }
    h = 1e-4
    for u, w in zip(us, ws):
        x, y = fwd(u, w)
        u2, w2 = inv(x, y)
        out["round_trip"] = max(out["round_trip"],
                                math.hypot(u2 - u, w2 - w))
        gmat = pcm.g(u, w)
        ginv = np.linalg.inv(gmat)
        out["ginv_match"] = max(
            out["ginv_match"],
            float(np.max(np.abs(ginv - pcm.ginv_expected(u, w)))),
        )
        xval = pcm.x_of(u, w)
        out["det_ginv"] = max(
            out["det_ginv"], abs(float(np.linalg.det(ginv)) - xval * xval)
        )
        # forward Jacobian: Richardson-extrapolated central differences of
        # the closed forward map
        def fd_jac(step):
            jm = np.empty((2, 2))
            jm[0, 0] = (fwd(u + step, w)[0] - fwd(u - step, w)[0]) / (2 * step)
            jm[0, 1] = (fwd(u, w + step)[0] - fwd(u, w - step)[0]) / (2 * step)
            jm[1, 0] = (fwd(u + step, w)[1] - fwd(u - step, w)[1]) / (2 * step)
            jm[1, 1] = (fwd(u, w + step)[1] - fwd(u, w - step)[1]) / (2 * step)
            return jm

        jf = (4.0 * fd_jac(0.5 * h) - fd_jac(h)) / 3.0
        amat = np.linalg.inv(jf)
        adet = abs(float(np.linalg.det(amat)))
        cong = amat.T @ gmat @ amat - (adet / xval) * np.eye(2)
        out["congruence"] = max(out["congruence"], float(np.max(np.abs(cong))))
        gamma = geometry.christoffel_from_metric(gmat, pcm.dg(u, w))
        gx = pcm.grad_x(u, w)
        hx = pcm.hess_x(u, w)
        hmat = np.array([[hx[0], hx[1]], [hx[1], hx[2]]])
        lap = float(
            np.einsum("ij,ij->", ginv, hmat)
            - np.einsum("ij,kij,k->", ginv, gamma, np.asarray(gx))
        )
        out["abreu"] = max(out["abreu"], abs(lap))
        n2g, _ = geometry.invariants_from_metric(gmat, gamma)
        out["conformal_min"] = min(out["conformal_min"], n2g / xval)
    return out


def crosscheck(entry, samples: int = 200, seed: int = 0) -> dict:
    """Named maximum deviations of the entry's closed forms over a seeded
    sample set. Every value is expected to be near zero except bounds
    explicitly named as minima. ``entry`` is a GalleryEntry or a plain id
    (default parameters)."""
    if isinstance(entry, int):
        entry = gallery(entry)
    rng = np.random.default_rng(seed)
    eid = entry.id
    if eid == 1:
        fld = entry.fields["potential"]
        worst_res = -np.inf
        worst_grad = 0.0
        count = 0
        while count < samples:
            x = rng.uniform(0.1, 2.0)
            y = rng.uniform(-2.0, 2.0)
            if abs(y) < 0.15 and x > 0.8:
                continue
            count += 1
            r = residual(fld, x, y, eq="unmodified", mode="fd")
            worst_res = max(worst_res, r)
            gfd = fdtools.fd_gradient(fld.f, x, y)
            gan = fld.grad(x, y)
            worst_grad = max(worst_grad, math.hypot(gfd[0] - gan[0],
                                                    gfd[1] - gan[1]))
        return {"superharmonic_excess": worst_res, "grad_consistency": worst_grad}

    if eid == 2:
        fld = entry.fields["step"]
        worst = 0.0
        for _ in range(samples):
            x = rng.uniform(0.05, 5.0)
            y = rng.uniform(-5.0, 5.0)
            worst = max(worst, abs(residual(fld, x, y, eq="unmodified")))
        edge = max(
            abs(fld.f(1e-9, 1.0) - 1.0),
            abs(fld.f(1e-9, -1.0)),
        )
        return {"residual": worst, "trace_step": edge}

    if eid == 3:
        pulse = entry.fields["pulse"]
        ddual = entry.fields["delta_dual"]

        def kern(x, y):
            return 0.5 * x * x / (x * x + y * y) ** 1.5

        def kern_grad(x, y):
            r2 = x * x + y * y
            return (
                x / r2**1.5 - 1.5 * x**3 / r2**2.5,
                -1.5 * x * x * y / r2**2.5,
            )

        gfield = ScalarField(f=kern, grad=kern_grad, hess=None)
        dual_of_g = dualize(gfield, to="modified")
        worst_pulse = 0.0
        worst_dual = 0.0
        pair = 0.0
        for _ in range(samples):
            x = rng.uniform(0.05, 4.0)
            y = rng.uniform(-4.0, 4.0)
            worst_pulse = max(
                worst_pulse, abs(residual(pulse, x, y, eq="unmodified"))
            )
            worst_dual = max(
                worst_dual, abs(residual(ddual, x, y, eq="modified"))
            )
            pair = max(pair, abs(dual_of_g.f(x, y) - ddual.f(x, y)))
        return {
            "residual_pulse": worst_pulse,
            "residual_delta_dual": worst_dual,
            "dual_pair": pair,
        }

    if eid == 4:
        fld = entry.fields["potential"]
        worst = 0.0
        axis = 0.0
        for _ in range(samples):
            x = rng.uniform(0.02, 4.0)
            y = rng.uniform(-4.0, 4.0)
            worst = max(worst, abs(residual(fld, x, y, eq="unmodified")))
            axis = max(axis, abs(fld.grad(1e-8, y)[0]))
        return {"residual": worst, "axis_gradient": axis}

    if eid == 5:
        mp = entry.fields["map"]
        factor = entry.fields["factor"]
        kfun = entry.fields["gauss_curvature"]
        worst_f = 0.0
        worst_k = 0.0
        worst_mm = 0.0
        for _ in range(samples):
            x = rng.uniform(0.1, 4.0)
            y = rng.uniform(-4.0, 4.0)
            if math.hypot(x, y) < 0.05:
                continue
            jac = polytope.eval_jacobian(mp, x, y)
            worst_f = max(worst_f, abs(abs(jac.det) / x - factor(x, y)))
            k1 = geometry.gauss_curvature(mp, x, y, method="logdet")
            k2 = geometry.gauss_curvature(mp, x, y, method="christoffel")
            worst_k = max(worst_k, abs(k1 - kfun(x, y)))
            worst_mm = max(worst_mm, abs(k1 - k2))
        return {
            "factor_match": worst_f,
            "curvature_match": worst_k,
            "method_agreement": worst_mm,
        }

    if eid == 6:
        outline = entry.fields["outline"]
        closed = entry.fields["map"]
        synth = polytope.synthesize(outline)
        coef = _map_coefficient_distance(synth, closed)
        vo = polytope.validate_outline(outline)
        worst_tr = 0.0
        for y0, corner in zip(vo.kink_y, outline.vertices):
            t1, t2 = polytope.trace(closed, y0)
            worst_tr = max(worst_tr, abs(t1 - corner[0]), abs(t2 - corner[1]))
        worst_res = 0.0
        for _ in range(samples):
            x = rng.uniform(0.1, 3.0)
            y = rng.uniform(-2.0, 3.0)
            r1, r2 = polytope.map_pde_residual(closed, x, y)
            worst_res = max(worst_res, abs(r1), abs(r2))
        return {
            "synth_matches_closed": coef,
            "trace_corners": worst_tr,
            "residual_components": worst_res,
        }

    if eid in (7, 8):
        out = _phi_chart_checks(entry, rng, samples)
        if eid == 8:
            pcm: PhiChartMetric = entry.fields["metric"]
            worst = 0.0
            for u in np.linspace(-0.9, 0.9, 37):
                gx = pcm.grad_x(u, 0.0)
                gmat = pcm.g(u, 0.0)
                ginv = np.linalg.inv(gmat)
                val = float(np.asarray(gx) @ ginv @ np.asarray(gx))
                worst = max(worst, abs(val - u * u))
            out["grad_sq_on_axis"] = worst
        return out

    raise BadParamsError(f"no crosscheck for entry {eid}")


def _map_coefficient_distance(m1: MomentumMap, m2: MomentumMap) -> float:
    if len(m1.kinks) != len(m2.kinks):
        return math.inf
    worst = max(
        abs(m1.base[0] - m2.base[0]),
        abs(m1.base[1] - m2.base[1]),
        abs(m1.linear1 - m2.linear1),
        abs(m1.linear2 - m2.linear2),
        abs(m1.quad1 - m2.quad1),
        abs(m1.quad2 - m2.quad2),
    )
    for k1, k2 in zip(m1.kinks, m2.kinks):
        worst = max(
            worst,
            abs(k1.y0 - k2.y0),
            abs(k1.jump1 - k2.jump1),
            abs(k1.jump2 - k2.jump2),
        )
    return worst
