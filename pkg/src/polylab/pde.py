"""Model equations on the right half-plane: separation tables, duality,
the degenerate change of variables, barrier certificates, and the
logarithmic-gradient probe.

Two equations appear throughout. The potential equation
``L[u] = u_xx + u_yy - u_x/x = 0`` governs momentum-map components; the
modified equation ``L~[u] = u_xx + u_yy + 3 u_x/x = 0`` governs their
duals under ``u -> u / x^2``. Separated solutions ``u(x) v(y)`` populate
two six-row tables (one per equation) indexed by the separation constant
sign and a primary/tilde variant choice.

In the variables ``s = 1/(2 x^2), t = sqrt(8) y`` the modified equation
becomes ``s^3 f_ss + f_tt = 0`` (times 1/8); the barrier certificates are
most naturally written there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import fdtools, specfun
from .specfun import j0 as _j0, j1 as _j1, y0 as _y0, y1 as _y1
from .specfun import i0 as _i0, i1 as _i1, k0 as _k0, k1 as _k1

__all__ = [
    "MissingDerivatives",
    "NonPositiveField",
    "ParamOutOfRange",
    "VerificationFailed",
    "ScalarField",
    "residual",
    "dualize",
    "StPoint",
    "to_st",
    "from_st",
    "field_to_st",
    "st_field_to_xy",
    "st_residual",
    "EigenEntry",
    "eigenfunction",
    "catalog",
    "BarrierCert",
    "make_barrier",
    "gradient_bound_probe",
    "halton_points",
]


class MissingDerivatives(ValueError):
    """Analytic-mode operation needs grad/hess the field does not carry."""


class NonPositiveField(ValueError):
    """Probe of log-gradient hit a nonpositive field value."""


class ParamOutOfRange(ValueError):
    """Barrier or catalog parameter outside its documented range."""


class VerificationFailed(RuntimeError):
    """A certificate check failed; the message names check and point."""


@dataclass(frozen=True)
class ScalarField:
    """A scalar field with optional closed-form derivatives.

    ``f(x, y) -> float``; ``grad(x, y) -> (f_x, f_y)``;
    ``hess(x, y) -> (f_xx, f_xy, f_yy)``. ``growth_note`` is free-form
    documentation of growth/regularity (no semantics attached).
    """

    f: Callable[[float, float], float]
    grad: Optional[Callable[[float, float], tuple]] = None
    hess: Optional[Callable[[float, float], tuple]] = None
    growth_note: str = ""

    def __call__(self, x: float, y: float) -> float:
        return self.f(x, y)


def residual(
    f: ScalarField,
    x: float,
    y: float,
    eq: str = "unmodified",
    mode: str = "analytic",
) -> float:
    """Pointwise PDE residual of the requested equation.

    eq "unmodified": f_xx + f_yy - f_x/x; "modified": f_xx + f_yy + 3 f_x/x.
    mode "analytic" uses the field's stored derivatives
    (MissingDerivatives if absent), "fd" falls back to central
    differences on values alone.
    """
    if eq == "unmodified":
        c = -1.0
    elif eq == "modified":
        c = 3.0
    else:
        raise ValueError(f"unknown equation {eq!r}")
    if mode == "analytic":
        missing = [n for n, v in (("grad", f.grad), ("hess", f.hess)) if v is None]
        if missing:
            raise MissingDerivatives(
                f"analytic residual needs {', '.join(missing)}"
            )
        fx, _ = f.grad(x, y)
        fxx, _, fyy = f.hess(x, y)
    elif mode == "fd":
        fx, _ = fdtools.fd_gradient(f.f, x, y)
        fxx, _, fyy = fdtools.fd_hessian(f.f, x, y)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return fxx + fyy + c * fx / x


def dualize(f: ScalarField, to: str = "modified") -> ScalarField:
    """Map a potential-equation solution to a modified-equation solution
    (divide by x^2) or back (multiply). Derivatives transform by the
    product rule and survive when present on the input."""
    if to == "modified":
        def val(x, y):
            return f.f(x, y) / (x * x)

        grad = hess = None
        if f.grad is not None:
            def grad(x, y, _g=f.grad, _f=f.f):
                fx, fy = _g(x, y)
                v = _f(x, y)
                return (fx / x**2 - 2.0 * v / x**3, fy / x**2)

        if f.hess is not None and f.grad is not None:
            def hess(x, y, _h=f.hess, _g=f.grad, _f=f.f):
                fxx, fxy, fyy = _h(x, y)
                fx, fy = _g(x, y)
                v = _f(x, y)
                return (
                    fxx / x**2 - 4.0 * fx / x**3 + 6.0 * v / x**4,
                    fxy / x**2 - 2.0 * fy / x**3,
                    fyy / x**2,
                )

        note = (f.growth_note + " / x^2").strip(" /")
        return ScalarField(f=val, grad=grad, hess=hess, growth_note=note)
    if to == "unmodified":
        def val(x, y):
            return f.f(x, y) * x * x

        grad = hess = None
        if f.grad is not None:
            def grad(x, y, _g=f.grad, _f=f.f):
                fx, fy = _g(x, y)
                v = _f(x, y)
                return (fx * x**2 + 2.0 * x * v, fy * x**2)

        if f.hess is not None and f.grad is not None:
            def hess(x, y, _h=f.hess, _g=f.grad, _f=f.f):
                fxx, fxy, fyy = _h(x, y)
                fx, fy = _g(x, y)
                v = _f(x, y)
                return (
                    fxx * x**2 + 4.0 * x * fx + 2.0 * v,
                    fxy * x**2 + 2.0 * x * fy,
                    fyy * x**2,
                )

        note = (f.growth_note + " * x^2").strip(" *")
        return ScalarField(f=val, grad=grad, hess=hess, growth_note=note)
    raise ValueError(f"unknown dualize target {to!r}")


# ---------------------------------------------------------------------------
# Degenerate change of variables.

_SQRT8 = math.sqrt(8.0)


@dataclass(frozen=True)
class StPoint:
    s: float
    t: float


def to_st(x: float, y: float) -> StPoint:
    """(x, y) -> (s, t) with s = 1/(2 x^2), t = sqrt(8) y; x > 0."""
    if x <= 0.0:
        raise ParamOutOfRange("to_st needs x > 0")
    return StPoint(s=0.5 / (x * x), t=_SQRT8 * y)


def from_st(p: StPoint) -> tuple[float, float]:
    if p.s <= 0.0:
        raise ParamOutOfRange("from_st needs s > 0")
    return (1.0 / math.sqrt(2.0 * p.s), p.t / _SQRT8)


def field_to_st(f: ScalarField) -> ScalarField:
    """Pull an (x, y)-space field back to (s, t) coordinates, carrying
    derivatives along by the chain rule (dx/ds = -x^3, dy/dt = 1/sqrt(8))."""

    def val(s, t):
        x, y = from_st(StPoint(s, t))
        return f.f(x, y)

    grad = hess = None
    if f.grad is not None:
        def grad(s, t, _g=f.grad):
            x, y = from_st(StPoint(s, t))
            fx, fy = _g(x, y)
            return (-(x**3) * fx, fy / _SQRT8)

    if f.hess is not None and f.grad is not None:
        def hess(s, t, _h=f.hess, _g=f.grad):
            x, y = from_st(StPoint(s, t))
            fx, fy = _g(x, y)
            fxx, fxy, fyy = _h(x, y)
            f_ss = x**6 * fxx + 3.0 * x**5 * fx
            f_st = -(x**3) * fxy / _SQRT8
            f_tt = fyy / 8.0
            return (f_ss, f_st, f_tt)

    return ScalarField(f=val, grad=grad, hess=hess, growth_note=f.growth_note)


def st_field_to_xy(f: ScalarField) -> ScalarField:
    """Push an (s, t)-space field to (x, y) coordinates (inverse of
    :func:`field_to_st`); ds/dx = -1/x^3, dt/dy = sqrt(8)."""

    def val(x, y):
        p = to_st(x, y)
        return f.f(p.s, p.t)

    grad = hess = None
    if f.grad is not None:
        def grad(x, y, _g=f.grad):
            p = to_st(x, y)
            fs, ft = _g(p.s, p.t)
            return (-fs / x**3, _SQRT8 * ft)

    if f.hess is not None and f.grad is not None:
        def hess(x, y, _h=f.hess, _g=f.grad):
            p = to_st(x, y)
            fs, ft = _g(p.s, p.t)
            fss, fst, ftt = _h(p.s, p.t)
            f_xx = fss / x**6 + 3.0 * fs / x**4
            f_xy = -_SQRT8 * fst / x**3
            f_yy = 8.0 * ftt
            return (f_xx, f_xy, f_yy)

    return ScalarField(f=val, grad=grad, hess=hess, growth_note=f.growth_note)


def st_residual(f: ScalarField, s: float, t: float, mode: str = "analytic") -> float:
    """s^3 f_ss + f_tt for an (s, t)-space field."""
    if mode == "analytic":
        if f.hess is None:
            raise MissingDerivatives("analytic st-residual needs hess")
        fss, _, ftt = f.hess(s, t)
    elif mode == "fd":
        fss, _, ftt = fdtools.fd_hessian(f.f, s, t)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return s**3 * fss + ftt


# ---------------------------------------------------------------------------
# Separation tables.

_TABLES = ("unmodified", "modified")
_VARIANTS = ("primary", "tilde")


@dataclass(frozen=True)
class EigenEntry:
    """One row of a separation table.

    ``sign`` is the separation-constant sign (+1, 0, -1); ``variant``
    selects the (u, v) pair ("primary") or the (u~, v~) pair ("tilde");
    ``lam`` is the separation parameter (ignored when sign == 0).
    """

    table: str
    sign: int
    variant: str
    lam: float = 1.0

    def __post_init__(self):
        if self.table not in _TABLES:
            raise ParamOutOfRange(f"unknown table {self.table!r}")
        if self.sign not in (-1, 0, 1):
            raise ParamOutOfRange("sign must be -1, 0 or +1")
        if self.variant not in _VARIANTS:
            raise ParamOutOfRange(f"unknown variant {self.variant!r}")
        if self.sign != 0 and not self.lam > 0.0:
            raise ParamOutOfRange("lam must be positive")


def catalog(table: str) -> tuple[EigenEntry, ...]:
    """All six rows of one table, lam left at its default."""
    return tuple(
        EigenEntry(table=table, sign=sg, variant=var)
        for sg in (1, 0, -1)
        for var in _VARIANTS
    )


def _u_factor(entry: EigenEntry):
    """(u, u', u'') callables of x for the given row."""
    lam = entry.lam
    sg, var, tab = entry.sign, entry.variant, entry.table
    if tab == "unmodified":
        if sg == 1 and var == "primary":
            return (
                lambda x: x * _j1(lam * x),
                lambda x: lam * x * _j0(lam * x),
                lambda x: lam * _j0(lam * x) - lam**2 * x * _j1(lam * x),
            )
        if sg == 1 and var == "tilde":
            return (
                lambda x: x * _y1(lam * x),
                lambda x: lam * x * _y0(lam * x),
                lambda x: lam * _y0(lam * x) - lam**2 * x * _y1(lam * x),
            )
        if sg == 0 and var == "primary":
            return (lambda x: x * x, lambda x: 2.0 * x, lambda x: 2.0)
        if sg == 0 and var == "tilde":
            return (lambda x: 1.0, lambda x: 0.0, lambda x: 0.0)
        if sg == -1 and var == "primary":
            return (
                lambda x: x * _i1(lam * x),
                lambda x: lam * x * _i0(lam * x),
                lambda x: lam * _i0(lam * x) + lam**2 * x * _i1(lam * x),
            )
        return (
            lambda x: x * _k1(lam * x),
            lambda x: -lam * x * _k0(lam * x),
            lambda x: -lam * _k0(lam * x) + lam**2 * x * _k1(lam * x),
        )
    # modified table: entrywise the unmodified u divided by x^2
    if sg == 1 and var == "primary":
        return (
            lambda x: _j1(lam * x) / x,
            lambda x: lam * _j0(lam * x) / x - 2.0 * _j1(lam * x) / x**2,
            lambda x: (
                -3.0 * lam * _j0(lam * x) / x**2
                - lam**2 * _j1(lam * x) / x
                + 6.0 * _j1(lam * x) / x**3
            ),
        )
    if sg == 1 and var == "tilde":
        return (
            lambda x: _y1(lam * x) / x,
            lambda x: lam * _y0(lam * x) / x - 2.0 * _y1(lam * x) / x**2,
            lambda x: (
                -3.0 * lam * _y0(lam * x) / x**2
                - lam**2 * _y1(lam * x) / x
                + 6.0 * _y1(lam * x) / x**3
            ),
        )
    if sg == 0 and var == "primary":
        return (lambda x: 1.0, lambda x: 0.0, lambda x: 0.0)
    if sg == 0 and var == "tilde":
        return (lambda x: x**-2, lambda x: -2.0 * x**-3, lambda x: 6.0 * x**-4)
    if sg == -1 and var == "primary":
        return (
            lambda x: _i1(lam * x) / x,
            lambda x: lam * _i0(lam * x) / x - 2.0 * _i1(lam * x) / x**2,
            lambda x: (
                lam**2 * _i1(lam * x) / x
                - 3.0 * lam * _i0(lam * x) / x**2
                + 6.0 * _i1(lam * x) / x**3
            ),
        )
    return (
        lambda x: _k1(lam * x) / x,
        lambda x: -lam * _k0(lam * x) / x - 2.0 * _k1(lam * x) / x**2,
        lambda x: (
            lam**2 * _k1(lam * x) / x
            + 3.0 * lam * _k0(lam * x) / x**2
            + 6.0 * _k1(lam * x) / x**3
        ),
    )


def _v_factor(entry: EigenEntry):
    """(v, v', v'') callables of y; shared between the two tables."""
    lam = entry.lam
    sg, var = entry.sign, entry.variant
    if sg == 1:
        if var == "primary":
            return (
                lambda y: math.sinh(lam * y),
                lambda y: lam * math.cosh(lam * y),
                lambda y: lam**2 * math.sinh(lam * y),
            )
        return (
            lambda y: math.cosh(lam * y),
            lambda y: lam * math.sinh(lam * y),
            lambda y: lam**2 * math.cosh(lam * y),
        )
    if sg == 0:
        if var == "primary":
            return (lambda y: y, lambda y: 1.0, lambda y: 0.0)
        return (lambda y: 1.0, lambda y: 0.0, lambda y: 0.0)
    if var == "primary":
        return (
            lambda y: math.sin(lam * y),
            lambda y: lam * math.cos(lam * y),
            lambda y: -(lam**2) * math.sin(lam * y),
        )
    return (
        lambda y: math.cos(lam * y),
        lambda y: -lam * math.sin(lam * y),
        lambda y: -(lam**2) * math.cos(lam * y),
    )


def eigenfunction(entry: EigenEntry) -> ScalarField:
    """Separated solution u(x) v(y) for a table row, with closed-form
    gradient and Hessian. Domain x > 0 (tilde x-factors are singular on
    the axis)."""
    u, du, d2u = _u_factor(entry)
    v, dv, d2v = _v_factor(entry)

    def val(x, y):
        return u(x) * v(y)

    def grad(x, y):
        return (du(x) * v(y), u(x) * dv(y))

    def hess(x, y):
        return (d2u(x) * v(y), du(x) * dv(y), u(x) * d2v(y))

    note = f"{entry.table} table, sign {entry.sign:+d}, {entry.variant}"
    return ScalarField(f=val, grad=grad, hess=hess, growth_note=note)


# ---------------------------------------------------------------------------
# Quasi-random sampling (Halton) used by certificate verification.


def _radical_inverse(n: int, base: int) -> float:
    inv = 0.0
    denom = 1.0
    while n:
        n, rem = divmod(n, base)
        denom *= base
        inv += rem / denom
    return inv


def halton_points(count: int, skip: int = 20) -> np.ndarray:
    """(count, 2) Halton sequence in the open unit square, bases 2 and 3."""
    idx = np.arange(skip, skip + count)
    pts = np.empty((count, 2))
    for row, n in enumerate(idx):
        pts[row, 0] = _radical_inverse(int(n), 2)
        pts[row, 1] = _radical_inverse(int(n), 3)
    return pts


# ---------------------------------------------------------------------------
# Barrier certificates.

_RES_TOL = 1e-10
_SIGN_TOL = 1e-12
_N_SAMPLES = 10_000


@dataclass(frozen=True)
class BarrierCert:
    """A verified barrier. ``field`` lives in ``space`` ("xy" or "st");
    ``margins`` records each named inequality margin (nonnegative means
    satisfied with that slack); ``residual_sup`` is the sampled sup of
    the PDE residual normalized by the field scale."""

    kind: str
    params: dict
    space: str
    field: ScalarField
    region: dict
    residual_sup: float
    margins: dict


def _verify(kind, ok: bool, what: str, detail: str = ""):
    if not ok:
        raise VerificationFailed(f"{kind}: {what} failed {detail}".rstrip())


def _sampled_residual_sup(fld: ScalarField, space: str, pts: np.ndarray) -> float:
    worst = 0.0
    for px, py in pts:
        if space == "xy":
            r = residual(fld, px, py, eq="modified", mode="analytic")
        else:
            r = st_residual(fld, px, py, mode="analytic")
        scale = max(abs(fld.f(px, py)), 1.0)
        worst = max(worst, abs(r) / scale)
    return worst


def _second_j1_zero() -> float:
    return float(specfun.j1_basis(2).zeros[1])


def make_barrier(kind: str, params: dict | None = None) -> BarrierCert:
    """Construct and verify a barrier certificate.

    Kinds
    -----
    quadrant_lower : eps, eps_prime, delta > 0, ybar real.
        psi = eps (x^2 - 4 (y - ybar)^2) + eps_prime - delta / x^2 in
        (x, y) space; exact modified-equation solution, negative near the
        axis, positive on a precompact core.
    growth_t : c > 1, s0 > 0, t0 != M, f0 > 0.
        Exact (s, t) solution q (2 - s0/s - s/s0 + s0 (t - M)^2) tangent
        from below to the power-growth hypothesis along t = t0; forces
        quadratic growth in t on s = s0.
    monotone_s : c > 1, s0 > 0, t0, M with s0 (t0 - M)^2 = 4, f0 > 0,
        eta >= 0. Exact solution D (1/s - (t - t0)^2) - eta^2 (s - s0) + A
        propagating a lower bound to all s >= s0.
    eigen_eta : eps_prime > 0, amp > 0.
        Positive eigen-solution amp J1(lam x)/x cosh(lam y) with
        lam = 1/(2 eps_prime alpha2), alpha2 the second J1 zero.
    """
    p = dict(params or {})
    pts01 = halton_points(_N_SAMPLES)

    if kind == "quadrant_lower":
        eps = float(p.setdefault("eps", 1.0))
        epsp = float(p.setdefault("eps_prime", 1.0))
        delta = float(p.setdefault("delta", 1.0))
        ybar = float(p.setdefault("ybar", 0.0))
        if min(eps, epsp, delta) <= 0.0:
            raise ParamOutOfRange("quadrant_lower needs eps, eps_prime, delta > 0")

        def val(x, y):
            return eps * (x * x - 4.0 * (y - ybar) ** 2) + epsp - delta / (x * x)

        def grad(x, y):
            return (2.0 * eps * x + 2.0 * delta / x**3, -8.0 * eps * (y - ybar))

        def hess(x, y):
            return (2.0 * eps - 6.0 * delta / x**4, 0.0, -8.0 * eps)

        fld = ScalarField(f=val, grad=grad, hess=hess,
                          growth_note="modified-equation barrier")
        x_hi = 2.0 * math.sqrt((epsp + delta) / eps + 1.0)
        region = {"x": (0.0, x_hi), "y": (ybar - x_hi, ybar + x_hi)}
        pts = np.column_stack(
            [
                region["x"][0] + pts01[:, 0] * (region["x"][1] - region["x"][0]),
                region["y"][0] + pts01[:, 1] * (region["y"][1] - region["y"][0]),
            ]
        )
        pts[:, 0] = np.maximum(pts[:, 0], 1e-3)
        res_sup = _sampled_residual_sup(fld, "xy", pts[:500])
        _verify(kind, res_sup < _RES_TOL, "PDE residual", f"sup {res_sup:.3e}")
        # negative approaching the axis
        x_neg = min(1.0, math.sqrt(delta / (2.0 * (eps + epsp))))
        neg_vals = [
            val(xx, yy)
            for xx in np.linspace(x_neg * 1e-3, x_neg, 60)
            for yy in np.linspace(ybar - 3.0, ybar + 3.0, 21)
        ]
        _verify(kind, max(neg_vals) < 0.0, "negativity near axis")
        core = max(val(xx, ybar) for xx in np.linspace(1e-3, x_hi, 400))
        _verify(kind, core > 0.0, "positive core nonempty")
        return BarrierCert(
            kind=kind, params=p, space="xy", field=fld, region=region,
            residual_sup=res_sup,
            margins={"neg_near_axis": -max(neg_vals), "pos_core": core},
        )

    if kind == "growth_t":
        c = float(p.setdefault("c", 2.0))
        s0 = float(p.setdefault("s0", 1.0))
        m_t = float(p.setdefault("M", -2.0))
        t0 = float(p.setdefault("t0", 0.0))
        f0 = float(p.setdefault("f0", 1.0))
        if c <= 1.0 or s0 <= 0.0 or f0 <= 0.0:
            raise ParamOutOfRange("growth_t needs c > 1, s0 > 0, f0 > 0")
        if t0 == m_t:
            raise ParamOutOfRange("growth_t needs t0 != M")
        tau2 = 1.0 + 0.5 * s0 * (t0 - m_t) ** 2
        sig = (c / (c - 1.0)) * (tau2 - math.sqrt(tau2**2 - (c * c - 1.0) / (c * c)))
        q = 0.5 * (c + 1.0) * f0 * sig**c / (tau2 - sig)
        p["tau0_sq"] = tau2
        p["sigma_touch"] = sig
        p["coefficient"] = q * s0  # D with psi = (D/s0)(...)

        def val(s, t):
            return q * (2.0 - s0 / s - s / s0 + s0 * (t - m_t) ** 2)

        def grad(s, t):
            return (q * (s0 / s**2 - 1.0 / s0), 2.0 * q * s0 * (t - m_t))

        def hess(s, t):
            return (-2.0 * q * s0 / s**3, 0.0, 2.0 * q * s0)

        fld = ScalarField(f=val, grad=grad, hess=hess,
                          growth_note="(s,t)-space growth barrier")
        span_t = 5.0 * abs(t0 - m_t)
        region = {"s": (s0 / 50.0, 50.0 * s0), "t": (m_t - span_t, m_t + span_t)}
        pts = np.column_stack(
            [
                region["s"][0] + pts01[:, 0] * (region["s"][1] - region["s"][0]),
                region["t"][0] + pts01[:, 1] * (region["t"][1] - region["t"][0]),
            ]
        )
        res_sup = _sampled_residual_sup(fld, "st", pts[:500])
        _verify(kind, res_sup < _RES_TOL, "PDE residual", f"sup {res_sup:.3e}")
        # tangency below the power-growth hypothesis along t = t0
        tol = 1e-11 * f0 * max(1.0, 2.0 * tau2)
        sig_plus = tau2 + math.sqrt(tau2**2 - 1.0)
        lo = np.linspace(1e-3, 1.0, 2000)
        hi = np.linspace(1.0, sig_plus, 2000)
        gap_lo = float(np.min(f0 * lo**c - q * (2.0 * tau2 - lo - 1.0 / lo)))
        gap_hi = float(np.min(f0 * hi ** (-c) - q * (2.0 * tau2 - hi - 1.0 / hi)))
        _verify(kind, gap_lo > -tol, "below-hypothesis tangency (s <= s0)",
                f"min gap {gap_lo:.3e}")
        _verify(kind, gap_hi > -tol, "below-hypothesis tangency (s >= s0)",
                f"min gap {gap_hi:.3e}")
        simple = f0 / (2.0 * (2.0 * tau2) ** c * (tau2 - 1.0))
        _verify(kind, q >= simple - tol, "simplified coefficient bound")
        return BarrierCert(
            kind=kind, params=p, space="st", field=fld, region=region,
            residual_sup=res_sup,
            margins={
                "tangency_inner": gap_lo,
                "tangency_outer": gap_hi,
                "coefficient_vs_simple": q - simple,
            },
        )

    if kind == "monotone_s":
        c = float(p.setdefault("c", 2.0))
        s0 = float(p.setdefault("s0", 1.0))
        t0 = float(p.setdefault("t0", 0.0))
        m_t = float(p.setdefault("M", -2.0))
        f0 = float(p.setdefault("f0", 1.0))
        eta = float(p.setdefault("eta", 0.0))
        if c <= 1.0 or s0 <= 0.0 or f0 <= 0.0 or eta < 0.0:
            raise ParamOutOfRange("monotone_s needs c > 1, s0 > 0, f0 > 0, eta >= 0")
        if abs(s0 * (t0 - m_t) ** 2 - 4.0) > 1e-9:
            raise ParamOutOfRange(
                "monotone_s is calibrated to s0 * (t0 - M)^2 = 4"
            )
        sig0 = (c / (c - 1.0)) * (3.0 - math.sqrt(8.0 + 1.0 / (c * c)))
        alpha = (c + 1.0) * sig0**c / (3.0 - sig0)
        dcoef = alpha * f0 * s0 / 8.0
        acoef = alpha * f0 / 8.0
        p["sigma_touch"] = sig0
        p["alpha"] = alpha

        def val(s, t):
            return dcoef * (1.0 / s - (t - t0) ** 2) - eta**2 * (s - s0) + acoef

        def grad(s, t):
            return (-dcoef / s**2 - eta**2, -2.0 * dcoef * (t - t0))

        def hess(s, t):
            return (2.0 * dcoef / s**3, 0.0, -2.0 * dcoef)

        fld = ScalarField(f=val, grad=grad, hess=hess,
                          growth_note="(s,t)-space monotonicity barrier")
        span_t = 3.0 * abs(t0 - m_t)
        region = {"s": (s0 / 50.0, 50.0 * s0), "t": (t0 - span_t, t0 + span_t)}
        pts = np.column_stack(
            [
                region["s"][0] + pts01[:, 0] * (region["s"][1] - region["s"][0]),
                region["t"][0] + pts01[:, 1] * (region["t"][1] - region["t"][0]),
            ]
        )
        res_sup = _sampled_residual_sup(fld, "st", pts[:500])
        _verify(kind, res_sup < _RES_TOL, "PDE residual", f"sup {res_sup:.3e}")
        # stays under the quadratic-growth envelope on the slice s = s0
        ts = np.linspace(m_t - 3.0 * abs(t0 - m_t), t0 + 3.0 * abs(t0 - m_t), 4001)
        lhs = acoef + dcoef * (1.0 / s0 - (ts - t0) ** 2)
        rhs = alpha * f0 * ((ts - m_t) / (t0 - m_t)) ** 2
        env_gap = float(np.min(rhs - lhs))
        _verify(kind, env_gap > -1e-11 * f0, "envelope tangency",
                f"min gap {env_gap:.3e}")
        margins = {"envelope": env_gap}
        if eta == 0.0:
            ss = np.geomspace(s0, 1e4 * s0, 2000)
            concl = float(np.min(val(ss, t0) - alpha * f0 / 8.0))
            _verify(kind, concl > -1e-12 * f0, "propagated lower bound")
            margins["lower_bound"] = concl
        return BarrierCert(
            kind=kind, params=p, space="st", field=fld, region=region,
            residual_sup=res_sup, margins=margins,
        )

    if kind == "eigen_eta":
        epsp = float(p.setdefault("eps_prime", 1.0))
        amp = float(p.setdefault("amp", 1.0))
        if epsp <= 0.0 or amp <= 0.0:
            raise ParamOutOfRange("eigen_eta needs eps_prime > 0, amp > 0")
        alpha2 = _second_j1_zero()
        lam = 1.0 / (2.0 * epsp * alpha2)
        p["lam"] = lam

        def val(x, y):
            return amp * (_j1(lam * x) / x) * math.cosh(lam * y)

        def grad(x, y):
            ux = lam * _j0(lam * x) / x - 2.0 * _j1(lam * x) / x**2
            u = _j1(lam * x) / x
            return (amp * ux * math.cosh(lam * y), amp * u * lam * math.sinh(lam * y))

        def hess(x, y):
            u = _j1(lam * x) / x
            ux = lam * _j0(lam * x) / x - 2.0 * _j1(lam * x) / x**2
            uxx = (
                -3.0 * lam * _j0(lam * x) / x**2
                - lam**2 * _j1(lam * x) / x
                + 6.0 * _j1(lam * x) / x**3
            )
            ch, sh = math.cosh(lam * y), math.sinh(lam * y)
            return (
                amp * uxx * ch,
                amp * ux * lam * sh,
                amp * u * lam**2 * ch,
            )

        fld = ScalarField(f=val, grad=grad, hess=hess,
                          growth_note="positive modified-equation eigen barrier")
        region = {"x": (0.0, 2.0 * epsp), "y": (-2.0 * epsp, 2.0 * epsp)}
        pts = np.column_stack(
            [
                np.maximum(pts01[:, 0] * 2.0 * epsp, 1e-6 * epsp),
                (2.0 * pts01[:, 1] - 1.0) * 2.0 * epsp,
            ]
        )
        res_sup = _sampled_residual_sup(fld, "xy", pts[:500])
        _verify(kind, res_sup < _RES_TOL, "PDE residual", f"sup {res_sup:.3e}")
        vals = np.array([val(px, py) for px, py in pts])
        _verify(kind, float(np.min(vals)) > 0.0, "positivity on the slab")
        # J1(z)/z decreases on [0, first zero], so on x <= eps_prime the
        # profile is bounded below by its value at eps_prime.
        floor = amp * _j1(lam * epsp) / epsp
        xs = np.linspace(1e-6 * epsp, epsp, 500)
        prof_gap = float(np.min(amp * _j1(lam * xs) / xs - floor))
        _verify(kind, prof_gap > -1e-12 * amp, "monotone profile floor")
        return BarrierCert(
            kind=kind, params=p, space="xy", field=fld, region=region,
            residual_sup=res_sup,
            margins={"positivity": float(np.min(vals)), "profile_floor": floor},
        )

    raise ParamOutOfRange(f"unknown barrier kind {kind!r}")


# ---------------------------------------------------------------------------
# Logarithmic gradient probe.


def gradient_bound_probe(
    f: ScalarField,
    region: tuple[float, float, float, float],
    nx: int = 20,
    ny: int = 21,
    mode: str = "auto",
) -> dict:
    """Sample x |grad f| / f over a rectangle [x0, x1] x [y0, y1].

    Returns {"sup": ..., "argmax": (x, y), "n_samples": ...}. The field
    must be strictly positive on the region (NonPositiveField otherwise).
    mode "auto" uses analytic gradients when present, else FD; "fd"
    forces finite differences.
    """
    if not isinstance(f, ScalarField):
        f = ScalarField(f=f)
    x0, x1, yy0, yy1 = map(float, region)
    if not (0.0 < x0 < x1):
        raise ParamOutOfRange("probe region needs 0 < x0 < x1")
    use_grad = f.grad if (mode == "auto" and f.grad is not None) else None
    if mode not in ("auto", "fd"):
        raise ValueError(f"unknown mode {mode!r}")
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(yy0, yy1, ny)
    sup = 0.0
    arg = (x0, yy0)
    for xv in xs:
        for yv in ys:
            v = f.f(xv, yv)
            if not v > 0.0:
                raise NonPositiveField(
                    f"field value {v:.3e} at ({xv:.6g}, {yv:.6g})"
                )
            gx, gy = use_grad(xv, yv) if use_grad else fdtools.fd_gradient(
                f.f, xv, yv
            )
            val = xv * math.hypot(gx, gy) / v
            if val > sup:
                sup = val
                arg = (float(xv), float(yv))
    return {"sup": sup, "argmax": arg, "n_samples": int(nx * ny)}
