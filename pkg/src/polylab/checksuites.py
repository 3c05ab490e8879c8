"""Named verification suites over maps, tables, and certificates.

Each suite returns a JSON-friendly report::

    {"suite": ..., "n_samples": ..., "seed": ...,
     "checks": [{"name": ..., "value": ..., "tol": ..., "pass": ...}, ...],
     "pass": ...}

Values are maxima of deviations unless the check name says otherwise
(minima carry a ``_min`` suffix and pass when value >= -tol).
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from . import geometry, pde, polytope

__all__ = ["SUITES", "run_suite"]

SUITES = ("residual", "curvature", "abreu", "det", "conformal",
          "barriers", "eigen")

MAP_SUITES = ("residual", "curvature", "abreu", "det", "conformal")


def _sample_points(mp: polytope.MomentumMap, samples: int, seed: int):
    rng = np.random.default_rng(seed)
    kink_y = [k.y0 for k in mp.kinks]
    lo = min(kink_y, default=0.0) - 3.0
    hi = max(kink_y, default=0.0) + 3.0
    pts = []
    while len(pts) < samples:
        x = rng.uniform(0.05, 5.0)
        y = rng.uniform(lo, hi)
        if any(math.hypot(x, y - y0) < 2e-3 for y0 in kink_y):
            continue
        pts.append((x, y))
    return pts


def _check(name: str, value: float, tol: float) -> dict:
    if name.endswith("_min"):
        ok = value >= -tol
    else:
        ok = value <= tol
    return {"name": name, "value": float(value), "tol": float(tol),
            "pass": bool(ok)}


def _finish(suite: str, checks: list, samples: int, seed: int) -> dict:
    return {
        "suite": suite,
        "n_samples": samples,
        "seed": seed,
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
    }


def run_suite(
    suite: str,
    mp: Optional[polytope.MomentumMap] = None,
    samples: int = 200,
    seed: int = 0,
    tol: Optional[float] = None,
) -> dict:
    """Run one named suite. Map-targeted suites need ``mp``; "barriers"
    and "eigen" are global and ignore it."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    if suite in MAP_SUITES:
        if mp is None:
            raise ValueError(f"suite {suite!r} needs a momentum map")
        pts = _sample_points(mp, samples, seed)

    if suite == "residual":
        t = 1e-10 if tol is None else tol
        worst = 0.0
        for x, y in pts:
            r1, r2 = polytope.map_pde_residual(mp, x, y)
            scale = max(1.0, abs(x))
            worst = max(worst, abs(r1) / scale, abs(r2) / scale)
        return _finish(suite, [_check("component_residual", worst, t)],
                       samples, seed)

    if suite == "curvature":
        t = 1e-8 if tol is None else tol
        worst_mm = 0.0
        worst_fd = 0.0
        for x, y in pts:
            k1 = geometry.gauss_curvature(mp, x, y, method="logdet")
            k2 = geometry.gauss_curvature(mp, x, y, method="christoffel")
            worst_mm = max(worst_mm, abs(k1 - k2))
            kf = geometry.gauss_curvature(mp, x, y, method="logdet", fd=True)
            worst_fd = max(worst_fd, abs(kf - k1))
        checks = [
            _check("method_agreement", worst_mm, t),
            _check("fd_agreement", worst_fd, max(1e-4, t)),
        ]
        return _finish(suite, checks, samples, seed)

    if suite == "abreu":
        t = 1e-10 if tol is None else tol
        worst = max(abs(geometry.abreu_residual(mp, x, y)) for x, y in pts)
        return _finish(suite, [_check("abreu_residual", worst, t)],
                       samples, seed)

    if suite == "det":
        t = 1e-12 if tol is None else tol
        dets = [polytope.eval_jacobian(mp, x, y).det for x, y in pts]
        min_abs = min(abs(d) for d in dets)
        signs = {math.copysign(1.0, d) for d in dets}
        checks = [
            _check("min_abs_det_min", min_abs, -t),
            _check("sign_changes", 0.0 if len(signs) == 1 else 1.0, 0.5),
        ]
        blocks = geometry.metric_four(mp, *pts[0])
        checks.append(
            _check(
                "det_ginv_identity",
                abs(blocks.det_ginv - pts[0][0] ** 2),
                1e-10 * max(1.0, pts[0][0] ** 2),
            )
        )
        return _finish(suite, checks, samples, seed)

    if suite == "conformal":
        t = 1e-8 if tol is None else tol
        least = min(geometry.conformal_scalar(mp, x, y) for x, y in pts)
        return _finish(suite, [_check("conformal_scalar_min", least, t)],
                       samples, seed)

    if suite == "barriers":
        t = 1e-10 if tol is None else tol
        checks = []
        for kind in ("quadrant_lower", "growth_t", "monotone_s", "eigen_eta"):
            try:
                cert = pde.make_barrier(kind)
                checks.append(_check(f"{kind}_residual", cert.residual_sup, t))
                worst_margin = min(cert.margins.values())
                checks.append(
                    _check(f"{kind}_margin_min", worst_margin, 1e-11)
                )
            except pde.VerificationFailed:
                checks.append(_check(f"{kind}_residual", math.inf, t))
        return _finish(suite, checks, samples, seed)

    if suite == "eigen":
        t = 1e-9 if tol is None else tol
        rng = np.random.default_rng(seed)
        worst_res = 0.0
        worst_dual = 0.0
        n_each = max(1, samples // 12)
        for table in ("unmodified", "modified"):
            eq = table
            for entry in pde.catalog(table):
                lam = float(rng.uniform(0.5, 4.0))
                e = pde.EigenEntry(table=table, sign=entry.sign,
                                   variant=entry.variant, lam=lam)
                fld = pde.eigenfunction(e)
                for _ in range(n_each):
                    x = rng.uniform(0.1, 10.0)
                    y = rng.uniform(-5.0, 5.0)
                    r = pde.residual(fld, x, y, eq=eq)
                    fxx, _, fyy = fld.hess(x, y)
                    fx, _ = fld.grad(x, y)
                    scale = max(abs(fxx), abs(fyy), abs(fx / x), 1e-30)
                    worst_res = max(worst_res, abs(r) / scale)
                if table == "unmodified":
                    mod = pde.dualize(fld, to="modified")
                    twin = pde.eigenfunction(
                        pde.EigenEntry(table="modified", sign=entry.sign,
                                       variant=entry.variant, lam=lam)
                    )
                    for _ in range(n_each):
                        x = rng.uniform(0.1, 10.0)
                        y = rng.uniform(-5.0, 5.0)
                        denom = max(abs(twin.f(x, y)), 1e-30)
                        worst_dual = max(
                            worst_dual,
                            abs(mod.f(x, y) - twin.f(x, y)) / denom,
                        )
        checks = [
            _check("table_residual", worst_res, t),
            _check("duality_match", worst_dual, t),
        ]
        return _finish(suite, checks, samples, seed)

    raise AssertionError("unreachable")
