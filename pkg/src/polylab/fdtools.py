"""Finite-difference helpers with power-of-two step snapping.

Steps are snapped to the nearest power of two around max(1e-6, 1e-4*|x|)
so that x+h and x-h are exact floats; second differences of affine
functions then cancel identically instead of leaving O(eps/h^2) noise.
All stencils are central and get one Richardson extrapolation level.
"""

from __future__ import annotations

import math
from typing import Callable

Func2 = Callable[[float, float], float]


def snapped_step(x: float, scale: float = 1e-4, floor: float = 1e-6) -> float:
    h = max(floor, scale * abs(x))
    return 2.0 ** round(math.log2(h))


def fd_steps(x: float, y: float) -> tuple[float, float]:
    # y-step keyed to the larger of |y| and |x| so pure-y fields near the
    # axis are not starved of resolution.
    hx = snapped_step(x)
    hy = snapped_step(max(abs(y), abs(x), 1e-2))
    return hx, hy


def fd_gradient(f: Func2, x: float, y: float) -> tuple[float, float]:
    hx, hy = fd_steps(x, y)

    def dx(h):
        return (f(x + h, y) - f(x - h, y)) / (2.0 * h)

    def dy(h):
        return (f(x, y + h) - f(x, y - h)) / (2.0 * h)

    fx = (4.0 * dx(hx / 2) - dx(hx)) / 3.0
    fy = (4.0 * dy(hy / 2) - dy(hy)) / 3.0
    return fx, fy


def fd_hessian(
    f: Func2, x: float, y: float, steps: tuple[float, float] | None = None
) -> tuple[float, float, float]:
    """Return (f_xx, f_xy, f_yy) by Richardson-extrapolated central stencils."""
    hx, hy = fd_steps(x, y) if steps is None else steps
    f0 = f(x, y)

    def sxx(h):
        return (f(x + h, y) - 2.0 * f0 + f(x - h, y)) / (h * h)

    def syy(h):
        return (f(x, y + h) - 2.0 * f0 + f(x, y - h)) / (h * h)

    def sxy(h, k):
        return (
            f(x + h, y + k) - f(x + h, y - k) - f(x - h, y + k) + f(x - h, y - k)
        ) / (4.0 * h * k)

    fxx = (4.0 * sxx(hx / 2) - sxx(hx)) / 3.0
    fyy = (4.0 * syy(hy / 2) - syy(hy)) / 3.0
    fxy = (4.0 * sxy(hx / 2, hy / 2) - sxy(hx, hy)) / 3.0
    return fxx, fxy, fyy


def fd_laplace(
    f: Func2, x: float, y: float, steps: tuple[float, float] | None = None
) -> float:
    fxx, _, fyy = fd_hessian(f, x, y, steps=steps)
    return fxx + fyy
