"""Numerical toolkit for scalar-flat toric surface metrics and the
degenerate-elliptic equations they reduce to on the right half-plane.

The package has two halves that meet in the middle:

* ``polytope`` and ``geometry`` synthesize momentum maps from convex
  polytope outlines and reconstruct the metric and curvature data the
  maps encode.
* ``specfun``, ``pde`` and ``solvers`` provide the Bessel-separation
  machinery for the two model equations on the half-plane (the potential
  equation ``u_xx + u_yy - u_x/x = 0`` and its modified companion with
  ``+3 u_x/x``), kernel and series boundary solvers, and barrier
  certificates.

``gallery`` collects worked closed-form examples used for cross-checks,
``checksuites`` bundles the named verification suites, and ``cli``
exposes everything as the ``polylab`` command.
"""

from . import specfun, polytope, geometry, pde, solvers, gallery, checksuites

__version__ = "0.1.0"

__all__ = [
    "specfun",
    "polytope",
    "geometry",
    "pde",
    "solvers",
    "gallery",
    "checksuites",
    "__version__",
]
