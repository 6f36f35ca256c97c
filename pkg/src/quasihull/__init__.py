"""Convex hulls of finite ideal polygons in H^3 and acausal polygons in AdS^3,
their pleated boundaries and gluing maps, finite earthquakes, and the
pointwise tensor identities of convex surfaces."""

__version__ = "0.1.0"

from . import errors, kernels, mobius  # noqa: E402,F401
