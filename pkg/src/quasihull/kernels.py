"""Kernel selection: the compiled extension when available, numpy otherwise.

Set ``QUASIHULL_PURE=1`` to force the numpy implementations.
"""

import os

from . import _pykernels

BACKEND = "numpy"
_impl = _pykernels

if os.environ.get("QUASIHULL_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

support_planes = _impl.support_planes
min_pairing = _impl.min_pairing
