"""Kernel selection: compiled extension when available, numpy fallback otherwise.

Set TSKETCH_PURE_PYTHON=1 to force the fallback (used by the benchmark
and the cross-implementation tests).
"""

import os

if os.environ.get("TSKETCH_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

IMPL_NAME = _impl.IMPL_NAME
fnv1a64 = _impl.fnv1a64
splitmix64 = _impl.splitmix64
keyed_uniforms = _impl.keyed_uniforms
