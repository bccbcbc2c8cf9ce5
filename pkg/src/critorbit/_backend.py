"""Kernel selection: compiled Cython extension when available, else pure Python.

Set CRITORBIT_PURE=1 to force the fallback (used by the benchmark and the
backend parity tests).
"""

import os

if os.environ.get("CRITORBIT_PURE"):
    from . import _purekernel as kernel
else:
    try:
        from . import _kernel as kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _purekernel as kernel

NAME = kernel.NAME
orbit_member_batch = kernel.orbit_member_batch
preimage_depth_one = kernel.preimage_depth_one
preimage_depth_batch = kernel.preimage_depth_batch
