"""Kernel selection: compiled extension when available, pure Python otherwise.

Both backends implement the same four entry points with identical signatures
and, from the same bit-generator state, produce bit-identical outputs (the
draw schedule and arithmetic are specified in ``_pykernel``).  Selection
happens once at import; set the environment variable ``ZENOSIM_PURE_PY`` to
any non-empty value to force the pure-Python backend, e.g. to benchmark or to
reproduce results from a machine without a compiler toolchain.
"""

from __future__ import annotations

import os

from . import _pykernel

USING_COMPILED = False
if not os.environ.get("ZENOSIM_PURE_PY"):
    try:
        from . import _ckernel as _impl  # type: ignore[attr-defined]
        USING_COMPILED = True
    except ImportError:
        _impl = _pykernel
else:
    _impl = _pykernel

BACKEND = "compiled" if USING_COMPILED else "pure-python"

zeno_trajectory = _impl.zeno_trajectory
fractionated_series = _impl.fractionated_series
rabi_scan_trajectory = _impl.rabi_scan_trajectory
ramsey_scan_trajectory = _impl.ramsey_scan_trajectory
