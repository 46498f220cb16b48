"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; set
``RCBIR_PURE_PYTHON=1`` to force the numpy implementation (used by the
benchmark and by tests that compare the two backends).
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("RCBIR_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "native"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

glcm_counts = _impl.glcm_counts
label_components = _impl.label_components
