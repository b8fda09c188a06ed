"""Select the pair-sum backend at import time.

The compiled extension is preferred; the numpy implementation is the
fallback.  ``SILT_BACKEND=numpy|cython`` forces a choice (useful for the
benchmark and for testing backend agreement).
"""

import os

from . import _core_np

_forced = os.environ.get("SILT_BACKEND", "").strip().lower()

if _forced == "numpy":
    _impl = _core_np
    BACKEND = "numpy"
elif _forced == "cython":
    from . import _core as _impl  # raises if the extension was not built
    BACKEND = "cython"
else:
    try:
        from . import _core as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _core_np
        BACKEND = "numpy"

pair_sum_gaussian = _impl.pair_sum_gaussian
