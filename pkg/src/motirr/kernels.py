"""Kernel backend selection.

The compiled extension (``motirr._kernels``, Cython) is preferred; the pure
Python module ``motirr._kernels_py`` is the fallback when the extension is
unavailable. Set ``MOTIRR_BACKEND=python`` or ``MOTIRR_BACKEND=cython`` to
force one (forcing cython raises if the extension did not build).

Both backends are bitwise-equivalent; see ``benchmarks/bench_kernels.py``
for the speed comparison.
"""

from __future__ import annotations

import os

from . import _kernels_py

_requested = os.environ.get("MOTIRR_BACKEND", "").strip().lower()

if _requested == "python":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "cython":
            raise
        _impl = _kernels_py

BACKEND = _impl.BACKEND_NAME

eta_bracket_sum = _impl.eta_bracket_sum
classify_photon = _impl.classify_photon
trial_chunk = _impl.trial_chunk

EVENT_DR = _kernels_py.EVENT_DR
EVENT_DT = _kernels_py.EVENT_DT
EVENT_ABSORBED = _kernels_py.EVENT_ABSORBED
EVENT_LOST = _kernels_py.EVENT_LOST
EVENT_UNDETECTED = _kernels_py.EVENT_UNDETECTED

DECISION_PENDING = _kernels_py.DECISION_PENDING
DECISION_ABSENT = _kernels_py.DECISION_ABSENT
DECISION_PRESENT = _kernels_py.DECISION_PRESENT

STREAK_NONE = _kernels_py.STREAK_NONE
STREAK_DR = _kernels_py.STREAK_DR
STREAK_DT = _kernels_py.STREAK_DT


def available_backends():
    """Names of the kernel backends importable in this environment."""
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401
        names.insert(0, "cython")
    except ImportError:
        pass
    return names
