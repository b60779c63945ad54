"""Kernel selection: compiled extension when available, pure Python otherwise.

Set FOCKDUAL_PURE=1 to force the pure backend (used by the benchmark and by
tests that compare the two implementations).
"""

import os

from . import _scan_py

if os.environ.get("FOCKDUAL_PURE"):
    conjugate_lines = _scan_py.conjugate_lines
    BACKEND = "pure"
else:
    try:
        from ._fastscan import conjugate_lines

        BACKEND = "compiled"
    except ImportError:
        conjugate_lines = _scan_py.conjugate_lines
        BACKEND = "pure"
