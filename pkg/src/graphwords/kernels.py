"""Backend selection for the hot kernels.

The compiled extension is used when it was built; setting
GRAPHWORDS_PURE_PYTHON=1 forces the numpy fallback.
"""

import os

from . import _kernels_py

if os.environ.get("GRAPHWORDS_PURE_PYTHON") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

path_fingerprint = _impl.path_fingerprint
tanimoto_matrix = _impl.tanimoto_matrix

__all__ = ["BACKEND", "path_fingerprint", "tanimoto_matrix"]
