"""Backend selection for the element residual kernels.

The compiled extension is used when it was built; otherwise the numpy
version is used.  ``DHNN_BACKEND=python`` forces the numpy path.
"""

import os

from . import _kernels_py

python_backend = _kernels_py

try:
    from . import _ckernels as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

if compiled_backend is not None and os.environ.get("DHNN_BACKEND", "").lower() != "python":
    _active = compiled_backend
    BACKEND = "compiled"
else:
    _active = _kernels_py
    BACKEND = "python"

moment_matrix = _active.moment_matrix
residual_moments = _active.residual_moments
