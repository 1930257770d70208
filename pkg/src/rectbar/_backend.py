"""Select the GF(2) kernel implementation at import time.

The compiled extension is used when it was built and
``RECTBAR_PURE_PYTHON`` is unset; otherwise the pure-Python kernels.
Small inputs always take the Python path, where packing overhead
would dominate.
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
_compiled = None
if not os.environ.get("RECTBAR_PURE_PYTHON"):
    try:
        from . import _ckernels as _compiled  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _compiled = None

# below this many vectors the interpreter path wins
SMALL = 48


def eliminate(vecs, limit):
    if _compiled is not None and len(vecs) >= SMALL:
        return _compiled.eliminate(vecs, limit)
    return _kernels_py.eliminate(vecs, limit)


def reduce_boundary(cols):
    if _compiled is not None and len(cols) >= SMALL:
        return _compiled.reduce_boundary(cols)
    return _kernels_py.reduce_boundary(cols)
