"""Select the compiled elimination kernel, falling back to pure Python.

Set ``GFORGE_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("GFORGE_PURE_PYTHON"):
    from ._kernel_py import axpy, rank_mod, reduce_vector, rref_mod

    COMPILED = False
else:
    try:
        from ._kernel import axpy, rank_mod, reduce_vector, rref_mod

        COMPILED = True
    except ImportError:  # extension not built
        from ._kernel_py import axpy, rank_mod, reduce_vector, rref_mod

        COMPILED = False

__all__ = ["axpy", "rank_mod", "reduce_vector", "rref_mod", "COMPILED"]
