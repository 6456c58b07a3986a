"""Picks the SMO backend at import: compiled extension if built, else pure Python."""

import os

from . import _smo_py

try:
    if os.environ.get("PIRGAIT_PURE_PYTHON"):
        raise ImportError("pure-Python backend forced")
    from . import _smo_ext
except ImportError:
    _smo_ext = None

BACKEND = "cython" if _smo_ext is not None else "python"


def available_backends():
    return ("cython", "python") if _smo_ext is not None else ("python",)


def get_solver(backend=None):
    """Return the ``solve`` callable for ``backend`` (default: the import-time choice)."""
    backend = backend or BACKEND
    if backend == "python":
        return _smo_py.solve
    if backend == "cython":
        if _smo_ext is None:
            raise RuntimeError("compiled SMO extension is not built")
        return _smo_ext.solve
    raise ValueError(f"unknown SMO backend {backend!r}")
