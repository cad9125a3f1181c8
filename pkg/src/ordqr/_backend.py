"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. ``OQR_BACKEND=python`` (or ``compiled``) forces a choice at import
time, and :func:`set_backend` switches at runtime. Callers must look up
``_backend.kernels`` at call time rather than binding it at import.
"""

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

kernels = _kernels_py


def available():
    """Names of the backends importable in this environment."""
    return ["compiled", "python"] if _compiled is not None else ["python"]


def set_backend(name):
    """Select ``"compiled"``, ``"python"`` or ``"auto"``; returns the active name."""
    global kernels
    if name == "python":
        kernels = _kernels_py
    elif name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        kernels = _compiled
    elif name == "auto":
        kernels = _compiled if _compiled is not None else _kernels_py
    else:
        raise ValueError(f"unknown backend {name!r}")
    return kernels.NAME


def active():
    return kernels.NAME


set_backend(os.environ.get("OQR_BACKEND", "auto"))
