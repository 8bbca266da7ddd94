"""Backend selection for the hot loops.

``DECAYBELL_BACKEND=numba`` (default when numba imports) runs the compiled
kernels; ``DECAYBELL_BACKEND=numpy`` forces the vectorised fallback.
"""
import contextlib
import os

from . import _numpy

try:
    from . import _numba
except ImportError:  # numba missing or broken
    _numba = None

BACKENDS = ("numba", "numpy")
HAVE_NUMBA = _numba is not None


def _initial():
    name = os.environ.get("DECAYBELL_BACKEND", "numba").strip().lower()
    if name not in BACKENDS:
        raise ValueError(f"DECAYBELL_BACKEND must be one of {BACKENDS}, got {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        name = "numpy"
    return name


_active = _initial()


def backend_name():
    return _active


def get():
    """Module implementing the active backend."""
    return _numba if _active == "numba" else _numpy


def set_backend(name):
    global _active
    name = name.lower()
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    _active = name


@contextlib.contextmanager
def use_backend(name):
    prev = _active
    set_backend(name)
    try:
        yield get()
    finally:
        set_backend(prev)
