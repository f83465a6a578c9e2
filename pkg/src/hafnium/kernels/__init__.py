"""Kernel backend selection.

The JIT path is the default whenever numba imports; set HAFNIUM_KERNELS=numpy
(or call set_kernel_mode) to run the vectorized numpy fallback instead. Both
paths expose the same functions; see benchmarks/compare_kernels.py for a
side-by-side timing.
"""

import importlib
import os

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

_VALID = ("numba", "numpy")


def _initial_mode() -> str:
    env = os.environ.get("HAFNIUM_KERNELS", "auto").strip().lower()
    if env in ("numpy", "python"):
        return "numpy"
    if env == "numba":
        if not HAVE_NUMBA:
            raise ImportError("HAFNIUM_KERNELS=numba but numba is not importable")
        return "numba"
    return "numba" if HAVE_NUMBA else "numpy"


_mode = _initial_mode()


def kernel_mode() -> str:
    """Currently active kernel backend: 'numba' or 'numpy'."""
    return _mode


def set_kernel_mode(mode: str) -> str:
    """Switch kernel backend at runtime; returns the previous mode."""
    global _mode
    if mode not in _VALID:
        raise ValueError(f"kernel mode must be one of {_VALID}, got {mode!r}")
    if mode == "numba" and not HAVE_NUMBA:
        raise ValueError("numba kernels requested but numba is not importable")
    previous = _mode
    _mode = mode
    return previous


def active():
    """The module implementing the current kernel backend (imported lazily)."""
    name = "._numba" if _mode == "numba" else "._numpy"
    return importlib.import_module(name, __package__)
