"""Kernel selection at import: compiled if available, else pure Python.

Set ``DISCOURSE_LENS_PURE_PYTHON=1`` to force the fallback.
"""
import importlib
import os


def _force_pure() -> bool:
    return os.environ.get("DISCOURSE_LENS_PURE_PYTHON", "") not in ("", "0")


def load(name=None):
    """Return a kernel module by name ("cython" or "python"); None picks the best."""
    if name == "python":
        return importlib.import_module("discourse_lens._pykernels")
    if name == "cython":
        return importlib.import_module("discourse_lens._ckernels")
    if _force_pure():
        return load("python")
    try:
        return load("cython")
    except ImportError:
        return load("python")


kernels = load()
BACKEND = kernels.NAME
