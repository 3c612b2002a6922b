"""Kernel selection: the compiled extension when importable, else pure Python."""

from . import _pykernel

KERNELS = {"python": _pykernel}

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None
else:
    KERNELS["cython"] = _ckernel

DEFAULT_BACKEND = "cython" if _ckernel is not None else "python"


def get_kernel(name: str | None = None):
    name = name or DEFAULT_BACKEND
    try:
        return KERNELS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {sorted(KERNELS)}") from None
