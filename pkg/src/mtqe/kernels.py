"""Selection of the edit-distance kernel backend.

The compiled Cython kernels are preferred when the extension was built;
otherwise the pure-Python twins are used.  Setting the environment
variable ``MTQE_PURE_PYTHON=1`` forces the fallback (useful for
benchmarking and debugging).
"""

import os

from . import _ter_kernels_py as python_kernels
from .errors import ConfigError

try:
    from . import _ter_kernels as compiled_kernels
except ImportError:
    compiled_kernels = None

if compiled_kernels is not None and not os.environ.get("MTQE_PURE_PYTHON"):
    active = compiled_kernels
else:
    active = python_kernels


def backend_name() -> str:
    """Name of the kernel backend selected at import time."""
    return active.IMPLEMENTATION


def get(name: str | None = None):
    """Resolve a kernel module by name; ``None`` returns the default."""
    if name is None:
        return active
    if name in ("cython", "compiled"):
        if compiled_kernels is None:
            raise ConfigError("compiled kernels are not available in this build")
        return compiled_kernels
    if name == "python":
        return python_kernels
    raise ConfigError(f"unknown kernel backend: {name!r}")
