"""Backend selection: compiled RK4 kernel if built, pure Python otherwise.

Set TWOMODE_PURE_PYTHON=1 to force the fallback (used by the parity tests
and the benchmark).  Both backends implement the same rk4_propagate
contract and produce bitwise-identical output.
"""

import os

from . import _kernel_py

__all__ = ["BACKEND", "rk4_propagate", "available_backends"]

_forced_pure = os.environ.get("TWOMODE_PURE_PYTHON", "") not in ("", "0")

if not _forced_pure:
    try:
        from . import _core as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernel_py
        BACKEND = "python"
else:
    _impl = _kernel_py
    BACKEND = "python"

rk4_propagate = _impl.rk4_propagate


def available_backends() -> dict:
    """Importable kernel implementations keyed by name."""
    backends = {"python": _kernel_py}
    try:
        from . import _core

        backends["compiled"] = _core
    except ImportError:
        pass
    return backends
