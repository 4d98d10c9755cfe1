"""Assembly kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback is
used otherwise.  ``SMA2D_KERNELS=python`` forces the fallback (used by the
benchmark and the cross-backend tests); ``SMA2D_KERNELS=cython`` insists on
the extension and fails loudly if it is missing.
"""

from __future__ import annotations

import os

from . import _ref

_choice = os.environ.get("SMA2D_KERNELS", "auto").lower()

if _choice == "python":
    _impl = _ref
    BACKEND = "python"
elif _choice == "cython":
    from . import _fast as _impl  # type: ignore[no-redef]

    BACKEND = "cython"
elif _choice == "auto":
    try:
        from . import _fast as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _ref
        BACKEND = "python"
else:
    raise RuntimeError(f"SMA2D_KERNELS must be auto, python or cython, got {_choice!r}")

variant_energies = _impl.variant_energies
bulk_energy_grad = _impl.bulk_energy_grad
edge_energy_grad = _impl.edge_energy_grad


def backend_name() -> str:
    return BACKEND


def available_backends() -> list[str]:
    names = ["python"]
    try:
        from . import _fast  # noqa: F401

        names.insert(0, "cython")
    except ImportError:
        pass
    return names


def get_backend(name: str):
    """Return the kernel module for an explicit backend name."""
    if name == "python":
        return _ref
    if name == "cython":
        from . import _fast

        return _fast
    raise ValueError(f"unknown backend {name!r}")
