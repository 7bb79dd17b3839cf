"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy reference
is the fallback. `RATLAB_KERNELS=reference|compiled|auto` overrides the
choice (``compiled`` raises if the extension is missing, so CI can assert
the build actually happened).
"""

from __future__ import annotations

import os

from . import reference

try:
    from . import _ckernels
except ImportError:
    _ckernels = None

_choice = os.environ.get("RATLAB_KERNELS", "auto").lower()
if _choice in ("reference", "python"):
    impl = reference
elif _choice in ("compiled", "c"):
    if _ckernels is None:
        raise ImportError(
            "RATLAB_KERNELS=compiled but the compiled kernel extension is not "
            "built; reinstall with a C compiler or unset the variable"
        )
    impl = _ckernels
elif _choice == "auto":
    impl = _ckernels if _ckernels is not None else reference
else:
    raise ValueError(f"unknown RATLAB_KERNELS value: {_choice!r}")

BACKEND = impl.NAME


def available_backends():
    """Names of importable backends (the reference one is always present)."""
    names = [reference.NAME]
    if _ckernels is not None:
        names.append(_ckernels.NAME)
    return names
