"""Term kernels with a compiled backend and a pure-Python fallback.

The compiled module is used when it imports; set ``TABIPOL_PURE_PYTHON=1`` to
force the fallback (the benchmark and the twin tests do this).
"""

from __future__ import annotations

import os

from . import _pure

if os.environ.get("TABIPOL_PURE_PYTHON") == "1":
    _impl = _pure
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:  # extension not built
        _impl = _pure

BACKEND: str = _impl.BACKEND
deref = _impl.deref
resolve = _impl.resolve
occurs = _impl.occurs
unify = _impl.unify
unify_args = _impl.unify_args
undo = _impl.undo
match = _impl.match
match_args = _impl.match_args


def compiled_module():
    """The compiled backend module, or None when it is not built."""
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels


__all__ = ["BACKEND", "deref", "resolve", "occurs", "unify", "unify_args", "undo", "match", "match_args", "compiled_module"]
