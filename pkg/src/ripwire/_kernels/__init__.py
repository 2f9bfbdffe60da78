"""Kernel backend selection.

Two implementations of the hot loops exist: compiled Cython extensions
and a pure NumPy fallback. The default is the compiled backend when the
extensions imported successfully, otherwise pure. Set RIPWIRE_BACKEND to
"cython" or "pure" to force one (or "auto" for the default behavior).
"""

from __future__ import annotations

import os
from types import SimpleNamespace

from ripwire._kernels import pure as _pure

__all__ = ["BACKEND", "BACKEND_NAME", "available_backends", "get_backend", "rng_block"]

# The splitmix64 helper is pure NumPy and shared by all Python-level code
# regardless of the selected kernel backend.
rng_block = _pure.rng_block


def _load_compiled() -> SimpleNamespace:
    from ripwire._kernels import _match, _sgns

    return SimpleNamespace(
        name="cython", match_batch=_match.match_batch, sgns_epoch=_sgns.sgns_epoch
    )


def _load_pure() -> SimpleNamespace:
    return SimpleNamespace(
        name="pure", match_batch=_pure.match_batch, sgns_epoch=_pure.sgns_epoch
    )


def get_backend(name: str) -> SimpleNamespace:
    """Load a backend by name ("cython" or "pure"); raises ImportError."""
    if name == "cython":
        return _load_compiled()
    if name == "pure":
        return _load_pure()
    raise ImportError(f"unknown kernel backend {name!r}; use 'cython' or 'pure'")


def available_backends() -> list[str]:
    names = []
    try:
        _load_compiled()
        names.append("cython")
    except ImportError:
        pass
    names.append("pure")
    return names


def _select() -> SimpleNamespace:
    requested = os.environ.get("RIPWIRE_BACKEND", "auto").strip().lower() or "auto"
    if requested == "auto":
        try:
            return _load_compiled()
        except ImportError:
            return _load_pure()
    if requested in ("cython", "compiled"):
        return _load_compiled()
    if requested == "pure":
        return _load_pure()
    raise ImportError(
        f"unknown RIPWIRE_BACKEND {requested!r}; use 'auto', 'cython', or 'pure'"
    )


BACKEND = _select()
BACKEND_NAME: str = BACKEND.name
