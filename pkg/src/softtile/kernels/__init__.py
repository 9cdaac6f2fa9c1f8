"""Numeric kernel dispatch: compiled extension when built, numpy otherwise.

The active backend is chosen once at import (compiled if importable) and can
be forced with use_backend(), which returns the previously active name so
callers can restore it:

    prev = kernels.use_backend("numpy")
    try:
        ...
    finally:
        kernels.use_backend(prev)
"""

from __future__ import annotations

from . import reference

_BACKENDS = {"numpy": reference}

try:
    from . import _core  # compiled at install time; absent in source checkouts

    _BACKENDS["compiled"] = _core
except ImportError:
    pass

_active = "compiled" if "compiled" in _BACKENDS else "numpy"

__all__ = [
    "active_backend",
    "available_backends",
    "use_backend",
    "solve_star",
    "hpwl_batch",
    "raster_area",
    "spread_demand",
]


def active_backend() -> str:
    return _active


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def use_backend(name: str | None) -> str:
    """Force a backend by name (None restores the default). Returns the previous name."""
    global _active
    prev = _active
    if name is None:
        name = "compiled" if "compiled" in _BACKENDS else "numpy"
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {', '.join(sorted(_BACKENDS))}")
    _active = name
    return prev


def solve_star(*args, **kwargs):
    return _BACKENDS[_active].solve_star(*args, **kwargs)


def hpwl_batch(*args, **kwargs):
    return _BACKENDS[_active].hpwl_batch(*args, **kwargs)


def raster_area(*args, **kwargs):
    return _BACKENDS[_active].raster_area(*args, **kwargs)


def spread_demand(*args, **kwargs):
    return _BACKENDS[_active].spread_demand(*args, **kwargs)
