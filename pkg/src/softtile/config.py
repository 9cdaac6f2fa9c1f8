"""Tunable knobs for placement and QoR estimation.

Geometry facts (macro sizes, net lists, die sizing) belong to the cluster
description; this module only holds estimator and solver parameters that a
user may override from a JSON config file.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import SpecParseError

__all__ = ["FloorplanConfig", "load_config"]


@dataclass(frozen=True)
class FloorplanConfig:
    # Keepout margin added around every macro.
    halo_um: float = 2.0
    # Standard-cell density assumed inside soft-module regions.
    region_utilization: float = 0.575
    # Fraction of the free area handed to regions during legalization; the
    # remainder stays as routing slack.
    region_fill: float = 0.998
    # Bin edge lengths for the density and congestion maps.
    density_bin_um: float = 10.0
    congestion_bin_um: float = 20.0
    # Routing supply per bin is 2 * tracks_per_um * bin_area, counting every
    # metal layer of the stack (wire-micrometres per bin). Fitted, together
    # with the direction split and the overflow budget, so the reference
    # layouts classify as routable exactly where the routed flow closed.
    tracks_per_um: float = 51.875
    # Fraction of that supply on horizontal layers; the rest is vertical.
    horizontal_track_share: float = 0.4916
    # A layout is routable while at most this many bins overflow.
    max_overflow_bins: int = 1032
    io_pin_count: int = 64
    # Quadratic-placement solver stop: relative movement per sweep.
    solver_rtol: float = 1e-9
    solver_max_iters: int = 10000
    target_freq_mhz: float = 1000.0

    def replace(self, **kw) -> "FloorplanConfig":
        return dataclasses.replace(self, **kw)


_FIELDS = {f.name: f.type for f in dataclasses.fields(FloorplanConfig)}


def load_config(path: str | Path) -> FloorplanConfig:
    """Read a JSON object of overrides; unknown keys are rejected."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise SpecParseError(str(path), str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise SpecParseError(str(path), f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SpecParseError(str(path), "config must be a JSON object")
    unknown = sorted(set(raw) - set(_FIELDS))
    if unknown:
        raise SpecParseError(str(path), f"unknown config keys: {', '.join(unknown)}")
    for key, value in raw.items():
        if not isinstance(value, (int, float)):
            raise SpecParseError(str(path), f"config key {key!r} must be a number")
    return FloorplanConfig(**raw)
