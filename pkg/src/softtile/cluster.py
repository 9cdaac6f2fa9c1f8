"""Abstract netlist of one processor-cluster tile and its die outline.

The built-in cluster models a tightly coupled compute cluster: nine small
cores (eight workers plus one control core), eight FPU blocks, a scratchpad
memory of 32 banks behind a fully connected single-cycle crossbar, a
512-bit DMA path to the banks, a shared instruction cache with four macros,
and two AXI crossbars bridging to the tile's I/O edge. Soft logic is kept
as areas; memories are hard macros. Everything downstream (styles, placer,
estimators) consumes this description only.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

from .errors import InfeasibleOutlineError, InvalidAspectError, SpecParseError
from .geometry import DieOutline

__all__ = [
    "SoftModuleSpec",
    "MacroSpec",
    "NetSpec",
    "ClusterSpec",
    "default_manticore_cluster",
    "validate",
    "die_outline",
    "load_spec",
    "dump_spec",
    "IO_PIN_PATTERN",
]

MODULE_KINDS = (
    "compute-core",
    "fpu",
    "spm-crossbar",
    "wide-crossbar",
    "dma",
    "axi-xbar",
    "icache-ctrl",
    "misc",
)
MACRO_GROUPS = (
    "spm-superbank-0",
    "spm-superbank-1",
    "spm-superbank-2",
    "spm-superbank-3",
    "icache",
)
PORT_SIDES = ("left", "right", "top", "bottom")
LATENCY_CLASSES = ("single-cycle", "pipelineable")

# Net endpoints matching this pattern are I/O pin references, resolved
# against the die outline at layout time rather than the spec.
IO_PIN_PATTERN = re.compile(r"^io_\d+$")

# Aspect-ratio sweep range supported by the placement styles.
Q_MIN = 0.4
Q_MAX = 2.5


@dataclass(frozen=True)
class SoftModuleSpec:
    id: str
    kind: str
    area_um2: float
    # Advisory grouping hints (macro groups or "io") used by documentation
    # and renderers; the net list carries the actual connectivity.
    attraction_anchors: tuple[str, ...] = ()


@dataclass(frozen=True)
class MacroSpec:
    id: str
    width_um: float
    height_um: float
    group: str
    port_side: str

    @property
    def area_um2(self) -> float:
        return self.width_um * self.height_um


@dataclass(frozen=True)
class NetSpec:
    id: str
    endpoints: tuple[str, ...]
    bit_width: int
    latency_class: str


@dataclass(frozen=True)
class ClusterSpec:
    modules: tuple[SoftModuleSpec, ...]
    macros: tuple[MacroSpec, ...]
    nets: tuple[NetSpec, ...]
    core_area_mm2: float
    target_freq_mhz: float
    target_utilization: float

    @property
    def core_area_um2(self) -> float:
        return self.core_area_mm2 * 1e6

    def module_by_id(self, module_id: str) -> SoftModuleSpec:
        for m in self.modules:
            if m.id == module_id:
                return m
        raise KeyError(module_id)

    def macro_by_id(self, macro_id: str) -> MacroSpec:
        for m in self.macros:
            if m.id == macro_id:
                return m
        raise KeyError(macro_id)

    def spm_macros(self) -> tuple[MacroSpec, ...]:
        return tuple(m for m in self.macros if m.group.startswith("spm-superbank"))

    def icache_macros(self) -> tuple[MacroSpec, ...]:
        return tuple(m for m in self.macros if m.group == "icache")


def _build_default() -> ClusterSpec:
    core_area_um2 = 0.9e6
    target_utilization = 0.575
    halo_um = 2.0
    region_fill = 0.998

    # Macro sizing: the 32 SPM bank macros take 20% of the placeable area,
    # where placeable = core minus all 36 macro footprints. Solving
    # 32*a = 0.2*(core - 36*a) fixes the per-macro area; 2:1 height:width.
    macro_area = 0.2 * core_area_um2 / (32.0 + 0.2 * 36.0)
    macro_w = math.sqrt(macro_area / 2.0)
    macro_h = 2.0 * macro_w

    macros = []
    for g in range(4):
        for b in range(8):
            macros.append(
                MacroSpec(
                    id=f"spm_sb{g}_b{b}",
                    width_um=macro_w,
                    height_um=macro_h,
                    group=f"spm-superbank-{g}",
                    port_side="left",
                )
            )
    for k in range(4):
        macros.append(
            MacroSpec(
                id=f"icache{k}",
                width_um=macro_w,
                height_um=macro_h,
                group="icache",
                port_side="right",
            )
        )

    # Soft-module area budget: macros plus their halos tile a fixed slot
    # area regardless of style, so the free area is layout-independent.
    # Regions later claim free area at target utilization with a small
    # routing-slack holdback; sizing the cell total to exactly that budget
    # keeps legalization feasible at every aspect ratio.
    slot_area = (macro_w + 2 * halo_um) * (macro_h + 2 * halo_um)
    free_area = core_area_um2 - 36.0 * slot_area
    cell_total = target_utilization * region_fill * free_area

    spm_groups = tuple(f"spm-superbank-{g}" for g in range(4))
    kind_share = {
        "fpu": 0.055,
        "compute-core": 0.02,
        "spm-crossbar": 0.15,
        "wide-crossbar": 0.06,
        "dma": 0.06,
        "axi-xbar": 0.03,
        "icache-ctrl": 0.05,
    }

    modules = []
    for i in range(9):
        modules.append(
            SoftModuleSpec(f"cc{i}", "compute-core", kind_share["compute-core"] * cell_total)
        )
    for i in range(8):
        modules.append(SoftModuleSpec(f"fpu{i}", "fpu", kind_share["fpu"] * cell_total))
    modules.append(
        SoftModuleSpec("spm_xbar", "spm-crossbar", kind_share["spm-crossbar"] * cell_total, spm_groups)
    )
    modules.append(
        SoftModuleSpec("wide_xbar", "wide-crossbar", kind_share["wide-crossbar"] * cell_total, spm_groups)
    )
    modules.append(SoftModuleSpec("dma", "dma", kind_share["dma"] * cell_total, spm_groups))
    modules.append(SoftModuleSpec("axi_xbar_wide", "axi-xbar", kind_share["axi-xbar"] * cell_total, ("io",)))
    modules.append(
        SoftModuleSpec("axi_xbar_narrow", "axi-xbar", kind_share["axi-xbar"] * cell_total, ("io",))
    )
    modules.append(
        SoftModuleSpec("icache_ctrl", "icache-ctrl", kind_share["icache-ctrl"] * cell_total, ("icache",))
    )

    nets = []
    # 26 crossbar master ports: two per worker core, one for the control
    # core, five for the DMA engine, two for the instruction-cache
    # controller, one per AXI crossbar. Only the count is load-bearing for
    # the estimators; the split is a documented default.
    masters = []
    for i in range(8):
        masters += [f"cc{i}", f"cc{i}"]
    masters.append("cc8")
    masters += ["dma"] * 5
    masters += ["icache_ctrl"] * 2
    masters += ["axi_xbar_wide", "axi_xbar_narrow"]
    assert len(masters) == 26
    bank_ids = [m.id for m in macros if m.group.startswith("spm-superbank")]
    for mi, master in enumerate(masters):
        for bank in bank_ids:
            nets.append(
                NetSpec(f"xb_m{mi:02d}_{bank}", (master, "spm_xbar", bank), 64, "single-cycle")
            )

    for g in range(4):
        group_banks = tuple(f"spm_sb{g}_b{b}" for b in range(8))
        nets.append(
            NetSpec(f"wide_sb{g}", ("dma", "wide_xbar") + group_banks, 512, "pipelineable")
        )

    for i in range(9):
        nets.append(NetSpec(f"fetch_cc{i}", (f"cc{i}", "icache_ctrl"), 32, "single-cycle"))
    for k in range(4):
        nets.append(NetSpec(f"refill_ic{k}", ("icache_ctrl", f"icache{k}"), 64, "single-cycle"))
    for i in range(8):
        nets.append(NetSpec(f"fp_cc{i}", (f"cc{i}", f"fpu{i}"), 128, "single-cycle"))

    nets.append(NetSpec("axi_dma_w", ("dma", "axi_xbar_wide"), 512, "pipelineable"))
    nets.append(NetSpec("axi_ic_w", ("icache_ctrl", "axi_xbar_wide"), 512, "pipelineable"))
    nets.append(NetSpec("axi_w_io", ("axi_xbar_wide", "io_32"), 512, "pipelineable"))
    for i in range(9):
        nets.append(NetSpec(f"axi_cc{i}_n", (f"cc{i}", "axi_xbar_narrow"), 64, "pipelineable"))
    nets.append(NetSpec("axi_n_io", ("axi_xbar_narrow", "io_31"), 64, "pipelineable"))
    nets.append(NetSpec("axi_w_n", ("axi_xbar_wide", "axi_xbar_narrow"), 512, "pipelineable"))

    return ClusterSpec(
        modules=tuple(modules),
        macros=tuple(macros),
        nets=tuple(nets),
        core_area_mm2=0.9,
        target_freq_mhz=1000.0,
        target_utilization=target_utilization,
    )


_DEFAULT: ClusterSpec | None = None


def default_manticore_cluster() -> ClusterSpec:
    """The built-in 9-core / 8-FPU / 36-macro cluster description."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = _build_default()
    return _DEFAULT


def validate(spec: ClusterSpec) -> list[str]:
    """Return all invariant violations (empty list = valid spec)."""
    out: list[str] = []
    if not spec.modules:
        out.append("no modules")
    ids: dict[str, str] = {}
    for m in spec.modules:
        if m.id in ids:
            out.append(f"duplicate id {m.id!r}")
        ids[m.id] = "module"
        if m.kind not in MODULE_KINDS:
            out.append(f"module {m.id!r} has unknown kind {m.kind!r}")
        if not m.area_um2 > 0:
            out.append(f"module {m.id!r} has nonpositive area")
    for m in spec.macros:
        if m.id in ids:
            out.append(f"duplicate id {m.id!r}")
        ids[m.id] = "macro"
        if m.group not in MACRO_GROUPS:
            out.append(f"macro {m.id!r} has unknown group {m.group!r}")
        if m.port_side not in PORT_SIDES:
            out.append(f"macro {m.id!r} has unknown port side {m.port_side!r}")
        if not (m.width_um > 0 and m.height_um > 0):
            out.append(f"macro {m.id!r} has nonpositive dimensions")
    if not spec.core_area_mm2 > 0:
        out.append("nonpositive core area")
    if not 0 < spec.target_utilization <= 1:
        out.append("target utilization outside (0, 1]")
    macro_area = sum(m.area_um2 for m in spec.macros)
    if macro_area > spec.core_area_um2:
        out.append("macros exceed die")
    seen_nets: set[str] = set()
    for n in spec.nets:
        if n.id in seen_nets:
            out.append(f"duplicate net id {n.id!r}")
        seen_nets.add(n.id)
        if len(n.endpoints) < 2:
            out.append(f"net {n.id!r} has fewer than 2 endpoints")
        if n.bit_width < 1:
            out.append(f"net {n.id!r} has bit width < 1")
        if n.latency_class not in LATENCY_CLASSES:
            out.append(f"net {n.id!r} has unknown latency class {n.latency_class!r}")
        for e in n.endpoints:
            if e not in ids and not IO_PIN_PATTERN.match(e):
                out.append(f"net {n.id!r} endpoint {e!r} does not resolve")
    return out


def die_outline(spec: ClusterSpec, q: float) -> DieOutline:
    """Fixed outline of area core_area and aspect ratio q = width/height.

    The q and 1/q outlines are exact transposes: the short computation path
    always runs on the wide-side ratio and flips for q < 1.
    """
    if not (isinstance(q, (int, float)) and math.isfinite(q) and q > 0):
        raise InvalidAspectError(f"aspect ratio must be a positive finite number, got {q!r}")
    if q < Q_MIN - 1e-12 or q > Q_MAX + 1e-12:
        raise InfeasibleOutlineError(
            f"aspect ratio {q:g} outside the supported range [{Q_MIN:g}, {Q_MAX:g}]"
        )
    area = spec.core_area_um2
    qc = q if q >= 1.0 else 1.0 / q
    long_side = math.sqrt(area * qc)
    short_side = math.sqrt(area / qc)
    if q >= 1.0:
        return DieOutline(width_um=long_side, height_um=short_side, aspect=q)
    return DieOutline(width_um=short_side, height_um=long_side, aspect=q)


# --- JSON schema -----------------------------------------------------------

_TOP_KEYS = ("modules", "macros", "nets", "core_area_mm2", "target_freq_mhz", "target_utilization")


def dump_spec(spec: ClusterSpec) -> str:
    doc = {
        "modules": [
            {
                "id": m.id,
                "kind": m.kind,
                "area_um2": m.area_um2,
                "attraction_anchors": list(m.attraction_anchors),
            }
            for m in spec.modules
        ],
        "macros": [
            {
                "id": m.id,
                "width_um": m.width_um,
                "height_um": m.height_um,
                "group": m.group,
                "port_side": m.port_side,
            }
            for m in spec.macros
        ],
        "nets": [
            {
                "id": n.id,
                "endpoints": list(n.endpoints),
                "bit_width": n.bit_width,
                "latency_class": n.latency_class,
            }
            for n in spec.nets
        ],
        "core_area_mm2": spec.core_area_mm2,
        "target_freq_mhz": spec.target_freq_mhz,
        "target_utilization": spec.target_utilization,
    }
    return json.dumps(doc, indent=2, sort_keys=False)


def _need(obj: dict, key: str, kind, path: str):
    if key not in obj:
        raise SpecParseError(f"{path}/{key}", "missing required key")
    val = obj[key]
    if kind is float:
        if not isinstance(val, (int, float)) or isinstance(val, bool):
            raise SpecParseError(f"{path}/{key}", "expected a number")
        return float(val)
    if not isinstance(val, kind):
        raise SpecParseError(f"{path}/{key}", f"expected {kind.__name__}")
    return val


def load_spec(text: str) -> ClusterSpec:
    """Parse a cluster-spec JSON document; errors name the offending path."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError("/", f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpecParseError("/", "document must be a JSON object")
    for key in _TOP_KEYS:
        if key not in doc:
            raise SpecParseError(f"/{key}", "missing required key")

    modules = []
    raw_modules = doc["modules"]
    if not isinstance(raw_modules, list):
        raise SpecParseError("/modules", "expected a list")
    for i, m in enumerate(raw_modules):
        path = f"/modules/{i}"
        if not isinstance(m, dict):
            raise SpecParseError(path, "expected an object")
        anchors = m.get("attraction_anchors", [])
        if not isinstance(anchors, list) or not all(isinstance(a, str) for a in anchors):
            raise SpecParseError(f"{path}/attraction_anchors", "expected a list of strings")
        modules.append(
            SoftModuleSpec(
                id=_need(m, "id", str, path),
                kind=_need(m, "kind", str, path),
                area_um2=_need(m, "area_um2", float, path),
                attraction_anchors=tuple(anchors),
            )
        )

    macros = []
    raw_macros = doc["macros"]
    if not isinstance(raw_macros, list):
        raise SpecParseError("/macros", "expected a list")
    for i, m in enumerate(raw_macros):
        path = f"/macros/{i}"
        if not isinstance(m, dict):
            raise SpecParseError(path, "expected an object")
        macros.append(
            MacroSpec(
                id=_need(m, "id", str, path),
                width_um=_need(m, "width_um", float, path),
                height_um=_need(m, "height_um", float, path),
                group=_need(m, "group", str, path),
                port_side=_need(m, "port_side", str, path),
            )
        )

    nets = []
    raw_nets = doc["nets"]
    if not isinstance(raw_nets, list):
        raise SpecParseError("/nets", "expected a list")
    for i, n in enumerate(raw_nets):
        path = f"/nets/{i}"
        if not isinstance(n, dict):
            raise SpecParseError(path, "expected an object")
        endpoints = _need(n, "endpoints", list, path)
        if not all(isinstance(e, str) for e in endpoints):
            raise SpecParseError(f"{path}/endpoints", "expected a list of strings")
        bit_width = _need(n, "bit_width", float, path)
        if bit_width != int(bit_width):
            raise SpecParseError(f"{path}/bit_width", "expected an integer")
        nets.append(
            NetSpec(
                id=_need(n, "id", str, path),
                endpoints=tuple(endpoints),
                bit_width=int(bit_width),
                latency_class=_need(n, "latency_class", str, path),
            )
        )

    spec = ClusterSpec(
        modules=tuple(modules),
        macros=tuple(macros),
        nets=tuple(nets),
        core_area_mm2=_need(doc, "core_area_mm2", float, ""),
        target_freq_mhz=_need(doc, "target_freq_mhz", float, ""),
        target_utilization=_need(doc, "target_utilization", float, ""),
    )
    violations = validate(spec)
    if violations:
        raise SpecParseError("/", "; ".join(violations))
    return spec
