import json
import math

import pytest

from softtile.cluster import (
    ClusterSpec,
    MacroSpec,
    NetSpec,
    SoftModuleSpec,
    default_manticore_cluster,
    die_outline,
    dump_spec,
    load_spec,
    validate,
)
from softtile.errors import InfeasibleOutlineError, InvalidAspectError, SpecParseError


def test_default_inventory(spec):
    assert len(spec.modules) == 23
    assert len(spec.macros) == 36
    assert len(spec.spm_macros()) == 32
    assert len(spec.icache_macros()) == 4
    assert len(spec.nets) == 871


def test_default_net_families(spec):
    by_class = {}
    for n in spec.nets:
        by_class.setdefault(n.latency_class, []).append(n)
    xbar = [n for n in spec.nets if n.id.startswith("xb_")]
    assert len(xbar) == 26 * 32
    assert all(n.bit_width == 64 and n.latency_class == "single-cycle" for n in xbar)
    wide = [n for n in spec.nets if n.id.startswith("wide_sb")]
    assert len(wide) == 4
    assert all(n.bit_width == 512 and len(n.endpoints) == 10 for n in wide)
    assert len(by_class["pipelineable"]) == 4 + 14  # wide DMA + AXI legs


def test_default_module_area_budget(spec):
    # Soft-module area fills the non-macro area at the target utilization,
    # with a small allocation slack; the split is exact by construction.
    slot = (spec.macros[0].width_um + 4.0) * (spec.macros[0].height_um + 4.0)
    free = spec.core_area_um2 - 36 * slot
    total = sum(m.area_um2 for m in spec.modules)
    assert total == pytest.approx(0.575 * 0.998 * free, rel=1e-12)
    fpus = sum(m.area_um2 for m in spec.modules if m.kind == "fpu")
    assert fpus == pytest.approx(0.44 * total, rel=1e-12)
    xbar = spec.module_by_id("spm_xbar")
    assert xbar.area_um2 == pytest.approx(0.15 * total, rel=1e-12)


def test_default_is_valid(spec):
    assert validate(spec) == []


def test_validate_flags_duplicate_ids(spec):
    bad = ClusterSpec(
        modules=spec.modules + (SoftModuleSpec("cc0", "compute-core", 100.0),),
        macros=spec.macros,
        nets=spec.nets,
        core_area_mm2=spec.core_area_mm2,
        target_freq_mhz=spec.target_freq_mhz,
        target_utilization=spec.target_utilization,
    )
    assert any("cc0" in v and "duplicate" in v for v in validate(bad))


def test_validate_flags_bad_fields(spec):
    bad = ClusterSpec(
        modules=(SoftModuleSpec("m0", "not-a-kind", -1.0),),
        macros=(MacroSpec("ram", 10.0, 0.0, "icache", "nowhere"),),
        nets=(
            NetSpec("n0", ("m0",), 64, "single-cycle"),
            NetSpec("n1", ("m0", "ghost"), 0, "warp-speed"),
        ),
        core_area_mm2=0.9,
        target_freq_mhz=1000.0,
        target_utilization=0.575,
    )
    msgs = validate(bad)
    joined = "\n".join(msgs)
    assert "not-a-kind" in joined
    assert "nowhere" in joined
    assert "ghost" in joined
    assert "warp-speed" in joined
    assert any("endpoint" in m for m in msgs)  # n0 has fewer than 2
    assert any("bit width" in m for m in msgs)


def test_validate_accepts_io_endpoints(spec):
    # io_NN endpoints resolve against layout pin sites, not the spec.
    ok = ClusterSpec(
        modules=spec.modules,
        macros=spec.macros,
        nets=spec.nets + (NetSpec("dbg", ("cc0", "io_63"), 32, "pipelineable"),),
        core_area_mm2=spec.core_area_mm2,
        target_freq_mhz=spec.target_freq_mhz,
        target_utilization=spec.target_utilization,
    )
    assert validate(ok) == []


def test_die_outline_square(spec):
    die = die_outline(spec, 1.0)
    side = math.sqrt(spec.core_area_um2)
    assert die.width_um == side
    assert die.height_um == side
    assert die.aspect == 1.0


def test_die_outline_area_and_aspect(spec):
    for q in (0.4, 0.7, 1.0, 1.3, 2.5):
        die = die_outline(spec, q)
        assert die.area_um2 == pytest.approx(spec.core_area_um2, rel=1e-12)
        assert die.width_um / die.height_um == pytest.approx(q, rel=1e-12)


@pytest.mark.parametrize("q", [0.4, 0.5, 1.25, 2.0, 2.5])
def test_die_outline_swap_is_exact_transpose(spec, q):
    a = die_outline(spec, q)
    b = die_outline(spec, 1.0 / q)
    assert a.width_um == b.height_um  # bitwise, not approx
    assert a.height_um == b.width_um


@pytest.mark.parametrize("q", [0.0, -1.0, float("nan"), float("inf")])
def test_die_outline_rejects_nonpositive(spec, q):
    with pytest.raises(InvalidAspectError):
        die_outline(spec, q)


@pytest.mark.parametrize("q", [0.1, 0.39, 2.51, 10.0])
def test_die_outline_rejects_out_of_range(spec, q):
    with pytest.raises(InfeasibleOutlineError):
        die_outline(spec, q)


def test_spec_roundtrip(spec):
    again = load_spec(dump_spec(spec))
    assert again == spec


def test_load_spec_reports_json_pointer_paths(spec):
    doc = json.loads(dump_spec(spec))
    doc["modules"][3]["area_um2"] = "plenty"
    with pytest.raises(SpecParseError) as ei:
        load_spec(json.dumps(doc))
    assert ei.value.path == "/modules/3/area_um2"

    doc = json.loads(dump_spec(spec))
    del doc["macros"][0]["group"]
    with pytest.raises(SpecParseError) as ei:
        load_spec(json.dumps(doc))
    assert ei.value.path == "/macros/0/group"

    doc = json.loads(dump_spec(spec))
    doc["nets"][5]["bit_width"] = 63.9
    with pytest.raises(SpecParseError) as ei:
        load_spec(json.dumps(doc))
    assert ei.value.path == "/nets/5/bit_width"


def test_load_spec_runs_semantic_validation(spec):
    doc = json.loads(dump_spec(spec))
    doc["nets"][0]["endpoints"] = ["cc0", "nonexistent"]
    with pytest.raises(SpecParseError) as ei:
        load_spec(json.dumps(doc))
    assert "nonexistent" in str(ei.value)


def test_load_spec_rejects_non_object():
    with pytest.raises(SpecParseError):
        load_spec("[1, 2, 3]")
    with pytest.raises(SpecParseError):
        load_spec("not json at all {")
