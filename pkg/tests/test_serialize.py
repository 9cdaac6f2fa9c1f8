import json

import pytest

from softtile.cluster import default_manticore_cluster, die_outline
from softtile.errors import LayoutParseError, VersionMismatchError
from softtile.geometry import DieOutline, FloorplanLayout, IoPin, MacroPlacement, Rect, RegionPlacement
from softtile.placer import legalize_regions, quadratic_centroids
from softtile.serialize import (
    SCHEMA_VERSION,
    dumps_layout,
    layout_digest,
    layout_from_doc,
    layout_to_doc,
    load_layout,
    loads_layout,
    save_layout,
)
from softtile.styles import generate_layout


@pytest.fixture(scope="module")
def layout(spec, cfg):
    lay = generate_layout(spec, die_outline(spec, 1.0), "u-shape", cfg)
    sol = quadratic_centroids(spec, lay, cfg.solver_rtol, cfg.solver_max_iters)
    regions = legalize_regions(sol, lay, spec)
    return FloorplanLayout(lay.die, lay.macros, lay.io_pins, lay.style, lay.halo_um, regions)


def _toy():
    die = DieOutline(100.0, 50.0, 2.0)
    macros = [MacroPlacement("m0", Rect(10.0, 10.0, 4.0, 8.0), "MY")]
    pins = [IoPin("io_00", 0.0, 25.0)]
    regions = [RegionPlacement("cc0", [Rect(20.0, 0.0, 30.0, 50.0), Rect(60.0, 0.0, 5.0, 5.0)])]
    return FloorplanLayout(die, macros, pins, "1-sided", 2.0, regions)


def test_round_trip_full_layout(layout):
    assert loads_layout(dumps_layout(layout)) == layout


def test_round_trip_preserves_orientation_and_regions():
    toy = _toy()
    back = loads_layout(dumps_layout(toy))
    assert back == toy
    assert back.macros[0].orientation == "MY"
    assert back.regions[0].rects[1] == Rect(60.0, 0.0, 5.0, 5.0)


def test_save_load_file(tmp_path, layout):
    path = tmp_path / "fp.json"
    save_layout(layout, path)
    assert load_layout(path) == layout


def test_digest_stable_across_save_and_load(tmp_path, layout):
    before = layout_digest(layout)
    path = tmp_path / "fp.json"
    save_layout(layout, path)
    assert layout_digest(load_layout(path)) == before
    assert len(before) == 64 and set(before) <= set("0123456789abcdef")


def test_digest_ignores_on_disk_formatting(layout):
    # digest hashes the canonical document, not the pretty-printed text
    doc = layout_to_doc(layout)
    dense = json.dumps(doc)
    assert layout_digest(loads_layout(dense)) == layout_digest(layout)


def test_digest_sees_geometry_changes():
    toy = _toy()
    moved = FloorplanLayout(
        toy.die,
        [MacroPlacement("m0", Rect(10.0, 11.0, 4.0, 8.0), "MY")],
        toy.io_pins,
        toy.style,
        toy.halo_um,
        toy.regions,
    )
    assert layout_digest(moved) != layout_digest(toy)


def test_schema_version_written():
    doc = layout_to_doc(_toy())
    assert doc["schema_version"] == SCHEMA_VERSION


def test_newer_schema_rejected():
    doc = layout_to_doc(_toy())
    doc["schema_version"] = SCHEMA_VERSION + 1
    with pytest.raises(VersionMismatchError, match="newer than the supported"):
        layout_from_doc(doc)


def test_schema_version_must_be_integer():
    doc = layout_to_doc(_toy())
    doc["schema_version"] = "1"
    with pytest.raises(LayoutParseError, match="expected an integer"):
        layout_from_doc(doc)


def test_invalid_json():
    with pytest.raises(LayoutParseError, match="invalid JSON"):
        loads_layout("{not json")


def test_truncated_file(tmp_path, layout):
    path = tmp_path / "fp.json"
    text = dumps_layout(layout)
    path.write_text(text[: len(text) // 2])
    with pytest.raises(LayoutParseError, match="fp.json"):
        load_layout(path)


def test_missing_file_named_in_error(tmp_path):
    with pytest.raises(LayoutParseError, match="nope.json"):
        load_layout(tmp_path / "nope.json")


@pytest.mark.parametrize("key", ["die", "style", "macros", "io_pins", "halo_um"])
def test_missing_keys_are_named(key):
    doc = layout_to_doc(_toy())
    del doc[key]
    with pytest.raises(LayoutParseError, match=key):
        layout_from_doc(doc)


def test_bad_macro_coordinate_path_in_error():
    doc = layout_to_doc(_toy())
    doc["macros"][0]["x"] = "ten"
    with pytest.raises(LayoutParseError, match=r"/macros/0"):
        layout_from_doc(doc)


def test_non_object_document():
    with pytest.raises(LayoutParseError, match="JSON object"):
        layout_from_doc([1, 2, 3])


def test_dumps_ends_with_newline(layout):
    assert dumps_layout(layout).endswith("}\n")


def test_all_styles_round_trip(spec, cfg):
    spec = default_manticore_cluster()
    for style, q in (("1-sided", 0.4), ("2-sided", 2.5)):
        lay = generate_layout(spec, die_outline(spec, q), style, cfg)
        assert loads_layout(dumps_layout(lay)) == lay
