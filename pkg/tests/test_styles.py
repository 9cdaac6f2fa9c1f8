import math
import random
from dataclasses import replace

import pytest

from oracles import grid_select_p as _oracle_select
from softtile.cluster import default_manticore_cluster, die_outline
from softtile.config import FloorplanConfig
from softtile.errors import InfeasibleOutlineError, OddMacroCountError
from softtile.geometry import rects_overlap, vertical_symmetry_error, within_die
from softtile.styles import (
    P_MIN,
    STYLE_NAMES,
    generate_layout,
    place_one_sided,
    place_two_sided,
    place_u_shape,
    select_exponent_p,
    ushape_heights,
)

SLOT_W = 47.915742374995496 + 4.0  # spm macro + halo on both sides
SLOT_H = 95.83148474999099 + 4.0


def _columns(layout, macro_ids):
    """Group placements of the given macros by x, left to right."""
    cols = {}
    for m in layout.macros:
        if m.macro_id in macro_ids:
            cols.setdefault(round(m.rect.x, 6), []).append(m)
    return [cols[x] for x in sorted(cols)]


def _spm_ids(spec):
    return {m.id for m in spec.spm_macros()}


# --- shared invariants -------------------------------------------------------


@pytest.mark.parametrize("style", STYLE_NAMES)
@pytest.mark.parametrize("q", [0.4, 1.0, 2.5])
def test_style_invariants(spec, cfg, style, q):
    die = die_outline(spec, q)
    layout = generate_layout(spec, die, style, cfg)
    assert layout.style == style
    assert len(layout.macros) == 36
    dilated = [m.rect.dilated(cfg.halo_um) for m in layout.macros]
    for i, m in enumerate(layout.macros):
        assert within_die(m.rect, die)
        for j in range(i + 1, len(dilated)):
            assert not rects_overlap(dilated[i], dilated[j])
    assert vertical_symmetry_error(layout) < SLOT_H


@pytest.mark.parametrize("style", STYLE_NAMES)
def test_superbanks_fill_consecutive_slots(spec, cfg, style):
    layout = generate_layout(spec, die_outline(spec, 1.0), style, cfg)
    order = [m.macro_id for m in layout.macros]
    for g in range(4):
        idx = sorted(order.index(f"spm_sb{g}_b{b}") for b in range(8))
        assert idx == list(range(idx[0], idx[0] + 8))


@pytest.mark.parametrize("style", STYLE_NAMES)
def test_icache_column_left_edge(spec, cfg, style):
    die = die_outline(spec, 1.0)
    layout = generate_layout(spec, die, style, cfg)
    icache = [layout.macro_by_id(f"icache{k}") for k in range(4)]
    assert all(m.rect.x == cfg.halo_um for m in icache)
    ys = sorted(m.rect.y for m in icache)
    # two above and two below the midline, flush stack
    mid = die.height_um / 2
    assert sum(1 for m in icache if m.rect.cy < mid) == 2
    assert ys[1] - ys[0] == pytest.approx(SLOT_H)


# --- 1-sided -----------------------------------------------------------------


def test_one_sided_square_profile(spec, cfg):
    die = die_outline(spec, 1.0)
    layout = place_one_sided(spec, die, cfg)
    cols = _columns(layout, _spm_ids(spec))
    assert [len(c) for c in cols] == [5, 9, 9, 9]  # leftmost short column
    # rightmost column flush with the right edge
    assert cols[-1][0].rect.x2 == pytest.approx(die.width_um - cfg.halo_um)
    # every column vertically centered
    for col in cols:
        lo = min(m.rect.y for m in col) - cfg.halo_um
        hi = max(m.rect.y2 for m in col) + cfg.halo_um
        assert (lo + hi) / 2 == pytest.approx(die.height_um / 2)


def test_one_sided_column_counts_follow_height(spec, cfg):
    # Wider dies are shorter, so the same 32 banks need more columns.
    ncols = {}
    for q in (0.4, 1.0, 2.5):
        layout = place_one_sided(spec, die_outline(spec, q), cfg)
        ncols[q] = len(_columns(layout, _spm_ids(spec)))
    assert ncols == {0.4: 3, 1.0: 4, 2.5: 6}


# --- 2-sided -----------------------------------------------------------------


def _rows(layout, macro_ids):
    rows = {}
    for m in layout.macros:
        if m.macro_id in macro_ids:
            rows.setdefault(round(m.rect.y, 6), []).append(m)
    return [rows[y] for y in sorted(rows)]


def test_two_sided_square_is_one_pair(spec, cfg):
    die = die_outline(spec, 1.0)
    layout = place_two_sided(spec, die, cfg)
    rows = _rows(layout, _spm_ids(spec))
    assert [len(r) for r in rows] == [16, 16]
    top = rows[1]
    assert all(m.rect.y2 == pytest.approx(die.height_um - cfg.halo_um) for m in top)
    assert max(m.rect.x2 for m in top) == pytest.approx(die.width_um - cfg.halo_um)


def test_two_sided_narrow_die_stacks_pairs(spec, cfg):
    layout = place_two_sided(spec, die_outline(spec, 0.4), cfg)
    rows = _rows(layout, _spm_ids(spec))
    assert [len(r) for r in rows] == [11, 5, 5, 11]


def test_two_sided_block_shallower_than_one_sided(spec, cfg):
    # At Q=1 the edge rows trade depth for width against the packed block.
    die = die_outline(spec, 1.0)
    one = place_one_sided(spec, die, cfg)
    two = place_two_sided(spec, die, cfg)
    spm = _spm_ids(spec)
    depth_one = len(max(_columns(one, spm), key=len))
    depth_two = max(len(_columns(two, spm)[i]) for i in range(len(_columns(two, spm))))
    assert depth_two < depth_one
    width_one = len(_columns(one, spm))
    width_two = len(max(_rows(two, spm), key=len))
    assert width_two > width_one


def test_single_macro_spec_styles_agree(spec, cfg):
    lone = replace(spec, macros=(spec.macros[0],), nets=())
    die = die_outline(lone, 1.0)
    a = place_one_sided(lone, die, cfg)
    b = place_two_sided(lone, die, cfg)
    assert a.macros[0].rect == b.macros[0].rect


# --- u-shape generator -------------------------------------------------------


def test_ushape_heights_leading_columns():
    params = ushape_heights(16.0, 1.0, 64)
    assert params.column_heights[:3] == (16, 8, 5)


def test_ushape_heights_tiny_exponent_gives_flat_rows():
    params = ushape_heights(16.0, 1e-9, 32)
    assert set(params.column_heights) == {1}
    assert len(params.column_heights) == 16


def test_ushape_heights_unit_at_half_height():
    # the column at n == HH always rounds to a single row
    for hh in (3.0, 7.0, 12.0):
        params = ushape_heights(hh, 1.7, 2 * int(hh))
        n = int(hh)
        if len(params.column_heights) >= n:
            assert params.column_heights[n - 1] == 1


def test_ushape_heights_clamps_to_half_height():
    params = ushape_heights(4.0, 8.0, 24)
    assert params.column_heights[0] == 4


def test_ushape_heights_truncates_final_column():
    params = ushape_heights(16.0, 1.0, 40)  # budget 20: 16 + 4 of 8
    assert params.column_heights == (16, 4)


def test_ushape_heights_odd_count_raises():
    with pytest.raises(OddMacroCountError):
        ushape_heights(8.0, 1.0, 31)


def test_ushape_heights_tail_death_raises():
    # p large enough that column 2 rounds to zero while banks remain
    with pytest.raises(InfeasibleOutlineError):
        ushape_heights(2.0, 8.0, 12)


def test_select_zero_macros_returns_floor(spec, cfg):
    empty = replace(spec, macros=tuple(spec.icache_macros()), nets=())
    assert select_exponent_p(empty, die_outline(empty, 1.0), cfg) == P_MIN




def test_select_matches_grid_oracle_on_paper_aspects(spec, cfg, paper_dies):
    for q, die in paper_dies.items():
        got = select_exponent_p(spec, die, cfg)
        want = _oracle_select(spec, die, cfg)
        assert abs(got - want) <= 0.01, (q, got, want)


def test_select_matches_grid_oracle_on_random_configs(cfg):
    rng = random.Random(77002)
    base = default_manticore_cluster()
    checked = 0
    for _ in range(12):
        count = rng.randrange(4, 21) * 2
        banks = base.spm_macros()[: min(count, 32)]
        while len(banks) < count:
            k = len(banks)
            banks = banks + (replace(base.macros[0], id=f"extra{k}"),)
        variant = replace(
            base,
            macros=tuple(banks) + base.icache_macros(),
            nets=(),
            core_area_mm2=rng.uniform(0.6, 1.4),
        )
        die = die_outline(variant, rng.uniform(0.4, 2.5))
        want = _oracle_select(variant, die, cfg)
        if want is None:
            with pytest.raises(InfeasibleOutlineError):
                select_exponent_p(variant, die, cfg)
            continue
        got = select_exponent_p(variant, die, cfg)
        assert abs(got - want) <= 0.01
        checked += 1
    assert checked >= 6


def test_select_square_boundary_is_tail_death(spec, cfg):
    # At Q=1 the binding constraint is column 13 starving; the boundary has
    # a closed form the search must hit.
    die = die_outline(spec, 1.0)
    sh = SLOT_H
    hh = die.height_um / (2 * sh)
    expected = math.log(2.0) / math.log(13.0 / hh)
    assert select_exponent_p(spec, die, cfg) == pytest.approx(expected, abs=1e-9)


# --- u-shape placement -------------------------------------------------------


UPROFILES = {
    0.4: (7, 4, 2, 2, 1),
    1.0: (3, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1),
    2.5: (2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1),
}


@pytest.mark.parametrize("q", sorted(UPROFILES))
def test_u_shape_column_profiles(spec, cfg, q):
    die = die_outline(spec, q)
    layout = place_u_shape(spec, die, cfg)
    profile = UPROFILES[q]
    cols = _columns(layout, _spm_ids(spec))
    # right to left, each column split evenly between the halves
    assert [len(c) for c in reversed(cols)] == [2 * h for h in profile]
    mid = die.height_um / 2
    for c, col in enumerate(reversed(cols)):
        top = [m for m in col if m.rect.cy > mid]
        assert len(top) == profile[c]
        # arm flush against the top edge
        assert max(m.rect.y2 for m in top) == pytest.approx(die.height_um - cfg.halo_um)


def test_u_shape_top_half_fills_first(spec, cfg):
    die = die_outline(spec, 1.0)
    layout = place_u_shape(spec, die, cfg)
    mid = die.height_um / 2
    spm = [m for m in layout.macros if m.macro_id in _spm_ids(spec)]
    assert all(m.rect.cy > mid for m in spm[:16])
    assert all(m.rect.cy < mid for m in spm[16:])
    # first slot is the top of the rightmost column
    assert spm[0].rect.x2 == pytest.approx(die.width_um - cfg.halo_um)
    assert spm[0].rect.y2 == pytest.approx(die.height_um - cfg.halo_um)


def test_u_shape_keeps_central_channel_open(spec, cfg):
    # The cavity between the arms must exist at Q=1 (the budget runs out
    # before any column can span the full height).
    die = die_outline(spec, 1.0)
    layout = place_u_shape(spec, die, cfg)
    mid = die.height_um / 2
    spm = [m for m in layout.macros if m.macro_id in _spm_ids(spec)]
    gap = min(
        min(m.rect.y - mid for m in spm if m.rect.cy > mid),
        min(mid - m.rect.y2 for m in spm if m.rect.cy < mid),
    )
    assert gap > 0


def test_u_shape_odd_bank_count_raises(spec, cfg):
    odd = replace(spec, macros=spec.macros[:31] + spec.icache_macros(), nets=())
    with pytest.raises(OddMacroCountError):
        place_u_shape(odd, die_outline(odd, 1.0), cfg)


def test_generate_layout_rejects_unknown_style(spec, cfg):
    with pytest.raises(ValueError):
        generate_layout(spec, die_outline(spec, 1.0), "diagonal", cfg)
