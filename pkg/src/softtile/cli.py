"""Command-line front end.

Five subcommands: generate one floorplan, sweep the style/aspect space,
tile a die from a characterization database, compare a database against
the published reference orderings, and render saved artifacts as SVG.

Exit codes: 0 success, 1 usage error, 2 infeasible request, 3 internal
error. Every failure prints a single `error[<code>]: message` line to
stderr. All outputs go to user-named files and are byte-deterministic for
identical inputs; the only environment variable honored is
FLOORPLAN_THREADS.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .cluster import default_manticore_cluster, die_outline, load_spec
from .config import FloorplanConfig, load_config
from .errors import (
    IncompleteDbError,
    InfeasibleError,
    LayoutParseError,
    MissingCharacterizationError,
    NotInReferenceError,
    SpecError,
    UnresolvedEndpointError,
)
from .geometry import FloorplanLayout
from .placer import density_map, legalize_regions, quadratic_centroids
from .qor import default_capacity_per_bin, expected_congestion
from .refdata import ordering_report, paper_records
from .render import COLOR_SCALES, RENDER_TARGETS, RenderSpec, render_svg
from .serialize import layout_digest, load_layout, save_layout
from .styles import STYLE_NAMES, generate_layout
from .sweep import default_q_grid, export_db, import_db, sweep
from .tiler import PlanConstraints, builtin_templates, default_quadrant, evaluate_plan, load_template

__all__ = ["cli_main", "main"]

PAPER_GRID = (0.4, 1.0, 2.5)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _read_text(path: str, what: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot read {what} {path}: {exc}") from exc


def _write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot write {path}: {exc}") from exc


def _cluster_spec(value: str):
    if value == "default":
        return default_manticore_cluster()
    return load_spec(_read_text(value, "spec"))


def _load_db(path: str):
    fmt = "json" if path.endswith(".json") else "csv"
    return import_db(_read_text(path, "characterization db"), fmt)


def _parse_grid(value: str):
    if value == "paper":
        return PAPER_GRID
    if value == "default":
        return default_q_grid()
    try:
        return tuple(float(tok) for tok in value.split(","))
    except ValueError:
        raise _UsageError(f"grid must be 'paper', 'default', or comma-separated numbers, got {value!r}") from None


def _parse_styles(value: str):
    if value == "all":
        return None
    styles = tuple(tok.strip() for tok in value.split(","))
    for s in styles:
        if s not in STYLE_NAMES:
            raise _UsageError(f"unknown style {s!r}; choose from {', '.join(STYLE_NAMES)}")
    return styles


def _cmd_generate(args, cfg: FloorplanConfig) -> int:
    spec = _cluster_spec(args.spec)
    die = die_outline(spec, args.q)
    layout = generate_layout(spec, die, args.style, cfg)
    sol = quadratic_centroids(spec, layout, cfg.solver_rtol, cfg.solver_max_iters)
    regions = legalize_regions(sol, layout, spec)
    full = FloorplanLayout(layout.die, layout.macros, layout.io_pins, layout.style, layout.halo_um, regions)
    if args.out:
        save_layout(full, args.out)
    if args.svg:
        _write_text(args.svg, render_svg(full, RenderSpec(target="layout")))
    print(layout_digest(full))
    return 0


def _cmd_sweep(args, cfg: FloorplanConfig) -> int:
    spec = _cluster_spec(args.spec)
    db = sweep(spec, styles=_parse_styles(args.styles), q_grid=_parse_grid(args.grid), cfg=cfg)
    fmt = "json" if args.out.endswith(".json") else "csv"
    _write_text(args.out, export_db(db, fmt))
    for (style, q), rec in sorted(db.records.items()):
        print(f"{style}@{q:g} {rec.layout_digest or '-'}")
    return 0


def _template(value: str):
    builtin = {t.name: t for t in builtin_templates()}
    if value in builtin:
        return builtin[value]
    try:
        return load_template(_read_text(value, "template"))
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc


def _cmd_tile(args, cfg: FloorplanConfig) -> int:
    template = _template(args.template)
    db = _load_db(args.db)
    cons = PlanConstraints(min_freq_mhz=args.min_freq)
    quadrant = default_quadrant(
        tile_area_um2=cons.tile_area_mm2 * 1e6,
        cache_frac=template.cache_frac,
        channel_um=template.channel_um,
    )
    plan = evaluate_plan(template, quadrant, db, cons)
    if not plan.accepted:
        raise InfeasibleError(plan.reason)
    if args.svg:
        _write_text(args.svg, render_svg(plan, RenderSpec(target="toplevel")))
    rec = plan.selected_record
    print(f"template: {plan.template_name}")
    print(f"tile: {plan.selected_style} Q={plan.demanded_q:g} ({rec.estimate.est_freq_mhz:.4g} MHz)")
    print(f"die-mm: {plan.die.w / 1000:.4g} x {plan.die.h / 1000:.4g}")
    print(f"utilization: {plan.utilization:.6f}")
    return 0


def _cmd_compare(args, cfg: FloorplanConfig) -> int:
    db = _load_db(args.db)
    report = ordering_report(db)
    print(report.summary())
    for ref in paper_records():
        rec = db.records[(ref.style, ref.q)]
        gap = 100.0 * (rec.estimate.est_freq_mhz - ref.freq_mhz) / ref.freq_mhz
        print(f"freq-gap {ref.style}@{ref.q:g}: {gap:+.2f}% of {ref.freq_mhz:g} MHz")
    return 0


def _cmd_render(args, cfg: FloorplanConfig) -> int:
    layout = load_layout(args.input)
    rspec = RenderSpec(target=args.target, color_scale=args.color_scale, scale_um_per_px=args.scale)
    if args.target == "density":
        spec = _cluster_spec(args.spec)
        subject = density_map(layout.regions, layout, cfg.density_bin_um, spec.target_utilization)
    elif args.target == "congestion":
        spec = _cluster_spec(args.spec)
        subject = expected_congestion(
            spec,
            layout,
            layout.regions,
            cfg.congestion_bin_um,
            default_capacity_per_bin(cfg.congestion_bin_um, cfg.tracks_per_um),
            cfg.horizontal_track_share,
        )
    else:
        # "toplevel" falls through with the layout and fails the type check:
        # plans are not serialized, `tile --svg` draws them
        subject = layout
    _write_text(args.out, render_svg(subject, rspec))
    return 0


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file of floorplan config overrides")

    parser = _Parser(prog="softtile", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", parents=[common], help="place macros and regions for one style/aspect")
    gen.add_argument("--style", required=True, choices=STYLE_NAMES)
    gen.add_argument("--q", required=True, type=float, help="die aspect ratio width/height")
    gen.add_argument("--spec", default="default", help="'default' or a cluster spec JSON file")
    gen.add_argument("--out", help="layout JSON output")
    gen.add_argument("--svg", help="layout SVG output")
    gen.set_defaults(func=_cmd_generate)

    swp = sub.add_parser("sweep", parents=[common], help="characterize styles across aspect ratios")
    swp.add_argument("--styles", default="all", help="'all' or comma-separated style names")
    swp.add_argument("--grid", default="default", help="'paper', 'default', or comma-separated aspect ratios")
    swp.add_argument("--spec", default="default", help="'default' or a cluster spec JSON file")
    swp.add_argument("--out", required=True, help="database output (.json for exact, else CSV)")
    swp.set_defaults(func=_cmd_sweep)

    til = sub.add_parser("tile", parents=[common], help="compose a die plan from a characterization db")
    til.add_argument("--template", required=True, help="wide, square, tall, or a template JSON file")
    til.add_argument("--db", required=True, help="characterization database (.json or .csv)")
    til.add_argument("--min-freq", type=float, default=0.0, help="reject tiles estimated below this MHz")
    til.add_argument("--svg", help="plan SVG output")
    til.set_defaults(func=_cmd_tile)

    cmp_ = sub.add_parser("compare", parents=[common], help="check a db against the published orderings")
    cmp_.add_argument("--db", required=True, help="characterization database (.json or .csv)")
    cmp_.set_defaults(func=_cmd_compare)

    ren = sub.add_parser("render", parents=[common], help="draw a saved layout or its maps as SVG")
    ren.add_argument("--in", dest="input", required=True, help="layout JSON file")
    ren.add_argument("--target", default="layout", choices=RENDER_TARGETS)
    ren.add_argument("--color-scale", default="linear", choices=COLOR_SCALES)
    ren.add_argument("--scale", type=float, default=2.0, help="micrometers per pixel")
    ren.add_argument("--spec", default="default", help="'default' or a cluster spec JSON file")
    ren.add_argument("--out", required=True, help="SVG output")
    ren.set_defaults(func=_cmd_render)

    return parser


def _fail(code_name: str, exc: BaseException, code: int) -> int:
    message = " ".join(str(exc).split()) or exc.__class__.__name__
    print(f"error[{code_name}]: {message}", file=sys.stderr)
    return code


def cli_main(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        return _fail("usage", exc, 1)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config) if args.config else FloorplanConfig()
        return args.func(args, cfg)
    except (InfeasibleError, MissingCharacterizationError) as exc:
        return _fail("infeasible", exc, 2)
    except (
        _UsageError,
        SpecError,
        LayoutParseError,
        NotInReferenceError,
        IncompleteDbError,
        UnresolvedEndpointError,
        ValueError,
    ) as exc:
        return _fail("usage", exc, 1)
    except Exception as exc:  # pragma: no cover - defensive
        return _fail("internal", exc, 3)


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))
