"""Floorplan generation and QoR estimation for soft processor-cluster tiles.

The pipeline, in dependency order: a cluster spec (`cluster`) is placed in
a fixed outline by a macro placement style (`styles`), soft modules get
centroids and legalized regions (`placer`), estimators score the result
(`qor`), a sweep characterizes every style across aspect ratios (`sweep`),
and the characterization database drives die-level composition (`tiler`).
`refdata` holds the published post-route reference results the estimators
are calibrated against; `serialize`, `render`, and `cli` are the artifact
plumbing.
"""

from .cluster import ClusterSpec, default_manticore_cluster, die_outline, load_spec, dump_spec
from .config import FloorplanConfig, load_config
from .errors import (
    CalibrationError,
    IncompleteDbError,
    InfeasibleError,
    LayoutParseError,
    MissingCharacterizationError,
    NotInReferenceError,
    SoftTileError,
    SpecError,
    UnresolvedEndpointError,
    VersionMismatchError,
)
from .geometry import DieOutline, FloorplanLayout, Rect
from .placer import density_map, legalize_regions, quadratic_centroids
from .qor import (
    CalibrationParams,
    QorEstimate,
    assess,
    calibrate,
    critical_path_length,
    estimate_wirelength,
    expected_congestion,
    expected_wirelength,
)
from .refdata import ordering_report, paper_db, paper_qor, paper_records, relative_gap
from .render import RenderSpec, render_svg
from .serialize import layout_digest, load_layout, save_layout
from .styles import STYLE_NAMES, generate_layout
from .sweep import CharacterizationDB, best_per_aspect, export_db, import_db, sweep
from .tiler import (
    PlanConstraints,
    QuadrantTemplate,
    TopLevelTemplate,
    builtin_templates,
    compose_quadrant,
    evaluate_plan,
    rank_plans,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ClusterSpec",
    "default_manticore_cluster",
    "die_outline",
    "load_spec",
    "dump_spec",
    "FloorplanConfig",
    "load_config",
    "SoftTileError",
    "SpecError",
    "InfeasibleError",
    "CalibrationError",
    "UnresolvedEndpointError",
    "LayoutParseError",
    "VersionMismatchError",
    "MissingCharacterizationError",
    "IncompleteDbError",
    "NotInReferenceError",
    "DieOutline",
    "FloorplanLayout",
    "Rect",
    "density_map",
    "legalize_regions",
    "quadratic_centroids",
    "CalibrationParams",
    "QorEstimate",
    "assess",
    "calibrate",
    "critical_path_length",
    "estimate_wirelength",
    "expected_congestion",
    "expected_wirelength",
    "ordering_report",
    "paper_db",
    "paper_qor",
    "paper_records",
    "relative_gap",
    "RenderSpec",
    "render_svg",
    "layout_digest",
    "load_layout",
    "save_layout",
    "STYLE_NAMES",
    "generate_layout",
    "CharacterizationDB",
    "best_per_aspect",
    "export_db",
    "import_db",
    "sweep",
    "PlanConstraints",
    "QuadrantTemplate",
    "TopLevelTemplate",
    "builtin_templates",
    "compose_quadrant",
    "evaluate_plan",
    "rank_plans",
]
