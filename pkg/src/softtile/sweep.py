"""Style × aspect-ratio characterization sweeps.

A sweep runs every requested placement style over a grid of aspect ratios,
assesses each placed instance, and collects the results into a keyed
database that downstream consumers (top-level tiling, reports, the CLI)
query instead of re-placing tiles. Geometric failures are recorded as
infeasible entries, not raised: the sweep is a survey of the design space
and a style that cannot build a given outline is a data point.
"""

from __future__ import annotations

import csv
import enum
import hashlib
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

from .cluster import ClusterSpec, die_outline, dump_spec, validate
from .config import FloorplanConfig
from .errors import InfeasibleError, SpecError
from .placer import legalize_regions, quadratic_centroids
from .qor import CalibrationParams, QorEstimate, assess, calibrate
from .serialize import layout_digest
from .styles import STYLE_NAMES, generate_layout

__all__ = [
    "Metric",
    "CharacterizationRecord",
    "SweepMeta",
    "CharacterizationDB",
    "ANCHOR_POINTS",
    "reference_calibration",
    "default_q_grid",
    "sweep",
    "best_per_aspect",
    "export_db",
    "import_db",
    "CSV_HEADER",
]

CSV_HEADER = (
    "style,q,est_freq_mhz,est_wl_m,overflow_bins,overflow_total,"
    "mean_density,peak_density,feasible,layout_digest"
)

# Post-route operating points of two routed reference instances of the
# built-in cluster, used to pin the two-parameter delay model. The same
# numbers appear in the bundled reference results table; a test keeps the
# copies in sync.
ANCHOR_POINTS = (("u-shape", 1.0, 940.7), ("1-sided", 0.4, 888.8))


class Metric(str, enum.Enum):
    FREQUENCY = "frequency"  # argmax
    WIRELENGTH = "wirelength"  # argmin
    OVERFLOW = "overflow"  # argmin


@dataclass(frozen=True)
class CharacterizationRecord:
    """One sweep instance. estimate and layout_digest are None when the
    style could not build the outline at all (geometric infeasibility)."""

    style: str
    q: float
    estimate: QorEstimate | None
    layout_digest: str | None

    @property
    def feasible(self) -> bool:
        return self.estimate is not None and self.estimate.feasible


@dataclass(frozen=True)
class SweepMeta:
    styles: tuple[str, ...]
    q_grid: tuple[float, ...]
    config_digest: str
    spec_digest: str


@dataclass
class CharacterizationDB:
    records: dict[tuple[str, float], CharacterizationRecord]
    meta: SweepMeta

    def get(self, style: str, q: float) -> CharacterizationRecord:
        return self.records[(style, float(q))]


def default_q_grid() -> tuple[float, ...]:
    """21 aspect ratios, geometrically spaced over [0.4, 2.5].

    Geometric spacing treats wide and tall outlines symmetrically (the grid
    maps onto itself under Q -> 1/Q up to float noise) and lands exactly on
    0.4, 1.0 and 2.5, the three reference aspect ratios.
    """
    grid = [0.4 * 6.25 ** (k / 20.0) for k in range(21)]
    grid[0], grid[10], grid[20] = 0.4, 1.0, 2.5
    return tuple(grid)


def reference_calibration(spec: ClusterSpec, cfg: FloorplanConfig | None = None) -> CalibrationParams:
    """Delay model fitted to the two bundled reference operating points."""
    cfg = cfg or FloorplanConfig()
    anchors = []
    for style, q, mhz in ANCHOR_POINTS:
        layout = generate_layout(spec, die_outline(spec, q), style, cfg)
        anchors.append((layout, mhz))
    return calibrate(spec, anchors)


def _thread_cap(task_count: int) -> int:
    raw = os.environ.get("FLOORPLAN_THREADS")
    if raw is None or raw.strip() == "":
        workers = os.cpu_count() or 1
    else:
        try:
            workers = int(raw)
        except ValueError:
            raise ValueError(
                f"FLOORPLAN_THREADS must be a positive integer, got {raw!r}"
            ) from None
        if workers < 1:
            raise ValueError(f"FLOORPLAN_THREADS must be a positive integer, got {raw!r}")
    return max(1, min(task_count, workers))


def _config_digest(cfg: FloorplanConfig) -> str:
    blob = json.dumps(asdict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _spec_digest(spec: ClusterSpec) -> str:
    return hashlib.sha256(dump_spec(spec).encode("utf-8")).hexdigest()


def _evaluate(
    spec: ClusterSpec,
    cfg: FloorplanConfig,
    cal: CalibrationParams,
    style: str,
    q: float,
) -> CharacterizationRecord:
    try:
        layout = generate_layout(spec, die_outline(spec, q), style, cfg)
        centroids = quadratic_centroids(spec, layout, cfg.solver_rtol, cfg.solver_max_iters)
        regions = legalize_regions(centroids, layout, spec)
    except InfeasibleError:
        return CharacterizationRecord(style, q, None, None)
    est = assess(spec, layout, regions, centroids, cal, cfg)
    return CharacterizationRecord(style, q, est, layout_digest(layout))


def sweep(
    spec: ClusterSpec,
    styles=None,
    q_grid=None,
    cfg: FloorplanConfig | None = None,
    cal: CalibrationParams | None = None,
) -> CharacterizationDB:
    """Characterize every style at every grid aspect ratio.

    Instances are independent, so they may be evaluated on FLOORPLAN_THREADS
    worker threads; the database is assembled in sorted (style, Q) order
    afterwards, making the result identical regardless of scheduling.
    """
    cfg = cfg or FloorplanConfig()
    style_list = tuple(dict.fromkeys(styles)) if styles is not None else STYLE_NAMES
    grid_raw = default_q_grid() if q_grid is None else tuple(q_grid)
    if not grid_raw:
        raise ValueError("q grid must not be empty")
    if any(not q > 0 for q in grid_raw):
        raise ValueError("q grid values must be positive")
    violations = validate(spec)
    if violations:
        raise SpecError("; ".join(violations))
    grid = tuple(sorted(dict.fromkeys(float(q) for q in grid_raw)))
    if cal is None:
        cal = reference_calibration(spec, cfg)

    tasks = sorted((s, q) for s in set(style_list) for q in grid)
    workers = _thread_cap(len(tasks))
    if workers == 1:
        results = [_evaluate(spec, cfg, cal, s, q) for s, q in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda t: _evaluate(spec, cfg, cal, *t), tasks))
    records = {(r.style, r.q): r for r in results}
    meta = SweepMeta(
        styles=tuple(sorted(set(style_list))),
        q_grid=grid,
        config_digest=_config_digest(cfg),
        spec_digest=_spec_digest(spec),
    )
    return CharacterizationDB(records, meta)


def best_per_aspect(db: CharacterizationDB, metric) -> dict[float, tuple[str, CharacterizationRecord]]:
    """Winning (style, record) per aspect ratio among feasible records.

    Frequency is maximized; wirelength and overflow are minimized. Ties fall
    to the lexicographically first style. Aspect ratios with no feasible
    record are left out.
    """
    if not db.records:
        raise ValueError("empty characterization db")
    metric = Metric(metric)

    def sort_key(rec: CharacterizationRecord):
        est = rec.estimate
        if metric is Metric.FREQUENCY:
            return (-est.est_freq_mhz, rec.style)
        if metric is Metric.WIRELENGTH:
            return (est.est_wl_m, rec.style)
        return (est.overflow_bins, rec.style)

    out: dict[float, tuple[str, CharacterizationRecord]] = {}
    for q in sorted({q for _, q in db.records}):
        candidates = [r for (s, rq), r in db.records.items() if rq == q and r.feasible]
        if not candidates:
            continue
        winner = min(candidates, key=sort_key)
        out[q] = (winner.style, winner)
    return out


def _fmt(value) -> str:
    return f"{value:.4g}"


def export_db(db: CharacterizationDB, fmt: str) -> str:
    """CSV report (4 significant digits) or exact JSON document."""
    order = sorted(db.records)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER.split(","))
        for key in order:
            rec = db.records[key]
            est = rec.estimate
            if est is None:
                metrics = [""] * 6
            else:
                metrics = [
                    _fmt(est.est_freq_mhz),
                    _fmt(est.est_wl_m),
                    _fmt(est.overflow_bins),
                    _fmt(est.overflow_total),
                    _fmt(est.mean_density),
                    _fmt(est.peak_density),
                ]
            writer.writerow(
                [rec.style, _fmt(rec.q)]
                + metrics
                + ["true" if rec.feasible else "false", rec.layout_digest or ""]
            )
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "schema_version": 1,
            "meta": {
                "styles": list(db.meta.styles),
                "q_grid": list(db.meta.q_grid),
                "config_digest": db.meta.config_digest,
                "spec_digest": db.meta.spec_digest,
            },
            "records": [
                {
                    "style": db.records[key].style,
                    "q": db.records[key].q,
                    "layout_digest": db.records[key].layout_digest,
                    "estimate": None
                    if db.records[key].estimate is None
                    else asdict(db.records[key].estimate),
                }
                for key in order
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    raise ValueError(f"unknown export format {fmt!r}; expected 'csv' or 'json'")


def _record_from_row(row: list[str]) -> CharacterizationRecord:
    style, q = row[0], float(row[1])
    if row[2] == "":
        return CharacterizationRecord(style, q, None, None)
    est = QorEstimate(
        style=style,
        q=q,
        est_freq_mhz=float(row[2]),
        est_wl_m=float(row[3]),
        overflow_bins=int(float(row[4])),
        overflow_total=float(row[5]),
        mean_density=float(row[6]),
        peak_density=float(row[7]),
        feasible=row[8] == "true",
    )
    return CharacterizationRecord(style, q, est, row[9] or None)


def import_db(text: str, fmt: str) -> CharacterizationDB:
    """Inverse of export_db. JSON is exact; CSV carries only the report's
    rounded values and no sweep metadata."""
    if fmt == "csv":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != CSV_HEADER.split(","):
            raise ValueError("unrecognized characterization CSV header")
        records = {}
        for row in rows[1:]:
            if len(row) != 10:
                raise ValueError(f"expected 10 columns, got {len(row)}: {row!r}")
            rec = _record_from_row(row)
            records[(rec.style, rec.q)] = rec
        meta = SweepMeta(
            styles=tuple(sorted({s for s, _ in records})),
            q_grid=tuple(sorted({q for _, q in records})),
            config_digest="",
            spec_digest="",
        )
        return CharacterizationDB(records, meta)
    if fmt == "json":
        doc = json.loads(text)
        meta_doc = doc["meta"]
        records = {}
        for r in doc["records"]:
            est = None if r["estimate"] is None else QorEstimate(**r["estimate"])
            rec = CharacterizationRecord(r["style"], float(r["q"]), est, r["layout_digest"])
            records[(rec.style, rec.q)] = rec
        meta = SweepMeta(
            styles=tuple(meta_doc["styles"]),
            q_grid=tuple(float(q) for q in meta_doc["q_grid"]),
            config_digest=meta_doc["config_digest"],
            spec_digest=meta_doc["spec_digest"],
        )
        return CharacterizationDB(records, meta)
    raise ValueError(f"unknown import format {fmt!r}; expected 'csv' or 'json'")
