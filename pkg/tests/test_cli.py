import json

import pytest

from softtile.cli import cli_main
from softtile.serialize import layout_digest, load_layout
from softtile.sweep import CSV_HEADER
from softtile.tiler import TopLevelTemplate, dump_template


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """One generate + one paper-grid sweep, shared by the read-only tests."""
    root = tmp_path_factory.mktemp("cli")
    rc = cli_main(
        ["generate", "--style", "u-shape", "--q", "1.0", "--spec", "default",
         "--out", str(root / "fp.json"), "--svg", str(root / "fp.svg")]
    )
    assert rc == 0
    rc = cli_main(["sweep", "--styles", "all", "--grid", "paper", "--out", str(root / "db.csv")])
    assert rc == 0
    return root


# --- generate -----------------------------------------------------------


def test_generate_writes_layout_and_svg(workdir):
    layout = load_layout(workdir / "fp.json")
    assert len(layout.macros) == 36
    assert layout.style == "u-shape"
    assert layout.regions  # legalized regions ship with the layout
    svg = (workdir / "fp.svg").read_text()
    assert svg.startswith("<?xml") and svg.count('fill="#000000"') == 36


def test_generate_prints_digest(workdir, capsys):
    rc = cli_main(["generate", "--style", "u-shape", "--q", "1.0"])
    assert rc == 0
    digest = capsys.readouterr().out.strip()
    assert digest == layout_digest(load_layout(workdir / "fp.json"))


def test_generate_infeasible_aspect(capsys):
    rc = cli_main(["generate", "--style", "2-sided", "--q", "0.1"])
    assert rc == 2
    err = capsys.readouterr().err
    assert err.startswith("error[infeasible]: ")
    assert err.count("\n") == 1


def test_generate_usage_errors(capsys):
    assert cli_main(["generate", "--style", "diagonal", "--q", "1"]) == 1
    assert capsys.readouterr().err.startswith("error[usage]: ")
    assert cli_main(["generate", "--q", "1"]) == 1  # --style required
    assert cli_main([]) == 1  # subcommand required
    assert cli_main(["unknown-command"]) == 1


# --- sweep --------------------------------------------------------------


def test_sweep_csv_shape_and_digest_lines(workdir, capsys):
    lines = (workdir / "db.csv").read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 10


def test_sweep_json_output(tmp_path, capsys):
    out = tmp_path / "one.json"
    rc = cli_main(["sweep", "--styles", "u-shape", "--grid", "1.0", "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["schema_version"] == 1 and len(doc["records"]) == 1
    stdout = capsys.readouterr().out
    assert stdout.startswith("u-shape@1 ")


def test_sweep_rejects_bad_thread_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("FLOORPLAN_THREADS", "zero")
    rc = cli_main(["sweep", "--grid", "1.0", "--out", str(tmp_path / "db.csv")])
    assert rc == 1
    assert "FLOORPLAN_THREADS" in capsys.readouterr().err


def test_sweep_byte_identical_across_thread_counts(tmp_path, monkeypatch, capsys):
    outs = []
    for n in ("1", "2"):
        monkeypatch.setenv("FLOORPLAN_THREADS", n)
        out = tmp_path / f"db-{n}.csv"
        assert cli_main(["sweep", "--styles", "u-shape,1-sided", "--grid", "0.4,1.0", "--out", str(out)]) == 0
        outs.append((out.read_bytes(), capsys.readouterr().out))
    assert outs[0] == outs[1]


# --- tile ---------------------------------------------------------------


def test_tile_builtin_template(workdir, tmp_path, capsys):
    svg = tmp_path / "plan.svg"
    rc = cli_main(["tile", "--template", "tall", "--db", str(workdir / "db.csv"), "--svg", str(svg)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "template: tall" in out and "u-shape" in out and "utilization:" in out
    assert svg.read_text().count("<text") == 1


def test_tile_template_file(workdir, tmp_path, capsys):
    path = tmp_path / "custom.json"
    path.write_text(dump_template(TopLevelTemplate("custom", 4, 2, 1.0, channel_um=0.0)))
    rc = cli_main(["tile", "--template", str(path), "--db", str(workdir / "db.csv")])
    assert rc == 0
    assert "template: custom" in capsys.readouterr().out


def test_tile_frequency_floor_infeasible(workdir, capsys):
    rc = cli_main(["tile", "--template", "tall", "--db", str(workdir / "db.csv"), "--min-freq", "5000"])
    assert rc == 2
    assert capsys.readouterr().err.startswith("error[infeasible]: minimum frequency 5000 MHz")


def test_tile_unreadable_template(workdir, capsys):
    rc = cli_main(["tile", "--template", "hexagon", "--db", str(workdir / "db.csv")])
    assert rc == 1
    assert "cannot read template" in capsys.readouterr().err


# --- compare ------------------------------------------------------------


def test_compare_reports_orderings_and_gaps(workdir, capsys):
    rc = cli_main(["compare", "--db", str(workdir / "db.csv")])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.count("PASS ") == 6 and "FAIL" not in out
    assert out.count("freq-gap ") == 9
    assert "freq-gap 1-sided@0.4: +0.00%" in out


def test_compare_rejects_incomplete_db(tmp_path, capsys):
    out = tmp_path / "partial.json"
    assert cli_main(["sweep", "--styles", "u-shape", "--grid", "1.0", "--out", str(out)]) == 0
    capsys.readouterr()
    rc = cli_main(["compare", "--db", str(out)])
    assert rc == 1
    assert "error[usage]: " in capsys.readouterr().err


# --- render -------------------------------------------------------------


@pytest.mark.parametrize("target", ["layout", "density", "congestion"])
def test_render_targets_from_saved_layout(workdir, tmp_path, target):
    out = tmp_path / f"{target}.svg"
    rc = cli_main(["render", "--in", str(workdir / "fp.json"), "--target", target, "--out", str(out)])
    assert rc == 0
    assert out.read_text().startswith("<?xml")


def test_render_is_deterministic(workdir, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for out in (a, b):
        assert cli_main(["render", "--in", str(workdir / "fp.json"), "--target", "density", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_render_mismatched_target(workdir, tmp_path, capsys):
    rc = cli_main(["render", "--in", str(workdir / "fp.json"), "--target", "toplevel", "--out", str(tmp_path / "x.svg")])
    assert rc == 1
    assert "error[usage]: " in capsys.readouterr().err


def test_render_corrupt_layout(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    rc = cli_main(["render", "--in", str(bad), "--out", str(tmp_path / "x.svg")])
    assert rc == 1
    assert "bad.json" in capsys.readouterr().err


# --- config -------------------------------------------------------------


def test_config_overrides_apply(workdir, tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"congestion_bin_um": 40.0}))
    coarse, fine = tmp_path / "coarse.svg", tmp_path / "fine.svg"
    src = str(workdir / "fp.json")
    assert cli_main(["render", "--in", src, "--target", "congestion", "--out", str(fine)]) == 0
    assert cli_main(["render", "--in", src, "--target", "congestion", "--out", str(coarse), "--config", str(cfgfile)]) == 0
    # quadrupled bin area -> roughly a quarter of the bin rects
    assert coarse.read_text().count("<rect") < fine.read_text().count("<rect")


def test_config_unknown_key_rejected(tmp_path, capsys):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"track_pitch": 1.0}))
    rc = cli_main(["generate", "--style", "u-shape", "--q", "1.0", "--config", str(cfgfile)])
    assert rc == 1
    assert "unknown config keys" in capsys.readouterr().err


def test_help_exits_zero(capsys):
    assert cli_main(["--help"]) == 0
    assert "generate" in capsys.readouterr().out
    assert cli_main(["sweep", "--help"]) == 0
    assert "--grid" in capsys.readouterr().out
