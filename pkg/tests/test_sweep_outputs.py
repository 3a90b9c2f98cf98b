import json
import math
import xml.etree.ElementTree as ET

import pytest

from thzcap.config import parse_config
from thzcap.errors import ParseError, ValidationError
from thzcap.output import CSV_COLUMNS, csv_text, emit_outputs, svg_text
from thzcap.sweep import SweepSpec, apply_variable, parse_grid, parse_values, replay, run_sweep

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture(scope="module")
def fig1_sweep():
    sc = parse_config("fig1")
    spec = SweepSpec("sigma_s", parse_grid("0.01:0.1:10"), "mu", (1.0, 4.0))
    return run_sweep(sc, spec, n_samples=20_000, seed=0, evaluator="both")


def test_grid_and_values():
    assert parse_grid("0:1:5") == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert parse_values("1, 2.5,4") == (1.0, 2.5, 4.0)
    with pytest.raises(ValidationError):
        parse_grid("0:1:1")
    with pytest.raises(ParseError):
        parse_grid("0:1")
    with pytest.raises(ParseError):
        parse_values("a,b")


def test_spec_validation():
    with pytest.raises(ValidationError):
        SweepSpec("temperature", (1.0,))
    with pytest.raises(ValidationError):
        SweepSpec("sigma_s", ())
    with pytest.raises(ValidationError, match="distinct"):
        SweepSpec("sigma_s", (0.01,), "mu", (1.0, 1.0))


def test_apply_variable():
    sc = parse_config("fig1")
    assert apply_variable(sc, "k_tr", 0.1).impairments.k_t == 0.1
    assert apply_variable(sc, "k_tr", 0.1).impairments.k_r == 0.1
    assert apply_variable(sc, "frequency", 300.0).geometry.frequency == 300e9
    assert apply_variable(sc, "distance", 5.0).geometry.distance == 5.0
    assert apply_variable(sc, "mu", 1.0).fading.mu == 1.0
    assert apply_variable(sc, "p_over_n0_db", 3.0).budget.p_over_n0_db == 3.0
    assert apply_variable(sc, "sigma_s", 0.2).misalignment.jitter_sigma == 0.2


def test_row_count_and_order(fig1_sweep):
    rows = fig1_sweep.rows
    assert len(rows) == 20
    assert [r.series_value for r in rows] == [1.0] * 10 + [4.0] * 10
    assert [r.sweep_value for r in rows[:10]] == list(parse_grid("0.01:0.1:10"))
    assert len(set(r.point_seed for r in rows)) == 20
    assert fig1_sweep.exit_code == 0


def test_both_evaluators_agree(fig1_sweep):
    for r in fig1_sweep.rows:
        assert abs(r.capacity - r.quadrature) <= 3 * r.std_error


def test_sigma_trend_mu4(fig1_sweep):
    mu4 = [r for r in fig1_sweep.rows if r.series_value == 4.0]
    assert mu4[0].quadrature > mu4[-1].quadrature


def test_failed_point_is_reported():
    sc = parse_config("fig1")
    res = run_sweep(sc, SweepSpec("sigma_s", (0.02, -0.01)), n_samples=1000, evaluator="mc")
    assert not res.rows[0].failed
    assert res.rows[1].failed and "jitter_sigma" in res.rows[1].error
    assert math.isnan(res.rows[1].capacity)
    assert res.exit_code == 1


def test_csv_layout(fig1_sweep):
    text = csv_text(fig1_sweep.rows)
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 21
    first = lines[1].split(",")
    assert first[0] == "mu" and first[2] == "sigma_s" and first[-1] == "both"


def test_csv_row_count_without_series():
    sc = parse_config("fig2")
    res = run_sweep(sc, SweepSpec("k_tr", (0.0, 0.1, 0.2)), evaluator="quadrature")
    assert len(csv_text(res.rows).splitlines()) == 1 + 3
    assert all(r.n_samples == 0 and r.std_error == 0.0 for r in res.rows)


def test_svg_polylines_and_legend(fig1_sweep):
    root = ET.fromstring(svg_text(fig1_sweep))
    lines = root.findall(f".//{SVG}polyline")
    assert len(lines) == 2
    assert all(len(pl.get("points").split()) == 10 for pl in lines)
    legend = root.find(f".//{SVG}g[@class='legend']")
    labels = [t.text for t in legend.findall(f"{SVG}text")]
    assert labels == ["mu = 1", "mu = 4"]
    texts = [t.text for t in root.iter(f"{SVG}text")]
    assert "sigma_s [m]" in texts and "Ergodic capacity [bit/s/Hz]" in texts


def test_emit_and_replay_byte_identical(tmp_path):
    sc = parse_config("fig2")
    spec = SweepSpec("k_tr", (0.0, 0.1, 0.2), "sigma_s", (0.01, 0.05))
    first = run_sweep(sc, spec, n_samples=70_000, seed=9)
    emit_outputs(first, tmp_path / "a")
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["point_seeds"] == [r.point_seed for r in first.rows]
    assert manifest["scenario"]["frequency_ghz"] == 300.0
    for workers in (1, 8):
        again = replay(manifest, workers=workers)
        out = tmp_path / f"w{workers}"
        emit_outputs(again, out)
        for name in ("results.csv", "results.json"):
            assert (out / name).read_bytes() == (tmp_path / "a" / name).read_bytes()


def test_emit_rejects_empty_and_unwritable(tmp_path, fig1_sweep):
    from thzcap.sweep import SweepResult

    with pytest.raises(ValueError):
        emit_outputs(SweepResult([]), tmp_path)
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        emit_outputs(fig1_sweep, blocker / "sub")
