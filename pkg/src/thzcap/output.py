"""Writers for sweep results: CSV record, JSON results/manifest, SVG chart."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Sequence
from xml.sax.saxutils import escape

from .sweep import VARIABLES, SweepResult, SweepRow, series_of

CSV_COLUMNS = (
    "series_var",
    "series_value",
    "sweep_var",
    "sweep_value",
    "capacity_bps_hz",
    "std_error",
    "n_samples",
    "point_seed",
    "evaluator",
)
FORMATS = ("csv", "json", "svg")


def _num(x: float | None) -> str:
    if x is None:
        return ""
    return repr(float(x))


def csv_text(rows: Sequence[SweepRow]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        lines.append(",".join([
            r.series_var,
            _num(r.series_value),
            r.sweep_var,
            _num(r.sweep_value),
            _num(r.capacity),
            _num(r.std_error),
            str(r.n_samples),
            str(r.point_seed),
            r.evaluator,
        ]))
    return "\n".join(lines) + "\n"


def _json_float(x):
    if x is None or not math.isfinite(x):
        return None
    return x


def results_dict(result: SweepResult) -> dict[str, Any]:
    """Deterministic per-row results; excludes timing so replays compare byte-exact."""
    rows = []
    for r in result.rows:
        d = {
            "series_var": r.series_var or None,
            "series_value": r.series_value,
            "sweep_var": r.sweep_var,
            "sweep_value": r.sweep_value,
            "capacity_bps_hz": _json_float(r.capacity),
            "std_error": _json_float(r.std_error),
            "n_samples": r.n_samples,
            "point_seed": r.point_seed,
            "evaluator": r.evaluator,
            "status": "failed" if r.failed else "ok",
        }
        if r.quadrature is not None:
            d["quadrature_bps_hz"] = r.quadrature
            if math.isfinite(r.std_error) and r.std_error > 0:
                d["oracle_discrepancy_se"] = abs(r.capacity - r.quadrature) / r.std_error
        if r.failed:
            d["error"] = r.error
        rows.append(d)
    return {"rows": rows}


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")


def svg_text(result: SweepResult, width: int = 640, height: int = 420) -> str:
    """Line chart of capacity against the sweep variable, one polyline per series."""
    groups = series_of(result.rows)
    pts = [(r.sweep_value, r.capacity) for r in result.rows if math.isfinite(r.capacity)]
    xs = [p[0] for p in pts] or [0.0, 1.0]
    ys = [p[1] for p in pts] or [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    y_lo, y_hi = min(0.0, min(ys)), max(ys)
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    y_hi *= 1.05

    left, right, top, bottom = 70, 150, 20, 55
    pw, ph = width - left - right, height - top - bottom

    def sx(x):
        return left + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        return top + ph - (y - y_lo) / (y_hi - y_lo) * ph

    sweep_var = result.rows[0].sweep_var
    series_var = result.rows[0].series_var
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for t in _nice_ticks(x_lo, x_hi):
        if x_lo - 1e-12 <= t <= x_hi + 1e-12:
            x = sx(t)
            out.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 5}" stroke="black"/>')
            out.append(f'<text x="{x:.2f}" y="{top + ph + 18}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(y_lo, y_hi):
        if y_lo - 1e-12 <= t <= y_hi + 1e-12:
            y = sy(t)
            out.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
            out.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">{t:g}</text>')
    out.append(
        f'<text class="xlabel" x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle">'
        f'{escape(VARIABLES.get(sweep_var, sweep_var))}</text>'
    )
    out.append(
        f'<text class="ylabel" x="16" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">Ergodic capacity [bit/s/Hz]</text>'
    )

    lines, legend = [], ['<g class="legend">']
    for i, (sval, rows) in enumerate(groups.items()):
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(
            f"{sx(r.sweep_value):.2f},{sy(r.capacity):.2f}" for r in rows if math.isfinite(r.capacity)
        )
        label = "capacity" if sval is None else f"{series_var} = {sval:g}"
        lines.append(
            f'<polyline class="series" fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>'
        )
        ly = top + 10 + 18 * i
        lx = left + pw + 12
        legend.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        legend.append(f'<text x="{lx + 26}" y="{ly + 4}">{escape(label)}</text>')
    legend.append("</g>")
    out.extend(lines + legend)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_outputs(result: SweepResult, out_dir: str | Path, formats: Sequence[str] = FORMATS) -> list[Path]:
    """Write the requested formats into ``out_dir``; returns the written paths.

    ``json`` writes both ``results.json`` (deterministic) and ``manifest.json``.

    Raises:
        OSError: the destination is not writable.
        ValueError: empty table or unknown format.
    """
    if not result.rows:
        raise ValueError("nothing to write: empty result table")
    unknown = set(formats) - set(FORMATS)
    if unknown:
        raise ValueError(f"unknown output format(s): {', '.join(sorted(unknown))}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name, text):
        path = out_dir / name
        path.write_text(text, encoding="utf-8", newline="")
        written.append(path)

    if "csv" in formats:
        put("results.csv", csv_text(result.rows))
    if "json" in formats:
        put("results.json", _dump_json(results_dict(result)))
        put("manifest.json", _dump_json(result.manifest))
    if "svg" in formats:
        put("capacity.svg", svg_text(result))
    return written
