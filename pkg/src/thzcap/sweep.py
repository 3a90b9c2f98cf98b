"""Parameter sweeps over a base scenario, with replayable run manifests."""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

import numpy as np

from . import __version__
from .capacity import (
    DEFAULT_SAMPLES,
    PowerBudget,
    Scenario,
    capacity_quadrature,
    derive_seed,
    estimate_capacity_mc,
)
from .config import scenario_from_dict, scenario_to_dict, table_knots
from .errors import NumericalError, ParseError, ThzcapError, ValidationError
from .fading import AlphaMuParams

# variable name -> unit note for axis labels
VARIABLES = {
    "sigma_s": "sigma_s [m]",
    "k_tr": "k_tr",
    "mu": "mu",
    "distance": "distance [m]",
    "frequency": "frequency [GHz]",
    "p_over_n0_db": "P/N0 [dB]",
}
EVALUATORS = ("mc", "quadrature", "both")


def apply_variable(scenario: Scenario, name: str, value: float) -> Scenario:
    """Return ``scenario`` with one sweep variable set (frequency in GHz)."""
    if name == "sigma_s":
        return scenario.with_sigma_s(value)
    if name == "k_tr":
        return scenario.with_k_tr(value)
    if name == "mu":
        f = scenario.fading
        return replace(scenario, fading=AlphaMuParams(f.alpha, value, f.h_hat))
    if name == "distance":
        return replace(scenario, geometry=replace(scenario.geometry, distance=value))
    if name == "frequency":
        return replace(scenario, geometry=replace(scenario.geometry, frequency=value * 1e9))
    if name == "p_over_n0_db":
        return replace(scenario, budget=PowerBudget(value))
    raise ValidationError("variable", f"unknown sweep variable {name!r}")


def parse_grid(text: str) -> tuple[float, ...]:
    """``"start:stop:count"`` -> ``count`` evenly spaced values, endpoints included."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ParseError(f"grid must be start:stop:count, got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ParseError(f"grid must be start:stop:count, got {text!r}") from None
    if count < 2:
        raise ValidationError("grid", "count must be >= 2")
    return tuple(float(v) for v in np.linspace(start, stop, count))


def parse_values(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ParseError(f"expected comma-separated numbers, got {text!r}") from None


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple[float, ...]
    series_variable: str | None = None
    series_values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise ValidationError("variable", f"unknown sweep variable {self.variable!r}")
        if not self.values:
            raise ValidationError("values", "sweep needs at least one value")
        if self.series_variable is not None:
            if self.series_variable not in VARIABLES:
                raise ValidationError("series", f"unknown series variable {self.series_variable!r}")
            if self.series_variable == self.variable:
                raise ValidationError("series", "series and sweep variable must differ")
            if not self.series_values:
                raise ValidationError("series", "series needs at least one value")
            if len(set(self.series_values)) != len(self.series_values):
                raise ValidationError("series", "series values must be distinct")
        elif self.series_values:
            raise ValidationError("series", "series values given without a series variable")

    def points(self):
        """Yield ``(series_value | None, sweep_value)`` in grid order."""
        for s in self.series_values or (None,):
            for v in self.values:
                yield s, v

    def to_dict(self) -> dict[str, Any]:
        return {
            "variable": self.variable,
            "values": list(self.values),
            "series_variable": self.series_variable,
            "series_values": list(self.series_values),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> SweepSpec:
        return cls(
            d["variable"],
            tuple(float(v) for v in d["values"]),
            d.get("series_variable"),
            tuple(float(v) for v in d.get("series_values", ())),
        )


@dataclass
class SweepRow:
    series_var: str
    series_value: float | None
    sweep_var: str
    sweep_value: float
    capacity: float
    std_error: float
    n_samples: int
    point_seed: int
    evaluator: str
    quadrature: float | None = None
    error: str | None = None
    error_kind: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class SweepResult:
    rows: list[SweepRow]
    manifest: dict[str, Any] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        kinds = {r.error_kind for r in self.rows if r.failed}
        if "numerical" in kinds:
            return 2
        return 1 if kinds else 0


def _evaluate_point(base, spec, evaluator, n_samples, rel_tol, series_value, value, point_seed):
    row = SweepRow(
        series_var=spec.series_variable or "",
        series_value=series_value,
        sweep_var=spec.variable,
        sweep_value=value,
        capacity=math.nan,
        std_error=math.nan,
        n_samples=n_samples if evaluator != "quadrature" else 0,
        point_seed=point_seed,
        evaluator=evaluator,
    )
    try:
        sc = base
        if series_value is not None:
            sc = apply_variable(sc, spec.series_variable, series_value)
        sc = apply_variable(sc, spec.variable, value)
        if evaluator in ("mc", "both"):
            est = estimate_capacity_mc(sc, n_samples, point_seed)
            row.capacity, row.std_error = est.mean, est.std_error
        if evaluator in ("quadrature", "both"):
            q = capacity_quadrature(sc, rel_tol)
            row.quadrature = q
            if evaluator == "quadrature":
                row.capacity, row.std_error = q, 0.0
    except NumericalError as exc:
        row.capacity, row.std_error = math.nan, math.nan
        row.error, row.error_kind = str(exc), "numerical"
    except ThzcapError as exc:
        row.capacity, row.std_error = math.nan, math.nan
        row.error, row.error_kind = str(exc), "validation"
    return row


def run_sweep(
    scenario: Scenario,
    spec: SweepSpec,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    evaluator: str = "mc",
    rel_tol: float = 1e-6,
    workers: int = 1,
) -> SweepResult:
    """Evaluate every point of ``spec``.

    Point ``i`` (grid order, series-major) uses the seed
    ``derive_seed(seed, i)``, so results do not depend on ``workers``.
    Points that fail are kept as rows carrying the error message.
    """
    if evaluator not in EVALUATORS:
        raise ValidationError("evaluator", f"must be one of {EVALUATORS}")
    if n_samples < 2:
        raise ValidationError("n_samples", "at least 2 samples required")
    t0 = time.perf_counter()
    points = list(spec.points())
    seeds = [derive_seed(seed, i) for i in range(len(points))]
    args = [
        (scenario, spec, evaluator, n_samples, rel_tol, s, v, seeds[i])
        for i, (s, v) in enumerate(points)
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda a: _evaluate_point(*a), args))
    else:
        rows = [_evaluate_point(*a) for a in args]

    manifest = {
        "tool": "thzcap",
        "version": __version__,
        "scenario": scenario_to_dict(scenario),
        "absorption_table": table_knots(scenario),
        "sweep": spec.to_dict(),
        "seed": seed,
        "n_samples": n_samples,
        "evaluator": evaluator,
        "rel_tol": rel_tol,
        "point_seeds": seeds,
        "workers": workers,
        "duration_s": time.perf_counter() - t0,
    }
    return SweepResult(rows, manifest)


def replay(manifest: dict[str, Any], workers: int = 1) -> SweepResult:
    """Re-run the sweep described by a manifest."""
    scenario = scenario_from_dict(manifest["scenario"], table_knots=manifest.get("absorption_table"))
    spec = SweepSpec.from_dict(manifest["sweep"])
    result = run_sweep(
        scenario,
        spec,
        n_samples=int(manifest["n_samples"]),
        seed=int(manifest["seed"]),
        evaluator=manifest["evaluator"],
        rel_tol=float(manifest["rel_tol"]),
        workers=workers,
    )
    if result.manifest["point_seeds"] != list(manifest["point_seeds"]):
        raise ValidationError("point_seeds", "manifest seeds do not match the derived seeds")
    return result


def series_of(rows: Sequence[SweepRow]) -> dict[float | None, list[SweepRow]]:
    out: dict[float | None, list[SweepRow]] = {}
    for r in rows:
        out.setdefault(r.series_value, []).append(r)
    return out
