"""Scenario files: flat TOML documents with unit-suffixed keys.

Example::

    frequency_ghz = 275.0
    distance_m = 30.0
    sigma_s_m = 0.04
    p_over_n0_db = 25.0

The shipped presets ``fig1`` and ``fig2`` live in ``thzcap/presets``.
"""

from __future__ import annotations

import math
import sys
from importlib import resources
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .capacity import Impairments, PowerBudget, Scenario
from .errors import ParseError, ValidationError
from .fading import AlphaMuParams, MisalignmentGeometry
from .linkbudget import AbsorptionProvider, Environment, LinkGeometry, load_absorption_table

PRESETS = ("fig1", "fig2")

# key -> (type, default); a default of ... marks a required key
SCHEMA: dict[str, tuple[type, Any]] = {
    "frequency_ghz": (float, ...),
    "distance_m": (float, ...),
    "gain_tx_dbi": (float, ...),
    "gain_rx_dbi": (float, ...),
    "temperature_k": (float, 296.0),
    "pressure_pa": (float, 101325.0),
    "relative_humidity": (float, 0.5),
    "aperture_radius_m": (float, 0.1),
    "beam_waist_m": (float, 0.2),
    "sigma_s_m": (float, ...),
    "alpha": (float, 2.0),
    "mu": (float, 1.0),
    "h_hat": (float, 1.0),
    "k_t": (float, 0.0),
    "k_r": (float, 0.0),
    "p_over_n0_db": (float, ...),
    "absorption_mode": (str, "none"),
    "absorption_kappa_per_m": (float, None),
    "absorption_table_path": (str, None),
    "no_fading": (bool, False),
}

# dataclass field -> config key, for error messages
_FIELD_KEYS = {
    "frequency": "frequency_ghz",
    "distance": "distance_m",
    "gain_tx": "gain_tx_dbi",
    "gain_rx": "gain_rx_dbi",
    "temperature": "temperature_k",
    "pressure": "pressure_pa",
    "aperture_radius": "aperture_radius_m",
    "beam_waist": "beam_waist_m",
    "jitter_sigma": "sigma_s_m",
    "kappa": "absorption_kappa_per_m",
    "table": "absorption_table_path",
    "mode": "absorption_mode",
}


def _typed(key: str, value: Any):
    kind = SCHEMA[key][0]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(key, f"expected a number, got {value!r}")
        value = float(value)
        if not math.isfinite(value):
            raise ValidationError(key, "must be finite")
        return value
    if not isinstance(value, kind):
        raise ValidationError(key, f"expected {kind.__name__}, got {value!r}")
    return value


def scenario_from_dict(
    data: dict[str, Any],
    base_dir: Path | None = None,
    source: str | None = None,
    table_knots: list[list[float]] | None = None,
) -> Scenario:
    """Validate a flat key/value mapping and build a :class:`Scenario`.

    ``table_knots`` (``[[frequency_ghz, kappa], ...]``) overrides
    ``absorption_table_path`` so that manifests can carry tables inline.
    """
    unknown = sorted(set(data) - set(SCHEMA))
    if unknown:
        raise ValidationError(unknown[0], "unknown key")
    cfg = {}
    for key, (_, default) in SCHEMA.items():
        if key in data:
            cfg[key] = _typed(key, data[key])
        elif default is ...:
            raise ValidationError(key, "required key missing")
        else:
            cfg[key] = default

    try:
        geometry = LinkGeometry(
            cfg["frequency_ghz"] * 1e9, cfg["distance_m"], cfg["gain_tx_dbi"], cfg["gain_rx_dbi"]
        )
        environment = Environment(cfg["temperature_k"], cfg["pressure_pa"], cfg["relative_humidity"])
        misalignment = MisalignmentGeometry(
            cfg["aperture_radius_m"], cfg["beam_waist_m"], cfg["sigma_s_m"]
        )
        fad = AlphaMuParams(cfg["alpha"], cfg["mu"], cfg["h_hat"])
        impairments = Impairments(cfg["k_t"], cfg["k_r"])
        budget = PowerBudget(cfg["p_over_n0_db"])
        absorption = _absorption(cfg, base_dir, table_knots)
    except ValidationError as exc:
        key = _FIELD_KEYS.get(exc.field, exc.field)
        msg = str(exc).split(": ", 1)[-1]
        raise ValidationError(key, msg) from None

    return Scenario(
        geometry=geometry,
        misalignment=misalignment,
        budget=budget,
        environment=environment,
        absorption=absorption,
        fading=fad,
        impairments=impairments,
        no_fading=cfg["no_fading"],
    )


def _absorption(cfg, base_dir, table_knots) -> AbsorptionProvider:
    mode = cfg["absorption_mode"]
    if mode == "none":
        return AbsorptionProvider.none()
    if mode == "constant":
        if cfg["absorption_kappa_per_m"] is None:
            raise ValidationError("absorption_kappa_per_m", "required when absorption_mode = 'constant'")
        return AbsorptionProvider.constant(cfg["absorption_kappa_per_m"])
    if mode == "table":
        path = cfg["absorption_table_path"]
        if table_knots is not None:
            return AbsorptionProvider.table(
                [(f * 1e9, k) for f, k in table_knots], source=path
            )
        if path is None:
            raise ValidationError("absorption_table_path", "required when absorption_mode = 'table'")
        resolved = Path(path)
        if base_dir is not None and not resolved.is_absolute():
            resolved = base_dir / resolved
        with open(resolved, "rb") as fh:
            provider = load_absorption_table(fh, source=str(resolved))
        return AbsorptionProvider.table(
            zip(provider.frequencies, provider.kappas), source=path
        )
    raise ValidationError("absorption_mode", f"must be none, constant or table, got {mode!r}")


def preset_path(name: str):
    return resources.files("thzcap").joinpath("presets", f"{name}.scenario")


def read_config_text(path_or_preset: str | Path) -> tuple[str, Path | None, str]:
    """Return ``(text, base_dir, label)`` for a file path or preset name."""
    p = Path(path_or_preset)
    if not p.exists() and str(path_or_preset) in PRESETS:
        res = preset_path(str(path_or_preset))
        return res.read_text(encoding="utf-8"), None, f"{path_or_preset}.scenario"
    return p.read_text(encoding="utf-8"), p.parent, str(p)


def parse_config_text(text: str, base_dir: Path | None = None, source: str | None = None) -> Scenario:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        raise ParseError(str(exc), line, source) from None
    nested = [k for k, v in data.items() if isinstance(v, dict)]
    if nested:
        raise ParseError(f"tables are not allowed, found [{nested[0]}]", None, source)
    return scenario_from_dict(data, base_dir=base_dir, source=source)


def parse_config(path_or_preset: str | Path) -> Scenario:
    """Load and validate a scenario file, or a shipped preset by name."""
    text, base_dir, label = read_config_text(path_or_preset)
    return parse_config_text(text, base_dir, label)


def scenario_to_dict(scenario: Scenario) -> dict[str, Any]:
    """Flat key/value form of a scenario (inverse of :func:`scenario_from_dict`)."""
    g, env, m = scenario.geometry, scenario.environment, scenario.misalignment
    f, imp, ab = scenario.fading, scenario.impairments, scenario.absorption
    out: dict[str, Any] = {
        "frequency_ghz": g.frequency / 1e9,
        "distance_m": g.distance,
        "gain_tx_dbi": g.gain_tx,
        "gain_rx_dbi": g.gain_rx,
        "temperature_k": env.temperature,
        "pressure_pa": env.pressure,
        "relative_humidity": env.relative_humidity,
        "aperture_radius_m": m.aperture_radius,
        "beam_waist_m": m.beam_waist,
        "sigma_s_m": m.jitter_sigma,
        "alpha": f.alpha,
        "mu": f.mu,
        "h_hat": f.h_hat,
        "k_t": imp.k_t,
        "k_r": imp.k_r,
        "p_over_n0_db": scenario.budget.p_over_n0_db,
        "absorption_mode": ab.mode,
        "no_fading": scenario.no_fading,
    }
    if ab.mode == "constant":
        out["absorption_kappa_per_m"] = ab.kappa
    if ab.mode == "table" and ab.source is not None:
        out["absorption_table_path"] = ab.source
    return out


def table_knots(scenario: Scenario) -> list[list[float]] | None:
    ab = scenario.absorption
    if ab.mode != "table":
        return None
    return [[f / 1e9, k] for f, k in zip(ab.frequencies, ab.kappas)]


def _toml_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise TypeError(value)


def dump_config(scenario: Scenario) -> str:
    """Serialize a scenario to scenario-file text."""
    return "".join(f"{k} = {_toml_value(v)}\n" for k, v in scenario_to_dict(scenario).items())
