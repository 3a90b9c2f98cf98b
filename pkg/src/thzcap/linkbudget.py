"""Deterministic path gain of a THz link.

All gains here are amplitude gains: they multiply the complex baseband
signal, so the received power scales with their square.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .errors import DomainError, OutOfRangeError, ParseError, ValidationError

SPEED_OF_LIGHT = 2.99792458e8  # m/s, exact

TABLE_HEADER = "frequency_ghz,kappa_per_m"


@dataclass(frozen=True)
class LinkGeometry:
    """Carrier frequency [Hz], distance [m] and antenna gains [dBi]."""

    frequency: float
    distance: float
    gain_tx: float = 0.0
    gain_rx: float = 0.0

    def __post_init__(self):
        for name in ("frequency", "distance"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(name, f"must be a positive finite number, got {value!r}")
        for name in ("gain_tx", "gain_rx"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(name, "antenna gain must be finite")


@dataclass(frozen=True)
class Environment:
    """Atmospheric state: temperature [K], pressure [Pa], relative humidity in [0, 1]."""

    temperature: float = 296.0
    pressure: float = 101325.0
    relative_humidity: float = 0.5

    def __post_init__(self):
        if not (math.isfinite(self.temperature) and self.temperature > 0):
            raise ValidationError("temperature", "must be > 0 K")
        if not (math.isfinite(self.pressure) and self.pressure > 0):
            raise ValidationError("pressure", "must be > 0 Pa")
        if not (0.0 <= self.relative_humidity <= 1.0):
            raise ValidationError(
                "relative_humidity", f"must lie in [0, 1], got {self.relative_humidity!r}"
            )


STANDARD_ATMOSPHERE = Environment(temperature=296.0, pressure=101325.0, relative_humidity=0.5)


@dataclass(frozen=True)
class AbsorptionProvider:
    """Source of the molecular absorption coefficient kappa [1/m].

    ``mode`` is one of ``"none"``, ``"constant"`` or ``"table"``. In table
    mode ``frequencies`` (Hz) and ``kappas`` hold the interpolation knots.
    A table may be keyed to the environment it was computed for; lookups
    under any other environment are then refused.
    """

    mode: str = "none"
    kappa: float = 0.0
    frequencies: tuple[float, ...] = ()
    kappas: tuple[float, ...] = ()
    environment: Environment | None = None
    source: str | None = None

    def __post_init__(self):
        if self.mode not in ("none", "constant", "table"):
            raise ValidationError("mode", f"unknown absorption mode {self.mode!r}")
        if self.mode == "constant":
            if not (math.isfinite(self.kappa) and self.kappa >= 0):
                raise ValidationError("kappa", "negative absorption coefficient")
        if self.mode == "table":
            if len(self.frequencies) != len(self.kappas):
                raise ValidationError("table", "frequency and kappa columns differ in length")
            if len(self.frequencies) < 2:
                raise ValidationError("table", "at least 2 knots required")
            if any(not (math.isfinite(k) and k >= 0) for k in self.kappas):
                raise ValidationError("table", "negative absorption coefficient")
            if any(b <= a for a, b in zip(self.frequencies, self.frequencies[1:])):
                raise ValidationError("table", "knots not strictly increasing")

    @classmethod
    def none(cls) -> AbsorptionProvider:
        return cls("none")

    @classmethod
    def constant(cls, kappa: float) -> AbsorptionProvider:
        return cls("constant", kappa=float(kappa))

    @classmethod
    def table(
        cls,
        knots: Iterable[tuple[float, float]],
        environment: Environment | None = None,
        source: str | None = None,
    ) -> AbsorptionProvider:
        """Build a table provider from ``(frequency_hz, kappa)`` pairs."""
        knots = list(knots)
        return cls(
            "table",
            frequencies=tuple(float(f) for f, _ in knots),
            kappas=tuple(float(k) for _, k in knots),
            environment=environment,
            source=source,
        )


def friis_amplitude(geometry: LinkGeometry) -> float:
    """Free-space amplitude gain ``c/(4 pi f d) * sqrt(Gt Gr)``."""
    g_lin = 10.0 ** ((geometry.gain_tx + geometry.gain_rx) / 20.0)
    return SPEED_OF_LIGHT / (4.0 * math.pi * geometry.frequency * geometry.distance) * g_lin


def absorption_coefficient(env: Environment, frequency: float, provider: AbsorptionProvider) -> float:
    """Absorption coefficient [1/m] at ``frequency`` [Hz].

    Table mode interpolates linearly between the bracketing knots and never
    extrapolates.

    Raises:
        OutOfRangeError: frequency outside the tabulated band.
        ValidationError: the table is keyed to a different environment.
    """
    if provider.mode == "none":
        return 0.0
    if provider.mode == "constant":
        return provider.kappa
    if provider.environment is not None and provider.environment != env:
        raise ValidationError(
            "environment", "absorption table was computed for a different environment"
        )
    lo, hi = provider.frequencies[0], provider.frequencies[-1]
    if not lo <= frequency <= hi:
        raise OutOfRangeError(
            f"frequency {frequency / 1e9:g} GHz outside table range "
            f"[{lo / 1e9:g}, {hi / 1e9:g}] GHz"
        )
    return float(np.interp(frequency, provider.frequencies, provider.kappas))


def absorption_amplitude(kappa: float, distance: float) -> float:
    """Beer-Lambert amplitude factor ``exp(-kappa d / 2)``."""
    return math.exp(-0.5 * kappa * distance)


def path_amplitude(geometry: LinkGeometry, env: Environment, provider: AbsorptionProvider) -> float:
    """Deterministic path gain: free-space spreading times molecular absorption."""
    h_fl = friis_amplitude(geometry)
    kappa = absorption_coefficient(env, geometry.frequency, provider)
    if kappa == 0.0:
        return h_fl
    return h_fl * absorption_amplitude(kappa, geometry.distance)


def load_absorption_table(
    stream: IO[bytes] | IO[str] | bytes | str,
    environment: Environment | None = None,
    source: str | None = None,
) -> AbsorptionProvider:
    """Parse an absorption table (``frequency_ghz,kappa_per_m`` rows).

    ``stream`` may be a binary or text file object, or the raw content.
    The header line is mandatory; blank lines and ``#`` comments are skipped.
    """
    if isinstance(stream, bytes):
        text = stream.decode("utf-8")
    elif isinstance(stream, str):
        text = stream
    else:
        data = stream.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data

    knots: list[tuple[float, float]] = []
    seen_header = False
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not seen_header:
            if line.replace(" ", "") != TABLE_HEADER:
                raise ParseError(f"expected header {TABLE_HEADER!r}, got {line!r}", lineno, source)
            seen_header = True
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 2:
            raise ParseError(f"expected 2 comma-separated fields, got {len(fields)}", lineno, source)
        try:
            f_ghz, kappa = float(fields[0]), float(fields[1])
        except ValueError:
            raise ParseError(f"non-numeric field in {line!r}", lineno, source) from None
        if not (math.isfinite(f_ghz) and math.isfinite(kappa)):
            raise ParseError(f"non-finite value in {line!r}", lineno, source)
        knots.append((f_ghz * 1e9, kappa))
    if not seen_header:
        raise ParseError(f"missing header {TABLE_HEADER!r}", None, source)
    return AbsorptionProvider.table(knots, environment=environment, source=source)


def dump_absorption_table(provider: AbsorptionProvider) -> str:
    """Inverse of :func:`load_absorption_table` for table-mode providers."""
    lines = [TABLE_HEADER]
    for f, k in zip(provider.frequencies, provider.kappas):
        lines.append(f"{f / 1e9!r},{k!r}")
    return "\n".join(lines) + "\n"
