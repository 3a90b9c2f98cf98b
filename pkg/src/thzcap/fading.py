"""Stochastic channel factors: antenna misalignment and alpha-mu multipath.

Misalignment fading follows the zero-boresight pointing-error model, in which
the collected fraction of power h_p has density

    f(x) = gamma^2 / A0^(gamma^2) * x^(gamma^2 - 1),   0 <= x <= A0.

Multipath fading follows the alpha-mu envelope law, sampled exactly through
the Gamma transform ``h_hat * (G / mu)^(1/alpha)`` with ``G ~ Gamma(mu, 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, ValidationError


@dataclass(frozen=True)
class MisalignmentGeometry:
    """Receiver aperture radius, beam footprint radius and jitter std, all in metres."""

    aperture_radius: float
    beam_waist: float
    jitter_sigma: float

    def __post_init__(self):
        for name in ("aperture_radius", "beam_waist", "jitter_sigma"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(name, f"must be > 0, got {value!r}")


@dataclass(frozen=True)
class MisalignmentParams:
    v: float
    A0: float
    w_eq: float
    gamma: float

    def __post_init__(self):
        if not 0 < self.A0 <= 1:
            raise ValidationError("A0", f"must lie in (0, 1], got {self.A0!r}")
        if not self.w_eq > 0:
            raise ValidationError("w_eq", "must be > 0")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ValidationError("gamma", "must be > 0")

    @property
    def gamma_sq(self) -> float:
        return self.gamma * self.gamma


@dataclass(frozen=True)
class AlphaMuParams:
    """Nonlinearity ``alpha``, clustering ``mu`` and alpha-root mean ``h_hat``."""

    alpha: float = 2.0
    mu: float = 1.0
    h_hat: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "mu", "h_hat"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(name, f"must be > 0, got {value!r}")


def derive_misalignment(geom: MisalignmentGeometry) -> MisalignmentParams:
    """Pointing-error parameters for a circular aperture in a Gaussian beam."""
    a, w_d = geom.aperture_radius, geom.beam_waist
    v = math.sqrt(math.pi) * a / (math.sqrt(2.0) * w_d)
    erf_v = math.erf(v)
    A0 = erf_v * erf_v
    # exp(-v^2) underflows for huge v; the ratio is still well defined in logs
    log_ratio = 0.5 * math.log(math.pi) + math.log(erf_v) - math.log(2.0 * v) + v * v
    if 0.5 * log_ratio > 700.0:
        raise DomainError("aperture_radius", "aperture/beam ratio too large: equivalent beam width overflows")
    w_eq = w_d * math.exp(0.5 * log_ratio)
    gamma = w_eq / (2.0 * geom.jitter_sigma)
    return MisalignmentParams(v=v, A0=A0, w_eq=w_eq, gamma=gamma)


def pointing_pdf_cdf(x, params: MisalignmentParams):
    """Density and CDF of the misalignment factor at ``x`` (scalar or array)."""
    x = np.asarray(x, dtype=float)
    g2, A0 = params.gamma_sq, params.A0
    inside = (x >= 0) & (x <= A0)
    xs = np.where(inside, x, A0)
    with np.errstate(divide="ignore"):
        pdf = np.where(inside, g2 / A0 * (xs / A0) ** (g2 - 1.0), 0.0)
    cdf = np.where(x < 0, 0.0, np.where(x > A0, 1.0, (xs / A0) ** g2))
    if pdf.ndim == 0:
        return float(pdf), float(cdf)
    return pdf, cdf


def sample_pointing(u, params: MisalignmentParams):
    """Inverse-CDF sampler: maps uniform variates in (0, 1] to ``A0 * u^(1/gamma^2)``."""
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0) | (u > 1)) or np.any(np.isnan(u)):
        raise DomainError("u", "uniform variate must lie in (0, 1]")
    out = params.A0 * u ** (1.0 / params.gamma_sq)
    return float(out) if out.ndim == 0 else out


def alpha_mu_pdf(x, params: AlphaMuParams):
    """Alpha-mu envelope density; 0 for negative ``x``."""
    x = np.asarray(x, dtype=float)
    alpha, mu, h = params.alpha, params.mu, params.h_hat
    am = alpha * mu
    pos = x > 0
    xs = np.where(pos, x, 1.0) / h
    # log-domain evaluation keeps the normalizer stable for large mu
    log_pdf = (
        math.log(alpha)
        + mu * math.log(mu)
        - special.gammaln(mu)
        - math.log(h)
        + (am - 1.0) * np.log(xs)
        - mu * xs**alpha
    )
    pdf = np.where(pos, np.exp(log_pdf), 0.0)
    at_zero = x == 0
    if np.any(at_zero):
        if am < 1:
            zero_val = np.inf
        elif am == 1:
            zero_val = alpha * mu**mu / (h * math.gamma(mu))
        else:
            zero_val = 0.0
        pdf = np.where(at_zero, zero_val, pdf)
    return float(pdf) if pdf.ndim == 0 else pdf


def alpha_mu_cdf(x, params: AlphaMuParams):
    """Closed-form CDF: regularized lower incomplete gamma of ``mu (x/h_hat)^alpha``."""
    x = np.asarray(x, dtype=float)
    z = params.mu * (np.clip(x, 0.0, None) / params.h_hat) ** params.alpha
    out = special.gammainc(params.mu, z)
    return float(out) if out.ndim == 0 else out


def alpha_mu_from_gamma(g, params: AlphaMuParams):
    """Map Gamma(mu, 1) variates onto alpha-mu envelopes."""
    g = np.asarray(g, dtype=float)
    out = params.h_hat * (g / params.mu) ** (1.0 / params.alpha)
    return float(out) if out.ndim == 0 else out


def alpha_mu_quantile(v, params: AlphaMuParams):
    """Inverse of :func:`alpha_mu_cdf` for ``v`` in [0, 1)."""
    g = special.gammaincinv(params.mu, np.asarray(v, dtype=float))
    return alpha_mu_from_gamma(g, params)


def sample_alpha_mu(rng: np.random.Generator, params: AlphaMuParams, size=None):
    """Draw alpha-mu envelopes from ``rng``."""
    return alpha_mu_from_gamma(rng.standard_gamma(params.mu, size=size), params)


def fading_moment(which: str, n: int, params) -> float:
    """Closed-form n-th raw moment of either fading factor.

    ``which`` is ``"pointing"`` (with :class:`MisalignmentParams`) or
    ``"alpha_mu"`` (with :class:`AlphaMuParams`).
    """
    if not n > 0:
        raise DomainError("n", f"moment order must be positive, got {n!r}")
    if which == "pointing":
        g2 = params.gamma_sq
        return params.A0**n * g2 / (g2 + n)
    if which == "alpha_mu":
        a, mu, h = params.alpha, params.mu, params.h_hat
        log_m = n * math.log(h) + math.lgamma(mu + n / a) - math.lgamma(mu) - (n / a) * math.log(mu)
        return math.exp(log_m)
    raise DomainError("which", f"unknown fading family {which!r}")
