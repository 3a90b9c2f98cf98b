"""Instantaneous SNR under transceiver impairments and ergodic capacity.

The received signal model ``y = h (x + n_t) + n_r`` with distortion noises of
variance ``k_t^2 P`` and ``k_r^2 P |h|^2`` gives, treating the distortions as
Gaussian and independent of ``x``,

    rho = S / (S (k_t^2 + k_r^2) + 1),   S = |h|^2 P / N0.

Ergodic capacity is ``E[log2(1 + rho)]`` over the misalignment and multipath
factors, estimated either by seeded Monte Carlo or by nested adaptive
quadrature on the unit square obtained from the two CDF transforms.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import fading, linkbudget
from .errors import DomainError, ValidationError
from .fading import AlphaMuParams, MisalignmentGeometry
from .integrate import gk_adaptive
from .linkbudget import AbsorptionProvider, Environment, LinkGeometry

LN2 = math.log(2.0)
BLOCK_SIZE = 1 << 16
DEFAULT_SAMPLES = 1_000_000


@dataclass(frozen=True)
class Impairments:
    """Transmit/receive distortion levels; (0, 0) is the ideal RF chain."""

    k_t: float = 0.0
    k_r: float = 0.0

    def __post_init__(self):
        for name in ("k_t", "k_r"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValidationError(name, f"must be >= 0, got {value!r}")

    @property
    def kappa_sq(self) -> float:
        return self.k_t * self.k_t + self.k_r * self.k_r


@dataclass(frozen=True)
class PowerBudget:
    """Transmit power over receiver noise, P/N0, in dB."""

    p_over_n0_db: float

    def __post_init__(self):
        if not math.isfinite(self.p_over_n0_db):
            raise ValidationError("p_over_n0_db", "must be finite")

    @property
    def linear(self) -> float:
        return 10.0 ** (self.p_over_n0_db / 10.0)


@dataclass(frozen=True)
class Scenario:
    geometry: LinkGeometry
    misalignment: MisalignmentGeometry
    budget: PowerBudget
    environment: Environment = field(default_factory=lambda: linkbudget.STANDARD_ATMOSPHERE)
    absorption: AbsorptionProvider = field(default_factory=AbsorptionProvider.none)
    fading: AlphaMuParams = field(default_factory=AlphaMuParams)
    impairments: Impairments = field(default_factory=Impairments)
    no_fading: bool = False

    def path_amplitude(self) -> float:
        return linkbudget.path_amplitude(self.geometry, self.environment, self.absorption)

    def misalignment_params(self) -> fading.MisalignmentParams:
        return fading.derive_misalignment(self.misalignment)

    def with_k_tr(self, k: float) -> Scenario:
        return replace(self, impairments=Impairments(k, k))

    def with_sigma_s(self, sigma: float) -> Scenario:
        return replace(self, misalignment=replace(self.misalignment, jitter_sigma=sigma))


@dataclass(frozen=True)
class CapacityEstimate:
    """Monte Carlo capacity in bits/s/Hz with its standard error."""

    mean: float
    std_error: float
    n_samples: int
    seed: int
    ceiling: float


def instantaneous_snr(h_amp, budget: PowerBudget, imp: Impairments):
    """SNR for composite channel amplitude ``|h|`` (scalar or array)."""
    h = np.asarray(h_amp, dtype=float)
    s = h * h * budget.linear
    rho = s / (s * imp.kappa_sq + 1.0)
    return float(rho) if rho.ndim == 0 else rho


def snr_ceiling(imp: Impairments) -> float:
    """Supremum of the SNR as transmit power grows without bound."""
    k2 = imp.kappa_sq
    return math.inf if k2 == 0 else 1.0 / k2


def capacity_ceiling(imp: Impairments) -> float:
    return math.log1p(snr_ceiling(imp)) / LN2


def spectral_efficiency(rho):
    """``log2(1 + rho)``, accurate for small ``rho``."""
    out = np.log1p(rho) / LN2
    return float(out) if np.ndim(out) == 0 else out


def capacity_deterministic(scenario: Scenario) -> float:
    """Capacity with both fading factors frozen at A0 and h_hat."""
    params = scenario.misalignment_params()
    h = scenario.path_amplitude() * params.A0 * scenario.fading.h_hat
    return math.log1p(instantaneous_snr(h, scenario.budget, scenario.impairments)) / LN2


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for substream ``index`` of ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def derive_seed(seed: int, index: int) -> int:
    """Deterministic 63-bit child seed, e.g. for one point of a sweep."""
    state = np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1, dtype=np.uint64)
    return int(state[0] >> np.uint64(1))


def _block_stats(scenario: Scenario, h_l: float, params, seed: int, index: int, count: int):
    rng = substream(seed, index)
    u = 1.0 - rng.random(count)  # (0, 1]
    hp = fading.sample_pointing(u, params)
    hf = fading.sample_alpha_mu(rng, scenario.fading, size=count)
    c = spectral_efficiency(instantaneous_snr(h_l * hp * hf, scenario.budget, scenario.impairments))
    mean = c.mean()
    m2 = float(((c - mean) ** 2).sum())
    return count, float(mean), m2


def estimate_capacity_mc(
    scenario: Scenario, n_samples: int = DEFAULT_SAMPLES, seed: int = 0, workers: int = 1
) -> CapacityEstimate:
    """Monte Carlo ergodic capacity.

    Samples are drawn in blocks of ``BLOCK_SIZE``; block ``i`` always uses
    substream ``i`` and partial statistics are merged in block order, so the
    result is bit-identical for any ``workers``.
    """
    if n_samples < 2:
        raise DomainError("n_samples", "at least 2 samples required")
    ceiling = capacity_ceiling(scenario.impairments)
    if scenario.no_fading:
        return CapacityEstimate(capacity_deterministic(scenario), 0.0, n_samples, seed, ceiling)

    h_l = scenario.path_amplitude()
    params = scenario.misalignment_params()
    n_blocks = -(-n_samples // BLOCK_SIZE)
    sizes = [min(BLOCK_SIZE, n_samples - i * BLOCK_SIZE) for i in range(n_blocks)]

    def run(i):
        return _block_stats(scenario, h_l, params, seed, i, sizes[i])

    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(run, range(n_blocks)))
    else:
        blocks = [run(i) for i in range(n_blocks)]

    # pairwise (Chan et al.) merge, strictly in block order
    n, mean, m2 = blocks[0]
    for nb, mb, m2b in blocks[1:]:
        tot = n + nb
        delta = mb - mean
        mean += delta * nb / tot
        m2 += m2b + delta * delta * n * nb / tot
        n = tot
    std_error = math.sqrt(m2 / (n - 1) / n)
    return CapacityEstimate(mean, std_error, n_samples, seed, ceiling)


def capacity_quadrature(scenario: Scenario, rel_tol: float = 1e-6) -> float:
    """Deterministic ergodic capacity by nested adaptive quadrature.

    Each fading axis is mapped onto [0, 1] through its CDF, so the integrand
    is ``log2(1 + rho)`` evaluated at the two quantiles and needs no density
    weights.

    Raises:
        NumericalError: refinement budget exhausted; carries the best estimate.
    """
    if not 1e-12 < rel_tol < 1e-2:
        raise DomainError("rel_tol", "must lie in (1e-12, 1e-2)")
    if scenario.no_fading:
        return capacity_deterministic(scenario)

    h_l = scenario.path_amplitude()
    params = scenario.misalignment_params()
    fad = scenario.fading
    budget, imp = scenario.budget, scenario.impairments
    inner_rel = rel_tol / 4
    # absolute floor keeps the inner integrals near u = 0 (where x -> 0) from chasing zeros
    inner_abs = inner_rel * max(capacity_deterministic(scenario), 1e-300)

    def inner(u):
        x = params.A0 * u ** (1.0 / params.gamma_sq)

        def integrand(v):
            y = fading.alpha_mu_quantile(v, fad)
            return spectral_efficiency(instantaneous_snr(h_l * np.outer(x, y), budget, imp))

        val, _ = gk_adaptive(integrand, 0.0, 1.0, inner_rel, inner_abs)
        return val

    total, _ = gk_adaptive(inner, 0.0, 1.0, rel_tol / 2, 1e-300)
    return float(total)
