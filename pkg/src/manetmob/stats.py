"""Samplers and small statistical procedures.

Truncated-Gaussian walking speeds, Poisson/Pareto interarrival regimes, the
two-sample Kolmogorov-Smirnov statistic, the single-parameter Pareto shape
factor taken from k statistics, and decay fits of k against node count.
"""

from __future__ import annotations

import enum
import math
import statistics
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class TruncatedGaussianSpec:
    mean: float = 1.34
    sigma: float = 0.5
    lower: float = 0.1
    upper: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if not self.upper > self.lower:
            raise ValueError(f"upper ({self.upper}) must exceed lower ({self.lower})")

    def acceptance_probability(self) -> float:
        def cdf(x):
            return 0.5 * math.erfc(-(x - self.mean) / (self.sigma * math.sqrt(2.0)))

        return cdf(self.upper) - cdf(self.lower)


MIN_ACCEPTANCE = 1e-6


def sample_truncated_gaussian(spec: TruncatedGaussianSpec, rng: np.random.Generator, size=None):
    """Rejection-sample N(mean, sigma) restricted to [lower, upper].

    Returns a float when ``size`` is None, else an array of that many draws.
    """
    acc = spec.acceptance_probability()
    if acc < MIN_ACCEPTANCE:
        raise ValueError(
            f"acceptance probability {acc:.3g} below {MIN_ACCEPTANCE:g}; bounds too far from mean"
        )
    n = 1 if size is None else int(size)
    out = np.empty(n)
    filled = 0
    while filled < n:
        batch = max(16, int(1.2 * (n - filled) / acc))
        draws = rng.normal(spec.mean, spec.sigma, size=batch)
        keep = draws[(draws >= spec.lower) & (draws <= spec.upper)][: n - filled]
        out[filled : filled + keep.size] = keep
        filled += keep.size
    return float(out[0]) if size is None else out


@dataclass(frozen=True)
class PoissonRegime:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("Poisson rate must be > 0")


@dataclass(frozen=True)
class ParetoRegime:
    shape: float
    scale: float = 1.0

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise ValueError("Pareto shape and scale must be > 0")


ArrivalRegime = PoissonRegime | ParetoRegime


def select_arrival_regime(
    delta_x: float, d: float, poisson: PoissonRegime, pareto: ParetoRegime
) -> ArrivalRegime:
    """Poisson arrivals while the displacement stays within ``d``, Pareto beyond.

    A displacement exactly equal to ``d`` counts as Poisson.
    """
    if not d > 0:
        raise ValueError(f"d must be > 0, got {d}")
    if delta_x < 0:
        raise ValueError(f"delta_x must be >= 0, got {delta_x}")
    return pareto if delta_x > d else poisson


def interarrival_sample(regime: ArrivalRegime, rng: np.random.Generator, size=None):
    if isinstance(regime, PoissonRegime):
        return rng.exponential(1.0 / regime.lam, size=size)
    u = 1.0 - rng.random(size=size)  # (0, 1]
    return regime.scale * u ** (-1.0 / regime.shape)


def ks_statistic(sample_a: Sequence[float], sample_b: Sequence[float]) -> float:
    """Two-sample KS distance sup_x |F_a(x) - F_b(x)|."""
    a = np.sort(np.asarray(sample_a, dtype=float))
    b = np.sort(np.asarray(sample_b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("KS statistic needs two non-empty samples")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


class Statistic(enum.Enum):
    MEAN = "mean"
    MEDIAN = "median"


DEFAULT_SCALING = 100.0


def pareto_shape_from_k(
    k_values: Sequence[float], statistic: Statistic = Statistic.MEAN, scaling: float = DEFAULT_SCALING
) -> float:
    """Shape factor alpha = scaling * mean(k) or scaling * median(k)."""
    if len(k_values) == 0:
        raise ValueError("need at least one k value")
    if not scaling > 0:
        raise ValueError("scaling must be > 0")
    ks = [float(k) for k in k_values]
    centre = math.fsum(ks) / len(ks) if statistic is Statistic.MEAN else statistics.median(ks)
    return scaling * centre


@dataclass(frozen=True)
class ParetoFit:
    alpha_mean: float
    alpha_median: float
    scaling: float = DEFAULT_SCALING

    @classmethod
    def from_k(cls, k_values: Sequence[float], scaling: float = DEFAULT_SCALING) -> ParetoFit:
        return cls(
            pareto_shape_from_k(k_values, Statistic.MEAN, scaling),
            pareto_shape_from_k(k_values, Statistic.MEDIAN, scaling),
            scaling,
        )


def pareto_pdf(x, alpha: float):
    """Single-parameter form (alpha / (1 + x)) ** alpha. Not normalised."""
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise ValueError("x must be >= 0")
    out = (alpha / (1.0 + xa)) ** alpha
    return float(out) if out.ndim == 0 else out


class DecayModel(enum.Enum):
    HYPERBOLIC = "hyperbolic"  # k = c / N
    EXPONENTIAL = "exponential"  # k = a * exp(-b N)


@dataclass(frozen=True)
class DecayFit:
    model: DecayModel
    coefficients: dict[str, float]
    residual_norm: float  # Euclidean norm of k - k_hat, in k units for both models

    def predict(self, n):
        n = np.asarray(n, dtype=float)
        if self.model is DecayModel.HYPERBOLIC:
            return self.coefficients["c"] / n
        return self.coefficients["a"] * np.exp(-self.coefficients["b"] * n)


def decay_fit(points: Sequence[tuple[float, float]], model: DecayModel) -> DecayFit:
    if len(points) < 3:
        raise ValueError("decay fit needs at least 3 points")
    n = np.array([p[0] for p in points], dtype=float)
    k = np.array([p[1] for p in points], dtype=float)
    if model is DecayModel.HYPERBOLIC:
        inv = 1.0 / n
        c = float(inv @ k / (inv @ inv))
        fit = DecayFit(model, {"c": c}, 0.0)
    else:
        if np.any(k <= 0):
            raise ValueError("exponential decay fit needs strictly positive k")
        design = np.column_stack([np.ones_like(n), -n])
        (log_a, b), *_ = np.linalg.lstsq(design, np.log(k), rcond=None)
        fit = DecayFit(model, {"a": float(np.exp(log_a)), "b": float(b)}, 0.0)
    resid = float(np.linalg.norm(k - fit.predict(n)))
    return DecayFit(fit.model, fit.coefficients, resid)
