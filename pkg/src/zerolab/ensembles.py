"""Coefficient laws, their log-moment classification, and random polynomials.

The boundary the theory cares about is finiteness of E[(log(1+|a|))^m].
Gaussian, Bernoulli, and Cauchy coefficients sit on the finite side for
every order; the log-Frechet family

    |a| = exp(U^{-1/alpha}),   U uniform(0,1),  phase uniform,

has P[log|a| > R] = R^{-alpha} exactly, so its order-m log-moment is finite
iff alpha > m.  This makes the moment boundary tunable with one parameter.

Coefficients are carried as (log-magnitude, phase) pairs: log-Frechet draws
with log|a| in the hundreds neither overflow nor silently saturate.  A
log-magnitude of -inf marks an exact zero; +inf and NaN are rejected.

Randomness flows through explicit counter-based streams keyed by the master
seed and a path of integers, so parallel trials with disjoint paths are
bit-reproducible regardless of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError

_LAW_KINDS = ("gaussian_complex", "gaussian_real", "bernoulli", "cauchy_real", "log_frechet")


@dataclass(frozen=True)
class RngStream:
    """Philox generator keyed by (master seed, integer path); no shared state."""

    master_seed: int
    path: tuple = ()

    def child(self, *ids: int) -> "RngStream":
        return RngStream(self.master_seed, self.path + tuple(int(i) for i in ids))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(seq))

    def provenance(self) -> list:
        return [int(self.master_seed), *self.path]


@dataclass(frozen=True)
class CoefficientLaw:
    """One of the built-in i.i.d. coefficient laws; all are non-degenerate."""

    kind: str
    alpha: Optional[float] = None  # log_frechet tail exponent

    def __post_init__(self):
        if self.kind not in _LAW_KINDS:
            raise ConfigError(f"unknown coefficient law {self.kind!r}")
        if self.kind == "log_frechet":
            if self.alpha is None or self.alpha <= 0:
                raise ConfigError("log_frechet needs alpha > 0")
        elif self.alpha is not None:
            raise ConfigError(f"law {self.kind!r} takes no alpha")

    def label(self) -> str:
        if self.kind == "log_frechet":
            return f"log_frechet({self.alpha:g})"
        return self.kind


def log_moment_finite(law: CoefficientLaw, order: int) -> bool:
    """Whether E[(log(1+|a|))^order] is finite, by analytic classification."""
    if order < 1:
        raise ConfigError("moment order must be >= 1")
    if law.kind == "log_frechet":
        # P[log|a| > R] = R^{-alpha}: the order-m moment converges iff alpha > m
        return law.alpha > order
    # bounded (bernoulli), sub-Gaussian, or polynomial tails: log moments all finite
    return True


@dataclass(frozen=True, eq=False)
class Coefficients:
    """Complex coefficient sequence as (log-magnitude, phase) arrays."""

    log_mag: np.ndarray
    phase: np.ndarray

    def __len__(self) -> int:
        return self.log_mag.shape[0]

    def prefix(self, k: int) -> "Coefficients":
        return Coefficients(self.log_mag[:k], self.phase[:k])

    def complex_values(self) -> np.ndarray:
        """Materialize as complex numbers; heavy tails may overflow to inf."""
        with np.errstate(over="ignore"):
            return np.exp(self.log_mag) * np.exp(1j * self.phase)


def _log_abs(x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(x))


def sample_coefficients(law: CoefficientLaw, count: int, stream: RngStream) -> Coefficients:
    """count i.i.d. draws; identical (seed, path) gives identical output."""
    if count < 0:
        raise ConfigError("count must be >= 0")
    rng = stream.generator()
    if count == 0:
        return Coefficients(np.empty(0), np.empty(0))
    if law.kind == "gaussian_complex":
        xy = rng.standard_normal((2, count))
        mag2 = 0.5 * (xy[0] ** 2 + xy[1] ** 2)
        with np.errstate(divide="ignore"):
            return Coefficients(0.5 * np.log(mag2), np.arctan2(xy[1], xy[0]))
    if law.kind == "gaussian_real":
        x = rng.standard_normal(count)
        return Coefficients(_log_abs(x), np.where(x < 0, math.pi, 0.0))
    if law.kind == "bernoulli":
        signs = rng.integers(0, 2, count)
        return Coefficients(np.zeros(count), np.where(signs == 0, math.pi, 0.0))
    if law.kind == "cauchy_real":
        x = rng.standard_cauchy(count)
        return Coefficients(_log_abs(x), np.where(x < 0, math.pi, 0.0))
    # log_frechet: log|a| = U^{-1/alpha}, uniform phase
    u = rng.random(count)
    v = rng.random(count)
    return Coefficients(u ** (-1.0 / law.alpha), 2.0 * math.pi * v)


@dataclass(frozen=True)
class EmpiricalMoment:
    mean: float
    stderr: float
    sample_size: int


def empirical_log_moment(
    law: CoefficientLaw, order: int, sample_size: int, stream: RngStream
) -> EmpiricalMoment:
    """Monte Carlo mean of (log(1+|a|))^order with its standard error."""
    if sample_size < 1:
        raise ConfigError("sample_size must be >= 1")
    coeffs = sample_coefficients(law, sample_size, stream)
    # log(1 + e^{log|a|}) evaluated stably even for log|a| in the hundreds
    x = np.logaddexp(0.0, coeffs.log_mag) ** order
    mean = float(np.mean(x))
    se = float(np.std(x, ddof=1) / math.sqrt(sample_size)) if sample_size > 1 else math.inf
    return EmpiricalMoment(mean, se, sample_size)


def concentration_estimate(
    law: CoefficientLaw, r: float, sample_size: int = 10000, stream: RngStream = None
) -> float:
    """Largest empirical mass of a radius-r ball over a candidate center grid.

    A lower bound for the concentration function up to sampling error; the
    grid covers the central quantile box at spacing r/2.
    """
    if r <= 0:
        raise ConfigError("radius must be positive")
    if stream is None:
        stream = RngStream(0, (77,))
    coeffs = sample_coefficients(law, sample_size, stream)
    clip = np.minimum(coeffs.log_mag, 27.0)  # points beyond e^27 never matter below
    pts = np.exp(clip) * np.exp(1j * coeffs.phase)
    re, im = np.real(pts), np.imag(pts)
    centers = []
    for vals in (re, im):
        lo, hi = np.quantile(vals, 0.05), np.quantile(vals, 0.95)
        lo, hi = min(lo, 0.0), max(hi, 0.0)
        step = max(r / 2.0, (hi - lo) / 60.0)
        centers.append(np.arange(lo, hi + step, step))
    grid = (centers[0][:, None] + 1j * centers[1][None, :]).ravel()
    best = 0.0
    for c0 in range(0, grid.size, 256):
        block = grid[c0 : c0 + 256]
        hits = np.abs(pts[:, None] - block[None, :]) <= r
        best = max(best, float(hits.mean(axis=0).max()))
    return best


@dataclass(frozen=True)
class TailGrowthReport:
    """Observed growth of |a_j| against the Borel-Cantelli envelope.

    last_violation is the largest 1-based j with |a_j| >= exp((eps*j)^(1/order)),
    or None when the whole sample obeys the bound.  crossings maps each
    threshold to the first j where the running max of |a_j|^{order/j}
    exceeds it (None if never).
    """

    order: int
    epsilon: float
    j_max: int
    violation_count: int
    last_violation: Optional[int]
    crossings: dict


def tail_growth_diagnostic(
    law: CoefficientLaw,
    order: int,
    epsilon: float,
    j_max: int,
    stream: RngStream,
    thresholds=(10.0, 100.0, 1000.0),
) -> TailGrowthReport:
    if j_max < 1:
        raise ConfigError("j_max must be >= 1")
    coeffs = sample_coefficients(law, j_max, stream)
    j = np.arange(1, j_max + 1, dtype=float)
    bound = (epsilon * j) ** (1.0 / order)
    violated = coeffs.log_mag >= bound
    count = int(np.sum(violated))
    last = int(j[violated][-1]) if count else None
    # running max of |a_j|^{order/j} in log form
    log_root = order * coeffs.log_mag / j
    running = np.maximum.accumulate(log_root)
    crossings = {}
    for thr in thresholds:
        idx = np.flatnonzero(running > math.log(thr))
        crossings[thr] = int(idx[0] + 1) if idx.size else None
    return TailGrowthReport(order, epsilon, j_max, count, last, crossings)


@dataclass(frozen=True, eq=False)
class RandomPolynomial:
    """A linear combination sum_j a_j P_j over a fixed basis."""

    basis: object
    coefficients: Coefficients
    seed_provenance: tuple = ()

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def m(self) -> int:
        return self.basis.m

    @property
    def size(self) -> int:
        return len(self.coefficients)


def assemble_polynomial(
    basis, coefficients: Coefficients, seed_provenance: tuple = ()
) -> RandomPolynomial:
    """Bundle a basis with a coefficient sequence of matching length."""
    if len(coefficients) != basis.size:
        raise ConfigError(
            f"coefficient count {len(coefficients)} != basis size {basis.size}"
        )
    lm = coefficients.log_mag
    if np.any(np.isnan(lm)) or np.any(np.isposinf(lm)):
        raise ConfigError("coefficient magnitudes must be finite or -inf")
    if not np.any(lm > -np.inf):
        raise ConfigError("all coefficients are zero: degenerate polynomial")
    return RandomPolynomial(basis, coefficients, seed_provenance)
