"""Univariate orthonormal polynomials of regular measures.

Bases come from the symmetric three-term recurrence

    x p_k(x) = a_{k+1} p_{k+1}(x) + b_k p_k(x) + a_k p_{k-1}(x)

with p_0 = 1 for probability-normalized measures.  Built-in measures:
arcsine on [-1,1] (normalized Chebyshev), Jacobi(alpha, beta) on [-1,1],
normalized arclength on the unit circle (the classical Kac basis z^k), and
user-supplied recurrence coefficients.

Regularity is the root-asymptotic property gamma_n^(1/n) -> 1/Cap(support);
capacity_check probes it empirically from the leading coefficients, which
are tracked in log space (gamma_{k+1} = gamma_k / a_{k+1}).

The circle measure fails the zero-area convex-hull hypothesis of the
interval theory (its hull is the whole disk) and is carried only as the
Kac demonstration; it is tagged kac_demo so downstream checks can tell.

Roots of combinations sum c_j p_j use the comrade (colleague) matrix: the
truncated Jacobi matrix with a rank-one correction in its last row, whose
eigenvalues are exactly the roots when c_n != 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError
from .ensembles import Coefficients
from .extremal import RegionSpec
from .zeros import RootSet, find_roots_log

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RegularMeasureSpec:
    """A compactly supported measure with known recurrence data."""

    kind: str  # "chebyshev" | "jacobi" | "circle" | "custom_recurrence"
    alpha: Optional[float] = None
    beta: Optional[float] = None
    rec_a: Optional[tuple] = None  # a_1, a_2, ... for custom_recurrence
    rec_b: Optional[tuple] = None  # b_0, b_1, ...

    def __post_init__(self):
        if self.kind == "jacobi":
            if self.alpha is None or self.beta is None:
                raise ConfigError("jacobi needs alpha and beta")
            if self.alpha <= -1 or self.beta <= -1:
                raise ConfigError("jacobi needs alpha > -1 and beta > -1")
        elif self.kind == "custom_recurrence":
            if not self.rec_a or self.rec_b is None:
                raise ConfigError("custom_recurrence needs rec_a and rec_b")
            if any(a <= 0 for a in self.rec_a):
                raise ConfigError("recurrence off-diagonals must be positive")
        elif self.kind not in ("chebyshev", "circle"):
            raise ConfigError(f"unknown measure kind {self.kind!r}")

    @property
    def kac_demo(self) -> bool:
        """True for the circle: its convex hull has positive area, so the
        interval theory does not cover it; kept as the Kac demonstration."""
        return self.kind == "circle"

    @property
    def capacity(self) -> float:
        return 1.0 if self.kind == "circle" else 0.5

    def label(self) -> str:
        if self.kind == "jacobi":
            return f"jacobi({self.alpha:g},{self.beta:g})"
        return self.kind


def _jacobi_recurrence(alpha: float, beta: float, n: int):
    """Orthonormal recurrence coefficients for (1-x)^a (1+x)^b on [-1,1].

    Returns (a, b) with b[k] the diagonal b_k and a[k] the off-diagonal
    a_{k+1} (the divisor of the step from degree k to k+1).
    """
    b = np.empty(n)
    a = np.empty(n)
    s = alpha + beta
    for k in range(n):
        if k == 0:
            b[0] = (beta - alpha) / (s + 2.0)
        else:
            two = 2.0 * k + s
            b[k] = (beta * beta - alpha * alpha) / (two * (two + 2.0))
        kk = k + 1
        if kk == 1:
            a2 = 4.0 * (1 + alpha) * (1 + beta) / ((s + 2.0) ** 2 * (s + 3.0))
        else:
            two = 2.0 * kk + s
            a2 = (
                4.0 * kk * (kk + alpha) * (kk + beta) * (kk + s)
                / (two * two * (two + 1.0) * (two - 1.0))
            )
        a[k] = math.sqrt(a2)
    return a, b


@dataclass(frozen=True, eq=False)
class RecurrenceONB:
    """Degree-n orthonormal family with leading coefficients in log space."""

    spec: RegularMeasureSpec
    n: int
    m: int  # always 1
    rec_a: np.ndarray  # (n,) a_1..a_n; empty for the circle
    rec_b: np.ndarray  # (n,) b_0..b_{n-1}
    log_gammas: np.ndarray  # (n+1,) log leading coefficients

    @property
    def size(self) -> int:
        return self.n + 1

    def eval_terms(self, zs) -> np.ndarray:
        """p_k(z) values as complex (n+1, P) with per-point rescaling folded in.

        Returned as (log|p_k|, arg p_k); the recurrence rescales by the
        running magnitude every 16 steps so huge |z| cannot overflow.
        """
        zs = np.atleast_1d(np.asarray(zs, dtype=complex))
        P = zs.size
        if self.spec.kind == "circle":
            with np.errstate(divide="ignore"):
                s = np.log(np.abs(zs))
            k = np.arange(self.n + 1, dtype=float)
            with np.errstate(invalid="ignore"):
                lm = k[:, None] * s[None, :]
            lm[0] = 0.0  # z^0 = 1 even at z = 0, where 0 * log 0 is NaN
            return lm, k[:, None] * np.angle(zs)[None, :]
        log_mag = np.empty((self.n + 1, P))
        phase = np.empty((self.n + 1, P))
        scale = np.zeros(P)
        p_prev = np.zeros(P, dtype=complex)
        p_cur = np.ones(P, dtype=complex)
        log_mag[0] = 0.0
        phase[0] = 0.0
        for k in range(self.n):
            p_next = ((zs - self.rec_b[k]) * p_cur - (self.rec_a[k - 1] if k else 0.0) * p_prev) / self.rec_a[k]
            p_prev, p_cur = p_cur, p_next
            if (k + 1) % 16 == 0:
                # rescale by the larger of the two so neither entry explodes
                mags = np.maximum(np.maximum(np.abs(p_cur), np.abs(p_prev)), 1e-300)
                scale = scale + np.log(mags)
                p_prev = p_prev / mags
                p_cur = p_cur / mags
            with np.errstate(divide="ignore"):
                log_mag[k + 1] = scale + np.log(np.abs(p_cur))
            phase[k + 1] = np.angle(p_cur)
        return log_mag, phase

    def log_terms_batch(self, zs):
        return self.eval_terms(zs)

    def log_terms(self, z):
        lm, ph = self.eval_terms(np.atleast_1d(np.asarray(z, dtype=complex)))
        return lm[:, 0], ph[:, 0]


def build_recurrence_onb(spec: RegularMeasureSpec, n: int) -> RecurrenceONB:
    """Recurrence data and leading coefficients up to degree n."""
    if n < 0:
        raise ConfigError("degree must be >= 0")
    if spec.kind == "circle":
        return RecurrenceONB(spec, n, 1, np.empty(0), np.empty(0), np.zeros(n + 1))
    if spec.kind == "chebyshev":
        a = np.full(n, 0.5)
        if n >= 1:
            a[0] = math.sqrt(0.5)
        b = np.zeros(n)
    elif spec.kind == "jacobi":
        a, b = _jacobi_recurrence(spec.alpha, spec.beta, n) if n else (np.empty(0), np.empty(0))
    else:
        if len(spec.rec_a) < n or len(spec.rec_b) < n:
            raise ConfigError(f"need at least {n} recurrence coefficients")
        a = np.asarray(spec.rec_a[:n], dtype=float)
        b = np.asarray(spec.rec_b[:n], dtype=float)
    log_gammas = np.zeros(n + 1)
    if n:
        log_gammas[1:] = -np.cumsum(np.log(a))
    return RecurrenceONB(spec, n, 1, a, b, log_gammas)


# ---------------------------------------------------------------------------
# roots of combinations


def roots_of_combination(onb: RecurrenceONB, coeffs: Coefficients) -> RootSet:
    """Roots of sum_j c_j p_j via comrade-matrix eigenvalues.

    The circle basis is monomial, so it goes through the polynomial root
    finder instead.  Residuals are log10 of |q| over sum |c_j||p_j| at the
    computed roots.
    """
    if len(coeffs) != onb.size:
        raise ConfigError("coefficient count does not match basis size")
    if onb.spec.kind == "circle":
        return find_roots_log(coeffs.log_mag, coeffs.phase)
    lm = coeffs.log_mag
    finite = np.isfinite(lm)
    if not finite.any():
        raise ConfigError("all coefficients are zero: no root set")
    top = int(np.flatnonzero(finite)[-1])
    if top == 0:
        return RootSet(np.empty(0, dtype=complex), np.empty(0), 0, True)
    c = np.exp(lm[: top + 1] - lm[finite].max()) * np.exp(1j * coeffs.phase[: top + 1])
    c[~np.isfinite(lm[: top + 1])] = 0.0
    n = top
    A = np.zeros((n, n), dtype=complex)
    np.fill_diagonal(A, onb.rec_b[:n])
    for k in range(1, n):
        A[k, k - 1] = onb.rec_a[k - 1]
        A[k - 1, k] = onb.rec_a[k - 1]
    A[n - 1, :] -= (onb.rec_a[n - 1] / c[n]) * c[:n]
    roots = np.linalg.eigvals(A)
    lm_terms, ph_terms = onb.eval_terms(roots)
    e = lm[: top + 1, None] + lm_terms[: top + 1]
    alpha = coeffs.phase[: top + 1, None] + ph_terms[: top + 1]
    peak = np.max(e, axis=0)
    safe = np.where(np.isfinite(peak), peak, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        total = np.sum(np.exp(e - safe[None, :]) * np.exp(1j * alpha), axis=0)
        denom = safe + np.log(np.sum(np.exp(e - safe[None, :]), axis=0))
        num = safe + np.log(np.abs(total))
        residuals = np.where(
            np.isfinite(denom), (num - denom) / math.log(10.0), -np.inf
        )
    return RootSet(roots, residuals, 0, True)


# ---------------------------------------------------------------------------
# capacity, Green function, equilibrium masses


@dataclass(frozen=True)
class CapacityReport:
    degrees: np.ndarray
    gamma_roots: np.ndarray  # gamma_k^(1/k)
    target: float  # 1 / Cap(support)
    max_deviation_last_half: float


def capacity_check(onb: RecurrenceONB, spec: RegularMeasureSpec) -> CapacityReport:
    """Compare gamma_k^(1/k) against 1/Cap over the built degrees."""
    if onb.n < 10:
        raise ConfigError("capacity check needs degree >= 10")
    k = np.arange(1, onb.n + 1)
    roots = np.exp(onb.log_gammas[1:] / k)
    target = 1.0 / spec.capacity
    half = roots[onb.n // 2 :]
    return CapacityReport(k, roots, target, float(np.max(np.abs(half - target))))


def green_function(spec: RegularMeasureSpec, z: complex) -> float:
    """Green function of the complement of the support, pole at infinity."""
    z = complex(z)
    if spec.kind == "circle":
        return max(0.0, math.log(abs(z))) if z != 0 else 0.0
    # interval support [-1, 1]
    if z.imag == 0.0 and -1.0 <= z.real <= 1.0:
        return 0.0
    w = z + np.sqrt(complex(z * z - 1.0))
    if abs(w) < 1.0:
        w = z - np.sqrt(complex(z * z - 1.0))
    return max(0.0, math.log(abs(w)))


def _arcsine_mass(a: float, b: float) -> float:
    a, b = max(a, -1.0), min(b, 1.0)
    if b <= a:
        return 0.0
    return (math.asin(b) - math.asin(a)) / math.pi


def _sector_contains(region: RegionSpec, angle: float) -> bool:
    if region.sectors is None:
        return True
    lo, hi = region.sectors[0]
    return lo <= angle % _TWO_PI < hi


def equilibrium_mass(spec: RegularMeasureSpec, region) -> float:
    """Equilibrium measure of a region: arcsine mass on [-1,1], angular
    fraction on the circle.

    region may be a real interval (a, b) or a univariate RegionSpec; planar
    regions are intersected with the support.  Disjoint regions get 0.
    """
    if isinstance(region, RegionSpec):
        if region.m != 1:
            raise ConfigError("equilibrium_mass regions are univariate")
        lo, hi = region.annuli[0]
        if spec.kind == "circle":
            if lo >= 1.0 or hi <= 1.0:
                return 0.0
            return float(region.sector_fraction())
        mass = 0.0
        if _sector_contains(region, 0.0):
            mass += _arcsine_mass(lo, hi)
        if _sector_contains(region, math.pi):
            mass += _arcsine_mass(-hi, -lo)
        return mass
    a, b = float(region[0]), float(region[1])
    if b < a:
        raise ConfigError("interval must satisfy a <= b")
    if spec.kind == "circle":
        raise ConfigError("circle measure needs a RegionSpec region")
    return _arcsine_mass(a, b)


# ---------------------------------------------------------------------------
# root-asymptotics of the basis itself


@dataclass(frozen=True)
class OnpAsymptoticReport:
    degrees: tuple
    max_errors: tuple
    flags: tuple


def _distance_to_hull(spec: RegularMeasureSpec, z: complex) -> float:
    if spec.kind == "circle":
        return abs(z) - 1.0
    x, y = z.real, z.imag
    if x < -1.0:
        return math.hypot(x + 1.0, y)
    if x > 1.0:
        return math.hypot(x - 1.0, y)
    return abs(y)


def onp_root_asymptotic_check(
    spec: RegularMeasureSpec, degrees, probes
) -> OnpAsymptoticReport:
    """Per degree, max over probes of |(1/n) log|p_n(z)| - g(z)|.

    Probes must keep distance >= 0.1 from the convex hull of the support.
    Flags report degree steps where the error failed to decrease.
    """
    probes = np.atleast_1d(np.asarray(probes, dtype=complex))
    for z in probes:
        if _distance_to_hull(spec, complex(z)) < 0.1:
            raise ConfigError(f"probe {z} is within 0.1 of the support hull")
    g = np.array([green_function(spec, complex(z)) for z in probes])
    degrees = [int(d) for d in degrees]
    errs = []
    for n in degrees:
        onb = build_recurrence_onb(spec, n)
        lm, _ = onb.eval_terms(probes)
        errs.append(float(np.max(np.abs(lm[n] / n - g))))
    flags = tuple(
        f"max error did not decrease from degree {a} to {b}"
        for a, b, ea, eb in zip(degrees, degrees[1:], errs, errs[1:])
        if eb >= ea
    )
    return OnpAsymptoticReport(tuple(degrees), tuple(errs), flags)
