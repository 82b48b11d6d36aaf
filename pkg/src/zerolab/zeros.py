"""Zero location and counting for random polynomials.

Univariate roots come from a simultaneous Aberth-Ehrlich iteration started
on Newton-polygon circles; counting in disks is independently verified by
the argument principle (phase-unwrapped winding on a circle).  Coefficients
arrive in log-magnitude/phase form and are rescaled by their largest
magnitude before iterating, which zeros ignore.  When the log-magnitude
spread exceeds ~600 nats the rescaled coefficients would underflow, so
counting in full-angle annuli falls back to argument-principle contours
evaluated through the stable log-evaluation path.

For m >= 2 the (2m-2)-volume of a zero divisor inside a product region is
estimated coordinate slice by coordinate slice: the Euclidean volume form
splits into hyperplane volume forms, and on each line parallel to an axis
the divisor meets the region in finitely many points.  Averaging those
counts over low-discrepancy base points and weighting by the base volume
gives the estimator, with a batch-means standard error.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, RootFindingError
from .ensembles import Coefficients, RandomPolynomial
from .extremal import ExtremalEvaluator, RegionSpec

_TWO_PI = 2.0 * math.pi
AP_FALLBACK_NATS = 600.0
_BOUNDARY_TOL = 1e-9


def _lse(values):
    peak = np.max(values)
    if not np.isfinite(peak):
        return float(peak)
    return float(peak + np.log(np.sum(np.exp(values - peak))))


# ---------------------------------------------------------------------------
# stable evaluation of f = sum a_j P_j


def log_eval_points(poly: RandomPolynomial, zs) -> tuple:
    """(log|f|, arg f) at an array of points; log|f| = -inf flags exact zeros."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    basis = poly.basis
    a = poly.coefficients
    if hasattr(basis, "indices"):
        if basis.m != 1 and zs.ndim == 1:
            raise ConfigError("points must be (P, m) for multivariate bases")
        pts = zs[:, None] if zs.ndim == 1 else zs
        with np.errstate(divide="ignore"):
            s = np.log(np.abs(pts))
        theta = np.angle(pts)
        out_mag = np.empty(pts.shape[0])
        out_ph = np.empty(pts.shape[0])
        noise_floor = max(1, basis.size) * 1e-15
        for p0 in range(0, pts.shape[0], 4096):
            sl = slice(p0, min(p0 + 4096, pts.shape[0]))
            e = a.log_mag[:, None] + basis.log_coeffs[:, None] + basis.indices @ s[sl].T
            ph = a.phase[:, None] + basis.indices @ theta[sl].T
            peak = np.max(e, axis=0)
            safe_peak = np.where(np.isfinite(peak), peak, 0.0)
            total = np.sum(np.exp(e - safe_peak[None, :]) * np.exp(1j * ph), axis=0)
            # cancellation below the accumulation noise is an exact zero
            dead = ~np.isfinite(peak) | (np.abs(total) <= noise_floor)
            with np.errstate(divide="ignore"):
                out_mag[sl] = np.where(
                    dead, -np.inf, safe_peak + np.log(np.where(dead, 1.0, np.abs(total)))
                )
            out_ph[sl] = np.angle(total)
        return out_mag, out_ph
    # recurrence-type basis: it supplies per-term values at the points
    lm, ph = basis.log_terms_batch(zs)
    e = lm + a.log_mag[:, None]
    alpha = ph + a.phase[:, None]
    peak = np.max(e, axis=0)
    safe_peak = np.where(np.isfinite(peak), peak, 0.0)
    total = np.sum(np.exp(e - safe_peak[None, :]) * np.exp(1j * alpha), axis=0)
    dead = ~np.isfinite(peak) | (np.abs(total) <= max(1, basis.size) * 1e-15)
    with np.errstate(divide="ignore"):
        out = np.where(
            dead, -np.inf, safe_peak + np.log(np.where(dead, 1.0, np.abs(total)))
        )
    return out, np.angle(total)


def log_modulus(poly: RandomPolynomial, z) -> float:
    """log|f(z)|; -inf marks an exact zero of the rescaled sum."""
    z = np.asarray(z, dtype=complex)
    pts = z.reshape(1) if (poly.m == 1 and z.ndim == 0) else z.reshape(1, -1)
    if poly.m == 1:
        pts = pts.reshape(-1)
    mag, _ = log_eval_points(poly, pts)
    return float(mag[0])


def coefficient_log_range(poly: RandomPolynomial) -> float:
    """Spread in nats of the combined term magnitudes log|a_j| + log c_j."""
    basis = poly.basis
    base = getattr(basis, "log_coeffs", None)
    e = poly.coefficients.log_mag + (base if base is not None else 0.0)
    finite = e[np.isfinite(e)]
    if finite.size == 0:
        return math.inf
    return float(finite.max() - finite.min())


# ---------------------------------------------------------------------------
# Aberth-Ehrlich root finding


@dataclass(frozen=True, eq=False)
class RootSet:
    """All roots with multiplicity, with log10 relative residuals."""

    roots: np.ndarray
    log10_residuals: np.ndarray
    iterations: int
    converged: bool


def _upper_hull(xs, ys):
    """Indices of the upper convex hull of (xs, ys), xs strictly increasing."""
    hull = []
    for i in range(len(xs)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def _initial_circles(log_abs, restart, d):
    """Newton-polygon moduli with evenly spread, symmetry-broken angles."""
    finite = np.flatnonzero(np.isfinite(log_abs))
    xs, ys = finite.astype(float), log_abs[finite]
    hull = _upper_hull(xs, ys)
    x0 = np.empty(d, dtype=complex)
    pos = 0
    for a, b in zip(hull, hull[1:]):
        k0, k1 = int(xs[a]), int(xs[b])
        radius = math.exp((ys[a] - ys[b]) / (k1 - k0))
        count = k1 - k0
        q = np.arange(count)
        ang = _TWO_PI * (q + 0.3 + 0.13 * pos) / count + 0.4 / d
        if restart:
            rng = np.random.default_rng(1009 + restart)
            radius *= math.exp(0.25 * (rng.random() - 0.5))
            ang = ang + rng.random() * _TWO_PI
        x0[pos : pos + count] = radius * np.exp(1j * ang)
        pos += count
    return x0


def _log_derivative(c, crev, dcoef, dcrev, d, x):
    """p'(x)/p(x) evaluated through the reversed polynomial when |x| > 1."""
    L = np.empty_like(x)
    inside = np.abs(x) <= 1.0
    if inside.any():
        xi = x[inside]
        p = np.zeros_like(xi)
        for ck in c[::-1]:
            p = p * xi + ck
        dp = np.zeros_like(xi)
        for ck in dcoef[::-1]:
            dp = dp * xi + ck
        with np.errstate(divide="ignore", invalid="ignore"):
            L[inside] = np.where(p == 0, np.inf, dp / np.where(p == 0, 1, p))
    if (~inside).any():
        xo = x[~inside]
        y = 1.0 / xo
        q = np.zeros_like(y)
        for ck in crev[::-1]:
            q = q * y + ck
        dq = np.zeros_like(y)
        for ck in dcrev[::-1]:
            dq = dq * y + ck
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(q == 0, np.inf, dq / np.where(q == 0, 1, q))
            L[~inside] = d / xo - ratio * y * y
    return L


def find_roots_log(
    log_mag,
    phase,
    tol: float = 1e-12,
    max_iter: int = 200,
    restarts: int = 3,
) -> RootSet:
    """Roots of sum_j c_j z^j given log|c_j| and arg c_j (ascending powers).

    Exact zero coefficients are allowed as log-magnitude -inf; k of them at
    the low end contribute k exact roots at the origin.  Coefficients are
    rescaled by the largest magnitude first (zeros are scale-invariant).
    """
    log_mag = np.asarray(log_mag, dtype=float)
    phase = np.asarray(phase, dtype=float)
    finite = np.isfinite(log_mag)
    if not finite.any():
        raise ConfigError("all coefficients are zero: no root set")
    k_hi = int(np.flatnonzero(finite)[-1])
    k_lo = int(np.flatnonzero(finite)[0])
    zero_roots = k_lo
    lm = log_mag[k_lo : k_hi + 1] - log_mag[finite].max()
    ph = phase[k_lo : k_hi + 1]
    d = k_hi - k_lo
    if d == 0:
        return RootSet(
            np.zeros(zero_roots, dtype=complex),
            np.full(zero_roots, -np.inf),
            0,
            True,
        )
    spread = float(lm[np.isfinite(lm)].max() - lm[np.isfinite(lm)].min())
    if spread > AP_FALLBACK_NATS + 80:
        raise RootFindingError(
            f"coefficient magnitudes span {spread:.0f} nats; "
            "root finding is ill-posed, use contour counting"
        )
    with np.errstate(under="ignore"):
        c = np.exp(lm) * np.exp(1j * ph)
    c[~np.isfinite(lm)] = 0.0
    crev = c[::-1].copy()
    dcoef = c[1:] * np.arange(1, d + 1)
    dcrev = crev[1:] * np.arange(1, d + 1)
    iterations = 0
    converged = False
    x = None
    for restart in range(restarts + 1):
        x = _initial_circles(_safe_log_abs(c), restart, d)
        for it in range(max_iter):
            iterations += 1
            L = _log_derivative(c, crev, dcoef, dcrev, d, x)
            diff = x[:, None] - x[None, :]
            np.fill_diagonal(diff, 1.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            S = inv.sum(axis=1)
            denom = L - S
            with np.errstate(divide="ignore", invalid="ignore"):
                delta = np.where(np.isfinite(denom) & (denom != 0), 1.0 / np.where(denom == 0, 1, denom), 0.0)
            delta = np.where(np.isfinite(delta), delta, 0.0)
            x = x - delta
            if np.all(np.abs(delta) <= tol * (1.0 + np.abs(x))):
                converged = True
                break
        if converged:
            break
    residuals = _log10_residuals(lm, ph, x)
    roots = np.concatenate([x, np.zeros(zero_roots, dtype=complex)])
    residuals = np.concatenate([residuals, np.full(zero_roots, -np.inf)])
    return RootSet(roots, residuals, iterations, converged)


def _safe_log_abs(c):
    with np.errstate(divide="ignore"):
        return np.log(np.abs(c))


def _log10_residuals(lm, ph, x):
    """log10 of |p(x)| / sum_j |c_j| |x|^j at each candidate root."""
    j = np.arange(lm.size)
    with np.errstate(divide="ignore"):
        log_ax = np.log(np.abs(x))
    out = np.empty(x.size)
    for i, xi in enumerate(x):
        e = lm + j * log_ax[i]
        alpha = ph + j * np.angle(xi)
        peak = np.max(e[np.isfinite(e)])
        total = np.sum(np.exp(e - peak) * np.exp(1j * alpha))
        denom = _lse(e)
        with np.errstate(divide="ignore"):
            num = peak + np.log(np.abs(total))
        out[i] = (num - denom) / math.log(10.0)
    return out


def find_roots_univariate(coeffs, tol: float = 1e-12, max_iter: int = 200) -> RootSet:
    """Roots with multiplicity of a polynomial given by complex coefficients
    (ascending powers)."""
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    if not np.any(c != 0):
        raise ConfigError("all coefficients are zero: no root set")
    return find_roots_log(_safe_log_abs(c), np.angle(c), tol=tol, max_iter=max_iter)


def roots_of(poly: RandomPolynomial, tol: float = 1e-12) -> RootSet:
    """Roots of a univariate random polynomial over a monomial-type basis."""
    basis = poly.basis
    if poly.m != 1:
        raise ConfigError("direct root finding is univariate; use slice_volume")
    if not hasattr(basis, "indices"):
        raise ConfigError("recurrence bases use comrade-matrix roots (stahltotik)")
    order = np.argsort(basis.indices[:, 0])
    lm = (poly.coefficients.log_mag + basis.log_coeffs)[order]
    ph = (poly.coefficients.phase)[order]
    return find_roots_log(lm, ph, tol=tol)


# ---------------------------------------------------------------------------
# counting


@dataclass(frozen=True)
class ZeroCount:
    """Interior count plus separately flagged boundary-adjacent roots."""

    interior: int
    boundary: int


def count_zeros_region(roots: RootSet, region: RegionSpec) -> ZeroCount:
    """Count roots inside a univariate annulus sector.

    Roots within a relative tolerance of the radial or angular boundary are
    not attributed to either side; they are returned in the boundary slot.
    """
    if region.m != 1:
        raise ConfigError("count_zeros_region is univariate")
    lo, hi = region.annuli[0]
    r = np.abs(roots.roots)
    near = (np.abs(r - lo) <= _BOUNDARY_TOL * (1 + lo)) | (
        np.abs(r - hi) <= _BOUNDARY_TOL * (1 + hi)
    )
    inside = (r > lo) & (r < hi)
    if region.sectors is not None:
        a, b = region.sectors[0]
        th = np.mod(np.angle(roots.roots), _TWO_PI)

        def ang_dist(x, y):
            d = np.abs(x - y) % _TWO_PI
            return np.minimum(d, _TWO_PI - d)

        # angular distance wraps: a root at angle 2pi - eps is on the
        # boundary of a sector starting at 0
        near_angle = (ang_dist(th, a) <= _BOUNDARY_TOL) | (
            ang_dist(th, b) <= _BOUNDARY_TOL
        )
        near |= inside & near_angle
        inside &= (th >= a) & (th < b) & ~near_angle
    return ZeroCount(int(np.sum(inside & ~near)), int(np.sum(near)))


def count_zeros_rect(roots: RootSet, a: float, b: float, half_height: float) -> int:
    """Roots in the rectangle [a, b] x [-h, h]; for measures on the line."""
    x, y = np.real(roots.roots), np.imag(roots.roots)
    return int(np.sum((x >= a) & (x <= b) & (np.abs(y) <= half_height)))


def count_zeros_argument_principle(
    poly: RandomPolynomial,
    radius: float,
    nodes: int = 256,
    max_refine: int = 14,
) -> int:
    """Zeros in the open disk |z| < radius via the winding number of f.

    The phase is accumulated by trapezoid steps; any wrapped step larger
    than pi/2 triggers midpoint refinement of that segment.  A deep dip of
    log|f| on the contour signals a root nearby, and the radius is jittered.
    """
    if poly.m != 1:
        raise ConfigError("argument-principle counting is univariate")
    d_eff = poly.size - 1
    base_nodes = max(nodes, 4 * max(d_eff, 8))
    for factor in (1.0, 1.013, 0.989, 1.021, 0.979, 1.034):
        r = radius * factor
        theta = np.linspace(0.0, _TWO_PI, base_nodes + 1)
        mag, ph = _eval_on_circle(poly, r, theta)
        if _has_contour_dip(mag):
            continue  # root too close to this contour: jitter the radius
        failed = False
        for _ in range(max_refine):
            steps = _wrap_angle(np.diff(ph))
            bad = np.abs(steps) > math.pi / 2
            if not bad.any():
                winding = float(np.sum(steps)) / _TWO_PI
                rounded = int(round(winding))
                if abs(winding - rounded) > 0.2:
                    failed = True
                    break
                return rounded
            mids = 0.5 * (theta[:-1][bad] + theta[1:][bad])
            theta = np.sort(np.concatenate([theta, mids]))
            mag, ph = _eval_on_circle(poly, r, theta)
            if _has_contour_dip(mag):
                failed = True
                break
        if failed:
            continue
    raise RootFindingError(
        f"argument-principle count failed near radius {radius}: persistent "
        "root on contour or non-converging phase steps"
    )


def _eval_on_circle(poly, r, theta):
    zs = r * np.exp(1j * theta)
    return log_eval_points(poly, zs)


def _has_contour_dip(mag):
    finite = mag[np.isfinite(mag)]
    if finite.size < mag.size:
        return True
    return bool(np.min(finite) < np.median(finite) - 30.0)


def _wrap_angle(a):
    return (a + math.pi) % _TWO_PI - math.pi


def count_zeros_annulus_ap(poly: RandomPolynomial, r_lo: float, r_hi: float) -> int:
    """Zeros with r_lo < |z| < r_hi via two contour counts (full angle only)."""
    return count_zeros_argument_principle(poly, r_hi) - count_zeros_argument_principle(
        poly, r_lo
    )


def angular_ks_statistic(roots: RootSet) -> float:
    """Kolmogorov-Smirnov distance of root angles from the uniform law."""
    th = np.sort(np.mod(np.angle(roots.roots), _TWO_PI)) / _TWO_PI
    n = th.size
    if n == 0:
        return 0.0
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - th), np.max(th - (i - 1) / n)))


# ---------------------------------------------------------------------------
# L1 field distance


@dataclass(frozen=True)
class L1Distance:
    value: float
    excluded_points: int


def l1_distance_field(
    poly: RandomPolynomial,
    ev: ExtremalEvaluator,
    region: RegionSpec,
    grid_resolution: int = 24,
) -> L1Distance:
    """Cell-volume-weighted mean of |(1/n) log|f| - V| over a region grid.

    Grid points where the rescaled sum is exactly zero are excluded (a
    measure-zero set); their count is reported.
    """
    if region.m != poly.m:
        raise ConfigError("region and polynomial dimensions differ")
    if region.is_degenerate():
        warnings.warn("zero-volume region: L1 distance is trivially 0")
        return L1Distance(0.0, 0)
    m = region.m
    widths = region.sector_widths()
    axes_r, axes_t, axis_weights = [], [], []
    for k, (lo, hi) in enumerate(region.annuli):
        r_edges = np.linspace(lo, hi, grid_resolution + 1)
        r_mid = 0.5 * (r_edges[:-1] + r_edges[1:])
        t0 = 0.0 if region.sectors is None else region.sectors[k][0]
        t_edges = np.linspace(t0, t0 + widths[k], grid_resolution + 1)
        t_mid = 0.5 * (t_edges[:-1] + t_edges[1:])
        axes_r.append(r_mid)
        axes_t.append(t_mid)
        # r * dr * dtheta per (radial, angular) cell of this coordinate
        axis_weights.append(
            r_mid[:, None] * np.diff(r_edges)[:, None] * np.diff(t_edges)[None, :]
        )
    mesh = np.meshgrid(*(axes_r + axes_t), indexing="ij")
    pts = np.stack(
        [mesh[k] * np.exp(1j * mesh[m + k]) for k in range(m)], axis=-1
    ).reshape(-1, m)
    w_field = np.ones(tuple([grid_resolution] * (2 * m)))
    for k in range(m):
        shape = [1] * (2 * m)
        shape[k] = grid_resolution
        shape[m + k] = grid_resolution
        w_field = w_field * axis_weights[k].reshape(shape)
    w = w_field.reshape(-1)
    mag, _ = log_eval_points(poly, pts if m > 1 else pts[:, 0])
    v = ev.profile_values(np.log(np.abs(pts)))
    ok = np.isfinite(mag)
    diff = np.abs(mag[ok] / poly.n - v[ok])
    total_w = float(np.sum(w[ok]))
    value = float(np.sum(diff * w[ok]) / total_w) if total_w > 0 else 0.0
    return L1Distance(value, int(np.sum(~ok)))


# ---------------------------------------------------------------------------
# coordinate-slice volume for m >= 2


@dataclass(frozen=True)
class SliceVolumeEstimate:
    value: float
    stderr: float
    per_axis: tuple


def _radical_inverse(i: int, base: int) -> float:
    inv, denom = 0.0, 1.0
    while i > 0:
        denom *= base
        i, rem = divmod(i, base)
        inv += rem / denom
    return inv


_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def slice_volume(
    poly: RandomPolynomial, region: RegionSpec, base_samples: int = 64
) -> SliceVolumeEstimate:
    """Estimated (2m-2)-volume of the zero divisor inside a product region.

    For each coordinate axis, the number of zeros of the univariate
    restriction to lines parallel to that axis is averaged over
    low-discrepancy base points of the complementary product region, then
    weighted by that region's Euclidean volume.
    """
    m = poly.m
    if m < 2:
        raise ConfigError("slice_volume requires dimension >= 2")
    if region.m != m:
        raise ConfigError("region and polynomial dimensions differ")
    basis = poly.basis
    if not hasattr(basis, "indices"):
        raise ConfigError("slice_volume needs a monomial-type basis")
    widths = region.sector_widths()
    contributions, stderrs = [], []
    for k in range(m):
        others = [l for l in range(m) if l != k]
        vol_base = 1.0
        for l in others:
            lo, hi = region.annuli[l]
            vol_base *= widths[l] / 2.0 * (hi * hi - lo * lo)
        counts = np.empty(base_samples)
        for i in range(base_samples):
            count = None
            for attempt in range(3):
                shift = 0.38196601125 * attempt  # golden-ratio reshuffle on retry
                w_point = np.empty(m - 1, dtype=complex)
                for pos, l in enumerate(others):
                    lo, hi = region.annuli[l]
                    u = (_radical_inverse(i + 1, _PRIMES[2 * pos]) + shift) % 1.0
                    v = (_radical_inverse(i + 1, _PRIMES[2 * pos + 1]) + shift) % 1.0
                    r = math.sqrt(lo * lo + u * (hi * hi - lo * lo))
                    t0 = 0.0 if region.sectors is None else region.sectors[l][0]
                    w_point[pos] = r * np.exp(1j * (t0 + v * widths[l]))
                count = _count_on_slice(poly, region, k, others, w_point)
                if count is not None:
                    break
            if count is None:
                raise RootFindingError(
                    "restriction vanished identically on resampled slice lines"
                )
            counts[i] = count
        contributions.append(float(np.mean(counts)) * vol_base)
        nb = min(8, base_samples)
        batches = np.array_split(counts, nb)
        means = np.array([b.mean() for b in batches])
        se = float(np.std(means, ddof=1) / math.sqrt(nb)) * vol_base if nb > 1 else 0.0
        stderrs.append(se)
    value = float(np.sum(contributions))
    stderr = float(math.sqrt(sum(s * s for s in stderrs)))
    return SliceVolumeEstimate(value, stderr, tuple(contributions))


def _count_on_slice(poly, region, k, others, w_point) -> Optional[int]:
    """Zeros of the restriction to the z_k line through w inside annulus k."""
    basis = poly.basis
    n = poly.n
    J = basis.indices
    with np.errstate(divide="ignore"):
        log_w = np.log(np.abs(w_point))
    th_w = np.angle(w_point)
    e = poly.coefficients.log_mag + basis.log_coeffs + J[:, others] @ log_w
    alpha = poly.coefficients.phase + J[:, others] @ th_w
    jk = J[:, k]
    peaks = np.full(n + 1, -np.inf)
    np.maximum.at(peaks, jk, e)
    acc = np.zeros(n + 1, dtype=complex)
    finite = np.isfinite(e)
    safe = np.where(np.isfinite(peaks), peaks, 0.0)
    np.add.at(acc, jk[finite], np.exp(e[finite] - safe[jk[finite]]) * np.exp(1j * alpha[finite]))
    with np.errstate(divide="ignore"):
        lm = safe + np.log(np.abs(acc))
    lm[~np.isfinite(peaks)] = -np.inf
    if not np.any(np.isfinite(lm)):
        return None  # identically-zero restriction: caller resamples the line
    finite_lm = lm[np.isfinite(lm)]
    lo, hi = region.annuli[k]
    sector = None if region.sectors is None else (region.sectors[k],)
    sub_region = RegionSpec(((lo, hi),), sector)
    if finite_lm.max() - finite_lm.min() > AP_FALLBACK_NATS:
        if region.sectors is not None:
            raise RootFindingError("contour fallback only covers full-angle regions")
        sub_poly = _line_poly(lm, np.angle(acc))
        return count_zeros_annulus_ap(sub_poly, lo, hi)
    roots = find_roots_log(lm, np.angle(acc))
    return count_zeros_region(roots, sub_region).interior


def _line_poly(lm, ph):
    from .onb import monomial_basis

    basis = monomial_basis(lm.size - 1, 1)
    return RandomPolynomial(basis, Coefficients(lm, ph))


# ---------------------------------------------------------------------------
# dominance certificate


def dominance_certificate(poly: RandomPolynomial, region: RegionSpec, basis=None) -> bool:
    """Sufficient condition for a zero-free region: one term dominates.

    With j* maximizing log|a_j| + inf_U log|P_j| over the region, the
    certificate holds when

        ||a'|| * sup_U S_n(z,z)^{1/2}  <  |a_{j*}| * inf_U |P_{j*}|,

    where a' drops coordinate j*.  For monomial bases on annulus products
    the infimum is c_J prod (r_k^-)^{J_k} and the Bergman diagonal is
    coordinate-wise increasing in the radii, so its supremum sits at the
    outer corner.  True certifies that f has no zeros in the region.
    """
    basis = poly.basis if basis is None else basis
    if not hasattr(basis, "indices"):
        raise ConfigError("dominance certificate needs a monomial-type basis")
    if region.m != poly.m:
        raise ConfigError("region and polynomial dimensions differ")
    r_lo = np.log(np.array([a for a, _ in region.annuli]))
    r_hi = np.log(np.array([b for _, b in region.annuli]))
    log_b = basis.log_coeffs + basis.indices @ r_lo
    score = poly.coefficients.log_mag + log_b
    j_star = int(np.argmax(score))
    if not np.isfinite(score[j_star]):
        return False
    others = np.delete(poly.coefficients.log_mag, j_star)
    finite = others[np.isfinite(others)]
    if finite.size == 0:
        return True
    log_norm_rest = 0.5 * _lse(2.0 * finite)
    log_sup_kernel = 0.5 * _lse(2.0 * (basis.log_coeffs + basis.indices @ r_hi))
    return bool(log_norm_rest + log_sup_kernel < score[j_star])
