"""Orthonormal monomial bases for weighted inner products.

For a multi-circular weight, monomials are already orthogonal under

    <f, g>_n = integral f conj(g) e^{-2nQ} dV,

so the degree-n orthonormal basis is c_J z^J with

    c_J = ( integral |z^J|^2 e^{-2nQ} dV )^{-1/2}.

Moments reduce to radial integrals; in log-radial coordinates s = log r the
integrand is exp((2j+2)s - 2n q(e^s)) per axis, integrated by adaptive
15-point Gauss-Legendre panels and truncated where the log-integrand drops
40 nats below its peak.  Everything is kept in natural-log space: the
coefficients overflow any fixed-precision float long before the degrees of
interest.

The scaled monomials multinomial(n, J)^{1/2} z^J of the projective (elliptic)
ensemble are produced directly from log-Gamma; they drop a global per-degree
constant relative to true unit norms, which rescales every basis element
equally and therefore moves no zero of any linear combination.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, roots_legendre

from .errors import ConfigError, QuadratureError
from .extremal import ExtremalEvaluator
from .weights import WeightHandle

_GL_NODES, _GL_WEIGHTS = roots_legendre(15)
_TRUNCATION_NATS = 40.0
_NEGLIGIBLE_NATS = 60.0


def _lse(values: np.ndarray) -> float:
    values = np.asarray(values, dtype=float)
    peak = np.max(values)
    if not np.isfinite(peak):
        return float(peak)
    return float(peak + np.log(np.sum(np.exp(values - peak))))


# ---------------------------------------------------------------------------
# multi-indices


@dataclass(frozen=True, eq=False)
class MultiIndexSet:
    """All J in N^m with |J| <= n, lexicographically ordered."""

    n: int
    m: int
    indices: np.ndarray  # (d, m) int64

    @property
    def count(self) -> int:
        return self.indices.shape[0]


def multi_index_set(n: int, m: int) -> MultiIndexSet:
    if n < 0 or m < 1:
        raise ConfigError("need degree >= 0 and dimension >= 1")
    axes = [np.arange(n + 1, dtype=np.int64)] * m
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m)
    mesh = mesh[mesh.sum(axis=1) <= n]
    return MultiIndexSet(n, m, mesh)


def dimension_of_degree(n: int, m: int) -> int:
    return math.comb(n + m, m)


# ---------------------------------------------------------------------------
# bases


@dataclass(frozen=True, eq=False)
class _MonomialTypeBasis:
    """Shared surface of bases whose elements are scaled monomials c_J z^J."""

    n: int
    m: int
    indices: np.ndarray  # (d, m)
    log_coeffs: np.ndarray  # (d,) natural log of c_J

    @property
    def size(self) -> int:
        return self.indices.shape[0]

    def log_terms(self, z):
        """(log |P_j(z)|, arg P_j(z)) arrays at one point of C^m.

        Coordinates at zero kill every term with a positive exponent there.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        r = np.abs(z)
        theta = np.angle(z)
        log_mag = self.log_coeffs.copy()
        zero = r == 0.0
        if zero.any():
            alive = ~(self.indices[:, zero] > 0).any(axis=1)
            log_mag = np.where(alive, log_mag, -np.inf)
            s = np.where(zero, 0.0, np.log(np.where(zero, 1.0, r)))
        else:
            s = np.log(r)
        log_mag = log_mag + self.indices @ s
        phase = self.indices @ theta
        return log_mag, phase


@dataclass(frozen=True, eq=False)
class WeightedONB(_MonomialTypeBasis):
    """Unit-norm monomial basis for a weighted inner product at degree n."""

    weight: WeightHandle = None
    quad_rel_tol: float = 0.0
    quad_max_panels: int = 0
    quad_error_estimate: float = 0.0


@dataclass(frozen=True, eq=False)
class EllipticONB(_MonomialTypeBasis):
    """Scaled monomials multinomial(n, J)^{1/2} z^J of the projective ensemble."""


@dataclass(frozen=True, eq=False)
class MonomialBasis(_MonomialTypeBasis):
    """Plain monomials z^J (all log-coefficients zero); the Kac-style basis."""


def monomial_basis(n: int, m: int = 1) -> MonomialBasis:
    idx = multi_index_set(n, m)
    return MonomialBasis(n, m, idx.indices, np.zeros(idx.count))


# ---------------------------------------------------------------------------
# radial moments by adaptive panel quadrature in log space


def _log_window(logf, lo=-30.0, hi=30.0):
    """Bracket where the log-integrand is within 40 nats of its peak."""
    for _ in range(4):
        s = np.linspace(lo, hi, 3001)
        g = logf(s)
        i = int(np.argmax(g))
        if i == 0:
            lo -= (hi - lo)
            continue
        if i == len(s) - 1:
            hi += (hi - lo)
            continue
        break
    else:
        raise QuadratureError("could not bracket the integrand peak")
    peak = g[i]
    keep = g >= peak - _TRUNCATION_NATS
    step = s[1] - s[0]
    left = s[np.argmax(keep)] - step
    right = s[len(s) - 1 - np.argmax(keep[::-1])] + step
    return left, right, float(peak)


def _panel_log_integral(logf, a, b):
    half = 0.5 * (b - a)
    s = 0.5 * (a + b) + half * _GL_NODES
    g = logf(s)
    return _lse(g + np.log(_GL_WEIGHTS * half)), float(np.max(g))


def _adaptive_log_quad(logf, lo, hi, peak, rel_tol, max_panels, min_panels):
    """log of integral exp(logf(s)) ds over [lo, hi]."""
    edges = np.linspace(lo, hi, max(min_panels, 4) + 1)
    stack = [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]
    accepted = []
    worst = 0.0
    used = len(stack)
    while stack:
        a, b = stack.pop()
        whole, g_max = _panel_log_integral(logf, a, b)
        if g_max < peak - _NEGLIGIBLE_NATS:
            accepted.append(whole)
            continue
        mid = 0.5 * (a + b)
        left, _ = _panel_log_integral(logf, a, mid)
        right, _ = _panel_log_integral(logf, mid, b)
        halves = np.logaddexp(left, right)
        err = abs(whole - halves)
        if err <= rel_tol:
            accepted.append(halves)
            worst = max(worst, err)
            continue
        used += 2
        if used > max_panels:
            raise QuadratureError(
                f"panel refinement exceeded the cap of {max_panels} panels"
            )
        stack.append((a, mid))
        stack.append((mid, b))
    return _lse(np.array(accepted)), worst


def _axis_log_moment(j, n, w, k, rel_tol, max_panels, min_panels):
    """log of 2*pi * integral_0^inf r^{2j+1} e^{-2n q_k(r)} dr."""
    profile = w.log_profile()

    def logf(s):
        return (2.0 * j + 2.0) * np.asarray(s, dtype=float) - 2.0 * n * np.asarray(
            profile.axis_evaluator(s, k), dtype=float
        )

    lo, hi, peak = _log_window(logf)
    val, err = _adaptive_log_quad(logf, lo, hi, peak, rel_tol, max_panels, min_panels)
    return math.log(2.0 * math.pi) + val, err


def _fs_log_moment(J: np.ndarray, n: int, m: int) -> float:
    """Closed-form moment under the projective measure (1+||z||^2)^{-(n+m+1)}."""
    total = int(np.sum(J))
    return float(
        m * math.log(math.pi)
        + np.sum(gammaln(np.asarray(J) + 1.0))
        + gammaln(n - total + 1.0)
        - gammaln(n + m + 1.0)
    )


def _tensor_log_moment(J, n, w, rel_tol, max_panels):
    """Tensor-product quadrature for non-separable profiles (custom weights)."""
    m = w.dimension
    profile = w.log_profile()
    J = np.asarray(J, dtype=float)

    def log_integrand(S):
        return S @ (2.0 * J + 2.0) - 2.0 * n * np.asarray(profile(S), dtype=float)

    # peak by coordinate-descent on a coarse lattice
    s_star = np.zeros(m)
    for _ in range(20):
        moved = False
        for k in range(m):
            grid = np.linspace(-20.0, 20.0, 801)
            pts = np.tile(s_star, (grid.size, 1))
            pts[:, k] = grid
            vals = log_integrand(pts)
            best = grid[int(np.argmax(vals))]
            if abs(best - s_star[k]) > 1e-9:
                s_star[k] = best
                moved = True
        if not moved:
            break
    peak = float(log_integrand(s_star[None, :])[0])
    windows = []
    for k in range(m):
        def axis_f(s, k=k):
            pts = np.tile(s_star, (np.size(s), 1))
            pts[:, k] = s
            return log_integrand(pts)

        lo, hi, _ = _log_window(axis_f)
        windows.append((lo, hi))

    def composite(panels_per_axis):
        nodes, logw = [], []
        for lo, hi in windows:
            edges = np.linspace(lo, hi, panels_per_axis + 1)
            ns, ws = [], []
            for i in range(panels_per_axis):
                half = 0.5 * (edges[i + 1] - edges[i])
                ns.append(0.5 * (edges[i] + edges[i + 1]) + half * _GL_NODES)
                ws.append(np.log(_GL_WEIGHTS * half))
            nodes.append(np.concatenate(ns))
            logw.append(np.concatenate(ws))
        mesh = np.stack(np.meshgrid(*nodes, indexing="ij"), axis=-1).reshape(-1, m)
        wsum = np.stack(np.meshgrid(*logw, indexing="ij"), axis=-1).reshape(-1, m).sum(axis=1)
        return _lse(log_integrand(mesh) + wsum)

    per_axis = max(4, min(12, max_panels // (4 * m)))
    coarse = composite(per_axis)
    fine = composite(2 * per_axis)
    if abs(coarse - fine) > max(rel_tol, 1e-9) * 100:
        raise QuadratureError("tensor quadrature did not stabilize; refine by hand")
    return m * math.log(2.0 * math.pi) + fine, abs(coarse - fine)


def radial_moment(
    J,
    n: int,
    w: WeightHandle,
    rel_tol: float = 1e-12,
    max_panels: int = 512,
    min_panels: int = 8,
) -> float:
    """log of integral |z^J|^2 e^{-2nQ} dV over C^m.

    Fubini-Study weights use the closed projective-measure form; separable
    weights factor into per-axis integrals; other weights fall back to
    tensor-product quadrature.
    """
    J = np.atleast_1d(np.asarray(J, dtype=np.int64))
    m = w.dimension
    if J.size != m:
        raise ConfigError(f"multi-index has {J.size} entries, weight dimension is {m}")
    if np.any(J < 0) or int(J.sum()) > n:
        raise ConfigError("multi-index must be nonnegative with |J| <= n")
    if w.growth_exempt:
        return _fs_log_moment(J, n, m)
    if w.separable:
        total = 0.0
        for k in range(m):
            val, _ = _axis_log_moment(int(J[k]), n, w, k, rel_tol, max_panels, min_panels)
            total += val
        return total
    val, _ = _tensor_log_moment(J, n, w, rel_tol, max_panels)
    return val


def build_onb(
    n: int,
    w: WeightHandle,
    rel_tol: float = 1e-12,
    max_panels: int = 512,
    min_panels: int = 8,
) -> WeightedONB:
    """Degree-n orthonormal basis: log c_J = -moment(J)/2 for every |J| <= n."""
    idx = multi_index_set(n, w.dimension)
    J = idx.indices
    worst = 0.0
    if w.growth_exempt:
        log_moments = np.array([_fs_log_moment(row, n, w.dimension) for row in J])
    elif w.separable:
        axis_tables = np.empty((w.dimension, n + 1))
        for k in range(w.dimension):
            for j in range(n + 1):
                axis_tables[k, j], err = _axis_log_moment(
                    j, n, w, k, rel_tol, max_panels, min_panels
                )
                worst = max(worst, err)
        log_moments = np.zeros(idx.count)
        for k in range(w.dimension):
            log_moments += axis_tables[k, J[:, k]]
    else:
        vals = []
        for row in J:
            val, err = _tensor_log_moment(row, n, w, rel_tol, max_panels)
            vals.append(val)
            worst = max(worst, err)
        log_moments = np.array(vals)
    return WeightedONB(
        n,
        w.dimension,
        J,
        -0.5 * log_moments,
        weight=w,
        quad_rel_tol=rel_tol,
        quad_max_panels=max_panels,
        quad_error_estimate=worst,
    )


def elliptic_onb(n: int, m: int, homogeneous_only: bool = False) -> EllipticONB:
    """Scaled monomials with log-coefficients log(multinomial(n, J)) / 2."""
    if n < 0:
        raise ConfigError("degree must be >= 0")
    idx = multi_index_set(n, m)
    J = idx.indices
    if homogeneous_only:
        J = J[J.sum(axis=1) == n]
    total = J.sum(axis=1)
    log_c = 0.5 * (
        gammaln(n + 1.0) - gammaln(n - total + 1.0) - gammaln(J + 1.0).sum(axis=1)
    )
    return EllipticONB(n, m, J, log_c)


# ---------------------------------------------------------------------------
# Bergman kernel diagonal


def bergman_diag(basis, z) -> float:
    """log S_n(z, z) = log sum_j |P_j(z)|^2, by max-shifted accumulation."""
    log_mag, _ = basis.log_terms(z)
    return _lse(2.0 * log_mag)


def bergman_diag_batch(basis, S: np.ndarray) -> np.ndarray:
    """log S_n at log-radius rows S (P, m); monomial-type bases only."""
    S = np.atleast_2d(np.asarray(S, dtype=float))
    e = 2.0 * (basis.log_coeffs[:, None] + basis.indices @ S.T)
    peak = np.max(e, axis=0)
    return peak + np.log(np.sum(np.exp(e - peak[None, :]), axis=0))


@dataclass(frozen=True)
class BergmanReport:
    degrees: tuple
    sup_errors: tuple
    flags: tuple  # human-readable non-decrease warnings


def bergman_convergence_report(
    w: WeightHandle, degrees, grid, ev: ExtremalEvaluator
) -> BergmanReport:
    """Per degree, sup over the grid of |(1/2n) log S_n - V|; flags non-decrease.

    grid is an array of points of C^m (complex, shape (P,) when m = 1 or
    (P, m)); points must avoid the coordinate axes.
    """
    degrees = [int(d) for d in degrees]
    if any(b <= a for a, b in zip(degrees, degrees[1:])):
        raise ConfigError("degrees must be strictly increasing")
    pts = np.atleast_1d(np.asarray(grid, dtype=complex))
    if pts.ndim == 1:
        pts = pts[:, None]
    S = np.log(np.abs(pts))
    v_ref = ev.profile_values(S)
    sups = []
    for n in degrees:
        basis = build_onb(n, w)
        half_log = bergman_diag_batch(basis, S) / (2.0 * n)
        sups.append(float(np.max(np.abs(half_log - v_ref))))
    flags = tuple(
        f"sup error did not decrease from degree {a} to {b}"
        for a, b, ea, eb in zip(degrees, degrees[1:], sups, sups[1:])
        if eb >= ea
    )
    return BergmanReport(tuple(degrees), tuple(sups), flags)


# ---------------------------------------------------------------------------
# CSV round trip


def save_onb_csv(basis, path):
    """Write (j_1 .. j_m, log_c) rows; floats use shortest round-trip form."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"j_{k+1}" for k in range(basis.m)] + ["log_c"])
        for row, lc in zip(basis.indices, basis.log_coeffs):
            writer.writerow([*(int(v) for v in row), repr(float(lc))])


def load_onb_csv(path) -> _MonomialTypeBasis:
    """Reload a basis table; values round-trip bit-exactly through repr."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        m = len(header) - 1
        idx_rows, coeff_rows = [], []
        for row in reader:
            idx_rows.append([int(v) for v in row[:m]])
            coeff_rows.append(float(row[m]))
    indices = np.asarray(idx_rows, dtype=np.int64)
    log_coeffs = np.asarray(coeff_rows, dtype=float)
    n = int(indices.sum(axis=1).max()) if len(indices) else 0
    return _MonomialTypeBasis(n, m, indices, log_coeffs)
