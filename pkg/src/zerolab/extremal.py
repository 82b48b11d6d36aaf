"""Extremal functions of multi-circular weights via discrete convex conjugation.

In log-radial coordinates S = (log r_1, ..., log r_m) the extremal function
of a circular weight is the double Legendre-Fenchel conjugate of the profile
Phi(S) = Q(e^{s_1}, ..., e^{s_m}):

    Phi*(T) = sup_S  <S,T> - Phi(S)          (slopes T in the unit simplex)
    Psi(S)  = sup_T  <S,T> - Phi*(T)         (= V at log-radii S)

Both sups run over uniform grids; the slope domain is the simplex
{t_k >= 0, sum t_k <= 1} because total degree at most n makes normalized
exponents J/n range over it, and the Lelong growth bound caps the gradient
there.  For additively separable profiles (weyl, power) the conjugate
factors through per-axis 1-d transforms.

The m = 1 equilibrium distribution comes out of the slope: the mass of the
closed disk of radius r is Psi'(log r).  For m >= 2, region masses integrate
the Laplacian of V by central finite differences in the radii against
Euclidean volume, normalized so that

    mass(U) = (1/2pi) * integral_U laplacian(V) dV.

With the Euclidean Kaehler form this normalization makes region masses and
the coordinate-slice volume estimator mutually consistent, and reduces to
the usual equilibrium measure when m = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, ConjugationError
from .weights import LogRadialProfile, WeightHandle

DEFAULT_S_BOX = (-8.0, 8.0)
_FLAT_TOL = 1e-9
_CDF_STEP = 0.02
_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# grids


def simplex_grid(m: int, resolution: int) -> np.ndarray:
    """Lattice {i/resolution : i in N^m, sum i <= resolution}, lex ordered."""
    axes = [np.arange(resolution + 1)] * m
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m)
    mesh = mesh[mesh.sum(axis=1) <= resolution]
    return mesh.astype(float) / resolution


def discrete_conjugate(s_points, values, t_points):
    """max_s (s*t - values(s)) for each t, with argmax indices.

    One-dimensional building block; s_points and t_points are 1-d arrays.
    """
    s = np.asarray(s_points, dtype=float)
    v = np.asarray(values, dtype=float)
    t = np.asarray(t_points, dtype=float)
    table = s[:, None] * t[None, :] - v[:, None]
    idx = np.argmax(table, axis=0)
    return table[idx, np.arange(t.size)], idx


# ---------------------------------------------------------------------------
# conjugate table


@dataclass(frozen=True)
class ConjugateTable:
    """Discrete Legendre-Fenchel data Phi* on a simplex slope grid."""

    m: int
    t_grid: np.ndarray  # (G, m), lex ordered
    values: np.ndarray  # (G,)
    s_box: tuple
    s_count: int
    t_resolution: int
    axis_slope_max: np.ndarray  # (m,) estimated max |dPhi*/dt_k|

    @property
    def t_spacing(self) -> float:
        return 1.0 / self.t_resolution

    def value_at_zero(self) -> float:
        """Phi*(0) = -inf Phi; nonpositive whenever Q >= 0."""
        zero_row = int(np.flatnonzero(~self.t_grid.any(axis=1))[0])
        return float(self.values[zero_row])


def _check_axis_boundary(col_vals: np.ndarray, idx: np.ndarray, t_axis, label: str):
    """Reject argmaxes pinned to the s-box edge unless the maximand is flat there.

    Slope 0 is exempt at the lower edge: its maximand -Phi(S) legitimately
    climbs toward s -> -inf wherever the profile decays, and the edge value
    already approximates the supremum -inf Phi.
    """
    n_s = col_vals.shape[0]
    bad = []
    for j, i in enumerate(idx):
        if i == 0:
            if t_axis[j] == 0.0:
                continue
            inner = col_vals[1, j]
        elif i == n_s - 1:
            inner = col_vals[n_s - 2, j]
        else:
            continue
        edge = col_vals[i, j]
        if edge - inner > _FLAT_TOL * max(1.0, abs(edge)):
            bad.append(j)
    if bad:
        raise ConjugationError(
            f"conjugation maximand still increasing at the s-box boundary "
            f"({label}, {len(bad)} slope(s), first t = {t_axis[bad[0]]:g}); "
            f"enlarge s_box"
        )


def _golden_refine_max(f, lo, hi, iters: int = 60):
    """Vectorized golden-section maximization of f over brackets [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a = lo.astype(float).copy()
    b = hi.astype(float).copy()
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc > fd  # maximum lies in [a, d]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_old, d_old = c, d
        fc_old, fd_old = fc, fd
        new_c = b - invphi * (b - a)
        new_d = a + invphi * (b - a)
        probe = np.where(left, new_c, new_d)
        fp = f(probe)
        c = np.where(left, new_c, d_old)
        fc = np.where(left, fp, fd_old)
        d = np.where(left, c_old, new_d)
        fd = np.where(left, fc_old, fp)
    return np.maximum(fc, fd)


def conjugate_profile(
    profile: LogRadialProfile,
    s_box: tuple = DEFAULT_S_BOX,
    t_resolution: Optional[int] = None,
    s_count: Optional[int] = None,
) -> ConjugateTable:
    """Tabulate Phi* over the simplex slope grid.

    Separable profiles conjugate per axis and sum; otherwise the sup runs
    over the full tensor lattice of the s-box.  An argmax that sits on the
    s-box boundary with outward-increasing values raises ConjugationError
    (the box is too small for that slope).
    """
    m = profile.dimension
    if t_resolution is None:
        t_resolution = 1024 if m == 1 else 128
    if s_count is None:
        if profile.separable or m == 1:
            s_count = 2048 if m == 1 else 256
        else:
            s_count = 256 if m <= 2 else 64
    lo, hi = float(s_box[0]), float(s_box[1])
    if not lo < hi:
        raise ConfigError("s_box must satisfy lo < hi")
    s = np.linspace(lo, hi, s_count)
    t_grid = simplex_grid(m, t_resolution)
    t_axis = np.arange(t_resolution + 1, dtype=float) / t_resolution

    if profile.separable and profile.axis_evaluator is not None:
        axis_vals = np.empty((m, t_resolution + 1))
        slopes = np.empty(m)
        for k in range(m):
            phi_k = np.asarray(profile.axis_evaluator(s, k), dtype=float)
            col = s[:, None] * t_axis[None, :] - phi_k[:, None]
            idx = np.argmax(col, axis=0)
            _check_axis_boundary(col, idx, t_axis, f"axis {k}")
            grid_vals = col[idx, np.arange(t_axis.size)]
            # sub-grid refinement between the argmax's neighbors; skips
            # columns pinned to the s-box edge (their sup sits at the edge)
            interior = (idx > 0) & (idx < s_count - 1)
            if interior.any():
                t_in = t_axis[interior]

                def maximand(sig, t_in=t_in, k=k):
                    return sig * t_in - np.asarray(
                        profile.axis_evaluator(sig, k), dtype=float
                    )

                refined = _golden_refine_max(
                    maximand, s[idx[interior] - 1], s[idx[interior] + 1]
                )
                grid_vals[interior] = np.maximum(grid_vals[interior], refined)
            axis_vals[k] = grid_vals
            slopes[k] = np.max(np.abs(np.diff(axis_vals[k]))) * t_resolution
        idx_grid = np.rint(t_grid * t_resolution).astype(int)
        values = np.zeros(len(t_grid))
        for k in range(m):
            values += axis_vals[k][idx_grid[:, k]]
        return ConjugateTable(m, t_grid, values, (lo, hi), s_count, t_resolution, slopes)

    # tensor-lattice sup for non-separable profiles
    mesh = np.stack(np.meshgrid(*([s] * m), indexing="ij"), axis=-1).reshape(-1, m)
    phi = np.asarray(profile(mesh), dtype=float)
    values = np.full(len(t_grid), -np.inf)
    arg = np.zeros(len(t_grid), dtype=np.int64)
    block = max(1, int(2e7) // max(1, len(mesh)))
    for g0 in range(0, len(t_grid), block):
        tb = t_grid[g0 : g0 + block]
        table = mesh @ tb.T - phi[:, None]
        idx = np.argmax(table, axis=0)
        values[g0 : g0 + block] = table[idx, np.arange(tb.shape[0])]
        arg[g0 : g0 + block] = idx
    # argmax on a face of the s-box must be flat outward
    coords = np.stack(np.unravel_index(arg, (s_count,) * m), axis=-1)
    on_face = (coords == 0) | (coords == s_count - 1)
    step = (hi - lo) / (s_count - 1)
    for g in np.flatnonzero(on_face.any(axis=1)):
        sg, tg = mesh[arg[g]], t_grid[g]
        edge_val = float(sg @ tg - phi[arg[g]])
        for k in np.flatnonzero(on_face[g]):
            if coords[g, k] == 0 and tg[k] == 0.0:
                continue  # slope 0 along this axis: benign escape to -inf
            inner = sg.copy()
            inner[k] += step if coords[g, k] == 0 else -step
            inner_val = float(inner @ tg) - float(profile(inner[None, :])[0])
            if edge_val - inner_val > _FLAT_TOL * max(1.0, abs(edge_val)):
                raise ConjugationError(
                    f"conjugation maximand still increasing at the s-box "
                    f"boundary (slope grid row {g}); enlarge s_box"
                )
    # per-axis slope estimate from simplex edges t = u * e_k
    slopes = np.empty(m)
    for k in range(m):
        edge_rows = np.flatnonzero(
            np.all(np.delete(t_grid, k, axis=1) == 0.0, axis=1)
        )
        order = np.argsort(t_grid[edge_rows, k])
        vals_k = values[edge_rows[order]]
        diffs = np.abs(np.diff(vals_k))
        slopes[k] = diffs.max() * t_resolution if diffs.size else 0.0
    return ConjugateTable(m, t_grid, values, (lo, hi), s_count, t_resolution, slopes)


# ---------------------------------------------------------------------------
# evaluator


def _chunked_sup(S: np.ndarray, T: np.ndarray, c: np.ndarray, want_arg=False):
    """Row-wise max of S @ T.T - c, blocked to bound memory."""
    P, G = S.shape[0], T.shape[0]
    best = np.full(P, -np.inf)
    arg = np.zeros(P, dtype=np.int64) if want_arg else None
    bs = max(1, min(P, int(3e7) // max(G, 1)))
    for p0 in range(0, P, bs):
        Sb = S[p0 : p0 + bs]
        vals = Sb @ T.T - c[None, :]
        idx = np.argmax(vals, axis=1)
        best[p0 : p0 + bs] = vals[np.arange(Sb.shape[0]), idx]
        if want_arg:
            arg[p0 : p0 + bs] = idx
    return (best, arg) if want_arg else best


def _sup_tree(S, T, c, pt_idx, t_idx, out):
    """Exact sup of <S,T> - c over rows t_idx, written into out[pt_idx].

    Discards rows dominated over the entire bounding box of the points by
    the supporting plane of some box corner (ties drop too, but the corner
    argmax rows are re-added, so the sup value is unchanged), then splits
    the box along its widest side and recurses.
    """
    pts = S[pt_idx]
    if pt_idx.size <= 512 or t_idx.size <= 1024:
        out[pt_idx] = _chunked_sup(pts, T[t_idx], c[t_idx])
        return
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    m = S.shape[1]
    corners = np.stack(
        np.meshgrid(*[(l, h) for l, h in zip(lo, hi)], indexing="ij"), axis=-1
    ).reshape(-1, m)
    Tg, cg = T[t_idx], c[t_idx]
    corner_vals = corners @ Tg.T - cg[None, :]
    g_star = np.argmax(corner_vals, axis=1)
    keep = np.ones(t_idx.size, dtype=bool)
    for ci, g in enumerate(g_star):
        diff = Tg - Tg[g]
        box_max = np.where(diff > 0, hi[None, :] * diff, lo[None, :] * diff).sum(axis=1)
        keep &= box_max - (cg - cg[g]) > 0.0
    keep[g_star] = True
    survivors = t_idx[keep]
    if pt_idx.size <= 2048 or np.all(hi - lo <= 1e-12):
        out[pt_idx] = _chunked_sup(pts, T[survivors], c[survivors])
        return
    dim = int(np.argmax(hi - lo))
    cut = 0.5 * (lo[dim] + hi[dim])
    left = pts[:, dim] <= cut
    if left.all() or not left.any():
        out[pt_idx] = _chunked_sup(pts, T[survivors], c[survivors])
        return
    _sup_tree(S, T, c, pt_idx[left], survivors, out)
    _sup_tree(S, T, c, pt_idx[~left], survivors, out)


@dataclass(frozen=True)
class ExtremalEvaluator:
    """V in log-radial form: Psi(S) = sup over the slope grid of <S,T> - Phi*(T).

    A fubini_study weight takes the closed form V = Q instead of a table.
    Immutable; concurrent reads are safe.
    """

    m: int
    weight: Optional[WeightHandle]
    table: Optional[ConjugateTable]
    closed_form: Optional[str] = None  # "fubini_study" or None

    def profile_values(self, S) -> np.ndarray:
        """Psi on a batch of finite log-radius vectors, shape (P, m) -> (P,).

        Large slope grids are handled by an exact branch-and-bound: the
        point box splits recursively and slope rows dominated by a corner
        supporting plane over the whole sub-box are discarded, which leaves
        only the thin band of slopes active somewhere in that sub-box.
        """
        S = np.atleast_2d(np.asarray(S, dtype=float))
        if self.closed_form == "fubini_study":
            return _fs_profile(S)
        tab = self.table
        if tab is None:
            raise ConfigError("evaluator has no conjugate table")
        G = len(tab.t_grid)
        if G <= 20000 or S.shape[0] <= 128:
            return _chunked_sup(S, tab.t_grid, tab.values)
        out = np.empty(S.shape[0])
        _sup_tree(S, tab.t_grid, tab.values, np.arange(S.shape[0]), np.arange(G), out)
        return out

    def grid_error_bound(self, S) -> float:
        """Crude sup-norm bound on the slope-grid discretization error."""
        if self.closed_form is not None:
            return 0.0
        S = np.atleast_2d(np.asarray(S, dtype=float))
        dt = self.table.t_spacing
        lip = float(np.sum(self.table.axis_slope_max))
        return dt * (float(np.max(np.sum(np.abs(S), axis=1))) + lip)


def _fs_profile(S: np.ndarray) -> np.ndarray:
    """log(1 + sum e^{2 s_k}) / 2, overflow-safe."""
    two_s = 2.0 * S
    peak = np.max(two_s, axis=1)
    rest = np.log(np.sum(np.exp(two_s - peak[:, None]), axis=1))
    lse = peak + rest
    out = np.where(lse > 30.0, lse, np.log1p(np.exp(np.minimum(lse, 30.0))))
    return 0.5 * out


def build_evaluator(
    w: WeightHandle,
    s_box: tuple = DEFAULT_S_BOX,
    t_resolution: Optional[int] = None,
    s_count: Optional[int] = None,
) -> ExtremalEvaluator:
    """Extremal evaluator for a weight: conjugation table, or FS closed form."""
    if w.growth_exempt:
        return ExtremalEvaluator(w.dimension, w, None, closed_form="fubini_study")
    table = conjugate_profile(w.log_profile(), s_box, t_resolution, s_count)
    return ExtremalEvaluator(w.dimension, w, table, None)


def extremal_value(ev: ExtremalEvaluator, z) -> float:
    """V at a point of C^m.

    Coordinates equal to zero are handled by restricting the slope grid to
    t_k = 0 on those axes (the limiting rule as log r_k -> -inf).
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.size != ev.m:
        raise ValueError(f"expected a point of C^{ev.m}")
    r = np.abs(z)
    if ev.closed_form == "fubini_study":
        return float(0.5 * np.log1p(np.sum(r * r)))
    tab = ev.table
    if tab is None:
        raise ConfigError("evaluator has no conjugate table")
    zero_axes = r == 0.0
    if not zero_axes.any():
        S = np.log(r)[None, :]
        return float(_chunked_sup(S, tab.t_grid, tab.values)[0])
    keep = ~zero_axes
    rows = np.all(tab.t_grid[:, zero_axes] == 0.0, axis=1)
    if not keep.any():
        return float(-tab.value_at_zero())
    S = np.log(r[keep])[None, :]
    return float(_chunked_sup(S, tab.t_grid[rows][:, keep], tab.values[rows])[0])


def radial_equilibrium_cdf(ev: ExtremalEvaluator, r: float) -> float:
    """m = 1 only: equilibrium mass of the closed disk of radius r.

    The mass is the slope of the convex profile at log r.  For tabulated
    conjugates the slope is read off the maximizing grid slope with a
    parabolic sub-grid refinement (the exact derivative of the computed
    piecewise-linear profile; a plain difference quotient loses an order
    wherever the profile's curvature jumps).  Closed-form profiles use a
    symmetric difference.  Monotone in r and -> 1 as r -> infinity.
    """
    if ev.m != 1:
        raise ConfigError("radial equilibrium distribution requires dimension 1")
    if r <= 0:
        return 0.0
    s = math.log(r)
    if ev.closed_form is not None:
        h = _CDF_STEP
        vals = ev.profile_values(np.array([[s - h], [s + h]]))
        slope = float(vals[1] - vals[0]) / (2.0 * h)
        return min(1.0, max(0.0, slope))
    tab = ev.table
    t = tab.t_grid[:, 0]
    v = s * t - tab.values
    i = int(np.argmax(v))
    if 0 < i < t.size - 1:
        denom = 2.0 * v[i] - v[i - 1] - v[i + 1]
        if denom > 0:
            shift = 0.5 * tab.t_spacing * (v[i + 1] - v[i - 1]) / denom
            slope = t[i] + min(tab.t_spacing, max(-tab.t_spacing, shift))
        else:
            slope = t[i]
    else:
        slope = t[i]
    return min(1.0, max(0.0, float(slope)))


# ---------------------------------------------------------------------------
# regions and reference masses


@dataclass(frozen=True)
class RegionSpec:
    """Product of per-coordinate annuli, optionally cut to angular sectors.

    Inner radii must be strictly positive (regions stay inside (C*)^m).
    Equal inner and outer radii are tolerated as a degenerate zero-volume
    region; callers that integrate over the region report it.
    """

    annuli: tuple  # ((r_lo, r_hi), ...) one per coordinate
    sectors: Optional[tuple] = None  # ((theta_lo, theta_hi), ...) in [0, 2pi)

    def __post_init__(self):
        ann = tuple((float(a), float(b)) for a, b in self.annuli)
        object.__setattr__(self, "annuli", ann)
        for lo, hi in ann:
            if not (0.0 < lo <= hi < math.inf):
                raise ConfigError(f"annulus radii must satisfy 0 < lo <= hi, got ({lo}, {hi})")
        if self.sectors is not None:
            sec = tuple((float(a), float(b)) for a, b in self.sectors)
            object.__setattr__(self, "sectors", sec)
            if len(sec) != len(ann):
                raise ConfigError("need one sector per coordinate")
            for a, b in sec:
                if not (0.0 <= a <= b <= _TWO_PI):
                    raise ConfigError(f"sector must satisfy 0 <= lo <= hi <= 2pi, got ({a}, {b})")

    @property
    def m(self) -> int:
        return len(self.annuli)

    def sector_widths(self) -> np.ndarray:
        if self.sectors is None:
            return np.full(self.m, _TWO_PI)
        return np.array([b - a for a, b in self.sectors])

    def sector_fraction(self) -> float:
        return float(np.prod(self.sector_widths() / _TWO_PI))

    def euclidean_volume(self) -> float:
        """Lebesgue volume in C^m = R^{2m}."""
        w = self.sector_widths()
        areas = [wk / 2.0 * (hi * hi - lo * lo) for wk, (lo, hi) in zip(w, self.annuli)]
        return float(np.prod(areas))

    def is_degenerate(self) -> bool:
        return self.euclidean_volume() == 0.0

    def contains(self, z) -> np.ndarray:
        """Boolean mask over points of C^m; open in radii, half-open in angle."""
        pts = np.atleast_2d(np.asarray(z, dtype=complex))
        mask = np.ones(pts.shape[0], dtype=bool)
        for k, (lo, hi) in enumerate(self.annuli):
            rk = np.abs(pts[:, k])
            mask &= (rk > lo) & (rk < hi)
            if self.sectors is not None:
                a, b = self.sectors[k]
                th = np.mod(np.angle(pts[:, k]), _TWO_PI)
                mask &= (th >= a) & (th < b)
        return mask

    def label(self) -> str:
        parts = []
        for k, (lo, hi) in enumerate(self.annuli):
            s = f"r{lo:g}-{hi:g}"
            if self.sectors is not None:
                a, b = self.sectors[k]
                s += f"@{a:g}-{b:g}"
            parts.append(s)
        return "x".join(parts)


@dataclass(frozen=True)
class ReferenceMass:
    """Deterministic limit mass of a region, with the method that produced it."""

    value: float
    kind: str  # "mu_Q" | "V_U" | "M_U" | "nu"
    method: str  # "radial_derivative" | "finite_difference_laplacian" | "closed_form"
    richardson_delta: Optional[float] = None


def _fd_laplacian_mass(ev: ExtremalEvaluator, region: RegionSpec, h: float) -> float:
    """(1/2pi) * integral of laplacian(V) over the region, central differences.

    The multi-circular Laplacian in radii is
        sum_k [ d2v/dr_k^2 + (1/r_k) dv/dr_k ]
    evaluated on a cell-center lattice padded by one cell so every stencil
    stays central.
    """
    m = region.m
    axes, steps = [], []
    for lo, hi in region.annuli:
        span = hi - lo
        hk = min(h, 0.9 * lo)  # keep the padded lattice at positive radii
        n_cells = max(2, int(math.ceil(span / hk)))
        hk = span / n_cells
        centers = lo + (np.arange(-1, n_cells + 1) + 0.5) * hk
        axes.append(centers)
        steps.append(hk)
    lattice = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    shape = lattice.shape[:-1]
    if ev.closed_form == "fubini_study":
        v = _fs_profile(np.log(lattice.reshape(-1, m))).reshape(shape)
    else:
        v = ev.profile_values(np.log(lattice.reshape(-1, m))).reshape(shape)
    core = tuple(slice(1, -1) for _ in range(m))
    lap = np.zeros(v[core].shape)
    for k in range(m):
        up = tuple(slice(2, None) if j == k else slice(1, -1) for j in range(m))
        dn = tuple(slice(0, -2) if j == k else slice(1, -1) for j in range(m))
        hk = steps[k]
        r_k = axes[k][1:-1]
        shape_k = [1] * m
        shape_k[k] = r_k.size
        r_k = r_k.reshape(shape_k)
        lap += (v[up] - 2.0 * v[core] + v[dn]) / (hk * hk)
        lap += (v[up] - v[dn]) / (2.0 * hk) / r_k
    radial_weight = np.ones(lap.shape)
    for k in range(m):
        r_k = axes[k][1:-1]
        shape_k = [1] * m
        shape_k[k] = r_k.size
        radial_weight = radial_weight * r_k.reshape(shape_k)
    cell = float(np.prod(steps))
    total = float(np.sum(lap * radial_weight)) * cell
    return total * float(np.prod(region.sector_widths())) / _TWO_PI


def reference_mass(ev: ExtremalEvaluator, region: RegionSpec, kind: str = "V_U") -> ReferenceMass:
    """Deterministic mass of a region under the weight's limit distribution.

    m = 1: difference of the radial distribution function times the sector
    fraction (closed form for fubini_study).  m >= 2: finite-difference
    Laplacian integral at steps h and h/2 with h = region diameter / 64;
    the h/2 value is returned and the Richardson difference reported.
    """
    if region.m != ev.m:
        raise ConfigError(f"region has {region.m} coordinates, weight has {ev.m}")
    if kind == "M_U" and ev.closed_form != "fubini_study":
        raise ConfigError("M_U reference requires the fubini_study weight")
    if kind not in ("mu_Q", "V_U", "M_U"):
        raise ConfigError(f"unknown reference kind {kind!r}")
    if kind == "mu_Q" and ev.m != 1:
        raise ConfigError("mu_Q reference requires dimension 1")
    frac = region.sector_fraction()
    if region.is_degenerate() or frac == 0.0:
        return ReferenceMass(0.0, kind, "closed_form")
    if ev.m == 1:
        lo, hi = region.annuli[0]
        if ev.closed_form == "fubini_study":
            mass = hi * hi / (1.0 + hi * hi) - lo * lo / (1.0 + lo * lo)
            return ReferenceMass(mass * frac, kind, "closed_form")
        mass = radial_equilibrium_cdf(ev, hi) - radial_equilibrium_cdf(ev, lo)
        return ReferenceMass(max(0.0, mass) * frac, kind, "radial_derivative")
    diam = math.sqrt(sum((hi - lo) ** 2 for lo, hi in region.annuli))
    h = diam / 64.0
    coarse = _fd_laplacian_mass(ev, region, h)
    fine = _fd_laplacian_mass(ev, region, h / 2.0)
    return ReferenceMass(
        fine, kind, "finite_difference_laplacian", richardson_delta=abs(fine - coarse)
    )
