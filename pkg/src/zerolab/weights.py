"""Multi-circular weight functions on C^m.

A weight Q depends only on the coordinate moduli (|z_1|, ..., |z_m|); all
evaluation goes through radii, which makes the circular invariance a property
of the API rather than something to verify.  Built-in families:

    weyl          Q(z) = ||z||^2 / 2
    fubini_study  Q(z) = log(1 + ||z||^2) / 2
    power(p)      Q(z) = sum_k |z_k|^{p_k} / p_k,  p_k >= 1
    custom        user-supplied profile on radii

Admissibility means Q(z) >= (1 + eps) log||z|| for ||z|| >= R0.  The
Fubini-Study weight violates it (it grows like log||z||) but is admitted
with ``growth_exempt`` set; downstream extremal-function code short-circuits
to its closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError

_PROBE_RADII = (0.1, 0.5, 1.0, 2.0, 5.0, 25.0)


@dataclass(frozen=True)
class WeightSpec:
    """Declarative description of a multi-circular weight.

    growth_margin is the eps of the super-logarithmic growth bound and
    growth_radius the radius R0 beyond which it is claimed to hold.
    """

    kind: str  # "weyl" | "fubini_study" | "power" | "custom"
    dimension: int = 1
    growth_margin: float = 1.0
    growth_radius: float = 3.0
    power: Optional[tuple] = None
    profile: Optional[Callable] = None  # custom: radii array (..., m) -> (...)


@dataclass(frozen=True)
class LogRadialProfile:
    """Phi(S) = Q(e^{s_1}, ..., e^{s_m}) as a callable on log-radii."""

    dimension: int
    evaluator: Callable  # (..., m) array of log-radii -> (...) values
    separable: bool = False
    axis_evaluator: Optional[Callable] = None  # (s values, axis k) -> values

    def __call__(self, s):
        return self.evaluator(np.asarray(s, dtype=float))


@dataclass(frozen=True)
class WeightHandle:
    """Immutable weight: evaluation on radii plus the log-radial profile.

    Safe for concurrent reads; construction validates the spec once.
    """

    spec: WeightSpec
    separable: bool
    growth_exempt: bool
    _radial: Callable = field(repr=False)  # radii (..., m) -> values
    _axis_log: Optional[Callable] = field(repr=False, default=None)

    @property
    def dimension(self) -> int:
        return self.spec.dimension

    def eval_radii(self, radii):
        """Q at the given radii; input shape (..., m), output shape (...)."""
        r = np.atleast_2d(np.asarray(radii, dtype=float))
        if r.shape[-1] != self.spec.dimension:
            raise ValueError(
                f"expected {self.spec.dimension} radii per point, got {r.shape[-1]}"
            )
        if np.any(r < 0):
            raise ValueError("radii must be nonnegative")
        out = self._radial(r)
        return out[0] if np.ndim(radii) == 1 else out

    def eval_point(self, z) -> float:
        """Q at a point of C^m given as a complex vector."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return float(self.eval_radii(np.abs(z)))

    def log_profile(self) -> LogRadialProfile:
        def phi(s):
            s = np.asarray(s, dtype=float)
            return self.eval_radii(np.exp(s))

        return LogRadialProfile(
            dimension=self.spec.dimension,
            evaluator=phi,
            separable=self.separable,
            axis_evaluator=self._axis_log,
        )


@dataclass(frozen=True)
class AdmissibilityReport:
    """Sampled margins Q(z) - (1+eps) log||z|| along rays.

    rows: (direction index, radius, margin).  passed is True iff every
    margin at radius >= growth_radius is nonnegative.
    """

    rows: tuple
    passed: bool
    growth_margin: float
    growth_radius: float


def _weyl_radial(r):
    return 0.5 * np.sum(r * r, axis=-1)


def _fs_radial(r):
    return 0.5 * np.log1p(np.sum(r * r, axis=-1))


def make_weight(spec: WeightSpec) -> WeightHandle:
    """Validate a WeightSpec and return the immutable handle.

    Rejects nonpositive dimension, power exponents below 1, nonpositive
    growth margin, and custom profiles that come out negative or non-finite
    at probe radii.
    """
    m = spec.dimension
    if m < 1:
        raise ConfigError(f"dimension must be >= 1, got {m}")
    if spec.growth_margin <= 0:
        raise ConfigError("growth_margin must be positive")
    if spec.growth_radius <= 0:
        raise ConfigError("growth_radius must be positive")

    if spec.kind == "weyl":
        # per-axis log profile: e^{2s}/2
        def axis_log(s, k):
            return 0.5 * np.exp(2.0 * np.asarray(s, dtype=float))

        return WeightHandle(spec, True, False, _weyl_radial, axis_log)

    if spec.kind == "fubini_study":
        return WeightHandle(spec, False, True, _fs_radial, None)

    if spec.kind == "power":
        if spec.power is None or len(spec.power) != m:
            raise ConfigError("power weight needs one exponent per coordinate")
        p = np.asarray(spec.power, dtype=float)
        if np.any(p < 1):
            raise ConfigError(f"power exponents must be >= 1, got {tuple(p)}")

        def radial(r, p=p):
            return np.sum(r**p / p, axis=-1)

        def axis_log(s, k, p=p):
            return np.exp(p[k] * np.asarray(s, dtype=float)) / p[k]

        return WeightHandle(spec, True, False, radial, axis_log)

    if spec.kind == "custom":
        if spec.profile is None:
            raise ConfigError("custom weight needs a profile callable")
        prof = spec.profile

        def radial(r, prof=prof):
            return np.asarray(prof(r), dtype=float)

        probe = np.array([[rad] * m for rad in _PROBE_RADII], dtype=float)
        vals = radial(probe)
        if not np.all(np.isfinite(vals)):
            raise ConfigError("custom profile is non-finite at probe radii")
        if np.any(vals < 0):
            raise ConfigError("custom profile is negative at probe radii")
        return WeightHandle(spec, False, False, radial)

    raise ConfigError(f"unknown weight kind {spec.kind!r}")


def _ray_directions(m: int, count: int) -> np.ndarray:
    """Deterministic unit directions in the closed positive orthant."""
    if m == 1:
        return np.ones((1, 1))
    # golden-ratio lattice on the orthant, plus the coordinate axes
    alpha = (np.sqrt(5.0) - 1.0) / 2.0
    k = np.arange(count, dtype=float)
    u = np.stack([np.modf(alpha * (j + 1) * (k + 1))[0] for j in range(m)], axis=-1)
    dirs = np.concatenate([u + 1e-3, np.eye(m)], axis=0)
    return dirs / np.linalg.norm(dirs, axis=-1, keepdims=True)


def check_admissibility(
    w: WeightHandle,
    ray_count: int = 8,
    radius_range: tuple = (0.5, 100.0),
    radii_per_ray: int = 64,
) -> AdmissibilityReport:
    """Sample Q(z) - (1+eps) log||z|| on rays through the origin.

    Margins are recorded at every sampled radius; the pass flag only
    considers radii >= growth_radius.  Never raises: failures live in
    the report.
    """
    if ray_count < 1:
        raise ConfigError("ray_count must be >= 1")
    lo, hi = radius_range
    if not (0 < lo < hi):
        raise ConfigError("radius_range must satisfy 0 < lo < hi")
    eps = w.spec.growth_margin
    dirs = _ray_directions(w.dimension, ray_count)
    radii = np.geomspace(lo, hi, radii_per_ray)
    rows = []
    ok = True
    for d_idx, u in enumerate(dirs):
        pts = radii[:, None] * u[None, :]
        q = np.atleast_1d(w.eval_radii(pts))
        margins = q - (1.0 + eps) * np.log(radii)
        for rad, marg in zip(radii, margins):
            rows.append((d_idx, float(rad), float(marg)))
            if rad >= w.spec.growth_radius and marg < 0:
                ok = False
    return AdmissibilityReport(tuple(rows), ok, eps, w.spec.growth_radius)
