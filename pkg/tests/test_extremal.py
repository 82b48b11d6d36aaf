import math

import numpy as np
import pytest

from zerolab.errors import ConfigError, ConjugationError
from zerolab.extremal import (
    RegionSpec,
    build_evaluator,
    conjugate_profile,
    extremal_value,
    radial_equilibrium_cdf,
    reference_mass,
    simplex_grid,
)
from zerolab.weights import WeightSpec, make_weight


@pytest.fixture(scope="module")
def weyl1():
    return make_weight(WeightSpec("weyl", 1))


@pytest.fixture(scope="module")
def weyl1_ev(weyl1):
    return build_evaluator(weyl1)


def weyl_conjugate_exact(t):
    # stationary point of s*t - e^{2s}/2 at s = log(t)/2
    t = np.asarray(t)
    out = np.where(t > 0, 0.5 * t * np.log(np.where(t > 0, t, 1.0)) - 0.5 * t, 0.0)
    return out


def test_weyl_conjugate_closed_form(weyl1):
    tab = conjugate_profile(weyl1.log_profile())
    t = tab.t_grid[:, 0]
    assert np.max(np.abs(tab.values - weyl_conjugate_exact(t))) < 1e-6
    assert tab.value_at_zero() == pytest.approx(0.0, abs=1e-6)
    i_one = int(np.flatnonzero(t == 1.0)[0])
    assert tab.values[i_one] == pytest.approx(-0.5, abs=1e-9)


def test_power_one_conjugate_closed_form():
    w = make_weight(WeightSpec("power", 1, power=(1.0,)))
    tab = conjugate_profile(w.log_profile())
    t = tab.t_grid[:, 0]
    pos = t > 0
    exact = t[pos] * np.log(t[pos]) - t[pos]
    assert np.max(np.abs(tab.values[pos] - exact)) < 1e-6


def test_conjugate_zero_slope_is_minus_inf_profile(weyl1):
    tab = conjugate_profile(weyl1.log_profile())
    assert tab.value_at_zero() <= 0.0  # -inf Phi with Q >= 0


def test_grid_convexity(weyl1):
    tab = conjugate_profile(weyl1.log_profile())
    v = tab.values
    rng = np.random.default_rng(2)
    n = v.size
    for _ in range(200):
        i, j = rng.integers(0, n, size=2)
        if (i + j) % 2:
            continue
        mid = (i + j) // 2
        assert v[mid] <= 0.5 * (v[i] + v[j]) + 1e-9


def test_monotone_under_nested_refinement(weyl1):
    # doubling to 2N-1 points keeps the old s-grid nodes, so the grid sup
    # cannot decrease (golden refinement can flutter at the 1e-12 level)
    coarse = conjugate_profile(weyl1.log_profile(), s_count=513)
    fine = conjugate_profile(weyl1.log_profile(), s_count=1025)
    assert np.all(fine.values >= coarse.values - 1e-10)


def test_boundary_check_raises_for_small_box(weyl1):
    with pytest.raises(ConjugationError):
        conjugate_profile(weyl1.log_profile(), s_box=(-8.0, -0.5))


def test_extremal_values_weyl(weyl1_ev):
    assert extremal_value(weyl1_ev, 1.0) == pytest.approx(0.5, abs=1e-4)
    assert extremal_value(weyl1_ev, 2.0) == pytest.approx(math.log(2) + 0.5, abs=1e-4)
    assert extremal_value(weyl1_ev, 0.0) == pytest.approx(0.0, abs=1e-6)


def test_extremal_closed_form_grid(weyl1_ev):
    s = np.linspace(-2.0, 2.0, 2000)
    vals = weyl1_ev.profile_values(s[:, None])
    exact = np.where(s <= 0, np.exp(2 * s) / 2, s + 0.5)
    assert np.max(np.abs(vals - exact)) <= 1e-3


def test_fubini_study_closed_form():
    for m in (1, 2, 3):
        w = make_weight(WeightSpec("fubini_study", m))
        ev = build_evaluator(w)
        z = np.zeros(m, dtype=complex)
        z[0] = 1.0
        assert extremal_value(ev, z) == pytest.approx(0.5 * math.log(2))


def test_weyl_m2_closed_form():
    w = make_weight(WeightSpec("weyl", 2))
    ev = build_evaluator(w)
    rng = np.random.default_rng(3)
    for _ in range(50):
        z = rng.uniform(0.05, 2.0, size=2).astype(complex)
        n2 = float(np.sum(np.abs(z) ** 2))
        exact = n2 / 2 if n2 <= 1 else 0.5 * math.log(n2) + 0.5
        assert extremal_value(ev, z) == pytest.approx(exact, abs=1e-3)


def test_envelope_property():
    for spec in (
        WeightSpec("weyl", 1),
        WeightSpec("weyl", 2),
        WeightSpec("power", 1, power=(3.0,)),
    ):
        w = make_weight(spec)
        ev = build_evaluator(w)
        rng = np.random.default_rng(4)
        pts = rng.uniform(0.01, 3.0, size=(1000, spec.dimension))
        vals = ev.profile_values(np.log(pts))
        q = w.eval_radii(pts)
        assert np.all(vals <= q + 1e-6)


def test_lelong_bound(weyl1_ev):
    # V(z) - max_k log+ |z_k| is bounded by max(-Phi*) over the slope grid
    s = np.linspace(-5, 6, 500)
    vals = weyl1_ev.profile_values(s[:, None])
    bound = float(np.max(-weyl1_ev.table.values))
    assert np.all(vals - np.maximum(s, 0.0) <= bound + 1e-9)


def test_profile_monotone_and_convex(weyl1_ev):
    s = np.linspace(-4, 3, 400)
    vals = weyl1_ev.profile_values(s[:, None])
    slopes = np.diff(vals) / np.diff(s)
    assert np.all(slopes >= -1e-12)
    assert np.all(slopes <= 1.0 + 1e-9)
    assert np.all(np.diff(slopes) >= -1e-7)  # convexity


def test_double_conjugation_reproduces_conjugate(weyl1, weyl1_ev):
    # re-conjugating the computed profile recovers Phi* for convex profiles
    tab = weyl1_ev.table
    s = np.linspace(-6.0, 4.0, 1500)
    psi = weyl1_ev.profile_values(s[:, None])
    t = tab.t_grid[:, 0]
    reconj = np.max(s[None, :] * t[:, None] - psi[None, :], axis=1)
    assert np.max(np.abs(reconj - tab.values)) < 2e-3


def test_cdf_oracle_values(weyl1_ev):
    assert radial_equilibrium_cdf(weyl1_ev, 0.5) == pytest.approx(0.25, abs=1e-3)
    assert radial_equilibrium_cdf(weyl1_ev, 1.0) == pytest.approx(1.0, abs=1e-3)
    assert radial_equilibrium_cdf(weyl1_ev, 2.0) == pytest.approx(1.0)


def test_cdf_monotone_to_one(weyl1_ev):
    rs = np.exp(np.linspace(-3, 2, 300))
    vals = [radial_equilibrium_cdf(weyl1_ev, r) for r in rs]
    assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(1.0)


def test_cdf_power_against_finite_difference():
    w = make_weight(WeightSpec("power", 1, power=(1.0,)))
    ev = build_evaluator(w)
    for r in (0.05, 0.2, 0.7):
        s = math.log(r)
        h = 1e-3
        fd = float(np.diff(ev.profile_values(np.array([[s - h], [s + h]])))[0]) / (2 * h)
        assert radial_equilibrium_cdf(ev, r) == pytest.approx(fd, abs=2e-3)


def test_cdf_requires_dimension_one():
    ev = build_evaluator(make_weight(WeightSpec("weyl", 2)))
    with pytest.raises(ConfigError):
        radial_equilibrium_cdf(ev, 1.0)


def test_reference_mass_weyl_annulus(weyl1_ev):
    reg = RegionSpec(((0.2, 0.8),))
    ref = reference_mass(weyl1_ev, reg, "mu_Q")
    assert ref.value == pytest.approx(0.60, abs=1e-3)
    assert ref.method == "radial_derivative"


def test_reference_mass_fs_disk():
    ev = build_evaluator(make_weight(WeightSpec("fubini_study", 1)))
    ref = reference_mass(ev, RegionSpec(((1e-12, 1.0),)), "mu_Q")
    assert ref.value == pytest.approx(0.5, abs=1e-9)
    assert ref.method == "closed_form"


def test_reference_mass_empty_sector(weyl1_ev):
    reg = RegionSpec(((0.2, 0.8),), ((1.0, 1.0),))
    assert reference_mass(weyl1_ev, reg, "mu_Q").value == 0.0


def test_reference_mass_sector_fraction(weyl1_ev):
    reg = RegionSpec(((0.2, 0.8),), ((0.0, math.pi),))
    assert reference_mass(weyl1_ev, reg, "mu_Q").value == pytest.approx(0.30, abs=1e-3)


def test_reference_mass_m2_matches_closed_form():
    # inside the unit ball laplacian(V) = 2m, so mass = (m/pi) * vol
    w = make_weight(WeightSpec("weyl", 2))
    ev = build_evaluator(w)
    reg = RegionSpec(((0.25, 0.5), (0.25, 0.5)))
    ref = reference_mass(ev, reg, "V_U")
    vol4 = (math.pi * (0.25 - 0.0625)) ** 2
    assert ref.value == pytest.approx(2 / math.pi * vol4, rel=1e-6)
    assert ref.richardson_delta < 1e-8


def test_m_u_requires_fubini_study(weyl1_ev):
    with pytest.raises(ConfigError):
        reference_mass(weyl1_ev, RegionSpec(((0.2, 0.8),)), "M_U")


def test_m_u_fd_matches_closed_form_m2():
    # mass of a region under (1/2pi) laplacian of log(1+||z||^2)/2
    w = make_weight(WeightSpec("fubini_study", 2))
    ev = build_evaluator(w)
    reg = RegionSpec(((0.3, 0.6), (0.3, 0.6)))
    ref = reference_mass(ev, reg, "M_U")
    # oracle by dense midpoint quadrature of the known density
    # laplacian(V) = sum_k [v_rr + v_r/r] with V = log(1+r1^2+r2^2)/2
    rr = np.linspace(0.3, 0.6, 400)
    mid = 0.5 * (rr[:-1] + rr[1:])
    R1, R2 = np.meshgrid(mid, mid, indexing="ij")
    n2 = R1**2 + R2**2
    # d/dr_k V = r_k/(1+n2); d2/dr_k^2 V = (1+n2-2 r_k^2)/(1+n2)^2
    lap = ((1 + n2 - 2 * R1**2) / (1 + n2) ** 2 + 1 / (1 + n2)) + (
        (1 + n2 - 2 * R2**2) / (1 + n2) ** 2 + 1 / (1 + n2)
    )
    h = rr[1] - rr[0]
    oracle = (2 * math.pi) ** 2 / (2 * math.pi) * np.sum(lap * R1 * R2) * h * h
    assert ref.value == pytest.approx(oracle, rel=1e-4)


def test_region_validation():
    with pytest.raises(ConfigError):
        RegionSpec(((0.0, 1.0),))
    with pytest.raises(ConfigError):
        RegionSpec(((2.0, 1.0),))
    with pytest.raises(ConfigError):
        RegionSpec(((0.5, 1.0),), ((0.0, 7.0),))
    with pytest.raises(ConfigError):
        RegionSpec(((0.5, 1.0), (0.5, 1.0)), ((0.0, 1.0),))
    degenerate = RegionSpec(((0.5, 0.5),))
    assert degenerate.is_degenerate()


def test_region_contains_and_volume():
    reg = RegionSpec(((0.5, 2.0),), ((0.0, math.pi),))
    pts = np.array([[1.0 + 0.5j], [1.0 - 0.5j], [3.0 + 0.0j]])
    assert reg.contains(pts).tolist() == [True, False, False]
    assert reg.euclidean_volume() == pytest.approx(math.pi / 2 * (4 - 0.25))


def test_simplex_grid_counts():
    assert len(simplex_grid(1, 8)) == 9
    assert len(simplex_grid(2, 8)) == 45  # binom(10, 2)
    assert len(simplex_grid(3, 6)) == 84  # binom(9, 3)


def test_grid_error_bound_reported(weyl1_ev):
    bound = weyl1_ev.grid_error_bound(np.array([[2.0]]))
    assert bound > 0
    # the actual error on that point is far below the reported bound
    actual = abs(extremal_value(weyl1_ev, math.exp(2.0)) - (2.0 + 0.5))
    assert actual <= bound


def test_evaluator_without_table_rejected():
    from zerolab.extremal import ExtremalEvaluator

    bare = ExtremalEvaluator(1, None, None, None)
    with pytest.raises(ConfigError):
        bare.profile_values(np.array([[0.0]]))
    with pytest.raises(ConfigError):
        extremal_value(bare, 1.0)


def test_double_conjugation_power_weight():
    w = make_weight(WeightSpec("power", 1, power=(3.0,)))
    ev = build_evaluator(w)
    tab = ev.table
    s = np.linspace(-6.0, 3.0, 1200)
    psi = ev.profile_values(s[:, None])
    t = tab.t_grid[:, 0]
    reconj = np.max(s[None, :] * t[:, None] - psi[None, :], axis=1)
    assert np.max(np.abs(reconj - tab.values)) < 2e-3
