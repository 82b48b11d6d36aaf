import math
import warnings

import numpy as np
import pytest

from zerolab.ensembles import (
    CoefficientLaw,
    Coefficients,
    RandomPolynomial,
    RngStream,
    assemble_polynomial,
    sample_coefficients,
)
from zerolab.errors import ConfigError
from zerolab.extremal import RegionSpec, build_evaluator
from zerolab.onb import build_onb, monomial_basis
from zerolab.weights import WeightSpec, make_weight
from zerolab.zeros import (
    angular_ks_statistic,
    coefficient_log_range,
    count_zeros_annulus_ap,
    count_zeros_argument_principle,
    count_zeros_region,
    dominance_certificate,
    find_roots_univariate,
    l1_distance_field,
    log_modulus,
    slice_volume,
)


def poly_from_coeffs(c):
    c = np.asarray(c, dtype=complex)
    with np.errstate(divide="ignore"):
        lm = np.log(np.abs(c))
    return RandomPolynomial(monomial_basis(len(c) - 1, 1), Coefficients(lm, np.angle(c)))


def test_roots_quadratic():
    rs = find_roots_univariate([1, 0, 1])
    got = sorted(rs.roots, key=lambda z: z.imag)
    assert got[0] == pytest.approx(-1j, abs=1e-12)
    assert got[1] == pytest.approx(1j, abs=1e-12)
    assert rs.converged


def test_roots_cubic_unity():
    rs = find_roots_univariate([-1, 0, 0, 1])
    expected = sorted(np.exp(2j * math.pi * np.arange(3) / 3), key=lambda z: (round(z.real, 9), z.imag))
    got = sorted(rs.roots, key=lambda z: (round(z.real, 9), z.imag))
    for g, e in zip(got, expected):
        assert g == pytest.approx(e, abs=1e-12)


def test_trailing_zero_coefficients_give_exact_origin_roots():
    rs = find_roots_univariate([0, 0, 1, 1])
    origin = np.sum(rs.roots == 0)
    assert origin == 2
    others = rs.roots[rs.roots != 0]
    assert others[0] == pytest.approx(-1.0, abs=1e-12)


def test_roots_rejects_zero_polynomial():
    with pytest.raises(ConfigError):
        find_roots_univariate([0, 0, 0])


def test_residual_corpus():
    rng = np.random.default_rng(42)
    for _ in range(100):
        c = rng.standard_normal(51) + 1j * rng.standard_normal(51)
        rs = find_roots_univariate(c)
        assert rs.converged
        assert rs.log10_residuals.max() <= -10


def test_scaling_invariance():
    rng = np.random.default_rng(1)
    c = rng.standard_normal(21) + 1j * rng.standard_normal(21)
    a = np.sort_complex(find_roots_univariate(c).roots)
    b = np.sort_complex(find_roots_univariate(1e100 * c).roots)
    assert np.max(np.abs(a - b)) < 1e-9


def test_real_coefficients_conjugate_closure():
    rng = np.random.default_rng(2)
    c = rng.standard_normal(31)
    roots = find_roots_univariate(c).roots
    conj = np.conj(roots)
    for z in roots:
        assert np.min(np.abs(conj - z)) < 1e-8


def test_count_conservation_over_partition():
    rng = np.random.default_rng(3)
    c = rng.standard_normal(41) + 1j * rng.standard_normal(41)
    roots = find_roots_univariate(c)
    edges = [0.1, 0.7, 1.3, 2.5, 10.0]
    parts = sum(
        count_zeros_region(roots, RegionSpec(((a, b),))).interior
        for a, b in zip(edges, edges[1:])
    )
    whole = count_zeros_region(roots, RegionSpec(((0.1, 10.0),))).interior
    assert parts == whole


def test_count_zeros_region_examples():
    roots = find_roots_univariate([1, 0, 1])
    assert count_zeros_region(roots, RegionSpec(((0.5, 2.0),))).interior == 2
    sector = RegionSpec(((0.5, 2.0),), ((0.0, math.pi),))
    assert count_zeros_region(roots, sector).interior == 1


def test_argument_principle_examples():
    poly = poly_from_coeffs([1, 0, 1])
    assert count_zeros_argument_principle(poly, 2.0) == 2
    assert count_zeros_argument_principle(poly, 0.5) == 0


def test_argument_principle_equals_root_counts():
    rng = np.random.default_rng(4)
    for _ in range(100):
        d = int(rng.integers(3, 51))
        c = rng.standard_normal(d + 1) + 1j * rng.standard_normal(d + 1)
        rs = find_roots_univariate(c)
        poly = poly_from_coeffs(c)
        for r in (0.5, 1.0, 2.0):
            assert count_zeros_argument_principle(poly, r) == int(
                np.sum(np.abs(rs.roots) < r)
            )


def test_log_modulus_single_term():
    basis = monomial_basis(5, 1)
    lm = np.full(6, -np.inf)
    lm[3] = 1.5
    poly = RandomPolynomial(basis, Coefficients(lm, np.zeros(6)))
    z = 0.7 * np.exp(0.3j)
    assert log_modulus(poly, z) == pytest.approx(1.5 + 3 * math.log(0.7), abs=1e-12)


def test_log_modulus_exact_zero_marker():
    poly = poly_from_coeffs([1, 1])
    assert log_modulus(poly, -1.0) == -math.inf


def test_log_modulus_matches_weyl_value():
    w = make_weight(WeightSpec("weyl", 1))
    onb = build_onb(100, w)
    ev = build_evaluator(w)
    stream = RngStream(11, (0,))
    coeffs = sample_coefficients(CoefficientLaw("gaussian_complex"), onb.size, stream)
    poly = assemble_polynomial(onb, coeffs)
    val = log_modulus(poly, 2.0) / 100
    assert abs(val - (math.log(2) + 0.5)) < 0.2


def test_l1_field_single_top_term():
    # f = a P_J with |J| = n: the field distance has a closed substitution
    n = 8
    basis = monomial_basis(n, 1)
    lm = np.full(n + 1, -np.inf)
    lm[n] = 0.4
    poly = RandomPolynomial(basis, Coefficients(lm, np.zeros(n + 1)))
    w = make_weight(WeightSpec("weyl", 1))
    ev = build_evaluator(w)
    region = RegionSpec(((0.5, 1.5),))
    got = l1_distance_field(poly, ev, region, grid_resolution=40)
    rr = np.linspace(0.5, 1.5, 2001)
    mid = 0.5 * (rr[:-1] + rr[1:])
    v = ev.profile_values(np.log(mid)[:, None])
    integrand = np.abs(np.log(mid) + 0.4 / n - v) * mid
    oracle = float(np.sum(integrand) / np.sum(mid))
    assert got.value == pytest.approx(oracle, abs=2e-3)
    assert got.excluded_points == 0


def test_l1_field_degenerate_region_warns():
    poly = poly_from_coeffs([1, 1])
    ev = build_evaluator(make_weight(WeightSpec("weyl", 1)))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        got = l1_distance_field(poly, ev, RegionSpec(((0.5, 0.5),)))
    assert got.value == 0.0
    assert caught


def test_l1_field_decreasing_in_degree():
    w = make_weight(WeightSpec("weyl", 1))
    ev = build_evaluator(w)
    law = CoefficientLaw("gaussian_complex")
    region = RegionSpec(((0.3, 2.0),))
    dists = []
    for n in (50, 100, 200):
        onb = build_onb(n, w)
        coeffs = sample_coefficients(law, onb.size, RngStream(21, (n,)))
        poly = assemble_polynomial(onb, coeffs)
        dists.append(l1_distance_field(poly, ev, region, grid_resolution=24).value)
    assert dists[0] > dists[1] > dists[2]


def test_slice_volume_hyperplane_m2():
    basis = monomial_basis(1, 2)
    c = 0.7
    lm = np.array([math.log(c), -np.inf, 0.0])
    ph = np.array([math.pi, 0.0, 0.0])
    poly = RandomPolynomial(basis, Coefficients(lm, ph))
    region = RegionSpec(((0.5, 1.0), (1e-9, 1.0)))
    est = slice_volume(poly, region, base_samples=64)
    assert abs(est.value - math.pi) / math.pi < 0.02


def test_slice_volume_empty_intersection():
    basis = monomial_basis(1, 2)
    lm = np.array([-np.inf, -np.inf, 0.0])  # f = z_1
    poly = RandomPolynomial(basis, Coefficients(lm, np.zeros(3)))
    est = slice_volume(poly, RegionSpec(((0.5, 1.0), (0.5, 1.0))), base_samples=16)
    assert est.value == 0.0


def test_slice_volume_hyperplane_m3():
    basis = monomial_basis(1, 3)
    lm = np.full(4, -np.inf)
    ph = np.zeros(4)
    lm[0], ph[0] = math.log(0.7), math.pi
    row = int(np.flatnonzero((basis.indices == [1, 0, 0]).all(axis=1))[0])
    lm[row] = 0.0
    poly = RandomPolynomial(basis, Coefficients(lm, ph))
    region = RegionSpec(((0.5, 1.0), (1e-9, 1.0), (1e-9, 1.0)))
    est = slice_volume(poly, region, base_samples=64)
    assert abs(est.value - math.pi**2) / math.pi**2 < 0.02


def test_slice_volume_requires_multivariate():
    poly = poly_from_coeffs([1, 1])
    with pytest.raises(ConfigError):
        slice_volume(poly, RegionSpec(((0.5, 1.0),)))


def test_certificate_single_coefficient_true():
    basis = monomial_basis(4, 1)
    lm = np.full(5, -np.inf)
    lm[2] = 0.0
    poly = RandomPolynomial(basis, Coefficients(lm, np.zeros(5)))
    assert dominance_certificate(poly, RegionSpec(((0.5, 2.0),)))


def test_certificate_false_when_zero_present():
    poly = poly_from_coeffs([1, 1])  # root at -1
    assert not dominance_certificate(poly, RegionSpec(((0.5, 2.0),)))


def test_certificate_soundness_on_corpus():
    # whenever the certificate fires, the contour count must be zero
    rng = np.random.default_rng(5)
    region = RegionSpec(((0.5, 2.0),))
    fired = 0
    for i in range(50):
        d = int(rng.integers(2, 30))
        c = rng.standard_normal(d + 1) + 1j * rng.standard_normal(d + 1)
        if rng.random() < 0.3:
            c[rng.integers(0, d + 1)] *= 1e8  # plant a dominant coefficient
        poly = poly_from_coeffs(c)
        if dominance_certificate(poly, region):
            fired += 1
            assert count_zeros_annulus_ap(poly, 0.5, 2.0) == 0
    assert fired > 0


def test_certificate_fires_for_heavy_tails():
    w = make_weight(WeightSpec("weyl", 1))
    law = CoefficientLaw("log_frechet", 0.5)
    region = RegionSpec(((0.5, 2.0),))
    fired = False
    for n in range(50, 1001, 50):
        onb = build_onb(n, w)
        coeffs = sample_coefficients(law, onb.size, RngStream(7, (4, 0)))
        poly = assemble_polynomial(onb, coeffs)
        if dominance_certificate(poly, region):
            fired = True
            break
    assert fired


def test_heavy_tail_fallback_path():
    w = make_weight(WeightSpec("weyl", 1))
    onb = build_onb(200, w)
    coeffs = sample_coefficients(
        CoefficientLaw("log_frechet", 0.5), onb.size, RngStream(7, (4, 1))
    )
    poly = assemble_polynomial(onb, coeffs)
    assert coefficient_log_range(poly) > 600
    count = count_zeros_annulus_ap(poly, 0.5, 2.0)
    assert count >= 0


def test_angular_ks_statistic():
    from zerolab.zeros import RootSet

    n = 512
    uniform = np.exp(2j * math.pi * np.arange(n) / n)
    rs = RootSet(uniform, np.full(n, -15.0), 0, True)
    assert angular_ks_statistic(rs) <= 2.0 / n + 1e-12
    clustered = np.exp(1j * np.linspace(0, 0.1, n))
    rs2 = RootSet(clustered, np.full(n, -15.0), 0, True)
    assert angular_ks_statistic(rs2) > 0.9


def test_slice_volume_sector_cut():
    # hyperplane root at arg pi/2: counted by the sector containing it only
    basis = monomial_basis(1, 2)
    lm = np.array([math.log(0.7), -np.inf, 0.0])
    ph = np.array([1.5 * math.pi, 0.0, 0.0])  # constant term -c, arg(c) = pi/2
    poly = RandomPolynomial(basis, Coefficients(lm, ph))
    full = ((0.0, 2 * math.pi),)
    reg_in = RegionSpec(((0.5, 1.0), (1e-9, 1.0)), ((0.0, math.pi),) + full)
    reg_out = RegionSpec(((0.5, 1.0), (1e-9, 1.0)), ((math.pi, 2 * math.pi),) + full)
    assert slice_volume(poly, reg_in, 32).value == pytest.approx(math.pi, rel=1e-12)
    assert slice_volume(poly, reg_out, 32).value == 0.0


def test_sector_boundary_roots_wrap_and_flag():
    # a real positive root carries arg ~ -1e-16; sectors meeting at angle 0
    # must flag it as boundary on both sides, not silently drop it
    roots = find_roots_univariate([-0.7, 1.0])
    lower = count_zeros_region(roots, RegionSpec(((0.5, 1.0),), ((0.0, math.pi),)))
    upper = count_zeros_region(
        roots, RegionSpec(((0.5, 1.0),), ((math.pi, 2 * math.pi),))
    )
    assert (lower.interior, lower.boundary) == (0, 1)
    assert (upper.interior, upper.boundary) == (0, 1)


def test_slice_volume_weyl_m2_statistical():
    # random degree-20 trials against the finite-difference region mass
    w = make_weight(WeightSpec("weyl", 2))
    ev = build_evaluator(w)
    from zerolab.extremal import reference_mass
    from zerolab.onb import build_onb
    from zerolab.ensembles import sample_coefficients, assemble_polynomial

    region = RegionSpec(((0.4, 0.7), (0.4, 0.7)))
    ref = reference_mass(ev, region, "V_U").value
    onb = build_onb(20, w)
    devs = []
    for t in range(4):
        coeffs = sample_coefficients(
            CoefficientLaw("gaussian_complex"), onb.size, RngStream(31, (t,))
        )
        poly = assemble_polynomial(onb, coeffs)
        est = slice_volume(poly, region, base_samples=32)
        devs.append(abs(est.value / 20 - ref))
    assert np.mean(devs) < 0.2 * ref
