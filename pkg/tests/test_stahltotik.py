import math

import numpy as np
import pytest
from scipy.special import roots_jacobi

from zerolab.ensembles import CoefficientLaw, Coefficients, RngStream, sample_coefficients
from zerolab.errors import ConfigError
from zerolab.extremal import RegionSpec
from zerolab.stahltotik import (
    RegularMeasureSpec,
    build_recurrence_onb,
    capacity_check,
    equilibrium_mass,
    green_function,
    onp_root_asymptotic_check,
    roots_of_combination,
)
from zerolab.zeros import find_roots_univariate


def eval_real(onb, x):
    lm, ph = onb.eval_terms(np.asarray(x, dtype=complex))
    return np.exp(lm) * np.cos(ph)  # real-valued on the real line


def test_chebyshev_p2():
    onb = build_recurrence_onb(RegularMeasureSpec("chebyshev"), 5)
    vals = eval_real(onb, [1.0])
    assert vals[2, 0] == pytest.approx(math.sqrt(2), rel=1e-12)
    # p_2(x) = sqrt(2)(2x^2 - 1)
    vals = eval_real(onb, [0.3])
    assert vals[2, 0] == pytest.approx(math.sqrt(2) * (2 * 0.09 - 1), rel=1e-12)


def test_p0_is_one_for_probability_measures():
    for spec in (
        RegularMeasureSpec("chebyshev"),
        RegularMeasureSpec("jacobi", alpha=0.5, beta=-0.25),
        RegularMeasureSpec("circle"),
    ):
        onb = build_recurrence_onb(spec, 3)
        lm, _ = onb.eval_terms(np.array([0.37 + 0.0j]))
        assert lm[0, 0] == pytest.approx(0.0)


def test_circle_monomials():
    onb = build_recurrence_onb(RegularMeasureSpec("circle"), 5)
    z = 0.8 * np.exp(0.4j)
    lm, ph = onb.eval_terms(np.array([z]))
    assert lm[3, 0] == pytest.approx(3 * math.log(0.8))
    assert ph[3, 0] == pytest.approx(3 * 0.4)
    # <p_3, p_3> over normalized arclength = 1
    theta = np.linspace(0, 2 * math.pi, 512, endpoint=False)
    vals = np.exp(3j * theta)
    assert np.mean(np.abs(vals) ** 2) == pytest.approx(1.0)


def gauss_chebyshev_gram(onb, k_max):
    nodes = np.cos((2 * np.arange(1, 402) - 1) * math.pi / (2 * 401))
    vals = eval_real(onb, nodes)[: k_max + 1]
    return vals @ vals.T / nodes.size


def test_chebyshev_gram_orthonormal():
    onb = build_recurrence_onb(RegularMeasureSpec("chebyshev"), 20)
    gram = gauss_chebyshev_gram(onb, 20)
    assert np.max(np.abs(gram - np.eye(21))) < 1e-8


def test_jacobi_gram_orthonormal():
    alpha, beta = 0.5, -0.25
    spec = RegularMeasureSpec("jacobi", alpha=alpha, beta=beta)
    onb = build_recurrence_onb(spec, 20)
    nodes, weights = roots_jacobi(200, alpha, beta)
    weights = weights / weights.sum()  # probability normalization
    vals = eval_real(onb, nodes)[:21]
    gram = (vals * weights[None, :]) @ vals.T
    assert np.max(np.abs(gram - np.eye(21))) < 1e-8


def test_jacobi_invalid_parameters():
    with pytest.raises(ConfigError):
        RegularMeasureSpec("jacobi", alpha=-1.0, beta=0.0)
    with pytest.raises(ConfigError):
        RegularMeasureSpec("jacobi", alpha=0.0)


def test_custom_recurrence_roundtrip():
    cheb = build_recurrence_onb(RegularMeasureSpec("chebyshev"), 10)
    spec = RegularMeasureSpec(
        "custom_recurrence", rec_a=tuple(cheb.rec_a), rec_b=tuple(cheb.rec_b)
    )
    onb = build_recurrence_onb(spec, 10)
    assert np.array_equal(onb.log_gammas, cheb.log_gammas)
    with pytest.raises(ConfigError):
        build_recurrence_onb(spec, 50)  # not enough coefficients


def test_chebyshev_leading_coefficients():
    onb = build_recurrence_onb(RegularMeasureSpec("chebyshev"), 12)
    for k in range(1, 13):
        assert onb.log_gammas[k] == pytest.approx(
            math.log(math.sqrt(2) * 2 ** (k - 1)), rel=1e-12
        )


def test_capacity_chebyshev_and_circle():
    spec = RegularMeasureSpec("chebyshev")
    cap = capacity_check(build_recurrence_onb(spec, 50), spec)
    assert cap.target == 2.0
    assert cap.max_deviation_last_half < 0.05
    circ = RegularMeasureSpec("circle")
    capc = capacity_check(build_recurrence_onb(circ, 50), circ)
    assert capc.max_deviation_last_half == pytest.approx(0.0)


def test_capacity_legendre():
    spec = RegularMeasureSpec("jacobi", alpha=0.0, beta=0.0)
    cap = capacity_check(build_recurrence_onb(spec, 50), spec)
    assert abs(cap.gamma_roots[-1] - 2.0) < 0.05


def test_green_function_values():
    spec = RegularMeasureSpec("chebyshev")
    assert green_function(spec, 2.0) == pytest.approx(math.log(2 + math.sqrt(3)), rel=1e-12)
    assert green_function(spec, 0.3) == 0.0
    assert green_function(RegularMeasureSpec("circle"), math.e) == pytest.approx(1.0)
    assert green_function(RegularMeasureSpec("circle"), 0.5) == 0.0


def test_green_function_capacity_offsets():
    # g ~ log|z| - log Cap at large |z|
    spec = RegularMeasureSpec("chebyshev")
    z = 1000.0
    assert abs(green_function(spec, z) - math.log(z) - math.log(2)) < 1e-3
    assert abs(green_function(RegularMeasureSpec("circle"), z) - math.log(z)) < 1e-12


def test_equilibrium_masses():
    spec = RegularMeasureSpec("chebyshev")
    assert equilibrium_mass(spec, (0.0, 1.0)) == pytest.approx(0.5)
    assert equilibrium_mass(spec, (-0.5, 0.5)) == pytest.approx(1.0 / 3.0)
    assert equilibrium_mass(spec, (2.0, 3.0)) == 0.0
    circ = RegularMeasureSpec("circle")
    quarter = RegionSpec(((0.5, 2.0),), ((0.0, math.pi / 2),))
    assert equilibrium_mass(circ, quarter) == pytest.approx(0.25)
    assert equilibrium_mass(circ, RegionSpec(((1.5, 2.0),))) == 0.0


def test_equilibrium_mass_region_on_real_line():
    spec = RegularMeasureSpec("chebyshev")
    # full-angle annulus meets the support in two symmetric segments
    reg = RegionSpec(((0.5, 2.0),))
    expected = 2 * (math.asin(1.0) - math.asin(0.5)) / math.pi
    assert equilibrium_mass(spec, reg) == pytest.approx(expected)


def test_onp_asymptotics_chebyshev():
    spec = RegularMeasureSpec("chebyshev")
    report = onp_root_asymptotic_check(spec, (20, 40, 80), [2.0 + 0.0j])
    assert report.max_errors[0] > report.max_errors[1] > report.max_errors[2]
    assert report.flags == ()
    # oracle at n = 50: p_50(2) = sqrt(2) cosh(50 arccosh 2)
    rep50 = onp_root_asymptotic_check(spec, (50,), [2.0 + 0.0j])
    oracle = abs(
        (math.log(math.sqrt(2)) + 49 * math.log(2 + math.sqrt(3)) + math.log(math.cosh(math.log(2 + math.sqrt(3)))))
        / 50
        - green_function(spec, 2.0)
    )
    assert rep50.max_errors[0] < 0.05


def test_onp_circle_exact():
    spec = RegularMeasureSpec("circle")
    report = onp_root_asymptotic_check(spec, (10, 20), [math.e + 0.0j])
    assert report.max_errors == (0.0, 0.0)


def test_onp_rejects_close_probes():
    with pytest.raises(ConfigError):
        onp_root_asymptotic_check(RegularMeasureSpec("chebyshev"), (10,), [1.05 + 0.0j])


def test_comrade_roots_match_polynomial_roots():
    # chebyshev combination converted to monomial coefficients at small degree
    spec = RegularMeasureSpec("chebyshev")
    onb = build_recurrence_onb(spec, 6)
    rng = np.random.default_rng(6)
    c = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    with np.errstate(divide="ignore"):
        coeffs = Coefficients(np.log(np.abs(c)), np.angle(c))
    comrade = np.sort_complex(roots_of_combination(onb, coeffs).roots)
    # monomial conversion: p_0 = 1, p_k = sqrt(2) T_k
    from numpy.polynomial import chebyshev as C

    cheb_coeffs = np.array([c[0]] + [math.sqrt(2) * ck for ck in c[1:]])
    mono = C.cheb2poly(cheb_coeffs)
    direct = np.sort_complex(find_roots_univariate(mono).roots)
    assert np.max(np.abs(comrade - direct)) < 1e-8


def test_comrade_residuals_small():
    spec = RegularMeasureSpec("chebyshev")
    onb = build_recurrence_onb(spec, 60)
    coeffs = sample_coefficients(
        CoefficientLaw("gaussian_complex"), 61, RngStream(3, (0,))
    )
    roots = roots_of_combination(onb, coeffs)
    assert roots.log10_residuals.max() <= -10
    assert roots.roots.size == 60


def test_chebyshev_basis_zeros_inside_interval():
    # zeros of p_n itself lie in (-1, 1): pick out the pure p_n combination
    spec = RegularMeasureSpec("chebyshev")
    onb = build_recurrence_onb(spec, 15)
    lm = np.full(16, -np.inf)
    lm[15] = 0.0
    roots = roots_of_combination(onb, Coefficients(lm, np.zeros(16)))
    assert np.all(np.abs(roots.roots.imag) < 1e-8)
    assert np.all(np.abs(roots.roots.real) < 1.0)


def test_green_positive_off_support():
    spec = RegularMeasureSpec("chebyshev")
    for z in (1.5, -3.0, 2j, 0.5 + 0.5j):
        assert green_function(spec, z) > 0
    circ = RegularMeasureSpec("circle")
    for z in (1.5, -2.0, 3j):
        assert green_function(circ, z) > 0


def test_single_point_log_terms():
    onb = build_recurrence_onb(RegularMeasureSpec("chebyshev"), 6)
    lm, ph = onb.log_terms(0.3 + 0.2j)
    lm_b, ph_b = onb.eval_terms(np.array([0.3 + 0.2j]))
    assert np.array_equal(lm, lm_b[:, 0])
    assert np.array_equal(ph, ph_b[:, 0])
