from fractions import Fraction

import numpy as np
import pytest

from flosim import interpolation as itp


def _example_function():
    # R(theta) = theta / (1 + theta^2)
    return itp.RationalFunctionExact.from_polys(
        [Fraction(0), Fraction(1)], [Fraction(1), Fraction(0), Fraction(1)]
    )


def test_bw_exact_recovery_no_errors():
    func = _example_function()
    nodes = [Fraction(i, 7) for i in range(1, 5)]
    rec = itp.bw_rational_recover([(x, func(x)) for x in nodes], 1, 2, 0)
    assert rec == func


def test_bw_recovery_with_one_corruption():
    func = _example_function()
    nodes = [Fraction(i, 9) for i in range(1, 7)]
    values = [func(x) for x in nodes]
    values[2] += Fraction(5, 3)
    rec = itp.bw_rational_recover(list(zip(nodes, values)), 1, 2, 1)
    assert rec == func


def test_bw_insufficient_points():
    func = _example_function()
    nodes = [Fraction(i, 7) for i in range(1, 6)]
    with pytest.raises(itp.InsufficientPointsError):
        itp.bw_rational_recover([(x, func(x)) for x in nodes], 1, 2, 1)


def test_bw_too_many_corruptions_declared():
    func = _example_function()
    nodes = [Fraction(i, 9) for i in range(1, 7)]
    values = [func(x) for x in nodes]
    values[0] += 1
    values[3] += 2
    with pytest.raises(itp.RecoveryError):
        itp.bw_rational_recover(list(zip(nodes, values)), 1, 2, 1)


def test_bw_uniqueness_across_subsets():
    func = _example_function()
    nodes = [Fraction(i, 13) for i in range(1, 11)]
    pts = [(x, func(x)) for x in nodes]
    rec1 = itp.bw_rational_recover(pts[:4], 1, 2, 0)
    rec2 = itp.bw_rational_recover(pts[4:], 1, 2, 0)
    assert rec1 == rec2


def test_bw_duplicate_nodes_rejected():
    with pytest.raises(ValueError):
        itp.bw_rational_recover([(Fraction(1), Fraction(1))] * 5, 1, 1, 0)


def test_polynomial_fit_exact_data():
    coeffs = [0.3, -1.0, 2.0, 0.25]
    xs = np.linspace(0.8, 1.0, 12)
    vals = [sum(c * x ** k for k, c in enumerate(coeffs)) for x in xs]
    fit, resid = itp.polynomial_fit_equispaced(vals, 3, 0.8, 1.0)
    assert resid <= 1e-12
    assert float(fit(0.9)) == pytest.approx(
        sum(c * 0.9 ** k for k, c in enumerate(coeffs)), abs=1e-12)


def test_polynomial_fit_constant():
    fit, resid = itp.polynomial_fit_equispaced([2.5] * 5, 0, 0.0, 1.0)
    assert resid <= 1e-14
    assert float(fit(0.3)) == pytest.approx(2.5)


def test_polynomial_fit_noise_growth_reported():
    rng = np.random.default_rng(90)
    xs = np.linspace(0.8, 1.0, 40)
    noise = 1e-8
    vals = np.sin(xs) + rng.uniform(-noise, noise, size=len(xs))
    fit, resid = itp.polynomial_fit_equispaced(list(vals), 6, 0.8, 1.0)
    held = abs(float(fit(0.91)) - np.sin(0.91))
    # growth stays within a modest multiple of the noise inside the window
    assert held <= 1e3 * noise


def test_paturi_values():
    assert itp.paturi_bound(1e-3, 2, 1.0) == pytest.approx(1e-3 * np.exp(16.0))
    assert itp.paturi_bound(0.5, 0, 0.25) == pytest.approx(0.5)
    assert itp.paturi_bound(1.0, 1, 1.0) == pytest.approx(np.exp(8.0))
    with pytest.raises(ValueError):
        itp.paturi_bound(1e-3, 2, 0.0)


def test_degree_bounds():
    assert itp.degree_bounds("passive", 1) == (16, 16)
    assert itp.degree_bounds("active", 1) == (32, 32)
    assert itp.degree_bounds("passive", 2) == (64, 64)
    assert 2 * 4 * 2 == 16  # 2 d n with d = 4N, n = 2N at N = 1


def test_reduction_exact_path_clean():
    rng = np.random.default_rng(91)
    out = itp.reduction_demo_exact("passive", 1, Fraction(1, 5), 39, 0, 3, rng)
    assert out["abs_error"] == 0 and out["exact_match"]


def test_reduction_exact_path_with_corruptions():
    rng = np.random.default_rng(92)
    out = itp.reduction_demo_exact("passive", 1, Fraction(1, 5), 39, 3, 3, rng)
    assert out["abs_error"] == 0


def test_reduction_exact_path_over_budget_fails():
    rng = np.random.default_rng(93)
    with pytest.raises(itp.RecoveryError):
        itp.reduction_demo_exact("passive", 1, Fraction(1, 5), 39, 6, 3, rng)


def test_reduction_float_path_passive_spot():
    out = itp.reduction_demo_float("passive", 1, 0.2, 40, seed=94)
    assert out["abs_error"] <= 1e-6
    assert out["node_residual"] <= 1e-30


def test_reduction_float_path_active_spot():
    out = itp.reduction_demo_float("active", 1, 0.2, 40, seed=95)
    assert out["abs_error"] <= 1e-6


def test_shared_denominator_code_path():
    # the float path's Q equals the cayley module's circuit polynomial
    from flosim import cayley, highprec
    from flosim.linalg import GroupElement, UNITARY, haar_unitary

    rng = np.random.default_rng(96)
    g = GroupElement(UNITARY, haar_unitary(4, rng))
    coeffs = cayley.q_polynomial(g, ("circuit", 1))
    x_mp = highprec.mp_inverse_cayley(highprec.to_mp_matrix(g.matrix), UNITARY)
    for theta in (0.3, 0.7, 0.95):
        a = float(cayley.polynomial_value(coeffs, theta))
        b = float(highprec.mp_q_value(x_mp, theta, UNITARY, power=2))
        assert a == pytest.approx(b, rel=1e-8)
