import numpy as np
import pytest

from flosim import cayley as cy
from flosim.linalg import (
    GroupElement,
    ORTHOGONAL,
    UNITARY,
    eigenphases,
    haar_special_orthogonal,
    haar_unitary,
)


def test_cayley_transform_zero_is_identity():
    g = cy.cayley_transform(np.zeros((3, 3), dtype=complex), UNITARY)
    assert np.allclose(g.matrix, np.eye(3))


def test_cayley_scalar_formula():
    t = 0.37
    g = cy.cayley_transform(np.array([[1j * t]]), UNITARY)
    assert g.matrix[0, 0] == pytest.approx(np.exp(-2j * np.arctan(t)))
    g1 = GroupElement(UNITARY, np.array([[np.exp(0.6j)]]))
    assert cy.inverse_cayley(g1)[0, 0] == pytest.approx(-1j * np.tan(0.3))


def test_cayley_round_trips():
    rng = np.random.default_rng(60)
    for group, dim in ((UNITARY, 5), (ORTHOGONAL, 6)):
        m = haar_unitary(dim, rng) if group == UNITARY else haar_special_orthogonal(dim, rng)
        g = GroupElement(group, m)
        x = cy.inverse_cayley(g)
        back = cy.cayley_transform(x, group)
        assert np.linalg.norm(back.matrix - m) <= 1e-10
        if group == ORTHOGONAL:
            assert np.linalg.norm(x + x.T) == 0.0  # exactly antisymmetrized


def test_inverse_cayley_singularity():
    g = GroupElement(UNITARY, np.diag([-1.0 + 0j, 1.0]))
    with pytest.raises(cy.SingularityError):
        cy.inverse_cayley(g)


def test_deform_endpoints():
    rng = np.random.default_rng(61)
    m = haar_unitary(4, rng)
    g = GroupElement(UNITARY, m)
    assert np.allclose(cy.deform(g, 1.0).matrix, m)
    assert np.allclose(cy.deform(g, 0.0).matrix, np.eye(4))
    with pytest.raises(ValueError):
        cy.deform(g, 1.5)


def test_deform_two_routes_agree():
    rng = np.random.default_rng(62)
    for group, dim in ((UNITARY, 4), (ORTHOGONAL, 6)):
        m = haar_unitary(dim, rng) if group == UNITARY else haar_special_orthogonal(dim, rng)
        g = GroupElement(group, m)
        for theta in (0.2, 0.5, 0.9):
            a = cy.deform(g, theta).matrix
            b = cy.deform_via_generator(g, theta).matrix
            assert np.linalg.norm(a - b) <= 1e-9


def test_eigenphase_change_of_variable():
    rng = np.random.default_rng(63)
    theta = 0.5
    m = haar_unitary(5, rng)
    mapped = np.sort(cy.change_of_variable(eigenphases(m, UNITARY), theta))
    actual = np.sort(eigenphases(cy.deform(GroupElement(UNITARY, m), theta).matrix, UNITARY))
    assert np.max(np.abs(mapped - actual)) <= 1e-9
    o = haar_special_orthogonal(8, rng)
    mapped = np.sort(np.abs(cy.change_of_variable(eigenphases(o, ORTHOGONAL), theta)))
    actual = np.sort(np.abs(eigenphases(cy.deform(GroupElement(ORTHOGONAL, o), theta).matrix,
                                        ORTHOGONAL)))
    assert np.max(np.abs(mapped - actual)) <= 1e-9


def test_q_polynomial_identity_and_lower_bound():
    assert np.allclose(cy.q_polynomial(GroupElement(UNITARY, np.eye(3, dtype=complex))), [1.0])
    rng = np.random.default_rng(64)
    g = GroupElement(UNITARY, haar_unitary(4, rng))
    coeffs = cy.q_polynomial(g, "group")
    grid = np.linspace(0.0, 1.0, 101)
    assert np.min(cy.polynomial_value(coeffs, grid)) >= 1.0 - 1e-12


def test_q_polynomial_circuit_degrees():
    rng = np.random.default_rng(65)
    g = GroupElement(UNITARY, haar_unitary(4, rng))
    assert len(cy.q_polynomial(g, ("circuit", 1))) - 1 == 16
    go = GroupElement(ORTHOGONAL, haar_special_orthogonal(8, rng))
    assert len(cy.q_polynomial(go, ("circuit", 1))) - 1 == 32


def test_q_value_matches_polynomial():
    rng = np.random.default_rng(66)
    g = GroupElement(UNITARY, haar_unitary(4, rng))
    coeffs = cy.q_polynomial(g, ("circuit", 1))
    for theta in (0.0, 0.3, 0.8, 1.0):
        assert cy.q_value(g, theta, UNITARY, power=2) == pytest.approx(
            float(cy.polynomial_value(coeffs, theta)), rel=1e-9)


def test_rational_path_entries_are_low_degree():
    # entries of F_theta(g) * det(I + theta X) fit a degree-d polynomial
    rng = np.random.default_rng(67)
    for group, dim, deg in ((UNITARY, 4, 4), (ORTHOGONAL, 6, 6)):
        m = haar_unitary(dim, rng) if group == UNITARY else haar_special_orthogonal(dim, rng)
        g = GroupElement(group, m)
        x = cy.inverse_cayley(g)
        nodes = np.linspace(0.05, 0.95, deg + 1)
        held_out = np.array([0.5 * (nodes[0] + nodes[1]), 0.99])
        entry = (0, 1)
        def f(theta):
            det = np.linalg.det(np.eye(dim) + theta * x)
            return cy.deform(g, theta).matrix[entry] * det
        vals = [f(t) for t in nodes]
        fit = np.polynomial.polynomial.polyfit(nodes, np.array(vals), deg)
        for t in held_out:
            pred = np.polynomial.polynomial.polyval(t, fit)
            assert abs(pred - f(t)) <= 1e-8


def test_q_lower_bound_frequency():
    rng = np.random.default_rng(68)
    for group, dim in ((UNITARY, 4), (ORTHOGONAL, 8)):
        for delta_tilde in (0.1, 0.3):
            out = cy.q_lower_bound_frequency(group, dim, delta_tilde, 0.9, 400, rng)
            floor = out["lower_bound"] - 3 * max(out["stderr"], 1e-3)
            assert out["frequency"] >= floor


def test_deformed_sample_endpoints():
    rng = np.random.default_rng(69)
    g0 = GroupElement(UNITARY, haar_unitary(3, rng))
    fixed = cy.deformed_sample(g0, 0.0, rng)
    assert np.allclose(fixed.matrix, g0.matrix)
    drawn = cy.deformed_sample(g0, 1.0, rng)
    assert np.linalg.norm(drawn.matrix - g0.matrix) > 1e-3  # a fresh Haar factor


def test_deformed_eigenphase_law_against_analytic_density():
    # pooled eigenphases of F_theta(g), g Haar in U(d), follow the pushforward
    # of the uniform marginal under phi -> 2 atan(theta tan(phi/2))
    from scipy.stats import kstest

    rng = np.random.default_rng(72)
    theta = 0.7
    phases = []
    for _ in range(2000):
        g = GroupElement(UNITARY, haar_unitary(3, rng))
        ph = eigenphases(cy.deform(g, theta).matrix, UNITARY)
        phases.append(ph[rng.integers(0, 3)])

    def cdf(y):
        return (2.0 * np.arctan(np.tan(np.asarray(y) / 2.0) / theta) + np.pi) / (2 * np.pi)

    assert kstest(np.array(phases), cdf).pvalue > 0.01


def test_tvd_exact_d2_below_bound():
    for group in (UNITARY, ORTHOGONAL):
        for delta in (0.01, 0.05):
            est = cy.tvd_exact_d2(group, delta)
            assert 0.0 < est <= 2.0 * delta


def test_tvd_zero_delta_vanishes():
    rng = np.random.default_rng(70)
    out = cy.tvd_check(UNITARY, 2, 0.0, 100, rng)
    assert out["estimate"] <= 1e-9


def test_tvd_empirical_d4():
    rng = np.random.default_rng(71)
    out = cy.tvd_check(UNITARY, 4, 0.01, 2000, rng)
    assert out["method"] == "empirical"
    assert out["estimate"] <= out["bound"] + 3 * out["slack"]
