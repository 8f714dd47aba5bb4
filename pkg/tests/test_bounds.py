from fractions import Fraction

import pytest

from flosim import bounds as b


def test_rep_dimensions_published_values():
    assert b.rep_dimensions(2, "passive") == (70, 1764)
    assert b.rep_dimensions(1, "active") == (8, 35)
    assert b.rep_dimensions(1, "passive") == (6, 20)


def test_purity_bound_examples():
    assert b.passive_purity_bound(1, 0) == 1
    assert b.passive_purity_bound(1, 1) == Fraction(1, 4)


def test_purity_oracle_matches_or_undershoots_bound():
    for n in (1, 2, 3):
        for k in range(0, n + 1):
            oracle = b.magic_purity_oracle(n, k)
            assert oracle <= b.passive_purity_bound(n, k)
    # exactness at the edges
    assert b.magic_purity_oracle(2, 0) == 1
    assert b.magic_purity_oracle(2, 4) == 1  # pure state
    assert b.magic_purity_oracle(1, 1) == Fraction(1, 4)


def test_purity_symmetry_under_complement():
    for k in range(0, 5):
        assert b.magic_purity_oracle(2, k) == b.magic_purity_oracle(2, 4 - k)


def test_passive_projector_value_n1():
    assert b.second_moment_projector_value(1, "passive") == Fraction(5, 6)
    assert b.exact_second_moment(1, "passive") == Fraction(1, 24)


def test_passive_formula_path_upper_bounds_oracle():
    for n in (1, 2, 3):
        oracle = b.second_moment_projector_value(n, "passive", method="oracle")
        formula = b.second_moment_projector_value(n, "passive", method="formula")
        assert oracle <= formula


def test_active_expression_values():
    assert b.active_second_moment_expression(1) == Fraction(7, 8)
    assert b.active_second_moment_expression(2) == Fraction(99, 128)


def test_active_oracle_equals_expression_exactly():
    assert b.active_projector_oracle(1) == b.active_second_moment_expression(1)
    assert b.active_projector_oracle(2) == b.active_second_moment_expression(2)


def test_active_c_coefficient_example():
    assert b.active_c_coefficient(1, 0) == 70


def test_passive_bound_small_sweep():
    for n in range(1, 60):
        assert b.passive_bound_ok(n)


def test_active_bound_small_sweep():
    for n in range(1, 60):
        assert b.active_bound_ok(n)


def test_dimension_ratio_literal_form_fails_at_small_n():
    # the stated >= 1/N and >= 1/sqrt(pi N) forms are slightly too strong
    assert not b.dimension_ratio_ok(1, "passive")
    assert not b.dimension_ratio_ok(1, "active")


def test_dimension_ratio_corrected_holds_to_100():
    for n in range(1, 101):
        assert b.dimension_ratio_corrected_ok(n, "passive")
        assert b.dimension_ratio_corrected_ok(n, "active")


def test_first_moment_values():
    assert b.first_moment(1, "passive") == Fraction(1, 6)
    assert b.first_moment(1, "active") == Fraction(1, 8)
    assert b.first_moment(2, "active") == Fraction(1, 128)


def test_paley_zygmund_bound_structure():
    val = b.anticoncentration_lower_bound(1, "passive", Fraction(1, 2))
    h, ht = b.rep_dimensions(1, "passive")
    tr = b.second_moment_projector_value(1, "passive")
    assert val == Fraction(1, 4) * Fraction(ht, h * h) / tr


def test_trinomial_sum_generating_function():
    # [t^k](1 + t + t^2)^N against a direct expansion for small N
    import numpy as np

    poly = np.array([1.0])
    for _ in range(4):
        poly = np.convolve(poly, [1.0, 1.0, 1.0])
    for k in range(9):
        assert float(b.trinomial_sum(4, k)) == pytest.approx(poly[k])


def test_sweep_rows_structure():
    rows = b.bound_sweep("passive", 5)
    assert [r["N"] for r in rows] == [1, 2, 3, 4, 5]
    assert all(r["holds"] for r in rows)
    assert all(r["margin"] > 0 for r in rows)
