"""
Unit tests for the order map and full Lagrangian-type parameterizations:
- Stern-Brocot enumeration and the values of θ on constant curves
- strict order preservation on random ordered pairs
- label bounds of the free groups
- the parameterization of φ = x2 in H¹ (monotone, surjective, w̄ ≡ 1)
- image coverage: every cell hit for φ = x2, failure when half the box is missed
- w̄ ≡ 0 for constant graphs

Run with pytest:
    python -m pytest tests/unit/test_lagrangian_blackbox.py
Run with coverage:
    python -m pytest --cov=app --cov-report=term-missing tests/unit/test_lagrangian_blackbox.py
"""
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from app.domain.enums import CheckStatus, GroupKind
from app.domain.exceptions import BadParams, CurveNotOnUnitInterval, GridTooCoarse, IndexOutOfRange
from app.domain.rules.lagrangian import (
    attach_wbar,
    build_full_param,
    extract_wbar,
    label_bounds,
    rational_enumeration,
    second_t_difference,
    theta,
    theta_mass,
    verify_lagrangian,
)


@pytest.fixture
def linear_param(h1, field_factory):
    """Parameterization of φ = x2 on [0, 1] x [-1, 1]."""
    phi = field_factory(fn=lambda a: a[:, 0])
    return phi, build_full_param(h1, phi, 2)


# ------------------------------------------------
# Order map
# ------------------------------------------------

def test_rational_enumeration_order():
    assert rational_enumeration(6) == (
        Fraction(0), Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1, 4)
    )


def test_rational_enumeration_has_no_repeats():
    values = rational_enumeration(200)
    assert len(set(values)) == 200
    assert all(0 <= r <= 1 for r in values)


def test_enumeration_depth_must_be_positive():
    with pytest.raises(BadParams):
        rational_enumeration(0)


@pytest.mark.parametrize("level, expected", [
    (0.0, 0.0),
    (1.0, 2.0 - 2.0**-19),
])
def test_theta_of_constant_curves(level, expected):
    # Arrange
    t = np.linspace(0.0, 1.0, 11)

    # Act
    value = theta((t, np.full(11, level)), L=20)

    # Assert
    assert value == expected


def test_theta_mass_matches_constant_one():
    t = np.linspace(0.0, 1.0, 5)
    assert theta((t, np.ones(5)), L=24) == pytest.approx(theta_mass(24), abs=1e-15)


def test_theta_strictly_preserves_order(rng):
    # Arrange: 1000 pairs lower < upper sampled on 33 times
    t = np.linspace(0.0, 1.0, 33)
    violations = 0

    for _ in range(1000):
        lower = rng.uniform(-1.0, 1.0, size=33)
        upper = lower + np.abs(rng.normal(scale=0.1, size=33)) + 1e-3

        # Act
        if not theta((t, lower)) < theta((t, upper)):
            violations += 1

    # Assert
    assert violations == 0


def test_theta_needs_the_whole_unit_interval():
    with pytest.raises(CurveNotOnUnitInterval):
        theta((np.linspace(0.0, 0.5, 6), np.zeros(6)))


# ------------------------------------------------
# Label bounds and differences
# ------------------------------------------------

def test_label_bounds_free2_rank4(spec_factory):
    # Arrange
    spec = spec_factory(kind=GroupKind.FREE2, m=4)

    # Act
    bounds = label_bounds(spec, 2)

    # Assert: (m-1)·1 + 3 for the coupled (2, 1) component, +1 for the rest
    assert bounds[0] == 6.0
    np.testing.assert_array_equal(bounds[1:], 4.0)


def test_label_bounds_direction_out_of_range(h1):
    with pytest.raises(IndexOutOfRange):
        label_bounds(h1, 3)


def test_second_difference_of_parabola_is_exact_at_both_ends():
    # Arrange
    h = 0.1
    t = np.arange(11) * h

    # Act
    d2 = second_t_difference(3.0 * t**2, h)

    # Assert
    np.testing.assert_allclose(d2, 6.0, atol=1e-9)


def test_second_difference_needs_four_samples():
    with pytest.raises(GridTooCoarse):
        second_t_difference(np.zeros(3), 0.1)


# ------------------------------------------------
# Parameterization of the linear graph
# ------------------------------------------------

def test_linear_param_shape_and_reference(linear_param):
    # Arrange
    phi, param = linear_param

    # Assert
    assert param.reference == 1
    assert param.t_samples[0] == pytest.approx(0.0)
    assert param.t_samples[-1] == pytest.approx(1.0)
    assert param.chi[0].shape == param.lattice_shape
    assert param.meta["shrinkage"] < 1.0


def test_linear_param_is_monotone_in_the_label(linear_param):
    _, param = linear_param
    assert np.min(np.diff(param.chi[0], axis=2)) >= -1e-9


def test_linear_param_curves_are_characteristics(linear_param):
    # Arrange
    _, param = linear_param
    t = param.t_samples

    # Act: every label curve minus its start value
    shifted = param.chi[0][:, 0, :] - param.chi[0][:1, 0, :]

    # Assert: γ(t) - γ(0) = t²/2 for curves that stay in the box
    interior = np.all((param.chi[0][:, 0, :] > -1.0 + 1e-9) & (param.chi[0][:, 0, :] < 1.0 - 1e-9), axis=0)
    assert interior.any()
    expected = np.broadcast_to((t**2 / 2)[:, None], shifted[:, interior].shape)
    np.testing.assert_allclose(shifted[:, interior], expected, atol=1e-6)


def test_linear_param_gap_ignores_curves_that_leave_the_box(linear_param):
    # Arrange: curves seeded past the box that never reach it are dropped
    _, param = linear_param

    # Assert
    assert param.meta["shrinkage"] > 0.0
    assert param.meta["gap"] <= 1e-4


def test_linear_param_verifies_with_datum_one(h1, linear_param, datum_factory):
    # Arrange
    phi, param = linear_param

    # Act
    report = verify_lagrangian(h1, phi, param, datum_factory(values=(1.0,)))

    # Assert
    assert report.get("L2_monotone").status is CheckStatus.PASS
    assert report.get("L3_characteristic").status is CheckStatus.PASS
    assert report.get("surjectivity").status is CheckStatus.PASS
    assert report.get("surjectivity").details["coverage"] == 1.0
    assert report.get("LS1").status is CheckStatus.PASS
    assert report.get("LS3").status is CheckStatus.PASS


def test_linear_param_rejects_datum_zero(h1, linear_param, datum_factory):
    # Arrange
    phi, param = linear_param

    # Act
    report = verify_lagrangian(h1, phi, param, datum_factory(values=(0.0,)))

    # Assert
    assert report.get("LS3").status is CheckStatus.FAIL
    assert report.all_passed is False


def test_extracted_datum_of_linear_graph_is_one(h1, linear_param):
    # Arrange
    phi, param = linear_param

    # Act
    attached = attach_wbar(h1, phi, param)

    # Assert: (1/b) D²_t χ = 1 wherever step refinement agrees
    valid = attached.wbar_lagrangian_valid
    assert valid.any()
    np.testing.assert_allclose(attached.wbar_lagrangian[valid], 1.0, atol=1e-2)
    hit = attached.wbar.valid_mask
    np.testing.assert_allclose(attached.wbar.values[hit], 1.0, atol=1e-2)
    assert attached.meta["excluded_fraction"] < 0.02


def test_linear_param_image_hits_every_cell(h1, linear_param):
    # Arrange
    phi, param = linear_param

    # Act
    attached = attach_wbar(h1, phi, param)

    # Assert: curves seeded past the box sweep all of it
    assert attached.meta["unhit_cells"] == 0
    assert attached.meta["image_cells"] == int(np.prod(phi.grid.counts))


def test_surjectivity_fails_when_the_image_misses_half_the_box(h1, linear_param, datum_factory):
    # Arrange: every curve pushed into the upper half y >= 0
    phi, param = linear_param
    upper_half = replace(param, chi=(np.maximum(param.chi[0], 0.0),))

    # Act
    report = verify_lagrangian(h1, phi, upper_half, datum_factory(values=(1.0,)))

    # Assert
    surjectivity = report.get("surjectivity")
    assert surjectivity.status is CheckStatus.FAIL
    assert surjectivity.details["coverage"] < surjectivity.details["min_coverage"]
    assert report.get("LS3").status is CheckStatus.FAIL
    assert report.get("LS3").details["unhit_cells"] > 0


# ------------------------------------------------
# Extraction on constant graphs
# ------------------------------------------------

@pytest.mark.parametrize("c", [-0.5, 0.0, 0.7])
def test_extracted_datum_of_constant_graph_is_zero(h1, field_factory, c):
    # Arrange: φ ≡ c has straight characteristics y + c t
    phi = field_factory(fn=lambda a: np.full(len(a), c))
    param = build_full_param(h1, phi, 2)

    # Act
    wbar = extract_wbar(h1, phi, param)

    # Assert
    assert wbar.valid_mask.any()
    np.testing.assert_allclose(wbar.values[wbar.valid_mask], 0.0, atol=1e-6)
