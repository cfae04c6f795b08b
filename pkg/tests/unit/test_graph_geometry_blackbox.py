"""
Unit tests for intrinsic graphs over the split G = W · V, derived from the
graph-geometry operation tables:
- canonical projection and the inclusion of W
- intrinsic Lipschitz and vertical Hölder estimators on closed-form fields
- the refinement (divergence) flag
- left translation of graphs

Run with pytest:
    python -m pytest tests/unit/test_graph_geometry_blackbox.py
Run with coverage:
    python -m pytest --cov=app --cov-report=term-missing tests/unit/test_graph_geometry_blackbox.py
"""
import numpy as np
import pytest

from app.domain.exceptions import DimensionMismatch, OutOfDomain
from app.domain.rules.graph_geometry import (
    embed_w,
    estimate_lipschitz,
    estimate_vertical_holder,
    graph_distance_bounds,
    graph_point,
    project_canonical,
    refinement_check,
    sample_pairs,
    shift_quantity,
    translate_graph,
)
from app.domain.rules.group_law import multiply


# ------------------------------------------------
# Canonical split
# ------------------------------------------------

def test_project_canonical_h1_example(h1):
    # Act
    a, v = project_canonical(h1, [1.0, 1.0, 0.5])

    # Assert: a = (x2, y) = (1, 1), v = 1
    np.testing.assert_allclose(a, [1.0, 1.0])
    assert float(v) == pytest.approx(1.0)


def test_project_canonical_multiplies_back(h1, rng):
    # Arrange
    points = rng.uniform(-2.0, 2.0, size=(50, 3))

    # Act
    a, v = project_canonical(h1, points)
    rebuilt = multiply(h1, embed_w(h1, a), np.stack([v, np.zeros(50), np.zeros(50)], axis=-1))

    # Assert
    np.testing.assert_allclose(rebuilt, points, atol=1e-13)


def test_embed_w_rejects_wrong_width(h1):
    with pytest.raises(DimensionMismatch):
        embed_w(h1, [1.0, 2.0, 3.0])


def test_graph_point_outside_domain(h1, field_factory):
    # Arrange
    phi = field_factory()

    # Act / Assert
    with pytest.raises(OutOfDomain):
        graph_point(h1, phi, [2.0, 0.0])


def test_shift_quantity_of_a_point_with_itself_is_zero(h1, field_factory):
    # Arrange
    phi = field_factory()

    # Act
    shift = shift_quantity(h1, phi, [0.5, 0.25], [0.5, 0.25])

    # Assert
    assert float(shift) == pytest.approx(0.0, abs=1e-15)


# ------------------------------------------------
# Estimators
# ------------------------------------------------

def test_linear_field_has_intrinsic_lipschitz_constant_one(h1, field_factory):
    # Arrange: φ = x2; pairs along x2 at x2 = 0 reach ratio 1
    phi = field_factory(fn=lambda a: a[:, 0])

    # Act
    estimate = estimate_lipschitz(h1, phi)

    # Assert
    assert estimate == pytest.approx(1.0, abs=1e-12)


def test_vertical_holder_of_square_root_is_one_on_unit_interval(h1, field_factory, grid_factory):
    # Arrange: φ = |y|^(1/2) on y in [0, 1]
    grid = grid_factory(lower=(0.0, 0.0), upper=(1.0, 1.0), counts=(5, 11))
    phi = field_factory(fn=lambda a: np.sqrt(np.abs(a[:, 1])), grid=grid)

    # Act
    estimate = estimate_vertical_holder(h1, phi)

    # Assert
    assert estimate == pytest.approx(1.0, abs=1e-12)


def test_quarter_power_is_flagged_diverging(h1, field_factory):
    # Arrange: φ = |y|^(1/4) on y in [-1, 1] with 0 on both lattices
    phi = field_factory(fn=lambda a: np.abs(a[:, 1]) ** 0.25)

    # Act
    result = refinement_check(estimate_vertical_holder, h1, phi, growth_tol=0.1)

    # Assert: halving the spacing multiplies the quotient by 2^(1/4)
    assert result["diverging"] is True
    assert result["ratio"] == pytest.approx(2.0 ** 0.25, rel=1e-9)


@pytest.mark.parametrize("fn", [
    lambda a: a[:, 0],                         # φ = x2
    lambda a: np.zeros(len(a)),                # φ = 0
    lambda a: np.sqrt(np.abs(a[:, 1])),        # exactly 1/2-Hölder
])
def test_bounded_quantities_are_not_flagged(h1, field_factory, fn):
    # Arrange
    phi = field_factory(fn=fn)

    # Act
    result = refinement_check(estimate_vertical_holder, h1, phi, growth_tol=0.1)

    # Assert
    assert result["diverging"] is False


def test_sample_pairs_exhaustive_below_limit():
    # Act
    first, second = sample_pairs(5, pair_limit=100)

    # Assert: all 10 pairs i < j
    assert len(first) == 10
    assert np.all(first < second)


def test_sample_pairs_random_above_limit_is_seeded():
    # Act
    run_a = sample_pairs(2000, pair_limit=1000, seed=3)
    run_b = sample_pairs(2000, pair_limit=1000, seed=3)

    # Assert
    np.testing.assert_array_equal(run_a[0], run_b[0])
    assert np.all(run_a[0] < run_a[1])


# ------------------------------------------------
# Translation
# ------------------------------------------------

def test_vertical_translation_shifts_the_domain(h1, field_factory):
    # Arrange: φ = x2 translated by q = (0, 0, 0.5)
    phi = field_factory(fn=lambda a: a[:, 0])

    # Act
    moved = translate_graph(h1, phi, [0.0, 0.0, 0.5])

    # Assert: same values over the box shifted up by 0.5
    assert moved.grid.lower == pytest.approx((0.0, -0.5))
    assert moved.grid.upper == pytest.approx((1.0, 1.5))
    np.testing.assert_allclose(moved.values, phi.values, atol=1e-14)


def test_graph_distance_bounds_are_positive_and_ordered(h1, field_factory, grid_factory):
    # Arrange
    phi = field_factory(fn=lambda a: a[:, 0], grid=grid_factory(counts=(5, 9)))

    # Act
    lower, upper = graph_distance_bounds(h1, phi)

    # Assert: graph distance and shift quantity are comparable
    assert 0.0 < lower <= upper < np.inf
