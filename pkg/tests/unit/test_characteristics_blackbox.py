"""
Unit tests for characteristic curves of D^φ_j, derived from closed-form cases:
- φ = x2 in H¹ gives γ(t) = y0 + t²/2
- leaving the box truncates, starting on its edge and leaving fails
- the Peano funnel of γ' = 2√γ through the origin (minimal 0, maximal t²)
- curves of a Lipschitz field compose as a flow and keep the order of their initial values
- uncoupled components are lines with slope ½ Σ b^(s)_{lj} x_l

Run with pytest:
    python -m pytest tests/unit/test_characteristics_blackbox.py
Run with coverage:
    python -m pytest --cov=app --cov-report=term-missing tests/unit/test_characteristics_blackbox.py
"""
import numpy as np
import pytest

from app.domain.enums import CurveFlavor, GroupKind
from app.domain.exceptions import BadParams, ImmediateExit, IndexOutOfRange, NonMonotoneFamily, OutOfDomain
from app.domain.rules import characteristics
from app.domain.rules.characteristics import (
    integrate,
    line_slopes,
    lipschitz_along,
    min_forward_max_backward,
    min_max_through,
    reconstruct,
    reduce_vertical,
    reference_component,
    rhs,
)


def sqrt_burgers(a: np.ndarray) -> np.ndarray:
    return 2.0 * np.sign(a[:, 1]) * np.sqrt(np.abs(a[:, 1]))


# ------------------------------------------------
# Plain integration
# ------------------------------------------------

def test_linear_field_gives_parabola(h1, field_factory):
    # Arrange
    phi = field_factory(fn=lambda a: a[:, 0])

    # Act
    curve = integrate(h1, phi, 2, ([], [0.0]), (0.0, 1.0), step=1e-3)

    # Assert
    assert curve.truncated is False
    np.testing.assert_allclose(curve.component(1), curve.t_samples**2 / 2, atol=1e-10)
    assert curve.t_samples[-1] == pytest.approx(1.0)


def test_rhs_matches_coupling_times_phi(h1, field_factory):
    # Arrange
    phi = field_factory(fn=lambda a: a[:, 0])

    # Act
    value = rhs(h1, phi, 2, 1, 0.5, [], [0.0])

    # Assert: b^(1)_{12} φ = 0.5
    assert value == pytest.approx(0.5)


def test_rhs_rejects_bad_vertical_index(h1, field_factory):
    with pytest.raises(IndexOutOfRange):
        rhs(h1, field_factory(), 2, 2, 0.5, [], [0.0])


def test_curve_leaving_the_box_is_truncated(burgers_group, field_factory):
    # Arrange: φ ≡ 1 so γ = 0.9 + t leaves y <= 1 at t = 0.1
    phi = field_factory(fn=lambda a: np.ones(len(a)))

    # Act
    curve = integrate(burgers_group, phi, 2, ([], [0.9]), (0.0, 1.0), step=1e-3)

    # Assert
    assert curve.truncated is True
    assert curve.t_samples[-1] <= 0.1 + 1e-9
    assert np.all(curve.component(1) <= 1.0 + 1e-9)


def test_curve_leaving_from_its_initial_point_fails(burgers_group, field_factory):
    # Arrange
    phi = field_factory(fn=lambda a: np.ones(len(a)))

    # Act / Assert
    with pytest.raises(ImmediateExit):
        integrate(burgers_group, phi, 2, ([], [1.0]), (0.0, 1.0), step=1e-3)


def test_initial_point_outside_the_box(h1, field_factory):
    with pytest.raises(OutOfDomain):
        integrate(h1, field_factory(), 2, ([], [5.0]), (0.0, 1.0))


@pytest.mark.parametrize("step", [0.0, -1e-3])
def test_step_must_be_positive(h1, field_factory, step):
    with pytest.raises(BadParams):
        integrate(h1, field_factory(), 2, ([], [0.0]), (0.0, 1.0), step=step)


def test_lipschitz_along_linear_characteristic_is_one(h1, field_factory):
    # Arrange: φ = x2 along the curve is t
    phi = field_factory(fn=lambda a: a[:, 0])
    curve = integrate(h1, phi, 2, ([], [0.0]), (0.0, 1.0), step=1e-2)

    # Act / Assert
    assert lipschitz_along(h1, phi, curve) == pytest.approx(1.0, abs=1e-9)


# ------------------------------------------------
# Extremal solutions
# ------------------------------------------------

def test_funnel_through_origin(burgers_group, field_factory, grid_factory):
    # Arrange: γ' = 2√γ from γ(0) = 0 has every solution between 0 and t²
    grid = grid_factory(lower=(0.0, 0.0), upper=(1.0, 1.5), counts=(21, 31))
    phi = field_factory(fn=sqrt_burgers, grid=grid)

    # Act
    minimal, maximal = min_max_through(
        burgers_group, phi, 2, (0.0, [], [0.0]), (0.0, 1.0), step=1e-3, gap_tol=1e-2
    )

    # Assert
    t = minimal.t_samples
    assert minimal.flavor is CurveFlavor.MINIMAL
    assert maximal.flavor is CurveFlavor.MAXIMAL
    assert np.max(np.abs(minimal.component(1))) <= 1e-3
    assert np.max(np.abs(maximal.component(1) - t**2)) <= 1e-2


def test_funnel_from_interior_time_covers_both_directions(burgers_group, field_factory, grid_factory):
    # Arrange: branching at t̄ = 0.5; backward in time only γ = 0 stays in the box
    grid = grid_factory(lower=(0.0, 0.0), upper=(1.0, 1.5), counts=(21, 31))
    phi = field_factory(fn=sqrt_burgers, grid=grid)

    # Act
    minimal, maximal = min_max_through(
        burgers_group, phi, 2, (0.5, [], [0.0]), (0.0, 1.0), step=1e-3, gap_tol=1e-2
    )

    # Assert
    t = minimal.t_samples
    assert t[0] == pytest.approx(0.0)
    assert t[-1] == pytest.approx(1.0)
    assert np.all(minimal.component(1) <= maximal.component(1))
    np.testing.assert_allclose(maximal.component(1), np.where(t > 0.5, (t - 0.5) ** 2, 0.0), atol=1e-2)
    assert np.max(np.abs(minimal.component(1))) <= 1e-3


def test_extremal_start_outside_interval(h1, field_factory):
    with pytest.raises(BadParams):
        min_max_through(h1, field_factory(), 2, (1.5, [], [0.0]), (0.0, 1.0))


def test_crossing_extremal_branches_are_reported(h1, field_factory, monkeypatch):
    # Arrange: branches whose ε-limits come out in the wrong order
    def crossed_limits(spec, field, j, xhat, t_bar, y_bar, times, eps_seq, bias_sign):
        start = np.atleast_2d(y_bar)[0, 0]
        limit = start - bias_sign * 0.1 * np.abs(np.asarray(times) - t_bar)
        return limit[:, None], np.zeros(1), np.zeros(1)

    monkeypatch.setattr(characteristics, "extremal_batch", crossed_limits)

    # Act / Assert
    with pytest.raises(NonMonotoneFamily):
        min_max_through(h1, field_factory(), 2, (0.0, [], [0.0]), (0.0, 1.0), step=1e-2)


def test_glued_curve_of_a_lipschitz_field_is_the_plain_curve(h1, field_factory):
    # Arrange: φ = x2 has a unique characteristic through every point
    phi = field_factory(fn=lambda a: a[:, 0])

    # Act
    glued = min_forward_max_backward(h1, phi, 2, (0.0, [], [-0.5]), (0.0, 1.0), step=1e-2)
    plain = integrate(h1, phi, 2, ([], [-0.5]), (0.0, 1.0), step=1e-2)

    # Assert
    assert glued.flavor is CurveFlavor.MIN_FORWARD_MAX_BACKWARD
    expected = np.interp(glued.t_samples, plain.t_samples, plain.component(1))
    np.testing.assert_allclose(glued.component(1), expected, atol=1e-8)


def test_glued_funnel_curve_is_minimal_forward_and_maximal_backward(burgers_group, field_factory, grid_factory):
    # Arrange: branching at t̄ = 0.5
    grid = grid_factory(lower=(0.0, 0.0), upper=(1.0, 1.5), counts=(21, 31))
    phi = field_factory(fn=sqrt_burgers, grid=grid)
    point, interval = (0.5, [], [0.0]), (0.0, 1.0)

    # Act
    glued = min_forward_max_backward(burgers_group, phi, 2, point, interval, step=1e-3, gap_tol=1e-2)
    minimal, maximal = min_max_through(burgers_group, phi, 2, point, interval, step=1e-3, gap_tol=1e-2)

    # Assert: γ ≡ 0 after t̄ although the maximal curve reaches (t - ½)²
    t = glued.t_samples
    after = t >= 0.5
    assert glued.flavor is CurveFlavor.MIN_FORWARD_MAX_BACKWARD
    assert np.max(np.abs(glued.component(1)[after])) <= 1e-3
    assert maximal.component(1)[-1] == pytest.approx(0.25, abs=1e-2)
    np.testing.assert_array_equal(glued.component(1)[~after], maximal.component(1)[~after])
    np.testing.assert_array_equal(glued.component(1)[after], minimal.component(1)[after])


# ------------------------------------------------
# Flow properties
# ------------------------------------------------

def smooth_drift(a: np.ndarray) -> np.ndarray:
    return 0.5 * np.sin(3.0 * a[:, 0]) + 0.3 * a[:, 1]


def test_characteristics_compose_as_a_flow(h1, field_factory):
    # Arrange: follow the curve to t = 0.4, then restart from where it is
    phi = field_factory(fn=smooth_drift)
    whole = integrate(h1, phi, 2, ([], [0.1]), (0.0, 1.0), step=1e-3)
    middle = float(whole.at(0.4)[0])

    # Act
    restarted = integrate(h1, phi, 2, ([], [middle]), (0.4, 1.0), step=1e-3)

    # Assert
    later = whole.t_samples >= 0.4 - 1e-12
    expected = np.interp(restarted.t_samples, whole.t_samples[later], whole.component(1)[later])
    np.testing.assert_allclose(restarted.component(1), expected, atol=1e-8)


def test_characteristics_keep_the_order_of_initial_values(h1, field_factory):
    # Arrange
    phi = field_factory(fn=smooth_drift)
    starts = [-0.6, -0.2, 0.0, 0.15, 0.3]

    # Act
    curves = [integrate(h1, phi, 2, ([], [y0]), (0.0, 1.0), step=1e-3) for y0 in starts]

    # Assert: strictly ordered at every common time
    assert not any(c.truncated for c in curves)
    stacked = np.stack([c.component(1) for c in curves])
    assert np.all(np.diff(stacked, axis=0) > 0)


# ------------------------------------------------
# Vertical reduction
# ------------------------------------------------

@pytest.mark.parametrize("kind, params, j, expected", [
    (GroupKind.HEISENBERG, {"k": 1}, 2, 1),
    (GroupKind.FREE2, {"m": 3}, 2, 1),
    (GroupKind.FREE2, {"m": 3}, 3, 2),
    (GroupKind.COMPLEXIFIED_HEISENBERG, {}, 3, None),
])
def test_reference_component(spec_factory, kind, params, j, expected):
    assert reference_component(spec_factory(kind=kind, **params), j) == expected


def test_free2_line_slope_depends_on_frozen_coordinate(spec_factory):
    # Arrange
    spec = spec_factory(kind=GroupKind.FREE2, m=3)

    # Act: j = 2 with x3 = 2 frozen
    slopes = line_slopes(spec, 2, [2.0])

    # Assert: only the (3, 2) component drifts, with slope ½ x3
    np.testing.assert_allclose(slopes, [0.0, 0.0, 1.0])


def test_uncoupled_components_are_lines(spec_factory):
    # Arrange: complexified Heisenberg, j = 3 drives no component
    spec = spec_factory(kind=GroupKind.COMPLEXIFIED_HEISENBERG)
    t = np.linspace(0.0, 1.0, 11)

    # Act: x̂_3 = (x2, x4) = (1, 0)
    others = reduce_vertical(spec, 3, np.zeros_like(t), [0.0, 0.25], [1.0, 0.0], t)

    # Assert: the second component is 0.25 + ½ t
    assert others.shape == (11, 1)
    np.testing.assert_allclose(others[:, 0], 0.25 + 0.5 * t, atol=1e-14)


def test_reconstruct_keeps_reference_and_adds_lines(spec_factory):
    # Arrange: free2(3), j = 2 couples only component 1
    spec = spec_factory(kind=GroupKind.FREE2, m=3)
    t = np.linspace(0.0, 1.0, 5)
    u = np.sin(t)

    # Act
    gamma = reconstruct(spec, 2, 1, u, [2.0], [0.1, 0.2, 0.3], t, 0.0)

    # Assert
    assert gamma.shape == (5, 3)
    np.testing.assert_allclose(gamma[:, 0], u, atol=1e-14)
    np.testing.assert_allclose(gamma[:, 1], 0.2, atol=1e-14)
    np.testing.assert_allclose(gamma[:, 2], 0.3 + t, atol=1e-14)
