"""Intrinsic derivatives D^φ_j, weak-form residuals and level-set gradients.

All fields here live on W with axes (x_2..x_m, y_1..y_n). For 2 <= j <= m,
D^φ_j = ∂_{x_j} + Σ_s (φ b^(s)_{1j} + ½ Σ_{l>=2} x_l b^(s)_{lj}) ∂_{y_s},
the W-projection of X_j along the graph for the law y + y' - ½⟨Bx, x'⟩ (so the
signs are those of b^(s)_{j1} and b^(s)_{jl} reversed).
"""

import logging
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from ..enums import Interpolation
from ..exceptions import GridTooCoarse, IndexOutOfRange, SupportNotContained, VanishingX1f
from ..models.Datum import Datum
from ..models.GroupSpec import GroupSpec
from ..models.ScalarField import Grid, ScalarField
from ..models.TestFunction import TestFunction
from .graph_geometry import embed_w, v_element
from .group_law import as_points, frame_at, multiply

logger = logging.getLogger(__name__)

QUADRATURE_NODES = 256
MAX_QUADRATURE_POINTS = 2**20
VANISHING_TOL = 1e-12


def _check_direction(spec: GroupSpec, j: int) -> None:
    if not 2 <= j <= spec.m:
        raise IndexOutOfRange(f"derivative index j must lie in 2..{spec.m}, got {j}")


def line_coefficients(spec: GroupSpec, j: int, xw) -> np.ndarray:
    """c_s = ½ Σ_{l>=2} b^(s)_{lj} x_l, shape (..., n)."""
    xw = np.asarray(xw, dtype=float)
    return 0.5 * np.einsum("sl,...l->...s", spec.B[:, 1:, j - 1], xw)


def dphi_coefficients(spec: GroupSpec, j: int, a, phi_a) -> np.ndarray:
    """Coefficients of D^φ_j over (∂_{x_2..x_m}, ∂_{y_1..y_n}) at a, with φ(a) = phi_a."""
    _check_direction(spec, j)
    a = np.asarray(a, dtype=float)
    phi_a = np.asarray(phi_a, dtype=float)
    xw = a[..., : spec.m - 1]
    lead = np.broadcast_shapes(xw.shape[:-1], phi_a.shape)

    coeffs = np.zeros(lead + (spec.w_dim,))
    coeffs[..., j - 2] = 1.0
    coeffs[..., spec.m - 1 :] = (
        phi_a[..., None] * spec.coupling(j) + line_coefficients(spec, j, xw)
    )
    return coeffs


def apply_dphi(spec: GroupSpec, field: ScalarField, j: int) -> ScalarField:
    """
    Lattice values of D^φ_j φ by centered differences.

    One-sided differences on the boundary layer; those nodes are marked invalid.
    """
    _check_direction(spec, j)
    grid = field.grid
    needed = [j - 2] + list(range(spec.m - 1, spec.w_dim))
    for axis in needed:
        if grid.counts[axis] < 3:
            raise GridTooCoarse(f"axis {axis} has {grid.counts[axis]} nodes, need at least 3")

    gradients = np.gradient(field.values, *grid.axes)
    if grid.ndim == 1:
        gradients = [gradients]
    coeffs = dphi_coefficients(spec, j, grid.mesh(), field.values.reshape(-1)).reshape(
        grid.counts + (grid.ndim,)
    )
    values = sum(coeffs[..., k] * gradients[k] for k in needed)

    valid = np.ones(grid.counts, dtype=bool)
    for axis in needed:
        edge = [slice(None)] * grid.ndim
        for index in (0, -1):
            edge[axis] = index
            valid[tuple(edge)] = False
    return ScalarField(grid=grid, values=values, valid=valid, axis_names=field.axis_names)


def distributional_residual(
    spec: GroupSpec,
    field: ScalarField,
    datum: Datum,
    zeta: TestFunction,
    j: int,
    *,
    nodes: int = QUADRATURE_NODES,
    max_points: int = MAX_QUADRATURE_POINTS,
) -> float:
    """
    R_j = ∫ φ (∂_j ζ + Σ_s c_s ∂_{y_s} ζ) + ½ φ² Σ_s b^(s)_{1j} ∂_{y_s} ζ + w_j ζ.

    Composite midpoint rule on the support box of ζ; R_j vanishes for a
    distributional solution of D^φ_j φ = w_j.
    """
    _check_direction(spec, j)
    grid = field.grid
    if np.any(zeta.lower < np.array(grid.lower)) or np.any(zeta.upper > np.array(grid.upper)):
        raise SupportNotContained("test function support leaves the field domain")

    ndim = grid.ndim
    per_axis = min(nodes, int(np.floor(max_points ** (1.0 / ndim) + 1e-9)))
    spacing = (zeta.upper - zeta.lower) / per_axis
    centers = [zeta.lower[k] + (np.arange(per_axis) + 0.5) * spacing[k] for k in range(ndim)]
    points = np.stack([g.reshape(-1) for g in np.meshgrid(*centers, indexing="ij")], axis=-1)

    phi = field.evaluate(points)
    w = datum.component(j).evaluate(points)
    zeta_value = zeta.value(points)
    zeta_grad = zeta.gradient(points)
    y_grad = zeta_grad[:, spec.m - 1 :]

    lines = line_coefficients(spec, j, points[:, : spec.m - 1])
    transport = zeta_grad[:, j - 2] + np.sum(lines * y_grad, axis=-1)
    quadratic = 0.5 * phi**2 * (y_grad @ spec.coupling(j))
    integrand = phi * transport + quadratic + w * zeta_value
    return float(np.sum(integrand) * np.prod(spacing))


def residual_order(
    spec: GroupSpec,
    field: ScalarField,
    datum: Datum,
    zeta: TestFunction,
    j: int,
    nodes: int = 64,
) -> tuple[float, float, float]:
    """Residuals at nodes and 2·nodes, with the observed order log2(|R_N| / |R_2N|)."""
    coarse = distributional_residual(spec, field, datum, zeta, j, nodes=nodes)
    fine = distributional_residual(spec, field, datum, zeta, j, nodes=2 * nodes)
    order = float(np.log2(abs(coarse) / abs(fine))) if fine != 0 and coarse != 0 else np.inf
    return coarse, fine, order


def build_test_battery(
    grid: Grid, count: int, radius_fraction: float, seed: int = 0
) -> list[TestFunction]:
    """Deterministic quartic bumps with supports strictly inside the grid box."""
    rng = np.random.default_rng(seed)
    lower = np.array(grid.lower)
    upper = np.array(grid.upper)
    radii = radius_fraction * (upper - lower) / 2.0
    return [
        TestFunction(center=rng.uniform(lower + radii, upper - radii), radii=radii)
        for _ in range(count)
    ]


def gradient_from_levelset(
    spec: GroupSpec,
    f: Callable[[np.ndarray], np.ndarray],
    grad_f: Callable[[np.ndarray], np.ndarray],
    point,
) -> np.ndarray:
    """-(X_2 f / X_1 f, ..., X_m f / X_1 f) at a graph point of {f = 0}."""
    point = as_points(spec, point)
    horizontal = np.einsum("...kc,...c->...k", frame_at(spec, point), grad_f(point))[..., : spec.m]
    x1f = horizontal[..., 0]
    if np.any(np.abs(x1f) <= VANISHING_TOL):
        raise VanishingX1f("X_1 f vanishes at a level-set point")
    return -horizontal[..., 1:] / x1f[..., None]


def solve_levelset_graph(
    spec: GroupSpec,
    f: Callable[[np.ndarray], np.ndarray],
    grid: Grid,
    bracket: tuple[float, float] = (-10.0, 10.0),
    axis_names: tuple[str, ...] = (),
) -> ScalarField:
    """φ on the grid with f(i(a) · (φ(a), 0, ..., 0)) = 0, solved node by node."""
    nodes = grid.mesh()
    base = embed_w(spec, nodes)
    values = np.empty(len(nodes))

    def on_level(t: float, point: np.ndarray) -> float:
        return float(f(multiply(spec, point, v_element(spec, t))))

    for k, point in enumerate(base):
        values[k] = brentq(on_level, *bracket, args=(point,), xtol=1e-14)
    logger.debug("solved level-set graph on %d nodes", len(nodes))
    return ScalarField(
        grid=grid,
        values=values.reshape(grid.counts),
        interp=Interpolation.MULTILINEAR,
        axis_names=axis_names,
    )
