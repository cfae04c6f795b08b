"""Label-direction mollification of a Lagrangian parameterization.

χ^ε = anchor + (1 + εy)·((χ - anchor) ∗ ρ_ε)(y) with the polynomial bump
ρ(u) = (315/256)(1 - u²)⁴ on [-1, 1] scaled to half width ε, then φ^ε and w^ε
read off the mollified family by inverting y ↦ χ^ε(t, y).
"""

import logging
from typing import Optional

import numpy as np
from scipy.ndimage import convolve1d

from ..enums import Interpolation
from ..exceptions import BadParams, InversionFailure, KernelTooWide, NoReferenceComponent
from ..models.GroupSpec import GroupSpec
from ..models.LagrangianParam import LagrangianParam
from ..models.ScalarField import ScalarField
from .characteristics import line_slopes
from .lagrangian import second_t_difference

logger = logging.getLogger(__name__)

KERNEL_MASS = 315.0 / 256.0
MARGIN_TOL = 1e-12


def mollifier_weights(eps: float, spacing: float) -> np.ndarray:
    """Discrete kernel on a label lattice of the given spacing, renormalized to unit sum."""
    if eps <= 0 or spacing <= 0:
        raise BadParams("eps and spacing must be positive")
    half = int(np.floor(eps / spacing + 1e-9))
    u = np.arange(-half, half + 1) * spacing / eps
    weights = KERNEL_MASS * np.clip(1.0 - u**2, 0.0, None) ** 4 * spacing / eps
    if weights.sum() <= 0:
        return np.ones(1)
    return weights / weights.sum()


def default_anchor(param: LagrangianParam, s: int) -> float:
    """One box height below the lowest of the box and χ, so χ - anchor stays positive."""
    lower = param.meta["y_lower"][s - 1]
    upper = param.meta["y_upper"][s - 1]
    if s == param.reference:
        lower = min(lower, param.meta.get("chi_lower", lower))
    return lower - (upper - lower)


def mollify_chi(
    param: LagrangianParam,
    eps: float,
    component: Optional[int] = None,
    anchor: Optional[float] = None,
) -> np.ndarray:
    """χ^ε for one component (the reference one by default), on the parameter lattice."""
    s = component or param.reference or 1
    labels = param.label_axes[s - 1]
    span = float(labels[-1] - labels[0])
    if eps <= 0:
        raise BadParams(f"eps must be positive, got {eps}")
    if eps > span / 2:
        raise KernelTooWide(f"kernel half width {eps} exceeds half the label span {span / 2:.4f}")
    if anchor is None:
        anchor = default_anchor(param, s)

    axis = 2 + (s - 1)
    weights = mollifier_weights(eps, float(labels[1] - labels[0]))
    smoothed = convolve1d(param.chi[s - 1] - anchor, weights, axis=axis, mode="nearest")
    shape = [1] * smoothed.ndim
    shape[axis] = -1
    return anchor + (1.0 + eps * labels.reshape(shape)) * smoothed


def mollification_margin(chi_eps: np.ndarray, axis: int) -> float:
    """Smallest label-direction increment of χ^ε over the lattice."""
    return float(np.min(np.diff(chi_eps, axis=axis)))


def mollified_phi_and_w(
    spec: GroupSpec,
    field: ScalarField,
    param: LagrangianParam,
    eps: float,
    margin_tol: float = MARGIN_TOL,
) -> tuple[ScalarField, ScalarField]:
    """
    φ^ε and w^ε on the field lattice.

    On the parameter lattice b·φ^ε(Υ^ε) = ∂_t χ^ε - c and b·w^ε(Υ^ε) = ∂²_t χ^ε;
    each field node is then located in the label by monotone inversion of
    χ^ε(t, x̂, ŷ, ·). Nodes outside the mollified image are marked invalid.
    Uncoupled components use the nearest label of their line.
    """
    if param.reference is None:
        raise NoReferenceComponent(f"direction {param.j} has no coupled component")
    r = param.reference - 1
    axis = 2 + r
    chi_eps = mollify_chi(param, eps)
    margin = mollification_margin(chi_eps, axis)
    if margin <= margin_tol:
        raise InversionFailure(f"mollified map is not strictly increasing (margin {margin:.3e})")
    logger.debug("mollified j=%d at eps=%.3g, margin %.3e", param.j, eps, margin)

    j = param.j
    h = param.step
    b = spec.coupling(j)[r]
    slopes = line_slopes(spec, j, param.xhat_nodes)
    rank = chi_eps.ndim
    c_ref = slopes[:, r].reshape((1, -1) + (1,) * (rank - 2))
    phi_lag = (np.gradient(chi_eps, h, axis=0, edge_order=2) - c_ref) / b
    w_lag = second_t_difference(chi_eps, h) / b

    grid = field.grid
    m, n = spec.m, spec.n
    y_axis = m - 1 + r
    t0 = float(param.t_samples[0])
    t_index = np.rint((grid.axes[j - 2] - t0) / h).astype(int)
    other_x = [k for k in range(m - 1) if k != j - 2]
    other_x_counts = [grid.counts[k] for k in other_x]
    t_bar = param.meta.get("t_bar", t0)
    y_nodes = grid.axes[y_axis]

    phi_out = np.zeros(grid.counts)
    w_out = np.zeros(grid.counts)
    valid = np.zeros(grid.counts, dtype=bool)
    free_axes = [k for k in range(grid.ndim) if k != y_axis]
    for index in np.ndindex(*[grid.counts[k] for k in free_axes]):
        at = dict(zip(free_axes, index))
        k_t = int(t_index[at[j - 2]])
        x_flat = (
            int(np.ravel_multi_index([at[k] for k in other_x], other_x_counts)) if other_x else 0
        )
        elapsed = float(param.t_samples[k_t]) - t_bar
        selector = [k_t, x_flat]
        for s in range(n):
            if s == r:
                selector.append(slice(None))
                continue
            label = grid.axes[m - 1 + s][at[m - 1 + s]] - slopes[x_flat, s] * elapsed
            selector.append(int(np.argmin(np.abs(param.label_axes[s] - label))))
        selector = tuple(selector)

        column = chi_eps[selector]
        phi_vals = np.interp(y_nodes, column, phi_lag[selector], left=np.nan, right=np.nan)
        w_vals = np.interp(y_nodes, column, w_lag[selector], left=np.nan, right=np.nan)

        target = list(index)
        target.insert(y_axis, slice(None))
        target = tuple(target)
        hit = np.isfinite(phi_vals)
        phi_out[target] = np.where(hit, phi_vals, 0.0)
        w_out[target] = np.where(hit, w_vals, 0.0)
        valid[target] = hit

    phi_eps = ScalarField(grid=grid, values=phi_out, interp=Interpolation.MULTILINEAR,
                          valid=valid, axis_names=field.axis_names)
    w_eps = ScalarField(grid=grid, values=w_out, interp=Interpolation.NEAREST,
                        valid=valid, axis_names=field.axis_names)
    return phi_eps, w_eps
